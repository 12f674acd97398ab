"""Command-line front end.

Subcommands cover the full pipeline: channel tables, power-law fits, relay
planning, the 20-row comparison table, and the open-distance surface. Output
is machine readable (JSON or CSV) with canonical number formatting so that
re-emitting parsed output is byte identical.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
import json

import numpy as np

from . import acoustics, fitmodels, oracle, planner
from .errors import UanRelayError, ValidationError

__all__ = ["RunConfig", "main", "entrypoint"]

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_VALIDATION = 3
_EXIT_NUMERIC = 4

_TABLE1_SNRS = (10.0, 15.0, 20.0, 25.0)
_TABLE1_DISTANCES = (10.0, 20.0, 30.0, 40.0, 50.0)
_TURNING_SPAN = (0.75, 1.45, 10)
"""Per-combo l grid for oracle turning sweeps: closed-form anchor times
linspace(start, stop, count). The closed form tracks the oracle within 10%,
so the span safely brackets the transition."""


class _CliUsageError(Exception):
    """Bad flag/config values detected after argparse (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved run settings: environment, packet defaults, output selection."""

    k: float = 1.5
    s: float = 0.5
    w: float = 0.0
    c: float = 1500.0
    eta: float = 0.25
    packet_bits: int = 2048
    alpha: float = 1.0
    format: str = "json"
    output: str = ""

    def environment(self) -> acoustics.Environment:
        return acoustics.Environment(k=self.k, s=self.s, w=self.w, c=self.c, eta=self.eta)


def fmt_num(value) -> str:
    """Canonical number formatting: 12 significant digits, decimal literals
    below 1e6, trimmed trailing zeros."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if not math.isfinite(x):
        raise ValidationError(f"cannot format non-finite number {x}")
    if x == 0.0:
        return "0"
    if abs(x) >= 1e6:
        mant, exp = f"{x:.11e}".split("e")
        mant = mant.rstrip("0").rstrip(".")
        return f"{mant}e+{int(exp)}"
    text = f"{x:.12g}"
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def _json_text(value, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {_json_text(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        items = [f"{inner}{_json_text(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    return fmt_num(value)


def _emit_json(doc, out):
    out.write(_json_text(doc) + "\n")


def _emit_csv(header, rows, out):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else fmt_num(v) for v in row) + "\n")


def _parse_range(text, flag):
    """Inclusive start:stop:step range; stop included when step divides evenly."""
    parts = text.split(":")
    if len(parts) != 3:
        raise _CliUsageError(f"{flag} expects start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise _CliUsageError(f"{flag} has non-numeric parts: {text!r}")
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise _CliUsageError(f"{flag} parts must be finite: {text!r}")
    if step <= 0.0 or stop < start:
        raise _CliUsageError(f"{flag} describes an empty range: {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def _parse_list(text, flag):
    try:
        values = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise _CliUsageError(f"{flag} expects comma-separated numbers, got {text!r}")
    if not values:
        raise _CliUsageError(f"{flag} is empty")
    return values


_CONFIG_TYPES = {
    "k": float,
    "s": float,
    "w": float,
    "c": float,
    "eta": float,
    "packet_bits": int,
    "alpha": float,
    "format": str,
    "output": str,
}


def _parse_config(path):
    overrides = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise _CliUsageError(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _CliUsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_TYPES:
            raise _CliUsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = _CONFIG_TYPES[key](value)
        except ValueError:
            raise _CliUsageError(f"{path}:{lineno}: bad value for {key!r}: {value!r}")
    if "format" in overrides and overrides["format"] not in ("json", "csv"):
        raise _CliUsageError(f"config format must be json or csv, got {overrides['format']!r}")
    return overrides


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value config file, overridden by flags")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    common.add_argument("--output", default="", help="write output to this path instead of stdout")
    common.add_argument(
        "--json-errors",
        action="store_true",
        help="report errors as a JSON document on stdout",
    )
    for name, default, doc in (
        ("--k", 1.5, "spreading factor"),
        ("--s", 0.5, "shipping activity in [0, 1]"),
        ("--w", 0.0, "wind speed in m/s"),
        ("--c", 1500.0, "sound speed in m/s"),
        ("--eta", 0.25, "electrical-to-acoustic efficiency"),
    ):
        common.add_argument(name, type=float, default=default, help=doc)
    common.add_argument("--packet-bits", dest="packet_bits", type=int, default=2048, help="packet size in bits")
    common.add_argument("--alpha", type=float, default=1.0, help="bandwidth efficiency in bps/Hz")

    parser = argparse.ArgumentParser(
        prog="uanrelay",
        description="Underwater acoustic link budgets and relay planning.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_channel = sub.add_parser("channel", help="channel quantities over a frequency grid", parents=[common])
    p_channel.add_argument("--l", type=float, required=True, help="distance in km")
    p_channel.add_argument("--f", default="0.1:200:0.1", help="frequency grid in kHz, start:stop:step")

    p_fit = sub.add_parser("fit", help="fit bandwidth and power laws over distance", parents=[common])
    p_fit.add_argument("--l-range", dest="l_range", default="", help="distance grid start:stop:step; default two-band log grid")
    p_fit.add_argument("--snr", default="5,10,15,20,25", help="comma-separated target SNRs in dB")

    p_plan = sub.add_parser("plan", help="relay deployment decision for one link (always JSON)", parents=[common])
    p_plan.add_argument("--l", type=float, required=True, help="distance in km")
    p_plan.add_argument("--snr", type=float, required=True, help="target SNR in dB")
    p_plan.add_argument("--pr", type=float, required=True, help="receive power in W")

    p_table = sub.add_parser("table1", help="direct vs midpoint-relay comparison grid", parents=[common])
    p_table.add_argument("--pr", type=float, default=0.5, help="receive power in W")
    p_table.add_argument("--exact", action="store_true", help="add exact oracle energy columns")

    p_surface = sub.add_parser("surface", help="open-distance surface fit over (P_R, SNR)", parents=[common])
    p_surface.add_argument("--pr-range", dest="pr_range", default="0.1:2.0:0.38", help="receive power grid in W")
    p_surface.add_argument("--snr-range", dest="snr_range", default="10:25:2.5", help="target SNR grid in dB")
    p_surface.add_argument("--degrees", default="5,5", help="surface degrees m,n")
    p_surface.add_argument(
        "--analytic",
        action="store_true",
        help="use the closed-form open distance instead of the oracle sweep",
    )
    p_surface.add_argument(
        "--position-divisor",
        dest="position_divisor",
        type=int,
        default=400,
        help="oracle relay-position grid divisor per distance",
    )
    return parser


def _thread_count():
    raw = os.environ.get("RELAY_PLANNER_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise _CliUsageError(f"RELAY_PLANNER_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise _CliUsageError("RELAY_PLANNER_THREADS must be at least 1")
    return n


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        k=args.k,
        s=args.s,
        w=args.w,
        c=args.c,
        eta=args.eta,
        packet_bits=args.packet_bits,
        alpha=args.alpha,
        format=args.format,
        output=args.output,
    )


def _cmd_channel(args, cfg: RunConfig, out):
    env = cfg.environment()
    fs = _parse_range(args.f, "--f")
    if args.l <= 0 or not math.isfinite(args.l):
        raise ValidationError(f"distance must be positive, got {args.l}")
    rows = []
    for f in fs:
        f = float(f)
        absorption = acoustics.absorption_db_per_km(f)
        loss = acoustics.path_loss_db(args.l, f, env)
        noise = acoustics.noise_psd_db(f, env)
        rows.append((f, absorption, loss, noise, loss + noise))
    if cfg.format == "csv":
        _emit_csv(
            ("f_khz", "absorption_db_per_km", "path_loss_db", "noise_psd_db", "product_db"),
            rows,
            out,
        )
    else:
        _emit_json(
            {
                "l_km": args.l,
                "rows": [
                    {
                        "f_khz": r[0],
                        "absorption_db_per_km": r[1],
                        "path_loss_db": r[2],
                        "noise_psd_db": r[3],
                        "product_db": r[4],
                    }
                    for r in rows
                ],
            },
            out,
        )
    return _EXIT_OK


def _cmd_fit(args, cfg: RunConfig, out):
    env = cfg.environment()
    snrs = _parse_list(args.snr, "--snr")
    distances = None
    if args.l_range:
        distances = _parse_range(args.l_range, "--l-range")
        if distances.size < 2:
            raise _CliUsageError("--l-range must contain at least two distances")
    models = fitmodels.fit_channel_models(snrs, env, distances)
    violations = []
    for model in models:
        for text in fitmodels.validate_ranges(model):
            violations.append(f"SNR {fmt_num(model.snr0_db)} dB: {text}")
    if violations:
        raise ValidationError("fitted model out of range: " + "; ".join(violations))
    slope, intercept = (None, None)
    if len(models) >= 2:
        slope, intercept = fitmodels.fit_psi_trend(models)
    if cfg.format == "csv":
        rows = [
            (
                m.snr0_db,
                m.omega,
                m.lam,
                m.delta,
                m.psi,
                m.gamma,
                "" if slope is None else fmt_num(slope),
                "" if intercept is None else fmt_num(intercept),
            )
            for m in models
        ]
        _emit_csv(
            (
                "snr0_db",
                "omega",
                "lam",
                "delta",
                "psi",
                "gamma",
                "trend_slope_per_db",
                "trend_intercept",
            ),
            rows,
            out,
        )
    else:
        doc = {
            "models": [
                {
                    "snr0_db": m.snr0_db,
                    "omega": m.omega,
                    "lam": m.lam,
                    "delta": m.delta,
                    "psi": m.psi,
                    "gamma": m.gamma,
                }
                for m in models
            ],
            "trend": None
            if slope is None
            else {"slope_per_db": slope, "intercept": intercept},
        }
        _emit_json(doc, out)
    return _EXIT_OK


def _cmd_plan(args, cfg: RunConfig, out):
    env = cfg.environment()
    spec = planner.LinkSpec(
        l=args.l,
        snr0_db=args.snr,
        p_r=args.pr,
        packet_bits=cfg.packet_bits,
        alpha=cfg.alpha,
    )
    model = fitmodels.fit_channel_model(args.snr, env)
    plan = planner.plan_link(spec, model, env)
    label = planner.classify_case(spec.l, model, spec.p_r)
    doc = {
        "l_km": spec.l,
        "snr0_db": spec.snr0_db,
        "p_r_w": spec.p_r,
        "packet_bits": spec.packet_bits,
        "alpha": spec.alpha,
        "decision": "direct" if plan.hop_count == 1 else "relay",
        "case": label.case,
        "t1_km": label.t1_km,
        "t2_km": label.t2_km,
        "open_distance_km": plan.open_distance_km,
        "hop_count": plan.hop_count,
        "hop_length_km": plan.hop_length,
        "relay_positions_km": list(plan.relay_positions),
        "total_energy_joule": plan.total_energy_joule,
        "total_delay_sec": plan.total_delay_sec,
        "direct_energy_joule": planner.direct_energy(spec, model),
        "direct_delay_sec": planner.direct_delay(spec, model, env),
    }
    _emit_json(doc, out)
    return _EXIT_OK


def _cmd_table1(args, cfg: RunConfig, out):
    env = cfg.environment()
    if args.pr <= 0 or not math.isfinite(args.pr):
        raise ValidationError(f"receive power must be positive, got {args.pr}")
    models = {snr: m for snr, m in zip(_TABLE1_SNRS, fitmodels.fit_channel_models(_TABLE1_SNRS, env))}
    cache = oracle.ChannelCache(env)
    rows = []
    for snr in _TABLE1_SNRS:
        for l in _TABLE1_DISTANCES:
            spec = planner.LinkSpec(
                l=l, snr0_db=snr, p_r=args.pr, packet_bits=cfg.packet_bits, alpha=cfg.alpha
            )
            report = planner.compare(spec, models[snr], env)
            row = [
                snr,
                l,
                report.e0_joule,
                report.e1_mid_joule,
                report.t0_sec,
                report.t1_mid_sec,
                report.energy_reduction_ratio,
                report.delay_reduction_ratio,
            ]
            if args.exact:
                row.append(oracle.numeric_energy(0.0, spec, env, cache))
                row.append(oracle.numeric_energy(l / 2.0, spec, env, cache))
            rows.append(row)
    header = [
        "snr0_db",
        "l_km",
        "e0_joule",
        "e1_mid_joule",
        "t0_sec",
        "t1_mid_sec",
        "energy_reduction_ratio",
        "delay_reduction_ratio",
    ]
    if args.exact:
        header += ["exact_e0_joule", "exact_e1_mid_joule"]
    if cfg.format == "csv":
        _emit_csv(tuple(header), rows, out)
    else:
        _emit_json({"rows": [dict(zip(header, row)) for row in rows]}, out)
    return _EXIT_OK


def _surface_points(prs, snrs, env, cfg, analytic, position_divisor):
    models = {snr: m for snr, m in zip(snrs, fitmodels.fit_channel_models(snrs, env))}
    combos = [(pr, snr) for pr in prs for snr in snrs]
    if analytic:
        return sorted(
            (math.log10(pr), snr, math.log10(planner.open_distance(models[snr], pr)))
            for pr, snr in combos
        )
    cache = oracle.ChannelCache(env)
    lo, hi, count = _TURNING_SPAN

    def solve(combo):
        pr, snr = combo
        anchor = planner.open_distance(models[snr], pr)
        l_grid = anchor * np.linspace(lo, hi, count)
        turning = oracle.realistic_open_distance(
            snr,
            pr,
            env,
            l_grid,
            packet_bits=cfg.packet_bits,
            alpha=cfg.alpha,
            position_divisor=position_divisor,
            cache=cache,
        )
        return math.log10(pr), snr, math.log10(turning)

    threads = _thread_count()
    if threads == 1:
        results = [solve(combo) for combo in combos]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, combos))
    return sorted(results)


def _cmd_surface(args, cfg: RunConfig, out):
    env = cfg.environment()
    prs = [float(v) for v in _parse_range(args.pr_range, "--pr-range")]
    snrs = [float(v) for v in _parse_range(args.snr_range, "--snr-range")]
    degree_parts = _parse_list(args.degrees, "--degrees")
    if len(degree_parts) != 2 or any(d != int(d) or d < 1 for d in degree_parts):
        raise _CliUsageError(f"--degrees expects two positive integers, got {args.degrees!r}")
    m, n = int(degree_parts[0]), int(degree_parts[1])
    if args.position_divisor < 4:
        raise _CliUsageError("--position-divisor must be at least 4")
    points = _surface_points(prs, snrs, env, cfg, args.analytic, args.position_divisor)
    surface, gof = fitmodels.fit_open_distance_surface(points, m, n)
    top = max(m, n)
    if cfg.format == "csv":
        rows = [
            (i, j, surface.coeffs[i][j], gof.sse, gof.rmse, gof.r2, gof.adj_r2)
            for i in range(m + 1)
            for j in range(n + 1)
            if i + j <= top
        ]
        _emit_csv(("i", "j", "value", "sse", "rmse", "r2", "adj_r2"), rows, out)
    else:
        doc = {
            "m": m,
            "n": n,
            "source": "analytic" if args.analytic else "oracle",
            "points": len(points),
            "coeffs": [
                [
                    surface.coeffs[i][j] if i + j <= top else None
                    for j in range(n + 1)
                ]
                for i in range(m + 1)
            ],
            "gof": {"sse": gof.sse, "rmse": gof.rmse, "r2": gof.r2, "adj_r2": gof.adj_r2},
        }
        _emit_json(doc, out)
    return _EXIT_OK


_DISPATCH = {
    "channel": _cmd_channel,
    "fit": _cmd_fit,
    "plan": _cmd_plan,
    "table1": _cmd_table1,
    "surface": _cmd_surface,
}


def _report_error(exc, code, json_errors, out):
    if json_errors:
        _emit_json(
            {"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}},
            out,
        )
    else:
        print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    """Run the CLI; returns the process exit code."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    try:
        known, _ = pre.parse_known_args(argv)
        overrides = _parse_config(known.config) if known.config else {}
    except _CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _EXIT_USAGE

    parser = _build_parser()
    parser.set_defaults(**overrides)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    cfg = _config_from_args(args)
    json_errors = args.json_errors
    sink = sys.stdout
    opened = None
    try:
        if cfg.output:
            opened = open(cfg.output, "w", encoding="utf-8", newline="")
            sink = opened
        return _DISPATCH[args.command](args, cfg, sink)
    except _CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except (ValidationError, ValueError) as exc:
        return _report_error(exc, _EXIT_VALIDATION, json_errors, sys.stdout)
    except (UanRelayError, ArithmeticError) as exc:
        return _report_error(exc, _EXIT_NUMERIC, json_errors, sys.stdout)
    finally:
        if opened is not None:
            opened.close()


def entrypoint():
    """Console-script shim."""
    raise SystemExit(main(sys.argv[1:]))
