"""Command-line front end: config ingestion and the four workflows.

``netshare analyze|simulate|optimize|table <config> [flags]`` plus
``netshare replay <manifest>``, which re-executes a recorded run.
Configs are flat ``key = value`` text with dotted keys; station
densities are accepted per km^2 and converted to per m^2 on ingestion
(everything downstream is SI).  Every run writes a JSON manifest with
the resolved inputs so results can be reproduced later; replaying a
manifest regenerates the output bytes (simulation included, since the
seed is recorded).

Exit codes: 0 success, 2 config error, 3 numerical error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, replace

from . import __version__
from .errors import ConfigError, NumericalError
from .montecarlo import SimConfig, estimate_rate
from .optimize import DensitySearch, optimal_density
from .quadrature import QuadratureConfig
from .rate import RateReport, aggregate_rates, throughput
from .scenario import (LinkStateModel, OperatorParams, PathLossParams,
                       Scenario, pathloss_constant)

_PER_KM2 = 1e-6  # km^-2 -> m^-2

_SIM_DEFAULT_REALIZATIONS = 10_000


# --------------------------------------------------------------- config

def parse_config_text(text: str) -> dict[str, tuple[str, int]]:
    """key -> (raw value, line number); duplicate keys are rejected."""
    out: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in out:
            raise ConfigError("duplicate key", key=key, line=lineno)
        out[key] = (value, lineno)
    return out


def _convert(kind, key, value, line):
    try:
        if kind is float:
            return float(value)
        if kind is int:
            v = float(value)
            if v != int(v):
                raise ValueError
            return int(v)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot read {value!r} as {getattr(kind, '__name__', kind)}",
                          key=key, line=line) from None


def _choice_of(*options):
    def conv(value):
        if value not in options:
            raise ValueError
        return value
    conv.__name__ = "one of " + "/".join(map(str, options))
    return conv


def _sweep(value):
    if value == "both":
        return "both"
    if value in ("1", "2"):
        return int(value)
    raise ValueError


def _ratio_list(value):
    items = [float(part) for part in value.split(",") if part.strip()]
    if not items or any(not r > 0.0 for r in items):
        raise ValueError
    return items


_SCHEMA: dict[str, tuple[object, object]] = {
    # required scenario keys have no default (None sentinel)
    "carrier.frequency_hz": (float, None),
    "noise.figure_db": (float, None),
    "linkstate.d_meters": (float, None),
    "linkstate.q_los_inner": (float, None),
    "linkstate.q_los_outer": (float, None),
    "pathloss.alpha_los": (float, None),
    "pathloss.alpha_nlos": (float, None),
    "operator1.density_per_km2": (float, None),
    "operator1.bandwidth_hz": (float, None),
    "operator1.power_watts": (float, None),
    "operator2.density_per_km2": (float, None),
    "operator2.bandwidth_hz": (float, None),
    "operator2.power_watts": (float, None),
    # optional settings
    "quadrature.rel_tol": (float, 1e-7),
    "quadrature.abs_tol": (float, 0.0),
    "quadrature.max_subdivisions": (int, 4000),
    "rate.sharing_noise_bandwidth": (_choice_of("per_operator", "combined"),
                                     "per_operator"),
    "sim.realizations": (int, _SIM_DEFAULT_REALIZATIONS),
    "sim.seed": (int, 0),
    "sim.window_radius_m": (float, None),
    "optimize.lambda_min_per_km2": (float, 1.0),
    "optimize.lambda_max_per_km2": (float, 1000.0),
    "optimize.grid_points": (int, 12),
    "optimize.refine_iters": (int, 32),
    "optimize.objective": (_choice_of("nonsharing", "sharing"), "sharing"),
    "optimize.sweep_operator": (_sweep, "both"),
    "table.w_ratios": (_ratio_list, [0.2, 1.0, 5.0]),
    "table.p_ratios": (_ratio_list, [0.2, 1.0, 5.0]),
}

_REQUIRED = tuple(k for k, (_, dflt) in _SCHEMA.items() if dflt is None
                  and k != "sim.window_radius_m")


@dataclass(frozen=True)
class Runtime:
    """Everything a subcommand needs, resolved from one config."""

    scenario: Scenario
    qc: QuadratureConfig
    sharing_noise_bandwidth: str
    settings: dict


def load_runtime(text: str) -> Runtime:
    raw = parse_config_text(text)
    for key in raw:
        if key not in _SCHEMA:
            raise ConfigError("unknown key", key=key, line=raw[key][1])
    values: dict[str, object] = {}
    for key, (kind, default) in _SCHEMA.items():
        if key in raw:
            value, line = raw[key]
            values[key] = _convert(kind, key, value, line)
        else:
            values[key] = default
    missing = [k for k in _REQUIRED if values[k] is None]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    def op(i: int) -> OperatorParams:
        try:
            return OperatorParams(
                density_per_m2=values[f"operator{i}.density_per_km2"] * _PER_KM2,
                bandwidth_hz=values[f"operator{i}.bandwidth_hz"],
                power_watts=values[f"operator{i}.power_watts"])
        except ValueError as exc:
            raise ConfigError(str(exc), key=f"operator{i}") from None

    try:
        scenario = Scenario(
            operator1=op(1), operator2=op(2),
            link_state=LinkStateModel(
                d_meters=values["linkstate.d_meters"],
                q_los_inner=values["linkstate.q_los_inner"],
                q_los_outer=values["linkstate.q_los_outer"]),
            pathloss=PathLossParams(
                k=pathloss_constant(values["carrier.frequency_hz"]),
                alpha_los=values["pathloss.alpha_los"],
                alpha_nlos=values["pathloss.alpha_nlos"]),
            noise_figure_db=values["noise.figure_db"])
        qc = QuadratureConfig(rel_tol=values["quadrature.rel_tol"],
                              abs_tol=values["quadrature.abs_tol"],
                              max_subdivisions=values["quadrature.max_subdivisions"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return Runtime(scenario=scenario, qc=qc,
                   sharing_noise_bandwidth=values["rate.sharing_noise_bandwidth"],
                   settings=values)


# --------------------------------------------------------------- output

def _fmt(value) -> str:
    # builtin-float repr is the shortest round-tripping decimal form;
    # the cast keeps numpy scalars from leaking their own repr
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def emit_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _resolve_threads(ns) -> int:
    value = ns.threads
    if value is None:
        env = os.environ.get("NETSHARE_THREADS")
        value = int(env) if env else 1
    if value == 0:
        value = os.cpu_count() or 1
    if value < 0:
        raise ConfigError("--threads must be >= 0")
    return value


def _write_manifest(ns, command: str, config_text: str, runtime_settings: dict,
                    extra_options: dict) -> None:
    out = getattr(ns, "out", None)
    path = ns.manifest or (f"{out}.manifest.json" if out and out != "-"
                           else "netshare.manifest.json")
    payload = {
        "tool": "netshare",
        "version": __version__,
        "command": command,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_text": config_text,
        "options": {"out": out, "threads": getattr(ns, "threads", None),
                    **extra_options},
        "settings": {k: v for k, v in runtime_settings.items()},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_config(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


# ------------------------------------------------------------ commands

def cmd_analyze(ns) -> int:
    config_text = _read_config(ns.config)
    rt = load_runtime(config_text)
    report = aggregate_rates(rt.scenario, rt.qc, rt.sharing_noise_bandwidth)
    d = report.diagnostics
    ratio = report.r_sh / report.r_nsh if report.r_nsh > 0.0 else math.nan
    ratio_err = (ratio * (abs(d["r_tilde_1_err"] + d["r_tilde_2_err"])
                          / max(report.r_tilde_1 + report.r_tilde_2, 1e-300)
                          + abs(d["r_bar_1_err"] + d["r_bar_2_err"])
                          / max(report.r_bar_1 + report.r_bar_2, 1e-300))
                 if report.r_nsh > 0.0 else math.nan)
    w1 = rt.scenario.operator1.bandwidth_hz
    w2 = rt.scenario.operator2.bandwidth_hz
    rows = [
        ["r_bar_1", report.r_bar_1, "bit/s/Hz", d["r_bar_1_err"]],
        ["r_bar_2", report.r_bar_2, "bit/s/Hz", d["r_bar_2_err"]],
        ["r_tilde_1", report.r_tilde_1, "bit/s/Hz", d["r_tilde_1_err"]],
        ["r_tilde_2", report.r_tilde_2, "bit/s/Hz", d["r_tilde_2_err"]],
        ["r_nsh", report.r_nsh, "bit/s", w1 * d["r_bar_1_err"] + w2 * d["r_bar_2_err"]],
        ["r_sh", report.r_sh, "bit/s",
         2.0 * (w1 + w2) * (d["r_tilde_1_err"] + d["r_tilde_2_err"])],
        ["sh_over_nsh", ratio, "1", ratio_err],
    ]
    csv_text = emit_csv(["quantity", "value", "unit", "error_estimate"], rows)

    lines = ["setup comparison (analytic)", ""]
    lines.append(f"  dedicated bands : {report.r_nsh / 1e6:12.4f} Mbit/s")
    lines.append(f"  pooled spectrum : {report.r_sh / 1e6:12.4f} Mbit/s")
    lines.append(f"  sharing gain    : {ratio:12.4f}")
    lines.append("")
    lines.append("  per-operator spectral efficiency (bit/s/Hz)")
    lines.append(f"    dedicated: op1 {report.r_bar_1:.6f}   op2 {report.r_bar_2:.6f}")
    lines.append(f"    pooled:    op1 {report.r_tilde_1:.6f}   op2 {report.r_tilde_2:.6f}")
    lines.append("")
    lines.append(f"  quadrature error estimates: "
                 f"nsh {rows[4][3]:.2e} bit/s, sh {rows[5][3]:.2e} bit/s")
    print("\n".join(lines))
    if ns.out:
        _write_text(ns.out, csv_text)
    _write_manifest(ns, "analyze", config_text, rt.settings, {})
    return 0


_ANALYTIC_FOR_MODE = {
    "nonsharing_op1": lambda rep: rep.r_bar_1,
    "nonsharing_op2": lambda rep: rep.r_bar_2,
    "sharing": lambda rep: rep.r_tilde_1 + rep.r_tilde_2,
}


def cmd_simulate(ns) -> int:
    config_text = _read_config(ns.config)
    rt = load_runtime(config_text)
    workers = _resolve_threads(ns)
    realizations = ns.realizations or rt.settings["sim.realizations"]
    seed = ns.seed if ns.seed is not None else rt.settings["sim.seed"]
    sim = SimConfig(realizations=realizations, seed=seed,
                    window_radius=rt.settings["sim.window_radius_m"],
                    workers=workers)
    report = aggregate_rates(rt.scenario, rt.qc, rt.sharing_noise_bandwidth)
    rows = []
    for mode in ("nonsharing_op1", "nonsharing_op2", "sharing"):
        est = estimate_rate(rt.scenario, sim, mode, rt.sharing_noise_bandwidth)
        analytic = _ANALYTIC_FOR_MODE[mode](report)
        gap = (est.mean - analytic) / analytic if analytic != 0.0 else math.nan
        rows.append([mode, analytic, est.mean, est.stderr, gap,
                     est.no_coverage_fraction])
        print(f"  {mode:15s} analytic {analytic:10.6f}  empirical {est.mean:10.6f} "
              f"+- {est.stderr:.6f}  gap {gap:+.3%}")
    csv_text = emit_csv(["mode", "analytic", "empirical", "stderr", "rel_gap",
                         "no_coverage_fraction"], rows)
    if ns.out:
        _write_text(ns.out, csv_text)
    _write_manifest(ns, "simulate", config_text, rt.settings,
                    {"realizations": realizations, "seed": seed})
    return 0


def _search_from(ns, rt: Runtime) -> DensitySearch:
    lam_min = rt.settings["optimize.lambda_min_per_km2"]
    lam_max = rt.settings["optimize.lambda_max_per_km2"]
    if getattr(ns, "lambda_range", None):
        try:
            lam_min, lam_max = (float(part) for part in ns.lambda_range.split(","))
        except ValueError:
            raise ConfigError("--lambda-range expects 'min,max' per km^2") from None
    objective = getattr(ns, "objective", None) or rt.settings["optimize.objective"]
    try:
        return DensitySearch(lambda_min=lam_min * _PER_KM2,
                             lambda_max=lam_max * _PER_KM2,
                             grid_points=rt.settings["optimize.grid_points"],
                             refine_iters=rt.settings["optimize.refine_iters"],
                             objective=objective,
                             sweep_operator=rt.settings["optimize.sweep_operator"])
    except ValueError as exc:
        raise ConfigError(str(exc), key="optimize") from None


def cmd_optimize(ns) -> int:
    config_text = _read_config(ns.config)
    rt = load_runtime(config_text)
    search = _search_from(ns, rt)
    workers = _resolve_threads(ns)
    opt = optimal_density(rt.scenario, search, rt.qc,
                          rt.sharing_noise_bandwidth, workers=workers)
    shape = "plateau" if opt.plateau else ("boundary" if opt.boundary else "interior")
    print(f"  objective        : {search.objective}")
    print(f"  optimal density  : {opt.lambda_star / _PER_KM2:.6g} per km^2")
    print(f"  throughput       : {opt.rate_star / 1e6:.4f} Mbit/s")
    print(f"  maximum location : {shape}  ({opt.evaluations} evaluations)")
    rows = [[lam, rate] for lam, rate in zip(opt.profile_lambdas, opt.profile_rates)]
    rows.append([opt.lambda_star, opt.rate_star])
    csv_text = emit_csv(["lambda", "rate_bit_s"], rows)
    if ns.out:
        _write_text(ns.out, csv_text)
    _write_manifest(ns, "optimize", config_text, rt.settings,
                    {"objective": search.objective,
                     "lambda_range": [search.lambda_min / _PER_KM2,
                                      search.lambda_max / _PER_KM2]})
    return 0


def _table_cell(scenario: Scenario, search: DensitySearch, qc: QuadratureConfig,
                snb: str, workers: int) -> tuple[float, float]:
    """Per-setup optimized throughputs (bit/s) for one ratio cell."""
    vals = []
    for objective in ("nonsharing", "sharing"):
        opt = optimal_density(scenario, replace(search, objective=objective),
                              qc, snb, workers=workers)
        vals.append(opt.rate_star)
    return vals[0], vals[1]


def cmd_table(ns) -> int:
    config_text = _read_config(ns.config)
    rt = load_runtime(config_text)
    w_ratios = _ratio_list(ns.w_ratios) if ns.w_ratios else rt.settings["table.w_ratios"]
    p_ratios = _ratio_list(ns.p_ratios) if ns.p_ratios else rt.settings["table.p_ratios"]
    search = _search_from(ns, rt)
    workers = _resolve_threads(ns)
    base = rt.scenario
    w1 = base.operator1.bandwidth_hz
    p1 = base.operator1.power_watts

    grid: dict[tuple[float, float], tuple[float, float]] = {}
    rows = []
    for p_ratio in p_ratios:
        for w_ratio in w_ratios:
            cell = replace(base, operator2=replace(
                base.operator2, bandwidth_hz=w_ratio * w1, power_watts=p_ratio * p1))
            try:
                r_nsh, r_sh = _table_cell(cell, search, rt.qc,
                                          rt.sharing_noise_bandwidth, workers)
            except NumericalError as exc:
                print(f"  cell (W2/W1={w_ratio}, P2/P1={p_ratio}) failed: {exc}",
                      file=sys.stderr)
                r_nsh = r_sh = math.nan
            grid[(w_ratio, p_ratio)] = (r_nsh, r_sh)
            ratio = r_sh / r_nsh if r_nsh > 0.0 else math.nan
            rows.append([w_ratio, p_ratio, r_nsh / 1e6, r_sh / 1e6, ratio])

    print(_render_table(w_ratios, p_ratios, grid))
    csv_text = emit_csv(["w_ratio", "p_ratio", "r_nsh_mbit_s", "r_sh_mbit_s",
                         "ratio"], rows)
    if ns.out:
        _write_text(ns.out, csv_text)
    _write_manifest(ns, "table", config_text, rt.settings,
                    {"w_ratios": w_ratios, "p_ratios": p_ratios})
    return 0


def _render_table(w_ratios, p_ratios, grid) -> str:
    """Three blocks, w-ratios as columns and p-ratios as rows."""
    def block(title: str, pick, fmt: str) -> list[str]:
        head = "  P2/P1 \\ W2/W1 " + "".join(f"{w:>10g}" for w in w_ratios)
        out = [title, head]
        for p in p_ratios:
            cells = []
            for w in w_ratios:
                value = pick(grid[(w, p)])
                cells.append(format(value, fmt) if math.isfinite(value)
                             else f"{'---':>10s}")
            out.append(f"  {p:<14g} " + "".join(cells))
        return out

    lines = ["aggregate throughput at the per-cell optimal density (Mbit/s)", ""]
    lines += block("  dedicated bands", lambda v: v[0] / 1e6, ">10.1f")
    lines.append("")
    lines += block("  pooled spectrum", lambda v: v[1] / 1e6, ">10.1f")
    lines.append("")
    lines += block("  pooled / dedicated",
                   lambda v: v[1] / v[0] if v[0] > 0 else math.nan, ">10.3f")
    return "\n".join(lines)


def cmd_replay(ns) -> int:
    with open(ns.manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    command = manifest["command"]
    options = manifest.get("options", {})
    handler = {"analyze": cmd_analyze, "simulate": cmd_simulate,
               "optimize": cmd_optimize, "table": cmd_table}.get(command)
    if handler is None:
        raise ConfigError(f"manifest names unknown command {command!r}")

    import tempfile
    with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False,
                                     encoding="utf-8") as fh:
        fh.write(manifest["config_text"])
        cfg_path = fh.name
    try:
        sub = argparse.Namespace(
            config=cfg_path,
            out=ns.out or (options.get("out") and options["out"] + ".replay"),
            threads=options.get("threads"),
            manifest=ns.manifest or "netshare.replay.manifest.json",
            realizations=options.get("realizations"),
            seed=options.get("seed"),
            objective=options.get("objective"),
            lambda_range=(",".join(str(v) for v in options["lambda_range"])
                          if options.get("lambda_range") else None),
            w_ratios=(",".join(str(v) for v in options["w_ratios"])
                      if options.get("w_ratios") else None),
            p_ratios=(",".join(str(v) for v in options["p_ratios"])
                      if options.get("p_ratios") else None),
        )
        return handler(sub)
    finally:
        os.unlink(cfg_path)


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netshare",
        description="Throughput of two cellular operators: dedicated bands "
                    "versus pooled spectrum.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="path to a key=value config file")
        p.add_argument("--out", default=None,
                       help="CSV output path ('-' for stdout)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker processes (0 = all cores; "
                            "falls back to NETSHARE_THREADS)")
        p.add_argument("--manifest", default=None,
                       help="manifest path (default: <out>.manifest.json)")

    p = sub.add_parser("analyze", help="transform-based rates for one scenario")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo versus analytic rates")
    common(p)
    p.add_argument("--realizations", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="best station density for one setup")
    common(p)
    p.add_argument("--objective", choices=("nonsharing", "sharing"), default=None)
    p.add_argument("--lambda-range", default=None, metavar="MIN,MAX",
                   help="search interval, stations per km^2")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("table", help="ratio grid over bandwidth/power ratios")
    common(p)
    p.add_argument("--w-ratios", default=None, help="comma list of W2/W1 values")
    p.add_argument("--p-ratios", default=None, help="comma list of P2/P1 values")
    p.add_argument("--lambda-range", default=None, metavar="MIN,MAX",
                   help="per-cell search interval, stations per km^2")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("manifest_path", help="path to a run manifest JSON")
    p.add_argument("--out", default=None,
                   help="output path override (default: recorded path + '.replay')")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
