"""Command-line front end.

Subcommands: simulate (full numeric run), perturb (closed forms only),
compare (numeric vs closed forms), sweep (Cartesian parameter scan) and
validate (property suite).  Configuration precedence is flags over
config-file values over built-in defaults; every record echoes the resolved
specification.  Exit codes: 0 success, 1 internal or numerical failure,
2 invalid input.  Setting CASIMIR_PLAIN=1 disables color and progress
output.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import backend, bogoliubov, evolution, perturbation, validation
from .errors import (
    CasimirError,
    MatchingDomainError,
    ModeIndexError,
    PositionDomainError,
    ResonanceUndefinedError,
    UserInputError,
)
from .records import RunRecord, RunSpec, format_summary_csv
from .version import __version__

#: Relative tie window used when reporting peak modes.
PEAK_TIE_REL_TOL = 0.05

_CONFIG_KEYS = ("gamma", "epsilon", "epsilon2", "periods", "duration", "L0",
                "modes", "scheme", "step_per_period", "rtol", "atol",
                "workers", "out", "format", "seed", "dump")


def _plain_output() -> bool:
    if os.environ.get("CASIMIR_PLAIN", "") not in ("", "0"):
        return True
    return not sys.stdout.isatty()


def _style(text: str, code: str) -> str:
    if _plain_output():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _progress(message: str) -> None:
    if not _plain_output():
        print(message, file=sys.stderr, flush=True)


# ----------------------------------------------------------------- parsing

def _float_list(text: str) -> list[float]:
    try:
        items = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise UserInputError(f"cannot parse {text!r} as numbers") from exc
    return items


def _int_list(text: str) -> list[int]:
    values = _float_list(text)
    out = []
    for v in values:
        if v != int(v):
            raise UserInputError(f"expected integers, got {v!r}")
        out.append(int(v))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir",
        description="Photon creation by parametric resonance in a "
                    "vibrating-wall cavity.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, lists=False):
        hint = " (comma list allowed)" if lists else ""
        sp.add_argument("--gamma", help=f"drive ratio Omega/omega1{hint}")
        sp.add_argument("--epsilon", help=f"wall amplitude{hint}")
        sp.add_argument("--periods", help=f"duration in drive periods{hint}")
        sp.add_argument("--modes", help=f"mode truncation K{hint}")
        sp.add_argument("--scheme", choices=["fixed", "adaptive"],
                        help="integrator scheme")
        sp.add_argument("--step-per-period", type=int,
                        help="fixed-scheme steps per drive period")
        sp.add_argument("--rtol", type=float,
                        help="adaptive-scheme relative tolerance")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--workers", type=int, help="parallel sweep workers")
        sp.add_argument("--format", choices=["csv", "records", "both"],
                        help="which files to write under --out")

    sp = sub.add_parser("simulate", help="full numeric run")
    add_common(sp)
    sp.add_argument("--dump", help="write the sampled trajectory to this "
                                   "file (columnar text, one row per drive "
                                   "period)")
    sp = sub.add_parser("perturb", help="closed-form spectra only")
    add_common(sp)
    sp = sub.add_parser("compare", help="numeric vs closed forms; --epsilon "
                                        "may carry two values to measure "
                                        "the error scaling exponent")
    add_common(sp)
    sp = sub.add_parser("sweep", help="Cartesian scan over gamma/epsilon/"
                                      "periods/modes")
    add_common(sp, lists=True)
    sp = sub.add_parser("validate", help="run the property suite")
    add_common(sp)
    sp.add_argument("--check", action="append", default=None,
                    metavar="NAME", help="run only the named checks")
    sp.add_argument("--inject-fault", action="append", default=None,
                    metavar="NAME", help="inject a named fault (testing hook)")
    sp.add_argument("--threshold", action="append", default=None,
                    metavar="NAME=VALUE",
                    help="override a property threshold (testing hook)")
    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UserInputError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UserInputError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UserInputError("config file must hold a JSON object")
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise UserInputError(
            f"unknown config keys: {', '.join(sorted(unknown))}")
    return raw


def resolve_spec(args) -> RunSpec:
    """Merge flags over config-file values over defaults into a RunSpec."""
    kind = args.command
    config = _load_config(getattr(args, "config", None))
    merged: dict = {}
    for key in _CONFIG_KEYS:
        if key in config:
            merged[key] = config[key]
    flag_lists = {}
    for flag, key in (("gamma", "gamma"), ("epsilon", "epsilon"),
                      ("periods", "periods"), ("modes", "modes")):
        raw = getattr(args, flag, None)
        if raw is None:
            continue
        values = (_int_list(raw) if key in ("periods", "modes")
                  else _float_list(raw))
        if not values:
            raise UserInputError(f"--{flag} received an empty list")
        flag_lists[key] = values
    for flag in ("scheme", "out", "workers", "format", "dump"):
        value = getattr(args, flag, None)
        if value is not None:
            merged[flag] = value
    if getattr(args, "step_per_period", None) is not None:
        merged["step_per_period"] = args.step_per_period
    if getattr(args, "rtol", None) is not None:
        merged["rtol"] = args.rtol

    spec_kwargs = {"kind": kind}
    for key in ("duration", "L0", "scheme", "step_per_period", "rtol",
                "atol", "workers", "out", "seed", "dump"):
        if key in merged:
            spec_kwargs[key] = merged[key]
    if "format" in merged:
        spec_kwargs["fmt"] = merged["format"]

    def scalar(key, cast):
        if key in flag_lists:
            values = flag_lists[key]
            if key == "epsilon" and kind == "compare" and len(values) == 2:
                spec_kwargs["epsilon"], spec_kwargs["epsilon2"] = values
                return
            if len(values) != 1:
                raise UserInputError(
                    f"--{key} accepts a single value for '{kind}'")
            spec_kwargs[key] = values[0]
        elif key in merged:
            spec_kwargs[key] = cast(merged[key])

    if kind == "sweep":
        axes = {}
        for key in ("gamma", "epsilon", "periods", "modes"):
            if key in flag_lists:
                axes[key] = flag_lists[key]
            elif key in merged:
                axes[key] = [merged[key]]
        spec_kwargs["sweep_gamma"] = tuple(axes.get("gamma", (2.0,)))
        spec_kwargs["sweep_epsilon"] = tuple(axes.get("epsilon", (1e-3,)))
        spec_kwargs["sweep_periods"] = tuple(axes.get("periods", (16,)))
        spec_kwargs["sweep_modes"] = tuple(axes.get("modes", (None,)))
    else:
        scalar("gamma", float)
        scalar("epsilon", float)
        scalar("periods", int)
        scalar("modes", int)
        if "epsilon2" in merged and "epsilon2" not in spec_kwargs:
            spec_kwargs["epsilon2"] = merged["epsilon2"]
    return RunSpec(**spec_kwargs)


# ------------------------------------------------------------- record glue

def _tool_info() -> dict:
    return {"name": "casimir", "version": __version__,
            "backend": backend.backend_name()}


def _spec_echo(spec: RunSpec, p) -> dict:
    echo = spec.to_dict()
    echo.update({
        "duration_resolved": p.T,
        "modes_resolved": p.K,
        "omega1": p.omega1,
        "drive_frequency": p.Omega,
        "pump_parameter": p.pump_parameter,
    })
    return echo


def _warnings_for(p) -> list[str]:
    out = []
    if p.perturbative_limit_exceeded:
        out.append(
            f"perturbative-validity: epsilon*omega1*T = "
            f"{p.pump_parameter:.6g} exceeds 0.2; first-order closed forms "
            f"are untrustworthy at this pump strength")
    return out


def _spectrum_entry(spectrum, pair=None) -> dict:
    entry = {
        "provenance": spectrum.provenance,
        "N": [float(v) for v in spectrum.values],
        "total": spectrum.total,
        "peak_modes": sorted(bogoliubov.peak_mode(
            spectrum, rel_tol=PEAK_TIE_REL_TOL)),
        "unitarity_defect": None,
        "unitarity_defect_core": None,
    }
    if pair is not None:
        entry["unitarity_defect"] = bogoliubov.unitarity_defect(pair)
        entry["unitarity_defect_core"] = bogoliubov.unitarity_defect(
            pair, max_index=max(1, pair.K // 2))
    return entry


def rows_from_record(record: RunRecord) -> list[dict]:
    """Summary-CSV rows derived from a record (one row per mode and
    numeric/first-order spectrum; the analytic column is the resonant
    closed form when the record carries it)."""
    spec = record.spec
    analytic = None
    for s in record.spectra:
        if s["provenance"] == bogoliubov.ANALYTIC_RESONANT:
            analytic = s["N"]
    rows = []
    m_value = spec["periods"] if spec.get("duration") is None else \
        spec["duration_resolved"] / (2.0 * math.pi / spec["drive_frequency"])
    for s in record.spectra:
        if s["provenance"] == bogoliubov.ANALYTIC_RESONANT:
            continue
        for k, value in enumerate(s["N"], start=1):
            ana = analytic[k - 1] if analytic is not None else None
            rel = (abs(value - ana) / ana) if ana else None
            rows.append({
                "gamma": spec["gamma"], "epsilon": spec["epsilon"],
                "M": m_value, "K": spec["modes_resolved"], "k": k,
                "N_numeric": value, "N_analytic": ana, "rel_err": rel,
                "provenance": s["provenance"],
            })
    return rows


# ---------------------------------------------------------------- commands

def _numeric_pair(p, cfg, system):
    states = evolution.integrate(system, p, cfg)
    state = states[-1]
    if system == evolution.LINEARIZED:
        state = evolution.qp_from_x(state, p)
        provenance = bogoliubov.NUMERIC_LINEARIZED
    else:
        provenance = bogoliubov.NUMERIC_FULL
    return bogoliubov.project_bogoliubov(state, p, provenance=provenance)


def _analytic_spectra_entries(p) -> list[dict]:
    """Resonant closed-form entries; empty for non-integer gamma."""
    try:
        p.gamma_int()
    except ResonanceUndefinedError:
        return []
    pair = bogoliubov.bogoliubov_resonant_analytic(p)
    return [_spectrum_entry(bogoliubov.analytic_spectrum(p), pair)]


def cmd_simulate(spec: RunSpec) -> RunRecord:
    """Integrate the full system, extract the spectrum and defects."""
    started = time.perf_counter()
    p = spec.params()
    cfg = spec.config()
    if spec.dump:
        boundaries = np.linspace(0.0, p.T, max(1, round(p.periods)) + 1)
        states = evolution.integrate(evolution.FULL, p, cfg,
                                     sample_times=boundaries)
        _write_trajectory(spec.dump, states)
        state = states[-1]
    else:
        state = evolution.integrate(evolution.FULL, p, cfg)[-1]
    pair = bogoliubov.project_bogoliubov(state, p)
    spectrum = bogoliubov.photon_number(pair)
    spectra = [_spectrum_entry(spectrum, pair)]
    spectra.extend(_analytic_spectra_entries(p))
    return RunRecord(kind="simulate", spec=_spec_echo(spec, p),
                     tool=_tool_info(), warnings=_warnings_for(p),
                     spectra=spectra,
                     timing_seconds=time.perf_counter() - started)


def cmd_perturb(spec: RunSpec) -> RunRecord:
    """Evaluate the closed forms only: first-order projected spectrum plus
    the resonant spectrum when the drive ratio is an integer."""
    started = time.perf_counter()
    p = spec.params()
    warnings = _warnings_for(p)
    solution = perturbation.PerturbativeSolution(params=p, order=1)
    state = evolution.XState(t=p.T, X=solution.x_array(p.T))
    pair = bogoliubov.project_bogoliubov(
        evolution.qp_from_x(state, p), p,
        provenance=bogoliubov.ANALYTIC_FIRST_ORDER)
    spectra = [_spectrum_entry(bogoliubov.photon_number(pair), pair)]
    analytic = _analytic_spectra_entries(p)
    if not analytic:
        warnings.append(
            f"resonance undefined for non-integer gamma = {p.gamma}; "
            f"resonant closed form omitted")
    spectra.extend(analytic)
    return RunRecord(kind="perturb", spec=_spec_echo(spec, p),
                     tool=_tool_info(), warnings=warnings, spectra=spectra,
                     timing_seconds=time.perf_counter() - started)


def _linearization_deviation(p, epsilon) -> float:
    """max_t |X_lin - (X0 + eps X1)| over a 101-point grid (tight adaptive)."""
    q = dataclasses.replace(p, epsilon=epsilon)
    times = np.linspace(0.0, q.T, 101)
    cfg = evolution.IntegratorConfig(scheme="adaptive", rtol=1e-12, atol=1e-14)
    states = evolution.integrate(evolution.LINEARIZED, q, cfg,
                                 sample_times=times)
    numeric = np.stack([s.X for s in states])
    x0 = perturbation.zeroth_order_trajectory(times, q)
    x1 = perturbation.first_order_trajectory(times, q)
    return float(np.abs(numeric - (x0 + epsilon * x1)).max())


def cmd_compare(spec: RunSpec) -> RunRecord:
    """Numeric-full vs numeric-linearized vs resonant closed form."""
    started = time.perf_counter()
    p = spec.params()
    p.gamma_int()  # resonant comparison requires an integer drive ratio
    cfg = spec.config()
    entries = []
    for system in (evolution.FULL, evolution.LINEARIZED):
        pair = _numeric_pair(p, cfg, system)
        entries.append(_spectrum_entry(bogoliubov.photon_number(pair), pair))
    entries.extend(_analytic_spectra_entries(p))

    extras: dict = {"deviation": []}
    epsilons = [spec.epsilon]
    if spec.epsilon2 is not None:
        epsilons.append(spec.epsilon2)
    for eps in epsilons:
        extras["deviation"].append(
            {"epsilon": eps, "max_abs": _linearization_deviation(p, eps),
             "provenance": "numeric-linearized vs analytic-first-order"})
    if len(epsilons) == 2:
        d1, d2 = (d["max_abs"] for d in extras["deviation"])
        extras["scaling_exponent"] = (math.log(d1 / d2)
                                      / math.log(epsilons[0] / epsilons[1]))
    return RunRecord(kind="compare", spec=_spec_echo(spec, p),
                     tool=_tool_info(), warnings=_warnings_for(p),
                     spectra=entries, extras=extras,
                     timing_seconds=time.perf_counter() - started)


def _sweep_point(point: dict) -> dict:
    """One sweep cell, isolated so partial failures stay per-point."""
    try:
        record = cmd_simulate(RunSpec.from_dict(point))
        return {"ok": True, "record": record.to_dict(), "point": point}
    except Exception as exc:
        return {"ok": False, "error": f"{type(exc).__name__}: {exc}",
                "point": point}


def cmd_sweep(spec: RunSpec):
    """Cartesian product of the configured axes.

    Returns (per-point results, summary rows, failures); summary rows are
    canonically ordered regardless of execution order.
    """
    for axis in ("sweep_gamma", "sweep_epsilon", "sweep_periods",
                 "sweep_modes"):
        if not getattr(spec, axis):
            raise UserInputError(f"sweep axis {axis} is empty")
    points = []
    for gamma in spec.sweep_gamma:
        for epsilon in spec.sweep_epsilon:
            for periods in spec.sweep_periods:
                for modes in spec.sweep_modes:
                    sub = dataclasses.replace(
                        spec, kind="simulate", gamma=gamma, epsilon=epsilon,
                        periods=periods, modes=modes, out=None, dump=None,
                        sweep_gamma=(), sweep_epsilon=(), sweep_periods=(),
                        sweep_modes=())
                    points.append(sub.to_dict())
    points.sort(key=lambda d: (d["gamma"], d["epsilon"], d["periods"],
                               d["modes"] if d["modes"] is not None else -1))

    if spec.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=spec.workers) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = []
        for i, point in enumerate(points, start=1):
            _progress(f"[{i}/{len(points)}] gamma={point['gamma']} "
                      f"epsilon={point['epsilon']} M={point['periods']}")
            results.append(_sweep_point(point))

    rows = []
    failures = []
    for res in results:
        if res["ok"]:
            rows.extend(rows_from_record(RunRecord.from_dict(res["record"])))
        else:
            failures.append(res)
    return results, rows, failures


def cmd_validate(spec: RunSpec, checks=None, faults=(), thresholds=None):
    """Run the property suite; see casimir.validation."""
    return validation.run_validation(checks=checks, faults=faults,
                                     thresholds=thresholds,
                                     progress=lambda name: _progress(
                                         f"checking {name} ..."))


# ----------------------------------------------------------------- output

def _write_trajectory(path: str, states) -> None:
    K = states[0].K
    columns = ["t"]
    for prefix in ("Q", "P"):
        for n in range(1, K + 1):
            for k in range(1, K + 1):
                columns.append(f"{prefix}{n}.{k}.re")
                columns.append(f"{prefix}{n}.{k}.im")
    lines = ["# " + " ".join(columns)]
    for s in states:
        parts = [repr(float(s.t))]
        for matrix in (s.Q, s.P):
            flat = matrix.ravel()
            for z in flat:
                parts.append(repr(float(z.real)))
                parts.append(repr(float(z.imag)))
        lines.append(" ".join(parts))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_outputs(spec: RunSpec, record: RunRecord, rows) -> None:
    if not spec.out:
        return
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    if spec.fmt in ("csv", "both"):
        (out / "summary.csv").write_text(format_summary_csv(rows))
    if spec.fmt in ("records", "both"):
        (out / f"record_{record.kind}.json").write_text(record.to_json())


def _print_spectra(record: RunRecord) -> None:
    spectra = record.spectra
    analytic = None
    for s in spectra:
        if s["provenance"] == bogoliubov.ANALYTIC_RESONANT:
            analytic = s
    shown = [s for s in spectra if s is not analytic]
    headers = ["k"] + [f"N[{s['provenance']}]" for s in shown]
    if analytic is not None:
        headers += ["N[analytic-resonant]", "rel_err"]
    widths = [max(len(h), 12) for h in headers]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    K = len(shown[0]["N"]) if shown else len(analytic["N"])
    for k in range(1, K + 1):
        cells = [str(k)]
        for s in shown:
            cells.append(f"{s['N'][k - 1]:.6e}")
        if analytic is not None:
            ana = analytic["N"][k - 1]
            cells.append(f"{ana:.6e}")
            ref = shown[0] if shown else None
            if ana > 0 and ref is not None:
                cells.append(f"{abs(ref['N'][k - 1] - ana) / ana:.3e}")
            else:
                cells.append("")
        print("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    for s in spectra:
        extra = ""
        if s["unitarity_defect"] is not None:
            extra = (f"  unitarity defect {s['unitarity_defect']:.3e}"
                     f" (core {s['unitarity_defect_core']:.3e})")
        print(f"{s['provenance']}: total={s['total']:.6e} "
              f"peak_modes={s['peak_modes']}{extra}")
    for w in record.warnings:
        print(_style(f"warning: {w}", "33"))
    if "scaling_exponent" in record.extras:
        print(f"deviation scaling exponent: "
              f"{record.extras['scaling_exponent']:.3f}")
    for dev in record.extras.get("deviation", []):
        print(f"max |X_lin - (X0 + eps X1)| at epsilon={dev['epsilon']}: "
              f"{dev['max_abs']:.6e}")


def _print_validation(results) -> None:
    name_w = max(len(r.name) for r in results) + 2
    print(f"{'PROPERTY'.ljust(name_w)}{'MEASURED':>14}  "
          f"{'THRESHOLD':>18}  STATUS")
    for r in results:
        status = _style("PASS", "32") if r.passed else _style("FAIL", "31")
        if r.comparator == "in":
            thr = f"in [{r.threshold[0]}, {r.threshold[1]}]"
        else:
            thr = f"{r.comparator} {r.threshold}"
        print(f"{r.name.ljust(name_w)}{r.measured:>14.6g}  {thr:>18}  "
              f"{status}")
        print(f"  ({r.detail})")


def _parse_threshold_overrides(pairs):
    if not pairs:
        return None
    overrides = {}
    for pair in pairs:
        if "=" not in pair:
            raise UserInputError(
                f"threshold override must be NAME=VALUE, got {pair!r}")
        name, _, value = pair.partition("=")
        try:
            if "," in value:
                overrides[name] = tuple(float(v) for v in value.split(","))
            else:
                overrides[name] = float(value)
        except ValueError as exc:
            raise UserInputError(
                f"cannot parse threshold value {value!r}") from exc
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = resolve_spec(args)
        if args.command == "simulate":
            record = cmd_simulate(spec)
            _write_outputs(spec, record, rows_from_record(record))
            _print_spectra(record)
            return 0
        if args.command == "perturb":
            record = cmd_perturb(spec)
            _write_outputs(spec, record, rows_from_record(record))
            _print_spectra(record)
            return 0
        if args.command == "compare":
            record = cmd_compare(spec)
            _write_outputs(spec, record, rows_from_record(record))
            _print_spectra(record)
            return 0
        if args.command == "sweep":
            results, rows, failures = cmd_sweep(spec)
            summary = RunRecord(
                kind="sweep",
                spec=spec.to_dict() | {"points": len(results)},
                tool=_tool_info(),
                warnings=[f["error"] for f in failures],
                extras={"failures": [f["point"] for f in failures]})
            if spec.out:
                out = Path(spec.out)
                out.mkdir(parents=True, exist_ok=True)
                if spec.fmt in ("csv", "both"):
                    (out / "summary.csv").write_text(format_summary_csv(rows))
                if spec.fmt in ("records", "both"):
                    (out / "record_sweep.json").write_text(summary.to_json())
                    for i, res in enumerate(r for r in results if r["ok"]):
                        RunRecord.from_dict(res["record"])
                        (out / f"record_point_{i:03d}.json").write_text(
                            RunRecord.from_dict(res["record"]).to_json())
            print(format_summary_csv(rows), end="")
            for f in failures:
                print(_style(f"failed point {f['point']['gamma']}/"
                             f"{f['point']['epsilon']}: {f['error']}", "31"),
                      file=sys.stderr)
            return 1 if failures else 0
        if args.command == "validate":
            results = cmd_validate(
                spec, checks=args.check,
                faults=tuple(args.inject_fault or ()),
                thresholds=_parse_threshold_overrides(args.threshold))
            _print_validation(results)
            return 0 if all(r.passed for r in results) else 1
        raise UserInputError(f"unknown command {args.command!r}")
    except (UserInputError, ModeIndexError, PositionDomainError,
            ResonanceUndefinedError, MatchingDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CasimirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
