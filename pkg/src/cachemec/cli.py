"""Command-line entry: ``solve`` one scenario or ``sweep`` a parameter, writing CSV.

    cachemec solve --config scen.json --method optimal --out result.csv
    cachemec sweep --config scen.json --param gamma --values 0.4,0.8,1.2 \
        --methods subopt,b1,b2,b3,b4 --out sweep.csv

Rows are computed deterministically, so repeated runs give byte-identical
files.  Wall-clock time is left blank unless ``--timing`` is given, since it
is the one column that would otherwise change between runs.  The worker count
for sweeps comes from ``--workers`` or the ``CACHEMEC_WORKERS`` variable.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .baselines import solve_baseline
from .dual import solve_optimal
from .heuristic import solve_suboptimal
from .oracle import solve_bruteforce
from .scenario import Scenario, ScenarioError, scenario_from_dict, state_space

METHODS = ("optimal", "suboptimal", "baseline1", "baseline2", "baseline3", "baseline4", "oracle")
ALIASES = {"subopt": "suboptimal", "opt": "optimal", "b1": "baseline1", "b2": "baseline2",
           "b3": "baseline3", "b4": "baseline4", "bruteforce": "oracle"}
HEADER = ("method", "K", "N", "T_s", "gamma", "C_bits", "average_energy_J", "dual_value_J",
          "gap", "iterations", "wall_time_s")
TRACE_HEADER = ("iter", "dual_value", "max_residual", "num_cached")
SWEEP_PARAMS = {"T": "T_s", "gamma": "zipf_gamma", "C": "C_bits", "K": "K", "N": "N"}
WORKERS_ENV = "CACHEMEC_WORKERS"


class UsageError(ValueError):
    pass


def canonical_method(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in METHODS:
        valid = ", ".join(METHODS + tuple(sorted(ALIASES)))
        raise UsageError(f"unknown method {name!r}; valid methods: {valid}")
    return key


def parse_methods(text: str) -> list[str]:
    names = [m for m in (p.strip() for p in text.split(",")) if m]
    if not names:
        raise UsageError("the methods list is empty")
    out = []
    for m in names:
        m = canonical_method(m)
        if m not in out:
            out.append(m)
    return out


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple
    base: dict
    methods: tuple

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise UsageError(f"unknown sweep parameter {self.param!r}; choose from {', '.join(SWEEP_PARAMS)}")
        if not self.values:
            raise UsageError("the values list is empty")
        if not self.methods:
            raise UsageError("the methods list is empty")

    def point(self, value) -> dict:
        """Scenario document for one sweep value."""
        doc = copy.deepcopy(self.base)
        doc[SWEEP_PARAMS[self.param]] = value
        if self.param == "gamma":
            doc.pop("task_pmf", None)
        if self.param == "N":
            # the parametric catalog is regenerated for every N
            doc.pop("tasks", None)
            if "task_pmf" in doc:
                raise UsageError("sweeping N needs a Zipf task law ('zipf_gamma'), not an explicit task_pmf")
        return doc


def parse_values(param: str, text: str) -> tuple:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError("the values list is empty")
    try:
        if param in ("K", "N"):
            return tuple(int(p) for p in parts)
        return tuple(float(p) for p in parts)
    except ValueError:
        raise UsageError(f"cannot parse values {text!r} for parameter {param}") from None


def read_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        line = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}\n    "
                            + " " * (exc.colno - 1) + "^") from None
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be a JSON object")
    return doc


def _fmt(v, spec: str = ".11e") -> str:
    return "" if v is None else format(v, spec)


def run_methods(s: Scenario, methods: Sequence[str], timing: bool = False, keep_trace: bool = False):
    """Solve ``s`` with every method; returns (rows, reports) in ``methods`` order.

    The state space is built once.  When the optimal method runs, its dual
    value is passed on as the lower bound reported for the suboptimal scheme.
    """
    space = state_space(s)
    reports = {}
    seconds = {}
    order = sorted(methods, key=lambda m: m != "optimal")
    for m in order:
        t0 = time.perf_counter()
        if m == "optimal":
            r = solve_optimal(s, space=space, keep_trace=keep_trace)
        elif m == "suboptimal":
            lb = reports["optimal"].dual_value if "optimal" in reports else None
            r = solve_suboptimal(s, dual_value=lb, space=space)
        elif m == "oracle":
            r = solve_bruteforce(s, space=space)
        else:
            bid = int(m[-1])
            c_dagger = None
            if bid in (1, 2):
                if "suboptimal" in reports:
                    c_dagger = reports["suboptimal"].caching
                else:
                    c_dagger = solve_suboptimal(s, space=space).caching
                    reports["suboptimal_caching"] = c_dagger
            r = solve_baseline(bid, s, c_dagger, space=space)
        seconds[m] = time.perf_counter() - t0
        reports[m] = r
        if m == "suboptimal":
            reports.pop("suboptimal_caching", None)
    rows = []
    for m in methods:
        r = reports[m]
        rows.append({
            "method": m, "K": str(s.num_mobiles), "N": str(s.num_tasks),
            "T_s": format(s.deadline, ".12g"),
            "gamma": "" if s.zipf_gamma is None else format(s.zipf_gamma, ".12g"),
            "C_bits": format(s.cache_size, ".12g"),
            "average_energy_J": _fmt(r.average_energy),
            "dual_value_J": _fmt(r.dual_value),
            "gap": _fmt(r.duality_gap_rel, ".6e"),
            "iterations": str(r.iterations),
            "wall_time_s": format(seconds[m], ".3f") if timing else "",
        })
    return rows, {m: reports[m] for m in methods}


def _sweep_point(args):
    doc, methods, parametric_catalog, timing = args
    s = scenario_from_dict(doc, parametric_catalog=parametric_catalog)
    rows, _ = run_methods(s, methods, timing=timing)
    return rows


def sweep(spec: SweepSpec, parametric_catalog: bool = False, workers: int = 1, timing: bool = False):
    """Rows ordered by method (as listed), then by value (as listed)."""
    jobs = [(spec.point(v), spec.methods, parametric_catalog or spec.param == "N", timing) for v in spec.values]
    # build every scenario up front so a bad value fails before any solving
    for doc, _, cat, _ in jobs:
        scenario_from_dict(doc, parametric_catalog=cat)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            per_value = list(pool.map(_sweep_point, jobs))
    else:
        per_value = [_sweep_point(j) for j in jobs]
    return [per_value[j][i] for i in range(len(spec.methods)) for j in range(len(jobs))]


def rows_to_csv(rows, header=HEADER) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def trace_to_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for it, g, res, k in trace:
        w.writerow([it, format(g, ".11e"), format(res, ".6e"), k])
    return buf.getvalue()


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _workers(arg: Optional[int]) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get(WORKERS_ENV, "").strip()
    if not env:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cachemec", description="Joint caching and time allocation for MEC.")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one scenario with one method")
    ps.add_argument("--config", required=True, help="scenario JSON file")
    ps.add_argument("--method", required=True, help="one of " + ", ".join(METHODS))
    ps.add_argument("--trace", help="write the dual iteration trace (optimal only)")
    ps.add_argument("--out", default="-", help="CSV output path (default stdout)")
    ps.add_argument("--catalog-paper", "--parametric-catalog", dest="parametric_catalog", action="store_true",
                    help="generate the parametric task catalog and channel law from N and K")
    ps.add_argument("--timing", action="store_true", help="fill in wall_time_s")

    pw = sub.add_parser("sweep", help="sweep one parameter over several methods")
    pw.add_argument("--config", required=True)
    pw.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
    pw.add_argument("--values", required=True, help="comma-separated values")
    pw.add_argument("--methods", required=True, help="comma-separated method names")
    pw.add_argument("--out", default="-")
    pw.add_argument("--catalog-paper", "--parametric-catalog", dest="parametric_catalog", action="store_true")
    pw.add_argument("--workers", type=int, help=f"parallel sweep points (default ${WORKERS_ENV} or 1)")
    pw.add_argument("--timing", action="store_true")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = read_config(args.config)
        if args.command == "solve":
            method = canonical_method(args.method)
            if args.trace and method != "optimal":
                raise UsageError("--trace is only produced by the optimal method")
            s = scenario_from_dict(doc, parametric_catalog=args.parametric_catalog)
            rows, reports = run_methods(s, [method], timing=args.timing, keep_trace=bool(args.trace))
            _write(args.out, rows_to_csv(rows))
            if args.trace:
                _write(args.trace, trace_to_csv(reports[method].trace))
        else:
            spec = SweepSpec(args.param, parse_values(args.param, args.values), doc,
                             tuple(parse_methods(args.methods)))
            rows = sweep(spec, parametric_catalog=args.parametric_catalog, workers=_workers(args.workers),
                         timing=args.timing)
            _write(args.out, rows_to_csv(rows))
    except (UsageError, ScenarioError) as exc:
        print(f"cachemec: error: {exc}", file=sys.stderr)
        return 2
    return 0
