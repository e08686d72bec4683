"""Command-line front end: ``lemnilab <command> [flags]``.

Every command prints a deterministic report (JSON text, 17-digit floats)
to stdout or ``--out`` and exits 0 iff all of its checks pass. Elapsed
time goes to stderr only, so reports can be diffed byte for byte.
"""
from __future__ import annotations

import argparse
import ast
import operator
import sys
import time

import numpy as np

from . import reference as R
from ._core import BACKEND
from .choreography import Choreography, find_moduli, find_moduli_detailed
from .dynamics import drift_report, verify_choreography
from .figure import render_svg
from .invariants import (
    CONSTANCY_TOL,
    PairSet,
    all_pairs,
    canonical_set,
    constancy_report,
    distance_extrema,
    nearest,
    next_nearest,
    subset_scan,
)
from .potential import beta_diagnostic, fit_params, total_energy
from .report import RunReport, trajectory_csv

EXPECTED_ROOT_COUNT = {3: 1, 5: 2, 7: 3}
NEGATIVE_MARGIN = 1e4


def _pair_set(name: str | None, n: int, index: int | None) -> PairSet | None:
    if name == "all":
        return all_pairs(n)
    if name == "nearest":
        return nearest(n)
    if name == "next-nearest":
        return next_nearest(n)
    if index is None:
        return None
    try:
        return canonical_set(n, index)
    except ValueError:
        return None


class Setup:
    """Resolved modulus, choreography and pair set for one invocation."""

    def __init__(self, args):
        self.n = args.n
        text = str(args.modulus)
        roots = find_moduli(self.n)
        if text.isdigit():
            k = int(text)
            if not 1 <= k <= len(roots):
                raise SystemExit(f"error: n={self.n} has {len(roots)} moduli; index {k} is out of range")
            self.index, self.m = k, roots[k - 1]
        else:
            self.m = float(text)
            near = [k for k, r in enumerate(roots, 1) if abs(r - self.m) < 1e-8]
            self.index = near[0] if near else None
        self.key = (self.n, self.index)
        self.ch = Choreography(self.n, self.m)
        self.pairs = _pair_set(getattr(args, "pairs", None), self.n, self.index)

    def inputs(self, **extra) -> dict:
        d = {"n": self.n, "modulus_index": self.index, "m": self.m}
        if self.pairs is not None:
            d["log_set"] = self.pairs.label()
        d["backend"] = BACKEND
        d.update(extra)
        return d


def _label(key, what):
    n, k = key
    return f"published {what}, {n}-body solution {k}"


def cmd_find_moduli(args) -> RunReport:
    rep = RunReport("find-moduli", {"n": args.n, "backend": BACKEND})
    roots = find_moduli_detailed(args.n)
    rep.add("count", len(roots), "choreography.find_moduli")
    for k, r in enumerate(roots, 1):
        ch = Choreography(args.n, r.m)
        rep.add(f"m_{k}", r.m, "choreography.find_moduli", f"{r.m:.15g}")
        rep.add(f"tau_{k}", ch.period, "elliptic.period")
        rep.add(f"cm_defect_{k}", r.defect, "choreography.cm_defect")
        rep.check(f"cm defect of root {k}", r.defect, 1e-10)
        if (args.n, k) in R.MODULI:
            rep.check_close(_label((args.n, k), "modulus"), r.m, R.MODULI[(args.n, k)], 1e-12)
        if (args.n, k) in R.PERIODS:
            rep.check_close(_label((args.n, k), "period"), ch.period, R.PERIODS[(args.n, k)], 1e-10)
    if args.n in EXPECTED_ROOT_COUNT:
        want = EXPECTED_ROOT_COUNT[args.n]
        rep.check("root count", abs(len(roots) - want), 0, expected=want)
    return rep


def _fit(s: Setup):
    if s.pairs is None:
        raise SystemExit(f"error: no canonical pair set for n={s.n}; pass --pairs")
    return fit_params(s.ch, s.pairs)


def cmd_constants(args) -> RunReport:
    s = Setup(args)
    tol = args.tol if args.tol is not None else CONSTANCY_TOL
    rep = RunReport("constants", s.inputs(grid=args.grid, tol=tol))
    params = _fit(s).params if s.pairs is not None else None
    published = R.CONSTANTS.get(s.key, {})
    names = ["L", "T", "I_HR", "curvature_sum", "curvature_identity", "J"]
    if s.pairs is not None:
        names += ["I1", "I2", "E"]
    for name in names:
        cr = constancy_report(s.ch, name, args.grid, tol, ps=s.pairs, params=params)
        rep.add(name, cr.mean, "invariants.constancy_report", _label(s.key, name) if name in published else "")
        rep.add(f"{name}_deviation", cr.scaled_deviation, "invariants.constancy_report")
        if cr.note:
            rep.add(f"{name}_note", cr.note, "invariants.constancy_report")
        rep.check(f"{name} constant over the period grid", cr.scaled_deviation, tol)
        if name in published:
            rel = name != "L"
            rep.check_close(_label(s.key, name), cr.mean, published[name], 1e-9, relative=rel)

    if s.n == 5 and s.index is not None:
        wrong = s.pairs.complement(5)
        cr = constancy_report(s.ch, "I1", args.grid, tol, ps=wrong, name="I1_wrong_set")
        rep.add("negative_control_set", wrong.label(), "invariants.PairSet.complement")
        rep.add("negative_control_I1_deviation", cr.scaled_deviation, "invariants.constancy_report")
        rep.add("negative_control_status", "PASS" if cr.passed else "FAIL", "invariants.constancy_report")
        rep.check(
            "negative control rejected (wrong-set product varies)",
            cr.scaled_deviation, tol * NEGATIVE_MARGIN,
            passed=cr.scaled_deviation >= tol * NEGATIVE_MARGIN,
        )
        for pair in ((1, 2), (1, 3)):
            e = distance_extrema(s.ch, *pair)
            tag = f"r{pair[0]}{pair[1]}"
            rep.add(f"{tag}_min", e.minimum, "invariants.distance_extrema")
            rep.add(f"{tag}_max", e.maximum, "invariants.distance_extrema")
            lo, hi = R.DISTANCE_EXTREMA[s.key][pair]
            rep.check_close(_label(s.key, f"min {tag}"), e.minimum, lo, 1e-9)
            rep.check_close(_label(s.key, f"max {tag}"), e.maximum, hi, 1e-9)
    return rep


def cmd_fit(args) -> RunReport:
    s = Setup(args)
    rep = RunReport("fit", s.inputs())
    fit = _fit(s)
    p = fit.params
    rep.add("alpha", p.alpha, "potential.fit_params", _label(s.key, "alpha") if s.key in R.POTENTIALS else "")
    rep.add("a", p.a, "potential.fit_params")
    rep.add("beta", p.beta, "potential.fit_params", _label(s.key, "beta") if s.key in R.POTENTIALS else "")
    rep.add("b", p.b, "potential.PotentialParams.b")
    rep.add("residual_rms", fit.residual_rms, "potential.fit_params")
    rep.add("condition_estimate", fit.condition_estimate, "potential.fit_params")
    rep.add("sample_count", fit.sample_count, "potential.fit_params")
    rep.add("beta_diagnostic", beta_diagnostic(s.m, s.n), "potential.beta_diagnostic")
    rep.check("design residual rms", fit.residual_rms, 1e-9)
    if s.key in R.POTENTIALS:
        ref = R.POTENTIALS[s.key]
        rep.check_close(_label(s.key, "alpha"), p.alpha, ref["alpha"], 1e-8)
        rep.check("|a|", p.a, 1e-8, expected=0.0)
        rep.check_close(_label(s.key, "beta"), p.beta, ref["beta"], 1e-10)
        if s.key in R.CONSTANTS:
            e = total_energy(s.ch, p, 0.0)
            rep.add("E", e, "potential.total_energy", _label(s.key, "E"))
            rep.check_close(_label(s.key, "E"), e, R.CONSTANTS[s.key]["E"], 1e-12)
    return rep


def cmd_verify(args) -> RunReport:
    s = Setup(args)
    tol = args.tol if args.tol is not None else 1e-11
    rep = RunReport("verify", s.inputs(tol=tol, periods=args.periods, grid=args.grid, method=args.method))
    p = _fit(s).params
    cert = verify_choreography(s.ch, p, args.grid)
    rep.add("certificate", cert, "dynamics.verify_choreography")
    if not rep.check("newton certificate", cert, 1e-9):
        return rep  # integration only runs after the cheap certificate passes
    dr, traj = drift_report(s.ch, p, args.periods, tol, method=args.method)
    rep.add("return_distance", dr.return_distance, "dynamics.drift_report")
    rep.add("max_on_curve_residual", dr.max_on_curve_residual, "dynamics.drift_report")
    rep.add("max_cm", dr.max_cm, "dynamics.drift_report")
    rep.add("energy_drift", dr.energy_drift, "dynamics.drift_report")
    rep.add("steps", dr.steps, "dynamics.drift_report")
    rep.check("return distance", dr.return_distance, 1e-6)
    rep.check("on-curve residual", dr.max_on_curve_residual, 1e-6)
    rep.check("relative energy drift", dr.energy_drift, 100 * tol * max(args.periods, 1))
    if args.csv and traj is not None:
        with open(args.csv, "w") as fh:
            fh.write(trajectory_csv(traj.t, traj.pos, traj.vel))
    return rep


def cmd_scan_subsets(args) -> RunReport:
    s = Setup(args)
    tol = args.tol if args.tol is not None else CONSTANCY_TOL
    rep = RunReport("scan-subsets", s.inputs(grid=args.grid, tol=tol))
    scan = subset_scan(s.ch, args.grid, tol)
    rep.add("subsets_tested", scan.subsets_tested, "invariants.subset_scan")
    rep.add("sum_survivors", [p.label() for p in scan.sum_survivors], "invariants.subset_scan")
    rep.add("product_survivors", [p.label() for p in scan.product_survivors], "invariants.subset_scan")
    if s.pairs is not None:
        full = all_pairs(s.n)
        want_sum = {s.pairs, full}
        if len(s.pairs) < len(full):
            want_sum.add(s.pairs.complement(s.n))
        got_sum = set(scan.sum_survivors)
        got_prod = set(scan.product_survivors)
        rep.check("sum survivors are the expected sets", len(got_sum ^ want_sum), 0)
        rep.check("product survivors are the expected set", len(got_prod ^ {s.pairs}), 0)
    return rep


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_time(expr: str, K: float) -> float:
    """Evaluate a time such as ``0``, ``1.5``, ``K/5``, ``tau/3`` or ``2*K/5``."""
    names = {"K": K, "tau": 4.0 * K}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in names:
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise ValueError(f"unsupported time expression {expr!r}")

    return ev(ast.parse(expr, mode="eval"))


def cmd_figure(args) -> RunReport:
    s = Setup(args)
    exprs = args.t or ["0"]
    times = [parse_time(e, s.ch.quarter_period) for e in exprs]
    rep = RunReport("figure", s.inputs(times=exprs, out=args.out))
    svg = render_svg(s.ch, times, s.pairs, labels=[f"t = {e}" for e in exprs])
    with open(args.out, "w") as fh:
        fh.write(svg)
    for e, t in zip(exprs, times):
        pos = s.ch.positions(t)
        cm = float(np.linalg.norm(pos.sum(axis=0)))
        rep.add(f"cm[t={e}]", cm, "choreography.center_of_mass")
        rep.check(f"centre of mass at origin, t = {e}", cm, 1e-10)
        if s.pairs is not None:
            r = {f"r{i}{j}": float(np.linalg.norm(pos[i - 1] - pos[j - 1])) for i, j in s.pairs}
            rep.add(f"chords[t={e}]", r, "invariants.relative_distance_sq")
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lemnilab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, modulus=True, grid=None, tol=True):
        p.add_argument("--n", type=int, default=5, help="number of bodies")
        if modulus:
            p.add_argument("--modulus", default="1", help="root index (1-based) or the value of m = k^2")
            p.add_argument("--pairs", choices=("nearest", "next-nearest", "all"),
                           help="override the logarithmic pair set")
        if grid is not None:
            p.add_argument("--grid", type=int, default=grid, help="period grid size")
        if tol:
            p.add_argument("--tol", type=float, default=None, help="tolerance")
        p.add_argument("--out", help="output path (report, or SVG for figure)")

    p = sub.add_parser("find-moduli", help="solve the centre-of-mass condition for m")
    common(p, modulus=False, tol=False)
    p.set_defaults(func=cmd_find_moduli)

    p = sub.add_parser("constants", help="conserved quantities and constancy diagnostics")
    common(p, grid=256)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("fit", help="recover the potential parameters")
    common(p, tol=False)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="Newton certificate and integration closure")
    common(p, grid=64)
    p.add_argument("--periods", type=int, default=1)
    p.add_argument("--method", choices=("dopri5", "yoshida"), default="dopri5")
    p.add_argument("--csv", help="write the sampled trajectory as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan-subsets", help="search all pair subsets for constant sums/products")
    common(p, grid=256)
    p.set_defaults(func=cmd_scan_subsets)

    p = sub.add_parser("figure", help="SVG snapshot(s) of the configuration")
    common(p, tol=False)
    p.add_argument("--t", action="append", help="time, e.g. 0, K/5, tau/3 (repeatable)")
    p.set_defaults(func=cmd_figure)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "figure" and not args.out:
        args.out = "figure.svg"
    start = time.perf_counter()
    rep = args.func(args)
    text = rep.render()
    if args.out and args.command != "figure":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{args.command}: {rep.to_tree()['summary']['status']} in {time.perf_counter() - start:.3f} s",
          file=sys.stderr)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
