"""Acceptance criteria, each with its stated tolerance and runtime budget.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from lemnilab import reference as R
from lemnilab.choreography import Choreography, find_moduli, find_moduli_detailed
from lemnilab.dynamics import drift_report, verify_choreography
from lemnilab.elliptic import complete_K, jacobi
from lemnilab.invariants import (
    all_pairs,
    canonical_set,
    constancy_report,
    distance_extrema,
    subset_scan,
)
from lemnilab.potential import (
    PotentialParams,
    fit_params,
    fit_to_samples,
    forces,
    potential_energy,
    total_energy,
)

from conftest import ACCEPTANCE_LINES


class Criterion:
    def __init__(self, label, budget):
        self.label, self.budget, self.failures = label, budget, []

    def expect(self, ok, what):
        if not ok:
            self.failures.append(what)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is not None:
            self.failures.append(f"raised {exc_type.__name__}: {exc}")
        if self.budget is not None and elapsed > self.budget:
            self.failures.append(f"runtime {elapsed:.2f}s > {self.budget}s")
        status = "PASS" if not self.failures else "FAIL"
        line = f"{status} {self.label} ({elapsed:.2f}s)"
        if self.failures:
            line += ": " + "; ".join(self.failures)
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert not self.failures, line
        return False


def test_1_three_body_modulus():
    with Criterion("1 three-body modulus", 5) as c:
        roots = find_moduli(3)
        c.expect(len(roots) == 1, f"{len(roots)} roots")
        c.expect(abs(roots[0] - (2 + math.sqrt(3)) / 4) <= 1e-12, f"m = {roots[0]!r}")


def test_2_five_body_moduli():
    with Criterion("2 five-body moduli and periods", 30) as c:
        roots = find_moduli(5)
        c.expect(len(roots) == 2, f"{len(roots)} roots")
        for k, m in enumerate(roots[:2], 1):
            c.expect(abs(m - R.MODULI[(5, k)]) <= 1e-12, f"m_{k} off by {m - R.MODULI[(5, k)]:.2e}")
            tau = Choreography(5, m).period
            c.expect(abs(tau - R.PERIODS[(5, k)]) <= 1e-10, f"tau_{k} off by {tau - R.PERIODS[(5, k)]:.2e}")


def test_3_conserved_quantity_table():
    with Criterion("3 conserved-quantity table", 10) as c:
        for k, m in enumerate(find_moduli(5), 1):
            ch = Choreography(5, m)
            ps = canonical_set(5, k)
            params = fit_params(ch, ps).params
            for name, ref in R.CONSTANTS[(5, k)].items():
                rep = constancy_report(ch, name, 256, 1e-9, ps=ps, params=params)
                c.expect(rep.scaled_deviation <= 1e-9, f"{name}_{k} varies by {rep.scaled_deviation:.2e}")
                if name == "L":
                    c.expect(abs(rep.mean) <= 1e-9, f"L_{k} = {rep.mean:.2e}")
                else:
                    err = abs(rep.mean - ref) / abs(ref)
                    c.expect(err <= 1e-9, f"{name}_{k} relative error {err:.2e}")


def test_4_distance_extrema():
    with Criterion("4 distance extrema", 5) as c:
        for k, m in enumerate(find_moduli(5), 1):
            ch = Choreography(5, m)
            for pair, (lo, hi) in R.DISTANCE_EXTREMA[(5, k)].items():
                e = distance_extrema(ch, *pair)
                c.expect(abs(e.minimum - lo) <= 1e-9, f"min r{pair} ({k}) off by {e.minimum - lo:.2e}")
                c.expect(abs(e.maximum - hi) <= 1e-9, f"max r{pair} ({k}) off by {e.maximum - hi:.2e}")


def test_5_potential_recovery():
    with Criterion("5 potential recovery", 5) as c:
        for k, m in enumerate(find_moduli(5), 1):
            fit = fit_params(Choreography(5, m), canonical_set(5, k))
            p = fit.params
            c.expect(abs(p.alpha - 0.25) <= 1e-8, f"alpha_{k} = {p.alpha!r}")
            c.expect(abs(p.a) <= 1e-8, f"a_{k} = {p.a!r}")
            c.expect(abs(p.beta - R.POTENTIALS[(5, k)]["beta"]) <= 1e-10, f"beta_{k} = {p.beta!r}")
            c.expect(fit.residual_rms <= 1e-9, f"residual_{k} = {fit.residual_rms:.2e}")
        ch3 = Choreography(3, find_moduli(3)[0])
        fit = fit_params(ch3, all_pairs(3))
        c.expect(abs(fit.params.alpha - 0.25) <= 1e-8, f"alpha_3 = {fit.params.alpha!r}")
        # the three-body beta is the coefficient of +I_2, stored here as b
        c.expect(abs(fit.params.b + math.sqrt(3) / 24) <= 1e-10, f"b_3 = {fit.params.b!r}")
        c.expect(fit.residual_rms <= 1e-9, f"residual_3 = {fit.residual_rms:.2e}")
        e3 = total_energy(ch3, fit.params, 0.0)
        c.expect(abs(e3 - float("0.23869281311055480691")) <= 1e-12, f"E3 = {e3!r}")


def test_6_newton_certificate():
    with Criterion("6 Newton certificate", None) as c:
        for k, m in enumerate(find_moduli(5), 1):
            ch = Choreography(5, m)
            r = verify_choreography(ch, fit_params(ch, canonical_set(5, k)).params)
            c.expect(r <= 1e-9, f"five-body {k}: {r:.2e}")
        ch3 = Choreography(3, find_moduli(3)[0])
        p3 = PotentialParams.from_harmonic_coefficient(0.25, -math.sqrt(3) / 24, all_pairs(3))
        r = verify_choreography(ch3, p3)
        c.expect(r <= 1e-9, f"three-body: {r:.2e}")


def test_7_integration_closure():
    with Criterion("7 integration closure", 60) as c:
        for k, m in enumerate(find_moduli(5), 1):
            ch = Choreography(5, m)
            p = fit_params(ch, canonical_set(5, k)).params
            rep, _ = drift_report(ch, p, 1, 1e-11)
            c.expect(rep.return_distance <= 1e-6, f"return_{k} = {rep.return_distance:.2e}")
            c.expect(rep.max_on_curve_residual <= 1e-6, f"on-curve_{k} = {rep.max_on_curve_residual:.2e}")
            c.expect(rep.energy_drift <= 1e-9, f"energy_{k} = {rep.energy_drift:.2e}")


def test_8_property_suites():
    with Criterion("8 property suites", None) as c:
        rng = np.random.default_rng(20261017)
        # elliptic identities
        t = rng.uniform(-50, 50, 2000)
        for m in rng.uniform(0, 0.9999, 20):
            sn, cn, dn = jacobi(t, m)
            s1, c1, _ = jacobi(t + 4 * complete_K(m), m)
            s2, c2, _ = jacobi(-t, m)
            c.expect(np.max(np.abs(sn ** 2 + cn ** 2 - 1)) <= 1e-13, f"sn^2+cn^2 at m={m}")
            c.expect(np.max(np.abs(dn ** 2 + m * sn ** 2 - 1)) <= 1e-13, f"dn^2+m sn^2 at m={m}")
            c.expect(np.max(np.abs(s1 - sn)) <= 1e-13 and np.max(np.abs(c1 - cn)) <= 1e-13, f"period at m={m}")
            c.expect(np.max(np.abs(s2 + sn)) <= 1e-13 and np.max(np.abs(c2 - cn)) <= 1e-13, f"parity at m={m}")
        # force / energy gradient consistency
        ps = canonical_set(5, 1)
        p = PotentialParams(0.3, -0.2, 0.07, ps)
        h = 1e-6
        for _ in range(10):
            ang = 2 * np.pi * np.arange(5) / 5 + rng.uniform(-0.2, 0.2, 5)
            x = np.stack([np.cos(ang), np.sin(ang)], axis=1)
            g = np.zeros_like(x)
            for i in range(5):
                for j in range(2):
                    e = np.zeros_like(x)
                    e[i, j] = h
                    g[i, j] = (potential_energy((x + e, None), p) - potential_energy((x - e, None), p)) / (2 * h)
            err = np.max(np.abs(forces((x, None), p) + g))
            c.expect(err <= 1e-7, f"gradient mismatch {err:.2e}")
        # synthetic-parameter round trip
        samples = []
        for _ in range(16):
            ang = 2 * np.pi * np.arange(5) / 5 + rng.uniform(-0.2, 0.2, 5)
            samples.append(np.stack([np.cos(ang), np.sin(ang)], axis=1) * rng.uniform(0.6, 1.4, (5, 1)))
        pos = np.array(samples)
        acc = np.array([forces((x, None), p) for x in pos])
        q = fit_to_samples(pos, acc, ps).params
        err = max(abs(q.alpha - p.alpha), abs(q.a - p.a), abs(q.beta - p.beta))
        c.expect(err <= 1e-12, f"round trip error {err:.2e}")
        # negative controls: wrong pair set misses both thresholds by >= 1e4
        for k, m in enumerate(find_moduli(5), 1):
            ch = Choreography(5, m)
            wrong = canonical_set(5, k).complement(5)
            dev = constancy_report(ch, "I1", 256, ps=wrong).scaled_deviation
            c.expect(dev >= 1e-9 * 1e4, f"wrong-set I1 deviation {dev:.2e} ({k})")
            res = fit_params(ch, wrong).residual_rms
            c.expect(res >= 1e-9 * 1e4, f"wrong-set fit residual {res:.2e} ({k})")


def test_9_subset_scan():
    with Criterion("9 exhaustive pair-subset scan", 60) as c:
        for k, m in enumerate(find_moduli(5), 1):
            ps = canonical_set(5, k)
            scan = subset_scan(Choreography(5, m), 256, 1e-9)
            sums = {s.label() for s in scan.sum_survivors}
            prods = {s.label() for s in scan.product_survivors}
            print(f"modulus {k}: sum survivors {sorted(sums)}; product survivors {sorted(prods)}")
            want = {ps.label(), ps.complement(5).label(), all_pairs(5).label()}
            c.expect(sums == want, f"sum survivors {sorted(sums)}")
            c.expect(prods == {ps.label()}, f"product survivors {sorted(prods)}")


def test_seven_body_properties():
    with Criterion("N=7 three moduli, CM defect and L", None) as c:
        roots = find_moduli_detailed(7)
        c.expect(len(roots) == 3, f"{len(roots)} roots")
        for r in roots:
            c.expect(r.defect <= 1e-10, f"defect {r.defect:.2e} at m={r.m}")
            rep = constancy_report(Choreography(7, r.m), "L", 256, 1e-11)
            c.expect(rep.max_deviation <= 1e-11 and abs(rep.mean) <= 1e-11, f"L varies at m={r.m}")
