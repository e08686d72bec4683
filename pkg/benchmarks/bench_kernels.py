"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from lemnilab import _kernels_py as py
from lemnilab.choreography import Choreography, find_moduli
from lemnilab.invariants import canonical_set
from lemnilab.potential import fit_params

try:
    from lemnilab import _kernels as cy
except ImportError:
    cy = None


def cases():
    m = find_moduli(5)[1]
    ch = Choreography(5, m)
    p = fit_params(ch, canonical_set(5, 2)).params
    ph = ch.phase(0.0)
    pairs = p.log_set.index_array()
    u = np.linspace(-40, 40, 100_000)
    grid = np.linspace(0, ch.period, 256)
    args = (pairs, p.alpha, p.a, p.b)
    t_out = np.array([0.0, ch.period])
    return {
        "jacobi_array (1e5 points)": lambda k: k.jacobi_array(u, m),
        "curve_kinematics (1e5 points)": lambda k: k.curve_kinematics(u, m, 1.0),
        "curve_kinematics (256 points)": lambda k: k.curve_kinematics(grid, m, 1.0),
        "pair_forces (one call)": lambda k: k.pair_forces(ph.pos, *args),
        "dopri5 (one period, tol 1e-11)": lambda k: k.dopri5(ph.pos, ph.vel, *args, 0.0, t_out, 1e-11, 1e-3, 10**7),
        "yoshida4 (2000 steps)": lambda k: k.yoshida4(ph.pos, ph.vel, *args, ch.period / 2000, 2000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>9s}")
    for name, fn in cases().items():
        reps = 1 if "1e5" in name or "dopri5" in name or "yoshida" in name else 200
        tp = min(timeit.repeat(lambda: fn(py), number=reps, repeat=args.repeat)) / reps
        if cy is None:
            print(f"{name:34s} {tp * 1e3:12.3f} {'n/a':>12s}")
            continue
        tc = min(timeit.repeat(lambda: fn(cy), number=reps, repeat=args.repeat)) / reps
        print(f"{name:34s} {tp * 1e3:12.3f} {tc * 1e3:12.3f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
