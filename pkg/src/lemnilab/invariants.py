"""Conserved quantities of lemniscate choreographies and their certification.

Body labels are 1-based throughout this module (``r_12`` is the distance
between bodies 1 and 2), matching the physical labeling of a choreography.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .choreography import BodyState, Choreography, Phase
from .errors import PreconditionError
from .lemniscate import curvature_from_motion

CONSTANCY_TOL = 1e-9


@dataclass(frozen=True)
class PairSet:
    """Set of unordered body pairs (1-based labels, each stored as i < j)."""

    pairs: tuple

    def __post_init__(self):
        norm = []
        for i, j in self.pairs:
            i, j = int(i), int(j)
            if i == j or min(i, j) < 1:
                raise ValueError(f"invalid pair ({i}, {j})")
            norm.append((min(i, j), max(i, j)))
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate pairs in PairSet")
        object.__setattr__(self, "pairs", tuple(sorted(norm)))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def index_array(self) -> np.ndarray:
        """0-based (p, 2) integer array for kernel calls."""
        return np.array(self.pairs, dtype=np.int_).reshape(-1, 2) - 1

    def complement(self, n: int) -> "PairSet":
        return PairSet(tuple(p for p in all_pairs(n) if p not in set(self.pairs)))

    def label(self) -> str:
        return " ".join(f"r{i}{j}" for i, j in self.pairs)


def all_pairs(n: int) -> PairSet:
    return PairSet(tuple(itertools.combinations(range(1, n + 1), 2)))


def neighbor_pairs(n: int, step: int) -> PairSet:
    """Pairs (i, i + step) with labels taken cyclically mod n."""
    return PairSet(tuple((i, (i + step - 1) % n + 1) for i in range(1, n + 1)))


def nearest(n: int = 5) -> PairSet:
    return neighbor_pairs(n, 1)


def next_nearest(n: int = 5) -> PairSet:
    return neighbor_pairs(n, 2)


def canonical_set(n: int, modulus_index: int) -> PairSet:
    """Pair set carrying the product/sum integrals for the given modulus.

    Five bodies: modulus 1 (smaller m) -> nearest neighbours, modulus 2 ->
    next-to-nearest. Three bodies: all pairs.
    """
    if n == 3:
        return all_pairs(3)
    if n == 5 and modulus_index in (1, 2):
        return nearest(5) if modulus_index == 1 else next_nearest(5)
    raise ValueError(f"no canonical pair set for n={n}, modulus index {modulus_index}")


def _arrays(states):
    """(pos, vel) arrays of shape (..., n, 2) from a Phase or BodyState list."""
    if isinstance(states, Phase):
        return states.pos, states.vel
    if isinstance(states, tuple) and len(states) in (2, 3) and isinstance(states[0], np.ndarray):
        return states[0], states[1]
    pos = np.array([[s.position.x, s.position.y] for s in states])
    vel = np.array([[s.velocity.x, s.velocity.y] for s in states])
    return pos, vel


def relative_distance_sq(states, i: int, j: int):
    if i == j:
        raise IndexError(f"relative distance needs two distinct bodies, got i = j = {i}")
    pos, _ = _arrays(states)
    n = pos.shape[-2]
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"body labels must lie in 1..{n}, got ({i}, {j})")
    d = pos[..., i - 1, :] - pos[..., j - 1, :]
    return _scalar(np.sum(d * d, axis=-1))


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _pair_r2(pos, ps: PairSet):
    idx = ps.index_array()
    d = pos[..., idx[:, 0], :] - pos[..., idx[:, 1], :]
    return np.sum(d * d, axis=-1)


def product_integral(states, ps: PairSet):
    pos, _ = _arrays(states)
    return _scalar(np.prod(_pair_r2(pos, ps), axis=-1))


def sum_integral(states, ps: PairSet):
    pos, _ = _arrays(states)
    return _scalar(np.sum(_pair_r2(pos, ps), axis=-1))


def moment_of_inertia(states):
    pos, _ = _arrays(states)
    return _scalar(np.sum(pos * pos, axis=(-2, -1)))


def hyper_radius_gap(states):
    """sum_{i<j} r_ij^2 - n * sum_i |x_i|^2; zero whenever the CM is at the origin."""
    pos, _ = _arrays(states)
    n = pos.shape[-2]
    return _scalar(sum_integral((pos, None), all_pairs(n)) - n * np.sum(pos * pos, axis=(-2, -1)))


def hyper_radius_sq(states, cm_tol: float = 1e-9):
    """Sum of all squared mutual distances.

    Requires the CM at the origin (|sum x_i| <= cm_tol) so that the value
    also equals n * sum |x_i|^2; see :func:`hyper_radius_gap`.
    """
    pos, _ = _arrays(states)
    cm = np.sqrt(np.sum(pos.sum(axis=-2) ** 2, axis=-1))
    if np.max(cm) > cm_tol:
        raise PreconditionError(f"center of mass displaced by {np.max(cm):.3e} > {cm_tol:.1e}")
    n = pos.shape[-2]
    return sum_integral((pos, None), all_pairs(n))


def angular_momentum(states):
    pos, vel = _arrays(states)
    return _scalar(np.sum(pos[..., 0] * vel[..., 1] - pos[..., 1] * vel[..., 0], axis=-1))


def kinetic_energy(states):
    _, vel = _arrays(states)
    return _scalar(0.5 * np.sum(vel * vel, axis=(-2, -1)))


def oscillator_constants(states, m: float):
    """J_i = |v_i|^2 + (m - 1/2) |x_i|^2 for each body; shape (..., n).

    Holds for any m (c = 1), so it is a property of the parametrization and
    not evidence of dynamics by itself.
    """
    pos, vel = _arrays(states)
    return np.sum(vel * vel, axis=-1) + (float(m) - 0.5) * np.sum(pos * pos, axis=-1)


def curvature_sum(phase: Phase):
    """Sum over bodies of rho_i^-2 from |v x a| / |v|^3; needs accelerations."""
    return _scalar(np.sum(curvature_from_motion(phase.vel, phase.acc), axis=-1))


def third_integral(states, ps: PairSet):
    """I_HR minus the sum integral over ``ps``: the complementary-set sum."""
    pos, _ = _arrays(states)
    n = pos.shape[-2]
    return _scalar(sum_integral((pos, None), all_pairs(n)) - sum_integral((pos, None), ps))


@dataclass(frozen=True)
class ConservationReport:
    name: str
    grid_size: int
    mean: float
    max_deviation: float
    relative: bool
    tolerance: float
    passed: bool
    note: str = ""

    @property
    def scaled_deviation(self) -> float:
        if self.relative and self.mean != 0.0:
            return self.max_deviation / abs(self.mean)
        return self.max_deviation


def period_grid(ch: Choreography, grid_size: int) -> np.ndarray:
    return np.arange(grid_size) * (ch.period / grid_size)


def quantity_catalog(ch: Choreography, ps: PairSet | None = None, params=None) -> dict:
    """Named quantity evaluators ``phase -> values`` for a choreography.

    Each entry maps to (function, relative?) where relative selects
    relative-vs-absolute deviation in constancy reports.
    """
    n, m = ch.n, ch.m
    full = all_pairs(n)
    cat: dict[str, tuple[Callable, bool]] = {
        "L": (lambda ph: angular_momentum(ph), False),
        "T": (lambda ph: kinetic_energy(ph), True),
        "I_HR": (lambda ph: sum_integral(ph, full), True),
        "moment_of_inertia": (lambda ph: moment_of_inertia(ph), True),
        "curvature_sum": (lambda ph: curvature_sum(ph), True),
        "curvature_identity": (lambda ph: curvature_sum(ph) - 9.0 / n * sum_integral(ph, full), False),
        "J": (lambda ph: oscillator_constants(ph, m), True),
    }
    if ps is not None:
        cat["I1"] = (lambda ph: product_integral(ph, ps), True)
        cat["I2"] = (lambda ph: sum_integral(ph, ps), True)
        cat["I3"] = (lambda ph: third_integral(ph, ps), True)
    if params is not None:
        from .potential import potential_energy

        cat["V"] = (lambda ph: potential_energy(ph, params), True)
        cat["E"] = (lambda ph: kinetic_energy(ph) + potential_energy(ph, params), True)
    return cat


def constancy_report(
    ch: Choreography,
    quantity,
    grid_size: int = 256,
    tol: float = CONSTANCY_TOL,
    ps: PairSet | None = None,
    params=None,
    relative: bool = True,
    name: str | None = None,
) -> ConservationReport:
    """Evaluate a quantity on an equispaced grid over one period.

    ``quantity`` is a catalog name (see :func:`quantity_catalog`) or a
    callable taking a :class:`Phase`. Vector-valued quantities (e.g. the
    per-body ``J``) are checked component-wise against their grand mean.
    """
    if grid_size < 8:
        raise ValueError(f"grid_size must be >= 8, got {grid_size}")
    if isinstance(quantity, str):
        fn, relative = quantity_catalog(ch, ps, params)[quantity]
        name = name or quantity
    else:
        fn = quantity
        name = name or getattr(quantity, "__name__", "quantity")
    values = np.asarray(fn(ch.phase(period_grid(ch, grid_size))), dtype=float)
    mean = float(np.mean(values))
    dev = float(np.max(np.abs(values - mean)))
    scale = abs(mean) if relative and mean != 0.0 else 1.0
    note = "parametrization property" if name == "J" else ""
    return ConservationReport(name, grid_size, mean, dev, relative, tol, dev / scale <= tol, note)


@dataclass(frozen=True)
class SubsetScan:
    sum_survivors: list
    product_survivors: list
    subsets_tested: int


def subset_scan(ch: Choreography, grid_size: int = 256, tol: float = CONSTANCY_TOL) -> SubsetScan:
    """Test every non-empty subset of pairs for a constant sum or product of r^2."""
    full = all_pairs(ch.n)
    pos = ch.positions(period_grid(ch, grid_size))
    r2 = _pair_r2(pos, full)  # (grid, npairs)
    logr2 = np.log(r2)
    npairs = len(full)
    masks = np.array(list(itertools.product((0, 1), repeat=npairs))[1:], dtype=float)
    sums = r2 @ masks.T  # (grid, subsets)
    logs = logr2 @ masks.T

    def survivors(values, is_log):
        out = []
        for k in range(values.shape[1]):
            col = values[:, k]
            if is_log:
                # relative variation of the product equals spread of its log
                dev = np.max(np.abs(np.expm1(col - np.mean(col))))
            else:
                dev = np.max(np.abs(col - col.mean())) / abs(col.mean())
            if dev <= tol:
                out.append(PairSet(tuple(p for p, bit in zip(full, masks[k]) if bit)))
        return out

    return SubsetScan(survivors(sums, False), survivors(logs, True), len(masks))


def shift_coincidence(ch: Choreography, ps: PairSet, grid_size: int = 256) -> float:
    """Max |r^2_pair(t) - r^2_ref(t + s)| over the set, s a multiple of tau/n.

    For each pair the best shift is chosen from the n candidates.
    """
    t = period_grid(ch, grid_size)
    ref_pair = ps.pairs[0]
    ref = {}
    for k in range(ch.n):
        ref[k] = relative_distance_sq(ch.phase(t + k * ch.period / ch.n), *ref_pair)
    worst = 0.0
    for pair in ps.pairs:
        r = relative_distance_sq(ch.phase(t), *pair)
        worst = max(worst, min(float(np.max(np.abs(r - ref[k]))) for k in ref))
    return worst


def gradient_rank(ch: Choreography, ps: PairSet, params, t: float = 0.37, h: float = 1e-6):
    """Numeric rank of the phase-space gradients of the listed quantities at time t.

    Quantities are treated as functions of all positions and velocities
    (4n variables). Returns (names, singular values, rank at 1e-8 relative).
    This is a diagnostic on one phase-space point, not an independence proof.
    """
    from .potential import potential_energy

    n, m = ch.n, ch.m
    ph = ch.phase(float(t))
    z0 = np.concatenate([ph.pos.ravel(), ph.vel.ravel()])

    def funcs(z):
        pos = z[: 2 * n].reshape(n, 2)
        vel = z[2 * n:].reshape(n, 2)
        st = (pos, vel)
        full = all_pairs(n)
        vals = [
            angular_momentum(st),
            kinetic_energy(st) + potential_energy(st, params),
            product_integral(st, ps),
            sum_integral(st, ps),
            sum_integral(st, full),
            kinetic_energy(st),
        ]
        vals.extend(oscillator_constants(st, m))
        return np.array(vals, dtype=float)

    names = ["L", "E", "I1", "I2", "I_HR", "T"] + [f"J{i}" for i in range(1, n + 1)]
    cols = []
    for k in range(z0.size):
        e = np.zeros_like(z0)
        e[k] = h
        cols.append((funcs(z0 + e) - funcs(z0 - e)) / (2 * h))
    jac = np.array(cols).T
    jac /= np.linalg.norm(jac, axis=1, keepdims=True)
    sv = np.linalg.svd(jac, compute_uv=False)
    return names, sv, int(np.sum(sv > 1e-8 * sv[0]))


@dataclass(frozen=True)
class DistanceExtrema:
    pair: tuple
    minimum: float
    t_min: float
    maximum: float
    t_max: float


def distance_extrema(ch: Choreography, i: int, j: int, grid_size: int = 4096) -> DistanceExtrema:
    """Global min and max of r_ij(t) over one period.

    Sign changes of d(r^2)/dt on a grid bracket the critical points, which
    are then polished with Brent's method on the derivative.
    """
    from scipy.optimize import brentq

    def deriv(t):
        ph = ch.phase(t)
        d = ph.pos[..., i - 1, :] - ph.pos[..., j - 1, :]
        dv = ph.vel[..., i - 1, :] - ph.vel[..., j - 1, :]
        return 2.0 * np.sum(d * dv, axis=-1)

    t = np.linspace(0.0, ch.period, grid_size + 1)
    g = deriv(t)
    crit = [float(t[k]) for k in range(grid_size) if g[k] == 0.0]
    for k in np.nonzero(g[:-1] * g[1:] < 0)[0]:
        crit.append(brentq(lambda s: float(deriv(s)), t[k], t[k + 1], xtol=1e-15, rtol=8.9e-16))
    crit = np.array(crit)
    r = np.sqrt(relative_distance_sq(ch.phase(crit), i, j))
    lo, hi = int(np.argmin(r)), int(np.argmax(r))
    return DistanceExtrema((i, j), float(r[lo]), float(crit[lo]), float(r[hi]), float(crit[hi]))
