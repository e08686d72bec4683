"""N equal-mass bodies chasing each other along one lemniscate.

Body ``i`` (1-based) sits at ``x(t + offset_i)`` with offsets spaced by
``tau / n``. For five bodies the offsets are ``(-2, -1, 0, 1, 2) * tau/5``;
for three bodies ``(0, +tau/3, -tau/3)``. Other ``n`` use the centered
layout ``(j - (n - 1)/2) * tau/n``.

The admissible moduli are those for which the center of mass stays at the
origin for all ``t``; :func:`find_moduli` locates them.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .elliptic import check_modulus, complete_K
from .errors import ConvergenceError, DomainError
from .lemniscate import LemniscateCurve, PlaneVec

log = logging.getLogger(__name__)

CM_GRID = 64
CERTIFY_TOL = 1e-10
# probe time as a fraction of tau/n; any value strictly inside (0, 1/2)
# avoids the instants where symmetry forces the CM to vanish for every m
PROBE_FRACTION = (math.sqrt(5.0) - 1.0) / 4.0


class BodyState(NamedTuple):
    position: PlaneVec
    velocity: PlaneVec


class Phase(NamedTuple):
    """Vectorized body states: arrays of shape (..., n, 2)."""

    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray


def body_offsets(n: int, tau: float) -> np.ndarray:
    if n == 3:
        return np.array([0.0, tau / 3.0, -tau / 3.0])
    return (np.arange(n) - 0.5 * (n - 1)) * (tau / n)


@dataclass(frozen=True)
class Choreography:
    n: int
    m: float
    c: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"body count must be an integer >= 2, got {self.n!r}")
        check_modulus(self.m)

    @property
    def masses(self) -> np.ndarray:
        return np.ones(self.n)

    @cached_property
    def curve(self) -> LemniscateCurve:
        return LemniscateCurve(self.m, self.c)

    @cached_property
    def quarter_period(self) -> float:
        return complete_K(self.m)

    @property
    def period(self) -> float:
        return 4.0 * self.quarter_period

    @cached_property
    def offsets(self) -> np.ndarray:
        return body_offsets(self.n, self.period)

    def kinematics(self, t) -> np.ndarray:
        """Shape ``t.shape + (n, 6)``; columns x, y, vx, vy, ax, ay."""
        t = np.asarray(t, dtype=float)
        return self.curve.kinematics(t[..., None] + self.offsets)

    def phase(self, t) -> Phase:
        kin = self.kinematics(t)
        return Phase(kin[..., 0:2], kin[..., 2:4], kin[..., 4:6])

    def positions(self, t) -> np.ndarray:
        return self.kinematics(t)[..., 0:2]

    def states(self, t: float) -> list[BodyState]:
        kin = self.kinematics(float(t))
        return [
            BodyState(PlaneVec(float(r[0]), float(r[1])), PlaneVec(float(r[2]), float(r[3])))
            for r in kin
        ]


def center_of_mass(ch: Choreography, t):
    """Unnormalized sum of positions (unit masses); PlaneVec of floats or arrays."""
    s = ch.positions(t).sum(axis=-2)
    if s.ndim == 1:
        return PlaneVec(float(s[0]), float(s[1]))
    return PlaneVec(s[..., 0], s[..., 1])


def _cm_grid_residual(n: int, m: float) -> np.ndarray:
    ch = Choreography(n, m)
    t = (np.arange(CM_GRID) + 0.5) * (ch.period / CM_GRID)
    return ch.positions(t).sum(axis=-2).ravel()


def cm_defect(n: int, m) -> float:
    """RMS of |CM(t)| over 64 times in (0, tau) that skip t = 0 and t = tau/2."""
    r = _cm_grid_residual(n, check_modulus(m))
    return math.sqrt(2.0 * float(np.mean(r * r)))


def cm_probe(n: int, m: float) -> np.ndarray:
    """Signed CM components at the probe time; used to bracket roots."""
    ch = Choreography(n, m)
    return ch.positions(PROBE_FRACTION * ch.period / n).sum(axis=0)


def scan_grid() -> np.ndarray:
    coarse = np.arange(0.001, 0.9995, 5e-4)
    # tau grows like log(1/(1-m)); refine geometrically toward m = 1
    tail = 1.0 - np.geomspace(5e-4, 1e-9, 40)
    return np.concatenate([coarse, tail[1:]])


def _gauss_newton(n: int, m: float, lo: float, hi: float, steps: int = 4, h: float = 1e-7) -> float:
    """Least-squares polish of m against the whole CM grid residual, kept in [lo, hi]."""
    for _ in range(steps):
        hh = min(h, 0.5 * (1.0 - m), 0.5 * m)
        r = _cm_grid_residual(n, m)
        jac = (_cm_grid_residual(n, m + hh) - _cm_grid_residual(n, m - hh)) / (2.0 * hh)
        jj = float(jac @ jac)
        if jj == 0.0:
            break
        step = -float(jac @ r) / jj
        m = min(max(m + step, lo), hi)
        if abs(step) < 1e-16:
            break
    return m


@dataclass(frozen=True)
class ModulusRoot:
    m: float
    defect: float
    bracket: tuple


def find_moduli_detailed(n: int, grid=None) -> list[ModulusRoot]:
    if int(n) != n or n < 2:
        raise DomainError(f"body count must be an integer >= 2, got {n!r}")
    grid = scan_grid() if grid is None else np.asarray(grid, dtype=float)
    probes = np.array([cm_probe(n, m) for m in grid])

    roots: list[ModulusRoot] = []
    for comp in (0, 1):
        g = probes[:, comp]
        if np.max(np.abs(g)) < 1e-12:
            # component vanishes identically by symmetry (e.g. even n)
            continue
        for i in np.flatnonzero(g[:-1] * g[1:] <= 0.0):
            lo, hi = float(grid[i]), float(grid[i + 1])
            if g[i] == 0.0:
                guess = lo
            elif g[i + 1] == 0.0:
                continue
            else:
                try:
                    guess = brentq(
                        lambda m, comp=comp: float(cm_probe(n, m)[comp]),
                        lo, hi, xtol=1e-16, rtol=8.9e-16, maxiter=200,
                    )
                except RuntimeError as exc:
                    raise ConvergenceError(f"root polishing failed: {exc}", bracket=(lo, hi)) from exc
            if cm_defect(n, guess) > 1e-6:
                log.debug("n=%d: spurious sign change near m=%.6f", n, guess)
                continue
            m = _gauss_newton(n, guess, lo, hi)
            d = cm_defect(n, m)
            if d <= CERTIFY_TOL:
                roots.append(ModulusRoot(m, d, (lo, hi)))
            else:
                log.debug("n=%d: rejected sign change near m=%.6f (defect %.2e)", n, guess, d)

    roots.sort(key=lambda r: r.m)
    merged: list[ModulusRoot] = []
    for r in roots:
        if merged and abs(r.m - merged[-1].m) < 1e-8:
            if r.defect < merged[-1].defect:
                merged[-1] = r
            continue
        merged.append(r)
    return merged


def find_moduli(n: int) -> list[float]:
    """All m in (0, 1) for which the n-body choreography keeps its CM fixed.

    Scan, bracket on a signed CM component, Brent polish, then Gauss-Newton
    refinement on the full 64-point CM residual. Each returned value has
    ``cm_defect <= 1e-10``. An empty list means no root was found; for
    n outside {3, 5, 7} completeness is not claimed.
    """
    return [r.m for r in find_moduli_detailed(n)]
