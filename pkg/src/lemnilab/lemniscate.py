"""The lemniscate of Bernoulli parametrized by Jacobi elliptic functions.

    x(t) = c sn / (1 + cn^2),   y(t) = c sn cn / (1 + cn^2)

Velocity and acceleration are closed-form (quotient rule plus the Jacobi
derivative identities); nothing here is finite-differenced.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._core import kernels
from .elliptic import check_modulus, complete_K, jacobi
from .errors import DegeneratePointError, DomainError


class PlaneVec(NamedTuple):
    """Planar vector; fields may be floats or equally shaped arrays."""

    x: float
    y: float

    def norm_sq(self):
        return self.x * self.x + self.y * self.y


@dataclass(frozen=True)
class LemniscateCurve:
    m: float
    c: float = 1.0

    def __post_init__(self):
        check_modulus(self.m)
        if not self.c > 0:
            raise DomainError(f"homothety parameter c must be positive, got {self.c!r}")

    @property
    def quarter_period(self) -> float:
        return complete_K(self.m)

    @property
    def period(self) -> float:
        return 4.0 * complete_K(self.m)

    def kinematics(self, t) -> np.ndarray:
        """Array of shape ``t.shape + (6,)``: x, y, vx, vy, ax, ay."""
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise DomainError("time values must be finite")
        return kernels.curve_kinematics(t, self.m, self.c)


def _vec(kin, col):
    if kin.ndim == 1:
        return PlaneVec(float(kin[col]), float(kin[col + 1]))
    return PlaneVec(kin[..., col], kin[..., col + 1])


def position(curve: LemniscateCurve, t) -> PlaneVec:
    if np.ndim(t) == 0:
        sn, cn, _ = jacobi(t, curve.m)
        den = 1.0 + cn * cn
        return PlaneVec(curve.c * sn / den, curve.c * sn * cn / den)
    return _vec(curve.kinematics(t), 0)


def velocity(curve: LemniscateCurve, t) -> PlaneVec:
    return _vec(curve.kinematics(t), 2)


def acceleration(curve: LemniscateCurve, t) -> PlaneVec:
    return _vec(curve.kinematics(t), 4)


def curvature_from_motion(v, a):
    """rho^-2 = (|v x a| / |v|^3)^2 from velocity and acceleration arrays (..., 2)."""
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    cross = v[..., 0] * a[..., 1] - v[..., 1] * a[..., 0]
    v2 = v[..., 0] ** 2 + v[..., 1] ** 2
    if np.any(v2 == 0.0):
        raise DegeneratePointError("curvature undefined at zero velocity")
    return cross * cross / (v2 * v2 * v2)


def curvature_sq_inv(curve: LemniscateCurve, t):
    """Squared curvature rho^-2 at time t via |v x a| / |v|^3."""
    kin = curve.kinematics(t)
    out = curvature_from_motion(kin[..., 2:4], kin[..., 4:6])
    return float(out) if np.ndim(out) == 0 else out


def on_curve_residual(p, c: float = 1.0):
    """(x^2 + y^2)^2 - c^2 (x^2 - y^2); zero exactly on the lemniscate."""
    if isinstance(p, np.ndarray):
        x, y = p[..., 0], p[..., 1]
    else:
        x, y = p
    r2 = x * x + y * y
    return r2 * r2 - c * c * (x * x - y * y)
