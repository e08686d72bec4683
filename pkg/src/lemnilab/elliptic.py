"""Complete elliptic integral K(m) and Jacobi elliptic functions sn, cn, dn.

The parameter is always ``m = k**2`` (the squared modulus). Both K and the
Jacobi functions use the arithmetic-geometric mean, which stays accurate as
``m -> 1`` where power series in ``k`` break down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._core import kernels
from .errors import DomainError


@dataclass(frozen=True)
class EllipticModulus:
    """Squared elliptic modulus ``m = k**2`` restricted to ``[0, 1)``."""

    m: float

    def __post_init__(self):
        check_modulus(self.m)

    def __float__(self):
        return float(self.m)

    @property
    def k(self) -> float:
        return math.sqrt(self.m)

    @property
    def complementary(self) -> float:
        return 1.0 - self.m


class JacobiTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


def check_modulus(m) -> float:
    """Return ``m`` as float, raising DomainError unless ``0 <= m < 1``."""
    m = float(m)
    if not (0.0 <= m < 1.0):
        raise DomainError(f"elliptic parameter m must lie in [0, 1), got m={m!r}")
    return m


def complete_K(m) -> float:
    """Quarter period K(m) = int_0^1 dx / sqrt((1 - x^2)(1 - m x^2))."""
    return kernels.complete_k(check_modulus(m))


def period(m) -> float:
    """Full period 4K(m) of sn and cn."""
    return 4.0 * complete_K(m)


def jacobi(t, m) -> JacobiTriple:
    """Jacobi elliptic functions at argument ``t`` (scalar or array).

    The argument is reduced modulo 4K before the Landen descent, so large
    ``|t|`` costs no accuracy beyond the rounding of 4K itself.
    """
    m = check_modulus(m)
    if np.ndim(t) == 0:
        t = float(t)
        if not math.isfinite(t):
            raise DomainError(f"Jacobi argument must be finite, got t={t!r}")
        return JacobiTriple(*kernels.jacobi(t, m))
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("Jacobi argument array contains non-finite values")
    return JacobiTriple(*kernels.jacobi_array(t, m))


def jacobi_derivatives(j: JacobiTriple, m) -> JacobiTriple:
    """Time derivatives (sn', cn', dn') = (cn dn, -sn dn, -m sn cn)."""
    m = float(m)
    sn, cn, dn = j
    return JacobiTriple(cn * dn, -sn * dn, -m * sn * cn)
