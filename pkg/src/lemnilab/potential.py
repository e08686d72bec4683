"""Pairwise potential family, its forces, and recovery of its parameters.

Internally every potential is written as

    V = alpha * sum_{log set} ln r^2 + a * sum_{log set} r^2 + b * sum_{all} r^2

with ``b = -beta``. The five-body convention quotes ``beta`` multiplying
``-I_HR`` (positive, repulsive inverted oscillator); the three-body
convention quotes the coefficient of ``+I_2`` directly, which is ``b``.
:class:`PotentialParams` stores ``beta`` and converts on demand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ._core import kernels
from .choreography import Choreography, Phase
from .errors import IllPosedFitError
from .invariants import PairSet, _arrays, all_pairs, kinetic_energy

MAX_CONDITION = 1e12
FIT_SAMPLES = 32


@dataclass(frozen=True)
class PotentialParams:
    alpha: float
    a: float
    beta: float
    log_set: PairSet

    @property
    def b(self) -> float:
        """Coefficient of +sum_{all} r^2 (equals -beta)."""
        return -self.beta

    @classmethod
    def from_harmonic_coefficient(cls, alpha, b, log_set, a=0.0):
        """Build from the coefficient of +sum r^2 (three-body convention)."""
        return cls(alpha, a, -b, log_set)

    def with_beta(self, beta: float) -> "PotentialParams":
        return PotentialParams(self.alpha, self.a, beta, self.log_set)


@dataclass(frozen=True)
class FitResult:
    params: PotentialParams
    residual_rms: float
    condition_estimate: float
    sample_count: int
    columns: tuple


def potential_energy(states, p: PotentialParams):
    pos, _ = _arrays(states)
    idx = p.log_set.index_array()
    if pos.ndim == 2:
        return kernels.pair_potential(pos, idx, p.alpha, p.a, p.b)
    flat = pos.reshape(-1, *pos.shape[-2:])
    out = np.array([kernels.pair_potential(x, idx, p.alpha, p.a, p.b) for x in flat])
    return out.reshape(pos.shape[:-2])


def forces(states, p: PotentialParams) -> np.ndarray:
    """F_i = -grad_i V for every body; array (n, 2). Sum over bodies is zero."""
    pos, _ = _arrays(states)
    return kernels.pair_forces(np.asarray(pos, dtype=float), p.log_set.index_array(), p.alpha, p.a, p.b)


def total_energy(ch: Choreography, p: PotentialParams, t) -> float:
    ph = ch.phase(t)
    return kinetic_energy(ph) + potential_energy(ph, p)


def sample_times(ch: Choreography, count: int = FIT_SAMPLES) -> np.ndarray:
    """Times k * tau / sqrt(2) mod tau, k = 1..count; never a symmetric instant."""
    k = np.arange(1, count + 1)
    return np.mod(k * ch.period / math.sqrt(2.0), ch.period)


def design_columns(pos: np.ndarray, log_set: PairSet) -> dict:
    """Force contribution per unit coefficient, each of shape (..., n, 2)."""
    n = pos.shape[-2]
    idx = log_set.index_array()
    d = pos[..., idx[:, 0], :] - pos[..., idx[:, 1], :]
    r2 = np.sum(d * d, axis=-1, keepdims=True)
    g_alpha = np.zeros_like(pos)
    g_a = np.zeros_like(pos)
    for q, (i, j) in enumerate(idx):
        g_alpha[..., i, :] -= 2.0 * d[..., q, :] / r2[..., q, :]
        g_alpha[..., j, :] += 2.0 * d[..., q, :] / r2[..., q, :]
        g_a[..., i, :] -= 2.0 * d[..., q, :]
        g_a[..., j, :] += 2.0 * d[..., q, :]
    g_b = -2.0 * (n * pos - pos.sum(axis=-2, keepdims=True))
    return {"alpha": g_alpha, "a": g_a, "b": g_b}


def solve_least_squares(A: np.ndarray, y: np.ndarray):
    """Householder QR solve of min |A x - y|; returns (x, residual, cond(R))."""
    q, r = np.linalg.qr(A, mode="reduced")
    sv = np.linalg.svd(r, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > MAX_CONDITION:
        raise IllPosedFitError(f"design matrix condition {cond:.3e} exceeds {MAX_CONDITION:.0e}", cond)
    x = solve_triangular(r, q.T @ y)
    return x, A @ x - y, cond


def fit_to_samples(pos, acc, log_set: PairSet):
    """Fit (alpha, a, b) so that acc_i = F_i(pos) at all samples."""
    pos = np.asarray(pos, dtype=float)
    acc = np.asarray(acc, dtype=float)
    n = pos.shape[-2]
    cols = design_columns(pos, log_set)
    # with every pair in the log set, sum_log r^2 == sum_all r^2 and a is unidentifiable
    names = ("alpha", "b") if len(log_set) == len(all_pairs(n)) else ("alpha", "a", "b")
    A = np.stack([cols[k].ravel() for k in names], axis=1)
    x, res, cond = solve_least_squares(A, acc.ravel())
    coef = dict(zip(names, x))
    params = PotentialParams(float(coef["alpha"]), float(coef.get("a", 0.0)), -float(coef["b"]), log_set)
    rms = float(np.sqrt(np.mean(res * res)))
    return FitResult(params, rms, cond, pos.reshape(-1, n, 2).shape[0], names)


def fit_params(ch: Choreography, log_set: PairSet, times=None) -> FitResult:
    """Recover (alpha, a, beta) from Newton's equations along the choreography.

    Stacks acceleration_i(t) = F_i(positions(t)) over bodies, components and
    sample times, then solves the linear least-squares problem by QR.
    """
    times = sample_times(ch) if times is None else np.asarray(times, dtype=float)
    if times.size < 3:
        raise ValueError("need at least 3 sample times")
    ph = ch.phase(times)
    return fit_to_samples(ph.pos, ph.acc, log_set)


def beta_diagnostic(m: float, n: int) -> float:
    """(m - 1/2) / (2n): an empirical closed form that the fitted beta is compared to."""
    return (float(m) - 0.5) / (2.0 * n)


def newton_residual(phase: Phase, p: PotentialParams) -> float:
    """max_i |a_i - F_i| over all given instants."""
    pos = phase.pos.reshape(-1, *phase.pos.shape[-2:])
    acc = phase.acc.reshape(pos.shape)
    worst = 0.0
    for x, a in zip(pos, acc):
        f = forces((x, None), p)
        worst = max(worst, float(np.max(np.linalg.norm(a - f, axis=-1))))
    return worst
