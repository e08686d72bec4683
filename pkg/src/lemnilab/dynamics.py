"""Forward integration of Newton's equations under a pairwise potential.

Two independent integrators are provided, both running their step loop
inside the kernel backend: adaptive Dormand-Prince 5(4) with max-norm
local error control, and a fixed-step 4th-order Yoshida composition of
velocity Verlet (symplectic cross-check).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import kernels
from .choreography import BodyState, Choreography
from .lemniscate import PlaneVec, on_curve_residual
from .potential import PotentialParams, newton_residual, potential_energy

TOL_RANGE = (1e-13, 1e-6)


@dataclass(frozen=True)
class SystemState:
    time: float
    pos: np.ndarray
    vel: np.ndarray

    @property
    def bodies(self) -> list[BodyState]:
        return [BodyState(PlaneVec(*map(float, x)), PlaneVec(*map(float, v)))
                for x, v in zip(self.pos, self.vel)]

    @classmethod
    def from_choreography(cls, ch: Choreography, t: float = 0.0) -> "SystemState":
        ph = ch.phase(float(t))
        return cls(float(t), np.array(ph.pos), np.array(ph.vel))


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    pos: np.ndarray  # (T, n, 2)
    vel: np.ndarray
    steps: int

    def state(self, k: int) -> SystemState:
        return SystemState(float(self.t[k]), self.pos[k], self.vel[k])

    @property
    def final(self) -> SystemState:
        return self.state(-1)


@dataclass(frozen=True)
class DriftReport:
    max_on_curve_residual: float
    max_cm: float
    energy_drift: float
    return_distance: float
    steps: int


def _check_tol(tol):
    lo, hi = TOL_RANGE
    if not (lo <= tol <= hi):
        raise ValueError(f"tol must lie in [{lo:.0e}, {hi:.0e}], got {tol!r}")


def integrate(
    init: SystemState,
    p: PotentialParams,
    t_end: float,
    tol: float = 1e-11,
    t_eval=None,
    method: str = "dopri5",
    step: float | None = None,
    max_steps: int = 10_000_000,
) -> Trajectory:
    """Integrate the n coupled Newton equations from ``init`` to ``t_end``.

    ``method="dopri5"``: adaptive Dormand-Prince 5(4), each accepted step
    has max-norm local error estimate <= tol; steps are aligned to land on
    the output times exactly. ``method="yoshida"``: fixed step
    (default ``0.1 * tol**0.25``), outputs snapped to the step grid.
    Output times default to (start, end) and must all lie on one side of
    the start time.
    """
    _check_tol(tol)
    idx = p.log_set.index_array()
    t0 = float(init.time)
    t_end = float(t_end)
    if t_eval is None:
        t_eval = np.array([t0, t_end])
    t_eval = np.asarray(t_eval, dtype=float)

    if method == "yoshida":
        return _integrate_yoshida(init, p, idx, t_eval, step or 0.1 * tol ** 0.25)
    if method != "dopri5":
        raise ValueError(f"unknown method {method!r}")

    sign = 1.0 if t_end >= t0 else -1.0
    order = np.argsort(sign * t_eval, kind="stable")
    pos, vel, steps, _ = kernels.dopri5(
        init.pos, init.vel, idx, p.alpha, p.a, p.b, t0, t_eval[order], tol, 1e-3, max_steps
    )
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return Trajectory(t_eval.copy(), pos[inv], vel[inv], steps)


def _integrate_yoshida(init, p, idx, t_eval, h):
    t0 = float(init.time)
    span = t_eval - t0
    direction = 1.0 if np.all(span >= 0) else -1.0
    total = float(np.max(np.abs(span)))
    nsteps = max(1, int(math.ceil(total / h)))
    h = total / nsteps if total > 0 else h
    marks = np.rint(np.abs(span) / h).astype(int) if total > 0 else np.zeros(len(span), int)
    x, v = init.pos.copy(), init.vel.copy()
    done = 0
    ts, xs, vs = [], [], []
    for k in np.argsort(marks, kind="stable"):
        if marks[k] > done:
            x, v = kernels.yoshida4(x, v, idx, p.alpha, p.a, p.b, direction * h, int(marks[k] - done))
            done = int(marks[k])
        ts.append(t0 + direction * done * h)
        xs.append(x.copy())
        vs.append(v.copy())
    order = np.argsort(np.argsort(marks, kind="stable"))
    return Trajectory(np.array(ts)[order], np.array(xs)[order], np.array(vs)[order], nsteps)


def verify_choreography(ch: Choreography, p: PotentialParams, grid_size: int = 64) -> float:
    """Integration-free certificate: max |a_i(t) - F_i(x(t))| over a period grid."""
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")
    t = (np.arange(grid_size) + 0.25) * (ch.period / grid_size)
    return newton_residual(ch.phase(t), p)


def trajectory_energy(traj: Trajectory, p: PotentialParams) -> np.ndarray:
    kin = 0.5 * np.sum(traj.vel * traj.vel, axis=(-2, -1))
    return kin + potential_energy((traj.pos, traj.vel), p)


def drift_report(
    ch: Choreography,
    p: PotentialParams,
    periods: int = 1,
    tol: float = 1e-11,
    method: str = "dopri5",
    samples_per_period: int = 64,
) -> tuple[DriftReport, Trajectory | None]:
    """Integrate from the exact t = 0 state and summarize the drift.

    Returns the report and the sampled trajectory (None for zero periods).
    """
    if periods < 0:
        raise ValueError("periods must be >= 0")
    if periods == 0:
        return DriftReport(0.0, 0.0, 0.0, 0.0, 0), None
    init = SystemState.from_choreography(ch, 0.0)
    t_end = periods * ch.period
    t_eval = np.linspace(0.0, t_end, periods * samples_per_period + 1)
    traj = integrate(init, p, t_end, tol, t_eval=t_eval, method=method)
    resid = np.max(np.abs(on_curve_residual(traj.pos, ch.c)))
    cm = np.max(np.linalg.norm(traj.pos.sum(axis=-2), axis=-1))
    energy = trajectory_energy(traj, p)
    drift = float(np.max(np.abs(energy - energy[0])) / abs(energy[0]))
    back = max(
        float(np.max(np.linalg.norm(traj.pos[-1] - init.pos, axis=-1))),
        float(np.max(np.linalg.norm(traj.vel[-1] - init.vel, axis=-1))),
    )
    return DriftReport(float(resid), float(cm), drift, back, traj.steps), traj
