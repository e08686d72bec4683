"""Pure-Python/NumPy implementation of the numerical kernels.

Mirrors the API of the compiled ``_kernels`` extension exactly; ``_core``
picks whichever is importable. Inputs are assumed validated by callers.
"""
import math

import numpy as np

from .errors import ConvergenceError, SingularityError, StiffnessError

BACKEND = "python"

MAX_LANDEN = 32
_AGM_RTOL = 1e-16
COLLISION_R2 = 1e-12

_YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA_W0 = -(2.0 ** (1.0 / 3.0)) * _YOSHIDA_W1


def complete_k(m):
    a = 1.0
    b = math.sqrt(1.0 - m)
    for _ in range(MAX_LANDEN):
        if abs(a - b) <= 4.0 * _AGM_RTOL * a:
            return math.pi / (a + b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise ConvergenceError(f"AGM did not converge for m={m!r}")


def _agm_sequence(m):
    """Return (a_n, c_n) lists of the descending AGM for modulus m."""
    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    while abs(c[-1]) > _AGM_RTOL * a[-1]:
        if len(a) > MAX_LANDEN:
            raise ConvergenceError(f"Landen recursion exceeded {MAX_LANDEN} steps for m={m!r}")
        an = a[-1]
        a.append(0.5 * (an + b))
        # c_{n+1} = c_n^2 / (4 a_{n+1}) instead of (a_n - b_n)/2: no cancellation
        c.append(c[-1] * c[-1] / (4.0 * a[-1]))
        b = math.sqrt(an * b)
    return a, c


def jacobi(u, m):
    quarter = complete_k(m)
    u = math.fmod(u, 4.0 * quarter)
    a, c = _agm_sequence(m)
    n = len(a) - 1
    phi = math.ldexp(a[n] * u, n)
    for i in range(n, 0, -1):
        s = c[i] / a[i] * math.sin(phi)
        phi = 0.5 * (phi + math.asin(max(-1.0, min(1.0, s))))
    sn = math.sin(phi)
    cn = math.cos(phi)
    # cn^2 + m' sn^2 avoids the cancellation in 1 - m sn^2 as m -> 1
    dn = math.sqrt(cn * cn + (1.0 - m) * sn * sn)
    return sn, cn, dn


def jacobi_array(u, m):
    u = np.asarray(u, dtype=float)
    quarter = complete_k(m)
    u = np.fmod(u, 4.0 * quarter)
    a, c = _agm_sequence(m)
    n = len(a) - 1
    phi = np.ldexp(a[n] * u, n)
    for i in range(n, 0, -1):
        s = np.clip(c[i] / a[i] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(s))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(cn * cn + (1.0 - m) * sn * sn)
    return sn, cn, dn


def curve_kinematics(t, m, c):
    """Columns x, y, vx, vy, ax, ay of the lemniscate at times t."""
    sn, cn, dn = jacobi_array(t, m)
    d_sn = cn * dn
    d_cn = -sn * dn
    dd_sn = -sn * (dn * dn + m * cn * cn)
    dd_cn = -cn * (dn * dn - m * sn * sn)

    den = 1.0 + cn * cn
    d_den = 2.0 * cn * d_cn
    dd_den = 2.0 * (d_cn * d_cn + cn * dd_cn)

    out = np.empty(sn.shape + (6,))
    # quotient rule for f = u / den, applied to u = sn and u = sn*cn
    for col, (num, d_num, dd_num) in enumerate((
        (sn, d_sn, dd_sn),
        (sn * cn, d_sn * cn + sn * d_cn, dd_sn * cn + 2.0 * d_sn * d_cn + sn * dd_cn),
    )):
        f = num / den
        df = (d_num - f * d_den) / den
        ddf = (dd_num - 2.0 * df * d_den - f * dd_den) / den
        out[..., col] = c * f
        out[..., 2 + col] = c * df
        out[..., 4 + col] = c * ddf
    return out


def _check_log_pairs(pos, log_pairs):
    log_pairs = np.asarray(log_pairs, dtype=np.int_).reshape(-1, 2)
    d = pos[log_pairs[:, 0]] - pos[log_pairs[:, 1]]
    r2 = np.einsum("ij,ij->i", d, d)
    bad = np.flatnonzero(r2 < COLLISION_R2)
    if bad.size:
        i, j = log_pairs[bad[0]]
        raise SingularityError(
            f"bodies {i + 1} and {j + 1} collide (r^2={r2[bad[0]]:.3e})", pair=(int(i) + 1, int(j) + 1)
        )
    return d, r2


def pair_potential(pos, log_pairs, alpha, a, b):
    pos = np.asarray(pos, dtype=float)
    d, r2 = _check_log_pairs(pos, log_pairs)
    n = pos.shape[0]
    centered = pos - pos.mean(axis=0)
    all_sum = n * float(np.sum(centered * centered))
    return alpha * float(np.sum(np.log(r2))) + a * float(np.sum(r2)) + b * all_sum


def pair_forces(pos, log_pairs, alpha, a, b):
    pos = np.asarray(pos, dtype=float)
    log_pairs = np.asarray(log_pairs, dtype=np.int_).reshape(-1, 2)
    d, r2 = _check_log_pairs(pos, log_pairs)
    n = pos.shape[0]
    f = -2.0 * b * (n * pos - pos.sum(axis=0))
    g = -2.0 * (alpha / r2 + a)[:, None] * d
    np.add.at(f, log_pairs[:, 0], g)
    np.subtract.at(f, log_pairs[:, 1], g)
    return f


def yoshida4(pos, vel, log_pairs, alpha, a, b, h, nsteps):
    """Fourth-order Yoshida composition of velocity Verlet; returns (pos, vel)."""
    x = np.array(pos, dtype=float)
    v = np.array(vel, dtype=float)
    acc = pair_forces(x, log_pairs, alpha, a, b)
    for _ in range(nsteps):
        for w in (_YOSHIDA_W1, _YOSHIDA_W0, _YOSHIDA_W1):
            hw = h * w
            v += 0.5 * hw * acc
            x += hw * v
            acc = pair_forces(x, log_pairs, alpha, a, b)
            v += 0.5 * hw * acc
    return x, v


_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


def dopri5(pos, vel, log_pairs, alpha, a, b, t0, t_out, tol, h0, max_steps):
    """Adaptive Dormand-Prince 5(4) with max-norm local error <= tol per step.

    ``t_out`` must be monotone in the integration direction; steps are
    shortened to land exactly on each output time. Returns
    (pos_out, vel_out, accepted_steps, rejected_steps).
    """
    pos = np.asarray(pos, dtype=float)
    n = pos.shape[0]
    t_out = np.asarray(t_out, dtype=float)

    def rhs(y, t):
        try:
            f = pair_forces(y[: 2 * n].reshape(n, 2), log_pairs, alpha, a, b)
        except SingularityError as exc:
            exc.time = t
            raise
        return np.concatenate([y[2 * n:], f.ravel()])

    y = np.concatenate([pos.ravel(), np.asarray(vel, dtype=float).ravel()])
    out = np.empty((t_out.size, y.size))
    direction = 1.0 if (t_out.size == 0 or t_out[-1] >= t0) else -1.0
    h = direction * abs(h0)
    t = float(t0)
    k = [rhs(y, t)] + [None] * 6
    accepted = rejected = 0
    last_rejected = False
    io = 0
    while io < t_out.size:
        target = t_out[io]
        if direction * (target - t) <= 0.0:
            out[io] = y
            io += 1
            continue
        if accepted + rejected >= max_steps or abs(h) < 1e-14 * (1.0 + abs(t)):
            raise StiffnessError(f"step size underflow or step budget exhausted at t={t!r}", time=t)
        h_free = h
        hit = direction * (t + h - target) >= 0.0
        if hit:
            h = target - t
        for s in range(1, 7):
            ys = y.copy()
            for j, coef in enumerate(_DP_A[s]):
                ys += h * coef * k[j]
            k[s] = rhs(ys, t + h)
        y_new = ys
        err = float(np.max(np.abs(h * np.einsum("j,ji->i", _DP_E, np.array(k))))) / tol
        if err <= 1.0:
            t = target if hit else t + h
            y = y_new
            k[0] = k[6]
            accepted += 1
            fac = 5.0 if err == 0.0 else 0.9 * err ** -0.2
            if last_rejected:
                fac = min(fac, 1.0)
            last_rejected = False
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
            last_rejected = True
            hit = False
        h *= min(5.0, max(0.2, fac))
        if hit and abs(h) < abs(h_free):
            h = h_free
    return (out[:, : 2 * n].reshape(-1, n, 2), out[:, 2 * n:].reshape(-1, n, 2), accepted, rejected)
