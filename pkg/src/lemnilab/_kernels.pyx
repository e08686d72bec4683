# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels; API-identical to ``_kernels_py``."""
import numpy as np

from libc.math cimport sqrt, sin, cos, asin, fmod, ldexp, log, fabs, M_PI

from .errors import ConvergenceError, SingularityError

BACKEND = "cython"

DEF MAXN = 32
MAX_LANDEN = MAXN
COLLISION_R2 = 1e-12
cdef double _AGM_RTOL = 1e-16
cdef double _COLL = 1e-12

cdef double _W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
cdef double _W0 = -(2.0 ** (1.0 / 3.0)) * _W1


cdef struct Agm:
    int n
    double quarter
    double mc
    double m
    double a[MAXN + 1]
    double c[MAXN + 1]


cdef int _agm(double m, Agm* g) except -1 nogil:
    cdef double b, an, a, bb
    cdef int i
    g.m = m
    g.mc = 1.0 - m
    g.a[0] = 1.0
    g.c[0] = sqrt(m)
    b = sqrt(1.0 - m)
    g.n = 0
    while fabs(g.c[g.n]) > _AGM_RTOL * g.a[g.n]:
        if g.n >= MAXN:
            with gil:
                raise ConvergenceError(f"Landen recursion exceeded {MAXN} steps for m={m!r}")
        an = g.a[g.n]
        g.n += 1
        g.a[g.n] = 0.5 * (an + b)
        g.c[g.n] = g.c[g.n - 1] * g.c[g.n - 1] / (4.0 * g.a[g.n])
        b = sqrt(an * b)
    # quarter period from its own AGM, same stopping rule as complete_k
    a = 1.0
    bb = sqrt(1.0 - m)
    for i in range(MAXN):
        if fabs(a - bb) <= 4.0 * _AGM_RTOL * a:
            g.quarter = M_PI / (a + bb)
            return 0
        a, bb = 0.5 * (a + bb), sqrt(a * bb)
    with gil:
        raise ConvergenceError(f"AGM did not converge for m={m!r}")


cdef inline void _jac(const Agm* g, double u, double* sn, double* cn, double* dn) noexcept nogil:
    cdef double phi, s
    cdef int i
    u = fmod(u, 4.0 * g.quarter)
    phi = ldexp(g.a[g.n] * u, g.n)
    for i in range(g.n, 0, -1):
        s = g.c[i] / g.a[i] * sin(phi)
        if s > 1.0:
            s = 1.0
        elif s < -1.0:
            s = -1.0
        phi = 0.5 * (phi + asin(s))
    sn[0] = sin(phi)
    cn[0] = cos(phi)
    dn[0] = sqrt(cn[0] * cn[0] + g.mc * sn[0] * sn[0])


cdef inline void _kin(const Agm* g, double t, double c, double* out) noexcept nogil:
    cdef double sn, cn, dn, m = g.m
    cdef double d_sn, d_cn, dd_sn, dd_cn, den, d_den, dd_den
    cdef double f, df, num, d_num, dd_num
    _jac(g, t, &sn, &cn, &dn)
    d_sn = cn * dn
    d_cn = -sn * dn
    dd_sn = -sn * (dn * dn + m * cn * cn)
    dd_cn = -cn * (dn * dn - m * sn * sn)
    den = 1.0 + cn * cn
    d_den = 2.0 * cn * d_cn
    dd_den = 2.0 * (d_cn * d_cn + cn * dd_cn)

    f = sn / den
    df = (d_sn - f * d_den) / den
    out[0] = c * f
    out[2] = c * df
    out[4] = c * (dd_sn - 2.0 * df * d_den - f * dd_den) / den

    num = sn * cn
    d_num = d_sn * cn + sn * d_cn
    dd_num = dd_sn * cn + 2.0 * d_sn * d_cn + sn * dd_cn
    f = num / den
    df = (d_num - f * d_den) / den
    out[1] = c * f
    out[3] = c * df
    out[5] = c * (dd_num - 2.0 * df * d_den - f * dd_den) / den


def complete_k(double m):
    cdef Agm g
    _agm(m, &g)
    return g.quarter


def jacobi(double u, double m):
    cdef Agm g
    cdef double sn, cn, dn
    _agm(m, &g)
    _jac(&g, u, &sn, &cn, &dn)
    return sn, cn, dn


def jacobi_array(u, double m):
    cdef Agm g
    cdef Py_ssize_t i, k
    arr = np.asarray(u, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    cdef const double[::1] uv = flat
    k = uv.shape[0]
    sn_a = np.empty(k)
    cn_a = np.empty(k)
    dn_a = np.empty(k)
    cdef double[::1] snv = sn_a, cnv = cn_a, dnv = dn_a
    _agm(m, &g)
    with nogil:
        for i in range(k):
            _jac(&g, uv[i], &snv[i], &cnv[i], &dnv[i])
    shape = arr.shape
    return sn_a.reshape(shape), cn_a.reshape(shape), dn_a.reshape(shape)


def curve_kinematics(t, double m, double c):
    """Columns x, y, vx, vy, ax, ay of the lemniscate at times t."""
    cdef Agm g
    cdef Py_ssize_t i, k
    arr = np.asarray(t, dtype=float)
    flat = np.ascontiguousarray(arr.ravel())
    cdef const double[::1] tv = flat
    k = tv.shape[0]
    out = np.empty((k, 6))
    cdef double[:, ::1] ov = out
    _agm(m, &g)
    with nogil:
        for i in range(k):
            _kin(&g, tv[i], c, &ov[i, 0])
    return out.reshape(arr.shape + (6,))


cdef Py_ssize_t _forces_ptr(const double* x, Py_ssize_t n, const long* pairs, Py_ssize_t p,
                            double alpha, double a, double b, double* f) noexcept nogil:
    """Forces into f (n*2, row-major). Returns index of a colliding pair or -1."""
    cdef Py_ssize_t i, j, q
    cdef double sx = 0.0, sy = 0.0, dx, dy, r2, w
    for i in range(n):
        sx += x[2 * i]
        sy += x[2 * i + 1]
    for i in range(n):
        f[2 * i] = -2.0 * b * (n * x[2 * i] - sx)
        f[2 * i + 1] = -2.0 * b * (n * x[2 * i + 1] - sy)
    for q in range(p):
        i = pairs[2 * q]
        j = pairs[2 * q + 1]
        dx = x[2 * i] - x[2 * j]
        dy = x[2 * i + 1] - x[2 * j + 1]
        r2 = dx * dx + dy * dy
        if r2 < _COLL:
            return q
        w = -2.0 * (alpha / r2 + a)
        f[2 * i] += w * dx
        f[2 * i + 1] += w * dy
        f[2 * j] -= w * dx
        f[2 * j + 1] -= w * dy
    return -1


def _collision(pairs, Py_ssize_t q, x, time=None):
    i, j = int(pairs[q, 0]), int(pairs[q, 1])
    d = np.asarray(x).reshape(-1, 2)
    r2 = float(np.sum((d[i] - d[j]) ** 2))
    where = "" if time is None else f" at t={time!r}"
    return SingularityError(f"bodies {i + 1} and {j + 1} collide (r^2={r2:.3e}){where}",
                            pair=(i + 1, j + 1), time=time)


def _pairs_array(log_pairs):
    pr = np.ascontiguousarray(np.asarray(log_pairs, dtype=np.int_).reshape(-1, 2))
    if pr.shape[0] == 0:
        pr = np.zeros((0, 2), dtype=np.int_)
    return pr


def pair_forces(pos, log_pairs, double alpha, double a, double b):
    x = np.ascontiguousarray(pos, dtype=float)
    pairs = _pairs_array(log_pairs)
    out = np.empty_like(x)
    cdef const double[:, ::1] xv = x
    cdef const long[:, ::1] pv = pairs
    cdef double[:, ::1] ov = out
    cdef long dummy = 0
    cdef Py_ssize_t q = _forces_ptr(&xv[0, 0], xv.shape[0],
                                    &pv[0, 0] if pv.shape[0] else &dummy, pv.shape[0],
                                    alpha, a, b, &ov[0, 0])
    if q >= 0:
        raise _collision(pairs, q, x)
    return out


def pair_potential(pos, log_pairs, double alpha, double a, double b):
    cdef const double[:, ::1] x = np.ascontiguousarray(pos, dtype=float)
    pairs = _pairs_array(log_pairs)
    cdef const long[:, ::1] pr = pairs
    cdef Py_ssize_t n = x.shape[0], i, j, q
    cdef double mx = 0.0, my = 0.0, dx, dy, r2, slog = 0.0, ssq = 0.0, sall = 0.0
    for i in range(n):
        mx += x[i, 0]
        my += x[i, 1]
    mx /= n
    my /= n
    for i in range(n):
        sall += (x[i, 0] - mx) ** 2 + (x[i, 1] - my) ** 2
    for q in range(pr.shape[0]):
        i = pr[q, 0]
        j = pr[q, 1]
        dx = x[i, 0] - x[j, 0]
        dy = x[i, 1] - x[j, 1]
        r2 = dx * dx + dy * dy
        if r2 < _COLL:
            raise _collision(pairs, q, np.asarray(x))
        slog += log(r2)
        ssq += r2
    return alpha * slog + a * ssq + b * n * sall


def yoshida4(pos, vel, log_pairs, double alpha, double a, double b, double h, long nsteps):
    """Fourth-order Yoshida composition of velocity Verlet; returns (pos, vel)."""
    xa = np.array(pos, dtype=float, order="C")
    va = np.array(vel, dtype=float, order="C")
    acc_a = np.empty_like(xa)
    pairs = _pairs_array(log_pairs)
    cdef double[:, ::1] x = xa, v = va, acc = acc_a
    cdef const long[:, ::1] pv = pairs
    cdef long dummy = 0
    cdef const long* pp = &pv[0, 0] if pv.shape[0] else &dummy
    cdef Py_ssize_t n = x.shape[0], np_ = pv.shape[0], i, s, stage, q
    cdef double hw
    cdef double w[3]
    w[0] = _W1
    w[1] = _W0
    w[2] = _W1
    with nogil:
        q = _forces_ptr(&x[0, 0], n, pp, np_, alpha, a, b, &acc[0, 0])
        s = 0
        while s < nsteps and q < 0:
            for stage in range(3):
                hw = h * w[stage]
                for i in range(n):
                    v[i, 0] += 0.5 * hw * acc[i, 0]
                    v[i, 1] += 0.5 * hw * acc[i, 1]
                    x[i, 0] += hw * v[i, 0]
                    x[i, 1] += hw * v[i, 1]
                q = _forces_ptr(&x[0, 0], n, pp, np_, alpha, a, b, &acc[0, 0])
                if q >= 0:
                    break
                for i in range(n):
                    v[i, 0] += 0.5 * hw * acc[i, 0]
                    v[i, 1] += 0.5 * hw * acc[i, 1]
            s += 1
    if q >= 0:
        raise _collision(pairs, q, xa)
    return xa, va


# Dormand-Prince 5(4) tableau
cdef double DP_C[7]
cdef double DP_A[7][6]
cdef double DP_B[7]
cdef double DP_E[7]
DP_C[:] = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
DP_A[0][:] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
DP_A[1][:] = [1.0 / 5, 0.0, 0.0, 0.0, 0.0, 0.0]
DP_A[2][:] = [3.0 / 40, 9.0 / 40, 0.0, 0.0, 0.0, 0.0]
DP_A[3][:] = [44.0 / 45, -56.0 / 15, 32.0 / 9, 0.0, 0.0, 0.0]
DP_A[4][:] = [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0.0, 0.0]
DP_A[5][:] = [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0.0]
DP_A[6][:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84]
DP_B[:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0]
DP_E[:] = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40]


cdef inline Py_ssize_t _rhs(const double* y, Py_ssize_t n, const long* pp, Py_ssize_t np_,
                            double alpha, double a, double b, double* out) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(2 * n):
        out[i] = y[2 * n + i]
    return _forces_ptr(y, n, pp, np_, alpha, a, b, out + 2 * n)


def dopri5(pos, vel, log_pairs, double alpha, double a, double b, double t0, t_out,
           double tol, double h0, long max_steps):
    """Adaptive Dormand-Prince 5(4) with max-norm local error <= tol per step.

    ``t_out`` must be monotone in the integration direction; steps are
    shortened to land exactly on each output time. Returns
    (pos_out, vel_out, accepted_steps, rejected_steps).
    """
    from .errors import StiffnessError

    pairs = _pairs_array(log_pairs)
    cdef const long[:, ::1] pv = pairs
    cdef long dummy = 0
    cdef const long* pp = &pv[0, 0] if pv.shape[0] else &dummy
    cdef Py_ssize_t np_ = pv.shape[0]
    xa = np.ascontiguousarray(pos, dtype=float)
    cdef Py_ssize_t n = xa.shape[0], dim = 4 * n
    touts = np.ascontiguousarray(t_out, dtype=float)
    cdef const double[::1] tv = touts
    cdef Py_ssize_t nout = tv.shape[0]
    out = np.empty((nout, dim))
    cdef double[:, ::1] ov = out
    y_a = np.concatenate([xa.ravel(), np.ascontiguousarray(vel, dtype=float).ravel()])
    k_a = np.empty((7, dim))
    ys_a = y_a.copy()
    yn_a = np.empty(dim)
    cdef double[::1] y = y_a, ys = ys_a, yn = yn_a
    cdef double[:, ::1] k = k_a
    cdef double t = t0, h, h_free, err, e, fac, target, direction
    cdef Py_ssize_t io = 0, i, s, j, q = -1
    cdef long accepted = 0, rejected = 0
    cdef bint last_rejected = False, stiff = False, hit

    if nout:
        direction = 1.0 if tv[nout - 1] >= t0 else -1.0
    else:
        direction = 1.0
    h = direction * fabs(h0)
    with nogil:
        q = _rhs(&y[0], n, pp, np_, alpha, a, b, &k[0, 0])
        while q < 0 and io < nout:
            target = tv[io]
            if direction * (target - t) <= 0.0:
                for i in range(dim):
                    ov[io, i] = y[i]
                io += 1
                continue
            if accepted + rejected >= max_steps or fabs(h) < 1e-14 * (1.0 + fabs(t)):
                stiff = True
                break
            h_free = h
            hit = direction * (t + h - target) >= 0.0
            if hit:
                h = target - t
            for s in range(1, 7):
                for i in range(dim):
                    e = y[i]
                    for j in range(s):
                        e += h * DP_A[s][j] * k[j, i]
                    ys[i] = e
                q = _rhs(&ys[0], n, pp, np_, alpha, a, b, &k[s, 0])
                if q >= 0:
                    break
            if q >= 0:
                break
            err = 0.0
            for i in range(dim):
                e = y[i]
                for j in range(6):
                    e += h * DP_B[j] * k[j, i]
                yn[i] = e
                e = 0.0
                for j in range(7):
                    e += DP_E[j] * k[j, i]
                e = fabs(h * e)
                if e > err:
                    err = e
            err /= tol
            if err <= 1.0:
                t = target if hit else t + h
                for i in range(dim):
                    y[i] = yn[i]
                    k[0, i] = k[6, i]  # FSAL
                accepted += 1
                fac = 5.0 if err == 0.0 else 0.9 * err ** (-0.2)
                if last_rejected and fac > 1.0:
                    fac = 1.0
                last_rejected = False
            else:
                rejected += 1
                fac = 0.9 * err ** (-0.2)
                if fac < 0.2:
                    fac = 0.2
                last_rejected = True
                hit = False
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
            h *= fac
            if hit and fabs(h) < fabs(h_free):
                # a step clipped to land on an output time should not shrink the next one
                h = h_free
    if q >= 0:
        raise _collision(pairs, q, ys_a[: 2 * n], time=t)
    if stiff:
        raise StiffnessError(f"step size underflow or step budget exhausted at t={t!r}", time=t)
    return (out[:, : 2 * n].reshape(nout, n, 2), out[:, 2 * n:].reshape(nout, n, 2),
            int(accepted), int(rejected))
