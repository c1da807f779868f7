"""Compiled numerical core.

Every kernel operates on the flattened joint/inertia arrays carried by
``RobotModel`` (see ``model.py``) so numba compiles each algorithm once per
signature. Spatial quantities use 6-vectors ordered (angular, linear) and
6x6 motion transforms in Featherstone's convention. Matrix products are
hand-rolled: the matrices are 3x3/6x6 and BLAS dispatch overhead would
dominate at these sizes.

Status codes returned by the integration kernels:
    0  success
    1  singular metric (Cholesky pivot <= 0)
    2  diverged (non-finite state or velocity guard exceeded)
    3  no convergence (boundary-value solver only)
"""

import numpy as np
from numba import njit

OK = 0
SINGULAR = 1
DIVERGED = 2
NO_CONVERGENCE = 3

REVOLUTE = 0
PRISMATIC = 1

VELOCITY_GUARD = 1.0e6
FD_STEP_SCALE = 1.0e-6


# ---------------------------------------------------------------------------
# small dense linear algebra


@njit(cache=True, inline="always")
def _mm66(a, b, out):
    for i in range(6):
        for j in range(6):
            s = 0.0
            for k in range(6):
                s += a[i, k] * b[k, j]
            out[i, j] = s


@njit(cache=True, inline="always")
def _mtm66_add(x, a, out):
    # out += x.T @ a
    for i in range(6):
        for j in range(6):
            s = 0.0
            for k in range(6):
                s += x[k, i] * a[k, j]
            out[i, j] += s


@njit(cache=True, inline="always")
def _mv6(a, x, out):
    for i in range(6):
        s = 0.0
        for k in range(6):
            s += a[i, k] * x[k]
        out[i] = s


@njit(cache=True, inline="always")
def _mtv6(a, x, out):
    for i in range(6):
        s = 0.0
        for k in range(6):
            s += a[k, i] * x[k]
        out[i] = s


@njit(cache=True, inline="always")
def _dot6(a, b):
    s = 0.0
    for k in range(6):
        s += a[k] * b[k]
    return s


@njit(cache=True)
def _cholesky(g):
    """Lower Cholesky factor of g; ok=False when g is not positive definite."""
    n = g.shape[0]
    low = np.zeros((n, n))
    for j in range(n):
        d = g[j, j]
        for k in range(j):
            d -= low[j, k] * low[j, k]
        if d <= 0.0 or not np.isfinite(d):
            return low, False
        low[j, j] = np.sqrt(d)
        for i in range(j + 1, n):
            s = g[i, j]
            for k in range(j):
                s -= low[i, k] * low[j, k]
            low[i, j] = s / low[j, j]
    return low, True


@njit(cache=True)
def _chol_solve(low, b):
    n = low.shape[0]
    x = b.copy()
    for i in range(n):
        for k in range(i):
            x[i] -= low[i, k] * x[k]
        x[i] /= low[i, i]
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            x[i] -= low[k, i] * x[k]
        x[i] /= low[i, i]
    return x


@njit(cache=True)
def _gauss_solve(a, b):
    """Solve a @ x = b by Gaussian elimination with partial pivoting."""
    n = a.shape[0]
    m = a.copy()
    x = b.copy()
    for col in range(n):
        piv = col
        best = abs(m[col, col])
        for r in range(col + 1, n):
            if abs(m[r, col]) > best:
                best = abs(m[r, col])
                piv = r
        if best < 1e-300:
            return x, False
        if piv != col:
            for c in range(n):
                tmp = m[col, c]
                m[col, c] = m[piv, c]
                m[piv, c] = tmp
            tmp = x[col]
            x[col] = x[piv]
            x[piv] = tmp
        for r in range(col + 1, n):
            f = m[r, col] / m[col, col]
            for c in range(col, n):
                m[r, c] -= f * m[col, c]
            x[r] -= f * x[col]
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            x[i] -= m[i, k] * x[k]
        x[i] /= m[i, i]
    return x, True


# ---------------------------------------------------------------------------
# joint transforms and rigid-body dynamics


@njit(cache=True)
def _joint_xup_s(kinds, axes, rot0, pos0, q, xup, s6):
    """Per-joint motion transforms (parent -> link coordinates) and joint axes.

    xup[i] maps spatial motion vectors from link i-1 coordinates to link i
    coordinates; s6[i] is the joint motion subspace in link i coordinates.
    """
    n = q.shape[0]
    rj = np.empty((3, 3))
    rpl = np.empty((3, 3))
    for i in range(n):
        ax = axes[i]
        if kinds[i] == REVOLUTE:
            c = np.cos(q[i])
            sn = np.sin(q[i])
            v = 1.0 - c
            x, y, z = ax[0], ax[1], ax[2]
            rj[0, 0] = c + v * x * x
            rj[0, 1] = v * x * y - sn * z
            rj[0, 2] = v * x * z + sn * y
            rj[1, 0] = v * x * y + sn * z
            rj[1, 1] = c + v * y * y
            rj[1, 2] = v * y * z - sn * x
            rj[2, 0] = v * x * z - sn * y
            rj[2, 1] = v * y * z + sn * x
            rj[2, 2] = c + v * z * z
        else:
            for a in range(3):
                for b in range(3):
                    rj[a, b] = 1.0 if a == b else 0.0
        # rotation of link frame expressed in parent frame
        for a in range(3):
            for b in range(3):
                t = 0.0
                for k in range(3):
                    t += rot0[i, a, k] * rj[k, b]
                rpl[a, b] = t
        # link origin in parent frame
        r0 = pos0[i, 0]
        r1 = pos0[i, 1]
        r2 = pos0[i, 2]
        if kinds[i] == PRISMATIC:
            r0 += (rot0[i, 0, 0] * ax[0] + rot0[i, 0, 1] * ax[1] + rot0[i, 0, 2] * ax[2]) * q[i]
            r1 += (rot0[i, 1, 0] * ax[0] + rot0[i, 1, 1] * ax[1] + rot0[i, 1, 2] * ax[2]) * q[i]
            r2 += (rot0[i, 2, 0] * ax[0] + rot0[i, 2, 1] * ax[1] + rot0[i, 2, 2] * ax[2]) * q[i]
        # motion transform blocks: [[E, 0], [-E rx, E]] with E = rpl.T
        for a in range(3):
            for b in range(3):
                e = rpl[b, a]
                xup[i, a, b] = e
                xup[i, a, b + 3] = 0.0
                xup[i, a + 3, b + 3] = e
        for a in range(3):
            # row a of -E @ rx, with rx the cross-product matrix of r
            e0 = rpl[0, a]
            e1 = rpl[1, a]
            e2 = rpl[2, a]
            xup[i, a + 3, 0] = -(e1 * r2 - e2 * r1)
            xup[i, a + 3, 1] = -(e2 * r0 - e0 * r2)
            xup[i, a + 3, 2] = -(e0 * r1 - e1 * r0)
        for k in range(6):
            s6[i, k] = 0.0
        if kinds[i] == REVOLUTE:
            s6[i, 0] = ax[0]
            s6[i, 1] = ax[1]
            s6[i, 2] = ax[2]
        else:
            s6[i, 3] = ax[0]
            s6[i, 4] = ax[1]
            s6[i, 5] = ax[2]


@njit(cache=True)
def _crba(kinds, axes, rot0, pos0, inert, q):
    """Joint-space mass-inertia matrix via the Composite Rigid Body Algorithm."""
    n = q.shape[0]
    xup = np.empty((n, 6, 6))
    s6 = np.empty((n, 6))
    _joint_xup_s(kinds, axes, rot0, pos0, q, xup, s6)
    ic = inert.copy()
    g = np.zeros((n, n))
    tmp = np.empty((6, 6))
    f = np.empty(6)
    fn = np.empty(6)
    for i in range(n - 1, -1, -1):
        if i > 0:
            _mm66(ic[i], xup[i], tmp)
            _mtm66_add(xup[i], tmp, ic[i - 1])
        _mv6(ic[i], s6[i], f)
        g[i, i] = _dot6(s6[i], f)
        j = i
        while j > 0:
            _mtv6(xup[j], f, fn)
            for k in range(6):
                f[k] = fn[k]
            j -= 1
            gij = _dot6(f, s6[j])
            g[i, j] = gij
            g[j, i] = gij
    return g


@njit(cache=True, inline="always")
def _crm_apply(v, m, out):
    # spatial motion cross product: out = v x m
    out[0] = v[1] * m[2] - v[2] * m[1]
    out[1] = v[2] * m[0] - v[0] * m[2]
    out[2] = v[0] * m[1] - v[1] * m[0]
    out[3] = v[1] * m[5] - v[2] * m[4] + v[4] * m[2] - v[5] * m[1]
    out[4] = v[2] * m[3] - v[0] * m[5] + v[5] * m[0] - v[3] * m[2]
    out[5] = v[0] * m[4] - v[1] * m[3] + v[3] * m[1] - v[4] * m[0]


@njit(cache=True, inline="always")
def _crf_apply(v, f, out):
    # spatial force cross product: out = v x* f
    out[0] = v[1] * f[2] - v[2] * f[1] + v[4] * f[5] - v[5] * f[4]
    out[1] = v[2] * f[0] - v[0] * f[2] + v[5] * f[3] - v[3] * f[5]
    out[2] = v[0] * f[1] - v[1] * f[0] + v[3] * f[4] - v[4] * f[3]
    out[3] = v[1] * f[5] - v[2] * f[4]
    out[4] = v[2] * f[3] - v[0] * f[5]
    out[5] = v[0] * f[4] - v[1] * f[3]


@njit(cache=True)
def _rnea(kinds, axes, rot0, pos0, inert, q, qd, qdd):
    """Inverse dynamics (zero gravity, no external forces): tau for given motion."""
    n = q.shape[0]
    xup = np.empty((n, 6, 6))
    s6 = np.empty((n, 6))
    _joint_xup_s(kinds, axes, rot0, pos0, q, xup, s6)
    v = np.zeros((n, 6))
    a = np.zeros((n, 6))
    f = np.zeros((n, 6))
    buf = np.empty(6)
    buf2 = np.empty(6)
    for i in range(n):
        if i == 0:
            for k in range(6):
                v[i, k] = s6[i, k] * qd[i]
                a[i, k] = s6[i, k] * qdd[i]
        else:
            _mv6(xup[i], v[i - 1], buf)
            for k in range(6):
                v[i, k] = buf[k] + s6[i, k] * qd[i]
            _mv6(xup[i], a[i - 1], buf)
            # velocity-product term: v_i x (S_i qd_i)
            for k in range(6):
                buf2[k] = s6[i, k] * qd[i]
            vj = buf2.copy()
            _crm_apply(v[i], vj, buf2)
            for k in range(6):
                a[i, k] = buf[k] + s6[i, k] * qdd[i] + buf2[k]
        _mv6(inert[i], a[i], buf)
        _mv6(inert[i], v[i], buf2)
        iv = buf2.copy()
        _crf_apply(v[i], iv, buf2)
        for k in range(6):
            f[i, k] = buf[k] + buf2[k]
    tau = np.empty(n)
    for i in range(n - 1, -1, -1):
        tau[i] = _dot6(s6[i], f[i])
        if i > 0:
            _mtv6(xup[i], f[i], buf)
            for k in range(6):
                f[i - 1, k] += buf[k]
    return tau


# ---------------------------------------------------------------------------
# metric derivatives, Christoffel symbols, Coriolis vector


@njit(cache=True)
def _metric_fd(kinds, axes, rot0, pos0, inert, q):
    """Metric and its partials: dg[i, j, k] = d g_ij / d q_k (central differences)."""
    n = q.shape[0]
    g = _crba(kinds, axes, rot0, pos0, inert, q)
    dg = np.empty((n, n, n))
    qp = q.copy()
    for k in range(n):
        h = FD_STEP_SCALE * max(1.0, abs(q[k]))
        qk = q[k]
        qp[k] = qk + h
        gp = _crba(kinds, axes, rot0, pos0, inert, qp)
        qp[k] = qk - h
        gm = _crba(kinds, axes, rot0, pos0, inert, qp)
        qp[k] = qk
        inv = 0.5 / h
        for i in range(n):
            for j in range(n):
                dg[i, j, k] = (gp[i, j] - gm[i, j]) * inv
    return g, dg


@njit(cache=True)
def _christoffel_first(dg):
    # gamma_ijk = (dg_ij/dq_k + dg_ik/dq_j - dg_jk/dq_i) / 2
    n = dg.shape[0]
    gam = np.empty((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gam[i, j, k] = 0.5 * (dg[i, j, k] + dg[i, k, j] - dg[j, k, i])
    return gam


@njit(cache=True)
def _contract_gamma(gam, u, w):
    # c_i = sum_jk gamma_ijk u_j w_k
    n = gam.shape[0]
    c = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            for k in range(n):
                s += gam[i, j, k] * u[j] * w[k]
        c[i] = s
    return c


@njit(cache=True)
def _accel(kinds, axes, rot0, pos0, inert, q, qd, oracle):
    """Geodesic acceleration qdd = -G(q)^-1 c(q, qd) plus the metric at q.

    oracle=False derives c by contracting the finite-difference Christoffel
    symbols; oracle=True derives it by inverse dynamics at zero acceleration.
    The two routes are kept deliberately independent.
    """
    n = q.shape[0]
    if oracle:
        g = _crba(kinds, axes, rot0, pos0, inert, q)
        c = _rnea(kinds, axes, rot0, pos0, inert, q, qd, np.zeros(n))
    else:
        g, dg = _metric_fd(kinds, axes, rot0, pos0, inert, q)
        gam = _christoffel_first(dg)
        c = _contract_gamma(gam, qd, qd)
    low, ok = _cholesky(g)
    if not ok:
        return np.zeros(n), g, SINGULAR
    qdd = _chol_solve(low, -c)
    return qdd, g, OK


@njit(cache=True, inline="always")
def _kinetic(g, qd):
    n = qd.shape[0]
    e = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += g[i, j] * qd[j]
        e += qd[i] * s
    return 0.5 * e


@njit(cache=True)
def _state_bad(q, qd):
    for i in range(q.shape[0]):
        if not np.isfinite(q[i]) or not np.isfinite(qd[i]):
            return True
        if abs(qd[i]) > VELOCITY_GUARD:
            return True
    return False


# ---------------------------------------------------------------------------
# fixed-step RK4 integration of the geodesic equation


@njit(cache=True)
def _grid(duration, step):
    """Number of full steps plus a shorter final step when needed."""
    nfull = int(np.floor(duration / step + 1e-9))
    if nfull < 1:
        nfull = 1
    rem = duration - nfull * step
    if rem <= 1e-9 * (duration if duration > 1.0 else 1.0):
        rem = 0.0
    return nfull, rem


@njit(cache=True)
def _rk4_step(kinds, axes, rot0, pos0, inert, q, qd, h, oracle):
    """One classical RK4 step; also returns the start-of-step acceleration/metric."""
    a1, g1, st = _accel(kinds, axes, rot0, pos0, inert, q, qd, oracle)
    if st != OK:
        return q, qd, a1, g1, st
    q2 = q + (0.5 * h) * qd
    v2 = qd + (0.5 * h) * a1
    a2, _, st = _accel(kinds, axes, rot0, pos0, inert, q2, v2, oracle)
    if st != OK:
        return q, qd, a1, g1, st
    q3 = q + (0.5 * h) * v2
    v3 = qd + (0.5 * h) * a2
    a3, _, st = _accel(kinds, axes, rot0, pos0, inert, q3, v3, oracle)
    if st != OK:
        return q, qd, a1, g1, st
    q4 = q + h * v3
    v4 = qd + h * a3
    a4, _, st = _accel(kinds, axes, rot0, pos0, inert, q4, v4, oracle)
    if st != OK:
        return q, qd, a1, g1, st
    qn = q + (h / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4)
    vn = qd + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    return qn, vn, a1, g1, OK


@njit(cache=True)
def _shoot(kinds, axes, rot0, pos0, inert, q0, v0, duration, step, oracle):
    """Integrate the geodesic IVP, sampling (t, q, qd, qdd, kinetic energy)."""
    n = q0.shape[0]
    nfull, rem = _grid(duration, step)
    m = nfull + 1
    if rem > 0.0:
        m += 1
    times = np.empty(m)
    qs = np.empty((m, n))
    qds = np.empty((m, n))
    qdds = np.empty((m, n))
    es = np.empty(m)
    q = q0.copy()
    qd = v0.copy()
    t = 0.0
    for idx in range(m):
        if _state_bad(q, qd):
            return times, qs, qds, qdds, es, idx, DIVERGED, t
        if idx == m - 1:
            a, g, st = _accel(kinds, axes, rot0, pos0, inert, q, qd, oracle)
            if st != OK:
                return times, qs, qds, qdds, es, idx, st, t
        else:
            h = step if idx < nfull else rem
            qn, vn, a, g, st = _rk4_step(kinds, axes, rot0, pos0, inert, q, qd, h, oracle)
            if st != OK:
                return times, qs, qds, qdds, es, idx, st, t
        times[idx] = t
        for k in range(n):
            qs[idx, k] = q[k]
            qds[idx, k] = qd[k]
            qdds[idx, k] = a[k]
        es[idx] = _kinetic(g, qd)
        if idx == m - 1:
            break
        q = qn
        qd = vn
        t = (idx + 1) * step if idx + 1 <= nfull else duration
        if idx + 1 == m - 1:
            t = duration
    return times, qs, qds, qdds, es, m, OK, duration


@njit(cache=True)
def _terminal(kinds, axes, rot0, pos0, inert, q0, v0, duration, step):
    """Endpoint of the geodesic IVP; identical stepping to _shoot."""
    nfull, rem = _grid(duration, step)
    nsteps = nfull + (1 if rem > 0.0 else 0)
    q = q0.copy()
    qd = v0.copy()
    for s in range(nsteps):
        if _state_bad(q, qd):
            return q, DIVERGED
        h = step if s < nfull else rem
        qn, vn, _, _, st = _rk4_step(kinds, axes, rot0, pos0, inert, q, qd, h, False)
        if st != OK:
            return q, st
        q = qn
        qd = vn
    if _state_bad(q, qd):
        return q, DIVERGED
    return q, OK


@njit(cache=True)
def _connect(kinds, axes, rot0, pos0, inert, q0, q1, duration, step, tol, max_iter, fd_eps):
    """Single shooting with damped Newton on the endpoint residual.

    Returns (v0, residual_inf, status, iterations); status NO_CONVERGENCE
    carries the best residual seen.
    """
    n = q0.shape[0]
    v = (q1 - q0) / duration
    qt, st = _terminal(kinds, axes, rot0, pos0, inert, q0, v, duration, step)
    if st != OK:
        return v, np.inf, st, 0
    r = qt - q1
    rn = np.max(np.abs(r))
    best_v = v.copy()
    best_rn = rn
    for it in range(max_iter):
        if rn < tol:
            return v, rn, OK, it
        jac = np.empty((n, n))
        feasible = True
        for j in range(n):
            vp = v.copy()
            vp[j] += fd_eps
            qtj, st = _terminal(kinds, axes, rot0, pos0, inert, q0, vp, duration, step)
            if st != OK:
                feasible = False
                break
            for i in range(n):
                jac[i, j] = (qtj[i] - qt[i]) / fd_eps
        if not feasible:
            return best_v, best_rn, NO_CONVERGENCE, it
        delta, ok = _gauss_solve(jac, -r)
        if not ok:
            return best_v, best_rn, NO_CONVERGENCE, it
        # halve the step until the endpoint residual decreases
        alpha = 1.0
        accepted = False
        vn = v
        qtn = qt
        rnn = rn
        while alpha > 1.0 / 4096.0:
            vc = v + alpha * delta
            qtc, st = _terminal(kinds, axes, rot0, pos0, inert, q0, vc, duration, step)
            if st == OK:
                rc = np.max(np.abs(qtc - q1))
                if rc < rn:
                    vn = vc
                    qtn = qtc
                    rnn = rc
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            return best_v, best_rn, NO_CONVERGENCE, it
        v = vn
        qt = qtn
        r = qt - q1
        rn = rnn
        if rn < best_rn:
            best_v = v.copy()
            best_rn = rn
    if rn < tol:
        return v, rn, OK, max_iter
    return best_v, best_rn, NO_CONVERGENCE, max_iter


# ---------------------------------------------------------------------------
# parallel transport


@njit(cache=True)
def _transport_rhs(kinds, axes, rot0, pos0, inert, q, qd, u):
    """Joint RHS: geodesic acceleration and transport derivative of each row of u."""
    n = q.shape[0]
    m = u.shape[0]
    g, dg = _metric_fd(kinds, axes, rot0, pos0, inert, q)
    gam = _christoffel_first(dg)
    low, ok = _cholesky(g)
    ud = np.zeros((m, n))
    if not ok:
        return np.zeros(n), ud, SINGULAR
    c = _contract_gamma(gam, qd, qd)
    a = _chol_solve(low, -c)
    for r in range(m):
        w = _contract_gamma(gam, qd, u[r])
        x = _chol_solve(low, -w)
        for k in range(n):
            ud[r, k] = x[k]
    return a, ud, OK


@njit(cache=True)
def _shoot_transport(kinds, axes, rot0, pos0, inert, q0, v0, u0, duration, step):
    """Integrate the geodesic and the transport ODE of u0's rows jointly.

    Returns the same sampling as _shoot plus u at every sample.
    """
    n = q0.shape[0]
    m = u0.shape[0]
    nfull, rem = _grid(duration, step)
    ns = nfull + 1
    if rem > 0.0:
        ns += 1
    times = np.empty(ns)
    qs = np.empty((ns, n))
    qds = np.empty((ns, n))
    qdds = np.empty((ns, n))
    es = np.empty(ns)
    us = np.empty((ns, m, n))
    q = q0.copy()
    qd = v0.copy()
    u = u0.copy()
    t = 0.0
    for idx in range(ns):
        if _state_bad(q, qd):
            return times, qs, qds, qdds, es, us, idx, DIVERGED, t
        a1, ud1, st = _transport_rhs(kinds, axes, rot0, pos0, inert, q, qd, u)
        if st != OK:
            return times, qs, qds, qdds, es, us, idx, st, t
        g = _crba(kinds, axes, rot0, pos0, inert, q)
        times[idx] = t
        for k in range(n):
            qs[idx, k] = q[k]
            qds[idx, k] = qd[k]
            qdds[idx, k] = a1[k]
        for r in range(m):
            for k in range(n):
                us[idx, r, k] = u[r, k]
        es[idx] = _kinetic(g, qd)
        if idx == ns - 1:
            break
        h = step if idx < nfull else rem
        q2 = q + (0.5 * h) * qd
        v2 = qd + (0.5 * h) * a1
        u2 = u + (0.5 * h) * ud1
        a2, ud2, st = _transport_rhs(kinds, axes, rot0, pos0, inert, q2, v2, u2)
        if st != OK:
            return times, qs, qds, qdds, es, us, idx + 1, st, t
        q3 = q + (0.5 * h) * v2
        v3 = qd + (0.5 * h) * a2
        u3 = u + (0.5 * h) * ud2
        a3, ud3, st = _transport_rhs(kinds, axes, rot0, pos0, inert, q3, v3, u3)
        if st != OK:
            return times, qs, qds, qdds, es, us, idx + 1, st, t
        q4 = q + h * v3
        v4 = qd + h * a3
        u4 = u + h * ud3
        a4, ud4, st = _transport_rhs(kinds, axes, rot0, pos0, inert, q4, v4, u4)
        if st != OK:
            return times, qs, qds, qdds, es, us, idx + 1, st, t
        q = q + (h / 6.0) * (qd + 2.0 * v2 + 2.0 * v3 + v4)
        qdn = qd + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        u = u + (h / 6.0) * (ud1 + 2.0 * ud2 + 2.0 * ud3 + ud4)
        qd = qdn
        t = (idx + 1) * step if idx + 1 <= nfull else duration
        if idx + 1 == ns - 1:
            t = duration
    return times, qs, qds, qdds, es, us, ns, OK, duration


@njit(cache=True)
def _transport_u_only(kinds, axes, rot0, pos0, inert, u, q, qd):
    m = u.shape[0]
    n = q.shape[0]
    g, dg = _metric_fd(kinds, axes, rot0, pos0, inert, q)
    gam = _christoffel_first(dg)
    low, ok = _cholesky(g)
    ud = np.zeros((m, n))
    if not ok:
        return ud, SINGULAR
    for r in range(m):
        w = _contract_gamma(gam, qd, u[r])
        x = _chol_solve(low, -w)
        for k in range(n):
            ud[r, k] = x[k]
    return ud, OK


@njit(cache=True)
def _transport_straight(kinds, axes, rot0, pos0, inert, q0, q1, duration, step, u0):
    """Transport u0's rows along the straight joint-space segment q0 -> q1."""
    n = q0.shape[0]
    nfull, rem = _grid(duration, step)
    nsteps = nfull + (1 if rem > 0.0 else 0)
    qd = (q1 - q0) / duration
    u = u0.copy()
    t = 0.0
    for s in range(nsteps):
        h = step if s < nfull else rem
        qa = q0 + (t / duration) * (q1 - q0)
        qb = q0 + ((t + 0.5 * h) / duration) * (q1 - q0)
        qc = q0 + ((t + h) / duration) * (q1 - q0)
        ud1, st = _transport_u_only(kinds, axes, rot0, pos0, inert, u, qa, qd)
        if st != OK:
            return u, st
        ud2, st = _transport_u_only(kinds, axes, rot0, pos0, inert, u + (0.5 * h) * ud1, qb, qd)
        if st != OK:
            return u, st
        ud3, st = _transport_u_only(kinds, axes, rot0, pos0, inert, u + (0.5 * h) * ud2, qb, qd)
        if st != OK:
            return u, st
        ud4, st = _transport_u_only(kinds, axes, rot0, pos0, inert, u + h * ud3, qc, qd)
        if st != OK:
            return u, st
        u = u + (h / 6.0) * (ud1 + 2.0 * ud2 + 2.0 * ud3 + ud4)
        t += h
    return u, OK


# ---------------------------------------------------------------------------
# batched trajectory diagnostics


@njit(cache=True)
def _trajectory_checks(kinds, axes, rot0, pos0, inert, qs, qds, qdds):
    """Per-sample Eq-of-motion residual |G qdd + c|_inf and kinetic energy."""
    m = qs.shape[0]
    n = qs.shape[1]
    res = np.empty(m)
    es = np.empty(m)
    for idx in range(m):
        q = qs[idx].copy()
        qd = qds[idx].copy()
        g, dg = _metric_fd(kinds, axes, rot0, pos0, inert, q)
        gam = _christoffel_first(dg)
        c = _contract_gamma(gam, qd, qd)
        worst = 0.0
        for i in range(n):
            s = c[i]
            for j in range(n):
                s += g[i, j] * qdds[idx, j]
            if abs(s) > worst:
                worst = abs(s)
        res[idx] = worst
        es[idx] = _kinetic(g, qd)
    return res, es


@njit(cache=True)
def _metric_batch(kinds, axes, rot0, pos0, inert, qs):
    m = qs.shape[0]
    n = qs.shape[1]
    gs = np.empty((m, n, n))
    for idx in range(m):
        gs[idx] = _crba(kinds, axes, rot0, pos0, inert, qs[idx].copy())
    return gs
