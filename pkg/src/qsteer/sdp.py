"""Small primal-dual interior-point solver for the robustness cone program.

The program solved here is, for an assemblage {sigma_j} (j indexes the 2m
setting/outcome pairs) and the deterministic response table D:

    minimize    sum_l Tr[tau_l]  -  1
    subject to  sum_l D[j, l] tau_l  -  sigma_j  >= 0   for all j
                tau_l >= 0                              for all l

whose optimum is the steering robustness.  In standard form the variable is
a block-diagonal Hermitian matrix with 2^m variable blocks tau_l and 2m
slack blocks, all 2x2, tied by one linear equality per setting/outcome pair
and Hermitian-basis component.  The dual variables y repackage into the
steering functional F_j, feasible when F_j >= 0 and sum_j D[j, l] F_j <= 1.

All cone arithmetic is closed form on 2x2 Hermitian blocks.  The iteration
is Nesterov-Todd scaled path following with a Mehrotra-style adaptive
centering parameter, a 0.98 step fraction, and an iteration cap of 200.
Two implementations of the same iteration live here: a per-block loop
compiled by numba (:func:`solve_robustness_core`) and a stacked-array twin
(:func:`solve_robustness_numpy`); :func:`solve_robustness` dispatches on
the active backend.  Every solve is deterministic.
"""

import numpy as np

from .backend import maybe_njit

STATUS_OPTIMAL = 0
STATUS_MAX_ITERS = 1
STATUS_NUMERICAL = 2

DEFAULT_MAX_ITERS = 200
DEFAULT_TOL = 1e-8
STEP_FRACTION = 0.98

_INV_SQRT2 = 0.7071067811865476
_BIG_STEP = 1e30


@maybe_njit(cache=True)
def _vec4(H, out):
    """Coefficients of H in the orthonormal Hermitian basis {1, sx, sy, sz}/sqrt(2)."""
    out[0] = (H[0, 0].real + H[1, 1].real) * _INV_SQRT2
    out[1] = 2.0 * H[0, 1].real * _INV_SQRT2
    out[2] = -2.0 * H[0, 1].imag * _INV_SQRT2
    out[3] = (H[0, 0].real - H[1, 1].real) * _INV_SQRT2


@maybe_njit(cache=True)
def _mat4(h0, h1, h2, h3):
    out = np.empty((2, 2), np.complex128)
    out[0, 0] = (h0 + h3) * _INV_SQRT2
    out[1, 1] = (h0 - h3) * _INV_SQRT2
    out[0, 1] = complex(h1 * _INV_SQRT2, -h2 * _INV_SQRT2)
    out[1, 0] = np.conj(out[0, 1])
    return out


@maybe_njit(cache=True)
def _herm_det(H):
    return H[0, 0].real * H[1, 1].real - (H[0, 1] * np.conj(H[0, 1])).real


@maybe_njit(cache=True)
def _herm_inv(H):
    det = _herm_det(H)
    out = np.empty((2, 2), np.complex128)
    out[0, 0] = H[1, 1] / det
    out[1, 1] = H[0, 0] / det
    out[0, 1] = -H[0, 1] / det
    out[1, 0] = -H[1, 0] / det
    return out


@maybe_njit(cache=True)
def _herm_sqrt(H):
    # for PSD H: sqrt(H) = (H + sqrt(det) 1) / sqrt(tr + 2 sqrt(det))
    det = _herm_det(H)
    s = np.sqrt(max(det, 0.0))
    tr = H[0, 0].real + H[1, 1].real
    denom = np.sqrt(tr + 2.0 * s)
    out = np.empty((2, 2), np.complex128)
    out[0, 0] = (H[0, 0] + s) / denom
    out[1, 1] = (H[1, 1] + s) / denom
    out[0, 1] = H[0, 1] / denom
    out[1, 0] = H[1, 0] / denom
    return out


@maybe_njit(cache=True)
def _mul(A, B):
    out = np.empty((2, 2), np.complex128)
    out[0, 0] = A[0, 0] * B[0, 0] + A[0, 1] * B[1, 0]
    out[0, 1] = A[0, 0] * B[0, 1] + A[0, 1] * B[1, 1]
    out[1, 0] = A[1, 0] * B[0, 0] + A[1, 1] * B[1, 0]
    out[1, 1] = A[1, 0] * B[0, 1] + A[1, 1] * B[1, 1]
    return out


@maybe_njit(cache=True)
def _inner(A, B):
    """Real trace inner product of two Hermitian 2x2 matrices."""
    return (
        A[0, 0].real * B[0, 0].real
        + A[1, 1].real * B[1, 1].real
        + 2.0 * (A[0, 1] * np.conj(B[0, 1])).real
    )


@maybe_njit(cache=True)
def _hermitize(A):
    h = np.empty((2, 2), np.complex128)
    h[0, 0] = A[0, 0].real
    h[1, 1] = A[1, 1].real
    h[0, 1] = 0.5 * (A[0, 1] + np.conj(A[1, 0]))
    h[1, 0] = np.conj(h[0, 1])
    return h


@maybe_njit(cache=True)
def _nt_scaling(X, Z):
    """NT scaling point W with W Z W = X, per 2x2 block pair."""
    xs = _herm_sqrt(X)
    s = _hermitize(_mul(_mul(xs, Z), xs))
    s_isqrt = _herm_inv(_herm_sqrt(s))
    return _hermitize(_mul(_mul(xs, s_isqrt), xs))


@maybe_njit(cache=True)
def _scaling_quadratic(W):
    """4x4 matrix Q[i,j] = Tr[B_i W B_j W] in the orthonormal Hermitian basis."""
    w0 = 0.5 * (W[0, 0].real + W[1, 1].real)
    w1 = W[0, 1].real
    w2 = -W[0, 1].imag
    w3 = 0.5 * (W[0, 0].real - W[1, 1].real)
    det = w0 * w0 - w1 * w1 - w2 * w2 - w3 * w3
    q = np.empty((4, 4))
    v = np.empty(4)
    v[0] = w0
    v[1] = w1
    v[2] = w2
    v[3] = w3
    for i in range(4):
        for j in range(4):
            q[i, j] = 2.0 * v[i] * v[j]
        q[i, i] += det if i > 0 else -det
    return q


@maybe_njit(cache=True)
def _max_step(H, dH):
    """Largest alpha with H + alpha dH >= 0, from det(H + a dH) = 0."""
    c = _herm_det(H)
    a = _herm_det(dH)
    tr_h = H[0, 0].real + H[1, 1].real
    tr_d = dH[0, 0].real + dH[1, 1].real
    tr_hd = (
        H[0, 0].real * dH[0, 0].real
        + H[1, 1].real * dH[1, 1].real
        + 2.0 * (H[0, 1] * np.conj(dH[0, 1])).real
    )
    b = tr_h * tr_d - tr_hd
    scale = abs(a) + abs(b) + abs(c)
    if scale == 0.0:
        return _BIG_STEP
    if abs(a) <= 1e-15 * scale:
        if b >= -1e-15 * scale:
            return _BIG_STEP
        return -c / b
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return _BIG_STEP
    sq = np.sqrt(disc)
    r1 = (-b - sq) / (2.0 * a)
    r2 = (-b + sq) / (2.0 * a)
    lo = min(r1, r2)
    hi = max(r1, r2)
    if lo > 0.0:
        return lo
    if hi > 0.0:
        return hi
    return _BIG_STEP


@maybe_njit(cache=True)
def _apply_constraints(Dm, blocks, out):
    """out[4j+i] = sum_l D[j,l] vec4(blocks[l])[i] - vec4(blocks[L+j])[i]."""
    J, L = Dm.shape
    tmp = np.empty(4)
    out[:] = 0.0
    for l in range(L):
        _vec4(blocks[l], tmp)
        for j in range(J):
            d = Dm[j, l]
            if d != 0.0:
                for i in range(4):
                    out[4 * j + i] += d * tmp[i]
    for j in range(J):
        _vec4(blocks[L + j], tmp)
        for i in range(4):
            out[4 * j + i] -= tmp[i]


@maybe_njit(cache=True)
def _adjoint(Dm, y, out):
    """out[l] = sum_j D[j,l] Y_j; out[L+j] = -Y_j, with Y_j from y[4j:4j+4]."""
    J, L = Dm.shape
    for b in range(L + J):
        out[b, 0, 0] = 0.0
        out[b, 0, 1] = 0.0
        out[b, 1, 0] = 0.0
        out[b, 1, 1] = 0.0
    for j in range(J):
        Yj = _mat4(y[4 * j], y[4 * j + 1], y[4 * j + 2], y[4 * j + 3])
        for l in range(L):
            d = Dm[j, l]
            if d != 0.0:
                for r in range(2):
                    for cc in range(2):
                        out[l, r, cc] += d * Yj[r, cc]
        for r in range(2):
            for cc in range(2):
                out[L + j, r, cc] -= Yj[r, cc]


@maybe_njit(cache=True)
def solve_robustness_core(sigma, Dm, max_iters, tol):
    """Interior-point solve.

    Returns ``(status, X, y, Z, iters, history, stats)`` where the iterate
    is the best one visited (smallest worst-case relative error) and
    ``stats = (pobj, dobj, rp_rel, rd_rel, mu)`` describes it.  Boundary
    instances with failing strict complementarity may plateau slightly
    above the strict target; they are accepted while every error measure
    stays below 100x the target, which keeps all downstream certificates
    well inside their 1e-6 gates.
    """
    J, L = Dm.shape
    nb = L + J
    p = 4 * J
    dim = 2.0 * nb

    X = np.zeros((nb, 2, 2), np.complex128)
    Z = np.zeros((nb, 2, 2), np.complex128)
    for b in range(nb):
        X[b, 0, 0] = 1.0
        X[b, 1, 1] = 1.0
        Z[b, 0, 0] = 1.0
        Z[b, 1, 1] = 1.0
    y = np.zeros(p)

    bvec = np.zeros(p)
    for j in range(J):
        _vec4(sigma[j], bvec[4 * j : 4 * j + 4])
    bnorm = np.sqrt((bvec**2).sum())
    cnorm = np.sqrt(2.0 * L)

    history = np.zeros((max_iters, 6))
    status = STATUS_MAX_ITERS
    iters = 0

    best_merit = _BIG_STEP
    best_X = X.copy()
    best_Z = Z.copy()
    best_y = y.copy()
    best_stats = np.zeros(5)

    Rd = np.empty((nb, 2, 2), np.complex128)
    Astar = np.empty((nb, 2, 2), np.complex128)
    E = np.empty((nb, 2, 2), np.complex128)
    W = np.empty((nb, 2, 2), np.complex128)
    Zinv = np.empty((nb, 2, 2), np.complex128)
    dX = np.empty((nb, 2, 2), np.complex128)
    dZ = np.empty((nb, 2, 2), np.complex128)
    rp = np.empty(p)
    rhs = np.empty(p)

    for it in range(max_iters):
        # residuals and objectives at the current iterate
        _apply_constraints(Dm, X, rp)
        for k in range(p):
            rp[k] = bvec[k] - rp[k]
        _adjoint(Dm, y, Astar)
        rd_sq = 0.0
        for b in range(nb):
            for r in range(2):
                for cc in range(2):
                    cval = 1.0 + 0.0j if (b < L and r == cc) else 0.0 + 0.0j
                    Rd[b, r, cc] = cval - Z[b, r, cc] - Astar[b, r, cc]
                    rd_sq += abs(Rd[b, r, cc]) ** 2
        pobj = 0.0
        for l in range(L):
            pobj += X[l, 0, 0].real + X[l, 1, 1].real
        dobj = 0.0
        for k in range(p):
            dobj += bvec[k] * y[k]
        mu = 0.0
        for b in range(nb):
            mu += _inner(X[b], Z[b])
        mu /= dim

        rp_rel = np.sqrt((rp**2).sum()) / (1.0 + bnorm)
        rd_rel = np.sqrt(rd_sq) / (1.0 + cnorm)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

        history[it, 0] = it
        history[it, 1] = pobj
        history[it, 2] = dobj
        history[it, 3] = rp_rel
        history[it, 4] = rd_rel
        history[it, 5] = mu
        iters = it + 1

        if not (np.isfinite(mu) and np.isfinite(rp_rel) and np.isfinite(rd_rel)):
            status = STATUS_NUMERICAL
            break
        merit = max(rp_rel, max(rd_rel, rel_gap))
        if merit < best_merit:
            best_merit = merit
            best_X[:] = X
            best_Z[:] = Z
            best_y[:] = y
            best_stats[0] = pobj
            best_stats[1] = dobj
            best_stats[2] = rp_rel
            best_stats[3] = rd_rel
            best_stats[4] = mu
        if merit <= tol:
            status = STATUS_OPTIMAL
            break
        # stop when complementarity is exhausted, the cap is reached, or a
        # block is about to break down; accept the best iterate if every
        # error measure stays within 100x the strict target
        min_det = _BIG_STEP
        for b in range(nb):
            min_det = min(min_det, min(_herm_det(X[b]), _herm_det(Z[b])))
        if mu <= 1e-11 or it == max_iters - 1 or min_det <= 1e-250:
            if best_merit <= 100.0 * tol:
                status = STATUS_OPTIMAL
            elif mu <= 1e-11 or min_det <= 1e-250:
                status = STATUS_NUMERICAL
            else:
                status = STATUS_MAX_ITERS
            break

        # NT scaling and the Schur complement M[kj] = <A_k, W A_j W>
        M = np.zeros((p, p))
        for b in range(nb):
            W[b] = _nt_scaling(X[b], Z[b])
            Zinv[b] = _herm_inv(Z[b])
        for l in range(L):
            q = _scaling_quadratic(W[l])
            for j in range(J):
                dj = Dm[j, l]
                if dj == 0.0:
                    continue
                for j2 in range(J):
                    dj2 = Dm[j2, l]
                    if dj2 == 0.0:
                        continue
                    coef = dj * dj2
                    for i in range(4):
                        for i2 in range(4):
                            M[4 * j + i, 4 * j2 + i2] += coef * q[i, i2]
        for j in range(J):
            q = _scaling_quadratic(W[L + j])
            for i in range(4):
                for i2 in range(4):
                    M[4 * j + i, 4 * j + i2] += q[i, i2]
        md = 0.0
        for k in range(p):
            if M[k, k] > md:
                md = M[k, k]
        for k in range(p):
            M[k, k] += 1e-13 * md

        # predictor: affine direction, sigma = 0, Rc = -X
        for b in range(nb):
            g = _hermitize(_mul(_mul(W[b], Rd[b]), W[b]))
            for r in range(2):
                for cc in range(2):
                    E[b, r, cc] = g[r, cc] + X[b, r, cc]
        _apply_constraints(Dm, E, rhs)
        for k in range(p):
            rhs[k] += rp[k]
        dy = np.linalg.solve(M, rhs)
        _adjoint(Dm, dy, Astar)
        for b in range(nb):
            for r in range(2):
                for cc in range(2):
                    dZ[b, r, cc] = Rd[b, r, cc] - Astar[b, r, cc]
            g = _hermitize(_mul(_mul(W[b], dZ[b]), W[b]))
            for r in range(2):
                for cc in range(2):
                    dX[b, r, cc] = -X[b, r, cc] - g[r, cc]

        ap = 1.0
        ad = 1.0
        for b in range(nb):
            ap = min(ap, _max_step(X[b], dX[b]))
            ad = min(ad, _max_step(Z[b], dZ[b]))
        mu_aff = 0.0
        for b in range(nb):
            xa = np.empty((2, 2), np.complex128)
            za = np.empty((2, 2), np.complex128)
            for r in range(2):
                for cc in range(2):
                    xa[r, cc] = X[b, r, cc] + ap * dX[b, r, cc]
                    za[r, cc] = Z[b, r, cc] + ad * dZ[b, r, cc]
            mu_aff += _inner(xa, za)
        mu_aff = max(mu_aff / dim, 0.0)
        sig = (mu_aff / mu) ** 3
        sig = min(max(sig, 1e-10), 1.0)

        # corrector: recentered direction with the same factorization
        smu = sig * mu
        for b in range(nb):
            g = _hermitize(_mul(_mul(W[b], Rd[b]), W[b]))
            for r in range(2):
                for cc in range(2):
                    rc = smu * Zinv[b, r, cc] - X[b, r, cc]
                    E[b, r, cc] = g[r, cc] - rc
        _apply_constraints(Dm, E, rhs)
        for k in range(p):
            rhs[k] += rp[k]
        dy = np.linalg.solve(M, rhs)
        _adjoint(Dm, dy, Astar)
        for b in range(nb):
            for r in range(2):
                for cc in range(2):
                    dZ[b, r, cc] = Rd[b, r, cc] - Astar[b, r, cc]
            g = _hermitize(_mul(_mul(W[b], dZ[b]), W[b]))
            for r in range(2):
                for cc in range(2):
                    rc = smu * Zinv[b, r, cc] - X[b, r, cc]
                    dX[b, r, cc] = rc - g[r, cc]

        ap = 1.0
        ad = 1.0
        for b in range(nb):
            ap = min(ap, STEP_FRACTION * _max_step(X[b], dX[b]))
            ad = min(ad, STEP_FRACTION * _max_step(Z[b], dZ[b]))
        ap = min(ap, 1.0)
        ad = min(ad, 1.0)
        for b in range(nb):
            for r in range(2):
                for cc in range(2):
                    X[b, r, cc] += ap * dX[b, r, cc]
                    Z[b, r, cc] += ad * dZ[b, r, cc]
        for k in range(p):
            y[k] += ad * dy[k]

    return status, best_X, best_y, best_Z, iters, history[:iters], best_stats


# ---------------------------------------------------------------------------
# vectorized numpy twin of the core above
#
# Same algorithm with the per-block loops replaced by stacked (nb, 2, 2)
# array operations.  Used on the numpy backend, where interpreting the loop
# version would dominate the runtime; results agree with the compiled path
# to solver tolerance.  The benchmark script compares the two.

_J4 = np.diag([-1.0, 1.0, 1.0, 1.0])


def _v_vec4(blocks):
    out = np.empty((blocks.shape[0], 4))
    out[:, 0] = (blocks[:, 0, 0].real + blocks[:, 1, 1].real) * _INV_SQRT2
    out[:, 1] = 2.0 * blocks[:, 0, 1].real * _INV_SQRT2
    out[:, 2] = -2.0 * blocks[:, 0, 1].imag * _INV_SQRT2
    out[:, 3] = (blocks[:, 0, 0].real - blocks[:, 1, 1].real) * _INV_SQRT2
    return out


def _v_mat4(h):
    out = np.empty((h.shape[0], 2, 2), np.complex128)
    out[:, 0, 0] = (h[:, 0] + h[:, 3]) * _INV_SQRT2
    out[:, 1, 1] = (h[:, 0] - h[:, 3]) * _INV_SQRT2
    out[:, 0, 1] = (h[:, 1] - 1j * h[:, 2]) * _INV_SQRT2
    out[:, 1, 0] = np.conj(out[:, 0, 1])
    return out


def _v_det(blocks):
    return blocks[:, 0, 0].real * blocks[:, 1, 1].real - np.abs(blocks[:, 0, 1]) ** 2


def _v_inv(blocks):
    det = _v_det(blocks)
    out = np.empty_like(blocks)
    out[:, 0, 0] = blocks[:, 1, 1] / det
    out[:, 1, 1] = blocks[:, 0, 0] / det
    out[:, 0, 1] = -blocks[:, 0, 1] / det
    out[:, 1, 0] = -blocks[:, 1, 0] / det
    return out


def _v_sqrt(blocks):
    s = np.sqrt(np.maximum(_v_det(blocks), 0.0))
    tr = blocks[:, 0, 0].real + blocks[:, 1, 1].real
    denom = np.sqrt(tr + 2.0 * s)[:, None, None]
    out = blocks.copy()
    out[:, 0, 0] += s
    out[:, 1, 1] += s
    return out / denom


def _v_hermitize(blocks):
    return (blocks + np.conj(blocks.transpose(0, 2, 1))) / 2.0


def _v_nt_scaling(X, Z):
    xs = _v_sqrt(X)
    s = _v_hermitize(xs @ Z @ xs)
    return _v_hermitize(xs @ _v_inv(_v_sqrt(s)) @ xs)


def _v_scaling_quadratic(W):
    v = np.empty((W.shape[0], 4))
    v[:, 0] = 0.5 * (W[:, 0, 0].real + W[:, 1, 1].real)
    v[:, 1] = W[:, 0, 1].real
    v[:, 2] = -W[:, 0, 1].imag
    v[:, 3] = 0.5 * (W[:, 0, 0].real - W[:, 1, 1].real)
    det = v[:, 0] ** 2 - v[:, 1] ** 2 - v[:, 2] ** 2 - v[:, 3] ** 2
    return det[:, None, None] * _J4 + 2.0 * v[:, :, None] * v[:, None, :]


def _v_inner_sum(A, B):
    return float(
        np.sum(A[:, 0, 0].real * B[:, 0, 0].real)
        + np.sum(A[:, 1, 1].real * B[:, 1, 1].real)
        + 2.0 * np.sum((A[:, 0, 1] * np.conj(B[:, 0, 1])).real)
    )


def _v_apply(Dm, blocks):
    V = _v_vec4(blocks)
    L = Dm.shape[1]
    return (Dm @ V[:L] - V[L:]).ravel()


def _v_adjoint(Dm, y):
    J, L = Dm.shape
    Y = _v_mat4(y.reshape(J, 4))
    out = np.empty((L + J, 2, 2), np.complex128)
    out[:L] = np.einsum("jl,jab->lab", Dm, Y)
    out[L:] = -Y
    return out


def _v_max_step(H, dH):
    c = _v_det(H)
    a = _v_det(dH)
    tr_h = H[:, 0, 0].real + H[:, 1, 1].real
    tr_d = dH[:, 0, 0].real + dH[:, 1, 1].real
    tr_hd = (
        H[:, 0, 0].real * dH[:, 0, 0].real
        + H[:, 1, 1].real * dH[:, 1, 1].real
        + 2.0 * (H[:, 0, 1] * np.conj(dH[:, 0, 1])).real
    )
    b = tr_h * tr_d - tr_hd
    scale = np.abs(a) + np.abs(b) + np.abs(c)
    steps = np.full(H.shape[0], _BIG_STEP)
    linear = (np.abs(a) <= 1e-15 * scale) & (scale > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lin_steps = np.where(b < -1e-15 * scale, -c / b, _BIG_STEP)
        steps = np.where(linear, lin_steps, steps)
        quad = (~linear) & (scale > 0.0)
        disc = b * b - 4.0 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        r1 = (-b - sq) / (2.0 * a)
        r2 = (-b + sq) / (2.0 * a)
        lo = np.minimum(r1, r2)
        hi = np.maximum(r1, r2)
        root = np.where(lo > 0.0, lo, np.where(hi > 0.0, hi, _BIG_STEP))
        steps = np.where(quad & (disc >= 0.0), root, steps)
    return float(steps.min())


def solve_robustness_numpy(sigma, Dm, max_iters, tol):
    """Vectorized twin of :func:`solve_robustness_core`; same return shape."""
    J, L = Dm.shape
    nb = L + J
    p = 4 * J
    dim = 2.0 * nb

    eye = np.eye(2, dtype=np.complex128)
    X = np.tile(eye, (nb, 1, 1))
    Z = np.tile(eye, (nb, 1, 1))
    y = np.zeros(p)
    C = np.zeros((nb, 2, 2), np.complex128)
    C[:L] = eye

    bvec = _v_vec4(sigma).ravel()
    bnorm = float(np.linalg.norm(bvec))
    cnorm = np.sqrt(2.0 * L)

    # Schur assembly pattern: pair (j, j2) weights summed over strategies
    DD = np.einsum("jl,kl->jkl", Dm, Dm)

    history = np.zeros((max_iters, 6))
    status = STATUS_MAX_ITERS
    iters = 0
    best_merit = _BIG_STEP
    best = (X.copy(), y.copy(), Z.copy())
    best_stats = np.zeros(5)

    for it in range(max_iters):
        rp = bvec - _v_apply(Dm, X)
        Rd = C - Z - _v_adjoint(Dm, y)
        pobj = float(np.sum(X[:L, 0, 0].real + X[:L, 1, 1].real))
        dobj = float(bvec @ y)
        mu = _v_inner_sum(X, Z) / dim

        rp_rel = float(np.linalg.norm(rp)) / (1.0 + bnorm)
        rd_rel = float(np.sqrt(np.sum(np.abs(Rd) ** 2))) / (1.0 + cnorm)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))

        history[it] = (it, pobj, dobj, rp_rel, rd_rel, mu)
        iters = it + 1

        if not (np.isfinite(mu) and np.isfinite(rp_rel) and np.isfinite(rd_rel)):
            status = STATUS_NUMERICAL
            break
        merit = max(rp_rel, rd_rel, rel_gap)
        if merit < best_merit:
            best_merit = merit
            best = (X.copy(), y.copy(), Z.copy())
            best_stats[:] = (pobj, dobj, rp_rel, rd_rel, mu)
        if merit <= tol:
            status = STATUS_OPTIMAL
            break
        min_det = min(float(_v_det(X).min()), float(_v_det(Z).min()))
        if mu <= 1e-11 or it == max_iters - 1 or min_det <= 1e-250:
            if best_merit <= 100.0 * tol:
                status = STATUS_OPTIMAL
            elif mu <= 1e-11 or min_det <= 1e-250:
                status = STATUS_NUMERICAL
            else:
                status = STATUS_MAX_ITERS
            break

        W = _v_nt_scaling(X, Z)
        Zinv = _v_inv(Z)
        Q = _v_scaling_quadratic(W)
        M4 = np.einsum("jkl,lab->jakb", DD, Q[:L])
        idx = np.arange(J)
        M4[idx, :, idx, :] += Q[L:]
        M = M4.reshape(p, p)
        M[np.diag_indices(p)] += 1e-13 * M.diagonal().max()

        G = _v_hermitize(W @ Rd @ W)
        rhs = rp + _v_apply(Dm, G + X)
        dy = np.linalg.solve(M, rhs)
        dZ = Rd - _v_adjoint(Dm, dy)
        dX = -X - _v_hermitize(W @ dZ @ W)

        ap = min(1.0, _v_max_step(X, dX))
        ad = min(1.0, _v_max_step(Z, dZ))
        mu_aff = max(_v_inner_sum(X + ap * dX, Z + ad * dZ) / dim, 0.0)
        sig = min(max((mu_aff / mu) ** 3, 1e-10), 1.0)

        Rc = (sig * mu) * Zinv - X
        rhs = rp + _v_apply(Dm, G - Rc)
        dy = np.linalg.solve(M, rhs)
        dZ = Rd - _v_adjoint(Dm, dy)
        dX = Rc - _v_hermitize(W @ dZ @ W)

        ap = min(1.0, STEP_FRACTION * _v_max_step(X, dX))
        ad = min(1.0, STEP_FRACTION * _v_max_step(Z, dZ))
        X = X + ap * dX
        Z = Z + ad * dZ
        y = y + ad * dy

    bx, by, bz = best
    return status, bx, by, bz, iters, history[:iters], best_stats


def solve_robustness(sigma, Dm, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, use_numba=None):
    """Backend dispatcher; ``use_numba`` overrides the configured backend."""
    from .backend import NUMBA_ENABLED

    if use_numba is None:
        use_numba = NUMBA_ENABLED
    fn = solve_robustness_core if use_numba else solve_robustness_numpy
    return fn(np.ascontiguousarray(sigma), np.ascontiguousarray(Dm), max_iters, tol)
