"""Monte Carlo volume of violations over Haar-random measurement settings.

For a fixed state, independent Haar triads are drawn for Alice and Bob per
sample (the least-assumption coupling, recorded in run metadata), a
criterion is evaluated at those settings, and the violating fraction
estimates the volume of the violating region of setting space.  Wilson 95%
intervals are reported; they stay honest near fractions of 0 and 1.

Sampling is chunked, with one RNG stream per chunk derived from the master
seed and the chunk index, so estimates are deterministic for a fixed
(seed, n_samples, chunk_size) regardless of how chunks are distributed
over workers.  Each chunk's Gaussian block feeds the same triad
construction as :func:`qsteer.measurements.haar_random_triad`.

Two kernel implementations exist: a per-sample loop compiled by numba and
a vectorized numpy batch, selected by the active backend (see
:mod:`qsteer.backend`).  They implement identical arithmetic; counts can
differ between paths only if a sample lands within float rounding of a
criterion boundary.

The dimension-bounded criterion defaults to its normalization-implied
threshold 1/(3 sqrt 3), under which every Werner state above the common
threshold violates for all settings; the conservative separable-state
constant 1/108 is available via ``db_convention="separable"``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .backend import NUMBA_ENABLED, maybe_njit
from .criteria import (
    DIM_BOUND_ALT_THRESHOLD,
    DIM_BOUND_THRESHOLD,
    CriterionKind,
    VIOLATION_TOL,
    entropic_bound,
    _check_q,
)
from .errors import BadSettingCount, OutOfRange
from .qstate import DensityMatrix, bloch_decompose

KIND_IDS = {
    CriterionKind.LINEAR: 0,
    CriterionKind.ENTROPIC: 1,
    CriterionKind.ROT_INV: 2,
    CriterionKind.DIM_BOUND: 3,
}

DEFAULT_CHUNK_SIZE = 4096

WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class VolumeEstimate:
    kind: CriterionKind
    m: int
    n_samples: int
    violations: int
    fraction: float
    ci_low: float
    ci_high: float
    q: float | None = None
    db_convention: str | None = None

    @property
    def ci_half_widths(self) -> tuple[float, float]:
        """Distances from the fraction down to the lower and up to the upper limit."""
        return (self.fraction - self.ci_low, self.ci_high - self.fraction)


def wilson_interval(violations: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial fraction."""
    phat = violations / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if violations == 0 else max(0.0, center - half)
    hi = 1.0 if violations == n else min(1.0, center + half)
    return (lo, hi)


@maybe_njit(cache=True)
def _violations_loop(gauss, a, b, T, m, kind_id, q, bound):
    """Per-sample violation flags; numba-compiled on the numba backend."""
    n = gauss.shape[0]
    out = np.zeros(n, np.bool_)
    tol = VIOLATION_TOL
    for s in range(n):
        qa, ra = np.linalg.qr(np.ascontiguousarray(gauss[s, 0]))
        qb, rb = np.linalg.qr(np.ascontiguousarray(gauss[s, 1]))
        for i in range(3):
            if ra[i, i] < 0.0:
                for r in range(3):
                    qa[r, i] = -qa[r, i]
            if rb[i, i] < 0.0:
                for r in range(3):
                    qb[r, i] = -qb[r, i]
        if np.linalg.det(qa) < 0.0:
            qa = -qa
        if np.linalg.det(qb) < 0.0:
            qb = -qb
        U = np.ascontiguousarray(qa[:m])
        V = np.ascontiguousarray(qb[:m])
        M = np.ascontiguousarray(U @ T @ V.T)
        if kind_id == 0:
            val = 0.0
            for i in range(m):
                val += M[i, i]
            out[s] = abs(val) > bound + tol
        elif kind_id == 1:
            value = 0.0
            for i in range(m):
                am = U[i, 0] * a[0] + U[i, 1] * a[1] + U[i, 2] * a[2]
                bm = V[i, 0] * b[0] + V[i, 1] * b[1] + V[i, 2] * b[2]
                inner = 0.0
                for sa in (1.0, -1.0):
                    pa = (1.0 + sa * am) / 2.0
                    if pa <= 0.0:
                        continue
                    for sb in (1.0, -1.0):
                        pab = (1.0 + sa * am + sb * bm + sa * sb * M[i, i]) / 4.0
                        if pab > 0.0:
                            inner += pab**q / pa ** (q - 1.0)
                value += (1.0 - inner) / (q - 1.0)
            out[s] = value < bound - tol
        elif kind_id == 2:
            sv = np.linalg.svd(M)[1]
            out[s] = sv.sum() > bound + tol
        else:
            D = np.empty((4, 4))
            D[0, 0] = 1.0
            for i in range(3):
                D[i + 1, 0] = U[i, 0] * a[0] + U[i, 1] * a[1] + U[i, 2] * a[2]
                D[0, i + 1] = V[i, 0] * b[0] + V[i, 1] * b[1] + V[i, 2] * b[2]
                for j in range(3):
                    D[i + 1, j + 1] = M[i, j]
            out[s] = abs(np.linalg.det(D)) > bound + tol
    return out


def _violations_batch(gauss, a, b, T, m, kind_id, q, bound):
    """Vectorized numpy implementation of the same counting rule."""
    qm, rm = np.linalg.qr(gauss)
    diag = np.diagonal(rm, axis1=-2, axis2=-1)
    qm = qm * np.where(diag < 0.0, -1.0, 1.0)[..., None, :]
    det = np.linalg.det(qm)
    qm = np.where((det < 0.0)[..., None, None], -qm, qm)
    U = qm[:, 0, :m, :]
    V = qm[:, 1, :m, :]
    M = np.einsum("nik,kl,njl->nij", U, T, V)
    tol = VIOLATION_TOL
    if kind_id == 0:
        vals = np.abs(np.einsum("nii->n", M))
        return vals > bound + tol
    if kind_id == 1:
        am = U @ a
        bm = V @ b
        mii = np.einsum("nii->ni", M)
        signs = np.array([1.0, -1.0])
        p = (
            1.0
            + signs[None, None, :, None] * am[..., None, None]
            + signs[None, None, None, :] * bm[..., None, None]
            + signs[None, None, :, None] * signs[None, None, None, :] * mii[..., None, None]
        ) / 4.0
        p = np.clip(p, 0.0, None)
        pa = p.sum(axis=3)
        safe_pa = np.where(pa > 0.0, pa, 1.0)
        contrib = np.where(p > 0.0, p**q / safe_pa[..., None] ** (q - 1.0), 0.0)
        value = ((1.0 - contrib.sum(axis=(2, 3))) / (q - 1.0)).sum(axis=1)
        return value < bound - tol
    if kind_id == 2:
        vals = np.linalg.svd(M, compute_uv=False).sum(axis=1)
        return vals > bound + tol
    n = gauss.shape[0]
    D = np.empty((n, 4, 4))
    D[:, 0, 0] = 1.0
    D[:, 1:, 0] = U @ a
    D[:, 0, 1:] = V @ b
    D[:, 1:, 1:] = M
    return np.abs(np.linalg.det(D)) > bound + tol


def count_violations(gauss, a, b, T, m, kind_id, q, bound, use_numba=None):
    """Dispatch one chunk to the active kernel; ``use_numba`` overrides."""
    if use_numba is None:
        use_numba = NUMBA_ENABLED
    fn = _violations_loop if use_numba else _violations_batch
    return fn(
        np.ascontiguousarray(gauss, dtype=np.float64),
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
        np.ascontiguousarray(T, dtype=np.float64),
        m,
        kind_id,
        float(q),
        float(bound),
    )


def _criterion_bound(kind: CriterionKind, m: int, q: float, db_convention: str) -> float:
    if kind == CriterionKind.ENTROPIC:
        return entropic_bound(m, q)
    if kind == CriterionKind.DIM_BOUND:
        if db_convention == "measure":
            return DIM_BOUND_ALT_THRESHOLD
        if db_convention == "separable":
            return DIM_BOUND_THRESHOLD
        raise OutOfRange(f"unknown dim-bound convention {db_convention!r}")
    return math.sqrt(m)


def chunk_sizes(n_samples: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n_samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def estimate_volume(
    rho: DensityMatrix,
    kind: CriterionKind,
    m: int,
    n_samples: int,
    seed,
    q: float = 2.0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    db_convention: str = "measure",
    use_numba=None,
) -> VolumeEstimate:
    """Violating fraction of a criterion over random orthogonal settings.

    ``seed`` may be an int or a tuple of ints (entropy for the master
    stream); chunk c uses the stream ``SeedSequence(seed, spawn_key=(c,))``.
    """
    if m not in (2, 3):
        raise BadSettingCount(f"settings count m = {m} not in (2, 3)")
    if kind == CriterionKind.DIM_BOUND and m != 3:
        raise BadSettingCount("dimension-bounded criterion requires m = 3")
    if n_samples < 100:
        raise OutOfRange(f"n_samples = {n_samples} below the minimum of 100")
    if kind == CriterionKind.ENTROPIC:
        q = _check_q(q)
    bound = _criterion_bound(kind, m, q, db_convention)
    form = bloch_decompose(rho)
    kind_id = KIND_IDS[kind]

    violations = 0
    for c, size in enumerate(chunk_sizes(n_samples, chunk_size)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(c,)))
        gauss = rng.standard_normal((size, 2, 3, 3))
        flags = count_violations(
            gauss, form.a, form.b, form.T, m, kind_id, q, bound, use_numba
        )
        violations += int(flags.sum())

    lo, hi = wilson_interval(violations, n_samples)
    return VolumeEstimate(
        kind=kind,
        m=m,
        n_samples=n_samples,
        violations=violations,
        fraction=violations / n_samples,
        ci_low=lo,
        ci_high=hi,
        q=q if kind == CriterionKind.ENTROPIC else None,
        db_convention=db_convention if kind == CriterionKind.DIM_BOUND else None,
    )


def werner_volume_sweep(
    kind: CriterionKind,
    m: int,
    w_grid,
    n_samples: int,
    seed,
    q: float = 2.0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    db_convention: str = "measure",
    use_numba=None,
) -> list[tuple[float, VolumeEstimate]]:
    """Volume estimates along a Werner-weight grid, one substream per point."""
    from .qstate import werner

    out = []
    for gi, w in enumerate(w_grid):
        w = float(w)
        if not 0.0 <= w <= 1.0:
            raise OutOfRange(f"grid weight {w} outside [0, 1]")
        entropy = (seed, gi) if isinstance(seed, int) else tuple(seed) + (gi,)
        est = estimate_volume(
            werner(w),
            kind,
            m,
            n_samples,
            entropy,
            q=q,
            chunk_size=chunk_size,
            db_convention=db_convention,
            use_numba=use_numba,
        )
        out.append((w, est))
    return out
