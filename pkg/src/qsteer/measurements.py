"""Projective measurements, random setting triads, and derived statistics.

Dichotomic observables are unit Bloch directions u with outcomes labeled
+1/-1 and projectors (1 + a u.sigma)/2.  A set of m settings per party is
drawn from the rows of a proper rotation matrix; m = 2 uses the first two
rows so that a single sampling primitive serves both setting counts.  Alice
and Bob triads are sampled independently in random-measurement contexts.

Everything here is a pure function of its inputs; parallel mapping over
samples is safe with one derived RNG stream per worker.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadSettingCount, ConsistencyError, OutOfRange
from .qstate import PAULI, DensityMatrix, bloch_decompose

#: outcome labels in storage order; index 0 holds a = +1
OUTCOMES = (1, -1)

VALID_SETTING_COUNTS = (2, 3)


def _check_settings(m: int) -> int:
    if m not in VALID_SETTING_COUNTS:
        raise BadSettingCount(f"settings count m = {m} not in {VALID_SETTING_COUNTS}")
    return int(m)


@dataclass(frozen=True, eq=False)
class Direction:
    """Unit measurement axis in R^3."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        norm = float(np.linalg.norm(u))
        if abs(norm - 1.0) > 1e-12:
            raise OutOfRange(f"|u| = {norm} differs from 1 by more than 1e-12")
        u = np.array(u)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True, eq=False)
class OrthogonalTriad:
    """Proper rotation whose rows are the measurement axes."""

    R: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        orth_dev = float(np.max(np.abs(R.T @ R - np.eye(3))))
        if orth_dev > 1e-10:
            raise OutOfRange(f"R^T R deviates from identity by {orth_dev:.3e}")
        det_dev = abs(float(np.linalg.det(R)) - 1.0)
        if det_dev > 1e-10:
            raise OutOfRange(f"det R differs from +1 by {det_dev:.3e}")
        R = np.array(R)
        R.setflags(write=False)
        object.__setattr__(self, "R", R)

    def axis(self, i: int) -> np.ndarray:
        return self.R[i]


PAULI_TRIAD = OrthogonalTriad(np.eye(3))


@dataclass(frozen=True, eq=False)
class Assemblage:
    """Bob's unnormalized conditional states sigma_{a|x}.

    ``sigma[x, k]`` is the 2x2 conditional state for setting x and outcome
    ``OUTCOMES[k]``.  Validated for positivity, no-signalling across
    settings, and unit total trace.
    """

    sigma: np.ndarray
    m: int

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=complex)
        if sigma.shape != (self.m, 2, 2, 2):
            raise ConsistencyError(f"assemblage shape {sigma.shape} invalid for m={self.m}")
        for x in range(self.m):
            for k in range(2):
                min_eig = float(np.linalg.eigvalsh(sigma[x, k])[0])
                if min_eig < -1e-10:
                    raise OutOfRange(
                        f"sigma(a={OUTCOMES[k]}|x={x}) has eigenvalue {min_eig:.3e} < -1e-10"
                    )
        reduced = sigma.sum(axis=1)
        dev = float(np.max(np.abs(reduced - reduced[0])))
        if dev > 1e-10:
            raise OutOfRange(f"no-signalling violated: reduced states differ by {dev:.3e}")
        trace = float(np.real(np.trace(reduced[0])))
        if abs(trace - 1.0) > 1e-9:
            raise OutOfRange(f"total assemblage trace {trace} differs from 1 by > 1e-9")
        sigma = np.array(sigma)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    def member(self, x: int, a: int) -> np.ndarray:
        return self.sigma[x, OUTCOMES.index(a)]

    @property
    def reduced_state(self) -> np.ndarray:
        """Bob's reduced state, independent of the setting."""
        return self.sigma[0].sum(axis=0)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Joint correlations M_ij = <A_i x B_j> for the first m axes."""

    M: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if float(np.max(np.abs(M))) > 1.0 + 1e-9:
            raise ConsistencyError("correlation entries must lie in [-1, 1]")
        M = np.array(M)
        M.setflags(write=False)
        object.__setattr__(self, "M", M)


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """(m+1)x(m+1) moment matrix with identity observables in slot 0."""

    D: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        if D[0, 0] != 1.0:
            raise ConsistencyError("data matrix must have D[0][0] = 1")
        D = np.array(D)
        D.setflags(write=False)
        object.__setattr__(self, "D", D)


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Per-setting joint outcome probabilities p_ab and Alice marginals p_a.

    ``p[i, ja, jb]`` is the probability of outcomes (OUTCOMES[ja],
    OUTCOMES[jb]) when both parties measure their i-th setting.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if float(p.min()) < -1e-12:
            raise OutOfRange(f"probability {p.min():.3e} below -1e-12")
        p = np.clip(p, 0.0, None)
        sums = p.sum(axis=(1, 2))
        if float(np.max(np.abs(sums - 1.0))) > 1e-10:
            raise OutOfRange("per-setting probabilities must sum to 1 within 1e-10")
        p = np.array(p)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def alice_marginals(self) -> np.ndarray:
        return self.p.sum(axis=2)

    @property
    def bob_marginals(self) -> np.ndarray:
        return self.p.sum(axis=1)


def projector(u, a: int) -> np.ndarray:
    """Born-rule projector (1 + a u.sigma)/2 onto outcome a of axis u."""
    if a not in OUTCOMES:
        raise OutOfRange(f"outcome {a} not in {OUTCOMES}")
    vec = u.u if isinstance(u, Direction) else Direction(np.asarray(u, float)).u
    return (np.eye(2, dtype=complex) + a * np.einsum("r,rij->ij", vec, PAULI)) / 2.0


def triad_from_gaussian(g: np.ndarray) -> np.ndarray:
    """Rotation matrix from a 3x3 Gaussian sample.

    QR with the R-diagonal sign correction that makes the factorization
    unique (hence Haar on O(3)), then a global sign flip onto the det = +1
    component.  The Monte Carlo kernels apply the same construction to
    batches, so a shared Gaussian stream yields identical triads.
    """
    q, r = np.linalg.qr(g)
    q = q * np.where(np.diag(r) < 0.0, -1.0, 1.0)
    if np.linalg.det(q) < 0.0:
        q = -q
    return q


def haar_random_triad(rng: np.random.Generator) -> OrthogonalTriad:
    """Haar-distributed proper rotation with rows as measurement axes."""
    return OrthogonalTriad(triad_from_gaussian(rng.standard_normal((3, 3))))


def assemblage_from_directions(rho: DensityMatrix, directions: np.ndarray) -> Assemblage:
    """Assemblage sigma_{a|x} = Tr_A[(P(u_x, a) x 1) rho] for arbitrary axes.

    ``directions`` is an (m, 3) array of unit rows.  Used directly by the
    see-saw optimizer, whose updated settings need not stay orthogonal.
    """
    directions = np.asarray(directions, dtype=float)
    m = directions.shape[0]
    rho4 = rho.matrix.reshape(2, 2, 2, 2)
    sigma = np.empty((m, 2, 2, 2), dtype=complex)
    for x in range(m):
        for k, a in enumerate(OUTCOMES):
            proj = projector(Direction(directions[x]), a)
            # sigma[i_B, j_B] = sum_{iA,kA} proj[iA,kA] rho4[kA,iB,iA,jB]
            sigma[x, k] = np.einsum("ik,kaib->ab", proj, rho4)
    return Assemblage(sigma, m)


def assemblage(rho: DensityMatrix, alice: OrthogonalTriad, m: int) -> Assemblage:
    """Assemblage from the first m rows of Alice's triad."""
    m = _check_settings(m)
    return assemblage_from_directions(rho, alice.R[:m])


def correlation_matrix(
    rho: DensityMatrix, alice: OrthogonalTriad, bob: OrthogonalTriad, m: int
) -> CorrelationMatrix:
    """M_ij = u_i^T T v_j, the bilinear image of the correlation matrix."""
    m = _check_settings(m)
    T = bloch_decompose(rho).T
    return CorrelationMatrix(alice.R[:m] @ T @ bob.R[:m].T)


def data_matrix(
    rho: DensityMatrix, alice: OrthogonalTriad, bob: OrthogonalTriad, m: int
) -> DataMatrix:
    """Moment matrix with marginals in the first row/column (m = 3 only)."""
    if m != 3:
        raise BadSettingCount(f"data matrix requires m = 3, got {m}")
    form = bloch_decompose(rho)
    D = np.empty((4, 4))
    D[0, 0] = 1.0
    D[1:, 0] = alice.R @ form.a
    D[0, 1:] = bob.R @ form.b
    D[1:, 1:] = alice.R @ form.T @ bob.R.T
    return DataMatrix(D)


def probability_table(
    rho: DensityMatrix, alice: OrthogonalTriad, bob: OrthogonalTriad, m: int
) -> ProbabilityTable:
    """Joint outcome probabilities for aligned setting pairs (A_i, B_i).

    p_ab = (1 + a u_i.a_vec + b v_i.b_vec + ab u_i^T T v_i)/4, which is the
    Born rule Tr[rho (P_a x P_b)] expanded in the Bloch representation.
    """
    m = _check_settings(m)
    form = bloch_decompose(rho)
    am = alice.R[:m] @ form.a
    bm = bob.R[:m] @ form.b
    corr = np.einsum("ir,rs,is->i", alice.R[:m], form.T, bob.R[:m])
    signs = np.array([1.0, -1.0])
    p = (
        1.0
        + signs[None, :, None] * am[:, None, None]
        + signs[None, None, :] * bm[:, None, None]
        + signs[None, :, None] * signs[None, None, :] * corr[:, None, None]
    ) / 4.0
    return ProbabilityTable(p)
