"""Two-qubit density matrices and their Bloch-vector representation.

A two-qubit state rho is parameterized by local Bloch vectors a, b and the
3x3 correlation matrix T with T[r, s] = Tr[rho (sigma_r x sigma_s)].  Local
rotations bring T to diagonal form, leaving the triple (a, b, c) with c the
signed diagonal correlations; every steerability measure in this package is
evaluated in that frame.

All functions here are pure and all returned values are immutable, so they
are safe to share across threads.  Random-state generation consumes a
caller-owned ``numpy.random.Generator``; one stream per worker.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, NotHermitian, NotPositive, NotUnitTrace, OutOfRange

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_SLACK = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

#: singlet ket (|01> - |10>)/sqrt(2) in the product basis |00>,|01>,|10>,|11>
SINGLET_KET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
SINGLET_PROJECTOR = np.outer(SINGLET_KET, SINGLET_KET.conj())


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 4x4 two-qubit density matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _freeze(self.matrix))

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True, eq=False)
class BlochForm:
    """Local Bloch vectors and full correlation matrix of a two-qubit state."""

    a: np.ndarray
    b: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _freeze(self.a))
        object.__setattr__(self, "b", _freeze(self.b))
        object.__setattr__(self, "T", _freeze(self.T))


@dataclass(frozen=True, eq=False)
class CanonicalBlochForm:
    """Bloch triple (a, b, c) after local rotations diagonalize T.

    ``rot_alice`` and ``rot_bob`` are the proper rotations that were applied
    to Alice's and Bob's Bloch components; their rows are the measurement
    axes that realize the diagonal frame on the original state.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    rot_alice: np.ndarray = field(repr=False)
    rot_bob: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("a", "b", "c", "rot_alice", "rot_bob"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        total = float(self.a @ self.a + self.b @ self.b + self.c @ self.c)
        if total > 3.0 + 1e-9:
            raise ConsistencyError(
                f"Bloch norm a^2+b^2+c^2 = {total} exceeds 3; input was not a valid state"
            )

    @property
    def c_norm(self) -> float:
        """Euclidean length of the correlation vector."""
        return float(np.sqrt(self.c @ self.c))

    @property
    def c_min(self) -> float:
        """Smallest correlation magnitude min_r |c_r|."""
        return float(np.min(np.abs(self.c)))


def from_matrix(entries: np.ndarray) -> DensityMatrix:
    """Validate a 4x4 complex matrix as a two-qubit density matrix.

    Raises ``NotHermitian``, ``NotUnitTrace`` or ``NotPositive`` naming the
    violated invariant and the offending magnitude.
    """
    rho = np.asarray(entries, dtype=complex)
    if rho.shape != (4, 4):
        raise OutOfRange(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho.view(float))):
        raise OutOfRange("matrix entries must be finite")
    herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_dev > HERMITICITY_TOL:
        raise NotHermitian(f"max |rho - rho^dag| = {herm_dev:.3e} > {HERMITICITY_TOL}")
    trace_dev = abs(complex(np.trace(rho)) - 1.0)
    if trace_dev > TRACE_TOL:
        raise NotUnitTrace(f"|Tr rho - 1| = {trace_dev:.3e} > {TRACE_TOL}")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -PSD_SLACK:
        raise NotPositive(f"minimum eigenvalue {min_eig:.3e} < -{PSD_SLACK}")
    return DensityMatrix(rho)


def werner(w: float) -> DensityMatrix:
    """Werner state w |psi_s><psi_s| + (1-w)/4 * identity."""
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise OutOfRange(f"Werner weight w = {w} outside [0, 1]")
    rho = w * SINGLET_PROJECTOR + (1.0 - w) / 4.0 * np.eye(4, dtype=complex)
    return from_matrix(rho)


def bloch_decompose(rho: DensityMatrix) -> BlochForm:
    """Extract a_r = Tr[rho (sigma_r x 1)], b_s, and T_rs = Tr[rho (sigma_r x sigma_s)]."""
    m = rho.matrix.reshape(2, 2, 2, 2)
    # partial traces: reduced states of Alice and Bob
    rho_a = np.einsum("ikjk->ij", m)
    rho_b = np.einsum("kikj->ij", m)
    a = np.real(np.einsum("rij,ji->r", PAULI, rho_a))
    b = np.real(np.einsum("rij,ji->r", PAULI, rho_b))
    T = np.real(np.einsum("rij,skl,jlik->rs", PAULI, PAULI, m))
    return BlochForm(a, b, T)


def bloch_matrix(form: BlochForm) -> np.ndarray:
    """Rebuild the 4x4 density matrix from its Bloch decomposition."""
    rho = np.eye(4, dtype=complex)
    for r in range(3):
        rho += form.a[r] * np.kron(PAULI[r], np.eye(2))
        rho += form.b[r] * np.kron(np.eye(2), PAULI[r])
        for s in range(3):
            rho += form.T[r, s] * np.kron(PAULI[r], PAULI[s])
    return rho / 4.0


def canonicalize(form: BlochForm) -> CanonicalBlochForm:
    """Diagonalize the correlation matrix with a pair of proper rotations.

    Convention: |c_1| >= |c_2| >= |c_3| with c_1, c_2 >= 0, and c_3 carries
    the sign of det T, so at most the smallest component is negative.  Ties
    between singular values resolve to the deterministic SVD output.  All
    downstream measures depend only on |c_r| and the product c_1 c_2 c_3, so
    they are invariant under which valid rotation pair is chosen.
    """
    U, s, Vt = np.linalg.svd(form.T)
    sign_u = 1.0 if np.linalg.det(U) > 0 else -1.0
    sign_v = 1.0 if np.linalg.det(Vt) > 0 else -1.0
    flip_u = np.diag([1.0, 1.0, sign_u])
    flip_v = np.diag([1.0, 1.0, sign_v])
    rot_a = flip_u @ U.T
    rot_b = flip_v @ Vt
    c = np.array([s[0], s[1], sign_u * sign_v * s[2]])
    diag_dev = float(np.max(np.abs(rot_a @ form.T @ rot_b.T - np.diag(c))))
    if diag_dev > 1e-10:
        raise ConsistencyError(f"rotated T not diagonal: off-diagonal {diag_dev:.3e}")
    return CanonicalBlochForm(rot_a @ form.a, rot_b @ form.b, c, rot_a, rot_b)


def canonical_form(rho: DensityMatrix) -> CanonicalBlochForm:
    """Shorthand for ``canonicalize(bloch_decompose(rho))``."""
    return canonicalize(bloch_decompose(rho))


def random_state(rng: np.random.Generator) -> DensityMatrix:
    """Hilbert-Schmidt distributed random state G G^dag / Tr(G G^dag).

    G is a 4x4 matrix of independent standard complex Gaussians, so the
    output follows the Ginibre-induced (Hilbert-Schmidt) measure.
    """
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = g @ g.conj().T
    h = (h + h.conj().T) / 2.0  # kill rounding asymmetry before validation
    rho = h / np.real(np.trace(h))
    return from_matrix(rho)
