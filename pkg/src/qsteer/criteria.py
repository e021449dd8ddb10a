"""Steering criteria: functional values, bounds, and violation verdicts.

Four dichotomic-measurement criteria are implemented for a shared report
format.  Conventions:

* Linear: raw value |sum_i <A_i x B_i>| against the bound sqrt(m).  The
  closed-form optima used by the measures module live in the 1/sqrt(m)
  normalized convention (bound 1); the two conventions produce identical
  measures because numerator and denominator rescale together.
* Tsallis entropic: the probability form of the conditional q-entropy sum
  is the single source of truth, with bound m ln_q(md/(m-1+d)) for d = 2.
  Terms with zero joint probability contribute 0, the continuous extension
  of x^q / y^(q-1) as x -> 0.
* Rotationally invariant: trace norm of the correlation matrix vs sqrt(m).
* Dimension bounded: |det D| of the moment matrix.  Two thresholds exist:
  the conservative 1/108 from the separable-state bound with d_A = 2,
  m = 3, and the normalization-implied 1/(3 sqrt 3) used by the measure.
  Reports carry the conservative value as ``bound`` and the other as
  ``alt_bound``; call sites state which one they use.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadSettingCount, DegenerateMarginal, QOutOfRange
from .measurements import (
    OrthogonalTriad,
    correlation_matrix,
    data_matrix,
    probability_table,
)
from .qstate import PAULI, DensityMatrix

GREATER_VIOLATES = "greater-violates"
SMALLER_VIOLATES = "smaller-violates"

#: decision deadband: |value - bound| within this margin counts as no violation
VIOLATION_TOL = 1e-12

DIM_BOUND_THRESHOLD = (1.0 / math.sqrt(2.0)) * ((math.sqrt(4.0) - 1.0) / (3.0 * math.sqrt(2.0))) ** 3
DIM_BOUND_ALT_THRESHOLD = 1.0 / (3.0 * math.sqrt(3.0))


class CriterionKind(str, Enum):
    LINEAR = "linear"
    ENTROPIC = "entropic"
    ROT_INV = "rot-inv"
    DIM_BOUND = "dim-bound"


@dataclass(frozen=True)
class CriterionReport:
    kind: CriterionKind
    m: int
    value: float
    bound: float
    violated: bool
    direction: str
    q: float | None = None
    alt_bound: float | None = None
    meta: dict = field(default_factory=dict)


def _verdict(value: float, bound: float, direction: str) -> bool:
    if direction == GREATER_VIOLATES:
        return value > bound + VIOLATION_TOL
    return value < bound - VIOLATION_TOL


def tsallis_log(p: float, q: float) -> float:
    """Deformed logarithm ln_q(p) = (p^(1-q) - 1)/(1 - q)."""
    return (p ** (1.0 - q) - 1.0) / (1.0 - q)


def entropic_bound(m: int, q: float, d: int = 2) -> float:
    """Uncertainty bound m ln_q(m d / (m - 1 + d)) for mutually unbiased settings."""
    return m * tsallis_log(m * d / (m - 1.0 + d), q)


def _check_q(q: float) -> float:
    q = float(q)
    if not (0.0 < q <= 2.0) or q == 1.0:
        raise QOutOfRange(f"Tsallis parameter q = {q} must lie in (0, 2] and differ from 1")
    return q


def f_linear(
    rho: DensityMatrix, alice: OrthogonalTriad, bob: OrthogonalTriad, m: int
) -> CriterionReport:
    """Linear criterion |sum_i M_ii| <= sqrt(m) for aligned setting pairs."""
    M = correlation_matrix(rho, alice, bob, m).M
    value = float(abs(np.trace(M)))
    bound = math.sqrt(m)
    return CriterionReport(
        kind=CriterionKind.LINEAR,
        m=m,
        value=value,
        bound=bound,
        violated=_verdict(value, bound, GREATER_VIOLATES),
        direction=GREATER_VIOLATES,
    )


def linear_bound_general(bob_directions, m: int) -> float:
    """LHS bound max over sign vectors of lambda_max(sum_i a_i B_i).

    For orthonormal directions this recovers sqrt(m).  Accepts 1 to 3
    ``Direction`` objects (or raw unit 3-vectors).
    """
    if not 1 <= m <= 3 or len(bob_directions) < m:
        raise BadSettingCount(f"need 1 <= m <= 3 directions, got m={m}")
    vecs = [np.asarray(getattr(d, "u", d), dtype=float) for d in bob_directions[:m]]
    best = -np.inf
    for signs in np.ndindex(*([2] * m)):
        combo = sum((1.0 if s == 0 else -1.0) * v for s, v in zip(signs, vecs))
        op = np.einsum("r,rij->ij", combo, PAULI)
        best = max(best, float(np.linalg.eigvalsh(op)[-1]))
    return best


def f_entropic(
    rho: DensityMatrix,
    alice: OrthogonalTriad,
    bob: OrthogonalTriad,
    m: int,
    q: float = 2.0,
) -> CriterionReport:
    """Tsallis conditional-entropy criterion in its probability form.

    The bound assumes mutually unbiased settings; orthogonal triads with
    aligned Alice/Bob rows satisfy this, which is the caller's
    responsibility and is flagged in the report metadata.
    """
    q = _check_q(q)
    table = probability_table(rho, alice, bob, m)
    value = 0.0
    for i in range(m):
        inner = 0.0
        for k in range(2):
            p_a = float(table.alice_marginals[i, k])
            joints = table.p[i, k]
            if p_a < 1e-12:
                if float(joints.max()) > 1e-12:
                    raise DegenerateMarginal(
                        f"setting {i}: marginal {p_a:.3e} vanishes with joint mass present"
                    )
                continue
            for p_ab in joints:
                if p_ab > 0.0:
                    inner += p_ab**q / p_a ** (q - 1.0)
        value += (1.0 - inner) / (q - 1.0)
    bound = entropic_bound(m, q)
    aligned = bool(np.allclose(alice.R[:m], bob.R[:m], atol=1e-12))
    return CriterionReport(
        kind=CriterionKind.ENTROPIC,
        m=m,
        q=q,
        value=value,
        bound=bound,
        violated=_verdict(value, bound, SMALLER_VIOLATES),
        direction=SMALLER_VIOLATES,
        meta={"aligned_settings": aligned},
    )


def f_rotinv(
    rho: DensityMatrix, alice: OrthogonalTriad, bob: OrthogonalTriad, m: int
) -> CriterionReport:
    """Rotationally invariant criterion ||M||_tr <= sqrt(m)."""
    M = correlation_matrix(rho, alice, bob, m).M
    value = float(np.linalg.svd(M, compute_uv=False).sum())
    bound = math.sqrt(m)
    return CriterionReport(
        kind=CriterionKind.ROT_INV,
        m=m,
        value=value,
        bound=bound,
        violated=_verdict(value, bound, GREATER_VIOLATES),
        direction=GREATER_VIOLATES,
    )


def f_dimbound(
    rho: DensityMatrix,
    alice: OrthogonalTriad,
    bob: OrthogonalTriad,
    m: int,
    use_alt_bound: bool = False,
) -> CriterionReport:
    """Dimension-bounded criterion |det D| against the separable bound.

    ``use_alt_bound`` switches the verdict to the 1/(3 sqrt 3) threshold
    implied by the measure normalization; the report always carries both.
    """
    if m != 3:
        raise BadSettingCount(f"dimension-bounded criterion requires m = 3, got {m}")
    D = data_matrix(rho, alice, bob, m).D
    value = float(abs(np.linalg.det(D)))
    bound = DIM_BOUND_ALT_THRESHOLD if use_alt_bound else DIM_BOUND_THRESHOLD
    alt = DIM_BOUND_THRESHOLD if use_alt_bound else DIM_BOUND_ALT_THRESHOLD
    return CriterionReport(
        kind=CriterionKind.DIM_BOUND,
        m=m,
        value=value,
        bound=bound,
        violated=_verdict(value, bound, GREATER_VIOLATES),
        direction=GREATER_VIOLATES,
        alt_bound=alt,
        meta={"bound_convention": "measure-implied" if use_alt_bound else "separable"},
    )
