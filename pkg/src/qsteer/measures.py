"""Closed-form steerability measures on the canonical Bloch frame.

Each measure rescales a criterion's maximal violation to [0, 1], with 0 at
the steering threshold and 1 for Bell states.  The formulas are written in
the frame where the correlation matrix is diagonal, so every function here
consumes a ``CanonicalBlochForm``; canonicalization is the explicit bridge
from an arbitrary state.

The entropic measure is evaluated at fixed orthogonal measurements along
the canonical axes with q = 2; whether that choice is optimal over
measurements is an open question and no optimization is attempted.
Outputs are clamped to [0, 1]; an excess beyond 1e-9 raises instead of
clamping silently.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConsistencyError, DegenerateLocalVector
from .qstate import CanonicalBlochForm

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
THREE_SQRT3 = 3.0 * SQRT3


class MeasureKind(str, Enum):
    L2 = "s_l2"
    L3 = "s_l3"
    E23 = "s_e23"
    RI3 = "s_ri3"
    DB3 = "s_db3"


@dataclass(frozen=True)
class MeasureValue:
    kind: MeasureKind
    value: float


def _clamp(kind: MeasureKind, raw: float) -> MeasureValue:
    if raw > 1.0 + 1e-9:
        raise ConsistencyError(f"{kind.value} = {raw} exceeds 1 beyond tolerance")
    return MeasureValue(kind, min(max(raw, 0.0), 1.0))


def s_linear_2(f: CanonicalBlochForm) -> MeasureValue:
    """Two-setting linear measure max[0, (sqrt(c^2 - c_min^2) - 1)/(sqrt 2 - 1)]."""
    c2 = f.c_norm**2
    raw = (math.sqrt(max(c2 - f.c_min**2, 0.0)) - 1.0) / (SQRT2 - 1.0)
    return _clamp(MeasureKind.L2, raw)


def s_linear_3(f: CanonicalBlochForm) -> MeasureValue:
    """Three-setting linear measure max[0, (c - 1)/(sqrt 3 - 1)]."""
    raw = (f.c_norm - 1.0) / (SQRT3 - 1.0)
    return _clamp(MeasureKind.L3, raw)


def s_entropic_23(f: CanonicalBlochForm) -> MeasureValue:
    """Tsallis q = 2 entropic measure with canonical-axis measurements.

    The summand for axis r is (1 - a_r^2 - b_r^2 - c_r^2 + 2 a_r b_r c_r)
    / (2 (1 - a_r^2)).  When 1 - a_r^2 vanishes the state factorizes along
    that axis and the term tends to (1 - b_r^2)/2, which is used when the
    numerator vanishes too; otherwise the input is flagged as degenerate.
    """
    total = 0.0
    for r in range(3):
        a, b, c = float(f.a[r]), float(f.b[r]), float(f.c[r])
        denom = 1.0 - a * a
        numer = 1.0 - a * a - b * b - c * c + 2.0 * a * b * c
        if denom <= 1e-10:
            if abs(numer) <= 1e-10:
                total += (1.0 - b * b) / 2.0
                continue
            raise DegenerateLocalVector(
                f"axis {r}: 1 - a_r^2 = {denom:.3e} with numerator {numer:.3e}"
            )
        total += numer / (2.0 * denom)
    return _clamp(MeasureKind.E23, 1.0 - total)


def s_rotinv_3(f: CanonicalBlochForm) -> MeasureValue:
    """Trace-norm measure max[0, (sum_r |c_r| - sqrt 3)/(3 - sqrt 3)]."""
    raw = (float(abs(f.c[0]) + abs(f.c[1]) + abs(f.c[2])) - SQRT3) / (3.0 - SQRT3)
    return _clamp(MeasureKind.RI3, raw)


def s_dimbound_3(f: CanonicalBlochForm) -> MeasureValue:
    """Moment-determinant measure with normalization 3 sqrt 3.

    The optimal moment determinant in the canonical frame is
    c1 c2 c3 - (a1 b1 c2 c3 + a2 b2 c1 c3 + a3 b3 c1 c2).
    """
    a, b, c = f.a, f.b, f.c
    det = (
        c[0] * c[1] * c[2]
        - a[0] * b[0] * c[1] * c[2]
        - a[1] * b[1] * c[0] * c[2]
        - a[2] * b[2] * c[0] * c[1]
    )
    raw = (THREE_SQRT3 * abs(float(det)) - 1.0) / (THREE_SQRT3 - 1.0)
    return _clamp(MeasureKind.DB3, raw)


def all_measures(f: CanonicalBlochForm) -> dict[MeasureKind, float]:
    """All five measures as a kind -> value mapping."""
    return {
        MeasureKind.L2: s_linear_2(f).value,
        MeasureKind.L3: s_linear_3(f).value,
        MeasureKind.E23: s_entropic_23(f).value,
        MeasureKind.RI3: s_rotinv_3(f).value,
        MeasureKind.DB3: s_dimbound_3(f).value,
    }
