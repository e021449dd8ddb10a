"""Closed-form steerability measures on the canonical frame."""

import math

import numpy as np
import pytest

from qsteer import errors
from qsteer.measures import (
    MeasureKind,
    all_measures,
    s_dimbound_3,
    s_entropic_23,
    s_linear_2,
    s_linear_3,
    s_rotinv_3,
)
from qsteer.qstate import (
    SINGLET_PROJECTOR,
    bloch_decompose,
    canonical_form,
    canonicalize,
    from_matrix,
    random_state,
    werner,
)

SQRT2, SQRT3 = math.sqrt(2.0), math.sqrt(3.0)
MIXED_CF = canonical_form(from_matrix(np.eye(4) / 4.0))
SINGLET_CF = canonical_form(from_matrix(SINGLET_PROJECTOR))
W_THRESH = 1.0 / SQRT3


def wcf(w):
    return canonical_form(werner(w))


class TestWernerSubstitution:
    """Hand substitution of |c_r| = w into each closed form."""

    def test_linear_2(self):
        assert s_linear_2(wcf(1.0)).value == pytest.approx(1.0, abs=1e-12)
        assert s_linear_2(wcf(1 / SQRT2)).value == pytest.approx(0.0, abs=1e-9)
        assert s_linear_2(MIXED_CF).value == 0.0
        w = 0.9
        expect = (SQRT2 * w - 1) / (SQRT2 - 1)
        assert s_linear_2(wcf(w)).value == pytest.approx(expect, abs=1e-12)

    def test_linear_3(self):
        assert s_linear_3(wcf(0.8)).value == pytest.approx(
            (SQRT3 * 0.8 - 1) / (SQRT3 - 1), abs=1e-12
        )
        assert s_linear_3(wcf(0.8)).value == pytest.approx(0.5268, abs=1e-4)
        assert s_linear_3(wcf(W_THRESH)).value == pytest.approx(0.0, abs=1e-9)
        assert s_linear_3(SINGLET_CF).value == pytest.approx(1.0, abs=1e-12)

    def test_entropic(self):
        assert s_entropic_23(wcf(0.8)).value == pytest.approx(0.46, abs=1e-12)
        assert s_entropic_23(wcf(W_THRESH)).value == pytest.approx(0.0, abs=1e-9)
        assert s_entropic_23(SINGLET_CF).value == pytest.approx(1.0, abs=1e-12)

    def test_rotinv(self):
        assert s_rotinv_3(wcf(0.8)).value == pytest.approx(
            (2.4 - SQRT3) / (3 - SQRT3), abs=1e-12
        )
        assert s_rotinv_3(wcf(W_THRESH)).value == pytest.approx(0.0, abs=1e-9)
        assert s_rotinv_3(MIXED_CF).value == 0.0

    def test_dimbound(self):
        t = 3 * SQRT3
        assert s_dimbound_3(wcf(0.8)).value == pytest.approx(
            (t * 0.512 - 1) / (t - 1), abs=1e-12
        )
        assert s_dimbound_3(wcf(0.8)).value == pytest.approx(0.39570, abs=5e-5)
        assert s_dimbound_3(wcf(W_THRESH)).value == pytest.approx(0.0, abs=1e-9)
        assert s_dimbound_3(SINGLET_CF).value == pytest.approx(1.0, abs=1e-12)


class TestSharedStructure:
    def test_common_endpoints_on_werner(self):
        zero = all_measures(wcf(0.0))
        one = all_measures(wcf(1.0))
        assert all(v == 0.0 for v in zero.values())
        assert all(v == pytest.approx(1.0, abs=1e-12) for v in one.values())

    def test_common_threshold_three_settings(self):
        at = all_measures(wcf(W_THRESH))
        for kind in (MeasureKind.L3, MeasureKind.E23, MeasureKind.RI3, MeasureKind.DB3):
            assert at[kind] == pytest.approx(0.0, abs=1e-9)
        above = all_measures(wcf(W_THRESH + 1e-6))
        for kind in (MeasureKind.L3, MeasureKind.E23, MeasureKind.RI3, MeasureKind.DB3):
            assert above[kind] > 0.0

    def test_rotinv_equals_linear_on_werner(self):
        for w in np.linspace(0, 1, 21):
            cf = wcf(w)
            assert s_rotinv_3(cf).value == pytest.approx(s_linear_3(cf).value, abs=1e-12)

    def test_range_on_random_states(self):
        # draws bypass the validating constructor (Ginibre output is a valid
        # state by construction and random_state itself is tested elsewhere)
        # to keep 1e5 iterations affordable
        from qsteer.qstate import DensityMatrix  # raw constructor, no validation

        rng = np.random.default_rng(77)
        for _ in range(100_000):
            g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            h = g @ g.conj().T
            rho = DensityMatrix((h + h.conj().T) / (2.0 * np.real(np.trace(h))))
            for v in all_measures(canonicalize(bloch_decompose(rho))).values():
                assert 0.0 <= v <= 1.0

    def test_trace_norm_detection_implies_linear_detection(self):
        # sum_r |c_r| >= ||c||, so sum_r |c_r| > sqrt(3) forces ||c|| > 1:
        # a positive trace-norm measure always comes with a positive linear
        # measure (the converse fails for anisotropic c)
        rng = np.random.default_rng(79)
        converse_failures = 0
        for _ in range(5000):
            ms = all_measures(canonical_form(random_state(rng)))
            if ms[MeasureKind.RI3] > 0.0:
                assert ms[MeasureKind.L3] > 0.0
            if ms[MeasureKind.L3] > 0.0 and ms[MeasureKind.RI3] == 0.0:
                converse_failures += 1
        assert converse_failures > 0

    def test_local_rotation_invariance(self):
        rng = np.random.default_rng(78)
        for _ in range(30):
            rho = random_state(rng)
            base = all_measures(canonical_form(rho))
            q = rng.standard_normal(4)
            q /= np.linalg.norm(q)
            u1 = np.array(
                [[q[0] + 1j * q[3], q[2] + 1j * q[1]], [-q[2] + 1j * q[1], q[0] - 1j * q[3]]]
            )
            q = rng.standard_normal(4)
            q /= np.linalg.norm(q)
            u2 = np.array(
                [[q[0] + 1j * q[3], q[2] + 1j * q[1]], [-q[2] + 1j * q[1], q[0] - 1j * q[3]]]
            )
            u = np.kron(u1, u2)
            rotated = from_matrix(u @ rho.matrix @ u.conj().T)
            other = all_measures(canonical_form(rotated))
            for kind in base:
                assert other[kind] == pytest.approx(base[kind], abs=1e-9)


class TestEntropicDegenerate:
    def test_product_state_limit(self):
        # |00><00| has a_3 = 1; the factorized limit gives term (1-b_3^2)/2 = 0
        ket = np.zeros(4, dtype=complex)
        ket[0] = 1.0
        cf = canonical_form(from_matrix(np.outer(ket, ket.conj())))
        assert s_entropic_23(cf).value == pytest.approx(0.0, abs=1e-9)

    def test_inconsistent_degenerate_input_raises(self):
        from qsteer.qstate import CanonicalBlochForm

        bad = CanonicalBlochForm(
            a=np.array([1.0, 0.0, 0.0]),
            b=np.array([0.0, 0.0, 0.0]),
            c=np.array([0.9, 0.0, 0.0]),
            rot_alice=np.eye(3),
            rot_bob=np.eye(3),
        )
        with pytest.raises(errors.DegenerateLocalVector):
            s_entropic_23(bad)
