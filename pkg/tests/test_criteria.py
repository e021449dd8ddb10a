"""Criterion functionals, bounds, and violation flags."""

import math

import numpy as np
import pytest

from qsteer import errors
from qsteer.criteria import (
    DIM_BOUND_ALT_THRESHOLD,
    DIM_BOUND_THRESHOLD,
    f_dimbound,
    f_entropic,
    f_linear,
    f_rotinv,
    linear_bound_general,
)
from qsteer.measurements import Direction, PAULI_TRIAD, haar_random_triad
from qsteer.qstate import (
    SINGLET_PROJECTOR,
    canonical_form,
    from_matrix,
    random_state,
    werner,
)

MIXED = from_matrix(np.eye(4) / 4.0)
SINGLET = from_matrix(SINGLET_PROJECTOR)


class TestLinear:
    def test_werner_08_violates(self):
        rep = f_linear(werner(0.8), PAULI_TRIAD, PAULI_TRIAD, 3)
        assert rep.value == pytest.approx(2.4, abs=1e-12)
        assert rep.bound == pytest.approx(math.sqrt(3), abs=1e-15)
        assert rep.violated

    def test_werner_05_within_bound(self):
        rep = f_linear(werner(0.5), PAULI_TRIAD, PAULI_TRIAD, 3)
        assert rep.value == pytest.approx(1.5, abs=1e-12)
        assert not rep.violated

    def test_maximally_mixed(self):
        rep = f_linear(MIXED, PAULI_TRIAD, PAULI_TRIAD, 3)
        assert rep.value == pytest.approx(0.0, abs=1e-12)
        assert not rep.violated

    def test_closed_form_is_an_upper_bound(self):
        # raw |sum M_ii| never exceeds sqrt(m) times the canonical-frame
        # optimum (c_norm for m=3, sqrt(c^2 - c_min^2) for m=2), whatever
        # the settings
        rng = np.random.default_rng(31)
        for _ in range(1000):
            rho = random_state(rng)
            cf = canonical_form(rho)
            best3 = cf.c_norm
            best2 = math.sqrt(max(cf.c_norm**2 - cf.c_min**2, 0.0))
            for _ in range(100):
                ra, rb = haar_random_triad(rng), haar_random_triad(rng)
                raw3 = f_linear(rho, ra, rb, 3).value
                raw2 = f_linear(rho, ra, rb, 2).value
                assert raw3 <= math.sqrt(3) * best3 + 1e-9
                assert raw2 <= math.sqrt(2) * best2 + 1e-9


class TestLinearBoundGeneral:
    def test_orthonormal_triad_recovers_sqrt_m(self):
        dirs = [Direction(PAULI_TRIAD.R[i]) for i in range(3)]
        assert linear_bound_general(dirs, 3) == pytest.approx(math.sqrt(3), abs=1e-12)
        assert linear_bound_general(dirs, 2) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_single_direction(self):
        assert linear_bound_general([Direction(np.array([0, 0, 1.0]))], 1) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_repeated_direction(self):
        d = Direction(np.array([1.0, 0, 0]))
        assert linear_bound_general([d, d], 2) == pytest.approx(2.0, abs=1e-12)


class TestEntropic:
    def test_werner_closed_form_q2(self):
        # aligned Pauli settings: value = 3 (1 - w^2)/2, bound = 1,
        # violated iff w > 1/sqrt(3)
        for w in (0.2, 0.5, 0.7, 0.9):
            rep = f_entropic(werner(w), PAULI_TRIAD, PAULI_TRIAD, 3, q=2.0)
            assert rep.value == pytest.approx(3 * (1 - w * w) / 2, abs=1e-10)
            assert rep.bound == pytest.approx(1.0, abs=1e-12)
            assert rep.violated == (w > 1 / math.sqrt(3))
            assert rep.meta["aligned_settings"]

    def test_maximally_mixed_q2(self):
        rep = f_entropic(MIXED, PAULI_TRIAD, PAULI_TRIAD, 3, q=2.0)
        assert rep.value == pytest.approx(1.5, abs=1e-12)
        assert not rep.violated

    def test_maximally_mixed_general_q(self):
        q = 1.5
        rep = f_entropic(MIXED, PAULI_TRIAD, PAULI_TRIAD, 3, q=q)
        expect = 3.0 * (1.0 - 4.0 * 0.25**q / 0.5 ** (q - 1.0)) / (q - 1.0)
        assert rep.value == pytest.approx(expect, abs=1e-12)

    def test_singlet_minimal(self):
        rep = f_entropic(SINGLET, PAULI_TRIAD, PAULI_TRIAD, 3, q=2.0)
        assert rep.value == pytest.approx(0.0, abs=1e-12)
        assert rep.violated

    @pytest.mark.parametrize("q", [0.0, 1.0, 2.5, -1.0])
    def test_q_out_of_range(self, q):
        with pytest.raises(errors.QOutOfRange):
            f_entropic(MIXED, PAULI_TRIAD, PAULI_TRIAD, 3, q=q)

    def test_vanishing_marginal_with_vanishing_joint_contributes_zero(self):
        # |00><00| measured along z has p(a=-1) = 0 with zero joint mass;
        # the setting contributes the deterministic term and the x/y
        # settings contribute 1/2 each, totalling exactly the bound
        ket = np.zeros(4, dtype=complex)
        ket[0] = 1.0
        product = from_matrix(np.outer(ket, ket.conj()))
        rep = f_entropic(product, PAULI_TRIAD, PAULI_TRIAD, 3, q=2.0)
        assert rep.value == pytest.approx(1.0, abs=1e-12)
        assert not rep.violated


class TestRotInv:
    def test_werner_triad_independent(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            ra, rb = haar_random_triad(rng), haar_random_triad(rng)
            rep = f_rotinv(werner(0.8), ra, rb, 3)
            assert rep.value == pytest.approx(2.4, abs=1e-10)
            assert rep.violated

    def test_maximally_mixed(self):
        rep = f_rotinv(MIXED, PAULI_TRIAD, PAULI_TRIAD, 3)
        assert rep.value == pytest.approx(0.0, abs=1e-12)
        assert not rep.violated

    def test_invariance_under_extra_rotations(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            rho = random_state(rng)
            base = f_rotinv(rho, PAULI_TRIAD, PAULI_TRIAD, 3).value
            for _ in range(10):
                ra, rb = haar_random_triad(rng), haar_random_triad(rng)
                assert f_rotinv(rho, ra, rb, 3).value == pytest.approx(base, abs=1e-9)


class TestDimBound:
    def test_werner_determinant(self):
        for w in (0.3, 0.8):
            rep = f_dimbound(werner(w), PAULI_TRIAD, PAULI_TRIAD, 3)
            assert rep.value == pytest.approx(w**3, abs=1e-12)

    def test_maximally_mixed(self):
        rep = f_dimbound(MIXED, PAULI_TRIAD, PAULI_TRIAD, 3)
        assert rep.value == pytest.approx(0.0, abs=1e-12)

    def test_bound_constants(self):
        assert DIM_BOUND_THRESHOLD == pytest.approx(1.0 / 108.0, abs=1e-15)
        assert DIM_BOUND_ALT_THRESHOLD == pytest.approx(0.19245008972987526, abs=1e-15)
        rep = f_dimbound(werner(0.5), PAULI_TRIAD, PAULI_TRIAD, 3)
        assert rep.bound == pytest.approx(1.0 / 108.0, abs=1e-15)
        assert rep.alt_bound == pytest.approx(1.0 / (3.0 * math.sqrt(3.0)), abs=1e-15)
        alt = f_dimbound(werner(0.5), PAULI_TRIAD, PAULI_TRIAD, 3, use_alt_bound=True)
        assert alt.bound == pytest.approx(1.0 / (3.0 * math.sqrt(3.0)), abs=1e-15)
        # the two conventions disagree exactly on |det D| in (1/108, 1/(3 sqrt 3))
        assert rep.violated and not alt.violated

    def test_rotation_invariance_on_werner(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            ra, rb = haar_random_triad(rng), haar_random_triad(rng)
            rep = f_dimbound(werner(0.7), ra, rb, 3)
            assert rep.value == pytest.approx(0.343, abs=1e-10)

    def test_requires_three_settings(self):
        with pytest.raises(errors.BadSettingCount):
            f_dimbound(MIXED, PAULI_TRIAD, PAULI_TRIAD, 2)


def test_werner_violation_magnitudes_monotone():
    """All four violation magnitudes are nondecreasing in the Werner weight."""
    prev = np.array([-np.inf] * 4)
    for w in np.linspace(0.0, 1.0, 101):
        rho = werner(w)
        lin = f_linear(rho, PAULI_TRIAD, PAULI_TRIAD, 3)
        ent = f_entropic(rho, PAULI_TRIAD, PAULI_TRIAD, 3)
        rot = f_rotinv(rho, PAULI_TRIAD, PAULI_TRIAD, 3)
        dim = f_dimbound(rho, PAULI_TRIAD, PAULI_TRIAD, 3)
        mags = np.array(
            [
                max(0.0, lin.value - lin.bound),
                max(0.0, ent.bound - ent.value),
                max(0.0, rot.value - rot.bound),
                max(0.0, dim.value - dim.bound),
            ]
        )
        assert np.all(mags >= prev - 1e-12)
        prev = mags
