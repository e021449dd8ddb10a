"""Monte Carlo volume-of-violations estimates."""

import math

import numpy as np
import pytest

from qsteer import errors
from qsteer.criteria import CriterionKind, f_dimbound, f_entropic, f_linear, f_rotinv
from qsteer.measurements import OrthogonalTriad, triad_from_gaussian
from qsteer.qstate import from_matrix, random_state, werner
from qsteer.volume import (
    chunk_sizes,
    estimate_volume,
    werner_volume_sweep,
    wilson_interval,
)

W_THRESH = 1.0 / math.sqrt(3.0)


class TestWilson:
    def test_interval_formula(self):
        z = 1.959963984540054
        k, n = 37, 500
        lo, hi = wilson_interval(k, n)
        phat = k / n
        denom = 1 + z * z / n
        center = (phat + z * z / (2 * n)) / denom
        half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
        assert lo == pytest.approx(center - half, abs=1e-15)
        assert hi == pytest.approx(center + half, abs=1e-15)

    def test_stable_at_extremes(self):
        lo, hi = wilson_interval(0, 1000)
        assert lo == 0.0 and 0 < hi < 0.01
        lo, hi = wilson_interval(1000, 1000)
        assert hi == 1.0 and 0.99 < lo < 1.0


class TestZeroVarianceCases:
    def test_rotinv_exact_on_werner(self):
        assert estimate_volume(werner(0.8), CriterionKind.ROT_INV, 3, 500, 0).fraction == 1.0
        assert estimate_volume(werner(0.5), CriterionKind.ROT_INV, 3, 500, 0).fraction == 0.0

    def test_dimbound_exact_on_werner(self):
        assert estimate_volume(werner(0.8), CriterionKind.DIM_BOUND, 3, 500, 0).fraction == 1.0
        assert estimate_volume(werner(0.5), CriterionKind.DIM_BOUND, 3, 500, 0).fraction == 0.0

    def test_dimbound_separable_convention(self):
        # under the conservative 1/108 threshold the step sits at w = 108^(-1/3)
        est = estimate_volume(
            werner(0.3), CriterionKind.DIM_BOUND, 3, 500, 0, db_convention="separable"
        )
        assert est.fraction == 1.0
        est = estimate_volume(
            werner(0.3), CriterionKind.DIM_BOUND, 3, 500, 0, db_convention="measure"
        )
        assert est.fraction == 0.0

    def test_linear_below_optimum_threshold(self):
        # normalized optimum sqrt(3) * 0.5 < 1: no setting violates
        est = estimate_volume(werner(0.5), CriterionKind.LINEAR, 3, 10_000, 0)
        assert est.fraction == 0.0

    def test_mixed_state_never_violates(self):
        mixed = from_matrix(np.eye(4) / 4.0)
        for kind in (CriterionKind.LINEAR, CriterionKind.ENTROPIC, CriterionKind.ROT_INV):
            assert estimate_volume(mixed, kind, 3, 500, 0).fraction == 0.0


class TestAgainstAnalyticFraction:
    def test_linear_w1_matches_rotation_angle_quadrature(self):
        # violation iff |tr(R_A R_B^T)| > sqrt(3); with the Haar angle
        # density (1 - cos t)/pi this has probability (t* - sin t*)/pi at
        # cos t* = (sqrt(3) - 1)/2
        tstar = math.acos((math.sqrt(3.0) - 1.0) / 2.0)
        expect = (tstar - math.sin(tstar)) / math.pi
        est = estimate_volume(werner(1.0), CriterionKind.LINEAR, 3, 50_000, 11)
        assert est.ci_low <= expect <= est.ci_high


class TestDeterminismAndChunking:
    def test_same_seed_same_counts(self):
        a = estimate_volume(werner(0.7), CriterionKind.ENTROPIC, 3, 5000, 42)
        b = estimate_volume(werner(0.7), CriterionKind.ENTROPIC, 3, 5000, 42)
        assert a.violations == b.violations

    def test_chunk_layout(self):
        assert chunk_sizes(10_000, 4096) == [4096, 4096, 1808]
        assert chunk_sizes(4096, 4096) == [4096]

    def test_cross_backend_agreement(self):
        for kind in (
            CriterionKind.LINEAR,
            CriterionKind.ENTROPIC,
            CriterionKind.ROT_INV,
            CriterionKind.DIM_BOUND,
        ):
            a = estimate_volume(werner(0.85), kind, 3, 4000, 5, use_numba=False)
            b = estimate_volume(werner(0.85), kind, 3, 4000, 5, use_numba=True)
            assert a.violations == b.violations

    def test_matches_per_sample_criterion_reports(self):
        # oracle route: rebuild the chunk's triads one by one and evaluate
        # the criteria module directly
        rho = random_state(np.random.default_rng(3))
        n = 400
        counts = {
            kind: estimate_volume(rho, kind, 3, n, 777).violations
            for kind in (
                CriterionKind.LINEAR,
                CriterionKind.ENTROPIC,
                CriterionKind.ROT_INV,
                CriterionKind.DIM_BOUND,
            )
        }
        rng = np.random.default_rng(np.random.SeedSequence(777, spawn_key=(0,)))
        gauss = rng.standard_normal((n, 2, 3, 3))
        manual = {k: 0 for k in counts}
        for s in range(n):
            alice = OrthogonalTriad(triad_from_gaussian(gauss[s, 0]))
            bob = OrthogonalTriad(triad_from_gaussian(gauss[s, 1]))
            manual[CriterionKind.LINEAR] += f_linear(rho, alice, bob, 3).violated
            manual[CriterionKind.ENTROPIC] += f_entropic(rho, alice, bob, 3).violated
            manual[CriterionKind.ROT_INV] += f_rotinv(rho, alice, bob, 3).violated
            manual[CriterionKind.DIM_BOUND] += f_dimbound(
                rho, alice, bob, 3, use_alt_bound=True
            ).violated
        assert manual == counts


class TestSweep:
    def test_rotinv_step_function(self):
        grid = np.linspace(0.0, 1.0, 21)
        sweep = werner_volume_sweep(CriterionKind.ROT_INV, 3, grid, 500, 1)
        for w, est in sweep:
            assert est.fraction == (1.0 if w > W_THRESH else 0.0)

    def test_monotone_within_wilson(self):
        grid = np.linspace(0.0, 1.0, 11)
        sweep = werner_volume_sweep(CriterionKind.ENTROPIC, 3, grid, 4000, 9)
        for (_, a), (_, b) in zip(sweep, sweep[1:]):
            slack = 2.0 * max(a.ci_high - a.ci_low, b.ci_high - b.ci_low)
            assert b.fraction >= a.fraction - slack

    def test_two_setting_common_threshold(self):
        # all m = 2 criteria share the threshold 1/sqrt(2) on the Werner
        # family and peak at w = 1
        kinds = (CriterionKind.LINEAR, CriterionKind.ENTROPIC, CriterionKind.ROT_INV)
        for kind in kinds:
            sweep = werner_volume_sweep(kind, 2, [0.0, 0.3, 0.6, 0.9, 1.0], 10_000, 13)
            fracs = {w: est.fraction for w, est in sweep}
            assert fracs[0.0] == 0.0 and fracs[0.3] == 0.0 and fracs[0.6] == 0.0
            assert fracs[0.9] > 0.0
            assert fracs[1.0] == max(fracs.values())


class TestValidation:
    def test_dimbound_needs_three_settings(self):
        with pytest.raises(errors.BadSettingCount):
            estimate_volume(werner(0.5), CriterionKind.DIM_BOUND, 2, 500, 0)

    def test_minimum_samples(self):
        with pytest.raises(errors.OutOfRange):
            estimate_volume(werner(0.5), CriterionKind.LINEAR, 3, 99, 0)

    def test_q_validation(self):
        with pytest.raises(errors.QOutOfRange):
            estimate_volume(werner(0.5), CriterionKind.ENTROPIC, 3, 500, 0, q=1.0)

    def test_grid_validation(self):
        with pytest.raises(errors.OutOfRange):
            werner_volume_sweep(CriterionKind.LINEAR, 3, [0.5, 1.5], 500, 0)
