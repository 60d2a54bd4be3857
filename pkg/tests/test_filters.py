import numpy as np
import pytest

from entcrit.criteria import evaluate_criterion, ghz3_biseparability
from entcrit.decoherence import apply_balance_filter, relaxed_ghz, relaxed_ghz_shells
from entcrit.families import noisy_ghz, w, white_noise_mix
from entcrit.filters import (
    LocalFilterSet,
    decoherence_filter,
    identity_parameters,
    optimize_violation,
)
from entcrit.oracle import random_biseparable_mixture
from entcrit.qstate import EntcritError


class TestLocalFilterSet:
    def test_determinant_normalization(self):
        fs = LocalFilterSet((np.diag([2.0, 2.0]), np.eye(2), np.eye(2)))
        assert abs(np.linalg.det(fs.operators[0])) == pytest.approx(1.0)

    def test_rejects_singular(self):
        with pytest.raises(EntcritError, match="determinant"):
            LocalFilterSet((np.array([[1.0, 0.0], [0.0, 1e-9]]), np.eye(2)))

    def test_parameter_mapping_identity(self):
        fs = LocalFilterSet.from_parameters(identity_parameters(3), 3)
        for op in fs.operators:
            np.testing.assert_allclose(op, np.eye(2), atol=1e-15)

    def test_apply_matches_apply_local(self):
        rng = np.random.default_rng(41)
        params = rng.normal(size=16)
        fs = LocalFilterSet.from_parameters(params, 2)
        rho = white_noise_mix(w(2), 0.3)
        out = fs.apply(rho)
        full = np.kron(fs.operators[0], fs.operators[1])
        np.testing.assert_allclose(out.matrix, full @ rho.matrix @ full.conj().T,
                                   atol=1e-12)


class TestDecoherenceFilter:
    def test_identity_at_half(self):
        fs = decoherence_filter(0.5, 3)
        for op in fs.operators:
            np.testing.assert_allclose(op, np.eye(2), atol=1e-15)

    def test_alpha_fourth_power(self):
        fs = decoherence_filter(0.8, 2)
        alpha = fs.operators[0][0, 0].real
        assert alpha ** 4 == pytest.approx(4.0)
        assert alpha == pytest.approx(4 ** 0.25)

    def test_range_check(self):
        with pytest.raises(EntcritError):
            decoherence_filter(1.0, 3)

    def test_filtered_relaxed_state_is_ghz_diagonal_up_to_corner(self):
        # dense filtering agrees with the closed form, and the result
        # differs from a GHZ-diagonal state only in the (0,0) population
        n, x = 3, 0.6
        fs = decoherence_filter(x, n)
        dense = fs.apply(relaxed_ghz(n, x))
        shells = apply_balance_filter(relaxed_ghz_shells(n, x), x)
        np.testing.assert_allclose(dense.matrix, shells.to_density_matrix().matrix,
                                   atol=1e-12)
        d = shells.shell_diagonals
        assert d[1] == pytest.approx(d[2]) == pytest.approx(d[3])
        # the GHZ-diagonal comparison state: flat diagonal plus the corner
        ghz_diag = np.diag(np.full(8, d[1], dtype=complex))
        ghz_diag[0, 7] = ghz_diag[7, 0] = shells.corner
        diff = dense.matrix - ghz_diag
        diff[0, 0] = 0.0
        assert np.abs(diff).max() < 1e-12
        assert dense.matrix[0, 0].real > d[1]


class TestOptimizeViolation:
    def test_identity_included(self):
        rho = noisy_ghz(3, 0.55)
        unfiltered = ghz3_biseparability(rho.normalized()).margin
        _, report = optimize_violation(rho, "ghz3", restarts=2, budget=100, seed=1)
        assert report.margin >= unfiltered - 1e-15
        assert report.violated

    def test_monotone_in_budget(self):
        rho = white_noise_mix(w(3), 0.3)
        margins = []
        for budget in (50, 200, 600):
            _, report = optimize_violation(rho, "ghz3", restarts=3,
                                           budget=budget, seed=7)
            margins.append(report.margin)
        assert margins[0] <= margins[1] + 1e-15
        assert margins[1] <= margins[2] + 1e-15

    def test_deterministic_for_fixed_seed(self):
        rho = white_noise_mix(w(3), 0.44)
        _, a = optimize_violation(rho, "ghz3", restarts=4, budget=150, seed=3)
        _, b = optimize_violation(rho, "ghz3", restarts=4, budget=150, seed=3)
        assert a == b

    def test_zero_restarts_identity_only(self):
        rho = white_noise_mix(w(3), 0.46)
        fs, report = optimize_violation(rho, "w3", restarts=0, budget=0, seed=0)
        direct = evaluate_criterion("w3", rho.normalized())
        assert report.margin == pytest.approx(direct.margin)
        assert report.violated
        for op in fs.operators:
            np.testing.assert_allclose(op, np.eye(2), atol=1e-12)

    def test_filtering_a_ghz_detected_state_improves_or_keeps(self):
        rho = noisy_ghz(3, 0.5)
        _, report = optimize_violation(rho, "ghz3", restarts=5, budget=300, seed=5)
        assert report.margin >= ghz3_biseparability(rho.normalized()).margin - 1e-15

    def test_soundness_under_random_filters(self):
        # filters never push a biseparable state across a criterion
        rng = np.random.default_rng(42)
        worst = -np.inf
        for i in range(40):
            rho = random_biseparable_mixture(3, rng)
            fs = LocalFilterSet.from_parameters(rng.normal(size=24), 3)
            filtered = fs.apply(rho)
            worst = max(worst,
                        ghz3_biseparability(filtered).margin / filtered.trace)
        assert worst <= 1e-12
