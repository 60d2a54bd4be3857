import numpy as np
import pytest

from entcrit.families import (
    AcinFamilyParams,
    acin_state,
    dicke,
    ghz,
    noisy_ghz_shells,
    w,
    white_noise_mix,
)
from entcrit.oracle import (
    ppt_all_bipartitions,
    ppt_check,
    random_biseparable_mixture,
    random_product_mixture,
    random_pure_biseparable,
    random_pure_product,
    soundness_sweep,
    sweep_noise_family,
    threshold_bisection,
)
from entcrit.qstate import Bipartition, DensityMatrix, EntcritError, all_bipartitions


class TestGenerators:
    def test_deterministic_under_seed(self):
        a = random_pure_biseparable(3, Bipartition(3, (0,)), seed=9)
        b = random_pure_biseparable(3, Bipartition(3, (0,)), seed=9)
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
        c = random_pure_product(4, seed=9)
        d = random_pure_product(4, seed=9)
        np.testing.assert_array_equal(c.amplitudes, d.amplitudes)

    def test_biseparable_schmidt_rank_one_across_cut(self):
        rng = np.random.default_rng(61)
        for cut in all_bipartitions(4):
            psi = random_pure_biseparable(4, cut, rng)
            coeffs = psi.schmidt_coefficients(cut)
            assert coeffs[0] == pytest.approx(1.0)
            assert coeffs[1] < 1e-12

    def test_generically_entangled_across_other_cuts(self):
        rng = np.random.default_rng(62)
        cut = Bipartition(3, (0,))
        other = Bipartition(3, (1,))
        entangled = 0
        for _ in range(20):
            psi = random_pure_biseparable(3, cut, rng)
            if psi.schmidt_coefficients(other)[1] > 1e-3:
                entangled += 1
        assert entangled >= 18

    def test_product_state_rank_one_everywhere(self):
        rng = np.random.default_rng(63)
        psi = random_pure_product(4, rng)
        for cut in all_bipartitions(4):
            assert psi.schmidt_coefficients(cut)[1] < 1e-12

    def test_mixtures_are_states(self):
        rho = random_biseparable_mixture(3, seed=64)
        assert rho.is_psd
        assert rho.trace == pytest.approx(1.0)
        rho = random_product_mixture(3, seed=65)
        assert rho.is_psd


class TestPpt:
    def test_acin_family_ppt_everywhere(self):
        ok, results = ppt_all_bipartitions(acin_state(AcinFamilyParams(2, 2, 1)))
        assert ok
        assert set(results) == {"A|BC", "AB|C", "AC|B"}

    def test_ghz_fails_every_cut(self):
        rho = ghz(3).density_matrix()
        for cut in all_bipartitions(3):
            ok, min_eig = ppt_check(rho, cut)
            assert not ok
            assert min_eig == pytest.approx(-0.5)

    def test_maximally_mixed_passes(self):
        ok, min_eig = ppt_check(DensityMatrix(np.eye(8) / 8), Bipartition(3, (0,)))
        assert ok
        assert min_eig == pytest.approx(1 / 8)


class TestBisection:
    def test_ghz3_noise_threshold(self):
        p = threshold_bisection(lambda q: noisy_ghz_shells(3, q), "ghzN",
                                0.0, 1.0, tol=1e-7)
        assert p == pytest.approx(4 / 7, abs=1e-6)

    def test_w3_threshold(self):
        p = threshold_bisection(lambda q: white_noise_mix(w(3), q), "w3",
                                0.0, 1.0, tol=1e-7)
        assert p == pytest.approx(8 / 17, abs=1e-6)

    def test_dicke_threshold(self):
        p = threshold_bisection(lambda q: white_noise_mix(dicke(4, 2), q),
                                "dicke4", 0.0, 1.0, tol=1e-7)
        assert p == pytest.approx(8 / 21, abs=1e-6)

    def test_requires_sign_change(self):
        with pytest.raises(EntcritError, match="sign change"):
            threshold_bisection(lambda q: noisy_ghz_shells(3, q), "ghzN",
                                0.8, 1.0)

    def test_invariant_under_normalization(self):
        def family(q):
            rho = white_noise_mix(w(3), q)
            return DensityMatrix(rho.matrix * 3.7, validate=False)

        p = threshold_bisection(family, "w3", 0.0, 1.0, tol=1e-7)
        assert p == pytest.approx(8 / 17, abs=1e-6)

    def test_sweep_result_fields(self):
        result = sweep_noise_family("ghz-noise", 3, grid_points=11)
        assert result.threshold == pytest.approx(4 / 7, abs=1e-5)
        assert len(result.reports) == 11
        assert result.criterion_id == "ghzN"

    def test_sweep_with_dense_criterion_on_closed_form_family(self):
        # the closed-form family must densify for criteria other than ghzN
        result = sweep_noise_family("ghz-noise", 3, criterion_id="ghz3",
                                    grid_points=5)
        assert result.threshold == pytest.approx(4 / 7, abs=1e-5)
        result = sweep_noise_family("ghz-noise", 3, criterion_id="fullsep-base",
                                    grid_points=5)
        assert result.threshold == pytest.approx(4 / 5, abs=1e-5)


class TestSoundness:
    @pytest.mark.parametrize("cid,n", [
        ("ghz3", 3), ("ghzN", 3), ("w3", 3), ("w4", 4), ("dicke4", 4),
    ])
    def test_biseparable_sweeps(self, cid, n):
        report = soundness_sweep(cid, n, samples=600, seed=66)
        assert report.passed, report.failures[:5]
        assert report.max_margin <= 1e-12

    @pytest.mark.parametrize("cid", ["fullsep-base", "fullsep-suite", "fullsep-w3"])
    def test_fullsep_sweeps(self, cid):
        report = soundness_sweep(cid, 3, samples=600, seed=67)
        assert report.passed

    def test_report_reproducibility(self):
        a = soundness_sweep("ghz3", 3, samples=100, seed=68)
        b = soundness_sweep("ghz3", 3, samples=100, seed=68)
        assert a == b
