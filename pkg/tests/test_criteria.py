import numpy as np
import pytest

from entcrit.criteria import (
    MonomialCriterion,
    SUBSTITUTION_SUITE,
    dicke4_biseparability,
    estimate_offdiagonal,
    evaluate_criterion,
    fullsep_base,
    fullsep_monomial,
    fullsep_w3,
    ghz3_biseparability,
    ghzN_biseparability,
    offdiag_sum,
    substitution_suite,
    w3_biseparability,
    w3_fidelity_form,
    w4_biseparability,
)
from entcrit.families import (
    AcinFamilyParams,
    acin_state,
    dicke,
    ghz,
    noisy_ghz,
    noisy_ghz_shells,
    w,
    white_noise_mix,
)
from entcrit.oracle import (
    random_pure_biseparable,
    random_pure_product,
    threshold_bisection,
)
from entcrit.qstate import (
    Bipartition,
    DensityMatrix,
    EntcritError,
    all_bipartitions,
    flip_qubits,
    permute_qubits,
)

MIXED3 = DensityMatrix(np.eye(8) / 8)
MIXED4 = DensityMatrix(np.eye(16) / 16)


class TestOffdiagSum:
    def test_ghz_target_is_corner_element(self):
        rho = noisy_ghz(3, 0.4)
        assert offdiag_sum(rho, ghz(3)) == pytest.approx(abs(rho.matrix[0, 7]))

    def test_w_target_on_itself(self):
        assert offdiag_sum(w(3).density_matrix(), w(3)) == pytest.approx(1.0)

    def test_vanishes_on_maximally_mixed(self):
        assert offdiag_sum(MIXED3, w(3)) == 0.0


class TestGhz3:
    def test_pure_state(self):
        rep = ghz3_biseparability(ghz(3).density_matrix())
        assert rep.lhs == pytest.approx(0.5)
        assert rep.rhs == pytest.approx(0.0)
        assert rep.violated

    def test_noise_threshold_location(self):
        # detection iff p < 4/7
        assert ghz3_biseparability(noisy_ghz(3, 4 / 7 - 1e-4)).violated
        assert not ghz3_biseparability(noisy_ghz(3, 4 / 7 + 1e-4)).violated

    def test_maximally_mixed(self):
        rep = ghz3_biseparability(MIXED3)
        assert rep.lhs == 0.0 and not rep.violated

    def test_boundary_reports_non_violation(self):
        rep = ghz3_biseparability(noisy_ghz(3, 4 / 7))
        assert not rep.violated
        assert abs(rep.margin) < 1e-12


class TestGhzN:
    def test_matches_ghz3_on_random_states(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
            rho = DensityMatrix(a @ a.conj().T)
            a3 = ghz3_biseparability(rho)
            aN = ghzN_biseparability(rho)
            assert aN.lhs == pytest.approx(a3.lhs)
            assert aN.rhs == pytest.approx(a3.rhs)

    def test_closed_form_matches_dense(self):
        for n in (2, 3, 4):
            for p in (0.2, 0.55, 0.9):
                dense = ghzN_biseparability(noisy_ghz(n, p))
                shells = ghzN_biseparability(noisy_ghz_shells(n, p))
                assert shells.lhs == pytest.approx(dense.lhs)
                assert shells.rhs == pytest.approx(dense.rhs)

    def test_n6_threshold(self):
        p_star = 1 / (2 * (1 - 2 ** -6))
        assert ghzN_biseparability(noisy_ghz_shells(6, p_star - 1e-4)).violated
        assert not ghzN_biseparability(noisy_ghz_shells(6, p_star + 1e-4)).violated


class TestW3:
    def test_pure_state(self):
        rep = w3_biseparability(w(3).density_matrix())
        assert rep.lhs == pytest.approx(1.0)
        assert rep.rhs == pytest.approx(0.5)
        assert rep.violated

    def test_noise_threshold_location(self):
        assert w3_biseparability(white_noise_mix(w(3), 8 / 17 - 1e-4)).violated
        assert not w3_biseparability(white_noise_mix(w(3), 8 / 17 + 1e-4)).violated

    def test_maximally_mixed(self):
        assert not w3_biseparability(MIXED3).violated


class TestW4AndDicke4:
    def test_pure_w4_entries(self):
        # six coherences of 1/4 (direct entry evaluation) against rhs = 1
        rep = w4_biseparability(w(4).density_matrix())
        assert rep.lhs == pytest.approx(6 * 0.25)
        assert rep.rhs == pytest.approx(1.0)
        assert rep.violated

    def test_w4_threshold_location(self):
        assert w4_biseparability(white_noise_mix(w(4), 4 / 9 - 1e-4)).violated
        assert not w4_biseparability(white_noise_mix(w(4), 4 / 9 + 1e-4)).violated

    def test_pure_dicke_entries(self):
        # fifteen coherences of 1/6 against rhs = 3/2
        rep = dicke4_biseparability(dicke(4, 2).density_matrix())
        assert rep.lhs == pytest.approx(15 / 6)
        assert rep.rhs == pytest.approx(1.5)
        assert rep.violated

    def test_dicke_threshold_location(self):
        rho = white_noise_mix(dicke(4, 2), 8 / 21 - 1e-4)
        assert dicke4_biseparability(rho).violated
        rho = white_noise_mix(dicke(4, 2), 8 / 21 + 1e-4)
        assert not dicke4_biseparability(rho).violated

    def test_mixed_not_violated(self):
        assert not w4_biseparability(MIXED4).violated
        assert not dicke4_biseparability(MIXED4).violated

    def test_wrong_qubit_count_rejected(self):
        with pytest.raises(EntcritError):
            w4_biseparability(MIXED3)
        with pytest.raises(EntcritError):
            ghz3_biseparability(MIXED4)


class TestEstimateOffdiagonal:
    def test_sqrt_form_across_cut(self):
        # weight-1 pair split by any cut separating the differing qubits
        bound = estimate_offdiagonal((0, 0, 0, 1), (0, 0, 1, 0),
                                     Bipartition.from_label("ABC|D"))
        assert bound.kind == "sqrt"
        assert set(bound.indices) == {(0, 0, 0, 0), (0, 0, 1, 1)}

    def test_internal_when_on_one_side(self):
        # same pair under AB|CD differs only inside CD
        bound = estimate_offdiagonal((0, 0, 0, 1), (0, 0, 1, 0),
                                     Bipartition.from_label("AB|CD"))
        assert bound.kind == "internal"
        assert set(bound.indices) == {(0, 0, 0, 1), (0, 0, 1, 0)}

    def test_three_qubit_internal_pair(self):
        bound = estimate_offdiagonal((0, 0, 1), (0, 1, 0),
                                     Bipartition.from_label("A|BC"))
        assert bound.kind == "internal"
        rho = noisy_ghz(3, 0.5)
        assert bound.evaluate(rho) == pytest.approx(
            (rho.matrix[1, 1].real + rho.matrix[2, 2].real) / 2)

    def test_ghz_corner_pair(self):
        bound = estimate_offdiagonal((0, 0, 0), (1, 1, 1),
                                     Bipartition.from_label("A|BC"))
        assert bound.kind == "sqrt"
        assert set(bound.indices) == {(0, 1, 1), (1, 0, 0)}


class TestFullSeparability:
    def test_base_threshold_location(self):
        assert fullsep_base(noisy_ghz(3, 4 / 5 - 1e-4)).violated
        assert not fullsep_base(noisy_ghz(3, 4 / 5 + 1e-4)).violated

    def test_base_threshold_bisection(self):
        p = threshold_bisection(lambda q: noisy_ghz(3, q), "fullsep-base",
                                0.0, 1.0, tol=1e-8)
        assert p == pytest.approx(0.8, abs=1e-6)

    def test_equality_on_pure_products(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            rho = random_pure_product(3, rng).density_matrix()
            rep = fullsep_base(rho)
            assert abs(rep.margin) < 1e-10
            for crit in SUBSTITUTION_SUITE:
                assert abs(fullsep_monomial(rho, crit).margin) < 1e-10

    def test_acin_base_equality(self):
        rep = fullsep_base(acin_state(AcinFamilyParams(2, 2, 1)))
        assert rep.margin == pytest.approx(0.0, abs=1e-12)

    def test_acin_detected_by_substitution(self):
        rho = acin_state(AcinFamilyParams(2, 2, 1))
        rep = evaluate_criterion("fullsep-base", rho)
        assert not rep.violated
        sub = SUBSTITUTION_SUITE[1]
        rep = fullsep_monomial(rho, sub)
        assert rep.rhs == pytest.approx(0.25 ** (1 / 6))
        assert rep.violated

    def test_suite_covers_both_sides(self):
        # lambda2 * lambda3 above and below lambda4
        for params in (AcinFamilyParams(2, 2, 1), AcinFamilyParams(0.5, 0.5, 2)):
            assert substitution_suite(acin_state(params)).any_violated

    def test_separable_member_not_flagged(self):
        suite = substitution_suite(acin_state(AcinFamilyParams(1, 1, 1)))
        assert not suite.any_violated

    def test_quartic_form(self):
        quartic = SUBSTITUTION_SUITE[-1]
        assert quartic.root == 4
        rho = noisy_ghz(3, 0.4)
        d = rho.diagonal()
        expect = (d[1] * d[2] * d[4] * d[7]) ** 0.25
        assert fullsep_monomial(rho, quartic).rhs == pytest.approx(expect)

    def test_unbalanced_monomial_rejected(self):
        with pytest.raises(EntcritError, match="unbalanced"):
            MonomialCriterion("bad", 3, (((0, 0, 1), 1), ((0, 1, 0), 1)))

    def test_fullsep_w3_pure(self):
        rep = fullsep_w3(w(3).density_matrix())
        assert rep.lhs == pytest.approx(1.0)
        assert rep.rhs == pytest.approx(0.0)
        assert rep.violated

    def test_fullsep_w3_threshold(self):
        # closed form: lhs = 1 - p, rhs = 3p/8 -> p* = 8/11
        p = threshold_bisection(lambda q: white_noise_mix(w(3), q),
                                "fullsep-w3", 0.0, 1.0, tol=1e-8)
        assert p == pytest.approx(8 / 11, abs=1e-6)

    def test_fullsep_w3_mixed(self):
        assert not fullsep_w3(MIXED3).violated


class TestFidelityForm:
    def test_pure_w(self):
        diag = [0, 1 / 3, 1 / 3, 0, 1 / 3, 0, 0, 0]
        rep = w3_fidelity_form(1.0, diag)
        assert rep.rhs == pytest.approx(2 / 3)
        assert rep.violated

    def test_noisy_boundary(self):
        p = 8 / 17
        f = (1 - p) + p / 8
        diag = [p / 8] * 8
        for idx in (1, 2, 4):
            diag[idx] += (1 - p) / 3
        rep = w3_fidelity_form(f, diag)
        assert rep.lhs == pytest.approx(10 / 17)
        assert rep.rhs == pytest.approx(10 / 17)
        assert not rep.violated

    def test_uniform_half(self):
        rep = w3_fidelity_form(0.5, [1 / 8] * 8)
        assert rep.rhs == pytest.approx(0.5)
        assert not rep.violated

    def test_zero_fidelity_never_violates(self):
        rep = w3_fidelity_form(0.0, [1 / 8] * 8)
        assert not rep.violated

    def test_invalid_fidelity(self):
        with pytest.raises(EntcritError):
            w3_fidelity_form(1.2, [1 / 8] * 8)

    def test_registry_form_from_density_matrix(self):
        rep = evaluate_criterion("w3-fidelity", white_noise_mix(w(3), 0.4))
        assert rep.violated
        rep = evaluate_criterion("w3-fidelity", white_noise_mix(w(3), 0.5))
        assert not rep.violated
        rep = evaluate_criterion("w3-fidelity", MIXED3)
        assert not rep.violated


class TestInvariances:
    def test_normalization_invariance(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        rho = DensityMatrix(a @ a.conj().T)
        for cid in ("ghz3", "w3", "fullsep-base", "fullsep-w3", "fullsep-suite"):
            base = evaluate_criterion(cid, rho)
            scaled = evaluate_criterion(
                cid, DensityMatrix(rho.matrix * 41.7, validate=False))
            assert scaled.violated == base.violated
            assert scaled.margin == pytest.approx(41.7 * base.margin, rel=1e-9)

    def test_biseparable_equality_identity(self):
        # for a pure A|BC-biseparable state the corner element equals
        # sqrt(rho44 rho55) exactly
        rng = np.random.default_rng(14)
        for _ in range(100):
            rho = random_pure_biseparable(
                3, Bipartition(3, (0,)), rng).density_matrix()
            m = rho.matrix
            assert abs(m[0, 7]) == pytest.approx(
                np.sqrt(m[3, 3].real * m[4, 4].real), abs=1e-12)

    def test_local_relabeling_covariance(self):
        # the best margin over all qubit permutations and bit flips is
        # invariant when the state itself is relabeled
        rng = np.random.default_rng(15)
        from itertools import permutations, product

        def best_margin(rho):
            best = -np.inf
            for perm in permutations(range(3)):
                for mask in product((0, 1), repeat=3):
                    t = flip_qubits(permute_qubits(rho, perm), mask)
                    best = max(best, ghz3_biseparability(t).margin)
            return best

        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        rho = DensityMatrix(a @ a.conj().T)
        rho = DensityMatrix(rho.matrix / rho.trace)
        transformed = flip_qubits(permute_qubits(rho, (2, 0, 1)), (0, 1, 1))
        assert best_margin(transformed) == pytest.approx(best_margin(rho))

    def test_soundness_small_samples(self):
        rng = np.random.default_rng(16)
        cuts = all_bipartitions(3)
        worst = -np.inf
        for i in range(300):
            cut = cuts[i % 3]
            rho = random_pure_biseparable(3, cut, rng).density_matrix()
            worst = max(worst, ghz3_biseparability(rho).margin,
                        w3_biseparability(rho).margin)
        assert worst <= 1e-12
