import numpy as np
import pytest

from kicked_ising import oracle
from kicked_ising.eigenstates import (EigenstateEnsemble, average_ee_ratio,
                                      closed_form_pair_entropy, floquet_eigenstates,
                                      scaling_series, _split_singular_values)
from kicked_ising.floquet import CouplingSpec, general_tau_blocks
from kicked_ising.states import (CoherentParams, bipartite_schmidt, coherent_dicke,
                                 pair_phases, schmidt_weight_matrix, SymmetricState)

SQRT5_3 = CouplingSpec.surd(1, 5, 3)


class TestPerturbedJPath:
    def test_eigenvectors_are_parity_pairs(self):
        ens = floquet_eigenstates(10, CouplingSpec.rational(1, 3), 1, ("J", 1e-10))
        assert ens.source == "diagonal_basis"
        assert len(ens) == 11
        for i in range(len(ens)):
            c = ens.amplitudes[i]
            nz = np.flatnonzero(np.abs(c) > 1e-14)
            assert len(nz) in (1, 2)
            if len(nz) == 2:
                assert np.abs(np.abs(c[nz]) - 1 / np.sqrt(2)).max() < 1e-14

    def test_ratio_matches_closed_form_n12(self):
        n = 12
        ens = floquet_eigenstates(n, CouplingSpec.rational(1, 3), 1, ("J", 1e-10))
        point = average_ee_ratio(ens)
        qs = list(range(n // 2)) + [n // 2] + list(range(n // 2))  # plus then minus pairs
        plus_qs = list(range(n // 2 + 1))
        minus_qs = list(range(n // 2))
        expect = np.mean([closed_form_pair_entropy(n, q, n // 2)
                          for q in plus_qs + minus_qs])
        assert point.ratio == pytest.approx(expect / np.log2(n // 2 + 1), abs=1e-12)

    def test_degenerate_flag_warns(self):
        with pytest.warns(UserWarning):
            ens = floquet_eigenstates(8, CouplingSpec.rational(1, 3), 1, ("J", 0.0))
        assert ens.degenerate
        with pytest.warns(UserWarning):
            average_ee_ratio(ens)

    def test_schmidt_spectrum_phase_independent(self):
        # (|w_q> + e^{ia}|w_{N-q}>)/sqrt2 has the same weights for any a
        n, q, n_a = 10, 2, 5
        base = None
        for alpha in (0.0, 0.7, 2.9):
            c = np.zeros(n + 1, dtype=complex)
            c[q] = 1 / np.sqrt(2)
            c[n - q] = np.exp(1j * alpha) / np.sqrt(2)
            lam = np.sort(bipartite_schmidt(SymmetricState(n, c), n_a).values)
            base = lam if base is None else base
            assert np.abs(lam - base).max() < 1e-14


class TestPerturbedTauPath:
    def test_matches_full_space_eigenvectors(self):
        n, delta = 8, 1e-10
        ens = floquet_eigenstates(n, SQRT5_3, 1, ("tau", delta))
        assert ens.source == "dense_diagonalization"
        assert ens.max_residual < 1e-9
        u = oracle.full_floquet(n, float(np.sqrt(5) / 3), np.pi / 2 + delta)
        for i in range(len(ens)):
            full = oracle.embed_symmetric(ens.state(i)).amplitudes
            lam = np.vdot(full, u @ full)
            assert np.linalg.norm(u @ full - lam * full) < 1e-8
            assert abs(abs(lam) - 1.0) < 1e-9

    def test_orthonormal_within_sector(self):
        ens = floquet_eigenstates(16, SQRT5_3, 1, ("tau", 1e-10))
        plus = ens.amplitudes[ens.sectors > 0]
        g = plus @ plus.conj().T
        assert np.abs(g - np.eye(len(plus))).max() < 1e-9

    def test_guard_on_delta(self):
        with pytest.raises(ValueError):
            floquet_eigenstates(8, SQRT5_3, 1, ("tau", 1e-3))
        with pytest.raises(ValueError):
            floquet_eigenstates(8, SQRT5_3, 1, ("xi", 1e-10))


class TestSplitSchmidt:
    @pytest.mark.parametrize("n", [8, 12, 16, 20, 24, 36])
    def test_fast_path_matches_plain_svd(self, n):
        from kicked_ising.eigenstates import _SplitPlan, _entropy_from_lam

        ens = floquet_eigenstates(n, SQRT5_3, 1, ("tau", 1e-10))
        n_a = n // 2
        weights = schmidt_weight_matrix(n, n_a)
        plan = _SplitPlan(n, n_a, weights)
        sidx = np.add.outer(np.arange(n_a + 1), np.arange(n - n_a + 1))
        for i in range(len(ens)):
            c = ens.amplitudes[i]
            plain = np.sort(np.linalg.svd(c[sidx] * weights, compute_uv=False))
            fast = np.sort(_split_singular_values(c, n, n_a,
                                                  int(ens.sectors[i]), weights))
            # Gram squaring blurs singular values below ~sqrt(eps)
            assert np.abs(plain - fast).max() < 1e-7
            s_plain = _entropy_from_lam(plain**2)
            s_fast = _entropy_from_lam(np.clip(
                plan.schmidt_eigvals(c, int(ens.sectors[i])), 0.0, None))
            assert abs(s_plain - s_fast) < 1e-12

    def test_entropy_bound_respected(self):
        ens = floquet_eigenstates(12, CouplingSpec.rational(1, 2), 1, ("tau", 1e-10))
        point = average_ee_ratio(ens)
        assert point.ratio <= 1.0 + 1e-9
        assert point.mean_entropy <= np.log2(12 // 2 + 1) + 1e-9


class TestAverageRatio:
    def test_product_ensemble_has_zero_ratio(self):
        n = 10
        amps = np.array([coherent_dicke(CoherentParams(t, p), n).coeffs
                         for t, p in ((0.3, 0.1), (1.2, -2.0), (2.4, 0.9))])
        ens = EigenstateEnsemble(n, amps, np.array([1, 1, 1]), "synthetic",
                                 ("J", 1e-10))
        point = average_ee_ratio(ens)
        assert point.ratio < 1e-9

    def test_sector_means_reported(self):
        ens = floquet_eigenstates(16, SQRT5_3, 1, ("tau", 1e-10))
        point = average_ee_ratio(ens)
        pooled = (point.ratio_plus * 9 + point.ratio_minus * 8) / 17
        assert point.ratio == pytest.approx(pooled, abs=1e-12)

    def test_ratio_below_one_and_decreasing(self):
        ratios = [average_ee_ratio(floquet_eigenstates(n, SQRT5_3, 1,
                                                       ("tau", 1e-10))).ratio
                  for n in (8, 16, 32, 64)]
        assert all(r < 0.9 for r in ratios)
        assert all(b <= a + 1e-3 for a, b in zip(ratios, ratios[1:]))


class TestScalingSeries:
    def test_constant_synthetic_fit(self):
        # the fit itself: equal ratios give slope 0 and intercept = ratio
        x = np.array([1 / np.log2(n // 2 + 1) for n in (8, 16, 32, 64)])
        y = np.full(4, 0.42)
        slope, intercept = np.polyfit(x, y, 1)
        assert abs(slope) < 1e-12
        assert intercept == pytest.approx(0.42, abs=1e-12)

    def test_perturbed_tau_series(self):
        points, fit = scaling_series([8, 16, 32, 64], CouplingSpec.rational(1, 1),
                                     1, ("tau", 1e-10))
        assert 0.0 < fit["intercept"] < 1.0
        assert [p.n_qubits for p in points] == [8, 16, 32, 64]

    def test_needs_four_sizes(self):
        with pytest.raises(ValueError):
            scaling_series([8, 16], SQRT5_3, 1, ("tau", 1e-10))
