import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from kicked_ising import oracle
from kicked_ising.errors import ResourceLimitError
from kicked_ising.floquet import (CouplingSpec, deviation, diagonal_blocks,
                                  dq_table, evolved_diagonal, gcd_dq,
                                  general_tau_blocks, identity_deviation,
                                  minimal_period_scan, predicted_period,
                                  sector_dims, unitarity_defect)
from kicked_ising.states import ParityState, from_parity

SQRT5_3 = CouplingSpec.surd(1, 5, 3)


class TestDqTable:
    def test_small_n_tables(self):
        assert dq_table(6, "plus").values.tolist() == [15, 5, -1, -3]
        assert dq_table(8, "plus").values.tolist() == [28, 14, 4, -2, -4]
        assert dq_table(9, "plus").values.tolist() == [36, 20, 8, 0, -4]

    def test_minus_sector_is_prefix(self):
        assert dq_table(6, "minus").values.tolist() == [15, 5, -1]
        assert dq_table(9, "minus").values.tolist() == [36, 20, 8, 0, -4]

    def test_gcd_cases(self):
        assert gcd_dq(6) == 1    # N = 4m + 2
        assert gcd_dq(8) == 2    # N = 4m + 4
        assert gcd_dq(9) == 4    # N = 8m + 1
        assert gcd_dq(5) == 2    # N = 8m + 5
        assert gcd_dq(7) == 1    # N = 4m + 3

    @pytest.mark.parametrize("n", list(range(2, 400)) + [998, 1001, 2000])
    def test_gcd_pattern_over_range(self, n):
        # the case analysis asserted for the period rule, checked directly
        g = gcd_dq(n)
        if n % 4 == 2:
            assert g == 1
        elif n % 4 == 0:
            assert g == 2
        elif n % 8 in (3, 7):
            assert g == 1
        elif n % 8 == 5:
            assert g == 2
        else:
            assert g == 4


class TestDiagonalBlocks:
    def test_two_qubit_closed_form(self):
        b = diagonal_blocks(2, CouplingSpec.rational(1, 1), 1)
        assert np.abs(b.diagonal_entries("plus") - np.array([1j, -1j])).max() < 1e-15
        assert np.abs(b.diagonal_entries("minus") - np.array([-1j])).max() < 1e-15

    def test_unit_modulus(self):
        for j in (CouplingSpec.rational(7, 20), SQRT5_3, CouplingSpec.real(0.7313)):
            b = diagonal_blocks(11, j, 3)
            for sector in ("plus", "minus"):
                assert np.abs(np.abs(b.diagonal_entries(sector)) - 1.0).max() < 1e-14

    def test_rational_phases_on_lattice(self):
        h = 7
        b = diagonal_blocks(4, CouplingSpec.rational(3, h), 1)
        for sector in ("plus", "minus"):
            steps = b.phases(sector) * (2 * h) / np.pi
            assert np.abs(steps - np.round(steps)).max() < 1e-10

    def test_irrational_phases_match_extended_precision(self):
        b = diagonal_blocks(10, SQRT5_3, 1)
        with mp.workdps(50):
            jmp = mp.sqrt(5) / 3
            for sector in ("plus", "minus"):
                dq = dq_table(10, sector).values
                pre = {"plus": -10, "minus": -8}[sector]
                for q, d in enumerate(dq):
                    ref = mp.fmod(mp.mpf(pre) * mp.pi / 2 - jmp * mp.pi / 2 * int(d),
                                  2 * mp.pi)
                    if ref < 0:
                        ref += 2 * mp.pi
                    got = b.phases(sector)[q]
                    assert abs(got - float(ref)) < 1e-13

    def test_phase_reduction_at_half_million(self):
        # sampled q against a 50-digit recomputation
        n = 500000
        b = diagonal_blocks(n, SQRT5_3, 1)
        phases = b.phases("plus")
        dq = dq_table(n, "plus").values
        with mp.workdps(50):
            jmp = mp.sqrt(5) / 3
            for q in (0, 1, 17, 12345, 99999, 249999, 250000):
                ref = mp.fmod(mp.mpf(-n) * mp.pi / 2 - jmp * mp.pi / 2 * int(dq[q]),
                              2 * mp.pi)
                if ref < 0:
                    ref += 2 * mp.pi
                diff = abs(phases[q] - float(ref))
                diff = min(diff, 2 * np.pi - diff)
                assert diff < 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            diagonal_blocks(0, SQRT5_3, 1)
        with pytest.raises(ValueError):
            diagonal_blocks(4, SQRT5_3, 0)


class TestOracleConvention:
    """The sector prefactors pinned against the 2^N propagator."""

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_parity_vectors_are_eigenvectors(self, n, m):
        j = 0.7313
        tau = m * np.pi / 2
        blocks = diagonal_blocks(n, CouplingSpec.real(j), m)
        dims = sector_dims(n)
        for sector, dim in zip(("plus", "minus"), dims):
            lam = blocks.diagonal_entries(sector)
            for q in range(dim):
                coeff = np.zeros(dim, dtype=complex)
                coeff[q] = 1.0
                if sector == "plus":
                    ps = ParityState(n, coeff, np.zeros(dims[1], dtype=complex))
                else:
                    ps = ParityState(n, np.zeros(dims[0], dtype=complex), coeff)
                full = oracle.embed_symmetric(from_parity(ps)).amplitudes
                evolved = oracle.ising_phases(n, j, tau) * oracle.apply_kick(full, n, tau)
                assert np.abs(evolved - lam[q] * full).max() < 5e-14

    def test_odd_n_prefactor_assignment(self):
        # for odd N the plus-sector prefactor is (-i)^N = i^(N-2), not i^N
        n = 3
        b = diagonal_blocks(n, CouplingSpec.rational(1, 1), 1)
        d0 = dq_table(n, "plus").values[0]
        f0 = np.exp(-1j * np.pi / 2 * d0)
        assert abs(b.diagonal_entries("plus")[0] - (-1j) ** n * f0) < 1e-14
        assert abs(b.diagonal_entries("plus")[0] - (1j) ** n * f0) > 1.0


class TestEvolvedDiagonal:
    def test_zero_kicks_is_identity(self):
        b = diagonal_blocks(9, SQRT5_3, 1)
        b0 = evolved_diagonal(b, 0)
        for sector in ("plus", "minus"):
            assert np.abs(b0.diagonal_entries(sector) - 1.0).max() == 0.0

    def test_fourth_power_n2(self):
        b = diagonal_blocks(2, CouplingSpec.rational(1, 1), 1)
        b4 = evolved_diagonal(b, 4)
        assert np.abs(b4.diagonal_entries("plus") - 1.0).max() < 1e-15

    def test_period_case_one(self):
        # N = 4m + 2 with h = 3: U^(4h) = I
        b = diagonal_blocks(6, CouplingSpec.rational(1, 3), 1)
        assert identity_deviation(b, 12) < 1e-12

    def test_dense_blocks_cannot_be_powered(self):
        dense = general_tau_blocks(4, SQRT5_3, 0.3)
        with pytest.raises(ValueError):
            evolved_diagonal(dense, 2)


class TestDeviation:
    def test_one_kick_is_zero(self):
        b = diagonal_blocks(7, SQRT5_3, 1)
        assert deviation(b, 1) == 0.0

    def test_periodic_return(self):
        b = diagonal_blocks(6, CouplingSpec.rational(1, 3), 1)
        assert deviation(b, 13) < 1e-11

    def test_irrational_never_recurs(self):
        b = diagonal_blocks(50, SQRT5_3, 1)
        smallest = min(deviation(b, n) for n in range(2, 10001))
        assert smallest > 0.1


class TestPredictedPeriod:
    def test_reference_cases(self):
        assert predicted_period(6, 1, 3) == 12
        assert predicted_period(8, 1, 3) == 6
        assert predicted_period(9, 1, 4) == 4

    def test_rejects_unreduced_fraction(self):
        with pytest.raises(ValueError):
            predicted_period(6, 2, 4)

    @pytest.mark.parametrize("n", range(4, 41))
    def test_matches_exhaustive_scan(self, n):
        for r, h in ((1, 3), (3, 4), (2, 5), (5, 6), (1, 6), (4, 7)):
            period = predicted_period(n, r, h)
            blocks = diagonal_blocks(n, CouplingSpec.rational(r, h), 1)
            assert minimal_period_scan(blocks, 2 * period) == period

    def test_odd_case_two_scan_verified(self):
        # N = 8m+5: 4h for odd h, 2h for h = 0 mod 4, and h for h = 2 mod 4
        # (for h = 2 mod 4 the kick prefactor and the Ising lattice hit -1
        # together, shortening the naive factor-period LCM)
        for h, expect in ((3, 12), (5, 20), (4, 8), (8, 16), (2, 2), (6, 6)):
            assert predicted_period(5, 1, h) == expect
            blocks = diagonal_blocks(5, CouplingSpec.rational(1, h), 1)
            assert minimal_period_scan(blocks, 2 * expect) == expect

    def test_even_r_shortens_period(self):
        # J = 2/3 at N = 6: the joint gcd gains a factor 2 over the r = 1 case
        assert predicted_period(6, 2, 3) == 6
        blocks = diagonal_blocks(6, CouplingSpec.rational(2, 3), 1)
        assert minimal_period_scan(blocks, 24) == 6


class TestGeneralTauBlocks:
    def test_matches_diagonal_at_quarter_period(self):
        for n in (5, 6):
            j = CouplingSpec.rational(1, 3)
            dense = general_tau_blocks(n, j, np.pi / 2)
            diag = diagonal_blocks(n, j, 1)
            for sector in ("plus", "minus"):
                got = dense.matrix(sector)
                want = np.diag(diag.diagonal_entries(sector))
                assert np.abs(got - want).max() < 1e-10

    @pytest.mark.parametrize("tau", [0.31, 1.0, 2.4])
    @pytest.mark.parametrize("n", [3, 4, 7, 10])
    def test_matches_full_propagator(self, n, tau):
        j = 0.62
        dense = general_tau_blocks(n, CouplingSpec.real(j), tau)
        dims = sector_dims(n)
        u = oracle.full_floquet(n, j, tau)
        for sector, dim in zip(("plus", "minus"), dims):
            basis = []
            for q in range(dim):
                coeff = np.zeros(dim, dtype=complex)
                coeff[q] = 1.0
                if sector == "plus":
                    ps = ParityState(n, coeff, np.zeros(dims[1], dtype=complex))
                else:
                    ps = ParityState(n, np.zeros(dims[0], dtype=complex), coeff)
                basis.append(oracle.embed_symmetric(from_parity(ps)).amplitudes)
            basis = np.array(basis).T
            projected = basis.conj().T @ u @ basis
            assert np.abs(projected - dense.matrix(sector)).max() < 1e-10

    def test_identity_at_zero(self):
        dense = general_tau_blocks(5, CouplingSpec.rational(0, 1), 0.0)
        for sector in ("plus", "minus"):
            dim = dense.matrix(sector).shape[0]
            assert np.abs(dense.matrix(sector) - np.eye(dim)).max() < 1e-14

    def test_unitarity(self):
        dense = general_tau_blocks(40, SQRT5_3, 1.234)
        for sector in ("plus", "minus"):
            assert unitarity_defect(dense.matrix(sector)) < 1e-11

    def test_memory_guard(self):
        with pytest.raises(ResourceLimitError):
            general_tau_blocks(100, SQRT5_3, 0.3, max_dense=64)


class TestCouplingSpec:
    def test_rational_reduction(self):
        j = CouplingSpec.rational(4, 6)
        assert (j.r, j.h) == (2, 3)

    def test_surd_value(self):
        assert SQRT5_3.value() == pytest.approx(np.sqrt(5) / 3, rel=1e-15)
        hi, lo = SQRT5_3.dd()
        with mp.workdps(40):
            assert abs(mp.mpf(hi) + lo - mp.sqrt(5) / 3) < mp.mpf("1e-31")

    def test_labels(self):
        assert CouplingSpec.rational(7, 20).label() == "7/20"
        assert SQRT5_3.label() == "sqrt(5)/3"

    def test_perturbed_uses_decimal_literal(self):
        j = CouplingSpec.perturbed_rational(21, 37, 1e-5)
        with mp.workdps(40):
            want = mp.mpf(21) / 37 + mp.mpf("1e-5")
            hi, lo = j.dd()
            assert abs(mp.mpf(hi) + lo - want) < mp.mpf("1e-30")


class TestDegeneracyCount:
    @pytest.mark.parametrize("n", [100, 1000, 10000])
    def test_rational_distinct_count_bounded(self, n):
        h = 12
        b = diagonal_blocks(n, CouplingSpec.rational(5, h), 1)
        for sector in ("plus", "minus"):
            res, _ = b.lattice_residues(sector)
            assert len(np.unique(np.asarray(res, dtype=np.int64))) <= 4 * h
