import numpy as np
import pytest

from hybridqkd import (
    InsufficientCoefficientsError,
    invariant_state,
    lambda_coeffs,
    op_M,
    op_R,
    schwinger_total,
    sector_basis,
)

L0 = 0.36787944117144233
L1 = 0.7357588823428847


def test_sector_basis_ordering():
    assert sector_basis(0) == [(0, 0)]
    assert sector_basis(2) == [(2, 0), (1, 1), (0, 2)]


class TestOpR:
    def test_vacuum_r1_h(self, tau1):
        op = op_R(tau1, 0, "R1", "H")
        np.testing.assert_allclose(op.diag, [L0], atol=1e-15)

    def test_completeness(self, tau1):
        for j in range(6):
            for mode in ("H", "V"):
                total = op_R(tau1, j, "R0", mode).diag + op_R(tau1, j, "R1", mode).diag
                np.testing.assert_array_equal(total, np.ones(j + 1))

    def test_one_photon_v_mode(self, tau1):
        # basis ((1,0), (0,1)): the V mode holds 0 then 1 photons
        op = op_R(tau1, 1, "R1", "V")
        np.testing.assert_allclose(op.diag, [L0, L1], atol=1e-15)

    def test_one_photon_h_mode(self, tau1):
        op = op_R(tau1, 1, "R1", "H")
        np.testing.assert_allclose(op.diag, [L1, L0], atol=1e-15)

    def test_insufficient_coefficients(self):
        short = lambda_coeffs(1.0, 2)
        with pytest.raises(InsufficientCoefficientsError):
            op_R(short, 3, "R1", "H")

    def test_matrix_is_diagonal(self, tau1):
        m = op_R(tau1, 2, "R0", "H").matrix
        assert np.count_nonzero(m - np.diag(np.diag(m))) == 0


class TestOpM:
    def test_vacuum(self, tau1):
        mh = op_M(tau1, 0, "MH")
        mv = op_M(tau1, 0, "MV")
        ref = 0.23254415793482963  # lambda_0 (1 - lambda_0)
        np.testing.assert_allclose(mh.diag, [ref], atol=1e-15)
        np.testing.assert_allclose(mv.diag, [ref], atol=1e-15)

    def test_one_photon(self, tau1):
        mh = op_M(tau1, 1, "MH").diag
        np.testing.assert_allclose(
            mh, [L1 * (1 - L0), L0 * (1 - L1)], atol=1e-15
        )
        assert mh[0] == pytest.approx(0.4651, abs=1e-4)
        assert mh[1] == pytest.approx(0.0972, abs=1e-4)

    def test_hv_relabelling_symmetry(self, tau1):
        for j in range(6):
            mh = op_M(tau1, j, "MH").diag
            mv = op_M(tau1, j, "MV").diag
            np.testing.assert_array_equal(mh, mv[::-1])

    def test_entries_in_unit_interval(self, tau1):
        for j in range(8):
            mh = op_M(tau1, j, "MH").diag
            mv = op_M(tau1, j, "MV").diag
            assert np.all(mh >= 0) and np.all(mv >= 0)
            assert np.all(mh + mv <= 1.0)

    def test_gain_operator_range_at_tau_one(self, tau1):
        # spectrum of M_H + M_V stays inside [0, 1 - lambda_0]
        top = 1.0 - tau1.lam[0]
        for j in range(9):
            s = op_M(tau1, j, "MH").diag + op_M(tau1, j, "MV").diag
            assert np.all(s >= 0.0) and np.all(s <= top + 1e-15)


class TestSchwinger:
    def test_vacuum_z(self):
        np.testing.assert_array_equal(
            schwinger_total(0, "z"), np.diag([0.5, -0.5])
        )

    def test_one_photon_z(self):
        np.testing.assert_array_equal(
            schwinger_total(1, "z"), np.diag([0.0, 1.0, -1.0, 0.0])
        )

    def test_plus_strictly_off_diagonal(self):
        for j in range(6):
            p = schwinger_total(j, "plus")
            assert np.all(np.diag(p) == 0.0)

    def test_plus_annihilates_invariant_state(self):
        p = schwinger_total(1, "plus")
        rho = invariant_state(1, 0.37).rho
        assert np.max(np.abs(p @ rho - rho @ p)) < 1e-15

    def test_bad_component(self):
        with pytest.raises(ValueError):
            schwinger_total(1, "minus")
