import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import number_moments_from_vector
from tritter_qcrb import cfpoly, focksim
from tritter_qcrb.errors import NumericalError
from tritter_qcrb.moments import (
    MomentSet,
    covariance,
    g2_inter,
    g2_intra,
    max_rel_discrepancy,
    vacuum_moments,
    variance,
)
from tritter_qcrb.scenario import Scenario

# regression fixtures measured with the Fock-space oracle at rel_tol 1e-12
W2_R0_G2_INTRA = 0.5
W2_R05_G2_INTRA = 1.9006689093095022
W2_R05_G2_INTER = 0.7777947428088322


def fock_moments(n0, n1, n2):
    return focksim.measure_moments(focksim.make_fock_state(n0, n1, n2, max(n0, n1, n2) + 1))


def w1_after_tritter():
    return cfpoly.pipeline_moments(Scenario("w_state", 1))


class TestVariance:
    def test_vacuum(self):
        assert variance(vacuum_moments(), 0) == 0

    def test_w1_after_tritter(self):
        assert variance(w1_after_tritter(), 0) == pytest.approx(2 / 9, abs=1e-12)

    def test_number_eigenstate(self):
        assert variance(fock_moments(2, 0, 0), 0) == 0


class TestCovariance:
    def test_product_state(self):
        assert covariance(fock_moments(2, 1, 3), 0, 1) == 0

    def test_w1_after_tritter(self):
        assert covariance(w1_after_tritter(), 0, 1) == pytest.approx(-1 / 9, abs=1e-12)

    def test_same_mode_rejected(self):
        with pytest.raises(ValueError):
            covariance(vacuum_moments(), 1, 1)

    def test_against_dense_vector(self, w1_vector):
        mean, second = number_moments_from_vector(w1_vector)
        ms = focksim.measure_moments(focksim.make_w_state(1, 2))
        assert covariance(ms, 0, 2) == pytest.approx(second[0][2] - mean[0] * mean[2])


class TestG2:
    def test_single_photon_intra(self):
        assert g2_intra(fock_moments(1, 0, 0), 0) == 0

    def test_poissonian(self):
        # coherent state with mean m: <n^2> = m^2 + m, <a^dag^2 a^2> = m^2
        m = 2.5
        ms = MomentSet((m, m, m), (m * m + m,) * 3, (m * m,) * 3, (m * m,) * 3)
        assert g2_intra(ms, 0) == pytest.approx(1)
        assert g2_inter(ms, 0, 1) == pytest.approx(1)

    def test_w2_regression(self):
        assert g2_intra(cfpoly.pipeline_moments(Scenario("w_state", 2)), 0) == pytest.approx(W2_R0_G2_INTRA, rel=1e-9)

    def test_product_inter(self):
        assert g2_inter(fock_moments(1, 1, 0), 0, 1) == 1

    def test_w1_inter(self):
        assert g2_inter(w1_after_tritter(), 0, 1) == pytest.approx(0, abs=1e-12)

    def test_w2_r05_regression(self):
        ms = cfpoly.pipeline_moments(Scenario("w_state", 2, (0.5, 0.5, 0.5)))
        assert g2_intra(ms, 0) == pytest.approx(W2_R05_G2_INTRA, rel=1e-9)
        assert g2_inter(ms, 0, 1) == pytest.approx(W2_R05_G2_INTER, rel=1e-9)

    def test_empty_mode(self):
        with pytest.raises(NumericalError, match="undefined correlation"):
            g2_intra(vacuum_moments(), 2)
        with pytest.raises(NumericalError, match="undefined correlation"):
            g2_inter(fock_moments(1, 0, 0), 0, 1)


class TestMomentSet:
    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=12, max_size=12))
    def test_array_roundtrip(self, values):
        assert MomentSet.from_array(values).as_array().tolist() == values

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            MomentSet.from_array(range(11))

    def test_cross_moment_symmetry(self):
        ms = cfpoly.pipeline_moments(Scenario("w_state", 3, (0.2, 0.1, 0.0)))
        assert ms.cross_moment(2, 0) == ms.cross_moment(0, 2)
        assert ms.cross_moment(1, 1) == ms.second[1]

    @pytest.mark.parametrize("probe", ["w_state", "separable_fock"])
    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_physical_sets_have_no_violations(self, probe, n):
        assert cfpoly.pipeline_moments(Scenario(probe, n, (0.4, 0.1, 0.3))).violations() == []

    def test_violations_detected(self):
        bad = MomentSet((1, 0, 0), (0.5, 0, 0), (0, 0, 0), (0, 0, 0))
        assert "variance[0] negative" in bad.violations()


class TestDiscrepancy:
    def test_identical(self):
        ms = w1_after_tritter()
        assert max_rel_discrepancy(ms, ms) == 0

    def test_relative(self):
        a = MomentSet((1, 2, 3), (4, 5, 6), (1, 1, 1), (1, 1, 1))
        b = MomentSet.from_array(a.as_array() * np.r_[[1.0] * 11, 1.01])
        assert max_rel_discrepancy(a, b) == pytest.approx(0.01 / 1.01)

    def test_floor_suppresses_roundoff_on_zero_entries(self):
        a = vacuum_moments()
        b = MomentSet.from_array([1e-17] + [0.0] * 11)
        assert max_rel_discrepancy(a, b) < 1e-10
