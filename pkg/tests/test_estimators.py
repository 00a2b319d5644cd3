"""Estimator-style precoder wrappers."""

import numpy as np
import pytest
from sklearn.base import clone

from ciblp import (
    CiBlockPrecoder,
    CiSlotPrecoder,
    PskConstellation,
    RegularizedZFPrecoder,
    ZeroForcingPrecoder,
    rayleigh_channel,
    rzf_precoder,
    zf_precoder,
)


@pytest.fixture
def instance():
    rng = np.random.default_rng(0)
    con = PskConstellation(8)
    channel = rayleigh_channel(rng, 2, 3)
    symbols = con.points[rng.integers(0, 8, (6, 2))]
    return channel, symbols


class TestParamPlumbing:
    @pytest.mark.parametrize(
        "est",
        [
            ZeroForcingPrecoder(power=2.0),
            RegularizedZFPrecoder(power=2.0, noise_var=0.5),
            CiBlockPrecoder(order=8, power=2.0, tol=1e-8),
            CiSlotPrecoder(order=8, power=2.0),
        ],
    )
    def test_get_set_clone_roundtrip(self, est):
        params = est.get_params()
        assert params["power"] == 2.0
        cloned = clone(est)
        assert cloned.get_params() == params
        est.set_params(power=3.0)
        assert est.get_params()["power"] == 3.0


class TestZeroForcingEstimator:
    def test_matches_function(self, instance):
        channel, symbols = instance
        est = ZeroForcingPrecoder(power=1.5).fit(channel)
        np.testing.assert_allclose(
            est.precoding_matrix_, zf_precoder(channel, 1.5), atol=1e-12
        )
        np.testing.assert_allclose(
            est.transform(symbols), symbols @ zf_precoder(channel, 1.5).T,
            atol=1e-12,
        )

    def test_transform_requires_fit(self, instance):
        _, symbols = instance
        with pytest.raises(Exception):
            ZeroForcingPrecoder().transform(symbols)

    def test_rejects_wide_channel(self):
        with pytest.raises(ValueError):
            ZeroForcingPrecoder().fit(np.ones((3, 2), dtype=complex))


class TestRegularizedZfEstimator:
    def test_matches_function(self, instance):
        channel, _ = instance
        est = RegularizedZFPrecoder(power=1.0, noise_var=0.2).fit(channel)
        np.testing.assert_allclose(
            est.precoding_matrix_, rzf_precoder(channel, 1.0, 0.2), atol=1e-12
        )


class TestCiBlockEstimator:
    def test_fit_attributes(self, instance):
        channel, symbols = instance
        est = CiBlockPrecoder(order=8, power=1.0).fit(channel, symbols)
        assert est.precoding_matrix_.shape == (3, 2)
        assert est.margin_ > 0
        assert est.multiplier_ > 0
        assert est.block_power_ == pytest.approx(6.0, rel=1e-6)
        assert est.weights_.shape == (2 * 6 * 2,)
        assert abs(est.weights_.sum() - 1.0) <= 1e-10

    def test_transform_applies_block_matrix(self, instance):
        channel, symbols = instance
        est = CiBlockPrecoder(order=8).fit(channel, symbols)
        np.testing.assert_allclose(
            est.transform(symbols), symbols @ est.precoding_matrix_.T, atol=1e-12
        )

    def test_transmit_power_matches_budget(self, instance):
        channel, symbols = instance
        transmit = CiBlockPrecoder(order=8, power=1.0).fit_transform(channel, symbols)
        assert np.sum(np.abs(transmit) ** 2) == pytest.approx(6.0, rel=1e-6)


class TestCiSlotEstimator:
    def test_transform_shape_and_power(self, instance):
        channel, symbols = instance
        transmit = CiSlotPrecoder(order=8, power=1.0).fit_transform(channel, symbols)
        assert transmit.shape == (6, 3)
        np.testing.assert_allclose(
            np.sum(np.abs(transmit) ** 2, axis=1), np.ones(6), atol=1e-7
        )

    def test_requires_fit(self, instance):
        _, symbols = instance
        with pytest.raises(Exception):
            CiSlotPrecoder().transform(symbols)
