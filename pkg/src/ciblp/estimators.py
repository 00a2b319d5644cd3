"""Estimator-style wrappers around the precoder designs.

Each precoder follows the familiar fit/transform pattern so it can be
configured, cloned, and inspected with `get_params`/`set_params` like any
scikit-learn estimator:

* ``fit(channel, symbols=None)`` designs the precoder for a channel (and,
  for the block-level CI design, for a block of symbols),
* ``transform(symbols)`` maps symbol slots to transmit vectors of shape
  (N, N_T).

Learned quantities carry the usual trailing underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .baselines import rzf_precoder, zf_precoder
from .constellation import PskConstellation
from .dual import solve_ci_blp
from .lifting import SymbolBlock
from .oracle import solve_primal_p1
from .validation import check_channel, check_symbol_matrix


class _FixedMatrixPrecoder(BaseEstimator):
    """Shared transform for precoders that reduce to one complex matrix."""

    def transform(self, symbols):
        """Map symbol slots (N, K) to transmit vectors (N, N_T)."""
        check_is_fitted(self, "precoding_matrix_")
        s = check_symbol_matrix(symbols, n_users=self.precoding_matrix_.shape[1])
        return s @ self.precoding_matrix_.T

    def fit_transform(self, channel, symbols):
        return self.fit(channel, symbols).transform(symbols)


class ZeroForcingPrecoder(_FixedMatrixPrecoder):
    """Channel-inverting precoder, symbols play no role in the design."""

    def __init__(self, power=1.0):
        self.power = power

    def fit(self, channel, symbols=None):
        channel = check_channel(channel)
        self.precoding_matrix_ = zf_precoder(channel, self.power)
        self.n_users_, self.n_tx_ = channel.shape
        return self


class RegularizedZFPrecoder(_FixedMatrixPrecoder):
    """Channel inversion with MMSE diagonal loading ``K * noise_var / power``."""

    def __init__(self, power=1.0, noise_var=1.0):
        self.power = power
        self.noise_var = noise_var

    def fit(self, channel, symbols=None):
        channel = check_channel(channel)
        self.precoding_matrix_ = rzf_precoder(channel, self.power, self.noise_var)
        self.n_users_, self.n_tx_ = channel.shape
        return self


class CiBlockPrecoder(_FixedMatrixPrecoder):
    """Block-level constructive-interference precoder.

    Designs one matrix for a whole block of PSK symbol slots by maximizing
    the minimum scaling factor under a pooled block power budget.

    Parameters
    ----------
    order : int
        PSK constellation order (>= 3; the scaling geometry is undefined
        for BPSK).
    power : float
        Per-slot power budget; the block budget is ``N * power``.
    tol, max_iter : float, int
        Termination settings of the internal simplex QP.

    Attributes
    ----------
    precoding_matrix_ : (N_T, K) complex
    margin_ : float
        Achieved minimum scaling factor over the block.
    weights_ : (2NK,) float
        Optimal simplex weights (the dual certificate).
    multiplier_ : float
        Recovered power multiplier.
    block_power_ : float
        Transmit power summed over the block (saturates ``N * power``).
    """

    def __init__(self, order=8, power=1.0, tol=1e-9, max_iter=50_000):
        self.order = order
        self.power = power
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, channel, symbols):
        channel = check_channel(channel)
        block = self._as_block(symbols)
        result = solve_ci_blp(
            channel, block, self.power, tol=self.tol, max_iter=self.max_iter
        )
        self.precoding_matrix_ = result.w
        self.margin_ = result.certificate.t
        self.weights_ = result.certificate.delta
        self.multiplier_ = result.certificate.mu
        self.block_power_ = result.block_power
        self.n_iter_ = result.qp.iterations
        self.n_users_, self.n_tx_ = channel.shape
        return self

    def _as_block(self, symbols):
        if isinstance(symbols, SymbolBlock):
            return symbols
        constellation = PskConstellation(self.order)
        return SymbolBlock(constellation, check_symbol_matrix(symbols))


class CiSlotPrecoder(BaseEstimator):
    """Per-slot constructive-interference precoding (one design per slot).

    There is no single precoding matrix: ``transform`` solves an independent
    single-slot design per row of the input under a per-slot power budget.
    """

    def __init__(self, order=8, power=1.0):
        self.order = order
        self.power = power

    def fit(self, channel, symbols=None):
        self.channel_ = check_channel(channel)
        self.n_users_, self.n_tx_ = self.channel_.shape
        return self

    def transform(self, symbols):
        check_is_fitted(self, "channel_")
        s = check_symbol_matrix(symbols, n_users=self.n_users_)
        constellation = PskConstellation(self.order)
        out = np.empty((s.shape[0], self.n_tx_), dtype=np.complex128)
        for n in range(s.shape[0]):
            block = SymbolBlock(constellation, s[n : n + 1])
            solution = solve_primal_p1(self.channel_, block, self.power)
            out[n] = solution.w @ s[n]
        return out

    def fit_transform(self, channel, symbols):
        return self.fit(channel, symbols).transform(symbols)
