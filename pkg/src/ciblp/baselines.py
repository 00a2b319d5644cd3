"""Closed-form and per-slot reference precoders: ZF, RZF, CI-SLP.

ZF/RZF are normalized to ``||W||_F^2 = p0``, which equals the expected
per-slot transmit power under unit-energy uncorrelated symbols.  The CI-SLP
baseline solves the single-slot max-min scaling design with a per-slot
budget through the primal oracle (the block Gram matrix is rank deficient
for a single slot with more than one user, so the dual route does not
apply).
"""

import numpy as np

from .exceptions import InfeasibleProblemError
from .lifting import SymbolBlock
from .oracle import solve_primal_p1
from .validation import check_channel, check_noise_var, check_power

SCHEMES = ("ZF", "RZF", "CI_SLP", "CI_BLP")


def zf_precoder(channel, p0=1.0):
    """Zero-forcing precoder with Frobenius power normalization.

    ``W = c H^H (H H^H)^{-1}`` with ``c`` set so ``||W||_F^2 = p0``; every
    user then receives its own symbol scaled by ``c``.
    """
    h = check_channel(channel)
    p0 = check_power(p0)
    gram_h = h @ h.conj().T
    try:
        w_raw = np.linalg.solve(gram_h.T, h.conj()).T
    except np.linalg.LinAlgError as exc:
        raise InfeasibleProblemError("channel is rank deficient") from exc
    norm_sq = float(np.sum(np.abs(w_raw) ** 2))
    if not np.isfinite(norm_sq) or norm_sq <= 0:
        raise InfeasibleProblemError("channel inversion produced no usable precoder")
    return w_raw * np.sqrt(p0 / norm_sq)


def rzf_precoder(channel, p0=1.0, noise_var=1.0):
    """Regularized ZF with the standard MMSE loading ``K * noise_var / p0``."""
    h = check_channel(channel)
    p0 = check_power(p0)
    noise_var = check_noise_var(noise_var)
    k = h.shape[0]
    loaded = h @ h.conj().T + (k * noise_var / p0) * np.eye(k)
    w_raw = np.linalg.solve(loaded.T, h.conj()).T
    norm_sq = float(np.sum(np.abs(w_raw) ** 2))
    return w_raw * np.sqrt(p0 / norm_sq)


def ci_slp_precoder(channel, slot_symbols, p0, constellation):
    """Per-slot CI transmit vector under a per-slot power budget.

    Returns the transmit vector ``x = W s`` for the given slot; the
    underlying single-slot design saturates the slot power exactly.
    """
    slot = np.asarray(slot_symbols, dtype=np.complex128).reshape(1, -1)
    block = SymbolBlock(constellation, slot)
    solution = solve_primal_p1(channel, block, p0)
    return solution.w @ slot[0]
