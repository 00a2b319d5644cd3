"""Input validation helpers shared by the library and the estimator API."""

import numbers

import numpy as np


def check_channel(channel, n_users=None, n_tx=None):
    """Validate a downlink channel matrix.

    Parameters
    ----------
    channel : array-like of shape (K, N_T)
        Row ``k`` is the channel vector of user ``k`` (received sample is
        ``channel[k] @ x`` for a transmit vector ``x``).
    n_users, n_tx : int, optional
        Expected dimensions; checked when given.

    Returns
    -------
    ndarray of shape (K, N_T), complex
    """
    h = np.asarray(channel)
    if h.ndim != 2:
        raise ValueError(f"channel must be 2-D (K, N_T), got shape {h.shape}")
    h = h.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(h.real)) or not np.all(np.isfinite(h.imag)):
        raise ValueError("channel contains non-finite entries")
    k, nt = h.shape
    if k < 1 or nt < 1:
        raise ValueError(f"channel must be non-empty, got shape {h.shape}")
    if k > nt:
        raise ValueError(f"K <= N_T required, got K={k} users and N_T={nt} antennas")
    if n_users is not None and k != n_users:
        raise ValueError(f"expected {n_users} users, channel has {k} rows")
    if n_tx is not None and nt != n_tx:
        raise ValueError(f"expected {n_tx} antennas, channel has {nt} columns")
    return h


def check_symbol_matrix(symbols, n_users=None):
    """Coerce symbols to a 2-D complex array of shape (N, K).

    A 1-D input is treated as a single slot.
    """
    s = np.asarray(symbols)
    if s.ndim == 1:
        s = s[np.newaxis, :]
    if s.ndim != 2:
        raise ValueError(f"symbols must be 1-D or 2-D, got shape {s.shape}")
    s = s.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(s.real)) or not np.all(np.isfinite(s.imag)):
        raise ValueError("symbols contain non-finite entries")
    if n_users is not None and s.shape[1] != n_users:
        raise ValueError(f"expected {n_users} users per slot, got {s.shape[1]}")
    return s


def check_power(p0, name="p0"):
    """Validate a strictly positive scalar power budget."""
    if not isinstance(p0, numbers.Real) or not np.isfinite(p0) or p0 <= 0:
        raise ValueError(f"{name} must be a finite positive scalar, got {p0!r}")
    return float(p0)


def check_noise_var(noise_var):
    """Validate a nonnegative scalar noise variance."""
    if not isinstance(noise_var, numbers.Real) or not np.isfinite(noise_var) or noise_var < 0:
        raise ValueError(f"noise_var must be finite and >= 0, got {noise_var!r}")
    return float(noise_var)


def check_square(mat, name="matrix"):
    """Validate a square 2-D real array."""
    m = np.asarray(mat, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")
    return m
