"""Real lifting of complex precoding quantities.

Complex symbol vectors, precoders, and received signals are carried around
in stacked real/imaginary form so the scaling factors become linear maps of
a single real matrix.  Conventions used throughout:

* ``s_ext = [Re(s); Im(s)]`` in R^{2K} for a slot vector ``s`` in C^K,
* ``s_rot = T @ s_ext = [Im(s); -Re(s)]`` (the lift of ``-1j * s``),
* ``w_real = [Re(W), -Im(W)]`` in R^{N_T x 2K} for ``W`` in C^{N_T x K},

which give the two identities everything else is built on:

    w_real @ s_ext = Re(W @ s)      and      w_real @ s_rot = Im(W @ s).
"""

from dataclasses import dataclass, field

import numpy as np

from .constellation import PskConstellation
from .validation import check_symbol_matrix


def stack_selectors(n):
    """Selectors (P, Q) of shape (2n, n) picking the top/bottom half rows."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.vstack([eye, zero]), np.vstack([zero, eye])


def quadrature_rotation(k):
    """The (2k, 2k) block rotation T = [[0, I], [-I, 0]].

    Satisfies ``T @ T = -I`` and maps the lift of ``s`` to the lift of
    ``-1j * s``.
    """
    eye = np.eye(k)
    zero = np.zeros((k, k))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class LiftingOperators:
    """The selector/rotation triple (P, Q, T) for given array sizes."""

    n_tx: int
    n_users: int
    p: np.ndarray = field(init=False, repr=False)
    q: np.ndarray = field(init=False, repr=False)
    t: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p, q = stack_selectors(self.n_tx)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", quadrature_rotation(self.n_users))


def extend_symbols(slot_symbols):
    """Lift one slot of K complex symbols to ``(s_ext, s_rot)``.

    ``s_ext`` stacks all real parts then all imaginary parts; ``s_rot`` is
    its image under the quadrature rotation.
    """
    s = np.asarray(slot_symbols, dtype=np.complex128).ravel()
    s_ext = np.concatenate([s.real, s.imag])
    s_rot = np.concatenate([s.imag, -s.real])
    return s_ext, s_rot


def realify_precoder(w):
    """Complex precoder (N_T, K) -> real form [Re(W), -Im(W)] of (N_T, 2K)."""
    w = np.asarray(w, dtype=np.complex128)
    return np.hstack([w.real, -w.imag])


def complexify_precoder(w_real):
    """Inverse of :func:`realify_precoder`."""
    w_real = np.asarray(w_real, dtype=np.float64)
    k = w_real.shape[1] // 2
    return w_real[:, :k] - 1j * w_real[:, k:]


def expand_precoder(w_real):
    """Full real expansion (2N_T, 2K) acting on lifted symbol vectors.

    Equals ``P @ w_real + Q @ w_real @ T`` and maps ``s_ext`` to
    ``[Re(W s); Im(W s)]``.
    """
    w_real = np.asarray(w_real, dtype=np.float64)
    k = w_real.shape[1] // 2
    re_w = w_real[:, :k]
    neg_im_w = w_real[:, k:]
    return np.block([[re_w, neg_im_w], [-neg_im_w, re_w]])


@dataclass(frozen=True)
class SymbolBlock:
    """A block of N slots of K PSK symbols with their lifted forms.

    Attributes
    ----------
    symbols : (N, K) complex
        One row per slot; entries are unit-modulus (constellation points in
        the standard use, but the scaling geometry only needs phases).
    extended : (N, 2K) float
        Row n is the lift ``[Re(s^n); Im(s^n)]``.
    rotated : (N, 2K) float
        Row n is the rotated lift ``[Im(s^n); -Re(s^n)]``.
    """

    constellation: PskConstellation
    symbols: np.ndarray
    extended: np.ndarray = field(init=False, repr=False)
    rotated: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = check_symbol_matrix(self.symbols)
        if np.any(np.abs(np.abs(s) - 1.0) > 1e-9):
            raise ValueError("block symbols must have unit modulus")
        object.__setattr__(self, "symbols", s)
        object.__setattr__(self, "extended", np.hstack([s.real, s.imag]))
        object.__setattr__(self, "rotated", np.hstack([s.imag, -s.real]))

    @property
    def n_slots(self):
        return self.symbols.shape[0]

    @property
    def n_users(self):
        return self.symbols.shape[1]

    @classmethod
    def from_indices(cls, indices, constellation):
        """Build a block from integer constellation indices of shape (N, K)."""
        idx = np.asarray(indices)
        if np.any(idx < 0) or np.any(idx >= constellation.order):
            raise ValueError("symbol indices out of range")
        return cls(constellation, constellation.points[idx])
