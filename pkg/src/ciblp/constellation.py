"""PSK constellation geometry: points, decision boundaries, detection.

The symbol-scaling view of constructive interference measures how far a
(noiseless) received point sits inside its decision sector by decomposing
it along the two boundary rays of the transmitted symbol.  This module
provides that decomposition together with maximum-likelihood detection.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateGeometryError

_MEMBERSHIP_TOL = 1e-8


@dataclass(frozen=True)
class PskConstellation:
    """Normalized M-PSK constellation with points ``exp(2j*pi*k/M)``.

    Points are indexed by ``k = 0..M-1`` in increasing phase over
    ``[0, 2*pi)``; the decision region of each point is the angular sector
    of half-width ``pi/M`` around it.
    """

    order: int
    points: np.ndarray = field(init=False, repr=False)
    half_angle: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.order, (int, np.integer)) or self.order < 2:
            raise ValueError(f"PSK order must be an integer >= 2, got {self.order!r}")
        pts = np.exp(2j * np.pi * np.arange(self.order) / self.order)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "half_angle", np.pi / self.order)

    def contains(self, symbols, tol=_MEMBERSHIP_TOL):
        """True where each entry is a constellation point (within tol)."""
        s = np.asarray(symbols, dtype=np.complex128)
        dist = np.abs(s[..., np.newaxis] - self.points)
        return dist.min(axis=-1) <= tol

    def indices_of(self, symbols, tol=_MEMBERSHIP_TOL):
        """Map constellation points back to their indices."""
        s = np.asarray(symbols, dtype=np.complex128)
        dist = np.abs(s[..., np.newaxis] - self.points)
        idx = dist.argmin(axis=-1)
        if np.any(np.take_along_axis(dist, idx[..., np.newaxis], -1) > tol):
            raise ValueError("input contains values that are not constellation points")
        return idx

    def detect(self, received):
        """Nearest-point (maximum-likelihood) detection.

        Returns the index of the closest constellation point for each entry
        of ``received``.  Ties are broken toward the smaller index; a small
        absolute window (1e-12) makes the tie rule robust to rounding, so an
        exact boundary point such as ``exp(1j*pi/M)`` detects as index 0.
        """
        y = np.asarray(received, dtype=np.complex128)
        dist = np.abs(y[..., np.newaxis] - self.points)
        near = dist <= dist.min(axis=-1, keepdims=True) + 1e-12
        return near.argmax(axis=-1)


def boundary_decomposition(symbol, constellation):
    """Split a PSK symbol into its two decision-boundary components.

    A symbol with phase ``phi`` has decision boundaries along
    ``exp(1j*(phi + pi/M))`` and ``exp(1j*(phi - pi/M))``; the symbol is the
    sum of one positive component along each ray:

        s = s_a + s_b,   s_a = exp(1j*(phi + t))/(2*cos(t)),
                         s_b = exp(1j*(phi - t))/(2*cos(t)),  t = pi/M.

    Returns ``(s_a, s_b)``.  Accepts scalars or arrays.  Only the phase and
    the sector half-width enter, so any unit-modulus symbol is valid (the
    decomposition is offset-invariant).
    """
    if constellation.order == 2:
        raise DegenerateGeometryError(
            "BPSK boundary rays are collinear; the scaling decomposition "
            "is undefined for order 2"
        )
    s = np.asarray(symbol, dtype=np.complex128)
    if np.any(np.abs(np.abs(s) - 1.0) > 1e-9):
        raise ValueError("symbol must have unit modulus")
    theta = constellation.half_angle
    phase = np.angle(s)
    scale = 1.0 / (2.0 * np.cos(theta))
    s_a = np.exp(1j * (phase + theta)) * scale
    s_b = np.exp(1j * (phase - theta)) * scale
    if np.isscalar(symbol) or np.ndim(symbol) == 0:
        return complex(s_a), complex(s_b)
    return s_a, s_b


def decompose_received(received, symbol, constellation):
    """Scaling coefficients of a received point in a symbol's boundary basis.

    Solves ``received = alpha_a * s_a + alpha_b * s_b`` for real
    ``(alpha_a, alpha_b)`` where ``(s_a, s_b)`` is the boundary
    decomposition of ``symbol``.  This is the direct complex-arithmetic
    route used to cross-check the lifted matrix formulation.
    """
    s_a, s_b = boundary_decomposition(symbol, constellation)
    y = complex(received)
    # 2x2 real solve: [Re sa, Re sb; Im sa, Im sb] @ [aa, ab] = [Re y, Im y]
    det = s_a.real * s_b.imag - s_b.real * s_a.imag
    alpha_a = (y.real * s_b.imag - s_b.real * y.imag) / det
    alpha_b = (s_a.real * y.imag - y.real * s_a.imag) / det
    return alpha_a, alpha_b
