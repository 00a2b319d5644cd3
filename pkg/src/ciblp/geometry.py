"""Per-slot scaling geometry binding the channel to PSK decision boundaries.

For slot ``n`` the boundary map is the real matrix that turns a lifted
precoder into the vector of 2K scaling factors

    alpha = re_map @ (w_real @ s_ext) + im_map @ (w_real @ s_rot),

where rows ``k`` and ``K+k`` carry the two boundary coefficients of user
``k`` (all left-boundary coefficients first, then all right-boundary ones).
Row pair ``(k, K+k)`` depends on the channel row of user ``k`` only.
"""

from dataclasses import dataclass

import numpy as np

from .constellation import boundary_decomposition
from .exceptions import DegenerateGeometryError
from .lifting import SymbolBlock
from .validation import check_channel, check_symbol_matrix


@dataclass(frozen=True)
class SlotGeometry:
    """Scaling maps of one symbol slot.

    ``boundary_map`` is (2K, 2N_T); ``re_map`` / ``im_map`` are its left and
    right (2K, N_T) halves, applied to ``Re(W s)`` and ``Im(W s)``.
    """

    boundary_map: np.ndarray
    slot: int = 0

    @property
    def re_map(self):
        n_tx = self.boundary_map.shape[1] // 2
        return self.boundary_map[:, :n_tx]

    @property
    def im_map(self):
        n_tx = self.boundary_map.shape[1] // 2
        return self.boundary_map[:, n_tx:]

    @property
    def n_users(self):
        return self.boundary_map.shape[0] // 2


def _realified_channel(channel):
    """Per-user 2 x 2N_T maps sending [Re(Ws); Im(Ws)] to [Re(y_k); Im(y_k)]."""
    k, n_tx = channel.shape
    h_tilde = np.empty((k, 2, 2 * n_tx))
    h_tilde[:, 0, :n_tx] = channel.real
    h_tilde[:, 0, n_tx:] = -channel.imag
    h_tilde[:, 1, :n_tx] = channel.imag
    h_tilde[:, 1, n_tx:] = channel.real
    return h_tilde


def build_slot_geometry(channel, slot_symbols, constellation, slot=0):
    """Construct the boundary map of one slot.

    For each user the received sample is re-expressed in the basis of the
    symbol's two boundary components; inverting that 2x2 basis against the
    realified channel row yields rows ``k`` and ``K+k`` of the map.
    """
    h = check_channel(channel)
    s = check_symbol_matrix(slot_symbols, n_users=h.shape[0]).ravel()
    s_a, s_b = boundary_decomposition(s, constellation)

    # Basis V_k = [[Re sa, Re sb], [Im sa, Im sb]], inverted analytically.
    det = s_a.real * s_b.imag - s_b.real * s_a.imag
    if np.any(np.abs(det) < 1e-12):
        raise DegenerateGeometryError("boundary basis is singular for some user")
    v_inv = np.empty((h.shape[0], 2, 2))
    v_inv[:, 0, 0] = s_b.imag / det
    v_inv[:, 0, 1] = -s_b.real / det
    v_inv[:, 1, 0] = -s_a.imag / det
    v_inv[:, 1, 1] = s_a.real / det

    rows = np.einsum("kab,kbt->kat", v_inv, _realified_channel(h))
    n_users, n_tx2 = h.shape[0], 2 * h.shape[1]
    boundary_map = np.empty((2 * n_users, n_tx2))
    boundary_map[:n_users] = rows[:, 0, :]
    boundary_map[n_users:] = rows[:, 1, :]
    return SlotGeometry(boundary_map=boundary_map, slot=slot)


def block_geometry(channel, block: SymbolBlock):
    """Slot geometries for every slot of a block (same channel throughout)."""
    return [
        build_slot_geometry(channel, block.symbols[n], block.constellation, slot=n)
        for n in range(block.n_slots)
    ]


def scaling_vector(w_real, geometry: SlotGeometry, s_ext, s_rot):
    """Scaling factors of one slot for a lifted precoder ``w_real``."""
    return geometry.re_map @ (w_real @ s_ext) + geometry.im_map @ (w_real @ s_rot)


def block_scaling(w_real, geometries, block: SymbolBlock):
    """Scaling factors of all slots, shape (N, 2K)."""
    re_image = block.extended @ w_real.T  # rows Re(W s^n)
    im_image = block.rotated @ w_real.T   # rows Im(W s^n)
    re_maps = np.stack([g.re_map for g in geometries])
    im_maps = np.stack([g.im_map for g in geometries])
    return np.einsum("nkt,nt->nk", re_maps, re_image) + np.einsum(
        "nkt,nt->nk", im_maps, im_image
    )
