"""Dual assembly and closed-form recovery for block-level CI precoding.

The max-min scaling design over a whole block reduces, through its KKT
conditions, to minimizing ``delta^T U delta`` over the probability simplex,
where ``U`` couples every pair of slots through the slot geometries and the
Gram coefficients.  From the optimal simplex weights the power multiplier
and the precoder follow in closed form, and the achieved minimum scaling is
``t = sqrt(N * p0 * delta^T U delta)``.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import simplex_qp
from .exceptions import DegenerateDualError, SolverError
from .geometry import block_geometry, block_scaling
from .gram import BlockGram, build_block_gram
from .lifting import SymbolBlock, complexify_precoder
from .validation import check_channel, check_power


@dataclass(frozen=True)
class DualSolution:
    """Simplex weights with the recovered multiplier and scaling value."""

    delta: np.ndarray
    mu: float
    t: float


@dataclass(frozen=True)
class Precoder:
    """A block precoder with its dual certificate.

    ``w_real`` is the lifted (N_T, 2K) matrix, ``w`` the complex (N_T, K)
    precoder applied to every slot of the block.
    """

    w_real: np.ndarray
    w: np.ndarray
    certificate: DualSolution
    block_power: float
    scalings: np.ndarray = field(repr=False)
    qp: simplex_qp.SimplexQpSolution | None = field(default=None, repr=False)
    assembly_time: float = 0.0


def _stacked_maps(geometries):
    re_maps = np.stack([g.re_map for g in geometries])
    im_maps = np.stack([g.im_map for g in geometries])
    return re_maps, im_maps


def coupling_matrix(geometries, gram: BlockGram):
    """Assemble the (2NK, 2NK) dual coupling matrix.

    Block (m, n) is
    ``ss[m,n] A^m A^n.T + cs[m,n] A^m B^n.T + sc[m,n] B^m A^n.T + cc[m,n] B^m B^n.T``
    with ``A``/``B`` the re/im maps of each slot.  The result is symmetric
    PSD: the quadratic form equals ``4 mu^2`` times the block transmit power
    of the precoder recovered from the same weights.
    """
    re_maps, im_maps = _stacked_maps(geometries)
    n_slots, two_k, _ = re_maps.shape
    aa = np.einsum("mkt,nlt->mnkl", re_maps, re_maps)
    ab = np.einsum("mkt,nlt->mnkl", re_maps, im_maps)
    ba = np.einsum("mkt,nlt->mnkl", im_maps, re_maps)
    bb = np.einsum("mkt,nlt->mnkl", im_maps, im_maps)
    blocks = (
        gram.ss[:, :, None, None] * aa
        + gram.cs[:, :, None, None] * ab
        + gram.sc[:, :, None, None] * ba
        + gram.cc[:, :, None, None] * bb
    )
    dim = n_slots * two_k
    coupling = blocks.transpose(0, 2, 1, 3).reshape(dim, dim)
    return 0.5 * (coupling + coupling.T)


def power_split_matrices(geometries, gram: BlockGram):
    """The two power-expansion matrices whose sum equals the coupling matrix.

    The first carries the block power contributed through the extended
    symbol vectors, the second through the rotated ones; they are kept out
    of the solve path and exist for verification.
    """
    re_maps, im_maps = _stacked_maps(geometries)
    n_slots, two_k, _ = re_maps.shape
    aa = np.einsum("mkt,nlt->mnkl", re_maps, re_maps)
    ab = np.einsum("mkt,nlt->mnkl", re_maps, im_maps)
    ba = np.einsum("mkt,nlt->mnkl", im_maps, re_maps)
    bb = np.einsum("mkt,nlt->mnkl", im_maps, im_maps)

    # Coefficient products summed over the middle slot l:
    #   first:  ss[l,n]ss[m,l], cs[l,n]ss[m,l], ss[l,n]sc[m,l], cs[l,n]sc[m,l]
    #   second: sc[l,n]cs[m,l], cc[l,n]cs[m,l], sc[l,n]cc[m,l], cc[l,n]cc[m,l]
    first = (
        np.einsum("ml,ln->mn", gram.ss, gram.ss)[:, :, None, None] * aa
        + np.einsum("ml,ln->mn", gram.ss, gram.cs)[:, :, None, None] * ab
        + np.einsum("ml,ln->mn", gram.sc, gram.ss)[:, :, None, None] * ba
        + np.einsum("ml,ln->mn", gram.sc, gram.cs)[:, :, None, None] * bb
    )
    second = (
        np.einsum("ml,ln->mn", gram.cs, gram.sc)[:, :, None, None] * aa
        + np.einsum("ml,ln->mn", gram.cs, gram.cc)[:, :, None, None] * ab
        + np.einsum("ml,ln->mn", gram.cc, gram.sc)[:, :, None, None] * ba
        + np.einsum("ml,ln->mn", gram.cc, gram.cc)[:, :, None, None] * bb
    )
    dim = n_slots * two_k
    f = first.transpose(0, 2, 1, 3).reshape(dim, dim)
    g = second.transpose(0, 2, 1, 3).reshape(dim, dim)
    return f, g


def recover_mu(delta, coupling, n_slots, p0):
    """Power multiplier from the simplex weights: sqrt(d'Ud / (4 N p0))."""
    value = float(delta @ (coupling @ delta))
    if value <= 1e-14:
        raise DegenerateDualError(
            "dual quadratic form vanishes; the scaling problem is degenerate"
        )
    return float(np.sqrt(value / (4.0 * n_slots * p0)))


def recover_precoder(delta, mu, geometries, gram: BlockGram, block: SymbolBlock):
    """Closed-form precoder from the dual weights.

    ``w_real = (1/2mu) sum_n [A^n.T d^n s_ext^n.T + B^n.T d^n s_rot^n.T] D^{-1}``
    followed by the complex reassembly.  The reported ``t`` is the minimum
    scaling factor recomputed from the precoder itself, which makes the
    certificate self-validating.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    n_slots, two_k = block.n_slots, 2 * block.n_users
    d = np.asarray(delta, dtype=np.float64).reshape(n_slots, two_k)
    re_maps, im_maps = _stacked_maps(geometries)
    accum = np.einsum("nkt,nk,nj->tj", re_maps, d, block.extended)
    accum += np.einsum("nkt,nk,nj->tj", im_maps, d, block.rotated)
    w_real = (accum @ gram.inverse) / (2.0 * mu)
    w = complexify_precoder(w_real)

    scalings = block_scaling(w_real, geometries, block)
    transmit = block.symbols @ w.T
    block_power = float(np.sum(np.abs(transmit) ** 2))
    cert = DualSolution(delta=np.asarray(delta, dtype=np.float64), mu=float(mu),
                        t=float(scalings.min()))
    return Precoder(w_real=w_real, w=w, certificate=cert,
                    block_power=block_power, scalings=scalings)


def solve_ci_blp(channel, block: SymbolBlock, p0=1.0, *, tol=simplex_qp.DEFAULT_TOL,
                 max_iter=simplex_qp.DEFAULT_MAX_ITER, validate=True):
    """End-to-end block-level CI precoder design.

    Builds the slot geometries and Gram data, assembles the dual coupling
    matrix, solves the simplex QP, and recovers the precoder.  Raises
    :class:`SolverError` when the QP does not certify, and propagates
    :class:`SingularGramError` for blocks that cannot support the dual
    (e.g. N = 1 with more than one user).
    """
    channel = check_channel(channel, n_users=block.n_users)
    p0 = check_power(p0)

    assembly_start = time.perf_counter()
    geometries = block_geometry(channel, block)
    gram = build_block_gram(block)
    coupling = coupling_matrix(geometries, gram)
    problem = simplex_qp.SimplexQpProblem(coupling, validate=validate)
    assembly_time = time.perf_counter() - assembly_start

    solution = simplex_qp.solve(problem, tol=tol, max_iter=max_iter)
    if not solution.converged:
        raise SolverError(
            f"simplex QP did not converge: KKT residual "
            f"{solution.kkt_residual:.3e} after {solution.iterations} iterations"
        )
    mu = recover_mu(solution.delta, coupling, block.n_slots, p0)
    precoder = recover_precoder(solution.delta, mu, geometries, gram, block)
    return Precoder(
        w_real=precoder.w_real,
        w=precoder.w,
        certificate=precoder.certificate,
        block_power=precoder.block_power,
        scalings=precoder.scalings,
        qp=solution,
        assembly_time=assembly_time,
    )
