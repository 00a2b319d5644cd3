"""Block Gram matrix of the lifted symbol vectors and derived coefficients.

The Gram matrix ``D = sum_n s_ext^n (s_ext^n)^T + sum_n s_rot^n (s_rot^n)^T``
is the quadratic form of the block transmit power,
``power(w_real) = trace(w_real @ D @ w_real^T)``, and its inverse appears in
the closed-form precoder recovery.  The four coefficient tables pair the
lifted vectors through ``D^{-1}``:

    ss[m, n] = s_ext^n . D^{-1} s_ext^m      (symmetric)
    cc[m, n] = s_rot^n . D^{-1} s_rot^m      (symmetric)
    cs[m, n] = s_rot^n . D^{-1} s_ext^m
    sc[m, n] = s_ext^n . D^{-1} s_rot^m      (= cs^T)
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import SingularGramError
from .lifting import SymbolBlock

COND_LIMIT = 1e10


@dataclass(frozen=True)
class BlockGram:
    """Gram matrix, its inverse, a condition estimate, and coefficients."""

    matrix: np.ndarray
    inverse: np.ndarray
    cond: float
    ss: np.ndarray
    cc: np.ndarray
    cs: np.ndarray
    sc: np.ndarray


def gram_matrix(block: SymbolBlock):
    """The raw (2K, 2K) Gram matrix of a block."""
    return block.extended.T @ block.extended + block.rotated.T @ block.rotated


def build_block_gram(block: SymbolBlock, cond_limit=COND_LIMIT):
    """Assemble and invert the block Gram matrix.

    Inverts through a symmetric eigendecomposition, which doubles as an
    exact condition estimate.  Raises :class:`SingularGramError` above
    ``cond_limit`` instead of regularizing: a short or degenerate block
    should be fixed upstream, not silently smoothed over.
    """
    d = gram_matrix(block)
    eigval, eigvec = np.linalg.eigh(d)
    if eigval[0] <= 0 or eigval[-1] / eigval[0] > cond_limit:
        cond = np.inf if eigval[0] <= 0 else eigval[-1] / eigval[0]
        raise SingularGramError(
            f"block Gram matrix is singular or ill-conditioned (cond={cond:.3g}); "
            "increase the block length N or avoid repeated symbol slots"
        )
    cond = eigval[-1] / eigval[0]
    inverse = (eigvec / eigval) @ eigvec.T
    inverse = 0.5 * (inverse + inverse.T)

    s_img = block.extended @ inverse  # row n = (s_ext^n)^T D^{-1}
    c_img = block.rotated @ inverse
    ss = s_img @ block.extended.T     # symmetric, so index order is immaterial
    cc = c_img @ block.rotated.T
    # cs[m, n] = s_rot^n . D^{-1} s_ext^m = (s_ext^m . D^{-1} s_rot^n)
    cs = s_img @ block.rotated.T
    sc = c_img @ block.extended.T
    return BlockGram(matrix=d, inverse=inverse, cond=cond, ss=ss, cc=cc, cs=cs, sc=sc)
