"""Independent primal solver for the max-min scaling design.

Ground-truth route used to validate the dual pipeline and to realize the
per-slot CI baseline.  The max-min problem is solved in its equivalent
min-power form

    minimize  block_power(w_real)   s.t.  every scaling factor >= 1,

a strictly convex inequality-constrained QP handled by a dense primal
active-set method, then rescaled to saturate the block power budget; the
achieved minimum scaling is ``t = sqrt(N * p0 / optimal_power)``.  The code
path shares nothing with the dual assembly, so agreement between the two is
meaningful evidence.
"""

import time
from dataclasses import dataclass

import numpy as np

from .constellation import decompose_received
from .exceptions import InfeasibleProblemError, SolverError
from .geometry import block_geometry
from .gram import gram_matrix
from .lifting import SymbolBlock, complexify_precoder, realify_precoder
from .validation import check_channel, check_power


@dataclass
class ActiveSetResult:
    x: np.ndarray
    active: np.ndarray
    iterations: int
    converged: bool


def solve_qp_active_set(q_mat, c_vec, a_mat, b_vec, x0, max_iter=None):
    """Minimize ``0.5 x'Qx + c'x`` subject to ``Ax >= b`` (Q positive definite).

    Primal active-set iteration from a feasible ``x0``: repeatedly solve the
    equality-constrained subproblem on the working set, take the largest
    feasible step toward its solution, and add the blocking constraint, or
    drop the most negative multiplier once stationary.
    """
    n = q_mat.shape[0]
    m = a_mat.shape[0]
    if max_iter is None:
        max_iter = 50 * (n + m) + 100
    x = np.asarray(x0, dtype=np.float64).copy()
    slack0 = a_mat @ x - b_vec
    if slack0.min() < -1e-9 * max(1.0, np.abs(b_vec).max()):
        raise ValueError("x0 is not feasible")

    working = []
    for it in range(1, max_iter + 1):
        grad = q_mat @ x + c_vec
        if working:
            rows = a_mat[working]
            k = len(working)
            kkt = np.zeros((n + k, n + k))
            kkt[:n, :n] = q_mat
            kkt[:n, n:] = rows.T
            kkt[n:, :n] = rows
            rhs = np.concatenate([-grad, np.zeros(k)])
            sol = np.linalg.solve(kkt, rhs)
            p = sol[:n]
            lam = -sol[n:]
        else:
            p = np.linalg.solve(q_mat, -grad)
            lam = np.empty(0)

        if np.abs(p).max(initial=0.0) <= 1e-11 * (1.0 + np.abs(x).max()):
            if lam.size == 0 or lam.min() >= -1e-9 * (1.0 + np.abs(lam).max()):
                multipliers = np.zeros(m)
                if working:
                    multipliers[working] = lam
                return x, ActiveSetResult(
                    x=x, active=multipliers, iterations=it, converged=True
                )
            working.pop(int(np.argmin(lam)))
            continue

        # Largest step along p that keeps all constraints satisfied.
        a_p = a_mat @ p
        slack = a_mat @ x - b_vec
        mask = np.ones(m, dtype=bool)
        mask[working] = False
        mask &= a_p < -1e-13
        step = 1.0
        blocker = -1
        if np.any(mask):
            ratios = -slack[mask] / a_p[mask]
            idx = np.flatnonzero(mask)
            j = int(np.argmin(ratios))
            if ratios[j] < step:
                step = max(ratios[j], 0.0)
                blocker = int(idx[j])
        x = x + step * p
        if blocker >= 0:
            working.append(blocker)

    return x, ActiveSetResult(x=x, active=np.zeros(m), iterations=max_iter,
                              converged=False)


@dataclass(frozen=True)
class PrimalSolution:
    """Optimal precoder of the primal max-min design."""

    w_real: np.ndarray
    w: np.ndarray
    t: float
    min_power: float
    iterations: int
    solve_time: float


def _constraint_rows(geometries, s_vecs, c_vecs):
    """Stack the 2NK scaling functionals of the flattened precoder rows.

    With ``x = y.ravel()`` (row-major) for a precoder whose row ``t`` is
    paired with per-slot vectors ``s``/``c``, the functional of slot n,
    entry k is ``kron(a_k, s^n) + kron(b_k, c^n)`` for the k-th rows of the
    slot's re/im maps.
    """
    rows = []
    for geom, s, c in zip(geometries, s_vecs, c_vecs):
        rows.append(
            np.einsum("kt,j->ktj", geom.re_map, s)
            + np.einsum("kt,j->ktj", geom.im_map, c)
        )
    n_cons = len(geometries) * geometries[0].re_map.shape[0]
    return np.concatenate(rows).reshape(n_cons, -1)


def solve_primal_p1(channel, block: SymbolBlock, p0=1.0):
    """Solve the max-min scaling design directly (no dual machinery).

    The precoder rows are expressed in the eigenbasis of the block Gram
    matrix restricted to its range: components outside it affect neither
    the transmit power nor any scaling factor, and dropping them makes the
    min-power QP strictly convex even for short blocks (e.g. one slot).
    Returns a :class:`PrimalSolution` whose ``solve_time`` covers the
    feasible-start construction and the active-set iteration only, mirroring
    how off-the-shelf QP timers are usually read.
    """
    channel = check_channel(channel, n_users=block.n_users)
    p0 = check_power(p0)
    geometries = block_geometry(channel, block)

    gram = gram_matrix(block)
    eigval, eigvec = np.linalg.eigh(gram)
    keep = eigval > 1e-12 * eigval[-1]
    basis = eigvec[:, keep]
    s_red = block.extended @ basis
    c_red = block.rotated @ basis
    a_mat = _constraint_rows(geometries, s_red, c_red)
    if np.max(np.abs(a_mat), axis=1).min() <= 1e-14:
        raise InfeasibleProblemError(
            "a scaling functional vanishes identically; channel is degenerate"
        )
    n_tx = channel.shape[1]
    q_mat = np.kron(np.eye(n_tx), 2.0 * np.diag(eigval[keep]))
    b_vec = np.ones(a_mat.shape[0])

    start = time.perf_counter()
    # Feasible start: twice the unnormalized channel inverse receives every
    # symbol exactly, so all scaling factors equal 2.
    gram_h = channel @ channel.conj().T
    try:
        w_zf = channel.conj().T @ np.linalg.inv(gram_h)
    except np.linalg.LinAlgError as exc:
        raise InfeasibleProblemError("channel is rank deficient") from exc
    x0 = (2.0 * realify_precoder(w_zf) @ basis).ravel()
    x, info = solve_qp_active_set(q_mat, np.zeros(q_mat.shape[0]), a_mat, b_vec, x0)
    solve_time = time.perf_counter() - start
    if not info.converged:
        raise SolverError("active-set QP did not converge")

    min_power = 0.5 * float(x @ (q_mat @ x))
    scale = float(np.sqrt(block.n_slots * p0 / min_power))
    w_real = scale * (x.reshape(n_tx, -1) @ basis.T)
    return PrimalSolution(
        w_real=w_real,
        w=complexify_precoder(w_real),
        t=scale,
        min_power=min_power,
        iterations=info.iterations,
        solve_time=solve_time,
    )


def brute_force_tiny(channel, block: SymbolBlock, p0=1.0, n_mag=41, n_phase=721):
    """Exhaustive single-antenna, single-user search over complex scalars.

    Grids magnitude in ``[0, sqrt(p0)]`` and phase in ``[0, 2 pi)`` and
    returns the scalar precoder maximizing the minimum scaling factor over
    the block, accurate to the grid pitch.
    """
    channel = check_channel(channel, n_users=1, n_tx=1)
    p0 = check_power(p0)
    h = complex(channel[0, 0])
    best_w, best_t = 0.0 + 0.0j, -np.inf
    for mag in np.linspace(0.0, np.sqrt(p0), n_mag):
        for phase in np.linspace(0.0, 2.0 * np.pi, n_phase, endpoint=False):
            w = mag * np.exp(1j * phase)
            t = min(
                min(decompose_received(h * w * s, s, block.constellation))
                for s in block.symbols[:, 0]
            )
            if t > best_t:
                best_t, best_w = t, w
    return best_w, float(best_t)
