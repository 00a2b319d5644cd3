"""Minimize a PSD quadratic form over the probability simplex.

Solves ``min delta^T Q delta  s.t.  delta >= 0, sum(delta) = 1`` for dense
symmetric PSD ``Q`` by accelerated projected gradient with monotone restarts,
an exact sort-based simplex projection, and periodic face polishing (an
equality-constrained solve on the current support) so solutions certify to
tight KKT tolerances.  Every iterate is exactly feasible.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .validation import check_square

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 50_000
PSD_TOL = 1e-8
SUPPORT_TOL = 1e-12


def project_simplex(v):
    """Euclidean projection onto the unit simplex.

    Sort-based exact algorithm; the threshold search keeps the largest
    valid support (water-filling rule), which makes ties deterministic.
    The output is exactly nonnegative and sums to 1 up to rounding.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("cannot project an empty vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, v.size + 1)
    valid = u - css / ks > 0
    rho = np.nonzero(valid)[0][-1]
    theta = css[rho] / (rho + 1.0)
    out = np.maximum(v - theta, 0.0)
    # Cancellation for large-magnitude inputs can perturb the sum; rescaling
    # keeps exact nonnegativity and restores the sum to rounding error.
    return out / out.sum()


@dataclass(frozen=True)
class SimplexQpProblem:
    """A dense symmetric PSD quadratic form over the simplex."""

    matrix: np.ndarray
    validate: bool = True

    def __post_init__(self):
        q = check_square(self.matrix, name="Q")
        scale = np.abs(q).max()
        if scale > 0 and np.abs(q - q.T).max() > 1e-10 * scale:
            raise ValueError("Q must be symmetric within 1e-10 relative")
        q = 0.5 * (q + q.T)
        if self.validate and q.shape[0] > 1:
            eigval = np.linalg.eigvalsh(q)
            norm2 = max(abs(eigval[0]), abs(eigval[-1]))
            if eigval[0] < -PSD_TOL * norm2:
                raise ValueError(
                    f"Q is not PSD (min eigenvalue {eigval[0]:.3e} vs norm "
                    f"{norm2:.3e}); refusing to shift it"
                )
        object.__setattr__(self, "matrix", q)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass
class SimplexQpSolution:
    delta: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    solve_time: float = field(default=0.0)


def _kkt_residual(delta, grad):
    """Normalized KKT residual for the simplex QP.

    With ``g = 2 Q delta`` the first-order conditions require ``g_i`` equal
    to a common multiplier on the support and no smaller off it; the common
    value at a feasible point is ``delta . g``.
    """
    gmax = np.abs(grad).max()
    if gmax == 0.0:
        return 0.0
    lam = float(delta @ grad)
    on = delta > SUPPORT_TOL
    on_dev = np.abs(grad[on] - lam).max() if np.any(on) else 0.0
    off_dev = max(lam - grad.min(), 0.0)
    return max(on_dev, off_dev) / gmax


def certify(problem: SimplexQpProblem, delta):
    """KKT residual of a feasible point; zero iff it is exactly optimal."""
    delta = np.asarray(delta, dtype=np.float64)
    return _kkt_residual(delta, 2.0 * (problem.matrix @ delta))


def _lambda_max(q):
    """Power-iteration estimate of the largest eigenvalue of symmetric PSD q."""
    d = q.shape[0]
    if d == 1:
        return float(q[0, 0])
    v = 1.0 + 0.01 * np.cos(np.arange(d))
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(80):
        w = q @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        lam = float(v @ w)
        v = w / nrm
    return max(lam, 0.0)


def _face_solve(kkt, rhs):
    """LU solve with a least-squares fallback for singular faces.

    The LU route is an order of magnitude cheaper; garbage from a
    near-singular factorization is caught by the residual test.
    """
    scale = max(np.abs(rhs).max(), 1.0)
    try:
        sol = np.linalg.solve(kkt, rhs)
        if np.all(np.isfinite(sol)) and (
            np.abs(kkt @ sol - rhs).max() <= 1e-9 * scale * max(1.0, np.abs(sol).max())
        ):
            return sol
    except np.linalg.LinAlgError:
        pass
    return np.linalg.lstsq(kkt, rhs, rcond=None)[0]


def _polish(q, delta, grad, min_obj, max_rounds=60):
    """Active-set descent from ``delta`` onto an exactly stationary face.

    The candidate face is the current support plus any coordinate whose
    gradient sits at or below the support level (KKT says those must carry
    mass).  Each round solves the stationary conditions
    ``2 Q_SS x = lam * 1``, ``sum(x) = 1`` anchored at the current point
    (least-squares, so rank-deficient faces pick the nearest stationary
    point, which is a face minimizer by convexity) and either jumps there or
    line-searches until a coordinate hits zero and leaves the face.  The
    objective never increases.  Returns ``(delta, objective, gradient)`` or
    None when no stationary face is reached.
    """
    gmax = np.abs(grad).max()
    lam = float(delta @ grad)
    support = np.flatnonzero(
        (delta > SUPPORT_TOL) | (grad <= lam + 1e-7 * gmax)
    )
    if support.size == 0:
        return None
    x_s = delta[support]
    settled = False
    for _ in range(max_rounds):
        m = support.size
        kkt = np.empty((m + 1, m + 1))
        kkt[:m, :m] = 2.0 * q[np.ix_(support, support)]
        kkt[:m, m] = -1.0
        kkt[m, :m] = 1.0
        kkt[m, m] = 0.0
        rhs = np.empty(m + 1)
        rhs[:m] = -kkt[:m, :m] @ x_s
        rhs[m] = 1.0 - x_s.sum()
        target = x_s + _face_solve(kkt, rhs)[:m]
        if np.all(target >= 0.0):
            x_s = target
            settled = True
            break
        if m == 1:
            return None
        # Step toward the stationary point until blocked, drop the blockers.
        step_dir = target - x_s
        blocking = step_dir < 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(blocking, x_s / -step_dir, np.inf)
        alpha = min(float(ratios.min()), 1.0)
        x_s = x_s + alpha * step_dir
        hit = ratios <= alpha
        x_s[hit] = 0.0
        keep = x_s > 0.0
        if not np.any(keep):
            return None
        support = support[keep]
        x_s = x_s[keep]
    if not settled:
        return None
    x = np.zeros(delta.size)
    x[support] = x_s
    x /= x.sum()
    grad = 2.0 * (q @ x)
    obj = 0.5 * float(x @ grad)
    if obj > min_obj + 1e-12 * max(abs(min_obj), 1.0):
        return None
    return x, obj, grad


def solve(problem: SimplexQpProblem, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Solve the simplex QP to a certified KKT residual.

    Accelerated projected gradient with a fixed step ``1/L`` (``L`` from a
    power-iteration estimate of the largest eigenvalue of ``2Q``); momentum
    restarts whenever the accelerated step would increase the objective, so
    the accepted objective sequence is non-increasing.  Face polishing runs
    periodically to snap onto the optimal face.  If ``max_iter`` is reached
    the best iterate is returned with ``converged=False``.
    """
    start = time.perf_counter()
    raw = problem.matrix
    d = problem.dim
    # Normalize by a power of two: exact entrywise, so scaled copies of a
    # problem (e.g. a doubled channel scales the coupling matrix by 4) run
    # through bit-identical iterations and return the same argmin.
    max_abs = np.abs(raw).max()
    scale = float(2.0 ** np.floor(np.log2(max_abs))) if max_abs > 0 else 1.0
    q = raw / scale

    delta = np.full(d, 1.0 / d)
    grad = 2.0 * (q @ delta)
    obj = 0.5 * float(delta @ grad)
    residual = _kkt_residual(delta, grad)
    if residual <= tol or d == 1:
        return SimplexQpSolution(
            delta=delta, objective=obj * scale, kkt_residual=residual,
            iterations=0, converged=residual <= tol,
            solve_time=time.perf_counter() - start,
        )

    lam_max = _lambda_max(q)
    step = 1.0 / max(2.0 * lam_max * 1.05, 1e-300)

    y = delta.copy()
    momentum = 1.0
    iterations = 0
    converged = False
    for it in range(1, max_iter + 1):
        iterations = it
        stalled = False
        cand = project_simplex(y - step * 2.0 * (q @ y))
        g_cand = 2.0 * (q @ cand)
        f_cand = 0.5 * float(cand @ g_cand)
        if f_cand <= obj:
            m_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum * momentum))
            y = cand + ((momentum - 1.0) / m_next) * (cand - delta)
            delta, grad, obj = cand, g_cand, f_cand
            momentum = m_next
        else:
            # Restart: plain projected-gradient step, halving on the rare
            # occasion the eigenvalue estimate was low.
            s = step
            stalled = True
            for _ in range(60):
                cand = project_simplex(delta - s * grad)
                g_cand = 2.0 * (q @ cand)
                f_cand = 0.5 * float(cand @ g_cand)
                if f_cand <= obj:
                    step = s
                    delta, grad, obj = cand, g_cand, f_cand
                    stalled = False
                    break
                s *= 0.5
            y = delta.copy()
            momentum = 1.0

        if stalled or it % 10 == 0 or it == max_iter:
            residual = _kkt_residual(delta, grad)
            if residual <= tol:
                converged = True
                break
            improved = False
            near = residual <= 1e-2  # polishing far from the face wastes solves
            if stalled or it == max_iter or (near and it % 20 == 0):
                polished = _polish(q, delta, grad, obj)
                if polished is not None:
                    p_delta, p_obj, p_grad = polished
                    p_res = _kkt_residual(p_delta, p_grad)
                    if p_obj < obj or p_res <= tol:
                        improved = p_obj < obj
                        delta, grad, obj = p_delta, p_grad, p_obj
                        y = delta.copy()
                        momentum = 1.0
                    if p_res <= tol:
                        residual = p_res
                        converged = True
                        break
            if stalled and not improved:
                break  # no descent direction left; report best iterate

    residual = _kkt_residual(delta, grad)
    return SimplexQpSolution(
        delta=delta,
        objective=float(delta @ (raw @ delta)),
        kkt_residual=residual,
        iterations=iterations,
        converged=converged or residual <= tol,
        solve_time=time.perf_counter() - start,
    )
