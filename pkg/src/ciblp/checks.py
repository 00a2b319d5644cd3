"""Self-contained verification battery behind the ``validate`` subcommand.

Each check returns a :class:`CheckResult`; the CLI prints one line per check
and the acceptance test suite runs the same functions at their published
instance counts.  All randomness is seeded, so a given seed either always
passes or always fails.
"""

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .baselines import zf_precoder
from .constellation import PskConstellation
from .dual import coupling_matrix, power_split_matrices, solve_ci_blp
from .exceptions import SingularGramError
from .geometry import block_geometry
from .gram import build_block_gram
from .lifting import SymbolBlock
from .oracle import solve_primal_p1
from .simplex_qp import SimplexQpProblem, certify, project_simplex
from .simplex_qp import solve as solve_simplex_qp
from .simulate import rayleigh_channel

DEFAULT_SEED = 20240


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


def draw_instance(rng, users_set=(1, 2, 4), tx_set=(2, 4, 8), slots_set=(2, 4, 8),
                  orders=(4, 8), max_tries=50):
    """Random channel/block instance with an invertible block Gram matrix.

    The block Gram matrix has rank at most 2N, so block lengths below the
    user count are structurally singular and are not drawn.
    """
    k = int(rng.choice(users_set))
    n_tx = int(rng.choice([t for t in tx_set if t >= k]))
    n_slots = int(rng.choice([n for n in slots_set if n >= k]))
    order = int(rng.choice(orders))
    con = PskConstellation(order)
    channel = rayleigh_channel(rng, k, n_tx)
    for _ in range(max_tries):
        block = SymbolBlock.from_indices(rng.integers(0, order, (n_slots, k)), con)
        try:
            build_block_gram(block)
        except SingularGramError:
            continue
        return channel, block
    raise RuntimeError("failed to draw a non-degenerate block")


def check_proposition1(n_instances=200, seed=DEFAULT_SEED):
    """The two power-expansion matrices must sum to the coupling matrix."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(n_instances):
        channel, block = draw_instance(rng)
        geoms = block_geometry(channel, block)
        gram = build_block_gram(block)
        u = coupling_matrix(geoms, gram)
        f, g = power_split_matrices(geoms, gram)
        worst = max(worst, np.linalg.norm(f + g - u) / np.linalg.norm(u))
    return CheckResult(
        name="power-split identity",
        passed=worst <= 1e-10,
        detail=f"{n_instances} instances, worst relative deviation {worst:.3e}",
        elapsed=time.perf_counter() - start,
    )


def check_duality(n_instances=50, seed=DEFAULT_SEED + 1):
    """Dual pipeline and independent primal solver agree on the margin."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(n_instances):
        channel, block = draw_instance(rng, users_set=(1, 2, 4), tx_set=(2, 3, 4),
                                       slots_set=(2, 4, 8))
        t_dual = solve_ci_blp(channel, block, 1.0).certificate.t
        t_primal = solve_primal_p1(channel, block, 1.0).t
        worst = max(worst, abs(t_dual - t_primal) / max(1.0, t_dual))
    return CheckResult(
        name="strong duality vs oracle",
        passed=worst <= 1e-4,
        detail=f"{n_instances} instances, worst relative gap {worst:.3e}",
        elapsed=time.perf_counter() - start,
    )


def check_kkt(n_instances=25, seed=DEFAULT_SEED + 2, p0=1.0):
    """Power activity, complementary slackness, stationarity, consistency."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = {"power": 0.0, "slackness": 0.0, "stationarity": 0.0, "min": 0.0}
    for _ in range(n_instances):
        channel, block = draw_instance(rng)
        precoder = solve_ci_blp(channel, block, p0)
        n = block.n_slots
        worst["power"] = max(
            worst["power"], abs(precoder.block_power - n * p0) / (n * p0)
        )
        scalings = precoder.scalings.ravel()
        t = precoder.certificate.t
        active = precoder.certificate.delta > 1e-6
        if np.any(active):
            worst["slackness"] = max(
                worst["slackness"], np.abs(scalings[active] - t).max()
            )
        worst["min"] = max(worst["min"], abs(scalings.min() - t))

        gram = build_block_gram(block)
        geoms = block_geometry(channel, block)
        delta = precoder.certificate.delta.reshape(n, -1)
        lhs = 2.0 * precoder.certificate.mu * (precoder.w_real @ gram.matrix)
        rhs = np.zeros_like(lhs)
        for i, geom in enumerate(geoms):
            rhs += np.outer(geom.re_map.T @ delta[i], block.extended[i])
            rhs += np.outer(geom.im_map.T @ delta[i], block.rotated[i])
        scale = max(np.abs(lhs).max(), np.abs(rhs).max())
        worst["stationarity"] = max(
            worst["stationarity"], np.abs(lhs - rhs).max() / scale
        )
    passed = (
        worst["power"] <= 1e-6
        and worst["slackness"] <= 1e-5
        and worst["stationarity"] <= 1e-8
        and worst["min"] <= 1e-6
    )
    detail = (
        f"{n_instances} instances; power {worst['power']:.2e}, "
        f"slackness {worst['slackness']:.2e}, "
        f"stationarity {worst['stationarity']:.2e}, min-vs-t {worst['min']:.2e}"
    )
    return CheckResult("dual certificate (KKT)", passed, detail,
                       time.perf_counter() - start)


def _enumerate_simplex_qp(q):
    d = q.shape[0]
    best = np.inf
    for r in range(1, d + 1):
        for support in itertools.combinations(range(d), r):
            idx = list(support)
            kkt = np.zeros((r + 1, r + 1))
            kkt[:r, :r] = 2.0 * q[np.ix_(idx, idx)]
            kkt[:r, r] = -1.0
            kkt[r, :r] = 1.0
            rhs = np.zeros(r + 1)
            rhs[r] = 1.0
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            x_s = sol[:r]
            if np.any(x_s < -1e-12):
                continue
            x = np.zeros(d)
            x[idx] = np.maximum(x_s, 0.0)
            best = min(best, float(x @ q @ x))
    return best


def check_simplex_qp(n_instances=100, seed=DEFAULT_SEED + 3):
    """Certified residuals on random PD forms; exhaustive check for d <= 6."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst_res, worst_gap = 0.0, 0.0
    for i in range(n_instances):
        d = int(rng.integers(2, 65))
        factor = rng.standard_normal((d, d + 2))
        q = factor @ factor.T
        problem = SimplexQpProblem(q)
        solution = solve_simplex_qp(problem, tol=1e-9)
        if not solution.converged:
            return CheckResult(
                "simplex QP certification", False,
                f"instance {i} (d={d}) did not certify "
                f"(residual {solution.kkt_residual:.3e})",
                time.perf_counter() - start,
            )
        worst_res = max(worst_res, certify(problem, solution.delta))
        if d <= 6:
            worst_gap = max(
                worst_gap, abs(solution.objective - _enumerate_simplex_qp(q))
            )
    passed = worst_res <= 1e-9 and worst_gap <= 1e-8
    return CheckResult(
        "simplex QP certification", passed,
        f"{n_instances} instances; worst residual {worst_res:.3e}, "
        f"worst enumeration gap {worst_gap:.3e}",
        time.perf_counter() - start,
    )


def _enumerate_projection(v):
    d = v.size
    best, best_dist = None, np.inf
    for r in range(1, d + 1):
        for support in itertools.combinations(range(d), r):
            idx = list(support)
            x = np.zeros(d)
            x[idx] = v[idx] - (v[idx].sum() - 1.0) / r
            if np.any(x[idx] < -1e-12):
                continue
            dist = float(np.sum((x - v) ** 2))
            if dist < best_dist:
                best, best_dist = x, dist
    return best


def check_projection(n_instances=100, seed=DEFAULT_SEED + 4):
    """Sort-based simplex projection against support enumeration (d = 6)."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(n_instances):
        v = rng.standard_normal(6) * float(rng.uniform(0.1, 10.0))
        worst = max(
            worst, float(np.abs(project_simplex(v) - _enumerate_projection(v)).max())
        )
    return CheckResult(
        "simplex projection", worst <= 1e-10,
        f"{n_instances} instances, worst deviation {worst:.3e}",
        time.perf_counter() - start,
    )


def check_micro_ground_truth():
    """Single-antenna case solvable by hand: t = 1, W = 1 on both routes."""
    start = time.perf_counter()
    con = PskConstellation(4)
    block = SymbolBlock(con, np.array([[np.exp(1j * np.pi / 4.0)]]))
    channel = np.array([[1.0 + 0.0j]])
    dual = solve_ci_blp(channel, block, 1.0)
    primal = solve_primal_p1(channel, block, 1.0)
    dev = max(
        abs(dual.certificate.t - 1.0),
        abs(complex(dual.w[0, 0]) - 1.0),
        abs(primal.t - 1.0),
        abs(complex(primal.w[0, 0]) - 1.0),
    )
    return CheckResult(
        "micro ground truth", dev <= 1e-6,
        f"worst deviation from (W, t) = (1, 1): {dev:.3e}",
        time.perf_counter() - start,
    )


def check_zf_identities(n_instances=20, seed=DEFAULT_SEED + 5):
    """Interference nulling and power normalization of the ZF baseline."""
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(n_instances):
        k = int(rng.integers(1, 5))
        n_tx = int(rng.integers(k, 6))
        h = rayleigh_channel(rng, k, n_tx)
        w = zf_precoder(h, 1.0)
        hw = h @ w
        off = hw - np.diag(np.diag(hw))
        worst = max(
            worst,
            float(np.abs(off).max()) / (np.linalg.norm(h) * np.linalg.norm(w)),
            abs(float(np.sum(np.abs(w) ** 2)) - 1.0),
        )
    return CheckResult(
        "ZF identities", worst <= 1e-10,
        f"{n_instances} instances, worst deviation {worst:.3e}",
        time.perf_counter() - start,
    )


def run_validation_suite(seed=DEFAULT_SEED):
    """Run every check at its published instance count."""
    return [
        check_proposition1(seed=seed),
        check_duality(seed=seed + 1),
        check_kkt(seed=seed + 2),
        check_simplex_qp(seed=seed + 3),
        check_projection(seed=seed + 4),
        check_micro_ground_truth(),
        check_zf_identities(seed=seed + 5),
    ]
