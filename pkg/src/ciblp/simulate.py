"""Monte Carlo engine: channels, transmission, detection, SER and timing.

Each block owns an independent generator substream derived from
``(seed, block_index)``, and draws, in fixed order, the channel, the symbol
indices, and one unit-variance noise tensor.  Channels, data, and noise are
shared across schemes (and the unit noise across SNR points), a paired
design that only sharpens scheme comparisons.  Blocks are reduced in index
order, so results are bit-identical for a fixed seed regardless of the
number of workers.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .baselines import SCHEMES, rzf_precoder, zf_precoder
from .dual import solve_ci_blp
from .exceptions import (
    CiblpError,
    ConfigError,
    SolverBudgetError,
)
from .constellation import PskConstellation
from .lifting import SymbolBlock
from .oracle import solve_primal_p1

FAILURE_BUDGET = 1e-3
DEFAULT_BLOCK_SWEEP = (4, 8, 15, 32, 64)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters (see the config-file schema)."""

    K: int
    N_T: int
    M: int
    N: int
    snr_db: tuple
    n_blocks: int
    seed: int
    schemes: tuple
    p0: float = 1.0
    n_sweep: tuple = DEFAULT_BLOCK_SWEEP

    def __post_init__(self):
        if self.K < 1 or self.N_T < 1 or self.K > self.N_T:
            raise ConfigError(f"K <= N_T required, got K={self.K}, N_T={self.N_T}")
        if self.M < 2:
            raise ConfigError(f"PSK order M must be >= 2, got {self.M}")
        if self.N < 1:
            raise ConfigError(f"block length N must be >= 1, got {self.N}")
        if self.n_blocks < 1:
            raise ConfigError(f"n_blocks must be >= 1, got {self.n_blocks}")
        if not self.snr_db:
            raise ConfigError("snr_db must be a non-empty list")
        if not self.schemes:
            raise ConfigError("schemes must be a non-empty list")
        for scheme in self.schemes:
            if scheme not in SCHEMES:
                raise ConfigError(
                    f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}"
                )
        if self.p0 <= 0 or not np.isfinite(self.p0):
            raise ConfigError(f"p0 must be positive, got {self.p0}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed}")
        if any(n < 1 for n in self.n_sweep):
            raise ConfigError("n_sweep entries must be >= 1")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "n_sweep", tuple(int(n) for n in self.n_sweep))


@dataclass(frozen=True)
class SerPoint:
    """Error tally of one (scheme, SNR) cell."""

    scheme: str
    snr_db: float
    errors: int
    sent: int

    @property
    def ser(self):
        return self.errors / self.sent if self.sent else float("nan")

    @property
    def ci95_halfwidth(self):
        """95% binomial confidence half-width of the SER estimate."""
        if self.sent < 1:
            return float("nan")
        p = self.ser
        return 1.96 * np.sqrt(max(p * (1.0 - p), 0.0) / self.sent)


@dataclass
class SerResult:
    config: ExperimentConfig
    points: list
    solver_failures: dict
    per_block_errors: dict = field(default_factory=dict, repr=False)

    def point(self, scheme, snr_db):
        for p in self.points:
            if p.scheme == scheme and p.snr_db == float(snr_db):
                return p
        raise KeyError(f"no point for {scheme} at {snr_db} dB")


@dataclass(frozen=True)
class TimingRow:
    """Per-scheme QP timing summary over the blocks of one run."""

    scheme: str
    qp_per_block: int
    qp_dim: int
    qp_time_mean: float
    qp_time_p50: float
    qp_time_p95: float
    total_time_mean: float


@dataclass
class TimingResult:
    config: ExperimentConfig
    rows: list

    def row(self, scheme):
        for r in self.rows:
            if r.scheme == scheme:
                return r
        raise KeyError(f"no timing row for {scheme}")


def rayleigh_channel(rng, n_users, n_tx):
    """I.i.d. circularly-symmetric complex Gaussian channel, unit variance."""
    return (
        rng.standard_normal((n_users, n_tx)) + 1j * rng.standard_normal((n_users, n_tx))
    ) / np.sqrt(2.0)


def detect_psk(received, constellation):
    """Nearest-point PSK detection (ties toward the smaller index)."""
    return constellation.detect(received)


def _block_rng(seed, block_index):
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(block_index)]))


def _draw_block(config, block_index, constellation):
    rng = _block_rng(config.seed, block_index)
    channel = rayleigh_channel(rng, config.K, config.N_T)
    indices = rng.integers(0, config.M, size=(config.N, config.K))
    unit_noise = (
        rng.standard_normal((config.N, config.K))
        + 1j * rng.standard_normal((config.N, config.K))
    ) / np.sqrt(2.0)
    return channel, indices, SymbolBlock.from_indices(indices, constellation), unit_noise


def _scheme_transmit(scheme, config, channel, block):
    """Noiseless transmit signals (N, N_T) for SNR-independent schemes."""
    if scheme == "ZF":
        return block.symbols @ zf_precoder(channel, config.p0).T
    if scheme == "CI_BLP":
        precoder = solve_ci_blp(channel, block, config.p0)
        return block.symbols @ precoder.w.T
    if scheme == "CI_SLP":
        out = np.empty((config.N, config.N_T), dtype=np.complex128)
        for n in range(config.N):
            slot = SymbolBlock(block.constellation, block.symbols[n : n + 1])
            out[n] = solve_primal_p1(channel, slot, config.p0).w @ block.symbols[n]
        return out
    raise ValueError(f"scheme {scheme!r} has no SNR-independent transmit")


def _count_errors(transmit, channel, indices, unit_noise, sigma2, constellation):
    received = transmit @ channel.T
    if sigma2 > 0.0:
        received = received + np.sqrt(sigma2) * unit_noise
    detected = constellation.detect(received)
    return int(np.count_nonzero(detected != indices))


def _ser_block(config, block_index):
    """Error counts of one Monte Carlo block: {scheme: [count per SNR] or None}."""
    constellation = PskConstellation(config.M)
    channel, indices, block, unit_noise = _draw_block(config, block_index, constellation)
    sigma2 = [config.p0 / (10.0 ** (snr / 10.0)) for snr in config.snr_db]

    counts = {}
    for scheme in config.schemes:
        try:
            if scheme == "RZF":
                per_snr = []
                for s2 in sigma2:
                    w = rzf_precoder(channel, config.p0, s2)
                    per_snr.append(
                        _count_errors(block.symbols @ w.T, channel, indices,
                                      unit_noise, s2, constellation)
                    )
                counts[scheme] = per_snr
            else:
                transmit = _scheme_transmit(scheme, config, channel, block)
                counts[scheme] = [
                    _count_errors(transmit, channel, indices, unit_noise, s2,
                                  constellation)
                    for s2 in sigma2
                ]
        except (CiblpError, np.linalg.LinAlgError):
            counts[scheme] = None  # solver failure: counted, not dropped silently
    return counts


def run_ser(config: ExperimentConfig, threads=1):
    """Monte Carlo SER sweep over the configured SNR grid.

    Deterministic for a fixed seed.  Blocks whose solver failed are excluded
    from that scheme's tally and counted in ``solver_failures``; the run
    aborts if any scheme's failure rate exceeds 0.1%.
    """
    worker = delayed(_ser_block)
    outcomes = Parallel(n_jobs=threads)(
        worker(config, b) for b in range(config.n_blocks)
    )

    symbols_per_block = config.N * config.K
    errors = {s: np.zeros(len(config.snr_db), dtype=np.int64) for s in config.schemes}
    ok_blocks = {s: 0 for s in config.schemes}
    failures = {s: 0 for s in config.schemes}
    per_block = {s: [] for s in config.schemes}
    for counts in outcomes:
        for scheme in config.schemes:
            if counts[scheme] is None:
                failures[scheme] += 1
                per_block[scheme].append(None)
            else:
                errors[scheme] += np.asarray(counts[scheme], dtype=np.int64)
                ok_blocks[scheme] += 1
                per_block[scheme].append(tuple(counts[scheme]))

    for scheme, n_failed in failures.items():
        if n_failed / config.n_blocks > FAILURE_BUDGET:
            raise SolverBudgetError(
                f"{scheme} failed on {n_failed}/{config.n_blocks} blocks "
                f"(> {FAILURE_BUDGET:.1%} budget)"
            )

    points = [
        SerPoint(
            scheme=scheme,
            snr_db=snr,
            errors=int(errors[scheme][i]),
            sent=ok_blocks[scheme] * symbols_per_block,
        )
        for scheme in config.schemes
        for i, snr in enumerate(config.snr_db)
    ]
    return SerResult(config=config, points=points, solver_failures=failures,
                     per_block_errors=per_block)


def run_blocklen(config: ExperimentConfig, threads=1):
    """SER at fixed SNR for each block length in ``config.n_sweep``.

    Reuses the same seed for every N, so blocks with equal indices see the
    same channel; ZF/RZF comparisons across N are therefore paired.
    """
    snr = (config.snr_db[0],)
    results = []
    for n in config.n_sweep:
        sub = replace(config, N=int(n), snr_db=snr)
        results.append(run_ser(sub, threads=threads))
    return results


def _timing_block(config, block_index):
    constellation = PskConstellation(config.M)
    channel, _, block, _ = _draw_block(config, block_index, constellation)
    out = {}
    if "CI_BLP" in config.schemes:
        start = time.perf_counter()
        precoder = solve_ci_blp(channel, block, config.p0)
        total = time.perf_counter() - start
        out["CI_BLP"] = (precoder.qp.solve_time, 1, total)
    if "CI_SLP" in config.schemes:
        start = time.perf_counter()
        qp_time = 0.0
        for n in range(config.N):
            slot = SymbolBlock(constellation, block.symbols[n : n + 1])
            qp_time += solve_primal_p1(channel, slot, config.p0).solve_time
        total = time.perf_counter() - start
        out["CI_SLP"] = (qp_time, config.N, total)
    return out


def run_timing(config: ExperimentConfig, end_to_end=True):
    """Time the QP solves of the CI schemes, one result row per scheme.

    Only the QP-solve calls are counted in the ``qp_time_*`` fields (the
    simplex QP for the block design; the per-slot active-set QP for the
    per-slot design), excluding matrix assembly; ``total_time_mean``
    additionally reports the honest end-to-end cost.  Runs sequentially.
    """
    timed = [s for s in config.schemes if s in ("CI_BLP", "CI_SLP")]
    if not timed:
        raise ConfigError("timing requires CI_BLP or CI_SLP in schemes")

    samples = {s: [] for s in timed}
    totals = {s: [] for s in timed}
    counts = {}
    for b in range(config.n_blocks):
        block_out = _timing_block(config, b)
        for scheme in timed:
            qp_time, n_qp, total = block_out[scheme]
            samples[scheme].append(qp_time)
            totals[scheme].append(total)
            counts[scheme] = n_qp

    dims = {"CI_BLP": 2 * config.N * config.K, "CI_SLP": 2 * config.K * config.N_T}
    rows = []
    for scheme in timed:
        arr = np.asarray(samples[scheme])
        rows.append(
            TimingRow(
                scheme=scheme,
                qp_per_block=counts[scheme],
                qp_dim=dims[scheme],
                qp_time_mean=float(arr.mean()),
                qp_time_p50=float(np.percentile(arr, 50)),
                qp_time_p95=float(np.percentile(arr, 95)),
                total_time_mean=float(np.mean(totals[scheme])) if end_to_end
                else float("nan"),
            )
        )
    return TimingResult(config=config, rows=rows)
