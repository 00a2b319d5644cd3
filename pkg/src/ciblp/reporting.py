"""Result serialization: versioned CSV bodies, gnuplot scripts, run manifests.

CSV bodies are deterministic for a fixed config and seed (timestamps live
only in the manifest); the schema version rides in a leading comment line.
"""

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import yaml

from . import __version__
from .config import config_to_dict

SCHEMA_TAG = "ciblp-results-v1"

SER_COLUMNS = (
    "scheme,K,N_T,M,N,p0,snr_db,symbols_sent,symbol_errors,ser,"
    "ci95_halfwidth,seed"
)
TIMING_COLUMNS = (
    "scheme,K,N_T,M,N,p0,n_blocks,qp_per_block,qp_dim,qp_time_mean_s,"
    "qp_time_p50_s,qp_time_p95_s,total_time_mean_s,seed"
)


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def ser_csv_body(results):
    """CSV body for one or more SER results (list of :class:`SerResult`)."""
    lines = [f"# {SCHEMA_TAG} ser", SER_COLUMNS]
    for result in results:
        cfg = result.config
        for point in result.points:
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (
                        point.scheme, cfg.K, cfg.N_T, cfg.M, cfg.N, cfg.p0,
                        point.snr_db, point.sent, point.errors, point.ser,
                        point.ci95_halfwidth, cfg.seed,
                    )
                )
            )
    return "\n".join(lines) + "\n"


def timing_csv_body(results):
    """CSV body for one or more :class:`TimingResult` objects."""
    lines = [f"# {SCHEMA_TAG} timing", TIMING_COLUMNS]
    for result in results:
        cfg = result.config
        for row in result.rows:
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (
                        row.scheme, cfg.K, cfg.N_T, cfg.M, cfg.N, cfg.p0,
                        cfg.n_blocks, row.qp_per_block, row.qp_dim,
                        row.qp_time_mean, row.qp_time_p50, row.qp_time_p95,
                        row.total_time_mean, cfg.seed,
                    )
                )
            )
    return "\n".join(lines) + "\n"


def ser_plot_script(csv_name, schemes, x_column, x_label):
    """Self-contained gnuplot script plotting SER curves per scheme."""
    series = ", \\\n    ".join(
        f"csv using {x_column}:(strcol(1) eq '{s}' ? column(10) : 1/0) "
        f"with linespoints title '{s}'"
        for s in schemes
    )
    return f"""# {SCHEMA_TAG} plot script (gnuplot)
csv = '{csv_name}'
set datafile separator ','
set logscale y
set xlabel '{x_label}'
set ylabel 'SER'
set grid
set key outside
plot \\
    {series}
"""


def timing_plot_script(csv_name, schemes):
    """Gnuplot script for QP time against block length."""
    series = ", \\\n    ".join(
        f"csv using 5:(strcol(1) eq '{s}' ? column(10) : 1/0) "
        f"with linespoints title '{s}'"
        for s in schemes
    )
    return f"""# {SCHEMA_TAG} plot script (gnuplot)
csv = '{csv_name}'
set datafile separator ','
set logscale y
set xlabel 'block length N'
set ylabel 'QP time per block [s]'
set grid
set key outside
plot \\
    {series}
"""


def artifact_version(config):
    """Version string tying the package release to the exact run inputs."""
    digest = hashlib.sha256(
        json.dumps(config_to_dict(config), sort_keys=True).encode()
    ).hexdigest()[:8]
    return f"ciblp-{__version__}+cfg.{digest}"


def utc_now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_manifest(path, *, command, config, config_path, seed, threads,
                   started, finished, outputs, solver_failures=None,
                   status="ok", error=None):
    """Write the run manifest (YAML).  Returns the manifest path."""
    payload = {
        "artifact_version": artifact_version(config),
        "command": command,
        "config": config_to_dict(config),
        "config_path": str(config_path),
        "seed": seed,
        "threads": threads,
        "started": started,
        "finished": finished,
        "outputs": [str(o) for o in outputs],
        "status": status,
    }
    if solver_failures:
        payload["solver_failures"] = dict(solver_failures)
    if error is not None:
        payload["error"] = {"type": type(error).__name__, "message": str(error)}
    path = Path(path)
    path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
    return path
