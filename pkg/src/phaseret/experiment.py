"""Monte Carlo success-rate harness with deterministic seeding.

Each (sparsity, trial) cell derives its own random stream from the base
seed, the algorithm and the sparsity value, so results are reproducible
bit for bit, trials may run in parallel, and removing one sparsity point
from a config leaves every other row unchanged.
"""

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .combinatorial import recover_signal as recover_combinatorial
from .errors import RecoveryError
from .sdp import recover_signal as recover_sdp
from .signals import (
    SparseModelParams,
    autocorrelation,
    equivalent,
    random_sparse_signal,
    support_set,
)

__all__ = [
    "ALGORITHMS",
    "ExperimentConfig",
    "ExperimentRow",
    "run_experiment",
    "rows_to_csv",
    "parse_config_file",
]

ALGORITHMS = ("combinatorial", "sdp", "both")

# stable stream identifiers so adding an algorithm never reshuffles
# existing ones
_ALGO_STREAM = {"combinatorial": 1, "sdp": 2}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a sparsity sweep at fixed signal length."""

    n: int
    sparsities: tuple
    trials_per_point: int = 100
    algorithm: str = "combinatorial"
    seed: int = 0
    tol: float = 1e-6
    output_path: str = None
    record_runtime: bool = False

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("n must be positive")
        spars = tuple(int(s) for s in self.sparsities)
        if not spars:
            raise ValueError("sparsities must not be empty")
        if any(s < 1 or s > self.n for s in spars):
            raise ValueError("each sparsity must lie in [1, n]")
        object.__setattr__(self, "sparsities", spars)
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class ExperimentRow:
    """Aggregated outcome of one (algorithm, sparsity) grid point."""

    algorithm: str
    n: int
    s: int
    trials: int
    successes: int
    success_rate: float
    mean_runtime_ms: float
    failure_breakdown: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.successes > self.trials:
            raise ValueError("successes cannot exceed trials")


def _trial_seed(base_seed: int, algorithm: str, s: int, trial: int):
    return np.random.SeedSequence(
        [base_seed, _ALGO_STREAM[algorithm], s, trial]
    )


def _run_trial(cfg: ExperimentConfig, algorithm: str, s: int, trial: int):
    """One draw-recover-score cycle; returns (kind_or_None, runtime_s)."""
    seed_seq = _trial_seed(cfg.seed, algorithm, s, trial)
    draw_seed = int(seed_seq.generate_state(1)[0])
    signal = random_sparse_signal(
        SparseModelParams(n=cfg.n, s=s, seed=draw_seed)
    )
    a = autocorrelation(signal)
    k = len(support_set(signal).indices)
    start = time.perf_counter()
    try:
        if algorithm == "combinatorial":
            recovered = recover_combinatorial(a)
        else:
            recovered = recover_sdp(a, k)
        elapsed = time.perf_counter() - start
    except RecoveryError as exc:
        return exc.kind, time.perf_counter() - start
    if equivalent(recovered, signal, tol=cfg.tol):
        return None, elapsed
    return "WrongAnswer", elapsed


def _max_workers() -> int:
    raw = os.environ.get("PHASERET_THREADS", "")
    try:
        workers = int(raw)
    except ValueError:
        return 1
    return max(workers, 1)


def run_experiment(cfg: ExperimentConfig):
    """Execute the sweep and return its rows, writing CSV if configured.

    Runs sequentially unless the ``PHASERET_THREADS`` environment variable
    asks for more workers.  Runtime columns are written as 0.0 unless
    ``record_runtime`` is set, keeping default output byte-stable across
    machines and runs.
    """
    algorithms = (
        ("combinatorial", "sdp") if cfg.algorithm == "both"
        else (cfg.algorithm,)
    )
    cells = [
        (algo, s, trial)
        for algo in algorithms
        for s in cfg.sparsities
        for trial in range(cfg.trials_per_point)
    ]
    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(
                pool.map(lambda c: _run_trial(cfg, *c), cells)
            )
    else:
        outcomes = [_run_trial(cfg, *cell) for cell in cells]

    rows = []
    index = 0
    for algo in algorithms:
        for s in cfg.sparsities:
            chunk = outcomes[index: index + cfg.trials_per_point]
            index += cfg.trials_per_point
            successes = sum(1 for kind, _ in chunk if kind is None)
            breakdown = {}
            for kind, _ in chunk:
                if kind is not None:
                    breakdown[kind] = breakdown.get(kind, 0) + 1
            mean_ms = (
                1000.0 * sum(rt for _, rt in chunk) / len(chunk)
                if cfg.record_runtime
                else 0.0
            )
            rows.append(
                ExperimentRow(
                    algorithm=algo,
                    n=cfg.n,
                    s=s,
                    trials=cfg.trials_per_point,
                    successes=successes,
                    success_rate=successes / cfg.trials_per_point,
                    mean_runtime_ms=mean_ms,
                    failure_breakdown=breakdown,
                )
            )
    if cfg.output_path is not None:
        with open(cfg.output_path, "w") as fh:
            fh.write(rows_to_csv(rows))
    return rows


def rows_to_csv(rows) -> str:
    """Render rows as CSV with one failure column per observed error kind."""
    kinds = sorted({kind for row in rows for kind in row.failure_breakdown})
    header = "algorithm,n,s,trials,successes,success_rate,mean_runtime_ms"
    header += "".join(f",failures_{kind}" for kind in kinds)
    lines = [header]
    for row in rows:
        cells = [
            row.algorithm,
            str(row.n),
            str(row.s),
            str(row.trials),
            str(row.successes),
            f"{row.success_rate:.6f}",
            f"{row.mean_runtime_ms:.3f}",
        ]
        cells.extend(
            str(row.failure_breakdown.get(kind, 0)) for kind in kinds
        )
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


_CONFIG_KEYS = {
    "n": int,
    "trials_per_point": int,
    "seed": int,
    "algorithm": str,
    "tol": float,
    "output_path": str,
    "record_runtime": None,
    "sparsities": None,
}


def parse_config_file(path: str) -> ExperimentConfig:
    """Read a flat ``key = value`` config file.

    Blank lines and ``#`` comments are ignored.  ``sparsities`` is a
    comma-separated list; ``record_runtime`` accepts true/false.
    """
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(
                    f"{path}:{lineno}: expected key = value"
                )
            key, value = (part.strip() for part in stripped.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key in raw:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value
    if "n" not in raw or "sparsities" not in raw:
        raise ValueError(f"{path}: keys 'n' and 'sparsities' are required")
    kwargs = {}
    for key, value in raw.items():
        if key == "sparsities":
            kwargs[key] = tuple(
                int(part) for part in value.split(",") if part.strip()
            )
        elif key == "record_runtime":
            lowered = value.lower()
            if lowered not in ("true", "false"):
                raise ValueError(
                    f"{path}: record_runtime must be true or false"
                )
            kwargs[key] = lowered == "true"
        else:
            converter = _CONFIG_KEYS[key]
            kwargs[key] = converter(value)
    return ExperimentConfig(**kwargs)
