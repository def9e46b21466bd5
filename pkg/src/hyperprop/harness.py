"""Parameter sweeps with deterministic seeding and CSV output.

Each trial of each ``(n, epsilon, r)`` cell gets its own stream
``RngStream.for_trial(base_seed, cell, trial)``, so rows never depend on how
many workers ran them or in which order they finished.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from itertools import product
from pathlib import Path

from .hypergraph import generate
from .model import ModelParams, classify, k0, k1, threshold_I
from .propagation import Engine, StartMode, census, is_propagation_connected
from .rng import RngStream

__all__ = ["SweepConfig", "TrialRecord", "run_trial", "run_sweep", "CSV_COLUMNS", "THREADS_ENV"]

log = logging.getLogger(__name__)

THREADS_ENV = "HYPERPROP_THREADS"
CSV_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SweepConfig:
    epsilon_grid: tuple[float, ...]
    r_grid: tuple[float, ...]
    n_list: tuple[int, ...]
    trials_per_cell: int = 1
    base_seed: int = 0
    engine: Engine = Engine.CLOSURE
    start_mode: StartMode = StartMode.SINGLE
    census_samples: int = 50
    size_cap: int | None = None
    output_path: str | None = None

    def __post_init__(self) -> None:
        for name in ("epsilon_grid", "r_grid", "n_list"):
            value = getattr(self, name)
            if not value:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, tuple(value))
        object.__setattr__(self, "engine", Engine(self.engine))
        object.__setattr__(self, "start_mode", StartMode(self.start_mode))
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if self.census_samples < 1:
            raise ValueError("census_samples must be >= 1")
        for n, eps, r in self.cells():
            ModelParams(n, eps, r)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | os.PathLike) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def cells(self) -> list[tuple[int, float, float]]:
        return list(product(self.n_list, self.epsilon_grid, self.r_grid))

    def default_cap(self, params: ModelParams) -> int:
        if self.size_cap is not None:
            return int(self.size_cap)
        I = threshold_I(params.epsilon, params.r)
        bound = k1(params, 2.0 - I) * math.log(params.n)
        return int(math.ceil(max(bound, 0.95 * params.n)))


@dataclass
class TrialRecord:
    n: int
    epsilon: float
    r: float
    I: float
    regime: str
    trial_index: int
    seed: int
    engine: str
    start_mode: str
    connected: int | str
    max_component: int | None
    good_count: int | None
    k0_log_n: float
    edges2_count: int | None
    edges3_count: int | None
    runtime_ms: float

    @property
    def failed(self) -> bool:
        return self.connected == "error"

    def row(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                out.append("")
            elif f.name == "runtime_ms":
                out.append(f"{v:.3f}")
            else:
                out.append(repr(v) if isinstance(v, float) else str(v))
        return out


CSV_COLUMNS = tuple(f.name for f in fields(TrialRecord))


def run_trial(config: SweepConfig, cell: int, trial: int) -> TrialRecord:
    n, eps, r = config.cells()[cell]
    params = ModelParams(n, eps, r)
    I = threshold_I(eps, r)
    stream = RngStream.for_trial(config.base_seed, cell, trial)
    base = dict(
        n=n, epsilon=eps, r=r, I=I, regime=str(classify(I)), trial_index=trial,
        seed=stream.seed, engine=config.engine.value, start_mode=config.start_mode.value,
        k0_log_n=k0(params) * math.log(n),
    )
    start = time.perf_counter()
    try:
        h = generate(params, stream.child(0))
        cen = census(
            h, params, config.census_samples, stream.child(1),
            mode=config.start_mode, engine=config.engine, cap=config.default_cap(params),
        )
        biggest = cen.max_size
        if config.engine is Engine.CLOSURE:
            decision = is_propagation_connected(h)
            connected = int(decision.connected)
            biggest = max(biggest, decision.max_closure)
        else:
            connected = int(biggest == n)
        return TrialRecord(
            **base, connected=connected, max_component=biggest, good_count=cen.good_count,
            edges2_count=h.m2, edges3_count=h.m3,
            runtime_ms=1000.0 * (time.perf_counter() - start),
        )
    except Exception:
        log.exception("trial failed: cell=%d trial=%d", cell, trial)
        return TrialRecord(
            **base, connected="error", max_component=None, good_count=None,
            edges2_count=None, edges3_count=None,
            runtime_ms=1000.0 * (time.perf_counter() - start),
        )


def _task(args):
    config, cell, trial = args
    return run_trial(config, cell, trial)


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(THREADS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))


def write_csv(records, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())


def run_sweep(
    config: SweepConfig, workers: int | None = None, output: str | os.PathLike | None = None
) -> list[TrialRecord]:
    """Run every trial of every cell and write the CSV.

    Rows come out ordered by ``(cell, trial)`` whatever the worker count.
    """
    tasks = [
        (config, cell, trial)
        for cell in range(len(config.cells()))
        for trial in range(config.trials_per_cell)
    ]
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) == 1:
        records = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    errors = sum(rec.failed for rec in records)
    if errors:
        log.warning("%d of %d trials failed", errors, len(records))
    path = output or config.output_path
    if path is not None:
        buf = io.StringIO()
        write_csv(records, buf)
        Path(path).write_text(buf.getvalue(), encoding="utf-8")
    return records


def config_template() -> dict:
    cfg = SweepConfig(epsilon_grid=(1.0,), r_grid=(0.1, 0.5, 1.0), n_list=(1024,))
    data = asdict(cfg)
    data["engine"] = cfg.engine.value
    data["start_mode"] = cfg.start_mode.value
    return data

