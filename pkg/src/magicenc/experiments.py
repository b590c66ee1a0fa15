"""Monte Carlo sweeps, interval statistics, and resource planners.

The sweep harness distributes fixed-size trial shards over a process pool
and aggregates integer counters only, so output is byte-identical for any
worker count.  Each sweep point owns a disjoint slice of the trial-index
space (stride 2**40) under the shared master seed, which keeps the
per-trial seeding contract from `protocol` intact across points and lets
a point grow its budget without replaying earlier trials.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from statistics import NormalDist
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .circuits import OPTIMAL_SCHEDULE, Schedule
from .noise import NoiseParams
from .protocol import DISCARDED, ProtocolConfig, acceptance_and_error

POINT_STRIDE = 2 ** 40
SHARD_TRIALS = 20_000
MAX_GROWTH_CHUNKS = 1000

CSV_COLUMNS = ("p2", "pI", "pM", "p1", "d1", "d2", "schedule", "trials",
               "accepted", "harmful", "accept_rate", "pL", "pL_ci_low",
               "pL_ci_high", "master_seed")

_CLASSES = ("I", "X", "Y", "Z")


@dataclass(frozen=True)
class SweepSpec:
    """One logical-error-rate sweep: a list of two-qubit fault rates plus a
    ratio vector tying the single-qubit, init and readout rates to them."""

    p2_values: Tuple[float, ...]
    ratios: Tuple[float, float, float] = (0.0, 0.0, 0.0)  # p_I, p_M, p_1 / p_2
    d1: int = 3
    d2: int = 5
    trials: int = 10_000
    master_seed: int = 0
    schedule: str = OPTIMAL_SCHEDULE.token()

    def __post_init__(self):
        if not self.p2_values:
            raise ValueError("need at least one p2 value")
        if any(p <= 0 for p in self.p2_values):
            raise ValueError("p2 values must be strictly positive")
        if len(self.ratios) != 3 or any(r < 0 for r in self.ratios):
            raise ValueError("ratios must be three non-negative numbers")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        Schedule.from_token(self.schedule)  # fail fast on bad tokens

    def point_config(self, p2: float) -> ProtocolConfig:
        ri, rm, r1 = self.ratios
        noise = NoiseParams.from_ratios(p2, pI_ratio=ri, pM_ratio=rm, p1_ratio=r1)
        return ProtocolConfig(self.d1, self.d2, noise,
                              schedule=Schedule.from_token(self.schedule))


@dataclass(frozen=True, eq=False)
class SweepRecord:
    p2: float
    pI: float
    pM: float
    p1: float
    d1: int
    d2: int
    schedule: str
    trials: int
    accepted: int
    harmful: int
    accept_rate: float
    pL: float  # nan when nothing was accepted
    pL_ci_low: float
    pL_ci_high: float
    master_seed: int

    def __post_init__(self):
        assert 0 <= self.accepted <= self.trials
        assert 0 <= self.harmful <= self.accepted
        if not math.isnan(self.pL):
            assert self.pL_ci_low <= self.pL <= self.pL_ci_high

    def __eq__(self, other):
        if not isinstance(other, SweepRecord):
            return NotImplemented

        def same(a, b):
            if isinstance(a, float) and isinstance(b, float):
                return a == b or (math.isnan(a) and math.isnan(b))
            return a == b

        return all(same(getattr(self, f.name), getattr(other, f.name))
                   for f in fields(self))

    def csv_row(self) -> List[str]:
        return [repr(v) if isinstance(v, float) else str(v)
                for v in (getattr(self, name) for name in CSV_COLUMNS)]


def wilson_interval(successes: int, trials: int,
                    confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval, clamped to [0, 1]."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    z = NormalDist().inv_cdf((1 + confidence) / 2)
    n = trials
    phat = successes / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    # the score bounds hit the endpoints exactly at k=0 / k=n; keep them
    # there despite float residue
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


def _shard_counts(cfg: ProtocolConfig, n: int, master_seed: int,
                  start: int) -> Dict[str, int]:
    _, _, counts = acceptance_and_error(cfg, n, master_seed, start)
    return counts


def _shards(total: int, first_index: int) -> List[Tuple[int, int]]:
    out = []
    done = 0
    while done < total:
        n = min(SHARD_TRIALS, total - done)
        out.append((first_index + done, n))
        done += n
    return out


def _count_trials(cfg: ProtocolConfig, n: int, master_seed: int, base: int,
                  pool: Optional[ProcessPoolExecutor]) -> Dict[str, int]:
    parts = _shards(n, base)
    if pool is None:
        results = [_shard_counts(cfg, size, master_seed, start)
                   for start, size in parts]
    else:
        futures = [pool.submit(_shard_counts, cfg, size, master_seed, start)
                   for start, size in parts]
        results = [f.result() for f in futures]
    total = {DISCARDED: 0, "harmful": 0, **{c: 0 for c in _CLASSES}}
    for counts in results:
        for key, val in counts.items():
            total[key] += val
    return total


def _point_record(cfg: ProtocolConfig, trials_per_chunk: int,
                  master_seed: int, index: int,
                  pool: Optional[ProcessPoolExecutor],
                  min_accepted: int) -> SweepRecord:
    base = index * POINT_STRIDE
    counts = _count_trials(cfg, trials_per_chunk, master_seed, base, pool)
    trials = trials_per_chunk
    chunks = 0
    while trials - counts[DISCARDED] < min_accepted:
        chunks += 1
        if chunks > MAX_GROWTH_CHUNKS:
            raise RuntimeError(
                "point p2=%g still below %d accepted trials after %d extra "
                "chunks; acceptance is too low for this budget"
                % (cfg.noise.p_2, min_accepted, chunks - 1))
        extra = _count_trials(cfg, trials_per_chunk, master_seed,
                              base + trials, pool)
        for key, val in extra.items():
            counts[key] += val
        trials += trials_per_chunk
    accepted = trials - counts[DISCARDED]
    if accepted:
        p_l = counts["harmful"] / accepted
        ci_low, ci_high = wilson_interval(counts["harmful"], accepted)
    else:
        p_l = ci_low = ci_high = float("nan")
    noise = cfg.noise
    return SweepRecord(
        p2=noise.p_2, pI=noise.p_I, pM=noise.p_M, p1=noise.p_1,
        d1=cfg.d1, d2=cfg.d2, schedule=cfg.schedule.token(),
        trials=trials, accepted=accepted, harmful=counts["harmful"],
        accept_rate=accepted / trials, pL=p_l,
        pL_ci_low=ci_low, pL_ci_high=ci_high,
        master_seed=master_seed)


def run_sweep(spec: SweepSpec, out: Optional[str] = None,
              threads: int = 1, min_accepted: int = 0,
              progress: Optional[Callable[[SweepRecord], None]] = None,
              ) -> List[SweepRecord]:
    """One record per p2 value; optionally also written to a CSV file."""
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        records = []
        for index, p2 in enumerate(spec.p2_values):
            rec = _point_record(spec.point_config(p2), spec.trials,
                                spec.master_seed, index, pool, min_accepted)
            records.append(rec)
            if progress is not None:
                progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    if out is not None:
        write_csv(records, out)
    return records


def simulate_point(cfg: ProtocolConfig, trials: int, master_seed: int,
                   threads: int = 1, min_accepted: int = 0) -> SweepRecord:
    """Single-point run on an explicit config (any axis/diagonal/noise mix)."""
    pool = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        return _point_record(cfg, trials, master_seed, 0, pool, min_accepted)
    finally:
        if pool is not None:
            pool.shutdown()


def write_csv(records: Sequence[SweepRecord], path: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for rec in records:
                writer.writerow(rec.csv_row())
    except OSError as exc:
        raise OSError("cannot write sweep CSV to %r: %s" % (path, exc)) from exc


_FIELD_TYPES = {f.name: f.type for f in fields(SweepRecord)}


def parse_csv(path: str) -> List[SweepRecord]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if tuple(header or ()) != CSV_COLUMNS:
                raise ValueError("unexpected sweep CSV header in %r: %r"
                                 % (path, header))
            records = []
            for row in reader:
                if len(row) != len(CSV_COLUMNS):
                    raise ValueError("malformed sweep CSV row in %r: %r"
                                     % (path, row))
                kwargs = {}
                for name, text in zip(CSV_COLUMNS, row):
                    caster = int if _FIELD_TYPES[name] == "int" else (
                        str if _FIELD_TYPES[name] == "str" else float)
                    kwargs[name] = caster(text)
                records.append(SweepRecord(**kwargs))
            return records
    except OSError as exc:
        raise OSError("cannot read sweep CSV from %r: %s" % (path, exc)) from exc


# --- resource planners -------------------------------------------------

DISTILLATION_THRESHOLD = 1 / math.sqrt(35)


def plan_copies(success_prob: float, copies: int) -> float:
    """Probability that at least one of `copies` independent attempts lands."""
    if not 0 <= success_prob <= 1:
        raise ValueError("success_prob must lie in [0, 1]")
    if copies < 1:
        raise ValueError("copies must be >= 1")
    return 1 - (1 - success_prob) ** copies


def available_copies(d1: int, d2: int) -> int:
    """How many seed-size blocks tile the full lattice."""
    if d1 < 1 or d2 < d1:
        raise ValueError("need 1 <= d1 <= d2")
    return ((2 * d2 - 1) // (2 * d1 - 1)) ** 2


def plan_distillation(p_in: float, target: float) -> Tuple[int, List[float]]:
    """Rounds of 15-to-1 cubing (p -> 35 p^3) to reach the target, with the
    full trajectory.  Converges only below the 1/sqrt(35) fixed point."""
    if target <= 0:
        raise ValueError("target must be positive")
    if not 0 < p_in < DISTILLATION_THRESHOLD:
        raise ValueError(
            "p_in=%g does not converge: need 0 < p_in < 1/sqrt(35) ~= %.4f"
            % (p_in, DISTILLATION_THRESHOLD))
    trajectory = [p_in]
    while trajectory[-1] > target:
        trajectory.append(35 * trajectory[-1] ** 3)
    return len(trajectory) - 1, trajectory
