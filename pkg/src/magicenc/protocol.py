"""One full encoding trial: post-selected seeding, growth, decode, classify.

Two execution paths share one sampling discipline (prep draw first, then
the seeding segment, then, only for accepted trials, the growth segment):

  * run_trial propagates sampled faults through the explicit circuits and
    is the reference implementation;
  * acceptance_and_error folds each fault's precomputed detector/word
    response from the fault catalog, which is orders of magnitude faster
    and bit-identical to run_trial for the same per-trial generator.

Per-trial generators come from trial_rng(master_seed, index), so aggregate
results depend only on (config, master_seed, n_trials), never on worker
count or scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from .circuits import (
    OPTIMAL_SCHEDULE,
    PHASE2_SCHEDULE,
    OpKind,
    Schedule,
    expand_phase1,
    expand_phase2,
)
from .decoder import DecoderTables, decode_word
from .engine import CLASS_NAMES, DetectorSet, FaultCatalog, propagate
from .lattice import Region, build_lattice
from .noise import GENERIC_AXIS, AxisMode, Fault, NoiseParams, prep_fault, sample_faults

ACCEPTED = "accepted"
DISCARDED = "discarded"


@dataclass(frozen=True)
class ProtocolConfig:
    d1: int
    d2: int
    noise: NoiseParams
    # seeding-segment CNOT order; growth rounds always use PHASE2_SCHEDULE
    schedule: Schedule = OPTIMAL_SCHEDULE
    phase2_rounds: Optional[int] = None  # defaults to d2
    axis_mode: AxisMode = GENERIC_AXIS
    diagonal_region: Region = Region.I

    def __post_init__(self):
        if self.d1 % 2 == 0 or self.d2 % 2 == 0:
            raise ValueError("distances must be odd")
        if not 3 <= self.d1 <= self.d2:
            raise ValueError("need 3 <= d1 <= d2")
        if self.rounds < 1:
            raise ValueError("phase2_rounds must be >= 1")

    @property
    def rounds(self) -> int:
        return self.d2 if self.phase2_rounds is None else self.phase2_rounds


@dataclass(frozen=True)
class TrialOutcome:
    status: str
    residual_class: Optional[str]  # accepted trials only
    harmful: int

    @property
    def accepted(self) -> bool:
        return self.status == ACCEPTED


class Runtime:
    """Everything derivable from a config except the noise draw."""

    def __init__(self, d1: int, d2: int, schedule: Schedule, rounds: int,
                 diagonal_region: Region):
        self.lat = build_lattice(d2, d1, diagonal_region)
        self.phase1 = expand_phase1(self.lat, schedule)
        self.phase2 = expand_phase2(self.lat, PHASE2_SCHEDULE, rounds)
        self.detset = DetectorSet(self.lat, rounds)
        self.catalog = FaultCatalog(self.detset, self.phase1, self.phase2)
        self.tables = DecoderTables(self.detset, self.catalog)
        self.prep_index = next(
            i for i, op in enumerate(self.phase1.layers[0])
            if op.kind is OpKind.PREP_MAGIC)


@lru_cache(maxsize=8)
def _runtime(d1: int, d2: int, schedule: Schedule, rounds: int,
             diagonal_region: Region) -> Runtime:
    return Runtime(d1, d2, schedule, rounds, diagonal_region)


def runtime_for(cfg: ProtocolConfig) -> Runtime:
    return _runtime(cfg.d1, cfg.d2, cfg.schedule, cfg.rounds, cfg.diagonal_region)


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(seq))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _harmful(mode: AxisMode, cls_word: int) -> int:
    if mode.generic:
        return int(cls_word != 0)
    return int(CLASS_NAMES[cls_word] not in ("I", mode.pauli))


def run_trial(cfg: ProtocolConfig, seed) -> TrialOutcome:
    """Reference path: explicit fault propagation through both circuits."""
    rt = runtime_for(cfg)
    rng = _as_rng(seed)

    letter = prep_fault(cfg.axis_mode, cfg.noise, rng)
    faults1 = list(sample_faults(rt.phase1, cfg.noise, rng))
    if letter is not None:
        faults1.append(Fault(0, rt.prep_index, "prep", (letter,)))
    r1 = propagate(rt.phase1, faults1)
    flips = dict(r1.round_flips)
    if rt.detset.evaluate(flips) & rt.detset.phase1_mask:
        return TrialOutcome(DISCARDED, None, 0)

    faults2 = sample_faults(rt.phase2, cfg.noise, rng)
    r2 = propagate(rt.phase2, faults2, frame=r1.frame, round_offset=2)
    flips.update(r2.round_flips)
    mask = rt.detset.evaluate(flips)
    cls_word = r2.frame.class_word(rt.lat) ^ decode_word(rt.tables, mask)
    return TrialOutcome(ACCEPTED, CLASS_NAMES[cls_word],
                        _harmful(cfg.axis_mode, cls_word))


def injected_trial(cfg: ProtocolConfig, prep_letter: Optional[str] = None,
                   faults1=(), faults2=()) -> TrialOutcome:
    """Deterministic trial with hand-picked faults instead of sampled noise.

    Runs the identical discard/decode/classify pipeline as run_trial, which
    makes single-fault behaviour directly inspectable in tests and oracles.
    """
    rt = runtime_for(cfg)
    f1 = list(faults1)
    if prep_letter is not None:
        f1.append(Fault(0, rt.prep_index, "prep", (prep_letter,)))
    r1 = propagate(rt.phase1, f1)
    flips = dict(r1.round_flips)
    if rt.detset.evaluate(flips) & rt.detset.phase1_mask:
        return TrialOutcome(DISCARDED, None, 0)
    r2 = propagate(rt.phase2, list(faults2), frame=r1.frame, round_offset=2)
    flips.update(r2.round_flips)
    mask = rt.detset.evaluate(flips)
    cls_word = r2.frame.class_word(rt.lat) ^ decode_word(rt.tables, mask)
    return TrialOutcome(ACCEPTED, CLASS_NAMES[cls_word],
                        _harmful(cfg.axis_mode, cls_word))


def _fast_trial(rt: Runtime, cfg: ProtocolConfig, rng: np.random.Generator) -> Tuple[bool, int]:
    """(accepted, class word) via catalog response folding."""
    mask = 0
    word = 0
    letter = prep_fault(cfg.axis_mode, cfg.noise, rng)
    if letter is not None:
        m, w = rt.catalog.prep_response(letter)
        mask ^= m
        word ^= w
    for f in sample_faults(rt.phase1, cfg.noise, rng):
        m, w = rt.catalog.response(0, f)
        mask ^= m
        word ^= w
    if mask & rt.detset.phase1_mask:
        return False, 0
    for f in sample_faults(rt.phase2, cfg.noise, rng):
        m, w = rt.catalog.response(1, f)
        mask ^= m
        word ^= w
    return True, word ^ decode_word(rt.tables, mask)


def acceptance_and_error(cfg: ProtocolConfig, n_trials: int, master_seed: int,
                         start: int = 0) -> Tuple[float, Optional[float], Dict[str, int]]:
    """Aggregate trial indices [start, start + n_trials).

    Returns (accept_rate, p_L, counts); p_L is None when nothing was
    accepted.  counts holds discarded/I/X/Y/Z/harmful tallies.  The start
    offset lets callers shard or extend runs without replaying trials.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rt = runtime_for(cfg)
    counts = {DISCARDED: 0, "I": 0, "X": 0, "Y": 0, "Z": 0, "harmful": 0}
    for i in range(start, start + n_trials):
        accepted, cls_word = _fast_trial(rt, cfg, trial_rng(master_seed, i))
        if not accepted:
            counts[DISCARDED] += 1
            continue
        counts[CLASS_NAMES[cls_word]] += 1
        counts["harmful"] += _harmful(cfg.axis_mode, cls_word)
    accepted_n = n_trials - counts[DISCARDED]
    accept_rate = accepted_n / n_trials
    p_l = counts["harmful"] / accepted_n if accepted_n else None
    return accept_rate, p_l, counts
