"""Exact first-order error accounting for the seeding segment.

Every elementary fault of the noise model is propagated once, alone,
through preparation and the two seeding rounds; its verdict is decided
from its full detector response on a same-size continuation (one noisy
round plus the noiseless closing round).  A lone fault is counted as a
logical error exactly when that response is empty and its residual class
is harmful: a non-empty response either trips post-selection or leaves a
syndrome that one clean correction round removes, since no single fault
can defeat matching at distance 3 and up.

Because each fault class carries a fixed rational weight (flips at the
init and measurement rates, Hadamard Paulis at a third of the one-qubit
rate, CNOT Paulis at a fifteenth of the two-qubit rate) the aggregate is
an exact rational coefficient per noise knob, no sampling, no floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

from .circuits import OpKind, Schedule, expand_phase1, expand_phase2, valid_schedules
from .engine import CLASS_NAMES, DetectorSet, FaultCatalog
from .lattice import Region, build_lattice
from .noise import (
    CLASS_ORDER,
    GENERIC_AXIS,
    _ANTICOMMUTING,
    AxisMode,
    Fault,
    location_table,
    two_qubit_pauli,
)

PARAMS = ("c2", "cI", "c1", "cM")
_CLASS_PARAM = {"init": "cI", "meas": "cM", "h": "c1", "cnot": "c2"}
_CLASS_WEIGHT = {
    "init": Fraction(1),
    "meas": Fraction(1),
    "h": Fraction(1, 3),
    "cnot": Fraction(1, 15),
}


@dataclass(frozen=True)
class CoefficientVector:
    """p_L = c2*p_2 + cI*p_I + c1*p_1 + cM*p_M + O(p^2), exact rationals."""

    c2: Fraction = Fraction(0)
    cI: Fraction = Fraction(0)
    c1: Fraction = Fraction(0)
    cM: Fraction = Fraction(0)

    def __post_init__(self):
        assert all(getattr(self, name) >= 0 for name in PARAMS)

    def __add__(self, other: "CoefficientVector") -> "CoefficientVector":
        return CoefficientVector(*(getattr(self, n) + getattr(other, n) for n in PARAMS))

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.c2, self.cI, self.c1, self.cM)

    def rate(self, noise) -> float:
        return float(self.c2 * Fraction(noise.p_2) + self.cI * Fraction(noise.p_I)
                     + self.c1 * Fraction(noise.p_1) + self.cM * Fraction(noise.p_M))

    def csv_fields(self) -> List[int]:
        out: List[int] = []
        for name in PARAMS:
            frac = getattr(self, name)
            out.extend((frac.numerator, frac.denominator))
        return out


@dataclass(frozen=True)
class FaultVerdict:
    fault: Fault
    phase1_detected: bool
    residual_class: str
    counted: bool
    param: str  # coefficient this fault's weight belongs to
    weight: Fraction

    def __post_init__(self):
        assert not (self.counted and self.phase1_detected)
        assert not (self.counted and self.residual_class == "I")


class _Stack:
    def __init__(self, d1: int, schedule: Schedule, diagonal_region: Region,
                 extra_rounds: int):
        lat = build_lattice(d1, d1, diagonal_region)
        phase1 = expand_phase1(lat, schedule)
        phase2 = expand_phase2(lat, schedule, extra_rounds)
        self.phase1 = phase1
        self.detset = DetectorSet(lat, extra_rounds)
        self.catalog = FaultCatalog(self.detset, phase1, phase2)
        self.prep_index = next(
            i for i, op in enumerate(phase1.layers[0])
            if op.kind is OpKind.PREP_MAGIC)


@lru_cache(maxsize=64)
def _stack(d1: int, schedule: Schedule, diagonal_region: Region,
           extra_rounds: int = 1) -> _Stack:
    return _Stack(d1, schedule, diagonal_region, extra_rounds)


def _prep_branches(axis_mode: AxisMode) -> Iterator[Tuple[str, str, Fraction]]:
    """(letter, param, weight) for the first-order seeding-channel branches."""
    if axis_mode.generic:
        yield "Z", "cI", Fraction(1)
        yield "X", "c1", Fraction(1, 3)
        yield "Z", "c1", Fraction(1, 3)
    else:
        yield _ANTICOMMUTING[axis_mode.pauli], "cI", Fraction(1)
        for letter in ("X", "Y", "Z"):
            yield letter, "c1", Fraction(1, 3)


def _paulis_of(cls: str, op) -> Iterator[Tuple[str, ...]]:
    if cls == "meas":
        yield ()
    elif cls == "init":
        yield ("X" if op.kind is OpKind.INIT_ZERO else "Z",)
    elif cls == "h":
        for letter in ("X", "Y", "Z"):
            yield (letter,)
    else:
        for code in range(1, 16):
            yield two_qubit_pauli(code)


def _harmful(axis_mode: AxisMode, word: int) -> bool:
    if axis_mode.generic:
        return word != 0
    return CLASS_NAMES[word] not in ("I", axis_mode.pauli)


def enumerate_first_order(d1: int, schedule: Schedule,
                          axis_mode: AxisMode = GENERIC_AXIS,
                          diagonal_region: Region = Region.I,
                          extra_rounds: int = 1,
                          ) -> Tuple[CoefficientVector, List[FaultVerdict]]:
    """Verdict for every preparation and seeding-segment fault, plus the
    exact rational coefficient each noise knob picks up from the counted
    ones.  extra_rounds sizes the continuation used for the syndrome-free
    check; verdicts must not depend on it (one clean full round already
    determines them)."""
    stack = _stack(d1, schedule, diagonal_region, extra_rounds)
    phase1_mask = stack.detset.phase1_mask
    totals: Dict[str, Fraction] = {name: Fraction(0) for name in PARAMS}
    verdicts: List[FaultVerdict] = []

    def record(fault, mask, word, param, weight):
        detected = bool(mask & phase1_mask)
        counted = mask == 0 and _harmful(axis_mode, word)
        if counted:
            totals[param] += weight
        verdicts.append(FaultVerdict(fault, detected, CLASS_NAMES[word],
                                     counted, param, weight))

    for letter, param, weight in _prep_branches(axis_mode):
        mask, word = stack.catalog.prep_response(letter)
        record(Fault(0, stack.prep_index, "prep", (letter,)),
               mask, word, param, weight)

    table = location_table(stack.phase1)
    for cls in CLASS_ORDER:
        param = _CLASS_PARAM[cls]
        weight = _CLASS_WEIGHT[cls]
        for loc, (step, j) in enumerate(table[cls]):
            op = stack.phase1.layers[step][j]
            for pauli in _paulis_of(cls, op):
                mask, word = stack.catalog.response_at(0, cls, loc, pauli)
                record(Fault(step, j, cls, pauli), mask, word, param, weight)

    return CoefficientVector(**{n: totals[n] for n in PARAMS}), verdicts


def schedule_search(d1: int, axis_mode: AxisMode = GENERIC_AXIS,
                    diagonal_region: Region = Region.I,
                    ) -> List[Tuple[Schedule, CoefficientVector]]:
    """Coefficients for every valid schedule, cheapest first (by c2, then
    c1, then the schedule token for a stable order)."""
    results = []
    for sched in valid_schedules():
        coeffs, _ = enumerate_first_order(d1, sched, axis_mode, diagonal_region)
        results.append((sched, coeffs))
    results.sort(key=lambda item: (item[1].c2, item[1].c1, item[0].token()))
    return results


def co_optimal(results: List[Tuple[Schedule, CoefficientVector]]) -> List[Schedule]:
    best = (results[0][1].c2, results[0][1].c1)
    return [s for s, c in results if (c.c2, c.c1) == best]


def coefficient_stability(schedule: Schedule,
                          d1s: Tuple[int, ...] = (3, 5, 7, 9),
                          axis_mode: AxisMode = GENERIC_AXIS,
                          ) -> Tuple[Dict[int, CoefficientVector], bool]:
    """Coefficient vector per seed distance and whether they all agree."""
    table = {}
    for d1 in d1s:
        table[d1], _ = enumerate_first_order(d1, schedule, axis_mode)
    vals = list(table.values())
    stable = all(v == vals[0] for v in vals[1:])
    return table, stable


CSV_HEADER = "schedule,c2_num,c2_den,cI_num,cI_den,c1_num,c1_den,cM_num,cM_den"


def csv_lines(results: List[Tuple[Schedule, CoefficientVector]]) -> List[str]:
    lines = [CSV_HEADER]
    for sched, coeffs in results:
        fields = [sched.token()] + [str(v) for v in coeffs.csv_fields()]
        lines.append(",".join(fields))
    return lines
