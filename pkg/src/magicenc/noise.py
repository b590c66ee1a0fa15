"""Four-parameter circuit noise model and fault sampling.

Each operation type carries its own channel, applied after the perfect
operation: initialization flips to the orthogonal state with probability
p_I, measurement results flip with probability p_M, and CNOTs suffer
two-qubit depolarizing noise of strength p_2 (each of the 15 non-identity
Pauli pairs p_2/15).  Idle qubits are noiseless.

p_1 is the single-qubit gate strength; in the sampled model it drives
only the magic-state rotation (prep_fault below).  The readout Hadamards
carry no channel: any single Hadamard fault flips an encoding-phase
detector, so they contribute nothing at first order (the enumerator in
the oracle module scores them at weight p_1/3 to confirm exactly that),
and the accepted-fraction targets in the acceptance tests only come out
right when the H locations are noiseless.

The magic-state preparation gate is special-cased by prep_fault: for a
generic rotation axis both non-axis depolarizing components are harmful,
so the channel is represented by the fixed injections Z (init error,
probability p_I) and X or Z (gate error, probability p_1/3 each, the
remaining p_1/3 branch being the harmless axis-aligned component).

The draw order of sample_faults is part of its contract (the batched
trial runner reproduces it draw for draw): for each sampled class in the
fixed order init, measure, cnot, one binomial count is drawn, then a
without-replacement index draw, sorted, then Pauli labels where the
class has a choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .circuits import Circuit, OpKind

PAULI_LETTERS = ("I", "X", "Y", "Z")

# location classes in canonical order.  "h" is enumeration-only: the oracle
# walks those locations, the sampler never emits there.
CLASS_ORDER = ("init", "meas", "h", "cnot")
SAMPLED_CLASSES = ("init", "meas", "cnot")

_CLASS_KINDS = {
    "init": (OpKind.INIT_ZERO, OpKind.INIT_PLUS),
    "meas": (OpKind.MEASURE_Z,),
    "h": (OpKind.HADAMARD,),
    "cnot": (OpKind.CNOT,),
}


@dataclass(frozen=True)
class NoiseParams:
    p_I: float = 0.0
    p_M: float = 0.0
    p_1: float = 0.0
    p_2: float = 0.0

    def __post_init__(self):
        for name in ("p_I", "p_M", "p_1", "p_2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError("%s=%r outside [0,1]" % (name, v))

    def of_class(self, cls: str) -> float:
        """Per-location probability of the sampled classes ("h" has none)."""
        return {"init": self.p_I, "meas": self.p_M, "cnot": self.p_2}[cls]

    @staticmethod
    def from_ratios(p2: float, pI_ratio: float = 0.0, pM_ratio: float = 0.0,
                    p1_ratio: float = 0.0) -> "NoiseParams":
        return NoiseParams(p_I=p2 * pI_ratio, p_M=p2 * pM_ratio, p_1=p2 * p1_ratio, p_2=p2)


@dataclass(frozen=True)
class AxisMode:
    """Magic-state rotation axis: generic (non-Pauli) when pauli is None,
    otherwise an exact Pauli eigenstate used for cross-validation runs."""

    pauli: Optional[str] = None

    def __post_init__(self):
        if self.pauli is not None and self.pauli not in ("X", "Y", "Z"):
            raise ValueError("pauli axis must be X, Y or Z")

    @property
    def generic(self) -> bool:
        return self.pauli is None


GENERIC_AXIS = AxisMode(None)


@dataclass(frozen=True)
class Fault:
    """A single sampled fault.

    step/op_index locate the operation inside the circuit; pauli holds one
    letter per operation qubit ("I" allowed on one side of a CNOT pair),
    and is empty for measurement flips.
    """

    step: int
    op_index: int
    kind: str  # init | meas | h | cnot | prep
    pauli: Tuple[str, ...]

    def __post_init__(self):
        assert self.kind in ("init", "meas", "h", "cnot", "prep")
        if self.kind == "meas":
            assert self.pauli == ()
        elif self.kind == "cnot":
            assert len(self.pauli) == 2 and self.pauli != ("I", "I")
        else:
            assert len(self.pauli) == 1 and self.pauli[0] != "I"


def location_table(circuit: Circuit) -> dict:
    """{class: [(step, op_index), ...]} in canonical order, cached on the
    circuit.  Operations in noiseless rounds carry no noise and are
    excluded."""
    table = getattr(circuit, "_noisy_locs", None)
    if table is None:
        table = {cls: [] for cls in CLASS_ORDER}
        kind_to_cls = {k: cls for cls, kinds in _CLASS_KINDS.items() for k in kinds}
        for step, layer in enumerate(circuit.layers):
            if circuit.step_is_noiseless(step):
                continue
            for j, op in enumerate(layer):
                cls = kind_to_cls.get(op.kind)
                if cls is not None:
                    table[cls].append((step, j))
        circuit._noisy_locs = table
    return table


def noisy_locations(circuit: Circuit, cls: str) -> List[Tuple[int, int]]:
    return location_table(circuit)[cls]


def draw_distinct_sorted(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k distinct indices in [0, n), sorted."""
    idx = rng.choice(n, size=k, replace=False)
    idx.sort()
    return idx


def two_qubit_pauli(code: int) -> Tuple[str, str]:
    assert 1 <= code <= 15
    return (PAULI_LETTERS[code // 4], PAULI_LETTERS[code % 4])


def sample_faults(circuit: Circuit, params: NoiseParams, rng: np.random.Generator) -> List[Fault]:
    """Sample one fault realization over the circuit's sampled location classes."""
    faults: List[Fault] = []
    for cls in SAMPLED_CLASSES:
        p = params.of_class(cls)
        locs = noisy_locations(circuit, cls)
        if not locs:
            continue
        k = int(rng.binomial(len(locs), p)) if p > 0.0 else 0
        if k == 0:
            continue
        chosen = draw_distinct_sorted(rng, len(locs), k)
        labels = rng.integers(1, 16, size=k) if cls == "cnot" else None
        for pos, loc_i in enumerate(chosen):
            step, op_index = locs[int(loc_i)]
            if cls == "init":
                op = circuit.layers[step][op_index]
                letter = "X" if op.kind is OpKind.INIT_ZERO else "Z"
                faults.append(Fault(step, op_index, "init", (letter,)))
            elif cls == "meas":
                faults.append(Fault(step, op_index, "meas", ()))
            else:
                faults.append(Fault(step, op_index, "cnot", two_qubit_pauli(int(labels[pos]))))
    return faults


def _compose(a: Optional[str], b: Optional[str]) -> Optional[str]:
    bits = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    x, z = 0, 0
    for letter in (a, b):
        if letter is not None:
            x ^= bits[letter][0]
            z ^= bits[letter][1]
    return {(0, 0): None, (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(x, z)]


_ANTICOMMUTING = {"X": "Z", "Y": "Z", "Z": "X"}


def prep_fault(mode: AxisMode, params: NoiseParams, rng: np.random.Generator) -> Optional[str]:
    """Fault letter injected on the magic-state qubit right after its
    preparation, or None.  Always consumes exactly two uniform draws so
    callers can interleave it with other sampling deterministically."""
    u_init = rng.random()
    u_gate = rng.random()
    init_letter = None
    gate_letter = None
    if mode.generic:
        if u_init < params.p_I:
            init_letter = "Z"
        if u_gate < params.p_1 / 3:
            gate_letter = "X"
        elif u_gate < 2 * params.p_1 / 3:
            gate_letter = "Z"
    else:
        if u_init < params.p_I:
            init_letter = _ANTICOMMUTING[mode.pauli]
        if u_gate < params.p_1:
            gate_letter = PAULI_LETTERS[1 + min(2, int(3 * u_gate / params.p_1))]
    return _compose(init_letter, gate_letter)
