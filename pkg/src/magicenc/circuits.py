"""CNOT-ordering schedules and their expansion into time-stepped circuits.

Each readout round runs the two CNOT half-windows back to back, and
z_offset picks which half goes first.  With z_offset = 0:

    step 0        InitZero on every ancilla
    steps 1..4    Z-stabilizer CNOTs, one direction per step in z_order
    step 4        Hadamard on X ancillas (shares the last Z step; the two
                  act on disjoint qubits)
    steps 5..8    X-stabilizer CNOTs, one direction per step in x_order
    step 9        Hadamard on X ancillas
    step 10       MeasureZ on every ancilla

With z_offset = 1 every Z CNOT moves later instead: the X window sits at
steps 2..5 between its Hadamards, and the Z window at steps 6..9 shares
its first step with the closing Hadamard.  Both layouts span 11 steps.
X readout is ancilla-controlled (ancilla -> data), Z readout
data-controlled (data -> ancilla).

Keeping the half-windows time-disjoint is what makes every readout
deterministic: a diagonally adjacent (X ancilla, Z ancilla) pair shares
two data qubits, and if the two CNOT windows interleaved on them with
opposite orientations, one ancilla would pick up a leftover Pauli from
the other's initialization and its outcome would turn random.  With one
window strictly after the other, both shared qubits always resolve the
same way, for any pair of direction orders.  validate_circuit still
checks the orientation-parity condition so that hand-assembled circuits
are held to the same rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .lattice import DIRECTIONS, Coord, Lattice, Region


class OpKind(Enum):
    INIT_ZERO = "init_zero"
    INIT_PLUS = "init_plus"
    PREP_MAGIC = "prep_magic"
    HADAMARD = "hadamard"
    CNOT = "cnot"
    MEASURE_Z = "measure_z"


@dataclass(frozen=True)
class Operation:
    kind: OpKind
    qubits: Tuple[Coord, ...]  # (control, target) for CNOT, else (qubit,)

    @property
    def control(self) -> Coord:
        assert self.kind is OpKind.CNOT
        return self.qubits[0]

    @property
    def target(self) -> Coord:
        assert self.kind is OpKind.CNOT
        return self.qubits[1]


class InvalidSchedule(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class Schedule:
    """CNOT ordering: one direction permutation per stabilizer kind plus a
    0/1 offset that moves the whole Z half-window after the X one."""

    x_order: Tuple[str, str, str, str]
    z_order: Tuple[str, str, str, str]
    z_offset: int

    def __post_init__(self):
        if sorted(self.x_order) != sorted(DIRECTIONS) or sorted(self.z_order) != sorted(DIRECTIONS):
            raise ValueError("orders must be permutations of N,E,S,W")
        if self.z_offset not in (0, 1):
            raise ValueError("z_offset must be 0 or 1")

    # in-round step index of each CNOT; see the module docstring layout
    def x_step(self, direction: str) -> int:
        return (5 - 3 * self.z_offset) + self.x_order.index(direction)

    def z_step(self, direction: str) -> int:
        return (1 + 5 * self.z_offset) + self.z_order.index(direction)

    def token(self) -> str:
        return "X:%s;Z:%s;off:%d" % ("".join(self.x_order), "".join(self.z_order), self.z_offset)

    @staticmethod
    def from_token(token: str) -> "Schedule":
        try:
            parts = dict(p.split(":") for p in token.strip().split(";"))
            return Schedule(tuple(parts["X"]), tuple(parts["Z"]), int(parts["off"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError("bad schedule token %r (want e.g. X:NESW;Z:NWES;off:1)" % token) from exc

    def transpose(self) -> "Schedule":
        # row<->col duality: swap kinds and relabel N<->W, S<->E.  Swapping
        # kinds also swaps which half-window runs first, so the offset flips.
        relabel = {"N": "W", "W": "N", "S": "E", "E": "S"}
        return Schedule(
            tuple(relabel[d] for d in self.z_order),
            tuple(relabel[d] for d in self.x_order),
            1 - self.z_offset,
        )


# phase 2 runs a fixed known-valid interleaving; any valid order works there
PHASE2_SCHEDULE = Schedule(("N", "E", "W", "S"), ("N", "W", "E", "S"), 0)

# cheapest first-order two-qubit coefficient (2/5) over the exhaustive
# search; see oracle.schedule_search.  31 other orders tie with it.
OPTIMAL_SCHEDULE = Schedule(("E", "N", "W", "S"), ("E", "W", "N", "S"), 0)


@dataclass
class Circuit:
    layers: List[List[Operation]]
    round_starts: List[int]  # step index where each measurement round begins
    lattice: Lattice
    phase: int
    schedule: Schedule
    noiseless_rounds: frozenset = frozenset()

    @property
    def n_rounds(self) -> int:
        return len(self.round_starts)

    def round_of_step(self, step: int) -> Optional[int]:
        r = None
        for i, start in enumerate(self.round_starts):
            if step >= start:
                r = i
        return r

    def step_is_noiseless(self, step: int) -> bool:
        return self.round_of_step(step) in self.noiseless_rounds


def _round_layers(lat: Lattice, sched: Schedule, stabilizers) -> List[List[Operation]]:
    n_steps = 11
    layers: List[List[Operation]] = [[] for _ in range(n_steps)]
    h_open = (5 - 3 * sched.z_offset) - 1
    h_close = (5 - 3 * sched.z_offset) + 4
    measure = 10
    for s in stabilizers:
        layers[0].append(Operation(OpKind.INIT_ZERO, (s.ancilla,)))
        if s.kind == "X":
            layers[h_open].append(Operation(OpKind.HADAMARD, (s.ancilla,)))
            for dname, q in s.support:
                layers[sched.x_step(dname)].append(
                    Operation(OpKind.CNOT, (s.ancilla, q))
                )
            layers[h_close].append(Operation(OpKind.HADAMARD, (s.ancilla,)))
        else:
            for dname, q in s.support:
                layers[sched.z_step(dname)].append(
                    Operation(OpKind.CNOT, (q, s.ancilla))
                )
        layers[measure].append(Operation(OpKind.MEASURE_Z, (s.ancilla,)))
    return layers


def expand_phase1(lat: Lattice, sched: Schedule) -> Circuit:
    """Initialization of the d1 block followed by two full readout rounds."""
    init_layer = []
    for q in lat.block_data_qubits:
        region = lat.region_map[q]
        if region is Region.CORNER:
            init_layer.append(Operation(OpKind.PREP_MAGIC, (q,)))
        elif region is Region.I:
            init_layer.append(Operation(OpKind.INIT_PLUS, (q,)))
        else:
            init_layer.append(Operation(OpKind.INIT_ZERO, (q,)))

    layers = [init_layer]
    round_starts = []
    for _ in range(2):
        round_starts.append(len(layers))
        layers.extend(_round_layers(lat, sched, lat.block_stabilizers))

    circuit = Circuit(layers, round_starts, lat, 1, sched)
    violations = validate_circuit(circuit)
    if violations:
        raise InvalidSchedule(violations)
    return circuit


def expand_phase2(lat: Lattice, sched: Schedule, rounds: int) -> Circuit:
    """Growth initialization plus `rounds` full-size rounds and one closing
    noiseless round appended for chain termination."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    init_layer = []
    for q in lat.data_qubits:
        if lat.in_block(q):
            continue
        if lat.region_map[q] is Region.III:
            init_layer.append(Operation(OpKind.INIT_PLUS, (q,)))
        else:
            init_layer.append(Operation(OpKind.INIT_ZERO, (q,)))

    layers = [init_layer]
    round_starts = []
    for _ in range(rounds + 1):
        round_starts.append(len(layers))
        layers.extend(_round_layers(lat, sched, lat.stabilizers))

    circuit = Circuit(
        layers, round_starts, lat, 2, sched, noiseless_rounds=frozenset({rounds})
    )
    violations = validate_circuit(circuit)
    if violations:
        raise InvalidSchedule(violations)
    return circuit


def _check_layer_disjoint(circuit: Circuit, violations: List[str]) -> None:
    for step, layer in enumerate(circuit.layers):
        seen = set()
        for op in layer:
            for q in op.qubits:
                if q in seen:
                    violations.append("layer %d: qubit %s in two operations" % (step, (q,)))
                seen.add(q)


def _check_ancilla_rounds(circuit: Circuit, violations: List[str]) -> None:
    lat = circuit.lattice
    stabilizers = lat.block_stabilizers if circuit.phase == 1 else lat.stabilizers
    bounds = circuit.round_starts + [len(circuit.layers)]
    for r in range(circuit.n_rounds):
        ops_by_ancilla = {s.ancilla: [] for s in stabilizers}
        for step in range(bounds[r], bounds[r + 1]):
            for op in circuit.layers[step]:
                for q in op.qubits:
                    if q in ops_by_ancilla:
                        ops_by_ancilla[q].append((step, op))
        for s in stabilizers:
            kinds = [op.kind for _, op in ops_by_ancilla[s.ancilla]]
            want = [OpKind.INIT_ZERO]
            if s.kind == "X":
                want += [OpKind.HADAMARD] + [OpKind.CNOT] * len(s.support) + [OpKind.HADAMARD]
            else:
                want += [OpKind.CNOT] * len(s.support)
            want.append(OpKind.MEASURE_Z)
            if kinds != want:
                violations.append(
                    "round %d ancilla %s: op sequence %s" % (r, s.ancilla, [k.value for k in kinds])
                )
                continue
            touched = []
            for _, op in ops_by_ancilla[s.ancilla]:
                if op.kind is OpKind.CNOT:
                    anc, data = (op.qubits if s.kind == "X" else op.qubits[::-1])
                    if anc != s.ancilla:
                        violations.append(
                            "round %d ancilla %s: CNOT with wrong orientation" % (r, s.ancilla)
                        )
                    touched.append(data)
            if sorted(touched) != sorted(s.data_qubits):
                violations.append(
                    "round %d ancilla %s: support covered %s, want %s"
                    % (r, s.ancilla, sorted(touched), sorted(s.data_qubits))
                )


def _check_determinism(circuit: Circuit, violations: List[str]) -> None:
    # orientation parity on the two shared qubits of each diagonal X/Z pair
    lat = circuit.lattice
    stabilizers = lat.block_stabilizers if circuit.phase == 1 else lat.stabilizers
    by_anc = {s.ancilla: s for s in stabilizers}
    bounds = circuit.round_starts + [len(circuit.layers)]
    for r in range(circuit.n_rounds):
        cnot_step = {}  # (ancilla, data) -> step
        for step in range(bounds[r], bounds[r + 1]):
            for op in circuit.layers[step]:
                if op.kind is OpKind.CNOT:
                    a, b = op.qubits
                    anc, data = (a, b) if a in by_anc else (b, a)
                    cnot_step[(anc, data)] = step
        for s in stabilizers:
            if s.kind != "X":
                continue
            ar, ac = s.ancilla
            for sr, sc in itertools.product((-1, 1), repeat=2):
                partner = (ar + sr, ac + sc)
                if partner not in by_anc:
                    continue
                shared = set(s.data_qubits) & set(by_anc[partner].data_qubits)
                orientations = set()
                for q in shared:
                    tx = cnot_step.get((s.ancilla, q))
                    tz = cnot_step.get((partner, q))
                    if tx is None or tz is None or tx == tz:
                        continue  # coverage/disjointness checks report these
                    orientations.add(tx < tz)
                if len(orientations) == 2:
                    violations.append(
                        "round %d: non-deterministic readout, X %s / Z %s interleave"
                        % (r, s.ancilla, partner)
                    )


def validate_circuit(circuit: Circuit) -> List[str]:
    """All violated circuit invariants, empty when the circuit is sound."""
    violations: List[str] = []
    _check_layer_disjoint(circuit, violations)
    _check_ancilla_rounds(circuit, violations)
    _check_determinism(circuit, violations)
    return violations


def enumerate_schedules() -> List[Tuple[Schedule, bool]]:
    """All 1152 (x_order, z_order, z_offset) triples, annotated with validity.

    Validity is decided by expanding on a d1=3 lattice; the checked
    conditions only involve direction/step arithmetic shared by every
    distance, so the annotation is distance independent.
    """
    from .lattice import build_lattice

    lat = build_lattice(3, 3)
    out = []
    for x_order in itertools.permutations(DIRECTIONS):
        for z_order in itertools.permutations(DIRECTIONS):
            for off in (0, 1):
                sched = Schedule(x_order, z_order, off)
                try:
                    expand_phase1(lat, sched)
                except InvalidSchedule:
                    out.append((sched, False))
                else:
                    out.append((sched, True))
    return out


def valid_schedules() -> List[Schedule]:
    return [s for s, ok in enumerate_schedules() if ok]
