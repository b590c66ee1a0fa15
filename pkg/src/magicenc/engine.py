"""Fault propagation, detector construction, and signature precompilation.

Everything here is F2-linear: errors are Pauli frames (an X bit and a Z
bit per qubit), measurement results are tracked as flips relative to the
noiseless execution, and detectors are parities of one or two result
slots.  Two independent routes compute the same observable data:

* propagate() pushes a sampled fault list forward through the circuit
  layers, yielding per-measurement flips and the residual data frame;
* FaultCatalog stores, for every possible fault location, the detector
  mask and logical word it would produce, precomputed by one backward
  sweep, so a trial reduces to XOR-ing a handful of integers.

The slow route is the readable reference; the fast route is what the
Monte Carlo runner uses.  Tests pin them against each other bit for bit.

Detector taxonomy (global rounds: 0,1 = small-code phase, 2..R+1 = noisy
full-size rounds, R+2 = noiseless closing round):

  (a) single slot (s,0) for small-code stabilizers whose initial value
      is fixed by the product-state initialization;
  (b) slot pair (s,0),(s,1) for every small-code stabilizer;
  (c) slot pair (s,1),(s,2) bridging the growth step for small-code
      ancillas (their supports gain only freshly initialized qubits in
      the matching basis, so the comparison stays deterministic);
  (d) single slot (s,2) for new ancillas whose whole support is freshly
      initialized in the matching basis;
  (e) remaining new ancillas have no defined value at the growth round:
      their chains open with (s,2),(s,3) and that first comparison gets
      a time-boundary allowance for the decoder;
  (f) slot pairs (s,r),(s,r+1) continuing every chain to the closing
      round.

Groups (a) and (b) precede everything else in detector id order; a trial
is discarded when any of them fires.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .circuits import Circuit, OpKind
from .lattice import Coord, Lattice, deterministic_stabilizers
from .noise import CLASS_ORDER, Fault, location_table

_XZ = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class PauliFrame:
    """Residual Pauli error, stored as the sets of qubits carrying an X
    component and a Z component."""

    __slots__ = ("x", "z")

    def __init__(self, x: Iterable = (), z: Iterable = ()):
        self.x = set(x)
        self.z = set(z)

    def copy(self) -> "PauliFrame":
        return PauliFrame(self.x, self.z)

    def apply(self, letter: str, q) -> None:
        xb, zb = _XZ[letter]
        if xb:
            self.x.symmetric_difference_update((q,))
        if zb:
            self.z.symmetric_difference_update((q,))

    def hadamard(self, q) -> None:
        xq = q in self.x
        zq = q in self.z
        if xq != zq:
            if xq:
                self.x.discard(q)
                self.z.add(q)
            else:
                self.z.discard(q)
                self.x.add(q)

    def cnot(self, c, t) -> None:
        if c in self.x:
            self.x.symmetric_difference_update((t,))
        if t in self.z:
            self.z.symmetric_difference_update((c,))

    def reset(self, q) -> None:
        self.x.discard(q)
        self.z.discard(q)

    def __eq__(self, other) -> bool:
        return self.x == other.x and self.z == other.z

    def class_word(self, lat: Lattice) -> int:
        """Bit 0: residual anticommutes with the top-row Z logical.
        Bit 1: residual anticommutes with the left-column X logical."""
        a_zl = len(self.x & lat.zl_support) & 1
        a_xl = len(self.z & lat.xl_support) & 1
        return a_zl | (a_xl << 1)


CLASS_NAMES = ("I", "X", "Z", "Y")  # indexed by class_word


@dataclass
class PropagationResult:
    op_flips: Dict[Tuple[int, int], int]  # (step, op_index) -> result flip
    round_flips: Dict[Tuple[Coord, int], int]  # (ancilla, global round) -> flip
    frame: PauliFrame


def propagate(circuit: Circuit, faults: Sequence[Fault],
              frame: Optional[PauliFrame] = None,
              round_offset: int = 0) -> PropagationResult:
    """Reference forward propagation.  Faults attached to a step act after
    that step's operations; measurement-flip faults toggle the recorded
    result only."""
    if frame is None:
        frame = PauliFrame()
    by_step: Dict[int, List[Fault]] = defaultdict(list)
    for f in faults:
        by_step[f.step].append(f)

    op_flips: Dict[Tuple[int, int], int] = {}
    round_flips: Dict[Tuple[Coord, int], int] = {}
    for step, layer in enumerate(circuit.layers):
        for j, op in enumerate(layer):
            kind = op.kind
            if kind is OpKind.CNOT:
                frame.cnot(op.qubits[0], op.qubits[1])
            elif kind is OpKind.HADAMARD:
                frame.hadamard(op.qubits[0])
            elif kind is OpKind.MEASURE_Z:
                q = op.qubits[0]
                flip = 1 if q in frame.x else 0
                op_flips[(step, j)] = flip
                local = circuit.round_of_step(step)
                if local is not None:
                    key = (q, round_offset + local)
                    assert key not in round_flips
                    round_flips[key] = flip
            else:  # the three initializations discard the incoming error
                frame.reset(op.qubits[0])
        for f in by_step.get(step, ()):
            if f.kind == "meas":
                op_flips[(f.step, f.op_index)] ^= 1
                op = circuit.layers[f.step][f.op_index]
                local = circuit.round_of_step(f.step)
                if local is not None:
                    round_flips[(op.qubits[0], round_offset + local)] ^= 1
            else:
                op = circuit.layers[f.step][f.op_index]
                for letter, q in zip(f.pauli, op.qubits):
                    if letter != "I":
                        frame.apply(letter, q)
    return PropagationResult(op_flips, round_flips, frame)


@dataclass(frozen=True)
class Detector:
    id: int
    kind: str  # stabilizer kind whose results it compares
    ancilla: Coord
    slots: Tuple[Tuple[Coord, int], ...]  # (ancilla, global round), chronological
    t: int  # time coordinate for matching
    phase1: bool
    tb_cost: Optional[int] = None  # time-boundary allowance, chain openers only


class DetectorSet:
    """All detectors for one protocol configuration, in id order, with the
    slot -> detector-mask index used by both computation routes."""

    def __init__(self, lat: Lattice, rounds: int):
        if rounds < 1:
            raise ValueError("rounds must be >= 1")
        self.lat = lat
        self.rounds = rounds
        self.closing_round = rounds + 2
        self.detectors: List[Detector] = []
        self.slot_masks: Dict[Tuple[Coord, int], int] = {}

        block = sorted(lat.block_by_ancilla)
        kind_of = {s.ancilla: s.kind for s in lat.stabilizers}
        det1 = sorted(s.ancilla for s in deterministic_stabilizers(lat, 1))
        new = sorted(a for a in lat.by_ancilla if a not in lat.block_by_ancilla)
        det2 = {s.ancilla for s in deterministic_stabilizers(lat, 2)}
        new_det = [a for a in new if a in det2]
        new_free = [a for a in new if a not in det2]

        for a in det1:
            self._emit(kind_of[a], a, ((a, 0),), 0, True)
        for a in block:
            self._emit(kind_of[a], a, ((a, 0), (a, 1)), 1, True)
        self.phase1_count = len(self.detectors)

        for a in block:
            self._emit(kind_of[a], a, ((a, 1), (a, 2)), 2, False)
        for a in new_det:
            self._emit(kind_of[a], a, ((a, 2),), 2, False)
        for t in range(3, self.closing_round + 1):
            for a in block + new_det:
                self._emit(kind_of[a], a, ((a, t - 1), (a, t)), t, False)
            for a in new_free:
                self._emit(kind_of[a], a, ((a, t - 1), (a, t)), t, False,
                           tb_cost=t - 2 if t == 3 else None)

        self.n = len(self.detectors)
        self.phase1_mask = (1 << self.phase1_count) - 1

    def _emit(self, kind, ancilla, slots, t, phase1, tb_cost=None) -> None:
        d = Detector(len(self.detectors), kind, ancilla, slots, t, phase1, tb_cost)
        self.detectors.append(d)
        for slot in slots:
            self.slot_masks[slot] = self.slot_masks.get(slot, 0) | (1 << d.id)

    def evaluate(self, flips: Mapping[Tuple[Coord, int], int]) -> int:
        """Detector bit vector for a set of per-slot result flips."""
        mask = 0
        for slot, flip in flips.items():
            if flip:
                mask ^= self.slot_masks.get(slot, 0)
        return mask

    def flipped_ids(self, mask: int) -> List[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out


@dataclass(frozen=True)
class SyndromeRecord:
    """One trial's observable data, identical across both routes."""

    detector_mask: int
    class_word: int

    def phase1_clean(self, detset: DetectorSet) -> bool:
        return (self.detector_mask & detset.phase1_mask) == 0


Component = Tuple[int, int]  # (detector mask, logical word)


def _xor(a: Component, b: Component) -> Component:
    return (a[0] ^ b[0], a[1] ^ b[1])


_ZERO: Component = (0, 0)


class FaultCatalog:
    """Per-location fault responses for the two-phase protocol.

    Component layout per class (aligned with noise.location_table order):
      init: (response of the flip the channel injects,)
      meas: (slot detector mask with word 0,)
      h:    (X response, Z response)
      cnot: (control X, control Z, target X, target Z)
    plus `prep`: (X response, Z response) for the magic-state site.

    A concrete fault's response is the XOR of the components selected by
    the X/Z bits of its Pauli letters, so responses stay linear and the
    catalog is independent of the noise strengths.
    """

    def __init__(self, detset: DetectorSet, phase1: Circuit, phase2: Circuit):
        assert phase1.phase == 1 and phase2.phase == 2
        assert phase2.n_rounds == detset.rounds + 1
        self.detset = detset
        self.circuits = (phase1, phase2)
        self.round_offsets = (0, 2)
        recorded: Dict[Tuple[int, int, int], Tuple[Component, ...]] = {}
        self.prep: Optional[Tuple[Component, Component]] = None

        cur: Dict[Tuple[Coord, str], Component] = {}
        for q in detset.lat.data_qubits:
            if q in detset.lat.zl_support:
                cur[(q, "X")] = (0, 1)
            if q in detset.lat.xl_support:
                cur[(q, "Z")] = (0, 2)

        for seg in (1, 0):
            circuit = self.circuits[seg]
            offset = self.round_offsets[seg]
            for step in range(len(circuit.layers) - 1, -1, -1):
                layer = circuit.layers[step]
                noisy = not circuit.step_is_noiseless(step)
                ground = None
                local = circuit.round_of_step(step)
                if local is not None:
                    ground = offset + local
                # record responses of faults that act after this layer
                if noisy:
                    for j, op in enumerate(layer):
                        kind = op.kind
                        if kind is OpKind.INIT_ZERO:
                            comps = (cur.get((op.qubits[0], "X"), _ZERO),)
                        elif kind is OpKind.INIT_PLUS:
                            comps = (cur.get((op.qubits[0], "Z"), _ZERO),)
                        elif kind is OpKind.PREP_MAGIC:
                            self.prep = (cur.get((op.qubits[0], "X"), _ZERO),
                                         cur.get((op.qubits[0], "Z"), _ZERO))
                            continue
                        elif kind is OpKind.HADAMARD:
                            comps = (cur.get((op.qubits[0], "X"), _ZERO),
                                     cur.get((op.qubits[0], "Z"), _ZERO))
                        elif kind is OpKind.CNOT:
                            c, t = op.qubits
                            comps = (cur.get((c, "X"), _ZERO), cur.get((c, "Z"), _ZERO),
                                     cur.get((t, "X"), _ZERO), cur.get((t, "Z"), _ZERO))
                        else:
                            comps = ((detset.slot_masks.get((op.qubits[0], ground), 0), 0),)
                        recorded[(seg, step, j)] = comps
                # then pull the responses backward through the layer
                for op in layer:
                    kind = op.kind
                    if kind is OpKind.MEASURE_Z:
                        a = op.qubits[0]
                        slot = (detset.slot_masks.get((a, ground), 0), 0)
                        cur[(a, "X")] = _xor(cur.get((a, "X"), _ZERO), slot)
                    elif kind is OpKind.CNOT:
                        c, t = op.qubits
                        cx = cur.get((c, "X"), _ZERO)
                        tx = cur.get((t, "X"), _ZERO)
                        cur[(c, "X")] = _xor(cx, tx)
                        cz = cur.get((c, "Z"), _ZERO)
                        tz = cur.get((t, "Z"), _ZERO)
                        cur[(t, "Z")] = _xor(tz, cz)
                    elif kind is OpKind.HADAMARD:
                        q = op.qubits[0]
                        cur[(q, "X")], cur[(q, "Z")] = (
                            cur.get((q, "Z"), _ZERO), cur.get((q, "X"), _ZERO))
                    else:
                        q = op.qubits[0]
                        cur.pop((q, "X"), None)
                        cur.pop((q, "Z"), None)

        assert self.prep is not None
        self.components: List[Dict[str, List[Tuple[Component, ...]]]] = []
        self._loc_pos: List[Dict[str, Dict[Tuple[int, int], int]]] = []
        for seg in (0, 1):
            table = location_table(self.circuits[seg])
            per_cls = {}
            per_pos = {}
            for cls in CLASS_ORDER:
                per_cls[cls] = [recorded[(seg, step, j)] for step, j in table[cls]]
                per_pos[cls] = {loc: i for i, loc in enumerate(table[cls])}
            self.components.append(per_cls)
            self._loc_pos.append(per_pos)

    def response(self, seg: int, fault: Fault) -> Component:
        """Response of one concrete fault, via its class location index."""
        idx = self._loc_pos[seg][fault.kind][(fault.step, fault.op_index)]
        return self.response_at(seg, fault.kind, idx, fault.pauli)

    def response_at(self, seg: int, cls: str, loc_index: int,
                    pauli: Tuple[str, ...]) -> Component:
        comps = self.components[seg][cls][loc_index]
        if cls == "meas":
            return comps[0]
        if cls == "init":
            return comps[0]
        out = _ZERO
        for i, letter in enumerate(pauli):
            if letter == "I":
                continue
            xb, zb = _XZ[letter]
            if xb:
                out = _xor(out, comps[2 * i])
            if zb:
                out = _xor(out, comps[2 * i + 1])
        return out

    def prep_response(self, letter: str) -> Component:
        xb, zb = _XZ[letter]
        out = _ZERO
        if xb:
            out = _xor(out, self.prep[0])
        if zb:
            out = _xor(out, self.prep[1])
        return out
