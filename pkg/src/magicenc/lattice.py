"""Planar surface-code geometry: qubit roles, initialization regions,
stabilizer supports and logical operators.

The code lives on a (2d-1) x (2d-1) grid of sites.  Data qubits sit on
sites with even row+col, X-type ancillas on (even row, odd col), Z-type
ancillas on (odd row, even col).  The logical X operator is the product
of X on the left column (col 0), the logical Z the product of Z on the
top row (row 0); they overlap exactly at the corner site (0, 0), which
hosts the injected magic-state qubit.

A growth parameter d1 <= d splits the grid into the corner plus four
initialization regions:

  inside the top-left (2*d1-1) x (2*d1-1) block:
      row > col -> I  (prepared |+>)      row < col -> II (prepared |0>)
      row == col > 0 -> configurable (I by default)
  outside the block:
      row > col -> III (|+>)              otherwise -> IV (|0>)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

Coord = Tuple[int, int]

DIRECTIONS = ("N", "E", "S", "W")

_OFFSETS = {"N": (-1, 0), "E": (0, 1), "S": (1, 0), "W": (0, -1)}


class QubitRole(Enum):
    DATA = "data"
    ANCILLA_X = "ancilla_x"
    ANCILLA_Z = "ancilla_z"


class Region(Enum):
    CORNER = "corner"
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


def role_of(coord: Coord) -> QubitRole:
    r, c = coord
    if (r + c) % 2 == 0:
        return QubitRole.DATA
    if r % 2 == 0:
        return QubitRole.ANCILLA_X
    return QubitRole.ANCILLA_Z


@dataclass(frozen=True)
class Stabilizer:
    """One stabilizer generator: an ancilla plus its data-qubit support.

    support is ordered N, E, S, W with edge-truncated directions missing.
    """

    ancilla: Coord
    kind: str  # "X" or "Z"
    support: Tuple[Tuple[str, Coord], ...]

    def __post_init__(self):
        assert self.kind in ("X", "Z")
        assert 2 <= len(self.support) <= 4

    @property
    def data_qubits(self) -> Tuple[Coord, ...]:
        return tuple(q for _, q in self.support)

    def step_qubit(self, direction: str) -> Coord | None:
        for dname, q in self.support:
            if dname == direction:
                return q
        return None


@dataclass
class Lattice:
    d: int
    d1: int
    diagonal_region: Region
    stabilizers: List[Stabilizer]
    block_stabilizers: List[Stabilizer]
    xl_support: frozenset
    zl_support: frozenset
    region_map: Dict[Coord, Region]
    by_ancilla: Dict[Coord, Stabilizer] = field(default_factory=dict)
    block_by_ancilla: Dict[Coord, Stabilizer] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return 2 * self.d - 1

    @property
    def block_size(self) -> int:
        return 2 * self.d1 - 1

    def in_block(self, coord: Coord) -> bool:
        return coord[0] < self.block_size and coord[1] < self.block_size

    @property
    def data_qubits(self) -> List[Coord]:
        n = self.size
        return [(r, c) for r in range(n) for c in range(n) if (r + c) % 2 == 0]

    @property
    def block_data_qubits(self) -> List[Coord]:
        return [q for q in self.data_qubits if self.in_block(q)]


def _support_of(ancilla: Coord, n: int, limit: int | None = None) -> Tuple[Tuple[str, Coord], ...]:
    # limit restricts the support to the top-left limit x limit block
    bound = n if limit is None else limit
    out = []
    for dname in DIRECTIONS:
        dr, dc = _OFFSETS[dname]
        q = (ancilla[0] + dr, ancilla[1] + dc)
        if 0 <= q[0] < bound and 0 <= q[1] < bound and 0 <= q[0] < n and 0 <= q[1] < n:
            out.append((dname, q))
    return tuple(out)


def _region_of(coord: Coord, block: int, diagonal_region: Region) -> Region:
    r, c = coord
    if (r, c) == (0, 0):
        return Region.CORNER
    if r < block and c < block:
        if r > c:
            return Region.I
        if r < c:
            return Region.II
        return diagonal_region
    return Region.III if r > c else Region.IV


def build_lattice(d: int, d1: int, diagonal_region: Region = Region.I) -> Lattice:
    """Construct the distance-d lattice with growth regions for a distance-d1 start.

    Both distances must be odd, 3 <= d1 <= d.
    """
    if d % 2 == 0 or d1 % 2 == 0:
        raise ValueError("distances must be odd, got d=%d d1=%d" % (d, d1))
    if not (3 <= d1 <= d):
        raise ValueError("need 3 <= d1 <= d, got d=%d d1=%d" % (d, d1))
    if diagonal_region not in (Region.I, Region.II):
        raise ValueError("diagonal_region must be I or II")

    n = 2 * d - 1
    block = 2 * d1 - 1

    stabilizers = []
    block_stabilizers = []
    for r in range(n):
        for c in range(n):
            role = role_of((r, c))
            if role is QubitRole.DATA:
                continue
            kind = "X" if role is QubitRole.ANCILLA_X else "Z"
            stabilizers.append(Stabilizer((r, c), kind, _support_of((r, c), n)))
            if r < block and c < block:
                block_stabilizers.append(
                    Stabilizer((r, c), kind, _support_of((r, c), n, limit=block))
                )

    region_map = {}
    for r in range(n):
        for c in range(n):
            if (r + c) % 2 == 0:
                region_map[(r, c)] = _region_of((r, c), block, diagonal_region)

    lat = Lattice(
        d=d,
        d1=d1,
        diagonal_region=diagonal_region,
        stabilizers=stabilizers,
        block_stabilizers=block_stabilizers,
        xl_support=frozenset((r, 0) for r in range(0, n, 2)),
        zl_support=frozenset((0, c) for c in range(0, n, 2)),
        region_map=region_map,
    )
    lat.by_ancilla = {s.ancilla: s for s in stabilizers}
    lat.block_by_ancilla = {s.ancilla: s for s in block_stabilizers}
    return lat


def deterministic_stabilizers(lat: Lattice, phase: int) -> set:
    """Stabilizers whose first-measurement outcome is fixed by initialization.

    Phase 1: X stabilizers supported entirely on |+>-initialized block data
    (region I), Z stabilizers entirely on |0> block data (region II).  Any
    stabilizer touching the corner is excluded: the magic state is not a
    Pauli eigenstate.  Phase 2 additionally admits the fresh regions, so the
    test becomes support within I+III for X, within II+IV for Z.
    """
    if phase not in (1, 2):
        raise ValueError("phase must be 1 or 2")
    if phase == 1:
        pool = lat.block_stabilizers
        good = {"X": {Region.I}, "Z": {Region.II}}
    else:
        pool = lat.stabilizers
        good = {"X": {Region.I, Region.III}, "Z": {Region.II, Region.IV}}
    out = set()
    for s in pool:
        regions = {lat.region_map[q] for q in s.data_qubits}
        if regions <= good[s.kind]:
            out.add(s)
    return out
