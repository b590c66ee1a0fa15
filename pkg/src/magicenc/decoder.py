"""Minimum-weight matching decode of detector events.

X-kind and Z-kind events are decoded as two independent matching problems.
All distances come from the mechanism graph: nodes are the kind's
post-selection-surviving detectors plus one virtual boundary, and every
elementary fault the noise model can inject contributes an edge — a fault
firing exactly one event of the kind is a boundary edge, one firing
exactly two is a pair edge, each of unit cost (the channels share a
magnitude, so hop count stands in for -log probability).  Faults firing
three or more events of a kind decompose along existing edges and add
none of their own.

Each edge carries the parity with which its fault flips the kind's
logical operator, so the graph is doubled into (node, crossing) sheets
and BFS yields, for every detector, the cheapest route to every other
detector and to the boundary at each crossing parity.  Matching costs are
the parity-minimum; the recorded crossing is the argmin (ties resolve to
no crossing, the larger multiplicity class in practice).  This subsumes
the earlier geometric treatment: bulk data-error chains reproduce the
|dr|/2 + |dc|/2 + |dt| space-time distance, hook faults get their
diagonal shortcuts, stabilizers grown over the seam keep the cheap lone
boundary their absorbed init faults create, and composite explanations
(two faults cancelling all but one event) price lone events correctly,
which pure spatial chains got wrong.

Cost ties break toward pair matches — a two-qubit fault fires a
displaced pair in a single draw, while two boundaries always mean two
draws.  Remaining ties take the lowest partner index; runs are
bit-reproducible.  Without a fault catalog the tables fall back to the
geometric metric (spatial boundary chains and Manhattan pair weights),
which unit tests exercise directly.

Debug dumps are line-oriented: `node <id> r<row> c<col> t<round>` and
`edge <u> <v> <w>`.  A virtual boundary twin of node u appears as the
negative id -(u+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ._matching import dp_match, min_weight_perfect_matching
from .engine import DetectorSet, FaultCatalog
from .lattice import Lattice
from .noise import CLASS_ORDER, two_qubit_pauli

Coord = Tuple[int, int]

# largest per-kind event count handled by the bitmask DP; bigger sets go
# through the blossom kernel
DP_MAX = 13

# class-word bit each kind's boundary crossings act on: X-kind corrections
# are Z chains and flip the X_L parity (bit 1), Z-kind flip Z_L (bit 0)
WORD_BIT = {"X": 1, "Z": 0}


@dataclass(frozen=True)
class DetectionEvent:
    id: int
    ancilla: Coord
    t: int
    kind: str


@dataclass(frozen=True)
class BoundaryNode:
    """Virtual twin of one event; matching to it applies the boundary."""
    event: DetectionEvent
    cost: int
    crossing: int


def _spatial_boundary(ancilla: Coord, kind: str, d: int) -> Tuple[int, int]:
    """(cost, crossing) of the cheaper spatial edge chain; the two sides can
    never tie because 2d-1 is odd."""
    r, c = ancilla
    if kind == "X":
        near, far = (c + 1) // 2, (2 * d - 1 - c) // 2
    else:
        near, far = (r + 1) // 2, (2 * d - 1 - r) // 2
    assert near != far
    return (near, 1) if near < far else (far, 0)


class _KindMetric:
    """All-pairs hop distances over one kind's mechanism graph.

    Local node u in [0, m) is the u-th surviving detector of the kind
    (ascending id); the graph is doubled into crossing-parity sheets, so
    node (u, p) sits at index p*m + u and the virtual boundary at 2m + p.
    An edge for a fault with crossing bit b joins (u, 0)-(v, b) and, by
    symmetry, (u, 1)-(v, b^1).  `dist[u, p*m + v]` is then the cheapest
    fault count explaining events {u, v} with net crossing p, and
    `b0`/`b1` the same against the boundary.  255 marks unreachable.
    """

    def __init__(self, ids: np.ndarray, n_total: int,
                 pair_edges: set, bnd_edges: set):
        self.ids = ids
        m = int(len(ids))
        self.m = m
        self.local = np.full(n_total, -1, dtype=np.int64)
        self.local[ids] = np.arange(m, dtype=np.int64)
        rows: List[int] = []
        cols: List[int] = []

        def _join(a: int, b: int) -> None:
            rows.append(a)
            cols.append(b)
            rows.append(b)
            cols.append(a)

        for u, v, bit in pair_edges:
            _join(u, bit * m + v)
            _join(m + u, (bit ^ 1) * m + v)
        for u, bit in bnd_edges:
            _join(u, 2 * m + bit)
            _join(m + u, 2 * m + (bit ^ 1))
        size = 2 * m + 2
        graph = csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)),
            shape=(size, size))
        self.dist = np.empty((m, 2 * m), dtype=np.uint8)
        sources = list(range(m)) + [2 * m]
        for start in range(0, len(sources), 512):
            chunk = sources[start:start + 512]
            block = shortest_path(graph, method="D", unweighted=True,
                                  indices=chunk)
            block = np.minimum(block, 255).astype(np.uint8)
            if start + len(chunk) > m:
                self.b0 = block[-1, :m].copy()
                self.b1 = block[-1, m:2 * m].copy()
                block = block[:-1]
            self.dist[start:start + len(block)] = block[:, :2 * m]


class DecoderTables:
    """Per-detector matching metadata for one protocol configuration.

    Arrays are indexed by detector id.  With a fault catalog, `metric`
    maps each kind to its mechanism-graph distances and the boundary
    arrays hold the parity-minimum route to the boundary;
    `boundary_source[i]` is then the (segment, class, location, pauli) of
    a direct single-fault boundary when one realizes the winning option,
    or "graph" for multi-hop routes.  `pair_mech` and `boundary_mech`
    keep one witness fault per unit edge for audits.  Without a catalog
    everything is geometric: spatial chains ("near"/"far") and Manhattan
    pair weights.
    """

    def __init__(self, detset: DetectorSet, catalog: Optional[FaultCatalog] = None):
        self.detset = detset
        lat = detset.lat
        self.d = lat.d
        n = detset.n
        self.row = np.zeros(n, dtype=np.int64)
        self.col = np.zeros(n, dtype=np.int64)
        self.t = np.zeros(n, dtype=np.int64)
        self.boundary_cost = np.zeros(n, dtype=np.int64)
        self.boundary_cross = np.zeros(n, dtype=np.int64)
        self.boundary_source: List[object] = [None] * n
        self.pair_mech: Dict[Tuple[int, int], Tuple[int, object]] = {}
        self.boundary_mech: Dict[int, Tuple[int, object]] = {}
        self.metric: Dict[str, _KindMetric] = {}
        self.kind_mask: Dict[str, int] = {"X": 0, "Z": 0}

        for det in detset.detectors:
            self.row[det.id] = det.ancilla[0]
            self.col[det.id] = det.ancilla[1]
            self.t[det.id] = det.t
            cost, cross = _spatial_boundary(det.ancilla, det.kind, lat.d)
            self.boundary_cost[det.id] = cost
            self.boundary_cross[det.id] = cross
            self.boundary_source[det.id] = "near" if cross else "far"
            if not det.phase1:
                self.kind_mask[det.kind] |= 1 << det.id

        if catalog is not None:
            self._build_metric(catalog)

    def _build_metric(self, catalog: FaultCatalog) -> None:
        phase1_mask = self.detset.phase1_mask
        n = self.detset.n
        ids = {kind: np.array(
            [det.id for det in self.detset.detectors
             if det.kind == kind and not det.phase1], dtype=np.int64)
            for kind in ("X", "Z")}
        local = {kind: np.full(n, -1, dtype=np.int64) for kind in ("X", "Z")}
        for kind in ("X", "Z"):
            local[kind][ids[kind]] = np.arange(len(ids[kind]), dtype=np.int64)
        pair_edges: Dict[str, set] = {"X": set(), "Z": set()}
        bnd_edges: Dict[str, set] = {"X": set(), "Z": set()}
        for mask, word, source in _single_fault_responses(catalog):
            if mask == 0 or mask & phase1_mask:
                continue
            for kind in ("X", "Z"):
                sub = mask & self.kind_mask[kind]
                if sub == 0:
                    continue
                rest = sub & (sub - 1)
                bit = (word >> WORD_BIT[kind]) & 1
                if rest == 0:
                    det_id = sub.bit_length() - 1
                    bnd_edges[kind].add((int(local[kind][det_id]), bit))
                    old = self.boundary_mech.get(det_id)
                    if old is None or bit < old[0]:
                        self.boundary_mech[det_id] = (bit, source)
                elif rest & (rest - 1) == 0:
                    lo = (sub ^ rest).bit_length() - 1
                    hi = rest.bit_length() - 1
                    pair_edges[kind].add(
                        (int(local[kind][lo]), int(local[kind][hi]), bit))
                    old = self.pair_mech.get((lo, hi))
                    if old is None or bit < old[0]:
                        self.pair_mech[(lo, hi)] = (bit, source)
                # faults firing >= 3 events of a kind decompose along the
                # unit edges above and contribute none of their own
        for kind in ("X", "Z"):
            met = _KindMetric(ids[kind], n, pair_edges[kind], bnd_edges[kind])
            self.metric[kind] = met
            for lu, det_id in enumerate(met.ids):
                b0, b1 = int(met.b0[lu]), int(met.b1[lu])
                if b0 >= 255 and b1 >= 255:
                    continue  # disconnected; keep the spatial fallback
                cost, cross = (b0, 0) if b0 <= b1 else (b1, 1)
                self.boundary_cost[det_id] = cost
                self.boundary_cross[det_id] = cross
                direct = self.boundary_mech.get(int(det_id))
                if cost == 1 and direct is not None and direct[0] == cross:
                    self.boundary_source[det_id] = direct[1]
                else:
                    self.boundary_source[det_id] = "graph"


def _single_fault_responses(catalog: FaultCatalog):
    """Yield (detector mask, word, (seg, cls, loc, pauli)) for every distinct
    elementary fault the noise model can inject."""
    for seg in (0, 1):
        per_cls = catalog.components[seg]
        for cls in CLASS_ORDER:
            for loc, comps in enumerate(per_cls[cls]):
                if cls == "meas":
                    yield comps[0][0], comps[0][1], (seg, cls, loc, ())
                elif cls == "init":
                    # the injected flip letter is fixed by the init basis;
                    # keep the generic label for materialization
                    yield comps[0][0], comps[0][1], (seg, cls, loc, ("flip",))
                elif cls == "h":
                    for letter in ("X", "Y", "Z"):
                        resp = catalog.response_at(seg, cls, loc, (letter,))
                        yield resp[0], resp[1], (seg, cls, loc, (letter,))
                else:
                    for code in range(1, 16):
                        pauli = two_qubit_pauli(code)
                        resp = catalog.response_at(seg, cls, loc, pauli)
                        yield resp[0], resp[1], (seg, cls, loc, pauli)
    for letter in ("X", "Y", "Z"):
        resp = catalog.prep_response(letter)
        yield resp[0], resp[1], (None, "prep", 0, (letter,))


def _metric_pair(met: _KindMetric, idx: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(cost, crossing) matrices from the doubled-graph distances; a parity
    tie resolves to no crossing (in practice the larger multiplicity class)."""
    lu = met.local[idx]
    c0 = met.dist[lu[:, None], lu[None, :]].astype(np.int64)
    c1 = met.dist[lu[:, None], met.m + lu[None, :]].astype(np.int64)
    return np.minimum(c0, c1), (c1 < c0).astype(np.int64)


def _pair_tables(tables: DecoderTables, ids: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Pair cost and crossing matrices for fired detector ids (ascending,
    one kind)."""
    k = len(ids)
    idx = np.array(ids, dtype=np.int64)
    if tables.metric:
        kind = tables.detset.detectors[ids[0]].kind
        return _metric_pair(tables.metric[kind], idx)
    rr = tables.row[idx].reshape(k, 1)
    cc = tables.col[idx].reshape(k, 1)
    tt = tables.t[idx].reshape(k, 1)
    pair = (np.abs(rr - rr.T) // 2 + np.abs(cc - cc.T) // 2 + np.abs(tt - tt.T))
    return pair, np.zeros((k, k), dtype=np.int64)


class MatchingGraph:
    """One kind's matching problem: events, pair weights, boundary twins."""

    def __init__(self, kind: str, events: Sequence[DetectionEvent],
                 pair_cost: np.ndarray, boundary_cost: np.ndarray,
                 boundary_cross: np.ndarray,
                 pair_cross: Optional[np.ndarray] = None):
        self.kind = kind
        self.events = tuple(events)
        self.pair_cost = pair_cost
        self.boundary_cost = boundary_cost
        self.boundary_cross = boundary_cross
        if pair_cross is None:
            pair_cross = np.zeros_like(pair_cost)
        self.pair_cross = pair_cross
        self._pos = {ev.id: i for i, ev in enumerate(self.events)}

    def __len__(self) -> int:
        return len(self.events)

    def dump(self) -> str:
        lines = []
        for ev in self.events:
            lines.append(f"node {ev.id} r{ev.ancilla[0]} c{ev.ancilla[1]} t{ev.t}")
        k = len(self.events)
        for i in range(k):
            for j in range(i + 1, k):
                lines.append(f"edge {self.events[i].id} {self.events[j].id} "
                             f"{int(self.pair_cost[i, j])}")
        for i, ev in enumerate(self.events):
            lines.append(f"edge {ev.id} {-(ev.id + 1)} {int(self.boundary_cost[i])}")
        return "\n".join(lines)


def build_graph(events: Sequence[DetectionEvent], lat: Lattice, kind: str,
                tables: Optional[DecoderTables] = None) -> MatchingGraph:
    events = tuple(events)
    for ev in events:
        if ev.kind != kind:
            raise ValueError(f"event {ev.id} has kind {ev.kind}, expected {kind}")
    k = len(events)
    rr = np.array([ev.ancilla[0] for ev in events], dtype=np.int64).reshape(k, 1)
    cc = np.array([ev.ancilla[1] for ev in events], dtype=np.int64).reshape(k, 1)
    tt = np.array([ev.t for ev in events], dtype=np.int64).reshape(k, 1)
    pair = (np.abs(rr - rr.T) // 2 + np.abs(cc - cc.T) // 2 + np.abs(tt - tt.T))
    cross = np.zeros((k, k), dtype=np.int64)
    bcost = np.zeros(k, dtype=np.int64)
    bcross = np.zeros(k, dtype=np.int64)
    for i, ev in enumerate(events):
        if tables is not None:
            bcost[i] = tables.boundary_cost[ev.id]
            bcross[i] = tables.boundary_cross[ev.id]
        else:
            bcost[i], bcross[i] = _spatial_boundary(ev.ancilla, kind, lat.d)
    if tables is not None and tables.metric and k:
        idx = np.array([ev.id for ev in events], dtype=np.int64)
        pair, cross = _metric_pair(tables.metric[kind], idx)
    return MatchingGraph(kind, events, pair, bcost, bcross, cross)


def _solve(k: int, pair_cost: np.ndarray, boundary_cost: np.ndarray) -> np.ndarray:
    """partner[i] = j for a pair match, -1 for the boundary."""
    if k <= DP_MAX:
        return dp_match(k, pair_cost, boundary_cost)
    # blossom on the doubled graph: boundary twins k..2k-1, zero-weight
    # twin-twin edges guarantee a perfect matching; costs are scaled with a
    # -1 pair bonus so ties break toward pair matches, like the DP rule
    scale = k + 1
    bc = np.asarray(boundary_cost, dtype=np.int64)
    iu, ju = np.triu_indices(k, 1)
    w = np.asarray(pair_cost, dtype=np.int64)[iu, ju]
    keep = w <= bc[iu] + bc[ju]
    idx = np.arange(k, dtype=np.int64)
    eu = np.concatenate([iu[keep], idx, k + iu])
    ev = np.concatenate([ju[keep], k + idx, k + ju])
    ew = np.concatenate([scale * w[keep] - 1, scale * bc,
                         np.zeros(len(iu), dtype=np.int64)])
    mate = min_weight_perfect_matching(2 * k, eu, ev, ew)
    partner = np.full(k, -1, dtype=np.int64)
    for i in range(k):
        if mate[i] < k:
            partner[i] = mate[i]
    return partner


def mwpm(graph: MatchingGraph) -> frozenset:
    """Exact minimum-weight assignment; pairs of DetectionEvents, or an
    event with its BoundaryNode."""
    k = len(graph.events)
    if k == 0:
        return frozenset()
    partner = _solve(k, graph.pair_cost, graph.boundary_cost)
    pairs = []
    for i in range(k):
        p = int(partner[i])
        if p < 0:
            pairs.append((graph.events[i],
                          BoundaryNode(graph.events[i],
                                       int(graph.boundary_cost[i]),
                                       int(graph.boundary_cross[i]))))
        elif i < p:
            pairs.append((graph.events[i], graph.events[p]))
    return frozenset(pairs)


def logical_effect(pairing: frozenset, lat: Lattice,
                   graph: Optional[MatchingGraph] = None) -> Tuple[int, int]:
    """(flips X_L parity, flips Z_L parity) of the correction.

    Geometric pair chains stay in the bulk (ancilla coordinates are >= 1 on
    the axis facing each logical support) and contribute nothing; boundary
    matches contribute their crossing, and so do mechanism pair edges when
    the source graph is supplied.
    """
    x_flip = 0
    z_flip = 0
    for u, v in pairing:
        node = v if isinstance(v, BoundaryNode) else (
            u if isinstance(u, BoundaryNode) else None)
        if node is None:
            if graph is not None:
                bit = int(graph.pair_cross[graph._pos[u.id], graph._pos[v.id]])
                if u.kind == "X":
                    x_flip ^= bit
                else:
                    z_flip ^= bit
            continue
        if node.event.kind == "X":
            x_flip ^= node.crossing
        else:
            z_flip ^= node.crossing
    return x_flip, z_flip


def decode_word(tables: DecoderTables, mask: int) -> int:
    """Class-word correction for one trial's post-phase-1 detector mask."""
    word = 0
    for kind in ("X", "Z"):
        sub = mask & tables.kind_mask[kind]
        if sub == 0:
            continue
        ids = []
        while sub:
            low = sub & -sub
            ids.append(low.bit_length() - 1)
            sub ^= low
        k = len(ids)
        if k == 1:
            cross = int(tables.boundary_cross[ids[0]])
        elif k == 2:
            a, b = ids
            if tables.metric:
                met = tables.metric[kind]
                la, lb = int(met.local[a]), int(met.local[b])
                c0 = int(met.dist[la, lb])
                c1 = int(met.dist[la, met.m + lb])
                w, pcross = (c0, 0) if c0 <= c1 else (c1, 1)
            else:
                w = (abs(int(tables.row[a]) - int(tables.row[b])) // 2
                     + abs(int(tables.col[a]) - int(tables.col[b])) // 2
                     + abs(int(tables.t[a]) - int(tables.t[b])))
                pcross = 0
            if w <= tables.boundary_cost[a] + tables.boundary_cost[b]:
                cross = pcross
            else:
                cross = int(tables.boundary_cross[a] ^ tables.boundary_cross[b])
        else:
            pair, pcross = _pair_tables(tables, ids)
            partner = _solve(k, pair, tables.boundary_cost[np.array(ids)])
            cross = 0
            for i in range(k):
                p = int(partner[i])
                if p < 0:
                    cross ^= int(tables.boundary_cross[ids[i]])
                elif i < p:
                    cross ^= int(pcross[i, p])
        word ^= (cross & 1) << WORD_BIT[kind]
    return word


def decode_pairing(tables: DecoderTables, mask: int) -> Dict[str, Tuple[List[int], List[int]]]:
    """Full matching for one detector mask: per kind, (detector ids, partner).

    partner[i] is an index into the same id list, or -1 for a boundary
    match.  Always runs the full solver; decode_word's small-k shortcuts
    are cross-checked against this in tests.
    """
    out: Dict[str, Tuple[List[int], List[int]]] = {}
    for kind in ("X", "Z"):
        sub = mask & tables.kind_mask[kind]
        ids = []
        while sub:
            low = sub & -sub
            ids.append(low.bit_length() - 1)
            sub ^= low
        k = len(ids)
        if k == 0:
            out[kind] = ([], [])
            continue
        pair, _ = _pair_tables(tables, ids)
        partner = _solve(k, pair, tables.boundary_cost[np.array(ids)])
        out[kind] = (ids, [int(p) for p in partner])
    return out


def events_from_mask(detset: DetectorSet, mask: int) -> Dict[str, List[DetectionEvent]]:
    """Split a detector mask into per-kind event lists (id order)."""
    out: Dict[str, List[DetectionEvent]] = {"X": [], "Z": []}
    for det_id in detset.flipped_ids(mask):
        det = detset.detectors[det_id]
        out[det.kind].append(DetectionEvent(det.id, det.ancilla, det.t, det.kind))
    return out
