"""Brute-force matching oracles for validating the compiled solvers.

Independent of the package code paths: plain recursive enumeration over
all (n-1)!! perfect matchings, and over all pair-or-boundary assignments
for the decoder-style problem.  Feasible up to roughly n = 12.
"""

from __future__ import annotations


def brute_min_perfect(n, edges):
    """Minimum-weight perfect matching by full enumeration.

    edges: iterable of (u, v, w).  Returns (cost, pairs) with pairs a set of
    (min, max) tuples, or None when no perfect matching exists.
    """
    weight = {}
    for u, v, w in edges:
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key not in weight or w < weight[key]:
            weight[key] = w

    best = [None, None]

    def rec(remaining, cost, pairs):
        if best[0] is not None and cost >= best[0]:
            return
        if not remaining:
            best[0] = cost
            best[1] = set(pairs)
            return
        u = remaining[0]
        for idx in range(1, len(remaining)):
            v = remaining[idx]
            key = (u, v) if u < v else (v, u)
            if key in weight:
                pairs.append(key)
                rec(remaining[1:idx] + remaining[idx + 1:], cost + weight[key], pairs)
                pairs.pop()

    rec(list(range(n)), 0, [])
    if best[0] is None:
        return None
    return best[0], best[1]


def brute_boundary_match(k, pair_cost, boundary_cost):
    """Minimum total cost over assignments where every event is either
    paired with another (pair_cost[i][j], None = no edge) or charged its
    boundary cost.  Returns (cost, frozenset of pairs (i, j) with i < j);
    unpaired events are implicit.
    """
    best = [None, None]

    def rec(remaining, cost, pairs):
        if best[0] is not None and cost >= best[0]:
            return
        if not remaining:
            best[0] = cost
            best[1] = frozenset(pairs)
            return
        u = remaining[0]
        rec(remaining[1:], cost + boundary_cost[u], pairs)
        for idx in range(1, len(remaining)):
            v = remaining[idx]
            w = pair_cost[u][v]
            if w is not None:
                pairs.append((u, v))
                rec(remaining[1:idx] + remaining[idx + 1:], cost + w, pairs)
                pairs.pop()

    rec(list(range(k)), 0, [])
    return best[0], best[1]


def matching_weight(mate, edges):
    """Total weight of a mate array against an edge list; asserts the mate
    pairs actually exist as edges.  Returns (cardinality, weight)."""
    weight = {}
    for u, v, w in edges:
        key = (u, v) if u < v else (v, u)
        if key not in weight or w > weight[key]:
            weight[key] = w
    seen = 0
    total = 0
    for u, partner in enumerate(mate):
        if partner < 0:
            continue
        assert mate[partner] == u, "mate array is not symmetric"
        if u < partner:
            key = (u, partner)
            assert key in weight, f"matched pair {key} is not an edge"
            seen += 1
            total += weight[key]
    return seen, total
