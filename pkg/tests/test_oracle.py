from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magicenc.circuits import Schedule, expand_phase1, valid_schedules
from magicenc.lattice import Region, build_lattice
from magicenc.noise import GENERIC_AXIS, AxisMode
from magicenc.oracle import (
    CSV_HEADER,
    CoefficientVector,
    co_optimal,
    coefficient_stability,
    csv_lines,
    enumerate_first_order,
    schedule_search,
)

BEST = Schedule.from_token("X:ENWS;Z:EWNS;off:0")
WORST = Schedule.from_token("X:ESNW;Z:ESWN;off:1")
BEST_VECTOR = (Fraction(2, 5), Fraction(2), Fraction(2, 3), Fraction(0))


@pytest.fixture(scope="module")
def search3():
    return schedule_search(3)


def test_best_schedule_vector_frozen():
    for d1 in (3, 5, 7):
        vec, _ = enumerate_first_order(d1, BEST)
        assert vec.as_tuple() == BEST_VECTOR


def test_worst_schedule_vector_frozen():
    vec, _ = enumerate_first_order(3, WORST)
    assert vec.as_tuple() == (Fraction(4, 3), Fraction(2), Fraction(2, 3), Fraction(0))


def test_counted_fault_identity_at_best_schedule():
    # the ten first-order survivors at the cheapest schedule, resolved to
    # concrete operations; the six two-qubit entries all sit in round 0 on
    # the corner column/row couplings
    _, verdicts = enumerate_first_order(3, BEST)
    circ = expand_phase1(build_lattice(3, 3, Region.I), BEST)
    counted = {
        (v.fault.kind, circ.layers[v.fault.step][v.fault.op_index].qubits,
         v.fault.pauli, v.param)
        for v in verdicts if v.counted
    }
    assert counted == {
        ("prep", ((0, 0),), ("Z",), "cI"),
        ("prep", ((0, 0),), ("X",), "c1"),
        ("prep", ((0, 0),), ("Z",), "c1"),
        ("init", ((0, 2),), ("X",), "cI"),
        ("cnot", ((0, 0), (1, 0)), ("X", "X"), "c2"),
        ("cnot", ((0, 0), (1, 0)), ("Y", "X"), "c2"),
        ("cnot", ((0, 0), (1, 0)), ("Z", "I"), "c2"),
        ("cnot", ((0, 2), (1, 2)), ("X", "X"), "c2"),
        ("cnot", ((0, 2), (1, 2)), ("Y", "X"), "c2"),
        ("cnot", ((0, 1), (0, 0)), ("Z", "Z"), "c2"),
    }
    assert all(v.fault.step < circ.round_starts[1]
               for v in verdicts if v.counted and v.fault.kind == "cnot")


def test_search_census_frozen(search3):
    assert len(search3) == 1152
    hist = Counter(vec.c2 for _, vec in search3)
    assert hist == {
        Fraction(2, 5): 32, Fraction(7, 15): 64, Fraction(8, 15): 32,
        Fraction(3, 5): 64, Fraction(2, 3): 16, Fraction(11, 15): 48,
        Fraction(4, 5): 112, Fraction(13, 15): 192, Fraction(14, 15): 160,
        Fraction(1): 48, Fraction(16, 15): 64, Fraction(17, 15): 64,
        Fraction(6, 5): 144, Fraction(19, 15): 64, Fraction(4, 3): 48,
    }
    # every other coefficient is schedule-independent
    assert {vec.cI for _, vec in search3} == {Fraction(2)}
    assert {vec.c1 for _, vec in search3} == {Fraction(2, 3)}
    assert {vec.cM for _, vec in search3} == {Fraction(0)}


def test_search_order_and_extremes(search3):
    assert search3[0][0] == BEST
    assert search3[0][1].c2 == Fraction(2, 5)
    assert search3[-1][1].c2 == Fraction(4, 3)
    keys = [(vec.c2, vec.c1, sched.token()) for sched, vec in search3]
    assert keys == sorted(keys)


def test_co_optimal_set(search3):
    co = co_optimal(search3)
    assert len(co) == 32
    assert BEST in co
    for sched in co[::7]:
        vec, _ = enumerate_first_order(3, sched)
        assert vec.as_tuple() == BEST_VECTOR


def test_transpose_duality_with_mirrored_diagonal():
    # mirroring the lattice swaps the two diagonal conventions, so vectors
    # match only when the region assignment flips along with the schedule
    for tok in ("X:ENWS;Z:EWNS;off:0", "X:ESNW;Z:ESWN;off:1",
                "X:NEWS;Z:NWES;off:0", "X:NESW;Z:ENWS;off:1",
                "X:WSEN;Z:SENW;off:0"):
        sched = Schedule.from_token(tok)
        vec, _ = enumerate_first_order(3, sched, diagonal_region=Region.I)
        mirrored, _ = enumerate_first_order(3, sched.transpose(),
                                            diagonal_region=Region.II)
        assert vec == mirrored


def test_duality_needs_the_diagonal_flip():
    flat, _ = enumerate_first_order(3, BEST.transpose(), diagonal_region=Region.I)
    assert flat.c2 == Fraction(4, 5)  # not 2/5: same-region transpose differs


def test_verdicts_independent_of_continuation_length():
    base, verd1 = enumerate_first_order(3, BEST, extra_rounds=1)
    for extra in (2, 3):
        vec, verd = enumerate_first_order(3, BEST, extra_rounds=extra)
        assert vec == base
        assert [v.counted for v in verd] == [v.counted for v in verd1]
        assert [v.phase1_detected for v in verd] == [v.phase1_detected for v in verd1]


def test_axis_modes_frozen_at_best_schedule():
    expected = {
        "X": ((Fraction(1, 5), Fraction(1), Fraction(2, 3), Fraction(0)), 6),
        "Y": ((Fraction(1, 3), Fraction(2), Fraction(2, 3), Fraction(0)), 9),
        "Z": ((Fraction(4, 15), Fraction(2), Fraction(2, 3), Fraction(0)), 8),
    }
    for letter, (tup, n_counted) in expected.items():
        vec, verdicts = enumerate_first_order(3, BEST, AxisMode(letter))
        assert vec.as_tuple() == tup
        assert sum(v.counted for v in verdicts) == n_counted


def test_axis_mode_drops_only_own_class():
    # a Pauli-axis run never counts residuals along its own axis; away from
    # the injection site the surviving set is exactly the generic one minus
    # that class (the seeding branches themselves depend on the axis)
    def key(v):
        return (v.fault.kind, v.fault.step, v.fault.op_index, v.fault.pauli)

    _, generic = enumerate_first_order(3, BEST)
    gen_counted = {key(v): v.residual_class
                   for v in generic if v.counted and v.fault.kind != "prep"}
    for letter in ("X", "Y", "Z"):
        _, verdicts = enumerate_first_order(3, BEST, AxisMode(letter))
        kept = {key(v) for v in verdicts if v.counted and v.fault.kind != "prep"}
        assert kept == {k for k, cls in gen_counted.items() if cls != letter}
        assert all(v.residual_class != letter for v in verdicts if v.counted)


def test_coefficient_stability():
    table, stable = coefficient_stability(BEST, (3, 5, 7))
    assert stable
    assert all(vec.as_tuple() == BEST_VECTOR for vec in table.values())


def test_coefficient_vector_algebra():
    a = CoefficientVector(Fraction(2, 5), Fraction(2), Fraction(2, 3), Fraction(0))
    b = CoefficientVector(Fraction(1, 5), Fraction(0), Fraction(1, 3), Fraction(1))
    assert (a + b).as_tuple() == (Fraction(3, 5), Fraction(2), Fraction(1), Fraction(1))
    with pytest.raises(AssertionError):
        CoefficientVector(Fraction(-1, 5), Fraction(0), Fraction(0), Fraction(0))


@given(st.floats(1e-6, 1e-2), st.floats(0, 2), st.floats(0, 2), st.floats(0, 2))
@settings(max_examples=50, deadline=None)
def test_rate_matches_linear_combination(p2, ri, r1, rm):
    from magicenc.noise import NoiseParams
    vec = CoefficientVector(*BEST_VECTOR)
    noise = NoiseParams(p_I=p2 * ri, p_M=p2 * rm, p_1=p2 * r1, p_2=p2)
    want = (float(Fraction(2, 5)) * p2 + 2 * p2 * ri + float(Fraction(2, 3)) * p2 * r1)
    assert vec.rate(noise) == pytest.approx(want, rel=1e-12)


def test_csv_round_trip(search3):
    lines = csv_lines(search3[:3])
    assert lines[0] == CSV_HEADER
    assert lines[1] == "X:ENWS;Z:EWNS;off:0,2,5,2,1,2,3,0,1"
    for line in lines[1:]:
        fields = line.split(",")
        assert len(fields) == 9
        sched = Schedule.from_token(fields[0])
        nums = [int(v) for v in fields[1:]]
        vec, _ = enumerate_first_order(3, sched)
        assert vec.csv_fields() == nums


def test_verdict_counts_cover_every_location():
    # 3 seeding branches; 2 rounds at d1=3 with 12 ancillas (40 couplings,
    # 12 H ops, 12 readouts per round) plus 12 data inits in round 0 only
    _, verdicts = enumerate_first_order(3, BEST)
    by_kind = Counter(v.fault.kind for v in verdicts)
    assert by_kind == {
        "prep": 3,
        "init": 2 * 12 + 12,
        "meas": 2 * 12,
        "h": 2 * 12 * 3,
        "cnot": 2 * 40 * 15,
    }
