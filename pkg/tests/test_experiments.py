import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import beta

from magicenc import experiments
from magicenc.experiments import (
    CSV_COLUMNS,
    DISTILLATION_THRESHOLD,
    SweepRecord,
    SweepSpec,
    available_copies,
    parse_csv,
    plan_copies,
    plan_distillation,
    run_sweep,
    simulate_point,
    wilson_interval,
    write_csv,
)
from magicenc.noise import NoiseParams
from magicenc.protocol import ProtocolConfig


def spec35(**kw):
    base = dict(p2_values=(1e-3,), d1=3, d2=5, trials=2000, master_seed=7)
    base.update(kw)
    return SweepSpec(**base)


def test_spec_validation():
    with pytest.raises(ValueError):
        spec35(p2_values=())
    with pytest.raises(ValueError):
        spec35(p2_values=(1e-3, 0.0))
    with pytest.raises(ValueError):
        spec35(trials=0)
    with pytest.raises(ValueError):
        spec35(ratios=(0.1, -0.1, 0.0))
    with pytest.raises(ValueError):
        spec35(schedule="X:NESW")
    cfg = spec35(ratios=(0.5, 0.25, 0.125)).point_config(2e-3)
    assert (cfg.noise.p_I, cfg.noise.p_M, cfg.noise.p_1) == (1e-3, 5e-4, 25e-5)


def test_wilson_boundary_clamps():
    low, high = wilson_interval(0, 50)
    assert low == 0.0 and 0 < high < 1
    low, high = wilson_interval(50, 50)
    assert high == 1.0 and 0 < low < 1
    with pytest.raises(ValueError):
        wilson_interval(1, 0)
    with pytest.raises(ValueError):
        wilson_interval(5, 4)
    with pytest.raises(ValueError):
        wilson_interval(1, 10, confidence=1.0)


def clopper_pearson(k, n, conf=0.95):
    alpha = 1 - conf
    low = 0.0 if k == 0 else beta.ppf(alpha / 2, k, n - k + 1)
    high = 1.0 if k == n else beta.ppf(1 - alpha / 2, k + 1, n - k)
    return low, high


def test_wilson_against_exact_binomial_tails():
    wl, wh = wilson_interval(5, 100)
    cl, ch = clopper_pearson(5, 100)
    assert wl <= (cl + ch) / 2 <= wh
    assert abs(wl - cl) < 0.02 and abs(wh - ch) < 0.02


@given(st.integers(1, 5000), st.data())
@settings(max_examples=80, deadline=None)
def test_wilson_interval_properties(n, data):
    k = data.draw(st.integers(0, n))
    low, high = wilson_interval(k, n)
    assert 0.0 <= low <= k / n <= high <= 1.0
    cl, ch = clopper_pearson(k, n)
    # the exact interval is the conservative one; Wilson stays inside it
    # up to a small continuity slack
    assert low >= cl - 0.02 and high <= ch + 0.02


def test_sweep_reproducible_and_worker_independent(monkeypatch):
    monkeypatch.setattr(experiments, "SHARD_TRIALS", 97)
    spec = spec35(trials=500)
    ref = run_sweep(spec)
    again = run_sweep(spec)
    pooled = run_sweep(spec, threads=2)
    monkeypatch.setattr(experiments, "SHARD_TRIALS", 10 ** 6)
    unsharded = run_sweep(spec)
    assert ref == again == pooled == unsharded


def test_sweep_csv_round_trip(tmp_path):
    out = tmp_path / "sweep.csv"
    records = run_sweep(spec35(p2_values=(1e-3, 2e-3), trials=1000), out=str(out))
    assert parse_csv(str(out)) == records
    text = out.read_text().splitlines()
    assert text[0] == ",".join(CSV_COLUMNS)
    assert len(text) == 3


def test_round_trip_with_no_accepted_trials(tmp_path):
    rec = SweepRecord(
        p2=0.5, pI=0.0, pM=0.0, p1=0.0, d1=3, d2=3,
        schedule="X:ENWS;Z:EWNS;off:0", trials=10, accepted=0, harmful=0,
        accept_rate=0.0, pL=float("nan"), pL_ci_low=float("nan"),
        pL_ci_high=float("nan"), master_seed=1)
    out = tmp_path / "empty.csv"
    write_csv([rec], str(out))
    assert parse_csv(str(out)) == [rec]


def test_csv_errors_name_the_path(tmp_path):
    with pytest.raises(OSError, match="no/such/dir"):
        write_csv([], "/no/such/dir/x.csv")
    with pytest.raises(OSError, match="missing.csv"):
        parse_csv(str(tmp_path / "missing.csv"))
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError, match="header"):
        parse_csv(str(bad))
    short = tmp_path / "short.csv"
    short.write_text(",".join(CSV_COLUMNS) + "\n1,2\n")
    with pytest.raises(ValueError, match="row"):
        parse_csv(str(short))


def test_record_invariants():
    with pytest.raises(AssertionError):
        SweepRecord(p2=1e-3, pI=0, pM=0, p1=0, d1=3, d2=5, schedule="s",
                    trials=10, accepted=11, harmful=0, accept_rate=1.1,
                    pL=0.0, pL_ci_low=0.0, pL_ci_high=0.0, master_seed=0)
    with pytest.raises(AssertionError):
        SweepRecord(p2=1e-3, pI=0, pM=0, p1=0, d1=3, d2=5, schedule="s",
                    trials=10, accepted=5, harmful=6, accept_rate=0.5,
                    pL=1.2, pL_ci_low=0.0, pL_ci_high=1.0, master_seed=0)


def test_min_accepted_grows_budget():
    spec = SweepSpec((0.05,), d1=3, d2=3, trials=200, master_seed=3)
    rec = run_sweep(spec, min_accepted=300)[0]
    assert rec.accepted >= 300
    assert rec.trials > 200 and rec.trials % 200 == 0


def test_min_accepted_gives_up_eventually():
    # acceptance is essentially zero at this rate, so the growth loop must
    # stop with a diagnostic instead of spinning forever
    spec = SweepSpec((0.3,), d1=3, d2=5, trials=1, master_seed=0)
    with pytest.raises(RuntimeError, match="accepted"):
        run_sweep(spec, min_accepted=2)


def test_sweep_monotone_across_a_decade():
    spec = spec35(p2_values=(2e-4, 2e-3), trials=30_000)
    lo, hi = run_sweep(spec)
    assert lo.pL_ci_high < hi.pL_ci_low


def test_simulate_point_uses_explicit_config():
    noise = NoiseParams(p_I=0.0, p_M=0.0, p_1=0.0, p_2=0.0)
    cfg = ProtocolConfig(3, 3, noise)
    rec = simulate_point(cfg, trials=64, master_seed=0)
    assert rec.accepted == rec.trials == 64
    assert rec.harmful == 0 and rec.pL == 0.0
    assert rec.schedule == cfg.schedule.token()
    assert (rec.p2, rec.pI, rec.pM, rec.p1) == (0.0, 0.0, 0.0, 0.0)


def test_plan_copies_values():
    assert plan_copies(0.5, 9) == pytest.approx(0.998046875, abs=1e-9)
    assert plan_copies(1.0, 3) == 1.0
    assert plan_copies(0.0, 5) == 0.0
    assert available_copies(7, 21) == 9
    assert available_copies(3, 5) == 1
    assert available_copies(3, 7) == 4
    with pytest.raises(ValueError):
        plan_copies(1.5, 2)
    with pytest.raises(ValueError):
        plan_copies(0.5, 0)
    with pytest.raises(ValueError):
        available_copies(5, 3)


def test_plan_distillation_trajectory():
    rounds, traj = plan_distillation(4e-4, 1e-12)
    assert traj[0] == 4e-4
    assert traj[1] == pytest.approx(35 * (4e-4) ** 3, rel=1e-12)
    assert rounds == len(traj) - 1
    assert traj[-1] <= 1e-12 < traj[-2]

    rounds, traj = plan_distillation(1e-4, 1e-3)
    assert rounds == 0 and traj == [1e-4]

    # an input ten times cheaper wins a factor 1000 in the first round
    _, a = plan_distillation(4e-4, 1e-10)
    _, b = plan_distillation(4e-3, 1e-10)
    assert b[1] / a[1] == pytest.approx(1000.0, rel=1e-9)

    for bad in (0.0, DISTILLATION_THRESHOLD, 0.5):
        with pytest.raises(ValueError):
            plan_distillation(bad, 1e-9)
    with pytest.raises(ValueError):
        plan_distillation(1e-3, 0.0)


@given(st.floats(1e-6, 0.99 / math.sqrt(35)), st.floats(1e-30, 1e-3))
@settings(max_examples=60, deadline=None)
def test_distillation_always_descends(p_in, target):
    rounds, traj = plan_distillation(p_in, target)
    assert all(b < a for a, b in zip(traj, traj[1:]))
    assert traj[-1] <= target or rounds == 0
