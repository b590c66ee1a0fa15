import pytest

from magicenc.cli import ENV_THREADS, load_config, main
from magicenc.experiments import parse_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_prints_vector(capsys):
    code, out, _ = run(capsys, "enumerate", "--d1", "3")
    assert code == 0
    assert "c2=2/5 cI=2 c1=2/3 cM=0" in out
    assert "10 counted" in out


def test_enumerate_axis_and_diagonal(capsys):
    code, out, _ = run(capsys, "enumerate", "--d1", "3", "--axis", "Z",
                       "--diagonal", "II")
    assert code == 0
    assert "c2=" in out


def test_simulate_smoke(capsys):
    code, out, _ = run(capsys, "simulate", "--d1", "3", "--d2", "3",
                       "--p2", "1e-3", "--trials", "500")
    assert code == 0
    assert "accept_rate=" in out and "pL=" in out


def test_simulate_requires_p2(capsys):
    code, _, err = run(capsys, "simulate", "--d1", "3")
    assert code == 2
    assert "--p2" in err


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--d1", "three"])
    assert exc.value.code == 2


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_sweep_writes_csv(tmp_path, capsys):
    out_path = tmp_path / "s.csv"
    code, out, err = run(capsys, "sweep", "--p2", "1e-3,2e-3", "--d1", "3",
                         "--d2", "3", "--trials", "400", "--out", str(out_path))
    assert code == 0
    assert "wrote 2 records" in out
    records = parse_csv(str(out_path))
    assert [r.p2 for r in records] == [1e-3, 2e-3]
    assert err.count("p2=") == 2  # progress lines


def test_config_file_defaults_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# geometry\nd1 = 3\nd2 = 3\ntrials = 300\np2 = 1e-3\n")
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 0
    assert "trials=300" in out and "d2=3" in out
    code, out, _ = run(capsys, "simulate", "--config", str(cfg),
                       "--trials", "200")
    assert code == 0
    assert "trials=200" in out  # explicit flag wins


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no_such_flag = 1\n")
    code, _, err = run(capsys, "simulate", "--config", str(cfg), "--p2", "1e-3")
    assert code == 2
    assert "no_such_flag" in err


def test_config_file_syntax_and_io_errors(tmp_path, capsys):
    cfg = tmp_path / "syntax.cfg"
    cfg.write_text("just a line without equals\n")
    code, _, err = run(capsys, "validate", "--config", str(cfg))
    assert code == 2 and "key = value" in err
    code, _, err = run(capsys, "validate", "--config", str(tmp_path / "nope"))
    assert code == 2 and "nope" in err


def test_load_config_parses_comments_and_dashes(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("min-accepted = 5  # inline comment\n\np2 = 1e-3\n")
    assert load_config(str(cfg)) == {"min_accepted": "5", "p2": "1e-3"}


def test_env_threads_used_when_flag_absent(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(ENV_THREADS, "2")
    code, out, _ = run(capsys, "simulate", "--d1", "3", "--d2", "3",
                       "--p2", "1e-3", "--trials", "200")
    assert code == 0
    monkeypatch.setenv(ENV_THREADS, "zebra")
    code, _, err = run(capsys, "simulate", "--d1", "3", "--d2", "3",
                       "--p2", "1e-3", "--trials", "100")
    assert code == 2 and ENV_THREADS in err


def test_search_schedule_csv(tmp_path, capsys):
    out_path = tmp_path / "sched.csv"
    code, out, _ = run(capsys, "search-schedule", "--d1", "3", "--top", "2",
                       "--out", str(out_path))
    assert code == 0
    assert "1152 valid schedules" in out
    assert "2/5 .. 4/3" in out
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("schedule,c2_num")
    assert len(lines) == 1153


def test_coeff_stability_output(capsys):
    code, out, _ = run(capsys, "coeff-stability", "--d1s", "3,5",
                       "--schedule", "X:ENWS;Z:EWNS;off:0")
    assert code == 0
    assert "stable across d1=3,5: yes" in out


def test_plan_copies_via_distances(capsys):
    code, out, _ = run(capsys, "plan-copies", "--success-prob", "0.5",
                       "--d1", "7", "--d2", "21")
    assert code == 0
    assert "9 seed-size copies" in out and "0.998047" in out
    code, _, err = run(capsys, "plan-copies", "--success-prob", "0.5")
    assert code == 2 and "--copies" in err


def test_plan_distillation_output(capsys):
    code, out, _ = run(capsys, "plan-distillation", "--p-in", "4e-4",
                       "--target", "1e-8")
    assert code == 0
    assert "round 1: p=2.24e-09" in out
    code, _, err = run(capsys, "plan-distillation", "--p-in", "0.9",
                       "--target", "1e-8")
    assert code == 2 and "converge" in err


def test_validate_accepts_good_and_rejects_bad(capsys):
    code, out, _ = run(capsys, "validate", "--d1", "3", "--d2", "5")
    assert code == 0
    assert "all audits passed" in out
    code, _, err = run(capsys, "validate", "--d1", "3",
                       "--schedule", "X:NESW;Z:QQQQ;off:0")
    assert code == 2
    code, _, err = run(capsys, "validate", "--d1", "4")
    assert code == 2
