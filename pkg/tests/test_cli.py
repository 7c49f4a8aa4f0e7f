import json
import os
import subprocess
import sys

import pytest

from froglab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_constants(capsys):
    code, out = run(capsys, "constants")
    d = json.loads(out)
    assert code == 0 and 0.796 < d["q"] < 0.798 and d["sigma"] > 0


def test_constants_csv(capsys):
    code, out = run(capsys, "constants", "--format", "csv")
    assert out.splitlines()[0] == "name,value"


def test_oracle_csv(capsys, tmp_path):
    code, out = run(capsys, "oracle", "--n", "3", "--format", "csv")
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert [float(p) for _, p in rows] == pytest.approx([1 / 3, 8 / 27, 10 / 27], abs=1e-12)
    target = tmp_path / "law.csv"
    assert main(["oracle", "--n", "4", "--format", "csv", "--out", str(target)]) == 0
    sidecar = json.loads((tmp_path / "law.csv.moments.json").read_text())
    assert sidecar["n"] == 4 and sidecar["expected_jumps"] == pytest.approx(2 * sidecar["mean"] - 1)


def test_oracle_cap(capsys):
    assert main(["oracle", "--n", "50", "--cap", "10"]) == 2


def test_simulate_n1(capsys):
    code, out = run(capsys, "simulate", "--n", "1", "--reps", "5")
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(records) == 5
    assert all(r["v_inf"] == 1 and r["rho"] == 1 for r in records)
    assert [r["replicate"] for r in records] == list(range(5))


@pytest.mark.parametrize("mode", ["chain", "level", "ideal"])
def test_simulate_csv_modes(capsys, mode):
    code, out = run(capsys, "simulate", "--n", "64", "--reps", "3", "--mode", mode, "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 4


def test_simulate_deterministic(capsys):
    a = run(capsys, "simulate", "--n", "500", "--reps", "50", "--seed", "7")[1]
    b = run(capsys, "simulate", "--n", "500", "--reps", "50", "--seed", "7", "--threads", "3")[1]
    assert a == b


def test_usage_errors(capsys):
    assert main(["bogus"]) == 2
    assert main(["simulate", "--n", "0"]) == 2
    assert main(["simulate", "--n", "5", "--seed", str(2 ** 64)]) == 2
    assert main(["events", "--n", "10", "--reps", "5"]) == 2


def test_verify_exit_codes(capsys):
    code, out = run(capsys, "verify", "--n", "100", "--lemma", "ws")
    assert code == 0 and json.loads(out)["violations"] == []
    assert main(["verify", "--n", "10000", "--lemma", "musum"]) == 1


def test_verify_csv(capsys):
    code, out = run(capsys, "verify", "--n", "200", "--lemma", "var", "--format", "csv")
    assert code == 0 and out.splitlines()[1].startswith("var,200,")


def test_clt_and_dump(capsys, tmp_path):
    dump = tmp_path / "z.csv"
    code, out = run(capsys, "clt", "--n", "2000", "--reps", "200", "--dump-z", str(dump))
    d = json.loads(out)
    assert d["experiment"] == "clt" and code == (0 if d["pass"] else 1)
    lines = dump.read_text().splitlines()
    assert lines[0] == "replicate,z" and len(lines) == 201


def test_events(capsys):
    code, out = run(capsys, "events", "--n", "300", "--reps", "20")
    d = json.loads(out)
    assert code == 0 and d["experiment"] == "events" and d["replicates"] == 20


def test_seed_env_and_entry_point():
    env = dict(os.environ, FROGLAB_SEED="7")
    cmd = [sys.executable, "-m", "froglab", "simulate", "--n", "500", "--reps", "20"]
    a = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd + ["--seed", "7"], capture_output=True, text=True, check=True).stdout
    c = subprocess.run(cmd + ["--seed", "8"], capture_output=True, text=True, check=True).stdout
    assert a == b != c
