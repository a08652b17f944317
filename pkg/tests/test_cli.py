import hashlib
import json
import subprocess
import sys

import pytest

from cctf.cli import main
from cctf.sweep import DATASET_HEADER

SMALL = """max_ticks = 80
vul_rate = 0.2
p_exploiter = 0.3
[grid]
scouts = [2, 8]
detectors = [1, 9]
p_detector_vulnerable = [0.5]
p_detector_exploited = [1.0]
trials = 3
master_seed = 3
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.toml"
    p.write_text(SMALL)
    return p


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err


def test_no_subcommand():
    assert main([]) == 1


def test_unreadable_config(tmp_path, capsys):
    missing = tmp_path / "nope.toml"
    assert main(["run", "--config", str(missing)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_range_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.toml"
    p.write_text("scouts = 12\ndetectors = 3\n")
    assert main(["run", "--config", str(p)]) == 2
    assert "1 ≤ S < N" in capsys.readouterr().err


@pytest.mark.parametrize("cmd", ["generate", "run", "sweep", "analyze"])
def test_help(cmd, capsys):
    assert main([cmd, "--help"]) == 0
    assert "--" in capsys.readouterr().out


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "cctf" in capsys.readouterr().out


def test_generate(tmp_path):
    out = tmp_path / "g.txt"
    assert main(["generate", "--nodes", "30", "--m", "1", "--seed", "42", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "30 1 42"
    pairs = [tuple(map(int, l.split())) for l in lines[1:] if not l.startswith("#")]
    assert len(pairs) == 29 and pairs == sorted(pairs)
    assert lines[-2].startswith("# central ")
    assert main(["generate", "--nodes", "1"]) == 2


def test_run_precedence_and_trace(tmp_path, capsys):
    cfg = tmp_path / "r.toml"
    cfg.write_text("scouts = 3\ndetectors = 4\nmax_ticks = 40\n")
    trace = tmp_path / "trace.csv"
    assert main(["run", "--config", str(cfg), "--scouts", "5", "--seed", "7", "--trace", str(trace)]) == 0
    captured = capsys.readouterr()
    echoed = json.loads(captured.err.split("effective config: ", 1)[1].splitlines()[0])
    assert echoed["scouts"] == 5 and echoed["seed"] == 7
    metrics = json.loads(captured.out)
    assert metrics["ticks_run"] == 40
    rows = trace.read_text().splitlines()
    assert rows[0] == "tick,compromised_frac,offline_frac,known_vuln,queue_len"
    assert len(rows) == 41


def test_run_ticks_flag(capsys):
    assert main(["run", "--scouts", "2", "--detectors", "2", "--ticks", "15"]) == 0
    assert json.loads(capsys.readouterr().out)["ticks_run"] == 15


def test_sweep_and_analyze(tmp_path, small_cfg, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(small_cfg), "--out", str(a)]) == 0
    assert main(["sweep", "--config", str(small_cfg), "--out", str(b), "--jobs", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == ",".join(DATASET_HEADER)
    assert len(lines) == 13
    c = tmp_path / "c.csv"
    assert main(["sweep", "--config", str(small_cfg), "--out", str(c), "--master-seed", "4"]) == 0
    assert c.read_bytes() != a.read_bytes()

    capsys.readouterr()
    assert main(["analyze", "--dataset", str(a), "--table", "surface", "--metric", "max_offline",
                 "--stat", "max"]) == 0
    surf = capsys.readouterr().out.splitlines()
    assert surf[0] == "exploiters\\interceptors,1,9"
    assert [l.split(",")[0] for l in surf[1:]] == ["2", "8"]
    assert main(["analyze", "--dataset", str(a), "--table", "surface", "--metric", "bogus"]) == 1


def handmade_dataset(path):
    rows = []
    for i, (s, d) in enumerate([(1, 1), (1, 5), (5, 1), (5, 5), (9, 2), (2, 9)]):
        vals = dict.fromkeys(DATASET_HEADER, "0")
        vals.update(config_index=str(i), scouts=str(s), exploiters=str(10 - s), detectors=str(d),
                    interceptors=str(10 - d), team_size="10", n_routers="30",
                    mean_compromised=f"{0.1 * s + 0.01 * d:.6f}", max_compromised=f"{0.05 * s * d % 1:.6f}",
                    mean_offline=f"{0.02 * d:.6f}", max_offline=f"{(i % 3) / 3:.6f}",
                    metric2_two_thirds=str(i % 2), metric3_center=str(int(s > d)))
        rows.append(",".join(vals[c] for c in DATASET_HEADER))
    path.write_text(",".join(DATASET_HEADER) + "\n" + "\n".join(rows) + "\n")


def test_analyze_correlations(tmp_path):
    a = tmp_path / "hand.csv"
    handmade_dataset(a)
    corr = tmp_path / "corr.csv"
    assert main(["analyze", "--dataset", str(a), "--out", str(corr)]) == 0
    table = corr.read_text().splitlines()
    assert table[0].startswith("strategy,mean_compromised")
    assert [l.split(",")[0] for l in table[1:]] == ["attacker_strategy", "defender_strategy"]
    assert all(-1 <= float(v) <= 1 for l in table[1:] for v in l.split(",")[1:])
    # attacker row, mean_compromised: exploiters = 10 - s, so a strong negative relation
    assert float(table[1].split(",")[1]) < -0.9
    assert main(["analyze", "--dataset", str(a), "--level", "configs", "--out", str(corr)]) == 0


def test_analyze_constant_column_fails(tmp_path, capsys):
    cfg = tmp_path / "quiet.toml"
    cfg.write_text("vul_rate = 0.0\nmax_ticks = 10\n[grid]\nscouts = [1, 5]\ndetectors = [1]\n"
                   "p_detector_vulnerable = [1]\np_detector_exploited = [1]\ntrials = 1\n")
    d = tmp_path / "d.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(d)]) == 0
    capsys.readouterr()
    assert main(["analyze", "--dataset", str(d)]) == 3
    assert "zero variance" in capsys.readouterr().err


def test_sweep_bad_jobs(small_cfg, tmp_path):
    assert main(["sweep", "--config", str(small_cfg), "--out", str(tmp_path / "x.csv"), "--jobs", "0"]) == 1


def test_console_script_end_to_end(tmp_path, small_cfg):
    digests = []
    for jobs in ("1", "3"):
        out = tmp_path / f"d{jobs}.csv"
        res = subprocess.run([sys.executable, "-m", "cctf", "sweep", "--config", str(small_cfg),
                              "--out", str(out), "--jobs", jobs], capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    assert digests[0] == digests[1]
