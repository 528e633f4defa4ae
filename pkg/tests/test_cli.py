import json
import pathlib
import subprocess
import sys

import pydot
import pytest

from rbolt.cli import main

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"

MINI = """
env: {kind: sapientino, cells: {c1: [[0, 0], [2, 2]], c2: [[2, 0], [0, 2]]}, start: [1, 1]}
bolt:
  specs:
    - formula: "!bip U (bip & cell_c1 & X(!bip U (bip & cell_c1 & X(!bip U (bip & cell_c2 & X(!bip U (bip & cell_c2)))))))"
  shaping: offline
train: {gamma: 0.999, epsilon: 0.2, n: 100, episodes: 300, eval_every: 25}
seeds: [0, 1]
"""


def write(tmp_path, text, name="c.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_compile_tt(tmp_path, capsys):
    assert main(["compile", "--config", str(CONFIGS / "tt.yaml"), "--out", str(tmp_path)]) == 0
    (graph,) = pydot.graph_from_dot_data((tmp_path / "spec_0.dot").read_text())
    nodes = {n.get_name() for n in graph.get_nodes()} - {"node", "edge", "__start"}
    assert len(nodes) == 1
    assert json.loads((tmp_path / "spec_0.json").read_text())["states"] == 1
    assert "tt" in capsys.readouterr().out


def test_compile_eventually(tmp_path, capsys):
    cfg = write(tmp_path, "bolt:\n  fluents: [a]\n  specs: ['F a']\n")
    assert main(["compile", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    assert json.loads((tmp_path / "o" / "spec_0.json").read_text())["states"] == 2
    row = capsys.readouterr().out.splitlines()[1].split()
    assert row[:5] == ["0", "2", "1", "0", "1"]


def test_compile_reports_formula_index(tmp_path, capsys):
    cfg = write(tmp_path, "bolt:\n  fluents: [a]\n  specs: ['F a', 'F (a']\n")
    assert main(["compile", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "spec 1" in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    assert main(["compile"]) == 1
    assert main(["frobnicate"]) == 1


def test_resource_cap_exit_code(tmp_path):
    names = [f"x{k}" for k in range(17)]
    cfg = write(tmp_path, "bolt:\n  specs: ['%s']\n" % " & ".join(names))
    assert main(["compile", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write(tmp_path, "bolt:\n  fluents: [a]\n  specs: ['F a']\noutput: from_config\n")
    assert main(["compile", "--config", cfg]) == 0
    assert (tmp_path / "from_config" / "spec_0.dot").exists()
    monkeypatch.setenv("RBOLT_OUT", str(tmp_path / "from_env"))
    assert main(["compile", "--config", cfg]) == 0
    assert (tmp_path / "from_env" / "spec_0.dot").exists()
    assert main(["compile", "--config", cfg, "--out", str(tmp_path / "from_flag")]) == 0
    assert (tmp_path / "from_flag" / "spec_0.dot").exists()


def test_verify_chain_passes(capsys):
    assert main(["verify", "--config", str(CONFIGS / "chain_verify.yaml")]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") == 5


def test_verify_broken_fixture_fails(capsys):
    assert main(["verify", "--config", str(CONFIGS / "sapientino_broken_potential.yaml")]) == 2
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1].startswith("FAIL")
    assert all(line.startswith("PASS") for line in lines[:-1])


def test_verify_size_cap(tmp_path):
    text = (CONFIGS / "sapientino.yaml").read_text().replace("max_policies: 1", "max_policies: 1\n  product_cap: 10")
    assert main(["verify", "--config", write(tmp_path, text)]) == 3


def test_train_outputs_and_determinism(tmp_path, capsys):
    cfg = write(tmp_path, MINI)
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "b"), "--jobs", "2"]) == 0
    for seed in (0, 1):
        for name in (f"train_seed{seed}.csv", f"policy_seed{seed}.tsv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rows = (tmp_path / "a" / "train_seed0.csv").read_text().splitlines()
    assert rows[0] == "episode,steps,cumulative_reward,score,verdict,best_score"
    best = [float(r.split(",")[-1]) for r in rows[1:]]
    assert best == sorted(best)
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert [r["seed"] for r in report] == [0, 1]
    assert {"mean_return", "mean_score", "spec_satisfaction_rate"} <= set(report[0])


def test_train_seed_override_and_trace(tmp_path):
    text = MINI.replace("seeds: [0, 1]", "seeds: [0, 1]\noutput: {dir: unused, trace: true}")
    assert main(["train", "--config", write(tmp_path, text), "--out", str(tmp_path), "--seed-override", "7"]) == 0
    assert (tmp_path / "train_seed7.csv").exists()
    assert not (tmp_path / "train_seed0.csv").exists()
    first = json.loads((tmp_path / "trace_seed7.jsonl").read_text().splitlines()[0])
    assert first["episode"] == 1 and first["step"] == 0


def test_train_empty_seeds(tmp_path, capsys):
    text = MINI.replace("seeds: [0, 1]", "seeds: []")
    assert main(["train", "--config", write(tmp_path, text)]) == 1
    assert "seeds" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "rbolt", "compile", "--config", str(CONFIGS / "tt.yaml"), "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert out.returncode == 0, out.stderr
