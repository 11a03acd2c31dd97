"""Command-line surface: subcommands, config files, exit codes, artifacts."""

import json
import math
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "coslab.cli"]


def run(*args, **kw):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=600, **kw
    )


class TestZeros:
    def test_cos_x_two_certified(self):
        p = run(
            "zeros", "--n", "1", "--mask", "1",
            "--interval", "0:6.283185", "--method", "fast_slow",
        )
        assert p.returncode == 0
        out = json.loads(p.stdout)
        assert out["report"]["certified"] == 2
        assert out["report"]["uncertified"] == 0
        assert out["version"]

    def test_cross_method_agreement(self):
        args = ["zeros", "--n", "96", "--seed", "7", "--m", "16"]
        a = json.loads(run(*args, "--method", "oracle").stdout)
        b = json.loads(run(*args, "--method", "fast_slow").stdout)
        assert a["report"]["certified"] == b["report"]["certified"]

    def test_mask_degree_above_n_exits_2(self):
        p = run("zeros", "--n", "64", "--m", "128", "--seed", "1")
        assert p.returncode == 2
        assert "--n" in p.stderr or "--m" in p.stderr


class TestEnvelope:
    def test_zero_mask_measure_is_pi(self):
        p = run("envelope", "--mask", "0")
        assert p.returncode == 0
        out = json.loads(p.stdout)
        assert out["set"]["measure"] == pytest.approx(math.pi, abs=1e-9)

    def test_mask_file(self, tmp_path):
        mf = tmp_path / "mask.json"
        mf.write_text("[0]")
        p = run("envelope", "--mask-file", str(mf))
        assert p.returncode == 0
        out = json.loads(p.stdout)
        assert out["set"]["measure"] == pytest.approx(math.pi, abs=1e-9)


class TestMc:
    def test_sweep_writes_all_artifacts(self, tmp_path):
        out = tmp_path / "run.jsonl"
        p = run(
            "mc", "--kind", "zeros", "--n", "32", "--m", "4,8",
            "--trials", "3", "--seed", "2", "--out", str(out),
        )
        assert p.returncode == 0
        lines = out.read_text().splitlines()
        header = json.loads(lines[0])
        assert header["command"] == "mc"
        assert len(lines) == 3  # header + one record per cell
        for line in lines[1:]:
            rec = json.loads(line)
            assert rec["schema"] == 1
            assert rec["trials"] == 3
        csv_lines = (tmp_path / "run.jsonl.csv").read_text().splitlines()
        assert csv_lines[1] == "n,m,trials,mean,stderr"
        assert len(csv_lines) == 4
        assert (tmp_path / "run.jsonl.png").stat().st_size > 0

    def test_thread_counts_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        base = ["mc", "--kind", "zeros", "--n", "32", "--m", "4,8",
                "--trials", "4", "--seed", "9"]
        assert run(*base, "--threads", "1", "--out", str(a)).returncode == 0
        assert run(*base, "--threads", "8", "--out", str(b)).returncode == 0
        assert a.read_bytes() == b.read_bytes()

    def test_malformed_sweep_exits_2(self):
        p = run("mc", "--kind", "zeros", "--n", "32", "--m", "4..8 bogus 3")
        assert p.returncode == 2

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("kind=zeros\nn=32\nm=4\ntrials=2\nseed=5\n")
        out = tmp_path / "c.jsonl"
        p = run("mc", "--config", str(cfg), "--trials", "3", "--out", str(out))
        assert p.returncode == 0
        rec = json.loads(out.read_text().splitlines()[1])
        assert rec["trials"] == 3  # flag wins over config

    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus=1\n")
        p = run("mc", "--config", str(cfg), "--kind", "zeros", "--n", "8", "--m", "4")
        assert p.returncode == 2
        assert "bogus" in p.stderr


class TestConstructVerifyFit:
    def test_construct_writes_set_and_summary(self, tmp_path):
        out = tmp_path / "set.txt"
        p = run("construct", "--N", "100", "--attempts", "3", "--seed", "1",
                "--out", str(out))
        assert p.returncode == 0
        summary = json.loads(p.stdout)["summary"]
        assert summary["N"] == 100
        assert len(out.read_text().splitlines()) == 100
        assert json.loads((tmp_path / "set.txt.json").read_text())

    def test_construct_rejects_small_N(self):
        assert run("construct", "--N", "32").returncode == 2

    def test_verify_identities_exits_0(self):
        p = run("verify", "--suite", "identities", "--seed", "0")
        assert p.returncode == 0
        for line in p.stdout.splitlines():
            assert json.loads(line)["passed"]

    def test_fit_exact_recovery(self, tmp_path):
        records = tmp_path / "synth.jsonl"
        lines = [json.dumps({"version": "x", "schema": 1, "command": "synthetic",
                             "params": {}})]
        for n in (256, 512, 1024):
            for m in (8, 32, 128):
                mean = 3.0 * n * math.log(m) / math.sqrt(m) + 0.5 * m
                lines.append(json.dumps({
                    "kind": "zeros", "params": {"n": n, "m": m}, "seed": 0,
                    "trials": 10, "mean": mean, "stderr": 0.0,
                }))
        records.write_text("\n".join(lines) + "\n")
        p = run("fit", "--records", str(records))
        assert p.returncode == 0
        fit = json.loads(p.stdout)["fit"]
        assert fit["c1"] == pytest.approx(3.0, abs=1e-9)
        assert fit["c2"] == pytest.approx(0.5, abs=1e-9)
