"""End-to-end tests for the command line driver: artifacts, manifests, exit codes."""

import hashlib
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from returnspec.cli import build_parser, main

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"


def write_cfg(tmp_path: Path, text: str, name: str = "exp.cfg") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def run_cli(args, capsys):
    status = main([str(a) for a in args])
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def read_manifest(out: Path) -> dict:
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def test_parser_nested_subcommands():
    parser = build_parser()
    args = parser.parse_args(["gset", "search", "--config", "x.cfg"])
    assert args.command == "gset" and args.subcommand == "search"
    args = parser.parse_args(["cache", "gc", "--out", "somewhere"])
    assert args.command == "cache" and args.subcommand == "gc"
    args = parser.parse_args(["simulate", "--config", "x.cfg", "--format", "csv"])
    assert args.format == "csv" and args.threads == 1


def test_simulate_artifacts_and_manifest(tmp_path, capsys):
    cfg = CONFIGS / "simulate_example.cfg"
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["simulate", "--config", cfg, "--out", out], capsys)
    assert status == 0
    assert "simulate: 6 return times in [0, 19]" in stdout

    rts = out / "return_set.rts"
    assert rts.exists()
    manifest = read_manifest(out)
    assert manifest["command"] == "simulate"
    assert manifest["seed"] == 0
    assert manifest["threads"] == 1
    assert manifest["format"] == "json"
    assert manifest["config_sha256"] == hashlib.sha256(cfg.read_bytes()).hexdigest()
    assert manifest["artifacts"] == {"return_set.rts": sha256_file(rts)}

    # the default cache sits next to the artifacts and holds one payload pair
    cache = out / "cache"
    payloads = sorted(p.name for p in cache.iterdir())
    assert len(payloads) == 2
    assert any(n.endswith(".rts") for n in payloads)
    assert any(n.endswith(".sha256") for n in payloads)


def test_simulate_csv_adds_density_table(tmp_path, capsys):
    cfg = CONFIGS / "simulate_example.cfg"
    out = tmp_path / "run"
    status, _, _ = run_cli(
        ["simulate", "--config", cfg, "--out", out, "--format", "csv"], capsys
    )
    assert status == 0
    dens = out / "density.csv"
    lines = dens.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "n,density"
    assert len(lines) == 1 + 20
    manifest = read_manifest(out)
    assert manifest["format"] == "csv"
    assert set(manifest["artifacts"]) == {"return_set.rts", "density.csv"}


SPECTRUM_CFG = """\
experiment = spectrum
K = T^1
alpha = sqrt2-1
U = (0, 1/2)
N = 2^12
threshold = 0.05
"""


def test_spectrum_artifacts_and_content(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SPECTRUM_CFG)
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["spectrum", "--config", cfg, "--out", out], capsys)
    assert status == 0
    assert "spectrum:" in stdout and "peaks" in stdout

    records = read_jsonl(out / "spectrum.jsonl")
    assert records
    for rec in records:
        assert set(rec) == {"theta", "re", "im", "magnitude", "gap", "N", "flags"}
        assert rec["N"] == 2**12
    mags = [rec["magnitude"] for rec in records]
    assert mags == sorted(mags, reverse=True)
    # the constant term of the half interval dominates at ~1/2
    assert records[0]["theta"] == pytest.approx(0.0, abs=1e-9)
    assert records[0]["magnitude"] == pytest.approx(0.5, abs=5e-3)
    manifest = read_manifest(out)
    assert set(manifest["artifacts"]) == {"return_set.rts", "spectrum.jsonl"}


def test_spectrum_rerun_is_byte_identical(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SPECTRUM_CFG)
    outs = [tmp_path / "one", tmp_path / "two"]
    for out in outs:
        status, _, _ = run_cli(["spectrum", "--config", cfg, "--out", out], capsys)
        assert status == 0
    for name in ("return_set.rts", "spectrum.jsonl", "manifest.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_reconstruct_command_recovers_torsion(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = reconstruct
K = T^1 x Z/2
alpha = (sqrt2-1, 1)
U = (0, 0.4) x {0}
N = 2^16
threshold = 0.05
resolution = 1e-5
verify_tol = 1e-3
""",
    )
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["reconstruct", "--config", cfg, "--out", out], capsys)
    assert status == 0
    assert "reconstruct: T^1 x Z/2 (verified: True)" in stdout
    report = json.loads((out / "reconstruction.json").read_text(encoding="utf-8"))
    assert report["rank"] == 1
    assert report["torsion"] == [2]
    assert report["verified"] is True
    assert report["max_phase_error"] < 1e-3
    assert any(abs(t - 0.5) < 1e-6 for t in report["thetas"])
    assert report["input_stabilizer"]["is_trivial"] is True
    manifest = read_manifest(out)
    assert set(manifest["artifacts"]) == {
        "return_set.rts",
        "spectrum.jsonl",
        "reconstruction.json",
    }


def test_compare_consistent_flags_stabilizer(tmp_path, capsys):
    cfg = CONFIGS / "c02_twoarc_pair.cfg"
    out = tmp_path / "run"
    status, stdout, stderr = run_cli(["compare", "--config", cfg, "--out", out], capsys)
    assert status == 0
    assert "compare: consistent (bit-identical return sets)" in stdout
    report = json.loads((out / "compare.json").read_text(encoding="utf-8"))
    assert report["verdict"] == "consistent"
    assert report["detail"] == "bit-identical return sets"
    # both input sets are invariant under the half shift, so both sides warn
    assert len(report["warnings"]) == 2
    assert stderr.count("warning:") == 2
    assert report["stabilizer_a"]["is_trivial"] is False
    assert any("1/2" in s for s in report["stabilizer_a"]["shifts"])
    assert set(read_manifest(out)["artifacts"]) == {
        "return_set_a.rts",
        "return_set_b.rts",
        "compare.json",
    }


def test_compare_distinguished_exits_3(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = compare
K = T^1
alpha = sqrt2-1
U = (0, 1/2)
K2 = T^1
alpha2 = sqrt3-1
U2 = (0, 1/2)
N = 2^14
mode = spectra
""",
    )
    out = tmp_path / "run"
    status, stdout, stderr = run_cli(["compare", "--config", cfg, "--out", out], capsys)
    assert status == 3
    assert "compare: distinguished" in stdout
    assert "verification failure (details in the artifacts)" in stderr
    report = json.loads((out / "compare.json").read_text(encoding="utf-8"))
    assert report["verdict"] == "distinguished"
    assert report["mismatch"] is not None and report["mismatch"] > 1e-2
    assert report["theta"] is not None


def test_gset_search_record_stream(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = gset-search
catalog = C4, S3
exhaustive_degree = 16
samples = 64
seed = 1
sweep = on
""",
    )
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["gset", "search", "--config", cfg, "--out", out], capsys)
    assert status == 0

    records = read_jsonl(out / "search.jsonl")
    banner, body, summary = records[0], records[1:-1], records[-1]
    assert banner["record"] == "banner"
    assert banner["catalog"] == ["C4", "S3"]
    assert banner["sweep"] is True
    assert banner["seed"] == 1
    assert "certify tested instances only" in banner["banner"]
    assert banner["banner"] in stdout

    instances = [r for r in body if r["record"] == "instance"]
    sweeps = [r for r in body if r["record"] == "sweep"]
    assert len(instances) + len(sweeps) == len(body)
    # C4 has three transitive actions and S3 four; each gets one sweep record
    assert len(sweeps) == 7
    assert all(s["failures"] == 0 and s["witness_ok"] for s in sweeps)

    assert summary["record"] == "summary"
    assert summary["instances"] == len(instances)
    assert summary["stable"] == sum(r["stable"] for r in instances)
    assert summary["simple"] == sum(r["simple"] for r in instances)
    assert summary["counterexamples"] == sum(r["counterexample"] for r in instances)
    assert summary["counterexamples"] == 0
    assert summary["all_certificates_verified"] is True
    assert summary["reconstruction_failures"] == 0
    assert read_manifest(out)["command"] == "gset search"


def test_gset_search_counterexamples_verified(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = gset-search
catalog = D6
exhaustive_degree = 12
samples = 64
seed = 0
""",
    )
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["gset", "search", "--config", cfg, "--out", out], capsys)
    assert status == 0
    records = read_jsonl(out / "search.jsonl")
    summary = records[-1]
    assert summary["counterexamples"] == 6
    assert summary["certificates_verified"] == 6
    assert summary["all_certificates_verified"] is True
    hits = [r for r in records if r["record"] == "instance" and r["counterexample"]]
    assert len(hits) == 6
    for r in hits:
        assert r["stable"] and not r["simple"]
        assert r["certificate_verified"] is True
        blocks = [tuple(b) for b in r["certificate"]]
        assert sorted(x for b in blocks for x in b) == list(range(r["degree"]))
    assert "6 counterexamples, 6 certificates verified" in stdout


def test_gset_reconstruct_pointed(tmp_path, capsys):
    cfg = CONFIGS / "gset_reconstruct_example.cfg"
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["gset", "reconstruct", "--config", cfg, "--out", out], capsys)
    assert status == 0
    assert "gset reconstruct: degree 3 action rebuilt (verified: True)" in stdout
    report = json.loads((out / "gset_reconstruction.json").read_text(encoding="utf-8"))
    assert report["group"] == "S3"
    assert report["degree"] == 3
    assert report["simple"] is True
    assert report["round_trip_ok"] is True
    assert report["pointed_isomorphic"] is True
    assert report["verified"] is True
    assert report["warnings"] == []
    # a one point set is fixed by a transposition, so it is not stable
    assert report["stable"] is False


def test_gset_reconstruct_direct_subset_quotient(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = gset-reconstruct
group = S3
S = e, (0 1 2), (0 2 1)
""",
    )
    out = tmp_path / "run"
    status, stdout, _ = run_cli(["gset", "reconstruct", "--config", cfg, "--out", out], capsys)
    assert status == 0
    report = json.loads((out / "gset_reconstruction.json").read_text(encoding="utf-8"))
    assert report["source"]["kind"] == "direct"
    assert report["source"]["size"] == 3
    # the subset is a copy of C3 inside S3: not simple, quotient has two points
    assert report["simple"] is False
    assert report["degree"] == 2
    assert report["round_trip_ok"] is True
    assert report["verified"] is True
    assert any("not simple" in w for w in report["warnings"])
    assert "degree 2 action rebuilt" in stdout


def test_cap_exceeded_exits_4(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = gset-reconstruct
generators = (0 1), (0 1 2 3 4 5 6 7)
action = natural
x0 = 0
U = {0}
""",
    )
    status, _, stderr = run_cli(
        ["gset", "reconstruct", "--config", cfg, "--out", tmp_path / "run"], capsys
    )
    assert status == 4
    assert stderr.startswith("cap exceeded:")


def test_exit_2_missing_config(tmp_path, capsys):
    status, _, stderr = run_cli(
        ["simulate", "--config", tmp_path / "nope.cfg", "--out", tmp_path / "run"], capsys
    )
    assert status == 2
    assert "config error: no such file" in stderr


def test_exit_2_malformed_config(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "experiment = simulate\nbogus = 1\n")
    status, _, stderr = run_cli(
        ["simulate", "--config", cfg, "--out", tmp_path / "run"], capsys
    )
    assert status == 2
    assert f"config error in {cfg}:" in stderr
    assert "line 2" in stderr


def test_exit_2_wrong_experiment_kind(tmp_path, capsys):
    cfg = CONFIGS / "simulate_example.cfg"
    status, _, stderr = run_cli(
        ["spectrum", "--config", cfg, "--out", tmp_path / "run"], capsys
    )
    assert status == 2
    assert "config is a 'simulate' experiment, not 'spectrum'" in stderr


def test_exit_2_bad_threads(tmp_path, capsys):
    cfg = CONFIGS / "simulate_example.cfg"
    status, _, stderr = run_cli(
        ["simulate", "--config", cfg, "--out", tmp_path / "run", "--threads", "0"], capsys
    )
    assert status == 2
    assert "--threads must be at least 1" in stderr


def test_exit_2_cache_gc_without_target(capsys):
    status, _, stderr = run_cli(["cache", "gc"], capsys)
    assert status == 2
    assert "cache gc needs --out or --config" in stderr


def test_corrupt_cache_entry_is_recomputed(tmp_path, capsys):
    cfg = CONFIGS / "simulate_example.cfg"
    out = tmp_path / "run"
    run_cli(["simulate", "--config", cfg, "--out", out], capsys)
    good = (out / "return_set.rts").read_bytes()

    payload = next(p for p in (out / "cache").iterdir() if p.suffix == ".rts")
    payload.write_bytes(payload.read_bytes() + b"garbage")
    with pytest.warns(UserWarning, match="checksum"):
        status = main(["simulate", "--config", str(cfg), "--out", str(out)])
    capsys.readouterr()
    assert status == 0
    assert (out / "return_set.rts").read_bytes() == good


def test_cache_gc_command(tmp_path, capsys):
    cfg = CONFIGS / "simulate_example.cfg"
    out = tmp_path / "run"
    run_cli(["simulate", "--config", cfg, "--out", out], capsys)
    cache = out / "cache"
    payload = next(p for p in cache.iterdir() if p.suffix == ".rts")
    payload.write_bytes(b"not a return set")
    (cache / "stray.rts").write_bytes(b"no sidecar either")

    status, stdout, _ = run_cli(["cache", "gc", "--config", cfg, "--out", out], capsys)
    assert status == 0
    report = json.loads((out / "gc_report.json").read_text(encoding="utf-8"))
    assert report["cache_dir"] == str(cache)
    assert report["kept"] == 0
    assert report["corrupt_removed"] == 1
    assert report["orphans_removed"] == 1
    assert report["bytes_freed"] > 0
    assert "cache gc: kept 0, removed 1 corrupt and 1 orphaned entries" in stdout
    assert list(cache.iterdir()) == []
    manifest = read_manifest(out)
    assert manifest["command"] == "cache gc"
    assert set(manifest["artifacts"]) == {"gc_report.json"}


def test_seed_override_recorded(tmp_path, capsys):
    cfg = write_cfg(
        tmp_path,
        """\
experiment = gset-search
catalog = C4
samples = 16
seed = 0
""",
    )
    out = tmp_path / "run"
    status, _, _ = run_cli(
        ["gset", "search", "--config", cfg, "--out", out, "--seed", "7"], capsys
    )
    assert status == 0
    assert read_manifest(out)["seed"] == 7
    banner = read_jsonl(out / "search.jsonl")[0]
    assert banner["seed"] == 7


def test_default_out_directory(tmp_path, capsys, monkeypatch):
    cfg_text = (CONFIGS / "simulate_example.cfg").read_text(encoding="utf-8")
    write_cfg(tmp_path, cfg_text, name="mysim.cfg")
    monkeypatch.chdir(tmp_path)
    status, _, _ = run_cli(["simulate", "--config", "mysim.cfg"], capsys)
    assert status == 0
    assert (tmp_path / "runs" / "mysim" / "manifest.json").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "returnspec",
            "simulate",
            "--config",
            str(CONFIGS / "simulate_example.cfg"),
            "--out",
            str(tmp_path / "run"),
        ],
        capture_output=True,
        text=True,
        cwd=REPO,
    )
    assert proc.returncode == 0
    assert "simulate: 6 return times" in proc.stdout
