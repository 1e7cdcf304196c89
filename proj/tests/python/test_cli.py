import json
import subprocess


def run(cli, *args):
    return subprocess.run([str(cli), *args], capture_output=True, text=True, timeout=600)


SMALL = ["--n", "16", "--K", "30", "--dt", "1000"]


def test_stepwise_commands_and_compare(cli, tmp_path):
    out = str(tmp_path)
    r = run(cli, "--out", out, *SMALL, "fom")
    assert r.returncode == 0, r.stderr
    inv = (tmp_path / "fom_invariants.csv").read_text().strip().splitlines()
    assert inv[0] == "step,time,H,M,Q,B"
    assert len(inv) == 1 + 31

    r = run(cli, "--out", out, "--r", "5", "--p", "8", "reduce")
    assert r.returncode == 0, r.stderr
    assert "r=5 p=8" in r.stdout
    for name in ("basis.bin", "deim.bin", "romops.bin"):
        assert (tmp_path / name).exists()

    for method in ("pod", "pod-deim"):
        r = run(cli, "--out", out, "rom", "--method", method)
        assert r.returncode == 0, r.stderr

    r = run(cli, "--out", out, "compare")
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "report.json").read_text())
    errors = [k for k in report if k.startswith("error_")]
    times = [k for k in ("time_fom", "time_offline_pod", "time_online_pod", "time_online_deim")
             if k in report]
    assert len(errors) == 8
    assert len(times) == 4

    # A snapshot file from a different grid no longer matches the basis.
    other = tmp_path / "other"
    assert run(cli, "--out", str(other), "--n", "12", "--K", "30", "fom").returncode == 0
    (tmp_path / "snapshots.bin").write_bytes((other / "snapshots.bin").read_bytes())
    r = run(cli, "--out", out, "compare")
    assert r.returncode == 5
    assert "mismatch" in r.stderr


def test_loose_tolerances_give_smaller_ranks(cli, tmp_path):
    out = str(tmp_path)
    assert run(cli, "--out", out, *SMALL, "fom").returncode == 0
    tight = run(cli, "--out", out, "reduce")
    loose = run(cli, "--out", out, "--kappa-pod", "0.5", "--kappa-deim", "0.5", "reduce")
    assert tight.returncode == 0 and loose.returncode == 0

    def ranks(text):
        line = next(l for l in text.splitlines() if l.startswith("r="))
        r, p = line.split()[:2]
        return int(r[2:]), int(p[2:])

    assert ranks(loose.stdout) < ranks(tight.stdout)
    assert run(cli, "--out", out, "rom", "--method", "pod-deim").returncode == 0


def test_exit_codes(cli, tmp_path):
    assert run(cli, "--n", "1", "--out", str(tmp_path), "fom").returncode == 2
    assert run(cli, "--bogus", "fom").returncode == 2
    assert run(cli, "--out", str(tmp_path), "rom").returncode == 2  # --method missing
    assert run(cli, "--out", str(tmp_path / "empty"), "reduce").returncode == 4
    assert run(cli, "--out", "/proc/rtswe_cannot_write", *SMALL, "fom").returncode == 4

    assert run(cli, "--out", str(tmp_path), *SMALL, "fom").returncode == 0
    snap = tmp_path / "snapshots.bin"
    data = snap.read_bytes()
    snap.write_bytes(data[: len(data) // 2])
    assert run(cli, "--out", str(tmp_path), "reduce").returncode == 5

    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n = 16\nunknown_key = 3\n")
    assert run(cli, "--config", str(cfg), "--out", str(tmp_path), "fom").returncode == 2


def test_config_file_and_rerun_determinism(cli, tmp_path):
    cfg = tmp_path / "small.cfg"
    cfg.write_text("# desk run\nn = 16\nK = 20\ndt = 1000\nr = 4\np = 6\n")
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        r = run(cli, "--config", str(cfg), "--out", str(d), "--threads", "1", "run")
        assert r.returncode == 0, r.stderr
    for name in ("errors.csv", "rom_trajectory_deim.csv", "fom_invariants.csv", "deim.bin"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
