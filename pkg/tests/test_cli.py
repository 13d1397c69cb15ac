import io
import math
import subprocess
import sys

import pytest

from hsurf.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


SMALL = ["--grid", "-1", "1", "-1", "1", "9", "9"]


class TestExamples:
    def test_catenoid_csv(self, tmp_path):
        path = tmp_path / "cat.csv"
        code, _, _ = call("rotational", "--class", "h1", "--a1", "1", "--a2", "1", "--c", "1", "--target", "eta",
                          "--out", str(path))
        assert code == 0
        lines = path.read_text().splitlines()
        assert len(lines) == 130
        for row in lines[1:]:
            u, _, _, M1, N1 = map(float, row.split(",")[:5])
            assert abs(M1 - math.cosh(u)) <= 1e-8 * math.cosh(u) and abs(N1 - u) <= 1e-8

    def test_verify_h1(self):
        code, out, _ = call("verify", "--class", "h1", "--g", "z", "--A", "e^z")
        assert code == 0 and "overall.pass=true" in out
        max_abs = float(next(l for l in out.splitlines() if l.startswith("helmholtz.max_abs=")).split("=")[1])
        assert max_abs <= 1e-8

    def test_missing_A(self):
        code, out, err = call("surface", "--class", "h1", "--g", "z")
        assert code == 1 and "--A" in err and "usage" in err and out == ""


class TestErrors:
    def test_parse_error_offset(self, tmp_path):
        code, _, err = call("surface", "--class", "h1", "--g", "z", "--A", "sin(", "--out", str(tmp_path / "x"))
        assert code == 1 and "offset 4" in err

    def test_unknown_flag(self):
        code, _, err = call("scan", "--class", "h1", "--a1", "1", "--a2", "1", "--bogus")
        assert code == 1 and "--bogus" in err

    def test_no_subcommand(self):
        assert call()[0] == 1

    def test_missing_out(self):
        code, _, err = call("surface", "--class", "h2", "--g", "z", "--A", "1", "--B", "z")
        assert code == 1 and "--out" in err

    def test_missing_rotational_params(self):
        code, _, err = call("scan", "--class", "h2", "--a2", "1")
        assert code == 1 and "--a3" in err

    def test_h1_rejects_B(self, tmp_path):
        code, _, _ = call("surface", "--class", "h1", "--g", "z", "--A", "1", "--B", "z", "--out", str(tmp_path / "m"))
        assert code == 1

    def test_grid_too_small(self, tmp_path):
        code, _, err = call("surface", "--class", "h2", "--g", "z", "--A", "1", "--B", "z",
                            "--grid", "-1", "1", "-1", "1", "1", "9", "--out", str(tmp_path / "m"))
        assert code == 1 and "grid" in err

    def test_verification_failure_exit_2(self):
        # a coarse difference step breaks the finite-difference checks
        code, out, _ = call("verify", "--class", "h2", "--g", "z", "--A", "e^z", "--B", "cos(z)", "--points", "10",
                            *SMALL, "--fd-step", "0.1")
        assert code == 2 and "overall.pass=false" in out and "weingarten_fd.pass=false" in out


class TestScan:
    def test_counts(self):
        code, out, _ = call("scan", "--class", "h1", "--a1", "1", "--a2", "1")
        assert code == 0 and out.splitlines()[-1] == "total isolated=2 circle=2"
        assert "# u_range = -4 4" in out

    def test_eta_surface(self):
        code, out, _ = call("scan", "--class", "h2", "--a2", "-1", "--a3", "2", "--c1", "2", "--c2", "-1",
                            "--u-range", "-6", "6", "--surface", "eta")
        assert code == 0 and out.splitlines()[-1] == "total isolated=0 circle=0"


class TestSurface:
    def test_obj_written(self, tmp_path):
        path = tmp_path / "s.obj"
        code, out, _ = call("surface", "--class", "h2", "--g", "z", "--A", "1", "--B", "z", *SMALL, "--out", str(path))
        assert code == 0 and str(path) in out
        text = path.read_text()
        assert text.count("v ") >= 81 and text.count("f ") == 64

    def test_rotational_mesh(self, tmp_path):
        code, _, _ = call("rotational", "--class", "h2", "--a2", "1", "--a3", "1", "--c1", "1", "--c2", "1", *SMALL,
                          "--out", str(tmp_path / "p.csv"), "--mesh", str(tmp_path / "p.obj"))
        assert code == 0 and (tmp_path / "p.obj").stat().st_size > 0


class TestConfig:
    def test_config_equals_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# catenoid\nclass = h1\na1 = 1\na2 = 1\nu_range = -3 3\n")
        a = call("scan", "--config", str(cfg))
        b = call("scan", "--class", "h1", "--a1", "1", "--a2", "1", "--u-range", "-3", "3")
        assert a == b and a[0] == 0

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("class = h1\na1 = 1\na2 = 1\n")
        _, out, _ = call("scan", "--config", str(cfg), "--a2", "3", "--u-range", "-3", "3")
        assert "# a2 = 3" in out and out.splitlines()[-1] == "total isolated=1 circle=1"

    @pytest.mark.parametrize("text", ["class h1\n", "config = x\n"])
    def test_bad_config(self, tmp_path, text):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        assert call("scan", "--config", str(cfg))[0] == 1

    def test_missing_config(self, tmp_path):
        assert call("scan", "--config", str(tmp_path / "nope"))[0] == 1


def test_determinism(tmp_path):
    outputs = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        argv = ["rotational", "--class", "h1", "--a1", "1", "--a2", "3", *SMALL,
                "--out", str(d / "p.csv"), "--mesh", str(d / "p.obj")]
        assert call(*argv)[0] == 0
        rep = d / "r.txt"
        call("verify", "--class", "h2", "--g", "z", "--A", "e^z", "--B", "cos(z)", "--points", "20", *SMALL,
             "--report", str(rep))
        outputs.append([(d / n).read_bytes() for n in ("p.csv", "p.obj", "r.txt")])
    assert outputs[0] == outputs[1]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "hsurf.cli", "scan", "--class", "h1", "--a1", "1", "--a2", "3",
                          "--u-range", "-3", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and "total isolated=1 circle=1" in res.stdout
