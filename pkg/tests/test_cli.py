import numpy as np
import pytest

from invmetrics.cli import main
from invmetrics.domains import grid_save, grid_annulus, grid_from_predicate


@pytest.fixture(scope="module")
def annulus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("grids") / "annulus.json"
    path.write_bytes(grid_save(grid_annulus(0.25, 0.02)))
    return str(path)


@pytest.fixture(scope="module")
def pants_file(tmp_path_factory):
    def pred(z):
        return ((np.abs(z) < 1.0) & (np.abs(z - 0.45) > 0.25)
                & (np.abs(z + 0.45) > 0.25))

    path = tmp_path_factory.mktemp("grids") / "pants.json"
    path.write_bytes(grid_save(grid_from_predicate(pred, 1.0, 0.02)))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDist:
    def test_annulus_kobayashi(self, capsys):
        code, out, _ = run(capsys, "dist", "--domain", "annulus:0.1",
                           "--metric", "kobayashi",
                           "--p", "0.3162,0", "--q", "-0.3162,0")
        assert code == 0
        upper = float(out.splitlines()[2].split(": ")[1])
        assert upper == pytest.approx(2.1431573649805785, abs=1e-3)

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "dist", "--domain", "disk",
                           "--p", "0,0", "--q", "0.5,0", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "metric,lower,upper,certified"
        assert "0.549306144" in out

    def test_deterministic_output(self, capsys):
        args = ("dist", "--domain", "annulus:0.1", "--metric", "caratheodory",
                "--p", "0.3162,0", "--q", "-0.3162,0")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run(capsys, "dist", "--domain", "disk",
                           "--p", "2,0", "--q", "0,0")
        assert code == 1
        assert "OutOfDomain" in err


class TestBall:
    def test_disk_connectivity(self, capsys):
        code, out, _ = run(capsys, "ball", "--domain", "disk",
                           "--center", "0,0", "--radius", "0.5493",
                           "--spacing", "0.01")
        assert code == 0
        assert "connectivity_number: 0" in out

    def test_wrapping_annulus_ball(self, capsys):
        code, out, _ = run(capsys, "ball", "--domain", "annulus:0.1",
                           "--center", "0.3162,0", "--radius", "2.5",
                           "--spacing", "0.02")
        assert code == 0
        assert "connectivity_number: 1" in out

    def test_svg_output(self, capsys, tmp_path):
        target = tmp_path / "ball.svg"
        code, out, _ = run(capsys, "ball", "--domain", "annulus:0.1",
                           "--center", "0.3162,0", "--radius", "2.5",
                           "--spacing", "0.04", "--format", "svg",
                           "--out", str(target))
        assert code == 0
        body = target.read_text()
        assert body.startswith('<?xml version="1.0"')
        assert "<svg" in body and "</svg>" in body
        # byte determinism of the rendering
        again = tmp_path / "ball2.svg"
        run(capsys, "ball", "--domain", "annulus:0.1",
            "--center", "0.3162,0", "--radius", "2.5",
            "--spacing", "0.04", "--format", "svg", "--out", str(again))
        assert again.read_bytes() == target.read_bytes()

    def test_grid_export(self, capsys, tmp_path):
        target = tmp_path / "ball.json"
        code, out, _ = run(capsys, "ball", "--domain", "disk",
                           "--center", "0,0", "--radius", "0.5",
                           "--spacing", "0.05", "--format", "grid",
                           "--out", str(target))
        assert code == 0
        assert '"metric": "kobayashi"' in target.read_text()


class TestSeparate:
    def test_annulus_table(self, capsys, annulus_file):
        code, out, _ = run(capsys, "separate", "--grid", f"grid:{annulus_file}")
        assert code == 0
        assert "winding_k1: 1" in out
        assert "winding_k2: 0" in out
        assert "vertices:" in out

    def test_pants_explicit_labels(self, capsys, pants_file):
        code, out, _ = run(capsys, "separate", "--grid", f"grid:{pants_file}")
        assert code == 0
        assert "winding_k1: 1" in out
        assert "winding_k2: 0" in out


class TestNerve:
    def test_wrapping_ball_matches(self, capsys):
        code, out, _ = run(capsys, "nerve", "--domain", "annulus:0.1",
                           "--center", "0.3162,0", "--radius", "2.5",
                           "--spacing", "0.01", "--cover-radius", "0.7")
        assert code == 0
        assert "match: true" in out
        assert "cycle_rank: 1" in out


class TestModulus:
    def test_catalog_annulus(self, capsys):
        code, out, _ = run(capsys, "modulus", "--domain", "annulus:0.25",
                           "--spacing", "0.02")
        assert code == 0
        radius = float(out.splitlines()[1].split(": ")[1])
        assert radius == pytest.approx(0.25, rel=0.05)

    def test_grid_file(self, capsys, annulus_file):
        code, out, _ = run(capsys, "modulus", "--domain", f"grid:{annulus_file}")
        assert code == 0
        assert out.startswith("modulus: ")


class TestSelfMapCommands:
    def test_isotropy(self, capsys):
        code, out, _ = run(capsys, "isotropy", "--r", "0.1",
                           "--p", "0.316227766,0")
        assert code == 0
        assert "order: 2" in out

    def test_watt(self, capsys):
        code, out, _ = run(capsys, "watt", "--domain", "disk", "--map", "square",
                           "--a", "0,0", "--b", "0.5,0")
        assert code == 0
        assert "verdict: contraction_witness" in out
        assert "gap: 0.293893332" in out

    def test_cartan(self, capsys):
        code, out, _ = run(capsys, "cartan", "--domain", "disk",
                           "--map", "blaschke:0.3,0", "--a", "0,0")
        assert code == 0
        assert "deriv_modulus: 0.3" in out

    def test_not_fixed_is_domain_error(self, capsys):
        code, _, err = run(capsys, "cartan", "--domain", "disk",
                           "--map", "square", "--a", "0.5,0")
        assert code == 1
        assert "NotFixed" in err


class TestUsage:
    def test_unknown_domain(self, capsys):
        code, _, err = run(capsys, "dist", "--domain", "torus",
                           "--p", "0,0", "--q", "0.1,0")
        assert code == 1

    def test_missing_subcommand(self, capsys):
        code, _, _ = run(capsys)
        assert code == 1


class TestVerifyAll:
    def test_quick_suite_is_green(self, capsys):
        code, out, _ = run(capsys, "verify-all", "--quick")
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith("C")]
        assert len(lines) == 11
        assert all(" PASS " in l for l in lines)
