"""Command-line surface: subcommands, exit codes, determinism."""
import json

from carnotcurv import cli
from carnotcurv import oracle


def run(capsys, *args):
    code = cli.main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGeodesic:
    def test_straight_line_csv(self, capsys):
        code, out, _ = run(capsys, "geodesic", "--group", "goursat:3",
                           "--covector", "1,0,0", "--T", "1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# config: ")
        assert lines[1] == "t,x,y0,y1,h1,h2,h3,H"
        last = lines[-1].split(",")
        assert abs(float(last[1]) - 1.0) < 1e-12   # x(T) = T
        assert float(last[4]) == 1.0               # h1 constant

    def test_cartan_energy_column_constant(self, capsys, tmp_path):
        out_path = tmp_path / "traj.csv"
        code, _, _ = run(capsys, "geodesic", "--group", "cartan",
                         "--covector", "1,0,1,0,0", "--T", "10",
                         "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[1].endswith(",E")
        evals = [float(r.split(",")[-1]) for r in lines[2:]]
        assert max(abs(e - evals[0]) for e in evals) < 1e-9

    def test_unsupported_group_exit_2(self, capsys):
        code, _, err = run(capsys, "geodesic", "--group", "goursat:2",
                           "--covector", "1,0", "--T", "1")
        assert code == 2
        assert "unsupported group" in err

    def test_integrator_exit_3(self, capsys):
        code, _, err = run(capsys, "geodesic", "--group", "goursat:4",
                           "--covector", "0,1,1,1", "--T", "5",
                           "--step", "0.25", "--tol-drift", "1e-12")
        assert code == 3

    def test_bad_covector_exit_2(self, capsys):
        code, _, _ = run(capsys, "geodesic", "--group", "goursat:3",
                         "--covector", "1,0", "--T", "1")
        assert code == 2
        code, _, _ = run(capsys, "geodesic", "--group", "goursat:3",
                         "--covector", "1,zz,0", "--T", "1")
        assert code == 2

    def test_deterministic_output(self, capsys):
        args = ("geodesic", "--group", "goursat:4", "--covector",
                "0,1,1,0.5", "--T", "0.5")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "geodesic", "--group", "goursat:3",
                           "--covector", "1,0,0", "--T", "0.01",
                           "--format", "json")
        assert code == 0
        d = json.loads(out)
        assert d["config"]["format"] == "json"
        assert len(d["t"]) == len(d["h"]) == len(d["x"])
        assert d["H_drift"] < 1e-12


class TestClassify:
    def test_engel_c7_abnormal(self, capsys):
        code, out, _ = run(capsys, "classify", "--group", "goursat:4",
                           "--covector", "0,1,0,0", "--T", "5")
        assert code == 0
        d = json.loads(out)
        assert d["stratum"] == "C7"
        assert d["abnormal"] is True
        assert d["loss_times"] is None

    def test_cartan_growth_and_no_loss(self, capsys):
        code, out, _ = run(capsys, "classify", "--group", "cartan",
                           "--covector", "1,0,1,0,0", "--T", "10")
        d = json.loads(out)
        assert code == 0
        assert d["growth_vector"] == [2, 3, 4, 5]
        assert d["loss_times"] == []

    def test_engel_c1_periodic_losses(self, capsys):
        # h for chart (theta, c, alpha) = (0.3, 0.8, 1.0) in C1; the leading
        # minus needs the --covector=... form (argparse flag parsing)
        import math
        h = f"{-math.sin(0.3)!r},{math.cos(0.3)!r},0.8,1"
        code, out, _ = run(capsys, "classify", "--group", "goursat:4",
                           f"--covector={h}", "--T", "12")
        d = json.loads(out)
        assert code == 0
        assert d["stratum"] == "C1+"
        assert len(d["loss_times"]) >= 2
        gaps = d["loss_time_spacing"]
        assert max(gaps) - min(gaps) < 1e-8

    def test_config_echo(self, capsys):
        code, out, _ = run(capsys, "classify", "--group", "cartan",
                           "--covector", "1,0,1,0,0", "--T", "2")
        d = json.loads(out)
        assert d["config"]["group"] == "cartan"
        assert d["config"]["covector"] == "1,0,1,0,0"


class TestCurvature:
    def test_engel_r11(self, capsys):
        code, out, _ = run(capsys, "curvature", "--group", "goursat:4",
                           "--covector", "1,0,1,0")
        d = json.loads(out)
        assert code == 0
        assert d["r11"] == "-4"

    def test_heisenberg_matrix(self, capsys):
        code, out, _ = run(capsys, "curvature", "--group", "goursat:3",
                           "--covector", "1,0,2")
        d = json.loads(out)
        assert code == 0
        assert d["R"] == [["8/5", "0"], ["0", "0"]]

    def test_pole_exit_5(self, capsys):
        code, _, err = run(capsys, "curvature", "--group", "cartan",
                           "--covector", "1,0,0,1,0")
        assert code == 5

    def test_abnormal_pole_exit_5(self, capsys):
        code, _, _ = run(capsys, "curvature", "--group", "goursat:4",
                         "--covector", "0,1,0,1")
        assert code == 5

    def test_not_unit_speed_exit_4(self, capsys):
        code, _, _ = run(capsys, "curvature", "--group", "goursat:3",
                         "--covector", "2,0,1")
        assert code == 4


class TestVerify:
    def test_exact_suite_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "exact", "--group",
                           "goursat:5", "--seed", "7", "--count", "50")
        assert code == 0
        assert "50/50" in out
        assert out.strip().splitlines()[-1].startswith("OK")

    def test_deterministic_given_seed(self, capsys, tmp_path):
        # identical config (including the output path) => identical bytes
        f = tmp_path / "report.json"
        args = ("verify", "--suite", "exact", "--group", "goursat:3",
                "--seed", "5", "--count", "10", "--out", str(f))
        code, _, _ = run(capsys, *args)
        assert code == 0
        first = f.read_bytes()
        code, _, _ = run(capsys, *args)
        assert code == 0
        assert f.read_bytes() == first

    def test_failure_exit_6(self, capsys, monkeypatch):
        bad = oracle.CheckRow("forced", "exact", 1, 0, False)
        monkeypatch.setattr(oracle, "run_exact_suite",
                            lambda *a, **k: [bad])
        code, out, _ = run(capsys, "verify", "--suite", "exact",
                           "--group", "goursat:3")
        assert code == 6
        assert "FAILED" in out


class TestSweep:
    def test_engel_slack_nonnegative(self, capsys):
        code, out, _ = run(capsys, "sweep", "--group", "goursat:4", "--grid",
                           "theta=0.4:2.8:4,c=0.5:1.5:3,alpha=-1:1:3")
        assert code == 0
        lines = out.splitlines()
        header = lines[1].split(",")
        si = header.index("slack")
        rows = [r.split(",") for r in lines[2:]]
        assert len(rows) == 4 * 3 * 3
        for r in rows:
            if r[si] != "singular":
                assert float(r[si]) >= -1e-12

    def test_pole_rows_marked_singular(self, capsys):
        # theta = 0 makes h1 = 0: the pole row must be marked, not numeric
        code, out, _ = run(capsys, "sweep", "--group", "goursat:4", "--grid",
                           "theta=0:1:2,c=1:1:1,alpha=1:1:1")
        assert code == 0
        rows = [r.split(",") for r in out.splitlines()[2:]]
        r11_col = out.splitlines()[1].split(",").index("r11")
        assert rows[0][r11_col] == "singular"
        assert rows[1][r11_col] != "singular"

    def test_cartan_slack_formula(self, capsys):
        import math
        code, out, _ = run(capsys, "sweep", "--group", "cartan", "--grid",
                           "theta=0.3:0.3:1,c=0.9:0.9:1,alpha=0.7:0.7:1,beta=-0.2:-0.2:1")
        assert code == 0
        row = out.splitlines()[2].split(",")
        header = out.splitlines()[1].split(",")
        slack = float(row[header.index("slack")])
        want = 8 * (0.7 ** 2 / 0.9 ** 2) * math.sin(0.3 + 0.2) ** 2
        assert abs(slack - want) < 1e-12

    def test_json_rows(self, capsys):
        code, out, _ = run(capsys, "sweep", "--group", "goursat:4", "--grid",
                           "theta=0.4:0.4:1,c=1:1:1,alpha=1:1:1",
                           "--format", "json")
        assert code == 0
        d = json.loads(out)
        assert len(d["rows"]) == 1
        assert d["rows"][0]["stratum"].startswith("C")

    def test_malformed_grid_exit_2(self, capsys):
        code, _, _ = run(capsys, "sweep", "--group", "goursat:4",
                         "--grid", "bogus")
        assert code == 2
        code, _, _ = run(capsys, "sweep", "--group", "goursat:4",
                         "--grid", "theta=0:1:2")
        assert code == 2

    def test_deterministic(self, capsys):
        args = ("sweep", "--group", "goursat:4", "--grid",
                "theta=0.4:2.8:3,c=0.5:1.5:2,alpha=-1:1:3")
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2


class TestUsage:
    def test_missing_subcommand(self, capsys):
        assert cli.main([]) == 2

    def test_unknown_flag(self, capsys):
        assert cli.main(["geodesic", "--bogus"]) == 2
