"""Command-line surface: outputs, determinism, exit codes."""

import json

from collabregen.cli import CSV_HEADER, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBounds:
    def test_msr_point_json(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--d", "48", "--k", "32", "--t", "4", "--B", "32",
            "--point", "msr",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["msr"] == {
            "alpha": "1", "beta": "1/20", "beta_prime": "1/20", "gamma": "51/20"
        }
        assert doc["params"]["n"] == 52  # echoed, resolved default

    def test_full_report_with_adversary(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--d", "48", "--k", "32", "--t", "4", "--B", "32",
            "--adversary", "selfish", "--L0", "1", "--lmax", "1", "--Ltotal", "32",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["selfish_msr"]["beta_range"] == ["1/19", "1/18"]
        assert doc["selfish_msr"]["beta_prime_range"] == ["1/27", "3/38"]
        assert doc["mbr"]["alpha"] == "99/68"

    def test_raw_units(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--d", "3", "--k", "3", "--t", "2", "--B", "6",
            "--point", "msr", "--raw",
        )
        doc = json.loads(out)
        assert doc["msr"] == {"alpha": "2", "beta": "1", "beta_prime": "1", "gamma": "4"}

    def test_mincut_and_capacity_sections(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--d", "48", "--k", "32", "--t", "4", "--B", "32",
            "--alpha", "1", "--beta", "1/20", "--beta-prime", "1/20",
            "--partition", ",".join(["1"] * 32),
        )
        doc = json.loads(out)
        assert doc["mincut_collab"] == "32"
        assert doc["gamma"] == "51/20"

    def test_mismatched_adversary_flags_usage_error(self, capsys):
        code, _, err = run(
            capsys, "bounds", "--d", "48", "--k", "32", "--t", "4",
            "--adversary", "selfish", "--B0", "1",
        )
        assert code == 1 and "selfish" in err

    def test_bad_parameters_exit_one(self, capsys):
        code, _, _ = run(capsys, "bounds", "--d", "3", "--k", "5", "--t", "1")
        assert code == 1


class TestTradeoff:
    def test_csv_schema_and_determinism(self, capsys):
        argv = (
            "tradeoff", "--d", "48", "--k", "32", "--t", "4",
            "--alpha-points", "4",
        )
        code, out1, err = run(capsys, *argv)
        assert code == 0
        lines = out1.strip().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 5
        first = lines[1].split(",")
        assert float(first[0]) == 1.0
        assert "# params" in err
        code, out2, _ = run(capsys, *argv)
        assert out2 == out1  # byte-identical rerun

    def test_fixed_g_adversary_sweep(self, capsys):
        base = (
            "tradeoff", "--d", "48", "--k", "32", "--t", "4",
            "--fixed-g", "32", "--alpha-points", "3",
        )
        code, out, _ = run(capsys, *base)
        assert code == 0
        baseline = [float(r.split(",")[3]) for r in out.strip().splitlines()[1:]]
        code, out, _ = run(
            capsys, *base, "--adversary", "selfish", "--L0", "1",
            "--lmax", "1", "--Ltotal", "32",
        )
        assert code == 0
        attacked = [float(r.split(",")[3]) for r in out.strip().splitlines()[1:]]
        assert len(attacked) == len(baseline) == 3
        assert all(a >= b for a, b in zip(attacked, baseline))

    def test_infeasible_grid_exits_two(self, capsys):
        code, _, err = run(
            capsys, "tradeoff", "--d", "48", "--k", "32", "--t", "4",
            "--alpha-min", "1/2", "--alpha-max", "1/2", "--alpha-points", "1",
        )
        assert code == 2 and "infeasible" in err


class TestExactDemo:
    def test_walkthrough(self, capsys):
        code, out, _ = run(capsys, "exact-demo")
        assert code == 0
        assert "8 units moved to replenish 4 lost units" in out
        assert "repaired blocks bit-identical: OK" in out
        assert "beta=1/2 beta_prime=1/2 gamma=2" in out
        assert "all 35 choices" in out

    def test_reruns_identical(self, capsys):
        _, out1, _ = run(capsys, "exact-demo", "--seed", "5")
        _, out2, _ = run(capsys, "exact-demo", "--seed", "5")
        assert out1 == out2


class TestTables:
    def test_all_rows_match(self, capsys):
        code, out, _ = run(capsys, "tables")
        assert code == 0
        assert out.count(" ok") == 6
        assert "MISMATCH" not in out


class TestSimulate:
    def config(self, tmp_path, mitigation="none"):
        cfg = {
            "code": {"m": 8, "n": 10, "kappa": 3, "t": 2, "first_power": 1},
            "generations": 4,
            "seed": 7,
            "mitigation": mitigation,
            "behaviors": {"1": "polluting"},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        return str(path)

    def test_simulation_csv(self, capsys, tmp_path):
        code, out, _ = run(capsys, "simulate", "--config", self.config(tmp_path))
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("generation,repaired,polluted_blocks")
        assert len(lines) == 5
        counts = [int(r.split(",")[2]) for r in lines[1:]]
        assert counts == sorted(counts) and counts[-1] > 0

    def test_digest_mitigation_keeps_clean(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "simulate", "--config", self.config(tmp_path, "digests")
        )
        assert code == 0
        counts = [int(r.split(",")[2]) for r in out.strip().splitlines()[1:]]
        assert counts == [0, 0, 0, 0]

    def test_repair_failure_exits_three(self, capsys, tmp_path):
        cfg = {
            "code": {"m": 3, "n": 7, "kappa": 3, "t": 2, "first_power": 1},
            "generations": 1,
            "seed": 1,
            "mitigation": "digests",
            "failure_schedule": [[6, 7]],
            "behaviors": {"1": "polluting", "2": "polluting", "3": "polluting"},
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(cfg))
        code, _, err = run(capsys, "simulate", "--config", str(path))
        assert code == 3 and "generation 0" in err

    def test_missing_config_exits_one(self, capsys, tmp_path):
        code, _, _ = run(capsys, "simulate", "--config", str(tmp_path / "nope.json"))
        assert code == 1
