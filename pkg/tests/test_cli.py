import json

import pytest

from nof1design.cli import main

REFERENCE_CONFIG = {
    "model": {"intercepts": "fixed", "slopes": "random"},
    "residual": {"variance": 4.0, "structure": "ar1", "correlation": 0.4},
    "random_effects": {"var_intercept": 4.0, "var_slope": 1.0, "cov_intercept_slope": 1.0},
    "requirement": {"alpha": 0.05, "beta": 0.2, "delta_min": 1.0},
    "scheme": {"kind": "pairwise"},
}


def write_config(tmp_path, extra):
    cfg = dict(REFERENCE_CONFIG)
    cfg.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestEvaluate:
    def test_reference_design_record(self, tmp_path):
        cfg = write_config(tmp_path, {"evaluate": {"k": 4, "l": 6, "j": 8}})
        assert main(["evaluate", "--config", cfg, "--out", str(tmp_path)]) == 0
        record = json.loads((tmp_path / "evaluation.json").read_text())
        assert record["design"]["power"] >= 0.8
        assert record["design"]["shrunk_fixed"] < 1.0
        assert record["design"]["I"] == 4
        assert record["parameters"]["residual"]["correlation"] == 0.4

    def test_invalid_correlation_exit_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {"evaluate": {"k": 4, "l": 6, "j": 8}})
        code = main(
            ["evaluate", "--config", cfg, "--out", str(tmp_path), "--correlation", "1.2"]
        )
        assert code == 2
        assert "correlation" in capsys.readouterr().err

    def test_all_reference_manual_exit_3(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "scheme": {"kind": "manual", "sequences": [[0, 0]]},
                "evaluate": {"k": 2, "l": 1, "j": 4},
            },
        )
        assert main(["evaluate", "--config", cfg, "--out", str(tmp_path)]) == 3

    def test_flag_overrides_file(self, tmp_path):
        cfg = write_config(tmp_path, {"evaluate": {"k": 4, "l": 6, "j": 8}})
        assert (
            main(
                [
                    "evaluate", "--config", cfg, "--out", str(tmp_path),
                    "--slopes", "common", "--format", "json",
                ]
            )
            == 0
        )
        record = json.loads((tmp_path / "evaluation.json").read_text())
        assert record["parameters"]["model"]["slopes"] == "common"
        assert record["design"]["shrunk_fixed"] is None


class TestSearch:
    def test_drilldown_contains_reference_row(self, tmp_path):
        cfg = write_config(
            tmp_path, {"search": {"participants": 32, "measurements": 24}}
        )
        assert main(["search", "--config", cfg, "--out", str(tmp_path)]) == 0
        rows = json.loads((tmp_path / "designs.json").read_text())["designs"]
        assert any(
            (r["I"], r["J"], r["K"], r["L"]) == (4, 8, 4, 6) for r in rows
        )

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(
            tmp_path, {"search": {"fix": "participants", "value": 32}}
        )
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        assert main(["search", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["search", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "designs.csv").read_bytes() == (out2 / "designs.csv").read_bytes()
        assert (out1 / "designs.json").read_bytes() == (out2 / "designs.json").read_bytes()

    def test_infeasible_everywhere_exit_4(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "random_effects": {"var_intercept": 0.0, "var_slope": 400.0,
                                   "cov_intercept_slope": 0.0},
                "search": {"fix": "participants", "value": 8, "max_l": 50},
            },
        )
        assert main(["search", "--config", cfg, "--out", str(tmp_path)]) == 4

    def test_csv_schema(self, tmp_path):
        cfg = write_config(tmp_path, {"search": {"fix": "measurements_per_participant", "value": 12}})
        assert main(["search", "--config", cfg, "--out", str(tmp_path)]) == 0
        header = (tmp_path / "designs.csv").read_text().splitlines()[0]
        assert header == (
            "I,J,K,L,total,se_pop,power,naive_min,naive_mean,naive_max,"
            "shrunk_fixed,shrunk_random"
        )

    def test_rows_round_trip_through_schema(self, tmp_path):
        import csv

        cfg = write_config(tmp_path, {"search": {"participants": 32, "measurements": 24}})
        assert main(["search", "--config", cfg, "--out", str(tmp_path)]) == 0
        with open(tmp_path / "designs.csv", newline="") as fh:
            csv_rows = list(csv.DictReader(fh))
        json_rows = json.loads((tmp_path / "designs.json").read_text())["designs"]
        assert len(csv_rows) == len(json_rows) > 0
        for crow, jrow in zip(csv_rows, json_rows):
            for key in ("I", "J", "K", "L", "total"):
                assert int(crow[key]) == jrow[key]
            for key in ("se_pop", "power", "shrunk_fixed", "shrunk_random"):
                # CSV carries 6 significant digits of the JSON double
                assert crow[key] == format(jrow[key], ".6g")


class TestSweep:
    def test_var_intercept_sweep_identical_tables(self, tmp_path):
        cfg = write_config(
            tmp_path,
            {
                "model": {"intercepts": "random", "slopes": "random"},
                # cov held at 0 so var_intercept=0 keeps D positive semidefinite
                "random_effects": {"var_intercept": 4.0, "var_slope": 1.0,
                                   "cov_intercept_slope": 0.0},
                "sweep": {
                    "parameter": "var_intercept",
                    "values": [0.0, 4.0, 8.0],
                    "axis": "measurements_per_participant",
                    "range": [24, 24],
                },
            },
        )
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 0
        rows = json.loads((tmp_path / "sweep.json").read_text())["curves"]
        by_series = {}
        for row in rows:
            by_series.setdefault(row["series"], []).append(
                (row["x"], row["y_min"], row["y_mean"], row["y_max"])
            )
        tables = list(by_series.values())
        assert len(tables) == 3
        assert all(t == tables[0] for t in tables)

    def test_missing_parameter_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, {"sweep": {"values": [1], "range": [2, 4]}})
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2


class TestSequences:
    def test_pairwise_k4_listing(self, tmp_path):
        assert (
            main(
                ["sequences", "--scheme", "pairwise", "--k", "4", "--out", str(tmp_path)]
            )
            == 0
        )
        payload = json.loads((tmp_path / "sequences.json").read_text())
        assert payload["count"] == 4
        assert payload["sequences"] == [
            [0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 1, 0]
        ]

    def test_text_round_trips_through_parser(self, tmp_path):
        from nof1design import parse_sequence_file

        main(["sequences", "--scheme", "restricted", "--k", "4", "--out", str(tmp_path)])
        text = (tmp_path / "sequences.txt").read_text()
        seqs = parse_sequence_file(text)
        assert len(seqs) == 6

    def test_missing_k_exit_2(self, tmp_path):
        assert main(["sequences", "--scheme", "pairwise", "--out", str(tmp_path)]) == 2
