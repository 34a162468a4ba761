import hashlib
import json

import numpy as np
import pytest

from stackcodes.circuits import NoiseModel, build_circuit
from stackcodes.cli import main
from stackcodes.codes import (
    build_code,
    code_spec_to_dict,
    fixture_by_name,
    read_alist,
    read_dense,
)
from stackcodes.sim import (
    derive_detector_model,
    sample,
    write_detector_model,
    write_samples,
)


def _spec_file(tmp_path, name, filename="spec.json"):
    path = tmp_path / filename
    path.write_text(json.dumps(code_spec_to_dict(fixture_by_name(name).spec)))
    return str(path)


def _write_curve(path, rows):
    lines = ["p,shots,failures,P_L,LFR,sigma_LFR,grey_line"]
    for p, lfr, grey in rows:
        lines.append(f"{p},1000,0,0,{lfr},0,{grey}")
    path.write_text("\n".join(lines) + "\n")


class TestParams:
    def test_table_row_36_4_6(self, tmp_path, capsys):
        assert main(["params", _spec_file(tmp_path, "t1-36-4-6")]) == 0
        out = capsys.readouterr().out
        assert "[[36,4,6]] odd" in out
        assert "kd^2/n: 4.0" in out

    def test_table_row_80_10_8_merit(self, tmp_path, capsys):
        assert main(["params", _spec_file(tmp_path, "t2-80-10-8")]) == 0
        out = capsys.readouterr().out
        assert "[[80,10,8]]" in out
        assert "kd^2/n: 8.0" in out

    def test_oversized_exponent_reduced_with_warning(self, tmp_path, capsys):
        path = tmp_path / "spec.json"
        path.write_text(
            json.dumps(
                {
                    "family": "bicycle",
                    "l": 9,
                    "a_terms": ["x9", "x4"],
                    "b_terms": ["x3", "x6"],
                }
            )
        )
        assert main(["params", str(path)]) == 0
        captured = capsys.readouterr()
        assert "warning" in captured.err
        assert "[[36,4,6]]" in captured.out

    def test_invalid_spec_exits_2(self, tmp_path, capsys):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"family": "bicycle", "l": 9}))
        assert main(["params", str(path)]) == 2
        assert "a_terms" in capsys.readouterr().err


class TestDistance:
    def test_exact_budget_exhausted_exits_3(self, tmp_path, capsys):
        spec = _spec_file(tmp_path, "t3-112-8-12")
        assert main(["distance", spec, "--method", "exact"]) == 3
        assert "budget" in capsys.readouterr().err

    def test_randomized_bound(self, tmp_path, capsys):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        assert main(["distance", spec, "--method", "randomized", "--iters", "50"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["d"] >= 6
        assert not doc["exact"]


class TestSimulate:
    def test_zero_p_row_and_grey_line(self, tmp_path):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        out = tmp_path / "curve.csv"
        code = main(
            [
                "simulate",
                spec,
                "--noise",
                "code-capacity",
                "--p",
                "0",
                "0.001",
                "--shots",
                "500",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "p,shots,failures,P_L,LFR,sigma_LFR,grey_line"
        first = rows[1].split(",")
        assert float(first[4]) == 0.0
        grey = float(rows[2].split(",")[-1])
        assert grey == pytest.approx(1 - (1 - 1e-3) ** 4, rel=1e-9)

    def test_monotone_lfr_and_determinism(self, tmp_path):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        argv = [
            "simulate",
            spec,
            "--noise",
            "code-capacity",
            "--p",
            "0.01",
            "0.03",
            "0.06",
            "--shots",
            "2000",
            "--seed",
            "5",
        ]
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(argv + ["--out", str(out_a)]) == 0
        assert main(argv + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        lfr = [float(r.split(",")[4]) for r in out_a.read_text().splitlines()[1:]]
        assert lfr == sorted(lfr)

    def test_p_outside_unit_interval_exits_2(self, tmp_path):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        code = main(
            [
                "simulate",
                spec,
                "--noise",
                "code-capacity",
                "--p",
                "1.5",
                "--shots",
                "10",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        assert code == 2

    def test_manifest_digests_outputs(self, tmp_path):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        out = tmp_path / "curve.csv"
        assert (
            main(
                [
                    "simulate",
                    spec,
                    "--noise",
                    "code-capacity",
                    "--p",
                    "0.02",
                    "--shots",
                    "200",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        manifest = json.loads((tmp_path / "curve.csv.manifest.json").read_text())
        assert manifest["subcommand"] == "simulate"
        assert manifest["config"]["shots"] == 200
        digest = hashlib.sha256(out.read_bytes()).hexdigest()
        assert manifest["outputs"][str(out)] == digest

    def test_config_file_supplies_flags(self, tmp_path):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"shots": 100, "p": [0.02], "noise": "code-capacity"}))
        out = tmp_path / "c.csv"
        code = main(["simulate", spec, "--config", str(cfg), "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines()[1].split(",")[1] == "100"

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        spec = _spec_file(tmp_path, "t1-36-4-6")
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"shotz": 100}))
        code = main(
            [
                "simulate",
                spec,
                "--config",
                str(cfg),
                "--noise",
                "code-capacity",
                "--p",
                "0.01",
                "--shots",
                "10",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        assert code == 2
        assert "shotz" in capsys.readouterr().err


class TestPseudothreshold:
    def test_lfr_equal_to_grey_crosses_at_first_point(self, tmp_path, capsys):
        path = tmp_path / "curve.csv"
        _write_curve(path, [(0.001, 0.004, 0.004), (0.01, 0.04, 0.04)])
        assert main(["pseudothreshold", str(path)]) == 0
        assert "p0 = 0.001" in capsys.readouterr().out

    def test_constructed_crossing_is_recovered(self, tmp_path, capsys):
        # LFR = grey * (p / p*) crosses exactly at p*.
        p_star = 0.003
        grid = [0.001, 0.002, 0.005, 0.01]
        rows = []
        for p in grid:
            grey = 1 - (1 - p) ** 4
            rows.append((p, grey * (p / p_star), grey))
        path = tmp_path / "curve.csv"
        _write_curve(path, rows)
        out = tmp_path / "p0.json"
        assert main(["pseudothreshold", str(path), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["p0"] == pytest.approx(p_star, rel=1e-9)

    def test_no_crossing_reported(self, tmp_path, capsys):
        path = tmp_path / "curve.csv"
        _write_curve(path, [(0.001, 1e-5, 0.004), (0.01, 1e-3, 0.04)])
        assert main(["pseudothreshold", str(path)]) == 0
        assert "no crossing in range" in capsys.readouterr().out

    def test_multiple_crossings_all_reported(self, tmp_path, capsys):
        path = tmp_path / "curve.csv"
        _write_curve(
            path,
            [
                (0.001, 0.008, 0.004),
                (0.002, 0.004, 0.008),
                (0.005, 0.04, 0.02),
            ],
        )
        assert main(["pseudothreshold", str(path)]) == 0
        out = capsys.readouterr().out
        assert "multiple crossings" in out


class TestExportAndSearch:
    def test_seed_support_has_eight_sites(self, tmp_path):
        spec = _spec_file(tmp_path, "t2-80-10-8")
        out = tmp_path / "seed.json"
        assert main(["export", spec, "--what", "seed-support", "--out", str(out)]) == 0
        assert len(json.loads(out.read_text())) == 8

    @pytest.mark.parametrize("fmt,reader", [("alist", read_alist), ("dense", read_dense)])
    def test_matrix_round_trip(self, tmp_path, fmt, reader):
        spec = _spec_file(tmp_path, "t1-24-8-4")
        out = tmp_path / f"h.{fmt}"
        assert main(["export", spec, "--format", fmt, "--out", str(out)]) == 0
        H = build_code(fixture_by_name("t1-24-8-4").spec).H
        assert np.array_equal(reader(out), H)

    def test_search_budget_zero_gives_empty_frontier(self, tmp_path):
        out = tmp_path / "hits.jsonl"
        code = main(
            [
                "search",
                "--family",
                "bicycle",
                "--l",
                "5",
                "--budget",
                "0",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert out.read_text() == ""

    def test_search_writes_frontier_and_checkpoint(self, tmp_path):
        out = tmp_path / "hits.jsonl"
        argv = [
            "search",
            "--family",
            "bicycle",
            "--l",
            "6",
            "--budget",
            "30",
            "--top",
            "3",
            "--out",
            str(out),
        ]
        rc = main(argv)
        assert rc in (0, 3)
        hits = [json.loads(line) for line in out.read_text().splitlines()]
        assert 0 < len(hits) <= 3
        merits = [h["merit"][0] / h["merit"][1] for h in hits]
        assert merits == sorted(merits, reverse=True)
        state = json.loads((tmp_path / "hits.jsonl.checkpoint.json").read_text())
        assert state["cursor"] > 0
        # Resuming from the completed checkpoint reproduces the frontier.
        first = out.read_bytes()
        assert main(argv + ["--resume"]) == rc
        assert out.read_bytes() == first

    def test_budget_truncation_exits_3(self, tmp_path):
        out = tmp_path / "hits.jsonl"
        code = main(
            [
                "search",
                "--family",
                "bicycle",
                "--l",
                "12",
                "--budget",
                "10",
                "--out",
                str(out),
            ]
        )
        assert code == 3
        assert out.read_text()


class TestDecodeCommand:
    def test_decode_stored_samples(self, tmp_path, capsys):
        code = build_code(fixture_by_name("t1-24-8-4").spec)
        circuit = build_circuit(code, NoiseModel("code-capacity", 0.01))
        model = derive_detector_model(circuit)
        det, obs = sample(circuit, 300, seed=2)
        model_path = tmp_path / "m.detmodel"
        samples_path = tmp_path / "s.bin"
        write_detector_model(model, model_path)
        write_samples(det, obs, samples_path)
        out = tmp_path / "result.json"
        rc = main(
            [
                "decode",
                "--model",
                str(model_path),
                "--samples",
                str(samples_path),
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["shots"] == 300
        assert doc["valid_fraction"] == 1.0
        assert 0 <= doc["failures"] <= 300
