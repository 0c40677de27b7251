import json

import numpy as np
import pytest

from pneugen import design_space as ds
from pneugen import geometry as geo
from pneugen.cli import main, parse_row_ref
from pneugen.errors import ConfigError


@pytest.fixture(scope="module")
def reference_csv(tmp_path_factory, bending_design, twisting_design, mixed_design):
    path = tmp_path_factory.mktemp("refs") / "refs.csv"
    ds.write_design_csv(path, [bending_design, twisting_design, mixed_design], ["sampled"] * 3)
    return path


class TestPipelineOutputs:
    def test_all_artifacts_exist(self, toy_workdir):
        for name in ("data.csv", "bounds.json", "schema.json", "embedding.csv",
                     "embedding.config.json", "model.json", "fit.json", "gen.csv",
                     "metrics.json", "report.json", "report.txt"):
            assert (toy_workdir / name).exists(), name

    def test_report_binds_pipeline_results(self, toy_workdir):
        report = json.loads((toy_workdir / "report.json").read_text())
        assert report["dataset"]["rows"] == 400
        assert report["metrics"]["novelty"]["d_new"] > 0.0
        assert set(report["generated"]["mode_counts"]) == {"Bending", "Twisting", "Mixed"}
        hulls = report["metrics"]["diversity"]
        assert hulls["generated_hull"]["area"] > 0.0
        assert hulls["training_hull"]["area"] > 0.0

    def test_no_temp_files_left_behind(self, toy_workdir):
        strays = [p for p in toy_workdir.iterdir() if p.suffix == ".tmp" or ".tmp" in p.name]
        assert strays == []

    def test_dataset_round_trips_through_cli_formats(self, toy_workdir):
        bounds = ds.ParameterBounds.load(toy_workdir / "bounds.json")
        data = ds.DesignDataset.from_csv(toy_workdir / "data.csv", bounds)
        assert len(data) == 400
        gen_rows, gen_prov = ds.read_design_csv(toy_workdir / "gen.csv")
        assert len(gen_rows) == 200
        assert set(gen_prov) == {"generated"}
        for row in gen_rows:
            assert ds.validate_design(row, bounds).ok

    def test_fit_report_trace_monotone(self, toy_workdir):
        fit = json.loads((toy_workdir / "fit.json").read_text())
        trace = np.array(fit["log_likelihood_trace"])
        assert np.all(np.diff(trace) >= -1e-9)

    def test_hull_vertex_csvs_match_metrics(self, toy_workdir):
        payload = json.loads((toy_workdir / "metrics.json").read_text())
        for name, key in (("training_hull.csv", "training_hull"),
                          ("generated_hull.csv", "generated_hull")):
            lines = (toy_workdir / name).read_text().strip().splitlines()
            assert lines[0] == "x,y"
            got = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
            assert got == payload["diversity"][key]["vertices"]


class TestFeatureSpacePipeline:
    def test_train_generate_evaluate_without_embedding(self, tmp_path):
        """The default feature-space route works end to end; without stored
        coordinates the diversity hulls fall back to a joint embedding of
        subsampled rows."""
        data = tmp_path / "data.csv"
        model = tmp_path / "model.json"
        assert main(["synth", "--n", "150", "--seed", "2", "--out", str(data)]) == 0
        assert main(["train", "--data", str(data), "--k", "2", "--seed", "2",
                     "--out", str(model)]) == 0
        assert main(["generate", "--model", str(model), "--n", "60", "--seed", "2",
                     "--out", str(tmp_path / "gen.csv")]) == 0
        assert main(["evaluate", "--train", str(data), "--gen", str(tmp_path / "gen.csv"),
                     "--seed", "2", "--hull-points", "40",
                     "--out", str(tmp_path / "metrics.json")]) == 0
        payload = json.loads((tmp_path / "metrics.json").read_text())
        assert payload["novelty"]["d_new"] > 0.0
        assert payload["diversity"]["space"] == "joint-subsample-embedding"
        assert payload["diversity"]["training_hull"]["area"] > 0.0


class TestDeterminism:
    def test_generate_identical_for_fixed_seed(self, toy_workdir, tmp_path):
        out1 = tmp_path / "g1.csv"
        out2 = tmp_path / "g2.csv"
        base = ["generate", "--model", str(toy_workdir / "model.json"), "--n", "50", "--seed", "9"]
        assert main(base + ["--out", str(out1)]) == 0
        assert main(base + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_synth_identical_for_fixed_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["synth", "--n", "60", "--seed", "3", "--out", str(a)]) == 0
        assert main(["synth", "--n", "60", "--seed", "3", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSimulate:
    def test_bending_row_classified_bending(self, reference_csv, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code = main(["simulate", "--design", f"{reference_csv}:0",
                     "--pressures", "0,20,40", "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out.strip())
        assert summary["modes"]["40.0"] == "Bending"
        assert summary["modes"]["0.0"] == "Degenerate"
        assert out.exists()

    def test_twisting_and_mixed_rows(self, reference_csv, tmp_path, capsys):
        for idx, expected in ((1, "Twisting"), (2, "Mixed")):
            out = tmp_path / f"traj{idx}.csv"
            assert main(["simulate", "--design", f"{reference_csv}:{idx}",
                         "--pressures", "40", "--out", str(out)]) == 0
            summary = json.loads(capsys.readouterr().out.strip())
            assert summary["modes"]["40.0"] == expected


class TestExport:
    def test_stl_and_csg(self, reference_csv, tmp_path):
        stl = tmp_path / "a.stl"
        csg = tmp_path / "a.csg"
        assert main(["export", "--design", f"{reference_csv}:0",
                     "--stl", str(stl), "--csg", str(csg)]) == 0
        tris, _ = geo.read_stl(stl)
        assert stl.stat().st_size == 84 + 50 * len(tris)
        assert csg.read_text().count("difference(") == 12


class TestErrorHandling:
    def test_missing_file_is_data_error(self, tmp_path):
        code = main(["train", "--data", str(tmp_path / "absent.csv"), "--k", "2",
                     "--out", str(tmp_path / "m.json")])
        assert code == 3

    def test_bad_config_is_usage_error(self, tmp_path):
        code = main(["synth", "--n", "0", "--seed", "1", "--out", str(tmp_path / "d.csv")])
        assert code == 2

    def test_k_exceeding_rows_is_usage_error(self, tmp_path):
        data = tmp_path / "d.csv"
        assert main(["synth", "--n", "5", "--seed", "1", "--out", str(data)]) == 0
        code = main(["train", "--data", str(data), "--k", "50", "--out", str(tmp_path / "m.json")])
        assert code == 2

    def test_bad_row_ref(self):
        with pytest.raises(ConfigError):
            parse_row_ref("no-colon-here")

    def test_out_of_range_row_is_data_error(self, reference_csv, tmp_path):
        code = main(["export", "--design", f"{reference_csv}:99", "--csg", str(tmp_path / "x.csg")])
        assert code == 3

    def test_failed_run_leaves_no_partial_output(self, reference_csv, tmp_path):
        target = tmp_path / "x.csg"
        code = main(["export", "--design", f"{reference_csv}:99", "--csg", str(target)])
        assert code == 3
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []
