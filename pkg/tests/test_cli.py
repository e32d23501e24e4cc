"""End-to-end tests of the face-kit command line."""

import json

import numpy as np
import pytest

from face_kit import __version__
from face_kit.align import read_ppm, write_ppm
from face_kit.config import TEMPLATE_112
from face_kit.data import load_manifest
from face_kit.numerics import Prng
from main import main


def _write_config(path, tree):
    path.write_text(json.dumps(tree), encoding="utf-8")
    return str(path)


SMALL_SYNTHETIC = {
    "data": {"synthetic": True},
    "train": {"epochs": 1, "steps_per_epoch": 20, "batch_size": 32},
    "head": {"kind": "ArcFace", "s": 16.0, "m": 0.3},
    "sched": {"warmup": 5},
}


class TestBasics:
    def test_version(self, capsys):
        assert main(["version"]) == 0
        assert capsys.readouterr().out.strip() == f"face-kit {__version__}"

    @pytest.mark.parametrize("argv", [[], ["frobnicate"], ["schedule", "--bogus"], ["train", "--seed", "x"]])
    def test_usage_errors(self, argv, capsys):
        assert main(argv) == 1
        assert "usage" in capsys.readouterr().err

    def test_help(self, capsys):
        assert main(["train", "--help"]) == 0
        assert "--head" in capsys.readouterr().out


class TestSchedule:
    def test_cosine_endpoints(self, capsys):
        assert main(["schedule", "--kind", "cosine", "--eta0", "0.1", "--total", "100"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "step,lr"
        assert lines[1] == "0,0.1"
        assert lines[-1] == "100,0.0"
        assert len(lines) == 102

    def test_step_file(self, tmp_path):
        out = tmp_path / "lr.csv"
        argv = ["schedule", "--kind", "step", "--eta0", "1.0", "--total", "10", "--milestones", "4", "8"]
        assert main(argv + ["--output", str(out)]) == 0
        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        assert [float(lr) for _, lr in rows[3:6]] == [1.0, 0.1, 0.1]
        assert float(rows[-1][1]) == pytest.approx(0.01)

    def test_missing_total(self, capsys):
        assert main(["schedule"]) == 1
        assert "--total" in capsys.readouterr().err

    def test_bad_kind(self):
        assert main(["schedule", "--kind", "linear", "--total", "5"]) == 1


class TestPrep:
    def test_removes_low_shot_class(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        rows = [f"a/{i}.ppm,1" for i in range(3)] + [f"b/{i}.ppm,2" for i in range(10)]
        manifest.write_text("path,label\n" + "\n".join(rows) + "\n")
        out = tmp_path / "kept.csv"
        assert main(["prep", "--manifest", str(manifest), "--num-min", "5", "--output", str(out)]) == 0
        assert "removed 1 class / 3 records" in capsys.readouterr().out
        kept = load_manifest(out)
        assert kept.num_classes == 1
        assert kept.class_ids == [2]
        assert (tmp_path / "kept.classes.json").exists()

    def test_missing_manifest_is_data_error(self, tmp_path):
        argv = ["prep", "--manifest", str(tmp_path / "nope.csv"), "--output", str(tmp_path / "o.csv")]
        assert main(argv) == 2

    def test_malformed_manifest(self, tmp_path, capsys):
        manifest = tmp_path / "m.csv"
        manifest.write_text("path,label\na.ppm,x\n")
        assert main(["prep", "--manifest", str(manifest), "--output", str(tmp_path / "o.csv")]) == 2
        assert "m.csv:2" in capsys.readouterr().err

    def test_missing_output(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("path,label\na.ppm,1\n")
        assert main(["prep", "--manifest", str(manifest)]) == 1


class TestConfigFile:
    def test_unknown_key(self, tmp_path, capsys):
        cfg = _write_config(tmp_path / "c.json", {"head": {"knid": "ArcFace"}})
        assert main(["schedule", "--config", cfg, "--total", "5"]) == 1
        assert "head.knid" in capsys.readouterr().err

    def test_flags_override_file(self, tmp_path, capsys):
        cfg = _write_config(tmp_path / "c.json", {"sched.eta0": 0.5, "sched.total": 4})
        assert main(["schedule", "--config", cfg, "--eta0", "0.2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[1] == "0,0.2"
        assert len(lines) == 6

    def test_bad_log_level_in_file(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", {"log": {"level": "LOUD"}})
        assert main(["schedule", "--config", cfg, "--total", "5"]) == 1


class TestTrainEval:
    def test_train_is_deterministic(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", SMALL_SYNTHETIC)
        for name in ("a", "b"):
            argv = ["train", "--config", cfg, "--seed", "7", "--model", str(tmp_path / f"{name}.fevl")]
            assert main(argv + ["--metrics", str(tmp_path / f"{name}.csv")]) == 0
        assert (tmp_path / "a.fevl").read_bytes() == (tmp_path / "b.fevl").read_bytes()
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()

    def test_seed_changes_model(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", SMALL_SYNTHETIC)
        for seed in ("1", "2"):
            assert main(["train", "--config", cfg, "--seed", seed, "--model", str(tmp_path / f"{seed}.fevl")]) == 0
        assert (tmp_path / "1.fevl").read_bytes() != (tmp_path / "2.fevl").read_bytes()

    def test_sharded_trace_and_synthetic_eval(self, tmp_path, capsys):
        cfg = _write_config(tmp_path / "c.json", SMALL_SYNTHETIC)
        model = str(tmp_path / "m.fevl")
        trace = tmp_path / "trace.log"
        assert main(["train", "--config", cfg, "--shards", "4", "--trace", str(trace), "--model", model]) == 0
        assert len(trace.read_text().splitlines()) == 12

        report = tmp_path / "r.csv"
        argv = ["eval", "--config", cfg, "--model", model, "--num-pairs", "100", "--report", str(report)]
        assert main(argv + ["--roc", str(tmp_path / "roc.csv")]) == 0
        metrics = dict(line.split(",") for line in report.read_text().splitlines()[1:])
        assert set(metrics) == {
            "synthetic.accuracy",
            "synthetic.std",
            "synthetic.threshold",
            "synthetic.tar@far=0.001",
            "synthetic.auc",
        }
        assert 0.0 <= float(metrics["synthetic.accuracy"]) <= 1.0
        assert (tmp_path / "roc.csv").read_text().startswith("threshold,far,tar\n")

    def test_image_pipeline(self, tmp_path):
        rng = Prng(3)
        rows = []
        for label in (1, 2):
            for k in range(3):
                rel = f"id{label}/{k}.ppm"
                (tmp_path / f"id{label}").mkdir(exist_ok=True)
                write_ppm(tmp_path / rel, rng.uniforms(8 * 8 * 3).reshape(8, 8, 3))
                rows.append(f"{rel},{label}")
        (tmp_path / "train.csv").write_text("path,label\n" + "\n".join(rows) + "\n")
        model = str(tmp_path / "img.fevl")
        argv = ["train", "--manifest", str(tmp_path / "train.csv"), "--num-min", "1", "--image-size", "4"]
        argv += ["--epochs", "1", "--steps-per-epoch", "3", "--batch-size", "4", "--head", "CosFace"]
        assert main(argv + ["--augment", "--model", model]) == 0

        pairs = [f"id1/{i}.ppm id1/{(i + 1) % 3}.ppm 1" for i in range(3)]
        pairs += [f"id1/{i}.ppm id2/{i}.ppm 0" for i in range(3)]
        (tmp_path / "pairs.txt").write_text("\n".join(pairs) + "\n")
        report = tmp_path / "r.csv"
        argv = ["eval", "--model", model, "--pairs", str(tmp_path / "pairs.txt"), "--image-size", "4"]
        assert main(argv + ["--folds", "2", "--head", "CosFace", "--report", str(report)]) == 0
        assert "pairs.accuracy" in report.read_text()

    def test_eval_needs_pairs(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", SMALL_SYNTHETIC)
        model = str(tmp_path / "m.fevl")
        assert main(["train", "--config", cfg, "--model", model]) == 0
        assert main(["eval", "--model", model]) == 1


class TestAlign:
    def test_writes_crops(self, tmp_path, capsys):
        img = np.zeros((60, 60, 3))
        write_ppm(tmp_path / "face.ppm", img)
        points = (TEMPLATE_112 * 0.5).reshape(-1)
        (tmp_path / "lm.csv").write_text(
            "path,x1,y1,x2,y2,x3,y3,x4,y4,x5,y5\nface.ppm," + ",".join(f"{v:.3f}" for v in points) + "\n"
        )
        out = tmp_path / "aligned"
        assert main(["align", "--landmarks", str(tmp_path / "lm.csv"), "--output", str(out), "--size", "32"]) == 0
        crop = read_ppm(out / "face.ppm")
        assert crop.shape == (32, 32, 3)
        assert "aligned 1 images" in capsys.readouterr().out

    def test_missing_image(self, tmp_path):
        (tmp_path / "lm.csv").write_text(
            "path,x1,y1,x2,y2,x3,y3,x4,y4,x5,y5\nnone.ppm," + ",".join(["1", "2", "3", "1", "2", "3", "5", "5", "9", "1"]) + "\n"
        )
        assert main(["align", "--landmarks", str(tmp_path / "lm.csv"), "--output", str(tmp_path / "o")]) == 2
