import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from chsa.cli import main
from chsa.datagen import GenSpec, gen
from chsa.pointcloud import read_csv, write_csv


def write_spec(tmp_path, **kwargs):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(kwargs))
    return str(path)


def test_generate_cube_csv(tmp_path):
    spec = write_spec(tmp_path, kind="cube-with-vertices", seed=3)
    out = tmp_path / "cloud.csv"
    assert main(["generate", spec, "-o", str(out)]) == 0
    cloud = read_csv(str(out))
    assert cloud.size == 2008
    assert len(cloud.indices_with_label("inserted-vertex")) == 8


def test_generate_same_seed_byte_identical(tmp_path):
    spec = write_spec(tmp_path, kind="square-with-boundary", seed=12)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["generate", spec, "-o", str(a)])
    main(["generate", spec, "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_generate_missing_spec_exits_2(tmp_path):
    assert main(["generate", str(tmp_path / "nope.json"),
                 "-o", str(tmp_path / "x.csv")]) == 2


def test_stratify_missing_input_exits_3(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["stratify", "--input", str(tmp_path / "nope.csv"),
              "-o", str(tmp_path)])
    assert exc.value.code == 3


def test_stratify_empty_input_exits_3(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(SystemExit) as exc:
        main(["stratify", "--input", str(empty), "-o", str(tmp_path)])
    assert exc.value.code == 3


def test_stratify_writes_reports_and_svg(tmp_path):
    spec = write_spec(tmp_path, kind="corners-plus-cluster", seed=4)
    outdir = tmp_path / "run"
    assert main(["stratify", "--generate", spec, "-o", str(outdir),
                 "--k", "20", "--lambda", "1e-3", "--gamma", "1e-6"]) == 0
    report = json.loads((outdir / "report.json").read_text())
    assert report["schema"] == 1
    assert len(report["records"]) == 54
    assert (outdir / "report.csv").exists()
    assert (outdir / "run_config.json").exists()
    # SVG is valid XML with one marker per point (plus background rect)
    svg = ET.parse(outdir / "figure.svg").getroot()
    circles = [e for e in svg.iter() if e.tag.endswith("circle")]
    assert len(circles) == 54


def test_stratify_flags_hull_vertices_cyan(tmp_path):
    spec = write_spec(tmp_path, kind="corners-plus-cluster", seed=4)
    outdir = tmp_path / "run"
    main(["stratify", "--generate", spec, "-o", str(outdir)])  # K = p-1
    report = json.loads((outdir / "report.json").read_text())
    flagged = [r["index"] for r in report["records"] if r["has_negative"]]
    assert flagged == [0, 1, 2, 3]
    svg = (outdir / "figure.svg").read_text()
    assert svg.count("#00c8c8") == 4


def test_sweep_lambda_reports(tmp_path):
    spec = write_spec(tmp_path, kind="corners-plus-cluster", seed=4,
                      n_random=30)
    outdir = tmp_path / "sweep"
    assert main(["stratify", "--generate", spec, "-o", str(outdir),
                 "--sweep-lambda", "1e-5,1e-3"]) == 0
    counts = (outdir / "sweep_counts.csv").read_text().strip().splitlines()
    assert counts[0] == "lambda,flagged_count"
    assert len(counts) == 3
    assert (outdir / "report_lambda1e-05.json").exists()
    assert (outdir / "report_lambda0.001.json").exists()


def test_verify_corners(tmp_path, capsys):
    spec = write_spec(tmp_path, kind="corners-plus-cluster", seed=4)
    outdir = tmp_path / "verify"
    assert main(["verify", "--generate", spec, "-o", str(outdir)]) == 0
    summary = json.loads((outdir / "verify_summary.json").read_text())
    assert summary["precision"] == 1.0
    assert summary["recall"] == 1.0
    assert summary["flagged"] == [0, 1, 2, 3]


def test_verify_lp_oracle(tmp_path):
    cloud = gen(GenSpec(kind="corners-plus-cluster", seed=8, n_random=12))
    path = tmp_path / "c.csv"
    write_csv(cloud, str(path))
    outdir = tmp_path / "verify"
    assert main(["verify", "--input", str(path), "-o", str(outdir),
                 "--oracle", "lp"]) == 0
    summary = json.loads((outdir / "verify_summary.json").read_text())
    assert summary["recall"] == 1.0


def test_verify_logistic_raw_recall_below_one_is_recorded(tmp_path):
    """Raw heavy-tailed data misses small-magnitude vertices; the command
    still exits 0 and records the recall."""
    outdir = tmp_path / "logistic"
    spec = write_spec(tmp_path, kind="logistic-plane", seed=21)
    assert main(["verify", "--generate", spec, "-o", str(outdir),
                 "--scale", "none"]) == 0
    summary = json.loads((outdir / "verify_summary.json").read_text())
    assert 0.0 < summary["recall"] <= 1.0


def test_log_transform_flag_recovers_vertices(tmp_path):
    outdir = tmp_path / "log"
    spec = write_spec(tmp_path, kind="logistic-plane", seed=21)
    assert main(["verify", "--generate", spec, "-o", str(outdir),
                 "--log-transform"]) == 0
    summary = json.loads((outdir / "verify_summary.json").read_text())
    assert summary["recall"] == 1.0
