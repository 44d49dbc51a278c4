# Copyright 2026 The stabforest Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the stabforest CLI and its JSON schemas."""

import json
import os
import pathlib
import subprocess
import xml.etree.ElementTree as ET

import jsonschema
import pytest
from referencing import Registry, Resource

BIN = pathlib.Path(os.environ["STABFOREST_BIN"])
DATA = pathlib.Path(os.environ["STABFOREST_DATA_DIR"])
SCHEMAS = pathlib.Path(os.environ["STABFOREST_SCHEMA_DIR"])

BREAST = ["--data", str(DATA / "breast_cancer.csv"), "--manifest", str(DATA / "breast_cancer.cfg")]
DIAMONDS = ["--data", str(DATA / "diamonds_5000.csv"), "--manifest", str(DATA / "diamonds.cfg")]
FAST = ["--trees", "5", "--max-trials", "2", "--k", "3"]


def _registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


REGISTRY = _registry()


def check(document, name):
    schema = REGISTRY.get_or_retrieve(f"urn:stabforest:{name}").value.contents
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(document)


def run(args, out, threads=None, expect=0):
    env = dict(os.environ)
    if threads is not None:
        env["STABFOREST_THREADS"] = str(threads)
    proc = subprocess.run([str(BIN), *args, "--out", str(out)], env=env, capture_output=True, text=True)
    assert proc.returncode == expect, proc.stderr
    return proc


def report(out):
    return json.loads((out / "report.json").read_text())


def masked(value):
    if isinstance(value, dict):
        return {k: None if k == "wall_time_ms" else masked(v) for k, v in value.items()}
    if isinstance(value, list):
        return [masked(v) for v in value]
    return value


def svg_ok(path):
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")


def test_validate(tmp_path):
    run(["validate", *BREAST, *FAST, "--scheme", "holdout,kfold,loocv", "--seed", "1"], tmp_path)
    r = report(tmp_path)
    check(r, "validate")
    assert [run["scheme"] for run in r["runs"]] == ["holdout", "kfold", "loocv"]
    assert r["runs"][1]["n_folds"] == 3
    for scheme in ("holdout", "kfold", "loocv"):
        svg_ok(tmp_path / f"importance_{scheme}_1.svg")
    assert (tmp_path / "rankings.csv").read_text().startswith("cell,scheme,seed,subject,rank,feature,score\n")


def test_trials_and_agreement(tmp_path):
    run(["trials", *BREAST, *FAST, "--seed", "42,43", "--importance", "mdi"], tmp_path)
    r = report(tmp_path)
    check(r, "trials")
    assert [run["master_seed"] for run in r["runs"]] == [42, 43]
    assert len(r["agreement"]) == 1
    for name in ("rankings.csv", "tally.csv", "trials.csv"):
        assert (tmp_path / name).stat().st_size > 0
    svg_ok(tmp_path / "tally_trials_43.svg")


def test_compare_cells_and_pairs(tmp_path):
    run(["compare", *BREAST, *FAST, "--scheme", "holdout,kfold,loso"], tmp_path)
    r = report(tmp_path)
    check(r, "compare")
    assert len(r["cells"]) == 6
    assert len(r["pairs"]) == 15
    svg_ok(tmp_path / "compare.svg")


def test_benchmark(tmp_path):
    run(["benchmark", *DIAMONDS, *FAST, "--sizes", "60,30", "--scheme", "holdout,kfold,loso,trials"], tmp_path)
    r = report(tmp_path)
    check(r, "benchmark")
    assert [row["sample_size"] for row in r["rows"]] == [30] * 5 + [60] * 5
    lines = (tmp_path / "benchmark_table.csv").read_text().splitlines()
    assert lines[0] == "dataset,sample_size,holdout_ms,kfold_ms,loso_ms,loso_x2_ms,trials_ms"
    assert len(lines) == 3


def test_stats_and_plot(tmp_path):
    cmp = tmp_path / "cmp"
    run(["compare", *BREAST, *FAST, "--scheme", "kfold", "--seed", "5,6"], cmp)
    stats = tmp_path / "stats"
    run(["stats", *BREAST, "--a", str(cmp / "rankings.csv"), "--a-cell", "kfold/5",
         "--b", str(cmp / "importance.csv"), "--b-cell", "kfold/6"], stats)
    r = report(stats)
    check(r, "stats")
    assert len(r["welch"]) == 9
    plot = tmp_path / "plot"
    run(["plot", "--data", str(cmp / "importance.csv"), "--cell", "kfold/5", "--title", "k-fold"], plot)
    check(report(plot), "plot")
    svg_ok(plot / "plot.svg")


def test_hex_seed_matches_decimal(tmp_path):
    run(["validate", *BREAST, *FAST, "--scheme", "holdout", "--seed", "0x2A"], tmp_path / "hex")
    run(["validate", *BREAST, *FAST, "--scheme", "holdout", "--seed", "42"], tmp_path / "dec")
    assert masked(report(tmp_path / "hex")) == masked(report(tmp_path / "dec"))


def test_config_file_mirrors_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f'data = "{DATA / "breast_cancer.csv"}"\n'
                   f'manifest = "{DATA / "breast_cancer.cfg"}"\n'
                   'trees = 9\nscheme = "holdout"\nseed = "0x10"\ntest-fraction = 0.3\n')
    run(["validate", "--config", str(cfg), "--trees", "4"], tmp_path / "out")
    r = report(tmp_path / "out")
    check(r, "validate")
    assert r["config"]["forest"]["n_trees"] == 4
    assert r["config"]["seeds"] == [16]
    assert r["config"]["test_fraction"] == 0.3
    assert r["config"]["schemes"] == ["holdout"]


def test_thread_count_does_not_change_output(tmp_path):
    args = ["trials", *BREAST, *FAST, "--seed", "7"]
    run(args, tmp_path / "one", threads=1)
    run(args, tmp_path / "many", threads=3)
    assert masked(report(tmp_path / "one")) == masked(report(tmp_path / "many"))
    for name in ("rankings.csv", "tally.csv", "trials.csv", "tally_trials_7.svg"):
        assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "many" / name).read_bytes()


@pytest.mark.parametrize("args", [
    ["validate", "--data", "/nonexistent.csv"],
    ["validate", *BREAST, "--scheme", "bootstrap"],
    ["validate", *BREAST, "--seed", "0xZZ"],
    ["benchmark", *DIAMONDS, "--sizes", "6000"],
    ["stats", "--a", "/nonexistent.csv"],
])
def test_failures_write_error_log(tmp_path, args):
    run(args, tmp_path, expect=1)
    err = json.loads((tmp_path / "error.json").read_text())
    check(err, "error")
    assert not (tmp_path / "report.json").exists()


def test_version():
    proc = subprocess.run([str(BIN), "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.1.0"
