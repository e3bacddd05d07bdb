"""
Tests for end-to-end runs, the manifest and resuming
"""

import json

import pytest

from models.pipeline import PipelineConfig
from utils.errors import EXIT_DATA, DataError, StageError, UsageError
from utils.pipeline import (
    COMPARISON,
    COMPARISON_JSON,
    FEATURES,
    LOGIT_MODEL,
    LOGIT_REPORT,
    MANIFEST_FILE,
    TREE_MODEL,
    TREE_REPORT,
    load_config,
    load_model,
    run_pipeline,
)

ALL_STAGES = [
    "synth", "ingest", "build", "features", "summarize", "correlate",
    "rank", "split", "train", "evaluate", "compare",
]

SYNTH_CONFIG = """
seed = 7

[paths]
out_dir = "out"

[synth]
preset = "paperlike"
n_vertices = 300

[tree]
min_leaf_size = 5
"""


@pytest.fixture
def synth_config(tmp_path):
    """
    Fixture providing the path of a small synthetic experiment file
    """
    path = tmp_path / "experiment.toml"
    path.write_text(SYNTH_CONFIG)
    return path


def statuses(manifest):
    return {name: record["status"] for name, record in manifest["stages"].items()}


def test_full_run_writes_every_artifact(synth_config):
    """Test a fresh run executes all stages and records them in the manifest"""
    cfg = load_config(synth_config)
    manifest = run_pipeline(cfg)
    assert list(manifest["stages"]) == ALL_STAGES
    assert set(statuses(manifest).values()) == {"ran"}
    assert manifest["seed"] == 7
    assert "failed" not in manifest

    out = cfg.out_dir
    for name in (FEATURES, TREE_MODEL, LOGIT_MODEL, TREE_REPORT, LOGIT_REPORT, COMPARISON, COMPARISON_JSON):
        assert (out / name).exists(), name
    assert json.loads((out / MANIFEST_FILE).read_text())["stages"]["compare"]["status"] == "ran"
    comparison = json.loads((out / COMPARISON_JSON).read_text())
    assert comparison["models"] == ["tree", "logit"]
    assert 0.5 <= comparison["planted_bayes_rate"] <= 1.0
    assert load_model(out / TREE_MODEL).config.min_leaf_size == 5
    assert not list(out.glob("*.partial"))


def test_runs_are_reproducible(tmp_path, synth_config):
    """Test two runs with one seed produce byte-identical artifacts"""
    first = load_config(synth_config)
    second = first.with_overrides(out_dir=tmp_path / "again")
    run_pipeline(first)
    run_pipeline(second)
    for name in (FEATURES, TREE_MODEL, LOGIT_MODEL, TREE_REPORT, LOGIT_REPORT, COMPARISON):
        assert (first.out_dir / name).read_bytes() == (second.out_dir / name).read_bytes(), name


def test_resume_skips_up_to_date_stages(synth_config):
    """Test a rerun skips everything and a deleted output reruns only its stage"""
    cfg = load_config(synth_config)
    run_pipeline(cfg)
    assert set(statuses(run_pipeline(cfg)).values()) == {"skipped"}

    (cfg.out_dir / TREE_REPORT).unlink()
    rerun = statuses(run_pipeline(cfg))
    assert [name for name, status in rerun.items() if status == "ran"] == ["evaluate"]

    assert set(statuses(run_pipeline(cfg, resume=False)).values()) == {"ran"}


def test_changed_parameters_rerun_downstream_stages(synth_config):
    """Test a new tree setting reruns training and everything after it"""
    cfg = load_config(synth_config)
    run_pipeline(cfg)
    text = synth_config.read_text().replace("min_leaf_size = 5", "min_leaf_size = 9")
    synth_config.write_text(text)
    rerun = statuses(run_pipeline(load_config(synth_config)))
    assert rerun["split"] == "skipped"
    assert rerun["train"] == "ran"


def test_failing_stage_leaves_a_marker(tmp_path):
    """Test a log with no tau1 calls stops at the features stage with a data error"""
    calls = tmp_path / "calls_in.csv"
    calls.write_text("caller,callee,timestamp,duration,call_type\na,b,150,10,voice\nb,c,160,10,voice\n")
    config = tmp_path / "experiment.toml"
    config.write_text(
        '[paths]\nout_dir = "out"\nrecords = "calls_in.csv"\n\n[window]\nt0 = 0\ndelta1 = 100\ndelta2 = 100\n'
    )
    cfg = load_config(config)
    with pytest.raises(StageError) as caught:
        run_pipeline(cfg)
    assert caught.value.stage == "features"
    assert caught.value.exit_code == EXIT_DATA
    assert isinstance(caught.value.cause, DataError)
    assert (cfg.out_dir / "features.partial").exists()
    manifest = json.loads((cfg.out_dir / MANIFEST_FILE).read_text())
    assert manifest["failed"] == "features"
    assert statuses(manifest) == {"ingest": "ran", "build": "ran"}


def test_config_errors(tmp_path):
    """Test unreadable, invalid and incomplete experiment files"""
    with pytest.raises(UsageError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = = 1\n")
    with pytest.raises(UsageError):
        load_config(bad)
    incomplete = tmp_path / "incomplete.toml"
    incomplete.write_text('[paths]\nrecords = "calls.csv"\n')
    with pytest.raises(UsageError):
        load_config(incomplete)


def test_relative_paths_resolve_against_the_config(tmp_path, synth_config):
    """Test out_dir and records are taken relative to the experiment file"""
    cfg = load_config(synth_config)
    assert cfg.out_dir == tmp_path / "out"
    assert cfg.records is None
    assert cfg.synth.seed == 7
    assert cfg.split.seed == 7
    assert isinstance(cfg, PipelineConfig)


def test_unknown_model_file(tmp_path):
    """Test a model file without a known type is a data error"""
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"model_type": "forest"}))
    with pytest.raises(DataError):
        load_model(path)
