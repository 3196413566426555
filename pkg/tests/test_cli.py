import json
import shutil
from pathlib import Path

import pytest

from topicforge.cli import main
from topicforge.config import validate_config
from topicforge.demo import write_demo
from topicforge.pipeline import STAGES, file_sha256


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    """A small corpus; heavy stages use reduced epochs to keep the suite quick."""
    root = tmp_path_factory.mktemp("demo")
    write_demo(root, seed=11, n_days=90, epochs=12, epochs_umap=30, seeds="0", models="lstm,cnn")
    return root


def run_cli(*args):
    return main(list(args))


class TestValidateConfig:
    def test_minimal_valid(self, demo_dir):
        cfg, errors, warnings = validate_config(demo_dir / "config.ini")
        assert errors == []
        assert cfg.ticker == "SYNT"
        assert cfg.models == ("lstm", "cnn")

    def test_two_bad_fields_two_errors(self, demo_dir, tmp_path):
        text = (demo_dir / "config.ini").read_text()
        text = text.replace("lookback = 5", "lookback = zero")
        text = text.replace("sentiment_engine = lexicon", "sentiment_engine = psychic")
        bad = tmp_path / "bad.ini"
        bad.write_text(text)
        cfg, errors, warnings = validate_config(bad)
        assert cfg is None and len(errors) == 2

    def test_unknown_key_warns_not_errors(self, demo_dir, tmp_path):
        text = (demo_dir / "config.ini").read_text() + "\n[forecast2]\nx = 1\n"
        p = tmp_path / "extra.ini"
        p.write_text(text)
        cfg, errors, warnings = validate_config(p)
        assert errors == [] and any("unknown" in w for w in warnings)

    def test_missing_file(self, tmp_path):
        cfg, errors, _ = validate_config(tmp_path / "absent.ini")
        assert cfg is None and "not found" in errors[0]


class TestPipelineCli:
    def test_full_run_manifest_hash_chained(self, demo_dir):
        assert run_cli("run", "--config", str(demo_dir / "config.ini")) == 0
        manifest = json.loads((demo_dir / "run" / "manifest.json").read_text())
        assert set(manifest["stages"]) == set(STAGES)
        for stage in STAGES:
            entry = manifest["stages"][stage]
            assert entry["input_hashes"] and entry["output_hashes"] and entry["config_hash"]
        # chained: the features stage consumed the ingest stage's artifact hash
        bars_hash = manifest["stages"]["ingest"]["output_hashes"]["bars_clean.csv"]
        assert manifest["stages"]["features"]["input_hashes"]["bars_clean.csv"] == bars_hash

    def test_rerun_up_to_date(self, demo_dir, capsys):
        assert run_cli("run", "--config", str(demo_dir / "config.ini")) == 0
        out = capsys.readouterr().out
        assert out.count("up to date") == len(STAGES)

    def test_deleted_artifact_reproduced_bit_identical(self, demo_dir, capsys):
        target = demo_dir / "run" / "features.csv"
        before = file_sha256(target)
        target.unlink()
        assert run_cli("features", "--config", str(demo_dir / "config.ini")) == 0
        assert file_sha256(target) == before

    def test_exit_code_one_on_config_error(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[paths]\ncomments = /no/file.csv\n")
        assert run_cli("run", "--config", str(bad)) == 1

    def test_train_before_topics_names_dependency(self, demo_dir, tmp_path, capsys):
        fresh = tmp_path / "fresh_out"
        text = (demo_dir / "config.ini").read_text().replace(str(demo_dir / "run"), str(fresh))
        cfg_path = tmp_path / "fresh.ini"
        cfg_path.write_text(text)
        for stage in ("ingest", "features", "sentiment"):
            assert run_cli(stage, "--config", str(cfg_path)) == 0
        code = run_cli("train", "--config", str(cfg_path))
        err = capsys.readouterr().err
        assert code == 2
        assert "topics" in err

    def test_lock_file_blocks_concurrent_runs(self, demo_dir, capsys):
        lock = demo_dir / "run" / ".lock"
        lock.write_text("999999")
        try:
            assert run_cli("ingest", "--config", str(demo_dir / "config.ini")) == 2
            assert "locked" in capsys.readouterr().err
        finally:
            lock.unlink()

    def test_variant_override_restricts_cells(self, demo_dir, tmp_path):
        out = tmp_path / "variant_out"
        text = (demo_dir / "config.ini").read_text().replace(str(demo_dir / "run"), str(out))
        cfg_path = tmp_path / "variant.ini"
        cfg_path.write_text(text)
        assert run_cli("run", "--config", str(cfg_path), "--variant", "baseline") == 0
        checkpoints = sorted(p.name for p in (out / "checkpoints").iterdir())
        assert checkpoints == ["cnn_baseline_s0.tfc1", "lstm_baseline_s0.tfc1"]
