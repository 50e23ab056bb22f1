"""Test run manifests and merged summaries"""
import json
from pathlib import Path

import pytest

from epstein_zeros.exceptions import MissingManifestError
from epstein_zeros.manifest import (
    RunManifest,
    append_manifest,
    file_digest,
    manifest_path,
    merge_reports,
    read_manifests,
    stable_json,
    text_digest,
)
from epstein_zeros.version import __version__

# pylint: disable=missing-function-docstring


def _manifest(command: str = "eval", status: str = "pass", **criteria: str) -> RunManifest:
    manifest = RunManifest.start(command, [command, "--disc", "-15"], 0, {"tol": 1e-12})
    manifest.record_output(f"{command}.json", '{"value":1}')
    manifest.criteria.update(criteria)
    return manifest.finish(status)


def test_stable_json() -> None:
    assert stable_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert text_digest("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_file_digest(tmp_path: Path) -> None:
    path = tmp_path / "payload.json"
    path.write_text("payload", encoding="utf-8")
    assert file_digest(path) == text_digest("payload")


def test_manifest_fields() -> None:
    manifest = _manifest()
    data = manifest.to_json()
    assert data["version"] == __version__
    assert data["outputs"]["eval.json"] == text_digest('{"value":1}')
    assert "total_s" in data["timing"]
    assert data["started"]
    assert data["digest"] == manifest.digest


def test_digest_ignores_clock() -> None:
    first = _manifest()
    second = _manifest()
    second.started = "2000-01-01T00:00:00+00:00"
    second.timing["total_s"] = 99.0
    assert first.digest == second.digest
    second.seed = 1
    assert first.digest != second.digest


def test_append_and_read(tmp_path: Path) -> None:
    append_manifest(_manifest("eval"), tmp_path)
    append_manifest(_manifest("forms"), tmp_path)
    lines = manifest_path(tmp_path).read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["command"] == "eval"
    manifests = read_manifests(tmp_path)
    assert [manifest.command for manifest in manifests] == ["eval", "forms"]
    assert manifests[0].digest == _manifest("eval").digest


def test_read_missing(tmp_path: Path) -> None:
    with pytest.raises(MissingManifestError):
        read_manifests(tmp_path / "nowhere")


def test_read_corrupted(tmp_path: Path) -> None:
    manifest_path(tmp_path).write_text('{"command": "eval"\n', encoding="utf-8")
    with pytest.raises(MissingManifestError):
        read_manifests(tmp_path)


def test_read_malformed_entry(tmp_path: Path) -> None:
    manifest_path(tmp_path).write_text('{"command": "eval"}\n', encoding="utf-8")
    with pytest.raises(MissingManifestError):
        read_manifests(tmp_path)


def test_merge_deduplicates(tmp_path: Path) -> None:
    first, second = tmp_path / "first", tmp_path / "second"
    append_manifest(_manifest("eval"), first)
    append_manifest(_manifest("eval"), second)
    append_manifest(_manifest("forms"), second)
    summary = merge_reports([first, second])
    assert summary["manifests"] == 2
    assert summary["duplicates"] == 1
    assert summary["criteria"] == {"eval": "pass", "forms": "pass"}
    assert summary["status"] == "pass"
    assert len(summary["digests"]) == 2


def test_merge_failure_wins(tmp_path: Path) -> None:
    append_manifest(_manifest("reproduce", "pass", epstein_evaluation="pass"), tmp_path)
    append_manifest(
        _manifest("reproduce", "fail", epstein_evaluation="fail", main_term_ratio="recorded"),
        tmp_path,
    )
    summary = merge_reports([tmp_path])
    assert summary["criteria"]["epstein_evaluation"] == "fail"
    assert summary["criteria"]["main_term_ratio"] == "recorded"
    assert summary["status"] == "fail"


def test_merge_recorded_only(tmp_path: Path) -> None:
    append_manifest(_manifest("reproduce", "pass", off_line_search="recorded"), tmp_path)
    summary = merge_reports([tmp_path])
    assert summary["status"] == "pass"


def test_merge_empty() -> None:
    summary = merge_reports([])
    assert summary["status"] == "empty"
    assert summary["manifests"] == 0
