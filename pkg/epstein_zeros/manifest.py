"""Run manifests and merged run summaries.

Every CLI command appends one manifest line to ``manifests.jsonl`` in the
output directory.  A manifest records what was asked (command line, seed,
configuration), which tool version answered and the sha256 digests of the
payloads written.  Timing is kept in the manifest but never in payloads, so
re-running a manifest reproduces identical payload digests.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
import hashlib
import json
import logging
from pathlib import Path
import time
from typing import Any, Final, Iterable

from epstein_zeros.constants import MANIFEST_FILE, SCHEMA_VERSION
from epstein_zeros.exceptions import MissingManifestError
from epstein_zeros.version import __version__

_LOGGER = logging.getLogger(__name__)

STATUS_PASS: Final = "pass"
STATUS_FAIL: Final = "fail"
STATUS_RECORDED: Final = "recorded"
STATUS_EMPTY: Final = "empty"

_CHUNK: Final = 1 << 16


def stable_json(payload: Any) -> str:
    """Canonical JSON text: sorted keys, no whitespace."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_digest(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as stream:
        for chunk in iter(lambda: stream.read(_CHUNK), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:  # pylint: disable=too-many-instance-attributes
    """One CLI invocation"""

    command: str
    argv: list[str]
    seed: int
    config: dict[str, Any]
    version: str = __version__
    schema: str = SCHEMA_VERSION
    started: str = ""
    timing: dict[str, float] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    criteria: dict[str, str] = field(default_factory=dict)
    status: str = STATUS_PASS
    _clock: float = field(default=0.0, repr=False, compare=False)

    @classmethod
    def start(
        cls, command: str, argv: Iterable[str], seed: int, config: dict[str, Any]
    ) -> RunManifest:
        manifest = cls(command=command, argv=list(argv), seed=int(seed), config=dict(config))
        manifest.started = datetime.now(timezone.utc).isoformat(timespec="seconds")
        manifest._clock = time.perf_counter()
        return manifest

    def record_output(self, name: str, text: str) -> str:
        """Digest of an emitted payload."""
        digest = text_digest(text)
        self.outputs[name] = digest
        return digest

    def record_file(self, path: str | Path) -> str:
        path = Path(path)
        digest = file_digest(path)
        self.outputs[path.name] = digest
        return digest

    def finish(self, status: str) -> RunManifest:
        self.status = status
        self.timing.setdefault("total_s", round(time.perf_counter() - self._clock, 3))
        return self

    @property
    def digest(self) -> str:
        """Identity of the run: everything except the wall clock."""
        return text_digest(stable_json(self._identity()))

    def _identity(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "config": self.config,
            "version": self.version,
            "schema": self.schema,
            "outputs": self.outputs,
            "criteria": self.criteria,
            "status": self.status,
        }

    def to_json(self) -> dict[str, Any]:
        data = self._identity()
        data["started"] = self.started
        data["timing"] = self.timing
        data["digest"] = self.digest
        return data

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> RunManifest:
        try:
            return cls(
                command=str(data["command"]),
                argv=[str(item) for item in data["argv"]],
                seed=int(data["seed"]),
                config=dict(data["config"]),
                version=str(data.get("version", "")),
                schema=str(data.get("schema", SCHEMA_VERSION)),
                started=str(data.get("started", "")),
                timing=dict(data.get("timing", {})),
                outputs=dict(data.get("outputs", {})),
                criteria=dict(data.get("criteria", {})),
                status=str(data.get("status", STATUS_PASS)),
            )
        except (KeyError, TypeError, ValueError) as ex:
            raise MissingManifestError(f"Manifest entry is malformed: {ex}") from ex


def manifest_path(directory: str | Path) -> Path:
    return Path(directory) / MANIFEST_FILE


def append_manifest(manifest: RunManifest, directory: str | Path) -> Path:
    """Appends manifest as one JSON line; existing lines are never rewritten."""
    path = manifest_path(directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as stream:
        stream.write(stable_json(manifest.to_json()))
        stream.write("\n")
    _LOGGER.debug("Appended manifest %s to %s", manifest.digest[:12], path)
    return path


def read_manifests(path: str | Path) -> list[RunManifest]:
    """Manifests of a manifests.jsonl file or of the one inside a directory."""
    path = Path(path)
    if path.is_dir():
        path = manifest_path(path)
    if not path.is_file():
        raise MissingManifestError(f"No manifest file at {path}")
    manifests = []
    with open(path, encoding="utf-8") as stream:
        for number, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as ex:
                raise MissingManifestError(f"{path}:{number} is not valid JSON: {ex}") from ex
            manifests.append(RunManifest.from_json(data))
    return manifests


def _merge_status(current: str | None, status: str) -> str:
    if current is None:
        return status
    if STATUS_FAIL in (current, status):
        return STATUS_FAIL
    if STATUS_PASS in (current, status):
        return STATUS_PASS
    return STATUS_RECORDED


def merge_reports(paths: Iterable[str | Path]) -> dict[str, Any]:
    """Single summary over all manifests, duplicates removed by digest."""
    seen: set[str] = set()
    unique: list[RunManifest] = []
    duplicates = 0
    for path in paths:
        for manifest in read_manifests(path):
            if manifest.digest in seen:
                duplicates += 1
                continue
            seen.add(manifest.digest)
            unique.append(manifest)

    criteria: dict[str, str] = {}
    for manifest in unique:
        statuses = manifest.criteria or {manifest.command: manifest.status}
        for name, status in statuses.items():
            criteria[name] = _merge_status(criteria.get(name), status)

    if not unique:
        overall = STATUS_EMPTY
    elif STATUS_FAIL in criteria.values():
        overall = STATUS_FAIL
    else:
        overall = STATUS_PASS
    return {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "manifests": len(unique),
        "duplicates": duplicates,
        "digests": sorted(seen),
        "criteria": dict(sorted(criteria.items())),
        "status": overall,
    }
