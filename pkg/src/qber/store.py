"""File-backed document store with optimistic concurrency.

Documents live as JSON files under root/<collection>/<id>.json wrapped in
a {version, body} envelope. Writes go to a temp file in the same
directory and are moved into place with os.replace, so readers never see
a torn document even if the process dies mid-write.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import uuid
from pathlib import Path

from .errors import MALFORMED, NOT_FOUND, VERSION_CONFLICT, QberError

_ID_ALPHABET = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_")


def _check_name(name: str, kind: str) -> str:
    # Ids become file names; restricting the alphabet closes path traversal.
    if not name or any(ch not in _ID_ALPHABET for ch in name):
        raise QberError(MALFORMED, f"invalid {kind} {name!r}")
    return name


class FileDocumentStore:
    """Stores JSON documents per collection, each with a version counter."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, collection: str, doc_id: str) -> Path:
        return self.root / _check_name(collection, "collection") / (
            _check_name(doc_id, "document id") + ".json"
        )

    def put(
        self,
        collection: str,
        body: dict,
        doc_id: str | None = None,
        base_version: int | None = None,
    ) -> tuple[str, int]:
        """Create or update a document; returns (id, new version).

        Updating requires base_version to equal the stored version, so two
        writers racing from the same version produce exactly one winner.
        """
        if doc_id is None:
            doc_id = uuid.uuid4().hex
        path = self._path(collection, doc_id)
        with self._lock:
            current = None
            if path.exists():
                current = self._read(path)
            if current is None:
                if base_version is not None:
                    raise QberError(
                        NOT_FOUND,
                        f"document {doc_id!r} does not exist in {collection!r}",
                    )
                version = 1
            else:
                if base_version is None or base_version != current["version"]:
                    raise QberError(
                        VERSION_CONFLICT,
                        f"document {doc_id!r} is at version {current['version']}, "
                        f"write was based on {base_version}",
                        details=[{"current_version": current["version"]}],
                    )
                version = current["version"] + 1
            self._write(path, {"version": version, "body": body})
            return doc_id, version

    def get(self, collection: str, doc_id: str) -> tuple[dict, int]:
        path = self._path(collection, doc_id)
        envelope = self._read(path) if path.exists() else None
        if envelope is None:
            raise QberError(
                NOT_FOUND, f"document {doc_id!r} not found in {collection!r}"
            )
        return envelope["body"], envelope["version"]

    def list_ids(self, collection: str) -> list[str]:
        directory = self.root / _check_name(collection, "collection")
        if not directory.is_dir():
            return []
        return sorted(p.stem for p in directory.glob("*.json"))

    def _read(self, path: Path) -> dict | None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                envelope = json.load(handle)
        except FileNotFoundError:
            return None
        except json.JSONDecodeError as exc:
            raise QberError(MALFORMED, f"corrupt document at {path}: {exc.msg}") from exc
        if not isinstance(envelope, dict) or "version" not in envelope or "body" not in envelope:
            raise QberError(MALFORMED, f"corrupt document envelope at {path}")
        return envelope

    def _write(self, path: Path, envelope: dict) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_path = tempfile.mkstemp(
            dir=path.parent, prefix=".tmp-", suffix=".json"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(envelope, handle)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(temp_path, path)
        except BaseException:
            try:
                os.unlink(temp_path)
            except FileNotFoundError:
                pass
            raise
