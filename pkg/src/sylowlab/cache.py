"""Append-only JSON-lines cache of per-prime results.

One record per line::

    {"key": [p, computation_id, digest], "value": ..., "tool_version": ..., "timestamp": ...}

Records from another tool version are ignored.  Unreadable lines are
skipped with a warning.  Writes go through a single lock.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from . import __version__

log = logging.getLogger(__name__)

ENV_VAR = "SYLOWLAB_CACHE"


class _Missing:
    def __repr__(self):
        return "MISSING"


MISSING = _Missing()


def param_digest(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


class ResultCache:
    MISSING = MISSING

    def __init__(self, path, tool_version: str = __version__):
        self.path = Path(path)
        self.tool_version = tool_version
        self._lock = threading.Lock()
        self._data: dict = {}
        self.hits = self.misses = 0
        self._load()

    @classmethod
    def from_env(cls, path: Optional[str] = None) -> Optional["ResultCache"]:
        path = path or os.environ.get(ENV_VAR)
        return cls(path) if path else None

    def _load(self):
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    key = tuple(rec["key"])
                    version = rec["tool_version"]
                    value = rec["value"]
                except (ValueError, KeyError, TypeError):
                    log.warning("%s:%d: unreadable cache line skipped", self.path, lineno)
                    continue
                if version == self.tool_version:
                    self._data.setdefault(key, value)

    def _key(self, p: int, computation: str, params: dict) -> tuple:
        return (int(p), computation, param_digest(params))

    def get(self, p: int, computation: str, params: dict) -> Any:
        with self._lock:
            v = self._data.get(self._key(p, computation, params), MISSING)
            if v is MISSING:
                self.misses += 1
            else:
                self.hits += 1
            return v

    def put(self, p: int, computation: str, params: dict, value: Any) -> None:
        key = self._key(p, computation, params)
        with self._lock:
            if key in self._data:
                return  # records are immutable once written
            rec = {
                "key": list(key),
                "value": value,
                "tool_version": self.tool_version,
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            }
            line = json.dumps(rec, ensure_ascii=False, separators=(",", ":"))
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8", newline="\n") as fh:
                fh.write(line + "\n")
            # store the JSON round-trip so hits match cold values exactly
            self._data[key] = json.loads(json.dumps(value))

    def __len__(self):
        return len(self._data)
