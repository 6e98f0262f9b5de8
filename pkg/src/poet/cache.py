"""Append-only completion cache: record once, evaluate forever.

Entries are length-prefixed (8-byte big-endian) JSON blobs, one batch of
completions per key.  Appends are single write() calls, so concurrent
readers never observe a torn entry as long as there is one appender.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

from .gateway_types import Completion

_LEN = struct.Struct(">Q")


class CompletionCache:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._index: dict[str, list[Completion]] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        data = self.path.read_bytes()
        offset = 0
        while offset + _LEN.size <= len(data):
            (length,) = _LEN.unpack_from(data, offset)
            offset += _LEN.size
            if offset + length > len(data):
                break  # trailing partial entry from an interrupted append
            entry = json.loads(data[offset : offset + length])
            offset += length
            self._index[entry["key"]] = [
                Completion(c["text"], c["path_index"], c["finish_reason"])
                for c in entry["completions"]
            ]

    def get(self, key: str) -> list[Completion] | None:
        hit = self._index.get(key)
        return list(hit) if hit is not None else None

    def put(self, key: str, completions: list[Completion]) -> None:
        payload = json.dumps(
            {
                "key": key,
                "completions": [
                    {"text": c.text, "path_index": c.path_index, "finish_reason": c.finish_reason}
                    for c in completions
                ],
            },
            ensure_ascii=False,
        ).encode("utf-8")
        blob = _LEN.pack(len(payload)) + payload
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "ab") as fh:
            fh.write(blob)
        self._index[key] = list(completions)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return len(self._index)

    def keys(self):
        return self._index.keys()
