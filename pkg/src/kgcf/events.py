"""Append-only event log with periodic snapshot records.

One record per line: ``event\t<seq>\t<json>`` or ``snapshot\t<seq>\t<json>``.
Restart = load the latest snapshot (if any) and re-apply the events after
it; events record the *outcomes* of any random draws, so replay is exact.
"""

from __future__ import annotations

import json
import os

from .errors import ParseError

EVENTS_HEADER = "kgcf-events/1"


class EventLog:
    def __init__(self, path: str | None = None):
        self.path = path
        self.seq = 0
        if path is not None and not os.path.exists(path):
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(EVENTS_HEADER + "\n")

    def _write(self, record_type: str, payload: dict) -> int:
        self.seq += 1
        if self.path is not None:
            line = f"{record_type}\t{self.seq}\t{json.dumps(payload, sort_keys=True)}\n"
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(line)
                fh.flush()
        return self.seq

    def append_event(self, kind: str, payload: dict) -> int:
        return self._write("event", {"kind": kind, "payload": payload})

    def append_snapshot(self, state_payload: dict) -> int:
        return self._write("snapshot", state_payload)

    @staticmethod
    def read(path: str) -> tuple[dict | None, list[dict], int]:
        """Return (latest snapshot payload, events after it, last seq)."""
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or lines[0] != EVENTS_HEADER:
            raise ParseError("unknown event-log format version", 1)
        snapshot: dict | None = None
        events: list[dict] = []
        last_seq = 0
        for no, raw in enumerate(lines[1:], start=2):
            fields = raw.split("\t")
            if len(fields) != 3 or fields[0] not in ("event", "snapshot"):
                raise ParseError(f"malformed record {fields[0]!r}", no)
            try:
                seq = int(fields[1])
                payload = json.loads(fields[2])
            except ValueError as exc:
                raise ParseError(str(exc), no) from None
            last_seq = seq
            if fields[0] == "snapshot":
                snapshot = payload
                events = []
            else:
                events.append(payload)
        return snapshot, events, last_seq
