"""Serve loop shared by every adapter script.

Protocol, one JSON object per line:

    <- {"cmd": "ping"}                                  handshake
    -> {"ok": true}
    <- {"id": "7", "reference": "...", "candidate": "..."}
    -> {"id": "7", "score": 0.42}

A malformed request produces an error record carrying the same id (when
one was readable) and the process keeps serving; only EOF stops it.
"""

from __future__ import annotations

import json
import math
import sys
from typing import Callable, TextIO

ScoreFn = Callable[[str, str], float]


def serve(score: ScoreFn, stdin: TextIO | None = None,
          stdout: TextIO | None = None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def emit(payload: dict) -> None:
        stdout.write(json.dumps(payload) + "\n")
        stdout.flush()

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
        except json.JSONDecodeError:
            emit({"error": "unparseable request line"})
            continue
        if request.get("cmd") == "ping":
            emit({"ok": True})
            continue
        request_id = request.get("id")
        if request_id is None:
            emit({"error": "request without id"})
            continue
        reference = request.get("reference")
        candidate = request.get("candidate")
        if not isinstance(reference, str) or not isinstance(candidate, str):
            emit({"id": request_id, "error": "need reference and candidate strings"})
            continue
        try:
            value = float(score(reference, candidate))
        except Exception as exc:  # keep serving whatever the scorer does
            emit({"id": request_id, "error": f"{type(exc).__name__}: {exc}"})
            continue
        if not math.isfinite(value):
            emit({"id": request_id, "error": f"non-finite score {value!r}"})
            continue
        emit({"id": request_id, "score": value})
    return 0
