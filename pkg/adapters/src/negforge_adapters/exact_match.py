"""Exact string match: 1.0 when the candidate equals the reference."""

from __future__ import annotations

from .protocol import serve


def score(reference: str, candidate: str) -> float:
    return 1.0 if reference == candidate else 0.0


def main() -> int:
    return serve(score)


if __name__ == "__main__":
    raise SystemExit(main())
