"""Access to the bundled lexicon files.

The lexicon directory can be overridden with the NEGFORGE_LEXICON_DIR
environment variable or per call; files are plain TSV, UTF-8, with "#"
comment lines.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

LEXICON_DIR_ENV = "NEGFORGE_LEXICON_DIR"


def lexicon_dir(override: str | os.PathLike | None = None) -> Path:
    if override is not None:
        return Path(override)
    env = os.environ.get(LEXICON_DIR_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("negforge") / "data"))


def read_tsv(name: str, directory: str | os.PathLike | None = None) -> list[list[str]]:
    """Rows of a lexicon file, comments and blank lines skipped."""
    path = lexicon_dir(directory) / name
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            rows.append(line.split("\t"))
    return rows
