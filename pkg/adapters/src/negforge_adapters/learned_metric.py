"""Bridges an arbitrary Python scoring function onto the wire protocol.

The target is named as "module:function"; the function takes
(reference, candidate) and returns a number. This is the generic hook
for learned metrics whose Python APIs differ, e.g.

    negforge-adapter-metric my_metrics:bleurt_score
"""

from __future__ import annotations

import argparse
import importlib

from .protocol import serve


def resolve(spec: str):
    module_name, _, attribute = spec.partition(":")
    if not module_name or not attribute:
        raise ValueError(f"expected module:function, got {spec!r}")
    module = importlib.import_module(module_name)
    target = module
    for part in attribute.split("."):
        target = getattr(target, part)
    if not callable(target):
        raise TypeError(f"{spec} is not callable")
    return target


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("target", help="scoring function as module:function")
    args = parser.parse_args()
    return serve(resolve(args.target))


if __name__ == "__main__":
    raise SystemExit(main())
