"""Deliberate defects used as negative controls for the verification suites.

Nothing here is active unless a caller opts in through :func:`mutated`; the
CLI exposes it only through the hidden ``--mutate`` flag.
"""
from __future__ import annotations

import contextlib

KNOWN = ("drop-monotonicity", "break-d2", "sigma-convention")

_active: set[str] = set()


def active(name: str) -> bool:
    return name in _active


@contextlib.contextmanager
def mutated(*names: str):
    unknown = [n for n in names if n not in KNOWN]
    if unknown:
        raise ValueError(f"unknown mutation(s): {unknown}")
    before = set(_active)
    _active.update(names)
    try:
        yield
    finally:
        _active.clear()
        _active.update(before)
