"""Crossing cap shared by the exponential-size computations."""

from __future__ import annotations

import os


class CapExceeded(RuntimeError):
    """Diagram larger than the configured crossing cap."""


def default_cap() -> int:
    return int(os.environ.get("KH_CAP", "14"))


def check_cap(d, cap: int | None = None):
    cap = default_cap() if cap is None else cap
    if len(d.crossings) > cap:
        raise CapExceeded(f"{len(d.crossings)} crossings exceeds the cap of {cap}")
