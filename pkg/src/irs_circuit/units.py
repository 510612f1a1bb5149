"""Engineering-unit parsing for command-line values (``2.3nH``, ``-80deg``)."""

from __future__ import annotations

import math
import re

_NUMBER = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([^\s\d].*?)?\s*$")

# Suffix tables are per quantity so that e.g. "m" is never ambiguous.
SUFFIXES: dict[str, dict[str, float]] = {
    "inductance": {"h": 1.0, "mh": 1e-3, "uh": 1e-6, "µh": 1e-6, "nh": 1e-9, "ph": 1e-12},
    "capacitance": {"f": 1.0, "uf": 1e-6, "µf": 1e-6, "nf": 1e-9, "pf": 1e-12, "ff": 1e-15},
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "thz": 1e12},
    "resistance": {"ohm": 1.0, "ohms": 1.0, "ω": 1.0, "kohm": 1e3},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0, "°": math.pi / 180.0},
    "dimensionless": {},
}


class UnitError(ValueError):
    pass


def parse_quantity(text: str, kind: str) -> float:
    """Convert ``text`` to an SI float; a bare number is already SI.

    >>> parse_quantity("2.3nH", "inductance")
    2.3e-09
    """
    table = SUFFIXES[kind]
    m = _NUMBER.match(str(text))
    if not m:
        raise UnitError(f"cannot parse {text!r} as a number")
    value = float(m.group(1))
    suffix = (m.group(2) or "").lower()
    if not suffix:
        return value
    if suffix not in table:
        allowed = ", ".join(sorted(table)) or "none"
        raise UnitError(f"unknown {kind} unit {m.group(2)!r} in {text!r} (allowed: {allowed})")
    return value * table[suffix]


def parser_for(kind: str):
    """argparse ``type=`` callable for ``kind``; errors surface as usage errors."""
    import argparse

    def convert(text: str) -> float:
        try:
            return parse_quantity(text, kind)
        except UnitError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    convert.__name__ = kind
    return convert
