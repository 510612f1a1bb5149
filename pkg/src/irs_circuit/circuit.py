"""Forward model of an IRS unit cell.

The unit cell is the classic varactor-loaded patch equivalent circuit: the
bottom-layer inductance ``L1`` in parallel with a series branch made of the
top-layer inductance ``L2``, the varactor capacitance ``C`` and the loss
resistance ``R``.  The reflection coefficient against the reference
impedance ``Z0`` is

    Gamma = (Z - Z0) / (Z + Z0) = (A + jB) / (C + jD)

where ``A, B, C, D`` are real polynomials in ``1/C`` (see
:func:`phase_coefficients`).  Phase and amplitude follow in closed form
from those four numbers without ever forming a complex quotient.

All inputs are SI: henries, farads, hertz, ohms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateCircuit, InvalidParameter, UndefinedPhase

DEFAULT_Z0 = 377.0

# |jwL1 + Zb| below this (ohms) is treated as the lossless parallel pole.
DEGENERATE_FLOOR = 1e-9

# |Gamma| at or below this has no meaningful phase.
UNDEFINED_PHASE_FLOOR = 1e-12


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidParameter(message)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class UnitCellParams:
    """Fixed electrical identity of one IRS element.

    Defaults sit at the middle of the practical ranges
    L1 in [2.3, 2.5] nH, L2 in [0.4, 0.56] nH, R in [2, 4] ohm.
    """

    l1: float = 2.4e-9
    l2: float = 0.48e-9
    r: float = 3.0
    z0: float = DEFAULT_Z0

    def __post_init__(self):
        _require(_finite(self.l1, self.l2, self.r, self.z0), "unit cell parameters must be finite")
        _require(self.l1 > 0, f"l1 must be > 0 (got {self.l1!r})")
        _require(self.l2 >= 0, f"l2 must be >= 0 (got {self.l2!r})")
        _require(self.r >= 0, f"r must be >= 0 (got {self.r!r})")
        _require(self.z0 > 0, f"z0 must be > 0 (got {self.z0!r})")


@dataclass(frozen=True)
class OperatingPoint:
    """Tunable state of the element: varactor capacitance and incident frequency."""

    c: float
    f: float

    def __post_init__(self):
        _require(_finite(self.c, self.f), "operating point must be finite")
        _require(self.c > 0, f"c must be > 0 (got {self.c!r})")
        _require(self.f > 0, f"f must be > 0 (got {self.f!r})")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.f


@dataclass(frozen=True)
class ReflectionState:
    """Magnitude and phase (radians, in (-pi, pi]) of the reflection coefficient."""

    magnitude: float
    phase: float

    @property
    def phase_deg(self) -> float:
        return math.degrees(self.phase)


@dataclass(frozen=True)
class PhaseCoefficients:
    """Real and imaginary parts of the numerator (a, b) and denominator (c, d) of Gamma."""

    a: float
    b: float
    c: float
    d: float


def wrap_phase(angle: float) -> float:
    """Map an angle onto (-pi, pi]; -pi itself becomes +pi."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def phase_distance(a: float, b: float, period: float = 2.0 * math.pi) -> float:
    """Distance between two angles on the circle, in [0, period/2].

    ``period=pi`` compares angles modulo pi, i.e. as plain arctangents.
    """
    return abs(math.remainder(a - b, period))


def series_branch_impedance(p: UnitCellParams, op: OperatingPoint) -> complex:
    """Impedance of the R + L2 + C branch: R + j(wL2 - 1/(wC))."""
    w = op.omega
    return complex(p.r, w * p.l2 - 1.0 / (w * op.c))


def unit_cell_impedance(p: UnitCellParams, op: OperatingPoint) -> complex:
    """Impedance of L1 in parallel with the series branch.

    Raises:
        DegenerateCircuit: the parallel combination has a pole, which only
            happens for the lossless cell at its parallel resonance.
    """
    zl1 = complex(0.0, op.omega * p.l1)
    zb = series_branch_impedance(p, op)
    denom = zl1 + zb
    if abs(denom) < DEGENERATE_FLOOR:
        raise DegenerateCircuit(
            f"parallel resonance: |jwL1 + Zb| = {abs(denom):.3g} ohm at c={op.c!r} F, f={op.f!r} Hz"
        )
    return zl1 * zb / denom


def gamma_from_impedance(z: complex, z0: float = DEFAULT_Z0) -> complex:
    """Reflection coefficient of a load ``z`` against reference impedance ``z0``."""
    return (z - z0) / (z + z0)


def reflection_coefficient(p: UnitCellParams, op: OperatingPoint) -> complex:
    """Complex reflection coefficient of the unit cell."""
    return gamma_from_impedance(unit_cell_impedance(p, op), p.z0)


def phase_coefficients(p: UnitCellParams, op: OperatingPoint) -> PhaseCoefficients:
    """Expanded numerator/denominator of Gamma.

    With ``w = 2*pi*f``::

        a = -w^2 L1 L2 + L1/C - R Z0
        b =  w R L1 - Z0 w L1 - Z0 w L2 + Z0/(w C)
        c = -w^2 L1 L2 + L1/C + R Z0
        d =  w R L1 + Z0 w L1 + Z0 w L2 - Z0/(w C)

    so that ``Gamma = (a + jb) / (c + jd)``, ``c - a = 2 R Z0`` and
    ``d + b = 2 w R L1``.
    """
    w = op.omega
    l1, l2, r, z0, cap = p.l1, p.l2, p.r, p.z0, op.c
    common_re = -w * w * l1 * l2 + l1 / cap
    common_im = z0 * w * l1 + z0 * w * l2 - z0 / (w * cap)
    return PhaseCoefficients(
        a=common_re - r * z0,
        b=w * r * l1 - common_im,
        c=common_re + r * z0,
        d=w * r * l1 + common_im,
    )


def phase_shift(p: UnitCellParams, op: OperatingPoint) -> float:
    """Closed-form phase of Gamma in (-pi, pi].

    Uses the quadrant-aware angle of ``(ac + bd) + j(bc - ad)`` rather than
    the arctangent of their ratio, which would fold the result onto
    (-pi/2, pi/2).

    Raises:
        UndefinedPhase: Gamma vanishes (matched load).
    """
    k = phase_coefficients(p, op)
    re = k.a * k.c + k.b * k.d
    im = k.b * k.c - k.a * k.d
    if math.hypot(re, im) <= UNDEFINED_PHASE_FLOOR * (k.c * k.c + k.d * k.d):
        raise UndefinedPhase(f"matched load at c={op.c!r} F, f={op.f!r} Hz")
    return wrap_phase(math.atan2(im, re))


def reflection_amplitude(p: UnitCellParams, op: OperatingPoint) -> float:
    """Closed-form magnitude of Gamma: sqrt((a^2 + b^2) / (c^2 + d^2))."""
    k = phase_coefficients(p, op)
    den = math.hypot(k.c, k.d)
    if den < DEGENERATE_FLOOR:
        raise DegenerateCircuit(f"|c + jd| = {den:.3g} at c={op.c!r} F, f={op.f!r} Hz")
    return math.hypot(k.a, k.b) / den


def reflection_state(p: UnitCellParams, op: OperatingPoint) -> ReflectionState:
    return ReflectionState(reflection_amplitude(p, op), phase_shift(p, op))


def principal_phase(phase: float) -> float:
    """Fold a phase onto (-pi/2, pi/2], the range of arctan of a plain ratio."""
    folded = math.remainder(phase, math.pi)
    if folded <= -math.pi / 2:
        folded += math.pi
    return folded


__all__ = [
    "DEFAULT_Z0",
    "DEGENERATE_FLOOR",
    "OperatingPoint",
    "PhaseCoefficients",
    "ReflectionState",
    "UnitCellParams",
    "gamma_from_impedance",
    "phase_coefficients",
    "phase_distance",
    "phase_shift",
    "principal_phase",
    "reflection_amplitude",
    "reflection_coefficient",
    "reflection_state",
    "series_branch_impedance",
    "unit_cell_impedance",
    "wrap_phase",
]
