"""Parameter sweeps of the unit-cell response and their serialization.

A sweep walks one variable over a uniform grid (endpoints included) and
records the reflection phase/amplitude and, optionally, the capacitances
that invert them.  Forward sweeps run over ``capacitance`` or ``frequency``;
design sweeps run over a requested ``phase`` or ``amplitude`` and report
the capacitance that realizes each value.  Rows that fail (degenerate
circuit, infeasible target) keep their place with ``None`` in the affected
columns.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal

import numpy as np

from .circuit import OperatingPoint, UnitCellParams, phase_shift, reflection_amplitude, unit_cell_impedance
from .errors import IRSError, InvalidParameter, PlateauDetected
from .inverse import (
    DEFAULT_WINDOW,
    AmplitudeTarget,
    PhaseTarget,
    capacitance_from_amplitude,
    capacitance_from_phase,
)

Variable = Literal["capacitance", "frequency", "phase", "amplitude"]

OUTPUTS = ("theta", "rho", "c_theta", "c_rho")
COLUMN_NAMES = {"theta": "theta_rad", "rho": "rho", "c_theta": "c_theta_F", "c_rho": "c_rho_F"}

DEFAULT_STEPS = 1024

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and what to record.

    ``fixed`` is the operating-point member that is not swept: the frequency
    for capacitance, phase and amplitude sweeps, the capacitance for
    frequency sweeps.
    """

    variable: Variable
    start: float
    stop: float
    fixed: float
    params: UnitCellParams = field(default_factory=UnitCellParams)
    steps: int = DEFAULT_STEPS
    outputs: tuple[str, ...] = ("theta", "rho")
    window: tuple[float, float] = DEFAULT_WINDOW
    convention: Literal["full", "principal"] = "full"

    def __post_init__(self):
        if self.variable not in ("capacitance", "frequency", "phase", "amplitude"):
            raise InvalidParameter(f"unknown sweep variable {self.variable!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop) and self.start < self.stop):
            raise InvalidParameter(f"need start < stop (got {self.start!r}, {self.stop!r})")
        if self.steps < 2:
            raise InvalidParameter(f"steps must be >= 2 (got {self.steps})")
        if not (math.isfinite(self.fixed) and self.fixed > 0):
            raise InvalidParameter(f"fixed value must be > 0 (got {self.fixed!r})")
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown or not self.outputs:
            raise InvalidParameter(f"outputs must be a non-empty subset of {OUTPUTS} (got {self.outputs})")
        if self.variable in ("capacitance", "frequency") and self.start <= 0:
            raise InvalidParameter(f"{self.variable} sweep must start above 0")
        object.__setattr__(self, "outputs", tuple(o for o in OUTPUTS if o in self.outputs))

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outputs"] = list(self.outputs)
        d["window"] = list(self.window)
        return d


@dataclass
class CurveData:
    spec: SweepSpec
    variable: list[float]
    columns: dict[str, list[float | None]]

    def column(self, output: str) -> list[float | None]:
        return self.columns[COLUMN_NAMES[output]]


@dataclass(frozen=True)
class Extremum:
    kind: Literal["min", "max"]
    at: float
    value: float
    refined: bool


def _try(fn: Callable[[], float]) -> float | None:
    try:
        return fn()
    except IRSError:
        return None


def _forward(spec: SweepSpec, x: float, output: str) -> float:
    """Forward value of ``output`` at grid value ``x`` of a forward sweep."""
    op = OperatingPoint(x, spec.fixed) if spec.variable == "capacitance" else OperatingPoint(spec.fixed, x)
    unit_cell_impedance(spec.params, op)  # raises at the lossless pole
    if output == "theta":
        return phase_shift(spec.params, op)
    return reflection_amplitude(spec.params, op)


def _row(spec: SweepSpec, x: float) -> dict[str, float | None]:
    p = spec.params
    if spec.variable in ("capacitance", "frequency"):
        op = OperatingPoint(x, spec.fixed) if spec.variable == "capacitance" else OperatingPoint(spec.fixed, x)
        theta = _try(lambda: _forward(spec, x, "theta"))
        rho = _try(lambda: _forward(spec, x, "rho"))
    else:
        if spec.variable == "phase":
            sol = _try(lambda: capacitance_from_phase(
                PhaseTarget(x, p, spec.fixed), spec.window, convention=spec.convention))
        else:
            sol = _try(lambda: capacitance_from_amplitude(AmplitudeTarget(x, p, spec.fixed), spec.window))
        if sol is None:
            theta = rho = op = None
        else:
            op = OperatingPoint(sol.c_selected, spec.fixed)
            theta, rho = sol.achieved.phase, sol.achieved.magnitude
    freq = op.f if op is not None else None

    row: dict[str, float | None] = {"theta": theta, "rho": rho}
    if "c_theta" in spec.outputs:
        target = x if spec.variable == "phase" else theta
        row["c_theta"] = None if target is None or freq is None else _try(
            lambda: capacitance_from_phase(
                PhaseTarget(target, p, freq), spec.window, convention=spec.convention).c_selected)
    if "c_rho" in spec.outputs:
        target = x if spec.variable == "amplitude" else rho
        row["c_rho"] = None if target is None or freq is None else _try(
            lambda: capacitance_from_amplitude(AmplitudeTarget(target, p, freq), spec.window).c_selected)
    return row


def run_sweep(spec: SweepSpec) -> CurveData:
    """Evaluate every grid point of ``spec`` in order."""
    xs = spec.grid()
    columns: dict[str, list[float | None]] = {COLUMN_NAMES[o]: [] for o in spec.outputs}
    for x in xs:
        row = _row(spec, float(x))
        for o in spec.outputs:
            columns[COLUMN_NAMES[o]].append(row[o])
    return CurveData(spec, [float(x) for x in xs], columns)


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Minimizer of a unimodal ``f`` on [a, b], to within ``tol``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return c if fc < fd else d


def find_extremum(spec: SweepSpec, output: Literal["theta", "rho"], kind: Literal["min", "max"]) -> Extremum:
    """Locate the min/max of a forward output: coarse grid, then golden-section.

    The golden-section bracket is the best grid sample plus or minus one grid
    step; refinement stops at ``1e-6`` of the sweep span.  The refined point
    is kept only if it beats the best grid sample.

    Raises:
        PlateauDetected: the output varies by less than 1e-12 over the grid.
    """
    if spec.variable not in ("capacitance", "frequency"):
        raise InvalidParameter("extrema are defined for capacitance or frequency sweeps")
    if output not in ("theta", "rho"):
        raise InvalidParameter(f"output must be 'theta' or 'rho' (got {output!r})")
    xs = spec.grid()
    sign = 1.0 if kind == "min" else -1.0

    def objective(x: float) -> float:
        v = _try(lambda: _forward(spec, x, output))
        return math.inf if v is None else sign * v

    scores = np.array([objective(float(x)) for x in xs])
    finite = scores[np.isfinite(scores)]
    if finite.size == 0 or finite.max() - finite.min() < 1e-12:
        raise PlateauDetected(f"{output} is flat over [{spec.start!r}, {spec.stop!r}]")

    i = int(np.argmin(scores))
    lo, hi = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])
    x_best, s_best = float(xs[i]), float(scores[i])
    x_ref = golden_section(objective, lo, hi, 1e-6 * (spec.stop - spec.start))
    s_ref = objective(x_ref)
    if s_ref < s_best:
        x_best, s_best = x_ref, s_ref
    return Extremum(kind, x_best, _forward(spec, x_best, output), refined=True)


def _fmt(v: float | None) -> str:
    return "" if v is None else format(v, ".17g")


def to_csv(curve: CurveData) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(curve.columns)
    writer.writerow(["variable", *names])
    for i, x in enumerate(curve.variable):
        writer.writerow([_fmt(x), *(_fmt(curve.columns[n][i]) for n in names)])
    return buf.getvalue()


def to_json(curve: CurveData) -> str:
    payload = {
        "spec": curve.spec.to_dict(),
        "columns": {"variable": curve.variable, **curve.columns},
    }
    return json.dumps(payload, indent=2) + "\n"


def read_csv(text: str) -> dict[str, list[float | None]]:
    """Parse :func:`to_csv` output back into columns."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return {name: [float(r[j]) if r[j] != "" else None for r in body] for j, name in enumerate(header)}
