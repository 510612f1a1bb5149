"""Independent ground truth for the closed forms.

Gamma is evaluated here straight from complex admittances,
``Gamma = (1 - Z0 Y) / (1 + Z0 Y)`` with ``Y = 1/(jwL1) + 1/Zb``, in numpy.
Nothing in this module touches the expanded real coefficients used by
:mod:`irs_circuit.circuit` or the quadratic bundles of
:mod:`irs_circuit.inverse`; only the parameter containers and error types
are shared.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .circuit import (
    DEGENERATE_FLOOR,
    OperatingPoint,
    UnitCellParams,
    phase_distance,
    phase_shift,
    reflection_amplitude,
)
from .errors import DegenerateCircuit, InvalidCount, IRSError, UndefinedPhase

# |Gamma| below this is compared in absolute rather than relative terms.
SMALL_GAMMA = 1e-6

PASSIVITY_SLACK = 1e-12


def gamma_many(l1, l2, r, z0, c, f) -> np.ndarray:
    """Vectorized Gamma; broadcasts all arguments, NaN at degenerate points."""
    l1, l2, r, z0, c, f = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (l1, l2, r, z0, c, f))
    )
    w = 2.0 * np.pi * f
    z_l1 = 1j * w * l1
    z_branch = r + 1j * w * l2 + 1.0 / (1j * w * c)
    degenerate = np.abs(z_l1 + z_branch) < DEGENERATE_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        y = 1.0 / z_l1 + 1.0 / z_branch
        g = (1.0 - z0 * y) / (1.0 + z0 * y)
    return np.where(degenerate, np.nan + 0j, g)


def gamma_direct(p: UnitCellParams, op: OperatingPoint) -> complex:
    """Reflection coefficient by plain complex arithmetic.

    Raises:
        DegenerateCircuit: lossless parallel resonance.
    """
    g = complex(gamma_many(p.l1, p.l2, p.r, p.z0, op.c, op.f))
    if math.isnan(g.real):
        raise DegenerateCircuit(f"parallel resonance at c={op.c!r} F, f={op.f!r} Hz")
    return g


@dataclass(frozen=True)
class SamplingRanges:
    """Closed intervals (SI units) for random sampling of the model inputs."""

    l1: tuple[float, float] = (2.3e-9, 2.5e-9)
    l2: tuple[float, float] = (0.4e-9, 0.56e-9)
    r: tuple[float, float] = (2.0, 4.0)
    c: tuple[float, float] = (0.47e-12, 2.35e-12)
    f: tuple[float, float] = (1e9, 3e9)
    z0: float = 377.0

    def sample(self, rng: np.random.Generator, n: int) -> dict[str, np.ndarray]:
        out = {}
        for name in ("l1", "l2", "r", "c", "f"):
            lo, hi = getattr(self, name)
            if lo > 0 and hi / lo > 10.0:
                out[name] = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
            else:
                out[name] = rng.uniform(lo, hi, n)
        return out


@dataclass
class OracleReport:
    points_checked: int = 0
    max_phase_error: float = 0.0
    max_magnitude_error: float = 0.0
    max_amplitude: float = 0.0
    skipped: int = 0
    phase_tol: float = 1e-9
    magnitude_tol: float = 1e-9
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "OracleReport") -> "OracleReport":
        return OracleReport(
            points_checked=self.points_checked + other.points_checked,
            max_phase_error=max(self.max_phase_error, other.max_phase_error),
            max_magnitude_error=max(self.max_magnitude_error, other.max_magnitude_error),
            max_amplitude=max(self.max_amplitude, other.max_amplitude),
            skipped=self.skipped + other.skipped,
            phase_tol=min(self.phase_tol, other.phase_tol),
            magnitude_tol=min(self.magnitude_tol, other.magnitude_tol),
            failures=self.failures + other.failures,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _point(sample: dict[str, np.ndarray], i: int) -> dict[str, float]:
    return {k: float(v[i]) for k, v in sample.items()}


def equivalence_sweep(
    n: int,
    ranges: SamplingRanges = SamplingRanges(),
    seed: int = 0,
    *,
    phase_tol: float = 1e-9,
    magnitude_tol: float = 1e-9,
) -> OracleReport:
    """Compare the closed-form phase and amplitude with :func:`gamma_many`.

    Points are drawn uniformly per parameter (log-uniformly over ranges wider
    than a decade).  Disagreements, and amplitudes above
    ``1 + PASSIVITY_SLACK``, are collected as failures instead of raised.
    """
    if n < 1:
        raise InvalidCount(f"n must be >= 1 (got {n})")
    rng = np.random.default_rng(seed)
    s = ranges.sample(rng, n)
    oracle = gamma_many(s["l1"], s["l2"], s["r"], ranges.z0, s["c"], s["f"])
    report = OracleReport(phase_tol=phase_tol, magnitude_tol=magnitude_tol)

    for i in range(n):
        g = complex(oracle[i])
        if math.isnan(g.real):
            report.skipped += 1
            continue
        p = UnitCellParams(float(s["l1"][i]), float(s["l2"][i]), float(s["r"][i]), ranges.z0)
        op = OperatingPoint(float(s["c"][i]), float(s["f"][i]))
        try:
            rho = reflection_amplitude(p, op)
        except DegenerateCircuit:
            report.skipped += 1
            continue
        report.points_checked += 1
        mag = abs(g)
        mag_err = abs(rho - mag) / mag if mag >= SMALL_GAMMA else abs(rho - mag)
        report.max_magnitude_error = max(report.max_magnitude_error, mag_err)
        report.max_amplitude = max(report.max_amplitude, rho)
        if mag_err > magnitude_tol:
            report.failures.append(
                {"input": _point(s, i), "quantity": "magnitude", "closed_form": rho, "oracle": mag}
            )
        if rho > 1.0 + PASSIVITY_SLACK and p.r >= 0:
            report.failures.append(
                {"input": _point(s, i), "quantity": "passivity", "closed_form": rho, "oracle": mag}
            )
        try:
            theta = phase_shift(p, op)
        except UndefinedPhase:
            continue
        oracle_theta = math.atan2(g.imag, g.real)
        ph_err = phase_distance(theta, oracle_theta)
        report.max_phase_error = max(report.max_phase_error, ph_err)
        if ph_err > phase_tol:
            report.failures.append(
                {"input": _point(s, i), "quantity": "phase", "closed_form": theta, "oracle": oracle_theta}
            )
    return report


def grid_invert(
    kind: Literal["phase", "amplitude"],
    target: float,
    params: UnitCellParams,
    f: float,
    window: tuple[float, float] = (0.47e-12, 2.35e-12),
    points: int = 1_000_000,
) -> float:
    """Brute-force inversion: the grid capacitance closest to ``target``.

    Phase distance is measured on the circle.  No feasibility judgement is
    made; callers compare the achieved value against the target.
    """
    if points < 2:
        raise InvalidCount(f"points must be >= 2 (got {points})")
    c = np.linspace(window[0], window[1], points)
    g = gamma_many(params.l1, params.l2, params.r, params.z0, c, f)
    if kind == "phase":
        err = np.abs(np.remainder(np.angle(g) - target + np.pi, 2.0 * np.pi) - np.pi)
    elif kind == "amplitude":
        err = np.abs(np.abs(g) - target)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    err = np.where(np.isnan(err), np.inf, err)
    return float(c[int(np.argmin(err))])


def grid_achieved(kind: str, params: UnitCellParams, c: float, f: float) -> float:
    g = gamma_direct(params, OperatingPoint(c, f))
    return math.atan2(g.imag, g.real) if kind == "phase" else abs(g)


@dataclass
class RoundTripReport:
    trials: int = 0
    max_phase_residual: float = 0.0
    max_amplitude_residual: float = 0.0
    tol: float = 1e-6
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return asdict(self)


def _random_params(ranges: SamplingRanges, n: int, seed: int) -> list[tuple[UnitCellParams, float, float]]:
    s = ranges.sample(np.random.default_rng(seed), n)
    return [
        (
            UnitCellParams(float(s["l1"][i]), float(s["l2"][i]), float(s["r"][i]), ranges.z0),
            float(s["c"][i]),
            float(s["f"][i]),
        )
        for i in range(n)
    ]


def roundtrip_check(
    n: int = 100,
    seed: int = 0,
    ranges: SamplingRanges = SamplingRanges(),
    tol: float = 1e-6,
) -> RoundTripReport:
    """Forward a random capacitance, invert its phase and amplitude, re-verify."""
    from .inverse import AmplitudeTarget, PhaseTarget, capacitance_from_amplitude, capacitance_from_phase

    if n < 1:
        raise InvalidCount(f"n must be >= 1 (got {n})")
    report = RoundTripReport(tol=tol)
    for p, c, f in _random_params(ranges, n, seed):
        report.trials += 1
        op = OperatingPoint(c, f)
        point = {"l1": p.l1, "l2": p.l2, "r": p.r, "c": c, "f": f}
        for kind in ("phase", "amplitude"):
            try:
                if kind == "phase":
                    sol = capacitance_from_phase(PhaseTarget(phase_shift(p, op), p, f), ranges.c, tol=tol)
                else:
                    sol = capacitance_from_amplitude(AmplitudeTarget(reflection_amplitude(p, op), p, f), ranges.c, tol=tol)
            except IRSError as exc:
                report.failures.append({"input": point, "kind": kind, "error": f"{type(exc).__name__}: {exc}"})
                continue
            if kind == "phase":
                report.max_phase_residual = max(report.max_phase_residual, sol.residual)
            else:
                report.max_amplitude_residual = max(report.max_amplitude_residual, sol.residual)
    return report


@dataclass
class ConcordanceReport:
    trials: int = 0
    max_discrepancy: float = 0.0
    tol: float = 1e-4
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def concordance_check(
    n: int = 100,
    seed: int = 0,
    ranges: SamplingRanges = SamplingRanges(),
    points: int = 1_000_000,
    tol: float = 1e-4,
    kinds: tuple[str, ...] = ("phase", "amplitude"),
) -> ConcordanceReport:
    """Closed-form inversions against :func:`grid_invert` on feasible targets.

    Targets are forward values of random in-window capacitances, so each has
    at least one pre-image on the grid's window.  The figure of merit is the
    gap between the values achieved by the two capacitances.
    """
    from .inverse import AmplitudeTarget, PhaseTarget, capacitance_from_amplitude, capacitance_from_phase

    report = ConcordanceReport(tol=tol)
    for p, c, f in _random_params(ranges, n, seed):
        op = OperatingPoint(c, f)
        for kind in kinds:
            report.trials += 1
            if kind == "phase":
                target = phase_shift(p, op)
                sol = capacitance_from_phase(PhaseTarget(target, p, f), ranges.c)
            else:
                target = reflection_amplitude(p, op)
                sol = capacitance_from_amplitude(AmplitudeTarget(target, p, f), ranges.c)
            c_grid = grid_invert(kind, target, p, f, ranges.c, points)
            closed = grid_achieved(kind, p, sol.c_selected, f)
            brute = grid_achieved(kind, p, c_grid, f)
            gap = phase_distance(closed, brute) if kind == "phase" else abs(closed - brute)
            report.max_discrepancy = max(report.max_discrepancy, gap)
            if gap > tol:
                report.failures.append(
                    {"kind": kind, "target": target, "c_closed": sol.c_selected, "c_grid": c_grid, "gap": gap}
                )
    return report


__all__ = [
    "ConcordanceReport",
    "OracleReport",
    "RoundTripReport",
    "SamplingRanges",
    "concordance_check",
    "equivalence_sweep",
    "gamma_direct",
    "gamma_many",
    "grid_invert",
    "roundtrip_check",
]
