"""Inverse design: the varactor capacitance that realizes a target reflection.

Writing ``x = 1/C`` the four real parts of Gamma are affine in ``x``::

    a = K + L1 x      b = G + z x      c = N + L1 x      d = M - z x

with ``z = Z0/w`` and

    G = w R L1 - Z0 w L1 - Z0 w L2       K = -w^2 L1 L2 - R Z0
    N = -w^2 L1 L2 + R Z0                M =  w R L1 + Z0 w L1 + Z0 w L2

A phase target turns ``tan(theta) = (bc - ad) / (ac + bd)`` into a quadratic
in ``C`` after multiplying through by ``C^2``; an amplitude target does the
same with ``a^2 + b^2 = rho^2 (c^2 + d^2)``.  Both quadratics have up to two
positive roots, and the tangent form also admits the ``theta + pi``
pre-images, so every root is pushed back through the forward model and the
candidate with the smallest residual wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .circuit import (
    OperatingPoint,
    ReflectionState,
    UnitCellParams,
    phase_distance,
    phase_shift,
    reflection_amplitude,
    reflection_state,
)
from .errors import (
    AllCapacitancesValid,
    DegenerateCircuit,
    InfeasibleTarget,
    IRSError,
    InvalidParameter,
    NoRootInRange,
    UndefinedPhase,
)

DEFAULT_WINDOW = (0.47e-12, 2.35e-12)

# Below this |cos(theta)| the tangent form is replaced by the cos/sin form.
TAN_SINGULARITY = 1e-6

DEFAULT_RESIDUAL_TOL = 1e-6

# Residuals closer than this are considered tied during root selection.
TIE_TOL = 1e-9

# Relative size under which a quadratic coefficient counts as cancelled.
_CANCEL_TOL = 1e-12

PhaseConvention = Literal["full", "principal"]


@dataclass(frozen=True)
class PhaseTarget:
    theta: float
    params: UnitCellParams = field(default_factory=UnitCellParams)
    f: float = 2.4e9

    def __post_init__(self):
        if not math.isfinite(self.theta) or not -math.pi <= self.theta <= math.pi:
            raise InvalidParameter(f"theta must lie in (-pi, pi] (got {self.theta!r})")
        if self.theta == -math.pi:
            object.__setattr__(self, "theta", math.pi)
        if not (math.isfinite(self.f) and self.f > 0):
            raise InvalidParameter(f"f must be > 0 (got {self.f!r})")


@dataclass(frozen=True)
class AmplitudeTarget:
    rho: float
    params: UnitCellParams = field(default_factory=UnitCellParams)
    f: float = 2.4e9

    def __post_init__(self):
        if not math.isfinite(self.rho) or not 0.0 <= self.rho <= 1.0:
            raise InvalidParameter(f"rho must lie in [0, 1] (got {self.rho!r})")
        if not (math.isfinite(self.f) and self.f > 0):
            raise InvalidParameter(f"f must be > 0 (got {self.f!r})")


@dataclass(frozen=True)
class PhaseBundles:
    g: float
    k: float
    n: float
    m: float
    alpha: float
    beta: float
    gamma: float
    psi: float
    delta: float
    mu: float


@dataclass(frozen=True)
class AmplitudeBundles:
    u: float
    p: float
    q: float
    t: float
    chi: float
    sigma: float
    phi: float
    lam: float
    delta: float
    zeta: float


@dataclass(frozen=True)
class QuadraticProblem:
    """``qa*C**2 + qb*C + qc = 0`` together with the target it encodes.

    ``form`` is ``"tan"`` for the usual phase equation, ``"cos-sin"`` when the
    tangent was too close to its pole, and ``"amplitude"`` otherwise.
    ``all_valid`` flags the identically-zero quadratic of a lossless cell
    asked for full reflection.
    """

    qa: float
    qb: float
    qc: float
    kind: Literal["phase", "amplitude"]
    target: PhaseTarget | AmplitudeTarget
    form: str
    all_valid: bool = False

    def evaluate(self, c: float) -> float:
        return (self.qa * c + self.qb) * c + self.qc

    @property
    def discriminant(self) -> float:
        return self.qb * self.qb - 4.0 * self.qa * self.qc

    def roots(self) -> list[float]:
        return solve_quadratic(self.qa, self.qb, self.qc)


@dataclass(frozen=True)
class DesignSolution:
    """Outcome of an inversion.

    ``residuals`` is aligned with ``c_candidates``; ``residual`` is the one of
    ``c_selected``.  At a perfect match the achieved phase is undefined and
    reported as 0.  Candidates whose residuals differ by less than
    :data:`TIE_TOL` are treated as equally good.
    """

    c_selected: float
    c_candidates: list[float]
    residuals: list[float]
    residual: float
    achieved: ReflectionState
    in_range: bool
    problem: QuadraticProblem


def phase_bundles(params: UnitCellParams, f: float) -> PhaseBundles:
    w = 2.0 * math.pi * f
    l1, l2, r, z0 = params.l1, params.l2, params.r, params.z0
    z = z0 / w
    g = w * r * l1 - z0 * w * l1 - z0 * w * l2
    k = -w * w * l1 * l2 - r * z0
    n = -w * w * l1 * l2 + r * z0
    m = w * r * l1 + z0 * w * l1 + z0 * w * l2
    return PhaseBundles(
        g=g,
        k=k,
        n=n,
        m=m,
        alpha=g * n - k * m,
        beta=g * l1 + n * z + k * z - m * l1,
        gamma=2.0 * l1 * z,
        psi=k * n + g * m,
        delta=k * l1 + n * l1 + z * m - z * g,
        mu=l1 * l1 - z * z,
    )


def amplitude_bundles(params: UnitCellParams, f: float) -> AmplitudeBundles:
    w = 2.0 * math.pi * f
    l1, l2, r, z0 = params.l1, params.l2, params.r, params.z0
    z = z0 / w
    u = -w * w * l1 * l2 - r * z0
    p = w * r * l1 - z0 * w * l1 - z0 * w * l2
    q = -w * w * l1 * l2 + r * z0
    t = w * r * l1 + z0 * w * l1 + z0 * w * l2
    # x^2 coefficients of |a + jb|^2 and |c + jd|^2 coincide
    quad = l1 * l1 + z * z
    return AmplitudeBundles(
        u=u,
        p=p,
        q=q,
        t=t,
        chi=u * u + p * p,
        sigma=2.0 * (u * l1 + p * z),
        phi=quad,
        lam=q * q + t * t,
        delta=2.0 * (q * l1 - t * z),
        zeta=quad,
    )


def solve_quadratic(qa: float, qb: float, qc: float) -> list[float]:
    """Real roots of ``qa x^2 + qb x + qc``, ascending.

    Uses the cancellation-free pairing ``x1 = q/qa``, ``x2 = qc/q`` with
    ``q = -(qb + sign(qb) sqrt(disc)) / 2``.  A discriminant that is negative
    only by rounding is clamped to zero.
    """
    if qa == 0.0:
        if qb == 0.0:
            return []
        return [-qc / qb]
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        if -disc > 1e-12 * (qb * qb + abs(4.0 * qa * qc)):
            return []
        disc = 0.0
    q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    if q == 0.0:
        return [0.0, 0.0]
    return sorted([q / qa, qc / q])


def _cancelled(value: float, *terms: float) -> bool:
    return abs(value) <= _CANCEL_TOL * sum(abs(t) for t in terms)


def phase_quadratic(target: PhaseTarget) -> QuadraticProblem:
    """Quadratic in C whose roots reach ``target.theta`` modulo pi."""
    b = phase_bundles(target.params, target.f)
    cos_t, sin_t = math.cos(target.theta), math.sin(target.theta)
    if abs(cos_t) >= TAN_SINGULARITY:
        t = math.tan(target.theta)
        qa, qb, qc = b.alpha - b.psi * t, b.beta - b.delta * t, b.gamma - b.mu * t
        terms = ((b.alpha, b.psi * t), (b.beta, b.delta * t), (b.gamma, b.mu * t))
        form = "tan"
    else:
        qa = b.alpha * cos_t - b.psi * sin_t
        qb = b.beta * cos_t - b.delta * sin_t
        qc = b.gamma * cos_t - b.mu * sin_t
        terms = (
            (b.alpha * cos_t, b.psi * sin_t),
            (b.beta * cos_t, b.delta * sin_t),
            (b.gamma * cos_t, b.mu * sin_t),
        )
        form = "cos-sin"
    degenerate = all(_cancelled(v, *ts) for v, ts in zip((qa, qb, qc), terms))
    return QuadraticProblem(qa, qb, qc, "phase", target, form, degenerate)


def amplitude_quadratic(target: AmplitudeTarget) -> QuadraticProblem:
    """Quadratic in C from ``|Gamma(C)|^2 = rho^2``."""
    b = amplitude_bundles(target.params, target.f)
    rho2 = target.rho * target.rho
    qa = b.chi - b.lam * rho2
    qb = b.sigma - b.delta * rho2
    qc = b.phi - b.zeta * rho2
    degenerate = (
        _cancelled(qa, b.chi, b.lam * rho2)
        and _cancelled(qb, b.sigma, b.delta * rho2)
        and _cancelled(qc, b.phi, b.zeta * rho2)
    )
    return QuadraticProblem(qa, qb, qc, "amplitude", target, "amplitude", degenerate)


def _residual(problem: QuadraticProblem, c: float, convention: PhaseConvention) -> float:
    target = problem.target
    op = OperatingPoint(c, target.f)
    if problem.kind == "phase":
        period = math.pi if convention == "principal" else 2.0 * math.pi
        return phase_distance(phase_shift(target.params, op), target.theta, period)
    return abs(reflection_amplitude(target.params, op) - target.rho)


def _in_window(c: float, window: tuple[float, float]) -> bool:
    return window[0] <= c <= window[1]


def _select(
    problem: QuadraticProblem,
    window: tuple[float, float],
    strict_window: bool,
    tol: float,
    convention: PhaseConvention = "full",
) -> DesignSolution:
    if problem.all_valid:
        raise AllCapacitancesValid(
            "lossless cell reflects fully at every capacitance; any C realizes the target"
        )
    roots = problem.roots()
    if not roots:
        raise InfeasibleTarget(f"negative discriminant ({problem.discriminant:.3g}); no real capacitance")

    candidates, residuals = [], []
    for c in roots:
        if not (math.isfinite(c) and c > 0.0):
            continue
        try:
            res = _residual(problem, c, convention)
        except (DegenerateCircuit, UndefinedPhase):
            continue
        candidates.append(c)
        residuals.append(res)
    if not candidates:
        raise InfeasibleTarget(f"no positive real root (roots: {roots})")

    feasible = [i for i, res in enumerate(residuals) if res <= tol]
    if not feasible:
        raise InfeasibleTarget(
            f"roots {candidates} miss the target by {min(residuals):.3g}"
            + (" (reachable only modulo pi)" if problem.kind == "phase" else "")
        )
    pool = feasible
    if strict_window:
        pool = [i for i in feasible if _in_window(candidates[i], window)]
        if not pool:
            raise NoRootInRange(
                f"candidates {[candidates[i] for i in feasible]} F lie outside window {window}",
                [candidates[i] for i in feasible],
            )

    best = min(residuals[i] for i in pool)
    tied = [i for i in pool if residuals[i] <= best + TIE_TOL]
    pick = min(tied, key=lambda i: (not _in_window(candidates[i], window), candidates[i]))
    c = candidates[pick]
    op = OperatingPoint(c, problem.target.f)
    try:
        achieved = reflection_state(problem.target.params, op)
    except UndefinedPhase:
        achieved = ReflectionState(reflection_amplitude(problem.target.params, op), 0.0)
    return DesignSolution(
        c_selected=c,
        c_candidates=candidates,
        residuals=residuals,
        residual=residuals[pick],
        achieved=achieved,
        in_range=_in_window(c, window),
        problem=problem,
    )


def capacitance_from_phase(
    target: PhaseTarget,
    window: tuple[float, float] = DEFAULT_WINDOW,
    *,
    strict_window: bool = False,
    tol: float = DEFAULT_RESIDUAL_TOL,
    convention: PhaseConvention = "full",
) -> DesignSolution:
    """Capacitance whose reflection phase equals ``target.theta``.

    Args:
        target: requested phase, cell parameters and frequency.
        window: physical capacitance range (farads) used for tie-breaking
            and, with ``strict_window``, for filtering.
        strict_window: raise :class:`NoRootInRange` instead of returning an
            out-of-window capacitance.
        tol: largest forward-verified residual (radians) accepted as a hit.
        convention: ``"full"`` compares phases on the whole circle;
            ``"principal"`` compares them modulo pi, the way a bare
            arctangent of the ratio would.

    Raises:
        InfeasibleTarget: no positive root reaches the target within ``tol``.
        NoRootInRange: only with ``strict_window``.
    """
    return _select(phase_quadratic(target), window, strict_window, tol, convention)


def capacitance_from_amplitude(
    target: AmplitudeTarget,
    window: tuple[float, float] = DEFAULT_WINDOW,
    *,
    strict_window: bool = False,
    tol: float = DEFAULT_RESIDUAL_TOL,
) -> DesignSolution:
    """Capacitance whose reflection amplitude equals ``target.rho``.

    Raises:
        AllCapacitancesValid: lossless cell with ``rho == 1``.
        InfeasibleTarget: the target lies outside the reachable amplitudes.
        NoRootInRange: only with ``strict_window``.
    """
    return _select(amplitude_quadratic(target), window, strict_window, tol)


@dataclass
class DesignRow:
    theta: float
    rho: float
    f: float
    c_theta: float | None = None
    c_rho: float | None = None
    achieved: ReflectionState | None = None
    discrepancy: float | None = None
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.c_theta is not None


def design_table(
    rows: Sequence[tuple[float, float, float]],
    params: UnitCellParams,
    window: tuple[float, float] = DEFAULT_WINDOW,
) -> list[DesignRow]:
    """One design per ``(theta, rho, f)`` request.

    The phase inversion gives the headline capacitance.  The amplitude that
    capacitance actually produces is reported next to the requested one;
    the two generally differ because one capacitance cannot pin both.
    Failures are recorded on the row and never abort the table.
    """
    out = []
    for theta, rho, f in rows:
        row = DesignRow(theta, rho, f)
        out.append(row)
        try:
            phase_target = PhaseTarget(theta, params, f)
            amplitude_target = AmplitudeTarget(rho, params, f)
        except InvalidParameter as exc:
            row.errors.append(f"domain: {exc}")
            continue
        try:
            sol = capacitance_from_phase(phase_target, window)
        except IRSError as exc:
            row.errors.append(f"phase: {type(exc).__name__}: {exc}")
        else:
            row.c_theta = sol.c_selected
            row.achieved = sol.achieved
            row.discrepancy = abs(sol.achieved.magnitude - rho)
        try:
            row.c_rho = capacitance_from_amplitude(amplitude_target, window).c_selected
        except IRSError as exc:
            row.errors.append(f"amplitude: {type(exc).__name__}: {exc}")
    return out
