"""Circuit-level reflection model of a varactor-tuned IRS unit cell.

Forward: :func:`phase_shift` and :func:`reflection_amplitude` from the
equivalent-circuit parameters.  Inverse: :func:`capacitance_from_phase` and
:func:`capacitance_from_amplitude`.  :mod:`irs_circuit.oracle` re-derives
everything with plain complex arithmetic for validation.
"""

from .circuit import (
    OperatingPoint,
    PhaseCoefficients,
    ReflectionState,
    UnitCellParams,
    gamma_from_impedance,
    phase_coefficients,
    phase_shift,
    reflection_amplitude,
    reflection_coefficient,
    reflection_state,
    series_branch_impedance,
    unit_cell_impedance,
)
from .errors import (
    AllCapacitancesValid,
    DegenerateCircuit,
    InfeasibleTarget,
    InvalidCount,
    InvalidParameter,
    IRSError,
    NoRootInRange,
    PlateauDetected,
    UndefinedPhase,
)
from .inverse import (
    DEFAULT_WINDOW,
    AmplitudeTarget,
    DesignRow,
    DesignSolution,
    PhaseTarget,
    QuadraticProblem,
    amplitude_quadratic,
    capacitance_from_amplitude,
    capacitance_from_phase,
    design_table,
    phase_quadratic,
)
from .sweep import CurveData, Extremum, SweepSpec, find_extremum, run_sweep

__version__ = "0.1.0"
