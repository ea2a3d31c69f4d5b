"""Waveform relaxation for the 1D wave equation on two subdomains.

Dirichlet-Neumann (DNWR), Neumann-Neumann (NNWR), and classical/optimized
Schwarz (SWR) drivers over a shared leapfrog kernel, an exactly testable
delay-series convergence theory, and an experiment runner.
"""

from .core import (
    Discretization,
    IterationHistory,
    IterationRecord,
    SpaceTimeField,
    StabilityError,
    TimeTrace,
    WaveProblem,
    concatenate,
    error_linf_l2,
    l2_space,
    l2_time,
)
from .stepper import (
    AbsorbingTrace,
    DirichletTrace,
    FluxMode,
    NeumannTrace,
    Side,
    StartMode,
    SubdomainProblem,
    extract_flux,
    first_step,
    solve,
)
from .waveform import (
    MONODOMAIN_TRACE,
    Method,
    WrConfig,
    WrResult,
    dnwr_iterate,
    monodomain_solve,
    nnwr_iterate,
    poly_t2,
    run_method,
    swr_classical_iterate,
    swr_optimized_iterate,
)
from .theory import (
    DelayPolynomial,
    SymbolSpec,
    finite_step_bound,
    kernel_closed_form,
    kernel_series,
    predict_trace,
    series_tail_bound,
    symbol_power,
    symmetric_rate,
)
from .benchmark import default_discretization, default_problem, velocity_kick

__version__ = "0.1.0"
