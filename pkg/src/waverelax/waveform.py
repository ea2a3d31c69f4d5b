"""The four waveform-relaxation drivers over two subdomains.

Each driver repeats whole space-time subdomain solves, exchanging interface
data between sweeps, and records the error of every iterate against a
precomputed single-domain reference:

* ``dnwr_iterate``   - Dirichlet solve left, transmitted-flux Neumann solve
  right, then a relaxed trace update with parameter theta.
* ``nnwr_iterate``   - simultaneous Dirichlet solves, flux-jump driven
  correction solves, relaxed update.
* ``swr_classical_iterate`` - overlapping Dirichlet exchange, Jacobi sweeps.
* ``swr_optimized_iterate`` - nonoverlapping absorbing-operator exchange.

All exchanged traces are immutable snapshots; the two stage solves of NNWR
and of both Schwarz variants are independent and may run concurrently
without changing any result.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .core import (
    Discretization,
    IterationHistory,
    IterationRecord,
    SpaceTimeField,
    TimeTrace,
    WaveProblem,
    concatenate,
    error_linf_l2,
    l2_time,
    sample,
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
    solve,
)

__all__ = [
    "Method",
    "WrConfig",
    "WrResult",
    "poly_t2",
    "MONODOMAIN_TRACE",
    "monodomain_solve",
    "dnwr_iterate",
    "nnwr_iterate",
    "swr_classical_iterate",
    "swr_optimized_iterate",
    "run_method",
]


class Method(enum.Enum):
    DNWR = "dnwr"
    NNWR = "nnwr"
    SWR_CLASSICAL = "swr_classical"
    SWR_OPTIMIZED = "swr_optimized"


def poly_t2(t: np.ndarray) -> np.ndarray:
    """The quadratic initial interface guess used throughout the experiments."""
    return np.asarray(t, dtype=float) ** 2


# sentinel: start the iteration from the reference solution's interface data
MONODOMAIN_TRACE = "monodomain_trace"

InitialGuess = Union[None, str, Callable[[np.ndarray], np.ndarray], TimeTrace]


@dataclass(frozen=True)
class WrConfig:
    """Driver configuration shared by all four methods.

    ``theta`` is the relaxation weight in (0, 1]; the Schwarz variants
    ignore it.  ``initial_guess`` is a function of t for the interface data
    (and, for Schwarz, for the data on both artificial boundaries), a
    ready-made trace, None for zero, or ``MONODOMAIN_TRACE`` to start at
    the fixed point.  ``stop_mode`` selects the stopping quantity:
    "reference" compares against the single-domain solve (the quantity the
    convergence studies plot), "increment" uses the trace update size and
    needs no reference.
    """

    method: Method
    theta: float = 0.5
    max_iterations: int = 20
    tolerance: float = 1e-10
    initial_guess: InitialGuess = poly_t2
    overlap_cells: int = 0
    flux_mode: FluxMode = FluxMode.SCHEME_CONSISTENT
    start_mode: StartMode = StartMode.EXACT_DALEMBERT
    parallel_stages: bool = False
    stop_mode: str = "reference"

    def __post_init__(self) -> None:
        if self.method in (Method.DNWR, Method.NNWR) and not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must lie in (0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        if self.method is Method.SWR_CLASSICAL:
            if self.overlap_cells < 1:
                raise ValueError("classical Schwarz needs overlap_cells >= 1")
            if self.overlap_cells % 2 != 0:
                raise ValueError(
                    "overlap_cells must be even so the overlap sits symmetrically about the interface"
                )
        if self.stop_mode not in ("reference", "increment"):
            raise ValueError("stop_mode must be 'reference' or 'increment'")


@dataclass(frozen=True, eq=False)
class WrResult:
    """Outcome of a relaxation run."""

    method: Method
    history: IterationHistory
    converged: bool
    iterations_run: int
    fields: Tuple[SpaceTimeField, SpaceTimeField]
    combined: SpaceTimeField
    interface_traces: Tuple[TimeTrace, ...]
    reference: SpaceTimeField
    reference_trace: TimeTrace

    def iterations_to(self, tolerance: float) -> Optional[int]:
        return self.history.iterations_to(tolerance)


def _check_setup(problem: WaveProblem, disc: Discretization) -> None:
    expected = problem.wave_speed * disc.dt / disc.dx
    if abs(disc.lam - expected) > 1e-12 * max(1.0, expected):
        raise ValueError(
            f"discretization CFL number {disc.lam} disagrees with c*dt/dx = {expected}"
        )
    for length, what in ((problem.a, "left subdomain"), (problem.b, "right subdomain")):
        n = round(length / disc.dx)
        if n < 1 or abs(length - n * disc.dx) > 1e-9 * disc.dx:
            raise ValueError(f"{what} length {length} is not a multiple of dx={disc.dx}")


def monodomain_solve(
    problem: WaveProblem, disc: Discretization, start_mode: StartMode = StartMode.EXACT_DALEMBERT
) -> SpaceTimeField:
    """Single-domain reference solve with the physical Dirichlet data."""
    _check_setup(problem, disc)
    p = SubdomainProblem(
        x_left=problem.x_left,
        x_right=problem.x_right,
        wave_speed=problem.wave_speed,
        disc=disc,
        left_bc=DirichletTrace(TimeTrace.from_function(problem.g_left, disc)),
        right_bc=DirichletTrace(TimeTrace.from_function(problem.g_right, disc)),
        start_mode=start_mode,
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        grid_anchor=problem.x_left,
    )
    return solve(p)


def _initial_trace(cfg: WrConfig, disc: Discretization, fixed_point: np.ndarray) -> np.ndarray:
    guess = cfg.initial_guess
    if isinstance(guess, str):
        if guess != MONODOMAIN_TRACE:
            raise ValueError(f"unknown initial guess selector {guess!r}")
        return fixed_point.copy()
    if isinstance(guess, TimeTrace):
        if guess.values.size != disc.n_time + 1:
            raise ValueError("initial guess trace length does not match the time window")
        return guess.values.copy()
    return sample(guess, disc.times())


def _solve_pair(pa: SubdomainProblem, pb: SubdomainProblem, parallel: bool):
    if parallel:
        with ThreadPoolExecutor(max_workers=2) as pool:
            fa = pool.submit(solve, pa)
            fb = pool.submit(solve, pb)
            return fa.result(), fb.result()
    return solve(pa), solve(pb)


class _Recorder:
    """Accumulates per-iteration records and applies the stopping rule."""

    def __init__(self, cfg: WrConfig):
        self.cfg = cfg
        self.records: List[IterationRecord] = []
        self._t0 = time.perf_counter()

    def tick(self) -> None:
        self._t0 = time.perf_counter()

    def add(self, k: int, field_error: float, trace_error: float) -> None:
        ms = 1000.0 * (time.perf_counter() - self._t0)
        self.records.append(IterationRecord(k, field_error, trace_error, ms))

    def should_stop(self, field_error: float, increment: float) -> bool:
        if self.cfg.stop_mode == "reference":
            return field_error <= self.cfg.tolerance
        return increment <= self.cfg.tolerance

    def history(self) -> IterationHistory:
        return IterationHistory(tuple(self.records))


def dnwr_iterate(
    problem: WaveProblem,
    disc: Discretization,
    cfg: WrConfig,
    reference: Optional[SpaceTimeField] = None,
) -> WrResult:
    """Dirichlet-Neumann relaxation.

    Per sweep: solve the left subdomain with the current interface trace,
    hand its outward flux (negated) to the right subdomain as Neumann data,
    then relax the trace toward the right subdomain's interface values with
    weight theta.  The right solve consumes flux levels up to n_time-1
    only.
    """
    if cfg.method is not Method.DNWR:
        raise ValueError("config method must be DNWR")
    _check_setup(problem, disc)
    mono = reference if reference is not None else monodomain_solve(problem, disc, cfg.start_mode)
    mono_trace = mono.values[:, mono.node_index(problem.interface)]

    h = _initial_trace(cfg, disc, mono_trace)
    zeros = TimeTrace(np.zeros(disc.n_time + 1), disc.dt)
    p1 = SubdomainProblem(
        x_left=problem.x_left,
        x_right=problem.interface,
        wave_speed=problem.wave_speed,
        disc=disc,
        left_bc=DirichletTrace(TimeTrace.from_function(problem.g_left, disc)),
        right_bc=DirichletTrace(zeros),
        start_mode=cfg.start_mode,
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        grid_anchor=problem.x_left,
    )
    p2 = SubdomainProblem(
        x_left=problem.interface,
        x_right=problem.x_right,
        wave_speed=problem.wave_speed,
        disc=disc,
        left_bc=NeumannTrace(zeros),
        right_bc=DirichletTrace(TimeTrace.from_function(problem.g_right, disc)),
        start_mode=cfg.start_mode,
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        grid_anchor=problem.x_left,
    )

    rec = _Recorder(cfg)
    traces: List[TimeTrace] = []
    converged = False
    u1 = u2 = combined = None
    for k in range(1, cfg.max_iterations + 1):
        rec.tick()
        u1 = solve(p1.with_bcs(right_bc=DirichletTrace(TimeTrace(h, disc.dt))))
        flux = extract_flux(u1, Side.RIGHT, cfg.flux_mode)
        u2 = solve(p2.with_bcs(left_bc=NeumannTrace(TimeTrace(-flux.values, disc.dt))))
        h_new = cfg.theta * u2.values[:, 0] + (1.0 - cfg.theta) * h
        combined, _ = concatenate(u1, u2)
        fe = error_linf_l2(mono, combined)
        te = l2_time(h_new - mono_trace, disc.dt)
        increment = l2_time(h_new - h, disc.dt)
        rec.add(k, fe, te)
        traces.append(TimeTrace(h_new, disc.dt))
        h = h_new
        if rec.should_stop(fe, increment):
            converged = True
            break

    return WrResult(
        method=Method.DNWR,
        history=rec.history(),
        converged=converged,
        iterations_run=len(rec.records),
        fields=(u1, u2),
        combined=combined,
        interface_traces=tuple(traces),
        reference=mono,
        reference_trace=TimeTrace(mono_trace, disc.dt),
    )


def nnwr_iterate(
    problem: WaveProblem,
    disc: Discretization,
    cfg: WrConfig,
    reference: Optional[SpaceTimeField] = None,
) -> WrResult:
    """Neumann-Neumann relaxation.

    Per sweep: both subdomains solve with the current trace as Dirichlet
    data, the interface flux jump drives a zero-data correction solve on
    each side, and the trace moves by -theta times the summed correction
    traces.  The two solves of each stage are independent.
    """
    if cfg.method is not Method.NNWR:
        raise ValueError("config method must be NNWR")
    _check_setup(problem, disc)
    mono = reference if reference is not None else monodomain_solve(problem, disc, cfg.start_mode)
    mono_trace = mono.values[:, mono.node_index(problem.interface)]

    w = _initial_trace(cfg, disc, mono_trace)
    zeros = TimeTrace(np.zeros(disc.n_time + 1), disc.dt)
    common = dict(
        wave_speed=problem.wave_speed,
        disc=disc,
        start_mode=cfg.start_mode,
        grid_anchor=problem.x_left,
    )
    p1 = SubdomainProblem(
        x_left=problem.x_left,
        x_right=problem.interface,
        left_bc=DirichletTrace(TimeTrace.from_function(problem.g_left, disc)),
        right_bc=DirichletTrace(zeros),
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        **common,
    )
    p2 = SubdomainProblem(
        x_left=problem.interface,
        x_right=problem.x_right,
        left_bc=DirichletTrace(zeros),
        right_bc=DirichletTrace(TimeTrace.from_function(problem.g_right, disc)),
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        **common,
    )
    # corrections: zero data, zero outer Dirichlet, flux-sum Neumann data at the interface
    c1 = SubdomainProblem(
        x_left=problem.x_left,
        x_right=problem.interface,
        left_bc=DirichletTrace(zeros),
        right_bc=NeumannTrace(zeros),
        **common,
    )
    c2 = SubdomainProblem(
        x_left=problem.interface,
        x_right=problem.x_right,
        left_bc=NeumannTrace(zeros),
        right_bc=DirichletTrace(zeros),
        **common,
    )

    rec = _Recorder(cfg)
    traces: List[TimeTrace] = []
    converged = False
    u1 = u2 = combined = None
    for k in range(1, cfg.max_iterations + 1):
        rec.tick()
        w_tr = DirichletTrace(TimeTrace(w, disc.dt))
        u1, u2 = _solve_pair(
            p1.with_bcs(right_bc=w_tr), p2.with_bcs(left_bc=w_tr), cfg.parallel_stages
        )
        flux_sum = (
            extract_flux(u1, Side.RIGHT, cfg.flux_mode).values
            + extract_flux(u2, Side.LEFT, cfg.flux_mode).values
        )
        sig = TimeTrace(flux_sum, disc.dt)
        psi1, psi2 = _solve_pair(
            c1.with_bcs(right_bc=NeumannTrace(sig)),
            c2.with_bcs(left_bc=NeumannTrace(sig)),
            cfg.parallel_stages,
        )
        w_new = w - cfg.theta * (psi1.values[:, -1] + psi2.values[:, 0])
        combined, _ = concatenate(u1, u2)
        fe = error_linf_l2(mono, combined)
        te = l2_time(w_new - mono_trace, disc.dt)
        increment = l2_time(w_new - w, disc.dt)
        rec.add(k, fe, te)
        traces.append(TimeTrace(w_new, disc.dt))
        w = w_new
        if rec.should_stop(fe, increment):
            converged = True
            break

    return WrResult(
        method=Method.NNWR,
        history=rec.history(),
        converged=converged,
        iterations_run=len(rec.records),
        fields=(u1, u2),
        combined=combined,
        interface_traces=tuple(traces),
        reference=mono,
        reference_trace=TimeTrace(mono_trace, disc.dt),
    )


def swr_classical_iterate(
    problem: WaveProblem,
    disc: Discretization,
    cfg: WrConfig,
    reference: Optional[SpaceTimeField] = None,
) -> WrResult:
    """Overlapping Schwarz relaxation with Dirichlet exchange.

    The subdomains extend overlap_cells/2 cells past the interface on each
    side.  Jacobi ordering: both solves of a sweep read the partner's field
    from the previous sweep.  Errors compare the fields restricted to the
    nonoverlapping split at the interface.
    """
    if cfg.method is not Method.SWR_CLASSICAL:
        raise ValueError("config method must be SWR_CLASSICAL")
    _check_setup(problem, disc)
    half = cfg.overlap_cells // 2
    ext = half * disc.dx
    if ext >= problem.a or ext >= problem.b:
        raise ValueError("overlap exceeds a subdomain")
    x1r = problem.interface + ext
    x2l = problem.interface - ext

    mono = reference if reference is not None else monodomain_solve(problem, disc, cfg.start_mode)
    mono_trace = mono.values[:, mono.node_index(problem.interface)]

    if cfg.initial_guess == MONODOMAIN_TRACE:
        tr1 = mono.values[:, mono.node_index(x1r)].copy()
        tr2 = mono.values[:, mono.node_index(x2l)].copy()
    else:
        tr1 = _initial_trace(cfg, disc, mono_trace)
        tr2 = tr1.copy()

    common = dict(
        wave_speed=problem.wave_speed,
        disc=disc,
        start_mode=cfg.start_mode,
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        grid_anchor=problem.x_left,
    )
    zeros = TimeTrace(np.zeros(disc.n_time + 1), disc.dt)
    p1 = SubdomainProblem(
        x_left=problem.x_left,
        x_right=x1r,
        left_bc=DirichletTrace(TimeTrace.from_function(problem.g_left, disc)),
        right_bc=DirichletTrace(zeros),
        **common,
    )
    p2 = SubdomainProblem(
        x_left=x2l,
        x_right=problem.x_right,
        left_bc=DirichletTrace(zeros),
        right_bc=DirichletTrace(TimeTrace.from_function(problem.g_right, disc)),
        **common,
    )

    rec = _Recorder(cfg)
    traces: List[TimeTrace] = []
    converged = False
    u1 = u2 = combined = None
    for k in range(1, cfg.max_iterations + 1):
        rec.tick()
        u1, u2 = _solve_pair(
            p1.with_bcs(right_bc=DirichletTrace(TimeTrace(tr1, disc.dt))),
            p2.with_bcs(left_bc=DirichletTrace(TimeTrace(tr2, disc.dt))),
            cfg.parallel_stages,
        )
        # next sweep's artificial data, read from this sweep's partner fields
        tr1_next = u2.values[:, u2.node_index(x1r)].copy()
        tr2_next = u1.values[:, u1.node_index(x2l)].copy()
        left = u1.restrict(problem.x_left, problem.interface)
        right = u2.restrict(problem.interface, problem.x_right)
        combined, _ = concatenate(left, right)
        fe = error_linf_l2(mono, combined)
        gamma = left.values[:, -1]
        te = l2_time(gamma - mono_trace, disc.dt)
        increment = max(
            l2_time(tr1_next - tr1, disc.dt), l2_time(tr2_next - tr2, disc.dt)
        )
        rec.add(k, fe, te)
        traces.append(TimeTrace(gamma, disc.dt))
        tr1, tr2 = tr1_next, tr2_next
        if rec.should_stop(fe, increment):
            converged = True
            break

    return WrResult(
        method=Method.SWR_CLASSICAL,
        history=rec.history(),
        converged=converged,
        iterations_run=len(rec.records),
        fields=(u1, u2),
        combined=combined,
        interface_traces=tuple(traces),
        reference=mono,
        reference_trace=TimeTrace(mono_trace, disc.dt),
    )


def _absorbing_data_from(partner: SpaceTimeField, partner_side: Side, v0_gamma: float) -> np.ndarray:
    """Absorbing-operator data for one subdomain, read off the partner.

    The space part is the scheme-consistent flux of the partner at the
    interface, negated because the outward normals are opposite; the time
    part is the centered difference of the partner's interface trace.  At
    level 0 the time part is the initial velocity at the interface.
    """
    p: SubdomainProblem = partner.problem
    c, dt, N = p.wave_speed, p.disc.dt, p.disc.n_time
    g = extract_flux(partner, partner_side, FluxMode.SCHEME_CONSISTENT).values
    z = partner.values[:, 0 if partner_side is Side.LEFT else -1]
    r = np.empty(N + 1)
    r[1:N] = -g[1:N] + (z[2:] - z[:-2]) / (2.0 * c * dt)
    r[0] = -g[0] + v0_gamma / c
    r[N] = r[N - 1]  # never consumed by the partner solve
    return r


def swr_optimized_iterate(
    problem: WaveProblem,
    disc: Discretization,
    cfg: WrConfig,
    reference: Optional[SpaceTimeField] = None,
) -> WrResult:
    """Nonoverlapping Schwarz relaxation with absorbing-operator exchange.

    Each subdomain imposes (d/dn + (1/c) d/dt) u equal to the same operator
    applied to the partner's previous field, evaluated with the stencils of
    the imposition itself.  In one space dimension the operator is exact up
    to discretization, so the sweep count barely depends on the window.
    """
    if cfg.method is not Method.SWR_OPTIMIZED:
        raise ValueError("config method must be SWR_OPTIMIZED")
    _check_setup(problem, disc)
    mono = reference if reference is not None else monodomain_solve(problem, disc, cfg.start_mode)
    mono_trace = mono.values[:, mono.node_index(problem.interface)]
    v0_gamma = 0.0 if problem.v0 is None else float(problem.v0(np.asarray(problem.interface)))

    common = dict(
        wave_speed=problem.wave_speed,
        disc=disc,
        start_mode=cfg.start_mode,
        u0=problem.u0,
        v0=problem.v0,
        f=problem.f,
        grid_anchor=problem.x_left,
    )
    zeros = TimeTrace(np.zeros(disc.n_time + 1), disc.dt)
    p1 = SubdomainProblem(
        x_left=problem.x_left,
        x_right=problem.interface,
        left_bc=DirichletTrace(TimeTrace.from_function(problem.g_left, disc)),
        right_bc=AbsorbingTrace(zeros),
        **common,
    )
    p2 = SubdomainProblem(
        x_left=problem.interface,
        x_right=problem.x_right,
        left_bc=AbsorbingTrace(zeros),
        right_bc=DirichletTrace(TimeTrace.from_function(problem.g_right, disc)),
        **common,
    )

    if cfg.initial_guess == MONODOMAIN_TRACE:
        r1 = _absorbing_data_from(mono.restrict(problem.interface, problem.x_right), Side.LEFT, v0_gamma)
        r2 = _absorbing_data_from(mono.restrict(problem.x_left, problem.interface), Side.RIGHT, v0_gamma)
    else:
        r1 = _initial_trace(cfg, disc, mono_trace)
        r2 = r1.copy()

    rec = _Recorder(cfg)
    traces: List[TimeTrace] = []
    converged = False
    u1 = u2 = combined = None
    for k in range(1, cfg.max_iterations + 1):
        rec.tick()
        u1, u2 = _solve_pair(
            p1.with_bcs(right_bc=AbsorbingTrace(TimeTrace(r1, disc.dt))),
            p2.with_bcs(left_bc=AbsorbingTrace(TimeTrace(r2, disc.dt))),
            cfg.parallel_stages,
        )
        r1_next = _absorbing_data_from(u2, Side.LEFT, v0_gamma)
        r2_next = _absorbing_data_from(u1, Side.RIGHT, v0_gamma)
        combined, _ = concatenate(u1, u2)
        fe = error_linf_l2(mono, combined)
        gamma = u1.values[:, -1]
        te = l2_time(gamma - mono_trace, disc.dt)
        increment = max(l2_time(r1_next - r1, disc.dt), l2_time(r2_next - r2, disc.dt))
        rec.add(k, fe, te)
        traces.append(TimeTrace(gamma, disc.dt))
        r1, r2 = r1_next, r2_next
        if rec.should_stop(fe, increment):
            converged = True
            break

    return WrResult(
        method=Method.SWR_OPTIMIZED,
        history=rec.history(),
        converged=converged,
        iterations_run=len(rec.records),
        fields=(u1, u2),
        combined=combined,
        interface_traces=tuple(traces),
        reference=mono,
        reference_trace=TimeTrace(mono_trace, disc.dt),
    )


_DRIVERS = {
    Method.DNWR: dnwr_iterate,
    Method.NNWR: nnwr_iterate,
    Method.SWR_CLASSICAL: swr_classical_iterate,
    Method.SWR_OPTIMIZED: swr_optimized_iterate,
}


def run_method(
    problem: WaveProblem,
    disc: Discretization,
    cfg: WrConfig,
    reference: Optional[SpaceTimeField] = None,
) -> WrResult:
    """Dispatch to the driver named by cfg.method."""
    return _DRIVERS[cfg.method](problem, disc, cfg, reference=reference)
