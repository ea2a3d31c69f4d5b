"""Leapfrog solver for one interval with exchangeable boundary conditions.

The same kernel serves the single-domain reference solve and every
subdomain solve of the relaxation drivers (Dirichlet, Neumann, correction,
and absorbing subproblems).  The centered interior update is

    u_j^{n+1} = 2 u_j^n - u_j^{n-1} + lam^2 (u_{j+1}^n - 2 u_j^n + u_{j-1}^n)
                + dt^2 f(x_j, t_n)

with lam = c*dt/dx.  Boundary nodes are closed with the prescribed trace
(Dirichlet), with a ghost node one cell outside along the outward normal
(Neumann), or with a one-sided-in-space, centered-in-time discretization of
(d/dn + (1/c) d/dt) u = r (absorbing), the ghost eliminated.

Flux extraction is the exact inverse of the ghost construction: the virtual
neighbour a boundary node would have needed for the interior stencil to
hold is reconstructed from the field, and the centered difference against
the interior neighbour is the outward normal derivative.  Feeding that
trace back into a Neumann solve with the same data reproduces the original
field to roundoff, which is what makes the coupled fixed point of the
relaxation drivers identical to the single-domain solve.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .core import (
    Discretization,
    ScalarFunc,
    SpaceTimeField,
    SpaceTimeFunc,
    StabilityError,
    TimeTrace,
    sample,
)

__all__ = [
    "Side",
    "StartMode",
    "FluxMode",
    "DirichletTrace",
    "NeumannTrace",
    "AbsorbingTrace",
    "SubdomainProblem",
    "solve",
    "first_step",
    "extract_flux",
]


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class StartMode(enum.Enum):
    # TAYLOR: second-order Taylor start, works with sources.
    # EXACT_DALEMBERT: traveling-wave start, exact at lam=1, source-free only.
    TAYLOR = "taylor"
    EXACT_DALEMBERT = "exact_dalembert"


class FluxMode(enum.Enum):
    SCHEME_CONSISTENT = "scheme_consistent"
    ONE_SIDED = "one_sided"


@dataclass(frozen=True)
class DirichletTrace:
    """Prescribed values at an end node."""

    trace: TimeTrace


@dataclass(frozen=True)
class NeumannTrace:
    """Prescribed outward normal derivative at an end node."""

    trace: TimeTrace


@dataclass(frozen=True)
class AbsorbingTrace:
    """Prescribed value of (d/dn + (1/c) d/dt) u at an end node."""

    trace: TimeTrace


BoundaryCondition = object  # one of the three trace wrappers above


@dataclass(frozen=True, eq=False)
class SubdomainProblem:
    """One interval solve: geometry, data, boundary conditions, grid.

    ``grid_anchor`` pins the node lattice: nodes sit at
    ``grid_anchor + j*dx``.  Subdomain solves that share an anchor with the
    single-domain reference produce bitwise-identical coordinates, which
    keeps fixed-point comparisons at roundoff level.  The private cache
    holds start rows that depend only on the initial data, so rebinding
    boundary conditions with ``with_bcs`` reuses them across iterations.
    """

    x_left: float
    x_right: float
    wave_speed: float
    disc: Discretization
    left_bc: BoundaryCondition
    right_bc: BoundaryCondition
    start_mode: StartMode = StartMode.TAYLOR
    u0: Optional[ScalarFunc] = None
    v0: Optional[ScalarFunc] = None
    f: Optional[SpaceTimeFunc] = None
    grid_anchor: Optional[float] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.x_right <= self.x_left:
            raise ValueError("empty interval")
        if self.wave_speed <= 0:
            raise ValueError("wave speed must be positive")
        if self.disc.lam > 1.0 + 1e-12:
            raise StabilityError(f"CFL number {self.disc.lam} exceeds 1")
        if self.start_mode is StartMode.EXACT_DALEMBERT and self.f is not None:
            raise ValueError("the traveling-wave start requires a zero source")
        for bc in (self.left_bc, self.right_bc):
            if bc.trace.values.size != self.disc.n_time + 1:
                raise ValueError("boundary trace length does not match the time window")

    @property
    def n_nodes(self) -> int:
        n = round((self.x_right - self.x_left) / self.disc.dx)
        if abs((self.x_right - self.x_left) - n * self.disc.dx) > 1e-9 * self.disc.dx:
            raise ValueError("interval length is not a multiple of dx")
        return n + 1

    def x_nodes(self) -> np.ndarray:
        dx = self.disc.dx
        if self.grid_anchor is None:
            return self.x_left + dx * np.arange(self.n_nodes)
        j0 = round((self.x_left - self.grid_anchor) / dx)
        if abs(self.grid_anchor + j0 * dx - self.x_left) > 1e-9 * dx:
            raise ValueError("interval ends do not lie on the anchored lattice")
        return self.grid_anchor + dx * (j0 + np.arange(self.n_nodes))

    def with_bcs(self, left_bc=None, right_bc=None) -> "SubdomainProblem":
        """Copy with new boundary conditions, sharing the start-row cache."""
        return replace(
            self,
            left_bc=self.left_bc if left_bc is None else left_bc,
            right_bc=self.right_bc if right_bc is None else right_bc,
        )


def _quad_v0(v0: ScalarFunc, lo: float, hi: float) -> float:
    # the interval spans two cells; scipy may warn that 1e-14 cannot be
    # certified even though the result is accurate to roundoff
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(v0, lo, hi, epsabs=1e-14, epsrel=1e-11)
    return val


def _free_space_value(p: SubdomainProblem, x: float) -> float:
    """Traveling-wave solution value at (x, dt) from the initial data alone."""
    c, dt = p.wave_speed, p.disc.dt
    out = 0.0
    if p.u0 is not None:
        out += 0.5 * (float(p.u0(np.asarray(x + c * dt))) + float(p.u0(np.asarray(x - c * dt))))
    if p.v0 is not None:
        out += _quad_v0(p.v0, x - c * dt, x + c * dt) / (2.0 * c)
    return out


def _free_space_row(p: SubdomainProblem) -> np.ndarray:
    key = "free_space_row"
    if key not in p._cache:
        x = p.x_nodes()
        row = np.zeros_like(x)
        c, dt = p.wave_speed, p.disc.dt
        if p.u0 is not None:
            row += 0.5 * (sample(p.u0, x + c * dt) + sample(p.u0, x - c * dt))
        if p.v0 is not None:
            row += np.array([_quad_v0(p.v0, xj - c * dt, xj + c * dt) for xj in x]) / (2.0 * c)
        row.flags.writeable = False
        p._cache[key] = row
    return p._cache[key]


def _initial_rows(p: SubdomainProblem) -> tuple:
    """(sampled u0 row, sampled v0 row), cached on the problem."""
    key = "initial_rows"
    if key not in p._cache:
        x = p.x_nodes()
        p._cache[key] = (sample(p.u0, x), sample(p.v0, x))
    return p._cache[key]


def _outward_u0_slope(p: SubdomainProblem, x_b: float, sigma: float) -> float:
    """Centered outward derivative of u0 at a boundary node.

    Uses the data function one cell outside the interval, which the
    traveling-wave start already requires to be available.
    """
    if p.u0 is None:
        return 0.0
    dx = p.disc.dx
    return sigma * (float(p.u0(np.asarray(x_b + dx))) - float(p.u0(np.asarray(x_b - dx)))) / (2.0 * dx)


def _source_row(p: SubdomainProblem, x: np.ndarray, t: float) -> Optional[np.ndarray]:
    if p.f is None:
        return None
    return np.asarray(p.f(x, t), dtype=float)


def _bc_sides(p: SubdomainProblem):
    # (boundary condition, boundary index, inner index, outward sign)
    return ((p.left_bc, 0, 1, -1.0), (p.right_bc, -1, -2, 1.0))


def first_step(p: SubdomainProblem) -> np.ndarray:
    """Level-1 row of the solve, from the initial data and the level-0 BCs.

    TAYLOR:  u^1 = u0 + dt v0 + (dt^2/2) (c^2 D2 u0 + f(.,0)) with D2 the
    centered second difference of the sampled u0; a Neumann or absorbing
    boundary node takes its ghost from the prescribed data at level 0, a
    Dirichlet node takes the trace at level 1.

    EXACT_DALEMBERT (zero source only):  interior nodes take the
    traveling-wave value from the initial data, which is exact for the true
    solution whenever lam <= 1; Dirichlet nodes take the trace, and Neumann
    or absorbing nodes add lam^2*dx times the defect between the prescribed
    level-0 data and the value consistent with the initial data, the step
    the ghost update would have produced.
    """
    disc = p.disc
    dx, dt, lam = disc.dx, disc.dt, disc.lam
    c = p.wave_speed
    x = p.x_nodes()
    u0_row, v0_row = _initial_rows(p)

    if p.start_mode is StartMode.EXACT_DALEMBERT:
        row = _free_space_row(p).copy()
        for bc, jb, ji, sigma in _bc_sides(p):
            data = bc.trace.values
            if isinstance(bc, DirichletTrace):
                row[jb] = data[1]
            elif isinstance(bc, NeumannTrace):
                q_hat = _outward_u0_slope(p, x[jb], sigma)
                row[jb] += lam * lam * dx * (data[0] - q_hat)
            elif isinstance(bc, AbsorbingTrace):
                r_hat = _outward_u0_slope(p, x[jb], sigma) + v0_row[jb] / c
                row[jb] += lam * lam * dx * (data[0] - r_hat)
            else:
                raise TypeError(f"unknown boundary condition {bc!r}")
        return row

    # Taylor start
    row = u0_row + dt * v0_row
    f0 = _source_row(p, x, 0.0)
    d2 = np.zeros_like(row)
    d2[1:-1] = u0_row[2:] - 2.0 * u0_row[1:-1] + u0_row[:-2]
    row[1:-1] += 0.5 * lam * lam * d2[1:-1]
    if f0 is not None:
        row[1:-1] += 0.5 * dt * dt * f0[1:-1]
    for bc, jb, ji, sigma in _bc_sides(p):
        data = bc.trace.values
        if isinstance(bc, DirichletTrace):
            row[jb] = data[1]
            continue
        if isinstance(bc, NeumannTrace):
            q0 = data[0]
        elif isinstance(bc, AbsorbingTrace):
            # at t=0 the time part of the absorbing operator is v0/c
            q0 = data[0] - v0_row[jb] / c
        else:
            raise TypeError(f"unknown boundary condition {bc!r}")
        row[jb] = u0_row[jb] + dt * v0_row[jb] + lam * lam * (
            (u0_row[ji] - u0_row[jb]) + dx * q0
        )
        if f0 is not None:
            row[jb] += 0.5 * dt * dt * f0[jb]
    return row


def solve(p: SubdomainProblem) -> SpaceTimeField:
    """Run the leapfrog over the whole window and return the field."""
    disc = p.disc
    dx, dt, lam, N = disc.dx, disc.dt, disc.lam, disc.n_time
    if lam > 1.0 + 1e-12:
        raise StabilityError(f"CFL number {lam} exceeds 1")
    if p.n_nodes < 3:
        raise ValueError("need at least 3 nodes per interval")
    x = p.x_nodes()
    lam2 = lam * lam

    u = np.zeros((N + 1, p.n_nodes))
    u[0], _ = _initial_rows(p)
    u[1] = first_step(p)

    for n in range(1, N):
        fn = _source_row(p, x, n * dt)
        u[n + 1, 1:-1] = (
            2.0 * u[n, 1:-1]
            - u[n - 1, 1:-1]
            + lam2 * (u[n, 2:] - 2.0 * u[n, 1:-1] + u[n, :-2])
        )
        if fn is not None:
            u[n + 1, 1:-1] += dt * dt * fn[1:-1]
        for bc, jb, ji, sigma in _bc_sides(p):
            data = bc.trace.values
            if isinstance(bc, DirichletTrace):
                u[n + 1, jb] = data[n + 1]
            elif isinstance(bc, NeumannTrace):
                # ghost one cell outside along the outward normal; grouped as
                # differences of neighbours to keep the cancellation exact
                u[n + 1, jb] = (
                    2.0 * u[n, jb]
                    - u[n - 1, jb]
                    + 2.0 * lam2 * ((u[n, ji] - u[n, jb]) + dx * data[n])
                )
                if fn is not None:
                    u[n + 1, jb] += dt * dt * fn[jb]
            elif isinstance(bc, AbsorbingTrace):
                rhs = 2.0 * (
                    u[n, jb] + lam2 * ((u[n, ji] - u[n, jb]) + dx * data[n])
                ) - (1.0 - lam) * u[n - 1, jb]
                if fn is not None:
                    rhs += dt * dt * fn[jb]
                u[n + 1, jb] = rhs / (1.0 + lam)
            else:
                raise TypeError(f"unknown boundary condition {bc!r}")

    return SpaceTimeField(u, x_left=float(x[0]), dx=dx, dt=dt, problem=p)


def extract_flux(u: SpaceTimeField, side: Side, mode: FluxMode = FluxMode.SCHEME_CONSISTENT) -> TimeTrace:
    """Outward normal derivative trace of a field at one end.

    SCHEME_CONSISTENT reconstructs, level by level, the ghost value the
    interior stencil written at the boundary node would have needed, and
    returns the centered difference against the inner neighbour.  Level 0
    inverts the first-step relation of the field's start mode instead of
    the time stencil, and the final level is extrapolated from its
    predecessor (the partner solve never consumes it).

    ONE_SIDED is the plain second-order one-sided difference at every
    level, kept to show the drivers' conclusions do not hinge on the
    transmission stencil.
    """
    if u.n_nodes < 3:
        raise ValueError("field too narrow for flux extraction")
    jb, ji, ji2, sigma = (-1, -2, -3, 1.0) if side is Side.RIGHT else (0, 1, 2, -1.0)
    dx = u.dx
    vals = u.values

    if mode is FluxMode.ONE_SIDED:
        # with nodes ordered boundary, inner, next-inner this difference is
        # the outward derivative on either side, no sign flip needed
        g = (3.0 * vals[:, jb] - 4.0 * vals[:, ji] + vals[:, ji2]) / (2.0 * dx)
        return TimeTrace(g, u.dt)

    p: SubdomainProblem = u.problem
    if p is None:
        raise ValueError("scheme-consistent extraction needs the field's problem metadata")
    disc = p.disc
    dt, lam, N = disc.dt, disc.lam, disc.n_time
    lam2 = lam * lam
    c = p.wave_speed
    x_b = u.x_left + (u.n_nodes - 1) * dx if side is Side.RIGHT else u.x_left

    uG = vals[:, jb]
    ui = vals[:, ji]
    g = np.zeros(N + 1)

    # interior time levels: invert the leapfrog stencil at the boundary node;
    # the second time difference is formed from first differences so that
    # the large field values cancel exactly before any rounding
    d2 = (uG[2:] - uG[1:-1]) - (uG[1:-1] - uG[:-2])
    g[1:N] = d2 / (2.0 * dx * lam2) + (uG[1:-1] - ui[1:-1]) / dx
    if p.f is not None:
        tgrid = dt * np.arange(1, N)
        fvals = np.array([float(p.f(np.asarray(x_b), tn)) for tn in tgrid])
        g[1:N] -= (dt * dt / (2.0 * dx * lam2)) * fvals

    # level 0: invert the first-step relation of the start mode
    if p.start_mode is StartMode.EXACT_DALEMBERT:
        q_hat = _outward_u0_slope(p, x_b, sigma)
        g[0] = q_hat + (uG[1] - _free_space_value(p, x_b)) / (lam2 * dx)
    else:
        v0_b = 0.0 if p.v0 is None else float(p.v0(np.asarray(x_b)))
        g[0] = (uG[1] - uG[0] - dt * v0_b) / (lam2 * dx) + (uG[0] - ui[0]) / dx
        if p.f is not None:
            g[0] -= (dx / (2.0 * c * c)) * float(p.f(np.asarray(x_b), 0.0))

    g[N] = g[N - 1]
    return TimeTrace(g, u.dt)
