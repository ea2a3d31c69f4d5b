"""Problem descriptions, grids, space-time fields, traces, and norms.

Everything here is shared by the single-domain and subdomain solvers and by
the relaxation drivers.  All types are immutable after construction and all
operations are pure functions, so values can be handed freely to concurrent
workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "StabilityError",
    "WaveProblem",
    "Discretization",
    "SpaceTimeField",
    "TimeTrace",
    "IterationRecord",
    "IterationHistory",
    "l2_space",
    "l2_time",
    "error_linf_l2",
    "concatenate",
    "sample",
]

# Functions of one variable (x or t) and of (x, t).  They are expected to
# accept numpy arrays; scalar-only callables are handled by `sample`.
ScalarFunc = Callable[[np.ndarray], np.ndarray]
SpaceTimeFunc = Callable[[np.ndarray, float], np.ndarray]

_ALIGN_TOL = 1e-9  # relative slack for "lies on the grid" checks


class StabilityError(ValueError):
    """CFL number exceeds 1: the explicit scheme would be unstable."""


def sample(fn: Optional[ScalarFunc], x: np.ndarray) -> np.ndarray:
    """Evaluate ``fn`` on an array, treating None as the zero function."""
    x = np.asarray(x, dtype=float)
    if fn is None:
        return np.zeros_like(x)
    out = np.asarray(fn(x), dtype=float)
    if out.shape != x.shape:
        out = np.broadcast_to(out, x.shape).astype(float)
    return out


@dataclass(frozen=True)
class WaveProblem:
    """Continuous two-subdomain wave problem on (x_left, x_right).

    ``interface`` splits the domain into a left part of length ``a`` and a
    right part of length ``b``.  ``u0``/``v0`` are initial displacement and
    velocity, ``g_left``/``g_right`` Dirichlet boundary data in time, ``f``
    a source of (x, t).  ``None`` stands for the zero function.
    """

    x_left: float
    x_right: float
    interface: float
    wave_speed: float
    u0: Optional[ScalarFunc] = None
    v0: Optional[ScalarFunc] = None
    g_left: Optional[ScalarFunc] = None
    g_right: Optional[ScalarFunc] = None
    f: Optional[SpaceTimeFunc] = None

    def __post_init__(self) -> None:
        if not self.x_left < self.interface < self.x_right:
            raise ValueError(
                f"interface {self.interface} must lie strictly inside "
                f"({self.x_left}, {self.x_right})"
            )
        if self.wave_speed <= 0:
            raise ValueError("wave speed must be positive")

    @property
    def a(self) -> float:
        """Length of the left subdomain."""
        return self.interface - self.x_left

    @property
    def b(self) -> float:
        """Length of the right subdomain."""
        return self.x_right - self.interface


@dataclass(frozen=True)
class Discretization:
    """Uniform grid in space and time plus the CFL number lam = c*dt/dx."""

    dx: float
    dt: float
    n_time: int
    lam: float

    def __post_init__(self) -> None:
        if self.dx <= 0 or self.dt <= 0:
            raise ValueError("dx and dt must be positive")
        if self.n_time < 1:
            raise ValueError("n_time must be at least 1")
        if self.lam > 1.0 + 1e-12:
            raise StabilityError(f"CFL number {self.lam} exceeds 1")

    @classmethod
    def for_speed(cls, dx: float, dt: float, n_time: int, wave_speed: float) -> "Discretization":
        return cls(dx=dx, dt=dt, n_time=n_time, lam=wave_speed * dt / dx)

    @property
    def t_final(self) -> float:
        return self.n_time * self.dt

    def times(self) -> np.ndarray:
        return np.arange(self.n_time + 1) * self.dt


def _check_aligned(length: float, dx: float, what: str) -> int:
    n = round(length / dx)
    if n < 1 or abs(length - n * dx) > _ALIGN_TOL * max(dx, abs(length)):
        raise ValueError(f"{what} ({length}) is not a positive multiple of dx={dx}")
    return n


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Discrete solution on one interval over the whole time window.

    ``values[n, j]`` is the solution at time level n and grid node j, with
    node j at ``x_left + j*dx``.  ``problem`` optionally records the
    subdomain problem the field solves; the scheme-consistent flux
    extraction needs it.
    """

    values: np.ndarray
    x_left: float
    dx: float
    dt: float
    problem: object = None

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 2:
            raise ValueError("field values must be a (time, space) array with at least 2 levels and 2 nodes")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n_time(self) -> int:
        return self.values.shape[0] - 1

    @property
    def n_nodes(self) -> int:
        return self.values.shape[1]

    @property
    def x_right(self) -> float:
        return self.x_left + (self.n_nodes - 1) * self.dx

    def x_nodes(self) -> np.ndarray:
        return self.x_left + self.dx * np.arange(self.n_nodes)

    def times(self) -> np.ndarray:
        return np.arange(self.n_time + 1) * self.dt

    def node_index(self, x: float) -> int:
        j = round((x - self.x_left) / self.dx)
        if j < 0 or j >= self.n_nodes or abs(self.x_left + j * self.dx - x) > _ALIGN_TOL:
            raise ValueError(f"coordinate {x} is not a grid node of this field")
        return j

    def trace_at(self, x: float) -> "TimeTrace":
        """Time trace of the field at one grid node."""
        return TimeTrace(self.values[:, self.node_index(x)].copy(), self.dt)

    def restrict(self, x_left: float, x_right: float) -> "SpaceTimeField":
        """Restriction to a sub-interval whose ends are grid nodes."""
        j0 = self.node_index(x_left)
        j1 = self.node_index(x_right)
        if j1 <= j0:
            raise ValueError("empty restriction")
        return SpaceTimeField(
            self.values[:, j0 : j1 + 1].copy(),
            x_left=self.x_left + j0 * self.dx,
            dx=self.dx,
            dt=self.dt,
            problem=self.problem,
        )


@dataclass(frozen=True, eq=False)
class TimeTrace:
    """A function of time sampled at every time level of a window."""

    values: np.ndarray
    dt: float

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("trace must be a 1-d array with at least 2 levels")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n_time(self) -> int:
        return self.values.size - 1

    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.dt

    @classmethod
    def from_function(cls, fn: Optional[ScalarFunc], disc: Discretization) -> "TimeTrace":
        return cls(sample(fn, disc.times()), disc.dt)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    field_error: float
    trace_error: float
    wallclock_ms: float = 0.0


@dataclass(frozen=True)
class IterationHistory:
    """Per-iteration convergence record of a relaxation run."""

    records: tuple

    def __post_init__(self) -> None:
        idx = [r.iteration for r in self.records]
        if idx != list(range(1, len(idx) + 1)):
            raise ValueError("iteration indices must increase strictly from 1")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def field_errors(self) -> np.ndarray:
        return np.array([r.field_error for r in self.records])

    def trace_errors(self) -> np.ndarray:
        return np.array([r.trace_error for r in self.records])

    def iterations_to(self, tolerance: float) -> Optional[int]:
        """First iteration whose field error is at or below ``tolerance``."""
        for r in self.records:
            if r.field_error <= tolerance:
                return r.iteration
        return None


def l2_space(field_row: Sequence[float], dx: float) -> float:
    """Discrete L2 norm in space: sqrt(dx * sum v_j^2) over all nodes.

    Uniform weight at every node, boundary nodes included.
    """
    row = np.asarray(field_row, dtype=float)
    if row.size == 0:
        raise ValueError("empty field row")
    return float(np.sqrt(dx * np.sum(row * row)))


def l2_time(trace_values: Sequence[float], dt: float) -> float:
    """Discrete L2 norm in time with uniform weight dt."""
    v = np.asarray(trace_values, dtype=float)
    if v.size == 0:
        raise ValueError("empty trace")
    return float(np.sqrt(dt * np.sum(v * v)))


def _check_compatible(u: SpaceTimeField, v: SpaceTimeField) -> None:
    if u.values.shape != v.values.shape:
        raise ValueError(f"field shapes differ: {u.values.shape} vs {v.values.shape}")
    if abs(u.dx - v.dx) > _ALIGN_TOL * u.dx or abs(u.dt - v.dt) > _ALIGN_TOL * u.dt:
        raise ValueError("fields live on different grids")
    if abs(u.x_left - v.x_left) > _ALIGN_TOL * u.dx:
        raise ValueError("fields cover different intervals")


def error_linf_l2(u_ref: SpaceTimeField, u_approx: SpaceTimeField) -> float:
    """max over time levels of the spatial L2 norm of the difference."""
    _check_compatible(u_ref, u_approx)
    diff = u_ref.values - u_approx.values
    return float(np.max(np.sqrt(u_ref.dx * np.sum(diff * diff, axis=1))))


def concatenate(u1: SpaceTimeField, u2: SpaceTimeField) -> tuple:
    """Join two fields sharing an end node into one field over the union.

    The shared node takes u1's values (the Dirichlet-side owner).  Returns
    the joined field together with the largest disagreement between the two
    candidate interface values, as a diagnostic.
    """
    if abs(u1.x_right - u2.x_left) > _ALIGN_TOL * u1.dx:
        raise ValueError(
            f"fields do not meet: u1 ends at {u1.x_right}, u2 starts at {u2.x_left}"
        )
    if u1.values.shape[0] != u2.values.shape[0]:
        raise ValueError("fields have different numbers of time levels")
    if abs(u1.dx - u2.dx) > _ALIGN_TOL * u1.dx or abs(u1.dt - u2.dt) > _ALIGN_TOL * u1.dt:
        raise ValueError("fields live on different grids")
    discrepancy = float(np.max(np.abs(u1.values[:, -1] - u2.values[:, 0])))
    joined = np.hstack([u1.values, u2.values[:, 1:]])
    return (
        SpaceTimeField(joined, x_left=u1.x_left, dx=u1.dx, dt=u1.dt),
        discrepancy,
    )
