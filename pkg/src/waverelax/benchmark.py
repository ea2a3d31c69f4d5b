"""The standard benchmark problem used across the convergence studies.

Zero initial displacement, initial velocity x*exp(-x), unit wave speed, and
tangent-ramp Dirichlet data g(t) = v0(endpoint)*t at both physical
boundaries.  The default domain is (-3, 2) split at 0, so the subdomain
lengths differ and the finite-step behaviour is nontrivial.
"""

from __future__ import annotations

import numpy as np

from .core import Discretization, WaveProblem

__all__ = ["velocity_kick", "default_problem", "default_discretization"]


def velocity_kick(x: np.ndarray) -> np.ndarray:
    """Initial velocity profile x*exp(-x)."""
    x = np.asarray(x, dtype=float)
    return x * np.exp(-x)


def default_problem(
    x_left: float = -3.0,
    x_right: float = 2.0,
    interface: float = 0.0,
    wave_speed: float = 1.0,
) -> WaveProblem:
    gl = float(velocity_kick(np.asarray(x_left)))
    gr = float(velocity_kick(np.asarray(x_right)))
    return WaveProblem(
        x_left=x_left,
        x_right=x_right,
        interface=interface,
        wave_speed=wave_speed,
        u0=None,
        v0=velocity_kick,
        g_left=lambda t: gl * np.asarray(t, dtype=float),
        g_right=lambda t: gr * np.asarray(t, dtype=float),
        f=None,
    )


def default_discretization(
    t_final: float, dx: float = 0.02, dt: float = 0.02, wave_speed: float = 1.0
) -> Discretization:
    n_time = round(t_final / dt)
    if abs(n_time * dt - t_final) > 1e-9 * dt:
        raise ValueError(f"t_final={t_final} is not a multiple of dt={dt}")
    return Discretization.for_speed(dx=dx, dt=dt, n_time=n_time, wave_speed=wave_speed)
