"""Delay-series convergence theory for the two-subdomain relaxations.

Seen through the Laplace transform, one DNWR or NNWR sweep multiplies the
interface error by a fixed symbol built from coth/tanh factors of the
subdomain travel times.  Expanding those factors into geometric series
turns the symbol into a finite sum of time shifts: a polynomial in delay
operators, with one monomial per pair (m, n) of round trips and delay
tau(m, n) = 2(a*m + b*n)/c.  Everything time-domain in this module goes
through that representation; no transform is ever inverted numerically.

The payoff is exactness: with theta = 1/2 (DNWR) or 1/4 (NNWR) the plain
scalar part of the symbol vanishes and its k-th power contains no delay
shorter than 2k*min(a,b)/c (respectively 4k*min(a,b)/c), so k sweeps
annihilate any initial guess on a window of that length, and one more
sweep finishes the solve.  Coefficients are kept as exact rationals for
those two weights so the cancellations can be asserted with zero
tolerance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Tuple, Union

import numpy as np

from .core import TimeTrace
from .waveform import Method

__all__ = [
    "DelayPolynomial",
    "SymbolSpec",
    "kernel_closed_form",
    "kernel_series",
    "symbol_power",
    "predict_trace",
    "finite_step_bound",
    "symmetric_rate",
    "series_tail_bound",
]

Rational = Union[int, Fraction]
Geometry = Union[int, float, Fraction]

_FLOAT_SLACK = 1e-12  # delay-vs-horizon comparison slack for float geometry


def _is_exact(*vals: Geometry) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


def _delay(a, b, c, m: int, n: int):
    if _is_exact(a, b, c):
        return Fraction(2) * (a * m + b * n) / c
    return 2.0 * (a * m + b * n) / c


@dataclass(frozen=True, eq=False)
class DelayPolynomial:
    """Finite sum of coefficients attached to delay monomials.

    ``coeffs`` maps (m, n) to the coefficient of the time shift by
    tau(m, n) = 2(a*m + b*n)/c; absent monomials have coefficient zero and
    every stored monomial satisfies tau <= horizon.  With rational geometry
    and weight the coefficients and the horizon comparison are exact.
    """

    a: Geometry
    b: Geometry
    c: Geometry
    horizon: Geometry
    coeffs: Dict[Tuple[int, int], Union[Fraction, float]]

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0 or self.c <= 0:
            raise ValueError("subdomain lengths and wave speed must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")

    @property
    def exact(self) -> bool:
        return _is_exact(self.a, self.b, self.c, self.horizon) and all(
            isinstance(v, (int, Fraction)) for v in self.coeffs.values()
        )

    def delay_of(self, monomial: Tuple[int, int]):
        m, n = monomial
        return _delay(self.a, self.b, self.c, m, n)

    def coefficient(self, monomial: Tuple[int, int]):
        return self.coeffs.get(monomial, Fraction(0) if self.exact else 0.0)

    def _fits(self, m: int, n: int) -> bool:
        tau = _delay(self.a, self.b, self.c, m, n)
        if _is_exact(self.a, self.b, self.c, self.horizon):
            return tau <= self.horizon
        return float(tau) <= float(self.horizon) + _FLOAT_SLACK

    def multiply(self, other: "DelayPolynomial") -> "DelayPolynomial":
        """Product, truncated to the horizon.

        Delays only accumulate under multiplication, so dropping monomials
        past the horizon after every product loses nothing that a later
        evaluation at delays within the horizon could see.
        """
        if (self.a, self.b, self.c) != (other.a, other.b, other.c):
            raise ValueError("delay polynomials live on different geometries")
        out: Dict[Tuple[int, int], Union[Fraction, float]] = {}
        for (m1, n1), c1 in self.coeffs.items():
            for (m2, n2), c2 in other.coeffs.items():
                m, n = m1 + m2, n1 + n2
                if not self._fits(m, n):
                    continue
                out[(m, n)] = out.get((m, n), 0) + c1 * c2
        out = {k: v for k, v in out.items() if v != 0}
        return DelayPolynomial(self.a, self.b, self.c, min(self.horizon, other.horizon), out)

    def scale(self, factor) -> "DelayPolynomial":
        return DelayPolynomial(
            self.a, self.b, self.c, self.horizon,
            {k: factor * v for k, v in self.coeffs.items() if factor * v != 0},
        )

    def add(self, other: "DelayPolynomial") -> "DelayPolynomial":
        if (self.a, self.b, self.c) != (other.a, other.b, other.c):
            raise ValueError("delay polynomials live on different geometries")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        out = {k: v for k, v in out.items() if v != 0}
        return DelayPolynomial(self.a, self.b, self.c, min(self.horizon, other.horizon), out)

    def add_constant(self, value) -> "DelayPolynomial":
        out = dict(self.coeffs)
        out[(0, 0)] = out.get((0, 0), 0) + value
        if out[(0, 0)] == 0:
            del out[(0, 0)]
        return DelayPolynomial(self.a, self.b, self.c, self.horizon, out)

    def power(self, k: int) -> "DelayPolynomial":
        if k < 1:
            raise ValueError("power must be at least 1")
        result = self
        for _ in range(k - 1):
            result = result.multiply(self)
        return result

    def min_delay(self):
        """Smallest delay carrying a nonzero coefficient (None if empty)."""
        if not self.coeffs:
            return None
        return min(self.delay_of(mn) for mn in self.coeffs)

    def evaluate(self, s: complex) -> complex:
        """Value of sum coeff * exp(-tau*s) at one transform variable."""
        return sum(
            complex(v) * cmath.exp(-float(self.delay_of(mn)) * s)
            for mn, v in self.coeffs.items()
        )

    def sample(self, h0: Callable[[np.ndarray], np.ndarray], times: np.ndarray) -> np.ndarray:
        """Apply the delay operators to h0 and sample on a time grid.

        A shift by tau contributes coeff * h0(t - tau) wherever t >= tau
        (the shifted signal switches on at t = tau) and nothing earlier.
        """
        times = np.asarray(times, dtype=float)
        out = np.zeros_like(times)
        for mn, v in self.coeffs.items():
            tau = float(self.delay_of(mn))
            active = times >= tau - _FLOAT_SLACK
            shifted = np.where(active, times - tau, 0.0)
            out += float(v) * np.where(active, h0(shifted), 0.0)
        return out


@dataclass(frozen=True)
class SymbolSpec:
    """Which iteration symbol to build: method, weight, geometry."""

    method: Method
    theta: float
    a: Geometry
    b: Geometry
    c: Geometry = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must lie in (0, 1]")
        if self.a <= 0 or self.b <= 0 or self.c <= 0:
            raise ValueError("geometry must be positive")
        if self.method not in (Method.DNWR, Method.NNWR):
            raise ValueError("iteration symbols exist for DNWR and NNWR only")


def kernel_closed_form(a: float, b: float, c: float, s: complex) -> complex:
    """coth(a*s/c) * tanh(b*s/c) - 1, stable for large Re(s).

    Written through alpha = coth - 1 and beta = 1 - tanh, both of which
    decay like exp(-2*Re) instead of overflowing, so the product never
    forms huge intermediates and the cancellation at a = b happens between
    small numbers.
    """
    if a <= 0 or b <= 0 or c <= 0:
        raise ValueError("lengths and wave speed must be positive")
    s = complex(s)
    if s.real <= 0:
        raise ValueError("the kernel is defined for Re(s) > 0 only")
    xa = cmath.exp(-2.0 * a * s / c)
    xb = cmath.exp(-2.0 * b * s / c)
    alpha = 2.0 * xa / (1.0 - xa)  # coth(as/c) - 1
    beta = 2.0 * xb / (1.0 + xb)   # 1 - tanh(bs/c)
    return alpha - beta - alpha * beta


def kernel_series(a: Geometry, b: Geometry, c: Geometry, horizon: Geometry) -> DelayPolynomial:
    """Delay-series expansion of the kernel, truncated to the horizon.

    Coefficients: +2 on (m, 0) for m >= 1, -2*(-1)^(n-1) on (0, n) for
    n >= 1, and -4*(-1)^(n-1) on the cross terms (m, n) with m, n >= 1.
    The scalar term is zero.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    probe = DelayPolynomial(a, b, c, horizon, {})
    exact = _is_exact(a, b, c, horizon)
    two = Fraction(2) if exact else 2.0
    four = Fraction(4) if exact else 4.0
    coeffs: Dict[Tuple[int, int], Union[Fraction, float]] = {}
    m = 1
    while probe._fits(m, 0):
        coeffs[(m, 0)] = two
        m += 1
    m_max = m - 1
    n = 1
    while probe._fits(0, n):
        coeffs[(0, n)] = -two * (-1) ** (n - 1)
        n += 1
    n_max = n - 1
    for m in range(1, m_max + 1):
        for n in range(1, n_max + 1):
            if probe._fits(m, n):
                coeffs[(m, n)] = -four * (-1) ** (n - 1)
    return DelayPolynomial(a, b, c, horizon, coeffs)


def _swap_roles(poly: DelayPolynomial) -> DelayPolynomial:
    """Reindex a series built on (b, a) geometry back onto (a, b)."""
    return DelayPolynomial(
        poly.b, poly.a, poly.c, poly.horizon,
        {(n, m): v for (m, n), v in poly.coeffs.items()},
    )


def _theta_value(theta: float, exact: bool):
    if exact and theta == 0.5:
        return Fraction(1, 2)
    if exact and theta == 0.25:
        return Fraction(1, 4)
    return theta


def symbol_power(spec: SymbolSpec, k: int, horizon: Geometry) -> DelayPolynomial:
    """k-th power of the per-sweep error symbol as a delay polynomial.

    DNWR: (1 - 2*theta) plus -theta times the kernel series.
    NNWR: (1 - 4*theta) plus -theta times the sum of the kernel series and
    its mirror with the subdomain roles swapped.
    """
    if k < 1:
        raise ValueError("power must be at least 1")
    exact = _is_exact(spec.a, spec.b, spec.c, horizon) and spec.theta in (0.5, 0.25)
    th = _theta_value(spec.theta, exact)
    one = Fraction(1) if exact else 1.0
    if spec.method is Method.DNWR:
        base = kernel_series(spec.a, spec.b, spec.c, horizon).scale(-th)
        base = base.add_constant(one - 2 * th)
    else:
        direct = kernel_series(spec.a, spec.b, spec.c, horizon)
        mirrored = _swap_roles(kernel_series(spec.b, spec.a, spec.c, horizon))
        base = direct.add(mirrored).scale(-th).add_constant(one - 4 * th)
    return base.power(k)


def predict_trace(
    spec: SymbolSpec,
    k: int,
    h0: Union[Callable[[np.ndarray], np.ndarray], TimeTrace],
    horizon: Geometry,
    dt: float,
) -> TimeTrace:
    """Interface trace after k sweeps, predicted by the delay algebra.

    ``h0`` is the initial interface guess, either a closed-form function of
    t (extended by zero for negative arguments) or an already sampled
    trace.  Sampled traces require the delays to land on the time grid, up
    to roundoff; between-grid delays fall back to linear interpolation.
    """
    poly = symbol_power(spec, k, horizon)
    n_time = round(float(horizon) / dt)
    times = dt * np.arange(n_time + 1)
    if isinstance(h0, TimeTrace):
        vals = h0.values
        out = np.zeros_like(times)
        for mn, v in poly.coeffs.items():
            tau = float(poly.delay_of(mn))
            shift = tau / dt
            j = int(round(shift))
            if abs(shift - j) <= 1e-9:
                if j <= n_time:
                    out[j:] += float(v) * vals[: n_time + 1 - j]
            else:
                shifted_t = times - tau
                interp = np.interp(shifted_t, times[: vals.size], vals, left=0.0)
                out += float(v) * np.where(shifted_t >= -_FLOAT_SLACK, interp, 0.0)
        return TimeTrace(out, dt)
    return TimeTrace(poly.sample(h0, times), dt)


def finite_step_bound(method: Method, a: float, b: float, c: float, t_final: float) -> int:
    """Sweeps guaranteed to reach the solution at the optimal weight.

    k sweeps cancel every delay monomial active on the window once
    t_final <= 2*k*min(a,b)/c (DNWR) or 4*k*min(a,b)/c (NNWR), and one
    further sweep then solves exactly: ceil(.) + 1.
    """
    if a <= 0 or b <= 0 or c <= 0 or t_final <= 0:
        raise ValueError("arguments must be positive")
    per = (2.0 if method is Method.DNWR else 4.0) * min(a, b) / c
    if method not in (Method.DNWR, Method.NNWR):
        raise ValueError("finite-step bounds exist for DNWR and NNWR only")
    return math.ceil(t_final / per - 1e-12) + 1


def symmetric_rate(method: Method, theta: float) -> float:
    """Per-sweep contraction factor for equal subdomain lengths."""
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    if method is Method.DNWR:
        return abs(1.0 - 2.0 * theta)
    if method is Method.NNWR:
        return abs(1.0 - 4.0 * theta)
    raise ValueError("symmetric rates exist for DNWR and NNWR only")


def series_tail_bound(a: float, b: float, c: float, horizon: float, s: complex) -> float:
    """Upper bound on |closed form - truncated series| at one s.

    Sums the absolute values of every dropped monomial' s evaluation using
    geometric tails: with r = exp(-2*Re(s)*len/c) per subdomain length, the
    pure tails are explicit geometric series and the cross tail is summed
    row by row until its own geometric closure.
    """
    re = complex(s).real
    if re <= 0:
        raise ValueError("tail bounds hold for Re(s) > 0 only")
    a, b, c, horizon = float(a), float(b), float(c), float(horizon)
    ra = math.exp(-2.0 * a * re / c)
    rb = math.exp(-2.0 * b * re / c)

    def tail_geometric(r: float, first: int) -> float:
        return r**first / (1.0 - r)

    m_keep = math.floor(horizon * c / (2.0 * a) + 1e-12)
    n_keep = math.floor(horizon * c / (2.0 * b) + 1e-12)
    bound = 2.0 * tail_geometric(ra, m_keep + 1) + 2.0 * tail_geometric(rb, n_keep + 1)
    # cross terms: for each m, the n that fall past the horizon
    m = 1
    while True:
        if 2.0 * (a * m + b) / c > horizon + 1e-12:
            # every n >= 1 is dropped from row m on; close the remaining rows
            bound += 4.0 * tail_geometric(ra, m) * tail_geometric(rb, 1)
            break
        n_first = math.floor((horizon * c / 2.0 - a * m) / b + 1e-12) + 1
        bound += 4.0 * ra**m * tail_geometric(rb, n_first)
        m += 1
    return bound
