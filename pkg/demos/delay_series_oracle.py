"""The delay-operator view of the iteration, checked against the solver.

A DNWR sweep multiplies the interface error by a fixed delay polynomial;
its k-th power predicts the k-th interface iterate of the error equations
without running any PDE solve.  At unit CFL the match with the actual
driver is at roundoff level.
"""

from waverelax import (
    Method,
    SymbolSpec,
    WaveProblem,
    WrConfig,
    dnwr_iterate,
    kernel_closed_form,
    kernel_series,
    predict_trace,
    symbol_power,
)
from waverelax.benchmark import default_discretization
from waverelax.core import l2_time
from waverelax.waveform import poly_t2


def show_symbol(a=3, b=2, k=2, horizon=16):
    spec = SymbolSpec(Method.DNWR, 0.5, a, b, 1)
    poly = symbol_power(spec, k, horizon)
    print(f"DNWR symbol^{k} for lengths ({a}, {b}), horizon {horizon}:")
    for mn in sorted(poly.coeffs, key=poly.delay_of):
        print(f"  shift by {float(poly.delay_of(mn)):5.1f}  coefficient {poly.coeffs[mn]}")
    print(f"  -> no shift below {float(poly.min_delay())} = 2*{k}*min(a,b)")


def check_kernel(a=3.0, b=2.0, s=1.0):
    series = kernel_series(a, b, 1.0, 60.0)
    closed = kernel_closed_form(a, b, 1.0, s)
    print(f"kernel at s={s}: closed {closed.real:+.12f}, series {series.evaluate(s).real:+.12f}")


def oracle_vs_driver(k=2, t_final=16.0):
    prob = WaveProblem(x_left=-3.0, x_right=2.0, interface=0.0, wave_speed=1.0)
    disc = default_discretization(t_final)
    cfg = WrConfig(method=Method.DNWR, theta=0.5, max_iterations=k, tolerance=0.0)
    res = dnwr_iterate(prob, disc, cfg)
    spec = SymbolSpec(Method.DNWR, 0.5, prob.a, prob.b, prob.wave_speed)
    pred = predict_trace(spec, k, poly_t2, t_final, disc.dt)
    gap = l2_time(res.interface_traces[k - 1].values - pred.values, disc.dt)
    print(f"driver trace vs delay prediction after {k} sweeps: L2 gap {gap:.2e}")


def main():
    show_symbol()
    check_kernel()
    oracle_vs_driver()


if __name__ == "__main__":
    main()
