"""Convergence sweeps of the relaxation weight and the window length.

Reproduces the two headline experiments on the benchmark problem: how the
interface relaxation weight changes the DNWR/NNWR contraction for a fixed
window, and how the sweep count at the optimal weight tracks the window
length (the finite-step law: one sweep per 2*min(a,b)/c of window for
DNWR, per 4*min(a,b)/c for NNWR, plus one).
"""

from waverelax import Method, WrConfig, dnwr_iterate, finite_step_bound, nnwr_iterate
from waverelax.benchmark import default_discretization, default_problem


def weight_sweep(method=Method.DNWR, thetas=(0.2, 0.4, 0.5, 0.6, 0.9), t_final=16.0):
    prob = default_problem()
    disc = default_discretization(t_final)
    driver = dnwr_iterate if method is Method.DNWR else nnwr_iterate
    print(f"{method.value} weight sweep, window {t_final}")
    for theta in thetas:
        cfg = WrConfig(method=method, theta=theta, max_iterations=10, tolerance=0.0)
        errs = driver(prob, disc, cfg).history.field_errors()
        trend = " ".join(f"{e:8.1e}" for e in errs)
        print(f"  theta={theta:4.2f}: {trend}")


def window_sweep(t_values=(4.0, 8.0, 12.0, 16.0)):
    prob = default_problem()
    print("sweeps to 1e-10 vs window length (measured <= bound)")
    for method, theta in ((Method.DNWR, 0.5), (Method.NNWR, 0.25)):
        driver = dnwr_iterate if method is Method.DNWR else nnwr_iterate
        for t_final in t_values:
            disc = default_discretization(t_final)
            cfg = WrConfig(method=method, theta=theta, max_iterations=12)
            res = driver(prob, disc, cfg)
            bound = finite_step_bound(method, prob.a, prob.b, prob.wave_speed, t_final)
            print(f"  {method.value} T={t_final:5.1f}: {res.iterations_to(1e-10)} <= {bound}")


def main():
    weight_sweep(Method.DNWR)
    weight_sweep(Method.NNWR, thetas=(0.1, 0.2, 0.25, 0.3))
    window_sweep()


if __name__ == "__main__":
    main()
