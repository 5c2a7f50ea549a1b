"""Benchmark the compiled iteration core against the pure-Python twin.

Usage:  python benchmarks/bench_engine.py [--horizon N]

Runs identical seeded workloads on every available backend (compiled, pure,
plus the generic object-stepping loop) and reports steps/second.  The
workloads mirror the expensive acceptance settings: a noisy scalar run, a
payoff-based bimatrix run, and a projected two-simplex run.
"""

import argparse
import time

import numpy as np

import robusteq as rq
from robusteq._engine import available_backends
from robusteq.dynamics import RunConfig, constant_step


def workloads(horizon):
    lin = rq.make_linear_interval()
    ent1 = rq.RegularizerSpec.uniform("entropic", 1)
    coord = rq.make_bimatrix(np.eye(2), np.eye(2))
    ent2 = rq.RegularizerSpec.uniform("entropic", 2)
    quad2 = rq.RegularizerSpec.uniform("quadratic", 2)
    cfg1 = RunConfig(algorithm="ftrl", step=constant_step(0.05), horizon=horizon,
                     init=("dual", [3.0]), seed=11, thinning=0, x_ref=[1.0])
    cfg2 = RunConfig(algorithm="ftrl", step=constant_step(0.05), horizon=horizon,
                     init=("dual", [5.0, 0.0, 5.0, 0.0]), seed=12, thinning=0,
                     x_ref=[1.0, 0.0, 1.0, 0.0])
    return [
        ("interval+gaussian", lin, ent1, rq.sfo_gaussian(1.0), cfg1),
        ("bimatrix+spsa", coord, ent2, rq.spsa(coord.domain, delta0=0.5, rho=0.25), cfg2),
        ("bimatrix+gaussian+projection", coord, quad2, rq.sfo_gaussian(1.0), cfg2),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--horizon", type=int, default=200_000)
    args = ap.parse_args()
    backends = available_backends() + ["generic"]
    print(f"backends: {', '.join(backends)}   horizon: {args.horizon}")
    for name, game, reg, oracle, cfg in workloads(args.horizon):
        print(f"\n{name}")
        results = {}
        reference = None
        for backend in backends:
            h = cfg.horizon if backend != "generic" else max(cfg.horizon // 20, 1)
            c = cfg if h == cfg.horizon else cfg.__class__(**{**cfg.__dict__, "horizon": h})
            t0 = time.perf_counter()
            traj = rq.run(game, reg, game.domain, oracle, c, backend=backend)
            dt = time.perf_counter() - t0
            results[backend] = h / dt
            if backend in ("compiled", "pure"):
                if reference is None:
                    reference = traj.final_y
                else:
                    match = np.array_equal(reference, traj.final_y)
                    print(f"  bit-identical across kernels: {match}")
            print(f"  {backend:10s} {h / dt: >12.0f} steps/s")
        if "compiled" in results and "pure" in results:
            print(f"  speedup compiled/pure: {results['compiled'] / results['pure']:.1f}x")


if __name__ == "__main__":
    main()
