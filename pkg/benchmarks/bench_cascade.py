"""Benchmark the staircase-cascade kernel: compiled extension vs the numpy
fallback, on the workloads the spectrum pipeline actually runs.

    python benchmarks/bench_cascade.py

The compiled path wins big on single-energy deep staircases (pure Python
loop overhead dominates the fallback there) and by a solid factor on
vectorized spectra; FFT-bound propagation is not a kernel candidate and is
reported here only for context.
"""

import time

import numpy as np

from mwfpi._kernels import BACKEND, cascade_np

try:
    from mwfpi._kernels import _cascade

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False

from mwfpi.grid import build_grid
from mwfpi.model import ModelParams, make_scales
from mwfpi.potentials import cavity_potential
from mwfpi.propagator import evolve, suggest_dt
from mwfpi.wavepackets import gaussian_packet


def staircase(n_steps):
    params = make_scales(ModelParams()).reduce_params(ModelParams())
    from mwfpi.scattering import _staircase

    v, w, _ = _staircase(params, n_steps)
    b = 1.0 / (2.0 * params.mass)
    return v, w, b


def timeit(fn, *args, repeat=3):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    print(f"active backend: {BACKEND}")
    cases = [
        ("spectrum 2000 E x 2048 steps", np.linspace(0.01, 1.3, 2000), 2048),
        ("spectrum 200 E x 16384 steps", np.linspace(0.09, 0.11, 200), 16384),
        ("single E x 1048576 steps", np.array([0.1021]), 1048576),
    ]
    for label, energies, n_steps in cases:
        v, w, b = staircase(n_steps)
        t_np = timeit(cascade_np.cascade_chain, energies, v, w, b)
        line = f"{label:34s} numpy {t_np * 1e3:9.1f} ms"
        if HAVE_COMPILED:
            t_c = timeit(_cascade.cascade_chain, energies, v, w, b)
            line += f"   compiled {t_c * 1e3:9.1f} ms   speedup {t_np / t_c:6.1f}x"
        print(line)

    # context: the split-step propagator is FFT-bound, so it stays numpy/scipy
    params = make_scales(ModelParams()).reduce_params(ModelParams())
    r = params.with_(packet_momentum=0.8)
    grid = build_grid(-1500.0, 1500.0, 8192, hbar=1.0)
    pot = cavity_potential(r, grid)
    psi0 = gaussian_packet(r, grid)
    dt = suggest_dt(r, grid, pot)
    n = int(50.0 / dt)
    t0 = time.perf_counter()
    evolve(psi0, pot, r.mass, dt, 50.0)
    per_step = (time.perf_counter() - t0) / n
    print(f"{'split-step (context, FFT-bound)':34s} {per_step * 1e6:9.0f} us/step "
          f"on 8192 points")


if __name__ == "__main__":
    main()
