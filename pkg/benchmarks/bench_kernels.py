"""Compare the compiled and pure-numpy interface kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--cells 2000 --rows 1 --repeat 20]

Prints the time per sweep for both backends on identical random input and
checks that they agree. Setting ``SWEXNER_DISABLE_NUMBA=1`` makes the solver
itself use the numpy path; this script calls both directly.
"""

import argparse
import time

import numpy as np

from swexner import kernels
from swexner.bedload import BedloadLaw, FrictionLaw


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=2000)
    ap.add_argument("--rows", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    shape = (args.rows, args.cells + 2)
    h = rng.uniform(0.5, 2.0, shape)
    hn = h * rng.uniform(-2.0, 2.0, shape)
    ht = h * rng.uniform(-0.5, 0.5, shape)
    z = rng.uniform(0.0, 0.3, shape)
    laws = {"grass": BedloadLaw.grass(1.0, 3.0),
            "mpm-manning": BedloadLaw.shields("mpm", 0.047, 1e-3, 2.65, FrictionLaw("manning", 0.025))}

    print(f"{'law':<14}{'backend':<9}{'seconds/sweep':>15}{'Mcells/s':>10}")
    for name, law in laws.items():
        p = law.kernel_params()
        args_ = (h, hn, ht, z, p, 1.05, 1e-8)
        t_np = best_of(lambda: kernels.sweep_fluxes_numpy(*args_), args.repeat)
        print(f"{name:<14}{'numpy':<9}{t_np:>15.3e}{h.size / t_np / 1e6:>10.2f}")
        if not kernels.HAVE_NUMBA:
            print(f"{name:<14}{'numba':<9}{'unavailable':>15}")
            continue
        kernels.sweep_fluxes_numba(*args_)  # compile outside the timing
        t_nb = best_of(lambda: kernels.sweep_fluxes_numba(*args_), args.repeat)
        print(f"{name:<14}{'numba':<9}{t_nb:>15.3e}{h.size / t_nb / 1e6:>10.2f}   x{t_np / t_nb:.1f}")
        a = kernels.sweep_fluxes_numpy(*args_)
        b = kernels.sweep_fluxes_numba(*args_)
        err = max(float(np.max(np.abs(x - y))) for x, y in zip(a[:5], b[:5]))
        print(f"{'':<14}max |numpy - numba| = {err:.2e}")


if __name__ == "__main__":
    main()
