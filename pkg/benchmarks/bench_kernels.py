"""Time the numba kernels against their numpy twins.

Run with ``python3 benchmarks/bench_kernels.py``.  Each kernel is called
once per backend before timing so that compilation is excluded, and the
two backends are checked to agree on the benchmark inputs.
"""
import argparse
import timeit

import numpy as np

from camoscat import _accel, kernels


def _inputs(n, n_points, n_vertices, seed=0):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(n, n))
    ax = 1 + rng.random((n, n))
    ay = 1 + rng.random((n, n))
    t = 2 * np.pi * np.arange(n_vertices) / n_vertices
    r = 0.3 + 0.05 * np.cos(5 * t)
    vx, vy = 0.5 + r * np.cos(t), 0.5 + r * np.sin(t)
    px, py = rng.random(n_points), rng.random(n_points)
    return {
        "cell_operator": lambda: kernels.cell_operator(u, ax, ay, 1 / n, 1 / n),
        "points_in_polygon": lambda: kernels.points_in_polygon(px, py, vx, vy),
        "polyline_is_simple": lambda: kernels.polyline_is_simple(vx, vy),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=512, help="cell grid size per axis")
    parser.add_argument("--points", type=int, default=200_000, help="query points for the polygon test")
    parser.add_argument("--vertices", type=int, default=256, help="polygon vertices")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    calls = _inputs(args.n, args.points, args.vertices)
    previous = _accel.backend()
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}")
    try:
        for name, call in calls.items():
            best, results = {}, {}
            for backend in ("numpy", "numba"):
                _accel.set_backend(backend)
                results[backend] = call()
                best[backend] = min(timeit.repeat(call, number=1, repeat=args.repeat))
            if not np.array_equal(results["numpy"], results["numba"]):
                diff = np.max(np.abs(np.asarray(results["numpy"], float) - np.asarray(results["numba"], float)))
                if diff > 1e-12:
                    raise SystemExit(f"{name}: backends disagree by {diff:.3e}")
            print(f"{name:<20}{1e3 * best['numpy']:>12.2f}{1e3 * best['numba']:>12.2f}"
                  f"{best['numpy'] / best['numba']:>10.1f}")
    finally:
        _accel.set_backend(previous)


if __name__ == "__main__":
    main()
