"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot paths (pairwise fundamental-solution accumulation and the
phased copy sum over a lattice) on sizes representative of the acceptance
runs.  The fallback can also be forced globally with
``SPHELAST_DISABLE_NUMBA=1``.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from sphelast import _kernels


def _time(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    n_nodes = 153  # degree-16 product rule
    rho = 0.1
    nodes = rng.normal(size=(n_nodes, 3))
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    targets = rho * nodes
    sources = rho * nodes
    weights = rng.uniform(0.5, 1.5, size=n_nodes) * rho * rho
    density = rng.normal(size=(n_nodes, 3))
    density_c = density.astype(complex)

    print(f"numba available: {_kernels._HAVE_NUMBA}")
    rows = []

    far = targets + np.array([5.0, 0, 0])
    if _kernels._HAVE_NUMBA:
        _kernels._kelvin_apply_numba(far, sources, weights, density, 1.0, 1.0)
        t = _time(
            _kernels._kelvin_apply_numba, far, sources, weights, density,
            1.0, 1.0,
        )
        rows.append(("kelvin_apply (153x153)", "numba", t))
    t = _time(
        _kernels._kelvin_apply_numpy, far, sources, weights, density, 1.0, 1.0
    )
    rows.append(("kelvin_apply (153x153)", "numpy", t))

    n_cut = 300
    if _kernels._HAVE_NUMBA:
        _kernels._kelvin_lattice_apply_numba(
            targets, sources, weights, density_c, 1.0, 1.0, 2.0, 2
        )
        t = _time(
            _kernels._kelvin_lattice_apply_numba, targets, sources, weights,
            density_c, 1.0, 1.0, 2.0, n_cut, repeat=2,
        )
        rows.append((f"kelvin_lattice_apply (n_cut={n_cut})", "numba", t))
    t = _time(
        _kernels._kelvin_lattice_apply_numpy, targets, sources, weights,
        density_c, 1.0, 1.0, 2.0, n_cut, repeat=2,
    )
    rows.append((f"kelvin_lattice_apply (n_cut={n_cut})", "numpy", t))

    print(f"{'kernel':<38} {'backend':<8} {'best time':>12}")
    for name, backend, t in rows:
        print(f"{name:<38} {backend:<8} {t * 1e3:>9.2f} ms")
    by_kernel = {}
    for name, backend, t in rows:
        by_kernel.setdefault(name, {})[backend] = t
    for name, d in by_kernel.items():
        if "numba" in d and "numpy" in d:
            print(f"{name}: numba speedup x{d['numpy'] / d['numba']:.1f}")


if __name__ == "__main__":
    main()
