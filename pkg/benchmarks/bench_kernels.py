"""Benchmark the compiled kernel extension against the pure fallback.

Runs the per-element kernels on a batch of random polygons with both
backends in-process, then times a full assembly + solve in subprocesses
(backend selection happens at import time, so the end-to-end comparison
needs a fresh interpreter per backend).

Usage: python benchmarks/bench_kernels.py [n]
"""
import os
import subprocess
import sys
import time

import numpy as np


def random_polygons(count, rng):
    polys = []
    for _ in range(count):
        n = int(rng.integers(3, 9))
        ang = np.sort(rng.uniform(0, 2 * np.pi, n))
        rad = rng.uniform(0.4, 1.0, n)
        polys.append(np.column_stack([rad * np.cos(ang), rad * np.sin(ang)]))
    return polys


def bench_kernels(mod, polys, repeats=20):
    t0 = time.perf_counter()
    for _ in range(repeats):
        for v in polys:
            area, diam, grads, consts, values = mod.element_arrays(v)
            mod.consistency_matrix(area, np.asarray(grads))
            for kind in range(4):
                mod.stab_matrix(v, np.asarray(values), kind)
    return (time.perf_counter() - t0) / (repeats * len(polys))


def bench_assembly(n, force_pure):
    env = dict(os.environ)
    env["VEMCUT_PURE"] = "1" if force_pure else "0"
    code = (
        "import time, vemcut\n"
        f"mesh = vemcut.square_grid({n})\n"
        "t0 = time.perf_counter()\n"
        "sol = vemcut.SOLUTIONS['sinsin']\n"
        "u, rep, _ = vemcut.solve_poisson(mesh, sol.f, sol.u)\n"
        "print(vemcut.backend_name(), time.perf_counter() - t0)\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    name, seconds = out.stdout.split()
    return name, float(seconds)


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    from vemcut import _pycore

    try:
        from vemcut import _speedups
    except ImportError:
        _speedups = None

    rng = np.random.default_rng(0)
    polys = random_polygons(200, rng)
    t_pure = bench_kernels(_pycore, polys)
    print(f"element kernels, pure numpy:  {t_pure * 1e6:9.1f} us/element")
    if _speedups is not None:
        t_comp = bench_kernels(_speedups, polys)
        print(f"element kernels, compiled:    {t_comp * 1e6:9.1f} us/element")
        print(f"kernel speedup:               {t_pure / t_comp:9.1f}x")
    else:
        print("compiled extension not built; skipping its kernel numbers")

    name, secs = bench_assembly(n, force_pure=True)
    print(f"assemble+solve {n}x{n}, {name}: {secs:9.3f} s")
    if _speedups is not None:
        name, secs_c = bench_assembly(n, force_pure=False)
        print(f"assemble+solve {n}x{n}, {name}: {secs_c:9.3f} s")
        print(f"end-to-end speedup:           {secs / secs_c:9.1f}x")


if __name__ == "__main__":
    main()
