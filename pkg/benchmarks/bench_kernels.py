"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from polyfock import _pykernels, kernels
from polyfock.fock import TruncatedBasis
from polyfock.symbols import SymbolExpr
from polyfock.toeplitz import toeplitz_matrix, toeplitz_product

try:
    from polyfock import _ckernels
except ImportError:
    _ckernels = None


@contextmanager
def backend(mod):
    saved = kernels.radial_table, kernels.assemble
    kernels.radial_table, kernels.assemble = mod.radial_table, mod.assemble
    try:
        yield
    finally:
        kernels.radial_table, kernels.assemble = saved


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def cases(rng):
    r = np.sqrt(np.linspace(0, 700, 1024))
    dom, cod = TruncatedBasis(2, 80), TruncatedBasis(2, 120)
    R, A = 256, 512
    b_dom = rng.standard_normal((R, dom.size))
    b_cod = rng.standard_normal((R, cod.size))
    phi_hat = rng.standard_normal((R, A)) + 1j * rng.standard_normal((R, A))
    f = SymbolExpr.exponential(z=0.5)
    g = SymbolExpr.exponential(z=-0.5)
    q = SymbolExpr.exponential(z2=0.25)
    return {
        "radial_table R=1024 n=3 D=200": lambda m: m.radial_table(r, 3, 200),
        "assemble R=256 162x242": lambda m: m.assemble(b_cod, b_dom, cod.frequencies, dom.frequencies, phi_hat),
        "toeplitz_matrix exp(z^2/4) D=80": lambda m: toeplitz_matrix(q, TruncatedBasis(1, 80), TruncatedBasis(1, 120)),
        "toeplitz_product exp pair n=2 D=60": lambda m: toeplitz_product(f, g, 2, 1, 2, 60),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    mods = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'case':40s}" + "".join(f"{name:>12s}" for name, _ in mods) + ("     speedup" if len(mods) == 2 else ""))
    for label, fn in cases(np.random.default_rng(0)).items():
        times = []
        for _, mod in mods:
            with backend(mod):
                fn(mod)  # warm caches
                times.append(best(lambda: fn(mod), args.repeat))
        row = f"{label:40s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.2f}x"
        print(row)


if __name__ == "__main__":
    main()
