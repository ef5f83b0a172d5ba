import json
import os
import subprocess
import sys

import numpy as np
import pytest

from polyfock import _pykernels, kernels
from polyfock.fock import TruncatedBasis
from polyfock.specialfn import complex_hermite, factorial

ck = pytest.importorskip("polyfock._ckernels")


def test_radial_table_oracle():
    r = np.array([0.0, 0.5, 1.7, 3.0])
    tab = _pykernels.radial_table(r, 3, 6)
    for q in range(3):
        for p in range(7):
            want = np.abs(complex_hermite(p, q, r)) / np.sqrt(factorial(p) * factorial(q))
            assert np.allclose(np.abs(tab[:, q, p]), want, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("n_q,p_max", [(1, 0), (1, 40), (3, 25), (4, 200)])
def test_radial_table_backends_agree(n_q, p_max):
    r = np.sqrt(np.linspace(0, 60, 97))
    a, b = _pykernels.radial_table(r, n_q, p_max), ck.radial_table(r, n_q, p_max)
    assert a.shape == b.shape == (r.size, n_q, p_max + 1)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def test_assemble_backends_agree(rng):
    R, A = 45, 32
    dom, cod = TruncatedBasis(2, 7), TruncatedBasis(3, 5)
    b_dom = np.ascontiguousarray(rng.standard_normal((R, dom.size)))
    b_cod = np.ascontiguousarray(rng.standard_normal((R, cod.size)))
    phi_hat = np.ascontiguousarray(rng.standard_normal((R, A)) + 1j * rng.standard_normal((R, A)))
    a = _pykernels.assemble(b_cod, b_dom, cod.frequencies, dom.frequencies, phi_hat)
    b = ck.assemble(b_cod, b_dom, cod.frequencies, dom.frequencies, phi_hat)
    # direct definition M[j, i] = sum_r b_cod[r, j] b_dom[r, i] phi_hat[r, (k_j - k_i) mod A]
    k = (cod.frequencies[:, None] - dom.frequencies[None, :]) % A
    ref = np.einsum("rj,ri,rji->ji", b_cod, b_dom, phi_hat[:, k])
    assert np.allclose(a, ref, atol=1e-12) and np.allclose(b, ref, atol=1e-12)


def test_backend_selection():
    assert kernels.BACKEND == "cython"
    env = dict(os.environ, POLYFOCK_PURE_PYTHON="1")
    code = (
        "import numpy as np, polyfock\n"
        "from polyfock.fock import TruncatedBasis\n"
        "from polyfock.symbols import SymbolExpr\n"
        "from polyfock.toeplitz import toeplitz_matrix\n"
        "b = TruncatedBasis(2, 12)\n"
        "M = toeplitz_matrix(SymbolExpr.exponential(z=0.4), b, b).entries\n"
        "print(polyfock.BACKEND); print(json.dumps([M.real.tolist(), M.imag.tolist()]))\n"
    )
    out = subprocess.run([sys.executable, "-c", "import json\n" + code], env=env, capture_output=True, check=True, text=True).stdout
    name, blob = out.split("\n", 1)
    assert name == "python"
    re, im = json.loads(blob)

    from polyfock.symbols import SymbolExpr
    from polyfock.toeplitz import toeplitz_matrix

    b = TruncatedBasis(2, 12)
    here = toeplitz_matrix(SymbolExpr.exponential(z=0.4), b, b).entries
    assert np.allclose(np.array(re) + 1j * np.array(im), here, atol=1e-13)
