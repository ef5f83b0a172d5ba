"""Pure numpy versions of the inner loops (fallback when the extension is absent)."""
import numpy as np

_CHUNK = 32


def radial_table(r, n_q, p_max):
    """Radial parts R[i, q, p] of the normalized complex Hermite basis.

    e_{p,q}(r e^{it}) = R[., q, p] * exp(1j*(p-q)*t); built with the
    recurrence R_{p+1,q} = (r R_{p,q} - sqrt(q) R_{p,q-1}) / sqrt(p+1).
    """
    r = np.ascontiguousarray(r, dtype=float)
    out = np.empty((r.shape[0], n_q, p_max + 1))
    start = np.ones_like(r)
    for q in range(n_q):
        if q > 0:
            start = start * r / np.sqrt(q)
        out[:, q, 0] = start
        for p in range(p_max):
            nxt = r * out[:, q, p]
            if q > 0:
                nxt -= np.sqrt(q) * out[:, q - 1, p]
            out[:, q, p + 1] = nxt / np.sqrt(p + 1)
    return out


def assemble(b_cod, b_dom, k_cod, k_dom, phi_hat):
    """M[j, i] = sum_r b_cod[r, j] * b_dom[r, i] * phi_hat[r, (k_cod[j] - k_dom[i]) mod A]."""
    n_r, n_a = phi_hat.shape
    idx = np.mod(np.subtract.outer(k_cod, k_dom), n_a)
    out = np.zeros((b_cod.shape[1], b_dom.shape[1]), dtype=complex)
    for lo in range(0, n_r, _CHUNK):
        hi = min(lo + _CHUNK, n_r)
        radial = b_cod[lo:hi, :, None] * b_dom[lo:hi, None, :]
        out += np.einsum("rji,rji->ji", radial, phi_hat[lo:hi][:, idx])
    return out
