"""Hot batched kernels: phase-normalized QR of stacks of small complex
matrices, and first-column Iwasawa weights.

Everything here works on arrays of shape (n, d, d) complex128 with d in
{2, 3}.  The numba implementations avoid per-slice LAPACK call overhead;
the numpy implementations use the stacked gufunc path.  Which one backs
the public names is decided by ``rankone._backend`` (env flag
``RANKONE_NO_NUMBA``).
"""

import numpy as np

from ._backend import USE_NUMBA

__all__ = [
    "qr_pos", "qr_pos_numpy", "qr_pos_numba",
    "first_col_lognorm", "first_col_lognorm_numpy", "first_col_lognorm_numba",
]


def qr_pos_numpy(a):
    """QR with real positive diagonal of R, batched over leading axes."""
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1).copy()
    mag = np.abs(d)
    ph = np.where(mag > 0.0, d / np.where(mag > 0.0, mag, 1.0), 1.0)
    q = q * ph[..., None, :]
    r = np.conj(ph)[..., :, None] * r
    return q, r


def first_col_lognorm_numpy(a):
    """log of the euclidean norm of the first column, batched."""
    c = a[..., :, 0]
    return 0.5 * np.log(np.einsum("...i,...i->...", c, np.conj(c)).real)


if USE_NUMBA:
    from numba import njit

    @njit(cache=True, nogil=True)
    def _qr_pos_core(a, q, r):
        n, m, _ = a.shape
        v = np.empty(m, dtype=np.complex128)
        for s in range(n):
            for i in range(m):
                for j in range(m):
                    r[s, i, j] = a[s, i, j]
                    q[s, i, j] = 0.0
                q[s, i, i] = 1.0
            for col in range(m - 1):
                nx = 0.0
                for i in range(col, m):
                    nx += (r[s, i, col] * np.conj(r[s, i, col])).real
                nx = np.sqrt(nx)
                if nx == 0.0:
                    continue
                x0 = r[s, col, col]
                ax0 = np.abs(x0)
                if ax0 > 0.0:
                    alpha = -(x0 / ax0) * nx
                else:
                    alpha = -nx + 0.0j
                vn2 = 0.0
                for i in range(col, m):
                    v[i] = r[s, i, col]
                v[col] = v[col] - alpha
                for i in range(col, m):
                    vn2 += (v[i] * np.conj(v[i])).real
                if vn2 < 1e-300:
                    continue
                # R[col:, col:] -= 2 v (v^H R) / vn2
                for j in range(col, m):
                    acc = 0.0 + 0.0j
                    for i in range(col, m):
                        acc += np.conj(v[i]) * r[s, i, j]
                    acc = 2.0 * acc / vn2
                    for i in range(col, m):
                        r[s, i, j] -= v[i] * acc
                # Q[:, col:] -= 2 (Q v) v^H / vn2
                for i in range(m):
                    acc = 0.0 + 0.0j
                    for j in range(col, m):
                        acc += q[s, i, j] * v[j]
                    acc = 2.0 * acc / vn2
                    for j in range(col, m):
                        q[s, i, j] -= acc * np.conj(v[j])
            # normalize diagonal phases
            for i in range(m):
                dii = r[s, i, i]
                mag = np.abs(dii)
                if mag > 0.0:
                    ph = dii / mag
                    cph = np.conj(ph)
                    for j in range(m):
                        r[s, i, j] *= cph
                        q[s, j, i] *= ph

    def qr_pos_numba(a):
        a = np.ascontiguousarray(a, dtype=np.complex128)
        shape = a.shape
        flat = a.reshape(-1, shape[-2], shape[-1])
        q = np.empty_like(flat)
        r = np.empty_like(flat)
        _qr_pos_core(flat, q, r)
        return q.reshape(shape), r.reshape(shape)

    @njit(cache=True, nogil=True)
    def _fcl_core(a, out):
        n, m, _ = a.shape
        for s in range(n):
            acc = 0.0
            for i in range(m):
                acc += (a[s, i, 0] * np.conj(a[s, i, 0])).real
            out[s] = 0.5 * np.log(acc)

    def first_col_lognorm_numba(a):
        a = np.ascontiguousarray(a, dtype=np.complex128)
        shape = a.shape
        flat = a.reshape(-1, shape[-2], shape[-1])
        out = np.empty(flat.shape[0], dtype=np.float64)
        _fcl_core(flat, out)
        return out.reshape(shape[:-2])

    qr_pos = qr_pos_numba
    first_col_lognorm = first_col_lognorm_numba
else:
    qr_pos_numba = None
    first_col_lognorm_numba = None
    qr_pos = qr_pos_numpy
    first_col_lognorm = first_col_lognorm_numpy
