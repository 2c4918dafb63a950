"""Group decompositions and Nbar coordinates.

All decompositions reduce to one primitive: phase-normalized QR of small
complex matrices (see _kernels).  A-components are returned as the scalar
u with a = exp(u * Hcheck).  Batched variants operate on arrays of shape
(..., d, d) and are the hot path for quadrature and Monte Carlo.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ._kernels import qr_pos, first_col_lognorm
from .models import GroupElement, RankOneModel, _model_statics

__all__ = [
    "NbarCoordinates", "DecompositionError", "BruhatCellError",
    "iwasawa_kan", "decompose_ANK", "decompose_NAK", "bruhat_nbar",
    "decompose_NbarMAN", "nbar_exp", "nbar_log",
    "script_N", "script_Q", "angle_bracket", "weyl_element",
    "kan_u_batch", "kan_batch", "ank_batch", "nak_batch", "bruhat_coords_batch",
    "nbar_exp_batch", "nbar_from_bruhat_batch", "exp_a_batch", "dist_u_batch",
    "script_N_batch", "script_Q_batch", "angle_bracket_batch",
    "random_group_elements", "random_m", "random_nbar",
]


class DecompositionError(RuntimeError):
    pass


class BruhatCellError(ValueError):
    """The element is (numerically) outside the open Bruhat cell."""


# ---------------------------------------------------------------------------
# batched primitives

def _swapH(a):
    return np.conj(np.swapaxes(a, -1, -2))


def kan_u_batch(g, model):
    """u-component of H(g) for a batch, via the first-column norm."""
    return model.iw_weight * first_col_lognorm(g)


def kan_batch(g, model):
    """g = k a n.  Returns (k, u, n) arrays."""
    q, r = qr_pos(g)
    u = model.iw_weight * np.log(np.diagonal(r, axis1=-2, axis2=-1)[..., 0].real)
    a_inv = exp_a_batch(-u, model)
    n = a_inv @ r
    return q, u, n


def ank_batch(g, model):
    """g = a nbar k with nbar lower-unipotent.  Returns (u, nbar, k)."""
    q, r = qr_pos(_swapH(g))
    L = _swapH(r)
    u = model.iw_weight * np.log(np.diagonal(L, axis1=-2, axis2=-1)[..., 0].real)
    nbar = exp_a_batch(-u, model) @ L
    return u, nbar, _swapH(q)


def nak_batch(g, model):
    """g = n a k with n upper-unipotent.  Returns (n, u, k)."""
    d = model.matrix_dim
    P = np.eye(d)[::-1].astype(complex)
    C = P @ _swapH(g) @ P
    qh, rh = qr_pos(C)
    L = P @ rh @ P           # lower triangular, positive diagonal
    Q = P @ qh @ P
    k = _swapH(Q)
    u = model.iw_weight * np.log(np.diagonal(L, axis1=-2, axis2=-1)[..., 0].real)
    n = _swapH(L) @ exp_a_batch(-u, model)
    return n, u, k


def exp_a_batch(u, model):
    """exp(u * Hcheck) for scalar or array u."""
    u = np.asarray(u, dtype=float)
    d = model.matrix_dim
    out = np.zeros(u.shape + (d, d), dtype=complex)
    hdiag = np.diagonal(model.hcheck_matrix).real
    for i in range(d):
        out[..., i, i] = np.exp(u * hdiag[i])
    return out


def dist_u_batch(g, model):
    """Distance from the base point o to gK, in Hcheck units.

    exp(u*Hcheck) is at distance u; Riemannian distance is u/alpha_norm.
    """
    gg = g @ _swapH(g)
    ev = np.linalg.eigvalsh(gg)
    lam_max = ev[..., -1].real
    return 0.5 * model.iw_weight * np.log(lam_max)


def bruhat_coords_batch(g, model, threshold=1e-8):
    """First-column Bruhat data: scaled column and a bad-cell mask.

    Returns (v, bad) where v = g e1 / (g e1)[0] wherever valid.
    """
    col = g[..., :, 0]
    nrm = np.linalg.norm(col, axis=-1)
    bad = np.abs(col[..., 0]) < threshold * nrm
    denom = np.where(bad, 1.0, col[..., 0])
    return col / denom[..., None], bad


def nbar_exp_batch(coords, model):
    """Batched exp: coords (..., dim_nbar) -> lower-unipotent matrices."""
    coords = np.asarray(coords, dtype=float)
    na, n2a = model.nbar_basis
    d = model.matrix_dim
    X = np.zeros(coords.shape[:-1] + (d, d), dtype=complex)
    for i, b in enumerate(na):
        X = X + coords[..., i, None, None] * b
    for j, b in enumerate(n2a):
        X = X + coords[..., len(na) + j, None, None] * b
    out = np.eye(d, dtype=complex) + X
    if model.name == "H2C":
        out = out + 0.5 * (X @ X)   # nilpotency degree 3
    return out


def nbar_from_bruhat_batch(v, model):
    """Unipotent nbar with nbar e1 = v (v normalized to v[0]=1)."""
    d = model.matrix_dim
    out = np.zeros(v.shape[:-1] + (d, d), dtype=complex)
    for i in range(d):
        out[..., i, i] = 1.0
    if model.name in ("H2R", "H3R"):
        out[..., 1, 0] = v[..., 1]
    else:
        z = v[..., 1]
        out[..., 1, 0] = z
        out[..., 2, 1] = -np.conj(z)
        out[..., 2, 0] = v[..., 2]
    return out


# ---------------------------------------------------------------------------
# single-element API

def iwasawa_kan(g: GroupElement):
    """g = k exp(u Hcheck) n with k in K, n in N."""
    m = g.entries
    if not np.all(np.isfinite(m)) or abs(np.linalg.det(m)) < 1e-14:
        raise DecompositionError("singular or non-finite input")
    q, u, n = kan_batch(m[None], g.model)
    return (GroupElement(q[0], g.model), float(u[0]), GroupElement(n[0], g.model))


def decompose_ANK(g: GroupElement):
    """g = exp(u Hcheck) nbar k with nbar in Nbar, k in K."""
    m = g.entries
    if not np.all(np.isfinite(m)):
        raise DecompositionError("non-finite input")
    u, nbar, k = ank_batch(m[None], g.model)
    return float(u[0]), GroupElement(nbar[0], g.model), GroupElement(k[0], g.model)


def decompose_NAK(g: GroupElement):
    """g = n exp(u Hcheck) k with n in N, k in K."""
    n, u, k = nak_batch(g.entries[None], g.model)
    return GroupElement(n[0], g.model), float(u[0]), GroupElement(k[0], g.model)


def bruhat_nbar(g: GroupElement, threshold=1e-8):
    """The unique nbar in Nbar with g P = nbar P (open-cell projection)."""
    v, bad = bruhat_coords_batch(g.entries[None], g.model, threshold)
    if bad[0]:
        raise BruhatCellError("element lies at the boundary of the open Bruhat cell")
    return GroupElement(nbar_from_bruhat_batch(v, g.model)[0], g.model)


def decompose_NbarMAN(g: GroupElement, threshold=1e-8):
    """g = nbar m a n.  Returns (nbar, m, u, n)."""
    nbar = bruhat_nbar(g, threshold)
    p = np.linalg.inv(nbar.entries) @ g.entries
    diag = np.diagonal(p)
    mags = np.abs(diag)
    model = g.model
    u = model.iw_weight * np.log(mags[0])
    a = exp_a_batch(np.array(u), model)
    mdiag = diag / mags
    m = np.diag(mdiag)
    n = np.linalg.inv(m @ a) @ p
    return nbar, GroupElement(m, model), float(u), GroupElement(n, model)


@dataclass
class NbarCoordinates:
    """Coordinates of a point of Nbar in Killing-orthonormal root bases."""

    U1: np.ndarray
    U2: np.ndarray
    model: RankOneModel

    def __post_init__(self):
        self.U1 = np.atleast_1d(np.asarray(self.U1, dtype=float))
        self.U2 = np.atleast_1d(np.asarray(self.U2, dtype=float)) \
            if np.size(self.U2) else np.zeros(0)

    @property
    def packed(self):
        return np.concatenate([self.U1, self.U2])


def nbar_exp(c: NbarCoordinates) -> GroupElement:
    return GroupElement(nbar_exp_batch(c.packed[None], c.model)[0], c.model)


def nbar_log(g: GroupElement, tol=1e-9) -> NbarCoordinates:
    model = g.model
    m = g.entries
    if model.name in ("H2R", "H3R"):
        z = m[1, 0]
        if model.name == "H2R":
            U1 = np.array([2.0 * z.real])
        else:
            U1 = 2.0 * np.sqrt(2.0) * np.array([z.real, z.imag])
        U2 = np.zeros(0)
        rec = nbar_exp_batch(np.concatenate([U1, U2])[None], model)[0]
    else:
        z = m[1, 0]
        t = (m[2, 0] + 0.5 * abs(z) ** 2).imag
        U1 = 2.0 * np.sqrt(3.0) * np.array([z.real, z.imag])
        U2 = np.array([np.sqrt(6.0) * t])
        rec = nbar_exp_batch(np.concatenate([U1, U2])[None], model)[0]
    if np.max(np.abs(rec - m)) > tol:
        raise DecompositionError("matrix is not in Nbar")
    return NbarCoordinates(U1, U2, model)


def script_N(c: NbarCoordinates) -> float:
    return float(script_N_batch(c.packed[None], c.model)[0])


def script_Q(c: NbarCoordinates) -> float:
    cc = c.model.c_nbar
    return float(2.0 + 2.0 * cc * np.dot(c.U1, c.U1))


def angle_bracket(c: NbarCoordinates) -> float:
    u2n = np.linalg.norm(c.U2) if c.U2.size else 0.0
    return float(np.dot(c.U1, c.U1) + u2n)


def script_N_batch(coords, model):
    cc = model.c_nbar
    ma = model.m_alpha
    u1sq = np.einsum("...i,...i->...", coords[..., :ma], coords[..., :ma])
    if model.m_2alpha:
        u2sq = np.einsum("...i,...i->...", coords[..., ma:], coords[..., ma:])
    else:
        u2sq = 0.0
    return np.sqrt((1.0 + cc * u1sq) ** 2 + 4.0 * cc * u2sq)


def script_Q_batch(coords, model):
    ma = model.m_alpha
    u1sq = np.einsum("...i,...i->...", coords[..., :ma], coords[..., :ma])
    return 2.0 + 2.0 * model.c_nbar * u1sq


def angle_bracket_batch(coords, model):
    ma = model.m_alpha
    u1sq = np.einsum("...i,...i->...", coords[..., :ma], coords[..., :ma])
    if model.m_2alpha:
        u2n = np.abs(coords[..., ma])
        return u1sq + u2n
    return u1sq


def weyl_element(model: RankOneModel) -> GroupElement:
    """Representative in K of the nontrivial Weyl class (Ad(w) = -1 on a)."""
    return GroupElement(_model_statics(model.name)["w"], model)


# ---------------------------------------------------------------------------
# sampling

def random_group_elements(model, count, rng, scale=1.0):
    """exp of Gaussian Lie-algebra elements (Killing-orthonormal basis)."""
    basis = model.lie_basis_orthonormal
    coeffs = rng.normal(size=(count, len(basis))) * scale
    out = np.empty((count, model.matrix_dim, model.matrix_dim), dtype=complex)
    for i in range(count):
        X = sum(coeffs[i, j] * basis[j] for j in range(len(basis)))
        out[i] = expm(X)
    return out


def random_m(model, count, rng):
    """Random elements of M (diagonal in all three models)."""
    d = model.matrix_dim
    out = np.zeros((count, d, d), dtype=complex)
    if model.name == "H2R":
        s = rng.integers(0, 2, size=count) * 2 - 1
        out[:, 0, 0] = s
        out[:, 1, 1] = s
    elif model.name == "H3R":
        phi = rng.uniform(0, 2 * np.pi, size=count)
        out[:, 0, 0] = np.exp(1j * phi)
        out[:, 1, 1] = np.exp(-1j * phi)
    else:
        phi = rng.uniform(0, 2 * np.pi, size=count)
        out[:, 0, 0] = np.exp(1j * phi)
        out[:, 1, 1] = np.exp(-2j * phi)
        out[:, 2, 2] = np.exp(1j * phi)
    return out


def random_nbar(model, count, rng, scale=1.0):
    coords = rng.normal(size=(count, model.dim_nbar)) * scale
    return coords, nbar_exp_batch(coords, model)
