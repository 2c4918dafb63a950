"""Concrete matrix models of the three rank-one spaces.

H2R : G = SL(2,R),  G/K the hyperbolic plane          (m_a=1, m_2a=0)
H3R : G = SL(2,C),  G/K real hyperbolic 3-space       (m_a=2, m_2a=0)
H2C : G = SU(2,1),  G/K the complex hyperbolic plane  (m_a=2, m_2a=1)

All metric data comes from the Killing form B(X,Y)=tr(ad X ad Y) with the
inner product <X,Y> = -B(X, theta Y), theta X = -X^*.  No unit-curvature
rescaling is applied; e.g. the H2R metric has curvature -1/2.  (To convert
to the standard curvature -1 model, rescale the metric by alpha_norm**2.)

a-valued quantities are stored as the coefficient u in H = u*Hcheck where
Hcheck = H0/alpha_norm, so alpha0(H) = u and xi(H) = xi_check * u for any
weight xi (xi_check = xi(H0)/alpha_norm).  Spectral parameters are stored
as the scalar xi(H0); the accessor dividing by alpha_norm gives xi_check.
"""

from dataclasses import dataclass, field as _dc_field
from functools import lru_cache
import math

import numpy as np

__all__ = [
    "MODEL_NAMES", "RankOneModel", "GroupElement", "LieAlgebraElement",
    "build_model",
]

MODEL_NAMES = ("H2R", "H3R", "H2C")


def _sl2_basis():
    H = np.diag([1.0, -1.0]).astype(complex)
    E = np.array([[0, 1], [0, 0]], dtype=complex)
    F = np.array([[0, 0], [1, 0]], dtype=complex)
    return H, E, F


def _su21_matrices():
    J = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)
    H = np.diag([1.0, 0.0, -1.0]).astype(complex)
    E31 = np.zeros((3, 3), dtype=complex)
    E31[2, 0] = 1.0
    E13 = np.zeros((3, 3), dtype=complex)
    E13[0, 2] = 1.0

    def Ym(z):
        m = np.zeros((3, 3), dtype=complex)
        m[1, 0] = z
        m[2, 1] = -np.conj(z)
        return m

    def Yp(z):
        m = np.zeros((3, 3), dtype=complex)
        m[0, 1] = z
        m[1, 2] = -np.conj(z)
        return m

    return J, H, E31, E13, Ym, Yp


def _real_span_basis(name):
    """Real basis of the Lie algebra in the defining representation."""
    if name == "H2R":
        H, E, F = _sl2_basis()
        return [H, E, F]
    if name == "H3R":
        H, E, F = _sl2_basis()
        return [H, 1j * H, E, 1j * E, F, 1j * F]
    if name == "H2C":
        J, H, E31, E13, Ym, Yp = _su21_matrices()
        return [
            H,
            Ym(1.0), Ym(1.0j),
            Yp(1.0), Yp(1.0j),
            1j * E31, 1j * E13,
            1j * np.diag([1.0, -2.0, 1.0]).astype(complex),
        ]
    raise ValueError(f"unknown model name {name!r}")


def _real_flat(mats):
    """Real coordinates of complex matrices (the algebra is a real span)."""
    return np.stack(
        [np.concatenate([m.ravel().real, m.ravel().imag]) for m in mats], axis=1)


def _expand(flat, Z):
    coeff, *_ = np.linalg.lstsq(
        flat, np.concatenate([Z.ravel().real, Z.ravel().imag]), rcond=None)
    return coeff


def _adjoint_matrices(basis):
    flat = _real_flat(basis)
    ads = []
    for X in basis:
        cols = [_expand(flat, X @ Y - Y @ X) for Y in basis]
        ads.append(np.stack(cols, axis=1))
    return ads


def _killing_matrix(basis):
    ads = _adjoint_matrices(basis)
    n = len(basis)
    B = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            B[i, j] = np.trace(ads[i] @ ads[j]).real
    return B


def _inner_matrix(basis, B):
    """Gram matrix of <X,Y> = -B(X, theta Y), theta X = -X^*."""
    flat = _real_flat(basis)
    n = len(basis)
    G = np.empty((n, n))
    for j in range(n):
        th = basis[j].conj().T  # theta X_j = -X_j^*, so -B(.,theta X_j)=B(.,X_j^*)
        G[:, j] = B @ _expand(flat, th)
    return 0.5 * (G + G.T)


@dataclass(frozen=True)
class RankOneModel:
    """Structural and metric data of one rank-one space."""

    name: str
    n: int                   # real dimension of G/K
    m_alpha: int
    m_2alpha: int
    alpha_norm: float        # ||alpha0|| in the Killing metric
    rho_check: float         # rho/||alpha0|| = m_alpha/2 + m_2alpha
    vol_sphere: float        # vol(S^{n-1})
    matrix_dim: int
    field: str               # scalar field of the defining representation
    iw_weight: float = _dc_field(repr=False, default=0.0)  # u = iw_weight*log||g e1||
    c_nbar: float = _dc_field(repr=False, default=0.0)     # (4 m_a + 16 m_2a)^-1

    def xi_check(self, xi):
        """Convert a spectral parameter stored as xi(H0) to xi(H0)/||alpha0||."""
        return xi / self.alpha_norm

    @property
    def hcheck_matrix(self):
        return _model_statics(self.name)["Hcheck"]

    @property
    def weyl_matrix(self):
        return _model_statics(self.name)["w"]

    @property
    def form_matrix(self):
        """Invariant Hermitian form (H2C only), else None."""
        return _model_statics(self.name)["J"]

    @property
    def lie_basis(self):
        return _model_statics(self.name)["basis"]

    @property
    def lie_basis_orthonormal(self):
        return _model_statics(self.name)["on_basis"]

    @property
    def nbar_basis(self):
        """Killing-orthonormal bases (list for g_{-a}, list for g_{-2a})."""
        st = _model_statics(self.name)
        return st["nbar_a"], st["nbar_2a"]

    @property
    def dim_nbar(self):
        return self.m_alpha + self.m_2alpha


@lru_cache(maxsize=None)
def _model_statics(name):
    basis = _real_span_basis(name)
    B = _killing_matrix(basis)
    G = _inner_matrix(basis, B)
    H = basis[0]

    # alpha0(H) = smallest positive eigenvalue of ad(H)
    flat = _real_flat(basis)
    adH = np.stack([_expand(flat, H @ Y - Y @ H) for Y in basis], axis=1)
    ev = np.linalg.eigvals(adH).real
    pos = np.sort(ev[ev > 1e-9])
    c_root = pos[0]

    alpha_norm = c_root / math.sqrt(B[0, 0])
    Hcheck = H / c_root

    if name in ("H2R", "H3R"):
        w = np.array([[0, -1], [1, 0]], dtype=complex)
        J = None
    else:
        w = np.array([[0, 0, 1], [0, -1, 0], [1, 0, 0]], dtype=complex)
        J = _su21_matrices()[0]

    # Killing-orthonormal bases of the restricted root spaces g_{-a}, g_{-2a}
    def on_normalize(vecs):
        out = []
        for X in vecs:
            coeff = _expand(flat, X)
            nrm = math.sqrt(coeff @ G @ coeff)
            out.append(X / nrm)
        return out

    if name == "H2R":
        _, _, F = _sl2_basis()
        nbar_a = on_normalize([F])
        nbar_2a = []
    elif name == "H3R":
        _, _, F = _sl2_basis()
        nbar_a = on_normalize([F, 1j * F])
        nbar_2a = []
    else:
        _, _, E31, _, Ym, _ = _su21_matrices()
        nbar_a = on_normalize([Ym(1.0), Ym(1.0j)])
        nbar_2a = on_normalize([1j * E31])

    # orthonormal basis of all of g (for Gaussian sampling)
    L = np.linalg.cholesky(G)
    coeffs = np.linalg.inv(L).T  # columns: orthonormal combinations
    on_basis = []
    for j in range(len(basis)):
        X = sum(coeffs[i, j] * basis[i] for i in range(len(basis)))
        on_basis.append(X)

    return {
        "basis": basis, "B": B, "G": G, "Hcheck": Hcheck, "w": w, "J": J,
        "alpha_norm": alpha_norm, "c_root": c_root,
        "nbar_a": nbar_a, "nbar_2a": nbar_2a, "on_basis": on_basis,
    }


_STRUCTURE = {
    # name: (m_alpha, m_2alpha, matrix_dim, field)
    "H2R": (1, 0, 2, "real"),
    "H3R": (2, 0, 2, "complex"),
    "H2C": (2, 1, 3, "complex"),
}


@lru_cache(maxsize=None)
def build_model(name: str) -> RankOneModel:
    """Build the model descriptor; metric constants come from the Killing form."""
    if name not in _STRUCTURE:
        raise ValueError(f"unknown model name {name!r}; expected one of {MODEL_NAMES}")
    m_a, m_2a, dim, fld = _STRUCTURE[name]
    st = _model_statics(name)
    n = m_a + m_2a + 1
    vol = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    # u = iw_weight * log||g e1||: the top Hcheck weight on the first basis vector
    top = st["Hcheck"][0, 0].real
    return RankOneModel(
        name=name, n=n, m_alpha=m_a, m_2alpha=m_2a,
        alpha_norm=st["alpha_norm"],
        rho_check=0.5 * m_a + m_2a,
        vol_sphere=vol, matrix_dim=dim, field=fld,
        iw_weight=1.0 / top,
        c_nbar=1.0 / (4 * m_a + 16 * m_2a),
    )


@dataclass
class GroupElement:
    """Matrix in the defining representation, tagged with its model."""

    entries: np.ndarray
    model: RankOneModel

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)

    @property
    def matrix(self):
        return self.entries

    def __matmul__(self, other):
        return GroupElement(self.entries @ other.entries, self.model)

    def inv(self):
        return GroupElement(np.linalg.inv(self.entries), self.model)

    def adjoint(self):
        return GroupElement(self.entries.conj().T, self.model)

    def validate(self, tol=1e-10):
        """Check det = 1 and (H2C) preservation of the Hermitian form."""
        if abs(np.linalg.det(self.entries) - 1.0) > tol:
            return False
        J = self.model.form_matrix
        if J is not None:
            if np.max(np.abs(self.entries.conj().T @ J @ self.entries - J)) > tol:
                return False
        return True


GRADING_TAGS = ("a", "n_plus_alpha", "n_plus_2alpha", "n_minus_alpha",
                "n_minus_2alpha", "k", "generic")


@dataclass
class LieAlgebraElement:
    entries: np.ndarray
    model: RankOneModel
    grading: str = "generic"

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.grading not in GRADING_TAGS:
            raise ValueError(f"unknown grading tag {self.grading!r}")

    def bracket_residual(self):
        """Residual of [H0, X] = c*alpha0(H0)*X for the tagged weight c."""
        weights = {"a": 0.0, "k": None, "generic": None,
                   "n_plus_alpha": 1.0, "n_plus_2alpha": 2.0,
                   "n_minus_alpha": -1.0, "n_minus_2alpha": -2.0}
        c = weights[self.grading]
        if c is None:
            return 0.0
        st = _model_statics(self.model.name)
        H0 = st["Hcheck"] * self.model.alpha_norm
        comm = H0 @ self.entries - self.entries @ H0
        target = c * self.model.alpha_norm * self.entries
        return float(np.max(np.abs(comm - target)))
