"""The boundary at infinity: endpoint maps, horocycle bracket, the
weights Phi_pm and N_gamma, the compact-picture principal series, the
eigendistribution transforms Q_{lambda,pm}, and fiber integration.

Conventions (see models module): a-values are stored in Hcheck units, so
every pairing xi(H) is computed as xi_check * u.  The weights Phi_pm are
stored as exp(u), i.e. Phi^{lambda(H0)} == exp(lambda_check * u); the two
normalizations of paper-style formulas agree identically because
nu0 = alpha0/||alpha0|| cancels the ||alpha0|| in lambda(H0).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional
import warnings

import numpy as np

from .group import kan_u_batch, exp_a_batch
from .models import GroupElement, RankOneModel
from .spheres import boundary_coords, chordal_distance, section, sphere_quadrature

__all__ = [
    "BoundaryPoint", "BoundaryFunction", "SphereBundlePoint",
    "endpoint", "horocycle_bracket", "phi", "n_gamma",
    "principal_series", "q_transform", "fiber_integrate",
    "QuadratureWarning", "boundary_action",
    "bracket_batch", "q_transform_batch",
]


class QuadratureWarning(UserWarning):
    pass


@dataclass
class BoundaryPoint:
    """Point of K/M, stored projectively as a unit line vector."""

    line: np.ndarray
    model: RankOneModel

    def __post_init__(self):
        v = np.asarray(self.line, dtype=complex)
        self.line = v / np.linalg.norm(v)

    @classmethod
    def from_k(cls, k: GroupElement):
        return cls(k.entries[:, 0], k.model)

    @classmethod
    def base(cls, model):
        e1 = np.zeros(model.matrix_dim)
        e1[0] = 1.0
        return cls(e1, model)

    @property
    def coords(self):
        return boundary_coords(self.line, self.model)

    def krep(self) -> GroupElement:
        """Coset representative in K through the sphere section."""
        return GroupElement(section(self.coords, self.model), self.model)

    def same_as(self, other, tol=1e-8):
        return chordal_distance(self.coords, other.coords, self.model) < tol


@dataclass
class SphereBundlePoint:
    """Point of the unit sphere bundle G/M, as a group representative."""

    g: np.ndarray
    model: RankOneModel

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=complex)

    @classmethod
    def from_element(cls, g: GroupElement):
        return cls(g.entries, g.model)


@dataclass
class BoundaryFunction:
    """Smooth function on K/M, evaluated through canonical coordinates.

    evaluator maps a batch of canonical coordinates to complex values.
    band_limit, when set, records the harmonic degree cutoff used to
    build the function (exact for the coefficient-based constructors).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    model: RankOneModel
    smoothness: str = "smooth"
    band_limit: Optional[int] = None

    def eval_coords(self, coords):
        return np.asarray(self.evaluator(coords), dtype=complex)

    def __call__(self, b: BoundaryPoint):
        return complex(self.eval_coords(np.asarray(b.coords)[None])[0])

    def eval_lines(self, lines):
        return self.eval_coords(boundary_coords(lines, self.model))

    @classmethod
    def constant(cls, value, model):
        v = complex(value)

        def ev(coords):
            lead = np.shape(coords)[:-1] if model.name != "H2R" else np.shape(coords)
            return np.full(lead, v, dtype=complex)

        return cls(ev, model, band_limit=0)


def boundary_action(g: np.ndarray, lines: np.ndarray):
    """Left G-action on boundary lines (projective; not renormalized)."""
    return np.einsum("ij,...j->...i", g, lines)


# ---------------------------------------------------------------------------
# brackets and weights

def bracket_batch(ginv, lines, model):
    """<gK, lines> in Hcheck units, batched; ginv = g^{-1}, lines unit."""
    moved = np.einsum("ij,...j->...i", ginv, lines)
    nrm2 = np.einsum("...i,...i->...", moved, np.conj(moved)).real
    return -0.5 * model.iw_weight * np.log(nrm2)


def endpoint(p: SphereBundlePoint, sign: int) -> BoundaryPoint:
    """Forward (+) / backward (-) endpoint of the geodesic through p."""
    model = p.model
    if sign > 0:
        v = p.g[:, 0]
    else:
        v = (p.g @ model.weyl_matrix)[:, 0]
    return BoundaryPoint(v, model)


def horocycle_bracket(x: GroupElement, b: BoundaryPoint) -> float:
    """<xK, b> = -H(x^{-1} k_b) in Hcheck units."""
    ginv = np.linalg.inv(x.entries)
    return float(bracket_batch(ginv, b.line[None], x.model)[0])


def phi(p: SphereBundlePoint, sign: int) -> float:
    """Phi_pm(gM) = exp(<gK, B_pm(gM)>), stored units."""
    g = p.g if sign > 0 else p.g @ p.model.weyl_matrix
    return float(np.exp(kan_u_batch(g[None], p.model)[0]))


def n_gamma(gamma: GroupElement, b: BoundaryPoint) -> float:
    """N_gamma(b) = exp(-<gamma^{-1} K, b>), stored units."""
    val = bracket_batch(gamma.entries, b.line[None], gamma.model)[0]
    return float(np.exp(-val))


# ---------------------------------------------------------------------------
# principal series and Q transforms

def principal_series(mu: complex, gamma: GroupElement,
                     T: BoundaryFunction) -> BoundaryFunction:
    """Compact-picture spherical principal series action at parameter mu.

    (pi_mu(gamma) T)(k') = exp((mu_ck + rho_ck) <gamma K, k'>) T(gamma^{-1} k').
    mu is stored as mu(H0).
    """
    model = T.model
    s = model.xi_check(mu) + model.rho_check
    gi = np.linalg.inv(gamma.entries)

    def ev(coords):
        k = section(np.asarray(coords), model)
        lines = k[..., :, 0]
        br = bracket_batch(gi, lines, model)   # <gamma K, k'> = -H(gamma^{-1} k')
        pulled = boundary_action(gi, lines)
        return np.exp(s * br) * T.eval_lines(pulled)

    return BoundaryFunction(ev, model, smoothness=T.smoothness)


def q_transform(T: BoundaryFunction, lam: complex, sign: int,
                p: SphereBundlePoint) -> complex:
    """(Q_{lambda,pm} T)(gM): boundary pullback weighted by Phi_pm^lambda."""
    return complex(q_transform_batch(T, lam, sign, p.g[None], p.model)[0])


def q_transform_batch(T, lam, sign, g, model):
    lamc = model.xi_check(lam)
    gg = g if sign > 0 else g @ model.weyl_matrix
    u = kan_u_batch(gg, model)
    lines = gg[..., :, 0]
    return np.exp(lamc * u) * T.eval_lines(lines)


# ---------------------------------------------------------------------------
# fiber integration

def fiber_integrate(F, x: GroupElement, order=24, check=False, rtol=1e-9):
    """Integral of F over the sphere fiber above xK, measure dkM.

    F is called with a batch of G/M representatives (shape (n, d, d)).
    With check=True, the rule is refined once and a QuadratureWarning is
    issued when the two levels disagree beyond rtol (relative).
    """
    model = x.model

    def run(o):
        _, kreps, wts = sphere_quadrature(model, o)
        pts = np.einsum("ij,njk->nik", x.entries, kreps)
        return np.sum(np.asarray(F(pts)) * wts)

    val = run(order)
    if check:
        ref = run(2 * order)
        denom = max(abs(ref), 1.0)
        if abs(val - ref) > rtol * denom:
            warnings.warn(
                f"fiber quadrature not converged: {abs(val - ref):.3e} "
                f"at orders {order}/{2 * order}", QuadratureWarning)
        val = ref
    return complex(val)
