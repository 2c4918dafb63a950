"""Polynomial algebra in q = Q/N^2 and s = 1/N^2 closed under the scaling
derivation L, and the recursion producing the regularizing weights V_ell
with their eigenvalue shifts beta_ell.

The derivation acts on generators by

    L q = 2 q^2 - 2 q - 4 s,      L s = -4 s + 2 q s,

extended by Leibniz; constants are killed.  Coefficients are polynomials
in the reduced spectral parameter lambda_check, stored as ascending
numpy coefficient arrays, so one V_ell serves all spectral parameters.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .group import script_N_batch, script_Q_batch

__all__ = [
    "QSPolynomial", "beta", "L_symbolic", "L_numeric", "v_next", "v_ell",
    "evaluate_qs", "evaluate_qs_batch",
]


def _trim(c):
    c = np.asarray(c, dtype=complex)
    nz = np.nonzero(np.abs(c) > 0.0)[0]
    if len(nz) == 0:
        return None
    return c[: nz[-1] + 1].copy()


def _padd(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


@dataclass
class QSPolynomial:
    """terms maps (q-degree, s-degree) -> lambda_check coefficient array."""

    terms: dict = field(default_factory=dict)

    @classmethod
    def from_terms(cls, raw):
        out = {}
        for key, coeffs in raw.items():
            c = _trim(coeffs)
            if c is not None:
                out[key] = c
        return cls(out)

    @classmethod
    def one(cls):
        return cls({(0, 0): np.array([1.0 + 0.0j])})

    def __add__(self, other):
        out = {k: v.copy() for k, v in self.terms.items()}
        for k, v in other.terms.items():
            out[k] = _padd(out[k], v) if k in out else v.copy()
        return QSPolynomial.from_terms(out)

    def scale(self, lampoly):
        """Multiply by a polynomial in lambda_check (array or scalar)."""
        lampoly = np.atleast_1d(np.asarray(lampoly, dtype=complex))
        out = {}
        for k, v in self.terms.items():
            out[k] = np.convolve(v, lampoly)
        return QSPolynomial.from_terms(out)

    def shift(self, dq, ds):
        """Multiply by q^dq s^ds."""
        return QSPolynomial.from_terms(
            {(a + dq, b + ds): v for (a, b), v in self.terms.items()})

    def weighted_degrees(self):
        """(min, max) of a + 2b over stored monomials."""
        if not self.terms:
            return (0, 0)
        w = [a + 2 * b for (a, b) in self.terms]
        return (min(w), max(w))

    def is_zero(self):
        return not self.terms

    def pretty(self, var_lambda="lam"):
        """Human-readable monomial list for reports."""
        if not self.terms:
            return "0"
        parts = []
        for (a, b) in sorted(self.terms):
            coeffs = self.terms[(a, b)]
            cs = []
            for p, c in enumerate(coeffs):
                if abs(c) == 0.0:
                    continue
                cval = c.real if abs(c.imag) < 1e-15 else c
                lead = f"{cval:+.6g}"
                if p == 1:
                    lead += f"*{var_lambda}"
                elif p > 1:
                    lead += f"*{var_lambda}^{p}"
                cs.append(lead)
            mono = "".join(
                ([f"q^{a}" if a > 1 else "q"] if a else [])
                + ([f"s^{b}" if b > 1 else "s"] if b else [])) or "1"
            parts.append(f"({' '.join(cs)}) {mono}")
        return " + ".join(parts)


def beta(ell: int, lam: complex, model) -> complex:
    """beta_ell = 2 (rho_check + lambda_check + ell - 1); lam stored as lam(H0)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return 2.0 * (model.rho_check + model.xi_check(lam) + ell - 1.0)


def L_symbolic(p: QSPolynomial) -> QSPolynomial:
    """Apply the derivation L termwise via the Leibniz rule."""
    out = {}

    def acc(key, coeffs):
        if key in out:
            out[key] = _padd(out[key], coeffs)
        else:
            out[key] = np.asarray(coeffs, dtype=complex).copy()

    for (a, b), v in p.terms.items():
        if a + b == 0:
            continue
        acc((a + 1, b), (2 * a + 2 * b) * v)
        acc((a, b), -(2 * a + 4 * b) * v)
        if a >= 1:
            acc((a - 1, b + 1), -4 * a * v)
    return QSPolynomial.from_terms(out)


def L_numeric(f, coords, model, h=1e-5):
    """Scaling derivative d/dtau f(e^tau U1, e^{2tau} U2) at tau = 0."""
    coords = np.asarray(coords, dtype=float)
    ma = model.m_alpha

    def scaled(tau):
        c = coords.copy()
        c[..., :ma] *= np.exp(tau)
        c[..., ma:] *= np.exp(2 * tau)
        return c

    return (np.asarray(f(scaled(h))) - np.asarray(f(scaled(-h)))) / (2 * h)


def v_next(V_prev: QSPolynomial, ell: int, model) -> QSPolynomial:
    """One recursion step: V_ell from V_{ell-1} (lambda kept symbolic).

    V_ell = [-L + (2 rho + lam)(2 - q) - 2 rho - beta_ell(lam)] V_{ell-1}.
    """
    rc = model.rho_check
    two_rho_lam = np.array([2 * rc, 1.0])          # 2 rho_check + lam_check
    beta_poly = np.array([2 * (rc + ell - 1.0), 2.0])
    t1 = L_symbolic(V_prev).scale(-1.0)
    t2 = V_prev.scale(2.0 * two_rho_lam) + V_prev.shift(1, 0).scale(-two_rho_lam)
    t3 = V_prev.scale(-2 * rc)
    t4 = V_prev.scale(-beta_poly)
    return t1 + t2 + t3 + t4


@lru_cache(maxsize=None)
def _v_ell_cached(model_name, ell):
    from .models import build_model
    model = build_model(model_name)
    V = QSPolynomial.one()
    for k in range(1, ell + 1):
        V = v_next(V, k, model)
    return V


def v_ell(model, ell: int) -> QSPolynomial:
    """The ell-th regularizing weight as a symbolic polynomial."""
    if ell < 0:
        raise ValueError("ell must be >= 0")
    return _v_ell_cached(model.name, ell)


def evaluate_qs_batch(p: QSPolynomial, coords, lam, model):
    """Evaluate at Nbar coordinates: q = Q/N^2, s = 1/N^2 (lam stored)."""
    coords = np.asarray(coords, dtype=float)
    N2 = script_N_batch(coords, model) ** 2
    qv = script_Q_batch(coords, model) / N2
    sv = 1.0 / N2
    lamc = model.xi_check(lam)
    out = np.zeros(np.shape(qv), dtype=complex)
    for (a, b), cf in p.terms.items():
        cval = np.polynomial.polynomial.polyval(lamc, cf)
        out = out + cval * qv ** a * sv ** b
    return out


def evaluate_qs(p: QSPolynomial, c, lam) -> complex:
    """Evaluate at a single NbarCoordinates point."""
    return complex(evaluate_qs_batch(p, c.packed[None], lam, c.model)[0])
