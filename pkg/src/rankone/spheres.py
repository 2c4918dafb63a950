"""The boundary sphere K/M: coordinate charts, sections K/M -> K, and
product quadrature rules with total mass vol(S^{n-1}).

Boundary points are represented projectively by "line vectors": the first
column of any group representative, normalized to unit euclidean norm.
Canonical coordinates per model:

H2R : angle psi in [0, 2pi)                       (circle)
H3R : unit vector in R^3                          (round 2-sphere)
H2C : (z1, z2) in C^2 with |z1|^2 + |z2|^2 = 1    (round 3-sphere)
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "boundary_coords", "section", "sphere_quadrature", "uniform_boundary",
    "chordal_distance", "coords_to_embedding",
]

_PHI3 = np.array([
    [2 ** -0.5, 0, 2 ** -0.5],
    [0, 1, 0],
    [2 ** -0.5, 0, -(2 ** -0.5)],
], dtype=complex)


def boundary_coords(lines, model):
    """Canonical K/M coordinates of projective line vectors (batched)."""
    lines = np.asarray(lines, dtype=complex)
    if model.name == "H2R":
        a, b = lines[..., 0].real, lines[..., 1].real
        return np.mod(2.0 * np.arctan2(b, a), 2.0 * np.pi)
    if model.name == "H3R":
        z1, z2 = lines[..., 0], lines[..., 1]
        nrm = (np.abs(z1) ** 2 + np.abs(z2) ** 2)
        w = np.conj(z1) * z2
        out = np.empty(lines.shape[:-1] + (3,))
        out[..., 0] = 2 * w.real / nrm
        out[..., 1] = 2 * w.imag / nrm
        out[..., 2] = (np.abs(z1) ** 2 - np.abs(z2) ** 2) / nrm
        return out
    # H2C: isotropic line -> diagonal-form chart, scale third coord to 1
    V = np.einsum("ij,...j->...i", _PHI3, lines)
    return V[..., :2] / V[..., 2:3]


def coords_to_embedding(coords, model):
    """Real embedding of coordinates, for chordal distances."""
    coords = np.asarray(coords)
    if model.name == "H2R":
        return np.stack([np.cos(coords), np.sin(coords)], axis=-1)
    if model.name == "H3R":
        return coords
    return np.concatenate([coords.real, coords.imag], axis=-1)


def chordal_distance(c1, c2, model):
    e1 = coords_to_embedding(c1, model)
    e2 = coords_to_embedding(c2, model)
    if model.name == "H2C":
        # phase-invariant Fubini-Study chordal distance on the line chart
        z1 = np.asarray(c1)
        z2 = np.asarray(c2)
        ip = np.abs(np.einsum("...i,...i->...", np.conj(z1), z2))
        return np.sqrt(np.maximum(0.0, 1.0 - np.minimum(ip, 1.0) ** 2))
    return np.linalg.norm(e1 - e2, axis=-1)


def section(coords, model):
    """A smooth-off-cut-locus section K/M -> K (batched matrices)."""
    coords = np.asarray(coords)
    if model.name == "H2R":
        half = 0.5 * coords
        c, s = np.cos(half), np.sin(half)
        k = np.zeros(np.shape(coords) + (2, 2), dtype=complex)
        k[..., 0, 0] = c
        k[..., 0, 1] = -s
        k[..., 1, 0] = s
        k[..., 1, 1] = c
        return k
    if model.name == "H3R":
        x, y, z = coords[..., 0], coords[..., 1], coords[..., 2]
        theta = np.arccos(np.clip(z, -1.0, 1.0))
        phi = np.arctan2(y, x)
        ch, sh = np.cos(theta / 2), np.sin(theta / 2)
        k = np.zeros(coords.shape[:-1] + (2, 2), dtype=complex)
        k[..., 0, 0] = ch
        k[..., 0, 1] = -sh * np.exp(-1j * phi)
        k[..., 1, 0] = sh * np.exp(1j * phi)
        k[..., 1, 1] = ch
        return k
    z1, z2 = coords[..., 0], coords[..., 1]
    kp = np.zeros(coords.shape[:-1] + (3, 3), dtype=complex)
    kp[..., 0, 0] = z1
    kp[..., 0, 1] = -np.conj(z2)
    kp[..., 1, 0] = z2
    kp[..., 1, 1] = np.conj(z1)
    kp[..., 2, 2] = 1.0
    return np.einsum("ij,...jk,kl->...il", _PHI3, kp, _PHI3)


@lru_cache(maxsize=None)
def _quad_cache(name, order):
    if name == "H2R":
        n = 4 * order
        psi = np.arange(n) * 2 * np.pi / n
        w = np.full(n, 2 * np.pi / n)
        return psi, w
    if name == "H3R":
        nt, nphi = order, 2 * order
        xs, ws = leggauss(nt)           # cos(theta) in [-1,1]
        phi = np.arange(nphi) * 2 * np.pi / nphi
        ct, ph = np.meshgrid(xs, phi, indexing="ij")
        st = np.sqrt(1 - ct ** 2)
        coords = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
        w = np.broadcast_to(ws[:, None] * (2 * np.pi / nphi), ct.shape)
        return coords.reshape(-1, 3), w.ravel().copy()
    # H2C: tau = sin^2(polar) Gauss-Legendre on [0,1], two uniform angles
    ntau, nxi = order, 2 * order
    xs, ws = leggauss(ntau)
    tau = 0.5 * (xs + 1)
    wt = 0.5 * ws
    xi1 = np.arange(nxi) * 2 * np.pi / nxi
    xi2 = np.arange(nxi) * 2 * np.pi / nxi
    T, X1, X2 = np.meshgrid(tau, xi1, xi2, indexing="ij")
    z1 = np.sqrt(1 - T) * np.exp(1j * X1)
    z2 = np.sqrt(T) * np.exp(1j * X2)
    coords = np.stack([z1, z2], axis=-1).reshape(-1, 2)
    W = np.broadcast_to(
        (0.5 * wt)[:, None, None] * (2 * np.pi / nxi) ** 2, T.shape)
    return coords, W.ravel().copy()


def sphere_quadrature(model, order):
    """(coords, k_reps, weights) with sum(weights) = vol(S^{n-1})."""
    coords, w = _quad_cache(model.name, order)
    return coords, section(coords, model), w


def uniform_boundary(model, count, rng):
    """Uniform random boundary coordinates (w.r.t. dkM / vol)."""
    if model.name == "H2R":
        return rng.uniform(0, 2 * np.pi, size=count)
    if model.name == "H3R":
        v = rng.normal(size=(count, 3))
        return v / np.linalg.norm(v, axis=-1, keepdims=True)
    v = rng.normal(size=(count, 2)) + 1j * rng.normal(size=(count, 2))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
