"""Classical Gaussian random-matrix ensembles and their analytic references.

Matrices are sampled component-wise so the symmetry class holds bit-exactly:
real symmetric (Dyson index 1), complex Hermitian (2), and the quaternion-real
structure ``H0 x I + i sum_j Hj x sigma_j`` stored as its 2n x 2n complex
Hermitian realization (4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import as_generator

DYSON_INDICES = (1, 2, 4)


@dataclass(frozen=True)
class ClassicalEnsembleSpec:
    """Dyson index, matrix dimension and defining element variance.

    For ``beta=4`` the dimension ``n`` counts quaternion rows; the stored
    realization is a ``2n x 2n`` complex Hermitian matrix.
    """

    beta: int
    n: int
    v2: float = 1.0

    def __post_init__(self):
        if self.beta not in DYSON_INDICES:
            raise ValueError(f"beta must be one of {DYSON_INDICES}, got {self.beta}")
        if self.n < 1:
            raise ValueError(f"matrix dimension must be >= 1, got {self.n}")
        if not self.v2 > 0:
            raise ValueError(f"element variance must be positive, got {self.v2}")

    @property
    def stored_dim(self) -> int:
        return 2 * self.n if self.beta == 4 else self.n


@dataclass(frozen=True, eq=False)
class MatrixSample:
    """One sampled ensemble member."""

    beta: int
    entries: np.ndarray
    dim: int


def _symmetric_gaussian(n, v2, gen):
    """Real symmetric matrix, diagonal variance 2*v2, off-diagonal v2."""
    h = np.zeros((n, n))
    np.fill_diagonal(h, gen.standard_normal(n) * math.sqrt(2.0 * v2))
    iu = np.triu_indices(n, 1)
    h[iu] = gen.standard_normal(len(iu[0])) * math.sqrt(v2)
    h[(iu[1], iu[0])] = h[iu]
    return h


def _symmetric_gaussian_flat(n, v2, gen):
    """Real symmetric matrix with every independent entry of variance v2."""
    h = np.zeros((n, n))
    np.fill_diagonal(h, gen.standard_normal(n) * math.sqrt(v2))
    iu = np.triu_indices(n, 1)
    h[iu] = gen.standard_normal(len(iu[0])) * math.sqrt(v2)
    h[(iu[1], iu[0])] = h[iu]
    return h


def _antisymmetric_gaussian(n, v2, gen):
    h = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    h[iu] = gen.standard_normal(len(iu[0])) * math.sqrt(v2)
    h[(iu[1], iu[0])] = -h[iu]
    return h


def sample_classical(spec: ClassicalEnsembleSpec, rng) -> MatrixSample:
    """Draw one member of the classical ensemble given by ``spec``.

    Component rules: independent Gaussians with zero mean; for the real
    symmetric class the diagonal has variance ``2*v2`` and off-diagonal
    entries variance ``v2``.  The Hermitian class carries the same pattern
    with independent real and imaginary off-diagonal parts (upper triangle
    ``c - i d``); the quaternion-real class uses one symmetric and three
    antisymmetric real component matrices with i.i.d. entries.
    """
    gen = as_generator(rng)
    v2 = spec.v2
    n = spec.n
    if spec.beta == 1:
        return MatrixSample(1, _symmetric_gaussian(n, v2, gen), n)
    if spec.beta == 2:
        h = np.zeros((n, n), dtype=complex)
        np.fill_diagonal(h, gen.standard_normal(n) * math.sqrt(2.0 * v2))
        iu = np.triu_indices(n, 1)
        re = gen.standard_normal(len(iu[0])) * math.sqrt(v2)
        im = gen.standard_normal(len(iu[0])) * math.sqrt(v2)
        h[iu] = re - 1j * im
        h[(iu[1], iu[0])] = re + 1j * im
        return MatrixSample(2, h, n)
    h0 = _symmetric_gaussian_flat(n, v2, gen)
    h1 = _antisymmetric_gaussian(n, v2, gen)
    h2 = _antisymmetric_gaussian(n, v2, gen)
    h3 = _antisymmetric_gaussian(n, v2, gen)
    top = np.hstack([h0 + 1j * h3, h2 + 1j * h1])
    bottom = np.hstack([-h2 + 1j * h1, h0 - 1j * h3])
    return MatrixSample(4, np.vstack([top, bottom]), 2 * n)


def semicircle_density(e, r: float):
    """Semicircle eigenvalue density ``2 sqrt(r^2 - e^2) / (pi r^2)``."""
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    e = np.asarray(e, dtype=float)
    inside = np.abs(e) <= r
    out = np.zeros_like(e)
    out[inside] = 2.0 * np.sqrt(r * r - e[inside] ** 2) / (math.pi * r * r)
    if out.ndim == 0:
        return float(out)
    return out


def semicircle_cdf(e, r: float):
    """Integrated semicircle density; 0 at ``-r``, 1 at ``+r``.

    Values outside the support clip to 0 or 1.
    """
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    e = np.asarray(e, dtype=float)
    x = np.clip(e, -r, r)
    out = 0.5 + x * np.sqrt(r * r - x * x) / (math.pi * r * r) + np.arcsin(x / r) / math.pi
    if out.ndim == 0:
        return float(out)
    return out


def semicircle_radius(eigenvalues) -> float:
    """Best-fit radius from the second moment: R = 2 * std (M2 = R^2/4)."""
    return 2.0 * float(np.std(np.asarray(eigenvalues, dtype=float)))


def catalan(p: int) -> int:
    """Catalan number C_p = binom(2p, p) / (p + 1), exact."""
    if p < 0:
        raise ValueError(f"Catalan index must be >= 0, got {p}")
    return math.comb(2 * p, p) // (p + 1)


def log_jpdf(eigs, beta: int) -> float:
    """Unnormalized log joint eigenvalue density.

    ``beta * sum_{i<j} log|E_i - E_j| - (beta/4) * sum_i E_i^2``.  Repeated
    eigenvalues give ``-inf`` (level repulsion), not an error.  The
    normalization constant is omitted.
    """
    if beta not in DYSON_INDICES:
        raise ValueError(f"beta must be one of {DYSON_INDICES}, got {beta}")
    e = np.asarray(eigs, dtype=float)
    if e.ndim != 1 or e.size == 0:
        raise ValueError("need a nonempty 1-d eigenvalue list")
    gauss = -0.25 * beta * float(np.sum(e * e))
    if e.size == 1:
        return gauss
    iu = np.triu_indices(e.size, 1)
    diffs = np.abs(e[iu[0]] - e[iu[1]])
    if np.any(diffs == 0.0):
        return float("-inf")
    return beta * float(np.sum(np.log(diffs))) + gauss
