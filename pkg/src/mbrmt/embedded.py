"""k-body Gaussian ensembles embedded into m-particle spaces.

The defining matrix is an ordinary GOE-patterned symmetric Gaussian over the
k-particle basis (off-diagonal variance ``v2``, diagonal ``2*v2``).  Its
m-particle image is assembled from the exact operator amplitudes of
:func:`mbrmt.basis.apply_kbody_term`; entries between states more than k
particle transfers apart are exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import basis as mb
from .errors import CapacityError
from .rng import RandomStream, as_generator

#: Largest m-particle dimension stored as a dense matrix.
MAX_DENSE_DIM = 4096


@dataclass(frozen=True, eq=False)
class KBodyCoefficients:
    """Symmetric Gaussian coefficient matrix over the k-particle basis."""

    ell: int
    k: int
    statistics: str
    coeffs: np.ndarray
    v2: float = 1.0


@dataclass(frozen=True, eq=False)
class ManyBodyHamiltonian:
    """Dense symmetric m-particle matrix tied to its occupation basis."""

    basis: mb.ManyBodyBasis
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EmbeddedEnsembleSpec:
    """Parameters of one embedded ensemble run.

    ``sp_energies`` plus ``lambda2`` switch on the one-plus-two-body
    composition ``H = h(1) + lambda2 * H(k)``.  The default single-particle
    pattern is unit spacing, ``eps_i = i``; ``sp_energy_mode='goe'`` draws
    them per member as eigenvalues of an ell-dimensional GOE instead.
    """

    ell: int
    m: int
    k: int
    statistics: str
    v2: float = 1.0
    member_count: int = 100
    seed: int = 0
    lambda2: float | None = None
    sp_energies: tuple[float, ...] | None = None
    sp_energy_mode: str = "fixed"

    def __post_init__(self):
        mb._check_statistics(self.statistics)
        if not 1 <= self.k <= self.m:
            raise ValueError(f"need 1 <= k <= m, got k={self.k}, m={self.m}")
        if self.statistics == mb.FERMION and self.m > self.ell:
            raise ValueError(f"cannot place {self.m} fermions in {self.ell} levels")
        if not self.v2 > 0:
            raise ValueError(f"defining variance must be positive, got {self.v2}")
        if self.sp_energy_mode not in ("fixed", "goe"):
            raise ValueError(f"unknown sp_energy_mode {self.sp_energy_mode!r}")
        if self.sp_energies is not None:
            sp = tuple(float(x) for x in self.sp_energies)
            if len(sp) != self.ell:
                raise ValueError(f"need {self.ell} single-particle energies, got {len(sp)}")
            object.__setattr__(self, "sp_energies", sp)

    @property
    def dim(self) -> int:
        return mb.dimension(self.ell, self.m, self.statistics)


def unit_spacing_energies(ell: int) -> tuple[float, ...]:
    """Fixed mean-field pattern eps_i = i, i = 1..ell."""
    return tuple(float(i) for i in range(1, ell + 1))


def sample_kbody(ell: int, k: int, statistics: str, v2: float = 1.0, rng=None) -> KBodyCoefficients:
    """Draw the defining k-body coefficient matrix.

    A symmetric Gaussian with diagonal variance ``2*v2`` and off-diagonal
    variance ``v2`` over the canonically ordered k-particle basis.
    """
    if rng is None:
        raise ValueError("rng is required")
    if k < 1:
        raise ValueError(f"interaction rank must be >= 1, got {k}")
    dk = mb.dimension(ell, k, statistics)
    if dk > MAX_DENSE_DIM:
        raise CapacityError(f"k-particle dimension {dk} exceeds dense cap {MAX_DENSE_DIM}")
    gen = as_generator(rng)
    h = np.zeros((dk, dk))
    np.fill_diagonal(h, gen.standard_normal(dk) * math.sqrt(2.0 * v2))
    iu = np.triu_indices(dk, 1)
    h[iu] = gen.standard_normal(len(iu[0])) * math.sqrt(v2)
    h[(iu[1], iu[0])] = h[iu]
    return KBodyCoefficients(ell=ell, k=k, statistics=statistics, coeffs=h, v2=v2)


@dataclass(frozen=True, eq=False)
class _EmbeddingPlan:
    """Sparse scatter recipe: H[row, col] += coeffs[alpha, gamma] * amp.

    Holds only upper-triangle targets (row <= col); the lower triangle is a
    mirror copy, which keeps the assembled matrix bit-exactly symmetric.
    """

    basis: mb.ManyBodyBasis
    rows: np.ndarray
    cols: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray
    amp: np.ndarray


@lru_cache(maxsize=64)
def _embedding_plan(ell: int, m: int, k: int, statistics: str) -> _EmbeddingPlan:
    space = mb.SingleParticleSpace(ell=ell, statistics=statistics)
    bas = mb.enumerate_basis(space, m)
    ktuples = mb.level_tuples(ell, k, statistics)
    rows, cols, alphas, gammas, amps = [], [], [], [], []
    for ket in range(len(bas)):
        occ = bas.states[ket]
        for gi, gam in enumerate(ktuples):
            # quick feasibility: the annihilators must find their particles
            if statistics == mb.FERMION:
                if any(not occ[lev] for lev in gam):
                    continue
            else:
                need = {}
                for lev in gam:
                    need[lev] = need.get(lev, 0) + 1
                if any(occ[lev] < c for lev, c in need.items()):
                    continue
            for ai, alp in enumerate(ktuples):
                hit = mb.apply_kbody_term(bas, ket, alp, gam)
                if hit is None:
                    continue
                bra, amp = hit
                if bra > ket:
                    continue  # mirrored when the roles of bra and ket swap
                rows.append(bra)
                cols.append(ket)
                alphas.append(ai)
                gammas.append(gi)
                amps.append(amp)
    return _EmbeddingPlan(
        basis=bas,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        alpha=np.asarray(alphas, dtype=np.int64),
        gamma=np.asarray(gammas, dtype=np.int64),
        amp=np.asarray(amps, dtype=float),
    )


def embed(coeffs: KBodyCoefficients, m: int) -> ManyBodyHamiltonian:
    """Propagate the k-body coefficients to the m-particle space.

    ``H(m)[a, b] = sum_{alpha, gamma} v[alpha, gamma] <a| alpha^+ gamma |b>``
    with the amplitudes of :func:`mbrmt.basis.apply_kbody_term`.  The result
    is exactly symmetric and carries the exact k-body selection-rule zeros.
    """
    if m < coeffs.k:
        raise ValueError(f"need m >= k, got m={m}, k={coeffs.k}")
    d = mb.dimension(coeffs.ell, m, coeffs.statistics)
    if d > MAX_DENSE_DIM:
        raise CapacityError(f"m-particle dimension {d} exceeds dense cap {MAX_DENSE_DIM}")
    plan = _embedding_plan(coeffs.ell, m, coeffs.k, coeffs.statistics)
    h = np.zeros((d, d))
    np.add.at(h, (plan.rows, plan.cols), coeffs.coeffs[plan.alpha, plan.gamma] * plan.amp)
    h = np.triu(h) + np.triu(h, 1).T
    return ManyBodyHamiltonian(basis=plan.basis, entries=h)


def one_body_hamiltonian(ell: int, statistics: str, m: int, energies) -> ManyBodyHamiltonian:
    """Number-operator Hamiltonian for fixed single-particle energies."""
    energies = np.asarray(energies, dtype=float)
    if energies.shape != (ell,):
        raise ValueError(f"need {ell} single-particle energies, got shape {energies.shape}")
    coeffs = KBodyCoefficients(ell=ell, k=1, statistics=statistics, coeffs=np.diag(energies))
    return embed(coeffs, m)


def compose_one_plus_two(
    h1: ManyBodyHamiltonian, v2body: ManyBodyHamiltonian, lambda2: float
) -> ManyBodyHamiltonian:
    """Mix a one-body part with a two-body part: ``H = h1 + lambda2 * V``."""
    if h1.basis is not v2body.basis and (
        h1.basis.space != v2body.basis.space or h1.basis.m != v2body.basis.m
    ):
        raise ValueError("one- and two-body parts live on different bases")
    return ManyBodyHamiltonian(basis=h1.basis, entries=h1.entries + lambda2 * v2body.entries)


def sample_member(spec: EmbeddedEnsembleSpec, member_id: int) -> ManyBodyHamiltonian:
    """Sample one ensemble member from its own random stream."""
    gen = RandomStream(spec.seed, member_id).generator()
    if spec.lambda2 is None:
        return embed(sample_kbody(spec.ell, spec.k, spec.statistics, spec.v2, gen), spec.m)
    if spec.sp_energy_mode == "goe":
        a = _goe_matrix(spec.ell, gen)
        energies = np.linalg.eigvalsh(a)
    else:
        energies = np.asarray(spec.sp_energies or unit_spacing_energies(spec.ell))
    h1 = one_body_hamiltonian(spec.ell, spec.statistics, spec.m, energies)
    v = embed(sample_kbody(spec.ell, spec.k, spec.statistics, spec.v2, gen), spec.m)
    return compose_one_plus_two(h1, v, spec.lambda2)


def _goe_matrix(n, gen):
    h = np.zeros((n, n))
    np.fill_diagonal(h, gen.standard_normal(n) * math.sqrt(2.0))
    iu = np.triu_indices(n, 1)
    h[iu] = gen.standard_normal(len(iu[0]))
    h[(iu[1], iu[0])] = h[iu]
    return h


@dataclass(frozen=True, eq=False)
class CrossMomentStats:
    """Covariances of normalized centroids and variances across particle numbers."""

    m_list: tuple[int, ...]
    sigma11: np.ndarray
    sigma22: np.ndarray
    sigma11_stderr: np.ndarray
    sigma22_stderr: np.ndarray


def _cov_with_stderr(x, y):
    px = x - x.mean()
    py = y - y.mean()
    prod = px * py
    n = len(prod)
    return float(prod.mean()), float(prod.std(ddof=1) / math.sqrt(n))


def cross_moment_fluctuations(
    spec: EmbeddedEnsembleSpec, m_list, control: str = "embedded"
) -> CrossMomentStats:
    """Cross-particle-number covariances of spectral centroids and variances.

    The same k-body sample is propagated to every particle number in
    ``m_list``, which is what correlates the spectra; ``control='goe'``
    replaces the members by independent GOE matrices of equal dimensions,
    for which the cross covariances vanish.  Centroids ``tr H / d`` and
    second moments ``tr H^2 / d`` are taken from the raw matrices and the
    covariances are normalized by the ensemble-mean spectral widths, which
    makes the statistics scale-invariant.
    """
    if control not in ("embedded", "goe"):
        raise ValueError(f"unknown control mode {control!r}")
    m_list = tuple(int(m) for m in m_list)
    if spec.member_count < 2:
        raise ValueError("need at least two members for covariances")
    for m in m_list:
        if m < spec.k:
            raise ValueError(f"m={m} below interaction rank k={spec.k}")
        mb.dimension(spec.ell, m, spec.statistics)  # validates

    cents = np.zeros((len(m_list), spec.member_count))
    seconds = np.zeros_like(cents)
    for j in range(spec.member_count):
        gen = RandomStream(spec.seed, j).generator()
        if control == "embedded":
            coeffs = sample_kbody(spec.ell, spec.k, spec.statistics, spec.v2, gen)
            mats = [embed(coeffs, m).entries for m in m_list]
        else:
            mats = [
                _goe_matrix(mb.dimension(spec.ell, m, spec.statistics), gen) for m in m_list
            ]
        for i, h in enumerate(mats):
            d = h.shape[0]
            cents[i, j] = np.trace(h) / d
            seconds[i, j] = float(np.sum(h * h)) / d  # tr(H^2)/d for symmetric H

    widths2 = seconds.mean(axis=1) - cents.mean(axis=1) ** 2
    nm = len(m_list)
    s11 = np.zeros((nm, nm))
    s22 = np.zeros((nm, nm))
    e11 = np.zeros((nm, nm))
    e22 = np.zeros((nm, nm))
    for i in range(nm):
        for i2 in range(nm):
            norm1 = math.sqrt(widths2[i] * widths2[i2])
            norm2 = widths2[i] * widths2[i2]
            c, e = _cov_with_stderr(cents[i], cents[i2])
            s11[i, i2], e11[i, i2] = c / norm1, e / norm1
            c, e = _cov_with_stderr(seconds[i], seconds[i2])
            s22[i, i2], e22[i, i2] = c / norm2, e / norm2
    return CrossMomentStats(
        m_list=m_list, sigma11=s11, sigma22=s22, sigma11_stderr=e11, sigma22_stderr=e22
    )
