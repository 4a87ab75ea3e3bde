"""Qubit dephasing against random many-body environments.

One qubit couples to an N-dimensional random environment through
``H = Hq x 1 + 1 x He + lam * sigma_z x Ve`` with ``Hq = sigma_z / 2``.
``He`` is stored as the diagonal of an unfolded spectrum (unit mean level
spacing, hbar = 1, Heisenberg time 2*pi); the coupling commutes with the
qubit Hamiltonian, so the two qubit sectors evolve under ``He +/- lam*Ve``
and the full 2N-dimensional evolution reduces to two N-dimensional ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import basis as mb
from .classical import ClassicalEnsembleSpec, sample_classical
from .embedded import embed, sample_kbody
from .errors import ConfigError
from .rng import RandomStream, as_generator
from .spectra import unfold

T_HEISENBERG = 2.0 * math.pi

ENV_KINDS = ("goe", "fegoe", "begoe")
V_BASIS_MODES = ("he_eigenbasis", "occupation_basis")


def default_time_grid(points: int = 512, t_max: float = 10.0 * T_HEISENBERG) -> tuple[float, ...]:
    return tuple(np.linspace(0.0, t_max, points))


@dataclass(frozen=True)
class QubitEnvSpec:
    """Environment kind, coupling, initial state and sampling parameters.

    ``env_kind='goe'`` uses dimension ``n``; the embedded kinds use
    ``(ell, m)`` with interaction ranks ``k_h`` for the environment
    Hamiltonian and ``k_v`` for the coupling operator.  The coupling matrix is
    sampled in the occupation basis and by default stays there while the
    environment Hamiltonian is replaced by its unfolded eigenvalue diagonal;
    ``v_basis_mode='he_eigenbasis'`` instead rotates the coupling into the
    eigenbasis of the sampled environment Hamiltonian first.  The two modes
    are statistically identical for the orthogonally invariant classical kind
    but differ for the embedded kinds; only the default reproduces the
    slowest-to-fastest purity-decay ordering (classical, then fermionic, then
    two-level bosonic environments) at weak coupling.
    """

    env_kind: str
    coupling: float
    member_count: int = 100
    seed: int = 0
    time_grid: tuple[float, ...] = field(default_factory=default_time_grid)
    n: int | None = None
    ell: int | None = None
    m: int | None = None
    k_h: int = 2
    k_v: int = 1
    qubit_initial: object = "sigma_x_plus"
    v_basis_mode: str = "occupation_basis"

    def __post_init__(self):
        if self.env_kind not in ENV_KINDS:
            raise ConfigError(f"env_kind must be one of {ENV_KINDS}, got {self.env_kind!r}")
        if self.coupling < 0:
            raise ConfigError(f"coupling must be nonnegative, got {self.coupling}")
        if self.member_count < 1:
            raise ConfigError(f"member_count must be >= 1, got {self.member_count}")
        if self.v_basis_mode not in V_BASIS_MODES:
            raise ConfigError(f"v_basis_mode must be one of {V_BASIS_MODES}")
        grid = tuple(float(t) for t in self.time_grid)
        if not grid or grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("time grid must start at 0 and be strictly increasing")
        object.__setattr__(self, "time_grid", grid)
        if self.env_kind == "goe":
            if self.n is None or self.n < 2:
                raise ConfigError("goe environment needs a dimension n >= 2")
        else:
            if self.ell is None or self.m is None:
                raise ConfigError(f"{self.env_kind} environment needs ell and m")
            stats = mb.FERMION if self.env_kind == "fegoe" else mb.BOSON
            if stats == mb.FERMION and self.m > self.ell:
                raise ConfigError(f"cannot place {self.m} fermions in {self.ell} levels")
            if not 1 <= self.k_v <= self.m or not 1 <= self.k_h <= self.m:
                raise ConfigError("interaction ranks must satisfy 1 <= k <= m")
        if not isinstance(self.qubit_initial, str):
            amps = np.asarray(self.qubit_initial, dtype=complex)
            if amps.shape != (2,) or np.linalg.norm(amps) == 0:
                raise ConfigError("custom qubit state needs two amplitudes with nonzero norm")

    @property
    def env_dim(self) -> int:
        if self.env_kind == "goe":
            return int(self.n)
        stats = mb.FERMION if self.env_kind == "fegoe" else mb.BOSON
        return mb.dimension(self.ell, self.m, stats)


@dataclass(frozen=True, eq=False)
class EnvironmentPair:
    """Unfolded environment levels and the coupling matrix for one member."""

    he_diagonal: np.ndarray
    ve: np.ndarray


@dataclass(frozen=True, eq=False)
class PurityTrace:
    times: np.ndarray
    mean_purity: np.ndarray
    stderr: np.ndarray
    member_purities: np.ndarray | None = None


def _mirror_symmetric(a: np.ndarray) -> np.ndarray:
    return np.triu(a) + np.triu(a, 1).T


def build_environment(spec: QubitEnvSpec, rng) -> EnvironmentPair:
    """Sample one environment member: unfolded diagonal plus coupling matrix.

    The generating matrix is diagonalized and its full spectrum unfolded to
    unit mean spacing with zero edge trim (semicircle map for the classical
    kind, a Hermite-corrected Gaussian from the member's own moments for the
    embedded kinds).
    """
    gen = as_generator(rng)
    if spec.env_kind == "goe":
        h = sample_classical(ClassicalEnsembleSpec(beta=1, n=spec.n), gen).entries
        v = sample_classical(ClassicalEnsembleSpec(beta=1, n=spec.n), gen).entries
        method = "ensemble-semicircle"
    else:
        stats = mb.FERMION if spec.env_kind == "fegoe" else mb.BOSON
        h = embed(sample_kbody(spec.ell, spec.k_h, stats, 1.0, gen), spec.m).entries
        v = embed(sample_kbody(spec.ell, spec.k_v, stats, 1.0, gen), spec.m).entries
        method = "spectral-edgeworth"
    w, basis_w = np.linalg.eigh(h)
    he = unfold(w, method, edge_trim=0.0).values
    if spec.v_basis_mode == "he_eigenbasis":
        v = _mirror_symmetric(basis_w.T @ v @ basis_w)
    return EnvironmentPair(he_diagonal=he, ve=v)


def _qubit_amplitudes(spec: QubitEnvSpec) -> np.ndarray:
    if spec.qubit_initial == "sigma_x_plus":
        return np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    if spec.qubit_initial == "sigma_z_eigenstate":
        return np.array([1.0, 0.0], dtype=complex)
    amps = np.asarray(spec.qubit_initial, dtype=complex)
    return amps / np.linalg.norm(amps)


def sample_environment_state(dim: int, rng) -> np.ndarray:
    """Real Gaussian unit vector: the orthogonally invariant random state."""
    gen = as_generator(rng)
    psi = gen.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def initial_state(spec: QubitEnvSpec, rng) -> np.ndarray:
    """Product state ``psi_q (x) psi_e`` laid out qubit-major."""
    amps = _qubit_amplitudes(spec)
    psi_e = sample_environment_state(spec.env_dim, rng)
    return np.kron(amps, psi_e.astype(complex))


def assemble_dephasing_hamiltonian(he_diagonal, ve, coupling: float) -> np.ndarray:
    """Full 2N x 2N matrix of the dephasing model, qubit-major blocks."""
    he = np.asarray(he_diagonal, dtype=float)
    n = he.size
    top = np.diag(he + 0.5) + coupling * ve
    bottom = np.diag(he - 0.5) - coupling * ve
    h = np.zeros((2 * n, 2 * n))
    h[:n, :n] = top
    h[n:, n:] = bottom
    return h


def evolve_full(h, psi0, t: float) -> np.ndarray:
    """State at time t under ``exp(-i H t)`` via eigendecomposition."""
    h = np.asarray(h)
    scale = max(1.0, float(np.max(np.abs(h))))
    if float(np.max(np.abs(h - h.conj().T))) > 1e-12 * scale:
        raise ValueError("Hamiltonian is not symmetric")
    w, u = np.linalg.eigh(h)
    return u @ (np.exp(-1j * w * t) * (u.conj().T @ np.asarray(psi0, dtype=complex)))


def evolve_dephasing_fast(env: EnvironmentPair, coupling: float, psi_e, time_grid) -> np.ndarray:
    """Coherence amplitude ``f(t) = <psi_e| e^{+iH-t} e^{-iH+t} |psi_e>``.

    ``H+- = diag(he) +- coupling * Ve`` are diagonalized once each; the whole
    time grid then costs two dense products.  The reduced qubit state has
    off-diagonal ``a conj(b) f(t) e^{-it}`` and purity
    ``|a|^4 + |b|^4 + 2 |a b|^2 |f(t)|^2``.
    """
    he = np.asarray(env.he_diagonal, dtype=float)
    t = np.asarray(time_grid, dtype=float)
    hp = coupling * env.ve + np.diag(he)
    hm = -coupling * env.ve + np.diag(he)
    wp, up = np.linalg.eigh(hp)
    wm, um = np.linalg.eigh(hm)
    psi = np.asarray(psi_e, dtype=float)
    a = up.T @ psi
    b = um.T @ psi
    cross = (b[:, None] * (um.T @ up)) * a[None, :]
    phased = cross @ np.exp(-1j * np.outer(wp, t))  # (N, T)
    return np.sum(np.exp(1j * np.outer(wm, t)) * phased, axis=0)


def reduced_density(state) -> np.ndarray:
    """Trace out the environment of a qubit-major composite state."""
    psi = np.asarray(state, dtype=complex)
    if psi.ndim != 1 or psi.size % 2:
        raise ValueError(f"composite state must have even length, got shape {psi.shape}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-6")
    blocks = psi.reshape(2, -1)
    return blocks @ blocks.conj().T


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def _member_purities_fast(spec, env, psi_e, amps) -> np.ndarray:
    f = evolve_dephasing_fast(env, spec.coupling, psi_e, spec.time_grid)
    pa = float(np.abs(amps[0]) ** 2)
    pb = float(np.abs(amps[1]) ** 2)
    return pa * pa + pb * pb + 2.0 * pa * pb * np.abs(f) ** 2


def _member_purities_full(spec, env, psi_e, amps) -> np.ndarray:
    h = assemble_dephasing_hamiltonian(env.he_diagonal, env.ve, spec.coupling)
    w, u = np.linalg.eigh(h)
    psi0 = np.kron(amps, psi_e.astype(complex))
    coeff = u.T @ psi0  # u is real orthogonal here
    out = np.empty(len(spec.time_grid))
    for i, t in enumerate(spec.time_grid):
        psi_t = u @ (np.exp(-1j * w * t) * coeff)
        out[i] = purity(reduced_density(psi_t))
    return out


def member_purity(spec: QubitEnvSpec, member_id: int, engine: str = "fast") -> np.ndarray:
    """Purity of one ensemble member over the time grid, from its own stream."""
    if engine not in ("fast", "full"):
        raise ConfigError(f"unknown engine {engine!r}")
    gen = RandomStream(spec.seed, member_id).generator()
    env = build_environment(spec, gen)
    psi_e = sample_environment_state(spec.env_dim, gen)
    amps = _qubit_amplitudes(spec)
    if engine == "fast":
        return _member_purities_fast(spec, env, psi_e, amps)
    return _member_purities_full(spec, env, psi_e, amps)


def purity_trace(spec: QubitEnvSpec, engine: str = "fast", keep_members: bool = False) -> PurityTrace:
    """Ensemble-averaged qubit purity over the time grid.

    Each member draws its environment and initial state from its own stream;
    the mean of the member purities equals the trace of the averaged squared
    reduced state by linearity.  ``engine='full'`` evolves the complete
    2N-dimensional system instead of the two-sector fast path (cross-check
    use).
    """
    traces = np.empty((spec.member_count, len(spec.time_grid)))
    for j in range(spec.member_count):
        traces[j] = member_purity(spec, j, engine)
    mean = traces.mean(axis=0)
    if spec.member_count > 1:
        err = traces.std(axis=0, ddof=1) / math.sqrt(spec.member_count)
    else:
        err = np.zeros_like(mean)
    return PurityTrace(
        times=np.asarray(spec.time_grid),
        mean_purity=mean,
        stderr=err,
        member_purities=traces if keep_members else None,
    )


def first_crossing_time(times, values, threshold: float) -> float:
    """First time the curve drops below the threshold, linearly interpolated."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    below = np.nonzero(values < threshold)[0]
    if below.size == 0:
        return math.inf
    i = int(below[0])
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    v0, v1 = values[i - 1], values[i]
    return float(t0 + (threshold - v0) * (t1 - t0) / (v1 - v0))
