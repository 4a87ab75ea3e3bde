"""Occupation-number bases for identical spinless fermions and bosons.

States are occupation vectors over ``ell`` single-particle levels, ordered so
that level 1 is the most significant digit: the first fermion state for
``(ell=4, m=2)`` is ``(1, 1, 0, 0)``.  Creation/annihilation strings act with
the standard sign convention for fermions (phase ``(-1)^(occupied below)``,
operators applied right to left) and square-root occupancy factors plus
normalized-k-particle-state prefactors for bosons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

import numpy as np

from .errors import CapacityError

FERMION = "fermion"
BOSON = "boson"

#: Hard cap on enumerated basis sizes; beyond this, refuse instead of swapping.
MAX_BASIS_STATES = 2_000_000


def _check_statistics(statistics: str) -> str:
    if statistics not in (FERMION, BOSON):
        raise ValueError(f"statistics must be '{FERMION}' or '{BOSON}', got {statistics!r}")
    return statistics


@dataclass(frozen=True)
class SingleParticleSpace:
    """``ell`` degenerate single-particle levels with fixed exchange statistics.

    ``orbit_partition`` optionally groups the levels into orbits of the given
    capacities (summing to ``ell``) for configuration-block analysis.
    """

    ell: int
    statistics: str
    orbit_partition: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError(f"need at least one single-particle level, got ell={self.ell}")
        _check_statistics(self.statistics)
        if self.orbit_partition is not None:
            part = tuple(int(c) for c in self.orbit_partition)
            if any(c < 1 for c in part):
                raise ValueError(f"orbit capacities must be positive, got {part}")
            if sum(part) != self.ell:
                raise ValueError(f"orbit capacities {part} do not sum to ell={self.ell}")
            object.__setattr__(self, "orbit_partition", part)


def dimension(ell: int, m: int, statistics: str) -> int:
    """Dimension of the m-particle space over ell levels.

    ``binom(ell, m)`` for fermions, ``binom(ell + m - 1, m)`` for bosons.
    """
    _check_statistics(statistics)
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if m < 0:
        raise ValueError(f"particle number must be >= 0, got {m}")
    if statistics == FERMION:
        if m > ell:
            raise ValueError(f"cannot place {m} fermions in {ell} levels")
        return math.comb(ell, m)
    return math.comb(ell + m - 1, m)


@dataclass(frozen=True, eq=False)
class ManyBodyBasis:
    """Complete ordered list of occupation vectors with O(1) inverse lookup."""

    space: SingleParticleSpace
    m: int
    states: tuple[tuple[int, ...], ...]
    index: dict

    def index_of(self, occ) -> int:
        return self.index[tuple(occ)]

    def __len__(self) -> int:
        return len(self.states)


def _occ_from_levels(levels, ell: int) -> tuple[int, ...]:
    occ = [0] * ell
    for p in levels:
        occ[p] += 1
    return tuple(occ)


def enumerate_basis(space: SingleParticleSpace, m: int) -> ManyBodyBasis:
    """Enumerate all m-particle occupation vectors in canonical order.

    Canonical order is ascending lexicographic in the tuple of occupied
    levels, i.e. descending lexicographic in the occupation vector.
    """
    d = dimension(space.ell, m, space.statistics)
    if d > MAX_BASIS_STATES:
        raise CapacityError(f"basis of dimension {d} exceeds cap {MAX_BASIS_STATES}")
    if space.statistics == FERMION:
        level_tuples = combinations(range(space.ell), m)
    else:
        level_tuples = combinations_with_replacement(range(space.ell), m)
    states = tuple(_occ_from_levels(t, space.ell) for t in level_tuples)
    index = {occ: i for i, occ in enumerate(states)}
    return ManyBodyBasis(space=space, m=m, states=states, index=index)


def level_tuples(ell: int, k: int, statistics: str):
    """Canonically ordered k-particle level tuples (the k-particle basis)."""
    _check_statistics(statistics)
    if statistics == FERMION:
        return list(combinations(range(ell), k))
    return list(combinations_with_replacement(range(ell), k))


def _validate_tuple(tup, ell: int, statistics: str, name: str):
    tup = tuple(int(t) for t in tup)
    if any(not 0 <= t < ell for t in tup):
        raise ValueError(f"{name} tuple {tup} has levels outside [0, {ell})")
    if statistics == FERMION:
        if any(a >= b for a, b in zip(tup, tup[1:])):
            raise ValueError(f"fermion {name} tuple must be strictly increasing, got {tup}")
    elif any(a > b for a, b in zip(tup, tup[1:])):
        raise ValueError(f"boson {name} tuple must be nondecreasing, got {tup}")
    return tup


def _boson_norm(tup) -> float:
    # 1/sqrt(prod of level multiplicities!) so the k-particle state has unit norm
    prod = 1
    run = 1
    for a, b in zip(tup, tup[1:]):
        run = run + 1 if a == b else 1
        if run > 1:
            prod *= run
    return 1.0 / math.sqrt(prod)


def apply_kbody_term(basis: ManyBodyBasis, ket_index: int, create, annihilate):
    """Matrix element of one normal-ordered k-body term on a basis ket.

    Applies the annihilation string for ``annihilate`` and then the creation
    string for ``create`` to ``|ket_index>``.  Returns ``(bra_index,
    amplitude)`` with the fermionic permutation sign or the bosonic
    sqrt-occupancy factors (including the unit-normalization prefactors of the
    k-particle states), or ``None`` when the action annihilates the state.
    """
    statistics = basis.space.statistics
    ell = basis.space.ell
    create = _validate_tuple(create, ell, statistics, "create")
    annihilate = _validate_tuple(annihilate, ell, statistics, "annihilate")
    if len(create) != len(annihilate):
        raise ValueError(
            f"create/annihilate ranks differ: {len(create)} vs {len(annihilate)}"
        )
    occ = list(basis.states[ket_index])

    if statistics == FERMION:
        sign = 1
        # annihilators act right to left: ascending level order
        for lev in annihilate:
            if not occ[lev]:
                return None
            if sum(occ[:lev]) % 2:
                sign = -sign
            occ[lev] = 0
        for lev in reversed(create):
            if occ[lev]:
                return None
            if sum(occ[:lev]) % 2:
                sign = -sign
            occ[lev] = 1
        return basis.index_of(occ), float(sign)

    amp = _boson_norm(create) * _boson_norm(annihilate)
    for lev in annihilate:
        n = occ[lev]
        if n == 0:
            return None
        amp *= math.sqrt(n)
        occ[lev] = n - 1
    for lev in create:
        amp *= math.sqrt(occ[lev] + 1)
        occ[lev] += 1
    return basis.index_of(occ), amp


def transfer_distance(a, b) -> int:
    """Minimal number of particles moved between two occupation vectors."""
    a = tuple(a)
    b = tuple(b)
    if len(a) != len(b):
        raise ValueError(f"occupation vectors live in different spaces: {len(a)} vs {len(b)}")
    if sum(a) != sum(b):
        raise ValueError(f"particle numbers differ: {sum(a)} vs {sum(b)}")
    return sum(abs(x - y) for x, y in zip(a, b)) // 2


@dataclass(frozen=True)
class ConfigurationBlock:
    """Per-orbit particle counts and the resulting sub-space dimension."""

    occupancies: tuple[int, ...]
    dim: int


def configuration_blocks(capacities, m: int) -> list[ConfigurationBlock]:
    """All feasible per-orbit fermion occupancies, sorted by decreasing dimension.

    ``capacities`` may be a tuple of orbit capacities or a
    ``SingleParticleSpace`` carrying an ``orbit_partition``.  The block
    dimensions satisfy the Vandermonde convolution: they sum to
    ``binom(sum(capacities), m)``.
    """
    if isinstance(capacities, SingleParticleSpace):
        if capacities.orbit_partition is None:
            raise ValueError("space has no orbit_partition")
        capacities = capacities.orbit_partition
    caps = tuple(int(c) for c in capacities)
    if not caps or any(c < 1 for c in caps):
        raise ValueError(f"orbit capacities must be positive, got {caps}")
    if m < 0 or m > sum(caps):
        return []

    blocks = []

    def fill(orbit, remaining, acc):
        if orbit == len(caps) - 1:
            if remaining <= caps[orbit]:
                occ = acc + (remaining,)
                dim = math.prod(math.comb(c, o) for c, o in zip(caps, occ))
                blocks.append(ConfigurationBlock(occ, dim))
            return
        tail = sum(caps[orbit + 1:])
        for o in range(max(0, remaining - tail), min(caps[orbit], remaining) + 1):
            fill(orbit + 1, remaining - o, acc + (o,))

    fill(0, m, ())
    blocks.sort(key=lambda blk: (-blk.dim, blk.occupancies))
    return blocks


def block_transfer_matrix(blocks) -> np.ndarray:
    """Pairwise particle-transfer distances between configuration blocks."""
    occ = np.array([b.occupancies for b in blocks], dtype=np.int64)
    return np.abs(occ[:, None, :] - occ[None, :, :]).sum(axis=2) // 2
