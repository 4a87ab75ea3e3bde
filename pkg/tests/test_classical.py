import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbrmt import (
    ClassicalEnsembleSpec,
    RandomStream,
    catalan,
    log_jpdf,
    sample_classical,
    semicircle_cdf,
    semicircle_density,
    semicircle_radius,
    wigner_surmise_cdf,
)
from mbrmt.spectra import ks_distance

from oracles import central_difference


def _members(beta, n, count, seed, v2=1.0):
    spec = ClassicalEnsembleSpec(beta=beta, n=n, v2=v2)
    return [sample_classical(spec, RandomStream(seed, j).generator()) for j in range(count)]


# --- sampling -----------------------------------------------------------------


def test_single_site_variance():
    gen = RandomStream(100, 0).generator()
    spec = ClassicalEnsembleSpec(beta=1, n=1)
    draws = np.array([sample_classical(spec, gen).entries[0, 0] for _ in range(100000)])
    var = draws.var()
    se = 2.0 * math.sqrt(2.0 / draws.size)
    assert abs(var - 2.0) < 3.0 * se


def test_goe_element_variance_pattern():
    samples = _members(1, 252, 100, seed=200)
    stack = np.array([s.entries for s in samples])
    var = stack.var(axis=0, ddof=1)
    n_members = stack.shape[0]
    iu = np.triu_indices(252, 1)
    diag = np.diagonal(var)
    off = var[iu]
    # pooled estimates over independent entries; SE of a variance estimate
    # from m members is sigma^2 * sqrt(2/(m-1))
    se_diag = 2.0 * math.sqrt(2.0 / (n_members - 1)) / math.sqrt(diag.size)
    se_off = 1.0 * math.sqrt(2.0 / (n_members - 1)) / math.sqrt(off.size)
    assert abs(diag.mean() - 2.0) < 3.0 * se_diag
    assert abs(off.mean() - 1.0) < 3.0 * se_off
    # per-entry: a loose Bonferroni-style cap over ~32k entries
    zmax_diag = np.max(np.abs(diag - 2.0)) / (2.0 * math.sqrt(2.0 / (n_members - 1)))
    zmax_off = np.max(np.abs(off - 1.0)) / math.sqrt(2.0 / (n_members - 1))
    assert max(zmax_diag, zmax_off) < 5.5


def test_gue_component_variances():
    samples = _members(2, 50, 200, seed=201)
    stack = np.array([s.entries for s in samples])
    m = stack.shape[0]
    iu = np.triu_indices(50, 1)
    diag_var = stack[:, range(50), range(50)].real.var(axis=0, ddof=1)
    re_var = stack[:, iu[0], iu[1]].real.var(axis=0, ddof=1)
    im_var = stack[:, iu[0], iu[1]].imag.var(axis=0, ddof=1)
    se = math.sqrt(2.0 / (m - 1))
    assert abs(diag_var.mean() - 2.0) < 3.0 * 2.0 * se / math.sqrt(diag_var.size)
    assert abs(re_var.mean() - 1.0) < 3.0 * se / math.sqrt(re_var.size)
    assert abs(im_var.mean() - 1.0) < 3.0 * se / math.sqrt(im_var.size)


def test_symmetry_is_bit_exact():
    s1 = _members(1, 40, 3, seed=202)
    for s in s1:
        assert np.array_equal(s.entries, s.entries.T)
    s2 = _members(2, 40, 3, seed=203)
    for s in s2:
        assert np.array_equal(s.entries, s.entries.conj().T)
    s4 = _members(4, 20, 3, seed=204)
    for s in s4:
        assert s.dim == 40
        assert np.array_equal(s.entries, s.entries.conj().T)


def test_gse_quaternion_block_structure():
    # recover the four real component matrices from the stored 2n x 2n
    # realization and check their symmetry classes
    s = _members(4, 12, 1, seed=214)[0]
    n = 12
    tl = s.entries[:n, :n]
    br = s.entries[n:, n:]
    tr = s.entries[:n, n:]
    bl = s.entries[n:, :n]
    h0 = (tl + br).real / 2.0
    h3 = (tl - br).imag / 2.0
    h2 = (tr - bl).real / 2.0
    h1 = (tr + bl).imag / 2.0
    assert np.array_equal(h0, h0.T)
    for hj in (h1, h2, h3):
        assert np.array_equal(hj, -hj.T)
    top = np.hstack([h0 + 1j * h3, h2 + 1j * h1])
    bottom = np.hstack([-h2 + 1j * h1, h0 - 1j * h3])
    assert np.allclose(np.vstack([top, bottom]), s.entries, atol=0)


def test_gse_kramers_doublets():
    for s in _members(4, 2, 10, seed=205):
        w = np.sort(np.linalg.eigvalsh(s.entries))
        assert w.shape == (4,)
        scale = max(1.0, np.max(np.abs(w)))
        assert abs(w[1] - w[0]) / scale < 1e-8
        assert abs(w[3] - w[2]) / scale < 1e-8
    for s in _members(4, 25, 4, seed=206):
        w = np.sort(np.linalg.eigvalsh(s.entries))
        gaps = (w[1::2] - w[0::2]) / max(1.0, np.max(np.abs(w)))
        assert np.max(gaps) < 1e-8


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        ClassicalEnsembleSpec(beta=3, n=5)
    with pytest.raises(ValueError):
        ClassicalEnsembleSpec(beta=1, n=0)
    with pytest.raises(ValueError):
        ClassicalEnsembleSpec(beta=1, n=5, v2=0.0)


# --- semicircle ----------------------------------------------------------------


def test_semicircle_density_values():
    r = 1.7
    assert semicircle_density(0.0, r) == pytest.approx(2.0 / (math.pi * r))
    assert semicircle_density(r, r) == 0.0
    assert semicircle_density(-r, r) == 0.0
    assert semicircle_density(2 * r, r) == 0.0
    with pytest.raises(ValueError):
        semicircle_density(0.0, 0.0)


def test_semicircle_density_normalization():
    from scipy.integrate import quad

    r = 2.3
    integral, _ = quad(lambda x: semicircle_density(x, r), -r, r, epsabs=1e-13, limit=200)
    assert abs(integral - 1.0) < 1e-9


def test_semicircle_cdf_values_and_derivative():
    r = 1.3
    assert semicircle_cdf(0.0, r) == pytest.approx(0.5)
    assert semicircle_cdf(-r, r) == 0.0
    assert semicircle_cdf(r, r) == 1.0
    with pytest.raises(ValueError):
        semicircle_cdf(0.0, -1.0)
    for e in np.linspace(-0.9 * r, 0.9 * r, 25):
        fd = central_difference(lambda x: semicircle_cdf(x, r), e)
        assert abs(fd - semicircle_density(e, r)) < 1e-6


@given(st.floats(-5, 5), st.floats(0.1, 10))
def test_semicircle_cdf_monotone_bounded(e, r):
    val = semicircle_cdf(e, r)
    assert 0.0 <= val <= 1.0
    assert semicircle_cdf(e + 0.1, r) >= val


# --- Catalan numbers -----------------------------------------------------------


def test_catalan_values():
    assert catalan(0) == 1
    assert catalan(1) == 1
    assert catalan(3) == 5
    assert [catalan(p) for p in range(6)] == [1, 1, 2, 5, 14, 42]
    with pytest.raises(ValueError):
        catalan(-1)


@given(st.integers(0, 12))
def test_catalan_recurrence(p):
    assert catalan(p + 1) == sum(catalan(i) * catalan(p - i) for i in range(p + 1))


# --- joint eigenvalue density ---------------------------------------------------


def test_log_jpdf_single_eigenvalue_at_zero():
    for beta in (1, 2, 4):
        assert log_jpdf([0.0], beta) == 0.0


def test_log_jpdf_level_repulsion():
    assert log_jpdf([1.3, 1.3], 1) == -math.inf


def test_log_jpdf_matches_direct_sum():
    gen = RandomStream(207, 0).generator()
    for beta in (1, 2, 4):
        e = gen.standard_normal(6)
        expected = -0.25 * beta * np.sum(e**2)
        for i in range(6):
            for j in range(i + 1, 6):
                expected += beta * math.log(abs(e[i] - e[j]))
        assert log_jpdf(e, beta) == pytest.approx(expected, rel=1e-12)


@settings(max_examples=30)
@given(st.permutations(list(range(5))))
def test_log_jpdf_permutation_invariant(perm):
    e = np.array([-2.0, -0.7, 0.1, 1.1, 2.4])
    assert log_jpdf(e[perm], 1) == pytest.approx(log_jpdf(e, 1), rel=1e-12)


def test_two_by_two_spacings_follow_wigner_surmise():
    # Monte-Carlo oracle: eigenvalue spacings of 1e6 two-dimensional members
    gen = RandomStream(208, 0).generator()
    n = 1_000_000
    h = np.empty((n, 2, 2))
    h[:, 0, 0] = gen.standard_normal(n) * math.sqrt(2.0)
    h[:, 1, 1] = gen.standard_normal(n) * math.sqrt(2.0)
    h[:, 0, 1] = h[:, 1, 0] = gen.standard_normal(n)
    w = np.linalg.eigvalsh(h)
    s = w[:, 1] - w[:, 0]
    s /= s.mean()
    assert ks_distance(s, lambda x: wigner_surmise_cdf(x, 1)) < 0.01


def test_jpdf_spacing_marginal_matches_surmise_shape():
    # integrate exp(log_jpdf) over the center coordinate for fixed spacing
    s_grid = np.linspace(1e-4, 12.0, 400)
    c_grid = np.linspace(-8.0, 8.0, 401)
    dens = np.array(
        [
            np.trapezoid(
                [math.exp(log_jpdf([c - s / 2, c + s / 2], 1)) for c in c_grid], c_grid
            )
            for s in s_grid
        ]
    )
    dens /= np.trapezoid(dens, s_grid)
    mean = np.trapezoid(s_grid * dens, s_grid)
    x = s_grid / mean
    from mbrmt import wigner_surmise

    ref = wigner_surmise(x, 1) / mean
    assert np.max(np.abs(dens - ref)) < 1e-3


# --- density vs semicircle -------------------------------------------------------


def _interior_deviation(pooled, bins=30):
    radius = semicircle_radius(pooled)
    center = pooled.mean()
    counts, edges = np.histogram(pooled, bins=bins)
    width = np.diff(edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    density = counts / (pooled.size * width)
    ref = semicircle_density(centers - center, radius)
    peak = 2.0 / (math.pi * radius)
    interior = (edges[:-1] > center - 0.95 * radius) & (edges[1:] < center + 0.95 * radius)
    return np.max(np.abs(density - ref)[interior]) / peak


def test_goe_density_matches_semicircle():
    pooled = np.concatenate(
        [np.linalg.eigvalsh(s.entries) for s in _members(1, 252, 100, seed=209)]
    )
    assert _interior_deviation(pooled) < 0.05


def test_uniform_deviates_also_give_semicircle():
    # same element variances, uniform instead of Gaussian entries
    gen = RandomStream(210, 0).generator()
    n = 252
    pooled = []
    for _ in range(100):
        h = np.zeros((n, n))
        np.fill_diagonal(h, gen.uniform(-math.sqrt(6.0), math.sqrt(6.0), n))
        iu = np.triu_indices(n, 1)
        h[iu] = gen.uniform(-math.sqrt(3.0), math.sqrt(3.0), len(iu[0]))
        h[(iu[1], iu[0])] = h[iu]
        pooled.append(np.linalg.eigvalsh(h))
    assert _interior_deviation(np.concatenate(pooled)) < 0.05


def test_even_moments_match_catalan_pattern():
    spectra = [np.linalg.eigvalsh(s.entries) for s in _members(1, 252, 100, seed=209)]
    m2 = np.array([np.mean(e**2) for e in spectra])
    m4 = np.array([np.mean(e**4) for e in spectra])
    half_r_sq = m2.mean()  # (R/2)^2 fixed by M2 = (R/2)^2 * C_1
    ratio = m4 / half_r_sq**2
    se = ratio.std(ddof=1) / math.sqrt(ratio.size)
    assert abs(ratio.mean() - catalan(2)) < 3.0 * se
