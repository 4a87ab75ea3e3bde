"""Spectral one- and two-point statistics.

Covers dense symmetric eigensolves, central moments, Hermite-corrected
Gaussian densities, unfolding to unit mean spacing, nearest-neighbor spacing
histograms, the number variance over sliding windows, the least-squares
staircase rigidity statistic, and the spectral-vs-ensemble unfolding
correction for centroid/width scatter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import ndtr

from .classical import semicircle_cdf, semicircle_density, semicircle_radius

EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues of one ensemble member."""

    eigenvalues: np.ndarray
    member_id: int = 0
    label: str = ""


@dataclass(frozen=True)
class MemberMoments:
    centroid: float
    variance: float
    gamma1: float
    gamma2: float


@dataclass(frozen=True, eq=False)
class UnfoldedSpectrum:
    """Levels mapped to unit mean spacing; edges trimmed before statistics."""

    values: np.ndarray
    method: str
    edge_trim: float


@dataclass(frozen=True, eq=False)
class StatCurve:
    """Statistic on a grid with standard errors and labeled reference curves."""

    grid: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    references: dict = field(default_factory=dict)
    bin_edges: np.ndarray | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise ValueError("abscissa grid must be 1-d and strictly increasing")
        if len(self.values) != grid.size or len(self.stderr) != grid.size:
            raise ValueError("value and stderr counts must match the grid")


def eigvals_symmetric(matrix, member_id: int = 0, label: str = "") -> Spectrum:
    """Full ascending spectrum of a real symmetric or complex Hermitian matrix."""
    h = np.asarray(matrix)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"need a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    asym = float(np.max(np.abs(h - h.conj().T)))
    if asym > 1e-12 * scale:
        raise ValueError(f"matrix is not symmetric: max asymmetry {asym:.3e}")
    return Spectrum(np.linalg.eigvalsh(h), member_id=member_id, label=label)


def _values(spectrum) -> np.ndarray:
    if isinstance(spectrum, Spectrum):
        return np.asarray(spectrum.eigenvalues, dtype=float)
    if isinstance(spectrum, UnfoldedSpectrum):
        return np.asarray(spectrum.values, dtype=float)
    return np.asarray(spectrum, dtype=float)


def moments(spectrum) -> MemberMoments:
    """Centroid, variance, skewness and excess kurtosis of one spectrum."""
    e = _values(spectrum)
    if e.size < 4:
        raise ValueError(f"need at least 4 levels for four moments, got {e.size}")
    c = float(e.mean())
    x = e - c
    var = float(np.mean(x * x))
    if var == 0.0:
        raise ValueError("degenerate spectrum: zero variance")
    m3 = float(np.mean(x**3))
    m4 = float(np.mean(x**4))
    return MemberMoments(
        centroid=c,
        variance=var,
        gamma1=m3 / var**1.5,
        gamma2=m4 / var**2 - 3.0,
    )


def kramers_deduplicate(eigenvalues) -> np.ndarray:
    """Collapse the exact doublets of a quaternion-real spectrum to one level each."""
    e = np.sort(np.asarray(eigenvalues, dtype=float))
    if e.size % 2:
        raise ValueError(f"doublet spectrum must have even length, got {e.size}")
    return e.reshape(-1, 2).mean(axis=1)


# --- Hermite-corrected Gaussian (probabilists' polynomials) -----------------


def _he3(x):
    return x**3 - 3 * x


def _he4(x):
    return x**4 - 6 * x**2 + 3


def _he6(x):
    return x**6 - 15 * x**4 + 45 * x**2 - 15


def edgeworth_density(e, gamma1: float = 0.0, gamma2: float = 0.0):
    """Gaussian density with third/fourth-moment Hermite corrections.

    Evaluated at normalized energies (zero centroid, unit variance).  The
    correction series may dip negative in the far tails; callers relying on
    positivity should restrict to the bulk.
    """
    x = np.asarray(e, dtype=float)
    base = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    corr = 1.0 + gamma1 / 6.0 * _he3(x) + gamma2 / 24.0 * _he4(x) + gamma1**2 / 72.0 * _he6(x)
    out = base * corr
    if out.ndim == 0:
        return float(out)
    return out


def edgeworth_cdf(e, gamma1: float = 0.0, gamma2: float = 0.0):
    """Closed-form integral of :func:`edgeworth_density`.

    Uses d/dx[-phi(x) He_{n-1}(x)] = phi(x) He_n(x), so each correction term
    integrates to an explicit Hermite-times-Gaussian boundary term.
    """
    x = np.asarray(e, dtype=float)
    phi = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    he2 = x * x - 1.0
    he5 = x**5 - 10 * x**3 + 15 * x
    out = ndtr(x) - phi * (gamma1 / 6.0 * he2 + gamma2 / 24.0 * _he3(x) + gamma1**2 / 72.0 * he5)
    if out.ndim == 0:
        return float(out)
    return out


# --- Unfolding ---------------------------------------------------------------

UNFOLD_METHODS = ("ensemble-semicircle", "spectral-edgeworth", "polynomial")


def unfold(
    spectrum,
    method: str = "spectral-edgeworth",
    edge_trim: float = 0.1,
    *,
    radius: float | None = None,
    center: float | None = None,
    scale: float | None = None,
    gamma1: float | None = None,
    gamma2: float | None = None,
    order: int = 7,
) -> UnfoldedSpectrum:
    """Map a spectrum through a smooth cumulative density to unit mean spacing.

    ``ensemble-semicircle`` uses the integrated semicircle with best-fit (or
    given) center and radius; ``spectral-edgeworth`` uses the Hermite-corrected
    Gaussian built from the member's own (or given) moments; ``polynomial``
    fits the counting staircase with a degree-``order`` polynomial.  After the
    map, an ``edge_trim`` fraction of levels is dropped at each end and the
    retained values are rescaled so the mean nearest-neighbor spacing is
    exactly one.

    Raises :class:`~mbrmt.errors.UnfoldingError` when the fitted cumulative
    density decreases anywhere over the data (possible for the Edgeworth and
    polynomial forms); increasing the trim or lowering the order usually cures
    it.  With the semicircle map, levels beyond the fitted edge collapse onto
    it; keep a nonzero trim when that matters.
    """
    from .errors import UnfoldingError

    e = np.sort(_values(spectrum))
    n = e.size
    if n < 10:
        raise ValueError(f"refusing to unfold fewer than 10 levels, got {n}")
    if not 0.0 <= edge_trim < 0.5:
        raise ValueError(f"edge_trim must lie in [0, 0.5), got {edge_trim}")

    if method == "ensemble-semicircle":
        c = float(e.mean()) if center is None else center
        r = semicircle_radius(e) if radius is None else radius
        mapped = n * semicircle_cdf(e - c, r)
        label = method
    elif method == "spectral-edgeworth":
        if gamma1 is None or gamma2 is None:
            mom = moments(e)
            g1 = mom.gamma1 if gamma1 is None else gamma1
            g2 = mom.gamma2 if gamma2 is None else gamma2
        else:
            g1, g2 = gamma1, gamma2
        c = float(e.mean()) if center is None else center
        s = float(e.std()) if scale is None else scale
        mapped = n * edgeworth_cdf((e - c) / s, g1, g2)
        label = method
    elif method == "polynomial":
        staircase = np.arange(n, dtype=float) + 0.5
        fit = np.polynomial.Polynomial.fit(e, staircase, order)
        mapped = fit(e)
        label = f"polynomial({order})"
    else:
        raise ValueError(f"unknown unfolding method {method!r}")

    t = int(math.floor(n * edge_trim))
    kept = mapped[t : n - t] if t else mapped
    if kept.size < 2:
        raise ValueError("edge trim leaves fewer than 2 levels")
    # quasi-degenerate input levels leave roundoff-size dips in the mapped
    # values; only dips beyond roundoff scale mean the map itself decreases
    if np.any(np.diff(kept) < -1e-9 * n):
        raise UnfoldingError(f"{label} cumulative density is non-monotone over the retained data")
    kept = np.maximum.accumulate(kept)
    span = kept[-1] - kept[0]
    if span <= 0.0:
        raise UnfoldingError("retained levels collapse to a point after mapping")
    out = (kept - kept[0]) * ((kept.size - 1) / span)
    return UnfoldedSpectrum(values=out, method=label, edge_trim=edge_trim)


def unfold_members(
    spectra, method: str = "spectral-edgeworth", edge_trim: float = 0.1, order: int = 7
) -> list[UnfoldedSpectrum]:
    """Unfold a whole ensemble.

    The semicircle method fits one common map to the pooled eigenvalues
    (ensemble unfolding); the other methods unfold each member individually.
    """
    arrays = [_values(s) for s in spectra]
    if method == "ensemble-semicircle":
        pooled = np.concatenate(arrays)
        c = float(pooled.mean())
        r = semicircle_radius(pooled)
        return [unfold(a, method, edge_trim, radius=r, center=c) for a in arrays]
    return [unfold(a, method, edge_trim, order=order) for a in arrays]


# --- Reference curves --------------------------------------------------------


def wigner_surmise(s, beta: int = 1):
    """Level-repulsion spacing density at unit mean spacing for beta in {1,2,4}."""
    s = np.asarray(s, dtype=float)
    if beta == 1:
        return math.pi / 2.0 * s * np.exp(-math.pi * s * s / 4.0)
    if beta == 2:
        return 32.0 / math.pi**2 * s * s * np.exp(-4.0 * s * s / math.pi)
    if beta == 4:
        a = 2.0**18 / (3.0**6 * math.pi**3)
        return a * s**4 * np.exp(-64.0 * s * s / (9.0 * math.pi))
    raise ValueError(f"beta must be 1, 2 or 4, got {beta}")


def wigner_surmise_cdf(s, beta: int = 1):
    """Closed-form integral of :func:`wigner_surmise`."""
    s = np.asarray(s, dtype=float)
    if beta == 1:
        return 1.0 - np.exp(-math.pi * s * s / 4.0)
    if beta == 2:
        b = 4.0 / math.pi
        amp = 32.0 / math.pi**2
        gauss = np.exp(-b * s * s)
        return amp * (math.sqrt(math.pi) / (4.0 * b**1.5) * _erf_vec(math.sqrt(b) * s) - s * gauss / (2.0 * b))
    if beta == 4:
        b = 64.0 / (9.0 * math.pi)
        amp = 2.0**18 / (3.0**6 * math.pi**3)
        gauss = np.exp(-b * s * s)
        return amp * (
            3.0 * math.sqrt(math.pi) / (8.0 * b**2.5) * _erf_vec(math.sqrt(b) * s)
            - gauss * (3.0 * s / (4.0 * b * b) + s**3 / (2.0 * b))
        )
    raise ValueError(f"beta must be 1, 2 or 4, got {beta}")


def _erf_vec(x):
    return 2.0 * ndtr(np.asarray(x, dtype=float) * math.sqrt(2.0)) - 1.0


def poisson_spacing(s):
    return np.exp(-np.asarray(s, dtype=float))


def poisson_spacing_cdf(s):
    return 1.0 - np.exp(-np.asarray(s, dtype=float))


def semi_poisson_spacing(s):
    s = np.asarray(s, dtype=float)
    return 4.0 * s * np.exp(-2.0 * s)


def goe_number_variance(r):
    """Exact bulk count variance for the real symmetric class."""
    r = np.asarray(r, dtype=float)
    return 2.0 / math.pi**2 * (np.log(2.0 * math.pi * r) + 1.0 + EULER_GAMMA - math.pi**2 / 8.0)


def goe_delta3(L):
    """Exact bulk staircase rigidity for the real symmetric class."""
    L = np.asarray(L, dtype=float)
    return (np.log(2.0 * math.pi * L) + EULER_GAMMA - 1.25 - math.pi**2 / 8.0) / math.pi**2


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between a sample and a reference CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return float(max(upper, lower))


# --- Spacing histogram -------------------------------------------------------


def nnsd(unfolded_members, bins: int = 50, s_range=(0.0, 4.0), beta: int = 1) -> StatCurve:
    """Pooled nearest-neighbor spacing histogram with reference curves."""
    members = [_values(u) for u in unfolded_members]
    if not members:
        raise ValueError("need at least one unfolded member")
    spacings = np.concatenate([np.diff(v) for v in members])
    if spacings.size == 0:
        raise ValueError("no spacings: members too short")
    counts, edges = np.histogram(spacings, bins=bins, range=s_range)
    width = edges[1] - edges[0]
    total = spacings.size
    density = counts / (total * width)
    stderr = np.sqrt(counts) / (total * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    refs = {
        "wigner": wigner_surmise(centers, beta),
        "poisson": poisson_spacing(centers),
        "semi_poisson": semi_poisson_spacing(centers),
    }
    return StatCurve(grid=centers, values=density, stderr=stderr, references=refs, bin_edges=edges)


# --- Number variance ---------------------------------------------------------


def _window_counts(values, r, step):
    starts = np.arange(values[0], values[-1] - r + 1e-12, step)
    if starts.size == 0:
        return None
    left = np.searchsorted(values, starts, side="left")
    right = np.searchsorted(values, starts + r, side="left")
    return (right - left).astype(float)


def number_variance(unfolded_members, r_grid, step: float = 0.5) -> StatCurve:
    """Variance of the level count in sliding windows of length r.

    Windows are stepped by ``step`` mean spacings within each member's
    retained span and pooled across members; standard errors come from the
    member-to-member spread.
    """
    members = [_values(u) for u in unfolded_members]
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < 0.25):
        raise ValueError("window lengths below 0.25 mean spacings are not resolvable")
    min_span = min(v[-1] - v[0] for v in members)
    if np.any(r_grid > min_span / 4.0):
        bad = r_grid[r_grid > min_span / 4.0]
        raise ValueError(f"window lengths {bad} exceed a quarter of the shortest span {min_span:.1f}")

    values = np.zeros_like(r_grid)
    stderr = np.zeros_like(r_grid)
    for i, r in enumerate(r_grid):
        pooled = []
        per_member = []
        for v in members:
            counts = _window_counts(v, r, step)
            if counts is None:
                continue
            pooled.append(counts)
            per_member.append(float(np.var(counts)))
        allc = np.concatenate(pooled)
        values[i] = float(np.var(allc))
        if len(per_member) > 1:
            stderr[i] = float(np.std(per_member, ddof=1) / math.sqrt(len(per_member)))
    refs = {"goe": goe_number_variance(r_grid), "poisson": r_grid.copy()}
    return StatCurve(grid=r_grid, values=values, stderr=stderr, references=refs)


# --- Least-squares staircase rigidity ----------------------------------------


def _delta3_member(values, L, step):
    """Exact least-squares deviation of the staircase in sliding windows.

    For each window [x, x+L) the squared deviation of the counting staircase
    from its best-fit line is evaluated in closed form from prefix sums:
    D3 = S2/L - 4 S0^2/L^2 + 12 S0 S1 / L^3 - 12 S1^2 / L^4 with
    S0 = int N dt, S1 = int N t dt, S2 = int N^2 dt over the window.
    """
    starts = np.arange(values[0], values[-1] - L + 1e-12, step)
    if starts.size == 0:
        return None
    p1 = np.concatenate([[0.0], np.cumsum(values)])
    p2 = np.concatenate([[0.0], np.cumsum(values**2)])
    p3 = np.concatenate([[0.0], np.cumsum(np.arange(values.size) * values)])
    a = np.searchsorted(values, starts, side="left")
    b = np.searchsorted(values, starts + L, side="left")
    n = (b - a).astype(float)
    su = p1[b] - p1[a]
    su2 = p2[b] - p2[a]
    sju = p3[b] - p3[a]

    st = su - n * starts  # sum of in-window positions
    st2 = su2 - 2.0 * starts * su + n * starts**2
    # sum over levels of (2*rank - 1) * position, rank counted inside the window
    srt = 2.0 * (sju - a * su) + su - starts * n**2

    s0 = n * L - st
    s1 = 0.5 * (n * L**2 - st2)
    s2 = n**2 * L - srt
    return s2 / L - 4.0 * s0**2 / L**2 + 12.0 * s0 * s1 / L**3 - 12.0 * s1**2 / L**4


def delta3(
    unfolded_members,
    L_grid,
    step: float = 0.5,
    include_identity: bool = False,
    sigma2_step: float = 0.25,
) -> StatCurve:
    """Mean-square staircase deviation from the best-fit line, direct estimator.

    With ``include_identity`` the returned references also carry the indirect
    estimate obtained by transforming the measured count variance through
    (2/L^4) int_0^L (L^3 - 2 L^2 r + r^3) S2(r) dr on the same data.
    """
    members = [_values(u) for u in unfolded_members]
    L_grid = np.asarray(L_grid, dtype=float)
    if np.any(L_grid < 1.0):
        raise ValueError("interval lengths below one mean spacing are not resolvable")
    min_span = min(v[-1] - v[0] for v in members)
    if np.any(L_grid > min_span / 2.0):
        bad = L_grid[L_grid > min_span / 2.0]
        raise ValueError(f"interval lengths {bad} exceed half the shortest span {min_span:.1f}")

    values = np.zeros_like(L_grid)
    stderr = np.zeros_like(L_grid)
    for i, L in enumerate(L_grid):
        per_member = []
        pooled = []
        for v in members:
            d3 = _delta3_member(v, L, step)
            if d3 is None:
                continue
            pooled.append(d3)
            per_member.append(float(np.mean(d3)))
        allw = np.concatenate(pooled)
        values[i] = float(np.mean(allw))
        if len(per_member) > 1:
            stderr[i] = float(np.std(per_member, ddof=1) / math.sqrt(len(per_member)))

    refs = {"goe": goe_delta3(L_grid), "poisson": L_grid / 15.0}
    if include_identity:
        r_max = float(np.max(L_grid))
        r_grid = np.arange(sigma2_step, r_max + sigma2_step / 2.0, sigma2_step)
        sigma2 = number_variance(unfolded_members, r_grid, step=step)
        refs["integral_identity"] = delta3_from_sigma2(sigma2, L_grid)
    return StatCurve(grid=L_grid, values=values, stderr=stderr, references=refs)


def delta3_from_sigma2(sigma2_curve: StatCurve, L_grid) -> np.ndarray:
    """Indirect rigidity estimate: integral transform of a count-variance curve.

    Below the first measured window length the count variance is continued as
    r + b r^2 (slope one at the origin holds for any unit-density point
    process; b matches the first measured point).
    """
    r = np.asarray(sigma2_curve.grid, dtype=float)
    s = np.asarray(sigma2_curve.values, dtype=float)
    L_grid = np.asarray(L_grid, dtype=float)
    if np.any(L_grid > r[-1] + 1e-9):
        raise ValueError("count-variance grid does not cover the requested lengths")
    r0 = r[0]
    b = (s[0] - r0) / r0**2
    out = np.zeros_like(L_grid)
    for i, L in enumerate(L_grid):
        # exact kernel integral of the small-r continuation r + b r^2
        head = (
            L**3 * r0**2 / 2.0
            + L**3 * b * r0**3 / 3.0
            - 2.0 * L**2 * r0**3 / 3.0
            - L**2 * b * r0**4 / 2.0
            + r0**5 / 5.0
            + b * r0**6 / 6.0
        )
        mask = r <= L + 1e-12
        rr = r[mask]
        ss = s[mask]
        if rr[-1] < L - 1e-9:
            ss = np.append(ss, np.interp(L, r, s))
            rr = np.append(rr, L)
        kernel = L**3 - 2.0 * L**2 * rr + rr**3
        out[i] = 2.0 / L**4 * (head + trapezoid(kernel * ss, rr))
    return out


def ensemble_map_members(spectra, method: str = "ensemble-semicircle", edge_trim: float = 0.1):
    """Map every member through one common smooth CDF, keeping member scatter.

    Unlike :func:`unfold`, the members are neither anchored nor rescaled
    individually, so member-to-member centroid and width fluctuations survive
    the map; they are what the spectral-vs-ensemble correction quantifies.
    Members are then shifted to the grand centroid (re-centering), and the
    residual width scatter is measured.

    Returns ``(members, width_scatter, mean_spacing)``: the re-centered mapped
    arrays, the variance of the member mean level spacings, and their mean.
    """
    arrays = [np.sort(_values(s)) for s in spectra]
    n = arrays[0].size
    pooled = np.concatenate(arrays)
    if method == "ensemble-semicircle":
        c = float(pooled.mean())
        r = semicircle_radius(pooled)
        mapped = [n * semicircle_cdf(a - c, r) for a in arrays]
    elif method == "ensemble-edgeworth":
        mom = [moments(a) for a in arrays]
        c = float(np.mean([g.centroid for g in mom]))
        s = float(np.mean([math.sqrt(g.variance) for g in mom]))
        g1 = float(np.mean([g.gamma1 for g in mom]))
        g2 = float(np.mean([g.gamma2 for g in mom]))
        mapped = [n * edgeworth_cdf((a - c) / s, g1, g2) for a in arrays]
    else:
        raise ValueError(f"unknown ensemble map {method!r}")
    t = int(math.floor(n * edge_trim))
    kept = [v[t : n - t] if t else v for v in mapped]
    spacing = np.array([(v[-1] - v[0]) / (v.size - 1) for v in kept])
    width_scatter = float(np.var(spacing, ddof=1)) if len(kept) > 1 else 0.0
    mean_spacing = float(spacing.mean())
    centroids = np.array([v.mean() for v in kept])
    grand = float(centroids.mean())
    centered = [v - c0 + grand for v, c0 in zip(kept, centroids)]
    return centered, width_scatter, mean_spacing


def flores_correction(
    sigma2_ensemble: StatCurve, sigma2_member_moment: float, mean_spacing: float, L_grid=None
) -> StatCurve:
    """Remove centroid/width-scatter inflation from an ensemble-unfolded curve.

    Applies ``S2_s(L) = [S2_e(L) - (L^2 - 1/6) q] / (1 - q)`` with
    ``q = sigma^2 / D^2``; the input curve is expected to be measured after
    re-centering each member to zero centroid.
    """
    q = sigma2_member_moment / mean_spacing**2
    if not q < 1.0:
        raise ValueError(f"scatter ratio sigma^2/D^2 = {q:.3g} must be below 1")
    if L_grid is None:
        grid = np.asarray(sigma2_ensemble.grid, dtype=float)
        vals = np.asarray(sigma2_ensemble.values, dtype=float)
        errs = np.asarray(sigma2_ensemble.stderr, dtype=float)
    else:
        grid = np.asarray(L_grid, dtype=float)
        vals = np.interp(grid, sigma2_ensemble.grid, sigma2_ensemble.values)
        errs = np.interp(grid, sigma2_ensemble.grid, sigma2_ensemble.stderr)
    corrected = (vals - (grid**2 - 1.0 / 6.0) * q) / (1.0 - q)
    refs = dict(sigma2_ensemble.references)
    refs["uncorrected"] = vals
    return StatCurve(grid=grid, values=corrected, stderr=errs / (1.0 - q), references=refs)


# --- Density histograms ------------------------------------------------------


def eigenvalue_density(
    spectra, bins: int = 40, normalized: bool = False, normalize: str = "unit"
) -> StatCurve:
    """Pooled eigenvalue histogram with semicircle and Edgeworth references.

    ``normalized`` rescales each member to zero centroid and unit variance
    before pooling.  ``normalize='dimension'`` scales the density (and the
    references) so the total mass equals the matrix dimension instead of one.
    """
    if normalize not in ("unit", "dimension"):
        raise ValueError(f"unknown normalization {normalize!r}")
    arrays = [_values(s) for s in spectra]
    dim = arrays[0].size
    if normalized:
        gammas = [moments(a) for a in arrays]
        pooled = np.concatenate([(a - g.centroid) / math.sqrt(g.variance) for a, g in zip(arrays, gammas)])
        g1 = float(np.mean([g.gamma1 for g in gammas]))
        g2 = float(np.mean([g.gamma2 for g in gammas]))
    else:
        pooled = np.concatenate(arrays)
        mom = moments(pooled)
        g1, g2 = mom.gamma1, mom.gamma2

    counts, edges = np.histogram(pooled, bins=bins)
    width = np.diff(edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    mass = dim if normalize == "dimension" else 1.0
    density = counts / (pooled.size * width) * mass
    stderr = np.sqrt(counts) / (pooled.size * width) * mass

    radius = semicircle_radius(pooled)
    center = float(pooled.mean())
    scale = float(pooled.std())
    refs = {
        "semicircle": semicircle_density(centers - center, radius) * mass,
        "edgeworth": edgeworth_density((centers - center) / scale, g1, g2) / scale * mass,
    }
    return StatCurve(grid=centers, values=density, stderr=stderr, references=refs, bin_edges=edges)
