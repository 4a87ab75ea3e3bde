"""Run orchestration: parse configs, fan members over a worker pool, emit CSVs.

Artifacts depend only on ``(config, seed)``: member ``i`` always uses stream
id ``i`` and reductions run in member order regardless of which worker
finished first.  Every CSV starts with comment lines carrying the config hash
and the tool version; floats are serialized with 17 significant digits.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np

from . import basis as mb
from . import decoherence as deco
from . import embedded, spectra
from .classical import ClassicalEnsembleSpec, sample_classical
from .config import CLASSICAL_KINDS, EMBEDDED_KINDS, RunConfig, RunManifest
from .errors import CapacityError, ConfigError
from .rng import RandomStream

__version__ = "0.1.0"

_CLASSICAL_BETA = {"goe": 1, "gue": 2, "gse": 4}
_SPECTRUM_COMMANDS = ("sample", "density", "nnsd", "sigma2", "delta3", "moments")


@lru_cache(maxsize=1)
def tool_version() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        sha = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=here,
            capture_output=True,
            text=True,
            timeout=5,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        sha = ""
    return f"mbrmt-{__version__}+g{sha}" if sha else f"mbrmt-{__version__}"


# --- config -> specs ----------------------------------------------------------


def _ensemble_kind(config: RunConfig) -> str:
    kind = config.ensemble.get("kind")
    if kind is None:
        raise ConfigError("ensemble config needs a 'kind'")
    return kind


def _classical_spec(config: RunConfig) -> ClassicalEnsembleSpec:
    ens = config.ensemble
    try:
        return ClassicalEnsembleSpec(
            beta=_CLASSICAL_BETA[ens["kind"]],
            n=int(ens.get("n", 0)),
            v2=float(ens.get("v2", 1.0)),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad classical ensemble config: {exc}") from exc


def _embedded_spec(config: RunConfig, m=None) -> embedded.EmbeddedEnsembleSpec:
    ens = config.ensemble
    statistics = mb.FERMION if ens["kind"] == "fegoe" else mb.BOSON
    try:
        return embedded.EmbeddedEnsembleSpec(
            ell=int(ens["ell"]),
            m=int(ens["m"] if m is None else m),
            k=int(ens.get("k", 2)),
            statistics=statistics,
            v2=float(ens.get("v2", 1.0)),
            member_count=config.member_count,
            seed=config.seed,
            lambda2=ens.get("lambda2"),
            sp_energies=tuple(ens["sp_energies"]) if ens.get("sp_energies") else None,
            sp_energy_mode=ens.get("sp_energy_mode", "fixed"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad embedded ensemble config: {exc}") from exc


def _qubit_env_spec(config: RunConfig) -> deco.QubitEnvSpec:
    ens = config.ensemble
    stat = config.statistic
    grid = deco.default_time_grid(
        points=int(stat.get("time_points", 512)),
        t_max=float(stat.get("t_max", 10.0 * deco.T_HEISENBERG)),
    )
    try:
        return deco.QubitEnvSpec(
            env_kind=ens["kind"],
            coupling=float(stat.get("coupling", 1e-4)),
            member_count=config.member_count,
            seed=config.seed,
            time_grid=grid,
            n=int(ens["n"]) if ens.get("n") is not None else None,
            ell=int(ens["ell"]) if ens.get("ell") is not None else None,
            m=int(ens["m"]) if ens.get("m") is not None else None,
            k_h=int(ens.get("k_h", 2)),
            k_v=int(ens.get("k_v", 1)),
            qubit_initial=stat.get("qubit_initial", "sigma_x_plus"),
            v_basis_mode=stat.get("v_basis_mode", "occupation_basis"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad environment config: {exc}") from exc


def validate_config(config: RunConfig) -> None:
    """Reject invalid parameter combinations before any sampling happens."""
    cmd = config.command
    if cmd in _SPECTRUM_COMMANDS:
        kind = _ensemble_kind(config)
        if kind in CLASSICAL_KINDS:
            _classical_spec(config)
        elif kind in EMBEDDED_KINDS:
            _embedded_spec(config)
        else:
            raise ConfigError(f"unknown ensemble kind {kind!r}")
        method = config.statistic.get("unfolding")
        if method is not None and method not in spectra.UNFOLD_METHODS:
            raise ConfigError(f"unknown unfolding method {method!r}")
    elif cmd == "blocks":
        if not config.ensemble.get("capacities") and not config.ensemble.get("ell"):
            raise ConfigError("blocks needs orbit capacities or ell")
    elif cmd == "crossmoments":
        m_list = config.statistic.get("m_list")
        if not m_list or len(m_list) < 2:
            raise ConfigError("crossmoments needs an m_list with at least two entries")
        spec = _embedded_spec(config, m=max(int(m) for m in m_list))
        for m in m_list:
            if int(m) < spec.k:
                raise ConfigError(f"m={m} below interaction rank k={spec.k}")
    elif cmd == "decohere":
        _qubit_env_spec(config)


# --- member tasks (top level for pickling) ------------------------------------


def _member_spectrum(payload) -> np.ndarray:
    config_json, member_id = payload
    config = RunConfig.from_json(config_json)
    try:
        kind = _ensemble_kind(config)
        if kind in CLASSICAL_KINDS:
            spec = _classical_spec(config)
            h = sample_classical(spec, RandomStream(config.seed, member_id).generator()).entries
            return np.linalg.eigvalsh(h)
        spec = _embedded_spec(config)
        return np.linalg.eigvalsh(embedded.sample_member(spec, member_id).entries)
    except Exception as exc:
        raise RuntimeError(f"member {member_id} failed: {exc}") from exc


def _member_purity(payload) -> np.ndarray:
    config_json, member_id = payload
    config = RunConfig.from_json(config_json)
    try:
        spec = _qubit_env_spec(config)
        return deco.member_purity(spec, member_id, engine=config.statistic.get("engine", "fast"))
    except Exception as exc:
        raise RuntimeError(f"member {member_id} failed: {exc}") from exc


def _fan_out(task, config: RunConfig) -> list:
    payloads = [(config.to_json(), i) for i in range(config.member_count)]
    if config.worker_count == 1:
        return [task(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=config.worker_count) as pool:
        return list(pool.map(task, payloads, chunksize=8))


# --- CSV emission --------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _write_csv(path, columns, rows, config: RunConfig) -> None:
    lines = [
        f"# config_hash={config.config_hash()}",
        f"# tool={tool_version()}",
        f"# command={config.command}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return f"sha256:{digest.hexdigest()}"


# --- statistics pipelines -------------------------------------------------------


def _default_unfolding(kind: str) -> str:
    return "ensemble-semicircle" if kind in CLASSICAL_KINDS else "spectral-edgeworth"


def _default_beta(kind: str) -> int:
    return _CLASSICAL_BETA.get(kind, 1)


def _fluctuation_inputs(config: RunConfig, spectra_list):
    kind = _ensemble_kind(config)
    if kind == "gse":
        spectra_list = [spectra.kramers_deduplicate(e) for e in spectra_list]
    method = config.statistic.get("unfolding", _default_unfolding(kind))
    trim = float(config.statistic.get("trim", 0.1))
    return spectra.unfold_members(spectra_list, method=method, edge_trim=trim)


def _emit_sample(config, outdir, spectra_list):
    rows = [
        (member, i, e)
        for member, eigs in enumerate(spectra_list)
        for i, e in enumerate(eigs)
    ]
    path = os.path.join(outdir, "spectra.csv")
    _write_csv(path, ("member", "index", "eigenvalue"), rows, config)
    return [path]


def _emit_moments(config, outdir, spectra_list):
    rows = []
    for member, eigs in enumerate(spectra_list):
        mom = spectra.moments(eigs)
        rows.append((member, mom.centroid, mom.variance, mom.gamma1, mom.gamma2))
    path = os.path.join(outdir, "moments.csv")
    _write_csv(path, ("member", "centroid", "variance", "gamma1", "gamma2"), rows, config)
    return [path]


def _emit_density(config, outdir, spectra_list):
    bins = int(config.statistic.get("bins", 40))
    normalized = bool(config.statistic.get("normalized", False))
    if normalized:
        pooled = np.concatenate(
            [(e - e.mean()) / e.std() for e in spectra_list]
        )
    else:
        pooled = np.concatenate(spectra_list)
    counts, edges = np.histogram(pooled, bins=bins)
    rows = list(zip(edges[:-1], edges[1:], counts))
    path = os.path.join(outdir, "density.csv")
    _write_csv(path, ("bin_left", "bin_right", "count"), rows, config)
    return [path]


def _emit_nnsd(config, outdir, spectra_list):
    kind = _ensemble_kind(config)
    unfolded = _fluctuation_inputs(config, spectra_list)
    curve = spectra.nnsd(
        unfolded,
        bins=int(config.statistic.get("bins", 50)),
        s_range=(0.0, float(config.statistic.get("s_max", 4.0))),
        beta=int(config.statistic.get("beta", _default_beta(kind))),
    )
    rows = list(
        zip(
            curve.bin_edges[:-1],
            curve.bin_edges[1:],
            curve.values,
            curve.references["wigner"],
            curve.references["poisson"],
            curve.references["semi_poisson"],
        )
    )
    path = os.path.join(outdir, "nnsd.csv")
    _write_csv(
        path,
        ("bin_left", "bin_right", "density", "ref_wigner", "ref_poisson", "ref_semipoisson"),
        rows,
        config,
    )
    return [path]


def _stat_grid(stat, prefix, lo, hi, count):
    return np.linspace(
        float(stat.get(f"{prefix}_min", lo)),
        float(stat.get(f"{prefix}_max", hi)),
        int(stat.get(f"{prefix}_count", count)),
    )


def _emit_sigma2(config, outdir, spectra_list):
    unfolded = _fluctuation_inputs(config, spectra_list)
    r_grid = _stat_grid(config.statistic, "r", 1.0, 10.0, 19)
    curve = spectra.number_variance(unfolded, r_grid)
    cols = ("abscissa", "value", "stderr", "ref_goe", "ref_poisson")
    rows = list(
        zip(curve.grid, curve.values, curve.stderr, curve.references["goe"], curve.references["poisson"])
    )
    path = os.path.join(outdir, "sigma2.csv")
    _write_csv(path, cols, rows, config)
    paths = [path]
    if config.statistic.get("flores"):
        kind = _ensemble_kind(config)
        spectra_in = (
            [spectra.kramers_deduplicate(e) for e in spectra_list]
            if kind == "gse"
            else spectra_list
        )
        map_kind = (
            "ensemble-semicircle" if kind in CLASSICAL_KINDS else "ensemble-edgeworth"
        )
        trim = float(config.statistic.get("trim", 0.1))
        members, scatter, spacing = spectra.ensemble_map_members(spectra_in, map_kind, trim)
        curve_e = spectra.number_variance(members, r_grid)
        corrected = spectra.flores_correction(curve_e, scatter, spacing)
        rows = list(
            zip(
                corrected.grid,
                corrected.values,
                corrected.stderr,
                corrected.references["goe"],
                corrected.references["poisson"],
            )
        )
        path = os.path.join(outdir, "sigma2_corrected.csv")
        _write_csv(path, cols, rows, config)
        paths.append(path)
    return paths


def _emit_delta3(config, outdir, spectra_list):
    unfolded = _fluctuation_inputs(config, spectra_list)
    L_grid = _stat_grid(config.statistic, "L", 2.0, 20.0, 19)
    want_identity = bool(config.statistic.get("identity", False))
    curve = spectra.delta3(unfolded, L_grid, include_identity=want_identity)
    cols = ("abscissa", "value", "stderr", "ref_goe", "ref_poisson")
    rows = list(
        zip(curve.grid, curve.values, curve.stderr, curve.references["goe"], curve.references["poisson"])
    )
    path = os.path.join(outdir, "delta3.csv")
    _write_csv(path, cols, rows, config)
    paths = [path]
    if want_identity:
        rows = list(
            zip(
                curve.grid,
                curve.references["integral_identity"],
                curve.stderr,
                curve.references["goe"],
                curve.references["poisson"],
            )
        )
        path = os.path.join(outdir, "delta3_identity.csv")
        _write_csv(path, cols, rows, config)
        paths.append(path)
    return paths


def emit_zero_pattern(ell, m, k, statistics, capacities=None, max_dim=embedded.MAX_DENSE_DIM):
    """Integer map of the k-body selection rules over the m-particle basis.

    Codes: the particle-transfer distance where it does not exceed k
    (0 = diagonal block), 9 where the interaction cannot connect the states.
    With orbit ``capacities`` the states are grouped into configuration blocks
    sorted by decreasing dimension and distances are taken between block
    occupancies.
    """
    d = mb.dimension(ell, m, statistics)
    if d > max_dim:
        raise CapacityError(f"zero-pattern map of dimension {d} exceeds cap {max_dim}")
    space = mb.SingleParticleSpace(ell=ell, statistics=statistics)
    bas = mb.enumerate_basis(space, m)
    if capacities is None:
        occ = np.array(bas.states, dtype=np.int64)
        dist = np.abs(occ[:, None, :] - occ[None, :, :]).sum(axis=2) // 2
    else:
        caps = tuple(int(c) for c in capacities)
        if statistics != mb.FERMION:
            raise ConfigError("configuration blocks are defined for fermions")
        if sum(caps) != ell:
            raise ConfigError(f"capacities {caps} do not sum to ell={ell}")
        blocks = mb.configuration_blocks(caps, m)
        edges = np.cumsum((0,) + caps)
        order = []
        block_of = []
        occ_arr = np.array(bas.states, dtype=np.int64)
        orbit_occ = np.stack(
            [occ_arr[:, a:b].sum(axis=1) for a, b in zip(edges[:-1], edges[1:])], axis=1
        )
        key = {blk.occupancies: i for i, blk in enumerate(blocks)}
        for state_idx in range(d):
            block_of.append(key[tuple(orbit_occ[state_idx])])
        order = np.argsort(np.asarray(block_of), kind="stable")
        blk = np.asarray(block_of)[order]
        bdist = mb.block_transfer_matrix(blocks)
        dist = bdist[np.ix_(blk, blk)]
    codes = np.where(dist <= k, dist, 9)
    return codes.astype(np.int64)


def _run_blocks(config, outdir):
    ens = config.ensemble
    stat = config.statistic
    paths = []
    capacities = ens.get("capacities")
    if capacities:
        caps = tuple(int(c) for c in capacities)
        m = int(ens["m"])
        blocks = mb.configuration_blocks(caps, m)
        rows = [
            (i, ";".join(str(o) for o in blk.occupancies), blk.dim)
            for i, blk in enumerate(blocks)
        ]
        path = os.path.join(outdir, "blocks.csv")
        _write_csv(path, ("block", "occupancies", "dimension"), rows, config)
        paths.append(path)
        transfer = mb.block_transfer_matrix(blocks)
        path = os.path.join(outdir, "block_transfer.csv")
        _write_csv(path, tuple(f"b{i}" for i in range(len(blocks))), transfer.tolist(), config)
        paths.append(path)
    if ens.get("k") is not None and ens.get("ell") is not None:
        statistics = mb.BOSON if ens.get("kind") == "begoe" else mb.FERMION
        codes = emit_zero_pattern(
            int(ens["ell"]),
            int(ens["m"]),
            int(ens["k"]),
            statistics,
            capacities=tuple(int(c) for c in capacities) if capacities else None,
            max_dim=int(stat.get("max_dim", embedded.MAX_DENSE_DIM)),
        )
        path = os.path.join(outdir, "zero_pattern.csv")
        _write_csv(path, tuple(f"s{i}" for i in range(codes.shape[0])), codes.tolist(), config)
        paths.append(path)
    if not paths:
        raise ConfigError("blocks command produced nothing: give capacities and/or (ell, m, k)")
    return paths


def _run_crossmoments(config, outdir):
    m_list = [int(m) for m in config.statistic["m_list"]]
    spec = _embedded_spec(config, m=max(m_list))
    stats = embedded.cross_moment_fluctuations(
        spec, m_list, control=config.statistic.get("control", "embedded")
    )
    rows = []
    for i, m1 in enumerate(m_list):
        for j, m2 in enumerate(m_list):
            rows.append(
                (
                    m1,
                    m2,
                    stats.sigma11[i, j],
                    stats.sigma11_stderr[i, j],
                    stats.sigma22[i, j],
                    stats.sigma22_stderr[i, j],
                )
            )
    path = os.path.join(outdir, "crossmoments.csv")
    _write_csv(
        path,
        ("m_row", "m_col", "sigma11", "sigma11_stderr", "sigma22", "sigma22_stderr"),
        rows,
        config,
    )
    return [path]


def _run_decohere(config, outdir):
    spec = _qubit_env_spec(config)
    member_traces = _fan_out(_member_purity, config)
    traces = np.stack(member_traces)
    mean = traces.mean(axis=0)
    if traces.shape[0] > 1:
        err = traces.std(axis=0, ddof=1) / np.sqrt(traces.shape[0])
    else:
        err = np.zeros_like(mean)
    rows = list(zip(spec.time_grid, mean, err))
    name = f"purity_{spec.env_kind}_lambda{spec.coupling:g}.csv"
    path = os.path.join(outdir, name)
    _write_csv(path, ("t", "purity_mean", "purity_stderr"), rows, config)
    return [path]


# --- entry points ---------------------------------------------------------------


def run(config: RunConfig) -> RunManifest:
    """Execute one pipeline and write its artifacts plus a manifest."""
    validate_config(config)
    outdir = config.output_dir
    os.makedirs(outdir, exist_ok=True)
    started = time.perf_counter()

    if config.command in _SPECTRUM_COMMANDS:
        spectra_list = _fan_out(_member_spectrum, config)
        emit = {
            "sample": _emit_sample,
            "density": _emit_density,
            "nnsd": _emit_nnsd,
            "sigma2": _emit_sigma2,
            "delta3": _emit_delta3,
            "moments": _emit_moments,
        }[config.command]
        paths = emit(config, outdir, spectra_list)
        streams = list(range(config.member_count))
    elif config.command == "blocks":
        paths = _run_blocks(config, outdir)
        streams = []
    elif config.command == "crossmoments":
        paths = _run_crossmoments(config, outdir)
        streams = list(range(config.member_count))
    else:
        paths = _run_decohere(config, outdir)
        streams = list(range(config.member_count))

    manifest = RunManifest(
        config=config.to_mapping(),
        config_hash=config.config_hash(),
        tool_version=tool_version(),
        stream_ids=streams,
        wall_seconds=time.perf_counter() - started,
        artifacts={os.path.basename(p): _sha256(p) for p in paths},
    )
    with open(os.path.join(outdir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json() + "\n")
    return manifest


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override its fields")
    parser.add_argument("--seed", type=int, help="run seed (mandatory, here or in the config)")
    parser.add_argument("--members", type=int, help="ensemble member count")
    parser.add_argument("--workers", type=int, help="worker pool size")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--kind", help="ensemble kind: goe gue gse fegoe begoe")
    parser.add_argument("--n", type=int, help="classical matrix dimension")
    parser.add_argument("--ell", type=int, help="single-particle levels")
    parser.add_argument("--m", type=int, help="particle number")
    parser.add_argument("--k", type=int, help="interaction rank")
    parser.add_argument("--v2", type=float, help="defining element variance")


_STAT_FLAGS = {
    "bins": int,
    "trim": float,
    "unfolding": str,
    "beta": int,
    "s_max": float,
    "normalized": lambda s: s.lower() in ("1", "true", "yes"),
    "r_min": float,
    "r_max": float,
    "r_count": int,
    "L_min": float,
    "L_max": float,
    "L_count": int,
    "flores": lambda s: s.lower() in ("1", "true", "yes"),
    "identity": lambda s: s.lower() in ("1", "true", "yes"),
    "coupling": float,
    "t_max": float,
    "time_points": int,
    "qubit_initial": str,
    "v_basis_mode": str,
    "engine": str,
    "control": str,
    "max_dim": int,
}


def build_config(args) -> RunConfig:
    mapping = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    mapping["command"] = args.command
    if args.seed is not None:
        mapping["seed"] = args.seed
    if args.members is not None:
        mapping["member_count"] = args.members
    if args.workers is not None:
        mapping["worker_count"] = args.workers
    if args.out is not None:
        mapping["output_dir"] = args.out
    ensemble = dict(mapping.get("ensemble", {}))
    for key in ("kind", "n", "ell", "m", "k", "v2"):
        value = getattr(args, key, None)
        if value is not None:
            ensemble[key] = value
    if getattr(args, "capacities", None):
        ensemble["capacities"] = [int(c) for c in args.capacities.split(",")]
    if getattr(args, "k_h", None) is not None:
        ensemble["k_h"] = args.k_h
    if getattr(args, "k_v", None) is not None:
        ensemble["k_v"] = args.k_v
    mapping["ensemble"] = ensemble
    statistic = dict(mapping.get("statistic", {}))
    for key, conv in _STAT_FLAGS.items():
        value = getattr(args, key, None)
        if value is not None:
            statistic[key] = conv(value) if isinstance(value, str) else value
    if getattr(args, "m_list", None):
        statistic["m_list"] = [int(m) for m in args.m_list.split(",")]
    mapping["statistic"] = statistic
    if "seed" not in mapping:
        raise ConfigError("seed is mandatory: pass --seed or set it in the config file")
    return RunConfig.from_mapping(mapping)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mbrmt",
        description="Sample random-matrix ensembles, compute spectral statistics, "
        "and simulate qubit dephasing; emits plot-ready CSV artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (
        "sample",
        "density",
        "nnsd",
        "sigma2",
        "delta3",
        "moments",
        "blocks",
        "crossmoments",
        "decohere",
    ):
        p = sub.add_parser(name)
        _add_common(p)
        for key in _STAT_FLAGS:
            p.add_argument(f"--{key.replace('_', '-')}", dest=key)
        p.add_argument("--capacities", help="comma-separated orbit capacities")
        p.add_argument("--m-list", dest="m_list", help="comma-separated particle numbers")
        p.add_argument("--k-h", dest="k_h", type=int, help="environment interaction rank")
        p.add_argument("--k-v", dest="k_v", type=int, help="coupling interaction rank")

    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        manifest = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, np.linalg.LinAlgError, ValueError) as exc:
        # CapacityError and UnfoldingError are RuntimeErrors; member failures
        # arrive wrapped with the member id
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(manifest.artifacts)} artifact(s) to {config.output_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
