"""Command line driver: run experiment configs, write artifacts.

Each run reads one config file, computes under an optional content-addressed
return-set cache, and writes its artifacts plus a manifest into --out.  All
JSON output is key-sorted and timestamp-free so reruns are byte-identical.

Exit codes: 0 ok, 2 config problem, 3 verification failure, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .cache import cache_gc, cached_return_set
from .config import ConfigError, ExperimentConfig, load_config
from .groups import GroupPoint
from .gset import (
    Action,
    CapExceededError,
    GSetError,
    OPEN_QUESTION_BANNER,
    PermGroup,
    catalog,
    check_reconstruction,
    is_simple,
    reconstruct_from_return_subset,
    return_subset,
    search_counterexamples,
    setwise_stabilizer,
    sweep_reconstruction,
    transitive_actions,
)
from .opensets import closure_stabilizer
from .orbits import ReturnSet, SkewSystem, return_set_linear, return_set_polynomial, return_set_skew
from .reconstruct import reconstruct_group
from .spectral import compare_systems, find_peaks


# -- deterministic serialization helpers ----------------------------------------


def _jsonable(obj):
    """Recursively convert numpy scalars/arrays so json can emit them."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_jsonl(path: Path, records) -> None:
    lines = [json.dumps(_jsonable(r), sort_keys=True) for r in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header] + [",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _point_json(p: GroupPoint) -> dict:
    return {
        "text": str(p),
        "torus": [float(v) for v in p.torus_floats()],
        "torsion": list(p.torsion),
        "exact": p.is_exact,
    }


def _stabilizer_json(rep) -> dict:
    return {
        "is_trivial": rep.is_trivial,
        "shifts": [str(s) for s in rep.shifts],
        "full_torus": list(rep.full_torus),
        "full_torsion": list(rep.full_torsion),
    }


def _peak_json(p) -> dict:
    return {
        "theta": float(p.theta),
        "re": float(p.amplitude.real),
        "im": float(p.amplitude.imag),
        "magnitude": float(p.magnitude),
        "gap": float(p.convergence_gap),
        "N": int(p.N_used),
        "flags": list(p.flags),
    }


# -- shared experiment plumbing --------------------------------------------------


def _cache_dir_for(cfg: ExperimentConfig, out_dir: Path) -> Optional[Path]:
    """Config `cache =` names a directory or disables caching; default <out>/cache."""
    raw = cfg.get("cache")
    if raw is None:
        return out_dir / "cache"
    if raw in ("off", "none"):
        return None
    return Path(raw)


def _compute_return_set(cfg: ExperimentConfig, out_dir: Path, suffix: str = "") -> ReturnSet:
    system = cfg["system" + suffix]
    K = cfg["K" + suffix]
    U = cfg["U" + suffix]
    window = cfg["window"]
    x0 = cfg.get("x0" + suffix)

    def compute() -> ReturnSet:
        if system == "rotation":
            return return_set_linear(K, cfg["alpha" + suffix], U, window, x0=x0)
        if system == "polynomial":
            return return_set_polynomial(K, cfg["alpha" + suffix], cfg["P" + suffix], U, window, x0=x0)
        start = x0 if x0 is not None else K.identity()
        return return_set_skew(SkewSystem(cfg["alpha" + suffix]), start, U, window)

    rs, _ = cached_return_set(
        _cache_dir_for(cfg, out_dir), cfg.system_fingerprint(suffix), compute
    )
    return rs


def _density_rows(rs: ReturnSet):
    """Running density over the window prefix, for plotting."""
    counts = np.cumsum(rs.mask.astype(np.int64))
    spans = np.arange(1, counts.size + 1, dtype=np.float64)
    ns = np.arange(rs.n_lo, rs.n_hi + 1)
    return [(int(n), float(c / s)) for n, c, s in zip(ns, counts, spans)]


def _spectrum_rows(peaks):
    return sorted((float(p.theta), float(p.magnitude)) for p in peaks)


def _stabilizer_warning(cfg: ExperimentConfig, suffix: str = "") -> tuple[dict, Optional[str]]:
    rep = closure_stabilizer(cfg["U" + suffix])
    if rep.is_trivial:
        return _stabilizer_json(rep), None
    label = "U" + suffix
    return _stabilizer_json(rep), (
        f"closure stabilizer of {label} is nontrivial; equal return sets "
        f"need not come from isomorphic systems"
    )


# -- subcommands ------------------------------------------------------------------


def cmd_simulate(cfg: ExperimentConfig, out: Path, fmt: str) -> tuple[int, list[Path]]:
    rs = _compute_return_set(cfg, out)
    rts = out / "return_set.rts"
    rs.save(rts)
    artifacts = [rts]
    if fmt == "csv":
        dens = out / "density.csv"
        _write_csv(dens, "n,density", _density_rows(rs))
        artifacts.append(dens)
    print(f"simulate: {rs.count} return times in [{rs.n_lo}, {rs.n_hi}]")
    return 0, artifacts


def _spectrum_artifacts(cfg, out, fmt, rs) -> tuple[list, list[Path]]:
    peaks = find_peaks(
        rs, N=cfg.get("N"), threshold=cfg.get("threshold"), max_peaks=cfg.get("max_peaks", 25)
    )
    jsonl = out / "spectrum.jsonl"
    _write_jsonl(jsonl, [_peak_json(p) for p in peaks])
    artifacts = [jsonl]
    if fmt == "csv":
        csvp = out / "spectrum.csv"
        _write_csv(csvp, "theta,magnitude", _spectrum_rows(peaks))
        artifacts.append(csvp)
    return peaks, artifacts


def cmd_spectrum(cfg: ExperimentConfig, out: Path, fmt: str) -> tuple[int, list[Path]]:
    rs = _compute_return_set(cfg, out)
    rts = out / "return_set.rts"
    rs.save(rts)
    peaks, artifacts = _spectrum_artifacts(cfg, out, fmt, rs)
    print(f"spectrum: {len(peaks)} peaks")
    return 0, [rts] + artifacts


def cmd_reconstruct(cfg: ExperimentConfig, out: Path, fmt: str) -> tuple[int, list[Path]]:
    rs = _compute_return_set(cfg, out)
    rts = out / "return_set.rts"
    rs.save(rts)
    peaks, artifacts = _spectrum_artifacts(cfg, out, fmt, rs)
    res = reconstruct_group(
        peaks,
        resolution=cfg.get("resolution", 1e-8),
        height=cfg.get("height", 20),
        verify_tol=cfg.get("verify_tol", 1e-4),
    )
    stab, warning = _stabilizer_warning(cfg)
    warnings = list(res.warnings) + ([warning] if warning else [])
    report = {
        "rank": res.group.torus_rank,
        "torsion": list(res.group.torsion_orders),
        "group": str(res.group),
        "alpha": _point_json(res.alpha_image),
        "characters": [
            {"torus": list(c.torus), "torsion": list(c.torsion), "text": str(c)}
            for c in res.assignments
        ],
        "thetas": [float(t) for t in res.thetas],
        "relations": {
            "basis": [list(r) for r in res.relations.basis],
            "mode": res.relations.mode,
            "height": res.relations.height,
            "tolerance": float(res.relations.tolerance),
        },
        "max_phase_error": float(res.max_phase_error),
        "verified": res.verified,
        "input_stabilizer": stab,
        "warnings": warnings,
    }
    rec = out / "reconstruction.json"
    _write_json(rec, report)
    print(f"reconstruct: {res.group} (verified: {res.verified})")
    return (0 if res.verified else 3), [rts] + artifacts + [rec]


def cmd_compare(cfg: ExperimentConfig, out: Path, fmt: str) -> tuple[int, list[Path]]:
    rs_a = _compute_return_set(cfg, out, "")
    rs_b = _compute_return_set(cfg, out, "2")
    rts_a, rts_b = out / "return_set_a.rts", out / "return_set_b.rts"
    rs_a.save(rts_a)
    rs_b.save(rts_b)
    rep = compare_systems(
        rs_a,
        rs_b,
        N=cfg.get("N"),
        theta_tol=cfg.get("theta_tol", 1e-3),
        amp_tol=cfg.get("amp_tol", 1e-3),
        mode=cfg.get("mode", "auto"),
    )
    stab_a, warn_a = _stabilizer_warning(cfg, "")
    stab_b, warn_b = _stabilizer_warning(cfg, "2")
    warnings = [w for w in (warn_a, warn_b) if w]
    report = {
        "verdict": rep.verdict,
        "mismatch": None if rep.mismatch is None else float(rep.mismatch),
        "theta": None if rep.theta is None else float(rep.theta),
        "detail": rep.detail,
        "stabilizer_a": stab_a,
        "stabilizer_b": stab_b,
        "warnings": warnings,
    }
    cmp_path = out / "compare.json"
    _write_json(cmp_path, report)
    artifacts = [rts_a, rts_b, cmp_path]
    if fmt == "csv":
        for tag, rs in (("a", rs_a), ("b", rs_b)):
            peaks = find_peaks(rs, N=cfg.get("N"))
            csvp = out / f"spectrum_{tag}.csv"
            _write_csv(csvp, "theta,magnitude", _spectrum_rows(peaks))
            artifacts.append(csvp)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"compare: {rep.verdict} ({rep.detail})")
    return (0 if rep.verdict == "consistent" else 3), artifacts


def cmd_gset_search(cfg: ExperimentConfig, out: Path, fmt: str) -> tuple[int, list[Path]]:
    groups = catalog(cfg["catalog"])
    records = search_counterexamples(
        groups,
        exhaustive_degree=cfg.get("exhaustive_degree", 16),
        samples=cfg.get("samples", 1024),
        seed=cfg.seed,
    )
    rows: list[dict] = [
        {
            "record": "banner",
            "banner": OPEN_QUESTION_BANNER,
            "catalog": list(groups),
            "exhaustive_degree": cfg.get("exhaustive_degree", 16),
            "samples": cfg.get("samples", 1024),
            "seed": cfg.seed,
            "sweep": cfg.get("sweep", False),
        }
    ]
    n_stable = n_simple = n_counter = n_verified = 0
    all_ok = True
    for r in records:
        n_stable += r.stable
        n_simple += r.simple
        if r.is_counterexample:
            n_counter += 1
            if r.certificate_verified:
                n_verified += 1
            else:
                all_ok = False
        rows.append(
            {
                "record": "instance",
                "group": r.group,
                "action": r.action,
                "degree": r.degree,
                "mode": r.mode,
                "subset": list(r.subset),
                "orbit_size": r.orbit_size,
                "stabilizer_order": r.stabilizer_order,
                "stable": r.stable,
                "simple": r.simple,
                "counterexample": r.is_counterexample,
                "certificate": None if r.certificate is None else [list(b) for b in r.certificate],
                "certificate_verified": r.certificate_verified,
                "seed": r.seed,
            }
        )
    sweep_failures = 0
    if cfg.get("sweep", False):
        sweeps = sweep_reconstruction(
            groups,
            exhaustive_degree=cfg.get("exhaustive_degree", 16),
            samples=cfg.get("samples", 1024),
            seed=cfg.seed,
        )
        for s in sweeps:
            sweep_failures += s.failures + (not s.witness_ok)
            rows.append(
                {
                    "record": "sweep",
                    "group": s.group,
                    "action": s.action,
                    "degree": s.degree,
                    "mode": s.mode,
                    "subsets_tested": s.subsets_tested,
                    "simple_count": s.simple_count,
                    "failures": s.failures,
                    "witness_subset": list(s.witness_subset),
                    "witness_ok": s.witness_ok,
                    "seed": s.seed,
                }
            )
    rows.append(
        {
            "record": "summary",
            "instances": len(records),
            "stable": n_stable,
            "simple": n_simple,
            "counterexamples": n_counter,
            "certificates_verified": n_verified,
            "all_certificates_verified": all_ok,
            "reconstruction_failures": sweep_failures,
        }
    )
    path = out / "search.jsonl"
    _write_jsonl(path, rows)
    print(
        f"gset search: {len(records)} instances, {n_counter} counterexamples, "
        f"{n_verified} certificates verified"
    )
    if cfg.get("sweep", False):
        print(f"gset search: reconstruction sweep failures: {sweep_failures}")
    print(OPEN_QUESTION_BANNER)
    return (0 if all_ok and sweep_failures == 0 else 3), [path]


def _build_group(cfg: ExperimentConfig) -> PermGroup:
    if "group" in cfg.values:
        named = catalog(cfg["group"])
        return next(iter(named.values()))
    return PermGroup.generate(cfg["generators"], name="G")


def _element_mask(G: PermGroup, perms) -> np.ndarray:
    """Mask over G for a list of elements given as permutation tuples."""
    mask = np.zeros(G.order, dtype=bool)
    for p in perms:
        if len(p) > G.degree:
            raise ConfigError(f"element {p} moves points beyond degree {G.degree}")
        padded = tuple(p) + tuple(range(len(p), G.degree))
        try:
            mask[G.elements.index(padded)] = True
        except ValueError:
            raise ConfigError(f"element {padded} is not in the group")
    return mask


def cmd_gset_reconstruct(cfg: ExperimentConfig, out: Path, fmt: str) -> tuple[int, list[Path]]:
    G = _build_group(cfg)
    warnings: list[str] = []
    if "S" in cfg.values:
        # a return subset handed over directly lives in the regular action
        action = Action.regular(G)
        x0 = G.identity_index
        u_mask = _element_mask(G, cfg["S"])
        source_desc: dict = {"kind": "direct", "size": int(u_mask.sum())}
    else:
        spec = cfg["action"]
        if spec == "regular":
            action = Action.regular(G)
        elif spec == "natural":
            action = Action.natural(G)
        else:
            idx = int(spec.split(":")[1])
            acts = transitive_actions(G)
            if idx >= len(acts):
                raise ConfigError(f"action index {idx} out of range ({len(acts)} transitive actions)")
            action = acts[idx]
        x0 = cfg["x0"]
        if not 0 <= x0 < action.degree:
            raise ConfigError(f"x0 = {x0} outside degree {action.degree}")
        u_points = cfg["U"]
        if any(not 0 <= x < action.degree for x in u_points):
            raise ConfigError(f"U mentions points outside degree {action.degree}")
        u_mask = np.zeros(action.degree, dtype=bool)
        u_mask[sorted(u_points)] = True
        source_desc = {
            "kind": "orbit",
            "action": action.name,
            "x0": x0,
            "U": sorted(int(x) for x in u_points),
        }

    s_mask = return_subset(action, x0, u_mask)
    recon = reconstruct_from_return_subset(G, s_mask)
    image_mask = np.zeros(recon.action.degree, dtype=bool)
    image_mask[sorted(recon.subset)] = True
    round_trip = np.array_equal(
        return_subset(recon.action, recon.base_point, image_mask), s_mask
    )

    simple = is_simple(action, u_mask)
    stable = setwise_stabilizer(action, np.flatnonzero(u_mask)) == frozenset({G.identity_index})
    if simple:
        pointed_iso = check_reconstruction(action, x0, u_mask)
        verified = round_trip and pointed_iso
    else:
        pointed_iso = None
        warnings.append("subset is not simple; the rebuilt action is a proper quotient of the source")
        verified = round_trip

    report = {
        "group": G.name,
        "order": G.order,
        "source": source_desc,
        "return_subset": [int(x) for x in np.flatnonzero(s_mask)],
        "degree": recon.action.degree,
        "base_point": recon.base_point,
        "subset_image": sorted(recon.subset),
        "simple": simple,
        "stable": stable,
        "round_trip_ok": bool(round_trip),
        "pointed_isomorphic": pointed_iso,
        "verified": bool(verified),
        "warnings": warnings,
    }
    path = out / "gset_reconstruction.json"
    _write_json(path, report)
    print(f"gset reconstruct: degree {recon.action.degree} action rebuilt (verified: {verified})")
    return (0 if verified else 3), [path]


def cmd_cache_gc(cache_dir: Path, out: Path) -> tuple[int, list[Path]]:
    rep = cache_gc(cache_dir)
    report = {
        "cache_dir": str(cache_dir),
        "checked": rep.checked,
        "kept": rep.kept,
        "corrupt_removed": rep.corrupt_removed,
        "orphans_removed": rep.orphans_removed,
        "bytes_freed": rep.bytes_freed,
    }
    path = out / "gc_report.json"
    _write_json(path, report)
    print(
        f"cache gc: kept {rep.kept}, removed {rep.corrupt_removed} corrupt "
        f"and {rep.orphans_removed} orphaned entries ({rep.bytes_freed} bytes)"
    )
    return 0, [path]


# -- argument parsing and dispatch ------------------------------------------------

_COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "reconstruct": cmd_reconstruct,
    "compare": cmd_compare,
    "gset search": cmd_gset_search,
    "gset reconstruct": cmd_gset_reconstruct,
}


def _add_common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", required=config_required, help="experiment config file")
    p.add_argument("--out", help="artifact directory (default runs/<config name>)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads (recorded; single-threaded run)")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="also emit CSV plot data")


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with nested gset/cache subcommands."""
    parser = argparse.ArgumentParser(
        prog="returnspec", description="return-time experiments on compact group rotations"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "spectrum", "reconstruct", "compare"):
        _add_common(sub.add_parser(name))
    gset = sub.add_parser("gset").add_subparsers(dest="subcommand", required=True)
    _add_common(gset.add_parser("search"))
    _add_common(gset.add_parser("reconstruct"))
    cache = sub.add_parser("cache").add_subparsers(dest="subcommand", required=True)
    _add_common(cache.add_parser("gc"), config_required=False)
    return parser


def _manifest(
    out: Path, command: str, cfg: Optional[ExperimentConfig], args, artifacts: list[Path]
) -> None:
    manifest = {
        "command": command,
        "config_sha256": None
        if cfg is None
        else hashlib.sha256(cfg.text.encode("utf-8")).hexdigest(),
        "library_version": __version__,
        "seed": cfg.seed if cfg is not None else (args.seed or 0),
        "threads": args.threads,
        "format": args.format,
        "artifacts": {p.name: _sha256_file(p) for p in artifacts},
    }
    _write_json(out / "manifest.json", manifest)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command if not getattr(args, "subcommand", None) else f"{args.command} {args.subcommand}"
    if args.threads < 1:
        print("config error: --threads must be at least 1", file=sys.stderr)
        return 2

    cfg = None
    if args.config is not None:
        try:
            cfg = load_config(args.config)
        except FileNotFoundError:
            print(f"config error: no such file: {args.config}", file=sys.stderr)
            return 2
        except ConfigError as e:
            print(f"config error in {args.config}: {e}", file=sys.stderr)
            return 2
        if args.seed is not None:
            cfg.values["seed"] = args.seed

    if args.out is not None:
        out = Path(args.out)
    elif args.config is not None:
        out = Path("runs") / Path(args.config).stem
    else:
        print("config error: cache gc needs --out or --config", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)

    try:
        if command == "cache gc":
            cache_dir = _cache_dir_for(cfg, out) if cfg is not None else out / "cache"
            if cache_dir is None:
                print("config error: this config disables its cache", file=sys.stderr)
                return 2
            status, artifacts = cmd_cache_gc(cache_dir, out)
        else:
            if cfg is None:
                print("config error: --config is required", file=sys.stderr)
                return 2
            expected = command.replace(" ", "-")
            if cfg.experiment != expected:
                print(
                    f"config error: config is a {cfg.experiment!r} experiment, not {expected!r}",
                    file=sys.stderr,
                )
                return 2
            status, artifacts = _COMMANDS[command](cfg, out, args.format)
    except (ConfigError, GSetError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except CapExceededError as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return 4

    _manifest(out, command, cfg, args, artifacts)
    if status == 3:
        print("verification failure (details in the artifacts)", file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
