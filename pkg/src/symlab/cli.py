"""Command-line front end.

Subcommands
-----------
run           run one or many experiment configs from a JSON file
preset        run a named built-in experiment
check-family  diagnostics for a subspace family (span, partition, angles)
orbit         covering-gap trajectory of a reflection orbit on the sphere
convert       rewrite a body in another representation

Configs are single JSON documents mirroring the experiment config
field-for-field; a top-level list runs a batch.  Reports land in --out as
<name>.csv, <name>.json and <name>_limit.json, ordered by config hash so
the bytes do not depend on --threads.  Exit status is 0 on success, 2 on
invalid input and 3 on a numerical failure; aborted runs still write the
rows produced so far as <name>_partial.csv.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import serialize
from .bodies import DirectionGrid, convert
from .errors import InputError, NumericalError
from .groups import check_family, orbit_density
from .harness import (ExperimentConfig, _format_cell, build_body,
                      config_hash, preset_config, run_batch, run_experiment)
from .schedules import make_family
from .subspaces import Subspace


def _load_json(path):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config file {p}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {p} is not valid JSON: {exc}") from exc


def _family_from_config(doc: dict):
    """Subspace family from either a make_family recipe or explicit bases.

    Bases are kept verbatim when already orthonormal, matching the schedule
    config round trip.
    """
    if "make_family" in doc:
        spec = doc["make_family"]
        if not isinstance(spec, dict):
            raise InputError("config field 'make_family' must be an object "
                             "with n, i and kind")
        missing = [k for k in ("n", "i", "kind") if k not in spec]
        if missing:
            raise InputError(f"config field 'make_family' missing {missing[0]!r}")
        return make_family(int(spec["n"]), int(spec["i"]), str(spec["kind"]))
    if "family_bases" not in doc:
        raise InputError("config needs 'family_bases' or 'make_family'")
    rows = doc["family_bases"]
    if not isinstance(rows, list) or not rows:
        raise InputError("config field 'family_bases' must be a nonempty list")
    family = []
    for j, arr in enumerate(rows):
        basis = np.asarray(arr, dtype=float)
        if basis.ndim == 1:
            basis = basis[None, :]
        if basis.ndim != 2:
            raise InputError(f"config field 'family_bases'[{j}] must be a "
                             "matrix of basis rows")
        try:
            family.append(Subspace(basis))
        except InputError:
            family.append(Subspace.from_spanning(basis))
    return family


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_reports(reports, configs, outdir, verbose: bool):
    stems = []
    counts = {}
    for cfg in configs:
        stem = cfg.name or config_hash(cfg)[:12]
        if stem in counts:
            counts[stem] += 1
            stem = f"{stem}_{config_hash(cfg)[:12]}"
        else:
            counts[stem] = 1
        stems.append(stem)
    for report, stem in zip(reports, stems):
        paths = report.write(outdir, stem=stem)
        last = report.rows[-1]
        print(f"{stem}: verdict={report.verdict} final_m={report.final_m} "
              f"rows={len(report.rows)}")
        if verbose:
            cells = ", ".join(f"{k}={_format_cell(last[k])}"
                              for k in report.config.metrics)
            print(f"  final: {cells}")
            print(f"  wrote {paths['csv']}")


def _write_partial(exc, outdir) -> None:
    rows = getattr(exc, "partial_rows", None)
    cfg = getattr(exc, "partial_config", None)
    if rows is None or cfg is None:
        return
    stem = cfg.name or config_hash(cfg)[:12]
    cols = ("m",) + tuple(cfg.metrics)
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in cols))
    path = Path(outdir) / f"{stem}_partial.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"partial report ({len(rows)} rows) written to {path}",
          file=sys.stderr)


def cmd_run(args) -> int:
    doc = _load_json(args.config)
    docs = doc if isinstance(doc, list) else [doc]
    if not docs:
        raise InputError("config file holds no experiments")
    configs = [ExperimentConfig.from_dict(d) for d in docs]
    if args.seed is not None:
        configs = [replace(c, rng_seed=args.seed) for c in configs]
    configs = sorted(configs, key=config_hash)
    reports = run_batch(configs, threads=args.threads)
    _write_reports(reports, configs, _outdir(args), args.verbose)
    return 0


def cmd_preset(args) -> int:
    names = [n for n in (args.name, args.preset) if n]
    if len(names) != 1:
        raise InputError("give exactly one preset name")
    cfg = preset_config(names[0])
    if args.seed is not None:
        cfg = replace(cfg, rng_seed=args.seed)
    if args.threads > 1:
        reports = run_batch([cfg], threads=args.threads)
    else:
        reports = [run_experiment(cfg)]
    _write_reports(reports, [cfg], _outdir(args), args.verbose)
    return 0


def cmd_check_family(args) -> int:
    doc = _load_json(args.config)
    family = _family_from_config(doc)
    default = "reflection_lines" if family[0].dim == 1 else "reflection_planes"
    mode = doc.get("mode", default)
    diag = check_family(family, mode)
    stem = doc.get("name", "family")
    out = _outdir(args) / f"{stem}_diagnostics.json"
    payload = {"mode": mode, "member_count": len(family)}
    payload.update(diag.to_dict())
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    part = diag.orthogonal_partition_found
    print(f"{stem}: spans_ambient={diag.spans_ambient} "
          f"orthogonal_partition={'none' if part is None else list(part)}")
    if args.verbose:
        print(f"  wrote {out}")
    return 0


def cmd_orbit(args) -> int:
    doc = _load_json(args.config)
    family = _family_from_config(doc)
    n = family[0].ambient_dim
    if "seed_direction" in doc:
        seed_dir = np.asarray(doc["seed_direction"], dtype=float)
        norm = np.linalg.norm(seed_dir)
        if seed_dir.shape != (n,) or norm == 0:
            raise InputError("config field 'seed_direction' must be a nonzero "
                             f"vector of length {n}")
        seed_dir = seed_dir / norm
    else:
        seed_dir = np.full(n, 1.0 / np.sqrt(n))
    epsilon = float(doc.get("epsilon", 0.05))
    max_words = int(doc.get("max_words", 1_000_000))
    rng_seed = int(doc.get("rng_seed", 0))
    if args.seed is not None:
        rng_seed = args.seed
    max_len = int(doc.get("max_word_length", 512))
    gap, used, trajectory = orbit_density(
        family, seed_dir, epsilon, max_words, rng_seed,
        max_word_length=max_len, return_trajectory=True)
    stem = doc.get("name", "orbit")
    outdir = _outdir(args)
    csv_path = outdir / f"{stem}.csv"
    lines = ["words,gap"]
    for words, g in trajectory:
        lines.append(f"{words},{_format_cell(g)}")
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    summary = {
        "covering_gap": gap,
        "words_used": used,
        "epsilon": epsilon,
        "reached_epsilon": gap <= epsilon,
        "rng_seed": rng_seed,
    }
    (outdir / f"{stem}.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{stem}: gap={gap:.6g} words={used} "
          f"{'reached' if gap <= epsilon else 'missed'} epsilon={epsilon:g}")
    if args.verbose:
        print(f"  wrote {csv_path}")
    return 0


def cmd_convert(args) -> int:
    doc = _load_json(args.config)
    if "input" not in doc:
        raise InputError("config missing required field 'input'")
    if "target" not in doc:
        raise InputError("config missing required field 'target'")
    body = build_body(doc["input"])
    target = str(doc["target"])
    kwargs = {}
    if "resolution" in doc:
        kwargs["resolution"] = int(doc["resolution"])
    if "box_half" in doc:
        half = float(doc["box_half"])
        kwargs["box_lo"] = -half * np.ones(body.dim)
        kwargs["box_hi"] = half * np.ones(body.dim)
    if "directions" in doc:
        kwargs["grid"] = DirectionGrid.for_dimension(
            body.dim, int(doc["directions"]))
    converted = convert(body, target, **kwargs)
    stem = doc.get("name", "converted")
    out = _outdir(args) / f"{stem}.json"
    serialize.save(converted, out)
    print(f"{stem}: {type(body).__name__} -> {type(converted).__name__} "
          f"({out})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symlab",
        description="Subspace symmetrization experiments on convex bodies "
                    "and compact sets.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, config=True, threads=False, seed=False):
        if config:
            p.add_argument("--config", required=True, metavar="PATH",
                           help="JSON config file")
        p.add_argument("--out", default=".", metavar="DIR",
                       help="output directory (default: current)")
        if threads:
            p.add_argument("--threads", type=int, default=1, metavar="N",
                           help="worker threads for batch runs")
        if seed:
            p.add_argument("--seed", type=int, default=None, metavar="S",
                           help="override the config rng_seed")
        p.add_argument("-v", "--verbose", action="store_true",
                       help="print file paths and final metrics")

    p_run = sub.add_parser("run", help="run experiment config(s)")
    common(p_run, threads=True, seed=True)
    p_run.set_defaults(func=cmd_run)

    p_preset = sub.add_parser("preset", help="run a named built-in experiment")
    p_preset.add_argument("name", nargs="?", default=None,
                          help="preset name, e.g. oscillator_28june")
    p_preset.add_argument("--preset", default=None, metavar="NAME",
                          help="preset name (alternative to the positional)")
    common(p_preset, config=False, threads=True, seed=True)
    p_preset.set_defaults(func=cmd_preset)

    p_fam = sub.add_parser("check-family",
                           help="diagnostics for a subspace family")
    common(p_fam)
    p_fam.set_defaults(func=cmd_check_family)

    p_orbit = sub.add_parser("orbit",
                             help="reflection-orbit covering gap trajectory")
    common(p_orbit, seed=True)
    p_orbit.set_defaults(func=cmd_orbit)

    p_conv = sub.add_parser("convert",
                            help="rewrite a body in another representation")
    common(p_conv)
    p_conv.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _write_partial(exc, _outdir(args))
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        _write_partial(exc, _outdir(args))
        return 3


if __name__ == "__main__":
    sys.exit(main())
