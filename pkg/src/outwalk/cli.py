"""Command-line front end.

``outwalk run`` executes a seeded experiment described by an INI config
and writes CSV records plus a JSON manifest; ``outwalk lip`` compares two
marked-graph files.  Exit codes: 0 success, 2 bad input, 3 resource cap.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .axes import L_value, axis_membership, default_probes, strip_ball_census
from .currents import base_current, normalize_against
from .currents import act as act_current
from .errors import InputError, ResourceError
from .freegroup import Basis, format_letters, invert, parse_automorphism
from .outerspace import (
    act,
    distance,
    from_text,
    lipschitz_witness,
    sym_distance,
    translation_length,
    unit_rose,
)
from .records import ExperimentRecord, config_hash, fmt_value, write_csv, write_json
from .walk import (
    WalkMeasure,
    dirac,
    drift_track,
    enumerate_conj_classes,
    sample_path,
    spectrum_track,
    strip_density_experiment,
)

EXPERIMENTS = (
    "walk",
    "drift",
    "ns-dynamics",
    "axis",
    "strip-density",
    "census",
)


def _class_label(basis: Basis, c) -> str:
    return format_letters(basis, c.cyclic_word).replace(" ", ".")


def _require(cfg: configparser.ConfigParser, section: str, key: str) -> str:
    if not cfg.has_option(section, key):
        raise InputError(f"config is missing [{section}] {key}")
    return cfg.get(section, key)


def _getint(cfg, section, key, default=None):
    if not cfg.has_option(section, key):
        if default is None:
            raise InputError(f"config is missing [{section}] {key}")
        return default
    try:
        return cfg.getint(section, key)
    except ValueError as exc:
        raise InputError(f"[{section}] {key} must be an integer: {exc}") from exc


def _getfloat(cfg, section, key, default=None):
    if not cfg.has_option(section, key):
        if default is None:
            raise InputError(f"config is missing [{section}] {key}")
        return default
    try:
        return cfg.getfloat(section, key)
    except ValueError as exc:
        raise InputError(f"[{section}] {key} must be a number: {exc}") from exc


class RunContext:
    """Everything an experiment needs, parsed once from the config text."""

    def __init__(self, config_text: str):
        cfg = configparser.ConfigParser()
        try:
            cfg.read_string(config_text)
        except configparser.Error as exc:
            raise InputError(f"bad config: {exc}") from exc
        if not cfg.has_section("experiment"):
            raise InputError("config needs an [experiment] section")
        self.cfg = cfg
        self.config_text = config_text
        self.name = _require(cfg, "experiment", "name")
        if self.name not in EXPERIMENTS:
            raise InputError(
                f"unknown experiment {self.name!r}; pick one of {EXPERIMENTS}"
            )
        rank = _getint(cfg, "experiment", "rank", 2)
        self.basis = Basis(rank)
        self.n = _getint(cfg, "experiment", "n", 25)
        self.num_seeds = _getint(cfg, "experiment", "seeds", 1)
        self.T0 = unit_rose(self.basis)
        self.autos = {}
        if cfg.has_section("automorphisms"):
            for key, text in cfg.items("automorphisms"):
                self.autos[key] = parse_automorphism(self.basis, text, name=key)
        self.measure = self._build_measure()
        max_len = _getint(cfg, "experiment", "classes_max_len", 3)
        self.classes = tuple(enumerate_conj_classes(self.basis, max_len))
        self.params = dict(cfg.items("params")) if cfg.has_section("params") else {}

    def _build_measure(self) -> WalkMeasure | None:
        cfg = self.cfg
        if not cfg.has_section("measure"):
            return None
        support = []
        for key, val in cfg.items("measure"):
            if key not in self.autos:
                raise InputError(
                    f"[measure] references unknown automorphism {key!r}"
                )
            try:
                p = float(val)
            except ValueError as exc:
                raise InputError(f"[measure] {key} must be a number") from exc
            support.append((self.autos[key], p))
        if not support:
            raise InputError("[measure] section is empty")
        return WalkMeasure(tuple(support), name="+".join(self.autos))

    def need_measure(self) -> WalkMeasure:
        if self.measure is None:
            raise InputError(
                f"experiment {self.name!r} needs a [measure] section"
            )
        return self.measure

    def auto_param(self, key: str = "auto"):
        name = self.params.get(key)
        if name is None:
            if len(self.autos) == 1:
                return next(iter(self.autos.values()))
            raise InputError(f"[params] {key} is required (an automorphism name)")
        if name not in self.autos:
            raise InputError(f"[params] {key} = {name!r} is not a defined automorphism")
        return self.autos[name]


# ---------------------------------------------------------------------------
# per-seed work (top level so ProcessPoolExecutor can pickle it)


def run_seed(config_text: str, seed: int) -> ExperimentRecord:
    ctx = RunContext(config_text)
    if ctx.name == "walk":
        return _walk_seed(ctx, seed)
    if ctx.name == "drift":
        return _drift_seed(ctx, seed)
    if ctx.name == "ns-dynamics":
        return _ns_seed(ctx, seed)
    if ctx.name == "strip-density":
        return _strip_density_seed(ctx, seed)
    raise InputError(f"experiment {ctx.name!r} is not seed-parallel")


def _spectrum_rows(ctx, seed, track, extra=()):
    rows = []
    for k, vec in enumerate(track.vectors):
        eps = track.epsilons[k - 1] if k >= 1 else ""
        row = [seed, k, *vec, eps]
        for col in extra:
            row.append(col[k] if col[k] is not None else "")
        rows.append(tuple(row))
    return rows


def _walk_seed(ctx: RunContext, seed: int) -> ExperimentRecord:
    m = ctx.need_measure()
    path = sample_path(m, ctx.n, seed)
    track = spectrum_track(path, ctx.T0, ctx.classes)
    labels = [_class_label(ctx.basis, c) for c in ctx.classes]
    return ExperimentRecord(
        experiment="walk",
        seed=seed,
        params={"n": ctx.n, "measure": m.name},
        header=("seed", "step", *labels, "epsilon"),
        rows=_spectrum_rows(ctx, seed, track),
        summary={"epsilon_final": track.epsilons[-1] if track.epsilons else ""},
        notes=("spectra are l1-projectivized over the class window",),
    )


def _drift_seed(ctx: RunContext, seed: int) -> ExperimentRecord:
    m = ctx.need_measure()
    path = sample_path(m, ctx.n, seed)
    track = drift_track(path, ctx.T0)
    rows = [
        (seed, k, v) for k, v in enumerate(track.values, start=1)
    ]
    return ExperimentRecord(
        experiment="drift",
        seed=seed,
        params={"n": ctx.n, "measure": m.name},
        header=("seed", "step", "dsym_over_n"),
        rows=rows,
        summary={
            "drift_estimate": track.estimate,
            "increment_estimate": track.increment_estimate,
        },
    )


def _ns_seed(ctx: RunContext, seed: int) -> ExperimentRecord:
    a = ctx.auto_param()
    path = sample_path(dirac(a), ctx.n, seed)
    track = spectrum_track(path, ctx.T0, ctx.classes)
    # growth ratio of the total (unprojectivized) spectrum step over step
    totals = []
    for g in path.positions:
        T = act(g, ctx.T0)
        totals.append(float(sum(translation_length(T, c) for c in ctx.classes)))
    ratios = [None] + [b / a_ for a_, b in zip(totals, totals[1:])]
    labels = [_class_label(ctx.basis, c) for c in ctx.classes]
    return ExperimentRecord(
        experiment="ns-dynamics",
        seed=seed,
        params={"n": ctx.n, "auto": a.name},
        header=("seed", "step", *labels, "epsilon", "ratio"),
        rows=_spectrum_rows(ctx, seed, track, extra=(ratios,)),
        summary={
            "epsilon_final": track.epsilons[-1] if track.epsilons else "",
            "ratio_final": ratios[-1] if len(ratios) > 1 else "",
        },
        notes=("ratio is the step growth factor of the raw spectrum total",),
    )


def _strip_density_seed(ctx: RunContext, seed: int) -> ExperimentRecord:
    m = ctx.need_measure()
    grid_text = ctx.params.get("l_grid", "1.2 1.5 2 3 5")
    try:
        grid = [float(v) for v in grid_text.split()]
    except ValueError as exc:
        raise InputError(f"[params] l_grid must be numbers: {exc}") from exc
    return strip_density_experiment(m, ctx.n, grid, seed, ctx.T0)


# ---------------------------------------------------------------------------
# whole-run experiments (not seed-parallel)


def _axis_run(ctx: RunContext) -> ExperimentRecord:
    a = ctx.auto_param()
    k_max = _getint(ctx.cfg, "params", "k_max", min(ctx.n, 10))
    L = _getfloat(ctx.cfg, "params", "l_threshold", 2.0)
    eta0 = base_current(ctx.basis)
    path = sample_path(dirac(a), ctx.n, 0)
    c_plus = normalize_against(act_current(path.positions[-1], eta0), ctx.T0)
    back = sample_path(dirac(invert(a)), ctx.n, 0)
    c_minus = normalize_against(act_current(back.positions[-1], eta0), ctx.T0)
    orbit = [act(path.positions[k], ctx.T0) for k in range(k_max + 1)]
    probes = default_probes(ctx.T0, [a], extra_trees=orbit)
    rows = []
    for k, T in enumerate(orbit):
        cert = axis_membership(
            c_minus, c_plus, T, L, probes, tree_id=f"k={k}", pair_id=a.name
        )
        rows.append((k, cert.L_lower, cert.verdict))
    return ExperimentRecord(
        experiment="axis",
        seed=0,
        params={"auto": a.name, "k_max": k_max, "l_threshold": L, "n": ctx.n},
        header=("k", "L_lower", "verdict"),
        rows=rows,
        summary={"probes": probes.description},
        notes=("pair is the proxy pushforward pair at depth n",),
    )


def _census_run(ctx: RunContext) -> ExperimentRecord:
    m = ctx.need_measure()
    gens = [a for a, _ in m.support]
    a = gens[0]
    k_max = _getint(ctx.cfg, "params", "k_max", 5)
    eta0 = base_current(ctx.basis)
    path = sample_path(dirac(a), ctx.n, 0)
    c_plus = normalize_against(act_current(path.positions[-1], eta0), ctx.T0)
    back = sample_path(dirac(invert(a)), ctx.n, 0)
    c_minus = normalize_against(act_current(back.positions[-1], eta0), ctx.T0)
    j_max = _getint(ctx.cfg, "params", "j_max", 6)
    orbit = [act(path.positions[j], ctx.T0) for j in range(j_max + 1)]
    probes = default_probes(ctx.T0, gens, extra_trees=orbit)
    if ctx.cfg.has_option("params", "l_threshold"):
        L = _getfloat(ctx.cfg, "params", "l_threshold")
    else:
        slack = _getfloat(ctx.cfg, "params", "l_slack", 1.05)
        L = slack * max(float(L_value(c_minus, c_plus, T, probes)) for T in orbit)
    census = strip_ball_census(
        c_minus, c_plus, L, probes, gens, k_max, ctx.T0
    )
    return ExperimentRecord(
        experiment="census",
        seed=0,
        params={"k_max": k_max, "l_threshold": L, "n": ctx.n,
                "generators": [g.name for g in gens]},
        header=("k", "ball_size", "strip_count"),
        rows=census.rows(),
        summary={
            "lambda_hat": census.lambda_hat,
            "collisions": census.collisions,
        },
        notes=("ball elements deduplicated by length-spectrum fingerprint",),
    )


# ---------------------------------------------------------------------------
# output assembly


_CSV_NAMES = {
    "walk": "spectrum.csv",
    "ns-dynamics": "spectrum.csv",
    "drift": "drift.csv",
    "strip-density": "density.csv",
    "axis": "axis.csv",
    "census": "census.csv",
}


def _emit(out_dir: Path, ctx: RunContext, records, seeds) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_name = _CSV_NAMES[ctx.name]
    header = records[0].header
    rows = []
    for rec in sorted(records, key=lambda r: r.seed):
        if rec.header != header:
            raise InputError("seed records disagree on CSV header")
        rows.extend(rec.rows)
    write_csv(out_dir / csv_name, header, rows)
    annotations = {}
    if "asymptote" in ctx.params:
        annotations["asymptote"] = float(ctx.params["asymptote"])
    manifest = {
        "experiment": ctx.name,
        "version": __version__,
        "config_sha256": config_hash(ctx.config_text),
        "seeds": list(seeds),
        "params": {k: fmt_value(v) for k, v in ctx.params.items()},
        "outputs": [csv_name],
        "annotations": annotations,
        "records": [rec.to_json() for rec in sorted(records, key=lambda r: r.seed)],
    }
    write_json(out_dir / "manifest.json", manifest)


def cmd_run(args) -> int:
    config_path = Path(args.config)
    if not config_path.exists():
        raise InputError(f"config file not found: {config_path}")
    config_text = config_path.read_text()
    ctx = RunContext(config_text)
    out_dir = Path(args.out)
    if ctx.name in ("axis", "census"):
        rec = _axis_run(ctx) if ctx.name == "axis" else _census_run(ctx)
        _emit(out_dir, ctx, [rec], seeds=[0])
        print(f"wrote {out_dir / _CSV_NAMES[ctx.name]} and manifest.json")
        return 0
    seeds = [args.seed_base + i for i in range(ctx.num_seeds)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(
                pool.map(run_seed, [config_text] * len(seeds), seeds)
            )
    else:
        records = [run_seed(config_text, s) for s in seeds]
    _emit(out_dir, ctx, records, seeds)
    print(f"wrote {out_dir / _CSV_NAMES[ctx.name]} and manifest.json")
    return 0


def cmd_lip(args) -> int:
    trees = []
    for p in (args.tree_a, args.tree_b):
        path = Path(p)
        if not path.exists():
            raise InputError(f"tree file not found: {path}")
        trees.append(from_text(path.read_text()))
    S, T = trees
    lip, witness = lipschitz_witness(S, T)
    d = distance(S, T)
    d_sym = sym_distance(S, T)
    print(f"lipschitz: {lip}")
    print(f"witness: {format_letters(S.basis, witness.cyclic_word)}")
    print(f"d: {fmt_value(d)}")
    print(f"d_sym: {fmt_value(d_sym)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="outwalk",
        description="random walks and exact Lipschitz geometry on Out(F_N)",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a seeded experiment from a config")
    run.add_argument("--config", required=True, help="INI experiment config")
    run.add_argument("--seed-base", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out", default="out", help="output directory")
    run.set_defaults(func=cmd_run)
    lip = sub.add_parser("lip", help="compare two marked metric graph files")
    lip.add_argument("tree_a")
    lip.add_argument("tree_b")
    lip.set_defaults(func=cmd_lip)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
