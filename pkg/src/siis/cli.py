"""Command-line front end: ``siis {generate,train,bench,sweep,spectrum}``.

Settings resolve as command-line flag, then ``--config`` file, then the
generator's preset, then the built-in default. A config file is INI with a
``[siis]`` section holding flag names (``k = 15``) and an optional
``[solver]`` section for the remaining ADMM settings (``rho``, ``eps``, ...).

Exit codes: 0 success, 1 other failure, 2 invalid input, 3 numerical
failure, 4 file I/O failure.
"""
from __future__ import annotations

import argparse
import configparser
import sys
import traceback
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _io, bench
from .baselines import gfhf, gtf_only, l2_l1_fidelity
from .errors import DataIOError, SIISError, ValidationError
from .graph import (Dataset, build_knn_graph, difference_operator,
                    label_indicator, laplacian, load_csv, load_sparse,
                    save_edge_list)
from .solver import Problem, SolverConfig, solve
from .spectral import smallest_eigenpairs

DEFAULTS = {"k": 10, "xi": 1.0, "m": 30, "alpha": 100.0, "beta": 10.0,
            "noise": "0,0.2,0.4,0.6", "methods": "siis", "runs": 10, "seed": 0,
            "labeled": 10, "alphas": "1,10,100,1000", "betas": "1,10,100,1000",
            "baseline_alpha": None, "out": None, "dataset": None,
            "generate": None, "truth": None}

# graph and solver settings that suit each generator
PRESETS = {"double-moon": {"k": 10, "xi": 0.1, "m": 2},
           "blobs": {"k": 10, "xi": 1.0, "m": 30},
           "chain": {"m": 10}}

GENERATOR_KEYS = {
    "double-moon": {"n": int, "std": float, "labeled": int, "flipped": int,
                    "radius": float, "xoff": float, "yoff": float},
    "blobs": {"n": int, "classes": int, "spread": float, "dim": int},
    "chain": {"n": int},
}

INT_KEYS = {"k", "m", "runs", "seed", "labeled"}
FLOAT_KEYS = {"xi", "alpha", "beta", "baseline_alpha"}


# ---------------------------------------------------------------------------
# settings

@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    options: dict

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        """``double-moon:n=640,std=0.15`` -> name plus typed options."""
        name, _, rest = text.partition(":")
        name = name.strip()
        if name not in GENERATOR_KEYS:
            raise ValidationError(f"unknown generator {name!r}; choose from "
                                  f"{sorted(GENERATOR_KEYS)}")
        opts = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep or key not in GENERATOR_KEYS[name]:
                raise ValidationError(f"bad generator option {item!r} for {name}")
            try:
                opts[key] = GENERATOR_KEYS[name][key](val)
            except ValueError:
                raise ValidationError(f"bad value in generator option {item!r}") from None
        return cls(name, opts)


def _float_list(text, what) -> list[float]:
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse {what} list {text!r}") from None
    if not vals:
        raise ValidationError(f"{what} list is empty")
    return vals


@dataclass(frozen=True)
class RunConfig:
    """Every setting a command needs, validated up front."""

    k: int
    xi: float
    m: int
    alpha: float
    beta: float
    baseline_alpha: float | None
    noise: tuple
    methods: tuple
    runs: int
    seed: int
    labeled: int
    alphas: tuple
    betas: tuple
    out: Path | None
    dataset: Path | None
    generate: GeneratorSpec | None
    truth: Path | None
    solver: SolverConfig

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("--k must be positive")
        if not self.xi > 0:
            raise ValidationError("--xi must be positive")
        if self.m < 1:
            raise ValidationError("--m must be positive")
        if self.runs < 1:
            raise ValidationError("--runs must be positive")
        if self.labeled < 1:
            raise ValidationError("--labeled must be positive")
        for v in self.noise:
            if not 0 <= v < 1:
                raise ValidationError(f"noise rate {v} outside [0, 1)")
        bench._check_methods(self.methods)

    @property
    def params(self) -> bench.MethodParams:
        return bench.MethodParams(self.alpha, self.beta, self.baseline_alpha,
                                  self.solver)


def _read_config(path):
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise DataIOError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from exc
    main = dict(parser["siis"]) if parser.has_section("siis") else {}
    unknown = set(main) - set(DEFAULTS)
    if unknown:
        raise ValidationError(f"unknown key(s) in [siis]: {sorted(unknown)}")
    solver = dict(parser["solver"]) if parser.has_section("solver") else {}
    return main, solver


def resolve(args) -> RunConfig:
    """Merge flags, config file, generator preset and defaults."""
    file_main, file_solver = _read_config(args.config) if args.config else ({}, {})
    flags = {k: v for k, v in vars(args).items() if k in DEFAULTS and v is not None}
    gen_text = flags.get("generate", file_main.get("generate"))
    gen = GeneratorSpec.parse(gen_text) if gen_text else None
    preset = PRESETS.get(gen.name, {}) if gen else {}
    merged = {**DEFAULTS, **preset, **file_main, **flags}
    try:
        for key in INT_KEYS:
            merged[key] = int(merged[key])
        for key in FLOAT_KEYS:
            if merged[key] is not None:
                merged[key] = float(merged[key])
    except ValueError as exc:
        raise ValidationError(f"bad setting: {exc}") from None
    solver = SolverConfig.from_mapping(file_solver, alpha=merged["alpha"],
                                       beta=merged["beta"])
    path = lambda v: None if v is None else Path(v)  # noqa: E731
    return RunConfig(
        k=merged["k"], xi=merged["xi"], m=merged["m"], alpha=merged["alpha"],
        beta=merged["beta"], baseline_alpha=merged["baseline_alpha"],
        noise=tuple(_float_list(merged["noise"], "noise")),
        methods=tuple(s.strip() for s in str(merged["methods"]).split(",")
                      if s.strip()),
        runs=merged["runs"], seed=merged["seed"], labeled=merged["labeled"],
        alphas=tuple(_float_list(merged["alphas"], "alpha")),
        betas=tuple(_float_list(merged["betas"], "beta")),
        out=path(merged["out"]), dataset=path(merged["dataset"]),
        generate=gen, truth=path(merged["truth"]), solver=solver)


# ---------------------------------------------------------------------------
# data sources

def _load_dataset(path: Path) -> Dataset:
    if not path.exists():
        raise DataIOError(f"dataset {path} does not exist")
    if path.suffix.lower() in (".svm", ".libsvm", ".txt"):
        return load_sparse(path)
    return load_csv(path)


def _truth_path(cfg: RunConfig) -> Path | None:
    if cfg.truth is not None:
        return cfg.truth
    guess = cfg.dataset.with_name(cfg.dataset.stem + ".truth.csv")
    return guess if guess.exists() else None


def _read_truth(path: Path, n: int) -> np.ndarray:
    rows = _io.read_csv_body(path)[1:]
    if len(rows) != n:
        raise ValidationError(f"truth file {path} has {len(rows)} rows, expected {n}")
    try:
        truth = np.array([int(r[1]) for r in rows])
    except (ValueError, IndexError):
        raise ValidationError(f"truth file {path} is malformed") from None
    return truth[np.argsort([int(r[0]) for r in rows])]


def _generated_sample(cfg: RunConfig):
    """Dataset, truth (dataset order) and original row ids for a generator."""
    g, o = cfg.generate, cfg.generate.options
    if g.name == "double-moon":
        geom = {key: o[src] for key, src in (("radius", "radius"),
                ("x_offset", "xoff"), ("y_offset", "yoff")) if src in o}
        s = bench.make_double_moon(o.get("n", 640), o.get("std", 0.15),
                                   o.get("labeled", 3), o.get("flipped", 1),
                                   seed=cfg.seed, **geom)
        return s.dataset, s.truth
    if g.name == "blobs":
        pool = _pool(cfg)
        lab = bench.choose_labeled(pool.truth, cfg.labeled, cfg.seed)
        rate = cfg.noise[0] if len(cfg.noise) == 1 else 0.0
        given, _ = bench.inject_label_noise(pool.truth[lab], rate,
                                            pool.n_classes, cfg.seed)
        order = np.r_[lab, np.setdiff1d(np.arange(pool.n), lab)]
        return (Dataset(pool.features[order], given, order=order),
                pool.truth[order])
    raise ValidationError(f"generator {g.name!r} does not produce a dataset")


def _pool(cfg: RunConfig) -> bench.LabeledPool:
    """Fully labeled examples for the experiment protocol."""
    if cfg.generate is not None:
        g, o = cfg.generate, cfg.generate.options
        if g.name == "double-moon":
            X, y = bench.double_moon_points(o.get("n", 640), o.get("std", 0.15),
                                            cfg.seed)
            return bench.LabeledPool(X, y, "double-moon")
        if g.name == "blobs":
            return bench.make_blobs(o.get("n", 500), o.get("classes", 4),
                                    o.get("spread", 0.5), cfg.seed,
                                    o.get("dim", 2))
        raise ValidationError(f"generator {g.name!r} cannot feed an experiment")
    if cfg.dataset is None:
        raise ValidationError("give --dataset or --generate")
    data = _load_dataset(cfg.dataset)
    if data.labeled_count != data.total_count:
        raise ValidationError("experiments need the true class of every row; "
                              f"{cfg.dataset} has unlabeled rows")
    inv = np.argsort(data.order)
    X = data.features[inv]
    return bench.LabeledPool(X, data.given_labels[inv], cfg.dataset.stem)


def _require_out(cfg: RunConfig) -> Path:
    if cfg.out is None:
        raise ValidationError("--out is required")
    return cfg.out


def _meta(cfg: RunConfig, command: str) -> str:
    src = cfg.generate.name if cfg.generate else cfg.dataset
    return _io.meta_line(command=command, source=src, seed=cfg.seed)


# ---------------------------------------------------------------------------
# commands

def cmd_generate(cfg: RunConfig) -> int:
    """Write the dataset CSV and a ``<stem>.truth.csv`` sidecar."""
    out = _require_out(cfg)
    if cfg.generate is None:
        raise ValidationError("generate needs --generate")
    data, truth = _generated_sample(cfg)
    n, l = data.total_count, data.labeled_count
    inv = np.argsort(data.order)
    X = np.asarray(data.features)[inv]
    given = np.full(n, -1)
    given[:l] = data.given_labels
    given = given[inv]
    truth = truth[inv]
    cols = [f"x{j + 1}" for j in range(X.shape[1])] + ["label"]
    rows = [[*map(float, x), "" if g < 0 else int(g)] for x, g in zip(X, given)]
    meta = _meta(cfg, "generate")
    _io.write_csv(out, cols, rows, meta)
    flipped = (given >= 0) & (given != truth)
    _io.write_csv(out.with_name(out.stem + ".truth.csv"),
                  ("row", "truth", "flipped"),
                  [(i, int(t), int(f)) for i, (t, f) in enumerate(zip(truth, flipped))],
                  meta)
    print(f"wrote {n} rows ({l} labeled, {int(flipped.sum())} flipped) to {out}")
    return 0


def _fit(method, data: Dataset, cfg: RunConfig, g, L, basis):
    """Run one method on a dataset; returns ``(F, labels, trace or result)``."""
    ind = label_indicator(data)
    if method == "siis":
        res = solve(Problem.from_parts(g, basis, ind.Y, ind.labeled), cfg.solver)
        return res.F, res.labels, res
    P = difference_operator(g)
    a = cfg.baseline_alpha or cfg.alpha
    if method == "gfhf":
        res = gfhf(L, ind.Y, ind.labeled)
    elif method == "l2l1":
        res = l2_l1_fidelity(L, ind.Y, a, ind.labeled, cfg.params.baseline_config())
    else:
        res = gtf_only(P, ind.Y, a, ind.labeled, cfg.params.baseline_config())
    return res.F, res.labels, res


def cmd_train(cfg: RunConfig) -> int:
    """Graph, eigenbasis, solve, classify; predictions and traces per method."""
    out = _require_out(cfg)
    if cfg.generate is not None:
        data, truth = _generated_sample(cfg)
    elif cfg.dataset is not None:
        data = _load_dataset(cfg.dataset)
        tp = _truth_path(cfg)
        truth = _read_truth(tp, data.total_count)[data.order] if tp else None
    else:
        raise ValidationError("give --dataset or --generate")
    if cfg.m > data.total_count:
        raise ValidationError(f"--m {cfg.m} exceeds the number of examples "
                              f"{data.total_count}")
    g = build_knn_graph(data, cfg.k, cfg.xi)
    L = laplacian(g)
    basis = smallest_eigenpairs(L, cfg.m, seed=cfg.seed)
    meta = _meta(cfg, "train")
    inv = np.argsort(data.order)
    l = data.labeled_count
    labeled = np.arange(l)
    summary = []
    for method in cfg.methods:
        F, labels, res = _fit(method, data, cfg, g, L, basis)
        rows = [(int(data.order[i]), int(labels[i]), *map(float, F[i]))
                for i in inv]
        _io.write_csv(out / f"predictions_{method}.csv",
                      ("row", "label", *[f"f{j}" for j in range(F.shape[1])]),
                      rows, meta)
        if method == "siis":
            _io.write_csv(out / f"trace_{method}.csv",
                          ("iter", "relative_change", "objective", "mu"),
                          [(i + 1, float(t), float(o), float(mu)) for i, (t, o, mu)
                           in enumerate(zip(res.trace, res.objectives, res.mus))],
                          meta)
        elif res.iterations:
            _io.write_csv(out / f"trace_{method}.csv", ("iter", "relative_change"),
                          [(i + 1, float(t)) for i, t in enumerate(res.trace)], meta)
        entry = {"method": method, "iterations": int(getattr(res, "iterations", 0)),
                 "converged": bool(res.converged)}
        if truth is not None:
            flipped = labeled[data.given_labels != truth[:l]]
            met = bench.evaluate(labels, truth, labeled, flipped)
            entry.update(acc_labeled=met.acc_labeled,
                         acc_unlabeled=met.acc_unlabeled,
                         correction_rate=None if np.isnan(met.correction_rate)
                         else met.correction_rate)
            print(f"{method}: acc_L={met.acc_labeled:.4f} "
                  f"acc_U={met.acc_unlabeled:.4f} iters={entry['iterations']}")
        else:
            print(f"{method}: iters={entry['iterations']} "
                  f"converged={entry['converged']}")
        summary.append(entry)
    _io.write_json(out / "summary.json", {
        "config": _describe(cfg), "n": data.total_count, "labeled": l,
        "results": summary})
    return 0


def cmd_bench(cfg: RunConfig) -> int:
    """Methods x noise levels x runs; report.csv, summary.json, traces/."""
    out = _require_out(cfg)
    pool = _pool(cfg)
    report = bench.run_experiment(pool, cfg.methods, cfg.noise, cfg.runs,
                                  cfg.seed, cfg.labeled, cfg.k, cfg.xi, cfg.m,
                                  cfg.params)
    report.write(out, meta=_meta(cfg, "bench"))
    for s in report.summary():
        acc = s["acc_unlabeled"]
        txt = "failed" if acc is None else f"{acc['mean']:.4f} +- {acc['std']:.4f}"
        print(f"{s['method']:5s} noise={s['noise_rate']:.2f} acc_U={txt}")
    failed = sum(1 for r in report.records if r.error)
    if failed:
        print(f"{failed} run(s) failed; see the error column", file=sys.stderr)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    """SIIS accuracy over the alpha x beta grid at one noise level."""
    out = _require_out(cfg)
    if len(cfg.noise) != 1:
        raise ValidationError("sweep takes a single --noise level")
    pool = _pool(cfg)
    rows = bench.sweep(pool, cfg.alphas, cfg.betas, cfg.noise[0], cfg.runs,
                       cfg.seed, cfg.labeled, cfg.k, cfg.xi, cfg.m)
    _io.write_csv(out / "sweep.csv", ("alpha", "beta", "acc_L_mean", "acc_L_std",
                                      "acc_U_mean", "acc_U_std"),
                  rows, _meta(cfg, "sweep"))
    print(f"wrote {len(rows)} grid points to {out / 'sweep.csv'}")
    return 0


def cmd_spectrum(cfg: RunConfig) -> int:
    """Smallest eigenpairs of the graph Laplacian, plus the edge list."""
    out = _require_out(cfg)
    if cfg.generate is not None and cfg.generate.name == "chain":
        g = bench.chain_example(cfg.generate.options.get("n", 10))[0]
    elif cfg.generate is not None:
        g = build_knn_graph(_generated_sample(cfg)[0], cfg.k, cfg.xi)
    elif cfg.dataset is not None:
        g = build_knn_graph(_load_dataset(cfg.dataset), cfg.k, cfg.xi)
    else:
        raise ValidationError("give --dataset or --generate")
    if cfg.m > g.n:
        raise ValidationError(f"--m {cfg.m} exceeds the number of vertices {g.n}")
    basis = smallest_eigenpairs(laplacian(g), cfg.m, seed=cfg.seed)
    meta = _meta(cfg, "spectrum")
    _io.write_csv(out / "spectrum.csv", ("k", "eigenvalue"),
                  [(i + 1, float(v)) for i, v in enumerate(basis.eigenvalues)], meta)
    _io.write_csv(out / "eigenvectors.csv", [f"u{i + 1}" for i in range(basis.m)],
                  [tuple(map(float, row)) for row in basis.U], meta)
    try:
        out.mkdir(parents=True, exist_ok=True)
        save_edge_list(g, out / "edges.txt")
    except OSError as exc:
        raise DataIOError(f"cannot write {out / 'edges.txt'}: {exc}") from exc
    print(" ".join(f"{v:.6g}" for v in basis.eigenvalues))
    return 0


def _describe(cfg: RunConfig) -> dict:
    d = {k: getattr(cfg, k) for k in ("k", "xi", "m", "alpha", "beta",
                                       "baseline_alpha", "seed", "labeled")}
    d["methods"] = list(cfg.methods)
    d["noise"] = list(cfg.noise)
    d["dataset"] = None if cfg.dataset is None else str(cfg.dataset)
    d["generate"] = None if cfg.generate is None else cfg.generate.name
    return d


COMMANDS = {"generate": cmd_generate, "train": cmd_train, "bench": cmd_bench,
            "sweep": cmd_sweep, "spectrum": cmd_spectrum}


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    add = common.add_argument
    add("--config", help="INI file with [siis] and [solver] sections")
    add("--dataset", help="CSV (features..., label) or libsvm-style file")
    add("--generate", help="generator spec, e.g. double-moon:n=640,std=0.15, "
                           "blobs:n=500,classes=4 or chain:n=10")
    add("--truth", help="ground-truth sidecar (default: <dataset>.truth.csv)")
    add("--k", type=int, help="nearest neighbours per vertex")
    add("--xi", type=float, help="Gaussian kernel width")
    add("--m", type=int, help="number of eigenvectors")
    add("--alpha", type=float, help="fidelity weight")
    add("--beta", type=float, help="eigenvalue penalty weight")
    add("--baseline-alpha", dest="baseline_alpha", type=float,
        help="fidelity weight for l2l1/gtf (default: --alpha)")
    add("--noise", help="label noise rate(s), comma separated")
    add("--methods", help="comma separated subset of siis,gfhf,l2l1,gtf")
    add("--runs", type=int, help="repetitions per noise level")
    add("--labeled", type=int, help="labeled examples per class")
    add("--seed", type=int, help="root random seed")
    add("--out", help="output file (generate) or directory")
    parser = argparse.ArgumentParser(
        prog="siis", description="Robust graph-based semi-supervised "
        "classification with noisy labels.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=fn.__doc__.split("\n")[0])
        if name == "sweep":
            p.add_argument("--alphas", help="alpha grid, comma separated")
            p.add_argument("--betas", help="beta grid, comma separated")
    return parser


def _origin(exc: BaseException) -> str:
    """Name of the package module the exception was raised in."""
    tb, mod = exc.__traceback__, "siis"
    while tb is not None:
        name = tb.tb_frame.f_globals.get("__name__", "")
        if name.startswith("siis."):
            mod = name.split(".")[1].lstrip("_")
        tb = tb.tb_next
    return mod


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"siis: warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    previous, warnings.showwarning = warnings.showwarning, _show_warning
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except SIISError as exc:
        print(f"siis: error [{_origin(exc)}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"siis: error [io]: {exc}", file=sys.stderr)
        return DataIOError.exit_code
    except Exception:  # pragma: no cover - unexpected bug
        traceback.print_exc()
        return 1
    finally:
        warnings.showwarning = previous


if __name__ == "__main__":
    sys.exit(main())
