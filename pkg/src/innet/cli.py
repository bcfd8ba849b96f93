"""Command line: ``train``, ``bench`` and ``eval``.

Configuration files are flat ``key = value`` text with ``#`` comments::

    algorithm = inn          # irw | inn | inplus
    preset = DB1             # optional preset defaults
    lambda = 15              # irw scope
    zeta_start = 1
    zeta_step = 1
    zeta_end = 200           # or: zeta = 1, 5, 10
    t_max = 10               # candidates per scope
    r = 0.9
    tol = 0.05
    l_max = 30
    seed = 42
    repeats = 10
    dataset = synth          # or a CSV path
    train_count = 2000
    test_count = 400
    output_dir = results

Relative paths are resolved against the config file's directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .builder import PRESETS, TrainerConfig, matlab_range, train
from .data import (
    CLASSIFICATION, REGRESSION, Dataset, NormParams, load_csv, normalize, split, synth_function,
)
from .errors import ContractError, InnError, ParseError
from .metrics import accuracy, kde, rmse
from .model import hidden_matrix, model_from_dict, model_to_dict

log = logging.getLogger(__name__)

_ALIASES = {
    "pool_size": "t_max",
    "max_nodes": "l_max",
    "ell": "tol",
    "scope_fixed": "lambda",
    "target": "targets",
}
_KNOWN = {
    "algorithm", "preset", "lambda", "zeta", "zeta_start", "zeta_step", "zeta_end", "t_max",
    "r", "tol", "l_max", "seed", "max_retries", "activation", "repeats", "dataset", "targets",
    "task", "header", "train_count", "test_count", "test_fraction", "split_seed", "synth_n",
    "noise", "output_dir",
}


def parse_kv(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key.lower(), key.lower())
        if key not in _KNOWN:
            raise ParseError(f"{source}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.replace(";", ",").split(",") if v.strip())


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off", ""):
        return False
    raise ParseError(f"not a boolean: {s!r}")


@dataclass(frozen=True)
class RunConfig:
    trainer: TrainerConfig
    dataset: str = "synth"
    targets: tuple[str, ...] = ("-1",)
    task: str = REGRESSION
    header: bool = False
    train_count: Optional[int] = None
    test_count: Optional[int] = None
    test_fraction: float = 0.2
    split_seed: int = 0
    synth_n: Optional[int] = None
    noise: float = 0.0
    repeats: int = 1
    output_dir: Path = Path("results")

    def __post_init__(self):
        if self.repeats < 1:
            raise ContractError("repeats must be >= 1")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ContractError(f"unknown task {self.task!r}")

    @classmethod
    def from_mapping(cls, kv: dict[str, str], base_dir: Path = Path(".")) -> "RunConfig":
        try:
            return cls._from_mapping(kv, base_dir)
        except ValueError as exc:
            if isinstance(exc, InnError):
                raise
            raise ParseError(f"bad config value: {exc}") from exc

    @classmethod
    def _from_mapping(cls, kv, base_dir):
        algorithm = kv.get("algorithm", "inn")
        t: dict = {}
        if "preset" in kv:
            name = kv["preset"].upper()
            if name not in PRESETS:
                raise ParseError(f"unknown preset {kv['preset']!r}")
            row = dict(PRESETS[name])
            t["scope_list"] = matlab_range(*row.pop("zeta"))
            t.update(row)
            if algorithm == "irw":
                t["pool_size"] = 1
        if "zeta" in kv:
            t["scope_list"] = _floats(kv["zeta"])
        elif any(k in kv for k in ("zeta_start", "zeta_step", "zeta_end")):
            start = float(kv.get("zeta_start", 1))
            t["scope_list"] = matlab_range(
                start, float(kv.get("zeta_step", 1)), float(kv.get("zeta_end", start))
            )
        for key, name, conv in (
            ("lambda", "scope_fixed", float), ("t_max", "pool_size", int), ("r", "r", float),
            ("tol", "tol", float), ("l_max", "max_nodes", int), ("seed", "seed", int),
            ("max_retries", "max_retries", int), ("activation", "activation", str),
        ):
            if key in kv:
                t[name] = conv(kv[key])
        trainer = TrainerConfig(algorithm=algorithm, **t)

        dataset = kv.get("dataset", "synth")
        if dataset != "synth":
            dataset = str((base_dir / dataset).resolve()) if not Path(dataset).is_absolute() else dataset
        out = Path(kv.get("output_dir", "results"))
        if not out.is_absolute():
            out = base_dir / out
        opt_int = lambda k: int(kv[k]) if k in kv else None
        return cls(
            trainer=trainer,
            dataset=dataset,
            targets=tuple(s.strip() for s in kv.get("targets", "-1").split(",") if s.strip()),
            task=kv.get("task", REGRESSION),
            header=_bool(kv.get("header", "0")),
            train_count=opt_int("train_count"),
            test_count=opt_int("test_count"),
            test_fraction=float(kv.get("test_fraction", 0.2)),
            split_seed=int(kv.get("split_seed", 0)),
            synth_n=opt_int("synth_n"),
            noise=float(kv.get("noise", 0.0)),
            repeats=int(kv.get("repeats", 1)),
            output_dir=out,
        )

    def describe(self) -> dict:
        d = asdict(self)
        d["output_dir"] = None  # location does not affect results
        d["dataset"] = self.dataset if self.dataset == "synth" else Path(self.dataset).name
        return d


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"config file not found: {path}")
    return RunConfig.from_mapping(parse_kv(path.read_text(), str(path)), path.parent)


@dataclass
class PreparedData:
    train: Dataset
    test: Optional[Dataset]
    norm: NormParams
    classes: Optional[list[float]] = None


def prepare_data(cfg: RunConfig) -> PreparedData:
    """Load or synthesize, split, and scale with the training split's bounds."""
    classes = None
    if cfg.dataset == "synth":
        n_train = cfg.train_count if cfg.train_count is not None else 2000
        n_test = cfg.test_count if cfg.test_count is not None else 400
        n = cfg.synth_n or n_train + n_test
        ds = synth_function(n, seed=cfg.split_seed, noise=cfg.noise)
    else:
        path = Path(cfg.dataset)
        if not path.is_file():
            raise ParseError(f"data file not found: {path}")
        ds = load_csv(path, cfg.targets, cfg.task, cfg.header)
        if ds.classes is not None:
            classes = list(ds.classes)
        if cfg.train_count is None:
            n_test = int(round(cfg.test_fraction * len(ds))) if cfg.test_count is None else cfg.test_count
            n_train = len(ds) - n_test
        else:
            n_train = cfg.train_count
            n_test = cfg.test_count if cfg.test_count is not None else len(ds) - n_train
    tr, te = split(ds, n_train, n_test, seed=cfg.split_seed)
    tr_n, norm = normalize(tr)
    te_n = norm.apply(te) if len(te) else None
    return PreparedData(tr_n, te_n, norm, classes)


# ----------------------------------------------------------------------------
# train


def cmd_train(config_path, out_dir=None) -> int:
    cfg = load_config(config_path)
    out = Path(out_dir) if out_dir else cfg.output_dir
    data = prepare_data(cfg)
    model, trace = train(cfg.trainer, data.train, data.test, norm=data.norm)
    if data.classes is not None:
        model.meta["classes"] = data.classes
    out.mkdir(parents=True, exist_ok=True)
    (out / "model.json").write_text(json.dumps(model_to_dict(model), indent=1, sort_keys=True))
    trace.write_csv(out / "trace.csv")
    trace.write_timing_csv(out / "trace_timing.csv")
    print(f"nodes={model.n_nodes}")
    print(f"train_rmse={trace.train_rmse!r}")
    if trace.test_rmse is not None:
        print(f"test_rmse={trace.test_rmse!r}")
    print(f"wall_seconds={trace.wall_time:.6f}")
    return 0


# ----------------------------------------------------------------------------
# bench


@dataclass
class RunReport:
    """Per-repeat results plus aggregates for one configuration."""

    label: Optional[str]
    repeats: list[dict] = field(default_factory=list)
    curves: list[np.ndarray] = field(default_factory=list)
    errors: list[np.ndarray] = field(default_factory=list)
    wall_seconds: list[float] = field(default_factory=list)

    FIELDS = ("train_rmse", "test_rmse", "accuracy", "node_count")

    def aggregate(self) -> dict:
        agg = {}
        for key in self.FIELDS:
            vals = [r[key] for r in self.repeats if r.get(key) is not None]
            if vals:
                agg[key] = {"mean": float(np.mean(vals)), "std": float(np.std(vals))}
        return agg

    def convergence(self) -> np.ndarray:
        """Mean training RMSE against node count; finished runs hold their final value."""
        n = max(len(c) for c in self.curves)
        padded = np.array([np.pad(c, (0, n - len(c)), mode="edge") for c in self.curves])
        return padded.mean(axis=0)

    def pooled_errors(self) -> np.ndarray:
        return np.concatenate([e.ravel() for e in self.errors]) if self.errors else np.zeros(0)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "repeats": self.repeats,
            "aggregate": self.aggregate(),
            "convergence": [[i, float(v)] for i, v in enumerate(self.convergence())],
        }


def run_repeats(cfg: RunConfig, data: PreparedData, label: Optional[str] = None) -> RunReport:
    report = RunReport(label)
    for i in range(cfg.repeats):
        tcfg = replace(cfg.trainer, seed=cfg.trainer.seed + i)
        t0 = time.perf_counter()
        model, trace = train(tcfg, data.train, data.test, norm=data.norm)
        report.wall_seconds.append(time.perf_counter() - t0)
        rec = {
            "repeat": i,
            "seed": tcfg.seed,
            "node_count": model.n_nodes,
            "train_rmse": trace.train_rmse,
            "test_rmse": trace.test_rmse,
            "accuracy": None,
        }
        eval_set = data.test if data.test is not None else data.train
        pred = hidden_matrix(model, eval_set.X) @ model.beta if model.nodes else np.zeros_like(eval_set.Y)
        if eval_set.task == CLASSIFICATION and eval_set.n_outputs >= 2:
            rec["accuracy"] = accuracy(pred, eval_set.Y)
        report.repeats.append(rec)
        report.curves.append(trace.rmse_curve())
        report.errors.append(pred - eval_set.Y)
    return report


def _parse_sweep(spec: str) -> tuple[str, list[str]]:
    if "=" not in spec:
        raise ParseError(f"sweep must look like key=v1,v2,...; got {spec!r}")
    key, values = spec.split("=", 1)
    key = _ALIASES.get(key.strip().lower(), key.strip().lower())
    if key not in ("t_max", "zeta", "lambda", "r", "l_max"):
        raise ParseError(f"cannot sweep over {key!r}")
    vals = [v.strip() for v in values.split(",") if v.strip()]
    if not vals:
        raise ParseError("empty sweep")
    return key, vals


def _swept(cfg: RunConfig, key: str, value: str) -> RunConfig:
    t = cfg.trainer
    if key == "t_max":
        t = replace(t, pool_size=int(value))
    elif key == "zeta":
        t = replace(t, scope_list=(float(value),), scope_fixed=float(value))
    elif key == "lambda":
        t = replace(t, scope_fixed=float(value))
    elif key == "r":
        t = replace(t, r=float(value))
    else:
        t = replace(t, max_nodes=int(value))
    return replace(cfg, trainer=t)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else repr(v) for v in row) + "\n")


def cmd_bench(config_path, sweep: Optional[str] = None, out_dir=None) -> int:
    cfg = load_config(config_path)
    out = Path(out_dir) if out_dir else cfg.output_dir
    data = prepare_data(cfg)

    if sweep:
        key, values = _parse_sweep(sweep)
        runs = [(v, _swept(cfg, key, v)) for v in values]
    else:
        key, runs = None, [(None, cfg)]
    reports = [run_repeats(c, data, label=v) for v, c in runs]

    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "config": cfg.describe(),
        "data": {
            "train": len(data.train),
            "test": 0 if data.test is None else len(data.test),
            "features": data.train.n_features,
            "outputs": data.train.n_outputs,
            "task": data.train.task,
        },
        "sweep": key,
        "results": [r.to_dict() for r in reports],
    }
    (out / "report.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    timing = {
        "results": [
            {"label": r.label, "wall_seconds": r.wall_seconds,
             "mean": float(np.mean(r.wall_seconds)), "std": float(np.std(r.wall_seconds))}
            for r in reports
        ]
    }
    (out / "timing.json").write_text(json.dumps(timing, indent=1, sort_keys=True) + "\n")

    lead = [key] if key else []
    conv_rows, kde_rows, err_rows = [], [], []
    for r in reports:
        tag = [r.label] if key else []
        conv_rows += [tag + [i, float(v)] for i, v in enumerate(r.convergence())]
        for j, e in enumerate(r.errors):
            err_rows += [tag + [j, float(v)] for v in e.ravel()]
        try:
            est = kde(r.pooled_errors())
        except InnError as exc:
            log.warning("no density for %s: %s", r.label, exc)
            continue
        kde_rows += [tag + [float(x), float(y)] for x, y in zip(est.grid, est.density)]
    _write_csv(out / "convergence.csv", lead + ["nodes", "mean_rmse"], conv_rows)
    _write_csv(out / "kde.csv", lead + ["error", "density"], kde_rows)
    _write_csv(out / "errors.csv", lead + ["repeat", "error"], err_rows)
    if key:
        rows = []
        for r in reports:
            agg = r.aggregate()
            rows.append([r.label] + [agg[f]["mean"] if f in agg else "" for f in RunReport.FIELDS])
        _write_csv(out / "sweep.csv", [key] + [f"mean_{f}" for f in RunReport.FIELDS], rows)

    for r in reports:
        agg = r.aggregate()
        prefix = f"{key}={r.label} " if key else ""
        print(prefix + " ".join(f"{k}={v['mean']!r}" for k, v in agg.items()))
    return 0


# ----------------------------------------------------------------------------
# eval


def parse_schema(spec: str) -> dict:
    """``targets=-1;task=regression;header=0`` -> keyword arguments for :func:`load_csv`."""
    out = {"targets": ("-1",), "task": REGRESSION, "header": False}
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ParseError(f"bad schema entry {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        k = _ALIASES.get(k.lower(), k.lower())
        if k == "targets":
            out["targets"] = tuple(s.strip() for s in v.split(",") if s.strip())
        elif k == "task":
            out["task"] = v
        elif k == "header":
            out["header"] = _bool(v)
        else:
            raise ParseError(f"unknown schema key {k!r}")
    return out


def cmd_eval(model_path, data_path, schema: str = "") -> int:
    model_path = Path(model_path)
    if not model_path.is_file():
        raise ParseError(f"model file not found: {model_path}")
    try:
        doc = json.loads(model_path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{model_path}: {exc}") from exc
    model = model_from_dict(doc)
    kw = parse_schema(schema)
    ds = load_csv(data_path, classes=model.meta.get("classes"), **kw)
    if ds.n_features != model.input_dim:
        raise ContractError(f"feature count mismatch: model expects d={model.input_dim}, data has d={ds.n_features}")
    if ds.n_outputs != model.n_outputs:
        raise ContractError(f"output count mismatch: model has m={model.n_outputs}, data has m={ds.n_outputs}")
    if model.norm is not None:
        ds = model.norm.apply(ds)
    pred = hidden_matrix(model, ds.X) @ model.beta if model.nodes else np.zeros_like(ds.Y)
    print(f"n={len(ds)}")
    print(f"rmse={rmse(pred, ds.Y)!r}")
    if ds.task == CLASSIFICATION or model.task == CLASSIFICATION:
        print(f"accuracy={accuracy(pred, ds.Y)!r}")
    return 0


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="innet", description="Constructive random-weight networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train one network and write model.json + trace.csv")
    t.add_argument("--config", required=True)
    t.add_argument("--out", help="output directory (overrides output_dir)")

    b = sub.add_parser("bench", help="repeated runs; report.json + plot-ready CSVs")
    b.add_argument("--config", required=True)
    b.add_argument("--sweep", help="e.g. pool_size=1,10,100 or zeta=1,5,15")
    b.add_argument("--out", help="output directory (overrides output_dir)")

    e = sub.add_parser("eval", help="score a saved model on a CSV file")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--schema", default="", help="e.g. 'targets=-1;task=regression;header=0'")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "train":
            return cmd_train(args.config, args.out)
        if args.command == "bench":
            return cmd_bench(args.config, args.sweep, args.out)
        return cmd_eval(args.model, args.data, args.schema)
    except (InnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
