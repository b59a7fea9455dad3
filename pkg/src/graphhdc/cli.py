"""Command-line front end.

Every command reads one YAML run config (paths inside it are relative to
the config file), lets flags override individual fields, and writes its
artifacts plus a ``manifest.json`` into one output directory. Relative
output directories are placed under ``$GRAPHHDC_OUTPUT_ROOT`` when set.

Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
Failures print a JSON object to stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .data import (DatasetTable, binarize, clip_censored_values, gap_threshold, load_csv,
                   write_csv)
from .errors import ConfigError, DataError, GraphHDCError
from .evaluation import (SplitPlan, SweepGrid, evaluate, make_splits, parallel_map,
                         write_split_csv, write_summary_json, sweep, write_sweep_csv)
from .explain import (MAS_COMPONENT_HEADER, MAS_SUMMARY_HEADER, aggregate_attributions,
                      distance_summary, explain_state, mas_component_rows, mas_state,
                      mas_summary_rows, sample_embedding, write_attribution_csv,
                      write_attribution_json)
from .graph import load_graph_spec
from .trainer import (TrainConfig, format_float, load_checkpoint, save_checkpoint, train)

OUTPUT_ROOT_ENV = "GRAPHHDC_OUTPUT_ROOT"
MANIFEST = "manifest.json"

_TRAIN_FLAGS = {"seed": int, "epochs": int, "D": int, "d": int, "lr": float, "beta": float}


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# run configuration

def _read_yaml(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must contain a mapping")
    return doc


def _absolute(base: Path, value):
    if value is None:
        return None
    p = Path(value)
    return str(p if p.is_absolute() else (base / p).resolve())


def resolve_config(args) -> dict:
    """Config file merged with command-line overrides; all paths absolute."""
    if getattr(args, "resolved", None) is not None:
        doc = json.loads(json.dumps(args.resolved))
    else:
        doc = _read_yaml(args.config)
        base = Path(args.config).resolve().parent
        data = dict(doc.get("dataset") or {})
        if "path" not in data:
            raise ConfigError("config needs dataset.path")
        data["path"] = _absolute(base, data["path"])
        doc["dataset"] = data
        if "graph" not in doc:
            raise ConfigError("config needs a graph spec path under 'graph'")
        doc["graph"] = _absolute(base, doc["graph"])
    known = {"dataset", "graph", "train", "eval", "sweep", "explain", "output"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    train_doc = dict(doc.get("train") or {})
    for name in _TRAIN_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            train_doc[name] = value
    doc["train"] = TrainConfig.from_dict(train_doc).to_dict()
    ev = dict(doc.get("eval") or {})
    for flag, key in (("protocol", "protocol"), ("repeats", "n_repeats"),
                      ("fold_column", "fold_column"), ("train_fraction", "train_fraction")):
        value = getattr(args, flag, None)
        if value is not None:
            ev[key] = value
    if ev.get("protocol") == "fold":
        ev["protocol"] = "group_fold"
    doc["eval"] = ev
    threshold = getattr(args, "threshold", None)
    if threshold is not None:
        doc["dataset"]["threshold"] = threshold
    return doc


def split_plan(doc: dict, **overrides) -> SplitPlan:
    ev = dict(doc.get("eval") or {})
    ev.update(overrides)
    allowed = {"protocol", "n_repeats", "train_fraction", "fold_column", "stratified",
               "max_redraws", "reseed"}
    unknown = set(ev) - allowed
    if unknown:
        raise ConfigError(f"unknown eval options: {sorted(unknown)}")
    return SplitPlan(base_seed=int(doc["train"]["seed"]), **ev)


def load_dataset(doc: dict) -> tuple[DatasetTable, object, dict]:
    """Table, graph spec and a label report from the ``dataset``/``graph`` sections."""
    data = doc["dataset"]
    allowed = {"path", "parameters", "target", "label", "regimes", "exclude_rows", "threshold",
               "class_names"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown dataset options: {sorted(unknown)}")
    if "path" not in data:
        raise ConfigError("dataset.path is required")
    if not Path(data["path"]).is_file():
        raise DataError(f"dataset file not found: {data['path']}")
    spec_doc = _read_yaml(doc["graph"])
    parameters = data.get("parameters") or [
        name for g in spec_doc.get("groups", []) for name in g.get("parameters", [])]
    if not parameters:
        raise ConfigError("no parameter columns named in the dataset section or graph spec")
    table = load_csv(data["path"], parameters, target=data.get("target"),
                     label=data.get("label"), regimes=data.get("regimes") or (),
                     class_names=data.get("class_names"))
    if data.get("exclude_rows"):
        table = table.drop_rows(data["exclude_rows"])
    report = {}
    if table.labels is None:
        if table.target is None:
            raise ConfigError("dataset needs either a label column or a target to threshold")
        threshold = data.get("threshold", "auto")
        if threshold in (None, "auto"):
            gap = gap_threshold(table.target)
            threshold = gap.threshold
            report["gap"] = asdict(gap)
        threshold = float(threshold)
        table = table.with_labels(binarize(table.target, threshold, table.censored))
        report["threshold"] = threshold
    report["class_counts"] = np.bincount(table.labels, minlength=table.n_classes).tolist()
    spec = load_graph_spec(doc["graph"], columns=table.parameter_names).checked(table.P)
    return table, spec, report


# output handling

def output_dir(doc: dict, args, command: str) -> Path:
    out = Path(getattr(args, "out", None) or doc.get("output") or command)
    if not out.is_absolute():
        out = Path(os.environ.get(OUTPUT_ROOT_ENV, ".")) / out
    out.mkdir(parents=True, exist_ok=True)
    return out


class Run:
    """Collects artifacts and writes the manifest for one command."""

    def __init__(self, command: str, argv: list, doc: dict, out: Path, inputs=()):
        self.command, self.argv, self.doc, self.out = command, argv, doc, out
        missing = [str(p) for p in inputs if p and not Path(p).is_file()]
        if missing:
            raise DataError(f"input file not found: {missing[0]}")
        self.inputs = {str(p): sha256_file(p) for p in inputs if p}
        self.artifacts = []
        self.seeds = {"base_seed": doc.get("train", {}).get("seed")}
        self.started = time.time()

    def path(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.out / name

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "config": self.doc,
            "seeds": self.seeds,
            "inputs": self.inputs,
            "artifacts": {a: sha256_file(self.out / a) for a in self.artifacts},
            "tool_version": __version__,
            "wall_clock_s": round(time.time() - self.started, 3),
        }
        path = self.out / MANIFEST
        path.write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
        return path


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v
                             for v in row])


def _inputs(doc: dict, *extra):
    return [doc["dataset"]["path"], doc["graph"], *extra]


# commands

def _train_single(doc):
    table, spec, report = load_dataset(doc)
    plan = split_plan(doc, protocol="random", n_repeats=1)
    split = make_splits(plan, table)[0]
    cfg = TrainConfig.from_dict(doc["train"])
    state = train(table.X, table.labels, split.train_idx, split.test_idx, spec,
                  cfg.replace(seed=split.seed), n_classes=table.n_classes,
                  class_names=table.class_names, parameter_names=table.parameter_names,
                  dataset_hash=table.content_hash)
    return table, spec, report, state


def _embedding_rows(state, table):
    rows, summary = [], []
    for part, idx in (("train", state.train_idx), ("test", state.test_idx)):
        if len(idx) == 0:
            continue
        y = table.labels[idx]
        stages = {}
        for stage, initial in (("epoch0", True), ("final", False)):
            samples = state.encode(table.X[idx], initial=initial).samples
            memory = state.initial_memory if initial else state.memory
            emb = sample_embedding(samples, state.initial_memory, y, memory)
            stages[stage] = distance_summary(emb.distances, y, table.n_classes)
            for r, (x0, x1), dist in zip(idx, emb.coordinates, emb.distances):
                rows.append([part, int(r), table.class_names[table.labels[r]], stage,
                             float(x0), float(x1), float(dist)])
        for c, name in enumerate(table.class_names):
            (m0, s0, n), (m1, s1, _) = stages["epoch0"][c], stages["final"][c]
            summary.append([part, name, n, m0, s0, m1, s1, m1 - m0])
    return rows, summary


def cmd_train(args) -> int:
    doc = resolve_config(args)
    out = output_dir(doc, args, "train")
    run = Run("train", args.argv, doc, out, _inputs(doc))
    table, spec, report, state = _train_single(doc)
    run.seeds["model_seed"] = state.config.seed
    save_checkpoint(state, run.path("checkpoint.json"))
    save_checkpoint(state, run.path("checkpoint_epoch0.json"), initial=True)
    state.history.to_csv(run.path("history.csv"))
    if table.n_classes == 2:
        rows, summary = _embedding_rows(state, table)
        _write_csv(run.path("sample_embedding.csv"),
                   ["split", "row", "label", "stage", "x", "y", "distance"], rows)
        _write_csv(run.path("distance_summary.csv"),
                   ["split", "class", "n", "epoch0_mean", "epoch0_std", "final_mean",
                    "final_std", "change"], summary)
    _json(run.path("labels.json"), report)
    run.finish()
    _echo(args, f"trained {state.epoch} epochs; final loss {state.history.loss[-1]:.6g}, "
                f"test accuracy {state.history.test_acc[-1]:.4g} -> {out}")
    return 0


def _json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def _echo(args, text):
    if not getattr(args, "quiet", False):
        print(text)


def cmd_eval(args) -> int:
    doc = resolve_config(args)
    out = output_dir(doc, args, "eval")
    run = Run("eval", args.argv, doc, out, _inputs(doc))
    table, spec, _ = load_dataset(doc)
    plan = split_plan(doc)
    result = evaluate(table, spec, TrainConfig.from_dict(doc["train"]), plan, jobs=args.jobs)
    run.seeds["split_seeds"] = [r.seed for r in result.records]
    write_split_csv(result.records, run.path("splits.csv"))
    write_summary_json(result, run.path("summary.json"), plan)
    if plan.protocol == "group_fold":
        _write_csv(run.path("folds.csv"), ["fold", "accuracy", "n_test"],
                   [[f, a, n] for f, a, n in result.metrics.fold_table])
    run.finish()
    m = result.metrics
    _echo(args, f"{m.n_splits} splits: accuracy {m.accuracy.mean:.4f} ± {m.accuracy.std:.4f} "
                f"({m.averaging} precision/recall/F1) -> {out}")
    return 0


def _axis(text, cast):
    return tuple(cast(v) for v in str(text).split(",") if v.strip())


def cmd_sweep(args) -> int:
    doc = resolve_config(args)
    grid_doc = dict(doc.get("sweep") or {})
    if args.grid:
        grid_doc.update(_read_yaml(args.grid))
    for flag, axis, cast in (("d_values", "d", int), ("lr_values", "lr", float),
                             ("epoch_values", "epochs", int)):
        value = getattr(args, flag)
        if value:
            grid_doc[axis] = list(_axis(value, cast))
    try:
        grid = SweepGrid(tuple(int(v) for v in grid_doc["d"]),
                         tuple(float(v) for v in grid_doc["lr"]),
                         tuple(int(v) for v in grid_doc["epochs"]))
    except KeyError as exc:
        raise ConfigError(f"sweep grid is missing axis {exc}") from None
    doc["sweep"] = {"d": list(grid.d), "lr": list(grid.lr), "epochs": list(grid.epochs)}
    out = output_dir(doc, args, "sweep")
    run = Run("sweep", args.argv, doc, out, _inputs(doc, args.grid))
    table, spec, _ = load_dataset(doc)
    result = sweep(table, spec, grid, split_plan(doc), TrainConfig.from_dict(doc["train"]),
                   jobs=args.jobs)
    write_sweep_csv(result, run.path("sweep.csv"), run.path("sweep_best.csv"))
    run.finish()
    _echo(args, f"{grid.size} configurations -> {out}")
    return 0


def _split_explain(table, spec, cfg, split, levels, beta, mas_level):
    from .evaluation import run_split

    _, state = run_split(table, spec, cfg, split, keep_state=True)
    reports = [explain_state(state, table.X, table.labels, lv, beta) for lv in levels]
    mas_pair = None
    if mas_level:
        mas_pair = (mas_state(state, table.X, table.labels, mas_level, beta, initial=True),
                    mas_state(state, table.X, table.labels, mas_level, beta))
    return reports, mas_pair


def _levels(args, spec) -> list[str]:
    if args.level == "all":
        return ["param", "group"] + [f"within:{g}" for g in spec.group_names]
    return [args.level]


def _state_from(args, doc, table, spec):
    if args.checkpoint:
        state = load_checkpoint(args.checkpoint[-1])
        if state.dataset_hash and state.dataset_hash != table.content_hash:
            raise DataError("checkpoint was trained on a different dataset")
        return state
    return _train_single(doc)[3]


def cmd_explain(args) -> int:
    doc = resolve_config(args)
    beta = args.beta if args.beta is not None else doc["train"]["beta"]
    doc["explain"] = {"level": args.level, "beta": beta, "aggregate": args.aggregate}
    out = output_dir(doc, args, "explain")
    run = Run("explain", args.argv, doc, out, _inputs(doc, *(args.checkpoint or [])))
    table, spec, _ = load_dataset(doc)
    levels = _levels(args, spec)
    if args.aggregate:
        plan = split_plan(doc, protocol="random", n_repeats=args.aggregate)
        cfg = TrainConfig.from_dict(doc["train"])
        per_split = parallel_map(_split_explain, [(table, spec, cfg, s, levels, beta, None)
                                                  for s in make_splits(plan, table)], args.jobs)
        reports = [aggregate_attributions([r[0][i] for r in per_split])
                   for i in range(len(levels))]
    else:
        state = _state_from(args, doc, table, spec)
        reports = [explain_state(state, table.X, table.labels, lv, beta) for lv in levels]
    write_attribution_csv(reports, run.path("attribution.csv"))
    write_attribution_json(reports, run.path("attribution.json"))
    run.finish()
    _echo(args, f"attribution ({', '.join(levels)}) -> {out}")
    return 0


def cmd_mas(args) -> int:
    doc = resolve_config(args)
    beta = args.beta if args.beta is not None else doc["train"]["beta"]
    doc["explain"] = {"granularity": args.granularity, "beta": beta, "aggregate": args.aggregate}
    out = output_dir(doc, args, "mas")
    run = Run("mas", args.argv, doc, out, _inputs(doc, *(args.checkpoint or [])))
    table, spec, _ = load_dataset(doc)
    if args.aggregate:
        plan = split_plan(doc, protocol="random", n_repeats=args.aggregate)
        cfg = TrainConfig.from_dict(doc["train"])
        per_split = parallel_map(_split_explain, [(table, spec, cfg, s, [], beta, args.granularity)
                                                  for s in make_splits(plan, table)], args.jobs)
        pairs = [p for _, p in per_split]
    else:
        if args.checkpoint and len(args.checkpoint) == 2:
            first = load_checkpoint(args.checkpoint[0])
            final = load_checkpoint(args.checkpoint[1])
            pairs = [(mas_state(first, table.X, table.labels, args.granularity, beta),
                      mas_state(final, table.X, table.labels, args.granularity, beta))]
        else:
            state = _state_from(args, doc, table, spec)
            pairs = [(mas_state(state, table.X, table.labels, args.granularity, beta, True),
                      mas_state(state, table.X, table.labels, args.granularity, beta))]
    comp_rows, summary_rows = [], []
    for i, (first, last) in enumerate(pairs):
        for stage, rep in (("epoch0", first), ("final", last)):
            comp_rows.extend(mas_component_rows(rep, stage, i))
            summary_rows.extend([[i] + r for r in mas_summary_rows(rep, stage)])
    _write_csv(run.path("mas_components.csv"), MAS_COMPONENT_HEADER, comp_rows)
    _write_csv(run.path("mas_summary.csv"), ["split"] + MAS_SUMMARY_HEADER, summary_rows)
    run.finish()
    _echo(args, f"MAS ({args.granularity}, {len(pairs)} split(s)) -> {out}")
    return 0


def cmd_prep(args) -> int:
    raw = Path(args.raw)
    if not raw.exists():
        raise DataError(f"dataset file not found: {raw}")
    with open(raw, newline="", encoding="utf-8") as fh:
        header = [h.strip() for h in next(csv.reader(fh), [])]
    skip = {args.target, args.group_column, *(args.exclude_columns or [])}
    parameters = args.parameters.split(",") if args.parameters else [
        h for h in header if h not in skip]
    regimes = [args.group_column] if args.group_column else []
    table = load_csv(raw, parameters, target=args.target, regimes=regimes)
    doc = {"raw": str(raw.resolve()), "target": args.target, "group_column": args.group_column,
           "threshold": args.threshold, "parameters": parameters}
    out = output_dir(doc, args, "prep")
    run = Run("prep", args.argv, doc, out, [raw])
    report = {"n_rows": table.n, "n_censored": int(table.censored.sum())}
    if args.group_column:
        groups = table.column(args.group_column)
        clipped = clip_censored_values(table.target, groups)
        report["clip_levels"] = {g: float(clipped[groups == g].max())
                                 for g in dict.fromkeys(groups.tolist())}
    else:
        clipped = clip_censored_values(table.target, np.zeros(table.n, dtype=int))
    if args.threshold == "auto":
        gap = gap_threshold(table.target)
        threshold = gap.threshold
        report["gap"] = asdict(gap)
    else:
        try:
            threshold = float(args.threshold)
        except ValueError:
            raise ConfigError(f"--threshold must be 'auto' or a number, got {args.threshold!r}") \
                from None
    labels = binarize(table.target, threshold, table.censored)
    report["threshold"] = threshold
    # censored rows are high, but their clipped value may still fall below the threshold
    report["clip_label_mismatches"] = int(np.sum(table.censored & (clipped < threshold)))
    report["class_counts"] = {"low": int(np.sum(labels == 0)), "high": int(np.sum(labels == 1))}
    prepared = table.with_labels(labels)
    prepared = DatasetTable(prepared.parameter_names, prepared.X, prepared.labels,
                            prepared.class_names, prepared.target_name, prepared.target,
                            prepared.censored,
                            {**prepared.regimes, f"{args.target}_clipped":
                             np.array([format_float(v) for v in clipped])},
                            "label", prepared.source)
    write_csv(prepared, run.path("prepared.csv"))
    _json(run.path("threshold.json"), report)
    run.finish()
    if "gap" in report:
        g = report["gap"]
        _echo(args, f"threshold {threshold:.6g} from gap ({g['lower']:g}, {g['upper']:g}); "
                    f"low={report['class_counts']['low']} high={report['class_counts']['high']}")
    else:
        _echo(args, f"threshold {threshold:g}; low={report['class_counts']['low']} "
                    f"high={report['class_counts']['high']}")
    return 0


def cmd_replay(args) -> int:
    """Re-run the command recorded in a manifest into a new output directory."""
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    for path, digest in manifest.get("inputs", {}).items():
        if not Path(path).exists() or sha256_file(path) != digest:
            raise DataError(f"input {path} is missing or changed since the manifest was written")
    argv = list(manifest["argv"])
    if "--out" in argv:
        i = argv.index("--out")
        del argv[i:i + 2]
    argv += ["--out", args.out]
    parser = build_parser()
    inner = parser.parse_args(argv)
    inner.argv = argv
    if manifest["command"] != "prep":
        inner.resolved = manifest["config"]
    inner.quiet = args.quiet
    return inner.func(inner)


# argument parsing

def _common(p, jobs=False):
    p.add_argument("config", help="run config (YAML)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--D", type=int, dest="D")
    p.add_argument("--d", type=int, dest="d")
    p.add_argument("--lr", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--threshold", help="override the label threshold ('auto' or a number)")
    if jobs:
        p.add_argument("--jobs", type=int, default=1, help="parallel workers (-1 = all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphhdc", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model on a random split")
    _common(p)
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="repeated random splits or group hold-out folds")
    _common(p, jobs=True)
    p.add_argument("--protocol", choices=["random", "fold", "group_fold"])
    p.add_argument("--repeats", type=int)
    p.add_argument("--fold-column", dest="fold_column")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="(d, lr, epochs) sensitivity grid")
    _common(p, jobs=True)
    p.add_argument("--grid", help="YAML file with d, lr and epochs lists")
    p.add_argument("--d-values", dest="d_values", help="comma-separated embedding sizes")
    p.add_argument("--lr-values", dest="lr_values", help="comma-separated learning rates")
    p.add_argument("--epoch-values", dest="epoch_values", help="comma-separated horizons")
    p.add_argument("--repeats", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("explain", help="attribution weights")
    _common(p, jobs=True)
    p.add_argument("--checkpoint", nargs="+", help="trained checkpoint (default: train now)")
    p.add_argument("--level", default="group",
                   help="param, group, within:<group>, or all")
    p.add_argument("--aggregate", type=int, default=0, metavar="N",
                   help="average over N random splits instead of one model")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("mas", help="memory alignment and separation at epoch 0 and final")
    _common(p, jobs=True)
    p.add_argument("--checkpoint", nargs="+",
                   help="final checkpoint, or epoch-0 and final checkpoints")
    p.add_argument("--granularity", choices=["param", "group"], default="group")
    p.add_argument("--aggregate", type=int, default=0, metavar="N")
    p.set_defaults(func=cmd_mas)

    p = sub.add_parser("prep", help="censoring, threshold and labels for a raw table")
    p.add_argument("raw", help="raw CSV")
    p.add_argument("--target", required=True, help="raw target column")
    p.add_argument("--group-column", dest="group_column")
    p.add_argument("--threshold", default="auto")
    p.add_argument("--parameters", help="comma-separated parameter columns")
    p.add_argument("--exclude-columns", nargs="*", dest="exclude_columns")
    p.add_argument("--out")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = [a for a in argv if a != "--quiet"]
    try:
        return args.func(args)
    except GraphHDCError as exc:
        code, kind, message = exc.exit_code, type(exc).__name__, str(exc)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        code, kind, message = ConfigError.exit_code, type(exc).__name__, str(exc)
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
