"""``taskcurriculum`` command line: synth, analyze, plan, train, eval, compare.

Every command reads an optional JSON run config (``--config``); dedicated
flags and generic ``--key value`` overrides win over the file. Exit status
is 0 on success, 1 for invalid input and 2 when a run fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .curriculum import Curriculum
from .dataset import (
    DataFormatError,
    SynthSpec,
    load_dataset,
    load_labels,
    save_synthetic,
    split_dataset,
    synth_generate,
)
from .model import CheckpointError, load_checkpoint, state_to_dict
from .training import PARADIGMS, TrainConfig, compare_paradigms, evaluate, plan_curriculum, run_curriculum

OUT_ENV = "TASKCURRICULUM_OUT"
DEFAULT_OUT = "taskcurriculum_out"
RUN_KEYS = ("features", "labels", "synth", "tau", "train", "paradigms", "seeds", "fractions", "embedding", "out")
_TRAIN_KEYS = {f.name for f in fields(TrainConfig)}


class UsageError(ValueError):
    """Bad flags, config or input files (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------ run config


def _scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _csv_list(text: str):
    return [_scalar(x) for x in text.split(",") if x]


def _read_json(path, what: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path}: malformed JSON ({exc.msg}, line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise UsageError(f"{what} {path}: top level must be an object")
    return data


def _load_config(path) -> dict:
    cfg = _read_json(path, "config")
    unknown = sorted(set(cfg) - set(RUN_KEYS))
    if unknown:
        raise UsageError(f"config {path}: unknown key {unknown[0]!r}")
    base = Path(path).parent
    # data paths in a config file are relative to the file itself
    for key in ("features", "labels"):
        if isinstance(cfg.get(key), str):
            cfg[key] = str(base / cfg[key])
    return cfg


def _apply_overrides(cfg: dict, tokens: list[str]) -> None:
    """Generic ``--key value`` overrides for run-level and training scalars."""
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) < 3:
            raise UsageError(f"unexpected argument {tok!r}")
        key, eq, val = tok[2:].partition("=")
        key = key.replace("-", "_")
        if not eq:
            if i + 1 >= len(tokens):
                raise UsageError(f"flag {tok!r} needs a value")
            val = tokens[i + 1]
            i += 1
        i += 1
        if key in _TRAIN_KEYS:
            cfg.setdefault("train", {})[key] = _scalar(val)
        elif key in ("tau", "embedding", "out"):
            cfg[key] = _scalar(val)
        else:
            raise UsageError(f"unknown flag {tok!r}")


def _resolve(args, extra) -> dict:
    cfg = _load_config(args.config) if args.config else {}
    cfg = {**cfg, "train": dict(cfg.get("train", {}))}
    _apply_overrides(cfg, extra)
    for key in ("features", "labels"):
        if getattr(args, key, None):
            cfg[key] = args.features if key == "features" else args.labels
    if getattr(args, "spec", None):
        cfg["synth"] = _read_json(args.spec, "spec")
    if args.tau is not None:
        cfg["tau"] = args.tau if args.tau == "auto" else _scalar(args.tau)
    if args.seed is not None:
        cfg["train"]["seed"] = args.seed
    if args.lam is not None:
        cfg["train"]["transfer_lambda"] = args.lam
    if args.epochs is not None:
        cfg["train"]["epochs"] = args.epochs
    if args.paradigms:
        cfg["paradigms"] = [p for p in args.paradigms.split(",") if p]
    if getattr(args, "seeds", None):
        cfg["seeds"] = [int(s) for s in _csv_list(args.seeds)]
    cfg["out"] = args.out or cfg.get("out") or os.environ.get(OUT_ENV) or DEFAULT_OUT
    cfg.setdefault("tau", "auto")
    cfg.setdefault("embedding", "rows")
    cfg.setdefault("fractions", [0.8, 0.1, 0.1])
    tau = cfg["tau"]
    if tau != "auto" and (isinstance(tau, bool) or not isinstance(tau, (int, float)) or tau <= 0):
        raise UsageError(f"--tau must be a positive number or 'auto', got {tau!r}")
    try:
        cfg["train"] = TrainConfig.from_dict(cfg["train"]).to_dict()
    except (TypeError, ValueError) as exc:
        raise UsageError(f"training config: {exc}") from None
    return cfg


def _config_hash(cfg: dict) -> str:
    canon = json.dumps({k: v for k, v in cfg.items() if k not in ("out", "jobs")}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _generator(cfg: dict) -> dict:
    return {"tool": "taskcurriculum", "version": __version__, "config_hash": _config_hash(cfg)}


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


def _write_json(path: Path, payload: dict, cfg: dict) -> None:
    path.write_text(json.dumps({"generator": _generator(cfg), **payload}, indent=2) + "\n")


def _data(cfg: dict):
    has_paths = "features" in cfg or "labels" in cfg
    if has_paths == ("synth" in cfg):
        raise UsageError("give exactly one of dataset paths (--features/--labels) or a synthetic spec")
    if "synth" in cfg:
        try:
            features, labels, _ = synth_generate(SynthSpec(**cfg["synth"]))
        except TypeError as exc:
            raise UsageError(f"synthetic spec: {exc}") from None
        return features, labels
    if "features" not in cfg or "labels" not in cfg:
        raise UsageError("both --features and --labels are required")
    return load_dataset(cfg["features"], cfg["labels"])


def _labels_only(cfg: dict):
    if "labels" in cfg and "features" not in cfg:
        return load_labels(cfg["labels"])
    return _data(cfg)[1]


def _train_config(cfg):
    return TrainConfig.from_dict(cfg["train"])


def _split(cfg, n):
    return split_dataset(n, tuple(cfg["fractions"]), _train_config(cfg).seed)


# -------------------------------------------------------------- commands


def cmd_synth(cfg):
    if "synth" not in cfg:
        raise UsageError("synth needs --spec or a 'synth' block in the config")
    out = _out_dir(cfg)
    try:
        spec = SynthSpec(**cfg["synth"])
    except TypeError as exc:
        raise UsageError(f"synthetic spec: {exc}") from None
    sidecar = save_synthetic(spec, out)
    _write_json(out / "planted.json", sidecar, cfg)


def cmd_analyze(cfg):
    labels = _labels_only(cfg)
    out = _out_dir(cfg)
    corr, dend, clusters, _ = plan_curriculum(labels, None, cfg["tau"], cfg["embedding"])
    _write_json(out / "correlation.json", corr.to_dict(), cfg)
    if dend is not None:
        _write_json(out / "dendrogram.json", dend.to_dict(), cfg)
        gen = _generator(cfg)
        dot = f"// generator: {gen['tool']} {gen['version']} config {gen['config_hash']}\n" + \
            dend.to_dot(list(labels.task_names))
        (out / "dendrogram.dot").write_text(dot)


def cmd_plan(cfg):
    labels = _labels_only(cfg)
    out = _out_dir(cfg)
    _, dend, clusters, cur = plan_curriculum(labels, None, cfg["tau"], cfg["embedding"])
    if dend is not None:
        _write_json(out / "dendrogram.json", dend.to_dict(), cfg)
    _write_json(out / "clusters.json", clusters.to_dict(), cfg)
    _write_json(out / "curriculum.json", cur.to_dict(), cfg)


def _training_curriculum(cfg, labels, split):
    """The curriculum for ``train``: ``plan`` output if given, else planned on the train rows."""
    path = cfg.get("curriculum_path")
    if path:
        return Curriculum.from_dict(_read_json(path, "curriculum"))
    return plan_curriculum(labels, split.train_indices, cfg["tau"], cfg["embedding"])[3]


def cmd_train(cfg):
    features, labels = _data(cfg)
    out = _out_dir(cfg)
    config = _train_config(cfg)
    split = _split(cfg, features.n_samples)
    cur = _training_curriculum(cfg, labels, split)
    report, state = run_curriculum(features, labels, split, cur, config, transfer=cfg.get("transfer", True))
    _write_json(out / "report.json", {**report.to_dict(), "split": split.to_dict()}, cfg)
    _write_json(out / "checkpoint.json", state_to_dict(state), cfg)


def cmd_eval(cfg):
    path = cfg.get("checkpoint_path")
    if not path:
        raise UsageError("eval needs --checkpoint")
    features, labels = _data(cfg)
    out = _out_dir(cfg)
    try:
        state = load_checkpoint(path)
    except FileNotFoundError:
        raise UsageError(f"checkpoint file not found: {path}") from None
    split = _split(cfg, features.n_samples)
    tasks = sorted(state.heads)
    if tasks and tasks[-1] >= labels.n_tasks:
        raise UsageError(f"checkpoint has a head for task {tasks[-1]} but the labels have {labels.n_tasks} tasks")
    metrics = evaluate(state, features, labels, split.test_indices, tasks)
    payload = {"metrics_by_task": metrics["tasks"], "metrics_mean": metrics["mean"], "split": split.to_dict()}
    _write_json(out / "metrics.json", payload, cfg)


def cmd_compare(cfg):
    features, labels = _data(cfg)
    out = _out_dir(cfg)
    paradigms = cfg.get("paradigms") or list(PARADIGMS)
    unknown = [p for p in paradigms if p not in PARADIGMS]
    if unknown:
        raise UsageError(f"unknown paradigm {unknown[0]!r}; choose from {', '.join(PARADIGMS)}")
    seeds = cfg.get("seeds") or list(range(10))
    table = compare_paradigms(features, labels, _train_config(cfg), paradigms, seeds,
                              tuple(cfg["fractions"]), cfg["tau"], jobs=cfg.get("jobs", 1))
    for p in paradigms:
        for s in seeds:
            run_dir = out / "runs" / p / f"seed{s}"
            run_dir.mkdir(parents=True, exist_ok=True)
            _write_json(run_dir / "accuracy.json",
                        {"paradigm": p, "seed": s, "accuracy": table.accuracy[p][s], "groups": table.groups[p][s]},
                        cfg)
    (out / "comparison.csv").write_text(table.to_csv())
    _write_json(out / "comparison.json", table.to_dict(), cfg)


COMMANDS = {
    "synth": cmd_synth,
    "analyze": cmd_analyze,
    "plan": cmd_plan,
    "train": cmd_train,
    "eval": cmd_eval,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="taskcurriculum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"taskcurriculum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "synth": "generate a synthetic dataset with planted task clusters",
        "analyze": "label correlation matrix and Ward dendrogram",
        "plan": "cut the dendrogram and order the clusters",
        "train": "train a curriculum and save report plus checkpoint",
        "eval": "evaluate a saved checkpoint on the test rows",
        "compare": "run the paradigm comparison over several seeds",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH", help="JSON run config")
        p.add_argument("--out", metavar="DIR", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("--seed", type=int, metavar="N")
        p.add_argument("--tau", metavar="R|auto")
        p.add_argument("--lambda", dest="lam", type=float, metavar="R")
        p.add_argument("--epochs", type=int, metavar="N")
        p.add_argument("--jobs", type=int, default=1, metavar="N")
        p.add_argument("--paradigms", metavar="a,b,c")
        p.add_argument("--features", metavar="CSV")
        p.add_argument("--labels", metavar="CSV")
        if name == "synth":
            p.add_argument("--spec", metavar="JSON", help="SynthSpec fields as a JSON object")
        if name == "train":
            p.add_argument("--curriculum", metavar="JSON", help="curriculum.json from plan")
            p.add_argument("--no-transfer", action="store_true")
        if name == "eval":
            p.add_argument("--checkpoint", metavar="JSON")
        if name == "compare":
            p.add_argument("--seeds", metavar="a,b,c")
    return parser


def run_command(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args, extra = build_parser().parse_known_args(argv)
        cfg = _resolve(args, extra)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        cfg["jobs"] = args.jobs
        if getattr(args, "curriculum", None):
            cfg["curriculum_path"] = args.curriculum
        if getattr(args, "no_transfer", False):
            cfg["transfer"] = False
        if getattr(args, "checkpoint", None):
            cfg["checkpoint_path"] = args.checkpoint
        COMMANDS[args.command](cfg)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except FileNotFoundError as exc:
        print(f"taskcurriculum: error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except (UsageError, DataFormatError, CheckpointError) as exc:
        print(f"taskcurriculum: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"taskcurriculum: invalid input: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"taskcurriculum: run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
