"""Command-line entry point.

Subcommands: ``train``, ``eval``, ``decision-region``, ``qq-compare``,
``gen-features``, ``gen-spirals``.  Every subcommand accepts ``--seed``,
``--out`` and ``--preset``.

Exit status: 0 on success, 1 on a runtime failure, 2 on a usage or
configuration error (including shape mismatches between a checkpoint and a
dataset).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import data as d
from . import models as m
from . import transfer as t
from .checkpoint import load_checkpoint, save_checkpoint
from .circuit import BareCircuitSpec
from .errors import ArityError, CheckpointError, ConfigError, FormatError
from .presets import get_preset

log = logging.getLogger("qtransfer")

EXPERIMENTS = ("spirals", "cq", "qc", "qq")
METRICS_HEADER = ["iteration", "epoch", "train_loss", "test_accuracy"]
REPORT_VERSION = 1


@dataclass
class RunConfig:
    experiment: str = "spirals"
    model: str = "dressed"
    n_qubits: int = 4
    depth: int = 5
    head_depth: int = 1
    iterations: int | None = None
    epochs: int | None = None
    batch_size: int = 10
    learning_rate: float = 0.01
    decay_factor: float = 1.0
    decay_period: int | None = None
    seed: int = 0
    eval_every: int | None = None
    keep_best: bool = False
    n_train: int = 2000
    n_test: int = 200
    turns: float = d.SpiralsConfig.turns
    noise_sigma: float = d.SpiralsConfig.noise_sigma
    train_features: str | None = None
    test_features: str | None = None
    source_checkpoint: str | None = None
    truncate_to: int | None = None
    trainable_depth: int = 2
    pretrain_iterations: int = 1000
    pretrain_learning_rate: float = 0.05
    out: str = "."

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if self.model not in ("dressed", "baseline"):
            raise ConfigError("model must be 'dressed' or 'baseline'")
        if self.iterations is None and self.epochs is None:
            raise ConfigError("set --iterations or --epochs (or pick a --preset)")
        for name in ("n_qubits", "head_depth", "batch_size", "n_train", "n_test"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        for name in ("depth", "trainable_depth", "pretrain_iterations"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if not self.learning_rate > 0 or not self.pretrain_learning_rate > 0:
            raise ConfigError("learning rates must be positive")
        if self.experiment == "cq":
            for name in ("train_features", "test_features"):
                if getattr(self, name) is None:
                    raise ConfigError(f"cq experiment needs --{name.replace('_', '-')}")
        for name in ("train_features", "test_features", "source_checkpoint"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name.replace('_', '-')} {path} does not exist")

    def train_config(self, loss_on="batch") -> m.TrainConfig:
        return m.TrainConfig(iterations=self.iterations, epochs=self.epochs if self.iterations is None else None,
                             batch_size=self.batch_size, learning_rate=self.learning_rate,
                             decay_factor=self.decay_factor, decay_period=self.decay_period,
                             seed=self.seed, eval_every=self.eval_every, keep_best=self.keep_best,
                             loss_on=loss_on)


def build_config(args, fields=None) -> RunConfig:
    values = get_preset(args.preset) if args.preset else {}
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if getattr(args, "iterations", None) is not None:
        values.pop("epochs", None)
    elif getattr(args, "epochs", None) is not None:
        values.pop("iterations", None)
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# -- file writers ----------------------------------------------------------------

def _fmt(v):
    return "" if v is None else repr(float(v))


def write_metrics(trace: m.TrainTrace, path, initial_loss: bool = False):
    """One row per iteration; row 0 is the pre-training evaluation."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_HEADER)
        for it, epoch, loss, acc in trace.rows():
            if it == 0 and not initial_loss:
                loss = None
            w.writerow([it, epoch, _fmt(loss), _fmt(acc)])


def write_json(doc, path):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# -- experiment data ---------------------------------------------------------------

def random_extractor(cfg: RunConfig) -> BareCircuitSpec:
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
    return BareCircuitSpec(cfg.n_qubits, rng.uniform(-np.pi, np.pi, size=(cfg.depth, cfg.n_qubits)))


def qc_extractor(cfg: RunConfig) -> BareCircuitSpec:
    source = t._resolve_source(cfg.source_checkpoint) if cfg.source_checkpoint else random_extractor(cfg)
    keep = source.depth if cfg.truncate_to is None else cfg.truncate_to
    return t.truncate_quantum(source, keep)


def qq_tasks(cfg: RunConfig):
    return d.gen_qubit_tasks(cfg.n_qubits, n_train=cfg.n_train, n_test=cfg.n_test, seed=cfg.seed)


def experiment_data(cfg: RunConfig, extractor=None):
    """(train, test) datasets for the configured experiment."""
    if cfg.experiment == "spirals":
        return d.gen_spirals(d.SpiralsConfig(cfg.n_train, cfg.n_test, cfg.turns, cfg.noise_sigma, cfg.seed))
    if cfg.experiment == "cq":
        train = d.load_feature_file(cfg.train_features)
        test = d.load_feature_file(cfg.test_features)
        n_classes = max(train.n_classes, test.n_classes)
        return (d.Dataset(train.features, train.labels, n_classes),
                d.Dataset(test.features, test.labels, n_classes))
    if cfg.experiment == "qc":
        extractor = extractor if extractor is not None else qc_extractor(cfg)
        train, test, _ = d.gen_linear_feature_task(extractor, cfg.n_train, cfg.n_test, cfg.seed)
        return train, test
    _, task_b, _ = qq_tasks(cfg)
    return task_b


# -- commands --------------------------------------------------------------------

def cmd_train(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    initial_loss = False
    if cfg.experiment in ("spirals", "cq"):
        train, test = experiment_data(cfg)
        if cfg.model == "baseline":
            model = m.make_baseline([train.width, cfg.n_qubits, cfg.n_qubits, train.n_classes], rng)
        else:
            model = m.make_dressed(train.width, cfg.n_qubits, cfg.depth, train.n_classes, rng)
        trace = m.train(model, train, cfg.train_config(), test)
    elif cfg.experiment == "qc":
        extractor = qc_extractor(cfg)
        train, test = experiment_data(cfg, extractor)
        report = t.run_qc(t.TransferPlan(t.QC, (train, test), cfg.train_config(), source=extractor,
                                         head={"depths": [cfg.head_depth]}, seed=cfg.seed))
        model, trace = report.models[0], report.rows[0]["trace"]
    else:
        task_a, (train, test), _ = qq_tasks(cfg)
        plan = qq_plan(cfg, task_a, (train, test))
        report = t.run_qq(plan, with_scratch=False)
        model, trace = report.transfer_model, report.transfer
        save_checkpoint(m.QQCircuit(report.source, 0, model.n_classes, model.readout_scale),
                        out / "source.ckpt.json", rng_seed=cfg.seed)
        initial_loss = True

    write_metrics(trace, out / "metrics.csv", initial_loss=initial_loss)
    save_checkpoint(model, out / "model.ckpt.json", rng_seed=cfg.seed)
    if cfg.keep_best and trace.best_model is not None:
        save_checkpoint(trace.best_model, out / "best.ckpt.json", rng_seed=cfg.seed)
    print(f"final train accuracy: {m.accuracy(model, train):.4f}")
    print(f"final test accuracy: {trace.final_accuracy:.4f}")
    print(f"best test accuracy: {trace.best_accuracy:.4f} (iteration {trace.best_iteration})")
    return 0


def qq_plan(cfg: RunConfig, task_a, task_b, seed=None) -> t.TransferPlan:
    seed = cfg.seed if seed is None else seed
    train_cfg = dataclasses.replace(cfg.train_config(loss_on="full"), seed=seed)
    pre_cfg = m.TrainConfig(iterations=cfg.pretrain_iterations, batch_size=cfg.batch_size,
                            learning_rate=cfg.pretrain_learning_rate, seed=seed,
                            eval_every=max(cfg.pretrain_iterations, 1))
    truncate_to = 2 if cfg.truncate_to is None else cfg.truncate_to
    return t.TransferPlan(t.QQ, task_b, train_cfg, source=cfg.source_checkpoint, truncate_to=truncate_to,
                          head={"trainable_depth": cfg.trainable_depth, "source_depth": truncate_to},
                          dataset_a=task_a, pretrain_config=pre_cfg, seed=seed)


def _eval_dataset(args, cfg_values, model):
    if args.features:
        return d.load_feature_file(args.features), args.features
    if not args.preset:
        raise ConfigError("eval needs --features or --preset")
    cfg = RunConfig(**{**get_preset(args.preset), **cfg_values})
    extractor = model.extractor if isinstance(model, m.QCModel) else None
    if cfg.experiment == "cq":
        raise ConfigError("cq presets need --features")
    train, test = experiment_data(cfg, extractor)
    return (train if args.split == "train" else test), f"preset:{args.preset}:{args.split}"


def cmd_eval(args) -> int:
    model = load_checkpoint(args.checkpoint)
    values = {"seed": args.seed} if args.seed is not None else {}
    dataset, source = _eval_dataset(args, values, model)
    if dataset.width != model.n_inputs:
        raise ArityError(f"dataset width {dataset.width} does not match model input arity {model.n_inputs}")
    pred = m.predict_batch(model, dataset.features)
    correct = int(np.sum(pred == dataset.labels))
    acc = correct / len(dataset)
    print(f"accuracy: {acc:.4f} ({correct}/{len(dataset)})")
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    write_json({"format_version": REPORT_VERSION, "checkpoint": str(args.checkpoint), "dataset": str(source),
                "accuracy": acc, "correct": correct, "total": len(dataset)}, out / "eval.json")
    return 0


def cmd_decision_region(args) -> int:
    model = load_checkpoint(args.checkpoint)
    if model.n_inputs != 2:
        raise ArityError(f"decision regions need a 2-input model, checkpoint has {model.n_inputs} inputs")
    if args.steps < 1:
        raise ConfigError("--steps must be positive")
    axis = np.linspace(args.min, args.max, args.steps)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    pred = m.predict_batch(model, pts)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "decision_region.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "predicted_class"])
        for (x, y), c in zip(pts, pred):
            w.writerow([repr(float(x)), repr(float(y)), int(c)])
    return 0


def crossover_iteration(transfer_losses, scratch_losses):
    """First iteration where the scratch arm's loss drops below the transfer arm's after trailing it."""
    behind = False
    for it, (a, b) in enumerate(zip(transfer_losses, scratch_losses)):
        if b > a:
            behind = True
        elif behind and b < a:
            return it
    return None


def cmd_qq_compare(cfg: RunConfig, n_seeds: int) -> int:
    if n_seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    if cfg.iterations is None:
        raise ConfigError("qq-compare needs --iterations")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    total = cfg.iterations
    marks = sorted({0, total // 4, total // 2, (3 * total) // 4, total})
    early = total // 4
    per_seed = []
    for i in range(n_seeds):
        seed = cfg.seed + i
        scfg = dataclasses.replace(cfg, seed=seed)
        task_a, task_b, _ = qq_tasks(scfg)
        report = t.run_qq(qq_plan(scfg, task_a, task_b, seed))
        if i == 0:
            write_metrics(report.transfer, out / "transfer.csv", initial_loss=True)
            write_metrics(report.scratch, out / "scratch.csv", initial_loss=True)
        if n_seeds > 1:
            write_metrics(report.transfer, out / f"transfer_seed{seed}.csv", initial_loss=True)
            write_metrics(report.scratch, out / f"scratch_seed{seed}.csv", initial_loss=True)
        per_seed.append({
            "seed": seed,
            "transfer_loss": {str(k): report.transfer.losses[k] for k in marks},
            "scratch_loss": {str(k): report.scratch.losses[k] for k in marks},
            "transfer_test_accuracy": report.transfer.final_accuracy,
            "scratch_test_accuracy": report.scratch.final_accuracy,
            "crossover_iteration": crossover_iteration(report.transfer.losses, report.scratch.losses),
            "trainable_params": {"transfer": report.n_trainable_transfer, "scratch": report.n_trainable_scratch},
        })
    summary = {"format_version": REPORT_VERSION, "iterations": total, "checkpoints": marks,
               "early_iteration": early, "frozen_depth": 2 if cfg.truncate_to is None else cfg.truncate_to,
               "per_seed": per_seed}
    if n_seeds > 1:
        tr = float(np.median([s["transfer_loss"][str(early)] for s in per_seed]))
        sc = float(np.median([s["scratch_loss"][str(early)] for s in per_seed]))
        summary["median_early"] = {"transfer_loss": tr, "scratch_loss": sc, "transfer_better": tr < sc}
    write_json(summary, out / "summary.json")
    s0 = per_seed[0]
    print(f"loss at iteration {early}: transfer {s0['transfer_loss'][str(early)]:.4f}, "
          f"scratch {s0['scratch_loss'][str(early)]:.4f}")
    if n_seeds > 1:
        med = summary["median_early"]
        print(f"median over {n_seeds} seeds: transfer {med['transfer_loss']:.4f}, scratch {med['scratch_loss']:.4f}")
    return 0


def cmd_gen_features(args) -> int:
    seed = 0 if args.seed is None else args.seed
    sep = np.sqrt(args.width) if args.separation is None else args.separation
    train, test = d.gen_feature_blobs(args.width, args.n_train, args.n_test, sep, args.sigma, seed)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    d.save_feature_file(train, out / "train_features.csv")
    d.save_feature_file(test, out / "test_features.csv")
    return 0


def cmd_gen_spirals(args) -> int:
    seed = 0 if args.seed is None else args.seed
    defaults = d.SpiralsConfig()
    cfg = d.SpiralsConfig(
        args.n_train or defaults.n_train, args.n_test or defaults.n_test,
        defaults.turns if args.turns is None else args.turns,
        defaults.noise_sigma if args.noise_sigma is None else args.noise_sigma, seed)
    train, test = d.gen_spirals(cfg)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    d.save_feature_file(train, out / "spirals_train.csv")
    d.save_feature_file(test, out / "spirals_test.csv")
    return 0


# -- argument parsing --------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, help="run seed (default 0)")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--preset", help="named settings, e.g. spirals, ants-bees, dogs-cats, planes-cars, qc, qq")
    return p


def _training_args(p):
    p.add_argument("--iterations", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--lr", dest="learning_rate", type=float)
    p.add_argument("--decay-factor", dest="decay_factor", type=float)
    p.add_argument("--decay-period", dest="decay_period", type=int, help="epochs between decays")
    p.add_argument("--eval-every", dest="eval_every", type=int, help="iterations between evaluations")
    p.add_argument("--n-qubits", dest="n_qubits", type=int)
    p.add_argument("--n-train", dest="n_train", type=int)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--truncate-to", dest="truncate_to", type=int)
    p.add_argument("--trainable-depth", dest="trainable_depth", type=int)
    p.add_argument("--source-checkpoint", dest="source_checkpoint")
    p.add_argument("--pretrain-iterations", dest="pretrain_iterations", type=int)
    p.add_argument("--pretrain-lr", dest="pretrain_learning_rate", type=float)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtransfer", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("train", parents=[common], help="train a model and write metrics + checkpoint")
    p.add_argument("--experiment", choices=EXPERIMENTS)
    p.add_argument("--model", choices=("dressed", "baseline"))
    p.add_argument("--depth", type=int, help="quantum depth")
    p.add_argument("--head-depth", dest="head_depth", type=int, help="classical head depth (qc)")
    p.add_argument("--train-features", dest="train_features")
    p.add_argument("--test-features", dest="test_features")
    p.add_argument("--keep-best", dest="keep_best", action="store_true", default=None)
    p.add_argument("--no-keep-best", dest="keep_best", action="store_false")
    _training_args(p)

    p = sub.add_parser("eval", parents=[common], help="accuracy of a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--features", help="feature CSV to evaluate on")
    p.add_argument("--split", choices=("train", "test"), default="test", help="preset split (default test)")

    p = sub.add_parser("decision-region", parents=[common], help="class predictions over a 2-D lattice")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--min", type=float, default=-1.2)
    p.add_argument("--max", type=float, default=1.2)
    p.add_argument("--steps", type=int, default=101)

    p = sub.add_parser("qq-compare", parents=[common], help="QQ transfer vs training from scratch")
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds")
    _training_args(p)

    p = sub.add_parser("gen-features", parents=[common], help="synthetic Gaussian-blob feature files")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--n-train", dest="n_train", type=int, default=245)
    p.add_argument("--n-test", dest="n_test", type=int, default=153)
    p.add_argument("--separation", type=float, help="distance between class means (default sqrt(width))")
    p.add_argument("--sigma", type=float, default=1.0)

    p = sub.add_parser("gen-spirals", parents=[common], help="two-spirals dataset as feature files")
    p.add_argument("--n-train", dest="n_train", type=int)
    p.add_argument("--n-test", dest="n_test", type=int)
    p.add_argument("--turns", type=float)
    p.add_argument("--noise", dest="noise_sigma", type=float)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "train":
            return cmd_train(build_config(args))
        if args.command == "qq-compare":
            if not args.preset:
                args.preset = "qq"
            return cmd_qq_compare(build_config(args), args.seeds)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "decision-region":
            return cmd_decision_region(args)
        if args.command == "gen-features":
            return cmd_gen_features(args)
        return cmd_gen_spirals(args)
    except (ConfigError, FormatError, CheckpointError, ArityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - exit-status contract
        log.exception("run failed")
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
