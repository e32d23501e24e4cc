#!/usr/bin/env python3
"""
face-kit CLI - face-embedding training and evaluation.

Usage:
    python main.py <command> [OPTIONS]

Commands:
    align       Align face images to the canonical five-point template
    prep        Drop low-shot classes from a manifest, optionally fit the RGB PCA basis
    train       Train a toy embedding model (synthetic blobs or aligned images)
    eval        Score verification pair files with a trained model
    schedule    Print or write a learning-rate schedule as CSV
    version     Print the version

Configuration:
    Every option maps to a namespaced config key (e.g. --head -> head.kind).
    Values come from face_kit/config/config.json, then the file given by
    --config, then command-line flags; later sources win.

Exit codes:
    0 success, 1 usage or configuration error, 2 data or numeric error.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from face_kit import __version__
from face_kit.align import align_face, read_landmarks, read_ppm, write_ppm
from face_kit.config import TEMPLATE_112, TEMPLATE_SIZE, RunConfig, load_defaults
from face_kit.data import (
    AugmentSpec,
    DatasetManifest,
    PcaBasis,
    compute_rgb_pca,
    filter_low_shot,
    load_manifest,
    read_pairs,
    write_manifest,
)
from face_kit.errors import ConfigError, DataError, NumericError, ShapeError
from face_kit.eval import (
    PairSet,
    roc_auc,
    roc_points,
    sample_pairs,
    score_pairs,
    tar_at_far,
    verify_kfold,
    write_report,
    write_roc,
)
from face_kit.heads import HeadConfig
from face_kit.numerics import Prng
from face_kit.schedules import Schedule, lr_table
from face_kit.trainer import (
    ArrayStore,
    BlobSpec,
    ImageStore,
    Trainer,
    TrainerConfig,
    load_model,
    make_blobs,
    save_model,
    self_train_filter,
)

logger = logging.getLogger("face_kit.cli")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

# Prng(seed).split(i) purposes owned by the CLI; the trainer uses 0 and 1.
TRAIN_BLOBS_STREAM = 2
EVAL_BLOBS_STREAM = 3
EVAL_PAIRS_STREAM = 4


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _show(value) -> str:
    if value is None or value == "" or value == []:
        return "none"
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    return str(value)


def _option(parser: argparse.ArgumentParser, flag: str, key: str, help: str, defaults: dict, **kwargs) -> None:
    """Add a flag bound to config key; its parsed value stays None unless given."""
    parser.add_argument(
        flag,
        dest=key,
        default=None,
        help=f"{help} (default: {_show(defaults[key])}; key {key})",
        **kwargs,
    )


def _switch(parser: argparse.ArgumentParser, flag: str, key: str, help: str, defaults: dict) -> None:
    _option(parser, flag, key, help, defaults, action=argparse.BooleanOptionalAction)


def build_parser() -> argparse.ArgumentParser:
    """Parser for every subcommand; option defaults shown in help come from the packaged config."""
    defaults = load_defaults()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON config file, nested or flat keys (default: none)")
    _option(common, "--seed", "seed", "Seed every random stream derives from", defaults, type=int)
    _option(common, "--log-level", "log.level", "Logging level", defaults, choices=LOG_LEVELS, type=str.upper)

    parser = CliParser(
        prog="face-kit",
        description="face-kit - face-embedding training and evaluation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Align images listed in a landmark CSV
    face-kit align --landmarks lm.csv --output aligned/

    # Keep classes with at least 5 images and fit the augmentation PCA basis
    face-kit prep --manifest train.csv --num-min 5 --output train.kept.csv --pca pca.json

    # Train on synthetic Gaussian blobs with ArcFace and a warm cosine schedule
    face-kit train --synthetic --head ArcFace --s 16 --m 0.3 --warmup 100 --model toy.fevl

    # Simulate a 4-way model-parallel classifier and keep the reduction trace
    face-kit train --config run.json --shards 4 --trace reduce.log

    # Evaluate two pair files
    face-kit eval --model toy.fevl --pairs lfw.txt cfp.txt --report report.csv

    # Dump a schedule
    face-kit schedule --kind cosine --eta0 0.1 --total 100
        """,
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    # align
    p = sub.add_parser("align", parents=[common], help="Align face images to the five-point template")
    _option(p, "--landmarks", "paths.landmarks", "Landmark CSV: path,x1,y1,...,x5,y5", defaults)
    _option(p, "--data-root", "paths.data_root", "Directory image paths are relative to (the CSV's directory if none)", defaults)
    _option(p, "--output", "paths.output", "Directory for aligned PPM crops", defaults)
    _option(p, "--size", "align.size", "Side of the square aligned crop in pixels", defaults, type=int)

    # prep
    p = sub.add_parser("prep", parents=[common], help="Filter low-shot classes from a manifest")
    _option(p, "--manifest", "paths.manifest", "Input manifest CSV: path,label", defaults)
    _option(p, "--data-root", "paths.data_root", "Directory record paths are relative to (the manifest's directory if none)", defaults)
    _option(p, "--output", "paths.output", "Filtered manifest to write", defaults)
    _option(p, "--num-min", "data.num_min", "Drop classes with fewer records than this", defaults, type=int)
    _option(p, "--pca", "paths.pca", "Write the RGB PCA basis of the kept images to this JSON file", defaults)
    _option(p, "--pca-cap", "data.pca_cap", "Maximum pixel count for the PCA", defaults, type=int)

    # train
    p = sub.add_parser("train", parents=[common], help="Train a toy embedding model")
    _switch(p, "--synthetic", "data.synthetic", "Train on Gaussian blobs instead of a manifest", defaults)
    _option(p, "--manifest", "paths.manifest", "Training manifest CSV", defaults)
    _option(p, "--data-root", "paths.data_root", "Directory record paths are relative to (the manifest's directory if none)", defaults)
    _option(p, "--model", "paths.model", "Output model file (FEVL1)", defaults)
    _option(p, "--metrics", "paths.metrics", "Write the per-step metric log (CSV step,lr,loss)", defaults)
    _option(p, "--trace", "paths.trace", "Write the last sharded step's reduction trace", defaults)
    _option(p, "--head", "head.kind", "Head kind", defaults)
    _option(p, "--s", "head.s", "Logit scale (head preset if none)", defaults, type=float)
    _option(p, "--m", "head.m", "Margin (head preset if none)", defaults, type=float)
    _option(p, "--gamma", "head.gamma", "Focal exponent", defaults, type=float)
    _option(p, "--epsilon", "head.epsilon", "Label smoothing", defaults, type=float)
    _switch(p, "--emphasis", "head.emphasis", "Hard-sample emphasis of ArcNegFace, NPCFace and MVSoftmax", defaults)
    _option(p, "--sched", "sched.kind", "Schedule kind: cosine or step", defaults)
    _option(p, "--eta0", "sched.eta0", "Peak learning rate", defaults, type=float)
    _option(p, "--warmup", "sched.warmup", "Linear warmup steps", defaults, type=int)
    _option(p, "--total", "sched.total", "Schedule length in steps (0 matches the run)", defaults, type=int)
    _option(p, "--milestones", "sched.milestones", "Step-decay milestones", defaults, type=int, nargs="*")
    _option(p, "--factor", "sched.factor", "Step-decay factor", defaults, type=float)
    _option(p, "--epochs", "train.epochs", "Epochs", defaults, type=int)
    _option(p, "--batch-size", "train.batch_size", "Batch size", defaults, type=int)
    _option(p, "--steps-per-epoch", "train.steps_per_epoch", "Steps per epoch (0 means records // batch size)", defaults, type=int)
    _option(p, "--momentum", "train.momentum", "SGD momentum", defaults, type=float)
    _option(p, "--weight-decay", "train.weight_decay", "SGD weight decay", defaults, type=float)
    _option(p, "--backbone", "train.backbone", "Backbone: linear or mlp", defaults)
    _option(p, "--hidden", "train.hidden", "Hidden width of the mlp backbone", defaults, type=int)
    _option(p, "--embedding-dim", "train.embedding_dim", "Embedding dimension", defaults, type=int)
    _option(p, "--center-weight", "train.center_weight", "Weight of the center loss (0 disables)", defaults, type=float)
    _option(p, "--center-alpha", "train.center_alpha", "Center update rate", defaults, type=float)
    _switch(p, "--balanced", "data.balanced", "Sample records inversely to their class size", defaults)
    _option(p, "--num-min", "data.num_min", "Drop classes with fewer records before training", defaults, type=int)
    _option(p, "--image-size", "data.image_size", "Side the aligned crops are resized to", defaults, type=int)
    _switch(p, "--augment", "data.augment", "Flip, colour and PCA-lighting augmentation", defaults)
    _option(p, "--pca", "paths.pca", "RGB PCA basis JSON for lighting augmentation", defaults)
    _option(p, "--hflip-prob", "data.hflip_prob", "Horizontal flip probability", defaults, type=float)
    _option(p, "--hsb-lo", "data.hsb_lo", "Lower bound of the hue/saturation/brightness coefficients", defaults, type=float)
    _option(p, "--hsb-hi", "data.hsb_hi", "Upper bound of the hue/saturation/brightness coefficients", defaults, type=float)
    _option(p, "--pca-sigma", "data.pca_sigma", "Std of the PCA lighting coefficients", defaults, type=float)
    _option(p, "--synth-classes", "synth.classes", "Blob classes", defaults, type=int)
    _option(p, "--synth-dim", "synth.dim", "Blob input dimension", defaults, type=int)
    _option(p, "--synth-per-class", "synth.per_class", "Blob samples per class", defaults, type=int)
    _option(p, "--separation", "synth.separation", "Distance between blob means", defaults, type=float)
    _option(p, "--sigma", "synth.sigma", "Per-coordinate blob noise std", defaults, type=float)
    _option(p, "--shards", "shard.p", "Simulated classifier shards", defaults, type=int)
    _option(p, "--teacher", "distill.teacher", "Model to distill from", defaults)
    _option(p, "--temperature", "distill.temperature", "Distillation temperature", defaults, type=float)
    _option(p, "--beta", "distill.beta", "Weight of the distillation term", defaults, type=float)
    _option(p, "--self-train-model", "self_train.model", "Model whose confidences filter the training records", defaults)
    _option(p, "--tau", "self_train.tau", "Confidence threshold of the self-training filter (0 disables)", defaults, type=float)

    # eval
    p = sub.add_parser("eval", parents=[common], help="Evaluate verification pairs")
    _option(p, "--model", "paths.model", "Model file (FEVL1)", defaults)
    _option(p, "--pairs", "paths.pairs", "Pair files: path1 path2 flag per line", defaults, nargs="+")
    _option(p, "--data-root", "paths.data_root", "Directory pair paths are relative to (each pair file's directory if none)", defaults)
    _switch(p, "--synthetic", "data.synthetic", "Evaluate on held-out Gaussian blobs instead of pair files", defaults)
    _option(p, "--num-pairs", "eval.num_pairs", "Pairs drawn from the held-out blobs", defaults, type=int)
    _option(p, "--folds", "eval.folds", "Cross-validation folds", defaults, type=int)
    _option(p, "--far", "eval.far", "False-accept rate the TAR is reported at", defaults, type=float)
    _option(p, "--image-size", "data.image_size", "Side the crops are resized to", defaults, type=int)
    _option(p, "--head", "head.kind", "Head kind for model files that store none", defaults)
    _option(p, "--report", "paths.report", "Write metrics as CSV metric,value", defaults)
    _option(p, "--roc", "paths.roc", "Write the ROC as CSV threshold,far,tar", defaults)
    _option(p, "--synth-classes", "synth.classes", "Blob classes", defaults, type=int)
    _option(p, "--synth-dim", "synth.dim", "Blob input dimension", defaults, type=int)
    _option(p, "--synth-per-class", "synth.per_class", "Blob samples per class", defaults, type=int)
    _option(p, "--separation", "synth.separation", "Distance between blob means", defaults, type=float)
    _option(p, "--sigma", "synth.sigma", "Per-coordinate blob noise std", defaults, type=float)

    # schedule
    p = sub.add_parser("schedule", parents=[common], help="Dump a learning-rate schedule")
    _option(p, "--kind", "sched.kind", "Schedule kind: cosine or step", defaults)
    _option(p, "--eta0", "sched.eta0", "Peak learning rate", defaults, type=float)
    _option(p, "--warmup", "sched.warmup", "Linear warmup steps", defaults, type=int)
    _option(p, "--total", "sched.total", "Schedule length in steps", defaults, type=int)
    _option(p, "--milestones", "sched.milestones", "Step-decay milestones", defaults, type=int, nargs="*")
    _option(p, "--factor", "sched.factor", "Step-decay factor", defaults, type=float)
    _option(p, "--output", "paths.output", "CSV file to write (stdout if none)", defaults)

    sub.add_parser("version", help="Print the version")
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    defaults = load_defaults()
    overrides = {k: v for k, v in vars(args).items() if k in defaults}
    return RunConfig.load(getattr(args, "config", None), overrides)


def _require(cfg: RunConfig, key: str, flag: str):
    value = cfg[key]
    if value in ("", [], None):
        raise ConfigError(f"{flag} is required (config key {key})")
    return value


def _root_for(cfg: RunConfig, listing: str | Path) -> Path:
    return Path(cfg["paths.data_root"]) if cfg["paths.data_root"] else Path(listing).parent


def head_config(cfg: RunConfig) -> HeadConfig:
    """HeadConfig from every head.* key; a head.<name> key sets HeadConfig.<name>."""
    values = {key.split(".", 1)[1]: value for key, value in cfg.as_dict().items() if key.startswith("head.")}
    return HeadConfig(**values)


def blob_spec(cfg: RunConfig) -> BlobSpec:
    return BlobSpec(
        num_classes=cfg["synth.classes"],
        dim=cfg["synth.dim"],
        per_class=cfg["synth.per_class"],
        separation=cfg["synth.separation"],
        sigma=cfg["synth.sigma"],
    )


def schedule_from(cfg: RunConfig, total: int) -> Schedule:
    return Schedule(
        kind=cfg["sched.kind"],
        eta0=cfg["sched.eta0"],
        warmup_steps=cfg["sched.warmup"],
        total_steps=total,
        step_milestones=cfg["sched.milestones"],
        step_factor=cfg["sched.factor"],
    )


def _banner(title: str) -> None:
    print("=" * 50)
    print(title)
    print("=" * 50)


def cmd_align(cfg: RunConfig) -> int:
    landmarks = _require(cfg, "paths.landmarks", "--landmarks")
    out_dir = Path(_require(cfg, "paths.output", "--output"))
    root = _root_for(cfg, landmarks)
    size = cfg["align.size"]
    if size < 1:
        raise ConfigError(f"--size must be positive, got {size}")
    template = TEMPLATE_112 * (size / TEMPLATE_SIZE[0])

    _banner("face-kit align")
    records = read_landmarks(landmarks)
    for rel, lm in records:
        crop = align_face(read_ppm(root / rel), lm, template=template, size=(size, size))
        dest = out_dir / Path(rel).with_suffix(".ppm")
        dest.parent.mkdir(parents=True, exist_ok=True)
        write_ppm(dest, crop)
        logger.debug("aligned %s -> %s", rel, dest)
    print(f"aligned {len(records)} images -> {out_dir}")
    return 0


def cmd_prep(cfg: RunConfig) -> int:
    manifest_path = _require(cfg, "paths.manifest", "--manifest")
    output = _require(cfg, "paths.output", "--output")
    manifest = load_manifest(manifest_path, _root_for(cfg, manifest_path))
    kept = filter_low_shot(manifest, cfg["data.num_min"])
    write_manifest(kept, output)

    removed_classes = manifest.num_classes - kept.num_classes
    removed_records = len(manifest) - len(kept)
    _banner("face-kit prep")
    print(f"input: {len(manifest)} records / {manifest.num_classes} classes")
    print(f"kept: {len(kept)} records / {kept.num_classes} classes -> {output}")
    print(f"removed {removed_classes} {'class' if removed_classes == 1 else 'classes'} / {removed_records} records")
    if cfg["paths.pca"]:
        basis = compute_rgb_pca(kept, cfg["data.pca_cap"])
        basis.to_json(cfg["paths.pca"])
        print(f"RGB PCA eigenvalues {basis.eigvals.tolist()} -> {cfg['paths.pca']}")
    return 0


def _training_data(cfg: RunConfig):
    """(manifest, feature store) for the configured data source."""
    seed = cfg["seed"]
    if cfg["data.synthetic"]:
        features, labels = make_blobs(blob_spec(cfg), Prng(seed).split(TRAIN_BLOBS_STREAM))
        store, manifest = ArrayStore.from_arrays(features, labels)
        return manifest, store

    manifest_path = _require(cfg, "paths.manifest", "--manifest (or --synthetic)")
    manifest = filter_low_shot(load_manifest(manifest_path, _root_for(cfg, manifest_path)), cfg["data.num_min"])
    augment_spec, pca_basis = None, None
    if cfg["data.augment"]:
        if cfg["paths.pca"]:
            pca_basis = PcaBasis.from_json(cfg["paths.pca"])
        augment_spec = AugmentSpec(
            hflip_prob=cfg["data.hflip_prob"],
            hsb_range=(cfg["data.hsb_lo"], cfg["data.hsb_hi"]),
            pca_sigma=cfg["data.pca_sigma"],
            pca=pca_basis is not None,
            seed=seed,
        )
    store = ImageStore(cfg["data.image_size"], 3, augment_spec, pca_basis, seed)
    return manifest, store


def cmd_train(cfg: RunConfig) -> int:
    head_cfg = head_config(cfg)
    manifest, store = _training_data(cfg)

    _banner("face-kit train")
    if cfg["self_train.tau"] > 0:
        prior = load_model(_require(cfg, "self_train.model", "--self-train-model"), head_cfg)
        eval_store = store if cfg["data.synthetic"] else ImageStore(cfg["data.image_size"], 3)
        manifest, report = self_train_filter(manifest, prior, cfg["self_train.tau"], eval_store)
        print(f"self-training filter (tau={cfg['self_train.tau']}): {report.summary()}")

    teacher = load_model(cfg["distill.teacher"], head_cfg) if cfg["distill.teacher"] else None
    config = TrainerConfig(
        backbone=cfg["train.backbone"],
        hidden=cfg["train.hidden"],
        embedding_dim=cfg["train.embedding_dim"],
        epochs=cfg["train.epochs"],
        batch_size=cfg["train.batch_size"],
        steps_per_epoch=cfg["train.steps_per_epoch"] or None,
        momentum=cfg["train.momentum"],
        weight_decay=cfg["train.weight_decay"],
        balanced=cfg["data.balanced"],
        seed=cfg["seed"],
        shards=cfg["shard.p"],
        center_weight=cfg["train.center_weight"],
        center_alpha=cfg["train.center_alpha"],
        teacher=teacher,
        distill_temperature=cfg["distill.temperature"],
        distill_beta=cfg["distill.beta"],
    )
    total = cfg["sched.total"] or config.total_steps(len(manifest))
    trainer = Trainer(head_cfg, schedule_from(cfg, total), config)
    print(f"head: {head_cfg.kind.value} s={head_cfg.s:g} m={head_cfg.m:g}")
    print(f"data: {len(manifest)} records / {manifest.num_classes} classes, {total} steps")
    result = trainer.run(manifest, store)

    model_path = cfg["paths.model"]
    save_model(model_path, result.model)
    if cfg["paths.metrics"]:
        result.write_metrics(cfg["paths.metrics"])
    if cfg["paths.trace"]:
        if trainer.last_trace is None:
            logger.warning("--trace needs --shards > 1; no trace written")
        else:
            trainer.last_trace.write(cfg["paths.trace"])
    print("-" * 50)
    print(f"final loss: {result.final_loss:.6f}")
    print(f"model: {model_path}")
    return 0


def _pair_file_set(cfg: RunConfig, path: str, model, image_size: int) -> tuple[np.ndarray, PairSet]:
    """Embed every image a pair file names; pairs index rows of the embedding matrix."""
    entries = read_pairs(path)
    paths = sorted({p for a, b, _ in entries for p in (a, b)})
    row = {p: i for i, p in enumerate(paths)}
    manifest = DatasetManifest.from_original(paths, [0] * len(paths), _root_for(cfg, path))
    store = ImageStore(image_size, 3)
    embeddings = model.embed(store.features(manifest, np.arange(len(paths))))
    pairs = PairSet(
        [row[a] for a, _, _ in entries],
        [row[b] for _, b, _ in entries],
        [same for _, _, same in entries],
    )
    return embeddings, pairs


def _roc_path(base: str, prefix: str, many: bool) -> Path:
    path = Path(base)
    return path.with_name(f"{path.stem}.{prefix}{path.suffix}") if many else path


def cmd_eval(cfg: RunConfig) -> int:
    model = load_model(_require(cfg, "paths.model", "--model"), head_config(cfg))
    folds, far = cfg["eval.folds"], cfg["eval.far"]
    sets: list[tuple[str, np.ndarray, PairSet]] = []
    if cfg["data.synthetic"]:
        seed = cfg["seed"]
        features, labels = make_blobs(blob_spec(cfg), Prng(seed).split(EVAL_BLOBS_STREAM))
        pairs = sample_pairs(labels, Prng(seed).split(EVAL_PAIRS_STREAM), cfg["eval.num_pairs"])
        sets.append(("synthetic", model.embed(features), pairs))
    else:
        for path in _require(cfg, "paths.pairs", "--pairs (or --synthetic)"):
            embeddings, pairs = _pair_file_set(cfg, path, model, cfg["data.image_size"])
            sets.append((Path(path).stem, embeddings, pairs))

    metrics: dict[str, float] = {}
    _banner("face-kit eval")
    for prefix, embeddings, pairs in sets:
        scored = score_pairs(embeddings, pairs)
        result = verify_kfold(scored, folds)
        points = roc_points(scored)
        metrics[f"{prefix}.accuracy"] = result.mean_accuracy
        metrics[f"{prefix}.std"] = result.std
        metrics[f"{prefix}.threshold"] = float(np.mean(result.thresholds))
        metrics[f"{prefix}.tar@far={far:g}"] = tar_at_far(points, far)
        metrics[f"{prefix}.auc"] = roc_auc(points)
        print(f"{prefix}: {len(pairs)} pairs")
        print(f"  accuracy: {result.mean_accuracy:.4f} +- {result.std:.4f} ({folds} folds)")
        print(f"  TAR@FAR={far:g}: {metrics[f'{prefix}.tar@far={far:g}']:.4f}")
        print(f"  AUC: {metrics[f'{prefix}.auc']:.4f}")
        if cfg["paths.roc"]:
            write_roc(_roc_path(cfg["paths.roc"], prefix, len(sets) > 1), points)
    print("-" * 50)
    if cfg["paths.report"]:
        write_report(cfg["paths.report"], metrics)
        print(f"report: {cfg['paths.report']}")
    return 0


def cmd_schedule(cfg: RunConfig) -> int:
    total = cfg["sched.total"]
    if total < 1:
        raise ConfigError(f"--total must be positive, got {total}")
    rows = lr_table(schedule_from(cfg, total))
    output = cfg["paths.output"]
    f = Path(output).open("w", newline="", encoding="utf-8") if output else sys.stdout
    try:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["step", "lr"])
        for t, lr in rows:
            writer.writerow([t, repr(lr)])
    finally:
        if output:
            f.close()
    return 0


HANDLERS = {
    "align": cmd_align,
    "prep": cmd_prep,
    "train": cmd_train,
    "eval": cmd_eval,
    "schedule": cmd_schedule,
}


def main(argv: list[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    if args.command == "version":
        print(f"face-kit {__version__}")
        return 0

    try:
        cfg = load_run_config(args)
        level = cfg["log.level"].upper()
        if level not in LOG_LEVELS:
            raise ConfigError(f"log.level must be one of {', '.join(LOG_LEVELS)}, got {level!r}")
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        return HANDLERS[args.command](cfg)
    except ConfigError as e:
        print(f"face-kit {args.command}: configuration error: {e}", file=sys.stderr)
        return 1
    except (DataError, ShapeError, NumericError, OSError) as e:
        print(f"face-kit {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
