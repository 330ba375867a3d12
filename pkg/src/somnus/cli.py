"""Command-line pipeline: synth -> extract -> train -> score -> evaluate ->
triage -> explain -> export-review.

Every command writes its documented artifacts plus a machine-readable
summary JSON, exits 1 on configuration errors and 2 on data errors, and is
re-runnable with identical outputs given identical inputs and seed.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np
import yaml

from . import data as D
from .edf import read_edf, write_edf
from .errors import ConfigError, DataError, SomnusError
from .features import (EXCLUDED_CODE, NormStats, RawEpoch, Spectrogram,
                       reconstruct, stft_epoch, read_feature_file,
                       write_feature_file)
from .interpret import (ScoredEpoch, TriageConfig, attended_eeg, confidence,
                        epoch_heatmap, flag_transitioning, influence_rows,
                        triage, write_review_bundle)
from .metrics import evaluate
from .model import ModelConfig, SleepModel
from .training import (TrainConfig, fuse_predictions, predicted_stages,
                       train)

_CONFIG_SECTIONS = ("model", "train", "triage")


def worker_count() -> int:
    cap = os.environ.get("SOMNUS_THREADS")
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise ConfigError(f"SOMNUS_THREADS must be an integer, got {cap!r}")
        if cap < 1:
            raise ConfigError("SOMNUS_THREADS must be >= 1")
        return cap
    return min(4, os.cpu_count() or 1)


def load_config_file(path) -> dict:
    """YAML config with model/train/triage sections; unknown keys rejected."""
    if path is None:
        return {}
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path}: invalid YAML ({exc})")
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path}: expected a mapping at top level")
    unknown = set(doc) - set(_CONFIG_SECTIONS)
    if unknown:
        raise ConfigError(f"config {path}: unknown sections {sorted(unknown)}")
    return doc


def merged_configs(config_path, overrides: dict
                   ) -> tuple[ModelConfig, TrainConfig, TriageConfig]:
    """Precedence: CLI flags > config file > defaults."""
    doc = load_config_file(config_path)
    sections = {name: dict(doc.get(name) or {}) for name in _CONFIG_SECTIONS}
    for section, key, value in overrides.get("set", []):
        if value is not None:
            sections[section][key] = value
    return (ModelConfig.from_dict(sections["model"]),
            TrainConfig.from_dict(sections["train"]),
            TriageConfig.from_dict(sections["triage"]))


def write_summary(out_dir: Path, command: str, payload: dict) -> None:
    payload = {"command": command, **payload}
    (out_dir / f"{command}_summary.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True))


def _run(ctx_fn):
    """Map package errors to the documented exit codes."""
    try:
        ctx_fn()
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except SomnusError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
def main() -> None:
    """Sleep staging pipeline: features, training, scoring, triage, review."""


# -- synth ------------------------------------------------------------------

def run_synth(out_dir: Path, seed: int, n_train: int, n_val: int, n_test: int,
              epochs_per_recording: int) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    root = np.random.default_rng(seed)
    entries = []
    splits = [("train", n_train), ("val", n_val), ("test", n_test)]
    for split, count in splits:
        for k in range(count):
            rec_id = f"{split}-{k:03d}"
            rng = np.random.default_rng(root.integers(2**63))
            rec = D.synth_recording(rec_id, rng,
                                    n_epochs=epochs_per_recording)
            write_edf(out_dir / f"{rec_id}.edf", rec.samples, rec.channel)
            D.write_hypnogram_csv(out_dir / f"{rec_id}.csv", rec.hypnogram)
            entries.append({"id": rec_id, "split": split,
                            "channel": rec.channel,
                            "edf": f"{rec_id}.edf",
                            "hypnogram": f"{rec_id}.csv"})
    manifest = {"profile": {"exclude_incomplete": False, "trim": False},
                "recordings": entries}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    summary = {"seed": seed, "recordings": len(entries),
               "epochs_per_recording": epochs_per_recording,
               "manifest": "manifest.json"}
    write_summary(out_dir, "synth", summary)
    return summary


@main.command()
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=0, show_default=True)
@click.option("--train-recordings", "n_train", default=8, show_default=True)
@click.option("--val-recordings", "n_val", default=2, show_default=True)
@click.option("--test-recordings", "n_test", default=2, show_default=True)
@click.option("--epochs-per-recording", default=120, show_default=True)
def synth(out, seed, n_train, n_val, n_test, epochs_per_recording):
    """Generate a synthetic EDF + hypnogram dataset with a manifest."""
    _run(lambda: run_synth(out, seed, n_train, n_val, n_test,
                           epochs_per_recording))


# -- extract ----------------------------------------------------------------

def _extract_one(entry: D.ManifestEntry, trim: bool, out_dir: Path) -> dict:
    codes = D.read_hypnogram_csv(entry.hypnogram)
    samples = read_edf(entry.edf, entry.channel or None)
    rec = D.Recording(id=entry.id, channel=entry.channel, samples=samples,
                      hypnogram=codes, in_bed=entry.in_bed)
    if trim:
        rec = D.trim_recording(rec)
    labels = D.map_stages(rec.hypnogram)
    specs = [stft_epoch(RawEpoch(samples=rec.samples[i * 3000:(i + 1) * 3000]))
             for i in range(rec.n_epochs)]
    write_feature_file(out_dir / f"{entry.id}.feat", specs, labels)
    return {"id": entry.id, "n_epochs": rec.n_epochs,
            "features": f"{entry.id}.feat"}


def run_extract(manifest_path: Path, out_dir: Path) -> dict:
    manifest = D.load_manifest(manifest_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in manifest.recordings:
        for path in (entry.edf, entry.hypnogram):
            if path is None or not Path(path).exists():
                raise DataError(f"{entry.id}: missing input file {path}")
    done, errors = {}, []
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        futures = {pool.submit(_extract_one, e, manifest.trim, out_dir): e
                   for e in manifest.recordings}
        for future, entry in futures.items():
            try:
                done[entry.id] = future.result()
            except SomnusError as exc:
                errors.append({"id": entry.id, "error": str(exc)})
    kept = {e.id: e for e in manifest.recordings if e.id in done}
    if manifest.exclude_incomplete:
        labels_by_id = {rid: read_feature_file(out_dir / done[rid]["features"])[1]
                        for rid in kept}
        kept = {rid: kept[rid]
                for rid in D.exclude_incomplete_recordings(labels_by_id)}
    # per-frequency stats over all training epochs, before any normalization
    train_values = []
    for rid, entry in kept.items():
        if entry.split == "train":
            specs, _ = read_feature_file(out_dir / done[rid]["features"])
            train_values.extend(s.values for s in specs)
    if train_values:
        stats = NormStats.from_values(np.concatenate(train_values, axis=0))
        (out_dir / "norm_stats.json").write_text(json.dumps(
            {"mean": stats.mean.tolist(), "std": stats.std.tolist()}))
    out_manifest = {
        "profile": {"exclude_incomplete": False, "trim": False},
        "recordings": [{"id": rid, "split": entry.split,
                        "features": done[rid]["features"]}
                       for rid, entry in kept.items()],
    }
    (out_dir / "manifest.json").write_text(json.dumps(out_manifest, indent=2))
    summary = {"recordings": len(kept), "errors": errors,
               "epochs": {rid: done[rid]["n_epochs"] for rid in kept},
               "manifest": "manifest.json",
               "norm_stats": "norm_stats.json" if train_values else None}
    write_summary(out_dir, "extract", summary)
    return summary


@main.command()
@click.option("--manifest", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
def extract(manifest, out):
    """EDF + hypnogram CSVs -> binary feature files and normalization stats."""
    _run(lambda: run_extract(manifest, out))


# -- shared loading ---------------------------------------------------------

def load_norm_stats(feature_dir: Path) -> NormStats:
    path = feature_dir / "norm_stats.json"
    if not path.exists():
        raise DataError(f"missing normalization stats: {path}")
    doc = json.loads(path.read_text())
    return NormStats(mean=np.asarray(doc["mean"]), std=np.asarray(doc["std"]))


def load_recording_features(path, stats: NormStats
                            ) -> tuple[np.ndarray, np.ndarray, list[Spectrogram]]:
    """Feature file -> (normalized values (n, T, F), labels, raw spectrograms)."""
    specs, labels = read_feature_file(path)
    values = np.stack([s.values for s in specs])
    normalized = (values - stats.mean) / stats.std
    return normalized.astype(np.float32), labels, specs


def split_sequences(manifest: D.Manifest, stats: NormStats, seq_len: int
                    ) -> dict[str, list[D.EpochSequence]]:
    """Windowed training/validation/test sequences keyed by split name."""
    out = {"train": [], "validation": [], "test": []}
    split = manifest.split()
    membership = {rid: name for name in out for rid in getattr(split, name)}
    for entry in manifest.recordings:
        if entry.features is None:
            raise DataError(f"{entry.id}: manifest entry has no features path")
        values, labels, _ = load_recording_features(entry.features, stats)
        name = membership[entry.id]
        training = name == "train"
        out[name].extend(D.window_sequences(
            values, labels, seq_len,
            stride=seq_len, recording_id=entry.id,
            skip_excluded=training))
    return out


# -- train ------------------------------------------------------------------

def run_train(manifest_path: Path, config_path, out_dir: Path,
              overrides: dict) -> dict:
    model_cfg, train_cfg, _ = merged_configs(config_path, overrides)
    manifest = D.load_manifest(manifest_path)
    stats = load_norm_stats(manifest_path.parent)
    seqs = split_sequences(manifest, stats, model_cfg.seq_len)
    if not seqs["train"]:
        raise DataError("no training sequences in manifest")
    out_dir.mkdir(parents=True, exist_ok=True)
    model = SleepModel(model_cfg, np.random.default_rng(train_cfg.seed),
                       dtype=np.float32)
    result = train(model, seqs["train"], seqs["validation"], train_cfg)
    model.save(out_dir / "model.ckpt")
    result.write_log(out_dir / "train_log.csv")
    summary = {"steps": result.steps, "best_val_accuracy": result.best_val_accuracy,
               "train_sequences": len(seqs["train"]),
               "val_sequences": len(seqs["validation"]),
               "checkpoint": "model.ckpt", "log": "train_log.csv",
               "seed": train_cfg.seed}
    write_summary(out_dir, "train", summary)
    return summary


def _config_overrides(seed, sequence_length, epoch_layers, sequence_layers,
                      threshold=None, percentile=None):
    return {"set": [
        ("train", "seed", seed),
        ("model", "seq_len", sequence_length),
        ("model", "n_epoch_blocks", epoch_layers),
        ("model", "n_seq_blocks", sequence_layers),
        ("triage", "threshold", threshold),
        ("triage", "percentile", percentile),
    ]}


_shared_model_options = [
    click.option("--config", "config_path", default=None,
                 type=click.Path(exists=True, path_type=Path)),
    click.option("--seed", default=None, type=int),
    click.option("--sequence-length", default=None, type=int),
    click.option("--epoch-layers", default=None, type=int),
    click.option("--sequence-layers", default=None, type=int),
]


def _with(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@main.command(name="train")
@click.option("--manifest", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@_with(_shared_model_options)
def train_cmd(manifest, out, config_path, seed, sequence_length, epoch_layers,
              sequence_layers):
    """Train on extracted features; writes checkpoint and training log."""
    overrides = _config_overrides(seed, sequence_length, epoch_layers,
                                  sequence_layers)
    _run(lambda: run_train(manifest, config_path, out, overrides))


# -- score ------------------------------------------------------------------

def score_recording(model: SleepModel, values: np.ndarray, batch: int = 16
                    ) -> np.ndarray:
    """Stride-1 windows, batched forward, fused per-epoch probabilities."""
    seq_len = model.config.seq_len
    n = len(values)
    starts = list(range(0, n - seq_len + 1))
    if not starts:
        raise DataError(f"recording too short to score: {n} epochs "
                        f"< window {seq_len}")
    outputs = []
    for i in range(0, len(starts), batch):
        chunk = starts[i:i + batch]
        stacked = np.stack([values[s:s + seq_len] for s in chunk])
        probs = model.predict(stacked).probs.data
        outputs.extend((s, probs[j]) for j, s in enumerate(chunk))
    return fuse_predictions(outputs, n)


def run_score(checkpoint: Path, manifest_path: Path, out_dir: Path) -> dict:
    model = SleepModel.load(checkpoint)
    manifest = D.load_manifest(manifest_path)
    stats = load_norm_stats(manifest_path.parent)
    out_dir.mkdir(parents=True, exist_ok=True)
    split = manifest.split()
    scored_ids = []
    for entry in manifest.recordings:
        if entry.id not in split.test:
            continue
        values, labels, _ = load_recording_features(entry.features, stats)
        probs = score_recording(model, values)
        doc = {
            "recording_id": entry.id,
            "probs": [[float(f"{v:.9g}") for v in row] for row in probs],
            "predicted": predicted_stages(probs).tolist(),
            "labels": labels.tolist(),
            "confidence": [float(f"{confidence(row):.9g}") for row in probs],
        }
        (out_dir / f"{entry.id}.scored.json").write_text(json.dumps(doc))
        scored_ids.append(entry.id)
    if not scored_ids:
        raise DataError("manifest has no test recordings to score")
    summary = {"checkpoint": str(checkpoint), "recordings": scored_ids}
    write_summary(out_dir, "score", summary)
    return summary


@main.command()
@click.option("--checkpoint", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
def score(checkpoint, manifest, out):
    """Score test recordings with overlapped windows and prediction fusion."""
    _run(lambda: run_score(checkpoint, manifest, out))


def read_scored(scored_dir: Path) -> list[dict]:
    paths = sorted(Path(scored_dir).glob("*.scored.json"))
    if not paths:
        raise DataError(f"no scored recordings under {scored_dir}")
    return [json.loads(p.read_text()) for p in paths]


# -- evaluate ---------------------------------------------------------------

def run_evaluate(scored_dir: Path, out_path: Path) -> dict:
    docs = read_scored(scored_dir)
    predictions = np.concatenate([d["predicted"] for d in docs])
    labels = np.concatenate([d["labels"] for d in docs]).astype(np.uint8)
    report = evaluate(predictions, labels)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    report.to_json(out_path)
    summary = {"recordings": len(docs), "accuracy": report.accuracy,
               "kappa": report.kappa, "macro_f1": report.macro_f1,
               "report": str(out_path)}
    write_summary(out_path.parent, "evaluate", summary)
    return summary


@main.command(name="evaluate")
@click.option("--scored", "scored_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
def evaluate_cmd(scored_dir, out):
    """Pool scored recordings into one performance report."""
    _run(lambda: run_evaluate(scored_dir, out))


# -- triage -----------------------------------------------------------------

def _masked_accuracy(epochs: list[ScoredEpoch]) -> float | None:
    pairs = [(s.predicted_stage, s.true_stage) for s in epochs
             if s.true_stage is not None and s.true_stage != EXCLUDED_CODE]
    if not pairs:
        return None
    return sum(1 for p, y in pairs if p == y) / len(pairs)


def scored_epochs(doc: dict) -> list[ScoredEpoch]:
    labels = doc.get("labels")
    reference = labels if labels is not None else doc["predicted"]
    flags = flag_transitioning(np.where(np.asarray(reference) == EXCLUDED_CODE,
                                        doc["predicted"], reference))
    out = []
    for i, probs in enumerate(doc["probs"]):
        out.append(ScoredEpoch(
            epoch_index=i, probs=np.asarray(probs),
            predicted_stage=doc["predicted"][i],
            confidence=doc["confidence"][i],
            transitioning=bool(flags[i]),
            true_stage=None if labels is None else labels[i]))
    return out


def run_triage(scored_dir: Path, config_path, out_path: Path,
               overrides: dict) -> dict:
    _, _, triage_cfg = merged_configs(config_path, overrides)
    docs = read_scored(scored_dir)
    per_recording = {d["recording_id"]: scored_epochs(d) for d in docs}
    pooled = [s for epochs in per_recording.values() for s in epochs]
    confident, deferred = triage(pooled, triage_cfg)
    rate = lambda group: (sum(1 for s in group if s.transitioning) / len(group)
                          if group else None)
    report = {
        "mode": triage_cfg.mode,
        "threshold": triage_cfg.threshold,
        "percentile": triage_cfg.percentile,
        "n_total": len(pooled),
        "n_confident": len(confident),
        "n_deferred": len(deferred),
        "accuracy_confident": _masked_accuracy(confident),
        "accuracy_deferred": _masked_accuracy(deferred),
        "transitioning_rate_confident": rate(confident),
        "transitioning_rate_deferred": rate(deferred),
        "per_recording_confident_pct": {
            rid: 100.0 * sum(1 for s in epochs if not s.triaged) / len(epochs)
            for rid, epochs in per_recording.items()},
    }
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(report, indent=2))
    write_summary(out_path.parent, "triage", {**report, "report": str(out_path)})
    return report


@main.command(name="triage")
@click.option("--scored", "scored_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, path_type=Path))
@click.option("--threshold", default=None, type=float)
@click.option("--percentile", default=None, type=float)
def triage_cmd(scored_dir, out, config_path, threshold, percentile):
    """Partition scored epochs into confident and deferred sets."""
    overrides = {"set": [("triage", "threshold", threshold),
                         ("triage", "percentile", percentile)]}
    if percentile is not None and threshold is None:
        overrides["set"].append(("triage", "mode", "percentile"))
    _run(lambda: run_triage(scored_dir, config_path, out, overrides))


# -- explain ----------------------------------------------------------------

def _centered_start(i: int, n: int, seq_len: int) -> int:
    return int(np.clip(i - seq_len // 2, 0, n - seq_len))


def explain_recording(model: SleepModel, values: np.ndarray,
                      specs: list[Spectrogram], epochs: list[int],
                      include_signals: bool) -> list[dict]:
    seq_len = model.config.seq_len
    n = len(values)
    if n < seq_len:
        raise DataError(f"recording too short to explain: {n} epochs")
    results_by_start: dict[int, object] = {}
    out = []
    for i in epochs:
        if not 0 <= i < n:
            raise DataError(f"epoch index {i} out of range 0..{n - 1}")
        start = _centered_start(i, n, seq_len)
        if start not in results_by_start:
            window = values[start:start + seq_len][None]
            results_by_start[start] = model.predict(window)
        result = results_by_start[start]
        j = i - start
        heat, degenerate = epoch_heatmap(result.epoch_scores[-1][0, j])
        influence = influence_rows(result.seq_scores[-1][0])[j]
        entry = {"index": i,
                 "heatmap": heat.tolist(),
                 "heatmap_degenerate": degenerate,
                 "influence": {"weights": influence.tolist(),
                               "window_offset": start}}
        if include_signals:
            layer_scores = [scores[0, j] for scores in result.epoch_scores]
            entry["attended_eeg"] = attended_eeg(specs[i],
                                                 layer_scores).tolist()
            entry["raw_eeg"] = reconstruct(specs[i]).tolist()
        out.append(entry)
    return out


def run_explain(checkpoint: Path, manifest_path: Path, out_dir: Path,
                epochs_arg: str | None, include_signals: bool) -> dict:
    model = SleepModel.load(checkpoint)
    manifest = D.load_manifest(manifest_path)
    stats = load_norm_stats(manifest_path.parent)
    out_dir.mkdir(parents=True, exist_ok=True)
    split = manifest.split()
    explained = []
    for entry in manifest.recordings:
        if entry.id not in split.test:
            continue
        values, _, specs = load_recording_features(entry.features, stats)
        if epochs_arg:
            indices = [int(tok) for tok in epochs_arg.split(",")]
        else:
            indices = list(range(len(values)))
        payload = explain_recording(model, values, specs, indices,
                                    include_signals)
        doc = {"recording_id": entry.id, "epochs": payload}
        (out_dir / f"{entry.id}.explain.json").write_text(json.dumps(doc))
        explained.append(entry.id)
    if not explained:
        raise DataError("manifest has no test recordings to explain")
    summary = {"checkpoint": str(checkpoint), "recordings": explained,
               "signals_included": include_signals}
    write_summary(out_dir, "explain", summary)
    return summary


@main.command()
@click.option("--checkpoint", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--epochs", "epochs_arg", default=None,
              help="Comma-separated epoch indices; default all.")
@click.option("--signals/--no-signals", "include_signals", default=False,
              help="Include attended and raw reconstructed signals.")
def explain(checkpoint, manifest, out, epochs_arg, include_signals):
    """Attention heat maps, influence profiles, and attended signals."""
    _run(lambda: run_explain(checkpoint, manifest, out, epochs_arg,
                             include_signals))


# -- export-review ----------------------------------------------------------

def run_export_review(scored_dir: Path, explain_dir: Path, out_dir: Path,
                      config_path, overrides: dict) -> dict:
    _, _, triage_cfg = merged_configs(config_path, overrides)
    out_dir.mkdir(parents=True, exist_ok=True)
    exported = []
    for doc in read_scored(scored_dir):
        rid = doc["recording_id"]
        epochs = scored_epochs(doc)
        triage(epochs, triage_cfg)
        explain_path = Path(explain_dir) / f"{rid}.explain.json"
        if explain_path.exists():
            explained = json.loads(explain_path.read_text())
            by_index = {e["index"]: e for e in explained["epochs"]}
            for s in epochs:
                extra = by_index.get(s.epoch_index)
                if extra is None:
                    continue
                s.heatmap = np.asarray(extra["heatmap"])
                s.heatmap_degenerate = extra["heatmap_degenerate"]
                s.influence = np.asarray(extra["influence"]["weights"])
                s.influence_offset = extra["influence"]["window_offset"]
                if "attended_eeg" in extra:
                    s.attended_eeg = np.asarray(extra["attended_eeg"])
                if "raw_eeg" in extra:
                    s.raw_eeg = np.asarray(extra["raw_eeg"])
        write_review_bundle(out_dir / f"{rid}.review.json", rid, epochs)
        exported.append(rid)
    summary = {"recordings": exported,
               "threshold": triage_cfg.threshold,
               "mode": triage_cfg.mode}
    write_summary(out_dir, "export-review", summary)
    return summary


@main.command(name="export-review")
@click.option("--scored", "scored_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--explain", "explain_dir", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, path_type=Path))
@click.option("--threshold", default=None, type=float)
@click.option("--percentile", default=None, type=float)
def export_review(scored_dir, explain_dir, out, config_path, threshold,
                  percentile):
    """Merge scored and explain outputs into review bundles for the UI."""
    overrides = {"set": [("triage", "threshold", threshold),
                         ("triage", "percentile", percentile)]}
    if percentile is not None and threshold is None:
        overrides["set"].append(("triage", "mode", "percentile"))
    _run(lambda: run_export_review(scored_dir, explain_dir, out, config_path,
                                   overrides))


if __name__ == "__main__":
    main()
