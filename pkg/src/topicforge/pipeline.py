"""Staged pipeline with hash-chained manifests and content-addressed caching.

Each stage validates its inputs (config paths plus upstream artifacts),
hashes them together with the config fields it depends on, and skips the
work when the manifest already records the same hashes with all outputs
intact. Deleting an artifact or touching an input re-runs exactly the
affected stages.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

import numpy as np

from . import clusterer, embeddings, indicators, ingest, reducer, sentiment, topics
from .config import RunConfig
from .evaluation import (
    ExperimentReport,
    MetricsRow,
    all_metrics,
    dataset_for_variant,
    emit_plot,
    emit_report,
    metrics_csv,
    train_cell,
)
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .nn.training import loss_curve_csv

STAGES = ("ingest", "features", "sentiment", "topics", "train", "evaluate", "report")

MANIFEST_NAME = "manifest.json"
LOCK_NAME = ".lock"


class PipelineError(RuntimeError):
    pass


class DependencyError(PipelineError):
    """A required upstream stage has not produced its artifacts."""


class LockError(PipelineError):
    pass


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _hash_values(values: dict) -> str:
    return hashlib.sha256(json.dumps(values, sort_keys=True, default=str).encode()).hexdigest()


@dataclass
class StageStatus:
    stage: str
    skipped: bool

    def __str__(self) -> str:
        return f"{self.stage}: {'up to date' if self.skipped else 'done'}"


class OutputLock:
    def __init__(self, out_dir: Path):
        self.path = out_dir / LOCK_NAME

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LockError(
                f"output dir is locked by another run ({self.path}); remove the stale lock if none is active"
            ) from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        return self

    def __exit__(self, *exc):
        self.path.unlink(missing_ok=True)
        return False


class Pipeline:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.output_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self._manifest_path = self.out / MANIFEST_NAME
        if self._manifest_path.exists():
            self.manifest = json.loads(self._manifest_path.read_text(encoding="utf-8"))
        else:
            self.manifest = {"stages": {}}

    # ------------------------------------------------------------- plumbing

    def _save_manifest(self) -> None:
        self._manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def _artifact(self, name: str, stage: str) -> Path:
        p = self.out / name
        if not p.exists():
            raise DependencyError(f"missing artifact {name!r}: run the {stage!r} stage first")
        return p

    def _maybe_run(self, stage: str, cfg_values: dict, inputs: dict[str, Path], outputs: list[str], work) -> StageStatus:
        input_hashes = {label: file_sha256(p) for label, p in inputs.items()}
        cfg_hash = _hash_values(cfg_values)
        entry = self.manifest["stages"].get(stage)
        if entry and entry["config_hash"] == cfg_hash and entry["input_hashes"] == input_hashes:
            recorded = entry["output_hashes"]
            if set(recorded) == set(outputs) and all(
                (self.out / name).exists() and file_sha256(self.out / name) == sha
                for name, sha in recorded.items()
            ):
                return StageStatus(stage, skipped=True)
        work()
        output_hashes = {}
        for name in outputs:
            p = self.out / name
            if not p.exists():
                raise PipelineError(f"stage {stage!r} did not produce expected output {name!r}")
            output_hashes[name] = file_sha256(p)
        self.manifest["stages"][stage] = {
            "config_hash": cfg_hash,
            "input_hashes": input_hashes,
            "output_hashes": output_hashes,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        self._save_manifest()
        return StageStatus(stage, skipped=False)

    # --------------------------------------------------------------- stages

    def run_stage(self, stage: str) -> StageStatus:
        return getattr(self, f"cmd_{stage}")()

    def run_all(self) -> list[StageStatus]:
        return [self.run_stage(s) for s in STAGES]

    def cmd_ingest(self) -> StageStatus:
        cfg = self.cfg

        def work() -> None:
            parsed = ingest.parse_comments(cfg.comments)
            bar_parse = ingest.parse_bars(cfg.bars)
            aligned = ingest.align(parsed.records, bar_parse.series, cfg.ticker)
            payload = {
                "ticker": aligned.ticker,
                "doc_ids": aligned.doc_ids,
                "docs": aligned.docs,
                "days": [[b.date.isoformat(), b.doc_indices] for b in aligned.days],
                "dropped_after_last_bar": aligned.dropped_after_last_bar,
                "corpus_hash": ingest.corpus_hash(aligned.doc_ids, aligned.docs),
            }
            (self.out / "aligned.json").write_text(
                json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8"
            )
            ingest.bars_to_csv(aligned.bars.bars, self.out / "bars_clean.csv")
            n_assigned = sum(len(b.doc_indices) for b in aligned.days)
            report = {
                "comments": {
                    "total_rows": parsed.total_rows,
                    "parsed": len(parsed.records),
                    "empty_dropped": parsed.empty_dropped,
                    "malformed": [[e.row, e.reason] for e in parsed.malformed],
                },
                "bars": {
                    "total_rows": bar_parse.total_rows,
                    "parsed": len(bar_parse.series.bars),
                    "malformed": [[e.row, e.reason] for e in bar_parse.malformed],
                },
                "alignment": {
                    "ticker_comments": len(aligned.docs),
                    "assigned": n_assigned,
                    "dropped_after_last_bar": aligned.dropped_after_last_bar,
                },
            }
            (self.out / "ingest_report.json").write_text(
                json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )

        return self._maybe_run(
            "ingest",
            {"ticker": cfg.ticker},
            {"comments": cfg.comments, "bars": cfg.bars},
            ["aligned.json", "bars_clean.csv", "ingest_report.json"],
            work,
        )

    def _load_aligned(self) -> ingest.AlignedCorpus:
        payload = json.loads(self._artifact("aligned.json", "ingest").read_text(encoding="utf-8"))
        bars = ingest.parse_bars(self._artifact("bars_clean.csv", "ingest")).series
        return ingest.AlignedCorpus(
            ticker=payload["ticker"],
            doc_ids=payload["doc_ids"],
            docs=payload["docs"],
            days=[
                ingest.DayBucket(date.fromisoformat(d), indices) for d, indices in payload["days"]
            ],
            bars=bars,
            dropped_after_last_bar=payload["dropped_after_last_bar"],
        )

    def cmd_features(self) -> StageStatus:
        def work() -> None:
            bars = ingest.parse_bars(self.out / "bars_clean.csv").series
            table = indicators.build_features(bars)
            table.to_csv(self.out / "features.csv")
            (self.out / "features_meta.json").write_text(
                json.dumps({"rows": len(table), "warmup_dropped": table.warmup_dropped}, sort_keys=True)
                + "\n",
                encoding="utf-8",
            )

        return self._maybe_run(
            "features",
            {},
            {"bars_clean.csv": self._artifact("bars_clean.csv", "ingest")},
            ["features.csv", "features_meta.json"],
            work,
        )

    def _comment_compounds(self, aligned: ingest.AlignedCorpus) -> np.ndarray:
        """Per-corpus-document compound scores under the configured engine."""
        if self.cfg.sentiment_engine == "external":
            provider = sentiment.load_external_scores(self.cfg.external_scores)
            return np.array([provider.compound(doc_id) for doc_id in aligned.doc_ids])
        lex = sentiment.load_lexicon(self.cfg.lexicon)
        return np.array([sentiment.score_comment(t, lex).compound for t in aligned.docs])

    def cmd_sentiment(self) -> StageStatus:
        cfg = self.cfg
        inputs = {"aligned.json": self._artifact("aligned.json", "ingest")}
        if cfg.sentiment_engine == "external":
            inputs["external_scores"] = cfg.external_scores
        elif cfg.lexicon is not None:
            inputs["lexicon"] = cfg.lexicon

        def work() -> None:
            aligned = self._load_aligned()
            if cfg.sentiment_engine == "external":
                provider = sentiment.load_external_scores(cfg.external_scores)
                rows = []
                for doc_id in aligned.doc_ids:
                    c = provider.compound(doc_id)
                    rows.append((doc_id, c, "", "", "", sentiment.classify(c)))
            else:
                lex = sentiment.load_lexicon(cfg.lexicon)
                rows = []
                for doc_id, text in zip(aligned.doc_ids, aligned.docs):
                    s = sentiment.score_comment(text, lex)
                    rows.append(
                        (doc_id, s.compound, repr(s.pos), repr(s.neu), repr(s.neg), sentiment.classify(s.compound))
                    )
            with open(self.out / "comment_scores.csv", "w", encoding="utf-8") as fh:
                fh.write("doc_id,compound,pos,neu,neg,label\n")
                for doc_id, c, pos, neu, neg, label in rows:
                    fh.write(f"{doc_id},{c!r},{pos},{neu},{neg},{label}\n")

            compound_of = {doc_id: c for doc_id, c, *_ in rows}
            with open(self.out / "daily_score.csv", "w", encoding="utf-8") as fh:
                fh.write("date,score,n_comments\n")
                for bucket in aligned.days:
                    compounds = [compound_of[aligned.doc_ids[i]] for i in bucket.doc_indices]
                    if cfg.weight_by_length:
                        weights = [max(len(aligned.docs[i].split()), 1) for i in bucket.doc_indices]
                        total = sum(w * c for w, c in zip(weights, compounds)) / sum(weights)
                    else:
                        total = sum(compounds) / len(compounds) if compounds else 0.0
                    fh.write(f"{bucket.date.isoformat()},{total!r},{len(compounds)}\n")

        return self._maybe_run(
            "sentiment",
            {"engine": cfg.sentiment_engine, "weight_by_length": cfg.weight_by_length},
            inputs,
            ["comment_scores.csv", "daily_score.csv"],
            work,
        )

    def cmd_topics(self) -> StageStatus:
        cfg = self.cfg
        inputs = {
            "aligned.json": self._artifact("aligned.json", "ingest"),
            "comment_scores.csv": self._artifact("comment_scores.csv", "sentiment"),
        }
        if cfg.embeddings is not None:
            inputs["embeddings"] = cfg.embeddings
        cfg_values = {
            key: getattr(cfg, key)
            for key in (
                "k",
                "out_dim",
                "min_dist",
                "epochs_umap",
                "neg_samples",
                "learning_rate",
                "min_pts",
                "min_cluster_size",
                "min_df",
                "embed_dim",
                "seed",
                "n_top_words",
            )
        }
        outputs = [
            "layout.csv",
            "labels.csv",
            "condensed_tree.csv",
            "topic_report.csv",
            "assignments.csv",
            "daily_topic_score.csv",
            "topics_meta.json",
        ]
        if cfg.embeddings is None:
            outputs.append("embeddings.emb1")

        def work() -> None:
            aligned = self._load_aligned()
            if cfg.embeddings is not None:
                matrix = embeddings.load_embeddings(cfg.embeddings, expected_ids=aligned.doc_ids)
                order = {doc_id: i for i, doc_id in enumerate(matrix.doc_ids)}
                rows = matrix.rows[[order[d] for d in aligned.doc_ids]]
            else:
                matrix = embeddings.fallback_embed(aligned.docs, dim=cfg.embed_dim, seed=cfg.seed)
                matrix.doc_ids = list(aligned.doc_ids)
                embeddings.save_embeddings(matrix, self.out / "embeddings.emb1")
                rows = matrix.rows

            layout = reducer.reduce_embeddings(
                rows,
                k=cfg.k,
                out_dim=cfg.out_dim,
                epochs=cfg.epochs_umap,
                seed=cfg.seed,
                learning_rate=cfg.learning_rate,
                neg_samples=cfg.neg_samples,
                min_dist=cfg.min_dist,
            )
            reducer.layout_to_csv(layout, aligned.doc_ids, self.out / "layout.csv")

            core = clusterer.core_distances(layout.Y, cfg.min_pts)
            graph = clusterer.mutual_reachability(layout.Y, core, cfg.min_pts)
            mst = clusterer.minimum_spanning_tree(graph)
            dendrogram = clusterer.build_hierarchy(mst)
            tree = clusterer.condense(dendrogram, cfg.min_cluster_size)
            labels = clusterer.extract_clusters(tree)
            clusterer.labels_to_csv(labels, aligned.doc_ids, self.out / "labels.csv")
            clusterer.condensed_tree_to_csv(tree, self.out / "condensed_tree.csv")

            compounds = _read_compounds(self.out / "comment_scores.csv", aligned.doc_ids)
            model = topics.build_topic_model(
                aligned.docs,
                labels,
                compounds,
                stop_words=sentiment.load_stopwords() | {aligned.ticker.lower()},
                min_df=cfg.min_df,
                n_top_words=cfg.n_top_words,
            )
            topics.topic_report_csv(model, self.out / "topic_report.csv")
            topics.assignments_csv(model, aligned.doc_ids, self.out / "assignments.csv")
            daily = topics.daily_topic_score(aligned, model, compounds)
            with open(self.out / "daily_topic_score.csv", "w", encoding="utf-8") as fh:
                fh.write("date,score_topic,n_comments\n")
                for bucket in aligned.days:
                    fh.write(
                        f"{bucket.date.isoformat()},{daily[bucket.date]!r},{len(bucket.doc_indices)}\n"
                    )
            meta = {
                "n_docs": len(aligned.docs),
                "n_clusters": labels.n_clusters,
                "n_outliers": int(np.sum(labels.labels == -1)),
                "corpus_hash": ingest.corpus_hash(aligned.doc_ids, aligned.docs),
                "final_ce": layout.epoch_ce[-1],
            }
            (self.out / "topics_meta.json").write_text(
                json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )

        return self._maybe_run("topics", cfg_values, inputs, outputs, work)

    # ------------------------------------------------------- forecast stages

    def _forecast_inputs(self) -> dict[str, Path]:
        cfg = self.cfg
        inputs = {"features.csv": self._artifact("features.csv", "features")}
        needs_score = any(v in ("sentiment",) for v in cfg.variants) or (
            "topic_sentiment" in cfg.variants and cfg.topic_score_mode == "add"
        )
        needs_topic = "topic_sentiment" in cfg.variants
        if needs_score:
            inputs["daily_score.csv"] = self._artifact("daily_score.csv", "sentiment")
        if needs_topic:
            inputs["daily_topic_score.csv"] = self._artifact("daily_topic_score.csv", "topics")
        return inputs

    def _forecast_data(self):
        features = indicators.load_features_csv(self._artifact("features.csv", "features"))
        score = topic_score = None
        if (self.out / "daily_score.csv").exists():
            score = _read_daily(self.out / "daily_score.csv")
        if (self.out / "daily_topic_score.csv").exists():
            topic_score = _read_daily(self.out / "daily_topic_score.csv")
        return features, score, topic_score

    def _forecast_cfg_values(self) -> dict:
        cfg = self.cfg
        return {
            key: getattr(cfg, key)
            for key in ("lookback", "epochs", "seeds", "models", "variants", "topic_score_mode", "gan_noise_dim")
        }

    def _cells(self):
        for model in self.cfg.models:
            for variant in self.cfg.variants:
                yield model, variant

    def cmd_train(self) -> StageStatus:
        cfg = self.cfg
        inputs = self._forecast_inputs()
        outputs = []
        for model, variant in self._cells():
            for seed in cfg.seeds:
                outputs.append(f"checkpoints/{model}_{variant}_s{seed}.tfc1")
                outputs.append(f"loss/{model}_{variant}_s{seed}.csv")

        def work() -> None:
            (self.out / "checkpoints").mkdir(exist_ok=True)
            (self.out / "loss").mkdir(exist_ok=True)
            features, score, topic_score = self._forecast_data()
            for model, variant in self._cells():
                dataset = dataset_for_variant(
                    features, score, topic_score, variant, cfg.lookback, cfg.topic_score_mode
                )
                for seed in cfg.seeds:
                    fc = train_cell(model, dataset, cfg.epochs, seed, cfg.gan_noise_dim)
                    extra = {"hidden": 32, "noise_dim": cfg.gan_noise_dim} if model == "gan" else {"hidden": 50}
                    save_checkpoint(fc, self.out / f"checkpoints/{model}_{variant}_s{seed}.tfc1", extra=extra)
                    loss_curve_csv(fc.loss_curve, self.out / f"loss/{model}_{variant}_s{seed}.csv")

        return self._maybe_run("train", self._forecast_cfg_values(), inputs, outputs, work)

    def _predictions(self):
        """(model, variant) -> {seed: TrainedForecaster with fresh predictions}, plus datasets."""
        cfg = self.cfg
        features, score, topic_score = self._forecast_data()
        cells = {}
        datasets = {}
        for model, variant in self._cells():
            dataset = dataset_for_variant(
                features, score, topic_score, variant, cfg.lookback, cfg.topic_score_mode
            )
            datasets[(model, variant)] = dataset
            by_seed = {}
            for seed in cfg.seeds:
                path = self.out / f"checkpoints/{model}_{variant}_s{seed}.tfc1"
                if not path.exists():
                    raise DependencyError(f"missing checkpoint {path.name!r}: run the 'train' stage first")
                fc = load_checkpoint(path)
                fc.predictions = {
                    "train": dataset.scalers.inverse_target(fc.model.forward(dataset.X_train)),
                    "test": dataset.scalers.inverse_target(fc.model.forward(dataset.X_test)),
                }
                by_seed[seed] = fc
            cells[(model, variant)] = by_seed
        return cells, datasets

    def cmd_evaluate(self) -> StageStatus:
        cfg = self.cfg
        inputs = dict(self._forecast_inputs())
        for model, variant in self._cells():
            for seed in cfg.seeds:
                inputs[f"checkpoints/{model}_{variant}_s{seed}.tfc1"] = self._artifact(
                    f"checkpoints/{model}_{variant}_s{seed}.tfc1", "train"
                )

        def work() -> None:
            cells, datasets = self._predictions()
            rows: list[MetricsRow] = []
            per_seed: list[MetricsRow] = []
            for (model, variant), by_seed in cells.items():
                dataset = datasets[(model, variant)]
                per_split = {"train": [], "test": []}
                for seed, fc in by_seed.items():
                    for split, actual in (
                        ("train", dataset.scalers.inverse_target(dataset.y_train)),
                        ("test", dataset.scalers.inverse_target(dataset.y_test)),
                    ):
                        m = all_metrics(actual, fc.predictions[split])
                        per_split[split].append(m)
                        per_seed.append(MetricsRow(model, variant, cfg.sentiment_engine, split, seed=seed, **m))
                for split, ms in per_split.items():
                    rows.append(
                        MetricsRow(
                            model,
                            variant,
                            cfg.sentiment_engine,
                            split,
                            seed=None,
                            **{k: float(np.median([x[k] for x in ms])) for k in ("rmse", "mae", "r2", "mape")},
                        )
                    )
            report = ExperimentReport(
                rows, cfg.snapshot, list(cfg.seeds), per_seed=per_seed, sentiment_engine=cfg.sentiment_engine
            )
            (self.out / "metrics.csv").write_text(metrics_csv(report), encoding="utf-8")

        return self._maybe_run("evaluate", self._forecast_cfg_values(), inputs, ["metrics.csv"], work)

    def cmd_report(self) -> StageStatus:
        cfg = self.cfg
        inputs = {"metrics.csv": self._artifact("metrics.csv", "evaluate")}
        inputs.update(self._forecast_inputs())
        for model, variant in self._cells():
            for seed in cfg.seeds:
                inputs[f"checkpoints/{model}_{variant}_s{seed}.tfc1"] = self._artifact(
                    f"checkpoints/{model}_{variant}_s{seed}.tfc1", "train"
                )
        outputs = []
        if cfg.report_format in ("markdown", "both"):
            outputs.append("report.md")
        if cfg.report_format in ("csv", "both"):
            outputs.append("report.csv")
        for model, variant in self._cells():
            outputs.append(f"predictions/{model}_{variant}.csv")
            for kind in ("train", "test", "loss"):
                outputs.append(f"plots/{model}_{variant}_{kind}.svg")

        def work() -> None:
            (self.out / "plots").mkdir(exist_ok=True)
            (self.out / "predictions").mkdir(exist_ok=True)
            all_rows = _read_metrics(self.out / "metrics.csv")
            report = ExperimentReport(
                [r for r in all_rows if r.seed is None],
                cfg.snapshot,
                list(cfg.seeds),
                per_seed=[r for r in all_rows if r.seed is not None],
                sentiment_engine=cfg.sentiment_engine,
            )
            if cfg.report_format in ("markdown", "both"):
                (self.out / "report.md").write_text(emit_report(report, "markdown"), encoding="utf-8")
            if cfg.report_format in ("csv", "both"):
                (self.out / "report.csv").write_text(emit_report(report, "csv"), encoding="utf-8")

            cells, datasets = self._predictions()
            for (model, variant), by_seed in cells.items():
                dataset = datasets[(model, variant)]
                seeds = sorted(by_seed)
                with open(self.out / f"predictions/{model}_{variant}.csv", "w", encoding="utf-8") as fh:
                    fh.write("date,split,actual," + ",".join(f"pred_s{s}" for s in seeds) + "\n")
                    for split, dates, actual in (
                        ("train", dataset.train_dates, dataset.scalers.inverse_target(dataset.y_train)),
                        ("test", dataset.test_dates, dataset.scalers.inverse_target(dataset.y_test)),
                    ):
                        preds = [by_seed[s].predictions[split] for s in seeds]
                        for i, d in enumerate(dates):
                            cells_txt = ",".join(repr(float(p[i])) for p in preds)
                            fh.write(f"{d.isoformat()},{split},{float(actual[i])!r},{cells_txt}\n")
                for split in ("train", "test"):
                    dates = dataset.train_dates if split == "train" else dataset.test_dates
                    actual = dataset.scalers.inverse_target(
                        dataset.y_train if split == "train" else dataset.y_test
                    )
                    median_pred = np.median(
                        np.vstack([by_seed[s].predictions[split] for s in seeds]), axis=0
                    )
                    emit_plot(
                        {"actual": (dates, actual.tolist()), "predicted": (dates, median_pred.tolist())},
                        self.out / f"plots/{model}_{variant}_{split}.svg",
                        title=f"{model} / {variant} ({split})",
                        x_label="date",
                        y_label="adj close",
                    )
                curves = []
                for s in seeds:
                    curves.append(_read_loss(self.out / f"loss/{model}_{variant}_s{s}.csv"))
                shortest = min(len(c) for c in curves)
                median_curve = np.median(np.vstack([c[:shortest] for c in curves]), axis=0)
                emit_plot(
                    {"loss": (list(range(shortest)), median_curve.tolist())},
                    self.out / f"plots/{model}_{variant}_loss.svg",
                    title=f"{model} / {variant} training loss",
                    x_label="epoch",
                    y_label="loss",
                )

        cfg_values = dict(self._forecast_cfg_values())
        cfg_values["report_format"] = cfg.report_format
        return self._maybe_run("report", cfg_values, inputs, outputs, work)


def _read_compounds(path: Path, doc_ids: list[str]) -> np.ndarray:
    by_id: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        assert header.startswith("doc_id,compound")
        for line in fh:
            cells = line.rstrip("\n").split(",")
            by_id[cells[0]] = float(cells[1])
    return np.array([by_id[d] for d in doc_ids])


def _read_daily(path: Path) -> dict[date, float]:
    out: dict[date, float] = {}
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            cells = line.rstrip("\n").split(",")
            out[date.fromisoformat(cells[0])] = float(cells[1])
    return out


def _read_loss(path: Path) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            values.append(float(line.rstrip("\n").split(",")[1]))
    return np.array(values)


def _read_metrics(path: Path) -> list[MetricsRow]:
    rows: list[MetricsRow] = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            cells = line.rstrip("\n").split(",")
            model, variant, engine, split, seed = cells[:5]
            rmse_v, mae_v, r2_v, mape_v = (float(x) for x in cells[5:9])
            rows.append(
                MetricsRow(
                    model,
                    variant,
                    engine,
                    split,
                    seed=None if seed == "" else int(seed),
                    rmse=rmse_v,
                    mae=mae_v,
                    r2=r2_v,
                    mape=mape_v,
                )
            )
    return rows
