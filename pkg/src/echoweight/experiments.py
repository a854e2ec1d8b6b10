"""Splitting, the four-condition experiment grid, and report exports.

Conditions: text_only (no interaction row), binary_un (raw binary row),
edge_reweight (re-weighted row), sample_reweight (binary row, re-weighted
loss). Each (condition, alpha, seed) cell trains one model on a seeded
stratified holdout split and reports test accuracy; the table aggregates
mean and std over seeds plus the accuracy gain versus binary_un.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .corpus import Corpus, build_interaction_matrix
from .encode import IdfTable, encode_comments, encode_news, preprocess
from .model import FeatureSet, TrainConfig, evaluate, stratified_split_indices, train
from .participation import (
    ParticipationProfile,
    Thresholds,
    UndefinedComposition,
    compute_profiles,
    group_composition,
)
from .weighting import GroupCoefficients, edge_reweight, weight_vector

CONDITIONS = ("text_only", "binary_un", "edge_reweight", "sample_reweight")
ALPHA_SENSITIVE = ("edge_reweight", "sample_reweight")


@dataclass
class ExperimentGrid:
    conditions: tuple[str, ...] = CONDITIONS
    alphas: tuple[float, ...] = (0.5, 1.0)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    split_ratio: float = 0.75

    def __post_init__(self) -> None:
        if not self.conditions or not self.seeds:
            raise ValueError("grid needs at least one condition and one seed")
        unknown = set(self.conditions) - set(CONDITIONS)
        if unknown:
            raise ValueError(f"unknown conditions: {sorted(unknown)}")
        if not 0 < self.split_ratio < 1:
            raise ValueError("split_ratio must be in (0, 1)")


@dataclass
class ResultRow:
    condition: str
    alpha: float
    seed_count: int
    mean_acc: float
    std_acc: float
    gain_vs_binary_un: float | None
    accuracies: tuple[float, ...] = ()


@dataclass
class ResultTable:
    rows: list[ResultRow] = field(default_factory=list)

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        buf.write("condition,alpha,seed_count,mean_acc,std_acc,gain_vs_binary_un\n")
        for r in self.rows:
            gain = "" if r.gain_vs_binary_un is None else f"{r.gain_vs_binary_un:.6f}"
            buf.write(
                f"{r.condition},{r.alpha:g},{r.seed_count},"
                f"{r.mean_acc:.6f},{r.std_acc:.6f},{gain}\n"
            )
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    def pretty(self) -> str:
        lines = [
            f"{'condition':<18}{'alpha':>7}{'seeds':>7}{'accuracy':>20}{'gain vs +UN':>14}"
        ]
        lines.append("-" * len(lines[0]))
        for r in self.rows:
            acc = f"{100 * r.mean_acc:.2f} +/- {100 * r.std_acc:.2f}"
            gain = "" if r.gain_vs_binary_un is None else f"{100 * r.gain_vs_binary_un:+.2f}"
            lines.append(
                f"{r.condition:<18}{r.alpha:>7g}{r.seed_count:>7}{acc:>20}{gain:>14}"
            )
        return "\n".join(lines)


def split(ids: list[str], labels, ratio: float, seed: int) -> tuple[list[str], list[str]]:
    """Seeded stratified holdout over news ids; train gets floor(ratio * n)."""
    first, second = stratified_split_indices(labels, ratio, seed)
    return [ids[i] for i in first], [ids[i] for i in second]


def center_columns(un_dense: np.ndarray, fit_rows) -> np.ndarray:
    """Subtract per-column means computed on `fit_rows` from every row.

    Interaction rows are nearly constant in scale (the column means
    dominate the label-relevant variation), which stalls gradient
    descent; removing the means fit on the training rows fixes the
    conditioning without leaking test-row statistics.
    """
    fit_rows = np.asarray(fit_rows)
    return un_dense - un_dense[fit_rows].mean(axis=0)


def build_features(
    corpus: Corpus,
    idf: IdfTable,
    un_dense: np.ndarray,
) -> FeatureSet:
    """Encode every news item (sorted-id order) against a fitted IDF table."""
    news = sorted(corpus.news, key=lambda a: a.id)
    z_news = np.stack([encode_news(preprocess(a.text), idf) for a in news])
    z_comments = np.stack(
        [
            encode_comments([preprocess(c) for c in corpus.comments.get(a.id, [])], idf)
            for a in news
        ]
    )
    return FeatureSet(
        news_ids=[a.id for a in news],
        z_news=z_news,
        z_comments=z_comments,
        un_rows=un_dense,
    )


def run_grid(
    corpus: Corpus,
    grid: ExperimentGrid,
    train_cfg: TrainConfig,
    thresholds: Thresholds = Thresholds(),
    coeffs: GroupCoefficients = GroupCoefficients(),
    encoder_dim: int = 4096,
    norm_kind: str = "l2",
) -> ResultTable:
    """Run every (condition, alpha, seed) cell and aggregate.

    Per seed: stratified split, IDF fit on the training split, one binary
    matrix shared across conditions. The edge-re-weighting norm is
    computed on training rows only and reused at test time. Cells whose
    condition ignores alpha are trained once per seed and reused.
    """
    profiles = compute_profiles(corpus.users, thresholds)
    matrix = build_interaction_matrix(corpus)
    news = sorted(corpus.news, key=lambda a: a.id)
    ids = [a.id for a in news]
    labels = np.array([a.label for a in news])
    binary_dense = matrix.to_dense()

    cell_acc: dict[tuple[str, float | None, int], float] = {}
    for seed in grid.seeds:
        train_ids, test_ids = split(ids, labels, grid.split_ratio, seed)
        train_rows = [matrix.row_of[nid] for nid in train_ids]
        test_rows = [matrix.row_of[nid] for nid in test_ids]

        docs = [preprocess(corpus.news_by_id()[nid].text) for nid in train_ids]
        for nid in train_ids:
            docs.extend(preprocess(c) for c in corpus.comments.get(nid, []))
        idf = IdfTable.fit(docs, dim=encoder_dim)
        base = build_features(
            corpus, idf, center_columns(binary_dense, train_rows)
        )

        for condition in grid.conditions:
            alphas = grid.alphas if condition in ALPHA_SENSITIVE else (None,)
            for alpha in alphas:
                if condition == "text_only":
                    feats = FeatureSet(
                        base.news_ids, base.z_news, base.z_comments,
                        np.zeros_like(binary_dense),
                    )
                elif condition == "edge_reweight":
                    wv = weight_vector(
                        matrix, profiles, coeffs, alpha, norm_kind, norm_rows=train_rows
                    )
                    feats = FeatureSet(
                        base.news_ids, base.z_news, base.z_comments,
                        center_columns(edge_reweight(matrix, wv).to_dense(), train_rows),
                    )
                else:
                    feats = base
                cfg = replace(
                    train_cfg,
                    seed=seed,
                    mode=condition,
                    alpha=0.0 if alpha is None else alpha,
                )
                params, _ = train(
                    feats.subset(train_rows), labels[train_rows], cfg,
                    matrix=matrix, profiles=profiles, coeffs=coeffs,
                    norm_kind=norm_kind,
                )
                cell_acc[(condition, alpha, seed)] = evaluate(
                    params, feats.subset(test_rows), labels[test_rows]
                )

    def collect(condition: str, alpha: float) -> tuple[float, ...]:
        key_alpha = alpha if condition in ALPHA_SENSITIVE else None
        return tuple(cell_acc[(condition, key_alpha, s)] for s in grid.seeds)

    baseline = {}
    if "binary_un" in grid.conditions:
        accs = collect("binary_un", 0.0)
        baseline["mean"] = float(np.mean(accs))

    table = ResultTable()
    for condition in grid.conditions:
        for alpha in grid.alphas:
            accs = collect(condition, alpha)
            mean = float(np.mean(accs))
            gain = None
            if baseline and condition != "binary_un":
                gain = mean - baseline["mean"]
            table.rows.append(
                ResultRow(
                    condition=condition,
                    alpha=alpha,
                    seed_count=len(grid.seeds),
                    mean_acc=mean,
                    std_acc=float(np.std(accs)),
                    gain_vs_binary_un=gain,
                    accuracies=accs,
                )
            )
    return table


def export_ternary(
    corpus: Corpus,
    profiles: dict[str, ParticipationProfile],
    out_path: str | Path,
) -> int:
    """CSV of per-news group composition for news with >= 1 interaction.

    Returns the number of rows written; zero-interaction news are counted
    in a trailing comment line.
    """
    matrix = build_interaction_matrix(corpus)
    label_of = {a.id: a.label for a in corpus.news}
    written = 0
    excluded = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("news_id,frac_lurker,frac_engager,frac_contributor,label\n")
        for nid in matrix.news_ids:
            try:
                f_l, f_e, f_c = group_composition(nid, matrix, profiles)
            except UndefinedComposition:
                excluded += 1
                continue
            fh.write(
                f"{nid},{float(f_l):.6f},{float(f_e):.6f},{float(f_c):.6f},{label_of[nid]}\n"
            )
            written += 1
        fh.write(f"# excluded_zero_interaction={excluded}\n")
    return written
