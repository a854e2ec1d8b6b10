"""Command-line interface.

    echoweight <subcommand> --config run.json [--seed N] [--out DIR]

Subcommands: ingest, profile, weigh, synth, train, grid, report. Anything
beyond paths and seed lives in the JSON config; flags override it. Every
run writes its fully resolved config next to its outputs. Exit codes: 0
success, 1 validation/usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .corpus import (
    Corpus,
    CorpusError,
    build_interaction_matrix,
    corpus_stats,
    load_corpus,
    save_corpus,
)
from .encode import DEFAULT_DIM
from .experiments import (
    ExperimentGrid,
    build_features,
    center_columns,
    export_ternary,
    run_grid,
    split,
)
from .model import FeatureSet, TrainConfig, evaluate, save_checkpoint, train
from .encode import IdfTable, preprocess
from .participation import Thresholds, compute_profiles, write_profiles
from .synth import SynthConfig, generate
from .weighting import GroupCoefficients, edge_reweight, weight_vector
from . import plots

DEFAULT_CONFIG = {
    "paths": {
        "news": "news.jsonl",
        "comments": "comments.jsonl",
        "users": "users.jsonl",
        "interactions": "interactions.jsonl",
    },
    "thresholds": {"lurker_max": 0.025, "engager_max": 0.15},
    "coefficients": {"lurker": 0.9, "engager": 0.09, "contributor": 0.01},
    "weighting": {"alpha": 1.0, "norm_kind": "l2", "norm_scope": "train"},
    "encoder": {"dim": DEFAULT_DIM, "hash": "fnv1a64"},
    "train": {},
    "grid": {},
    "synth": {},
}


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: str | None) -> dict:
    if path is None:
        return copy.deepcopy(DEFAULT_CONFIG)
    try:
        with open(path, encoding="utf-8") as fh:
            user_cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(user_cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return _merge(DEFAULT_CONFIG, user_cfg)


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path("runs") / args.command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_resolved(cfg: dict, out: Path) -> None:
    with open(out / "resolved_config.json", "w", encoding="utf-8") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_corpus(cfg: dict) -> Corpus:
    paths = cfg["paths"]
    return load_corpus(
        paths["news"], paths["comments"], paths["users"], paths["interactions"]
    )


def _thresholds(cfg: dict) -> Thresholds:
    return Thresholds(**cfg["thresholds"])


def _coeffs(cfg: dict) -> GroupCoefficients:
    return GroupCoefficients(**cfg["coefficients"])


def cmd_ingest(args, cfg: dict) -> int:
    corpus = _load_corpus(cfg)
    profiles = compute_profiles(corpus.users, _thresholds(cfg))
    stats = corpus_stats(corpus, profiles)
    text = json.dumps(stats, indent=2)
    if args.out:
        out = _out_dir(args)
        (out / "stats.json").write_text(text + "\n", encoding="utf-8")
        _write_resolved(cfg, out)
    print(text)
    return 0


def cmd_profile(args, cfg: dict) -> int:
    corpus = _load_corpus(cfg)
    profiles = compute_profiles(corpus.users, _thresholds(cfg))
    out = _out_dir(args)
    write_profiles(profiles, out / "profiles.jsonl")
    export_ternary(corpus, profiles, out / "ternary.csv")
    plots.plot_ternary(plots.read_ternary_csv(out / "ternary.csv"), out / "ternary.png")
    _write_resolved(cfg, out)
    print(f"wrote {out / 'profiles.jsonl'}, {out / 'ternary.csv'}, {out / 'ternary.png'}")
    return 0


def cmd_weigh(args, cfg: dict) -> int:
    corpus = _load_corpus(cfg)
    profiles = compute_profiles(corpus.users, _thresholds(cfg))
    matrix = build_interaction_matrix(corpus)
    weighting_cfg = cfg["weighting"]
    wv = weight_vector(
        matrix, profiles, _coeffs(cfg),
        alpha=weighting_cfg["alpha"], norm_kind=weighting_cfg["norm_kind"],
    )
    for nid, value in zip(matrix.news_ids, wv.values):
        print(f"{nid} {value:.6g}")
    out = _out_dir(args)
    with open(out / "omega.csv", "w", encoding="utf-8") as fh:
        fh.write("news_id,omega\n")
        for nid, value in zip(matrix.news_ids, wv.values):
            fh.write(f"{nid},{value:.10g}\n")
    weighted = edge_reweight(matrix, wv)
    coo = weighted.values.tocoo()
    with open(out / "weighted_matrix.csv", "w", encoding="utf-8") as fh:
        fh.write("news_id,user_id,weight\n")
        for i, j, v in sorted(zip(coo.row, coo.col, coo.data), key=lambda t: (t[0], t[1])):
            fh.write(f"{weighted.news_ids[i]},{weighted.user_ids[j]},{v:.10g}\n")
    _write_resolved(cfg, out)
    return 0


def cmd_synth(args, cfg: dict) -> int:
    synth_cfg = SynthConfig(**{
        k: (tuple(v) if isinstance(v, list) else v) for k, v in cfg["synth"].items()
    })
    if args.seed is not None:
        synth_cfg.seed = args.seed
    if synth_cfg.rate_ranges is not None:
        synth_cfg.rate_ranges = {g: tuple(r) for g, r in synth_cfg.rate_ranges.items()}
    synth_cfg.interact_prob = {g: tuple(r) for g, r in synth_cfg.interact_prob.items()}
    corpus, ground_truth = generate(synth_cfg)
    out = _out_dir(args)
    save_corpus(corpus, out)
    with open(out / "ground_truth.json", "w", encoding="utf-8") as fh:
        json.dump(ground_truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    cfg = dict(cfg)
    cfg["synth"] = {**asdict(synth_cfg)}
    _write_resolved(cfg, out)
    print(f"wrote corpus ({len(corpus.news)} news, {len(corpus.users)} users, "
          f"{len(corpus.events)} events) to {out}")
    return 0


def cmd_train(args, cfg: dict) -> int:
    corpus = _load_corpus(cfg)
    thresholds = _thresholds(cfg)
    coeffs = _coeffs(cfg)
    profiles = compute_profiles(corpus.users, thresholds)
    matrix = build_interaction_matrix(corpus)
    train_cfg = TrainConfig(**cfg["train"])
    if args.seed is not None:
        train_cfg.seed = args.seed
    weighting_cfg = cfg["weighting"]
    norm_kind = weighting_cfg["norm_kind"]

    news = sorted(corpus.news, key=lambda a: a.id)
    ids = [a.id for a in news]
    labels = np.array([a.label for a in news])
    ratio = cfg["grid"].get("split_ratio", 0.75)
    train_ids, test_ids = split(ids, labels, ratio, train_cfg.seed)
    train_rows = [matrix.row_of[nid] for nid in train_ids]
    test_rows = [matrix.row_of[nid] for nid in test_ids]

    docs = [preprocess(corpus.news_by_id()[nid].text) for nid in train_ids]
    for nid in train_ids:
        docs.extend(preprocess(c) for c in corpus.comments.get(nid, []))
    idf = IdfTable.fit(docs, dim=cfg["encoder"]["dim"])

    un_dense = matrix.to_dense()
    if train_cfg.mode == "text_only":
        un_dense = np.zeros_like(un_dense)
    elif train_cfg.mode == "edge_reweight":
        wv = weight_vector(
            matrix, profiles, coeffs, train_cfg.alpha, norm_kind,
            norm_rows=train_rows if weighting_cfg["norm_scope"] == "train" else None,
        )
        un_dense = edge_reweight(matrix, wv).to_dense()
    if train_cfg.mode != "text_only":
        un_dense = center_columns(un_dense, train_rows)
    feats = build_features(corpus, idf, un_dense)

    params, log = train(
        feats.subset(train_rows), labels[train_rows], train_cfg,
        matrix=matrix, profiles=profiles, coeffs=coeffs, norm_kind=norm_kind,
    )
    test_acc = evaluate(params, feats.subset(test_rows), labels[test_rows])
    out = _out_dir(args)
    save_checkpoint(out / "model.ckpt", params, train_cfg)
    log.to_csv(out / "trainlog.csv")
    idf.to_json(out / "idf.json")
    _write_resolved(cfg, out)
    print(f"mode={train_cfg.mode} alpha={train_cfg.alpha:g} seed={train_cfg.seed} "
          f"best_val_acc={log.best_val_accuracy:.4f} test_acc={test_acc:.4f}")
    return 0


def cmd_grid(args, cfg: dict) -> int:
    corpus = _load_corpus(cfg)
    grid_cfg = dict(cfg["grid"])
    for key in ("conditions", "alphas", "seeds"):
        if key in grid_cfg:
            grid_cfg[key] = tuple(grid_cfg[key])
    grid = ExperimentGrid(**grid_cfg)
    train_cfg = TrainConfig(**cfg["train"])
    table = run_grid(
        corpus, grid, train_cfg,
        thresholds=_thresholds(cfg), coeffs=_coeffs(cfg),
        encoder_dim=cfg["encoder"]["dim"], norm_kind=cfg["weighting"]["norm_kind"],
    )
    out = _out_dir(args)
    table.to_csv(out / "results.csv")
    _write_resolved(cfg, out)
    print(table.pretty())
    return 0


def cmd_report(args, cfg: dict) -> int:
    out = _out_dir(args)
    results_path = args.results or str(out / "results.csv")
    rows = plots.read_results_csv(results_path)
    plots.plot_accuracy(rows, out / "accuracy.png")
    plots.plot_gains(rows, out / "gains.png")
    wrote = [str(out / "accuracy.png"), str(out / "gains.png")]
    if args.ternary:
        plots.plot_ternary(plots.read_ternary_csv(args.ternary), out / "ternary.png")
        wrote.append(str(out / "ternary.png"))
    header = f"{'condition':<18}{'alpha':>7}{'seeds':>7}{'accuracy':>20}{'gain vs +UN':>14}"
    print(header)
    print("-" * len(header))
    for r in rows:
        acc = f"{100 * r['mean_acc']:.2f} +/- {100 * r['std_acc']:.2f}"
        gain = "" if r["gain_vs_binary_un"] is None else f"{100 * r['gain_vs_binary_un']:+.2f}"
        print(f"{r['condition']:<18}{r['alpha']:>7g}{r['seed_count']:>7}{acc:>20}{gain:>14}")
    print("figures: " + ", ".join(wrote))
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "profile": cmd_profile,
    "weigh": cmd_weigh,
    "synth": cmd_synth,
    "train": cmd_train,
    "grid": cmd_grid,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="echoweight", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ingest", "validate a corpus and print its statistics"),
        ("profile", "participation profiles plus ternary composition export"),
        ("weigh", "per-news weights and the re-weighted matrix"),
        ("synth", "generate a seeded synthetic corpus"),
        ("train", "train a single condition"),
        ("grid", "run the full experiment grid"),
        ("report", "render a results table and figures"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="output directory")
        if name == "report":
            p.add_argument("--results", help="results CSV produced by `grid`")
            p.add_argument("--ternary", help="ternary CSV produced by `profile`")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, CorpusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 2
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
