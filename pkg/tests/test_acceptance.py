"""Release-gate acceptance checks.

Each test exercises one end-to-end guarantee at its stated tolerance and
prints a single PASS/FAIL line so the whole gate can be read off the
test output. Run with `pytest -v tests/test_acceptance.py`.
"""

import json
import time
from dataclasses import replace

import numpy as np

from echoweight.cli import main
from echoweight.corpus import (
    Corpus,
    InteractionEvent,
    NewsArticle,
    UserRecord,
    build_interaction_matrix,
    save_corpus,
)
from echoweight.encode import IdfTable, preprocess
from echoweight.experiments import ExperimentGrid, build_features, run_grid
from echoweight.model import (
    FeatureSet,
    TrainConfig,
    forward_batch,
    gradients,
    init_params,
    train,
)
from echoweight.participation import Thresholds, compute_profiles
from echoweight.synth import (
    SynthConfig,
    generate,
    largest_remainder,
    oracle_edge_matrix,
    oracle_weights,
)
from echoweight.weighting import (
    GroupCoefficients,
    balanced_loss,
    edge_reweight,
    weight_vector,
)

from conftest import make_network_corpus


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    assert ok, f"{name}{suffix}"


# 1. Exact worked example: the hand-computable network fixture yields
#    weight 1.01 for news item "b".
def test_acceptance_1_worked_example_weight():
    corpus = make_network_corpus()
    matrix = build_interaction_matrix(corpus)
    profiles = compute_profiles(corpus.users, Thresholds())
    wv = weight_vector(matrix, profiles, GroupCoefficients(), alpha=1.0)
    omega_b = wv.values[matrix.row_of["b"]]
    ok = abs(omega_b - 1.01) <= 1e-12
    _report("1 worked-example weight", ok, f"omega_b={omega_b!r}")


# 2. Oracle equivalence: the vectorized weights and edge transform match
#    the naive per-pair reference exactly on 50 seeded corpora.
def test_acceptance_2_oracle_equivalence():
    start = time.perf_counter()
    alphas = (0.5, 1.0, 2.0)
    norms = ("l2", "l1", "max")
    all_equal = True
    for seed in range(50):
        cfg = SynthConfig(
            n_news=20 + (seed % 5) * 10,
            n_users=100 + (seed % 7) * 50,
            seed=seed,
            lurker_signal=0.1 + 0.8 * (seed / 49),
            comments_per_news=0,
            words_per_news=3,
        )
        corpus, _ = generate(cfg)
        matrix = build_interaction_matrix(corpus)
        profiles = compute_profiles(corpus.users, Thresholds())
        coeffs = GroupCoefficients()
        alpha = alphas[seed % len(alphas)]
        norm_kind = norms[seed % len(norms)]

        wv = weight_vector(matrix, profiles, coeffs, alpha, norm_kind)
        ref = oracle_weights(corpus, profiles, coeffs, alpha, norm_kind)
        dense = edge_reweight(matrix, wv).to_dense()
        ref_dense = oracle_edge_matrix(corpus, profiles, coeffs, alpha, norm_kind)
        if not (
            np.array_equal(wv.values, ref.values)
            and wv.norm == ref.norm
            and np.array_equal(dense, ref_dense)
        ):
            all_equal = False
            break
    elapsed = time.perf_counter() - start
    ok = all_equal and elapsed < 10.0
    _report("2 oracle equivalence", ok, f"50 corpora in {elapsed:.2f}s")


def _small_training_setup(seed=0):
    cfg = SynthConfig(
        n_news=40,
        n_users=120,
        seed=seed,
        audience_size={"L": 4, "E": 4, "C": 1},
        comments_per_news=1,
        words_per_news=8,
    )
    corpus, _ = generate(cfg)
    matrix = build_interaction_matrix(corpus)
    profiles = compute_profiles(corpus.users, Thresholds())
    news = sorted(corpus.news, key=lambda a: a.id)
    labels = np.array([a.label for a in news], dtype=float)
    docs = [preprocess(a.text) for a in news]
    idf = IdfTable.fit(docs, dim=64)
    return corpus, matrix, profiles, labels, idf


# 3. Alpha-zero collapse: with alpha = 0 both re-weighted modes reproduce
#    the plain binary run bit for bit (parameters and training logs).
def test_acceptance_3_alpha_zero_collapse():
    corpus, matrix, profiles, labels, idf = _small_training_setup()
    coeffs = GroupCoefficients()
    binary = build_features(corpus, idf, matrix.to_dense())
    wv = weight_vector(matrix, profiles, coeffs, alpha=0.0)
    edge = build_features(corpus, idf, edge_reweight(matrix, wv).to_dense())

    base_cfg = TrainConfig(epochs=8, batch_size=8, h_u=4, h_f=8, alpha=0.0, seed=3)
    runs = {
        "binary_un": train(binary, labels, replace(base_cfg, mode="binary_un")),
        "edge_reweight": train(edge, labels, replace(base_cfg, mode="edge_reweight")),
        "sample_reweight": train(
            binary,
            labels,
            replace(base_cfg, mode="sample_reweight"),
            matrix=matrix,
            profiles=profiles,
            coeffs=coeffs,
        ),
    }
    ref_params, ref_log = runs["binary_un"]
    ok = True
    for mode in ("edge_reweight", "sample_reweight"):
        params, log = runs[mode]
        for (_, a), (_, b) in zip(ref_params.arrays(), params.arrays()):
            ok = ok and np.array_equal(np.asarray(a), np.asarray(b))
        ok = (
            ok
            and log.rows == ref_log.rows
            and log.best_epoch == ref_log.best_epoch
            and log.best_val_accuracy == ref_log.best_val_accuracy
        )
    _report("3 alpha-zero collapse", ok)


# 4. Gradient correctness: central finite differences (step 1e-5) agree
#    with the analytic gradients to relative error < 1e-4 on 20 random
#    instances with non-trivial per-sample loss factors.
def test_acceptance_4_gradient_check():
    step = 1e-5
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n, p, d, h_u, h_f = 5, 4, 3, 2, 3
        feats = FeatureSet(
            news_ids=[f"n{i}" for i in range(n)],
            z_news=rng.normal(size=(n, d)),
            z_comments=rng.normal(size=(n, d)),
            un_rows=rng.random((n, p)),
        )
        labels = rng.integers(0, 2, size=n).astype(float)
        factors = 1.0 + rng.random(n)
        params = init_params(p, d, h_u, h_f, rng)
        _, grads = gradients(params, feats, labels, factors)
        grad_of = dict(grads.arrays())

        for name, arr in params.arrays():
            g = np.asarray(grad_of[name])
            for idx in np.ndindex(arr.shape):
                orig = arr[idx]
                losses = []
                for delta in (step, -step):
                    arr[idx] = orig + delta
                    if name == "out_b":
                        params.out_b = float(arr[0])
                    probs, _ = forward_batch(params, feats)
                    losses.append(balanced_loss(labels, probs, factors))
                arr[idx] = orig
                if name == "out_b":
                    params.out_b = float(arr[0])
                fd = (losses[0] - losses[1]) / (2 * step)
                denom = max(abs(fd), abs(g[idx]), 1e-8)
                worst = max(worst, abs(fd - g[idx]) / denom)
    ok = worst < 1e-4
    _report("4 gradient check", ok, f"worst rel err {worst:.2e}")


def _signal_corpus(signal: float) -> Corpus:
    cfg = SynthConfig(
        n_news=2000,
        n_users=5000,
        seed=0,
        lurker_signal=signal,
        audience_size={"L": 12, "E": 40, "C": 50},
        interact_prob={"E": (0.25, 0.25), "C": (1.0, 1.0)},
        words_per_news=40,
        comments_per_news=3,
        text_signal=0.05,
    )
    corpus, _ = generate(cfg)
    return corpus


# 5. Planted-signal recovery: with a strong quiet-user signal the edge
#    re-weighted condition beats the plain binary row, which beats text
#    alone (means over 10 seeds); with the signal off, the edge-vs-binary
#    gap stays within one accuracy point. Budget: < 5 minutes.
def test_acceptance_5_reweighting_recovers_planted_signal():
    start = time.perf_counter()
    grid = ExperimentGrid(
        conditions=("text_only", "binary_un", "edge_reweight"),
        alphas=(1.0,),
        seeds=tuple(range(10)),
    )
    train_cfg = TrainConfig(
        epochs=40, batch_size=32, learning_rate=0.1,
        h_u=8, h_f=16, early_stop_patience=10,
    )

    means = {}
    for signal in (0.9, 0.0):
        table = run_grid(_signal_corpus(signal), grid, train_cfg, encoder_dim=256)
        means[signal] = {r.condition: r.mean_acc for r in table.rows}

    strong = means[0.9]
    gap_off = means[0.0]["edge_reweight"] - means[0.0]["binary_un"]
    elapsed = time.perf_counter() - start
    ok = (
        strong["edge_reweight"] > strong["binary_un"] > strong["text_only"]
        and abs(gap_off) <= 0.01
        and elapsed < 300.0
    )
    detail = (
        f"signal on: text {strong['text_only']:.3f} < binary "
        f"{strong['binary_un']:.3f} < edge {strong['edge_reweight']:.3f}; "
        f"signal off gap {gap_off:+.4f}; {elapsed:.0f}s"
    )
    _report("5 planted-signal recovery", ok, detail)


# 6. Participation round-trip: categorization recovers every generated
#    user's intended group, and group sizes follow largest-remainder
#    90/9/1 rounding exactly.
def test_acceptance_6_participation_round_trip():
    ok = True
    for n_users, seed in ((1000, 0), (250, 1), (777, 2)):
        cfg = SynthConfig(n_news=20, n_users=n_users, seed=seed,
                          comments_per_news=0, words_per_news=3)
        corpus, gt = generate(cfg)
        profiles = compute_profiles(corpus.users, Thresholds())
        ok = ok and all(
            profiles[uid].group.value == gt["user_groups"][uid] for uid in profiles
        )
        expected = largest_remainder((0.90, 0.09, 0.01), n_users)
        sizes = [gt["group_sizes"][g] for g in ("L", "E", "C")]
        counted = [
            sum(1 for p in profiles.values() if p.group.value == g)
            for g in ("L", "E", "C")
        ]
        ok = ok and sizes == expected == counted
        if n_users == 1000:
            ok = ok and expected == [900, 90, 10]
    _report("6 participation round-trip", ok)


def _benchmark_shaped_corpus() -> Corpus:
    """451 news (132 real / 319 fake) and group interaction totals
    482 / 4,295 / 41,738, laid out over unique (user, news) pairs."""
    news = [
        NewsArticle(id=f"n{i:04d}", text=f"story {i}", label=1 if i < 319 else 0)
        for i in range(451)
    ]
    users = []
    groups = {
        # group -> (prefix, member count, activity count, event total)
        "L": ("lur", 500, 2, 482),
        "E": ("eng", 200, 10, 4295),
        "C": ("con", 100, 50, 41738),
    }
    events = []
    for prefix, members, activity, total in groups.values():
        ids = [f"{prefix}{i:04d}" for i in range(members)]
        users.extend(
            UserRecord(user_id=uid, total_activity_count=activity,
                       account_age_days=100)
            for uid in ids
        )
        assert total <= members * len(news)
        events.extend(
            InteractionEvent(user_id=ids[k % members],
                             news_id=news[k // members].id)
            for k in range(total)
        )
    return Corpus(news=news, comments={}, users=users, events=events)


# 7. Count echo: ingesting a corpus shaped like a public benchmark's
#    summary table reports its news and per-group interaction totals
#    verbatim.
def test_acceptance_7_ingest_count_echo(tmp_path):
    corpus_dir = tmp_path / "corpus"
    save_corpus(_benchmark_shaped_corpus(), corpus_dir)
    config = {
        "paths": {
            "news": str(corpus_dir / "news.jsonl"),
            "comments": str(corpus_dir / "comments.jsonl"),
            "users": str(corpus_dir / "users.jsonl"),
            "interactions": str(corpus_dir / "interactions.jsonl"),
        }
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "out"
    code = main(["ingest", "--config", str(cfg_path), "--out", str(out)])
    stats = json.loads((out / "stats.json").read_text())
    ok = (
        code == 0
        and stats["news"] == {"real": 132, "fake": 319, "total": 451}
        and stats["interactions"]["lurkers"] == 482
        and stats["interactions"]["engagers"] == 4295
        and stats["interactions"]["contributors"] == 41738
    )
    _report("7 ingest count echo", ok, json.dumps(stats["interactions"]))


# 8. Determinism: two grid runs with the same corpus and config produce
#    byte-identical result CSVs.
def test_acceptance_8_grid_determinism():
    cfg = SynthConfig(
        n_news=60, n_users=150, seed=4,
        audience_size={"L": 5, "E": 5, "C": 2},
        comments_per_news=1, words_per_news=8,
    )
    corpus, _ = generate(cfg)
    grid = ExperimentGrid(alphas=(0.5, 1.0), seeds=(0, 1), split_ratio=0.75)
    train_cfg = TrainConfig(epochs=6, batch_size=16, h_u=4, h_f=8)
    first = run_grid(corpus, grid, train_cfg, encoder_dim=64).to_csv()
    second = run_grid(corpus, grid, train_cfg, encoder_dim=64).to_csv()
    ok = first == second
    _report("8 grid determinism", ok)
