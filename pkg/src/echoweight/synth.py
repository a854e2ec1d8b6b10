"""Seeded synthetic corpora with a 90-9-1 population and a plantable
lurker-veracity signal, plus the naive re-weighting oracle.

The generator controls every latent draw, so tests can assert against
ground truth: group sizes follow largest-remainder rounding, activity
rates land strictly inside each group's interval, and the lurker signal s
makes lurker interactions label-informative (probability s on fake news,
s/10 on real ones) while engager/contributor interactions stay
label-neutral by default. The signal lives in interaction structure, not
text, so re-weighting gains are attributable to the interaction matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, InteractionEvent, NewsArticle, UserRecord
from .participation import ParticipationProfile, UserGroup
from .weighting import GroupCoefficients, WeightVector, vector_norm

GROUPS = ("L", "E", "C")


class SynthError(ValueError):
    """Infeasible generator configuration."""


@dataclass
class SynthConfig:
    n_news: int = 200
    n_users: int = 1000
    group_fractions: tuple[float, float, float] = (0.90, 0.09, 0.01)
    fake_fraction: float = 0.5
    # activity-rate interval per group; draws stay strictly inside
    rate_ranges: dict[str, tuple[float, float]] = field(
        default_factory=lambda: {"L": (0.0, 0.025), "E": (0.025, 0.15), "C": (0.15, 20.0)}
    )
    # per-exposed-pair interaction probability, keyed group -> (real, fake);
    # the lurker row is always overridden by lurker_signal: (s/10, s)
    interact_prob: dict[str, tuple[float, float]] = field(
        default_factory=lambda: {"E": (0.3, 0.3), "C": (0.7, 0.7)}
    )
    lurker_signal: float = 0.5
    # how many users of each group see a given news item; None = the whole
    # group, i.e. a Bernoulli draw for every (user, news) pair
    audience_size: dict[str, int] | None = None
    vocab_size: int = 500
    words_per_news: int = 40
    words_per_comment: int = 8
    comments_per_news: int = 3
    text_signal: float = 0.3
    seed: int = 0

    def resolved_probs(self) -> dict[str, tuple[float, float]]:
        s = self.lurker_signal
        probs = {"L": (s / 10.0, s)}
        probs.update({g: self.interact_prob.get(g, (0.0, 0.0)) for g in ("E", "C")})
        return probs

    def validate(self) -> None:
        if abs(sum(self.group_fractions) - 1.0) > 1e-9:
            raise SynthError("group_fractions must sum to 1")
        if not 0.0 <= self.lurker_signal <= 1.0:
            raise SynthError("lurker_signal must be in [0, 1]")
        if not 0.0 <= self.fake_fraction <= 1.0:
            raise SynthError("fake_fraction must be in [0, 1]")
        for g, (p_real, p_fake) in self.resolved_probs().items():
            if not (0.0 <= p_real <= 1.0 and 0.0 <= p_fake <= 1.0):
                raise SynthError(f"interaction probabilities for {g} outside [0, 1]")
        if min(self.n_news, self.n_users) < 1:
            raise SynthError("n_news and n_users must be positive")


def largest_remainder(fractions, total: int) -> list[int]:
    """Integer allocation of `total` by largest remainder; ties go to the
    earlier entry."""
    ideals = [f * total for f in fractions]
    counts = [int(math.floor(v)) for v in ideals]
    leftover = total - sum(counts)
    order = sorted(range(len(fractions)), key=lambda i: (-(ideals[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def _activity_record(rate: float, lo: float, hi: float, age: int) -> int:
    """Integer activity count whose realized rate stays in (lo, hi], or
    [0, hi] when lo == 0."""
    if lo == 0.0:
        return int(math.floor(rate * age))
    lo_count = int(math.floor(lo * age)) + 1
    hi_count = int(math.floor(hi * age))
    if lo_count > hi_count:
        raise SynthError(f"rate interval ({lo}, {hi}] unrealizable at age {age}")
    return min(max(int(round(rate * age)), lo_count), hi_count)


def generate(cfg: SynthConfig) -> tuple[Corpus, dict]:
    """Generate a corpus and its ground truth, fully determined by the seed."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    probs = cfg.resolved_probs()

    group_sizes = dict(zip(GROUPS, largest_remainder(cfg.group_fractions, cfg.n_users)))
    users: list[UserRecord] = []
    user_groups: dict[str, str] = {}
    group_members: dict[str, list[str]] = {g: [] for g in GROUPS}
    uid_width = len(str(cfg.n_users))
    i = 0
    for g in GROUPS:
        lo, hi = cfg.rate_ranges[g]
        for _ in range(group_sizes[g]):
            uid = f"u{i:0{uid_width}d}"
            i += 1
            age = int(rng.integers(120, 3651))
            u = rng.random()
            # lurkers draw in [lo, hi); the others in (lo, hi]
            rate = lo + (hi - lo) * (u if lo == 0.0 else 1.0 - u)
            count = _activity_record(rate, lo, hi, age)
            users.append(
                UserRecord(
                    user_id=uid, total_activity_count=count,
                    account_age_days=age, observable=True,
                )
            )
            user_groups[uid] = g
            group_members[g].append(uid)

    n_fake, n_real = largest_remainder((cfg.fake_fraction, 1.0 - cfg.fake_fraction), cfg.n_news)
    labels = np.array([1] * n_fake + [0] * n_real)
    labels = labels[rng.permutation(cfg.n_news)]

    shared_vocab = [f"w{k}" for k in range(cfg.vocab_size)]
    label_vocab = {
        0: [f"realword{k}" for k in range(max(cfg.vocab_size // 10, 1))],
        1: [f"fakeword{k}" for k in range(max(cfg.vocab_size // 10, 1))],
    }

    def draw_text(label: int, n_words: int) -> str:
        words = []
        for _ in range(n_words):
            if rng.random() < cfg.text_signal:
                pool = label_vocab[label]
            else:
                pool = shared_vocab
            words.append(pool[int(rng.integers(len(pool)))])
        return " ".join(words)

    nid_width = len(str(cfg.n_news))
    news: list[NewsArticle] = []
    comments: dict[str, list[str]] = {}
    for k in range(cfg.n_news):
        nid = f"n{k:0{nid_width}d}"
        label = int(labels[k])
        news.append(NewsArticle(id=nid, text=draw_text(label, cfg.words_per_news), label=label))
        comments[nid] = [
            draw_text(label, cfg.words_per_comment) for _ in range(cfg.comments_per_news)
        ]

    expected = 0.0
    for g in GROUPS:
        pool = group_sizes[g]
        k = pool if cfg.audience_size is None else min(cfg.audience_size.get(g, pool), pool)
        expected += cfg.n_news * k * max(probs[g])
    if expected == 0:
        raise SynthError("configuration yields zero expected interactions")

    events: list[InteractionEvent] = []
    edge_counts = {g: 0 for g in GROUPS}
    edge_counts_by_label = {(g, label): 0 for g in GROUPS for label in (0, 1)}
    for article in news:
        for g in GROUPS:
            members = group_members[g]
            if not members:
                continue
            if cfg.audience_size is None:
                exposed = members
            else:
                k = min(cfg.audience_size.get(g, len(members)), len(members))
                idx = rng.choice(len(members), size=k, replace=False)
                exposed = [members[j] for j in idx]
            p = probs[g][article.label]
            hits = np.flatnonzero(rng.random(len(exposed)) < p)
            for j in hits:
                events.append(InteractionEvent(user_id=exposed[j], news_id=article.id))
            edge_counts[g] += len(hits)
            edge_counts_by_label[(g, article.label)] += len(hits)

    corpus = Corpus(
        news=sorted(news, key=lambda a: a.id),
        comments=comments,
        users=sorted(users, key=lambda u: u.user_id),
        events=sorted(events, key=lambda e: (e.news_id, e.user_id)),
        dropped_events=0,
    )
    ground_truth = {
        "seed": cfg.seed,
        "group_sizes": group_sizes,
        "user_groups": user_groups,
        "news_labels": {a.id: a.label for a in corpus.news},
        "interactions_by_group": edge_counts,
        "interactions_by_group_label": {
            f"{g}/{label}": c for (g, label), c in edge_counts_by_label.items()
        },
        "n_events": len(events),
        "n_comments": sum(len(v) for v in comments.values()),
        "news_counts": {"fake": int(n_fake), "real": int(n_real)},
    }
    return corpus, ground_truth


def oracle_weights(
    corpus: Corpus,
    profiles: dict[str, ParticipationProfile],
    coeffs: GroupCoefficients = GroupCoefficients(),
    alpha: float = 1.0,
    norm_kind: str = "l2",
) -> WeightVector:
    """Reference per-news weights by naive double loop over all
    (news, user) pairs. Equivalence oracle for `weighting.weight_vector`."""
    news_ids = sorted(a.id for a in corpus.news)
    user_ids = sorted(u.user_id for u in corpus.users if u.observable)
    present = {(e.user_id, e.news_id) for e in corpus.events}
    values = []
    for nid in news_ids:
        counts = {UserGroup.LURKER: 0, UserGroup.ENGAGER: 0, UserGroup.CONTRIBUTOR: 0}
        for uid in user_ids:
            if (uid, nid) in present:
                counts[profiles[uid].group] += 1
        omega = (
            coeffs.lurker * counts[UserGroup.LURKER]
            + coeffs.engager * counts[UserGroup.ENGAGER]
        ) + coeffs.contributor * counts[UserGroup.CONTRIBUTOR]
        values.append(omega)
    return WeightVector(
        values=np.array(values),
        norm=vector_norm(values, norm_kind),
        alpha=alpha,
        norm_kind=norm_kind,
    )


def oracle_edge_matrix(
    corpus: Corpus,
    profiles: dict[str, ParticipationProfile],
    coeffs: GroupCoefficients = GroupCoefficients(),
    alpha: float = 1.0,
    norm_kind: str = "l2",
) -> np.ndarray:
    """Dense re-weighted matrix computed entry by entry from scratch."""
    wv = oracle_weights(corpus, profiles, coeffs, alpha, norm_kind)
    news_ids = sorted(a.id for a in corpus.news)
    user_ids = sorted(u.user_id for u in corpus.users if u.observable)
    present = {(e.user_id, e.news_id) for e in corpus.events}
    dense = np.zeros((len(news_ids), len(user_ids)))
    for i, nid in enumerate(news_ids):
        # one-element array power: scalar float ** and array ** can differ
        # by 1 ulp (libm pow vs numpy's sqrt fast path for alpha = 0.5),
        # so apply the same elementary operation as the production route
        factor = (np.array([1.0 + wv.values[i] / wv.norm]) ** alpha)[0]
        for j, uid in enumerate(user_ids):
            if (uid, nid) in present:
                dense[i, j] = 1.0 * factor
    return dense
