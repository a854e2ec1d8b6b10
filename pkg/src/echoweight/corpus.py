"""Dataset wire format, validation, and the user-news interaction matrix.

A corpus is four line-delimited JSON files: news articles with binary
labels, per-news comments, a user registry with lifetime activity counts,
and repost events. Loading normalizes ordering (everything is sorted by
id) so downstream artifacts do not depend on file order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse


class CorpusError(Exception):
    """Base error for corpus loading and validation."""


class ParseError(CorpusError):
    """A record is not valid JSON or is missing/mistyping a field."""


class ValidationError(CorpusError):
    """Cross-record constraint violated (duplicate ids, dangling refs)."""


@dataclass(frozen=True)
class NewsArticle:
    id: str
    text: str
    label: int  # 0 = real, 1 = fake


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    total_activity_count: int
    account_age_days: int
    observable: bool = True


@dataclass(frozen=True)
class InteractionEvent:
    user_id: str
    news_id: str


@dataclass
class Corpus:
    """A validated dataset: news, comments keyed by news id, users, events.

    `events` is deduplicated and contains only events from observable,
    registered users; `dropped_events` counts what was filtered out.
    """

    news: list[NewsArticle]
    comments: dict[str, list[str]]
    users: list[UserRecord]
    events: list[InteractionEvent]
    dropped_events: int = 0

    def news_by_id(self) -> dict[str, NewsArticle]:
        return {a.id: a for a in self.news}


@dataclass
class InteractionMatrix:
    """Sparse news x user matrix. Rows/columns are in sorted-id order.

    Binary form stores exactly 1.0 per interaction; the edge-re-weighted
    form stores a common per-row factor (see `weighting.edge_reweight`).
    Columns exist only for observable users.
    """

    values: sparse.csr_matrix
    news_ids: list[str]
    user_ids: list[str]
    row_of: dict[str, int] = field(init=False)
    col_of: dict[str, int] = field(init=False)

    def __post_init__(self) -> None:
        self.row_of = {nid: i for i, nid in enumerate(self.news_ids)}
        self.col_of = {uid: j for j, uid in enumerate(self.user_ids)}

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def row(self, news_id: str) -> np.ndarray:
        return self.values.getrow(self.row_of[news_id]).toarray().ravel()

    def to_dense(self) -> np.ndarray:
        return self.values.toarray()


def _read_jsonl(path: str | Path) -> list[tuple[int, dict]]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ParseError(f"{path}:{lineno}: record is not an object")
            records.append((lineno, obj))
    return records


def _require(obj: dict, key: str, types, path, lineno):
    if key not in obj:
        raise ParseError(f"{path}:{lineno}: missing field '{key}'")
    value = obj[key]
    if not isinstance(value, types) or isinstance(value, bool) and bool not in (
        types if isinstance(types, tuple) else (types,)
    ):
        raise ParseError(f"{path}:{lineno}: field '{key}' has wrong type")
    return value


def load_corpus(
    news_path: str | Path,
    comments_path: str | Path,
    users_path: str | Path,
    interactions_path: str | Path,
) -> Corpus:
    """Load and validate the four-file wire format.

    Duplicate (user, news) events collapse to one. Events from users
    missing from the registry or marked unobservable are dropped and
    counted. Dangling news ids in comments or interactions are a hard
    validation error.
    """
    news: list[NewsArticle] = []
    seen_news: set[str] = set()
    for lineno, obj in _read_jsonl(news_path):
        nid = _require(obj, "id", str, news_path, lineno)
        text = _require(obj, "text", str, news_path, lineno)
        label = _require(obj, "label", int, news_path, lineno)
        if label not in (0, 1):
            raise ParseError(f"{news_path}:{lineno}: label must be 0 or 1")
        if nid in seen_news:
            raise ValidationError(f"duplicate news id: {nid!r}")
        seen_news.add(nid)
        news.append(NewsArticle(id=nid, text=text, label=label))

    comments: dict[str, list[str]] = {a.id: [] for a in news}
    dangling_comments = []
    for lineno, obj in _read_jsonl(comments_path):
        nid = _require(obj, "news_id", str, comments_path, lineno)
        text = _require(obj, "text", str, comments_path, lineno)
        if nid not in seen_news:
            dangling_comments.append(f"{comments_path}:{lineno}: {nid!r}")
            continue
        comments[nid].append(text)
    if dangling_comments:
        raise ValidationError(
            "comments reference unknown news ids:\n  " + "\n  ".join(dangling_comments)
        )

    users: list[UserRecord] = []
    seen_users: set[str] = set()
    for lineno, obj in _read_jsonl(users_path):
        uid = _require(obj, "user_id", str, users_path, lineno)
        count = _require(obj, "total_activity_count", int, users_path, lineno)
        age = _require(obj, "account_age_days", int, users_path, lineno)
        observable = _require(obj, "observable", bool, users_path, lineno)
        if count < 0:
            raise ParseError(f"{users_path}:{lineno}: total_activity_count < 0")
        if age < 1:
            raise ParseError(f"{users_path}:{lineno}: account_age_days < 1")
        if uid in seen_users:
            raise ValidationError(f"duplicate user id: {uid!r}")
        seen_users.add(uid)
        users.append(
            UserRecord(
                user_id=uid,
                total_activity_count=count,
                account_age_days=age,
                observable=observable,
            )
        )

    observable_users = {u.user_id for u in users if u.observable}
    events: set[tuple[str, str]] = set()
    dropped = 0
    dangling_events = []
    for lineno, obj in _read_jsonl(interactions_path):
        uid = _require(obj, "user_id", str, interactions_path, lineno)
        nid = _require(obj, "news_id", str, interactions_path, lineno)
        if nid not in seen_news:
            dangling_events.append(f"{interactions_path}:{lineno}: {nid!r}")
            continue
        if uid not in observable_users:
            dropped += 1
            continue
        events.add((uid, nid))
    if dangling_events:
        raise ValidationError(
            "interactions reference unknown news ids:\n  " + "\n  ".join(dangling_events)
        )

    news.sort(key=lambda a: a.id)
    users.sort(key=lambda u: u.user_id)
    event_list = [
        InteractionEvent(user_id=u, news_id=n)
        for u, n in sorted(events, key=lambda e: (e[1], e[0]))
    ]
    return Corpus(
        news=news,
        comments=comments,
        users=users,
        events=event_list,
        dropped_events=dropped,
    )


def save_corpus(corpus: Corpus, out_dir: str | Path) -> dict[str, Path]:
    """Write the four-file wire format under `out_dir`; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "news": out / "news.jsonl",
        "comments": out / "comments.jsonl",
        "users": out / "users.jsonl",
        "interactions": out / "interactions.jsonl",
    }
    with open(paths["news"], "w", encoding="utf-8") as fh:
        for a in sorted(corpus.news, key=lambda a: a.id):
            fh.write(json.dumps({"id": a.id, "text": a.text, "label": a.label}) + "\n")
    with open(paths["comments"], "w", encoding="utf-8") as fh:
        for nid in sorted(corpus.comments):
            for text in corpus.comments[nid]:
                fh.write(json.dumps({"news_id": nid, "text": text}) + "\n")
    with open(paths["users"], "w", encoding="utf-8") as fh:
        for u in sorted(corpus.users, key=lambda u: u.user_id):
            fh.write(
                json.dumps(
                    {
                        "user_id": u.user_id,
                        "total_activity_count": u.total_activity_count,
                        "account_age_days": u.account_age_days,
                        "observable": u.observable,
                    }
                )
                + "\n"
            )
    with open(paths["interactions"], "w", encoding="utf-8") as fh:
        for e in sorted(corpus.events, key=lambda e: (e.news_id, e.user_id)):
            fh.write(json.dumps({"user_id": e.user_id, "news_id": e.news_id}) + "\n")
    return paths


def build_interaction_matrix(corpus: Corpus) -> InteractionMatrix:
    """Binary news x user matrix: entry 1 iff a retained event exists.

    Row order is sorted news ids, column order sorted observable user ids.
    """
    news_ids = sorted(a.id for a in corpus.news)
    user_ids = sorted(u.user_id for u in corpus.users if u.observable)
    row_of = {nid: i for i, nid in enumerate(news_ids)}
    col_of = {uid: j for j, uid in enumerate(user_ids)}
    rows = [row_of[e.news_id] for e in corpus.events]
    cols = [col_of[e.user_id] for e in corpus.events]
    values = sparse.csr_matrix(
        (np.ones(len(rows)), (rows, cols)),
        shape=(len(news_ids), len(user_ids)),
    )
    # dedup happened at load; sum_duplicates would otherwise break binarity
    return InteractionMatrix(values=values, news_ids=news_ids, user_ids=user_ids)


def corpus_stats(corpus: Corpus, profiles: dict) -> dict:
    """Dataset statistics: news per label, interactions per user group,
    comment count, and the number of dropped events."""
    n_real = sum(1 for a in corpus.news if a.label == 0)
    n_fake = len(corpus.news) - n_real
    by_group = {"lurkers": 0, "engagers": 0, "contributors": 0}
    key = {"L": "lurkers", "E": "engagers", "C": "contributors"}
    for e in corpus.events:
        by_group[key[profiles[e.user_id].group.value]] += 1
    return {
        "news": {"real": n_real, "fake": n_fake, "total": len(corpus.news)},
        "interactions": {**by_group, "total": len(corpus.events)},
        "comments": sum(len(v) for v in corpus.comments.values()),
        "users": {
            "observable": sum(1 for u in corpus.users if u.observable),
            "total": len(corpus.users),
        },
        "dropped_events": corpus.dropped_events,
    }
