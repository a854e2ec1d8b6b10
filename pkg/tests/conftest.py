import pytest

from echoweight.corpus import Corpus, InteractionEvent, NewsArticle, UserRecord


def make_network_corpus() -> Corpus:
    """The worked 11-user / 6-news example: 1 lurker, 3 engagers, 7
    contributors; news 'b' is retweeted by 1 lurker, 1 engager, and 2
    contributors, so its group-weighted count is 1.01."""
    users = [UserRecord("u01", 1, 100)]  # rate 0.01 -> lurker
    users += [UserRecord(f"u{i:02d}", 10, 100) for i in (2, 3, 4)]  # 0.1 -> engager
    users += [UserRecord(f"u{i:02d}", 100, 100) for i in range(5, 12)]  # 1.0 -> contributor
    news = [NewsArticle(nid, f"story about {nid}", label)
            for nid, label in zip("abcdef", (0, 1, 0, 1, 0, 1))]
    edge_map = {
        "a": ["u05", "u06", "u07"],
        "b": ["u01", "u02", "u05", "u06"],
        "c": ["u07"],
        "d": ["u08", "u09"],
        "e": ["u03", "u10"],
        "f": ["u11"],
    }
    events = [InteractionEvent(uid, nid) for nid, uids in edge_map.items() for uid in uids]
    comments = {a.id: [f"comment on {a.id}"] for a in news}
    return Corpus(news=news, comments=comments, users=users,
                  events=sorted(events, key=lambda e: (e.news_id, e.user_id)))


@pytest.fixture
def network_corpus() -> Corpus:
    return make_network_corpus()
