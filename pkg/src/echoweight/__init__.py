"""Participation-inequality-aware fake news detection toolkit.

Categorizes social-media users into lurkers, engagers, and contributors,
re-weights user-news interaction evidence toward under-represented users,
and trains a deterministic classifier to measure the effect.
"""

from .corpus import (
    Corpus,
    CorpusError,
    InteractionEvent,
    InteractionMatrix,
    NewsArticle,
    ParseError,
    UserRecord,
    ValidationError,
    build_interaction_matrix,
    corpus_stats,
    load_corpus,
    save_corpus,
)
from .participation import (
    ParticipationProfile,
    Thresholds,
    UndefinedComposition,
    UserGroup,
    activity_rate,
    categorize_user,
    compute_profiles,
    group_composition,
)
from .weighting import (
    GroupCoefficients,
    GroupCounts,
    WeightVector,
    balanced_loss,
    batch_sample_weights,
    ce_loss,
    edge_reweight,
    news_weight,
    weight_vector,
)

__version__ = "0.1.0"
