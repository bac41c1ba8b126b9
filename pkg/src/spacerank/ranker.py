"""Per-user hyperplane rankers over a fixed item space.

A user's taste is modeled as a single direction vector w; the dot product
w . v projects every item vector to a one-dimensional preference score.
w is learned by SGD over pairs of items the user implicitly ranks
differently (unrated < disliked < liked): for a pair (a lower, b higher)
the pair error g = sigmoid(w.v_a - w.v_b) pushes w away from a and towards
b, with steps that are large for mis-ordered pairs and vanish for
well-ordered ones. Item vectors are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import RatingEvent, binarize
from .errors import CannotRankError, FormatError
from .hsoftmax import sigmoid
from .spaces import EmbeddingSpace, _format_float


def derive_seed(seed: int, user_id: int) -> int:
    """Stable per-user seed so users train identically regardless of
    evaluation order or worker count."""
    return int(np.random.SeedSequence([seed, user_id]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class RankerConfig:
    """Hyperparameters of the pairwise trainer.

    phi_i: passes over the pair set. phi_t: how many most-recent rated
    items to keep ("all" disables the trim). phi_d: downsampling divisor
    for rated-versus-unrated pairs; each such pair enters a given pass with
    probability 1/phi_d, so phi_d=1 means no downsampling.
    """

    phi_i: int = 10
    phi_t: int | str = 5
    phi_d: float = 20.0
    alpha0: float = 0.025
    seed: int = 1

    def __post_init__(self):
        if self.phi_i < 1:
            raise ValueError(f"phi_i must be >= 1, got {self.phi_i}")
        if self.phi_d < 1:
            raise ValueError(f"phi_d must be >= 1, got {self.phi_d}")
        if self.phi_t != "all" and (not isinstance(self.phi_t, int) or self.phi_t < 1):
            raise ValueError(f"phi_t must be a positive integer or 'all', got {self.phi_t!r}")
        if self.alpha0 <= 0:
            raise ValueError(f"alpha0 must be > 0, got {self.alpha0}")


@dataclass(frozen=True)
class PreferenceTriple:
    """An item with the user's preference level: 0 unrated, 1 below her
    mean, 2 at or above it. Timestamps only exist for rated items."""

    item_id: int
    level: int
    timestamp: int | None = None


@dataclass(frozen=True)
class HyperplaneModel:
    """A user's ranking direction; length matches the space dimensionality."""

    user_id: int | None
    w: np.ndarray


def build_preferences(
    user_events: Sequence[RatingEvent],
    space: EmbeddingSpace,
    phi_t: int | str = "all",
) -> list[PreferenceTriple]:
    """Preference levels for every item in the space, from one user's ratings.

    Ratings on items missing from the space are unusable. The user's mean
    is taken over all her supplied (training) events; only the phi_t most
    recently rated usable items keep their rated level, and every other
    space item becomes level 0.
    """
    if not user_events:
        raise CannotRankError("user has no training events")
    usable = [e for e in user_events if e.item_id in space]
    if not usable:
        raise CannotRankError("none of the user's rated items are in the space")
    mean = sum(e.rating for e in user_events) / len(user_events)
    usable.sort(key=lambda e: (e.timestamp, e.item_id))
    kept = usable if phi_t == "all" else usable[-int(phi_t):]
    triples = [
        PreferenceTriple(e.item_id, binarize(e.rating, mean), e.timestamp) for e in kept
    ]
    rated_ids = {e.item_id for e in kept}
    triples.extend(
        PreferenceTriple(int(item_id), 0)
        for item_id in space.item_ids
        if int(item_id) not in rated_ids
    )
    return triples


def pair_stream(
    triples: Sequence[PreferenceTriple],
    phi_i: int,
    phi_d: float,
    seed: int,
) -> list[tuple[int, int]]:
    """Training pairs (a, b) with level(a) < level(b), across phi_i passes.

    Each pass emits every differently-leveled pair once, shuffled: pairs of
    two rated items always, pairs of a rated and an unrated item with
    probability 1/phi_d. The concatenation over passes is the SGD stream.
    """
    by_level: dict[int, list[int]] = {0: [], 1: [], 2: []}
    for t in triples:
        by_level[t.level].append(t.item_id)

    rated_pairs = [(a, b) for a in by_level[1] for b in by_level[2]]
    downsampled_pairs = [(a, b) for a in by_level[0] for b in by_level[1] + by_level[2]]
    if not rated_pairs and not downsampled_pairs:
        raise CannotRankError("no differently-leveled item pairs to learn from")

    rng = np.random.default_rng(seed)
    include_p = 1.0 / phi_d
    stream: list[tuple[int, int]] = []
    for _ in range(phi_i):
        batch = list(rated_pairs)
        if downsampled_pairs:
            if phi_d == 1.0:
                batch.extend(downsampled_pairs)
            else:
                mask = rng.random(len(downsampled_pairs)) < include_p
                batch.extend(p for p, keep in zip(downsampled_pairs, mask) if keep)
        order = rng.permutation(len(batch))
        stream.extend(batch[i] for i in order)
    return stream


def train_hyperplane(
    pairs: Sequence[tuple[int, int]],
    space: EmbeddingSpace,
    config: RankerConfig,
    user_id: int | None = None,
) -> HyperplaneModel:
    """Fit the user's direction vector over a pair stream.

    Starts from a small random w and, for each pair (a, b), applies
    w += g * alpha * (v_b - v_a) with g = sigmoid(w.v_a - w.v_b). The
    learning rate decays linearly from alpha0 to 0 over the whole stream.
    """
    if not pairs:
        raise CannotRankError("empty pair stream")
    d = space.dimensions
    rows_a = np.fromiter((space.row(a) for a, _ in pairs), dtype=np.int64, count=len(pairs))
    rows_b = np.fromiter((space.row(b) for _, b in pairs), dtype=np.int64, count=len(pairs))

    rng = np.random.default_rng(config.seed)
    w = rng.uniform(-0.5 / d, 0.5 / d, size=d)

    matrix = space.matrix
    alpha0 = config.alpha0
    total = len(pairs)
    for k in range(total):
        va = matrix[rows_a[k]]
        vb = matrix[rows_b[k]]
        g = sigmoid(float(w @ va - w @ vb))
        step = g * alpha0 * (1.0 - k / total)
        w += step * (vb.astype(np.float64) - va)
    return HyperplaneModel(user_id, w)


def score_items(model: HyperplaneModel, space: EmbeddingSpace) -> dict[int, float]:
    """Project every item onto the user's direction: score = w . v."""
    if len(model.w) != space.dimensions:
        raise ValueError(
            f"hyperplane dimensionality {len(model.w)} != space {space.dimensions}"
        )
    scores = space.matrix @ model.w
    return {int(item): float(s) for item, s in zip(space.item_ids, scores)}


def top_k(
    item_ids: np.ndarray,
    scores: np.ndarray,
    exclude: Iterable[int],
    k: int,
) -> list[int]:
    """Highest-scoring items, ties by ascending item id, `exclude` removed.

    Returns fewer than k items when not enough candidates exist.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    item_ids = np.asarray(item_ids)
    exclude = set(exclude)
    if exclude:
        keep = np.fromiter((int(i) not in exclude for i in item_ids), dtype=bool, count=len(item_ids))
        item_ids, scores = item_ids[keep], scores[keep]
    order = np.lexsort((item_ids, -np.asarray(scores, dtype=np.float64)))
    return [int(i) for i in item_ids[order[:k]]]


def recommend_topk(
    model: HyperplaneModel,
    space: EmbeddingSpace,
    exclude: Iterable[int],
    k: int,
) -> list[int]:
    """The user's top-k recommendation list over the space."""
    if len(model.w) != space.dimensions:
        raise ValueError(
            f"hyperplane dimensionality {len(model.w)} != space {space.dimensions}"
        )
    return top_k(space.item_ids, space.matrix @ model.w, exclude, k)


def save_hyperplane(model: HyperplaneModel, path) -> None:
    """Diagnostic export: user id header, then the weight vector on one line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{model.user_id if model.user_id is not None else '-'}\n")
        fh.write(" ".join(_format_float(x) for x in model.w) + "\n")


def load_hyperplane(path) -> HyperplaneModel:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        user_id = None if header == "-" else int(header)
        line = fh.readline().split()
        if not line:
            raise FormatError(f"{path}: missing weight line")
        w = np.array([float(x) for x in line], dtype=np.float64)
    return HyperplaneModel(user_id, w)
