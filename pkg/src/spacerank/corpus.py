"""Rating and review ingestion, user statistics, and observation streams.

Ratings arrive as ``UserID::MovieID::Rating::Timestamp`` lines; reviews as
``item_id<TAB>text`` lines. Both are turned into a flat stream of
(item_id, token) observations that the embedding trainer consumes:
a rating becomes a single token ``user{uid}_rating{1|2}`` after binarizing
against the user's mean, and review text becomes one token per word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NoSuchUserError, ParseError, ValidationError

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class RatingEvent:
    """One (user, item, rating, timestamp) interaction on a 1-5 scale."""

    user_id: int
    item_id: int
    rating: int
    timestamp: int


@dataclass(frozen=True)
class UserProfile:
    """Per-user statistics over the training portion of the corpus."""

    user_id: int
    mean_rating: float
    rating_count: int


@dataclass(frozen=True)
class ReviewDocument:
    """Concatenated review text for one item, stripped of ratings and usernames."""

    item_id: int
    text: str


@dataclass(frozen=True)
class Observation:
    """One (item_id, token) training pair."""

    item_id: int
    token: str


def load_ratings(path, on_duplicate: str = "error") -> list[RatingEvent]:
    """Parse a ``::``-separated ratings file into events, in file order.

    A malformed line raises :class:`ParseError` naming the line number. A
    repeated (user, item) pair raises :class:`ValidationError` by default;
    with ``on_duplicate="last"`` the later event silently wins instead.
    """
    if on_duplicate not in ("error", "last"):
        raise ValueError(f"on_duplicate must be 'error' or 'last', got {on_duplicate!r}")
    events: list[RatingEvent] = []
    position: dict[tuple[int, int], int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("::")
            if len(parts) != 4:
                raise ParseError(path, line_no, f"expected 4 '::'-separated fields, got {len(parts)}")
            try:
                user_id, item_id, rating, ts = (int(p) for p in parts)
            except ValueError:
                raise ParseError(path, line_no, f"non-integer field in {line!r}") from None
            if not 1 <= rating <= 5:
                raise ParseError(path, line_no, f"rating {rating} outside [1,5]")
            event = RatingEvent(user_id, item_id, rating, ts)
            key = (user_id, item_id)
            if key in position:
                if on_duplicate == "error":
                    raise ValidationError(
                        f"{path}:{line_no}: duplicate rating for user {user_id}, item {item_id}"
                    )
                events[position[key]] = event
            else:
                position[key] = len(events)
                events.append(event)
    return events


def load_reviews(path) -> list[ReviewDocument]:
    """Parse an ``item_id<TAB>text`` reviews file, one document per item.

    Multiple lines for the same item are concatenated with a single space,
    preserving first-appearance order of items.
    """
    texts: dict[int, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            item_field, sep, text = line.partition("\t")
            if not sep:
                raise ParseError(path, line_no, "expected 'item_id<TAB>text'")
            try:
                item_id = int(item_field)
            except ValueError:
                raise ParseError(path, line_no, f"non-integer item id {item_field!r}") from None
            texts.setdefault(item_id, []).append(text)
    return [ReviewDocument(item_id, " ".join(parts)) for item_id, parts in texts.items()]


def user_mean(events: Sequence[RatingEvent], user_id: int) -> float:
    """Arithmetic mean of the user's raw 1-5 ratings in `events`."""
    ratings = [e.rating for e in events if e.user_id == user_id]
    if not ratings:
        raise NoSuchUserError(f"user {user_id} has no events")
    return sum(ratings) / len(ratings)


def build_profiles(events: Iterable[RatingEvent]) -> dict[int, UserProfile]:
    """UserProfile per user over the supplied (training) events."""
    totals: dict[int, list[int]] = {}
    for e in events:
        acc = totals.setdefault(e.user_id, [0, 0])
        acc[0] += e.rating
        acc[1] += 1
    return {
        uid: UserProfile(uid, total / count, count)
        for uid, (total, count) in totals.items()
    }


def binarize(rating: int, mean: float) -> int:
    """Map a raw rating to 1 (below the user's mean) or 2 (equal or above)."""
    return 2 if rating >= mean else 1


def ratings_to_observations(
    events: Iterable[RatingEvent], profiles: dict[int, UserProfile]
) -> list[Observation]:
    """One ``user{uid}_rating{1|2}`` observation per rating event."""
    out = []
    for e in events:
        profile = profiles.get(e.user_id)
        if profile is None:
            raise NoSuchUserError(f"no profile for user {e.user_id}")
        b = binarize(e.rating, profile.mean_rating)
        out.append(Observation(e.item_id, f"user{e.user_id}_rating{b}"))
    return out


def reviews_to_observations(docs: Iterable[ReviewDocument]) -> list[Observation]:
    """One observation per word occurrence, lowercased, duplicates preserved.

    A word is a maximal run of alphanumeric characters; punctuation and
    underscores split tokens. No stopword removal, no stemming.
    """
    out = []
    for doc in docs:
        for token in _WORD_RE.findall(doc.text.lower()):
            out.append(Observation(doc.item_id, token))
    return out
