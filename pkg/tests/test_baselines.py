import math

import pytest

from spacerank.baselines import (
    KnnModel,
    build_popularity,
    knn_scores,
    knn_topk,
    popularity_topk,
)
from spacerank.corpus import RatingEvent, build_profiles
from spacerank.errors import NoSuchUserError


def events_of(spec):
    """spec: {user: [(item, rating), ...]}"""
    out = []
    for user, pairs in spec.items():
        for t, (item, rating) in enumerate(pairs):
            out.append(RatingEvent(user, item, rating, t))
    return out


class TestPopularity:
    def test_count_order(self):
        events = events_of({1: [(10, 5), (11, 4)], 2: [(10, 3)], 3: [(10, 1)]})
        model = build_popularity(events)
        assert model.counts == {10: 3, 11: 1}
        assert popularity_topk(model, set(), 1) == [10]

    def test_all_counts_equal_ascending_ids(self):
        events = events_of({1: [(9, 5)], 2: [(4, 5)], 3: [(7, 5)]})
        assert popularity_topk(build_popularity(events), set(), 3) == [4, 7, 9]

    def test_exclude_top(self):
        events = events_of({1: [(10, 5), (11, 4)], 2: [(10, 3)]})
        assert popularity_topk(build_popularity(events), {10}, 1) == [11]

    def test_user_independence(self):
        events = events_of({1: [(10, 5)], 2: [(11, 2), (12, 4)]})
        model = build_popularity(events)
        assert popularity_topk(model, set(), 5) == popularity_topk(model, set(), 5)


class TestKnn:
    def test_identical_users_similarity_one(self):
        events = events_of({1: [(10, 4), (11, 4)], 2: [(10, 4), (11, 4)]})
        model = KnnModel(events, build_profiles(events), k=1)
        scores = knn_scores(model, 1)
        assert scores[10] == pytest.approx(1.0)
        assert scores[11] == pytest.approx(1.0)

    def test_orthogonal_target_all_zero(self):
        events = events_of({1: [(10, 4)], 2: [(11, 4)], 3: [(12, 4)]})
        model = KnnModel(events, build_profiles(events), k=2)
        assert set(knn_scores(model, 1).values()) == {0.0}

    def test_three_user_toy(self):
        # u1 and u2 share {A, B}; u3 is disjoint. With uniform ratings the
        # cosine is 2/sqrt(2*3), so u2 is the single nearest neighbour and
        # C is the top unrated recommendation.
        A, B, C, D = 100, 101, 102, 103
        events = events_of({
            1: [(A, 4), (B, 4)],
            2: [(A, 4), (B, 4), (C, 4)],
            3: [(D, 4)],
        })
        model = KnnModel(events, build_profiles(events), k=1)
        scores = knn_scores(model, 1)
        assert scores[C] == pytest.approx(2 / math.sqrt(6))
        assert knn_topk(model, 1, {A, B}, 1) == [C]

    def test_unknown_user(self):
        events = events_of({1: [(10, 4)]})
        model = KnnModel(events, build_profiles(events), k=1)
        with pytest.raises(NoSuchUserError):
            knn_scores(model, 99)

    def test_neighbourhood_tie_broken_by_user_id(self):
        # users 2 and 3 are equally similar to user 1; k=1 must pick user 2,
        # whose extra item then gets the only nonzero unrated score
        events = events_of({
            1: [(10, 4)],
            3: [(10, 4), (31, 4)],
            2: [(10, 4), (21, 4)],
        })
        model = KnnModel(events, build_profiles(events), k=1)
        scores = knn_scores(model, 1)
        assert scores[21] > 0 and scores[31] == 0
