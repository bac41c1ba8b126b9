import pytest
from hypothesis import given
from hypothesis import strategies as st

from spacerank.corpus import (
    Observation,
    RatingEvent,
    ReviewDocument,
    binarize,
    build_profiles,
    load_ratings,
    load_reviews,
    ratings_to_observations,
    reviews_to_observations,
    user_mean,
)
from spacerank.errors import NoSuchUserError, ParseError, ValidationError


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadRatings:
    def test_movielens_line(self, tmp_path):
        path = write(tmp_path, "r.dat", "1::1193::5::978300760\n")
        assert load_ratings(path) == [RatingEvent(1, 1193, 5, 978300760)]

    def test_empty_file(self, tmp_path):
        assert load_ratings(write(tmp_path, "r.dat", "")) == []

    def test_file_order_preserved(self, tmp_path):
        path = write(tmp_path, "r.dat", "2::9::4::50\n1::7::3::10\n")
        events = load_ratings(path)
        assert [e.user_id for e in events] == [2, 1]

    def test_malformed_line_names_line_number(self, tmp_path):
        path = write(tmp_path, "r.dat", "1::2::3::4\n1::2::3\n")
        with pytest.raises(ParseError, match="2"):
            load_ratings(path)

    def test_rating_out_of_range(self, tmp_path):
        path = write(tmp_path, "r.dat", "1::2::6::4\n")
        with pytest.raises(ParseError):
            load_ratings(path)

    def test_duplicate_pair_rejected(self, tmp_path):
        path = write(tmp_path, "r.dat", "1::2::3::4\n1::2::5::9\n")
        with pytest.raises(ValidationError):
            load_ratings(path)

    def test_duplicate_pair_last_wins(self, tmp_path):
        path = write(tmp_path, "r.dat", "1::2::3::4\n1::2::5::9\n")
        events = load_ratings(path, on_duplicate="last")
        assert events == [RatingEvent(1, 2, 5, 9)]


class TestUserMean:
    def test_mean(self):
        events = [RatingEvent(73, i, r, i) for i, r in enumerate((3, 4, 3, 4, 3))]
        assert user_mean(events, 73) == pytest.approx(3.4)

    def test_single_rating(self):
        assert user_mean([RatingEvent(9, 1, 5, 0)], 9) == 5.0

    def test_absent_user(self):
        with pytest.raises(NoSuchUserError):
            user_mean([RatingEvent(1, 1, 3, 0)], 2)


class TestBinarize:
    def test_below_mean(self):
        assert binarize(3, 3.4) == 1

    def test_above_mean(self):
        assert binarize(4, 3.4) == 2

    def test_equal_is_above(self):
        assert binarize(3, 3.0) == 2

    @given(st.integers(1, 5), st.floats(1.0, 5.0))
    def test_image_and_monotonicity(self, rating, mean):
        b = binarize(rating, mean)
        assert b in (1, 2)
        if rating < 5:
            assert binarize(rating + 1, mean) >= b


class TestRatingsToObservations:
    def test_running_example(self):
        # user 73 averages 3.4, so a 3 binarizes to 1
        events = [RatingEvent(73, i, r, i) for i, r in enumerate((3, 4, 3, 4), start=1)]
        events.append(RatingEvent(73, 240, 3, 99))
        profiles = build_profiles(events)
        assert profiles[73].mean_rating == pytest.approx(3.4)
        obs = ratings_to_observations([RatingEvent(73, 240, 3, 99)], profiles)
        assert obs == [Observation(240, "user73_rating1")]

    def test_above_mean_token(self):
        profiles = build_profiles([RatingEvent(9, 1, 2, 0), RatingEvent(9, 2, 2, 1)])
        obs = ratings_to_observations([RatingEvent(9, 7, 5, 2)], profiles)
        assert obs == [Observation(7, "user9_rating2")]

    def test_empty(self):
        assert ratings_to_observations([], {}) == []

    def test_missing_profile(self):
        with pytest.raises(NoSuchUserError):
            ratings_to_observations([RatingEvent(1, 1, 3, 0)], {})

    def test_length_preserved_and_vocab_bounded(self):
        events = [RatingEvent(u, i, 1 + (u + i) % 5, i) for u in range(1, 8) for i in range(40)]
        profiles = build_profiles(events)
        obs = ratings_to_observations(events, profiles)
        assert len(obs) == len(events)
        assert len({o.token for o in obs}) <= 2 * len(profiles)


class TestReviewsToObservations:
    def test_duplicates_preserved(self):
        obs = reviews_to_observations([ReviewDocument(240, "The masterpiece, the")])
        assert obs == [
            Observation(240, "the"),
            Observation(240, "masterpiece"),
            Observation(240, "the"),
        ]

    def test_empty_text(self):
        assert reviews_to_observations([ReviewDocument(7, "")]) == []

    def test_alphanumeric_runs(self):
        # Hand-applying the tokenizer rule: split on every non-alphanumeric.
        obs = reviews_to_observations([ReviewDocument(7, "A-1 movie!")])
        assert [o.token for o in obs] == ["a", "1", "movie"]

    @given(st.lists(st.text(max_size=20), max_size=5))
    def test_concatenation_distributes(self, texts):
        per_doc = []
        for text in texts:
            per_doc.extend(reviews_to_observations([ReviewDocument(1, text)]))
        joined = reviews_to_observations([ReviewDocument(1, " ".join(texts))])
        assert [o.token for o in joined] == [o.token for o in per_doc]


class TestLoadReviews:
    def test_lines_concatenated_per_item(self, tmp_path):
        path = write(tmp_path, "rev.tsv", "7\tgreat film\n9\tmeh\n7\tloved it\n")
        docs = load_reviews(path)
        assert docs == [ReviewDocument(7, "great film loved it"), ReviewDocument(9, "meh")]

    def test_missing_tab(self, tmp_path):
        with pytest.raises(ParseError):
            load_reviews(write(tmp_path, "rev.tsv", "no tab here\n"))
