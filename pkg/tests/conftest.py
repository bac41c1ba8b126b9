import os
from pathlib import Path

import pytest

from spacerank.minicorpus import generate_minicorpus

# Full-protocol tests need the MovieLens 1M ratings file, which is not
# redistributable with this package. Point SPACERANK_ML1M at ratings.dat
# (default: data/ml-1m/ratings.dat under the repo root).
ML1M_RATINGS = Path(
    os.environ.get("SPACERANK_ML1M", Path(__file__).resolve().parent.parent / "data/ml-1m/ratings.dat")
)

requires_ml1m = pytest.mark.skipif(
    not ML1M_RATINGS.exists(),
    reason=f"MovieLens 1M ratings not found at {ML1M_RATINGS} (set SPACERANK_ML1M)",
)

# The multi-minute end-to-end reproductions additionally want an explicit
# opt-in so a plain `pytest` run stays fast.
requires_full_run = pytest.mark.skipif(
    os.environ.get("SPACERANK_RUN_FULL") != "1",
    reason="long-running reproduction; set SPACERANK_RUN_FULL=1 to enable",
)


@pytest.fixture(scope="session")
def mini_corpus(tmp_path_factory):
    """Paths of the deterministic bundled mini corpus (ratings, reviews)."""
    out = tmp_path_factory.mktemp("minicorpus")
    return generate_minicorpus(out)
