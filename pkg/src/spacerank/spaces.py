"""Learning, storing, and exporting user-independent item spaces.

Three kinds of space share one container: embeddings trained from rating
observations (``cf``), embeddings trained from review-text observations
(``cb``), and the normalized raw vector-space model where every user is a
dimension (``vsm``). Training streams observations one at a time in
shuffled order against a hierarchical softmax, updating item vectors and
tree-node weights by SGD with a linearly decaying learning rate.
"""

from __future__ import annotations

import multiprocessing
import sys
from dataclasses import dataclass
from multiprocessing import shared_memory
from typing import Iterable, Sequence

import numpy as np

from .corpus import Observation, RatingEvent, UserProfile, binarize
from .errors import FormatError
from .hsoftmax import build_huffman, build_vocabulary, hs_train_step, new_node_matrix

PROVENANCES = ("cf", "cb", "vsm")

# Learning-rate floor as a fraction of alpha0: the schedule is "linear to
# zero" but the very last steps keep a tiny positive rate.
ALPHA_FLOOR = 1e-4


class EmbeddingSpace:
    """Dense real vector per item, all of one dimensionality.

    Spaces produced by train_space additionally carry the trained
    hierarchical-softmax node matrix as `hs_nodes` (diagnostics only; it is
    not serialized and not part of equality).
    """

    hs_nodes: np.ndarray | None = None

    def __init__(self, dimensions, item_ids, matrix, provenance=None):
        matrix = np.asarray(matrix)
        if matrix.dtype not in (np.float32, np.float64):
            matrix = matrix.astype(np.float32)
        item_ids = np.asarray(item_ids, dtype=np.int64)
        if matrix.shape != (len(item_ids), dimensions):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match "
                f"{len(item_ids)} items x {dimensions} dimensions"
            )
        if provenance is not None and provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {provenance!r}")
        self.dimensions = int(dimensions)
        self.item_ids = item_ids
        self.matrix = matrix
        self.provenance = provenance
        self._row = {int(item): row for row, item in enumerate(item_ids)}

    def __len__(self) -> int:
        return len(self.item_ids)

    def __contains__(self, item_id: int) -> bool:
        return item_id in self._row

    def row(self, item_id: int) -> int:
        return self._row[item_id]

    def vector(self, item_id: int) -> np.ndarray:
        """The item's vector (a view into the matrix)."""
        return self.matrix[self._row[item_id]]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EmbeddingSpace)
            and self.dimensions == other.dimensions
            and self.provenance == other.provenance
            and np.array_equal(self.item_ids, other.item_ids)
            and np.array_equal(self.matrix, other.matrix)
        )


@dataclass(frozen=True)
class SpaceTrainConfig:
    dimensions: int
    iterations: int = 20
    alpha0: float = 0.025
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.dimensions < 1:
            raise ValueError(f"dimensions must be positive, got {self.dimensions}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.alpha0 <= 0:
            raise ValueError(f"alpha0 must be > 0, got {self.alpha0}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


def train_space(
    observations: Sequence[Observation],
    config: SpaceTrainConfig,
    provenance: str = "cf",
) -> EmbeddingSpace:
    """Learn item vectors by predicting each item's observations.

    Builds the vocabulary and Huffman tree, initializes item vectors
    uniformly in [-0.5/d, 0.5/d), then makes `config.iterations` passes over
    the observation stream. Each pass visits observations in a fresh seeded
    permutation and applies one hierarchical-softmax SGD step per
    observation; the learning rate decays linearly from alpha0 towards zero
    over all iterations x len(observations) steps, floored at alpha0 * 1e-4.

    With workers > 1 the permuted stream is sharded across forked worker
    processes that update the matrices in shared memory without locking;
    races are tolerated and the result is no longer bit-reproducible.
    workers=1 does everything in-process and is deterministic.
    """
    observations = list(observations)
    if not observations:
        raise ValueError("cannot train a space on an empty observation stream")

    vocab = build_vocabulary(observations)
    tree = build_huffman(vocab)

    item_ids = sorted({obs.item_id for obs in observations})
    row_of = {item: row for row, item in enumerate(item_ids)}
    d = config.dimensions

    rng = np.random.default_rng(config.seed)
    bound = 0.5 / d
    matrix = rng.uniform(-bound, bound, size=(len(item_ids), d)).astype(np.float32)
    nodes = new_node_matrix(tree, d)

    obs_rows = np.array([row_of[obs.item_id] for obs in observations], dtype=np.int64)
    obs_tokens = [obs.token for obs in observations]

    n = len(observations)
    total_steps = config.iterations * n
    alpha0 = config.alpha0
    alpha_min = alpha0 * ALPHA_FLOOR

    def train_slice(matrix, nodes, perm, pass_base, start, stop):
        for k in range(start, stop):
            i = perm[k]
            alpha = alpha0 * (1.0 - (pass_base + k) / total_steps)
            if alpha < alpha_min:
                alpha = alpha_min
            hs_train_step(matrix[obs_rows[i]], obs_tokens[i], vocab, tree, nodes, alpha)

    workers = config.workers
    if workers > 1 and "fork" not in multiprocessing.get_all_start_methods():
        print("warning: fork is unavailable; training on a single worker", file=sys.stderr)
        workers = 1

    if workers == 1:
        for iteration in range(config.iterations):
            perm = rng.permutation(n)
            train_slice(matrix, nodes, perm, iteration * n, 0, n)
        space = EmbeddingSpace(d, item_ids, matrix, provenance)
        space.hs_nodes = nodes
        return space

    # Hogwild across processes: matrices live in shared memory, each pass
    # forks workers over disjoint shards of the permutation. Forking means
    # the read-only structures (observations, tree) are inherited for free.
    context = multiprocessing.get_context("fork")
    shm_matrix = shared_memory.SharedMemory(create=True, size=matrix.nbytes)
    shm_nodes = shared_memory.SharedMemory(create=True, size=max(nodes.nbytes, 1))
    try:
        shared_matrix = np.ndarray(matrix.shape, matrix.dtype, buffer=shm_matrix.buf)
        shared_nodes = np.ndarray(nodes.shape, nodes.dtype, buffer=shm_nodes.buf)
        shared_matrix[:] = matrix
        shared_nodes[:] = nodes
        for iteration in range(config.iterations):
            perm = rng.permutation(n)
            bounds = np.linspace(0, n, workers + 1, dtype=int)
            procs = [
                context.Process(
                    target=train_slice,
                    args=(shared_matrix, shared_nodes, perm, iteration * n, lo, hi),
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for p in procs:
                p.start()
            for p in procs:
                p.join()
            if any(p.exitcode != 0 for p in procs):
                raise RuntimeError("a training worker exited abnormally")
        result = shared_matrix.copy()
        result_nodes = shared_nodes.copy()
    finally:
        shm_matrix.close()
        shm_matrix.unlink()
        shm_nodes.close()
        shm_nodes.unlink()
    space = EmbeddingSpace(d, item_ids, result, provenance)
    space.hs_nodes = result_nodes
    return space


def build_vsm_space(
    events: Iterable[RatingEvent],
    profiles: dict[int, UserProfile],
    item_ids: Sequence[int] | None = None,
) -> EmbeddingSpace:
    """Normalized vector space with one dimension per user.

    Each item's coordinate for user u is binarize(rating, u's mean) where u
    rated the item and 0 elsewhere; nonzero vectors are scaled to unit
    Euclidean norm. Items that nobody rated stay zero vectors. Pass
    `item_ids` to include such unrated items explicitly. Unlike trained
    spaces, the matrix is double precision so the unit norms are exact to
    working precision.
    """
    events = list(events)
    user_axis = {uid: axis for axis, uid in enumerate(sorted(profiles))}
    if item_ids is None:
        item_ids = sorted({e.item_id for e in events})
    else:
        item_ids = sorted(set(item_ids) | {e.item_id for e in events})
    row_of = {item: row for row, item in enumerate(item_ids)}
    matrix = np.zeros((len(item_ids), len(user_axis)), dtype=np.float64)
    for e in events:
        level = binarize(e.rating, profiles[e.user_id].mean_rating)
        matrix[row_of[e.item_id], user_axis[e.user_id]] = level
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    nonzero = norms[:, 0] > 0
    matrix[nonzero] /= norms[nonzero]
    return EmbeddingSpace(len(user_axis), item_ids, matrix, "vsm")


def _format_float(x: float) -> str:
    # repr of the exact float64 value round-trips; float32 -> float64 is exact.
    return repr(float(x))


def save_space(space: EmbeddingSpace, path) -> None:
    """Write ``item_count d provenance`` header plus one line per item."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = f"{len(space)} {space.dimensions}"
        if space.provenance is not None:
            header += f" {space.provenance}"
        fh.write(header + "\n")
        for item_id, vec in zip(space.item_ids, space.matrix):
            fh.write(f"{item_id} " + " ".join(_format_float(x) for x in vec) + "\n")


def load_space(path) -> EmbeddingSpace:
    """Read a space file back; inverse of save_space, bit-exact."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split()
        if len(header) not in (2, 3):
            raise FormatError(f"{path}: header must be 'item_count d [provenance]'")
        try:
            count, d = int(header[0]), int(header[1])
        except ValueError:
            raise FormatError(f"{path}: non-integer header fields {header!r}") from None
        provenance = header[2] if len(header) == 3 else None
        if provenance is not None and provenance not in PROVENANCES:
            raise FormatError(f"{path}: unknown provenance {provenance!r}")
        if d < 0 or count < 0:
            raise FormatError(f"{path}: negative header values")
        # vsm spaces are double precision (their unit-norm invariant needs
        # it); trained spaces are single. The text format loses nothing
        # either way.
        dtype = np.float64 if provenance == "vsm" else np.float32
        item_ids = np.empty(count, dtype=np.int64)
        matrix = np.empty((count, d), dtype=dtype)
        for row in range(count):
            line = fh.readline()
            if not line:
                raise FormatError(f"{path}: truncated after {row} of {count} items")
            parts = line.split()
            if len(parts) != d + 1:
                raise FormatError(
                    f"{path}: item line has {len(parts) - 1} values, expected {d}"
                )
            item_ids[row] = int(parts[0])
            matrix[row] = np.array([float(p) for p in parts[1:]], dtype=dtype)
        if fh.readline().strip():
            raise FormatError(f"{path}: trailing data after {count} items")
    return EmbeddingSpace(d, item_ids, matrix, provenance)


def export_vectors(space: EmbeddingSpace, path) -> None:
    """Write the space without its provenance tag for external projection tools."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(space)} {space.dimensions}\n")
        for item_id, vec in zip(space.item_ids, space.matrix):
            fh.write(f"{item_id} " + " ".join(_format_float(x) for x in vec) + "\n")
