"""Command-line pipeline: split, train-space, recommend, evaluate, mcnemar.

Every file-producing command also writes a ``<artifact>.manifest.json``
recording the command, all resolved parameters, input digests, seed and
tool version, so any artifact can be reproduced from its manifest alone.

Exit codes: 0 success, 1 usage error, 2 data or format error,
3 the requested user cannot be ranked.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .baselines import KnnModel, build_popularity, knn_topk, popularity_topk
from .corpus import (
    build_profiles,
    load_ratings,
    load_reviews,
    ratings_to_observations,
    reviews_to_observations,
)
from .errors import CannotRankError, SpaceRankError
from .evaluate import contingency, evaluate_system, load_results, mcnemar_one_tailed, save_results
from .ranker import (
    RankerConfig,
    build_preferences,
    derive_seed,
    pair_stream,
    recommend_topk,
    score_items,
    train_hyperplane,
)
from .spaces import SpaceTrainConfig, build_vsm_space, load_space, save_space, train_space
from .splits import build_split, load_split, mark_counts, save_split, test_targets


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written next to every output artifact."""

    command: str
    parameters: dict
    inputs: dict  # path -> sha256 hex digest
    seed: int | None
    version: str = field(default=__version__)

    def write(self, artifact_path) -> Path:
        path = Path(f"{artifact_path}.manifest.json")
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "seed": self.seed,
            "version": self.version,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(command: str, args: argparse.Namespace, inputs: list, skip=("out", "func", "command")) -> RunManifest:
    params = {k: v for k, v in vars(args).items() if k not in skip and not callable(v)}
    return RunManifest(
        command=command,
        parameters=params,
        inputs={str(p): _digest(p) for p in inputs},
        seed=getattr(args, "seed", None),
    )


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# -- commands -----------------------------------------------------------------


def cmd_split(args) -> int:
    events = load_ratings(args.ratings)
    if args.every > max(len(events), 1):
        _warn(f"--every {args.every} exceeds the corpus size; validation and test are empty")
    counts = mark_counts(events, args.every)
    split = build_split(events, counts)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "split.tsv"
    save_split(split, out_path)
    _manifest("split", args, [args.ratings]).write(out_path)
    print(
        f"{len(events)} events -> {len(split.train)} train, "
        f"{len(split.validation)} validation, {len(split.test)} test -> {out_path}"
    )
    return 0


def _training_events(events, split_path, holdout):
    split = load_split(split_path, events)
    held = split.held_out(holdout)
    training = [e for e in events if (e.user_id, e.item_id) not in held]
    return split, training


def cmd_train_space(args) -> int:
    events = load_ratings(args.ratings)
    _, training = _training_events(events, args.split, args.holdout)
    profiles = build_profiles(training)
    inputs = [args.ratings, args.split]

    if args.mode == "vsm":
        if args.dims is not None:
            _warn("--dims is ignored for vsm spaces: dimensionality is the user count")
        if args.iters is not None:
            _warn("--iters is ignored for vsm spaces: nothing is trained iteratively")
        space = build_vsm_space(training, profiles)
    else:
        if args.dims is None:
            raise SpaceRankError("--dims is required for cf and cb spaces")
        if args.mode == "cb":
            if not args.reviews:
                raise SpaceRankError("--mode cb requires --reviews")
            observations = reviews_to_observations(load_reviews(args.reviews))
            iterations = args.iters if args.iters is not None else 10
            inputs.append(args.reviews)
        else:
            observations = ratings_to_observations(training, profiles)
            iterations = args.iters if args.iters is not None else 20
        config = SpaceTrainConfig(
            dimensions=args.dims,
            iterations=iterations,
            alpha0=args.alpha,
            seed=args.seed,
            workers=args.workers,
        )
        space = train_space(observations, config, provenance=args.mode)
        args.iters = iterations

    save_space(space, args.out)
    _manifest("train-space", args, inputs).write(args.out)
    print(f"{args.mode} space: {len(space)} items x {space.dimensions} dims -> {args.out}")
    return 0


def _user_ranker_topk(space, user_events, rated_items, args, user_id, k):
    config = RankerConfig(
        phi_i=args.phi_i, phi_t=args.phi_t, phi_d=args.phi_d,
        alpha0=args.alpha, seed=derive_seed(args.seed, user_id),
    )
    triples = build_preferences(user_events, space, config.phi_t)
    pairs = pair_stream(triples, config.phi_i, config.phi_d, config.seed)
    model = train_hyperplane(pairs, space, config, user_id=user_id)
    return model, recommend_topk(model, space, rated_items, k)


def cmd_recommend(args) -> int:
    space = load_space(args.space)
    events = load_ratings(args.ratings)
    _, training = _training_events(events, args.split, "test")
    user_events = [e for e in training if e.user_id == args.user]
    if not user_events:
        raise CannotRankError(f"user {args.user} has no training ratings")
    rated = {e.item_id for e in user_events}
    model, top = _user_ranker_topk(space, user_events, rated, args, args.user, args.k)
    scores = score_items(model, space)
    for item_id in top:
        print(f"{item_id}\t{scores[item_id]!r}")
    return 0


# Shared state for forked evaluation workers; set before the pool starts.
_DS_WORKER_STATE: dict = {}


def _ds_topk_worker(user_id):
    state = _DS_WORKER_STATE
    try:
        _, top = _user_ranker_topk(
            state["space"], state["events_by_user"][user_id],
            state["rated_by_user"][user_id], state["args"], user_id, state["k"],
        )
        return user_id, top
    except CannotRankError:
        return user_id, None


def cmd_evaluate(args) -> int:
    events = load_ratings(args.ratings)
    split, training = _training_events(events, args.split, args.holdout)
    targets = test_targets(split, events, which=args.holdout)
    if not targets:
        raise SpaceRankError(f"no rated-4-or-5 targets in the {args.holdout} set")
    rated_by_user: dict[int, set[int]] = {}
    events_by_user: dict[int, list] = {}
    for e in training:
        rated_by_user.setdefault(e.user_id, set()).add(e.item_id)
        events_by_user.setdefault(e.user_id, []).append(e)

    inputs = [args.ratings, args.split]
    if args.system == "pop":
        model = build_popularity(training)

        def provider(user_id):
            return popularity_topk(model, rated_by_user[user_id], args.k)

    elif args.system == "knn":
        model = KnnModel(training, build_profiles(training), args.k_neighbors)

        def provider(user_id):
            return knn_topk(model, user_id, rated_by_user.get(user_id, ()), args.k)

    else:  # ds
        if not args.space:
            raise SpaceRankError("--system ds requires --space")
        _check_space_provenance(args.space, args.holdout)
        space = load_space(args.space)
        inputs.append(args.space)

        if args.workers > 1:
            cache = _parallel_ds_topk(space, events_by_user, rated_by_user, args, targets)

            def provider(user_id):
                top = cache[user_id]
                if top is None:
                    raise CannotRankError(f"user {user_id} has no usable pairs")
                return top

        else:

            def provider(user_id):
                _, top = _user_ranker_topk(
                    space, events_by_user[user_id], rated_by_user[user_id],
                    args, user_id, args.k,
                )
                return top

    def guarded(user_id):
        if user_id not in rated_by_user:
            raise CannotRankError(f"user {user_id} has no training ratings")
        return provider(user_id)

    result = evaluate_system(guarded, targets, k=args.k)
    save_results(result.records, args.out, k=args.k)
    _manifest("evaluate", args, inputs).write(args.out)
    print(
        f"{args.system}: recall@{args.k} = {result.recall:.4f} "
        f"over {len(result.records)} targets ({len(result.skipped)} skipped) -> {args.out}"
    )
    return 0


def _parallel_ds_topk(space, events_by_user, rated_by_user, args, targets):
    from concurrent.futures import ProcessPoolExecutor
    from multiprocessing import get_context

    users = sorted({u for u, _ in targets if u in rated_by_user})
    _DS_WORKER_STATE.update(
        space=space, events_by_user=events_by_user,
        rated_by_user=rated_by_user, args=args, k=args.k,
    )
    try:
        context = get_context("fork")
    except ValueError:
        _warn("fork start method unavailable; evaluating on a single worker")
        return {u: _ds_topk_worker(u)[1] for u in users}
    with ProcessPoolExecutor(max_workers=args.workers, mp_context=context) as pool:
        return dict(pool.map(_ds_topk_worker, users, chunksize=16))


def _check_space_provenance(space_path, holdout) -> None:
    manifest_path = Path(f"{space_path}.manifest.json")
    if not manifest_path.exists():
        _warn(f"no manifest next to {space_path}; cannot verify its holdout provenance")
        return
    recorded = json.loads(manifest_path.read_text(encoding="utf-8"))
    trained_holdout = recorded.get("parameters", {}).get("holdout")
    if trained_holdout != holdout:
        raise SpaceRankError(
            f"space {space_path} was trained with holdout={trained_holdout!r} but this "
            f"evaluation uses holdout={holdout!r}; retrain the space or change --holdout"
        )


def cmd_mcnemar(args) -> int:
    records_a = load_results(args.results_a)
    records_b = load_results(args.results_b)
    try:
        table = contingency(records_a, records_b)
    except ValueError as exc:
        raise SpaceRankError(str(exc)) from None
    print(f"targets: {table.total}")
    print(f"  both hit:      {table.n11}")
    print(f"  only A hit:    {table.n10}")
    print(f"  only B hit:    {table.n01}")
    print(f"  neither hit:   {table.n00}")
    p_a = mcnemar_one_tailed(table)
    swapped = type(table)(table.n00, table.n10, table.n01, table.n11)
    p_b = mcnemar_one_tailed(swapped)
    print(f"p(A beats B) = {p_a:.6g}")
    print(f"p(B beats A) = {p_b:.6g}")
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spacerank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spacerank {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="sample validation/test sets from a ratings file")
    p.add_argument("--ratings", required=True)
    p.add_argument("--every", type=int, default=25, help="mark every Nth rating (default 25)")
    p.add_argument("--out", required=True, help="output directory for split.tsv")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train-space", help="learn an item space from ratings or reviews")
    p.add_argument("--mode", choices=("cf", "cb", "vsm"), required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--reviews", help="reviews file (required for --mode cb)")
    p.add_argument("--split", required=True)
    p.add_argument("--holdout", choices=("test", "validation"), default="test")
    p.add_argument("--dims", type=int)
    p.add_argument("--iters", type=int, help="training passes (default: 20 cf, 10 cb)")
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="space file to write")
    p.set_defaults(func=cmd_train_space)

    p = sub.add_parser("recommend", help="top-k recommendations for one user")
    p.add_argument("--space", required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--user", type=int, required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--phi-t", default=5, type=lambda s: s if s == "all" else int(s))
    p.add_argument("--phi-d", type=float, default=20.0)
    p.add_argument("--phi-i", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("evaluate", help="recall@k of one system over held-out targets")
    p.add_argument("--system", choices=("ds", "pop", "knn"), required=True)
    p.add_argument("--space", help="space file (required for --system ds)")
    p.add_argument("--ratings", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--holdout", choices=("test", "validation"), default="test")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--k-neighbors", type=int, default=60, help="knn neighbourhood size")
    p.add_argument("--phi-t", default=5, type=lambda s: s if s == "all" else int(s))
    p.add_argument("--phi-d", type=float, default=20.0)
    p.add_argument("--phi-i", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="per-target results file to write")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("mcnemar", help="paired exact significance test of two results files")
    p.add_argument("results_a")
    p.add_argument("results_b")
    p.set_defaults(func=cmd_mcnemar)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except CannotRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SpaceRankError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
