"""The full evaluation protocol on the mini corpus, via the CLI surface.

split -> train all three spaces -> evaluate each system -> paired
significance. The same commands scale to MovieLens 1M (see demo 05).
"""

from pathlib import Path

from spacerank.cli import main
from spacerank.minicorpus import generate_minicorpus

out = Path("demo_out")
ratings, reviews = generate_minicorpus(out / "data")
run = lambda *args: main([str(a) for a in args]) == 0 or exit(1)

run("split", "--ratings", ratings, "--out", out)
split = out / "split.tsv"

run("train-space", "--mode", "cf", "--ratings", ratings, "--split", split,
    "--dims", 32, "--iters", 20, "--seed", 5, "--out", out / "cf.space")
run("train-space", "--mode", "cb", "--ratings", ratings, "--reviews", reviews,
    "--split", split, "--dims", 32, "--seed", 5, "--out", out / "cb.space")
run("train-space", "--mode", "vsm", "--ratings", ratings, "--split", split,
    "--out", out / "vsm.space")

print()
run("evaluate", "--system", "pop", "--ratings", ratings, "--split", split,
    "--out", out / "pop.results")
run("evaluate", "--system", "knn", "--ratings", ratings, "--split", split,
    "--k-neighbors", 20, "--out", out / "knn.results")
for mode in ("cf", "cb", "vsm"):
    run("evaluate", "--system", "ds", "--space", out / f"{mode}.space",
        "--ratings", ratings, "--split", split, "--phi-t", "all", "--phi-d", 5,
        "--out", out / f"ds_{mode}.results")

print("\nis the collaborative space significantly better than popularity?")
run("mcnemar", out / "ds_cf.results", out / "pop.results")

print("\n... and than the content space?")
run("mcnemar", out / "ds_cf.results", out / "ds_cb.results")
