"""Pick a constant SPEG step size for a matrix-game preset by grid search.

Runs the plain SPEG oracle a few times per candidate step and reports the
mean and spread of the exact duality gap on the unregularized game.

    python benchmarks/calibrate_speg.py --preset game_speg --runs 16
"""

import argparse

import numpy as np

from pbssp.bench import build_problem, load_preset
from pbssp.core import eval_gap
from pbssp.oracles import speg_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="game_speg")
    ap.add_argument("--runs", type=int, default=16)
    ap.add_argument("--etas", default="0.2,0.35,0.5,0.7,1.0")
    args = ap.parse_args()
    cfg = load_preset(args.preset)
    prob, scored, _ = build_problem(cfg.problem, cfg.epsilon)
    iters, batch = cfg.oracle.get("iters", 500), cfg.oracle.get("batch", 10)
    print(f"{args.preset}: iters={iters} batch={batch} epsilon={cfg.epsilon}")
    best = None
    for eta in (float(e) for e in args.etas.split(",")):
        gaps = [eval_gap(scored, speg_solve(prob, iters, batch, eta, np.random.default_rng(s))).gap
                for s in range(args.runs)]
        mean = float(np.mean(gaps))
        print(f"eta={eta:<6g} mean gap={mean:.5f} sd={np.std(gaps):.5f}")
        if best is None or mean < best[1]:
            best = (eta, mean)
    print(f"best eta {best[0]:g}")


if __name__ == "__main__":
    main()
