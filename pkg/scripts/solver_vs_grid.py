"""Cross-check find_all_gess against the brute-force grid search on random games."""

import argparse

import numpy as np

from groupess import GroupGame, GroupWeights, PayoffMatrix2, find_all_gess, grid_search_equilibria


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--games", type=int, default=200)
    ap.add_argument("--groups", type=int, default=2, choices=(1, 2, 3))
    ap.add_argument("--resolution", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    bad = 0
    for k in range(args.games):
        w = rng.uniform(0.05, 1, args.groups)
        w /= w.sum()
        w[-1] = 1 - w[:-1].sum()
        g = GroupGame(GroupWeights(tuple(w)), PayoffMatrix2(*rng.uniform(-1, 1, 4)))
        sol = [r.q for r in find_all_gess(g)]
        cl = grid_search_equilibria(g, args.resolution)
        tol = 2 * args.resolution
        ok = all(any(c.distance(q) <= tol for c in cl) for q in sol) and all(any(c.distance(q) <= tol for q in sol) for c in cl)
        if not ok:
            bad += 1
            print(f"game {k}: {g.payoff} alpha={np.round(g.alpha, 4)}")
            print("  solver:", [np.round(q, 4).tolist() for q in sol])
            print("  grid:  ", [np.round(c.profile.first, 4).tolist() for c in cl])
    print(f"{bad}/{args.games} disagreements")


if __name__ == "__main__":
    main()
