"""Benchmark informed sampling and pruning against the plain planner.

Runs both modes with identical seeds and reports final costs, accepted
vertex counts, and the vertex count at which the informed run first matched
the plain run's final cost.

Usage: python scripts/informed_comparison.py [scenario] [--seeds N]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from uniplan.planner import build_tree
from uniplan.world import load_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scenario", nargs="?",
                        default="scenarios/informed_corridor.json")
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--heuristic", choices=["zero", "euclidean"],
                        default="euclidean")
    args = parser.parse_args()

    problem = load_scenario(args.scenario)
    for seed in range(args.seeds):
        runs = {}
        for mode in ("off", args.heuristic):
            p = replace(problem, planner=replace(problem.planner,
                                                 informed=mode, seed=seed))
            runs[mode] = build_tree(p)
        off, inf = runs["off"], runs[args.heuristic]
        c_off = off.cost_to_come(off.goal_index) if off.goal_index is not None else np.inf
        c_inf = inf.cost_to_come(inf.goal_index) if inf.goal_index is not None else np.inf
        costs = np.array(inf.iteration_costs)
        verts = np.array(inf.iteration_vertices)
        hit = np.flatnonzero(costs <= c_off + 1e-12)
        at = verts[hit[0]] if len(hit) else None
        print(f"seed {seed}: plain cost {c_off:.4f} ({off.alive_count} vertices) | "
              f"informed cost {c_inf:.4f} ({inf.alive_count} vertices, "
              f"{inf.rejected} rejected, matched plain at {at} vertices)")


if __name__ == "__main__":
    main()
