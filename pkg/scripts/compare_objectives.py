"""Compare executed motion quality across cost objectives on one scenario.

For each seed and objective, builds a motion graph and executes it closed
loop, then reports per-seed and median path length and total turning.

Usage: python scripts/compare_objectives.py [scenario] [--seeds N] [--samples N]
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from uniplan.executor import execute
from uniplan.metrics import objective_distance
from uniplan.planner import build_tree
from uniplan.world import load_scenario


def run(problem, objective, seed):
    problem = replace(
        problem, planner=replace(problem.planner, objective=objective, seed=seed)
    )
    graph = build_tree(problem)
    if graph.goal_index is None:
        return None
    wd = objective_distance(objective, problem.planner.alpha,
                            problem.planner.beta, problem.planner.kappa)
    trajectory = execute(graph, problem.start, problem.world, wd,
                         problem.control, record_stride=10)
    return trajectory.path_length, trajectory.total_turning


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scenario", nargs="?",
                        default="scenarios/three_obstacles.json")
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--samples", type=int, default=None)
    args = parser.parse_args()

    problem = load_scenario(args.scenario)
    if args.samples is not None:
        problem = replace(problem, planner=replace(problem.planner,
                                                   samples=args.samples))
    for objective in ("euclidean", "euccos", "dualhead"):
        lengths, turnings = [], []
        for seed in range(args.seeds):
            result = run(problem, objective, seed)
            if result is None:
                print(f"{objective} seed {seed}: no path")
                continue
            lengths.append(result[0])
            turnings.append(result[1])
            print(f"{objective} seed {seed}: length {result[0]:.3f} "
                  f"turning {result[1]:.3f}")
        if lengths:
            print(f"== {objective}: median length {np.median(lengths):.3f} "
                  f"median turning {np.median(turnings):.3f}\n")


if __name__ == "__main__":
    main()
