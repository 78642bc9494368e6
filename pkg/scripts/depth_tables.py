"""Depth before and after each structured pass, next to the closed-form target."""
import argparse
from dataclasses import dataclass

import numpy as np

from qparallel.circuit import Circuit, ControlledU, SymmetricPhase, schedule_greedy
from qparallel.generators import gen_qft, gen_random, random_unitary
from qparallel.passes import (
    clog2,
    commuting_fanin_parallelize,
    diag_compress,
    diag_fanin_parallelize,
    fanout_parallelize,
)


@dataclass
class Config:
    max_n: int = 16
    seed: int = 0


def table(title, rows):
    print(f"\n{title}")
    print(f"{'n':>4} {'serial':>7} {'after':>6} {'target':>7} {'anc':>5}")
    for n, before, after, target, anc in rows:
        print(f"{n:>4} {before:>7} {after:>6} {target:>7} {anc:>5}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = Config(a.max_n, a.seed)
    rng = np.random.default_rng(cfg.seed)
    sizes = [n for n in (1, 2, 3, 4, 5, 8, 16, 32) if n <= cfg.max_n]

    table("QFT greedy schedule (target 2n-1)",
          [(n, len(gen_qft(n).gates), schedule_greedy(gen_qft(n)).depth, 2 * n - 1, 0) for n in sizes])

    rows = []
    for n in sizes:
        c = Circuit(n + 1, 0, [ControlledU(0, i + 1, random_unitary(2, rng)) for i in range(n)])
        r = fanout_parallelize(c)
        rows.append((n, schedule_greedy(c).depth, r.depth, 2 * clog2(n) + 1, r.ancillae_used))
    table("fan-out, one control (target 2*ceil(log2 n)+1)", rows)

    rows = []
    for n in sizes:
        c = Circuit(n + 1, 0, [SymmetricPhase(0, i + 1, rng.uniform(0, 6)) for i in range(n)])
        r = diag_fanin_parallelize(c)
        rows.append((n, schedule_greedy(c).depth, r.depth, 2 * clog2(n) + 1, r.ancillae_used))
    table("diagonal fan-in, one shared qubit (target 2*ceil(log2 n)+1)", rows)

    rows = []
    for n in sizes:
        c = gen_random("controlled-commuting", n + 1, n, seed=cfg.seed + n)
        r = commuting_fanin_parallelize(c)
        rows.append((n, schedule_greedy(c).depth, r.depth, 2 * clog2(n) + 3, r.ancillae_used))
    table("commuting fan-in, one target (target 2*ceil(log2 n)+3)", rows)

    rows = []
    for n in sizes:
        if n < 2:
            continue
        c = gen_random("diagonal-2q", n, 4 * n * n, seed=cfg.seed + n)
        r, lg = diag_compress(c), diag_compress(c, log_depth=True)
        rows.append((n, schedule_greedy(c).depth, r.depth, r.claimed_depth_bound, 0))
        rows.append((n, schedule_greedy(c).depth, lg.depth, lg.claimed_depth_bound, lg.ancillae_used))
    table("diagonal compression, 4n^2 gates (packed row, then fan-out row)", rows)


if __name__ == "__main__":
    main()
