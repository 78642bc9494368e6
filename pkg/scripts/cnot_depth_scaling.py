"""Depth of the parallelized CNOT map as the register doubles.

Prints mean and max depth, ancilla count and the max-depth increment per
doubling for random CNOT circuits.
"""
import argparse
import time
from dataclasses import dataclass

import numpy as np

from qparallel.generators import gen_random
from qparallel.passes import cnot_parallelize
from qparallel.simulator import gf2_simulate


@dataclass
class Config:
    sizes: tuple = (4, 8, 16, 32)
    seeds: int = 50
    gates_per_qubit: int = 0  # 0 means n gates per qubit (n**2 total)
    check: bool = True


def run(cfg: Config) -> dict:
    rows = {}
    for n in cfg.sizes:
        count = n * (cfg.gates_per_qubit or n)
        depths, ancillae = [], []
        t0 = time.perf_counter()
        for seed in range(cfg.seeds):
            c = gen_random("cnot", n, count, seed=seed)
            r = cnot_parallelize(c)
            if cfg.check:
                ext, ref = gf2_simulate(r.circuit), gf2_simulate(c)
                mask = (1 << n) - 1
                assert all(ext.rows[i] & mask == ref.rows[i] for i in range(n))
                assert all(ext.rows[i] & mask == 0 for i in range(n, ext.n))
            depths.append(r.depth)
            ancillae.append(r.ancillae_used)
        rows[n] = dict(mean=float(np.mean(depths)), max=max(depths),
                       anc=max(ancillae), secs=time.perf_counter() - t0)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--gates-per-qubit", type=int, default=0)
    ap.add_argument("--no-check", action="store_true")
    a = ap.parse_args()
    cfg = Config(tuple(a.sizes), a.seeds, a.gates_per_qubit, not a.no_check)
    rows = run(cfg)
    print(f"{'n':>4} {'mean':>7} {'max':>5} {'step':>5} {'anc':>6} {'8n^2':>6} {'secs':>6}")
    prev = None
    for n, r in rows.items():
        step = "" if prev is None else r["max"] - prev
        print(f"{n:>4} {r['mean']:>7.1f} {r['max']:>5} {step!s:>5} {r['anc']:>6} {8 * n * n:>6} {r['secs']:>6.2f}")
        prev = r["max"]


if __name__ == "__main__":
    main()
