#!/usr/bin/env python3
"""Transitive closure benchmark over random graphs.

Generates one graph, evaluates the closure at each requested worker
count, and prints wall times plus the speedup against one worker.  The
dump is compared across worker counts so a disagreement fails loudly.
"""

from __future__ import annotations

import argparse
import tempfile
import time
from dataclasses import dataclass

from fixlog import engine, pipeline
from fixlog.corpus import data_path, generate


@dataclass(frozen=True)
class BenchConfig:
    n: int = 200
    p: float = 0.1
    seed: int = 42
    workers: tuple[int, ...] = (1, 2, 4, 8)


def bench(cfg: BenchConfig) -> None:
    source = data_path("tc.fxl").read_text(encoding="utf-8")
    with tempfile.TemporaryDirectory() as td:
        generate.write_graph(td, cfg.n, cfg.p, cfg.seed)
        base_dump = None
        base_time = None
        print(f"graph: n={cfg.n} p={cfg.p} seed={cfg.seed}")
        for w in cfg.workers:
            t0 = time.perf_counter()
            res = pipeline.run(source, fact_dirs=(td,), workers=w)
            dt = time.perf_counter() - t0
            dump = engine.dump_lines(res.prep.store, res.db, "tc")
            if base_dump is None:
                base_dump, base_time = dump, dt
                print(f"workers={w} tc={len(dump)} time={dt:.2f}s")
            else:
                if dump != base_dump:
                    raise SystemExit(f"workers={w}: dump mismatch")
                print(f"workers={w} tc={len(dump)} time={dt:.2f}s "
                      f"speedup={base_time / dt:.2f}x")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4, 8])
    args = ap.parse_args()
    bench(BenchConfig(n=args.n, p=args.p, seed=args.seed,
                      workers=tuple(args.workers)))


if __name__ == "__main__":
    main()
