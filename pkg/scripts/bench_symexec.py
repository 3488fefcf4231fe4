#!/usr/bin/env python3
"""Symbolic execution benchmark on the bundled loop program.

Sweeps the fuel bound on the 3-way branching loop and reports explored
state counts, solver query statistics, and wall time per fuel level.
"""

from __future__ import annotations

import argparse
import shutil
import tempfile
import time
from pathlib import Path

from fixlog import engine, pipeline, smt
from fixlog.corpus import data_path


def bench(dataset: str, fuels: list[int], workers: int) -> None:
    source = data_path("symexec.fxl").read_text(encoding="utf-8")
    base = data_path(dataset)
    print(f"dataset: {dataset} workers={workers}")
    for fuel in fuels:
        with tempfile.TemporaryDirectory() as td:
            d = Path(td) / "facts"
            shutil.copytree(base, d)
            (d / "init_fuel.tsv").write_text(f"{fuel}\n", encoding="utf-8")
            context = smt.SmtContext()
            t0 = time.perf_counter()
            res = pipeline.run(source, fact_dirs=(str(d),), workers=workers,
                               smt_context=context)
            dt = time.perf_counter() - t0
            reach = len(engine.dump_lines(res.prep.store, res.db, "reach"))
            failed = len(engine.dump_lines(res.prep.store, res.db,
                                           "failed_assert"))
            print(f"fuel={fuel} reach={reach} failed_assert={failed} "
                  f"sat_queries={context.misses} cache_hits={context.hits} "
                  f"time={dt:.2f}s")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", default="symexec_fork3")
    ap.add_argument("--fuel", type=int, nargs="+",
                    default=[2, 4, 6, 8])
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    bench(args.dataset, args.fuel, args.workers)


if __name__ == "__main__":
    main()
