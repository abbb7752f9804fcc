"""Scaling measurements for the chain-prefix dynamic programs."""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from htnfpt.generators import gen_chains
from htnfpt.model import Executable
from htnfpt.ordergraph import min_chain_decomposition
from htnfpt.solvers.common import DEFAULT, SolverConfig
from htnfpt.solvers.gpow import reach_exec_gpow, verify_gpow


@dataclass
class ScalingRow:
    solver: str
    tasks: int
    seconds: float
    answer: bool
    variables: int


def _best_time(fn, repeats: int):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def measure_scaling(sizes=(20, 40, 80, 160), width: int = 2, seed: int = 0, repeats: int = 3,
                    cfg: SolverConfig = DEFAULT) -> list[ScalingRow]:
    rows = []
    for n in sizes:
        inst = gen_chains(n, width, seed + n)
        cd = min_chain_decomposition(inst.network)
        t, v = _best_time(lambda: verify_gpow(inst, cd, cfg), repeats)
        rows.append(ScalingRow("verify_gpow", n, t, v.answer, v.stats["variables"]))
        ex = inst.with_query(Executable(inst.network.labels))
        t, v = _best_time(lambda: reach_exec_gpow(ex, cd, cfg), repeats)
        rows.append(ScalingRow("exec_gpow", n, t, v.answer, v.stats["variables"]))
    return rows


def loglog_slope(rows: list[ScalingRow], solver: str) -> float:
    pts = [(math.log(r.tasks), math.log(r.seconds)) for r in rows if r.solver == solver]
    slope, _ = statistics.linear_regression([x for x, _ in pts], [y for _, y in pts])
    return slope


def write_csv(rows: list[ScalingRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["solver", "tasks", "seconds", "answer", "variables"])
        for r in rows:
            w.writerow([r.solver, r.tasks, f"{r.seconds:.6f}", "yes" if r.answer else "no", r.variables])


def plot(rows: list[ScalingRow], path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for solver in sorted({r.solver for r in rows}):
        pts = [r for r in rows if r.solver == solver]
        ax.loglog([r.tasks for r in pts], [r.seconds for r in pts], marker="o",
                  label=f"{solver} (slope {loglog_slope(rows, solver):.2f})")
    ax.set_xlabel("tasks")
    ax.set_ylabel("seconds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def scaling_report(out_dir, **kw) -> tuple[list[ScalingRow], Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = measure_scaling(**kw)
    csv_path, png_path = out / "scaling.csv", out / "scaling.png"
    write_csv(rows, csv_path)
    plot(rows, png_path)
    return rows, csv_path, png_path
