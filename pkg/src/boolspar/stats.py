"""Seeded randomness and Hoeffding slack for Monte Carlo checks."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

HARNESS_DELTA = 1e-4


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for trial ``trial`` of a batch; independent of scheduling order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), trial])))


def hoeffding_slack(trials: int, delta: float) -> float:
    """Two-sided Hoeffding deviation for a mean of ``trials`` [0,1] draws at failure prob ``delta``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * trials))


def panel_slack(trials: int, cells: int, delta: float = HARNESS_DELTA) -> float:
    """Hoeffding slack with the failure budget split evenly over ``cells`` comparisons."""
    return hoeffding_slack(trials, delta / max(cells, 1))


@dataclass
class TailVerdict:
    """One empirical-vs-bound comparison: Pr[deg(M|rho) >= t] <= 2^-t."""

    monomial: str
    t: int
    bound: float
    empirical: float
    slack: float
    trials: int

    @property
    def ok(self) -> bool:
        return self.empirical <= self.bound + self.slack

    def as_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def tail_verdicts(counts: dict[str, list[int]], trials: int, slack: float) -> list[TailVerdict]:
    """``counts[name][t-1]`` = number of runs with deg(M|rho) >= t."""
    out = []
    for name, row in counts.items():
        for t, c in enumerate(row, start=1):
            out.append(TailVerdict(name, t, 2.0 ** -t, c / trials, slack, trials))
    return out


def split_trials(trials: int, chunks: int) -> list[tuple[int, int]]:
    chunks = max(1, min(chunks, trials))
    step, extra = divmod(trials, chunks)
    out, lo = [], 0
    for c in range(chunks):
        hi = lo + step + (c < extra)
        out.append((lo, hi))
        lo = hi
    return out


def map_trials(worker, payload, trials: int, threads: int = 1) -> list:
    """Run ``worker(payload, lo, hi)`` over trial ranges, in worker processes if threads > 1.

    Results come back in range order so merging is deterministic.
    """
    ranges = split_trials(trials, threads)
    if threads <= 1 or len(ranges) == 1:
        return [worker(payload, lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        futs = [ex.submit(worker, payload, lo, hi) for lo, hi in ranges]
        return [f.result() for f in futs]
