"""Measurement harness: enumeration timelines, delay spreads, rejection
decay across the run, and a with-replacement sampling baseline.

Timing uses the monotonic performance counter; medians and quartiles are
computed here so reports need no external stack.  All randomness comes
from seeded Rng sessions, so reported counts (not times) are
reproducible.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .engine import build_union_sets, compile_cq
from .mcucq import NOT_MC_UCQ, build_mcucq
from .queries import UCQ
from .shuffle import Rng, random_permutation
from .union_enum import UnionStats, union_random_permutation
from .values import Database


def baseline_sample_with_rejection(index, k: int, rng: Rng):
    """k distinct answers by repeated uniform access with dedup.

    Returns (answers in discovery order, total trials).  Trials grow like
    the coupon collector as k approaches the answer count; that growth is
    the cost this library's permutation avoids.
    """
    n = index.count()
    if k > n:
        raise ValueError(f"requested {k} distinct answers, only {n} exist")
    seen = set()
    out = []
    trials = 0
    while len(out) < k:
        trials += 1
        answer = index.access(rng.uniform_below(n))
        if answer not in seen:
            seen.add(answer)
            out.append(answer)
    return out, trials


def _quartiles(values: list[float]) -> tuple[float, float, float]:
    if not values:
        return (0.0, 0.0, 0.0)
    if len(values) == 1:
        v = values[0]
        return (v, v, v)
    q = statistics.quantiles(values, n=4, method="inclusive")
    return (q[0], q[1], q[2])


def _outliers(values: list[float]) -> int:
    if len(values) < 4:
        return 0
    q1, _, q3 = _quartiles(values)
    fence = q3 + 1.5 * (q3 - q1)
    return sum(1 for v in values if v > fence)


@dataclass
class BenchRow:
    mode: str
    percent: int
    answers: int
    preprocess_s: float
    enumerate_s: float
    delay_p25: float
    delay_p50: float
    delay_p75: float
    delay_outliers: float
    iterations: float
    rejections: float
    probes_per_answer: float


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    decile_rejections: list[float] = field(default_factory=list)
    decile_iterations: list[float] = field(default_factory=list)

    HEADER = (
        "mode\tpercent\tanswers\tpreprocess_s\tenumerate_s\t"
        "delay_p25\tdelay_p50\tdelay_p75\tdelay_outliers\t"
        "iterations\trejections\tprobes_per_answer"
    )

    def to_tsv(self) -> str:
        lines = [self.HEADER]
        for r in self.rows:
            lines.append(
                f"{r.mode}\t{r.percent}\t{r.answers}\t{r.preprocess_s:.6f}\t"
                f"{r.enumerate_s:.6f}\t{r.delay_p25:.9f}\t{r.delay_p50:.9f}\t"
                f"{r.delay_p75:.9f}\t{r.delay_outliers:.2f}\t{r.iterations:.2f}\t"
                f"{r.rejections:.2f}\t{r.probes_per_answer:.2f}"
            )
        if self.decile_rejections:
            lines.append("")
            lines.append("decile\titerations\trejections")
            for i, (it, rj) in enumerate(zip(self.decile_iterations, self.decile_rejections)):
                lines.append(f"{(i + 1) * 10}%\t{it:.2f}\t{rj:.2f}")
        return "\n".join(lines)


def decile_series(stats: UnionStats) -> tuple[list[float], list[float]]:
    """Iterations and rejections spent inside each tenth of the emissions."""
    marks = stats.emission_marks
    if not marks:
        return [0.0] * 10, [0.0] * 10
    n = len(marks)
    iters, rejs = [], []
    prev = (0, 0)
    for d in range(1, 11):
        upto = marks[max(0, (n * d) // 10 - 1)]
        iters.append(float(upto[0] - prev[0]))
        rejs.append(float(upto[1] - prev[1]))
        prev = upto
    return iters, rejs


def _build_plan(ucq: UCQ, db: Database, mode: str):
    """Pick the enumeration strategy; auto tries union random access and
    falls back to rejection-based union enumeration."""
    if len(ucq.disjuncts) == 1:
        return "cq", compile_cq(ucq.disjuncts[0], db).index
    if mode in ("auto", "mc-access"):
        mc = build_mcucq(ucq, db)
        if mc is not NOT_MC_UCQ:
            return "mc-access", mc
        if mode == "mc-access":
            raise ValueError("union is not structurally aligned; mc-access unavailable")
    return "union-enum", None


def bench_run(
    ucq: UCQ,
    db: Database,
    percents: list[int] | None = None,
    repeat: int = 1,
    seed: int = 0,
    mode: str = "auto",
) -> BenchReport:
    """Run the enumeration benchmark and aggregate over `repeat` runs.

    For each requested percentage of the answer count, a fresh session
    enumerates that many answers while per-emission delays are recorded.
    Union-enum runs also report rejection decay per emission decile,
    averaged over the repeats of the 100% run.
    """
    percents = percents or [10, 50, 100]
    master = Rng(seed)
    acc: dict[int, list[BenchRow]] = {p: [] for p in percents}
    deciles_it: list[list[float]] = []
    deciles_rj: list[list[float]] = []

    for _ in range(repeat):
        rng = master.spawn()
        t0 = time.perf_counter()
        kind, handle = _build_plan(ucq, db, mode)
        prep = time.perf_counter() - t0

        if kind == "union-enum":
            total = _union_size(ucq, db)
        else:
            total = handle.count()

        for percent in percents:
            session_rng = rng.spawn()
            if kind == "union-enum":
                sets = build_union_sets(ucq, db)
                stream, stats = union_random_permutation(sets, session_rng)
                probes0 = 0
            else:
                stream = random_permutation(handle, session_rng)
                stats = UnionStats()
                probes0 = _total_probes(handle)
            want = max(0, (total * percent) // 100)
            delays = []
            t1 = time.perf_counter()
            last = t1
            emitted = 0
            for _answer in stream:
                now = time.perf_counter()
                delays.append(now - last)
                last = now
                emitted += 1
                if emitted >= want:
                    break
            enum_s = time.perf_counter() - t1
            q1, q2, q3 = _quartiles(delays)
            probes = 0.0
            if kind != "union-enum" and emitted:
                probes = (_total_probes(handle) - probes0) / emitted
            acc[percent].append(
                BenchRow(
                    kind, percent, emitted, prep, enum_s, q1, q2, q3,
                    _outliers(delays), stats.iterations, stats.rejections, probes,
                )
            )
            if kind == "union-enum" and percent == max(percents) and percent == 100:
                it, rj = decile_series(stats)
                deciles_it.append(it)
                deciles_rj.append(rj)

    report = BenchReport()
    for percent in percents:
        rows = acc[percent]
        report.rows.append(
            BenchRow(
                rows[0].mode,
                percent,
                rows[0].answers,
                _mean(r.preprocess_s for r in rows),
                _mean(r.enumerate_s for r in rows),
                _mean(r.delay_p25 for r in rows),
                _mean(r.delay_p50 for r in rows),
                _mean(r.delay_p75 for r in rows),
                _mean(r.delay_outliers for r in rows),
                _mean(r.iterations for r in rows),
                _mean(r.rejections for r in rows),
                _mean(r.probes_per_answer for r in rows),
            )
        )
    if deciles_rj:
        report.decile_iterations = [_mean(col) for col in zip(*deciles_it)]
        report.decile_rejections = [_mean(col) for col in zip(*deciles_rj)]
    return report


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def _union_size(ucq: UCQ, db: Database) -> int:
    sets = build_union_sets(ucq, db)
    stream, _ = union_random_permutation(sets, Rng(0))
    return sum(1 for _ in stream)


def _total_probes(handle) -> int:
    if hasattr(handle, "counters"):
        return handle.counters.search_probes
    return sum(d.counters.search_probes for d in handle.disjuncts)
