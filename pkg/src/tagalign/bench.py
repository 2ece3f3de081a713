"""Compare the aligners across sentence-length buckets.

Times the quadratic reference, the sparse matcher and the full hierarchical
dispatcher on identical inputs, after checking that all three agree on every
alignment length.  Runs are strictly serial, one algorithm at a time, so the
timings do not interfere.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .align import (
    IDENTITY,
    align_hierarchical,
    lcs_dp_oracle,
    lcs_hunt_szymanski,
)
from .core import TokenSequence
from .genparse import ParsedPrediction

DEFAULT_EDGES = (0, 60, 100, 200)

ALGO_NAIVE = "naive_dp"
ALGO_SPARSE = "hunt_szymanski"
ALGO_HIERARCHICAL = "hierarchical"


@dataclass(frozen=True)
class BucketResult:
    label: str
    count: int
    mean_seconds: dict[str, float]
    speedup_vs_naive: dict[str, float]
    tiers: dict[str, int]


@dataclass(frozen=True)
class BenchReport:
    repetitions: int
    warmup: int
    buckets: list[BucketResult]

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "warmup": self.warmup,
            "buckets": [
                {
                    "range": b.label,
                    "count": b.count,
                    "mean_seconds": b.mean_seconds,
                    "speedup_vs_naive": b.speedup_vs_naive,
                    "tiers": b.tiers,
                }
                for b in self.buckets
            ],
        }


def _bucket_index(length: int, edges: tuple[int, ...]) -> int:
    for i in range(1, len(edges) - 1):
        if length < edges[i]:
            return i - 1
    return len(edges) - 2


def _bucket_label(edges: tuple[int, ...], i: int) -> str:
    return f"{edges[i]}-{edges[i + 1]}"


def run_benchmark(
    corpus: list[tuple[TokenSequence, ParsedPrediction]],
    repetitions: int = 5,
    warmup: int = 2,
    edges: tuple[int, ...] = DEFAULT_EDGES,
) -> BenchReport:
    """Time the three aligners over a corpus of (original, predicted) pairs.

    Per bucket and algorithm, total wall time across the bucket is measured
    once per repetition; the reported mean is the median repetition divided
    by the pair count.  Parsing and any input preparation happen before the
    clocks start.  Raises on an empty corpus or disagreeing alignments.
    """
    if not corpus:
        raise ValueError("benchmark corpus is empty")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if len(edges) < 2:
        raise ValueError("need at least two bucket edges")

    prepared = []  # (bucket, orig_seq, pred, pred_tokens, orig_tokens)
    tiers: list[dict[str, int]] = [dict() for _ in range(len(edges) - 1)]
    for orig, pred in corpus:
        if not isinstance(orig, TokenSequence):
            orig = TokenSequence(orig)
        bucket = _bucket_index(len(orig), edges)
        prepared.append((bucket, orig, pred, pred.tokens(), list(orig)))

    # correctness gate: every algorithm must find the same alignment length
    for bucket, orig, pred, ptoks, otoks in prepared:
        ref = len(lcs_dp_oracle(ptoks, otoks))
        sparse = len(lcs_hunt_szymanski(ptoks, otoks))
        alignment, stats = align_hierarchical(orig, pred, IDENTITY)
        if not ref == sparse == len(alignment):
            raise RuntimeError(
                f"alignment length mismatch: dp={ref}"
                f" sparse={sparse} hierarchical={len(alignment)}"
            )
        hist = tiers[bucket]
        hist[stats.tier_used] = hist.get(stats.tier_used, 0) + 1

    runners = {
        ALGO_NAIVE: lambda item: lcs_dp_oracle(item[3], item[4]),
        ALGO_SPARSE: lambda item: lcs_hunt_szymanski(item[3], item[4]),
        ALGO_HIERARCHICAL: lambda item: align_hierarchical(item[1], item[2], IDENTITY),
    }
    n_buckets = len(edges) - 1
    counts = [0] * n_buckets
    for item in prepared:
        counts[item[0]] += 1

    totals: dict[str, list[list[float]]] = {}
    clock = time.perf_counter
    for name, run in runners.items():
        reps: list[list[float]] = []
        for rep in range(warmup + repetitions):
            sums = [0.0] * n_buckets
            for item in prepared:
                t0 = clock()
                run(item)
                sums[item[0]] += clock() - t0
            if rep >= warmup:
                reps.append(sums)
        totals[name] = reps

    buckets: list[BucketResult] = []
    for bi in range(n_buckets):
        if not counts[bi]:
            continue
        means = {
            name: statistics.median(rep[bi] for rep in reps) / counts[bi]
            for name, reps in totals.items()
        }
        naive = means[ALGO_NAIVE]
        speedups = {
            name: (naive / mean) if mean > 0 else float("inf")
            for name, mean in means.items()
        }
        buckets.append(
            BucketResult(
                label=_bucket_label(edges, bi),
                count=counts[bi],
                mean_seconds=means,
                speedup_vs_naive=speedups,
                tiers=dict(sorted(tiers[bi].items())),
            )
        )
    return BenchReport(repetitions=repetitions, warmup=warmup, buckets=buckets)


def format_table(report: BenchReport) -> str:
    """Plain-text speedup table: one column per length bucket."""
    rows = [
        ("naive dp O(N^2)", ALGO_NAIVE),
        ("sparse O(N log N)", ALGO_SPARSE),
        ("hierarchical (ours)", ALGO_HIERARCHICAL),
    ]
    header = ["Sequence Length"] + [b.label for b in report.buckets]
    lines = []
    widths = [max(21, len(header[0]))] + [
        max(10, len(h)) for h in header[1:]
    ]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for title, key in rows:
        cells = [title.ljust(widths[0])]
        for b, w in zip(report.buckets, widths[1:]):
            cells.append(f"{b.speedup_vs_naive[key]:.1f}x".ljust(w))
        lines.append("  ".join(cells).rstrip())
    counts = ["samples".ljust(widths[0])] + [
        str(b.count).ljust(w) for b, w in zip(report.buckets, widths[1:])
    ]
    lines.append("  ".join(counts).rstrip())
    return "\n".join(lines)
