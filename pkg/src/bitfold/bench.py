"""Benchmark harness: seeded workloads, timed ops, and comparison reporting.

A workload is a deterministic function of (hierarchy, seed, visitors,
density): each visitor's selection is sampled top-down, checking each child
of a checked vertex independently with probability ``density``; reason bits
are sampled the same way. The runner times three operations per visitor,
write (persist the full record in one transaction), read (load it back) and
report (frontier rows), and refuses to report numbers unless every read-back
equals its input.

Timing excludes workload generation and preparation; the contract-level
validation inside each backend's write path stays inside the timed unit,
identically for both backends.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .hierarchy import Bitmap, Hierarchy, serialize_hierarchy
from .selection import SelectionRecord, checked_set, record_from_checked_set
from .storage import StorageReport
from .storage.base import SelectionBackend

OPS = ("write", "read", "report")

# Externally reported production figures for this storage layout, shown for
# context only; the harness never asserts these magnitudes.
REFERENCE_NOTE = (
    "reference (reported from production deployments): writes 7-8x faster, "
    "traditional storage ~11x larger"
)

CSV_COLUMNS = (
    "backend",
    "op",
    "n",
    "mean_ns",
    "median_ns",
    "p95_ns",
    "logical_bytes",
    "physical_bytes",
    "ratio_vs_baseline",
)


class BenchGateError(RuntimeError):
    """A benchmark read-back mismatched its input; the run is void."""


@dataclass(frozen=True)
class Workload:
    seed: int
    visitors: int
    density: float
    hierarchy_digest: str
    # one (sorted checked paths, reasons bitmap) pair per visitor
    selections: tuple[tuple[tuple[str, ...], Bitmap], ...]

    def fingerprint(self) -> tuple:
        return (self.seed, self.visitors, self.density, self.hierarchy_digest)

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "visitors": self.visitors,
                "density": self.density,
                "hierarchyDigest": self.hierarchy_digest,
                "selections": [
                    {"paths": list(paths), "reasons": reasons}
                    for paths, reasons in self.selections
                ],
            },
            indent=2,
        )


@dataclass(frozen=True)
class Stats:
    count: int
    mean: float
    median: int
    p95: int


@dataclass(frozen=True)
class BenchResult:
    backend: str
    op: str
    latencies_ns: tuple[int, ...]
    stats: Stats | None  # None marks an empty (undefined) sample
    storage: StorageReport
    workload_fingerprint: tuple


@dataclass(frozen=True)
class ComparisonReport:
    op: str
    mean_ratio: float
    median_ratio: float
    p95_ratio: float
    storage_ratio: float  # traditional logical bytes / pbfd logical bytes
    reference: str = REFERENCE_NOTE


def _hierarchy_digest(h: Hierarchy) -> str:
    return hashlib.sha256(serialize_hierarchy(h).encode()).hexdigest()[:16]


def generate_workload(h: Hierarchy, seed: int, visitors: int, density: float) -> Workload:
    """Deterministic top-down sampling; identical inputs give byte-identical
    serialized workloads."""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = random.Random(seed)
    selections = []
    for _ in range(visitors):
        checked: list[str] = []

        def sample(vertex) -> None:
            for child in vertex.children:
                if rng.random() < density:
                    checked.append(child.path)
                    sample(child)

        sample(h.root)
        reasons = 0
        for bit, _name in h.reasons:
            if rng.random() < density:
                reasons |= bit
        selections.append((tuple(sorted(checked)), reasons))
    return Workload(seed, visitors, density, _hierarchy_digest(h), tuple(selections))


def summarize(latencies: list[int]) -> Stats:
    """Mean, lower-middle median, and nearest-rank 95th percentile."""
    if not latencies:
        raise ValueError("cannot summarize an empty sample")
    ordered = sorted(latencies)
    n = len(ordered)
    median = ordered[(n - 1) // 2]
    p95 = ordered[math.ceil(0.95 * n) - 1]
    return Stats(count=n, mean=sum(ordered) / n, median=median, p95=p95)


def _prepare_records(h: Hierarchy, workload: Workload) -> list[SelectionRecord]:
    records = []
    for paths, reasons in workload.selections:
        record = record_from_checked_set(set(paths), h)
        record.reasons = reasons
        records.append(record)
    return records


def run(
    backend: SelectionBackend,
    workload: Workload,
    threads: int = 1,
    progress=None,
) -> list[BenchResult]:
    """Time write/read/report per visitor against an initialized backend.

    Read-back equality is checked for every visitor before any numbers are
    reported; a mismatch raises :class:`BenchGateError` with a diagnostic.
    With ``threads`` > 1 visitors are partitioned across worker threads
    (distinct persons, so the per-person write serialization still holds).
    """
    h = backend.hierarchy
    if _hierarchy_digest(h) != workload.hierarchy_digest:
        raise ValueError("workload was generated for a different hierarchy")
    records = _prepare_records(h, workload)
    persons = [backend.create_person(f"visitor-{i}") for i in range(workload.visitors)]

    latencies: dict[str, list[int]] = {op: [] for op in OPS}

    def drive(indexes) -> dict[str, list[int]]:
        local = {op: [] for op in OPS}
        for i in indexes:
            person, record = persons[i], records[i]
            t0 = time.perf_counter_ns()
            backend.save_record(person, record)
            t1 = time.perf_counter_ns()
            loaded = backend.load_record(person)
            t2 = time.perf_counter_ns()
            got = (checked_set(loaded, h), loaded.reasons)
            want = (set(workload.selections[i][0]), workload.selections[i][1])
            if got != want:
                raise BenchGateError(
                    f"{backend.name}: visitor {i} read back {got!r}, expected {want!r}"
                )
            t3 = time.perf_counter_ns()
            backend.report(person)
            t4 = time.perf_counter_ns()
            local["write"].append(t1 - t0)
            local["read"].append(t2 - t1)
            local["report"].append(t4 - t3)
            if progress and (i + 1) % 1000 == 0:
                progress(f"{backend.name}: {i + 1}/{workload.visitors} visitors")
        return local

    if threads <= 1:
        merged = [drive(range(workload.visitors))]
    else:
        chunks = [range(k, workload.visitors, threads) for k in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            merged = list(pool.map(drive, chunks))
    for local in merged:
        for op in OPS:
            latencies[op].extend(local[op])

    storage = backend.measure_storage()
    fingerprint = workload.fingerprint()
    return [
        BenchResult(
            backend=backend.name,
            op=op,
            latencies_ns=tuple(latencies[op]),
            stats=summarize(latencies[op]) if latencies[op] else None,
            storage=storage,
            workload_fingerprint=fingerprint,
        )
        for op in OPS
    ]


def compare(a: BenchResult, b: BenchResult) -> ComparisonReport:
    """Ratios of ``a`` (traditional) over ``b`` (pbfd) for one op."""
    if a.workload_fingerprint != b.workload_fingerprint:
        raise ValueError("results come from different workloads")
    if a.op != b.op:
        raise ValueError(f"comparing different ops: {a.op} vs {b.op}")
    if a.stats is None or b.stats is None:
        raise ValueError("cannot compare empty samples")
    return ComparisonReport(
        op=a.op,
        mean_ratio=a.stats.mean / b.stats.mean,
        median_ratio=a.stats.median / b.stats.median,
        p95_ratio=a.stats.p95 / b.stats.p95,
        storage_ratio=a.storage.logical_bytes / b.storage.logical_bytes,
    )


def render_comparison(reports: list[ComparisonReport]) -> str:
    lines = [
        f"{'op':<8} {'mean':>8} {'median':>8} {'p95':>8}   (traditional / pbfd)",
    ]
    for r in reports:
        lines.append(
            f"{r.op:<8} {r.mean_ratio:>7.2f}x {r.median_ratio:>7.2f}x {r.p95_ratio:>7.2f}x"
        )
    if reports:
        lines.append(f"storage  {reports[0].storage_ratio:>7.2f}x (traditional logical bytes / pbfd)")
        lines.append(REFERENCE_NOTE)
    return "\n".join(lines)


def write_csv(results: list[BenchResult], path: str) -> None:
    """One row per (backend, op); the ratio column is the deterministic
    logical-storage ratio against the pbfd baseline (empty when absent)."""
    pbfd_logical = next(
        (r.storage.logical_bytes for r in results if r.backend == "pbfd"), None
    )
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for r in results:
            if r.stats is None:
                n, mean, median, p95 = 0, "", "", ""
            else:
                n, mean, median, p95 = (
                    r.stats.count,
                    f"{r.stats.mean:.1f}",
                    r.stats.median,
                    r.stats.p95,
                )
            ratio = ""
            if pbfd_logical:
                ratio = f"{r.storage.logical_bytes / pbfd_logical:.4f}"
            writer.writerow(
                [
                    r.backend,
                    r.op,
                    n,
                    mean,
                    median,
                    p95,
                    r.storage.logical_bytes,
                    r.storage.physical_bytes,
                    ratio,
                ]
            )
