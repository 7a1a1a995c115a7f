"""Shared test utilities: random model generators and brute-force oracles.

The oracles here are deliberately independent of the library code paths they
check: violations are recomputed by looping over raw dict entries, frontiers
by enumerating checked vertices and discarding those with a checked child.
"""
from __future__ import annotations

import json
import random

from bitfold.hierarchy import Hierarchy, parse_hierarchy
from bitfold.selection import SelectionRecord


def random_hierarchy_text(
    rng: random.Random,
    max_vertices: int = 60,
    max_children: int = 7,
    min_vertices: int = 1,
) -> str:
    """A well-formed hierarchy document with globally unique names."""
    target = rng.randint(min_vertices, max_vertices)
    counter = 0
    root: dict = {"levelLabel": "L0", "columnToken": "Roots", "children": []}
    open_nodes = [root]
    while counter < target and open_nodes:
        parent = rng.choice(open_nodes)
        counter += 1
        node = {"name": f"n{counter}"}
        parent.setdefault("children", []).append(node)
        if len(parent["children"]) >= max_children:
            open_nodes.remove(parent)
        if rng.random() < 0.6:
            open_nodes.append(node)
    reasons = [{"name": f"r{i}"} for i in range(rng.randint(0, 6))]
    root["reasons"] = reasons
    return json.dumps(root, indent=2) + "\n"


def random_hierarchy(rng: random.Random, **kwargs) -> Hierarchy:
    return parse_hierarchy(random_hierarchy_text(rng, **kwargs))


def random_record(rng: random.Random, h: Hierarchy, density: float = 0.5) -> SelectionRecord:
    """A valid record: checks propagate top-down, so orphans cannot occur."""
    bitmaps: dict[str, int] = {}

    def sample(vertex) -> None:
        bits = 0
        for child in vertex.children:
            if rng.random() < density:
                bits |= child.bit_id
                sample(child)
        if bits:
            bitmaps[vertex.path] = bits

    sample(h.root)
    reasons = 0
    for bit, _ in h.reasons:
        if rng.random() < density:
            reasons |= bit
    return SelectionRecord(bitmaps=bitmaps, reasons=reasons)


def upward_closure(paths: set[str]) -> set[str]:
    closed = set()
    for path in paths:
        parts = path.split("/")
        for i in range(1, len(parts) + 1):
            closed.add("/".join(parts[:i]))
    return closed


def brute_checked_set(record: SelectionRecord, h: Hierarchy) -> set[str]:
    """Checked vertices recomputed straight from the bitmap entries."""
    out = set()
    for path, bits in record.bitmaps.items():
        for child in h.index[path].children:
            if bits & child.bit_id:
                out.add(child.path)
    return out


def brute_violations(record: SelectionRecord, h: Hierarchy) -> set[tuple[str, str]]:
    """(kind, path) pairs recomputed without the library validator."""
    found = set()
    for path, bits in record.bitmaps.items():
        vertex = h.index.get(path)
        if vertex is None or not vertex.children:
            found.add(("out-of-domain", path))
            continue
        mask = 0
        for child in vertex.children:
            mask |= child.bit_id
        if bits & ~mask:
            found.add(("out-of-domain", path))
        if bits and path != "":
            parent = path.rsplit("/", 1)[0] if "/" in path else ""
            if not record.bitmaps.get(parent, 0) & vertex.bit_id:
                found.add(("orphan-child", path))
    if record.reasons & ~h.reasons_mask:
        found.add(("out-of-domain", "~reasons"))
    return found


def brute_frontier(record: SelectionRecord, h: Hierarchy) -> set[str]:
    """Checked vertices with no checked children, by plain enumeration."""
    checked = brute_checked_set(record, h)
    return {
        path
        for path in checked
        if not any(child.path in checked for child in h.index[path].children)
    }
