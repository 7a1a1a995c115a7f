"""Selection hierarchy: an n-ary tree of checkbox domains with power-of-two ids.

A hierarchy document declares, level by level, which options a user can pick
(continents, then countries per continent, and so on). Every vertex gets a
bit id of 2^k where k is its position among its siblings, so any subset of
one vertex's children fits in a single 64-bit integer. The document also
carries a flat "reasons" lookup encoded the same way.

Hierarchies are immutable after load and safe to share across threads.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

Bitmap = int

# One bit is reserved so every domain mask stays representable in a signed
# 64-bit storage column.
MAX_CHILDREN = 63

REASONS_PATH = "~reasons"

_TOKEN_STRIP = re.compile(r"[^0-9A-Za-z]+")
_TOKEN_SHAPE = re.compile(r"[A-Za-z][0-9A-Za-z]*$")

_NODE_KEYS = {"name", "levelLabel", "columnToken", "children"}
_ROOT_KEYS = {"levelLabel", "columnToken", "children", "reasons"}


class HierarchyError(ValueError):
    """A hierarchy document failed validation; ``path`` names the offender."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"at {path!r}: {message}")


class UnknownPathError(LookupError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"no vertex at path {path!r}")


class LeafPathError(ValueError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"vertex at {path!r} is a leaf (no child domain)")


@dataclass(frozen=True)
class Vertex:
    """One node of the selection tree.

    ``level_label`` names the level the vertex itself sits on ("Continent"
    for Asia, "State" for Maryland); ``step_label`` names the step that
    selects this vertex's children ("Country" for Asia) and is empty on
    leaves. ``column_token`` is set on internal vertices only and derives
    the storage column holding the children bitmap.
    """

    name: str
    path: str
    bit_id: Bitmap
    level_label: str
    step_label: str
    column_token: str | None
    children: tuple[Vertex, ...]

    @property
    def is_internal(self) -> bool:
        return bool(self.children)

    @property
    def domain_mask(self) -> Bitmap:
        mask = 0
        for child in self.children:
            mask |= child.bit_id
        return mask

    def child_by_bit(self, bit: Bitmap) -> Vertex | None:
        for child in self.children:
            if child.bit_id == bit:
                return child
        return None


@dataclass(frozen=True)
class Hierarchy:
    root: Vertex
    index: dict[str, Vertex] = field(repr=False)
    vertex_count: int
    max_depth: int
    reasons: tuple[tuple[Bitmap, str], ...]

    def vertex(self, path: str) -> Vertex:
        try:
            return self.index[path]
        except KeyError:
            raise UnknownPathError(path) from None

    def vertices_bfs(self) -> list[Vertex]:
        """All vertices except the virtual root, level by level in
        declaration order."""
        out: list[Vertex] = []
        level = list(self.root.children)
        while level:
            out.extend(level)
            level = [c for v in level for c in v.children]
        return out

    def internal_vertices_bfs(self) -> list[Vertex]:
        """Root first, then every internal vertex in breadth-first order."""
        return [self.root] + [v for v in self.vertices_bfs() if v.is_internal]

    @property
    def reasons_mask(self) -> Bitmap:
        mask = 0
        for bit, _ in self.reasons:
            mask |= bit
        return mask

    def step_labels_below(self, path: str) -> list[str]:
        """Labels of the selection steps at and below ``path``, breadth-first,
        deduplicated ("State, County, City" under the United States)."""
        start = self.vertex(path)
        labels: list[str] = []
        level = [start]
        while level:
            for v in level:
                if v.is_internal and v.step_label and v.step_label not in labels:
                    labels.append(v.step_label)
            level = [c for v in level for c in v.children]
        return labels


def parent_path(path: str) -> str:
    """Parent of a vertex path; the root's parent is the root itself ("")."""
    if "/" not in path:
        return ""
    return path.rsplit("/", 1)[0]


def default_column_token(name: str) -> str:
    return _TOKEN_STRIP.sub("", name) + "s"


def parse_hierarchy(text: str) -> Hierarchy:
    """Parse and validate a hierarchy-definition document.

    Deterministic: identical text yields an identical hierarchy, and bit ids
    follow declaration order. Raises :class:`HierarchyError` naming the
    offending path on any defect (duplicate sibling name, more than 63
    children, duplicate derived column name, empty name, malformed document).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HierarchyError("", f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise HierarchyError("", "document root must be an object")
    unknown = set(doc) - _ROOT_KEYS
    if unknown:
        raise HierarchyError("", f"unknown keys {sorted(unknown)}")
    for key in ("levelLabel", "columnToken"):
        if not isinstance(doc.get(key), str):
            raise HierarchyError("", f"root must declare a string {key!r}")

    column_owner: dict[str, str] = {}

    def claim_column(token: str, path: str) -> None:
        if not _TOKEN_SHAPE.fullmatch(token):
            raise HierarchyError(path, f"column token {token!r} is not a valid identifier")
        column = "Id" + token
        # SQL identifiers compare case-insensitively
        key = column.lower()
        if key in column_owner:
            raise HierarchyError(
                path, f"column name {column!r} already derived at {column_owner[key]!r}"
            )
        column_owner[key] = path

    def build(node: object, path: str, bit: Bitmap, level_label: str) -> Vertex:
        if not isinstance(node, dict):
            raise HierarchyError(path, "node must be an object")
        unknown_keys = set(node) - _NODE_KEYS
        if unknown_keys:
            raise HierarchyError(path, f"unknown keys {sorted(unknown_keys)}")
        name = node.get("name")
        if not isinstance(name, str) or not name:
            raise HierarchyError(path, "every vertex needs a non-empty name")
        if "/" in name:
            raise HierarchyError(path, f"name {name!r} may not contain '/'")
        if name.startswith("~"):
            raise HierarchyError(path, f"name {name!r} may not start with '~' (reserved)")
        own_path = f"{path}/{name}" if path else name
        raw_children = node.get("children") or []
        if not isinstance(raw_children, list):
            raise HierarchyError(own_path, "children must be a list")
        if not raw_children:
            for key in ("levelLabel", "columnToken"):
                if key in node:
                    raise HierarchyError(own_path, f"{key} is only valid on internal vertices")
            return Vertex(name, own_path, bit, level_label, "", None, ())
        step_label = node.get("levelLabel", "")
        if not isinstance(step_label, str):
            raise HierarchyError(own_path, "levelLabel must be a string")
        token = node.get("columnToken", default_column_token(name))
        if not isinstance(token, str) or not token:
            raise HierarchyError(own_path, "columnToken must be a non-empty string")
        claim_column(token, own_path)
        children = build_children(raw_children, own_path, step_label)
        return Vertex(name, own_path, bit, level_label, step_label, token, children)

    def build_children(raw: list[object], path: str, level_label: str) -> tuple[Vertex, ...]:
        if len(raw) > MAX_CHILDREN:
            raise HierarchyError(path, f"{len(raw)} children exceed the {MAX_CHILDREN}-bit domain")
        children = []
        seen: set[str] = set()
        for position, raw_child in enumerate(raw):
            child = build(raw_child, path, 1 << position, level_label)
            if child.name in seen:
                raise HierarchyError(child.path, f"duplicate sibling name {child.name!r}")
            seen.add(child.name)
            children.append(child)
        return tuple(children)

    root_children = doc.get("children")
    if not isinstance(root_children, list) or not root_children:
        raise HierarchyError("", "root must declare a non-empty children list")
    claim_column(doc["columnToken"], "")
    children = build_children(root_children, "", doc["levelLabel"])
    root = Vertex("", "", 0, "", doc["levelLabel"], doc["columnToken"], children)

    reasons = _parse_reasons(doc.get("reasons", []))

    index: dict[str, Vertex] = {}
    count = 0
    max_depth = 0

    def register(v: Vertex, depth: int) -> None:
        nonlocal count, max_depth
        index[v.path] = v
        if depth:
            count += 1
            max_depth = max(max_depth, depth)
        for child in v.children:
            register(child, depth + 1)

    register(root, 0)
    return Hierarchy(root, index, count, max_depth, reasons)


def _parse_reasons(raw: object) -> tuple[tuple[Bitmap, str], ...]:
    if not isinstance(raw, list):
        raise HierarchyError(REASONS_PATH, "reasons must be a list")
    if len(raw) > MAX_CHILDREN:
        raise HierarchyError(REASONS_PATH, f"{len(raw)} reasons exceed the {MAX_CHILDREN}-bit domain")
    out: list[tuple[Bitmap, str]] = []
    seen: set[str] = set()
    for position, entry in enumerate(raw):
        if not isinstance(entry, dict) or not isinstance(entry.get("name"), str) or not entry["name"]:
            raise HierarchyError(REASONS_PATH, f"reason #{position} needs a non-empty name")
        extra = set(entry) - {"name"}
        if extra:
            raise HierarchyError(REASONS_PATH, f"reason #{position} has unknown keys {sorted(extra)}")
        name = entry["name"]
        if name in seen:
            raise HierarchyError(REASONS_PATH, f"duplicate reason name {name!r}")
        seen.add(name)
        out.append((1 << position, name))
    return tuple(out)


def serialize_hierarchy(h: Hierarchy) -> str:
    """Canonical document text for ``h``; parse -> serialize round-trips
    byte-identically for canonical inputs."""

    def node(v: Vertex) -> dict:
        out: dict = {"name": v.name}
        if v.is_internal:
            if v.step_label:
                out["levelLabel"] = v.step_label
            if v.column_token != default_column_token(v.name):
                out["columnToken"] = v.column_token
            out["children"] = [node(c) for c in v.children]
        return out

    doc = {
        "levelLabel": h.root.step_label,
        "columnToken": h.root.column_token,
        "children": [node(c) for c in h.root.children],
        "reasons": [{"name": name} for _, name in h.reasons],
    }
    return json.dumps(doc, indent=2) + "\n"


def vertex_by_path(h: Hierarchy, path: str) -> Vertex:
    """Resolve a slash-joined path; "" resolves to the virtual root."""
    return h.vertex(path)


def domain_mask(h: Hierarchy, path: str) -> Bitmap:
    """Bitwise OR of the children bit ids at ``path`` (2^n - 1 for n children)."""
    v = h.vertex(path)
    if not v.is_internal:
        raise LeafPathError(path)
    return v.domain_mask


def column_name(v: Vertex) -> str:
    """Storage column holding the children bitmap of ``v`` ("IdContinents")."""
    if not v.is_internal:
        raise LeafPathError(v.path)
    assert v.column_token is not None
    return "Id" + v.column_token
