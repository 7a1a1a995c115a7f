"""View-model <-> bitmap conversion and per-person selection records.

The UI exchanges lists of checkbox items; the backend folds the checked ones
into a single integer per hierarchy vertex (OR of power-of-two ids) and keeps
one record per person: a map from internal-vertex path to that vertex's
children bitmap, plus one bitmap over the reasons domain.

Everything here is a pure function over immutable inputs; records are plain
values.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .hierarchy import (
    Bitmap,
    Hierarchy,
    LeafPathError,
    REASONS_PATH,
    Vertex,
    parent_path,
)


class DomainError(ValueError):
    """A bitmap or item id falls outside the vertex's children domain."""


class OrphanStepError(ValueError):
    """A step was addressed whose parent vertex is not checked."""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"step {path!r} is unreachable: parent bit not set")


class NotUpwardClosedError(ValueError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"{path!r} is selected without its ancestors")


class InvalidRecordError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class CheckBoxListItem:
    """The wire view model: one checkbox, id mapped to a lookup bit id."""

    id: Bitmap
    description: str
    is_checked: bool = False
    css_class: str = ""

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "isChecked": self.is_checked,
            "class": self.css_class,
        }

    @classmethod
    def from_wire(cls, data: dict) -> CheckBoxListItem:
        return cls(
            id=int(data["id"]),
            description=str(data.get("description", "")),
            is_checked=bool(data.get("isChecked", False)),
            css_class=str(data.get("class", "")),
        )


@dataclass(frozen=True)
class Violation:
    path: str
    kind: str  # "out-of-domain" | "orphan-child"
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind} at {self.path!r}" + (f": {self.detail}" if self.detail else "")


@dataclass
class SelectionRecord:
    """One person's full selection state.

    ``bitmaps`` maps internal-vertex paths to children bitmaps; absent
    entries mean 0, and zero entries are dropped on construction so equal
    states compare equal. ``person_id`` is identity metadata and does not
    participate in equality.
    """

    bitmaps: dict[str, Bitmap] = field(default_factory=dict)
    reasons: Bitmap = 0
    person_id: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        self.bitmaps = {path: bits for path, bits in self.bitmaps.items() if bits}

    def bitmap_at(self, path: str) -> Bitmap:
        return self.bitmaps.get(path, 0)

    @property
    def is_empty(self) -> bool:
        return not self.bitmaps and not self.reasons


@dataclass(frozen=True)
class ReportRow:
    """One root-to-frontier path, one cell per hierarchy level; trailing
    cells are None when the path ends early."""

    cells: tuple[str | None, ...]


def calculate_ids(items: list[CheckBoxListItem]) -> Bitmap:
    """OR together the ids of all checked items (0 for an empty list)."""
    ids = 0
    for obj in items:
        if obj.is_checked:
            ids |= obj.id
    return ids


def to_checkbox_items(v: Vertex, b: Bitmap) -> list[CheckBoxListItem]:
    """One item per child of ``v`` in declaration order, checked per ``b``."""
    if b & ~v.domain_mask:
        raise DomainError(
            f"bitmap {b} has bits outside domain {v.domain_mask} of {v.path!r}"
        )
    return [
        CheckBoxListItem(
            id=child.bit_id,
            description=child.name,
            is_checked=bool(b & child.bit_id),
        )
        for child in v.children
    ]


def validate_record(r: SelectionRecord, h: Hierarchy) -> list[Violation]:
    """All invariant violations in ``r`` (empty means valid).

    Checks that every entry addresses an internal vertex and stays inside its
    domain, that every non-empty bitmap's own vertex is checked in its parent
    (no orphan subtrees), and that the reasons bitmap stays inside the
    reasons domain.
    """
    violations: list[Violation] = []
    for path, bits in sorted(r.bitmaps.items()):
        vertex = h.index.get(path)
        if vertex is None or not vertex.is_internal:
            violations.append(Violation(path, "out-of-domain", "not an internal vertex path"))
            continue
        if bits & ~vertex.domain_mask:
            violations.append(
                Violation(path, "out-of-domain", f"bits {bits & ~vertex.domain_mask} outside mask")
            )
        if path and bits:
            parent = parent_path(path)
            if not r.bitmap_at(parent) & vertex.bit_id:
                violations.append(Violation(path, "orphan-child", "parent bit not set"))
    if r.reasons & ~h.reasons_mask:
        violations.append(Violation(REASONS_PATH, "out-of-domain", "reason bits outside mask"))
    return violations


def _require_valid(r: SelectionRecord, h: Hierarchy) -> None:
    violations = validate_record(r, h)
    if violations:
        raise InvalidRecordError(violations)


def apply_update(
    r: SelectionRecord, h: Hierarchy, path: str, items: list[CheckBoxListItem]
) -> SelectionRecord:
    """Replace the bitmap at ``path`` with the checked items, cascading.

    Any child bit cleared by the update zeroes every descendant bitmap under
    that child, so the result always satisfies :func:`validate_record`.
    Raises :class:`OrphanStepError` when the step's own parent bit is not
    set, and :class:`DomainError` when items carry foreign ids.
    """
    vertex = h.vertex(path)
    if not vertex.is_internal:
        raise LeafPathError(path)
    if path and not r.bitmap_at(parent_path(path)) & vertex.bit_id:
        raise OrphanStepError(path)
    child_bits = {c.bit_id for c in vertex.children}
    for item in items:
        if item.id not in child_bits:
            raise DomainError(f"item id {item.id} is not a child bit of {path!r}")
    new_bits = calculate_ids(items)
    cleared = r.bitmap_at(path) & ~new_bits

    bitmaps = dict(r.bitmaps)
    bitmaps[path] = new_bits
    stack = [c for c in vertex.children if c.bit_id & cleared]
    while stack:
        v = stack.pop()
        bitmaps.pop(v.path, None)
        stack.extend(v.children)
    return SelectionRecord(bitmaps=bitmaps, reasons=r.reasons, person_id=r.person_id)


def checked_set(r: SelectionRecord, h: Hierarchy) -> set[str]:
    """Paths of all vertices whose bit is set in their parent's bitmap.

    The result is upward-closed for every valid record (a vertex can only be
    reached through a checked parent)."""
    _require_valid(r, h)
    out: set[str] = set()
    for path, bits in r.bitmaps.items():
        for child in h.index[path].children:
            if bits & child.bit_id:
                out.add(child.path)
    return out


def record_from_checked_set(s: set[str], h: Hierarchy) -> SelectionRecord:
    """Inverse of :func:`checked_set`; ``s`` must be upward-closed."""
    bitmaps: dict[str, Bitmap] = {}
    for path in sorted(s):
        vertex = h.vertex(path)
        parent = parent_path(path)
        if parent and parent not in s:
            raise NotUpwardClosedError(path)
        bitmaps[parent] = bitmaps.get(parent, 0) | vertex.bit_id
    return SelectionRecord(bitmaps=bitmaps)


def report_rows(r: SelectionRecord, h: Hierarchy) -> list[ReportRow]:
    """One row per frontier vertex (checked, with no checked children).

    Cells are the names along the root-to-frontier path, padded with None to
    the hierarchy depth; rows come in breadth-first declaration order."""
    checked = checked_set(r, h)
    rows: list[ReportRow] = []
    for v in h.vertices_bfs():
        if v.path not in checked:
            continue
        if any(child.path in checked for child in v.children):
            continue
        names = v.path.split("/")
        cells = tuple(names) + (None,) * (h.max_depth - len(names))
        rows.append(ReportRow(cells=cells))
    return rows


def decode_reasons(r: SelectionRecord, h: Hierarchy) -> list[str]:
    """Names of the set reason bits, in declaration order."""
    if r.reasons & ~h.reasons_mask:
        raise DomainError(f"reason bits {r.reasons & ~h.reasons_mask} outside mask")
    return [name for bit, name in h.reasons if r.reasons & bit]


def reason_items(h: Hierarchy, reasons: Bitmap) -> list[CheckBoxListItem]:
    """Checkbox items over the reasons domain (the "~reasons" pseudo-step)."""
    if reasons & ~h.reasons_mask:
        raise DomainError(f"reason bits {reasons & ~h.reasons_mask} outside mask")
    return [
        CheckBoxListItem(id=bit, description=name, is_checked=bool(reasons & bit))
        for bit, name in h.reasons
    ]


def apply_reasons_update(
    r: SelectionRecord, h: Hierarchy, items: list[CheckBoxListItem]
) -> SelectionRecord:
    """Replace the reasons bitmap from checked items (no cascade to apply)."""
    domain = {bit for bit, _ in h.reasons}
    for item in items:
        if item.id not in domain:
            raise DomainError(f"item id {item.id} is not a reason bit")
    return SelectionRecord(
        bitmaps=dict(r.bitmaps), reasons=calculate_ids(items), person_id=r.person_id
    )
