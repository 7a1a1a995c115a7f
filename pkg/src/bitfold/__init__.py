"""bitfold: hierarchical checkbox selections as power-of-two bitmap columns."""

__version__ = "0.1.0"

from .hierarchy import (
    Bitmap,
    Hierarchy,
    HierarchyError,
    LeafPathError,
    UnknownPathError,
    Vertex,
    column_name,
    domain_mask,
    parse_hierarchy,
    serialize_hierarchy,
    vertex_by_path,
)
from .selection import (
    CheckBoxListItem,
    DomainError,
    InvalidRecordError,
    NotUpwardClosedError,
    OrphanStepError,
    ReportRow,
    SelectionRecord,
    Violation,
    apply_update,
    calculate_ids,
    checked_set,
    decode_reasons,
    record_from_checked_set,
    report_rows,
    to_checkbox_items,
    validate_record,
)

__all__ = [
    "Bitmap",
    "CheckBoxListItem",
    "DomainError",
    "Hierarchy",
    "HierarchyError",
    "InvalidRecordError",
    "LeafPathError",
    "NotUpwardClosedError",
    "OrphanStepError",
    "ReportRow",
    "SelectionRecord",
    "UnknownPathError",
    "Vertex",
    "Violation",
    "apply_update",
    "calculate_ids",
    "checked_set",
    "column_name",
    "decode_reasons",
    "domain_mask",
    "parse_hierarchy",
    "record_from_checked_set",
    "report_rows",
    "serialize_hierarchy",
    "to_checkbox_items",
    "validate_record",
    "vertex_by_path",
]
