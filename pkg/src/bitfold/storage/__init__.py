"""Storage backends behind one narrow port."""
from __future__ import annotations

from ..hierarchy import Hierarchy
from .adjacency import AdjacencyBackend
from .base import SelectionBackend
from .flat import BitmapBackend
from .ports import (
    MemoryStore,
    SqliteStore,
    StorageReport,
    StoreError,
    UnknownPersonError,
    open_store,
)

BACKENDS: dict[str, type[SelectionBackend]] = {
    BitmapBackend.name: BitmapBackend,
    AdjacencyBackend.name: AdjacencyBackend,
}


def create_backend(name: str, store, hierarchy: Hierarchy) -> SelectionBackend:
    """Instantiate and initialize a backend by its public name."""
    try:
        cls = BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(BACKENDS)}") from None
    backend = cls(store, hierarchy)
    backend.initialize()
    return backend


__all__ = [
    "AdjacencyBackend",
    "BACKENDS",
    "BitmapBackend",
    "MemoryStore",
    "SelectionBackend",
    "SqliteStore",
    "StorageReport",
    "StoreError",
    "UnknownPersonError",
    "create_backend",
    "open_store",
]
