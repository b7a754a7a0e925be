"""Incidence file ingestion and CSV emission helpers.

Three input layouts are supported:

dense   header row of species ids, then one row per sampling unit of 0/1
        cells; n is the number of data rows.
sparse  two-column records "unit_id,species_id", one per presence event;
        duplicates collapse; n is the number of distinct unit ids.
counts  records "species_id,count"; the number of units cannot be inferred
        and must be supplied.

All files are plain comma-separated text; ids must not contain commas.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .model import IncidenceSample

__all__ = ["IncidenceParseError", "parse_incidence", "load_matrix", "fmt_float"]

FORMATS = ("dense", "sparse", "counts")


class IncidenceParseError(ValueError):
    """Malformed incidence file; carries the offending line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def fmt_float(x: float) -> str:
    """Serialize a float with 10 significant digits (stable CSV cells)."""
    return format(float(x), ".10g")


def parse_incidence(
    path: str, format: str, n_override: Optional[int] = None
) -> IncidenceSample:
    """Read an incidence file into an :class:`IncidenceSample`."""
    if format not in FORMATS:
        raise IncidenceParseError(f"unknown format {format!r}; expected one of {FORMATS}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if format == "dense":
        return _parse_dense(lines)
    if format == "sparse":
        return _parse_sparse(lines)
    return _parse_counts(lines, n_override)


def _split(line: str, lineno: int, expect: Optional[int] = None) -> list[str]:
    cells = [c.strip() for c in line.split(",")]
    if expect is not None and len(cells) != expect:
        raise IncidenceParseError(
            f"expected {expect} comma-separated fields, got {len(cells)}", lineno
        )
    return cells


def _parse_dense(lines: list[str]) -> IncidenceSample:
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise IncidenceParseError("empty file")
    header_no, header = rows[0]
    species = _split(header, header_no)
    if len(set(species)) != len(species):
        raise IncidenceParseError("duplicate species id in header", header_no)
    if any(not s for s in species):
        raise IncidenceParseError("empty species id in header", header_no)
    data = rows[1:]
    if not data:
        raise IncidenceParseError("dense file has a header but no unit rows")
    counts = dict.fromkeys(species, 0)
    for lineno, line in data:
        cells = _split(line, lineno, expect=len(species))
        for sid, cell in zip(species, cells):
            if cell == "0":
                continue
            if cell == "1":
                counts[sid] += 1
            else:
                raise IncidenceParseError(f"cell must be 0 or 1, got {cell!r}", lineno)
    return IncidenceSample(n=len(data), counts=counts)


def _parse_sparse(lines: list[str]) -> IncidenceSample:
    pairs = set()
    units = []
    seen_units = set()
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        unit, sid = _split(line, i, expect=2)
        if not unit or not sid:
            raise IncidenceParseError("empty unit or species id", i)
        if unit not in seen_units:
            seen_units.add(unit)
            units.append(unit)
        pairs.add((unit, sid))
    if not units:
        raise IncidenceParseError("empty file")
    counts: dict[str, int] = {}
    for _unit, sid in pairs:
        counts[sid] = counts.get(sid, 0) + 1
    return IncidenceSample(n=len(units), counts=counts)


def load_matrix(path: str, format: str) -> Tuple[np.ndarray, list[str]]:
    """Read unit-level data as a dense 0/1 matrix plus species ids.

    Only the dense and sparse layouts preserve unit-level structure; counts
    files cannot be expanded back into a matrix.  Units and species appear
    in file order (first appearance for sparse).
    """
    if format == "counts":
        raise IncidenceParseError("counts files carry no unit-level data")
    if format not in FORMATS:
        raise IncidenceParseError(f"unknown format {format!r}; expected one of {FORMATS}")
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if format == "dense":
        rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
        if not rows:
            raise IncidenceParseError("empty file")
        header_no, header = rows[0]
        species = _split(header, header_no)
        data = rows[1:]
        if not data:
            raise IncidenceParseError("dense file has a header but no unit rows")
        matrix = np.zeros((len(data), len(species)), dtype=np.uint8)
        for r, (lineno, line) in enumerate(data):
            cells = _split(line, lineno, expect=len(species))
            for c, cell in enumerate(cells):
                if cell == "1":
                    matrix[r, c] = 1
                elif cell != "0":
                    raise IncidenceParseError(f"cell must be 0 or 1, got {cell!r}", lineno)
        return matrix, species
    units: list[str] = []
    species_order: list[str] = []
    unit_idx: dict[str, int] = {}
    species_idx: dict[str, int] = {}
    pairs = set()
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        unit, sid = _split(line, i, expect=2)
        if not unit or not sid:
            raise IncidenceParseError("empty unit or species id", i)
        if unit not in unit_idx:
            unit_idx[unit] = len(units)
            units.append(unit)
        if sid not in species_idx:
            species_idx[sid] = len(species_order)
            species_order.append(sid)
        pairs.add((unit_idx[unit], species_idx[sid]))
    if not units:
        raise IncidenceParseError("empty file")
    matrix = np.zeros((len(units), len(species_order)), dtype=np.uint8)
    for u, s in pairs:
        matrix[u, s] = 1
    return matrix, species_order


def _parse_counts(lines: list[str], n_override: Optional[int]) -> IncidenceSample:
    if n_override is None:
        raise IncidenceParseError("counts format requires the number of units (n)")
    if n_override < 1:
        raise IncidenceParseError(f"n must be a positive integer, got {n_override}")
    counts: dict[str, int] = {}
    any_row = False
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        any_row = True
        sid, cell = _split(line, i, expect=2)
        if not sid:
            raise IncidenceParseError("empty species id", i)
        if sid in counts:
            raise IncidenceParseError(f"duplicate species id {sid!r}", i)
        try:
            c = int(cell)
        except ValueError:
            raise IncidenceParseError(f"count must be an integer, got {cell!r}", i) from None
        if c < 0:
            raise IncidenceParseError(f"count must be nonnegative, got {c}", i)
        if c > n_override:
            raise IncidenceParseError(f"count {c} exceeds n={n_override}", i)
        counts[sid] = c
    if not any_row:
        raise IncidenceParseError("empty file")
    return IncidenceSample(n=n_override, counts=counts)
