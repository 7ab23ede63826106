"""Typed in-memory relations with a canonical total order on tuples.

Values are 64-bit signed integers or UTF-8 strings.  All integers order
before all strings; strings compare bytewise in UTF-8, which coincides
with code-point order, so native ``str`` comparison is used directly.
Relations are duplicate-free and stored sorted in this canonical order:
that fixed order is what makes enumeration orders deterministic and
keeps intersections order-compatible (subsequences) downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

Value = int | str
Row = tuple

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

_INT_FIELD_RE = re.compile(r"[+-]?\d+")


class DataError(Exception):
    """Malformed input data: CSV syntax, arity or value-type violations."""


def value_key(v: Value):
    """Canonical sort key for a single value (ints first, then strings)."""
    if isinstance(v, bool):
        raise TypeError("bool is not a relation value")
    if isinstance(v, int):
        return (0, v, "")
    if isinstance(v, str):
        return (1, 0, v)
    raise TypeError(f"unsupported value type: {type(v).__name__}")


def row_key(row: Row):
    """Canonical (lexicographic over value_key) sort key for a tuple."""
    return tuple(value_key(v) for v in row)


def _check_value(v: Value) -> None:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise TypeError(f"unsupported value type: {type(v).__name__}")
    if isinstance(v, int) and not (INT64_MIN <= v <= INT64_MAX):
        raise DataError(f"integer out of 64-bit signed range: {v}")


@dataclass(frozen=True)
class Relation:
    """A named, duplicate-free set of same-arity tuples, canonically sorted."""

    name: str
    arity: int
    tuples: tuple[Row, ...]

    @staticmethod
    def make(name: str, arity: int, rows: Iterable[Sequence[Value]]) -> "Relation":
        """Validate, deduplicate and sort `rows` into a Relation."""
        if arity < 0:
            raise DataError(f"{name}: negative arity")
        seen = set()
        out = []
        for row in rows:
            row = tuple(row)
            if len(row) != arity:
                raise DataError(
                    f"{name}: tuple {row!r} has arity {len(row)}, expected {arity}"
                )
            for v in row:
                _check_value(v)
            if row not in seen:
                seen.add(row)
                out.append(row)
        out.sort(key=row_key)
        return Relation(name, arity, tuple(out))

    def rename(self, name: str) -> "Relation":
        return Relation(name, self.arity, self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self) -> Iterator[Row]:
        return iter(self.tuples)


def intersect_relations(r1: Relation, r2: Relation, name: str | None = None) -> Relation:
    """Set intersection; the result order is a subsequence of both inputs."""
    if r1.arity != r2.arity:
        raise DataError(
            f"arity mismatch: {r1.name} has {r1.arity}, {r2.name} has {r2.arity}"
        )
    other = set(r2.tuples)
    kept = tuple(t for t in r1.tuples if t in other)
    return Relation(name or f"{r1.name}&{r2.name}", r1.arity, kept)


@dataclass(frozen=True)
class Database:
    """Immutable mapping from relation symbol to Relation."""

    relations: dict[str, Relation] = field(default_factory=dict)

    @staticmethod
    def of(rels: Iterable[Relation]) -> "Database":
        out: dict[str, Relation] = {}
        for r in rels:
            if r.name in out:
                raise DataError(f"duplicate relation symbol: {r.name}")
            out[r.name] = r
        return Database(out)

    def __getitem__(self, name: str) -> Relation:
        return self.relations[name]

    def __contains__(self, name: str) -> bool:
        return name in self.relations

    def get(self, name: str) -> Relation | None:
        return self.relations.get(name)

    def names(self) -> list[str]:
        return sorted(self.relations)


def _parse_field(field_text: str, want_int: bool, where: str) -> Value:
    if not want_int:
        return field_text
    if not _INT_FIELD_RE.fullmatch(field_text):
        raise DataError(f"{where}: not a 64-bit integer: {field_text!r}")
    v = int(field_text)
    if not (INT64_MIN <= v <= INT64_MAX):
        raise DataError(f"{where}: integer out of 64-bit signed range: {field_text}")
    return v


def _normalize_types(column_types: Sequence) -> list[bool]:
    flags = []
    for ct in column_types:
        if ct in ("int", int):
            flags.append(True)
        elif ct in ("str", str):
            flags.append(False)
        else:
            raise ValueError(f"column type must be 'int' or 'str', got {ct!r}")
    return flags


def load_csv(path, name: str, column_types: Sequence) -> Relation:
    """Load a headerless comma-separated file into a Relation.

    Fields are split on every comma (no quoting or escaping); row order in
    the file is irrelevant because the result is sorted canonically.
    """
    want_int = _normalize_types(column_types)
    if not want_int:
        raise DataError(f"{name}: relations need at least one column")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split(",")
        if len(fields) != len(want_int):
            raise DataError(
                f"{path}:{lineno}: expected {len(want_int)} fields, got {len(fields)}"
            )
        rows.append(
            tuple(
                _parse_field(f, w, f"{path}:{lineno}:col{i + 1}")
                for i, (f, w) in enumerate(zip(fields, want_int))
            )
        )
    return Relation.make(name, len(want_int), rows)


def infer_column_types(path, arity: int) -> list[str]:
    """Column types for a headerless CSV: "int" iff every field parses as one.

    An empty file carries no evidence; all columns default to "str".
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    is_int = [True] * arity
    saw_rows = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split(",")
        if len(fields) != arity:
            raise DataError(f"{path}:{lineno}: expected {arity} fields, got {len(fields)}")
        saw_rows = True
        for i, f in enumerate(fields):
            if is_int[i] and not _INT_FIELD_RE.fullmatch(f):
                is_int[i] = False
    if not saw_rows:
        return ["str"] * arity
    return ["int" if flag else "str" for flag in is_int]
