"""Partitions, valence signatures, Young-diagram fillings and tableau classes.

Tableaux are stored row-major with 1-based entries.  Every enumeration is
returned in row-reading lexicographic order, which is the order used to
label tableaux T1, T2, ... throughout the package.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import NotDivisibleByThree, NotTableau, ShapeContentMismatch


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def n_rows(self) -> int:
        return len(self.parts)

    @property
    def n_columns(self) -> int:
        return self.parts[0] if self.parts else 0

    def conjugate(self) -> "Partition":
        if not self.parts:
            return Partition(())
        return Partition(tuple(sum(1 for p in self.parts if p > c) for c in range(self.parts[0])))

    def dominates(self, other: "Partition") -> bool:
        """Dominance order ``self >= other`` (sequences padded with zeros)."""
        a, b = 0, 0
        for i in range(max(len(self.parts), len(other.parts))):
            a += self.parts[i] if i < len(self.parts) else 0
            b += other.parts[i] if i < len(other.parts) else 0
            if a < b:
                return False
        return True

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


@dataclass(frozen=True)
class Signature:
    """Valence word ``s`` with entries in {1, 2} and derived data."""

    s: tuple[int, ...]
    n: int = field(init=False)
    q: tuple[int, ...] = field(init=False)
    p: tuple[int, ...] = field(init=False)
    pi: Partition = field(init=False)

    def __post_init__(self):
        s = tuple(int(v) for v in self.s)
        if not s:
            raise ValueError("signature must be nonempty")
        if any(v not in (1, 2) for v in s):
            raise ValueError(f"valences must be 1 or 2: {s}")
        n = sum(s)
        if n % 3:
            raise NotDivisibleByThree(f"sum of valences {n} is not divisible by 3")
        offsets = [1]
        for v in s:
            offsets.append(offsets[-1] + v)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "q", tuple(1 if v == 1 else -1 for v in s))
        object.__setattr__(self, "p", tuple(offsets))
        object.__setattr__(self, "pi", Partition((n // 3,) * 3))

    @property
    def d(self) -> int:
        return len(self.s)

    @property
    def k(self) -> int:
        """Excedance n/3."""
        return self.n // 3

    def group(self, i: int) -> range:
        """Indices of the n-variable lift that collapse onto point ``i`` (1-based)."""
        return range(self.p[i - 1], self.p[i])

    def as_partition(self) -> Partition:
        return Partition(tuple(sorted(self.s, reverse=True)))

    def __str__(self):
        return ",".join(map(str, self.s))


def make_signature(s: Iterable[int]) -> Signature:
    return Signature(tuple(s))


def parse_signature(text: str) -> Signature:
    return make_signature(int(tok) for tok in text.replace(" ", "").split(",") if tok)


def unit_signature(n: int) -> Signature:
    return Signature((1,) * n)


class TableauKind(str, Enum):
    RSYT = "RSYT"
    CSYT = "CSYT"
    SYT = "SYT"
    ALL_FILLINGS = "ALL_FILLINGS"


@dataclass(frozen=True)
class Filling:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(int(x) for x in r) for r in self.rows))

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "Filling":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def shape(self) -> Partition:
        return Partition(tuple(len(r) for r in self.rows))

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        """Columns listed top to bottom."""
        ncols = len(self.rows[0]) if self.rows else 0
        return [tuple(r[c] for r in self.rows if len(r) > c) for c in range(ncols)]

    def transpose(self) -> "Filling":
        return Filling(tuple(self.columns()))

    def entries(self) -> list[int]:
        return [x for r in self.rows for x in r]

    def content(self, d: int | None = None) -> tuple[int, ...]:
        counts = Counter(self.entries())
        d = max(counts) if d is None else d
        return tuple(counts.get(i, 0) for i in range(1, d + 1))

    def has_content(self, sig: Signature) -> bool:
        counts = Counter(self.entries())
        return set(counts) <= set(range(1, sig.d + 1)) and all(
            counts.get(i + 1, 0) == v for i, v in enumerate(sig.s)
        )

    def rows_strict(self) -> bool:
        return all(r[i] < r[i + 1] for r in self.rows for i in range(len(r) - 1))

    def rows_weak(self) -> bool:
        return all(r[i] <= r[i + 1] for r in self.rows for i in range(len(r) - 1))

    def columns_strict(self) -> bool:
        return all(c[i] < c[i + 1] for c in self.columns() for i in range(len(c) - 1))

    def columns_weak(self) -> bool:
        return all(c[i] <= c[i + 1] for c in self.columns() for i in range(len(c) - 1))

    def is_rsyt(self) -> bool:
        return self.rows_strict() and self.columns_weak()

    def is_csyt(self) -> bool:
        return self.rows_weak() and self.columns_strict()

    def is_standard(self) -> bool:
        return sorted(self.entries()) == list(range(1, self.size + 1)) and (
            self.rows_strict() and self.columns_strict()
        )

    def row_reading_word(self) -> tuple[int, ...]:
        return tuple(self.entries())

    def column_reading_word(self) -> tuple[int, ...]:
        return tuple(x for c in self.columns() for x in c)

    def to_json(self, sig: Signature | None = None) -> str:
        content = list(sig.s) if sig is not None else list(self.content())
        return json.dumps(
            {"shape": list(self.shape.parts), "rows": [list(r) for r in self.rows], "content": content}
        )

    @classmethod
    def from_json(cls, text: str) -> "Filling":
        data = json.loads(text)
        filling = cls.of(data["rows"])
        if list(filling.shape.parts) != list(data["shape"]):
            raise ValueError("shape does not match rows")
        if list(filling.content(len(data["content"]))) != list(data["content"]):
            raise ValueError("content does not match rows")
        return filling

    def __str__(self):
        return "/".join("".join(map(str, r)) if max(self.entries(), default=0) < 10
                        else " ".join(map(str, r)) for r in self.rows)


def _word(content) -> tuple[int, ...]:
    return content.s if isinstance(content, Signature) else tuple(int(v) for v in content)


def _offsets(word: Sequence[int]) -> tuple[int, ...]:
    out = [1]
    for v in word:
        out.append(out[-1] + v)
    return tuple(out)


def _check(shape: Partition, word: Sequence[int]) -> None:
    if shape.size != sum(word):
        raise ShapeContentMismatch(f"|shape|={shape.size} but content has n={sum(word)}")


def enumerate_tableaux(shape: Partition | Sequence[int], content: Signature | Sequence[int],
                       kind: TableauKind | str = TableauKind.RSYT) -> list[Filling]:
    """All fillings of ``shape`` with ``content`` in the requested class.

    Boxes are filled in row-reading order with candidates tried in
    increasing order, so the output comes out lexicographically sorted.
    """
    shape = shape if isinstance(shape, Partition) else Partition(tuple(shape))
    kind = TableauKind(kind)
    word = _word(content)
    _check(shape, word)
    ordered = Partition(tuple(sorted(word, reverse=True)))
    if kind is TableauKind.SYT and any(v != 1 for v in word):
        return []
    if kind in (TableauKind.CSYT, TableauKind.SYT) and not shape.dominates(ordered):
        return []
    if kind is TableauKind.RSYT and not shape.conjugate().dominates(ordered):
        return []

    row_strict = kind in (TableauKind.RSYT, TableauKind.SYT)
    col_strict = kind in (TableauKind.CSYT, TableauKind.SYT)
    monotone = kind is not TableauKind.ALL_FILLINGS
    cells = [(r, c) for r, length in enumerate(shape.parts) for c in range(length)]
    remaining = list(word)
    grid = [[0] * length for length in shape.parts]
    out: list[Filling] = []

    def place(idx: int) -> None:
        if idx == len(cells):
            out.append(Filling(tuple(tuple(row) for row in grid)))
            return
        r, c = cells[idx]
        for v in range(1, len(word) + 1):
            if not remaining[v - 1]:
                continue
            if monotone and c > 0:
                left = grid[r][c - 1]
                if v < left or (row_strict and v == left):
                    continue
            if monotone and r > 0:
                up = grid[r - 1][c]
                if v < up or (col_strict and v == up):
                    continue
            remaining[v - 1] -= 1
            grid[r][c] = v
            place(idx + 1)
            grid[r][c] = 0
            remaining[v - 1] += 1

    place(0)
    return out


def kostka(shape: Partition | Sequence[int], content: Signature | Sequence[int]) -> int:
    """Number of row-strict tableaux of ``shape`` with ``content``."""
    return len(enumerate_tableaux(shape, content, TableauKind.RSYT))


def gold_tableaux(sig: Signature) -> list[Filling]:
    """Row-strict tableaux of the rectangular shape pi, in canonical order."""
    return enumerate_tableaux(sig.pi, sig, TableauKind.RSYT)


def standardize(T: Filling, content: Signature | Sequence[int], reading: str | None = None) -> Filling:
    """Standard numbering attached injectively to a row- or column-strict tableau.

    Entry ``k`` is relabelled ``p_k``; repeated labels are then separated by
    the reading word (row reading for CSYT, column reading for RSYT).
    """
    if reading is None:
        if T.is_csyt():
            reading = "row_wise"
        elif T.is_rsyt():
            reading = "column_wise"
        else:
            raise NotTableau(f"{T} is neither row- nor column-strict")
    elif reading == "row_wise" and not T.is_csyt():
        raise NotTableau(f"{T} is not column-strict")
    elif reading == "column_wise" and not T.is_rsyt():
        raise NotTableau(f"{T} is not row-strict")
    word = _word(content)
    if T.content(len(word)) != word or max(T.entries()) > len(word):
        raise NotTableau(f"{T} does not have content {word}")

    p = _offsets(word)
    relabeled = [[p[x - 1] for x in row] for row in T.rows]
    if reading == "row_wise":
        order = [(r, c) for r, row in enumerate(relabeled) for c in range(len(row))]
    else:
        ncols = len(relabeled[0])
        order = [(r, c) for c in range(ncols) for r in range(len(relabeled)) if len(relabeled[r]) > c]
    seen: Counter = Counter()
    result = [list(row) for row in relabeled]
    for r, c in order:
        label = relabeled[r][c]
        result[r][c] = label + seen[label]
        seen[label] += 1
    return Filling(tuple(tuple(row) for row in result))


def row_content(T: Filling, a: int) -> frozenset[int]:
    """Set of entries in row ``a`` (1-based)."""
    return frozenset(T.rows[a - 1])


def row_sums(T: Filling, d: int) -> tuple[int, ...]:
    """r^T(i): sum of the (1-based) row numbers of the boxes containing i."""
    sums = [0] * d
    for r, row in enumerate(T.rows, start=1):
        for x in row:
            sums[x - 1] += r
    return tuple(sums)


def row_number_tuples(T: Filling, d: int | None = None) -> list[tuple[int, ...]]:
    """K_i: row numbers of the boxes containing ``i`` in column reading order."""
    d = max(T.entries()) if d is None else d
    K: list[list[int]] = [[] for _ in range(d)]
    ncols = len(T.rows[0])
    for c in range(ncols):
        for r, row in enumerate(T.rows, start=1):
            if len(row) > c:
                K[row[c] - 1].append(r)
    return [tuple(k) for k in K]


def standard_tableaux(shape: Partition | Sequence[int]) -> list[Filling]:
    shape = shape if isinstance(shape, Partition) else Partition(tuple(shape))
    return enumerate_tableaux(shape, (1,) * shape.size, TableauKind.SYT)


def partitions(n: int, max_part: int | None = None) -> list[Partition]:
    """All partitions of n with parts at most ``max_part``."""
    max_part = n if max_part is None else max_part
    out: list[Partition] = []

    def rec(remaining: int, cap: int, acc: list[int]):
        if remaining == 0:
            out.append(Partition(tuple(acc)))
            return
        for part in range(min(cap, remaining), 0, -1):
            acc.append(part)
            rec(remaining - part, part, acc)
            acc.pop()

    rec(n, max_part, [])
    return out


def row_sum_vector(T: Filling, sig: Signature) -> tuple[int, ...]:
    """(r^T(i) - s_i)_i, the exponent vector of the leading Specht monomial."""
    return tuple(r - s for r, s in zip(row_sums(T, sig.d), sig.s))
