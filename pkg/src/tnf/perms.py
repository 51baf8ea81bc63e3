"""Exact arithmetic on finite-support permutations of the positive integers.

A :class:`Permutation` moves finitely many points of {1, 2, 3, ...} and
fixes everything else.  Only the moved points are stored, so equality is
structural and independent of any ambient degree.  The text form is cycle
notation, e.g. ``"(1 2)(3 4 5)"``; the identity is ``"()"``.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .errors import DomainError

_CYCLE_RE = re.compile(r"\(\s*((?:\d+[\s,]*)*)\)")


class Permutation:
    """A bijection of the positive integers with finite support.

    Instances are immutable and hashable.  ``g * h`` composes with ``h``
    applied first: ``(g * h)(x) == g(h(x))``.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[int, int] | None = None):
        mapping = dict(mapping or {})
        for x, y in mapping.items():
            if not isinstance(x, int) or not isinstance(y, int) or x < 1 or y < 1:
                raise DomainError(f"points must be positive integers, got {x} -> {y}")
        moved = {x: y for x, y in mapping.items() if x != y}
        if set(moved.values()) != set(moved):
            raise DomainError("mapping is not a bijection of its moved points")
        self._map = moved
        self._hash = hash(frozenset(moved.items()))

    @classmethod
    def identity(cls) -> "Permutation":
        return cls()

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable[int]]) -> "Permutation":
        """Build a permutation from disjoint cycles; singleton cycles are no-ops."""
        mapping: dict[int, int] = {}
        seen: set[int] = set()
        for cycle in cycles:
            pts = list(cycle)
            if len(set(pts)) != len(pts):
                raise DomainError(f"cycle {pts} repeats a point")
            if seen.intersection(pts):
                raise DomainError(f"cycle {pts} overlaps an earlier cycle")
            seen.update(pts)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                mapping[a] = b
        return cls(mapping)

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse cycle notation like ``"(1 2)(3 4 5)"``; ``"()"`` is the identity.

        Whitespace and commas between points are interchangeable.  Raises
        :class:`DomainError` on malformed input or overlapping cycles.
        """
        s = text.strip()
        if not s:
            raise DomainError("empty permutation string; the identity is '()'")
        cycles = []
        pos = 0
        while pos < len(s):
            m = _CYCLE_RE.match(s, pos)
            if m is None:
                raise DomainError(f"malformed cycle notation: {text!r}")
            body = m.group(1).strip()
            if body:
                cycles.append([int(tok) for tok in re.split(r"[\s,]+", body)])
            pos = m.end()
            while pos < len(s) and s[pos].isspace():
                pos += 1
        return cls.from_cycles(cycles)

    @property
    def support(self) -> tuple[int, ...]:
        """The moved points, ascending."""
        return tuple(sorted(self._map))

    @property
    def moved(self) -> dict[int, int]:
        """A copy of the point -> image map restricted to moved points."""
        return dict(self._map)

    def is_identity(self) -> bool:
        return not self._map

    def __call__(self, x: int) -> int:
        return self._map.get(x, x)

    def __mul__(self, other: "Permutation") -> "Permutation":
        if not isinstance(other, Permutation):
            return NotImplemented
        pts = set(self._map) | set(other._map)
        return Permutation({x: self(other(x)) for x in pts})

    def inverse(self) -> "Permutation":
        return Permutation({y: x for x, y in self._map.items()})

    def conjugate_by(self, h: "Permutation") -> "Permutation":
        """Return ``h * self * h⁻¹`` (the relabeling of self by h)."""
        return Permutation({h(x): h(y) for x, y in self._map.items()})

    def cycles(self) -> list[tuple[int, ...]]:
        """Canonical cycle decomposition: each cycle starts at its minimum,
        cycles sorted by minimum, fixed points omitted."""
        out = []
        seen: set[int] = set()
        for start in self.support:
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            x = self._map[start]
            while x != start:
                cyc.append(x)
                seen.add(x)
                x = self._map[x]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> "CycleType":
        counts: dict[int, int] = {}
        for cyc in self.cycles():
            counts[len(cyc)] = counts.get(len(cyc), 0) + 1
        return CycleType(counts)

    def parity(self) -> int:
        """+1 for even permutations, -1 for odd."""
        flips = sum(len(c) - 1 for c in self.cycles())
        return -1 if flips % 2 else 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._map == other._map

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._map)

    def __str__(self) -> str:
        if not self._map:
            return "()"
        return "".join("(" + " ".join(str(p) for p in cyc) + ")" for cyc in self.cycles())

    def __repr__(self) -> str:
        return f"Permutation[{self}]"


class CycleType:
    """Multiset of cycle lengths >= 2; the identity has an empty multiset."""

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[int, int] | None = None):
        items = tuple(sorted((int(k), int(c)) for k, c in dict(counts or {}).items()))
        for k, c in items:
            if k < 2:
                raise DomainError(f"cycle length {k} < 2 has no place in a cycle type")
            if c < 1:
                raise DomainError(f"cycle length {k} has nonpositive multiplicity {c}")
        self._counts = items

    @property
    def counts(self) -> dict[int, int]:
        return dict(self._counts)

    def items(self) -> tuple[tuple[int, int], ...]:
        return self._counts

    def is_identity(self) -> bool:
        return not self._counts

    def __eq__(self, other) -> bool:
        return isinstance(other, CycleType) and self._counts == other._counts

    def __hash__(self) -> int:
        return hash(self._counts)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {c}" for k, c in self._counts)
        return "CycleType({" + inner + "})"


IDENTITY = Permutation()


def compose(g: Permutation, h: Permutation) -> Permutation:
    """The permutation x -> g(h(x))."""
    return g * h


def inverse(g: Permutation) -> Permutation:
    return g.inverse()


def conjugate(g: Permutation, h: Permutation) -> Permutation:
    """Return h g h⁻¹; has the same cycle type as g."""
    return g.conjugate_by(h)


def cycle_decomposition(g: Permutation) -> list[tuple[int, ...]]:
    return g.cycles()


def cycle_type(g: Permutation) -> CycleType:
    return g.cycle_type()


def parity(g: Permutation) -> int:
    return g.parity()
