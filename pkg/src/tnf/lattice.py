"""Exhaustive ground-truth engine for small finite symmetric groups.

Everything here is exact: subgroup lattices are enumerated completely,
measures are rational, and the TNF / normalizer machinery is brute force
by design.  The module is the desk-scale oracle against which the symbolic
and sampled infinite-model results are checked.

Window caps: degree 5 by default, degree 6 behind ``allow_degree_6=True``
(1455 subgroups; takes a while), nothing above that.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Sequence

from .errors import DomainError, SizeLimitError
from .perms import Permutation

DEGREE_CAP = 5
DEGREE_CAP_FLAGGED = 6


# ---------------------------------------------------------------------------
# groups


class FiniteGroup:
    """A permutation group on the window {1..degree}, given by all elements.

    Elements are kept in canonical order (lexicographic one-line images), so
    equality and iteration order are deterministic.
    """

    __slots__ = ("degree", "elements", "generators", "_set")

    def __init__(self, degree: int, elements: Sequence[Permutation],
                 generators: Sequence[Permutation] = (), *, _validate: bool = True):
        self.degree = int(degree)
        self.elements = tuple(sorted(elements, key=lambda g: _oneline(g, degree)))
        self.generators = tuple(generators)
        self._set = frozenset(self.elements)
        if _validate:
            self._check()

    def _check(self) -> None:
        if self.degree < 1:
            raise DomainError("degree must be at least 1")
        for g in self.elements:
            if g.support and max(g.support) > self.degree:
                raise DomainError(f"element {g} moves a point beyond degree {self.degree}")
        if Permutation() not in self._set:
            raise DomainError("group does not contain the identity")
        for g in self.elements:
            if g.inverse() not in self._set:
                raise DomainError(f"group is not closed under inversion at {g}")
            for h in self.elements:
                if g * h not in self._set:
                    raise DomainError(f"group is not closed under composition at {g}*{h}")
        for g in self.generators:
            if g not in self._set:
                raise DomainError(f"generator {g} is not an element")

    @classmethod
    def generate(cls, degree: int, generators: Iterable[Permutation]) -> "FiniteGroup":
        """The subgroup of S_degree generated by the given permutations."""
        gens = [g for g in generators if not g.is_identity()]
        for g in gens:
            if g.support and max(g.support) > degree:
                raise DomainError(f"generator {g} moves a point beyond degree {degree}")
        els = {Permutation()}
        els.update(gens)
        frontier = list(els)
        while frontier:
            new = []
            for a in frontier:
                for s in gens:
                    p = a * s
                    if p not in els:
                        els.add(p)
                        new.append(p)
            frontier = new
        return cls(degree, els, gens, _validate=False)

    @property
    def element_set(self) -> frozenset:
        return self._set

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: Permutation) -> bool:
        return g in self._set

    def __eq__(self, other) -> bool:
        return (isinstance(other, FiniteGroup)
                and self.degree == other.degree and self._set == other._set)

    def __hash__(self) -> int:
        return hash((self.degree, self._set))

    def __repr__(self) -> str:
        gens = ",".join(str(g) for g in self.generators) or "()"
        return f"FiniteGroup(degree={self.degree}, order={self.order}, gens=<{gens}>)"


def _oneline(g: Permutation, degree: int) -> tuple[int, ...]:
    return tuple(g(i) for i in range(1, degree + 1))


def symmetric_group(n: int) -> FiniteGroup:
    """The full symmetric group on {1..n}."""
    if n < 1:
        raise DomainError("window size must be at least 1")
    if n == 1:
        return FiniteGroup(1, [Permutation()], (), _validate=False)
    gens = [Permutation.from_cycles([[1, 2]])]
    if n > 2:
        gens.append(Permutation.from_cycles([list(range(1, n + 1))]))
    elements = [Permutation({i: img for i, img in enumerate(row, start=1)})
                for row in itertools.permutations(range(1, n + 1))]
    return FiniteGroup(n, elements, gens, _validate=False)


def greedy_generators(degree: int, elements: Sequence[Permutation]) -> tuple[Permutation, ...]:
    """A small deterministic generating set: scan elements in canonical order,
    keeping each one that enlarges the generated subgroup."""
    target = frozenset(elements)
    if len(target) == 1:
        return ()
    gens: list[Permutation] = []
    span = {Permutation()}
    for g in sorted(elements, key=lambda p: _oneline(p, degree)):
        if g in span:
            continue
        gens.append(g)
        span = set(FiniteGroup.generate(degree, gens).elements)
        if len(span) == len(target):
            break
    return tuple(gens)


# ---------------------------------------------------------------------------
# the integer engine behind lattice enumeration


class _SymmetricEngine:
    """S_n as integers 0..n!-1 with a dense multiplication table."""

    def __init__(self, n: int):
        self.n = n
        self.rows = list(itertools.permutations(range(1, n + 1)))
        self.index = {row: i for i, row in enumerate(self.rows)}
        m = len(self.rows)
        self.identity = 0  # lexicographic order puts (1,...,n) first
        mult = []
        for ra in self.rows:
            row_ra = [self.index[tuple(ra[x - 1] for x in rb)] for rb in self.rows]
            mult.append(row_ra)
        self.mult = mult
        inv = [0] * m
        for i, row in enumerate(self.rows):
            inv_row = [0] * n
            for x, y in enumerate(row, start=1):
                inv_row[y - 1] = x
            inv[i] = self.index[tuple(inv_row)]
        self.inv = inv

    def conj(self, g: int, h: int) -> int:
        """g h g^{-1}"""
        return self.mult[self.mult[g][h]][self.inv[g]]

    def cyclic(self, g: int) -> frozenset[int]:
        els = {self.identity}
        x = g
        while x != self.identity:
            els.add(x)
            x = self.mult[x][g]
        return frozenset(els)

    def close(self, base: Iterable[int], gens: Sequence[int]) -> frozenset[int]:
        """Closure of a set known to contain the identity under the generators."""
        mult = self.mult
        els = set(base)
        frontier = list(els)
        while frontier:
            new = []
            for a in frontier:
                row = mult[a]
                for s in gens:
                    p = row[s]
                    if p not in els:
                        els.add(p)
                        new.append(p)
            frontier = new
        return frozenset(els)

    def permutation(self, i: int) -> Permutation:
        return Permutation({x: y for x, y in enumerate(self.rows[i], start=1)})


@lru_cache(maxsize=8)
def _engine(n: int) -> _SymmetricEngine:
    return _SymmetricEngine(n)


# ---------------------------------------------------------------------------
# lattice


@dataclass(frozen=True)
class SubgroupLattice:
    """Every subgroup of one small symmetric group, with normalizers and
    conjugacy classes precomputed.  Subgroup order is canonical (ascending
    group order, then element sets), so indices are stable across runs."""

    ambient: FiniteGroup
    subgroups: tuple[FiniteGroup, ...]
    normalizer_table: tuple[int, ...]
    conjugacy_classes: tuple[tuple[int, ...], ...]

    def index_of(self, subgroup: FiniteGroup | frozenset) -> int:
        key = subgroup.element_set if isinstance(subgroup, FiniteGroup) else frozenset(subgroup)
        try:
            return _lattice_index(self)[key]
        except KeyError:
            raise DomainError("subgroup is not in the lattice") from None

    def normalizer(self, i: int) -> int:
        if not 0 <= i < len(self.subgroups):
            raise DomainError(f"subgroup index {i} out of range")
        return self.normalizer_table[i]

    def self_normalizing_set(self) -> frozenset[int]:
        return frozenset(i for i, n in enumerate(self.normalizer_table) if n == i)

    def class_of(self, i: int) -> int:
        for ci, cls in enumerate(self.conjugacy_classes):
            if i in cls:
                return ci
        raise DomainError(f"subgroup index {i} out of range")


_LATTICE_INDEX_CACHE: dict[int, dict] = {}


def _lattice_index(lattice: SubgroupLattice) -> dict:
    cached = _LATTICE_INDEX_CACHE.get(id(lattice))
    if cached is None:
        cached = {H.element_set: i for i, H in enumerate(lattice.subgroups)}
        _LATTICE_INDEX_CACHE[id(lattice)] = cached
    return cached


def enumerate_subgroups(n: int, *, allow_degree_6: bool = False) -> SubgroupLattice:
    """Enumerate every subgroup of S_n.

    Breadth-first closure over generating sets seeded by the cyclic
    subgroups; extension candidates are pruned to one representative per
    double coset, which keeps S_5 (156 subgroups) fast.  Degree 6 must be
    requested explicitly; beyond 6 the enumeration refuses.
    """
    if n < 1:
        raise DomainError("window size must be at least 1")
    if n > DEGREE_CAP_FLAGGED:
        raise SizeLimitError(
            f"window size {n} exceeds the hard cap {DEGREE_CAP_FLAGGED}")
    if n > DEGREE_CAP and not allow_degree_6:
        raise SizeLimitError(
            f"window size {n} exceeds the default cap {DEGREE_CAP}; "
            f"pass allow_degree_6=True (CLI: --allow-degree-6) for degree 6")
    return _enumerate_cached(n)


@lru_cache(maxsize=8)
def _enumerate_cached(n: int) -> SubgroupLattice:
    eng = _engine(n)
    m = len(eng.rows)
    mult = eng.mult

    found: dict[frozenset[int], tuple[int, ...]] = {}
    queue: list[frozenset[int]] = []
    for g in range(m):
        H = eng.cyclic(g)
        if H not in found:
            found[H] = (g,) if g != eng.identity else ()
            queue.append(H)

    qi = 0
    while qi < len(queue):
        H = queue[qi]
        qi += 1
        gens = found[H]
        if len(H) == m:
            continue
        Hlist = list(H)
        seen = set(H)
        for g in range(m):
            if g in seen:
                continue
            K = eng.close(set(H) | {g}, list(gens) + [g])
            if K not in found:
                found[K] = gens + (g,)
                queue.append(K)
            # mark the double coset HgH: extending H by any of its members
            # yields the same subgroup
            for h1 in Hlist:
                a = mult[h1][g]
                row = mult[a]
                for h2 in Hlist:
                    seen.add(row[h2])

    order = sorted(found, key=lambda H: (len(H), sorted(H)))
    index = {H: i for i, H in enumerate(order)}

    normalizer_table = []
    for H in order:
        gens = found[H]
        N = frozenset(g for g in range(m)
                      if all(eng.conj(g, x) in H for x in gens))
        normalizer_table.append(index[N])

    classes = []
    visited = set()
    for i, H in enumerate(order):
        if i in visited:
            continue
        orbit = set()
        for g in range(m):
            K = frozenset(eng.conj(g, h) for h in H)
            orbit.add(index[K])
        visited |= orbit
        classes.append(tuple(sorted(orbit)))
    classes.sort(key=lambda cls: cls[0])

    perms = [eng.permutation(i) for i in range(m)]
    groups = []
    for H in order:
        els = [perms[i] for i in sorted(H)]
        gens = greedy_generators(n, els)
        groups.append(FiniteGroup(n, els, gens, _validate=False))

    ambient = groups[index[frozenset(range(m))]]
    return SubgroupLattice(ambient=ambient,
                           subgroups=tuple(groups),
                           normalizer_table=tuple(normalizer_table),
                           conjugacy_classes=tuple(classes))


def normalizer(H: int, lattice: SubgroupLattice) -> int:
    """Index of N(H) = {g : gHg⁻¹ = H}; always contains H."""
    return lattice.normalizer(H)


def self_normalizing_set(lattice: SubgroupLattice) -> frozenset[int]:
    """Indices of subgroups with N(H) = H."""
    return lattice.self_normalizing_set()


# ---------------------------------------------------------------------------
# finite actions


class FiniteAction:
    """A measure-preserving action of a finite group on finitely many points.

    ``points`` may be any hashables; their tuple order fixes the canonical
    order of everything derived from them.  The measure is rational and
    checked to sum to 1 and be preserved by every element.
    """

    def __init__(self, group: FiniteGroup, points: Sequence[Hashable],
                 act: Callable[[Permutation, Hashable], Hashable],
                 measure: dict | None = None, *, validate: bool = True):
        self.group = group
        self.points = tuple(points)
        if len(set(self.points)) != len(self.points):
            raise DomainError("points are not distinct")
        self.table = {(g, x): act(g, x) for g in group.elements for x in self.points}
        if measure is None:
            w = Fraction(1, len(self.points))
            measure = {x: w for x in self.points}
        self.measure = {x: Fraction(measure[x]) for x in self.points}
        if validate:
            self._check()

    def _check(self) -> None:
        pointset = set(self.points)
        ident = Permutation()
        for x in self.points:
            if self.table[(ident, x)] != x:
                raise DomainError("identity does not act trivially")
        for (g, x), y in self.table.items():
            if y not in pointset:
                raise DomainError(f"action leaves the point set: {g} . {x!r} = {y!r}")
        for g in self.group.elements:
            for h in self.group.elements:
                gh = g * h
                for x in self.points:
                    if self.table[(gh, x)] != self.table[(g, self.table[(h, x)])]:
                        raise DomainError("action table is not a homomorphism")
        total = sum(self.measure.values())
        if total != 1:
            raise DomainError(f"point masses sum to {total}, not 1")
        if any(v < 0 for v in self.measure.values()):
            raise DomainError("negative point mass")
        for g in self.group.elements:
            for x in self.points:
                if self.measure[self.table[(g, x)]] != self.measure[x]:
                    raise DomainError(f"measure is not preserved by {g}")

    def act(self, g: Permutation, x: Hashable) -> Hashable:
        return self.table[(g, x)]

    def relabel(self, rename: dict) -> "FiniteAction":
        """The same action with points renamed by a bijection (metric copy)."""
        if set(rename) != set(self.points):
            raise DomainError("rename must be keyed by exactly the points")
        if len(set(rename.values())) != len(self.points):
            raise DomainError("rename is not injective")
        inverse = {v: k for k, v in rename.items()}
        return FiniteAction(
            self.group,
            [rename[x] for x in self.points],
            lambda g, y: rename[self.table[(g, inverse[y])]],
            {rename[x]: w for x, w in self.measure.items()},
            validate=False)


def natural_action(group: FiniteGroup) -> FiniteAction:
    """The group acting on {1..degree} with uniform mass."""
    return FiniteAction(group, range(1, group.degree + 1), lambda g, x: g(x))


def regular_action(group: FiniteGroup) -> FiniteAction:
    """Left multiplication of the group on itself; free, uniform mass."""
    return FiniteAction(group, group.elements, lambda g, x: g * x)


def coset_action(group: FiniteGroup, subgroup: FiniteGroup) -> FiniteAction:
    """Left action on cosets gH (as frozensets of elements), uniform mass."""
    if not subgroup.element_set <= group.element_set:
        raise DomainError("subgroup is not contained in the group")
    seen: set = set()
    cosets = []
    for g in group.elements:
        if g in seen:
            continue
        coset = frozenset(g * h for h in subgroup.elements)
        cosets.append(coset)
        seen |= coset
    return FiniteAction(group, cosets,
                        lambda g, C: frozenset(g * x for x in C))


def fixed_set(action: FiniteAction, g: Permutation) -> frozenset:
    """The points fixed by g."""
    if g not in action.group:
        raise DomainError(f"{g} is not an element of the acting group")
    return frozenset(x for x in action.points if action.table[(g, x)] == x)


def stabilizer(action: FiniteAction, x: Hashable) -> FiniteGroup:
    """The subgroup fixing the point x, as a closed FiniteGroup."""
    if x not in set(action.points):
        raise DomainError(f"{x!r} is not a point of the action")
    els = [g for g in action.group.elements if action.table[(g, x)] == x]
    return FiniteGroup(action.group.degree, els,
                       greedy_generators(action.group.degree, els), _validate=False)


def iso_stable_partition(action: FiniteAction) -> tuple[tuple[Hashable, ...], ...]:
    """Blocks of points sharing the same stabilizer, in point order."""
    by_stab: dict[frozenset, list] = {}
    for x in action.points:
        key = frozenset(g for g in action.group.elements if action.table[(g, x)] == x)
        by_stab.setdefault(key, []).append(x)
    blocks = sorted(by_stab.values(), key=lambda b: action.points.index(b[0]))
    return tuple(tuple(b) for b in blocks)


# ---------------------------------------------------------------------------
# measures on the lattice


class LatticeMeasure:
    """A rational probability mass over the subgroups of a lattice, dense."""

    __slots__ = ("lattice", "mass")

    def __init__(self, lattice: SubgroupLattice, mass: Sequence[Fraction]):
        mass = tuple(Fraction(v) for v in mass)
        if len(mass) != len(lattice.subgroups):
            raise DomainError("mass vector length does not match the lattice")
        if any(v < 0 for v in mass):
            raise DomainError("negative mass")
        if sum(mass) != 1:
            raise DomainError(f"masses sum to {sum(mass)}, not 1")
        self.lattice = lattice
        self.mass = mass

    @classmethod
    def point_mass(cls, lattice: SubgroupLattice, i: int) -> "LatticeMeasure":
        if not 0 <= i < len(lattice.subgroups):
            raise DomainError(f"subgroup index {i} out of range")
        return cls(lattice, [Fraction(int(j == i)) for j in range(len(lattice.subgroups))])

    @classmethod
    def uniform_on_class(cls, lattice: SubgroupLattice, class_index: int) -> "LatticeMeasure":
        cls_members = lattice.conjugacy_classes[class_index]
        w = Fraction(1, len(cls_members))
        mass = [Fraction(0)] * len(lattice.subgroups)
        for i in cls_members:
            mass[i] = w
        return cls(lattice, mass)

    @classmethod
    def from_dict(cls, lattice: SubgroupLattice, masses: dict) -> "LatticeMeasure":
        mass = [Fraction(0)] * len(lattice.subgroups)
        for i, v in masses.items():
            mass[int(i)] = Fraction(v)
        return cls(lattice, mass)

    def support(self) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.mass) if v > 0)

    def as_dict(self) -> dict[int, Fraction]:
        return {i: v for i, v in enumerate(self.mass) if v > 0}

    def __eq__(self, other) -> bool:
        return (isinstance(other, LatticeMeasure)
                and self.lattice is other.lattice and self.mass == other.mass)

    def __hash__(self) -> int:
        return hash((id(self.lattice), self.mass))

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {v}" for i, v in self.as_dict().items())
        return "LatticeMeasure({" + inner + "})"


def characteristic_measure(action: FiniteAction, lattice: SubgroupLattice) -> LatticeMeasure:
    """Push the point masses forward along the stabilizer map."""
    if action.group.element_set != lattice.ambient.element_set:
        raise DomainError("action group is not the ambient group of the lattice")
    idx = _lattice_index(lattice)
    mass = [Fraction(0)] * len(lattice.subgroups)
    for x in action.points:
        stab = frozenset(g for g in action.group.elements if action.table[(g, x)] == x)
        try:
            i = idx[stab]
        except KeyError:
            raise RuntimeError(
                "stabilizer missing from an exhaustive lattice; enumeration is broken"
            ) from None
        mass[i] += action.measure[x]
    return LatticeMeasure(lattice, mass)


def normalization_pushforward(measure: LatticeMeasure) -> LatticeMeasure:
    """Move each subgroup's mass to its normalizer."""
    table = measure.lattice.normalizer_table
    mass = [Fraction(0)] * len(measure.mass)
    for i, v in enumerate(measure.mass):
        mass[table[i]] += v
    return LatticeMeasure(measure.lattice, mass)


def hierarchy_chain(measure: LatticeMeasure) -> list[LatticeMeasure]:
    """Iterate the normalization pushforward until it stops moving mass.

    Returns the chain [m0, m1, ..., mk] where mk is the first fixed point.
    On a finite lattice mass only moves up the normalizer order, so the
    chain cannot be longer than the subgroup count.
    """
    chain = [measure]
    while True:
        nxt = normalization_pushforward(chain[-1])
        if nxt.mass == chain[-1].mass:
            return chain
        chain.append(nxt)
        if len(chain) > len(measure.lattice.subgroups):
            raise RuntimeError("normalization chain failed to terminate")


def ergodic_ad_measures(lattice: SubgroupLattice) -> list[LatticeMeasure]:
    """The extreme conjugation-invariant measures: one uniform measure per
    conjugacy class of subgroups."""
    return [LatticeMeasure.uniform_on_class(lattice, c)
            for c in range(len(lattice.conjugacy_classes))]


def is_ad_invariant(measure: LatticeMeasure) -> bool:
    """True when the mass is constant along each conjugacy class."""
    for cls in measure.lattice.conjugacy_classes:
        masses = {measure.mass[i] for i in cls}
        if len(masses) > 1:
            return False
    return True


def ergodic_decomposition(measure: LatticeMeasure) -> dict[int, Fraction]:
    """Coefficients of an Ad-invariant measure over the class-uniform extremes."""
    if not is_ad_invariant(measure):
        raise DomainError("measure is not conjugation-invariant")
    out = {}
    for c, cls in enumerate(measure.lattice.conjugacy_classes):
        total = sum((measure.mass[i] for i in cls), Fraction(0))
        if total > 0:
            out[c] = total
    return out


# ---------------------------------------------------------------------------
# TNF checks


@dataclass(frozen=True)
class TnfReport:
    """The three equivalent total-nonfreeness conditions, checked separately."""
    condition1: bool  # iso-stable partition separates positive-mass points
    condition2: bool  # all positive-mass pairs have distinct stabilizers
    condition3: bool  # stabilizer map is injective on positive-mass points

    @property
    def tnf(self) -> bool:
        return self.condition1 and self.condition2 and self.condition3


def is_tnf(action: FiniteAction) -> TnfReport:
    positive = [x for x in action.points if action.measure[x] > 0]
    stab = {x: frozenset(g for g in action.group.elements
                         if action.table[(g, x)] == x)
            for x in positive}
    positive_set = set(positive)

    cond1 = all(len([x for x in block if x in positive_set]) <= 1
                for block in iso_stable_partition(action))
    cond2 = all(stab[x] != stab[y]
                for x, y in itertools.combinations(positive, 2))
    cond3 = len(set(stab.values())) == len(positive)
    return TnfReport(cond1, cond2, cond3)


def check_transitive_tnf(lattice: SubgroupLattice, i: int) -> bool:
    """Whether the coset action on G/H_i is totally nonfree.

    Equals self-normalizedness of H_i; both sides are computed independently
    so the equality is a real check, not a tautology.
    """
    if not 0 <= i < len(lattice.subgroups):
        raise DomainError(f"subgroup index {i} out of range")
    action = coset_action(lattice.ambient, lattice.subgroups[i])
    return is_tnf(action).tnf


def _orbit(action: FiniteAction, elements: Sequence[Permutation], start) -> set:
    orbit = {start}
    frontier = [start]
    while frontier:
        new = []
        for x in frontier:
            for g in elements:
                y = action.table[(g, x)]
                if y not in orbit:
                    orbit.add(y)
                    new.append(y)
        frontier = new
    return orbit


def is_k_transitive(action: FiniteAction, k: int, variant: str = "complement") -> bool:
    """Whether every joint stabilizer of k distinct points acts transitively.

    variant="whole-space": transitivity is demanded on all points (the
    literal measure-theoretic reading; false for faithful point actions
    because a stabilizer fixes its own tuple).
    variant="complement": transitivity on the points outside the tuple (the
    classical combinatorial reading).
    """
    if variant not in ("whole-space", "complement"):
        raise DomainError(f"unknown variant {variant!r}")
    if k < 1:
        raise DomainError("k must be at least 1")
    if k > len(action.points):
        raise DomainError(f"k = {k} exceeds the point count {len(action.points)}")
    for combo in itertools.combinations(action.points, k):
        stab_elements = [g for g in action.group.elements
                         if all(action.table[(g, x)] == x for x in combo)]
        if variant == "whole-space":
            targets = list(action.points)
        else:
            targets = [x for x in action.points if x not in combo]
        if len(targets) <= 1:
            continue
        if _orbit(action, stab_elements, targets[0]) < set(targets):
            return False
    return True
