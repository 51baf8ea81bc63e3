"""Signed partitions of a finite window and the subgroups they define.

A signed partition labels the points 1..window with integers.  Positive
labels name blocks carrying the full symmetric group on the block, negative
labels name blocks carrying only its even part, and label 0 puts a point in
the rigid singleton pool.  The subgroup attached to such a labeling is the
direct product of the per-block factors.

Objects here are finite windows onto the infinite model, so two labelings
describe the same subgroup exactly when they agree up to a sign-preserving
renaming of the block labels.  Block-for-block swaps by a permutation are
possible on a window but have no infinite counterpart (a finitely supported
permutation cannot exchange two infinite blocks); ``is_fixed`` therefore
asks for literal label preservation, the event whose probability the
closed-form fixed-point measure computes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import DomainError, WindowError
from .perms import Permutation


@dataclass(frozen=True)
class SignedPartition:
    """Integer labels for the points 1..window; labels[x-1] is the label of x."""

    window: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.window < 1:
            raise DomainError("window must be at least 1")
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        if len(self.labels) != self.window:
            raise DomainError(
                f"expected {self.window} labels, got {len(self.labels)}")

    def label(self, x: int) -> int:
        if not 1 <= x <= self.window:
            raise WindowError(f"point {x} is outside the window 1..{self.window}")
        return self.labels[x - 1]

    def blocks(self) -> dict[int, tuple[int, ...]]:
        """Nonzero labels mapped to their points, in first-occurrence order."""
        out: dict[int, list[int]] = {}
        for x, lab in enumerate(self.labels, start=1):
            if lab != 0:
                out.setdefault(lab, []).append(x)
        return {lab: tuple(pts) for lab, pts in out.items()}

    def pool(self) -> tuple[int, ...]:
        """The 0-labeled points (each its own rigid singleton)."""
        return tuple(x for x, lab in enumerate(self.labels, start=1) if lab == 0)

    def canonical(self) -> "SignedPartition":
        """Rename labels to 1,2,... and -1,-2,... by first occurrence."""
        pos: dict[int, int] = {}
        neg: dict[int, int] = {}
        out = []
        for lab in self.labels:
            if lab > 0:
                out.append(pos.setdefault(lab, len(pos) + 1))
            elif lab < 0:
                out.append(neg.setdefault(lab, -(len(neg) + 1)))
            else:
                out.append(0)
        return SignedPartition(self.window, tuple(out))

    def to_json(self) -> dict:
        return {"window": self.window, "labels": list(self.labels)}

    @classmethod
    def from_json(cls, data) -> "SignedPartition":
        if isinstance(data, str):
            data = json.loads(data)
        if not isinstance(data, dict) or set(data) != {"window", "labels"}:
            raise DomainError(
                'signed partition JSON must be {"window": n, "labels": [...]}')
        return cls(int(data["window"]), tuple(data["labels"]))


class SignedYoungSubgroup:
    """The product subgroup defined by a signed partition of a window."""

    __slots__ = ("partition", "_canon")

    def __init__(self, partition: SignedPartition):
        self.partition = partition
        self._canon = partition.canonical()

    @property
    def window(self) -> int:
        return self.partition.window

    def _check_window(self, g: Permutation) -> None:
        if g.support and max(g.support) > self.window:
            raise WindowError(
                f"{g} moves a point beyond the window 1..{self.window}")

    def contains(self, g: Permutation) -> bool:
        """Membership: blocks preserved pointwise on labels, pool fixed,
        even restriction on every negative block."""
        self._check_window(g)
        labels = self.partition.labels
        for x in g.support:
            lab = labels[x - 1]
            if lab == 0:
                return False
            if labels[g(x) - 1] != lab:
                return False
        for lab, block in self.partition.blocks().items():
            if lab >= 0:
                continue
            moved = {x: g(x) for x in block if g(x) != x}
            if moved and Permutation(moved).parity() < 0:
                return False
        return True

    __contains__ = contains

    def ad_image(self, g: Permutation) -> "SignedYoungSubgroup":
        """Conjugation moves labels along g: the image labels g(x) as x was."""
        self._check_window(g)
        labels = self.partition.labels
        out = list(labels)
        for x in g.support:
            out[g(x) - 1] = labels[x - 1]
        return SignedYoungSubgroup(SignedPartition(self.window, tuple(out)))

    def is_fixed(self, g: Permutation) -> bool:
        """Literal label preservation: every cycle of g is monochromatic.

        Implies ad_image(g) == self; the converse can fail on a window when
        g swaps two equal-size blocks, which the infinite model rules out.
        """
        self._check_window(g)
        labels = self.partition.labels
        return all(labels[g(x) - 1] == labels[x - 1] for x in g.support)

    def normalizer_symbolic(self) -> "SignedYoungSubgroup":
        """The normalizer, by the closed form: negative blocks turn positive
        (the even part is normalized by the whole block group) and a pool of
        two or more points merges into one positive block.  A pool of at
        most one point stays as it is."""
        labels = list(self.partition.labels)
        fresh = max((abs(v) for v in labels), default=0) + 1
        flip = {}
        for i, lab in enumerate(labels):
            if lab < 0:
                if lab not in flip:
                    flip[lab] = fresh
                    fresh += 1
                labels[i] = flip[lab]
        if sum(1 for lab in labels if lab == 0) >= 2:
            merged = fresh
            labels = [merged if lab == 0 else lab for lab in labels]
        return SignedYoungSubgroup(SignedPartition(self.window, tuple(labels)))

    def is_self_normalizing(self) -> bool:
        return self.normalizer_symbolic() == self

    def check_n2_equals_n(self) -> bool:
        """Whether the normalizer is its own normalizer (one step suffices)."""
        n1 = self.normalizer_symbolic()
        return n1.normalizer_symbolic() == n1

    def summary(self) -> dict:
        """Shape facts for reports: block sizes by sign and the pool size."""
        sizes_pos = sorted((len(b) for lab, b in self.partition.blocks().items()
                            if lab > 0), reverse=True)
        sizes_neg = sorted((len(b) for lab, b in self.partition.blocks().items()
                            if lab < 0), reverse=True)
        return {
            "window": self.window,
            "positive_block_sizes": sizes_pos,
            "negative_block_sizes": sizes_neg,
            "pool_size": len(self.partition.pool()),
            "self_normalizing": self.is_self_normalizing(),
        }

    def __eq__(self, other) -> bool:
        return (isinstance(other, SignedYoungSubgroup)
                and self._canon == other._canon)

    def __hash__(self) -> int:
        return hash(self._canon)

    def __repr__(self) -> str:
        return f"SignedYoungSubgroup({self._canon.labels})"
