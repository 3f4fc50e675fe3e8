"""Ordered partitions of ``{0, ..., d-1}``, chains of subsets, and refinement.

Indices are 0-based throughout the library.  String forms and serialized
files use the 1-based labels that are conventional for these objects, so
``OrderedPartition.of({0}, {1, 2})`` prints as ``({1},{2,3})``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

MAX_ENUMERATION_D = 10


def _fmt_set(s: Iterable[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in sorted(s)) + "}"


def subsets_in_order(items: Iterable[int]) -> list[frozenset[int]]:
    """Nonempty subsets of ``items`` ordered by cardinality, then lexicographically."""
    pool = sorted(items)
    out = []
    for k in range(1, len(pool) + 1):
        out.extend(frozenset(c) for c in combinations(pool, k))
    return out


@dataclass(frozen=True)
class OrderedPartition:
    """A sequence of disjoint nonempty blocks whose union is ``{0, ..., d-1}``."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(int(i) for i in b) for b in self.blocks)
        if not blocks:
            raise ValueError("an ordered partition needs at least one block")
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise ValueError("blocks must be nonempty")
            if seen & b:
                raise ValueError(f"blocks overlap at {sorted(seen & b)}")
            seen |= b
        if seen != set(range(len(seen))):
            raise ValueError(f"blocks must cover 0..{len(seen) - 1}, got {sorted(seen)}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, *blocks: Iterable[int]) -> "OrderedPartition":
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def trivial(cls, d: int) -> "OrderedPartition":
        return cls((frozenset(range(d)),))

    @classmethod
    def discrete(cls, order: Sequence[int]) -> "OrderedPartition":
        """One singleton block per index, in the given order."""
        return cls(tuple(frozenset((i,)) for i in order))

    @classmethod
    def from_labels(cls, blocks: Iterable[Iterable[int]]) -> "OrderedPartition":
        """Build from 1-based labels, as found in files."""
        return cls(tuple(frozenset(int(i) - 1 for i in b) for b in blocks))

    def to_labels(self) -> list[list[int]]:
        return [sorted(i + 1 for i in b) for b in self.blocks]

    @property
    def d(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def r(self) -> int:
        return len(self.blocks)

    @property
    def dim(self) -> int:
        """Dimension of the face this partition names."""
        return self.d - self.r

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, k: int) -> frozenset[int]:
        return self.blocks[k]

    def __str__(self) -> str:
        return "(" + ",".join(_fmt_set(b) for b in self.blocks) + ")"

    def block_index(self) -> dict[int, int]:
        """Map each index to the position of its block."""
        return {n: k for k, b in enumerate(self.blocks) for n in b}

    def row_blocks(self) -> tuple[range, ...]:
        """Consecutive row ranges occupied by the blocks in a direct sum."""
        out, start = [], 0
        for b in self.blocks:
            out.append(range(start, start + len(b)))
            start += len(b)
        return tuple(out)

    def chain(self) -> "Chain":
        sets, acc = [], frozenset()
        for b in reversed(self.blocks):
            acc = acc | b
            sets.append(acc)
        return Chain(tuple(reversed(sets)))

    def refines(self, other: "OrderedPartition") -> bool:
        """``self`` is a refinement of ``other``."""
        return is_refinement(self, other)


@dataclass(frozen=True)
class Chain:
    """A strictly decreasing chain ``{0..d-1} = K_1 > K_2 > ... > K_r``, ``K_r`` nonempty."""

    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        if not sets:
            raise ValueError("a chain needs at least one set")
        d = len(sets[0])
        if sets[0] != frozenset(range(d)):
            raise ValueError("the first member of a chain must be the full index set")
        if not sets[-1]:
            raise ValueError("the last member of a chain must be nonempty")
        for big, small in zip(sets, sets[1:]):
            if not (small < big):
                raise ValueError("chain inclusions must be strict")
        object.__setattr__(self, "sets", sets)

    @property
    def d(self) -> int:
        return len(self.sets[0])

    def __len__(self) -> int:
        return len(self.sets)

    def __str__(self) -> str:
        return " > ".join(_fmt_set(s) for s in self.sets)

    def partition(self) -> OrderedPartition:
        diffs = [a - b for a, b in zip(self.sets, self.sets[1:])]
        return OrderedPartition(tuple(diffs) + (self.sets[-1],))

    def smallest_containing(self, s: frozenset[int]) -> int:
        """Position of the smallest chain member that includes ``s``."""
        for k in range(len(self.sets) - 1, -1, -1):
            if s <= self.sets[k]:
                return k
        raise ValueError("set is not contained in the chain")


def chain_partition(x: Chain | OrderedPartition) -> Chain | OrderedPartition:
    """Convert a chain to its ordered partition and vice versa."""
    if isinstance(x, Chain):
        return x.partition()
    if isinstance(x, OrderedPartition):
        return x.chain()
    raise TypeError(f"expected Chain or OrderedPartition, got {type(x).__name__}")


def is_refinement(fine: OrderedPartition, coarse: OrderedPartition) -> bool:
    """True iff ``fine`` splits each block of ``coarse`` in place, keeping block order."""
    if fine.d != coarse.d:
        raise ValueError("partitions of different index sets")
    k = 0
    for block in coarse.blocks:
        acc: frozenset[int] = frozenset()
        while acc != block:
            if k >= len(fine.blocks) or not fine.blocks[k] <= block:
                return False
            acc = acc | fine.blocks[k]
            k += 1
    return k == len(fine.blocks)


def _ordered_partitions(pool: frozenset[int]) -> Iterator[tuple[frozenset[int], ...]]:
    if not pool:
        yield ()
        return
    for first in subsets_in_order(pool):
        for rest in _ordered_partitions(pool - first):
            yield (first,) + rest


def enumerate_ordered_partitions(d: int) -> Iterator[OrderedPartition]:
    """Yield every ordered partition of ``{0..d-1}`` exactly once.

    The count is the ordered Bell number (1, 3, 13, 75, 541, ...).  Output is
    lazy because the d = 10 case has about 10^8 members.
    """
    if not 1 <= d <= MAX_ENUMERATION_D:
        raise ValueError(f"d must be in 1..{MAX_ENUMERATION_D}, got {d}")
    for blocks in _ordered_partitions(frozenset(range(d))):
        yield OrderedPartition(blocks)


def coarsenings_by_one(p: OrderedPartition) -> list[OrderedPartition]:
    """Partitions obtained by merging two adjacent blocks (covers in the refinement order)."""
    out = []
    for k in range(len(p.blocks) - 1):
        merged = p.blocks[:k] + (p.blocks[k] | p.blocks[k + 1],) + p.blocks[k + 2:]
        out.append(OrderedPartition(merged))
    return out


def refinements_by_one(p: OrderedPartition) -> list[OrderedPartition]:
    """Partitions obtained by splitting one block into an ordered pair."""
    out = []
    for k, block in enumerate(p.blocks):
        for first in subsets_in_order(block):
            if first == block:
                continue
            split = (first, block - first)
            out.append(OrderedPartition(p.blocks[:k] + split + p.blocks[k + 1:]))
    return out
