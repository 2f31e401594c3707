"""Shared combinatorial types: subsets, chains, labeled rays, fans.

A fan here is always simplicial and carried with its bookkeeping: rays are
labeled by (stage, subset), maximal cones are tuples of ray indices, and
each maximal cone remembers the tuple of permutations that produced it.
Subsets of {1,...,g} are bitmasks (bit i-1 is element i), which makes
complements, inclusion tests, and deterministic ordering cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

PermTuple = tuple[tuple[int, ...], ...]


class InvalidChain(ValueError):
    """Subsets do not form a full strictly increasing chain."""


@dataclass(frozen=True, order=True)
class Subset:
    """Subset of the ground set {1, ..., ground}, stored as a bitmask."""

    ground: int
    mask: int

    def __post_init__(self):
        if self.ground < 1:
            raise ValueError(f"ground set size must be positive, got {self.ground}")
        if not 0 <= self.mask < (1 << self.ground):
            raise ValueError(f"mask {self.mask:#b} out of range for ground {self.ground}")

    @classmethod
    def of(cls, ground: int, members: Iterable[int]) -> Subset:
        mask = 0
        for e in members:
            if not 1 <= e <= ground:
                raise ValueError(f"element {e} outside ground set of size {ground}")
            mask |= 1 << (e - 1)
        return cls(ground, mask)

    def members(self) -> tuple[int, ...]:
        return tuple(e for e in range(1, self.ground + 1) if self.mask >> (e - 1) & 1)

    def __contains__(self, e: int) -> bool:
        return 1 <= e <= self.ground and bool(self.mask >> (e - 1) & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def complement(self) -> Subset:
        return Subset(self.ground, ((1 << self.ground) - 1) ^ self.mask)

    def is_proper_nonempty(self) -> bool:
        return 0 < self.mask < (1 << self.ground) - 1

    def __str__(self) -> str:
        return "{" + ",".join(str(e) for e in self.members()) + "}"


@dataclass(frozen=True)
class Chain:
    """Full flag of subsets S_1 < S_2 < ... < S_{g-1} of {1,...,g}, |S_p| = p."""

    ground: int
    sets: tuple[Subset, ...]

    def __post_init__(self):
        g = self.ground
        if g < 2:
            raise InvalidChain(f"ground set size must be at least 2, got {g}")
        if len(self.sets) != g - 1:
            raise InvalidChain(f"need {g - 1} subsets, got {len(self.sets)}")
        prev = 0
        for p, s in enumerate(self.sets, start=1):
            if s.ground != g:
                raise InvalidChain(f"subset ground {s.ground} does not match chain ground {g}")
            if len(s) != p:
                raise InvalidChain(f"subset at position {p} has size {len(s)}")
            if prev & ~s.mask:
                raise InvalidChain(f"subsets at positions {p - 1} and {p} are not nested")
            prev = s.mask

    def __iter__(self) -> Iterator[Subset]:
        return iter(self.sets)


@dataclass(frozen=True, order=True)
class RayLabel:
    """Identity of a ray: which stage it belongs to and which subset names it."""

    stage: int
    subset: Subset

    def __str__(self) -> str:
        return f"{self.stage} {self.subset}"


@dataclass(frozen=True)
class Ray:
    label: RayLabel
    vector: tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    """Simplicial fan with labeled rays and permutation-indexed maximal cones.

    rays are sorted by (stage, subset mask); each maximal cone is a tuple of
    ray indices in ascending order; perm_tuples[i] is the tuple of one-line
    permutations (one per stage) that generated maxcones[i], so cones are in
    lexicographic order of those tuples.
    """

    dims: tuple[int, ...]
    rays: tuple[Ray, ...]
    maxcones: tuple[tuple[int, ...], ...]
    perm_tuples: tuple[PermTuple, ...]

    @property
    def n(self) -> int:
        return sum(self.dims)

    @cached_property
    def ray_index(self) -> dict[RayLabel, int]:
        return {ray.label: i for i, ray in enumerate(self.rays)}

    def cone_labels(self, i: int) -> frozenset[RayLabel]:
        return frozenset(self.rays[r].label for r in self.maxcones[i])
