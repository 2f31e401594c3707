"""The complete fan whose maximal cones are indexed by permutations.

Ground set {1, ..., n+1}, ambient lattice Z^n with basis eps_1, ..., eps_n
and the convention eps_{n+1} = 0.  Every nonempty proper subset S gives a
ray:

    u_S = sum_{s in S} eps_s                 if n+1 not in S,
    u_S = -sum_{s not in S} eps_s            if n+1 in S,

and every permutation v of {1,...,n+1} gives a maximal cone spanned by the
rays of its chain S_1 < ... < S_n, where S_p collects the last p values of
the one-line notation: S_p = {v(n+2-p), ..., v(n+1)}.

Permutations are plain tuples in one-line notation with values 1..n+1.
"""

from __future__ import annotations

import itertools
from typing import Iterator

from .fans import Chain, Fan, InvalidChain, PermTuple, Ray, RayLabel, Subset

__all__ = [
    "Subset",
    "Chain",
    "InvalidChain",
    "InvalidDimension",
    "InvalidRayLabel",
    "check_permutation",
    "multiply",
    "adjacent_transposition",
    "proper_subsets",
    "perm_ray_vector",
    "chain_of_permutation",
    "permutation_of_chain",
    "all_chains",
    "perm_fan",
]


class InvalidDimension(ValueError):
    """Requested dimension is not a positive integer."""


class InvalidRayLabel(ValueError):
    """Subset cannot label a ray (wrong ground set, empty, or full)."""


def check_permutation(v: tuple[int, ...]) -> None:
    """Raise unless v is a permutation of {1, ..., len(v)} in one-line notation."""
    if sorted(v) != list(range(1, len(v) + 1)):
        raise ValueError(f"{v} is not a permutation of 1..{len(v)}")


def multiply(v: tuple[int, ...], w: tuple[int, ...]) -> tuple[int, ...]:
    """Composition (v * w)(k) = v(w(k))."""
    if len(v) != len(w):
        raise ValueError("permutations act on different sets")
    return tuple(v[w[k] - 1] for k in range(len(w)))


def adjacent_transposition(g: int, i: int) -> tuple[int, ...]:
    """The transposition swapping i and i+1 inside {1, ..., g}."""
    if not 1 <= i < g:
        raise ValueError(f"no adjacent transposition at {i} in 1..{g}")
    out = list(range(1, g + 1))
    out[i - 1], out[i] = out[i], out[i - 1]
    return tuple(out)


def proper_subsets(ground: int) -> Iterator[Subset]:
    """All nonempty proper subsets of {1,...,ground}, ascending by bitmask."""
    for mask in range(1, (1 << ground) - 1):
        yield Subset(ground, mask)


def perm_ray_vector(n: int, s: Subset) -> tuple[int, ...]:
    """Primitive ray generator u_S in Z^n."""
    if n < 1:
        raise InvalidDimension(f"dimension must be positive, got {n}")
    if s.ground != n + 1:
        raise InvalidRayLabel(f"subset ground {s.ground}, expected {n + 1}")
    if not s.is_proper_nonempty():
        raise InvalidRayLabel(f"subset {s} must be nonempty and proper")
    vec = [0] * n
    if (n + 1) in s:
        for e in s.complement().members():
            vec[e - 1] = -1
    else:
        for e in s.members():
            vec[e - 1] = 1
    return tuple(vec)


def chain_of_permutation(v: tuple[int, ...]) -> Chain:
    """Chain of a permutation: S_p holds the last p values of one-line v."""
    check_permutation(v)
    g = len(v)
    if g < 2:
        raise InvalidDimension(f"need at least 2 symbols, got {g}")
    mask = 0
    sets = []
    for p in range(1, g):
        mask |= 1 << (v[g - p] - 1)
        sets.append(Subset(g, mask))
    return Chain(g, tuple(sets))


def permutation_of_chain(c: Chain) -> tuple[int, ...]:
    """Inverse of chain_of_permutation."""
    g = c.ground
    out = [0] * g
    prev = 0
    for p, s in enumerate(c.sets, start=1):
        added = s.mask & ~prev
        out[g - p] = added.bit_length()  # single bit: index of the new element
        prev = s.mask
    out[0] = (((1 << g) - 1) ^ prev).bit_length()
    return tuple(out)


def all_chains(n: int) -> list[Chain]:
    """Chains of all (n+1)! permutations, in lexicographic order of one-line tuples."""
    if n < 1:
        raise InvalidDimension(f"dimension must be positive, got {n}")
    return [chain_of_permutation(v) for v in itertools.permutations(range(1, n + 2))]


def perm_fan(n: int) -> Fan:
    """The full fan in Z^n: 2^{n+1} - 2 rays, (n+1)! maximal cones."""
    if n < 1:
        raise InvalidDimension(f"dimension must be positive, got {n}")
    rays = tuple(Ray(RayLabel(1, s), perm_ray_vector(n, s)) for s in proper_subsets(n + 1))
    index = {ray.label.subset: i for i, ray in enumerate(rays)}
    maxcones: list[tuple[int, ...]] = []
    perm_tuples: list[PermTuple] = []
    for v in itertools.permutations(range(1, n + 2)):
        c = chain_of_permutation(v)
        maxcones.append(tuple(sorted(index[s] for s in c)))
        perm_tuples.append((v,))
    return Fan((n,), rays, tuple(maxcones), tuple(perm_tuples))
