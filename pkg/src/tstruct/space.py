"""Finite posets standing in for the underlying space of a Noetherian scheme.

A point ``x`` specializes to ``y`` (written ``x ~> y``) when ``y`` lies in the
closure of ``x``.  Closed sets are the specialization-closed point sets and
open sets the generization-closed ones.  Point sets are handled internally as
integer bitmasks over the point indices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import CodimError, CycleError, DuplicatePoint, NotClosed, NotOpen, UnknownPoint

INF = math.inf


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=False)
class SpaceModel:
    ids: tuple[str, ...]
    codim: tuple[int, ...]
    # closure_masks[i] = bitmask of {j : i ~> j}, reflexive and transitive
    closure_masks: tuple[int, ...]
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {x: i for i, x in enumerate(self.ids)})

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SpaceModel)
            and self.ids == other.ids
            and self.codim == other.codim
            and self.closure_masks == other.closure_masks
        )

    def __hash__(self) -> int:
        return hash((self.ids, self.codim, self.closure_masks))

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def generization_masks(self) -> tuple[int, ...]:
        """``generization_masks[j]`` = {i : i ~> j}, the minimal open neighbourhood of j."""
        return tuple(
            sum(1 << i for i in range(self.n) if self.closure_masks[i] >> j & 1) for j in range(self.n)
        )

    @cached_property
    def strict_pairs(self) -> tuple[tuple[int, int], ...]:
        """All ``(x, y)`` with ``x ~> y`` and ``x != y``."""
        return tuple((x, y) for x in range(self.n) for y in bits(self.closure_masks[x]) if y != x)

    @cached_property
    def cover_pairs(self) -> tuple[tuple[int, int], ...]:
        out = []
        for x, y in self.strict_pairs:
            between = self.closure_masks[x] & self.generization_masks[y] & ~(1 << x) & ~(1 << y)
            if not between:
                out.append((x, y))
        return tuple(out)

    def idx(self, point: str) -> int:
        try:
            return self.index[point]
        except KeyError:
            raise UnknownPoint(point) from None

    def mask_of(self, points: Iterable[str]) -> int:
        m = 0
        for p in points:
            m |= 1 << self.idx(p)
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.ids[i] for i in bits(mask))

    def specializes(self, x: str, y: str) -> bool:
        return bool(self.closure_masks[self.idx(x)] >> self.idx(y) & 1)

    def is_closed_mask(self, mask: int) -> bool:
        return all(self.closure_masks[i] & ~mask == 0 for i in bits(mask))

    def is_open_mask(self, mask: int) -> bool:
        return all(self.generization_masks[i] & ~mask == 0 for i in bits(mask))

    def closure_of_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.closure_masks[i]
        return out

    def open_hull_of_mask(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.generization_masks[i]
        return out

    def closed_masks(self) -> list[int]:
        """Every closed subset, as bitmasks, in increasing numeric order."""
        return [m for m in range(1 << self.n) if self.is_closed_mask(m)]

    def open_masks(self) -> list[int]:
        return [m for m in range(1 << self.n) if self.is_open_mask(m)]

    def restrict(self, open_mask: int) -> "SpaceModel":
        """The open subspace on ``open_mask``; point order is preserved."""
        if not self.is_open_mask(open_mask):
            raise NotOpen(sorted(self.names(open_mask)))
        keep = list(bits(open_mask))
        pos = {old: new for new, old in enumerate(keep)}
        closure = tuple(
            sum(1 << pos[j] for j in bits(self.closure_masks[i] & open_mask)) for i in keep
        )
        return SpaceModel(tuple(self.ids[i] for i in keep), tuple(self.codim[i] for i in keep), closure)

    def relabel(self, perm: Sequence[int]) -> "SpaceModel":
        """Space with point ``i`` renamed to position ``perm[i]``."""
        inv = [0] * self.n
        for i, j in enumerate(perm):
            inv[j] = i
        ids = tuple(self.ids[inv[j]] for j in range(self.n))
        codim = tuple(self.codim[inv[j]] for j in range(self.n))
        closure = tuple(sum(1 << perm[k] for k in bits(self.closure_masks[inv[j]])) for j in range(self.n))
        return SpaceModel(ids, codim, closure)

    @cached_property
    def automorphisms(self) -> tuple[tuple[int, ...], ...]:
        """Permutations of the points preserving the order and the codimension."""
        out = []
        for perm in itertools.permutations(range(self.n)):
            if any(self.codim[i] != self.codim[perm[i]] for i in range(self.n)):
                continue
            if all(
                (self.closure_masks[i] >> j & 1) == (self.closure_masks[perm[i]] >> perm[j] & 1)
                for i in range(self.n)
                for j in range(self.n)
            ):
                out.append(perm)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "points": [{"id": x, "codim": c} for x, c in zip(self.ids, self.codim)],
            "specializations": [[self.ids[x], self.ids[y]] for x, y in self.cover_pairs],
        }


@dataclass(frozen=True)
class ClosedSet:
    space: SpaceModel
    mask: int

    def __post_init__(self):
        if not self.space.is_closed_mask(self.mask):
            raise NotClosed(sorted(self.space.names(self.mask)))

    @classmethod
    def of(cls, space: SpaceModel, points: Iterable[str]) -> "ClosedSet":
        return cls(space, space.mask_of(points))

    @property
    def members(self) -> frozenset[str]:
        return self.space.names(self.mask)

    def __or__(self, other: "ClosedSet") -> "ClosedSet":
        return ClosedSet(self.space, self.mask | other.mask)

    def __and__(self, other: "ClosedSet") -> "ClosedSet":
        return ClosedSet(self.space, self.mask & other.mask)


def validate_space(
    points: Sequence[str], edges: Iterable[tuple[str, str]], codim: dict[str, int] | Sequence[int]
) -> SpaceModel:
    """Build a space from generic->special edges, closing the relation transitively."""
    ids = tuple(points)
    seen = set()
    for x in ids:
        if x in seen:
            raise DuplicatePoint(x)
        seen.add(x)
    index = {x: i for i, x in enumerate(ids)}
    n = len(ids)
    if isinstance(codim, dict):
        missing = [x for x in ids if x not in codim]
        if missing:
            raise CodimError(f"no codim for {missing}")
        unknown = [x for x in codim if x not in index]
        if unknown:
            raise UnknownPoint(unknown[0])
        cod = tuple(int(codim[x]) for x in ids)
    else:
        cod = tuple(int(c) for c in codim)
        if len(cod) != n:
            raise CodimError("codim list length differs from the number of points")
    if any(c < 0 for c in cod):
        raise CodimError("codim must be non-negative")

    reach = [1 << i for i in range(n)]
    for a, b in edges:
        if a not in index:
            raise UnknownPoint(a)
        if b not in index:
            raise UnknownPoint(b)
        reach[index[a]] |= 1 << index[b]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = reach[i]
            for j in bits(reach[i]):
                acc |= reach[j]
            if acc != reach[i]:
                reach[i] = acc
                changed = True
    for i in range(n):
        for j in bits(reach[i]):
            if j != i and reach[j] >> i & 1:
                raise CycleError(f"{ids[i]} and {ids[j]} specialize to each other")
            if j != i and cod[j] <= cod[i]:
                raise CodimError(f"codim({ids[j]})={cod[j]} not above codim({ids[i]})={cod[i]}")
    return SpaceModel(ids, cod, tuple(reach))


def closure(space: SpaceModel, x: str) -> ClosedSet:
    return ClosedSet(space, space.closure_masks[space.idx(x)])


def codim_of_set(space: SpaceModel, z: ClosedSet | int) -> float:
    mask = z.mask if isinstance(z, ClosedSet) else z
    if not space.is_closed_mask(mask):
        raise NotClosed(sorted(space.names(mask)))
    return min((space.codim[i] for i in bits(mask)), default=INF)


def irreducible_components(space: SpaceModel, z: ClosedSet | int) -> list[str]:
    """Generic points of the components: the minimal points of ``z``."""
    mask = z.mask if isinstance(z, ClosedSet) else z
    if not space.is_closed_mask(mask):
        raise NotClosed(sorted(space.names(mask)))
    return [
        space.ids[i]
        for i in bits(mask)
        if not any(j != i and space.closure_masks[j] >> i & 1 for j in bits(mask))
    ]


# -- named spaces ---------------------------------------------------------------


def point() -> SpaceModel:
    return validate_space(["pt"], [], {"pt": 0})


def sier() -> SpaceModel:
    """Two points: generic ``eta`` specializing to the closed point ``x``."""
    return validate_space(["eta", "x"], [("eta", "x")], {"eta": 0, "x": 1})


def chain3() -> SpaceModel:
    return validate_space(["eta", "y", "x"], [("eta", "y"), ("y", "x")], {"eta": 0, "y": 1, "x": 2})


def vspace() -> SpaceModel:
    """Generic point with two closed points ``a`` and ``b``."""
    return validate_space(["eta", "a", "b"], [("eta", "a"), ("eta", "b")], {"eta": 0, "a": 1, "b": 1})


NAMED_SPACES = {"point": point, "SIER": sier, "CHAIN3": chain3, "VSPACE": vspace}


# -- enumeration ----------------------------------------------------------------


def _canonical(n: int, rel: frozenset[tuple[int, int]]) -> tuple:
    return min(tuple(sorted((p[i], p[j]) for i, j in rel)) for p in itertools.permutations(range(n)))


def enumerate_posets(n: int) -> list[frozenset[tuple[int, int]]]:
    """One strict order relation per isomorphism class of ``n``-element posets.

    Relations are listed as ``(i, j)`` pairs with ``i ~> j``; every relation
    returned is transitively closed and ordered compatibly with ``i < j``.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    found: dict[tuple, frozenset] = {}
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        rel = frozenset(p for p, b in zip(pairs, choice) if b)
        if any((i, k) not in rel for (i, j) in rel for (j2, k) in rel if j == j2):
            continue
        key = _canonical(n, rel)
        found.setdefault(key, rel)
    return [found[k] for k in sorted(found)]


def enumerate_spaces(max_points: int, max_codim: int = 3, min_points: int = 1) -> Iterator[SpaceModel]:
    """Every poset up to isomorphism with every strictly monotone codim in ``[0, max_codim]``."""
    for n in range(min_points, max_points + 1):
        ids = [f"p{i}" for i in range(n)]
        for rel in enumerate_posets(n):
            for cod in itertools.product(range(max_codim + 1), repeat=n):
                if any(cod[j] <= cod[i] for i, j in rel):
                    continue
                yield validate_space(ids, [(ids[i], ids[j]) for i, j in rel], list(cod))
