"""Families of supports, support data and their calculus.

A support datum is stored as its supporting function ``p`` (one integer per
point, non-decreasing along specialization); the level families
``Phi^n = {z : p(z) >= n}`` are derived views.  Every operation exists in two
forms: array kernels (``*_batch``) acting on a stack of supporting functions of
shape ``(B, n_points)``, and the scalar API on :class:`SupportDatum` which
calls the kernels with ``B = 1``.

The kernels evaluate the level-set definitions literally (unions and
intersections of level families over a finite window of indices); only
:func:`residuate` uses the closed form ``min_{y in cl(x)} (theta(y) - phi(y))``.
The window bounds are chosen so that every level outside them is either the
full point set or empty.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import mutations
from .errors import NotBounded, NotDecreasing, NotMonotone, SpaceMismatch
from .space import SpaceModel, bits

# -- array kernels -------------------------------------------------------------


def closure_matrix(space: SpaceModel) -> np.ndarray:
    """``C[x, y]`` is 1 when ``x ~> y``."""
    c = np.zeros((space.n, space.n), dtype=np.int64)
    for x in range(space.n):
        for y in bits(space.closure_masks[x]):
            c[x, y] = 1
    return c


def _as2d(p) -> np.ndarray:
    a = np.asarray(p, dtype=np.int64)
    return a.reshape(1, -1) if a.ndim == 1 else a


def monotone_batch(space: SpaceModel, P: np.ndarray) -> np.ndarray:
    P = _as2d(P)
    ok = np.ones(P.shape[0], dtype=bool)
    for x, y in space.strict_pairs:
        ok &= P[:, y] >= P[:, x]
    return ok


def _max_level(members_at, n_lo: int, n_hi: int, shape) -> np.ndarray:
    """``max{n : members_at(n)}`` given full membership at ``n_lo`` and none at ``n_hi``."""
    first = members_at(n_lo)
    if not first.all():
        raise NotBounded(f"level {n_lo} is not the full point set")
    out = np.full(shape, n_lo, dtype=np.int64)
    prev = first
    for n in range(n_lo + 1, n_hi + 1):
        cur = members_at(n)
        if (cur & ~prev).any():
            raise NotDecreasing(f"level {n} is not contained in level {n - 1}")
        out[cur] = n
        prev = cur
    if prev.any():
        raise NotBounded(f"level {n_hi} is not empty")
    return out


def convolve_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Levels ``(Phi o Psi)^n = union over i+j=n of Phi^i meet Psi^j``."""
    P, Q = np.broadcast_arrays(_as2d(P), _as2d(Q))
    if P.size == 0:
        return P.copy()
    plo, phi = int(P.min()), int(P.max())
    lo, hi = plo + int(Q.min()), phi + int(Q.max())

    def members(n):
        m = np.zeros(P.shape, dtype=bool)
        for i in range(plo, phi + 1):
            m |= (P >= i) & (Q >= n - i)
        return m

    return _max_level(members, lo, hi + 1, P.shape)


def convolve_meet_form_batch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Levels ``intersection over i+j=n+1 of (Phi^i join Psi^j)``; must equal :func:`convolve_batch`."""
    P, Q = np.broadcast_arrays(_as2d(P), _as2d(Q))
    if P.size == 0:
        return P.copy()
    plo, phi = int(P.min()), int(P.max())
    lo, hi = plo + int(Q.min()), phi + int(Q.max())

    def members(n):
        m = np.ones(P.shape, dtype=bool)
        for i in range(plo, phi + 2):
            m &= (P >= i) | (Q >= n + 1 - i)
        return m

    return _max_level(members, lo, hi + 1, P.shape)


def residual_levels_batch(
    space: SpaceModel, P: np.ndarray, T: np.ndarray, k_range: tuple[int, int], n_range: tuple[int, int]
) -> np.ndarray:
    """``max n`` with ``cl(x) meet Phi^k`` inside ``Theta^{k+n}`` for every ``k`` in ``k_range``.

    ``k_range`` is inclusive; ``n_range = (n_lo, n_hi)`` must bracket the answer
    (full membership at ``n_lo``, none at ``n_hi``).
    """
    P = _as2d(P)
    T = np.broadcast_to(_as2d(T), P.shape)
    C = closure_matrix(space)
    k_lo, k_hi = k_range

    def members(n):
        viol = np.zeros(P.shape, dtype=bool)
        for k in range(k_lo, k_hi + 1):
            viol |= (P >= k) & (T < k + n)
        return (viol.astype(np.int64) @ C.T) == 0

    return _max_level(members, n_range[0], n_range[1], P.shape)


def dual_star_batch(space: SpaceModel, P: np.ndarray) -> np.ndarray:
    """``Phi_*^n = {Z : Z meet Phi^k has codim >= n + k for every k}``."""
    P = _as2d(P)
    if P.size == 0:
        return P.copy()
    cod = np.asarray(space.codim, dtype=np.int64)
    plo, phi = int(P.min()), int(P.max())
    n_range = (int(cod.min()) - phi, int(cod.max()) - plo + 1)
    return residual_levels_batch(space, P, cod, (plo, phi), n_range)


def residuation_set_batch(space: SpaceModel, P: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Literal ``Psi^n = {Z : Phi^k meet Z inside Theta^{k+n} for every k}``."""
    P = _as2d(P)
    T = np.broadcast_to(_as2d(T), P.shape)
    plo, phi = int(P.min()), int(P.max())
    n_range = (int(T.min()) - phi, int(T.max()) - plo + 1)
    return residual_levels_batch(space, P, T, (plo, phi), n_range)


def psi_truncated_batch(space: SpaceModel, P: np.ndarray, T: np.ndarray, a: int) -> np.ndarray:
    """``(Psi_a)^n``: the residuation constraints for ``k <= a`` only."""
    P = _as2d(P)
    T = np.broadcast_to(_as2d(T), P.shape)
    plo, phi = int(P.min()), int(P.max())
    m_lo, m_hi = min(a, plo), min(a, phi)
    n_range = (int(T.min()) - m_hi, int(T.max()) - m_lo + 1)
    return residual_levels_batch(space, P, T, (m_lo, m_hi), n_range)


def residuate_closed_batch(space: SpaceModel, P: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Closed form ``p_Psi(x) = min over y in cl(x) of (p_Theta(y) - p_Phi(y))``."""
    P = _as2d(P)
    D = np.broadcast_to(_as2d(T), P.shape) - P
    out = np.empty_like(P)
    for x in range(space.n):
        cl = list(bits(space.closure_masks[x]))
        out[:, x] = D[:, cl].min(axis=1)
    return out


def sigma_leq_batch(P: np.ndarray, n: int) -> np.ndarray:
    return np.minimum(_as2d(P), n)


def jump_witness_batch(space: SpaceModel, P: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Index into ``space.strict_pairs`` of the first pair breaking
    ``0 <= p(y) - p(x) <= t(y) - t(x)``, or -1."""
    P = _as2d(P)
    T = np.broadcast_to(_as2d(T), P.shape)
    out = np.full(P.shape[0], -1, dtype=np.int64)
    for idx, (x, y) in enumerate(space.strict_pairs):
        dp = P[:, y] - P[:, x]
        bad = ((dp < 0) | (dp > T[:, y] - T[:, x])) & (out < 0)
        out[bad] = idx
    return out


@dataclass
class CriterionBatch:
    ii: np.ndarray
    iii: np.ndarray
    iv: np.ndarray
    v: np.ndarray
    pair_witness: np.ndarray  # index into space.strict_pairs or -1
    v_witness: list  # (n, k, point index) or None per datum

    @property
    def agree(self) -> np.ndarray:
        return (self.ii == self.iii) & (self.iii == self.iv) & (self.iv == self.v)


def criterion_batch(space: SpaceModel, P: np.ndarray) -> CriterionBatch:
    """Evaluate the four equivalent t-structure conditions on coherent objects."""
    P = _as2d(P)
    B = P.shape[0]
    cod = np.broadcast_to(np.asarray(space.codim, dtype=np.int64), P.shape)
    # (ii): jumps of p bounded by codim jumps along every specialization
    pair_w = jump_witness_batch(space, P, cod)
    ii = pair_w < 0
    # (iii): Phi o Phi_* = S
    iii = np.all(convolve_batch(P, dual_star_batch(space, P)) == cod, axis=1)
    # (iv): the residual of S by Phi is a solution
    psi = residuate_closed_batch(space, P, cod)
    iv = np.all(convolve_batch(P, psi) == cod, axis=1)
    # (v): (sigma^{<n} Phi)_*^k inside Phi^n join (sigma^{<=n} Phi)_*^k
    v = np.ones(B, dtype=bool)
    v_w: list = [None] * B
    if B:
        shift = 0 if mutations.active("sigma-convention") else 1
        for n in range(int(P.min()), int(P.max()) + 2):
            L = dual_star_batch(space, sigma_leq_batch(P, n - shift))
            R = dual_star_batch(space, sigma_leq_batch(P, n))
            k_lo = int(min(L.min(), R.min()))
            k_hi = int(max(L.max(), R.max())) + 1
            for k in range(k_lo, k_hi + 1):
                bad = (L >= k) & ~((P >= n) | (R >= k))
                rows = np.nonzero(bad.any(axis=1) & v)[0]
                for b in rows:
                    v[b] = False
                    v_w[b] = (n, k, int(np.nonzero(bad[b])[0][0]))
    return CriterionBatch(ii, iii, iv, v, pair_w, v_w)


def enumerate_data(space: SpaceModel, lo: int = -2, hi: int = 3) -> np.ndarray:
    """All supporting functions with values in ``[lo, hi]``, shape ``(N, n_points)``.

    Under the ``drop-monotonicity`` mutation every function is returned.
    """
    n = space.n
    if mutations.active("drop-monotonicity"):
        rows = list(itertools.product(range(lo, hi + 1), repeat=n))
        return np.array(rows, dtype=np.int64).reshape(len(rows), n)
    # points ordered so that generizations come first
    order = sorted(range(n), key=lambda i: (bin(space.generization_masks[i]).count("1"), i))
    rows = []
    cur = [0] * n

    def rec(t):
        if t == n:
            rows.append(tuple(cur))
            return
        x = order[t]
        floor = max((cur[g] for g in bits(space.generization_masks[x]) if g != x), default=lo)
        for v in range(floor, hi + 1):
            cur[x] = v
            rec(t + 1)

    rec(0)
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


# -- scalar API ------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyOfSupports:
    """A family of supports, encoded by the specialization-closed set of
    points whose closures belong to it.  A closed set is a member iff all
    of its points are."""

    space: SpaceModel
    mask: int

    def __post_init__(self):
        if not self.space.is_closed_mask(self.mask):
            raise ValueError("member points of a family of supports must be specialization-closed")

    @property
    def member_points(self) -> frozenset[str]:
        return self.space.names(self.mask)

    def contains(self, z) -> bool:
        zmask = z if isinstance(z, int) else z.mask
        return zmask & ~self.mask == 0

    def is_empty_family(self) -> bool:
        return self.mask == 0

    def __le__(self, other: "FamilyOfSupports") -> bool:
        _same_space(self, other)
        return self.mask & ~other.mask == 0


def _same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatch("objects live on different spaces")


def family_from_points(space: SpaceModel, pts: Iterable[str]) -> FamilyOfSupports:
    return FamilyOfSupports(space, space.closure_of_mask(space.mask_of(pts)))


def family_meet(a: FamilyOfSupports, b: FamilyOfSupports) -> FamilyOfSupports:
    _same_space(a, b)
    return FamilyOfSupports(a.space, a.mask & b.mask)


def family_join(a: FamilyOfSupports, b: FamilyOfSupports) -> FamilyOfSupports:
    _same_space(a, b)
    return FamilyOfSupports(a.space, a.mask | b.mask)


def full_family(space: SpaceModel) -> FamilyOfSupports:
    return FamilyOfSupports(space, space.full_mask)


def empty_family(space: SpaceModel) -> FamilyOfSupports:
    return FamilyOfSupports(space, 0)


@dataclass(frozen=True)
class SupportDatum:
    space: SpaceModel
    p: tuple[int, ...]
    arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(v) for v in self.p))
        if len(self.p) != self.space.n:
            raise ValueError("supporting function has the wrong number of values")
        object.__setattr__(self, "arr", np.asarray(self.p, dtype=np.int64).reshape(1, -1))
        if not mutations.active("drop-monotonicity"):
            for x, y in self.space.strict_pairs:
                if self.p[y] < self.p[x]:
                    raise NotMonotone(f"p({self.space.ids[y]}) < p({self.space.ids[x]})")

    @classmethod
    def from_map(cls, space: SpaceModel, p: Mapping[str, int]) -> "SupportDatum":
        missing = [x for x in space.ids if x not in p]
        if missing:
            raise ValueError(f"supporting function missing points {missing}")
        for x in p:
            space.idx(x)
        return cls(space, tuple(p[x] for x in space.ids))

    def __call__(self, x: str) -> int:
        return self.p[self.space.idx(x)]

    def as_map(self) -> dict[str, int]:
        return {x: v for x, v in sorted(zip(self.space.ids, self.p))}

    @property
    def lo(self) -> int:
        return min(self.p, default=0)

    @property
    def hi(self) -> int:
        return max(self.p, default=0)

    def level(self, n: int) -> FamilyOfSupports:
        return FamilyOfSupports(self.space, sum(1 << i for i, v in enumerate(self.p) if v >= n))

    def levels(self) -> dict[int, FamilyOfSupports]:
        """Levels over the active window ``[lo, hi + 1]``: full at ``lo``, empty at ``hi + 1``."""
        return {n: self.level(n) for n in range(self.lo, self.hi + 2)}

    def __le__(self, other: "SupportDatum") -> bool:
        _same_space(self, other)
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi) + 1
        return all(self.level(n) <= other.level(n) for n in range(lo, hi + 1))

    def meet(self, other: "SupportDatum") -> "SupportDatum":
        _same_space(self, other)
        return datum_from_levels(
            self.space,
            {n: family_meet(self.level(n), other.level(n)) for n in range(min(self.lo, other.lo), max(self.hi, other.hi) + 2)},
        )

    def join(self, other: "SupportDatum") -> "SupportDatum":
        _same_space(self, other)
        return datum_from_levels(
            self.space,
            {n: family_join(self.level(n), other.level(n)) for n in range(min(self.lo, other.lo), max(self.hi, other.hi) + 2)},
        )


@dataclass(frozen=True)
class NoSolution:
    """No datum ``Psi`` with ``Phi o Psi = Theta``; ``witness`` is a pair ``(x, y)``
    with ``y`` in the closure of ``x`` where the jump of ``Phi`` is out of range."""

    witness: tuple[str, str]
    candidate: SupportDatum


@dataclass(frozen=True)
class CriterionReport:
    ii: bool
    iii: bool
    iv: bool
    v: bool
    witness: tuple[str, str] | None
    v_witness: tuple[int, int, str] | None

    @property
    def holds(self) -> bool:
        return self.ii and self.iii and self.iv and self.v

    @property
    def consistent(self) -> bool:
        return self.ii == self.iii == self.iv == self.v

    def to_json(self) -> dict:
        return {
            "verdict": self.holds,
            "conditions": {"ii": self.ii, "iii": self.iii, "iv": self.iv, "v": self.v},
            "witness": list(self.witness) if self.witness else None,
            "level_witness": list(self.v_witness) if self.v_witness else None,
        }


def datum_from_levels(space: SpaceModel, levels: Mapping[int, FamilyOfSupports]) -> SupportDatum:
    """``p(x) = max{n : x in levels[n]}``.

    Indices below the smallest key are taken to be the full family and above
    the largest key the empty family, so the smallest given level must be full
    and the largest empty.
    """
    if not levels:
        raise NotBounded("no levels given")
    keys = sorted(levels)
    if keys != list(range(keys[0], keys[-1] + 1)):
        raise NotBounded("levels must be given on a contiguous range of indices")
    for k in keys:
        if levels[k].space != space:
            raise SpaceMismatch(f"level {k} lives on another space")
    if levels[keys[0]].mask != space.full_mask:
        raise NotBounded(f"level {keys[0]} is not everything")
    if levels[keys[-1]].mask != 0:
        raise NotBounded(f"level {keys[-1]} is not empty")
    for a, b in zip(keys, keys[1:]):
        if levels[b].mask & ~levels[a].mask:
            raise NotDecreasing(f"level {b} not contained in level {a}")
    p = [keys[0]] * space.n
    for k in keys:
        for i in bits(levels[k].mask):
            p[i] = k
    return SupportDatum(space, tuple(p))


def standard_T(space: SpaceModel) -> SupportDatum:
    return SupportDatum(space, (0,) * space.n)


def standard_S(space: SpaceModel) -> SupportDatum:
    return SupportDatum(space, space.codim)


def example_oco(space: SpaceModel) -> SupportDatum:
    """Level 0 everything, levels 1 and 2 the codimension >= 1 sets, empty above."""
    return SupportDatum(space, tuple(0 if c == 0 else 2 for c in space.codim))


def sigma_leq(phi: SupportDatum, n: int) -> SupportDatum:
    return SupportDatum(phi.space, tuple(sigma_leq_batch(phi.arr, n)[0]))


def convolve(phi: SupportDatum, psi: SupportDatum, check: bool = False) -> SupportDatum:
    _same_space(phi, psi)
    out = convolve_batch(phi.arr, psi.arr)
    if check:
        alt = convolve_meet_form_batch(phi.arr, psi.arr)
        assert np.array_equal(out, alt), "union and intersection level formulas disagree"
    return SupportDatum(phi.space, tuple(out[0]))


def dual_star(phi: SupportDatum) -> SupportDatum:
    return SupportDatum(phi.space, tuple(dual_star_batch(phi.space, phi.arr)[0]))


def residuate(phi: SupportDatum, theta: SupportDatum) -> SupportDatum | NoSolution:
    _same_space(phi, theta)
    psi = SupportDatum(phi.space, tuple(residuate_closed_batch(phi.space, phi.arr, theta.arr)[0]))
    solved = convolve(phi, psi).p == theta.p
    w = int(jump_witness_batch(phi.space, phi.arr, theta.arr)[0])
    if solved != (w < 0):
        raise AssertionError("residuation disagrees with the jump inequality")
    if solved:
        return psi
    x, y = phi.space.strict_pairs[w]
    return NoSolution((phi.space.ids[x], phi.space.ids[y]), psi)


def psi_truncated(phi: SupportDatum, theta: SupportDatum, a: int) -> SupportDatum:
    _same_space(phi, theta)
    return SupportDatum(phi.space, tuple(psi_truncated_batch(phi.space, phi.arr, theta.arr, a)[0]))


def check_t_criterion(phi: SupportDatum, strict: bool = True) -> CriterionReport:
    c = criterion_batch(phi.space, phi.arr)
    pw = int(c.pair_witness[0])
    witness = None
    if pw >= 0:
        x, y = phi.space.strict_pairs[pw]
        witness = (phi.space.ids[x], phi.space.ids[y])
    vw = c.v_witness[0]
    rep = CriterionReport(
        bool(c.ii[0]),
        bool(c.iii[0]),
        bool(c.iv[0]),
        bool(c.v[0]),
        witness,
        (vw[0], vw[1], phi.space.ids[vw[2]]) if vw else None,
    )
    if strict and not rep.consistent:
        raise AssertionError(f"criterion conditions disagree: {rep}")
    return rep
