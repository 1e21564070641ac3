"""Sheaves of finite-dimensional vector spaces on a finite space.

A sheaf is stored by its stalks and restriction maps: for ``q ~> p`` (``q`` more
generic) the minimal open neighbourhood of ``q`` sits inside that of ``p``, so
there is a map ``F_p -> F_q``.  ``res(p, q)`` returns it; maps for every strict
pair are kept so composites never need recomputing.

The indecomposable injective ``I_p`` is the constant sheaf on the closure of
``p`` (stalk ``k`` exactly at specializations of ``p``), and ``Hom(F, I_p)`` is
the dual of the stalk ``F_p``.  Sums of these are built in a canonical basis
(:func:`injective_sheaf`) so that morphisms into them have explicit
coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ComplexError, NotOpen, SpaceMismatch
from .linalg import Field
from .space import SpaceModel, bits


@dataclass(frozen=True, eq=False)
class Sheaf:
    space: SpaceModel
    field: Field
    dims: tuple[int, ...]
    maps: Mapping[tuple[int, int], np.ndarray]
    # multiplicities when the sheaf is a canonical sum of injectives I_p
    injective: tuple[int, ...] | None = None

    def res(self, p: int, q: int) -> np.ndarray:
        if p == q:
            return self.field.eye(self.dims[p])
        return self.maps[(p, q)]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return not any(self.dims)

    def support_mask(self) -> int:
        """Specialization closure of the points with a non-zero stalk."""
        return self.space.closure_of_mask(sum(1 << i for i, d in enumerate(self.dims) if d))

    def validate(self) -> None:
        K, sp = self.field, self.space
        for q, p in sp.strict_pairs:
            m = self.maps.get((p, q))
            if m is None or m.shape != (self.dims[q], self.dims[p]):
                raise ComplexError(f"restriction {sp.ids[p]}->{sp.ids[q]} missing or misshapen")
        for q, p in sp.strict_pairs:
            for r in bits(sp.closure_masks[q] & sp.generization_masks[p]):
                if r in (p, q):
                    continue
                if not K.equal(self.res(p, q), K.mul(self.res(r, q), self.res(p, r))):
                    raise ComplexError(
                        f"restrictions {sp.ids[p]}->{sp.ids[r]}->{sp.ids[q]} do not compose"
                    )

    def signature(self) -> tuple:
        """Isomorphism invariants: stalk dimensions and the rank of every restriction."""
        ranks = tuple(self.field.rank(self.maps[(p, q)]) for q, p in self.space.strict_pairs)
        return (self.dims, ranks)

    def same_as(self, other: "Sheaf") -> bool:
        return (
            self.space == other.space
            and self.dims == other.dims
            and all(self.field.equal(self.maps[k], other.maps[k]) for k in self.maps)
        )


def make_sheaf(
    space: SpaceModel,
    field: Field,
    dims: Sequence[int],
    cover_maps: Mapping[tuple[int, int], np.ndarray],
    check: bool = True,
) -> Sheaf:
    """Sheaf from restrictions along cover pairs ``(p, q)`` (``q ~> p``), composing the rest.

    A missing cover map defaults to zero only when one side is zero-dimensional.
    """
    dims = tuple(int(d) for d in dims)
    maps: dict[tuple[int, int], np.ndarray] = {}
    covers = {(p, q) for q, p in space.cover_pairs}
    for (p, q), m in cover_maps.items():
        if (p, q) not in covers and (q, p) not in space.strict_pairs:
            raise ComplexError(f"{space.ids[q]} does not specialize to {space.ids[p]}")
    for q, p in space.cover_pairs:
        m = cover_maps.get((p, q))
        if m is None:
            if dims[p] and dims[q]:
                raise ComplexError(f"restriction {space.ids[p]}->{space.ids[q]} is required")
            m = field.zeros(dims[q], dims[p])
        m = field.reduce(np.asarray(m))
        if m.shape != (dims[q], dims[p]):
            raise ComplexError(f"restriction {space.ids[p]}->{space.ids[q]} has shape {m.shape}")
        maps[(p, q)] = m
    # longer pairs: compose through any intermediate cover, then verify everything
    pending = [(q, p) for q, p in space.strict_pairs if (p, q) not in maps]
    while pending:
        rest = []
        for q, p in pending:
            done = False
            for r in bits(space.closure_masks[q] & space.generization_masks[p]):
                if r not in (p, q) and (p, r) in maps and (r, q) in maps:
                    given = cover_maps.get((p, q))
                    comp = field.mul(maps[(r, q)], maps[(p, r)])
                    if given is not None and not field.equal(field.reduce(np.asarray(given)), comp):
                        raise ComplexError(f"given map {space.ids[p]}->{space.ids[q]} is not the composite")
                    maps[(p, q)] = comp
                    done = True
                    break
            if not done:
                rest.append((q, p))
        pending = rest
    sheaf = Sheaf(space, field, dims, maps)
    if check:
        sheaf.validate()
    return sheaf


def zero_sheaf(space: SpaceModel, field: Field) -> Sheaf:
    return Sheaf(space, field, (0,) * space.n, {(p, q): field.zeros(0, 0) for q, p in space.strict_pairs}, (0,) * space.n)


def constant_sheaf(space: SpaceModel, field: Field, mask: int | None = None, rank: int = 1) -> Sheaf:
    """``k^rank`` on a locally closed point set, extended by zero."""
    if mask is None:
        mask = space.full_mask
    hull = space.closure_of_mask(mask) & space.open_hull_of_mask(mask)
    if hull != mask:
        raise ValueError("constant sheaves need a locally closed support")
    dims = tuple(rank if mask >> i & 1 else 0 for i in range(space.n))
    maps = {}
    for q, p in space.strict_pairs:
        maps[(p, q)] = field.eye(rank) if (mask >> p & 1 and mask >> q & 1) else field.zeros(dims[q], dims[p])
    return Sheaf(space, field, dims, maps)


def skyscraper(space: SpaceModel, field: Field, point: str) -> Sheaf:
    i = space.idx(point)
    if space.closure_masks[i] != 1 << i:
        raise ValueError(f"{point} is not a closed point")
    return constant_sheaf(space, field, 1 << i)


def extension_by_zero(space: SpaceModel, field: Field, open_mask: int) -> Sheaf:
    """``j_! k_U`` for an open set ``U``."""
    if not space.is_open_mask(open_mask):
        raise NotOpen(sorted(space.names(open_mask)))
    return constant_sheaf(space, field, open_mask)


# -- canonical injectives and projectives ---------------------------------------


def _blocks(space: SpaceModel, mult: Sequence[int], mask: int) -> dict[int, tuple[int, int]]:
    out, off = {}, 0
    for p in bits(mask):
        out[p] = (off, mult[p])
        off += mult[p]
    return out


def injective_blocks(space: SpaceModel, mult: Sequence[int], y: int) -> dict[int, tuple[int, int]]:
    """Offsets of the ``I_p`` summands in the stalk at ``y`` (``p`` ranges over generizations of ``y``)."""
    return _blocks(space, mult, space.generization_masks[y])


def injective_sheaf(space: SpaceModel, field: Field, mult: Sequence[int]) -> Sheaf:
    """Canonical ``sum_p I_p^{mult[p]}``; restrictions are block projections."""
    mult = tuple(int(m) for m in mult)
    dims = tuple(sum(mult[p] for p in bits(space.generization_masks[y])) for y in range(space.n))
    maps = {}
    for q, p in space.strict_pairs:
        src, dst = injective_blocks(space, mult, p), injective_blocks(space, mult, q)
        m = field.zeros(dims[q], dims[p])
        for r, (off, k) in dst.items():
            s = src[r][0]
            for t in range(k):
                m[off + t, s + t] = 1
        maps[(p, q)] = m
    return Sheaf(space, field, dims, maps, injective=mult)


def projective_blocks(space: SpaceModel, mult: Sequence[int], y: int) -> dict[int, tuple[int, int]]:
    return _blocks(space, mult, space.closure_masks[y])


def projective_sheaf(space: SpaceModel, field: Field, mult: Sequence[int]) -> Sheaf:
    """Canonical ``sum_p P_p^{mult[p]}`` with ``P_p = j_! k`` on the open star of ``p``."""
    mult = tuple(int(m) for m in mult)
    dims = tuple(sum(mult[p] for p in bits(space.closure_masks[y])) for y in range(space.n))
    maps = {}
    for q, p in space.strict_pairs:
        src, dst = projective_blocks(space, mult, p), projective_blocks(space, mult, q)
        m = field.zeros(dims[q], dims[p])
        for r, (off, k) in src.items():
            d = dst[r][0]
            for t in range(k):
                m[d + t, off + t] = 1
        maps[(p, q)] = m
    return Sheaf(space, field, dims, maps)


# -- morphisms ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SheafMorphism:
    source: Sheaf
    target: Sheaf
    mats: tuple[np.ndarray, ...]

    @property
    def field(self) -> Field:
        return self.source.field

    def validate(self) -> None:
        K, A, B = self.field, self.source, self.target
        if A.space != B.space:
            raise SpaceMismatch("morphism between sheaves on different spaces")
        for p, m in enumerate(self.mats):
            if m.shape != (B.dims[p], A.dims[p]):
                raise ComplexError(f"morphism stalk matrix at {A.space.ids[p]} has shape {m.shape}")
        for q, p in A.space.strict_pairs:
            if not K.equal(K.mul(B.res(p, q), self.mats[p]), K.mul(self.mats[q], A.res(p, q))):
                raise ComplexError(f"morphism is not natural along {A.space.ids[p]}->{A.space.ids[q]}")

    def is_zero(self) -> bool:
        return all(self.field.is_zero(m) for m in self.mats)

    def rank_at(self, p: int) -> int:
        return self.field.rank(self.mats[p])


def morphism(source: Sheaf, target: Sheaf, mats: Sequence[np.ndarray], check: bool = True) -> SheafMorphism:
    f = SheafMorphism(source, target, tuple(source.field.reduce(np.asarray(m)).reshape(target.dims[p], source.dims[p]) for p, m in enumerate(mats)))
    if check:
        f.validate()
    return f


def zero_morphism(source: Sheaf, target: Sheaf) -> SheafMorphism:
    K = source.field
    return SheafMorphism(source, target, tuple(K.zeros(target.dims[p], source.dims[p]) for p in range(source.space.n)))


def identity(F: Sheaf) -> SheafMorphism:
    return SheafMorphism(F, F, tuple(F.field.eye(d) for d in F.dims))


def compose(g: SheafMorphism, f: SheafMorphism) -> SheafMorphism:
    """``g o f``."""
    K = f.field
    return SheafMorphism(f.source, g.target, tuple(K.mul(b, a) for a, b in zip(f.mats, g.mats)))


def add(f: SheafMorphism, g: SheafMorphism) -> SheafMorphism:
    K = f.field
    return SheafMorphism(f.source, f.target, tuple(K.add(a, b) for a, b in zip(f.mats, g.mats)))


def scale(c: int, f: SheafMorphism) -> SheafMorphism:
    K = f.field
    return SheafMorphism(f.source, f.target, tuple(K.scale(c, a) for a in f.mats))


def direct_sum(*sheaves: Sheaf) -> Sheaf:
    space, K = sheaves[0].space, sheaves[0].field
    dims = tuple(sum(F.dims[p] for F in sheaves) for p in range(space.n))
    maps = {}
    for q, p in space.strict_pairs:
        m = K.zeros(dims[q], dims[p])
        r = c = 0
        for F in sheaves:
            m[r : r + F.dims[q], c : c + F.dims[p]] = F.res(p, q)
            r += F.dims[q]
            c += F.dims[p]
        maps[(p, q)] = m
    # stacked canonical injectives are not in canonical block order, so no tag
    return Sheaf(space, K, dims, maps)


def block_morphism(sources: Sequence[Sheaf], targets: Sequence[Sheaf], blocks: Mapping[tuple[int, int], SheafMorphism]) -> SheafMorphism:
    """Morphism ``sum sources -> sum targets`` from components ``blocks[(i, j)]: sources[j] -> targets[i]``."""
    src, dst = direct_sum(*sources), direct_sum(*targets)
    K = src.field
    mats = []
    for p in range(src.space.n):
        m = K.zeros(dst.dims[p], src.dims[p])
        roff = [0]
        for T in targets:
            roff.append(roff[-1] + T.dims[p])
        coff = [0]
        for S in sources:
            coff.append(coff[-1] + S.dims[p])
        for (i, j), f in blocks.items():
            m[roff[i] : roff[i + 1], coff[j] : coff[j + 1]] = f.mats[p]
        mats.append(m)
    return SheafMorphism(src, dst, tuple(mats))


# -- kernels, cokernels, subsheaves ---------------------------------------------


def subsheaf(F: Sheaf, bases: Sequence[np.ndarray]) -> tuple[Sheaf, SheafMorphism]:
    """Subsheaf spanned stalkwise by the (independent) columns of ``bases``."""
    K, sp = F.field, F.space
    dims = tuple(b.shape[1] for b in bases)
    maps = {}
    for q, p in sp.strict_pairs:
        img = K.mul(F.res(p, q), bases[p])
        try:
            maps[(p, q)] = K.solve(bases[q], img)
        except ValueError:
            raise ComplexError(f"subspace family not stable under {sp.ids[p]}->{sp.ids[q]}") from None
    S = Sheaf(sp, K, dims, maps)
    return S, SheafMorphism(S, F, tuple(bases))


def quotient(F: Sheaf, bases: Sequence[np.ndarray]) -> tuple[Sheaf, SheafMorphism]:
    """Quotient of ``F`` by the subsheaf spanned by ``bases``, with the projection."""
    K, sp = F.field, F.space
    proj = [K.left_kernel(b) if b.shape[1] else K.eye(F.dims[p]) for p, b in enumerate(bases)]
    dims = tuple(m.shape[0] for m in proj)
    sections = [K.right_inverse(m) for m in proj]
    maps = {(p, q): K.mul(K.mul(proj[q], F.res(p, q)), sections[p]) for q, p in sp.strict_pairs}
    Q = Sheaf(sp, K, dims, maps)
    return Q, SheafMorphism(F, Q, tuple(proj))


def kernel(f: SheafMorphism) -> tuple[Sheaf, SheafMorphism]:
    K = f.field
    return subsheaf(f.source, [K.nullspace(m) for m in f.mats])


def image_bases(f: SheafMorphism) -> list[np.ndarray]:
    K = f.field
    return [K.colspace(m) for m in f.mats]


def cokernel(f: SheafMorphism) -> tuple[Sheaf, SheafMorphism]:
    return quotient(f.target, image_bases(f))


def factor_through_mono(f: SheafMorphism, mono: SheafMorphism) -> SheafMorphism:
    """The unique ``g`` with ``mono o g = f``."""
    K = f.field
    return SheafMorphism(f.source, mono.source, tuple(K.solve(m, a) for m, a in zip(mono.mats, f.mats)))


def factor_through_epi(f: SheafMorphism, epi: SheafMorphism) -> SheafMorphism:
    """The unique ``g`` with ``g o epi = f`` (``f`` must kill ``ker epi``)."""
    K = f.field
    mats = []
    for a, e in zip(f.mats, epi.mats):
        g = K.mul(a, K.right_inverse(e))
        if not K.equal(K.mul(g, e), a):
            raise ComplexError("morphism does not factor through the epimorphism")
        mats.append(g)
    return SheafMorphism(epi.target, f.target, tuple(mats))


# -- injective envelopes ----------------------------------------------------------


def socle_bases(F: Sheaf) -> list[np.ndarray]:
    """Stalkwise sections killed by every restriction to a strictly more generic point."""
    K, sp = F.field, F.space
    out = []
    for p in range(sp.n):
        gens = [q for q in bits(sp.generization_masks[p]) if q != p]
        if not gens or F.dims[p] == 0:
            out.append(K.eye(F.dims[p]))
            continue
        stacked = np.concatenate([F.res(p, q) for q in gens], axis=0)
        out.append(K.nullspace(stacked))
    return out


def injective_envelope(F: Sheaf) -> tuple[Sheaf, SheafMorphism]:
    """Minimal embedding ``F -> sum_p I_p^{dim soc_p}``."""
    K, sp = F.field, F.space
    soc = socle_bases(F)
    mult = tuple(b.shape[1] for b in soc)
    retract = [K.left_inverse(b) if b.shape[1] else K.zeros(0, F.dims[p]) for p, b in enumerate(soc)]
    E = injective_sheaf(sp, K, mult)
    mats = []
    for y in range(sp.n):
        rows = [K.mul(retract[p], F.res(y, p)) for p in injective_blocks(sp, mult, y)]
        mats.append(np.concatenate(rows, axis=0) if rows else K.zeros(0, F.dims[y]))
        mats[-1] = K.reduce(mats[-1]).reshape(E.dims[y], F.dims[y])
    return E, SheafMorphism(F, E, tuple(mats))


def injective_coords(h: SheafMorphism) -> list[np.ndarray]:
    """Coordinates ``g_p`` (``mult[p] x dim source_p``) of a morphism into a canonical injective."""
    I = h.target
    assert I.injective is not None, "target is not a canonical injective"
    out = []
    for p in range(I.space.n):
        off, k = injective_blocks(I.space, I.injective, p)[p]
        out.append(h.mats[p][off : off + k, :])
    return out


def morphism_from_coords(A: Sheaf, I: Sheaf, coords: Sequence[np.ndarray]) -> SheafMorphism:
    """Inverse of :func:`injective_coords`: ``f_y = (g_p o res(y, p))_p``."""
    K, sp = A.field, A.space
    mats = []
    for y in range(sp.n):
        rows = [K.mul(coords[p], A.res(y, p)) for p in injective_blocks(sp, I.injective, y)]
        m = np.concatenate(rows, axis=0) if rows else K.zeros(0, A.dims[y])
        mats.append(K.reduce(m).reshape(I.dims[y], A.dims[y]))
    return SheafMorphism(A, I, tuple(mats))


# -- Hom spaces ---------------------------------------------------------------------


def _vec_offsets(A: Sheaf, B: Sheaf) -> list[int]:
    offs = [0]
    for p in range(A.space.n):
        offs.append(offs[-1] + A.dims[p] * B.dims[p])
    return offs


def hom_basis(A: Sheaf, B: Sheaf) -> list[SheafMorphism]:
    """A basis of ``Hom(A, B)`` by solving the naturality equations."""
    K, sp = A.field, A.space
    offs = _vec_offsets(A, B)
    rows = []
    for q, p in sp.cover_pairs:
        eq = K.zeros(B.dims[q] * A.dims[p], offs[-1])
        # res_B(p,q) f_p - f_q res_A(p,q) = 0, column-major vec
        eq[:, offs[p] : offs[p + 1]] = K.kron(K.eye(A.dims[p]), B.res(p, q))
        eq[:, offs[q] : offs[q + 1]] = K.neg(K.kron(A.res(p, q).T.copy(), K.eye(B.dims[q])))
        rows.append(eq)
    system = np.concatenate(rows, axis=0) if rows else K.zeros(0, offs[-1])
    basis = K.nullspace(system)
    out = []
    for j in range(basis.shape[1]):
        v = basis[:, j]
        mats = [v[offs[p] : offs[p + 1]].reshape(A.dims[p], B.dims[p]).T.copy() for p in range(sp.n)]
        out.append(SheafMorphism(A, B, tuple(mats)))
    return out


def random_morphism(A: Sheaf, B: Sheaf, rng) -> SheafMorphism:
    K = A.field
    f = zero_morphism(A, B)
    for g in hom_basis(A, B):
        c = rng.randrange(K.p) if K.p is not None else rng.randint(-2, 2)
        if c:
            f = add(f, scale(c, g))
    return f


# -- sections, supports, open sets --------------------------------------------------


def sections(F: Sheaf, open_mask: int) -> tuple[np.ndarray, dict[int, tuple[int, int]]]:
    """Basis of ``F(U)`` as compatible families inside ``sum_{q in U} F_q``."""
    K, sp = F.field, F.space
    blocks, off = {}, 0
    for q in bits(open_mask):
        blocks[q] = (off, F.dims[q])
        off += F.dims[q]
    rows = []
    for g, s in sp.cover_pairs:
        if open_mask >> s & 1 and open_mask >> g & 1:
            eq = K.zeros(F.dims[g], off)
            so, sd = blocks[s]
            go, gd = blocks[g]
            eq[:, so : so + sd] = F.res(s, g)
            eq[:, go : go + gd] = K.neg(K.eye(gd))
            rows.append(eq)
    system = np.concatenate(rows, axis=0) if rows else K.zeros(0, off)
    return K.nullspace(system), blocks


def gamma_bases(F: Sheaf, closed_mask: int) -> list[np.ndarray]:
    """Stalks of ``Gamma_Z F``: germs vanishing on the open complement of ``Z``."""
    K, sp = F.field, F.space
    out = []
    for p in range(sp.n):
        if not closed_mask >> p & 1:
            out.append(K.zeros(F.dims[p], 0))
            continue
        outside = [q for q in bits(sp.generization_masks[p]) if not closed_mask >> q & 1]
        if not outside:
            out.append(K.eye(F.dims[p]))
            continue
        out.append(K.nullspace(np.concatenate([F.res(p, q) for q in outside], axis=0)))
    return out


def gamma_closed(F: Sheaf, closed_mask: int) -> tuple[Sheaf, SheafMorphism]:
    if not F.space.is_closed_mask(closed_mask):
        raise ValueError("gamma needs a closed set")
    return subsheaf(F, gamma_bases(F, closed_mask))


def gamma_family(F: Sheaf, family) -> tuple[Sheaf, SheafMorphism]:
    """``Gamma_Phi F``; on a finite space the colimit over members is reached at the largest one."""
    return gamma_closed(F, family.mask)


def restrict_open(F: Sheaf, open_mask: int) -> Sheaf:
    sub = F.space.restrict(open_mask)
    keep = list(bits(open_mask))
    maps = {}
    for q, p in sub.strict_pairs:
        maps[(p, q)] = F.res(keep[p], keep[q])
    inj = None
    if F.injective is not None:
        inj = tuple(F.injective[i] for i in keep)
    return Sheaf(sub, F.field, tuple(F.dims[i] for i in keep), maps, inj)


def restrict_morphism(f: SheafMorphism, open_mask: int) -> SheafMorphism:
    return SheafMorphism(
        restrict_open(f.source, open_mask),
        restrict_open(f.target, open_mask),
        tuple(f.mats[i] for i in bits(open_mask)),
    )


@dataclass(frozen=True, eq=False)
class Pushforward:
    """``j_* F`` together with the section bases used for each stalk."""

    sheaf: Sheaf
    bases: tuple[np.ndarray, ...]
    blocks: tuple[dict, ...]


def pushforward_open(F: Sheaf, space: SpaceModel, open_mask: int) -> Pushforward:
    """``j_* F`` for ``F`` on the open subspace ``open_mask`` of ``space``."""
    if not space.is_open_mask(open_mask):
        raise NotOpen(sorted(space.names(open_mask)))
    K = F.field
    keep = list(bits(open_mask))
    pos = {old: new for new, old in enumerate(keep)}
    sub = F.space
    bases, blocks = [], []
    for y in range(space.n):
        local = sum(1 << pos[q] for q in bits(space.generization_masks[y] & open_mask))
        b, bl = sections(F, local)
        bases.append(b)
        blocks.append(bl)
    dims = tuple(b.shape[1] for b in bases)
    maps = {}
    for x, y in space.strict_pairs:
        # families over U_y cap U restrict to U_x cap U by forgetting coordinates
        rows = []
        for q, (off, d) in blocks[x].items():
            o2, _ = blocks[y][q]
            rows.append(bases[y][o2 : o2 + d, :])
        restricted = np.concatenate(rows, axis=0) if rows else K.zeros(0, dims[y])
        maps[(y, x)] = K.solve(bases[x], K.reduce(restricted).reshape(bases[x].shape[0], dims[y]))
    del sub
    return Pushforward(Sheaf(space, K, dims, maps), tuple(bases), tuple(blocks))


def pushforward_morphism(f: SheafMorphism, src: Pushforward, dst: Pushforward) -> SheafMorphism:
    """``j_* f`` between two pushforwards computed by :func:`pushforward_open`."""
    K = f.field
    mats = []
    for y, (bs, bd) in enumerate(zip(src.bases, dst.bases)):
        parts = []
        for q, (off, d) in src.blocks[y].items():
            parts.append(K.mul(f.mats[q], bs[off : off + d, :]))
        img = np.concatenate(parts, axis=0) if parts else K.zeros(0, bs.shape[1])
        mats.append(K.solve(bd, K.reduce(img).reshape(bd.shape[0], bs.shape[1])))
    return SheafMorphism(src.sheaf, dst.sheaf, tuple(mats))


# -- random sheaves ------------------------------------------------------------------


def random_sheaf(space: SpaceModel, field: Field, rng, max_dim: int = 3, tries: int = 50) -> Sheaf:
    """Image of a random map from a canonical projective to a canonical injective.

    Every representation arises this way; draws with a stalk above ``max_dim``
    are rejected.
    """
    for _ in range(tries):
        a = [rng.randint(0, 2) for _ in range(space.n)]
        b = [rng.randint(0, 2) for _ in range(space.n)]
        P, I = projective_sheaf(space, field, a), injective_sheaf(space, field, b)
        coef = {}
        for q in range(space.n):
            for p in bits(space.closure_masks[q]):
                coef[(q, p)] = field.random(rng, b[q], a[p])
        mats = []
        for y in range(space.n):
            m = field.zeros(I.dims[y], P.dims[y])
            for q, (ro, rk) in injective_blocks(space, b, y).items():
                for p, (co, ck) in projective_blocks(space, a, y).items():
                    m[ro : ro + rk, co : co + ck] = coef[(q, p)]
            mats.append(m)
        f = SheafMorphism(P, I, tuple(mats))
        S, _ = subsheaf(I, image_bases(f))
        if max(S.dims, default=0) <= max_dim:
            return S
    return zero_sheaf(space, field)


def support_family(F: Sheaf):
    """Family of supports generated by the points with a non-zero stalk."""
    from .supports import FamilyOfSupports

    return FamilyOfSupports(F.space, F.support_mask())
