"""Bounded complexes of sheaves and the derived functors used by the truncation code.

Cohomological grading: ``d^n : C^n -> C^{n+1}``.  Every derived functor here
goes through an explicit injective replacement built from canonical injectives,
so morphisms into it have free coordinates (see :func:`sheaves.injective_coords`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import mutations
from .errors import ComplexError, ResolutionCapExceeded, SpaceMismatch
from .linalg import Field
from .sheaves import (
    Pushforward,
    Sheaf,
    SheafMorphism,
    block_morphism,
    cokernel,
    compose,
    direct_sum,
    factor_through_epi,
    factor_through_mono,
    gamma_bases,
    hom_basis,
    identity,
    image_bases,
    injective_blocks,
    injective_envelope,
    kernel,
    morphism_from_coords,
    pushforward_morphism,
    pushforward_open,
    quotient,
    random_morphism,
    random_sheaf,
    restrict_morphism,
    restrict_open,
    scale,
    subsheaf,
    zero_morphism,
    zero_sheaf,
)
from .space import SpaceModel, bits


@dataclass(frozen=True, eq=False)
class ChainComplex:
    space: SpaceModel
    field: Field
    terms: Mapping[int, Sheaf]
    diffs: Mapping[int, SheafMorphism]

    def term(self, n: int) -> Sheaf:
        t = self.terms.get(n)
        return t if t is not None else zero_sheaf(self.space, self.field)

    def d(self, n: int) -> SheafMorphism:
        f = self.diffs.get(n)
        return f if f is not None else zero_morphism(self.term(n), self.term(n + 1))

    @property
    def degrees(self) -> list[int]:
        return sorted(n for n, t in self.terms.items() if not t.is_zero())

    @property
    def lo(self) -> int | None:
        ds = self.degrees
        return ds[0] if ds else None

    @property
    def hi(self) -> int | None:
        ds = self.degrees
        return ds[-1] if ds else None

    def is_zero(self) -> bool:
        return not self.degrees

    def check_d2(self) -> int | None:
        """First degree ``n`` with ``d^{n+1} d^n != 0``, or ``None``."""
        for n in self.degrees:
            if not compose(self.d(n + 1), self.d(n)).is_zero():
                return n
        return None

    def validate(self) -> None:
        for n, t in self.terms.items():
            if t.space != self.space:
                raise SpaceMismatch(f"term {n} lives on another space")
        for n, f in self.diffs.items():
            if f.source is not self.term(n) and not f.source.same_as(self.term(n)):
                raise ComplexError(f"d^{n} has the wrong source")
            if f.target is not self.term(n + 1) and not f.target.same_as(self.term(n + 1)):
                raise ComplexError(f"d^{n} has the wrong target")
            f.validate()
        bad = self.check_d2()
        if bad is not None:
            raise ComplexError(f"d^{bad + 1} d^{bad} != 0")


def make_complex(
    space: SpaceModel,
    field: Field,
    terms: Mapping[int, Sheaf],
    diffs: Mapping[int, SheafMorphism] | None = None,
    check: bool = True,
) -> ChainComplex:
    C = ChainComplex(space, field, dict(terms), dict(diffs or {}))
    if check and not mutations.active("break-d2"):
        C.validate()
    return C


def zero_complex(space: SpaceModel, field: Field) -> ChainComplex:
    return ChainComplex(space, field, {}, {})


def concentrated(F: Sheaf, degree: int = 0) -> ChainComplex:
    return ChainComplex(F.space, F.field, {degree: F}, {})


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    comps: Mapping[int, SheafMorphism]

    def at(self, n: int) -> SheafMorphism:
        f = self.comps.get(n)
        return f if f is not None else zero_morphism(self.source.term(n), self.target.term(n))

    def validate(self) -> None:
        K = self.source.field
        degs = set(self.source.degrees) | set(self.target.degrees)
        for n in sorted(degs | {m - 1 for m in degs}):
            lhs = compose(self.target.d(n), self.at(n))
            rhs = compose(self.at(n + 1), self.source.d(n))
            if not all(K.equal(a, b) for a, b in zip(lhs.mats, rhs.mats)):
                raise ComplexError(f"chain map does not commute with d^{n}")


def compose_maps(g: ChainMap, f: ChainMap) -> ChainMap:
    degs = set(f.source.degrees) | set(g.target.degrees)
    return ChainMap(f.source, g.target, {n: compose(g.at(n), f.at(n)) for n in degs})


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, {n: identity(C.term(n)) for n in C.degrees})


# -- cohomology -----------------------------------------------------------------


def cohomology_dims(C: ChainComplex) -> dict[int, tuple[int, ...]]:
    """Stalk dimensions of every non-zero cohomology sheaf."""
    K = C.field
    out = {}
    for n in C.degrees:
        dims = []
        for p in range(C.space.n):
            dims.append(C.term(n).dims[p] - K.rank(C.d(n).mats[p]) - K.rank(C.d(n - 1).mats[p]))
        if any(dims):
            out[n] = tuple(dims)
    return out


def cohomology(C: ChainComplex, n: int) -> Sheaf:
    Z, z = kernel(C.d(n))
    b = factor_through_mono(C.d(n - 1), z)
    H, _ = cokernel(b)
    return H


sheaf_cohomology = cohomology


def cohomology_degrees(C: ChainComplex) -> list[int]:
    return sorted(cohomology_dims(C))


def is_acyclic(C: ChainComplex) -> bool:
    return not cohomology_dims(C)


def signature(C: ChainComplex) -> tuple:
    """Per-degree isomorphism invariants of the cohomology sheaves."""
    return tuple((n, cohomology(C, n).signature()) for n in cohomology_degrees(C))


def cohomology_support(C: ChainComplex, n: int) -> int:
    """Closure of the support of ``H^n`` as a bitmask."""
    dims = cohomology_dims(C).get(n, ())
    return C.space.closure_of_mask(sum(1 << p for p, d in enumerate(dims) if d))


# -- shifts, cones, truncations ---------------------------------------------------


def shift(C: ChainComplex, k: int) -> ChainComplex:
    """``C[k]^n = C^{n+k}`` with differential ``(-1)^k d``."""
    sign = -1 if k % 2 else 1
    terms = {n - k: t for n, t in C.terms.items()}
    diffs = {n - k: (scale(sign, f) if sign < 0 else f) for n, f in C.diffs.items()}
    return ChainComplex(C.space, C.field, terms, diffs)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.source, k), shift(f.target, k), {n - k: g for n, g in f.comps.items()})


@dataclass(frozen=True, eq=False)
class Cone:
    complex: ChainComplex
    incl: ChainMap  # B -> Cone(f)
    proj: ChainMap  # Cone(f) -> A[1]


def cone(f: ChainMap) -> Cone:
    """``Cone(f)^n = A^{n+1} + B^n`` with ``d = [[-d_A, 0], [f, d_B]]``."""
    A, B = f.source, f.target
    degs = sorted({n - 1 for n in A.degrees} | set(B.degrees))
    terms, diffs = {}, {}
    for n in degs:
        terms[n] = direct_sum(A.term(n + 1), B.term(n))
    for n in degs:
        src = [A.term(n + 1), B.term(n)]
        dst = [A.term(n + 2), B.term(n + 1)]
        blocks = {(0, 0): scale(-1, A.d(n + 1)), (1, 0): f.at(n + 1), (1, 1): B.d(n)}
        d = block_morphism(src, dst, blocks)
        tgt = terms.get(n + 1)
        diffs[n] = SheafMorphism(terms[n], tgt if tgt is not None else d.target, d.mats)
    C = ChainComplex(A.space, A.field, terms, diffs)
    inc, pr = {}, {}
    for n in degs:
        Bn, An1 = B.term(n), A.term(n + 1)
        inc[n] = SheafMorphism(Bn, terms[n], block_morphism([Bn], [An1, Bn], {(1, 0): identity(Bn)}).mats)
        pr[n] = SheafMorphism(terms[n], An1, block_morphism([An1, Bn], [An1], {(0, 0): identity(An1)}).mats)
    Ash = shift(A, 1)
    return Cone(C, ChainMap(B, C, inc), ChainMap(C, Ash, pr))


def subcomplex(C: ChainComplex, bases: Mapping[int, list[np.ndarray]]) -> tuple[ChainComplex, ChainMap]:
    """Subcomplex spanned termwise by ``bases`` (degrees absent from ``bases`` become zero)."""
    K = C.field
    terms, incl = {}, {}
    for n, b in bases.items():
        terms[n], incl[n] = subsheaf(C.term(n), b)
    diffs = {}
    for n in terms:
        if n + 1 in terms:
            img = compose(C.d(n), incl[n])
            try:
                diffs[n] = factor_through_mono(img, incl[n + 1])
            except ValueError:
                raise ComplexError(f"subcomplex not stable under d^{n}") from None
        else:
            if not compose(C.d(n), incl[n]).is_zero():
                raise ComplexError(f"subcomplex not stable under d^{n}")
    S = ChainComplex(C.space, K, terms, diffs)
    return S, ChainMap(S, C, incl)


def quotient_complex(C: ChainComplex, bases: Mapping[int, list[np.ndarray]]) -> tuple[ChainComplex, ChainMap]:
    """Quotient of ``C`` by the subcomplex spanned by ``bases``."""
    K = C.field
    terms, proj = {}, {}
    for n in C.degrees:
        b = bases.get(n) or [K.zeros(d, 0) for d in C.term(n).dims]
        terms[n], proj[n] = quotient(C.term(n), b)
    diffs = {}
    for n in terms:
        if n + 1 in terms:
            diffs[n] = factor_through_epi(compose(proj[n + 1], C.d(n)), proj[n])
    Q = ChainComplex(C.space, K, terms, diffs)
    return Q, ChainMap(C, Q, proj)


def tau_leq(C: ChainComplex, n: int) -> tuple[ChainComplex, ChainMap]:
    """Smart truncation ``tau^{<=n}`` as a subcomplex."""
    K = C.field
    bases = {}
    for k in C.degrees:
        if k < n:
            bases[k] = [K.eye(d) for d in C.term(k).dims]
        elif k == n:
            bases[k] = [K.nullspace(m) for m in C.d(n).mats]
    return subcomplex(C, bases)


def tau_geq(C: ChainComplex, n: int) -> tuple[ChainComplex, ChainMap]:
    """Smart truncation ``tau^{>=n}`` as a quotient complex."""
    K = C.field
    bases = {}
    for k in C.degrees:
        if k < n:
            bases[k] = [K.eye(d) for d in C.term(k).dims]
        elif k == n:
            bases[k] = image_bases(C.d(n - 1))
    return quotient_complex(C, bases)


# -- injective replacement --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Replacement:
    complex: ChainComplex
    qis: ChainMap  # M -> I, a quasi-isomorphism into a complex of canonical injectives


def injective_replacement(M: ChainComplex) -> Replacement:
    sp, K = M.space, M.field
    if M.is_zero():
        Z = zero_complex(sp, K)
        return Replacement(Z, ChainMap(M, Z, {}))
    lo, hi = M.lo, M.hi
    cap = hi + sp.n + 1
    terms: dict[int, Sheaf] = {}
    diffs: dict[int, SheafMorphism] = {}
    alpha: dict[int, SheafMorphism] = {}
    terms[lo], alpha[lo] = injective_envelope(M.term(lo))
    n = lo
    while True:
        prev = diffs.get(n - 1)
        if prev is None:
            prev = zero_morphism(zero_sheaf(sp, K), terms[n])
        Cok, pi = cokernel(prev)
        Kn1 = M.term(n + 1)
        # pushout of coker(d_I^{n-1}) <- M^n -> M^{n+1}
        S = direct_sum(Cok, Kn1)
        rel = block_morphism([M.term(n)], [Cok, Kn1], {(0, 0): compose(pi, alpha[n]), (1, 0): scale(-1, M.d(n))})
        rel = SheafMorphism(M.term(n), S, rel.mats)
        Q, q = cokernel(rel)
        if n >= hi and Q.is_zero():
            break
        if n >= cap:
            raise ResolutionCapExceeded(f"injective replacement did not stop by degree {cap}")
        E, e = injective_envelope(Q)
        eq = compose(e, q)
        first = block_morphism([Cok], [Cok, Kn1], {(0, 0): identity(Cok)})
        second = block_morphism([Kn1], [Cok, Kn1], {(1, 0): identity(Kn1)})
        first = SheafMorphism(Cok, S, first.mats)
        second = SheafMorphism(Kn1, S, second.mats)
        terms[n + 1] = E
        diffs[n] = compose(compose(eq, first), pi)
        alpha[n + 1] = compose(eq, second)
        n += 1
    I = ChainComplex(sp, K, terms, diffs)
    return Replacement(I, ChainMap(M, I, alpha))


def injective_resolution(F: Sheaf) -> Replacement:
    """Minimal injective resolution ``F -> I^0 -> I^1 -> ...`` of a single sheaf."""
    rep = injective_replacement(concentrated(F, 0))
    if rep.complex.hi is not None and rep.complex.hi > F.space.n:
        raise ResolutionCapExceeded("resolution longer than the number of points")
    return rep


# -- local cohomology and open immersions ---------------------------------------------


@dataclass(frozen=True, eq=False)
class RGamma:
    complex: ChainComplex  # Gamma_Z(I)
    incl: ChainMap  # Gamma_Z(I) -> I
    replacement: Replacement  # M -> I


def _support_mask(support) -> int:
    return support if isinstance(support, int) else support.mask


def r_gamma(M: ChainComplex, support, replacement: Replacement | None = None) -> RGamma:
    """``R Gamma_Phi M``; ``support`` is a closed bitmask or a family of supports.

    Gamma of a family equals Gamma of its largest member on a finite space.
    """
    closed_mask = _support_mask(support)
    if not M.space.is_closed_mask(closed_mask):
        raise ValueError("r_gamma needs a closed set")
    rep = replacement or injective_replacement(M)
    I = rep.complex
    G, incl = subcomplex(I, {n: gamma_bases(I.term(n), closed_mask) for n in I.degrees})
    return RGamma(G, incl, rep)


def local_cohomology_dims(M: ChainComplex, support) -> dict[int, tuple[int, ...]]:
    return cohomology_dims(r_gamma(M, support).complex)


def local_cohomology(M: ChainComplex, support, n: int) -> Sheaf:
    """``H^n_Phi(M)`` as a sheaf."""
    return cohomology(r_gamma(M, support).complex, n)


def restrict_complex(C: ChainComplex, open_mask: int) -> ChainComplex:
    sub = C.space.restrict(open_mask)
    terms = {n: restrict_open(t, open_mask) for n, t in C.terms.items()}
    diffs = {}
    for n, f in C.diffs.items():
        g = restrict_morphism(f, open_mask)
        diffs[n] = SheafMorphism(terms.get(n, g.source), terms.get(n + 1, g.target), g.mats)
    return ChainComplex(sub, C.field, terms, diffs)


def pushforward_complex(C: ChainComplex, space: SpaceModel, open_mask: int) -> ChainComplex:
    """``R j_* C`` for a complex on the open subspace ``open_mask``."""
    I = injective_replacement(C).complex
    pf: dict[int, Pushforward] = {n: pushforward_open(I.term(n), space, open_mask) for n in I.degrees}
    terms = {n: p.sheaf for n, p in pf.items()}
    diffs = {n: pushforward_morphism(I.d(n), pf[n], pf[n + 1]) for n in I.degrees if n + 1 in pf}
    return ChainComplex(space, C.field, terms, diffs)


# -- RHom ---------------------------------------------------------------------------


def _hom_layout(M: ChainComplex, J: ChainComplex, n: int) -> tuple[dict, int]:
    sp = M.space
    blocks, off = {}, 0
    for k in M.degrees:
        mult = J.term(k + n).injective or (0,) * sp.n
        for p in range(sp.n):
            size = mult[p] * M.term(k).dims[p]
            blocks[(k, p)] = (off, size, mult[p])
            off += size
    return blocks, off


def _hom_range(M: ChainComplex, J: ChainComplex) -> range:
    return range(J.lo - M.hi - 1, J.hi - M.lo + 1)


def hom_complex(M: ChainComplex, J: ChainComplex) -> dict[int, np.ndarray]:
    """Matrices of ``D^n : Hom^n(M, J) -> Hom^{n+1}(M, J)`` for ``J`` of canonical injectives.

    A map ``M^k -> J^{k+n}`` is encoded by its coordinates ``g_p`` (column-major
    vec, points in index order, then ``k`` ascending).
    """
    K, sp = M.field, M.space
    if J.is_zero() or M.is_zero():
        return {}
    layout = lambda n: _hom_layout(M, J, n)

    out = {}
    for n in _hom_range(M, J):
        src, ns = layout(n)
        dst, nd = layout(n + 1)
        D = K.zeros(nd, ns)
        sign = -1 if n % 2 else 1
        for k in M.degrees:
            Mk = M.term(k)
            Jt, Jt1 = J.term(k + n), J.term(k + n + 1)
            dJ = J.d(k + n)
            multT = Jt.injective or (0,) * sp.n
            multT1 = Jt1.injective or (0,) * sp.n
            for q in range(sp.n):
                ro, rs, mq = dst[(k, q)]
                if rs == 0:
                    continue
                rows_q = injective_blocks(sp, multT1, q)[q]
                for p in bits(sp.generization_masks[q]):
                    co, cs, mp = src[(k, p)]
                    if cs == 0:
                        continue
                    cols_p = injective_blocks(sp, multT, q)[p]
                    c = dJ.mats[q][rows_q[0] : rows_q[0] + rows_q[1], cols_p[0] : cols_p[0] + cols_p[1]]
                    blk = K.kron(Mk.res(q, p).T.copy(), c)
                    D[ro : ro + rs, co : co + cs] = K.add(D[ro : ro + rs, co : co + cs], blk)
            # - (-1)^n f_{k+1} d_M^k, landing in the (k, q) block
            if k + 1 in M.degrees:
                for q in range(sp.n):
                    ro, rs, mq = dst[(k, q)]
                    co, cs, _ = src[(k + 1, q)]
                    if rs == 0 or cs == 0:
                        continue
                    blk = K.kron(M.d(k).mats[q].T.copy(), K.eye(mq))
                    if sign > 0:
                        blk = K.neg(blk)
                    D[ro : ro + rs, co : co + cs] = K.add(D[ro : ro + rs, co : co + cs], blk)
        out[n] = D
    return out


def rhom(M: ChainComplex, N: ChainComplex) -> dict[int, int]:
    """Dimensions of ``H^n RHom(M, N)`` (only non-zero degrees)."""
    K = M.field
    J = injective_replacement(N).complex
    D = hom_complex(M, J)
    out = {}
    for n in D:
        if n - 1 not in D:
            continue
        dim = D[n].shape[1]
        h = dim - K.rank(D[n]) - K.rank(D[n - 1])
        if h:
            out[n] = h
    return out


def chain_map_from_cocycle(M: ChainComplex, J: ChainComplex, v: np.ndarray) -> ChainMap:
    """Chain map ``M -> J`` encoded by a degree-0 cocycle of :func:`hom_complex`."""
    K, sp = M.field, M.space
    blocks, _ = _hom_layout(M, J, 0)
    comps = {}
    for k in M.degrees:
        coords = []
        for p in range(sp.n):
            off, size, m = blocks[(k, p)]
            d = M.term(k).dims[p]
            coords.append(v[off : off + size].reshape(d, m).T.copy() if size else K.zeros(m, d))
        comps[k] = morphism_from_coords(M.term(k), J.term(k), coords)
    return ChainMap(M, J, comps)


def random_chain_map(M: ChainComplex, J: ChainComplex, rng) -> ChainMap:
    """Random chain map into a complex of canonical injectives."""
    K = M.field
    D = hom_complex(M, J)
    if 0 not in D:
        return ChainMap(M, J, {})
    Z = K.nullspace(D[0])
    c = [rng.randrange(K.p) if K.p is not None else rng.randint(-2, 2) for _ in range(Z.shape[1])]
    v = K.mul(Z, K.matrix([[x] for x in c], (len(c), 1)))[:, 0] if c else K.zeros(D[0].shape[1], 1)[:, 0]
    return chain_map_from_cocycle(M, J, v)


# -- random complexes ---------------------------------------------------------------


def random_complex(
    space: SpaceModel,
    field: Field,
    rng,
    lo: int = -1,
    hi: int = 1,
    max_dim: int = 2,
) -> ChainComplex:
    """Random bounded complex in degrees ``[lo, hi]``.

    Each differential is a random map out of the cokernel of the previous one,
    so ``d o d = 0`` holds by construction.
    """
    terms = {n: random_sheaf(space, field, rng, max_dim=max_dim) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo, hi):
        src, tgt = terms[n], terms[n + 1]
        if mutations.active("break-d2"):
            diffs[n] = random_morphism(src, tgt, rng)
            continue
        prev = diffs.get(n - 1) or zero_morphism(zero_sheaf(space, field), src)
        Cok, pi = cokernel(prev)
        diffs[n] = compose(random_morphism(Cok, tgt, rng), pi)
    return make_complex(space, field, terms, diffs)
