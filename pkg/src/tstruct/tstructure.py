"""Membership tests, truncation and heart cohomology for the t-structure of a support datum.

For a datum ``Phi`` (supporting function ``p``), ``M`` is in the ``<= n`` half when
``H^k(M)`` is supported in ``Phi^{k-n}`` for every ``k``, and in the ``>= n`` half
when ``R Gamma_{Phi^k}(M)`` is concentrated in degrees ``>= k + n`` for every
``k``.  Truncation kills, one level at a time, the part of the local cohomology
along ``Phi^{n+1}`` sitting in degrees ``<= n``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .complexes import (
    ChainComplex,
    ChainMap,
    cohomology_dims,
    cone,
    injective_replacement,
    is_acyclic,
    quotient_complex,
    r_gamma,
    random_chain_map,
    random_complex,
    rhom,
    shift,
    shift_map,
    signature,
    tau_geq,
    tau_leq,
    zero_complex,
    compose_maps,
)
from .errors import CertificateFailure, SpaceMismatch
from .linalg import Field, F2
from .space import SpaceModel
from .supports import SupportDatum, example_oco, standard_S, standard_T


# -- membership ------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipCertificate:
    """Per-level evidence for (non-)membership.

    ``side == "leq"``: entries ``(k, supp H^k, Phi^{k-n})`` as bitmasks.
    ``side == "geq"``: entries ``(k, lowest degree of R Gamma_{Phi^k}(M))``, ``None`` when acyclic.
    ``witness`` is the first failing entry.
    """

    side: str
    n: int
    member: bool
    evidence: tuple
    witness: tuple | None = None

    def recheck(self, M: ChainComplex, phi: SupportDatum) -> bool:
        fresh = (in_leq if self.side == "leq" else in_geq)(M, phi, self.n)
        return fresh == self

    def to_json(self, space: SpaceModel) -> dict:
        def names(mask):
            return sorted(space.names(mask))

        if self.side == "leq":
            ev = [{"k": k, "support": names(s), "level": names(l)} for k, s, l in self.evidence]
            wit = None if self.witness is None else {"k": self.witness[0], "support": names(self.witness[1]), "level": names(self.witness[2])}
        else:
            ev = [{"k": k, "lowest_degree": d} for k, d in self.evidence]
            wit = None if self.witness is None else {"k": self.witness[0], "lowest_degree": self.witness[1]}
        return {"side": self.side, "n": self.n, "member": self.member, "evidence": ev, "witness": wit}


def _check_space(M: ChainComplex, phi: SupportDatum) -> None:
    if M.space != phi.space:
        raise SpaceMismatch("complex and datum live on different spaces")


def in_leq(M: ChainComplex, phi: SupportDatum, n: int) -> MembershipCertificate:
    _check_space(M, phi)
    sp = M.space
    ev, witness = [], None
    for k, dims in sorted(cohomology_dims(M).items()):
        supp = sp.closure_of_mask(sum(1 << p for p, d in enumerate(dims) if d))
        level = phi.level(k - n).mask
        ev.append((k, supp, level))
        if witness is None and supp & ~level:
            witness = (k, supp, level)
    return MembershipCertificate("leq", n, witness is None, tuple(ev), witness)


def in_geq(M: ChainComplex, phi: SupportDatum, n: int) -> MembershipCertificate:
    """Levels below ``min p`` are everything (the strongest of them is ``k = min p``) and
    levels above ``max p`` are empty, so only ``k`` in ``[min p, max p]`` is checked."""
    _check_space(M, phi)
    rep = injective_replacement(M)
    ev, witness = [], None
    for k in range(phi.lo, phi.hi + 1):
        degs = sorted(cohomology_dims(r_gamma(M, phi.level(k), rep).complex))
        low = degs[0] if degs else None
        ev.append((k, low))
        if witness is None and low is not None and low < k + n:
            witness = (k, low)
    return MembershipCertificate("geq", n, witness is None, tuple(ev), witness)


# -- truncation ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncationResult:
    M_lt: ChainComplex
    M_geq: ChainComplex
    map_to_geq: ChainMap  # M -> M_geq
    map_from_lt: ChainMap  # M_lt -> M
    cert_lt: MembershipCertificate
    cert_geq: MembershipCertificate
    # (n, cohomology dims of the piece removed at that step)
    iterations: tuple = field(default=())


def truncate(M: ChainComplex, phi: SupportDatum, check: bool = True) -> TruncationResult:
    _check_space(M, phi)
    rep = injective_replacement(M)
    cur, to_cur = rep.complex, rep.qis
    log = []
    degs = sorted(cohomology_dims(M))
    if degs:
        n = degs[0]
        while phi.level(n + 1).mask:
            G = r_gamma(cur, phi.level(n + 1).mask, _identity_replacement(cur))
            A, a_in_g = tau_leq(G.complex, n)
            log.append((n, cohomology_dims(A)))
            # A sits inside cur; the quotient is quasi-isomorphic to the cone of the inclusion
            bases = {}
            K = M.field
            for k in A.degrees:
                bases[k] = [K.mul(g, a) for g, a in zip(G.incl.at(k).mats, a_in_g.at(k).mats)]
            Q, q = quotient_complex(cur, bases)
            nxt = injective_replacement(Q)
            to_cur = compose_maps(nxt.qis, compose_maps(q, to_cur))
            cur = nxt.complex
            n += 1
    M_geq = cur
    c = cone(to_cur)
    M_lt = shift(c.complex, -1)
    from_lt = ChainMap(M_lt, M, shift_map(c.proj, -1).comps)
    cert_lt = in_leq(M_lt, phi, -1)
    cert_geq = in_geq(M_geq, phi, 0)
    if check and not (cert_lt.member and cert_geq.member):
        raise CertificateFailure(f"truncation pieces failed membership: lt={cert_lt.witness} geq={cert_geq.witness}")
    return TruncationResult(M_lt, M_geq, to_cur, from_lt, cert_lt, cert_geq, tuple(log))


def _identity_replacement(I: ChainComplex):
    from .complexes import Replacement, identity_map

    return Replacement(I, identity_map(I))


def tau_lt(M: ChainComplex, phi: SupportDatum) -> ChainComplex:
    return truncate(M, phi).M_lt


def tau_leq_phi(M: ChainComplex, phi: SupportDatum, n: int) -> ChainComplex:
    """``tau^{<=n}`` for ``Phi``: the ``< 0`` piece of ``M[n+1]``, shifted back."""
    return shift(truncate(shift(M, n + 1), phi).M_lt, -(n + 1))


def tau_geq_phi(M: ChainComplex, phi: SupportDatum, n: int) -> ChainComplex:
    return shift(truncate(shift(M, n), phi).M_geq, -n)


@dataclass(frozen=True, eq=False)
class HeartResult:
    complex: ChainComplex
    cert_leq: MembershipCertificate
    cert_geq: MembershipCertificate


def heart_cohomology(M: ChainComplex, phi: SupportDatum, n: int) -> HeartResult:
    """``tau^{>=n} tau^{<=n} M``, certified to lie in both halves at ``n``."""
    H = tau_geq_phi(tau_leq_phi(M, phi, n), phi, n)
    a, b = in_leq(H, phi, n), in_geq(H, phi, n)
    if not (a.member and b.member):
        raise CertificateFailure(f"heart object failed membership at {n}")
    return HeartResult(H, a, b)


# -- verification suites ----------------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    case_id: str
    seed: int
    verdict: bool
    witness: object = None

    def to_json(self) -> dict:
        return {"suite": self.suite, "case_id": self.case_id, "seed": self.seed, "verdict": "pass" if self.verdict else "fail", "witness": self.witness}


def _dims_json(d: dict) -> dict:
    return {str(k): list(v) for k, v in sorted(d.items())}


def named_datum(name: str, space: SpaceModel) -> SupportDatum:
    return {"T": standard_T, "S": standard_S, "oco": example_oco}[name](space)


def sample_complexes(space: SpaceModel, fld: Field, seed: int, count: int, lo: int = -2, hi: int = 2, max_dim: int = 3) -> list[ChainComplex]:
    rng = random.Random(seed)
    return [random_complex(space, fld, rng, lo=lo, hi=hi, max_dim=max_dim) for _ in range(count)]


def verify_axioms(
    phi: SupportDatum,
    samples: int = 50,
    seed: int = 0,
    fld: Field = F2,
    label: str = "",
    complexes: Iterable[ChainComplex] | None = None,
) -> list[CheckRecord]:
    """Nesting, orthogonality, decomposition and extension closure on sampled complexes."""
    space = phi.space
    tag = label or "datum"
    out: list[CheckRecord] = []

    def rec(check, i, ok, witness=None):
        out.append(CheckRecord(f"axioms/{check}", f"{tag}/{i:03d}", seed, bool(ok), witness))

    Ms = list(complexes) if complexes is not None else sample_complexes(space, fld, seed, samples)
    pieces = []
    for i, M in enumerate(Ms):
        bad = M.check_d2()
        rec("d2", i, bad is None, None if bad is None else {"degree": bad})
        if bad is not None:
            continue
        try:
            T = truncate(M, phi)
        except CertificateFailure as e:
            rec("decomposition", i, False, {"error": str(e)})
            continue
        ok = T.cert_lt.recheck(T.M_lt, phi) and T.cert_geq.recheck(T.M_geq, phi)
        rec("decomposition", i, ok)
        pieces.append((i, M, T))
        # nesting: <0 is inside <=0, and >=0 is inside >=-1
        a, b = in_leq(T.M_lt, phi, 0), in_geq(T.M_geq, phi, -1)
        rec("nesting", i, a.member and b.member)
        # cone of M_lt -> M recovers M_geq
        C = cone(T.map_from_lt).complex
        rec("reconstruction", i, signature(C) == signature(T.M_geq), {"cone": _dims_json(cohomology_dims(C)), "geq": _dims_json(cohomology_dims(T.M_geq))})
        # orthogonality, including all negative Ext degrees
        r = rhom(T.M_lt, T.M_geq)
        neg = {n: d for n, d in r.items() if n <= 0}
        rec("orthogonality", i, not neg, {str(k): v for k, v in sorted(neg.items())})
        # idempotence
        t1, t2 = truncate(T.M_geq, phi), truncate(T.M_lt, phi)
        rec("idempotence", i, is_acyclic(t1.M_lt) and is_acyclic(t2.M_geq))
        # replacing M by a quasi-isomorphic complex changes nothing
        R = truncate(injective_replacement(M).complex, phi)
        rec("qis-invariance", i, cohomology_dims(R.M_lt) == cohomology_dims(T.M_lt) and cohomology_dims(R.M_geq) == cohomology_dims(T.M_geq))
        if all(v == 0 for v in phi.p):
            std_lt, _ = tau_leq(M, -1)
            std_geq, _ = tau_geq(M, 0)
            rec("standard", i, signature(std_lt) == signature(T.M_lt) and signature(std_geq) == signature(T.M_geq))

    # orthogonality between pieces of different complexes (general members)
    rng = random.Random(seed + 1)
    for (i, _, Ti), (j, _, Tj) in zip(pieces, pieces[1:] + pieces[:1]):
        r = rhom(Ti.M_lt, Tj.M_geq)
        neg = {n: d for n, d in r.items() if n <= 0}
        rec("orthogonality-cross", i, not neg, {str(k): v for k, v in sorted(neg.items())})
        # extension closure: a random map between members of one half has its cone in the right half
        J = injective_replacement(Tj.M_lt).complex
        f = random_chain_map(Ti.M_lt, J, rng)
        c = cone(f).complex
        rec("extension-leq", i, in_leq(c, phi, -1).member)
        J = injective_replacement(Tj.M_geq).complex
        f = random_chain_map(Ti.M_geq, J, rng)
        c = shift(cone(f).complex, -1)
        rec("extension-geq", i, in_geq(c, phi, 0).member)
    return out


def verify_exactness(space: SpaceModel, samples: int = 20, seed: int = 0, fld: Field = F2, label: str = "") -> list[CheckRecord]:
    """``R Gamma_Z`` keeps ``Phi``-members in their half: both halves for the codimension
    datum, the ``>= 0`` half for every datum tried."""
    tag = label or "space"
    out: list[CheckRecord] = []
    Ms = sample_complexes(space, fld, seed, samples)
    for name in ("S", "T", "oco"):
        phi = named_datum(name, space)
        for i, M in enumerate(Ms):
            T = truncate(M, phi)
            classes = [("geq", T.M_geq)]
            if name == "S":
                classes.append(("leq", shift(T.M_lt, -1)))
            for side, X in classes:
                for Z in space.closed_masks():
                    G = r_gamma(X, Z).complex
                    cert = in_leq(G, phi, 0) if side == "leq" else in_geq(G, phi, 0)
                    out.append(
                        CheckRecord(
                            f"exactness/{side}",
                            f"{tag}/{name}/{i:03d}/{'+'.join(sorted(space.names(Z))) or 'empty'}",
                            seed,
                            cert.member,
                            None if cert.member else list(cert.witness[:2]) if side == "geq" else [cert.witness[0]],
                        )
                    )
    return out
