"""Verification suites behind ``tstruct verify``.

Each suite returns a list of :class:`CheckRecord`; the CLI prints them as JSON
lines sorted by ``(suite, case_id)``.  Support-calculus suites are exhaustive
over a value window; the homological suites sample seeded random complexes.
"""
from __future__ import annotations

import itertools
import zlib
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from . import complexes as cx
from . import sheaves as sh
from .errors import CertificateFailure, TStructError
from .linalg import F2, Field
from .space import SpaceModel, bits, chain3, enumerate_posets, enumerate_spaces, sier, validate_space, vspace
from .supports import (
    NoSolution,
    check_t_criterion,
    closure_matrix,
    convolve,
    convolve_batch,
    convolve_meet_form_batch,
    criterion_batch,
    dual_star,
    dual_star_batch,
    enumerate_data,
    example_oco,
    jump_witness_batch,
    psi_truncated_batch,
    residuate,
    residuate_closed_batch,
    residuation_set_batch,
    sigma_leq_batch,
    standard_S,
    standard_T,
)
from .tstructure import CheckRecord, heart_cohomology, named_datum, sample_complexes, truncate, verify_axioms, verify_exactness

SUITES = ("criterion", "convolution", "residuation", "oco", "axioms", "lemmas", "exactness")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    field: Field = F2
    max_points: int = 4
    samples: int = 50  # random complexes per (space, datum) in the axiom suite
    aux_samples: int = 20  # random complexes for the lemma and exactness suites
    max_stalk_dim: int = 3
    value_lo: int = -2
    value_hi: int = 3
    suites: tuple = dc_field(default=SUITES)


def sub_seed(seed: int, label: str) -> int:
    return (seed * 1_000_003 + zlib.crc32(label.encode())) % (1 << 63)


def space_label(space: SpaceModel) -> str:
    rel = ",".join(f"{space.ids[x]}>{space.ids[y]}" for x, y in space.cover_pairs)
    return f"{space.n}pt[{rel}]c{''.join(map(str, space.codim))}"


TEST_SPACES: dict[str, Callable[[], SpaceModel]] = {"SIER": sier, "CHAIN3": chain3, "VSPACE": vspace}


# -- criterion equivalence ----------------------------------------------------------


def _levels_roundtrip(space: SpaceModel, P: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Rebuild each datum from the closures of its level point sets; returns the rebuilt array."""
    C = closure_matrix(space)
    out = np.full(P.shape, lo - 1, dtype=np.int64)
    for n in range(lo - 1, hi + 2):
        closed = ((P >= n).astype(np.int64) @ C) > 0
        out[closed] = n
    return out


def suite_criterion(cfg: RunConfig) -> list[CheckRecord]:
    out = []
    for space in enumerate_spaces(cfg.max_points):
        label = space_label(space)
        P = enumerate_data(space, cfg.value_lo, cfg.value_hi)
        back = _levels_roundtrip(space, P, cfg.value_lo, cfg.value_hi)
        bad = np.nonzero(np.any(back != P, axis=1))[0]
        out.append(
            CheckRecord(
                "criterion/roundtrip",
                label,
                cfg.seed,
                bad.size == 0,
                None if bad.size == 0 else {"p": P[bad[0]].tolist(), "rebuilt": back[bad[0]].tolist()},
            )
        )
        try:
            c = criterion_batch(space, P)
        except TStructError as e:
            out.append(CheckRecord("criterion/agreement", label, cfg.seed, False, {"error": str(e)}))
            continue
        dis = np.nonzero(~c.agree)[0]
        wit = None
        if dis.size:
            b = dis[0]
            wit = {"p": P[b].tolist(), "ii": bool(c.ii[b]), "iii": bool(c.iii[b]), "iv": bool(c.iv[b]), "v": bool(c.v[b])}
        out.append(CheckRecord("criterion/agreement", label, cfg.seed, dis.size == 0, wit))
    return out


# -- convolution algebra --------------------------------------------------------------


def poset_spaces(max_points: int) -> list[SpaceModel]:
    """One space per order relation; codim is the height, which none of the
    convolution identities read."""
    out = []
    for n in range(1, max_points + 1):
        for rel in enumerate_posets(n):
            ids = [f"p{i}" for i in range(n)]
            height = [0] * n
            for j in range(n):
                height[j] = max((height[i] + 1 for i, jj in rel if jj == j), default=0)
            out.append(validate_space(ids, [(ids[i], ids[j]) for i, j in rel], height))
    return out


def order_automorphisms(space: SpaceModel) -> list[tuple[int, ...]]:
    return [
        perm
        for perm in itertools.permutations(range(space.n))
        if all((space.closure_masks[i] >> j & 1) == (space.closure_masks[perm[i]] >> perm[j] & 1) for i in range(space.n) for j in range(space.n))
    ]


class LevelPack:
    """Data encoded by their level point sets ``{p >= n}``, ``n`` in a fixed window,
    packed into one integer (``n_points`` bits per level).  Meet and join of data
    are then bitwise AND and OR of the packed level sets."""

    def __init__(self, n_points: int, w_lo: int, w_hi: int):
        self.n, self.w_lo, self.w_hi = n_points, w_lo, w_hi
        self.width = w_hi - w_lo + 1
        if self.n * self.width > 63:
            raise ValueError("level window too wide to pack")

    def levels(self, P: np.ndarray) -> np.ndarray:
        """``(B, width)`` array of level bitmasks."""
        weights = (1 << np.arange(self.n)).astype(np.int64)
        return np.stack([((P >= n).astype(np.int64) @ weights) for n in range(self.w_lo, self.w_hi + 1)], axis=1)

    def pack(self, L: np.ndarray) -> np.ndarray:
        out = np.zeros(L.shape[:-1], dtype=np.int64)
        for i in range(self.width):
            out |= L[..., i] << (self.n * i)
        return out

    def unpack(self, keys: np.ndarray) -> np.ndarray:
        """Supporting functions back from packed levels."""
        keys = np.asarray(keys, dtype=np.int64)
        out = np.full(keys.shape + (self.n,), self.w_lo, dtype=np.int64)
        mask = (1 << self.n) - 1
        for i in range(self.width):
            lv = (keys >> (self.n * i)) & mask
            for x in range(self.n):
                out[..., x][(lv >> x) & 1 == 1] = self.w_lo + i
        return out

    def convolution_table(self, L: np.ndarray) -> np.ndarray:
        """``T[a, b]`` = packed levels of ``union_{i+j=n} Phi_a^i meet Phi_b^j``."""
        full = (1 << self.n) - 1
        B = L.shape[0]

        def lev(j):
            if j < self.w_lo:
                return np.full(B, full, dtype=np.int64)
            if j > self.w_hi:
                return np.zeros(B, dtype=np.int64)
            return L[:, j - self.w_lo]

        table = np.zeros((B, B), dtype=np.int64)
        for n in range(self.w_lo, self.w_hi + 1):
            acc = np.zeros((B, B), dtype=np.int64)
            for i in range(self.w_lo, self.w_hi + 1):
                acc |= lev(i)[:, None] & lev(n - i)[None, :]
            table |= acc << (self.n * (n - self.w_lo))
        return table


def _lookup(sorted_keys: np.ndarray, order: np.ndarray, keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pos = np.clip(np.searchsorted(sorted_keys, keys), 0, len(sorted_keys) - 1)
    return order[pos], sorted_keys[pos] == keys


def _orbit_representatives(P: np.ndarray, autos: list[tuple[int, ...]], pack: LevelPack) -> np.ndarray:
    keys = [pack.pack(pack.levels(P[:, list(np.argsort(perm))]) ) for perm in autos]
    canon = np.min(np.stack(keys), axis=0)
    return np.nonzero(canon == pack.pack(pack.levels(P)))[0]


def suite_convolution(cfg: RunConfig) -> list[CheckRecord]:
    out = []
    lo, hi = cfg.value_lo, cfg.value_hi
    for space in poset_spaces(cfg.max_points):
        label = space_label(space)
        P = enumerate_data(space, lo, hi)
        D = P.shape[0]
        A = np.repeat(P, D, axis=0)
        B = np.tile(P, (D, 1))
        conv = convolve_batch(A, B)

        def rec(check, ok_rows, extra=None):
            bad = np.nonzero(~ok_rows)[0]
            wit = None
            if bad.size:
                b = bad[0]
                wit = {"phi": A[b].tolist(), "psi": B[b].tolist()}
                if extra is not None:
                    wit["got"] = extra[b].tolist()
            out.append(CheckRecord(f"convolution/{check}", label, cfg.seed, bad.size == 0, wit))

        rec("pointwise-sum", np.all(conv == A + B, axis=1), conv)
        rec("meet-form", np.all(convolve_meet_form_batch(A, B) == conv, axis=1))
        rec("commutative", np.all(convolve_batch(B, A) == conv, axis=1))
        zero = np.zeros_like(P)
        rec_unit = np.all(convolve_batch(zero, P) == P, axis=1) & np.all(convolve_batch(P, zero) == P, axis=1)
        bad = np.nonzero(~rec_unit)[0]
        out.append(CheckRecord("convolution/unit", label, cfg.seed, bad.size == 0, None if not bad.size else {"psi": P[bad[0]].tolist()}))

        # triples: distributivity over meet and join, cancellation
        pack = LevelPack(space.n, 2 * lo - 1, 2 * hi + 1)
        L = pack.levels(P)
        keys = pack.pack(L)
        order = np.argsort(keys, kind="stable")
        skeys = keys[order]
        table = pack.convolution_table(L)
        meet_idx, meet_ok = _lookup(skeys, order, keys[:, None] & keys[None, :])
        join_idx, join_ok = _lookup(skeys, order, keys[:, None] | keys[None, :])
        incl = (keys[:, None] & ~keys[None, :]) == 0
        reps = _orbit_representatives(P, order_automorphisms(space), pack)
        witness = {"distributive-meet": None, "distributive-join": None, "cancellation": None}
        closed = bool(meet_ok.all() and join_ok.all())
        for a in reps:
            r = table[a]
            prod_meet = r[:, None] & r[None, :]
            prod_join = r[:, None] | r[None, :]
            checks = {
                "distributive-meet": (r[meet_idx] == prod_meet) | ~meet_ok,
                "distributive-join": (r[join_idx] == prod_join) | ~join_ok,
                "cancellation": ((r[:, None] & ~r[None, :]) != 0) | incl,
            }
            for name, ok in checks.items():
                if witness[name] is None and not ok.all():
                    i, j = np.argwhere(~ok)[0]
                    witness[name] = {"phi": P[a].tolist(), "psi1": P[i].tolist(), "psi2": P[j].tolist()}
        for name, wit in witness.items():
            out.append(CheckRecord(f"convolution/{name}", label, cfg.seed, wit is None and closed, wit if wit else (None if closed else {"error": "window not closed under meet/join"})))
        out.append(
            CheckRecord(
                "convolution/triple-count",
                label,
                cfg.seed,
                True,
                {"data": int(D), "phi_orbits": int(len(reps)), "triples_checked": int(len(reps)) * int(D) ** 2},
            )
        )
    return out


# -- residuation ---------------------------------------------------------------------


def suite_residuation(cfg: RunConfig) -> list[CheckRecord]:
    out = []
    lo, hi = cfg.value_lo, cfg.value_hi
    for space in poset_spaces(cfg.max_points):
        label = space_label(space)
        P = enumerate_data(space, lo, hi)
        D = P.shape[0]
        A = np.repeat(P, D, axis=0)  # Phi
        T = np.tile(P, (D, 1))  # Theta
        psi = residuate_closed_batch(space, A, T)
        solved = np.all(convolve_batch(A, psi) == T, axis=1)
        jump_ok = jump_witness_batch(space, A, T) < 0

        def rec(check, ok, wit_fn=None):
            bad = np.nonzero(~ok)[0]
            wit = None
            if bad.size:
                b = bad[0]
                wit = {"phi": A[b].tolist(), "theta": T[b].tolist()}
                if wit_fn:
                    wit.update(wit_fn(b))
            out.append(CheckRecord(f"residuation/{check}", label, cfg.seed, bad.size == 0, wit))

        rec("iff-jump-inequality", solved == jump_ok, lambda b: {"solved": bool(solved[b])})
        lit = residuation_set_batch(space, A, T)
        rec("closed-form", np.all(lit == psi, axis=1), lambda b: {"literal": lit[b].tolist(), "closed": psi[b].tolist()})

        # uniqueness against the literal convolution table over the whole window
        pack = LevelPack(space.n, 2 * lo - 1, 2 * hi + 1)
        L = pack.levels(P)
        keys = pack.pack(L)
        table = pack.convolution_table(L)
        in_window = np.all((psi >= lo) & (psi <= hi), axis=1)
        psi_keys = pack.pack(pack.levels(np.clip(psi, lo - 1, hi + 1)))
        unique_ok = np.ones(D * D, dtype=bool)
        for a in range(D):
            row = table[a]
            sl = slice(a * D, (a + 1) * D)
            u, first, counts = np.unique(row, return_index=True, return_counts=True)
            pos = np.clip(np.searchsorted(u, keys), 0, len(u) - 1)
            found = u[pos] == keys
            count = np.where(found, counts[pos], 0)
            hit = np.where(found, first[pos], -1)
            expect = solved[sl] & in_window[sl]
            ok = count == expect.astype(np.int64)
            ok &= ~expect | (keys[np.maximum(hit, 0)] == psi_keys[sl])
            unique_ok[sl] = ok
        rec("unique-solution", unique_ok)

        # truncated residuals: (sigma^{<=a} Phi) o Psi_a = Theta and (Psi_{a-1})^n inside Phi^a join Psi^n
        S_idx = np.nonzero(solved)[0]
        As, Ts, Ps = A[S_idx], T[S_idx], psi[S_idx]
        sig_ok = np.ones(len(S_idx), dtype=bool)
        step_ok = np.ones(len(S_idx), dtype=bool)
        prev = psi_truncated_batch(space, As, Ts, lo - 2) if len(S_idx) else None
        for a in range(lo - 1, hi + 2):
            if len(S_idx) == 0:
                break
            pa = psi_truncated_batch(space, As, Ts, a)
            sig_ok &= np.all(convolve_batch(sigma_leq_batch(As, a), pa) == Ts, axis=1)
            for n in range(int(prev.min()), int(prev.max()) + 1):
                # levels are closed, so cl(x) lies in the join exactly when x does
                step_ok &= ~np.any((prev >= n) & ~((As >= a) | (Ps >= n)), axis=1)
            prev = pa
        full_sig = np.ones(D * D, dtype=bool)
        full_sig[S_idx] = sig_ok
        full_step = np.ones(D * D, dtype=bool)
        full_step[S_idx] = step_ok
        rec("sigma-compatible", full_sig)
        rec("stepwise-inclusion", full_step)
    # dual of the trivial and codimension data on every enumerated space
    for space in enumerate_spaces(cfg.max_points):
        cod = np.asarray(space.codim, dtype=np.int64).reshape(1, -1)
        t = dual_star_batch(space, np.zeros_like(cod))
        s = dual_star_batch(space, cod)
        ok = bool(np.array_equal(t, cod) and np.array_equal(s, np.zeros_like(cod)))
        out.append(
            CheckRecord("residuation/dual-T-S", space_label(space), cfg.seed, ok, None if ok else {"dual_T": t[0].tolist(), "dual_S": s[0].tolist()})
        )
    return out


# -- the two-point example --------------------------------------------------------------


def suite_oco(cfg: RunConfig) -> list[CheckRecord]:
    X = sier()
    K = cfg.field
    out = []
    phi = example_oco(X)

    def rec(check, ok, wit=None):
        out.append(CheckRecord(f"oco/{check}", "SIER", cfg.seed, bool(ok), wit))

    rep = check_t_criterion(phi, strict=False)
    rec("criterion-agreement", rep.consistent, rep.to_json())
    rec("criterion-fails", not rep.ii and rep.witness == ("eta", "x"), rep.to_json())
    S = standard_S(X)
    rec("equals-S-o-S", convolve(S, S, check=True).p == phi.p, {"S_o_S": list(convolve(S, S).p)})
    res = residuate(phi, S)
    rec("no-residual", isinstance(res, NoSolution) and res.witness == ("eta", "x"))
    jk = cx.concentrated(sh.extension_by_zero(X, K, X.mask_of(["eta"])))
    try:
        T = truncate(jk, phi)
        lt, geq = cx.cohomology_dims(T.M_lt), cx.cohomology_dims(T.M_geq)
        ok = lt == {1: (0, 1)} and geq == {0: (1, 1)}
        rec("truncation", ok, {"lt": {str(k): list(v) for k, v in lt.items()}, "geq": {str(k): list(v) for k, v in geq.items()}})
        h = {n: cx.cohomology_dims(heart_cohomology(jk, phi, n).complex) for n in range(-2, 2)}
        ok = h == {-2: {}, -1: {1: (0, 1)}, 0: {0: (1, 1)}, 1: {}}
        rec("heart", ok, {str(n): {str(k): list(v) for k, v in d.items()} for n, d in h.items()})
    except CertificateFailure as e:
        rec("truncation", False, {"error": str(e)})
    return out


# -- homological suites -----------------------------------------------------------------


def suite_axioms(cfg: RunConfig) -> list[CheckRecord]:
    out = []
    for sname, make in TEST_SPACES.items():
        space = make()
        for dname in ("T", "S", "oco"):
            label = f"{sname}/{dname}"
            Ms = sample_complexes(space, cfg.field, sub_seed(cfg.seed, label), cfg.samples, max_dim=cfg.max_stalk_dim)
            recs = verify_axioms(named_datum(dname, space), seed=cfg.seed, label=label, complexes=Ms)
            out.extend(recs)
    return out


def _family_pairs(space: SpaceModel) -> list[tuple[int, int]]:
    cl = space.closed_masks()
    return [(a, b) for a in cl for b in cl]


def suite_lemmas(cfg: RunConfig) -> list[CheckRecord]:
    out = []
    K = cfg.field

    def rec(check, case, ok, wit=None):
        out.append(CheckRecord(f"lemmas/{check}", case, cfg.seed, bool(ok), wit))

    for sname in ("SIER", "CHAIN3"):
        space = TEST_SPACES[sname]()
        Ms = sample_complexes(space, K, sub_seed(cfg.seed, f"lemmas/{sname}"), cfg.aux_samples, max_dim=cfg.max_stalk_dim)
        for i, M in enumerate(Ms):
            case = f"{sname}/{i:03d}"
            if M.check_d2() is not None:
                rec("d2", case, False, {"degree": M.check_d2()})
                continue
            rep = cx.injective_replacement(M)
            # composition of local cohomology functors
            bad = None
            for a, b in _family_pairs(space):
                inner = cx.r_gamma(M, b, rep).complex
                lhs = cx.signature(cx.r_gamma(inner, a).complex)
                rhs = cx.signature(cx.r_gamma(M, a & b, rep).complex)
                if lhs != rhs:
                    bad = {"outer": sorted(space.names(a)), "inner": sorted(space.names(b))}
                    break
            rec("compose", case, bad is None, bad)
            # lowest cohomology commutes with Gamma
            degs = cx.cohomology_degrees(M)
            bad = None
            if degs:
                n = degs[0]
                Hn = cx.cohomology(M, n)
                for Z in space.closed_masks():
                    G = cx.r_gamma(M, Z, rep).complex
                    low = cx.cohomology_degrees(G)
                    gH, _ = sh.gamma_closed(Hn, Z)
                    if (low and low[0] < n) or cx.cohomology(G, n).signature() != gH.signature():
                        bad = {"Z": sorted(space.names(Z)), "n": n}
                        break
            rec("lowest-degree", case, bad is None, bad)
            # pushforward from opens commutes with local cohomology
            bad = None
            for U in space.open_masks():
                if U == 0:
                    continue
                MU = cx.restrict_complex(M, U)
                pos = {old: new for new, old in enumerate(bits(U))}
                for Z in space.closed_masks():
                    ZU = sum(1 << pos[i] for i in bits(Z & U))
                    lhs = cx.pushforward_complex(cx.r_gamma(MU, ZU).complex, space, U)
                    rhs = cx.r_gamma(cx.pushforward_complex(MU, space, U), Z).complex
                    if cx.signature(lhs) != cx.signature(rhs):
                        bad = {"U": sorted(space.names(U)), "Z": sorted(space.names(Z))}
                        break
                if bad:
                    break
            rec("pushforward", case, bad is None, bad)
            # quasi-isomorphism invariance
            bad = None
            I = rep.complex
            for Z in space.closed_masks():
                if cx.signature(cx.r_gamma(M, Z, rep).complex) != cx.signature(cx.r_gamma(I, Z).complex):
                    bad = {"Z": sorted(space.names(Z))}
                    break
            rec("qis-invariance", case, bad is None, bad)

    # union of closed points on the V-space
    space = vspace()
    a, b = space.mask_of(["a"]), space.mask_of(["b"])
    Ms = sample_complexes(space, K, sub_seed(cfg.seed, "lemmas/VSPACE"), cfg.aux_samples, max_dim=cfg.max_stalk_dim)
    for i, M in enumerate(Ms):
        if M.check_d2() is not None:
            rec("d2", f"VSPACE/{i:03d}", False, {"degree": M.check_d2()})
            continue
        rep = cx.injective_replacement(M)
        lows = []
        for Z in (a, b, a | b):
            d = cx.cohomology_degrees(cx.r_gamma(M, Z, rep).complex)
            lows.append(d[0] if d else None)
        n = min((x for x in lows[:2] if x is not None), default=None)
        ok = n is None and lows[2] is None or (n is not None and (lows[2] is None or lows[2] >= n))
        rec("union", f"VSPACE/{i:03d}", ok, {"lowest": lows})
    # co-representability of the indecomposable injectives
    rng = __import__("random").Random(sub_seed(cfg.seed, "lemmas/injectives"))
    for sname, make in TEST_SPACES.items():
        space = make()
        for i in range(cfg.aux_samples):
            F = sh.random_sheaf(space, K, rng, max_dim=cfg.max_stalk_dim)
            bad = None
            for p in range(space.n):
                mult = [0] * space.n
                mult[p] = 1
                Ip = cx.concentrated(sh.injective_sheaf(space, K, mult))
                r = cx.rhom(cx.concentrated(F), Ip)
                if r != ({0: F.dims[p]} if F.dims[p] else {}):
                    bad = {"point": space.ids[p], "rhom": {str(k): v for k, v in r.items()}, "stalk": F.dims[p]}
                    break
            rec("injective", f"{sname}/{i:03d}", bad is None, bad)
    return out


def suite_exactness(cfg: RunConfig) -> list[CheckRecord]:
    out = []
    for sname, make in TEST_SPACES.items():
        out.extend(verify_exactness(make(), samples=cfg.aux_samples, seed=sub_seed(cfg.seed, f"exactness/{sname}"), fld=cfg.field, label=sname))
    return [CheckRecord(r.suite, r.case_id, cfg.seed, r.verdict, r.witness) for r in out]


SUITE_FUNCS: dict[str, Callable[[RunConfig], list[CheckRecord]]] = {
    "criterion": suite_criterion,
    "convolution": suite_convolution,
    "residuation": suite_residuation,
    "oco": suite_oco,
    "axioms": suite_axioms,
    "lemmas": suite_lemmas,
    "exactness": suite_exactness,
}


def run_suites(cfg: RunConfig) -> list[CheckRecord]:
    recs: list[CheckRecord] = []
    for name in cfg.suites:
        try:
            recs.extend(SUITE_FUNCS[name](cfg))
        except (TStructError, AssertionError, ValueError) as e:
            recs.append(CheckRecord(f"{name}/crash", "-", cfg.seed, False, {"error": f"{type(e).__name__}: {e}"}))
    return sorted(recs, key=lambda r: (r.suite, r.case_id))
