import random

import pytest

import oracles as O
from tstruct import complexes as cx
from tstruct import sheaves as sh
from tstruct.errors import ComplexError
from tstruct.linalg import F2, QQ, Field
from tstruct.space import chain3, sier, vspace

SPACES = [sier, chain3, vspace]


def samples(X, fld, seed, count=15, **kw):
    rng = random.Random(seed)
    return [cx.random_complex(X, fld, rng, **kw) for _ in range(count)]


def euler(dims_by_degree, n_points):
    out = [0] * n_points
    for k, dims in dims_by_degree.items():
        for i, d in enumerate(dims):
            out[i] += (-1) ** k * d
    return out


def jk(X, fld=F2):
    return cx.concentrated(sh.extension_by_zero(X, fld, X.mask_of(["eta"])))


# -- basic complex algebra ------------------------------------------------------------


@pytest.mark.parametrize("fld", [F2, Field(3), QQ])
@pytest.mark.parametrize("make", SPACES)
def test_cohomology_matches_rank_oracle(make, fld):
    X = make()
    for M in samples(X, fld, 1, lo=-2, hi=2, max_dim=3):
        assert M.check_d2() is None
        assert cx.cohomology_dims(M) == O.pointwise_cohomology(M, fld.p)
        for n, dims in cx.cohomology_dims(M).items():
            assert cx.cohomology(M, n).dims == dims


def test_d2_violation_is_rejected():
    X = sier()
    k = sh.constant_sheaf(X, F2)
    idk = sh.identity(k)
    with pytest.raises(ComplexError):
        cx.make_complex(X, F2, {0: k, 1: k, 2: k}, {0: idk, 1: idk})


def test_identity_complex_is_acyclic():
    X = sier()
    k = sh.constant_sheaf(X, F2)
    C = cx.make_complex(X, F2, {0: k, 1: k}, {0: sh.identity(k)})
    assert cx.is_acyclic(C)


def test_cone_of_extension_by_zero_into_constant():
    X = sier()
    j = sh.extension_by_zero(X, F2, X.mask_of(["eta"]))
    k = sh.constant_sheaf(X, F2)
    f = sh.morphism(j, k, [F2.matrix([[1]]), F2.zeros(1, 0)])
    C = cx.cone(cx.ChainMap(cx.concentrated(j), cx.concentrated(k), {0: f})).complex
    assert cx.cohomology_dims(C) == {0: (0, 1)}


@pytest.mark.parametrize("make", SPACES)
def test_shift_and_cone_bookkeeping(make):
    X = make()
    rng = random.Random(4)
    for M in samples(X, F2, 2):
        for k in (-2, 1, 3):
            S = cx.shift(M, k)
            S.validate()
            assert cx.cohomology_dims(S) == {n - k: d for n, d in cx.cohomology_dims(M).items()}
        assert cx.is_acyclic(cx.cone(cx.identity_map(M)).complex)
        J = cx.injective_replacement(samples(X, F2, rng.randrange(10**6), 1)[0]).complex
        f = cx.random_chain_map(M, J, rng)
        f.validate()
        C = cx.cone(f).complex
        C.validate()
        # chi(cone) = chi(target) - chi(source), stalkwise
        lhs = euler(cx.cohomology_dims(C), X.n)
        a, b = euler(cx.cohomology_dims(M), X.n), euler(cx.cohomology_dims(J), X.n)
        assert lhs == [y - x for x, y in zip(a, b)]


# -- injective replacement -------------------------------------------------------------


def test_resolution_examples():
    X = sier()
    kx = cx.concentrated(sh.skyscraper(X, F2, "x"))
    kX = cx.concentrated(sh.constant_sheaf(X, F2))
    R = cx.injective_replacement(kx).complex
    assert R.degrees == [0] and R.term(0).injective == (0, 1)
    R = cx.injective_replacement(kX).complex
    assert R.degrees == [0] and R.term(0).injective == (1, 0)
    R = cx.injective_resolution(sh.extension_by_zero(X, F2, X.mask_of(["eta"]))).complex
    assert R.degrees == [0, 1]
    assert R.term(0).injective == (1, 0) and R.term(1).injective == (0, 1)


@pytest.mark.parametrize("fld", [F2, QQ])
@pytest.mark.parametrize("make", SPACES)
def test_replacement_is_quasi_isomorphism(make, fld):
    X = make()
    for M in samples(X, fld, 8, lo=-2, hi=2, max_dim=3):
        rep = cx.injective_replacement(M)
        I = rep.complex
        for n in I.degrees:
            assert I.term(n).injective is not None
        assert len(I.degrees) == 0 or I.hi <= (M.hi or 0) + X.n + 1
        rep.qis.validate()
        assert cx.is_acyclic(cx.cone(rep.qis).complex)


# -- local cohomology --------------------------------------------------------------------


def test_local_cohomology_examples():
    X = sier()
    x = X.mask_of(["x"])
    kx = cx.concentrated(sh.skyscraper(X, F2, "x"))
    kX = cx.concentrated(sh.constant_sheaf(X, F2))
    assert cx.local_cohomology_dims(kx, x) == {0: (0, 1)}
    assert cx.local_cohomology_dims(jk(X), x) == {1: (0, 1)}
    assert cx.local_cohomology(jk(X), x, 1).dims == (0, 1)
    assert cx.local_cohomology_dims(kX, x) == {}
    for M in (kx, kX, jk(X)):
        assert cx.local_cohomology_dims(M, 0) == {}


@pytest.mark.parametrize("fld", [F2, Field(5)])
def test_local_cohomology_on_sierpinski_closed_form(fld):
    """For a sheaf ``r: F_x -> F_eta``: ``H^0_x = ker r`` and ``H^1_x = coker r`` at ``x``."""
    X = sier()
    rng = random.Random(9)
    x = X.mask_of(["x"])
    for _ in range(30):
        a, b = rng.randint(0, 3), rng.randint(0, 3)
        r = fld.random(rng, a, b)
        F = sh.make_sheaf(X, fld, (a, b), {(1, 0): r})
        rk = O.rank(r.tolist(), fld.p)
        want = {}
        if b - rk:
            want[0] = (0, b - rk)
        if a - rk:
            want[1] = (0, a - rk)
        assert cx.local_cohomology_dims(cx.concentrated(F), x) == want


@pytest.mark.parametrize("make", SPACES)
def test_excision_triangle_euler_characteristic(make):
    """``R Gamma_Z M -> M -> R j_* j^* M`` is a triangle for ``U`` the complement of ``Z``."""
    X = make()
    for M in samples(X, F2, 12):
        for Z in X.closed_masks():
            U = X.full_mask & ~Z
            G = cx.local_cohomology_dims(M, Z)
            if U:
                P = cx.cohomology_dims(cx.pushforward_complex(cx.restrict_complex(M, U), X, U))
            else:
                P = {}
            lhs = [a + b for a, b in zip(euler(G, X.n), euler(P, X.n))]
            assert lhs == euler(cx.cohomology_dims(M), X.n)


def test_pushforward_examples():
    X = sier()
    U = X.mask_of(["eta"])
    kU = cx.restrict_complex(cx.concentrated(sh.constant_sheaf(X, F2)), U)
    P = cx.pushforward_complex(kU, X, U)
    assert cx.signature(P) == cx.signature(cx.concentrated(sh.constant_sheaf(X, F2)))
    assert cx.local_cohomology_dims(P, X.mask_of(["x"])) == {}


# -- RHom -------------------------------------------------------------------------------------


def test_rhom_examples():
    X = sier()
    kx = cx.concentrated(sh.skyscraper(X, F2, "x"))
    kX = cx.concentrated(sh.constant_sheaf(X, F2))
    assert cx.rhom(kx, kx) == {0: 1}
    assert cx.rhom(kx, kX) == {}
    assert cx.rhom(kX, kx) == {0: 1}
    assert cx.rhom(jk(X), kx) == {}
    # Ext^1(k_x, j_! k_U) is the extension 0 -> j_!k -> k_X -> k_x -> 0
    assert cx.rhom(kx, jk(X)) == {1: 1}


@pytest.mark.parametrize("make", SPACES)
def test_rhom_shift_bookkeeping(make):
    X = make()
    for M in samples(X, F2, 13, count=6):
        base = cx.rhom(M, M)
        assert cx.rhom(M, cx.shift(M, 1)) == {n - 1: d for n, d in base.items()}
        if not cx.is_acyclic(M):
            assert base.get(0, 0) >= 1


@pytest.mark.parametrize("make", SPACES)
def test_rhom_sheaves_into_injectives_is_hom(make):
    X = make()
    rng = random.Random(31)
    for _ in range(8):
        A = sh.random_sheaf(X, F2, rng, max_dim=2)
        B = sh.injective_sheaf(X, F2, [rng.randint(0, 1) for _ in range(X.n)])
        r = cx.rhom(cx.concentrated(A), cx.concentrated(B))
        h = len(sh.hom_basis(A, B))
        assert r == ({0: h} if h else {})
