import itertools

import pytest

import oracles as O
from tstruct.errors import NotBounded, NotDecreasing, NotMonotone, SpaceMismatch
from tstruct.space import chain3, enumerate_spaces, point, sier, vspace
from tstruct.supports import (
    NoSolution,
    SupportDatum,
    check_t_criterion,
    convolve,
    datum_from_levels,
    dual_star,
    empty_family,
    example_oco,
    family_from_points,
    full_family,
    psi_truncated,
    residuate,
    sigma_leq,
    standard_S,
    standard_T,
)

NAMED = [point, sier, chain3, vspace]
SMALL = [sier, chain3, vspace]


def _data(X, lo=-1, hi=2):
    return [SupportDatum(X, p) for p in O.data_window(X, lo, hi)]


# -- worked cases -------------------------------------------------------------------


def test_oco_fails_with_witness():
    X = sier()
    rep = check_t_criterion(example_oco(X))
    assert not rep.holds and rep.consistent
    assert rep.witness == ("eta", "x")


@pytest.mark.parametrize("make", NAMED)
def test_standard_data_satisfy_criterion(make):
    X = make()
    assert check_t_criterion(standard_S(X)).holds
    assert check_t_criterion(standard_T(X)).holds


@pytest.mark.parametrize("make", NAMED)
def test_dual_of_standard_data(make):
    X = make()
    assert dual_star(standard_T(X)) == standard_S(X)
    assert dual_star(standard_S(X)) == standard_T(X)


def test_dual_of_oco_matches_literal_oracle():
    X = sier()
    assert dual_star(example_oco(X)).p == O.dual_star(X, (0, 2)) == (-1, -1)


def test_convolve_s_s_is_oco():
    X = sier()
    assert convolve(standard_S(X), standard_S(X), check=True).p == (0, 2)


def test_residuate_worked_cases():
    X = sier()
    res = residuate(example_oco(X), standard_S(X))
    assert isinstance(res, NoSolution) and res.witness == ("eta", "x")
    assert res.candidate.p == (-1, -1)
    for theta in _data(X):
        assert residuate(standard_T(X), theta) == theta
    assert residuate(standard_S(X), standard_S(X)) == standard_T(X)


def test_levels_round_trip_and_errors():
    X = chain3()
    for phi in _data(X, -2, 3):
        assert datum_from_levels(X, phi.levels()) == phi
    full, none = full_family(X), empty_family(X)
    with pytest.raises(NotDecreasing):
        datum_from_levels(X, {0: full, 1: family_from_points(X, ["x"]), 2: family_from_points(X, ["y"]), 3: none})
    with pytest.raises(NotBounded):
        datum_from_levels(X, {0: family_from_points(X, ["x"]), 1: none})
    with pytest.raises(NotBounded):
        datum_from_levels(X, {0: full, 1: full})
    with pytest.raises(NotMonotone):
        SupportDatum(X, (1, 0, 0))
    with pytest.raises(SpaceMismatch):
        convolve(standard_T(X), standard_T(sier()))


def test_family_from_points_closes_up():
    X = chain3()
    assert family_from_points(X, ["y"]).member_points == frozenset({"y", "x"})


# -- literal oracles on the named spaces -------------------------------------------------------


@pytest.mark.parametrize("make", SMALL)
def test_convolution_matches_oracle(make):
    X = make()
    D = _data(X)
    for phi, psi in itertools.product(D, D):
        assert convolve(phi, psi, check=True).p == O.convolve(X, phi.p, psi.p)


@pytest.mark.parametrize("make", NAMED)
def test_dual_matches_oracle(make):
    X = make()
    for phi in _data(X, -2, 3):
        assert dual_star(phi).p == O.dual_star(X, phi.p)


@pytest.mark.parametrize("make", SMALL)
def test_criterion_matches_oracle(make):
    X = make()
    for phi in _data(X, -2, 3):
        rep = check_t_criterion(phi)
        assert rep.ii == O.cond_ii(X, phi.p)
        assert rep.iii == O.cond_iii(X, phi.p)
        assert rep.v == O.cond_v(X, phi.p)


def test_criterion_iv_matches_search_oracle():
    X = sier()
    for phi in _data(X, -2, 3):
        assert check_t_criterion(phi).iv == O.cond_iv(X, phi.p)


def test_criterion_on_all_two_point_spaces():
    for X in enumerate_spaces(2, min_points=2):
        for phi in _data(X, -2, 3):
            rep = check_t_criterion(phi)
            assert (rep.ii, rep.iii, rep.v) == (O.cond_ii(X, phi.p), O.cond_iii(X, phi.p), O.cond_v(X, phi.p))
            if not rep.holds:
                x, y = (X.idx(w) for w in rep.witness)
                assert phi.p[y] - phi.p[x] > X.codim[y] - X.codim[x]


@pytest.mark.parametrize("make", [sier, vspace])
def test_residuation_matches_oracle(make):
    X = make()
    D = _data(X)
    for phi, theta in itertools.product(D, D):
        lev = O.residual(X, phi.p, theta.p)
        psi = O.sfunction(X, lev, min(theta.p) - max(phi.p) - 3, max(theta.p) - min(phi.p) + 3)
        res = residuate(phi, theta)
        solves = O.convolve(X, phi.p, psi) == theta.p
        if solves:
            assert res == SupportDatum(X, psi)
        else:
            assert isinstance(res, NoSolution) and res.candidate.p == psi
            x, y = (X.idx(w) for w in res.witness)
            dp, dt = phi.p[y] - phi.p[x], theta.p[y] - theta.p[x]
            assert not 0 <= dp <= dt
        if X.n > 2:
            continue
        # no second solution inside the window
        others = [q for q in O.data_window(X, -4, 4) if O.convolve(X, phi.p, q) == theta.p]
        assert others == ([psi] if solves else [])


@pytest.mark.parametrize("make", [sier, chain3])
def test_psi_truncated_matches_oracle(make):
    X = make()
    D = _data(X)
    for phi, theta in itertools.product(D, D):
        for a in range(min(phi.p) - 2, max(phi.p) + 3):
            lev = O.residual(X, phi.p, theta.p, k_max=a)
            ref = O.sfunction(X, lev, min(theta.p) - max(phi.p) - 6, max(theta.p) - min(phi.p) + 6)
            assert psi_truncated(phi, theta, a).p == ref


def test_sigma_leq_levels():
    X = chain3()
    phi = SupportDatum(X, (0, 1, 3))
    s = sigma_leq(phi, 1)
    for k in range(-1, 5):
        assert s.level(k) == (phi.level(k) if k <= 1 else empty_family(X))
