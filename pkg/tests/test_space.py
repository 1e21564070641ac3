import pytest

import oracles as O
from tstruct.errors import CodimError, CycleError, DuplicatePoint, NotOpen, UnknownPoint
from tstruct.space import (
    chain3,
    codim_of_set,
    enumerate_posets,
    enumerate_spaces,
    irreducible_components,
    point,
    sier,
    validate_space,
    vspace,
)


def test_transitive_closure_is_computed():
    X = validate_space(["a", "b", "c"], [("a", "b"), ("b", "c")], {"a": 0, "b": 1, "c": 2})
    assert X.specializes("a", "c")
    assert not X.specializes("c", "a")
    assert X.closure_masks == chain3().closure_masks


@pytest.mark.parametrize(
    "pts,edges,codim,err",
    [
        (["a", "a"], [], {"a": 0}, DuplicatePoint),
        (["a", "b"], [("a", "b"), ("b", "a")], {"a": 0, "b": 1}, CycleError),
        (["a", "b"], [("a", "b")], {"a": 1, "b": 1}, CodimError),
        (["a", "b"], [("a", "b")], {"a": 2, "b": 1}, CodimError),
        (["a"], [("a", "z")], {"a": 0}, UnknownPoint),
        (["a"], [], {"a": -1}, CodimError),
        (["a", "b"], [], {"a": 0}, CodimError),
    ],
)
def test_validation_errors(pts, edges, codim, err):
    with pytest.raises(err):
        validate_space(pts, edges, codim)


@pytest.mark.parametrize("make", [point, sier, chain3, vspace])
def test_closed_sets_match_oracle(make):
    X = make()
    ours = sorted(X.closed_masks())
    ref = sorted(sum(1 << i for i in z) for z in O.closed_sets(X))
    assert ours == ref
    opens = sorted(X.open_masks())
    assert opens == sorted(X.full_mask & ~m for m in ref)


def test_named_space_shapes():
    X = sier()
    assert X.ids == ("eta", "x") and X.codim == (0, 1)
    assert X.is_closed_mask(X.mask_of(["x"])) and not X.is_closed_mask(X.mask_of(["eta"]))
    assert X.is_open_mask(X.mask_of(["eta"]))
    V = vspace()
    ab = V.mask_of(["a", "b"])
    assert codim_of_set(V, ab) == 1
    assert sorted(irreducible_components(V, ab)) == ["a", "b"]
    assert irreducible_components(V, V.full_mask) == ["eta"]


def test_restrict_requires_open():
    X = sier()
    U = X.restrict(X.mask_of(["eta"]))
    assert U.ids == ("eta",)
    with pytest.raises(NotOpen):
        X.restrict(X.mask_of(["x"]))


def test_poset_counts():
    # unlabeled posets on 1..4 elements
    assert [len(enumerate_posets(n)) for n in (1, 2, 3, 4)] == [1, 2, 5, 16]


def test_enumerated_spaces_are_valid():
    seen = set()
    for X in enumerate_spaces(3):
        for x, y in O.specializations(X):
            assert X.codim[y] > X.codim[x]
        assert max(X.codim) <= 3
        key = (X.closure_masks, X.codim)
        assert key not in seen
        seen.add(key)
