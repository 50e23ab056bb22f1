"""Test binary quadratic forms and class groups"""
import numpy as np
import pytest

from epstein_zeros.exceptions import (
    NonFundamentalDiscriminantError,
    NotPositiveDefiniteError,
    UnsupportedGroupError,
)
from epstein_zeros.quadforms import (
    QuadForm,
    SplitKind,
    class_group,
    classify_primes,
    compose,
    is_fundamental,
    kronecker_symbol,
    reduce,
    representation_counts,
    splitting,
)
from epstein_zeros.util import primes_up_to

# pylint: disable=missing-function-docstring
# pylint: disable=invalid-name


def test_reduce_form() -> None:
    assert reduce(QuadForm(3, 5, 3)) == QuadForm(1, 1, 3)
    assert reduce(QuadForm(1, 1, 3)) == QuadForm(1, 1, 3)
    assert reduce(QuadForm(2, -1, 3)).is_reduced()


def test_reduce_rejects_indefinite() -> None:
    with pytest.raises(NotPositiveDefiniteError):
        reduce(QuadForm(1, 3, 1))


@pytest.mark.parametrize("disc", [-3, -4, -7, -8, -15, -20, -23, -24])
def test_fundamental(disc: int) -> None:
    assert is_fundamental(disc)


@pytest.mark.parametrize("disc", [-12, -16, -27, 5, 0])
def test_not_fundamental(disc: int) -> None:
    assert not is_fundamental(disc)


def test_non_fundamental_group() -> None:
    with pytest.raises(NonFundamentalDiscriminantError):
        class_group(-12)


def test_non_cyclic_group() -> None:
    with pytest.raises(UnsupportedGroupError):
        class_group(-84)


def test_class_group_15(group15) -> None:
    assert group15.h == 2
    assert group15.w == 2
    assert group15.forms == (QuadForm(1, 1, 4), QuadForm(2, 1, 2))
    assert group15.J == 2
    assert group15.xi() == [4, 4]


def test_class_group_units() -> None:
    assert class_group(-4).h == 1
    assert class_group(-4).w == 4
    assert class_group(-3).w == 6


def test_class_group_23(group23) -> None:
    assert group23.h == 3
    assert group23.merged_characters() == [0, 1]
    assert group23.xi() == [4, 2]
    assert not group23.is_real(1)
    assert group23.order(1) == 3


def test_group_law(group23) -> None:
    for k in range(group23.h):
        assert compose(group23, 0, k) == k
        assert compose(group23, k, group23.inverse(k)) == 0
    with pytest.raises(IndexError):
        compose(group23, 0, 3)


def test_character_orthogonality(group23) -> None:
    gram = group23.chars @ group23.chars.conj().T
    assert np.allclose(gram, group23.h * np.eye(group23.h), atol=1e-12)


def test_kronecker_symbol() -> None:
    assert kronecker_symbol(-15, 2) == 1
    assert kronecker_symbol(-15, 3) == 0
    assert kronecker_symbol(-15, 7) == -1
    assert kronecker_symbol(-4, 5) == 1
    with pytest.raises(ValueError):
        kronecker_symbol(-4, 0)


def test_splitting(group15) -> None:
    assert splitting(group15, 7).kind == SplitKind.INERT
    assert splitting(group15, 3).kind == SplitKind.RAMIFIED
    split = splitting(group15, 17)
    assert split.kind == SplitKind.SPLIT
    assert split.class_index == 1  # Q(1, -3) = 2 - 3 + 18
    assert splitting(group15, 19).class_index == 0  # Q(1, 2) = 1 + 2 + 16


def test_classify_primes_matches_splitting(group23) -> None:
    table = classify_primes(group23, 200)
    assert list(table.primes) == list(primes_up_to(200))
    for position, p in enumerate(table.primes.tolist()):
        assert table.split_at(position) == splitting(group23, p)


def test_representation_counts() -> None:
    values, counts = representation_counts(QuadForm(1, 0, 1), 25)
    found = dict(zip(values.tolist(), counts.tolist()))
    assert found[1] == 4
    assert found[2] == 4
    assert found[5] == 8
    assert found[25] == 12
    assert 3 not in found


def test_group_json(group15) -> None:
    data = group15.to_json()
    assert data["D"] == -15
    assert data["forms"] == [[1, 1, 4], [2, 1, 2]]
    assert data["chars"][1][1] == {"re": -1.0, "im": 0.0}
