import pytest
from hypothesis import given
from hypothesis import strategies as st

from setsim import (
    GreekCounts,
    Universe,
    UniverseMismatchError,
    enumerate_subsets,
    greek_decompose,
    symmetric_difference,
)


def test_universe_bounds():
    Universe(1)
    Universe(24)
    with pytest.raises(ValueError):
        Universe(0)
    with pytest.raises(ValueError):
        Universe(25)


def test_subset_construction_and_elements():
    u = Universe(5)
    s = u.subset([3, 1])
    assert s.mask == 0b101
    assert s.elements() == (1, 3)
    assert len(s) == 2
    assert 1 in s and 2 not in s
    with pytest.raises(ValueError):
        u.subset([6])
    with pytest.raises(ValueError):
        u.from_mask(1 << 5)


def test_symmetric_difference_examples():
    u = Universe(4)
    x, y = u.subset([1, 2]), u.subset([2, 3])
    assert symmetric_difference(x, y) == u.subset([1, 3])
    assert symmetric_difference(x, x) == u.empty()
    assert symmetric_difference(x, u.empty()) == x
    assert symmetric_difference(x, y) == symmetric_difference(y, x)


def test_cross_universe_is_an_error():
    a, b = Universe(3), Universe(4)
    with pytest.raises(UniverseMismatchError):
        symmetric_difference(a.subset([1]), b.subset([1]))
    with pytest.raises(UniverseMismatchError):
        a.subset([1]) | b.subset([2])


def test_enumerate_subsets_small():
    assert [s.elements() for s in enumerate_subsets(Universe(1))] == [(), (1,)]
    assert [s.elements() for s in enumerate_subsets(Universe(2))] == [(), (1,), (2,), (1, 2)]
    subs = list(enumerate_subsets(Universe(3)))
    assert len(subs) == 8
    assert subs[0].mask == 0 and subs[-1].elements() == (1, 2, 3)
    assert len(set(s.mask for s in subs)) == 8


def test_greek_decompose_example():
    u = Universe(6)
    x, y, yt = u.subset([1, 2, 3]), u.subset([2, 3, 4]), u.subset([3, 4, 5])
    assert greek_decompose(x, y, yt) == GreekCounts(1, 1, 1, 1, 1, 1)


def test_greek_decompose_degenerate_cases():
    u = Universe(3)
    assert greek_decompose(u.empty(), u.empty(), u.empty()) == GreekCounts(0, 0, 0, 0, 0, 3)
    assert greek_decompose(u.full(), u.full(), u.full()) == GreekCounts(0, 0, 3, 0, 0, 0)


def test_greek_decompose_rejects_non_nested():
    u = Universe(3)
    # x^y = {1,2}, x^yt = {2}: not nested
    with pytest.raises(ValueError):
        greek_decompose(u.subset([1]), u.subset([2]), u.subset([1, 2]))


def _check_greek_equalities(u, x, y, yt):
    g = greek_decompose(x, y, yt)
    assert len(x) == g.alpha + g.beta + g.zeta
    assert len(y) == g.beta + g.zeta + g.delta
    assert len(yt) == g.zeta + g.delta + g.epsilon
    assert len(x & y) == g.beta + g.zeta
    assert len(x & yt) == g.zeta
    assert len(x ^ y) == g.alpha + g.delta
    assert len(x ^ yt) == g.alpha + g.beta + g.delta + g.epsilon
    assert len((x | y).complement()) == g.eta + g.epsilon
    assert len((x | yt).complement()) == g.eta
    assert sum(g) == u.size


@given(
    n=st.integers(2, 6),
    data=st.data(),
)
def test_greek_equalities_on_nested_triples(n, data):
    # Build y = x^a, yt = x^b with a subset of b so that nesting holds.
    u = Universe(n)
    x = u.from_mask(data.draw(st.integers(0, u.full_mask)))
    b = data.draw(st.integers(0, u.full_mask))
    a = data.draw(st.integers(0, u.full_mask)) & b
    y = x ^ u.from_mask(a)
    yt = x ^ u.from_mask(b)
    _check_greek_equalities(u, x, y, yt)


def test_symmetric_difference_cardinality_identity_exhaustive():
    # |x^y| = |x| + |y| - 2|x&y| for every pair, n = 8
    n = 8
    for xm in range(1 << n):
        px = xm.bit_count()
        for ym in range(1 << n):
            assert (xm ^ ym).bit_count() == px + ym.bit_count() - 2 * (xm & ym).bit_count()


def test_symmetric_difference_triangle_inclusion_exhaustive():
    # x^z is contained in (x^y) | (y^z) for every triple, n = 6
    n = 6
    size = 1 << n
    for xm in range(size):
        for ym in range(size):
            xy = xm ^ ym
            for zm in range(size):
                assert (xm ^ zm) & ~(xy | (ym ^ zm)) == 0


def test_serialization_form():
    u = Universe(4)
    assert list(u.subset([4, 1, 3]).elements()) == [1, 3, 4]
    assert repr(u.subset([2, 4])) == "{2,4}"
