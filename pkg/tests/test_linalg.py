from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrb.linalg import (
    Matrix,
    SparseRowSpace,
    Subspace,
    frac,
    nullspace_basis,
    quotient_space,
    rank,
    unit_vector,
)

rationals = st.builds(
    Fraction, st.integers(-9, 9), st.integers(1, 4)
)


def matrices(max_dim=4):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(
                st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r
            ).map(Matrix)
        )
    )


def test_frac_accepts_wire_format():
    assert frac("3/2") == Fraction(3, 2)
    assert frac("-7") == Fraction(-7)
    with pytest.raises(ValueError):
        frac("3/0")  # zero denominator is outside the grammar
    with pytest.raises(ValueError):
        frac("1.5")


def test_rank_identity_and_zero():
    assert rank(Matrix.identity(2)) == 2
    assert rank(Matrix.zero(3, 3)) == 0


def test_rank_dependent_rows():
    # [[1,2],[2,4]]: second row is twice the first
    assert rank(Matrix([[1, 2], [2, 4]])) == 1


def test_nullspace_identity_empty():
    assert nullspace_basis(Matrix.identity(3)).dim == 0


def test_nullspace_zero_full():
    ns = nullspace_basis(Matrix.zero(2, 3))
    assert ns.dim == 3


def test_nullspace_direct_substitution():
    m = Matrix([[1, 1]])
    ns = nullspace_basis(m)
    assert ns.dim == 1
    v = ns.basis[0]
    assert m.apply(v) == (Fraction(0),)
    assert ns.contains((1, -1))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + nullspace_basis(m).dim == m.cols


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_nullspace_vectors_are_kernel(m):
    for v in nullspace_basis(m).basis:
        assert all(x == 0 for x in m.apply(v))


def test_quotient_no_relations_is_identity():
    qs = quotient_space(2, [])
    assert qs.dim == 2
    assert qs.project == Matrix.identity(2)


def test_quotient_kills_single_axis():
    qs = quotient_space(2, [(Fraction(1), Fraction(0))])
    assert qs.dim == 1
    assert qs.project.apply((1, 0)) == (Fraction(0),)


def test_quotient_two_relations_in_three_dims():
    qs = quotient_space(3, [(Fraction(1), Fraction(1), Fraction(0)),
                            (Fraction(0), Fraction(1), Fraction(1))])
    assert qs.dim == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.lists(st.lists(rationals, min_size=3, max_size=3), max_size=4))
def test_quotient_properties(extra, rel3):
    ambient = 3
    relations = [tuple(v) for v in rel3]
    qs = quotient_space(ambient, relations)
    # projection kills every relation
    for r in relations:
        assert all(x == 0 for x in qs.project.apply(r))
    # project o section = identity on the quotient
    sec = qs.section_matrix()
    assert qs.project @ sec == Matrix.identity(qs.dim)
    # dimension law
    stacked = Matrix.from_rows(relations, cols=ambient) if relations else Matrix.zero(0, ambient)
    assert qs.dim == ambient - stacked.rank()


def test_section_is_standard_basis_complement():
    qs = quotient_space(3, [(Fraction(1), Fraction(2), Fraction(0))])
    # pivot lands on the first column, so representatives are e2, e3
    assert qs.section == (unit_vector(3, 1), unit_vector(3, 2))


def test_solve_consistent_and_inconsistent():
    m = Matrix([[1, 2], [2, 4]])
    assert m.solve((1, 2)) is not None
    assert m.solve((1, 3)) is None


def test_subspace_rejects_dependent_basis():
    with pytest.raises(ValueError):
        Subspace(2, ((Fraction(1), Fraction(0)), (Fraction(2), Fraction(0))))


def test_subspace_spanned_by_canonical():
    s1 = Subspace.spanned_by(2, [(Fraction(2), Fraction(0)), (Fraction(1), Fraction(1))])
    s2 = Subspace.spanned_by(2, [(Fraction(1), Fraction(1)), (Fraction(1), Fraction(0))])
    assert s1 == s2
    assert s1.dim == 2


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_rank_and_nullspace_against_sympy(m):
    sympy = pytest.importorskip("sympy")
    sm = sympy.Matrix([[sympy.Rational(x) for x in row] for row in m.entries])
    assert m.rank() == sm.rank()
    ours = m.nullspace_basis()
    theirs = sm.nullspace()
    assert ours.dim == len(theirs)
    for v in theirs:
        vec = tuple(Fraction(int(x.p), int(x.q)) for x in v)
        assert ours.contains(vec)


def test_sparse_row_space_rank_matches_dense():
    rows = [
        {0: Fraction(1), 2: Fraction(2)},
        {1: Fraction(1)},
        {0: Fraction(2), 1: Fraction(1), 2: Fraction(4)},
    ]
    rs = SparseRowSpace()
    for r in rows:
        rs.add(dict(r))
    dense = Matrix([[1, 0, 2], [0, 1, 0], [2, 1, 4]])
    assert rs.rank == dense.rank() == 2
    assert rs.contains({0: Fraction(3), 1: Fraction(1), 2: Fraction(6)})
    assert not rs.contains({2: Fraction(1)})
