from fractions import Fraction

import pytest

from esrel.modforms import cusp_coordinates, cusp_dim, eigenform, hecke_matrix, miller_basis, trace_Tn
from esrel.qseries import delta, eisenstein, hecke_Tm


@pytest.mark.parametrize(
    "weight,dim",
    [(4, 0), (10, 0), (12, 1), (14, 0), (16, 1), (24, 2), (26, 1), (36, 3), (38, 2)],
)
def test_dimension_formula(weight, dim):
    assert cusp_dim(weight) == dim


def test_weight_12_basis_is_delta():
    space = miller_basis(12, 20)
    assert space.basis == (delta(20),)


def test_weight_24_echelon():
    space = miller_basis(24, 10)
    assert space.dim == 2
    f1, f2 = space.basis
    assert (f1[1], f1[2]) == (1, 0)
    assert (f2[1], f2[2]) == (0, 1)


def test_weight_10_empty():
    assert miller_basis(10, 10).basis == ()


def test_traces():
    assert trace_Tn(12, 1) == 1
    assert trace_Tn(12, 2) == -24
    assert trace_Tn(24, 1) == 2


def test_eigenforms():
    assert eigenform(12, 15) == delta(15)
    assert eigenform(16, 15) == delta(15) * eisenstein(4, 15)
    with pytest.raises(ValueError):
        eigenform(24)


@pytest.mark.parametrize("weight", [24, 36, 48])
def test_hecke_matrices_integral_and_commuting(weight):
    a = hecke_matrix(weight, 2)
    b = hecke_matrix(weight, 3)
    assert all(x.denominator == 1 for row in a + b for x in row)
    d = len(a)
    ab = [[sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    ba = [[sum(b[i][k] * a[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    assert ab == ba


def test_eigenvalue_at_two():
    f = eigenform(12, 10)
    assert hecke_Tm(f, 12, 2)[1] == f[2]


def test_cusp_coordinates():
    f1, f2 = miller_basis(24, 20).basis
    g = f1.scale(3) + f2.scale(Fraction(-1, 2))
    assert cusp_coordinates(g, 24) == [3, Fraction(-1, 2)]
    assert cusp_coordinates(eisenstein(24, 20), 24) is None
