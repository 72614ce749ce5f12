from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combatlas import linalg
from combatlas.linalg import FLOAT, LinalgError, SymmetricMatrix, mpq


def sym(rows):
    return SymmetricMatrix(rows)


def test_to_fraction_normalizes_strings():
    assert str(linalg.to_fraction("2/4")) == "1/2"
    assert linalg.to_fraction(Fraction(3, 6)) == Fraction(1, 2)
    assert linalg.to_fraction(7) == 7


@pytest.mark.parametrize("bad", [True, 0.5, "x/2", "1/0", None])
def test_to_fraction_rejects(bad):
    with pytest.raises(LinalgError):
        linalg.to_fraction(bad)


def test_asymmetric_matrix_rejected():
    with pytest.raises(LinalgError):
        sym([[1, 2], [3, 1]])


def test_inertia_small_cases():
    assert tuple(linalg.inertia(sym([[0, 1], [1, 0]]))) == (1, 1, 0)
    assert tuple(linalg.inertia(sym([[1, 0], [0, 1]]))) == (2, 0, 0)
    assert tuple(linalg.inertia(sym([[0, 0], [0, 0]]))) == (0, 0, 2)
    assert tuple(linalg.inertia(sym([[1, 1], [1, 1]]))) == (1, 0, 1)


def test_ope_and_ndc_on_hyperbolic_plane():
    M = sym([[0, 1], [1, 0]])
    assert linalg.check_ope(M) and linalg.check_ndc(M)
    I = SymmetricMatrix.identity(2)
    assert not linalg.check_ope(I) and not linalg.check_ndc(I)


def test_ndc_at_requires_positive_direction():
    M = sym([[1, 0], [0, -1]])
    assert linalg.ndc_at(M, [1, 0])
    with pytest.raises(LinalgError):
        linalg.ndc_at(M, [0, 1])


def test_hyp_pair_exact_and_vacuous():
    M = sym([[1, 0], [0, -1]])
    assert linalg.check_hyp_pair(M, [0, 1], [1, 0])
    assert linalg.check_hyp_pair(M, [1, 0], [0, 1])  # <w,Mw> < 0
    I = SymmetricMatrix.identity(2)
    assert not linalg.check_hyp_pair(I, [0, 1], [1, 0])


def test_float_backend_matches_rational():
    rows = [[2, 1, 0], [1, -1, 3], [0, 3, 0]]
    exact = linalg.inertia(sym(rows))
    approx = linalg.inertia(SymmetricMatrix(np.array(rows, dtype=float), FLOAT))
    assert exact == approx


def test_determinant_and_rank():
    M = sym([[2, 1], [1, 2]])
    assert linalg.determinant(M) == 3
    assert linalg.rank(sym([[1, 1], [1, 1]])) == 1


def test_jacobi_matches_numpy():
    M = sym([[4, 1, 2], [1, 3, 0], [2, 0, 5]])
    ours = sorted(linalg.jacobi_eigenvalues(M))
    assert np.allclose(ours, np.linalg.eigvalsh(M.to_numpy().astype(float)), atol=1e-10)


def test_support_and_irreducibility():
    M = sym([[0, 0, 0], [0, 1, 1], [0, 1, 1]])
    assert linalg.support(M) == (1, 2)
    assert linalg.irreducible_on_support(M)
    assert not linalg.irreducible_on_support(sym([[1, 0], [0, 1]]))


def test_json_round_trip():
    M = sym([["1/2", 3], [3, "-2/4"]])
    obj = linalg.matrix_to_json(M)
    assert obj["rows"][1][1] == "-1/2"
    assert linalg.matrix_from_json(obj).rows() == M.rows()


small_ints = st.integers(-4, 4)


@st.composite
def rational_symmetric(draw):
    r = draw(st.integers(1, 5))
    rows = [[0] * r for _ in range(r)]
    for i in range(r):
        for j in range(i, r):
            rows[i][j] = rows[j][i] = mpq(draw(small_ints), draw(st.integers(1, 3)))
    return SymmetricMatrix(rows)


@settings(max_examples=150, deadline=None)
@given(rational_symmetric())
def test_ope_equals_ndc(M):
    assert linalg.check_ope(M) == linalg.check_ndc(M)


@settings(max_examples=100, deadline=None)
@given(rational_symmetric(), st.data())
def test_inertia_is_congruence_invariant(M, data):
    r = M.order
    # unit lower-triangular S is invertible
    S = [[1 if i == j else (data.draw(small_ints) if i > j else 0) for j in range(r)] for i in range(r)]
    assert linalg.inertia(M.congruent(S)) == linalg.inertia(M)


@settings(max_examples=100, deadline=None)
@given(rational_symmetric())
def test_inertia_counts_sum_to_order(M):
    inn = linalg.inertia(M)
    assert sum(inn) == M.order
    lam = np.linalg.eigvalsh(M.to_numpy().astype(float))
    assert inn.n_pos == int(np.sum(lam > 1e-9 * max(1.0, np.abs(lam).max())))
