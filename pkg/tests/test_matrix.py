import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import NotInvertible, SizeLimit
from src.matrix import (Matrix, adjugate, block_matrix, characteristic_polynomial, congruence,
                        orthogonal_sum, pfaffian, standard_form)
from src.ring import ring_parse

Z = ring_parse('Z')

KRUSEMEYER = [[1, 1, -13], [-1, -1, 12], [2, 3, 25]]


def skew4(t):
    m01, m02, m03, m12, m13, m23 = t
    return Matrix.from_rows(Z, [[0, m01, m02, m03],
                                [-m01, 0, m12, m13],
                                [-m02, -m12, 0, m23],
                                [-m03, -m13, -m23, 0]])


class TestMatrixBasics:

    def test_shape_and_indexing(self):
        M = Matrix.from_rows(Z, KRUSEMEYER)
        assert M.shape == (3, 3)
        assert M[2, 1] == 3
        assert M[0:2, 1:3] == Matrix.from_rows(Z, [[1, -13], [-1, 12]])
        assert M.T[1, 2] == 3

    def test_ragged_rows(self):
        with pytest.raises(ValueError, match="ragged"):
            Matrix.from_rows(Z, [[1, 2], [3]])

    def test_multiply_shape_mismatch(self):
        with pytest.raises(ValueError, match="cannot multiply"):
            Matrix.identity(Z, 2) @ Matrix.identity(Z, 3)

    def test_ring_mismatch(self):
        with pytest.raises(ValueError, match="ring mismatch"):
            Matrix.identity(Z, 2) + Matrix.identity(ring_parse('F_5'), 2)

    def test_empty_product(self):
        A = Matrix.zeros(Z, 2, 0)
        B = Matrix.zeros(Z, 0, 3)
        assert A @ B == Matrix.zeros(Z, 2, 3)

    def test_orthogonal_sum_and_blocks(self):
        A = Matrix.from_rows(Z, [[1, 2], [3, 4]])
        B = Matrix.from_rows(Z, [[5]])
        S = orthogonal_sum(A, B)
        assert S == Matrix.from_rows(Z, [[1, 2, 0], [3, 4, 0], [0, 0, 5]])
        assert block_matrix([[A, A], [A, A]]).shape == (4, 4)

    def test_with_entries_copies(self):
        I = Matrix.identity(Z, 2)
        M = I.with_entries({(0, 1): 7})
        assert M[0, 1] == 7
        assert I[0, 1] == 0


class TestDeterminant:

    def test_krusemeyer_matrix(self):
        assert Matrix.from_rows(Z, KRUSEMEYER).determinant() == 1

    def test_characteristic_polynomial(self):
        M = Matrix.from_rows(Z, [[1, 2], [3, 4]])
        assert characteristic_polynomial(M) == [Z(1), Z(-5), Z(-2)]

    def test_adjugate(self):
        M = Matrix.from_rows(Z, [[1, 2], [3, 4]])
        assert adjugate(M) == Matrix.from_rows(Z, [[4, -2], [-3, 1]])

    def test_inverse_over_integers(self):
        M = Matrix.from_rows(Z, KRUSEMEYER)
        assert M @ M.inverse() == Matrix.identity(Z, 3)

    def test_inverse_needs_unit_determinant(self):
        with pytest.raises(NotInvertible):
            Matrix.diagonal(Z, [2, 1]).inverse()

    def test_determinant_with_zero_divisors(self):
        R = ring_parse('Z/6')
        M = Matrix.from_rows(R, [[2, 3], [3, 2]])
        assert M.determinant() == 4 - 9

    def test_non_square(self):
        with pytest.raises(ValueError, match="square"):
            Matrix.zeros(Z, 2, 3).determinant()

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-9, 9), min_size=9, max_size=9),
           st.lists(st.integers(-9, 9), min_size=9, max_size=9))
    def test_determinant_is_multiplicative(self, xs, ys):
        A = Matrix.from_rows(Z, [xs[0:3], xs[3:6], xs[6:9]])
        B = Matrix.from_rows(Z, [ys[0:3], ys[3:6], ys[6:9]])
        assert (A @ B).determinant() == A.determinant() * B.determinant()


class TestPfaffian:

    def test_standard_forms(self):
        assert pfaffian(standard_form(Z, 'psi', 2)) == 1
        assert pfaffian(standard_form(Z, 'h', 2)) == -1
        assert pfaffian(standard_form(Z, 'psi', 1)) == 1

    def test_four_by_four_formula(self):
        M = skew4((1, 2, 3, 4, 5, 6))
        assert pfaffian(M) == 1 * 6 - 2 * 5 + 3 * 4

    def test_orthogonal_sum_is_multiplicative(self):
        M = skew4((1, 2, 3, 4, 5, 6))
        N = skew4((0, 1, 0, 0, 2, 0))
        assert pfaffian(orthogonal_sum(M, N)) == pfaffian(M) * pfaffian(N)

    def test_odd_size(self):
        with pytest.raises(ValueError, match="even size"):
            pfaffian(Matrix.zeros(Z, 3, 3))

    def test_not_skew(self):
        with pytest.raises(ValueError, match="skew"):
            pfaffian(standard_form(Z, 'sigma', 1))

    def test_size_limit(self):
        with pytest.raises(SizeLimit):
            pfaffian(standard_form(Z, 'psi', 13))

    def test_large_block_diagonal_is_cheap(self):
        assert pfaffian(standard_form(Z, 'psi', 12)) == 1

    def test_disconnected_odd_component(self):
        M = skew4((1, 0, 0, 0, 0, 0))
        assert pfaffian(M) == 0

    @settings(max_examples=40, deadline=None)
    @given(st.tuples(*[st.integers(-20, 20)] * 6))
    def test_square_is_determinant(self, t):
        M = skew4(t)
        assert pfaffian(M) * pfaffian(M) == M.determinant()

    @settings(max_examples=20, deadline=None)
    @given(st.tuples(*[st.integers(-5, 5)] * 6), st.integers(-5, 5), st.integers(0, 3), st.integers(0, 3))
    def test_elementary_congruence_preserves_pfaffian(self, t, lam, i, j):
        if i == j:
            return
        M = skew4(t)
        E = Matrix.identity(Z, 4).with_entries({(i, j): lam})
        assert pfaffian(congruence(E, M)) == pfaffian(M)


class TestStandardForms:

    def test_psi_and_h_are_skew(self):
        for kind in ('psi', 'h'):
            assert standard_form(Z, kind, 3).is_skew()

    def test_sigma_is_involution(self):
        s = standard_form(Z, 'sigma', 2)
        assert s @ s == Matrix.identity(Z, 4)

    def test_gamma_needs_unit(self):
        with pytest.raises(NotInvertible):
            standard_form(Z, 'gamma', 1, 2)
        with pytest.raises(ValueError, match="requires a unit"):
            standard_form(Z, 'gamma', 1)

    def test_gamma_entries(self):
        R = ring_parse('F_5')
        assert standard_form(R, 'gamma', 1, 3) == Matrix.diagonal(R, [3, 1])

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown standard form"):
            standard_form(Z, 'omega', 1)

    def test_congruence(self):
        G = Matrix.from_rows(Z, [[1, 1], [0, 1]])
        psi = standard_form(Z, 'psi', 1)
        assert congruence(G, psi) == psi
