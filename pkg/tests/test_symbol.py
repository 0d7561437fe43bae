import numpy as np
import pytest

from src.elem import BlockDecomposition, ElemWord, elementary
from src.errors import NotInvertible, NotUnimodular
from src.matrix import Matrix, congruence, pfaffian, standard_form
from src.projmod import ProjModule, standard_trivialization, trivialization_from_row
from src.ring import bezout_witness, ring_parse
from src.selftest import random_elementary_word, random_module_word, random_unimodular_row
from src.symbol import (classical_vaserstein, coincide_classical_check, elementary_invariance_check,
                        epi_on, free_symbol_data, generalized_symbol, scale_check,
                        section_independence_witness, symbol_forms, symbol_preimage)
from src.witt import VTriple, unit_action

Z = ring_parse('Z')
F5 = ring_parse('F_5')
F7 = ring_parse('F_7')
Z7 = ring_parse('Z/7')


def row_data(ring, row, witness=None):
    a = Matrix.row(ring, row)
    if witness is None:
        witness = bezout_witness(a.entries())
    return a, Matrix.column(ring, witness)


def kernel_data(ring):
    P0, triv = trivialization_from_row(Matrix.row(ring, [2, 3, 0]), Matrix.column(ring, [-1, 1, 0]))
    epi = epi_on(P0, Matrix.row(ring, [1, 2, 4, 1]), Matrix.column(ring, [0, 0, 0, 1]))
    return P0, triv, epi


class TestClassicalSymbol:

    def test_matrix_and_pfaffian(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        V = classical_vaserstein(a, b)
        assert V.is_skew()
        assert V[0, 1] == -2
        assert V[1, 3] == 1
        assert pfaffian(V) == 1

    def test_witness_invalid(self):
        a, _ = row_data(Z, [2, 3, 25], [-1, 1, 0])
        with pytest.raises(NotUnimodular, match="witness invalid"):
            classical_vaserstein(a, Matrix.column(Z, [1, 1, 1]))

    def test_wrong_length(self):
        with pytest.raises(ValueError, match="length 3"):
            classical_vaserstein(Matrix.row(Z, [1, 0]), Matrix.column(Z, [1, 0]))

    def test_coincides_with_generalized_symbol(self):
        for ring, row in ((Z, [2, 3, 25]), (F5, [2, 3, 4]), (F7, [0, 3, 6])):
            a, b = row_data(ring, row)
            assert coincide_classical_check(a, b)

    def test_negated_orientation_moves_first_basis_vector_last(self):
        order = [1, 2, 3, 0]
        for ring, row in ((Z, [2, 3, 25]), (F5, [2, 3, 4]), (F7, [0, 3, 6])):
            a, b = row_data(ring, row)
            V = classical_vaserstein(a, b)
            P0, triv, epi = free_symbol_data(a, b)
            _, f = symbol_forms(P0, triv.negated(), epi)
            assert f == Matrix.build(ring, 4, 4, lambda i, j: V[order[i], order[j]])


class TestSymbolForms:

    def test_free_forms(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        P0, triv, epi = free_symbol_data(a, b)
        g, f = symbol_forms(P0, triv, epi)
        assert g == standard_form(Z, 'psi', 2)
        assert f == Matrix.from_rows(Z, [[0, 0, -1, 2],
                                         [0, 0, -1, 3],
                                         [1, 1, 0, 25],
                                         [-2, -3, -25, 0]])
        assert pfaffian(f) == 1

    @pytest.mark.parametrize("ring", [F5, F7])
    def test_free_form_entries(self, ring):
        rng = np.random.default_rng(31)
        for _ in range(5):
            row, witness = random_unimodular_row(ring, rng)
            a, b = row_data(ring, row, witness)
            _, f = symbol_forms(*free_symbol_data(a, b))
            b0, b1, b2 = witness
            expected = Matrix.from_rows(ring, [[0, b2, -b1, row[0]],
                                               [-b2, 0, b0, row[1]],
                                               [b1, -b0, 0, row[2]],
                                               [-row[0], -row[1], -row[2], 0]])
            assert f == expected
            assert coincide_classical_check(a, b)

    def test_epi_must_live_on_p0_plus_r(self):
        P0 = ProjModule.free(Z, 2)
        epi = epi_on(ProjModule.free(Z, 3), Matrix.row(Z, [1, 0, 0, 0]), Matrix.column(Z, [1, 0, 0, 0]))
        with pytest.raises(ValueError, match="invalid section"):
            symbol_forms(P0, standard_trivialization(Z), epi)


class TestGeneralizedSymbol:

    def test_free_symbol_has_pfaffian_one(self):
        a, b = row_data(F5, [2, 3, 4])
        result = generalized_symbol(*free_symbol_data(a, b))
        assert result.pfaffian == 1
        assert result.witt.size == 8

    def test_needs_two_invertible(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        with pytest.raises(NotInvertible, match="2 is not a unit"):
            generalized_symbol(*free_symbol_data(a, b))

    def test_kernel_module_symbol(self):
        P0, triv, epi = kernel_data(F7)
        result = generalized_symbol(P0, triv, epi)
        assert result.pfaffian == 1
        assert result.embedded.module.is_free()
        assert result.embedded.module.ambient == 2 * P0.direct_sum_free(2).ambient


class TestWitnesses:

    def test_section_independence(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        t = b + Matrix.column(Z, [3 * 4, -2 * 4, 0])
        P0 = ProjModule.free(Z, 2)
        word = section_independence_witness(P0, standard_trivialization(Z), a, b, t)
        assert word.dim == 4

    def test_section_independence_kernel(self):
        P0, triv, epi = kernel_data(F7)
        x = P0.idempotent @ Matrix.column(F7, [1, 1, 1])
        shift = Matrix.from_rows(F7, [[v] for v in x.entries()] + [[-(epi.a[0:1, 0:3] @ x)[0, 0]]])
        section_independence_witness(P0, triv, epi.a, epi.s, epi.s + shift)

    def test_elementary_invariance(self):
        rng = np.random.default_rng(21)
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        P0, triv, epi = free_symbol_data(a, b)
        for _ in range(3):
            phi = random_elementary_word(Z, rng, 3)
            assert elementary_invariance_check(P0, triv, epi, phi)

    def test_elementary_invariance_kernel_module(self):
        rng = np.random.default_rng(22)
        P0, triv, epi = kernel_data(Z7)
        for length in (1, 2, 1, 2):
            phi = random_module_word(P0, rng, length)
            assert elementary_invariance_check(P0, triv, epi, phi)

    def test_elementary_invariance_dimension(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        phi = ElemWord(Z, BlockDecomposition.free(1, 1), [elementary(Z, 2, 0, 1, 1)])
        with pytest.raises(ValueError, match="does not match"):
            elementary_invariance_check(*free_symbol_data(a, b), phi)

    def test_unit_scaling(self):
        a, b = row_data(F5, [2, 3, 4])
        P0, triv, epi = free_symbol_data(a, b)
        for u in (1, 2, 3, 4):
            assert scale_check(P0, triv, epi, F5(u))

    def test_unit_scaling_kernel_module(self):
        P0, triv, epi = kernel_data(F7)
        for u in (2, 3, 6):
            assert scale_check(P0, triv, epi, F7(u))

    def test_scaled_trivialization_is_unit_action(self):
        P0, triv, epi = kernel_data(F7)
        u = F7(3)
        T_u = unit_action(u, VTriple(P0.direct_sum_free(2), *symbol_forms(P0, triv, epi)))
        g_u, f_u = symbol_forms(P0, triv.scaled(u), epi)
        D = Matrix.diagonal(F7, [1, 1, 1, 1, 3])
        assert congruence(D, g_u) == T_u.g
        assert congruence(D, f_u) == T_u.f
        assert f_u != T_u.f

    def test_unit_scaling_needs_unit(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        with pytest.raises(NotInvertible):
            scale_check(*free_symbol_data(a, b), Z(2))


class TestPreimage:

    def test_free_preimage_recovers_section(self):
        a, b = row_data(Z, [2, 3, 25], [-1, 1, 0])
        P0, triv, epi = free_symbol_data(a, b)
        _, f = symbol_forms(P0, triv, epi)
        recovered = symbol_preimage(P0, triv, f)
        assert recovered.a == epi.a
        assert recovered.s == b

    def test_kernel_preimage(self):
        P0, triv, epi = kernel_data(F7)
        _, f = symbol_forms(P0, triv, epi)
        recovered = symbol_preimage(P0, triv, f)
        assert recovered.a == epi.a

    def test_rejects_non_skew(self):
        P0 = ProjModule.free(Z, 2)
        with pytest.raises(ValueError, match="skew"):
            symbol_preimage(P0, standard_trivialization(Z), Matrix.identity(Z, 4))
