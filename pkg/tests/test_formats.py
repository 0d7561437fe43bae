from fractions import Fraction

import numpy as np
import pytest

from src.complete import generalized_completion
from src.formats import (HEADER, Record, parse_inline, parse_record, read_certificate, read_completion,
                         read_epi_data, read_matrix, read_module, read_symbol, read_word,
                         write_certificate, write_completion, write_epi, write_matrix, write_module,
                         write_symbol, write_word)
from src.matrix import Matrix, standard_form
from src.projmod import ProjModule, UmEpi, trivialization_from_row
from src.ring import ring_parse
from src.selftest import random_elementary_word
from src.symbol import free_symbol_data
from src.witt import EquivCert

Z = ring_parse('Z')
F5 = ring_parse('F_5')


class TestRecord:

    def test_dumps_and_parse(self):
        text = Record('matrix').add('ring', 'Z').add('row', '1, 2').add('row', '3, 4').dumps()
        assert text.startswith(HEADER)
        record = parse_record(text, 'matrix')
        assert record.get('ring') == 'Z'
        assert record.get_all('row') == ['1, 2', '3, 4']
        assert record.get('missing', 'default') == 'default'

    def test_comments_and_blank_lines(self):
        text = HEADER + "\nkind: matrix\n\n# a comment\nring: Z\n"
        assert parse_record(text).fields == [('ring', 'Z')]

    def test_missing_header(self):
        with pytest.raises(ValueError, match="missing format header"):
            parse_record("kind: matrix\nring: Z\n")

    def test_unknown_version(self):
        with pytest.raises(ValueError, match="unsupported format version"):
            parse_record("# vaserstein-format: 7\nkind: matrix\n")

    def test_wrong_kind(self):
        text = Record('word').add('ring', 'Z').dumps()
        with pytest.raises(ValueError, match="expected a matrix record"):
            parse_record(text, 'matrix')

    def test_malformed_line(self):
        with pytest.raises(ValueError, match="malformed line"):
            parse_record(HEADER + "\nkind: matrix\nno separator here\n")

    def test_require(self):
        with pytest.raises(ValueError, match="missing 'shape'"):
            Record('matrix').require('shape')


class TestInline:

    def test_parse(self):
        M = parse_inline(Z, "1, 2; 3, 4")
        assert M == Matrix.from_rows(Z, [[1, 2], [3, 4]])

    def test_shape_check(self):
        with pytest.raises(ValueError, match="header says"):
            parse_inline(Z, "1, 2; 3, 4", (2, 3))


class TestMatrixFiles:

    def test_roundtrip(self):
        M = Matrix.from_rows(Z, [[1, -2, 0], [5, 7, -11]])
        assert read_matrix(write_matrix(M)) == M

    def test_rationals(self):
        Q = ring_parse('Q')
        M = Matrix.from_rows(Q, [[Fraction(1, 2), 3], [0, Fraction(-2, 3)]])
        assert read_matrix(write_matrix(M)) == M

    def test_reduced_modulo(self):
        text = HEADER + "\nkind: matrix\nring: F_5\nshape: 1 2\nrow: 7, -1\n"
        assert read_matrix(text) == Matrix.row(F5, [2, 4])

    def test_ring_mismatch(self):
        with pytest.raises(ValueError, match="declares ring"):
            read_matrix(write_matrix(Matrix.identity(Z, 2)), F5)

    def test_row_count(self):
        text = HEADER + "\nkind: matrix\nring: Z\nshape: 2 2\nrow: 1, 0\n"
        with pytest.raises(ValueError, match="expected 2 rows"):
            read_matrix(text)


class TestWordFiles:

    def test_word(self):
        word = random_elementary_word(Z, np.random.default_rng(9), 4, length=5)
        back = read_word(write_word(word))
        assert back.decomp.sizes == word.decomp.sizes
        assert back.factors == word.factors
        assert back.eval() == word.eval()

    def test_certificate(self):
        word = random_elementary_word(F5, np.random.default_rng(10), 4)
        back = read_certificate(write_certificate(EquivCert(1, word)))
        assert back.stabilization == 1
        assert back.word.eval() == word.eval()

    def test_malformed_factor(self):
        text = HEADER + "\nkind: word\nring: Z\nblocks: 1 1\nfactor: 0 1 1\n"
        with pytest.raises(ValueError, match="malformed factor"):
            read_word(text)


class TestModuleFiles:

    def test_free_module(self):
        P = ProjModule.free(Z, 3)
        module, triv = read_module(write_module(P))
        assert module == P
        assert triv is None

    def test_kernel_module_with_trivialization(self):
        P0, triv = trivialization_from_row(Matrix.row(Z, [2, 3, 0]), Matrix.column(Z, [-1, 1, 0]))
        module, back = read_module(write_module(P0, triv))
        assert module == P0
        assert module.frame.S == P0.frame.S
        assert back.w == triv.w
        assert back.lam == triv.lam

    def test_epi(self):
        P = ProjModule.free(Z, 3)
        epi = UmEpi.create(P, Matrix.row(Z, [2, 3, 25]), Matrix.column(Z, [-1, 1, 0]))
        a, s = read_epi_data(write_epi(epi))
        assert a == epi.a
        assert s == epi.s


class TestResultFiles:

    def test_symbol(self):
        g = standard_form(Z, 'psi', 2)
        f = Matrix.from_rows(Z, [[0, 0, -1, 2], [0, 0, -1, 3], [1, 1, 0, 25], [-2, -3, -25, 0]])
        data = read_symbol(write_symbol(g, f, pfaffian=Z(1), embedded_size=8))
        assert data['g'] == g
        assert data['f'] == f
        assert data['pfaffian'] == 1
        assert data['embedded_size'] == 8

    def test_symbol_without_extras(self):
        g = standard_form(Z, 'psi', 1)
        data = read_symbol(write_symbol(g, g))
        assert 'pfaffian' not in data

    def test_completion(self):
        a = Matrix.row(Z, [2, 3, 25])
        s = Matrix.column(Z, [-1, 1, 0])
        completion = generalized_completion(*free_symbol_data(a, s))
        back = read_completion(write_completion(completion))
        assert back.matrix == completion.matrix
        assert back.target == completion.target
