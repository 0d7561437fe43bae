import pytest

from src.errors import NotUnimodular
from src.matrix import Matrix, standard_form
from src.projmod import (Lambda3, ProjModule, Trivialization, UmEpi, chi0_contract_inverse, chi0_form,
                         chi_a_form, exterior_square, generalized_inverse, kernel_module,
                         standard_trivialization, trivialization_from_row, wedge, wedge_pairs)
from src.ring import ring_parse

Z = ring_parse('Z')


def kernel_example():
    """ker(2, 3, 0) in Z^3 split by t = (-1, 1, 0)."""
    return trivialization_from_row(Matrix.row(Z, [2, 3, 0]), Matrix.column(Z, [-1, 1, 0]))


class TestExteriorAlgebra:

    def test_pairs(self):
        assert wedge_pairs(3) == [(0, 1), (0, 2), (1, 2)]

    def test_wedge_is_alternating(self):
        x = Matrix.column(Z, [1, 2, 3])
        y = Matrix.column(Z, [4, 5, 6])
        assert wedge(x, y) == -wedge(y, x)
        assert wedge(x, x).is_zero()
        assert wedge(x, y) == Matrix.column(Z, [1 * 5 - 2 * 4, 1 * 6 - 3 * 4, 2 * 6 - 3 * 5])

    def test_exterior_square_of_identity(self):
        assert exterior_square(Matrix.identity(Z, 3)) == Matrix.identity(Z, 3)


class TestProjModule:

    def test_free(self):
        P = ProjModule.free(Z, 2)
        assert P.is_free()
        assert P.ambient == 2
        assert P.direct_sum_free(1).rank == 3

    def test_not_idempotent(self):
        with pytest.raises(ValueError, match="not idempotent"):
            ProjModule(Z, Matrix.from_rows(Z, [[2]]), 1)

    def test_wrong_rank(self):
        with pytest.raises(ValueError, match="constant rank"):
            ProjModule(Z, Matrix.diagonal(Z, [1, 0]), 2)

    def test_idempotent_without_constant_rank(self):
        R = ring_parse('Z/6')
        for rank in (0, 1):
            with pytest.raises(ValueError, match="constant rank"):
                ProjModule(R, Matrix.from_rows(R, [[3]]), rank)

    def test_kernel_of_row(self):
        P0, triv = kernel_example()
        assert P0.idempotent == Matrix.from_rows(Z, [[3, 3, 0], [-2, -2, 0], [0, 0, 1]])
        assert P0.rank == 2
        assert not P0.is_free()
        assert P0.frame.C @ P0.frame.S == Matrix.identity(Z, 1)

    def test_kernel_module_frame_extends(self):
        P0, _ = kernel_example()
        P = P0.direct_sum_free(1)
        epi = UmEpi.create(P, Matrix.row(Z, [0, 0, 0, 1]), Matrix.column(Z, [0, 0, 0, 1]))
        K = kernel_module(epi)
        assert K.rank == 2
        assert K.frame.S.cols == 2


class TestUmEpi:

    def test_section_mismatch(self):
        P = ProjModule.free(Z, 3)
        with pytest.raises(NotUnimodular, match="section mismatch"):
            UmEpi.create(P, Matrix.row(Z, [2, 3, 25]), Matrix.column(Z, [1, 1, 0]))

    def test_section_outside_module(self):
        P0, _ = kernel_example()
        with pytest.raises(ValueError, match="does not lie in the module"):
            UmEpi.create(P0, Matrix.row(Z, [0, 0, 1]), Matrix.column(Z, [1, 0, 0]))

    def test_retraction_kills_section(self):
        P = ProjModule.free(Z, 3)
        epi = UmEpi.create(P, Matrix.row(Z, [2, 3, 25]), Matrix.column(Z, [-1, 1, 0]))
        assert epi.value() == 1
        assert epi.retraction() @ epi.s == Matrix.zeros(Z, 3, 1)


class TestTrivialization:

    def test_kernel_trivialization(self):
        P0, triv = kernel_example()
        assert triv.w == Matrix.column(Z, [0, -3, 2])
        assert triv.lam == Matrix.row(Z, [0, -1, -1])
        assert (triv.lam @ triv.w)[0, 0] == 1

    def test_row_must_split(self):
        with pytest.raises(NotUnimodular):
            trivialization_from_row(Matrix.row(Z, [2, 3, 0]), Matrix.column(Z, [1, 1, 0]))

    def test_rejects_bad_pair(self):
        P = ProjModule.free(Z, 2)
        with pytest.raises(ValueError, match="lam\\(w\\) != 1"):
            Trivialization(Matrix.column(Z, [1]), Matrix.row(Z, [-1])).check(P)

    def test_needs_rank_two(self):
        with pytest.raises(ValueError, match="rank 2"):
            standard_trivialization(Z).check(ProjModule.free(Z, 3))

    def test_scaled(self):
        F5 = ring_parse('F_5')
        triv = standard_trivialization(F5).scaled(F5(2))
        triv.check(ProjModule.free(F5, 2))
        assert triv.lam == Matrix.row(F5, [2])

    def test_value(self):
        triv = standard_trivialization(Z)
        e0, e1 = Matrix.unit_vector(Z, 2, 0), Matrix.unit_vector(Z, 2, 1)
        assert triv.value(e0, e1) == 1
        assert triv.value(e1, e0) == -1


class TestForms:

    def test_chi0_free(self):
        P = ProjModule.free(Z, 2)
        assert chi0_form(P, standard_trivialization(Z)) == standard_form(Z, 'psi', 1)

    def test_contract_inverse_free(self):
        P = ProjModule.free(Z, 2)
        triv = standard_trivialization(Z)
        a0 = Matrix.row(Z, [2, 3])
        q = chi0_contract_inverse(P, triv, a0)
        assert q.T @ chi0_form(P, triv) == a0

    def test_contract_inverse_kernel(self):
        P0, triv = kernel_example()
        a0 = Matrix.row(Z, [3, 3, 0])
        q = chi0_contract_inverse(P0, triv, a0)
        assert q == Matrix.column(Z, [0, 0, 3])
        assert q.T @ chi0_form(P0, triv) @ P0.idempotent == a0

    def test_contract_inverse_needs_compatible_row(self):
        P0, triv = kernel_example()
        with pytest.raises(ValueError, match="not compatible"):
            chi0_contract_inverse(P0, triv, Matrix.row(Z, [1, 0, 0]))

    def test_generalized_inverse_on_kernel(self):
        P0, triv = kernel_example()
        B = chi0_form(P0, triv)
        B_plus = generalized_inverse(P0, B)
        assert B @ B_plus @ B == B
        assert P0.idempotent @ B_plus @ P0.idempotent.T == B_plus

    def test_chi_a_invertible_on_kernel(self):
        P0, triv = kernel_example()
        epi = UmEpi.create(P0.direct_sum_free(1), Matrix.row(Z, [1, 2, 4, 1]), Matrix.column(Z, [0, 0, 0, 1]))
        form = chi_a_form(P0, triv, epi)
        assert form.is_skew()
        B_plus = generalized_inverse(kernel_module(epi), form)
        assert form @ B_plus @ form == form

    def test_chi_a_needs_section(self):
        P0, triv = kernel_example()
        module = P0.direct_sum_free(1)
        epi = UmEpi(module, Matrix.row(Z, [0, 0, 0, 1]), Matrix.zeros(Z, 4, 1))
        with pytest.raises(ValueError, match="section mismatch"):
            chi_a_form(P0, triv, epi)

    def test_lambda3_free(self):
        P = ProjModule.free(Z, 2)
        lam3 = Lambda3(P, standard_trivialization(Z))
        assert lam3.on_triples() == [Z(1)]
        e = [Matrix.unit_vector(Z, 3, k) for k in range(3)]
        assert lam3(e[1], e[0], e[2]) == -1
        assert lam3.covector(e[0], e[1]) == Matrix.row(Z, [0, 0, 1])
