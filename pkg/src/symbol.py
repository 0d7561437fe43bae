"""
The Vaserstein symbol, classical and generalized, with executable witnesses.

The generalized symbol of an epimorphism a: P0 + R -> R with section s is the
triple [P0 + R^2, chi0 + psi_2, f] where f pulls chi_a + psi_2 back along
x -> (r(x), a(x)). Everything is computed in ambient coordinates; the checks
below compare ambient matrices entrywise.
"""
from dataclasses import dataclass
from typing import Tuple

from .elem import BlockDecomposition, ElemFactor, ElemWord, signed_permutation_word
from .errors import NotInvertible, NotUnimodular, VerificationError
from .eventlog import emit
from .matrix import Matrix, block_matrix, congruence, orthogonal_sum, standard_form
from .projmod import (Lambda3, ProjModule, Trivialization, UmEpi, chi0_form, chi_a_form,
                      standard_trivialization, wedge_pairs)
from .ring import RingElement, dot, is_unit
from .witt import VTriple, WittRep, free_embed, unit_action, xi


def classical_vaserstein(a: Matrix, b: Matrix) -> Matrix:
    """
    The 4x4 skew matrix V(a, b) of a unimodular row a with witness b.

    Raises:
        NotUnimodular: a . b != 1
    """
    a_, b_ = _entries3(a), _entries3(b)
    if dot(a_, b_) != 1:
        raise NotUnimodular("witness invalid: sum a_i b_i != 1")
    a1, a2, a3 = a_
    b1, b2, b3 = b_
    V = Matrix.from_rows(a.ring, [[0, -a1, -a2, -a3],
                                  [a1, 0, -b3, b2],
                                  [a2, b3, 0, -b1],
                                  [a3, -b2, b1, 0]])
    return V


def _entries3(v: Matrix):
    if v.shape not in ((1, 3), (3, 1)):
        raise ValueError("expected a vector of length 3")
    return v.entries()


@dataclass
class SymbolResult:
    triple: VTriple
    embedded: VTriple
    witt: WittRep

    @property
    def pfaffian(self) -> RingElement:
        return self.witt.pfaffian


def epi_on(P0: ProjModule, a: Matrix, s: Matrix) -> UmEpi:
    """The epimorphism a: P0 + R -> R with section s."""
    return UmEpi.create(P0.direct_sum_free(1), a, s)


def free_symbol_data(a: Matrix, b: Matrix) -> Tuple[ProjModule, Trivialization, UmEpi]:
    """P0 = R^2 with w = e1 ^ e2, and the row a on R^3 with section b."""
    ring = a.ring
    row = Matrix.row(ring, _entries3(a))
    col = Matrix.column(ring, _entries3(b))
    P0 = ProjModule.free(ring, 2)
    return P0, standard_trivialization(ring), epi_on(P0, row, col)


def _check_inputs(P0: ProjModule, triv: Trivialization, epi: UmEpi) -> None:
    if P0.rank != 2:
        raise ValueError(f"the symbol needs a rank-2 module, got rank {P0.rank}")
    if epi.module != P0.direct_sum_free(1):
        raise ValueError("invalid section: epimorphism does not live on P0 + R")
    triv.check(P0)


def symbol_forms(P0: ProjModule, triv: Trivialization, epi: UmEpi) -> Tuple[Matrix, Matrix]:
    """
    Ambient (g, f) of the symbol triple on P0 + R^2.

    g = chi0 + psi_2 and f = [[chi_a, a^T], [-a, 0]].
    """
    _check_inputs(P0, triv, epi)
    ring = P0.ring
    g = orthogonal_sum(chi0_form(P0, triv), standard_form(ring, 'psi', 1))
    f = block_matrix([[chi_a_form(P0, triv, epi), epi.a.T],
                      [-epi.a, Matrix.zeros(ring, 1, 1)]])
    return g, f


def generalized_symbol(P0: ProjModule, triv: Trivialization, epi: UmEpi) -> SymbolResult:
    """
    Build the symbol triple, free-embed it, apply xi and check Pf = 1.

    Raises:
        ValueError: rank is not 2, or the epimorphism does not live on P0 + R
        NotInvertible: 2 is not a unit
        VerificationError: the Pfaffian is not 1
    """
    ring = P0.ring
    if is_unit(ring(2)) is None:
        raise NotInvertible(f"2 is not a unit in {ring}")
    g, f = symbol_forms(P0, triv, epi)
    triple = VTriple(P0.direct_sum_free(2), g, f)
    embedded = free_embed(triple)
    witt = xi(embedded)
    if witt.pfaffian != 1:
        raise VerificationError(f"symbol Pfaffian is {witt.pfaffian}, expected 1")
    emit("SymbolComputed", ring=str(ring), ambient=P0.ambient, size=witt.size)
    return SymbolResult(triple, embedded, witt)


def _p0_decomposition(P0: ProjModule, extra: int) -> BlockDecomposition:
    return BlockDecomposition((P0.ambient,) + (1,) * extra, idempotent_block=0, idempotent=P0.idempotent)


def section_independence_witness(P0: ProjModule, triv: Trivialization, a: Matrix,
                                 s: Matrix, t: Matrix) -> ElemWord:
    """
    Word phi = id - e_last d^T with phi^T f(a, s) phi = f(a, t).

    d(x) = lam3(s, t, x); the word has one factor from P0 and one from the
    first free coordinate into the last one.

    Raises:
        VerificationError: the congruence does not hold
    """
    epi_s, epi_t = epi_on(P0, a, s), epi_on(P0, a, t)
    ring = P0.ring
    m = P0.ambient
    d = Lambda3(P0, triv).covector(epi_s.s, epi_t.s)
    factors = []
    d_p0 = d[0:1, 0:m]
    if not d_p0.is_zero():
        factors.append(ElemFactor(2, 0, -d_p0))
    if not d[0, m].is_zero():
        factors.append(ElemFactor(2, 1, Matrix.from_rows(ring, [[-d[0, m]]])))
    word = ElemWord(ring, _p0_decomposition(P0, 2), factors)
    _, f_s = symbol_forms(P0, triv, epi_s)
    _, f_t = symbol_forms(P0, triv, epi_t)
    if congruence(word.eval(), f_s) != f_t:
        raise VerificationError("section change does not carry V(a, s) to V(a, t)")
    return word


def elementary_invariance_check(P0: ProjModule, triv: Trivialization, epi: UmEpi,
                                phi: ElemWord) -> bool:
    """
    Compare (phi + 1)^T f(a, s) (phi + 1) with f(a phi, phi^-1 s).

    Raises:
        ValueError: phi does not act on P0 + R
    """
    if phi.dim != P0.ambient + 1:
        raise ValueError(f"word dimension {phi.dim} does not match P0 + R")
    ring = P0.ring
    Phi = phi.eval()
    moved = UmEpi.create(epi.module, epi.a @ Phi, phi.inverse().eval() @ epi.s)
    Phi1 = orthogonal_sum(Phi, Matrix.identity(ring, 1))
    _, f = symbol_forms(P0, triv, epi)
    _, f_moved = symbol_forms(P0, triv, moved)
    return congruence(Phi1, f) == f_moved


def scale_check(P0: ProjModule, triv: Trivialization, epi: UmEpi, u: RingElement) -> bool:
    """
    The symbol for the trivialization scaled by u equals u times the symbol,
    after the isometry id + 1 + u.

    Raises:
        NotInvertible: u is not a unit
    """
    if is_unit(u) is None:
        raise NotInvertible(f"{u} is not a unit")
    ring = P0.ring
    g, f = symbol_forms(P0, triv, epi)
    g_u, f_u = symbol_forms(P0, triv.scaled(u), epi)
    scaled = unit_action(u, VTriple(P0.direct_sum_free(2), g, f))
    D = Matrix.diagonal(ring, [1] * (P0.ambient + 1) + [u])
    return congruence(D, g_u) == scaled.g and congruence(D, f_u) == scaled.f


# e0 -> e1, e1 -> -e2, e2 -> -e3, e3 -> -e0
_COINCIDENCE_PERMUTATION = [[0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0]]


def coincide_classical_check(a: Matrix, b: Matrix) -> bool:
    """
    The symbol for w = -e1 ^ e2 on R^2 is isometric to [R^4, psi_4, E^T V(a, b) E].

    For this orientation f = [[-C(b), a^T], [-a, 0]], where C(b) is the form
    (x, y) -> det(x, y, b), while V(a, b) = [[0, -a], [a^T, -C(b)]]. So f is
    V(a, b) with its first basis vector moved last. The comparison is made
    through this basis change directly instead of through the sign map
    a -> -a and sigma-conjugation. The 4-cycle has determinant -1 and is
    written as E h, with E an elementary signed permutation and
    h = diag(1, -1, -1, -1); h also carries g to psi_4.

    Raises:
        NotUnimodular: b is not a witness for a
    """
    ring = a.ring
    V = classical_vaserstein(a, b)
    P0, triv, epi = free_symbol_data(a, b)
    g, f = symbol_forms(P0, triv.negated(), epi)
    h = Matrix.diagonal(ring, [1, -1, -1, -1])
    E = signed_permutation_word(Matrix.from_rows(ring, _COINCIDENCE_PERMUTATION)).eval()
    return congruence(h, g) == standard_form(ring, 'psi', 2) and congruence(h, f) == congruence(E, V)


def symbol_preimage(P0: ProjModule, triv: Trivialization, chi: Matrix) -> UmEpi:
    """
    Recover (a, s) whose symbol form is chi.

    a = chi(-, e_last) on P0 + R, and s is read off the restriction beta of chi
    to P0 + R through w: s = sum w_kl [beta(e_k, e_l) e_R + beta(e_l, e_R) e_k
    + beta(e_R, e_k) e_l].

    Raises:
        ValueError: chi has the wrong shape or is not skew
        VerificationError: the recovered epimorphism does not reproduce chi
    """
    triv.check(P0)
    m = P0.ambient
    ring = P0.ring
    if chi.shape != (m + 2, m + 2) or not chi.is_skew():
        raise ValueError(f"expected a skew {m + 2}x{m + 2} form")
    a = chi[0:m + 1, m + 1:m + 2].T
    beta = chi[0:m + 1, 0:m + 1]
    r = m
    s = [ring(0)] * (m + 1)
    for idx, (k, l) in enumerate(wedge_pairs(m)):
        w_kl = triv.w[idx, 0]
        if w_kl.is_zero():
            continue
        s[r] = s[r] + w_kl * beta[k, l]
        s[k] = s[k] + w_kl * beta[l, r]
        s[l] = s[l] + w_kl * beta[r, k]
    s = Matrix.column(ring, s)
    try:
        epi = epi_on(P0, a, s)
    except NotUnimodular as exc:
        raise VerificationError(f"recovered section does not split a: {exc}") from exc
    _, f = symbol_forms(P0, triv, epi)
    if f != chi:
        raise VerificationError("recovered epimorphism does not reproduce the form")
    return epi
