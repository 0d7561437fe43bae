"""
Randomized identity suites driven by one seed.

Each case checks, fails, or is skipped when the sampled instance misses the
suite's hypothesis (no unit drawn, 2 not invertible). Every case logs one
SelftestCase record.
"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from .complete import generalized_completion, krusemeyer
from .elem import (BlockDecomposition, ElemFactor, ElemWord, commutator_factorization, elementary,
                   row_reduction_word, whitehead_word)
from .errors import AlgebraError, NotUnimodular, VerificationError
from .eventlog import emit
from .matrix import Matrix, congruence, orthogonal_sum, pfaffian, standard_form
from .projmod import ProjModule, Trivialization, UmEpi, standard_trivialization, trivialization_from_row
from .ring import RingElement, RingSpec, bezout_witness, is_unit, ring_parse
from .symbol import (coincide_classical_check, elementary_invariance_check, epi_on, free_symbol_data,
                     generalized_symbol, scale_check, section_independence_witness, symbol_forms,
                     symbol_preimage)
from .witt import WittRep, hyperbolic_diagonalize, split_off_hyperbolic, stabilize, witt_inverse

DEFAULT_RINGS = ["Z", "Z/5", "Z/7", "F_5", "F_7"]


class Skip(Exception):
    """The sampled instance does not satisfy the suite's hypothesis."""


# -- samplers ---------------------------------------------------------------

def random_unimodular_row(ring: RingSpec, rng: np.random.Generator,
                          length: int = 3, attempts: int = 50) -> Tuple[List[RingElement], List[RingElement]]:
    """A row with a Bezout witness, drawn by rejection."""
    for _ in range(attempts):
        row = [ring.random(rng) for _ in range(length)]
        try:
            return row, bezout_witness(row)
        except NotUnimodular:
            continue
    raise Skip("no unimodular row sampled")


def random_unit(ring: RingSpec, rng: np.random.Generator, attempts: int = 50) -> RingElement:
    for _ in range(attempts):
        u = ring.random(rng)
        if is_unit(u) is not None:
            return u
    raise Skip("no unit sampled")


def random_matrix(ring: RingSpec, rng: np.random.Generator, rows: int, cols: int) -> Matrix:
    return Matrix.build(ring, rows, cols, lambda i, j: ring.random(rng))


def random_skew(ring: RingSpec, rng: np.random.Generator, n: int) -> Matrix:
    A = random_matrix(ring, rng, n, n)
    return A - A.T


def random_elementary_word(ring: RingSpec, rng: np.random.Generator, n: int, length: int = 4) -> ElemWord:
    factors = []
    for _ in range(length):
        i, j = (int(k) for k in rng.choice(n, size=2, replace=False))
        factors.append(elementary(ring, n, i, j, ring.random(rng)))
    return ElemWord(ring, BlockDecomposition.free(*([1] * n)), factors)


def random_module_word(P0: ProjModule, rng: np.random.Generator, length: int = 2) -> ElemWord:
    """A word on P0 + R alternating the R -> P0 and P0 -> R factors, coefficients cut down by Pi."""
    ring, Pi = P0.ring, P0.idempotent
    decomp = BlockDecomposition((P0.ambient, 1), idempotent_block=0, idempotent=Pi)
    factors = []
    for k in range(length):
        if k % 2:
            factors.append(ElemFactor(1, 0, random_matrix(ring, rng, 1, P0.ambient) @ Pi))
        else:
            factors.append(ElemFactor(0, 1, Pi @ random_matrix(ring, rng, P0.ambient, 1)))
    return ElemWord(ring, decomp, factors)


def _needs_two(ring: RingSpec) -> None:
    if not ring.two_is_unit():
        raise Skip(f"2 is not a unit in {ring}")


# -- suites -------------------------------------------------------------------

def check_pfaffian_rules(ring, rng) -> bool:
    M = random_skew(ring, rng, 4)
    N = random_skew(ring, rng, 2)
    return (pfaffian(M) * pfaffian(M) == M.determinant()
            and pfaffian(orthogonal_sum(M, N)) == pfaffian(M) * pfaffian(N)
            and pfaffian(standard_form(ring, 'psi', 2)) == 1)


def check_congruence_pfaffian(ring, rng) -> bool:
    M = random_skew(ring, rng, 4)
    E = random_elementary_word(ring, rng, 4).eval()
    return pfaffian(congruence(E, M)) == pfaffian(M) and E.determinant() == 1


def check_commutator(ring, rng) -> bool:
    decomp = BlockDecomposition.free(1, 2, 1)
    s_ij = random_matrix(ring, rng, 1, 2)
    s_jk = random_matrix(ring, rng, 2, 1)
    word = commutator_factorization(decomp, 0, 1, 2, s_ij, s_jk)
    expected = ElemWord(ring, decomp, [ElemFactor(0, 2, s_ij @ s_jk)]).eval()
    return word.eval() == expected


def check_elementary_relations(ring, rng) -> bool:
    d = BlockDecomposition.free(1, 2, 1, 1)
    s, t = random_matrix(ring, rng, 1, 2), random_matrix(ring, rng, 1, 2)
    u = random_matrix(ring, rng, 1, 1)
    s_ki = random_matrix(ring, rng, 1, 1)

    def ev(*factors):
        return ElemWord(ring, d, list(factors)).eval()
    adds = ev(ElemFactor(0, 1, s), ElemFactor(0, 1, t)) == ev(ElemFactor(0, 1, s + t))
    commutes = ev(ElemFactor(0, 1, s), ElemFactor(2, 3, u)) == ev(ElemFactor(2, 3, u), ElemFactor(0, 1, s))
    bracket = ev(ElemFactor(0, 1, s), ElemFactor(3, 0, s_ki), ElemFactor(0, 1, -s), ElemFactor(3, 0, -s_ki))
    return adds and commutes and bracket == ev(ElemFactor(3, 1, -(s_ki @ s)))


def check_whitehead(ring, rng) -> bool:
    f = random_matrix(ring, rng, 2, 1)
    g = random_matrix(ring, rng, 1, 2)
    u = Matrix.identity(ring, 1) + g @ f
    if is_unit(u[0, 0]) is None:
        raise Skip("id + gf is not invertible")
    v = Matrix.identity(ring, 2) + f @ g
    return whitehead_word(f, g).eval() == orthogonal_sum(u, v.inverse())


def check_row_reduction(ring, rng) -> bool:
    row, _ = random_unimodular_row(ring, rng)
    word = row_reduction_word(row)
    target = Matrix.row(ring, [0, 0, 1])
    return Matrix.row(ring, row) @ word.eval() == target and word.inverse().eval() @ word.eval() == Matrix.identity(ring, 3)


def check_witt_inverse(ring, rng) -> bool:
    E = random_elementary_word(ring, rng, 4).eval()
    M = WittRep(congruence(E, standard_form(ring, 'psi', 2)))
    inv = witt_inverse(M)
    return stabilize(inv, 1).pfaffian == inv.pfaffian


def check_split_off(ring, rng) -> bool:
    E = random_elementary_word(ring, rng, 4).eval()
    chi = congruence(E, standard_form(ring, 'psi', 2))
    word, psi = split_off_hyperbolic(chi)
    return congruence(word.eval(), chi) == orthogonal_sum(psi, standard_form(ring, 'psi', 1))


def check_hyperbolic_diagonalize(ring, rng) -> bool:
    _needs_two(ring)
    E = random_elementary_word(ring, rng, 2).eval()
    chi = congruence(E, standard_form(ring, 'psi', 1))
    hyperbolic_diagonalize(chi, q_rank=1)
    return True


def check_classical_symbol(ring, rng) -> bool:
    row, witness = random_unimodular_row(ring, rng)
    a, b = Matrix.row(ring, row), Matrix.column(ring, witness)
    return coincide_classical_check(a, b)


def check_section_change(ring, rng) -> bool:
    row, witness = random_unimodular_row(ring, rng)
    a, b = Matrix.row(ring, row), Matrix.column(ring, witness)
    c = ring.random(rng)
    t = b + Matrix.column(ring, [row[1] * c, -row[0] * c, 0])
    P0 = ProjModule.free(ring, 2)
    section_independence_witness(P0, standard_trivialization(ring), a, b, t)
    return True


def check_elementary_invariance(ring, rng) -> bool:
    row, witness = random_unimodular_row(ring, rng)
    P0, triv, epi = free_symbol_data(Matrix.row(ring, row), Matrix.column(ring, witness))
    phi = random_elementary_word(ring, rng, 3)
    P1, triv1, epi1 = _kernel_instance(ring, rng)
    psi = random_module_word(P1, rng, length=int(rng.integers(1, 3)))
    return elementary_invariance_check(P0, triv, epi, phi) and elementary_invariance_check(P1, triv1, epi1, psi)


def check_unit_scaling(ring, rng) -> bool:
    row, witness = random_unimodular_row(ring, rng)
    P0, triv, epi = free_symbol_data(Matrix.row(ring, row), Matrix.column(ring, witness))
    return scale_check(P0, triv, epi, random_unit(ring, rng))


def _kernel_instance(ring, rng) -> Tuple[ProjModule, Trivialization, UmEpi]:
    """
    P0 = ker(c) in R^3 with its induced trivialization. The pair a = (a0, 1),
    s = e_R is moved to (a phi, phi^-1 s) by a random word phi on P0 + R.
    """
    c, t = random_unimodular_row(ring, rng)
    P0, triv = trivialization_from_row(Matrix.row(ring, c), Matrix.column(ring, t))
    a = Matrix.row(ring, [ring.random(rng) for _ in range(3)] + [1])
    phi = random_module_word(P0, rng, length=int(rng.integers(1, 3)))
    s = phi.inverse().eval() @ Matrix.column(ring, [0, 0, 0, 1])
    return P0, triv, epi_on(P0, a @ phi.eval(), s)


def check_generalized_symbol(ring, rng) -> bool:
    _needs_two(ring)
    P0, triv, epi = _kernel_instance(ring, rng)
    return generalized_symbol(P0, triv, epi).pfaffian == 1


def check_symbol_preimage(ring, rng) -> bool:
    P0, triv, epi = _kernel_instance(ring, rng)
    _, f = symbol_forms(P0, triv, epi)
    recovered = symbol_preimage(P0, triv, f)
    return recovered.a == epi.a


def check_completion(ring, rng) -> bool:
    row, witness = random_unimodular_row(ring, rng)
    b, c, a = row
    q, r, p = witness
    K = krusemeyer(b, c, a, q, r, p)
    P0, triv, epi = free_symbol_data(Matrix.row(ring, row), Matrix.column(ring, witness))
    free = generalized_completion(P0, triv, epi)
    P1, triv1, epi1 = _kernel_instance(ring, rng)
    generalized_completion(P1, triv1, epi1)
    return K.determinant() == 1 and free.matrix == K


SUITES: Dict[str, Callable[[RingSpec, np.random.Generator], bool]] = {
    'pfaffian_rules': check_pfaffian_rules,
    'congruence_pfaffian': check_congruence_pfaffian,
    'commutator': check_commutator,
    'elementary_relations': check_elementary_relations,
    'whitehead': check_whitehead,
    'row_reduction': check_row_reduction,
    'witt_inverse': check_witt_inverse,
    'split_off_hyperbolic': check_split_off,
    'hyperbolic_diagonalize': check_hyperbolic_diagonalize,
    'classical_symbol': check_classical_symbol,
    'section_change': check_section_change,
    'elementary_invariance': check_elementary_invariance,
    'unit_scaling': check_unit_scaling,
    'generalized_symbol': check_generalized_symbol,
    'symbol_preimage': check_symbol_preimage,
    'completion': check_completion,
}


@dataclass
class SelftestResult:
    passed: int = 0
    skipped: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_selftest_parameters(params: Dict[str, Any]) -> None:
    """
    Raises:
        ValueError: if parameters are invalid
    """
    if params.get('instances', 20) <= 0:
        raise ValueError("instances must be positive")
    rings = params.get('rings', DEFAULT_RINGS)
    if not rings:
        raise ValueError("rings must not be empty")
    for text in rings:
        ring_parse(text)
    unknown = set(params.get('suites', SUITES)) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites: {sorted(unknown)}")


def run_selftest(params: Dict[str, Any]) -> SelftestResult:
    """Run every suite on every ring `instances` times from one seeded generator."""
    validate_selftest_parameters(params)
    rng = np.random.default_rng(params.get('random_seed', 100))
    instances = params.get('instances', 20)
    suites = params.get('suites', list(SUITES))
    result = SelftestResult()
    for text in params.get('rings', DEFAULT_RINGS):
        ring = ring_parse(text)
        for name in suites:
            for k in range(instances):
                status, detail = _run_case(SUITES[name], ring, rng)
                emit("SelftestCase", ring=str(ring), suite=name, instance=k, status=status, detail=detail)
                if status == 'pass':
                    result.passed += 1
                elif status == 'skip':
                    result.skipped += 1
                else:
                    result.failures.append({'ring': str(ring), 'suite': name, 'instance': k, 'detail': detail})
    emit("SelftestComplete", passed=result.passed, skipped=result.skipped, failed=len(result.failures))
    return result


def _run_case(check: Callable, ring: RingSpec, rng: np.random.Generator) -> Tuple[str, str]:
    try:
        return ('pass', '') if check(ring, rng) else ('fail', 'identity does not hold')
    except Skip as exc:
        return 'skip', str(exc)
    except VerificationError as exc:
        return 'fail', str(exc)
    except AlgebraError as exc:
        return 'fail', f"{type(exc).__name__}: {exc}"
