"""
Stabilized skew forms and triples of skew forms.

WittRep is an invertible skew matrix up to elementary congruence and
stabilization by psi blocks. VTriple / VElement model formal sums of triples
(P, g, f) of skew forms on one module, with the syntactic relations applied
by `v_reduce`.
"""
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from .elem import BlockDecomposition, ElemFactor, ElemWord, row_reduction_word
from .errors import NotInvertible, VerificationError
from .matrix import Matrix, block_matrix, congruence, orthogonal_sum, pfaffian, standard_form
from .projmod import ComplementFrame, ProjModule, generalized_inverse
from .ring import RingElement, RingSpec, is_unit


def _psi(ring: RingSpec, size: int) -> Optional[Matrix]:
    if size % 2:
        raise ValueError("psi blocks have even size")
    return standard_form(ring, 'psi', size // 2) if size else None


def _with_psi(M: Matrix, size: int) -> Matrix:
    block = _psi(M.ring, size)
    return orthogonal_sum(M, block) if block is not None else M


class WittRep:
    """
    Invertible skew matrix of even size with its (unit) Pfaffian cached.

    Raises:
        ValueError: not skew, or odd size
        NotInvertible: the Pfaffian is not a unit
    """

    def __init__(self, matrix: Matrix):
        if not matrix.is_square() or matrix.rows % 2 or matrix.rows == 0:
            raise ValueError("Witt representatives are nonempty square matrices of even size")
        pf = pfaffian(matrix)
        if is_unit(pf) is None:
            raise NotInvertible(f"Pfaffian {pf} is not a unit")
        self.matrix = matrix
        self.pfaffian = pf

    @property
    def ring(self) -> RingSpec:
        return self.matrix.ring

    @property
    def size(self) -> int:
        return self.matrix.rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, WittRep):
            return NotImplemented
        return self.matrix == other.matrix

    __hash__ = None

    def __repr__(self) -> str:
        return f"WittRep({self.matrix!r}, pf={self.pfaffian})"


def stabilize(M: WittRep, s: int) -> WittRep:
    if s < 0:
        raise ValueError("stabilization level must be non-negative")
    return WittRep(_with_psi(M.matrix, 2 * s))


def witt_inverse(M: WittRep) -> WittRep:
    """
    sigma M^-1 sigma.

    Raises:
        VerificationError: the Pfaffians of M and the result do not multiply to 1
    """
    sigma = standard_form(M.ring, 'sigma', M.size // 2)
    result = WittRep(sigma @ M.matrix.inverse() @ sigma)
    if result.pfaffian * M.pfaffian != 1:
        raise VerificationError("Pfaffian of the Witt inverse does not invert")
    return result


@dataclass
class EquivCert:
    """M + psi = E^T (N + psi) E after `stabilization` extra psi_2 blocks."""
    stabilization: int
    word: ElemWord


def verify_equiv(M: WittRep, N: WittRep, cert: EquivCert) -> bool:
    """
    Check M + psi_{|N|+2s} = E^T (N + psi_{|M|+2s}) E entrywise.

    Raises:
        ValueError: the certificate word has the wrong dimension
    """
    s = cert.stabilization
    if s < 0:
        raise ValueError("stabilization level must be non-negative")
    dim = M.size + N.size + 2 * s
    if cert.word.dim != dim:
        raise ValueError(f"certificate word has dimension {cert.word.dim}, expected {dim}")
    if cert.word.ring != M.ring or N.ring != M.ring:
        raise ValueError("ring mismatch between representatives and certificate")
    left = _with_psi(M.matrix, N.size + 2 * s)
    right = _with_psi(N.matrix, M.size + 2 * s)
    return left == congruence(cert.word.eval(), right)


class VTriple:
    """
    A triple (P, g, f) of skew forms invertible on P.

    Forms are ambient matrices restricted by the idempotent of P.
    """

    def __init__(self, module: ProjModule, g: Matrix, f: Matrix):
        m = module.ambient
        for name, form in (('g', g), ('f', f)):
            if form.shape != (m, m):
                raise ValueError(f"form {name} does not match the module ambient {m}")
            if not form.is_skew():
                raise ValueError(f"form {name} is not skew-symmetric")
            if module.restrict(form) != form:
                raise ValueError(f"form {name} does not factor through the module")
            if module.is_free():
                if is_unit(pfaffian(form)) is None:
                    raise NotInvertible(f"form {name} is not invertible")
            else:
                generalized_inverse(module, form)
        self.module = module
        self.g = g
        self.f = f

    @property
    def ring(self) -> RingSpec:
        return self.module.ring

    def key(self) -> Tuple:
        return (self.module.idempotent.key(), self.g.key(), self.f.key())

    def swapped(self) -> 'VTriple':
        return VTriple(self.module, self.f, self.g)

    def __repr__(self) -> str:
        return f"VTriple({self.module!r}, g={self.g!r}, f={self.f!r})"


class VElement:
    """Formal integer combination of triples, canonically ordered by key."""

    def __init__(self, terms: Iterable[Tuple[VTriple, int]] = ()):
        acc: Dict[Tuple, Tuple[VTriple, int]] = {}
        for triple, coeff in terms:
            k = triple.key()
            previous = acc[k][1] if k in acc else 0
            acc[k] = (triple, previous + coeff)
        self.terms: List[Tuple[VTriple, int]] = [acc[k] for k in sorted(acc) if acc[k][1] != 0]

    @classmethod
    def single(cls, triple: VTriple, coeff: int = 1) -> 'VElement':
        return cls([(triple, coeff)])

    def __add__(self, other: 'VElement') -> 'VElement':
        return VElement(self.terms + other.terms)

    def __neg__(self) -> 'VElement':
        return VElement([(t, -c) for t, c in self.terms])

    def __sub__(self, other: 'VElement') -> 'VElement':
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.terms

    def signature(self) -> List[Tuple[Tuple, int]]:
        return [(t.key(), c) for t, c in self.terms]

    def __eq__(self, other) -> bool:
        if not isinstance(other, VElement):
            return NotImplemented
        return self.signature() == other.signature()

    __hash__ = None

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"VElement({self.terms!r})"


def nu(M: WittRep) -> VElement:
    """[R^2m, psi_2m, M]."""
    module = ProjModule.free(M.ring, M.size)
    return VElement.single(VTriple(module, _psi(M.ring, M.size), M.matrix))


def xi(T: VTriple) -> WittRep:
    """
    f + sigma g^-1 sigma for a triple on a free module.

    Raises:
        ValueError: the module is not free
    """
    if not T.module.is_free():
        raise ValueError("xi needs a triple on a free module; use free_embed first")
    sigma = standard_form(T.ring, 'sigma', T.module.ambient // 2)
    return WittRep(orthogonal_sum(T.f, sigma @ T.g.inverse() @ sigma))


def _block_diagonal_split(g: Matrix, f: Matrix) -> Optional[int]:
    n = g.rows
    for k in range(2, n, 2):
        if all(M[i, j].is_zero() and M[j, i].is_zero()
               for M in (g, f) for i in range(k) for j in range(k, n)):
            return k
    return None


def _split_triples(terms: List[Tuple[VTriple, int]]) -> Tuple[List[Tuple[VTriple, int]], bool]:
    out, changed = [], False
    for triple, coeff in terms:
        k = _block_diagonal_split(triple.g, triple.f) if triple.module.is_free() else None
        if k is None:
            out.append((triple, coeff))
            continue
        n = triple.g.rows
        for lo, hi in ((0, k), (k, n)):
            part = ProjModule.free(triple.ring, hi - lo)
            out.append((VTriple(part, triple.g[lo:hi, lo:hi], triple.f[lo:hi, lo:hi]), coeff))
        changed = True
    return out, changed


def _oriented(terms: List[Tuple[VTriple, int]]) -> List[Tuple[VTriple, int]]:
    out = []
    for triple, coeff in terms:
        if triple.g.key() > triple.f.key():
            out.append((triple.swapped(), -coeff))
        else:
            out.append((triple, coeff))
    return out


def _compose_chain(terms: List[Tuple[VTriple, int]]) -> Tuple[List[Tuple[VTriple, int]], bool]:
    # edge x -> y with weight c > 0 stands for c [P, x, y]
    edges = []
    for triple, coeff in terms:
        if coeff > 0:
            edges.append((triple.module, triple.g, triple.f, coeff))
        else:
            edges.append((triple.module, triple.f, triple.g, -coeff))
    for a, (mod1, x, y, c1) in enumerate(edges):
        for b, (mod2, y2, z, c2) in enumerate(edges):
            if a == b or mod1 != mod2 or y.key() != y2.key():
                continue
            k = min(c1, c2)
            rest = [(VTriple(mo, u, v), c) for e, (mo, u, v, c) in enumerate(edges) if e not in (a, b)]
            rest += [(VTriple(mod1, x, y), c1 - k), (VTriple(mod1, y, z), c2 - k)]
            if x.key() != z.key():
                rest.append((VTriple(mod1, x, z), k))
            return [(t, c) for t, c in rest if c], True
    return terms, False


def v_reduce(x: VElement) -> VElement:
    """
    Apply the syntactic relations until nothing changes.

    Drops [P, f, f], splits triples that are orthogonal sums on free modules,
    orients each triple by key using [P, g, f] = -[P, f, g], and composes
    chains [P, x, y] + [P, y, z] = [P, x, z].
    """
    current = x
    while True:
        terms = [(t, c) for t, c in current.terms if t.g != t.f]
        terms, split = _split_triples(terms)
        terms = VElement(_oriented(terms)).terms
        terms, composed = _compose_chain(terms)
        reduced = VElement(terms)
        if not split and not composed and reduced == current:
            return reduced
        current = reduced


def unit_action(u: RingElement, T: VTriple) -> VTriple:
    """
    Raises:
        NotInvertible: u is not a unit
    """
    if is_unit(u) is None:
        raise NotInvertible(f"{u} is not a unit")
    return VTriple(T.module, T.g.scale(u), T.f.scale(u))


def hyperbolic(P, ring: Optional[RingSpec] = None) -> Matrix:
    """
    Hyperbolic form on P + P^v in doubled ambient coordinates.

    Args:
        P: ProjModule, or an int rank for the free module
        ring: required when P is a rank
    """
    if isinstance(P, int):
        if ring is None:
            raise ValueError("a free rank needs a ring")
        return standard_form(ring, 'h', P)
    ring = P.ring
    if P.is_free():
        return standard_form(ring, 'h', P.ambient)
    zero = Matrix.zeros(ring, P.ambient, P.ambient)
    return block_matrix([[zero, P.idempotent.T], [-P.idempotent, zero]])


def free_embed(T: VTriple) -> VTriple:
    """
    The triple g + can g^-1 + H_Q, f + can g^-1 + H_Q on the free module R^2m.

    Q = image(I - Pi); both forms live on R^m + (R^m)^v. Free triples are
    returned unchanged.
    """
    module = T.module
    if module.is_free():
        return T
    ring = module.ring
    g_plus = generalized_inverse(module, T.g)
    J = module.complement().T
    g_tilde = block_matrix([[T.g, J], [-J.T, g_plus]])
    f_tilde = block_matrix([[T.f, J], [-J.T, g_plus]])
    return VTriple(ProjModule.free(ring, 2 * module.ambient), g_tilde, f_tilde)


def relative_pfaffian(T: VTriple) -> RingElement:
    return xi(free_embed(T)).pfaffian


def _two_inverse(ring: RingSpec) -> RingElement:
    two_inv = is_unit(ring(2))
    if two_inv is None:
        raise NotInvertible(f"2 is not a unit in {ring}")
    return two_inv


def free_with_complement(ring: RingSpec, m: int, q: int) -> ProjModule:
    """R^m inside R^(m+q), with the standard frame for the last q coordinates."""
    Pi = orthogonal_sum(Matrix.identity(ring, m), Matrix.zeros(ring, q, q)) if q else Matrix.identity(ring, m)
    if not q:
        return ProjModule(ring, Pi, m)
    S = block_matrix([[Matrix.zeros(ring, m, q)], [Matrix.identity(ring, q)]])
    return ProjModule(ring, Pi, m, ComplementFrame(S, S.T))


def diagonalization_source(module: ProjModule, chi: Matrix) -> Matrix:
    """[[chi, J], [-J^T, chi+]]: chi + can chi^-1 + H_Q in doubled coordinates."""
    J = module.complement().T
    return block_matrix([[chi, J], [-J.T, generalized_inverse(module, chi)]])


def hyperbolic_diagonalize(chi: Matrix, q_rank: int = 0,
                           module: Optional[ProjModule] = None) -> ElemWord:
    """
    Word alpha with alpha^T (chi + can chi^-1 + H_Q) alpha = H_P + H_Q.

    alpha = (id + chi+ from the dual block) (id - chi/2 into the dual block).

    Args:
        chi: skew form invertible on P
        q_rank: rank of a free Q, used when `module` is not given
        module: P inside its ambient, Q being image(I - Pi)

    Raises:
        NotInvertible: 2 is not a unit
        VerificationError: the congruence does not land on the hyperbolic form
    """
    ring = chi.ring
    half = _two_inverse(ring)
    if module is None:
        module = free_with_complement(ring, chi.rows, q_rank)
        chi = orthogonal_sum(chi, Matrix.zeros(ring, q_rank, q_rank)) if q_rank else chi
    m = module.ambient
    source = diagonalization_source(module, chi)
    chi_plus = source[m:, m:]
    decomp = BlockDecomposition.free(m, m)
    word = ElemWord(ring, decomp, [ElemFactor(0, 1, chi_plus), ElemFactor(1, 0, chi.scale(-half))])
    target = standard_form(ring, 'h', m)
    if congruence(word.eval(), source) != target:
        raise VerificationError("hyperbolic diagonalization failed")
    return word


def split_off_hyperbolic(chi: Matrix) -> Tuple[ElemWord, Matrix]:
    """
    Elementary phi with phi^T chi phi = psi + psi_2.

    The column chi(-, e_last) is moved to the next-to-last basis vector by a
    row reduction, then the last coordinate absorbs the remaining pairing.

    Raises:
        ValueError: chi is not skew of even size >= 4
        Unsupported: the ring has no row-reduction solver
        VerificationError: the final congruence check fails
    """
    N = chi.rows
    if not chi.is_skew() or N % 2 or N < 4:
        raise ValueError("split_off_hyperbolic needs a skew form of even size at least 4")
    ring = chi.ring
    last = N - 1
    d = [chi[i, last] for i in range(last)]
    word = row_reduction_word(d).extended(1)
    chi1 = congruence(word.eval(), chi)
    absorb = [ElemFactor(last, i, Matrix.from_rows(ring, [[chi1[i, N - 2]]]))
              for i in range(last) if not chi1[i, N - 2].is_zero()]
    word = ElemWord(ring, word.decomp, word.factors + absorb)
    result = congruence(word.eval(), chi)
    psi = result[0:N - 2, 0:N - 2]
    if result != orthogonal_sum(psi, standard_form(ring, 'psi', 1)):
        raise VerificationError("split-off congruence is not an orthogonal sum with psi_2")
    return word, psi
