"""
Elementary-transvection words.

A word is an ordered list of factors id + s, where s maps one block of a
block decomposition into a different block. Words are the certificate
currency of the package: every equivalence is stated together with the word
that realizes it, and evaluation multiplies the factor matrices left to right.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from sympy.combinatorics import Permutation

from .errors import NotUnimodular, VerificationError
from .matrix import Matrix, block_matrix, congruence
from .ring import RingElement, RingSpec


@dataclass
class BlockDecomposition:
    """
    Ordered summand sizes of the ambient module.

    At most one block may be idempotent-presented: its projection inside the
    block is `idempotent` instead of the identity.
    """
    sizes: Tuple[int, ...]
    idempotent_block: Optional[int] = None
    idempotent: Optional[Matrix] = None

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if any(s < 1 for s in self.sizes):
            raise ValueError("block sizes must be positive")
        if (self.idempotent_block is None) != (self.idempotent is None):
            raise ValueError("idempotent block needs both an index and a matrix")
        if self.idempotent_block is not None:
            k = self.idempotent_block
            if not 0 <= k < len(self.sizes):
                raise ValueError(f"idempotent block {k} out of range")
            if self.idempotent.shape != (self.sizes[k], self.sizes[k]):
                raise ValueError("idempotent does not match its block size")
            if not self.idempotent.is_idempotent():
                raise ValueError("block matrix is not idempotent")

    @classmethod
    def free(cls, *sizes: int) -> 'BlockDecomposition':
        return cls(tuple(sizes))

    @property
    def dim(self) -> int:
        return sum(self.sizes)

    def offset(self, k: int) -> int:
        return sum(self.sizes[:k])

    def positions(self, k: int) -> List[int]:
        start = self.offset(k)
        return list(range(start, start + self.sizes[k]))

    def local_projection(self, ring: RingSpec, k: int) -> Matrix:
        if k == self.idempotent_block:
            return self.idempotent
        return Matrix.identity(ring, self.sizes[k])

    def total_idempotent(self, ring: RingSpec) -> Matrix:
        """Ambient projection onto the module: the block idempotent, identity elsewhere."""
        data = Matrix.identity(ring, self.dim)
        if self.idempotent_block is None:
            return data
        pos = self.positions(self.idempotent_block)
        updates = {(pos[r], pos[c]): self.idempotent[r, c]
                   for r in range(len(pos)) for c in range(len(pos))}
        return data.with_entries(updates)

    def extended(self, *sizes: int) -> 'BlockDecomposition':
        return BlockDecomposition(self.sizes + tuple(sizes), self.idempotent_block, self.idempotent)

    def same_as(self, other: 'BlockDecomposition') -> bool:
        if self.sizes != other.sizes or self.idempotent_block != other.idempotent_block:
            return False
        return self.idempotent is None or self.idempotent == other.idempotent


@dataclass
class ElemFactor:
    """id + s with s: block `source` -> block `target` (coefficient shape target x source)."""
    target: int
    source: int
    coeff: Matrix

    def negated(self) -> 'ElemFactor':
        return ElemFactor(self.target, self.source, -self.coeff)

    def is_trivial(self) -> bool:
        return self.coeff.is_zero()


def _check_factor(decomp: BlockDecomposition, factor: ElemFactor) -> None:
    n = len(decomp.sizes)
    i, j = factor.target, factor.source
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"factor blocks ({i}, {j}) out of range for {n} blocks")
    if i == j:
        raise ValueError("factor target and source must differ")
    if factor.coeff.shape != (decomp.sizes[i], decomp.sizes[j]):
        raise ValueError(
            f"factor coefficient has shape {factor.coeff.shape}, "
            f"expected {(decomp.sizes[i], decomp.sizes[j])}")
    if decomp.idempotent_block in (i, j):
        ring = factor.coeff.ring
        s = factor.coeff
        if decomp.local_projection(ring, i) @ s @ decomp.local_projection(ring, j) != s:
            raise ValueError("factor coefficient does not respect the idempotent block")


@dataclass
class ElemWord:
    ring: RingSpec
    decomp: BlockDecomposition
    factors: List[ElemFactor] = field(default_factory=list)

    def __post_init__(self):
        for factor in self.factors:
            if factor.coeff.ring != self.ring:
                raise ValueError("factor ring does not match the word")
            _check_factor(self.decomp, factor)

    @classmethod
    def empty(cls, ring: RingSpec, decomp: BlockDecomposition) -> 'ElemWord':
        return cls(ring, decomp, [])

    @property
    def dim(self) -> int:
        return self.decomp.dim

    def __len__(self) -> int:
        return len(self.factors)

    def factor_matrix(self, factor: ElemFactor) -> Matrix:
        rows = self.decomp.positions(factor.target)
        cols = self.decomp.positions(factor.source)
        updates = {(r, c): factor.coeff[a, b]
                   for a, r in enumerate(rows) for b, c in enumerate(cols)}
        return Matrix.identity(self.ring, self.dim).with_entries(updates)

    def eval(self) -> Matrix:
        result = Matrix.identity(self.ring, self.dim)
        for factor in self.factors:
            result = result @ self.factor_matrix(factor)
        return result

    def inverse(self) -> 'ElemWord':
        return ElemWord(self.ring, self.decomp, [f.negated() for f in reversed(self.factors)])

    def __add__(self, other: 'ElemWord') -> 'ElemWord':
        if not self.decomp.same_as(other.decomp):
            raise ValueError("cannot concatenate words on different decompositions")
        return ElemWord(self.ring, self.decomp, self.factors + other.factors)

    def extended(self, *sizes: int) -> 'ElemWord':
        """The same word on the decomposition with free blocks appended."""
        return ElemWord(self.ring, self.decomp.extended(*sizes), list(self.factors))

    def without_trivial(self) -> 'ElemWord':
        return ElemWord(self.ring, self.decomp, [f for f in self.factors if not f.is_trivial()])


def eval_word(w: ElemWord) -> Matrix:
    return w.eval()


def invert_word(w: ElemWord) -> ElemWord:
    return w.inverse()


def _scalar(ring: RingSpec, x) -> Matrix:
    return Matrix.from_rows(ring, [[x]])


def elementary(ring: RingSpec, n: int, i: int, j: int, lam) -> ElemFactor:
    """E_ij(lam) as a factor on the all-ones decomposition of R^n."""
    if i == j:
        raise ValueError("elementary matrix needs i != j")
    return ElemFactor(i, j, _scalar(ring, lam))


def whitehead_word(f: Matrix, g: Matrix) -> ElemWord:
    """
    Five-factor word evaluating to the block diagonal (id + gf, (id + fg)^-1) on M1 + M2.

    Args:
        f: map M1 -> M2 (shape m2 x m1)
        g: map M2 -> M1 (shape m1 x m2)

    Raises:
        NotInvertible: id + gf is not invertible
    """
    ring = f.ring
    m2, m1 = f.shape
    if g.shape != (m1, m2):
        raise ValueError(f"whitehead shapes do not match: f {f.shape}, g {g.shape}")
    u = Matrix.identity(ring, m1) + g @ f
    u_inv = u.inverse()
    factors = [
        ElemFactor(0, 1, -g),
        ElemFactor(1, 0, -f),
        ElemFactor(0, 1, g),
        ElemFactor(0, 1, u_inv @ g - g),
        ElemFactor(1, 0, f @ g @ f + f),
    ]
    return ElemWord(ring, BlockDecomposition.free(m1, m2), factors)


def commutator_factorization(decomp: BlockDecomposition, i: int, j: int, k: int,
                             s_ij: Matrix, s_jk: Matrix) -> ElemWord:
    """Four-factor word equal to id + s_ij s_jk (block k into block i)."""
    if len({i, j, k}) != 3:
        raise ValueError("commutator needs three distinct blocks")
    ring = s_ij.ring
    factors = [ElemFactor(i, j, s_ij), ElemFactor(j, k, s_jk),
               ElemFactor(i, j, -s_ij), ElemFactor(j, k, -s_jk)]
    return ElemWord(ring, decomp, factors)


def _swap_factors(ring: RingSpec, n: int, i: int, j: int) -> List[ElemFactor]:
    # e_i -> e_j, e_j -> -e_i
    return [elementary(ring, n, i, j, -1), elementary(ring, n, j, i, 1), elementary(ring, n, i, j, -1)]


def signed_swap_word(ring: RingSpec, n: int, i: int, j: int) -> ElemWord:
    return ElemWord(ring, BlockDecomposition.free(*[1] * n), _swap_factors(ring, n, i, j))


def signed_permutation_word(M: Matrix) -> ElemWord:
    """
    Word for a signed permutation matrix of determinant 1.

    Raises:
        ValueError: M is not a signed permutation matrix, or has determinant -1
    """
    ring = M.ring
    n = M.rows
    if not M.is_square() or n == 0:
        raise ValueError("signed permutation matrix must be square and nonempty")
    rows = M.to_rows()
    for c in range(n):
        column = [rows[r][c] for r in range(n)]
        nonzero = [x for x in column if not x.is_zero()]
        if len(nonzero) != 1 or not (nonzero[0] == 1 or nonzero[0] == -1):
            raise ValueError("not a signed permutation matrix")
    swaps = []
    for c in range(n):
        r = next(k for k in range(n) if not rows[k][c].is_zero())
        if r != c:
            swaps.append((r, c))
            rows[r], rows[c] = [-x for x in rows[c]], rows[r]
    negatives = [k for k in range(n) if rows[k][k] != 1]
    if len(negatives) % 2:
        raise ValueError("signed permutation has determinant -1")
    factors = []
    for r, c in swaps:
        factors += _swap_factors(ring, n, c, r)
    for i, j in zip(negatives[::2], negatives[1::2]):
        factors += _swap_factors(ring, n, i, j) * 2
    word = ElemWord(ring, BlockDecomposition.free(*[1] * n), factors)
    if word.eval() != M:
        raise VerificationError("signed permutation word does not evaluate to its matrix")
    return word


def permutation_word(perm: Sequence[int], ring: RingSpec) -> ElemWord:
    """
    Word for the permutation matrix P with P[perm[j], j] = 1.

    Raises:
        ValueError: perm is not a permutation of 0..n-1, or it is odd
    """
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation: {perm}")
    if not Permutation(perm).is_even:
        raise ValueError("odd permutation is not elementary")
    if n == 0:
        raise ValueError("empty permutation")
    if perm == list(range(n)):
        return ElemWord.empty(ring, BlockDecomposition.free(*[1] * n))
    P = Matrix.build(ring, n, n, lambda i, j: 1 if perm[j] == i else 0)
    return signed_permutation_word(P)


def row_reduction_word(row: Sequence[RingElement]) -> ElemWord:
    """
    Word E with row * eval(E) = (0, ..., 0, 1), rows acting from the left.

    Euclidean steps on the entries, then a unit normalization. The row
    transformation row * E_ij(lam) adds lam * x_i to x_j.

    Raises:
        NotUnimodular: the row is not unimodular
        Unsupported: the ring has no Euclidean structure here
        ValueError: length-1 row that is not 1
    """
    row = list(row)
    if not row:
        raise ValueError("empty row")
    ring = row[0].ring
    n = len(row)
    x = list(row)
    factors: List[ElemFactor] = []

    def apply(i, j, lam):
        lam = ring(lam) if not isinstance(lam, RingElement) else lam
        if lam.is_zero():
            return
        factors.append(elementary(ring, n, i, j, lam))
        x[j] = x[j] + lam * x[i]

    while sum(1 for v in x if not v.is_zero()) > 1:
        live = [k for k in range(n) if not x[k].is_zero()]
        k = min(live, key=lambda t: (ring.euclid_size(x[t].value), t))
        for j in live:
            if j != k:
                q = RingElement(ring, ring.euclid_quotient(x[j].value, x[k].value))
                apply(k, j, -q)
    live = [k for k in range(n) if not x[k].is_zero()]
    if not live:
        raise NotUnimodular("zero row")
    k = live[0]
    u = x[k]
    u_inv = ring.inverse(u.value)
    if u_inv is None:
        raise NotUnimodular(f"row generates the ideal ({u}), not the unit ideal")
    u_inv = RingElement(ring, u_inv)
    last = n - 1
    if k != last:
        apply(k, last, u_inv)
        apply(last, k, -u)
    elif u != 1:
        if n == 1:
            raise ValueError("a length-1 row other than 1 has no elementary reduction")
        apply(last, 0, u_inv)
        apply(0, last, 1 - u)
        apply(last, 0, -1)
    word = ElemWord(ring, BlockDecomposition.free(*[1] * n), factors)
    target = Matrix.row(ring, [0] * last + [1])
    if Matrix.row(ring, row) @ word.eval() != target:
        raise VerificationError("row reduction does not reach the last basis row")
    return word


def to_generator_form(w: ElemWord) -> ElemWord:
    """
    Rewrite a word on free blocks ending in a size-1 block into generators.

    The output lives on the decomposition (N-1, 1) and uses only factors
    id + p e_last^T (target 0, source 1) and id + e_last a^T (target 1, source 0).
    Factors inside the first N-1 coordinates become four-factor commutators.

    Raises:
        ValueError: the word is not in generator form (last block is not of size 1,
            or the decomposition has an idempotent block)
    """
    decomp = w.decomp
    if decomp.sizes[-1] != 1 or decomp.idempotent_block is not None or len(decomp.sizes) < 2:
        raise ValueError("word is not in generator form: last block must be a free block of size 1")
    ring = w.ring
    last = len(decomp.sizes) - 1
    head = decomp.dim - 1
    out = BlockDecomposition.free(head, 1)

    def column(positions, values):
        col = {p: v for p, v in zip(positions, values)}
        return Matrix.build(ring, head, 1, lambda i, j: col.get(i, 0))

    def row_vec(positions, values):
        r = {p: v for p, v in zip(positions, values)}
        return Matrix.build(ring, 1, head, lambda i, j: r.get(j, 0))

    gens: List[ElemFactor] = []
    for factor in w.factors:
        if factor.is_trivial():
            continue
        rows = decomp.positions(factor.target)
        cols = decomp.positions(factor.source)
        if factor.source == last:
            values = [factor.coeff[a, 0] for a in range(len(rows))]
            gens.append(ElemFactor(0, 1, column(rows, values)))
        elif factor.target == last:
            values = [factor.coeff[0, b] for b in range(len(cols))]
            gens.append(ElemFactor(1, 0, row_vec(cols, values)))
        else:
            for a, r in enumerate(rows):
                for b, c in enumerate(cols):
                    lam = factor.coeff[a, b]
                    if lam.is_zero():
                        continue
                    e_r = column([r], [1])
                    gens += [ElemFactor(0, 1, e_r), ElemFactor(1, 0, row_vec([c], [lam])),
                             ElemFactor(0, 1, -e_r), ElemFactor(1, 0, row_vec([c], [-lam]))]
    return ElemWord(ring, out, gens)


def block_column(top: Matrix, bottom: Matrix) -> Matrix:
    return block_matrix([[top], [bottom]])


def _check_symplectic(W: Matrix, chi: Matrix, what: str) -> None:
    if congruence(W, chi) != chi:
        raise VerificationError(f"{what} is not symplectic for the given form")


def symplectic_transvection(chi: Matrix, p: Optional[Matrix] = None,
                            a: Optional[Matrix] = None) -> ElemWord:
    """
    Symplectic elementary word whose last factor is a generator.

    For p (column of length N-1) the word is (phi + 1)(id + p e_N^T); for a
    (row of length N-1) it is (psi + 1)(id + e_N a^T). The correction phi or
    psi is a Whitehead word on (N-1, 1) whose R-part is 1.

    Args:
        chi: skew invertible form on R^N, N even
        p: column generator, or
        a: row generator

    Raises:
        ValueError: neither or both generators given, or shape mismatch
        NotInvertible: chi is not invertible
    """
    if (p is None) == (a is None):
        raise ValueError("give exactly one of p and a")
    ring = chi.ring
    N = chi.rows
    if not chi.is_skew() or N % 2 or N < 2:
        raise ValueError("symplectic transvection needs a skew form of even size")
    head = N - 1
    decomp = BlockDecomposition.free(head, 1)
    chi_inv = chi.inverse()
    e_last = Matrix.unit_vector(ring, N, head)
    zero = Matrix.zeros(ring, 1, 1)
    if p is not None:
        if p.shape != (head, 1):
            raise ValueError(f"p must be a column of length {head}")
        if p.is_zero():
            return ElemWord.empty(ring, decomp)
        p_hat = block_column(p, zero)
        d = (-(chi_inv @ e_last))[0:head, 0:1]
        nu = (p_hat.T @ chi)[0:1, 0:head]
        word = whitehead_word(nu, d)
        word = ElemWord(ring, decomp, word.factors + [ElemFactor(0, 1, p)])
    else:
        if a.shape != (1, head):
            raise ValueError(f"a must be a row of length {head}")
        if a.is_zero():
            return ElemWord.empty(ring, decomp)
        v = (chi_inv @ block_column(a.T, zero))[0:head, 0:1]
        c = (chi @ e_last)[0:head, 0:1]
        word = whitehead_word(c.T, v)
        word = ElemWord(ring, decomp, word.factors + [ElemFactor(1, 0, a)])
    _check_symplectic(word.eval(), chi, "transvection")
    return word


def symplectic_orbit_word(chi: Matrix, w: ElemWord) -> ElemWord:
    """
    Symplectic replacement of an elementary word along one orbit.

    With p = eval(w)^-1 e_N, returns W in E(R^N) with W^T chi W = chi and
    W p = e_N. The generators of w are popped from the right; each becomes a
    symplectic transvection tau = gamma * alpha, and the remaining generators
    are conjugated by gamma before the next step.

    Raises:
        ValueError: w is not in generator form
        VerificationError: a post-condition fails
    """
    ring = chi.ring
    N = chi.rows
    if w.dim != N:
        raise ValueError(f"word dimension {w.dim} does not match form size {N}")
    gens = list(to_generator_form(w).factors)
    head = N - 1
    decomp = BlockDecomposition.free(head, 1)
    result: List[ElemFactor] = []
    while gens:
        alpha = gens.pop()
        if alpha.target == 0:
            tau = symplectic_transvection(chi, p=alpha.coeff)
        else:
            tau = symplectic_transvection(chi, a=alpha.coeff)
        if not tau.factors:
            continue
        gamma = ElemWord(ring, decomp, tau.factors[:-1]).eval()[0:head, 0:head]
        gamma_inv = gamma.inverse()
        conjugated = []
        for g in gens:
            if g.target == 0:
                conjugated.append(ElemFactor(0, 1, gamma @ g.coeff))
            else:
                conjugated.append(ElemFactor(1, 0, g.coeff @ gamma_inv))
        gens = conjugated
        result = tau.factors + result
    word = ElemWord(ring, decomp, result)
    W = word.eval()
    p0 = w.inverse().eval() @ Matrix.unit_vector(ring, N, head)
    if W @ p0 != Matrix.unit_vector(ring, N, head):
        raise VerificationError("orbit word does not move p to the last basis vector")
    _check_symplectic(W, chi, "orbit word")
    return word
