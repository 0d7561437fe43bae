"""
Projective modules presented as images of idempotent matrices.

A module P lives inside an ambient free module R^m as the image of an
idempotent Pi. Forms on P are stored as ambient m x m matrices B with
Pi^T B Pi = B. The determinant of a rank-2 module is trivialized by a pair
(w, lam) of a generator of the second exterior power and its dual functional,
both in lexicographic pair coordinates.
"""
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import List, Optional, Tuple

from .errors import NotInvertible, NotUnimodular, VerificationError
from .matrix import Matrix, block_matrix, characteristic_polynomial, orthogonal_sum
from .ring import RingElement, RingSpec


def wedge_pairs(m: int) -> List[Tuple[int, int]]:
    """Lexicographic index pairs k < l of R^m."""
    return list(combinations(range(m), 2))


def wedge(x: Matrix, y: Matrix) -> Matrix:
    """Coordinates of x ^ y as a column in lexicographic pair order."""
    pairs = wedge_pairs(x.rows)
    return Matrix.build(x.ring, len(pairs), 1,
                        lambda i, j: x[pairs[i][0], 0] * y[pairs[i][1], 0] - x[pairs[i][1], 0] * y[pairs[i][0], 0])


def exterior_square(M: Matrix) -> Matrix:
    """Second compound matrix: the action of M on pair coordinates."""
    pairs = wedge_pairs(M.rows)
    cols = wedge_pairs(M.cols)

    def minor(r, c):
        (k, l), (i, j) = pairs[r], cols[c]
        return M[k, i] * M[l, j] - M[k, j] * M[l, i]

    return Matrix.build(M.ring, len(pairs), len(cols), minor)


@dataclass
class ComplementFrame:
    """S (m x k) and C (k x m) with C S = I_k and S C = I - Pi."""
    S: Matrix
    C: Matrix

    def padded(self, k: int) -> 'ComplementFrame':
        ring = self.S.ring
        return ComplementFrame(block_matrix([[self.S], [Matrix.zeros(ring, k, self.S.cols)]]),
                               block_matrix([[self.C, Matrix.zeros(ring, self.C.rows, k)]]))


class ProjModule:
    """
    A finitely generated projective module image(Pi) inside R^m.

    Args:
        ring: coefficient ring
        idempotent: m x m matrix with Pi^2 = Pi
        rank: expected constant rank, certified by the characteristic polynomial
        frame: optional complement frame for image(I - Pi)

    Raises:
        ValueError: Pi is not idempotent, the rank certificate fails, or the
            frame does not present the complement
    """

    def __init__(self, ring: RingSpec, idempotent: Matrix, rank: int,
                 frame: Optional[ComplementFrame] = None):
        if not idempotent.is_square():
            raise ValueError("idempotent must be square")
        if not idempotent.is_idempotent():
            raise ValueError("matrix is not idempotent")
        m = idempotent.rows
        if not 0 <= rank <= m:
            raise ValueError(f"rank {rank} outside 0..{m}")
        # char poly of a constant-rank idempotent: t^(m-r) (t-1)^r
        expected = [ring((-1) ** k * comb(rank, k)) if k <= rank else ring(0) for k in range(m + 1)]
        if characteristic_polynomial(idempotent) != expected:
            raise ValueError(f"idempotent does not have constant rank {rank}")
        if frame is not None:
            k = frame.S.cols
            if frame.S.shape != (m, k) or frame.C.shape != (k, m):
                raise ValueError("complement frame has the wrong shape")
            if frame.C @ frame.S != Matrix.identity(ring, k):
                raise ValueError("complement frame: C S is not the identity")
            if frame.S @ frame.C != Matrix.identity(ring, m) - idempotent:
                raise ValueError("complement frame: S C is not I - Pi")
        self.ring = ring
        self.idempotent = idempotent
        self.rank = rank
        self.frame = frame

    @classmethod
    def free(cls, ring: RingSpec, n: int) -> 'ProjModule':
        return cls(ring, Matrix.identity(ring, n), n)

    @property
    def ambient(self) -> int:
        return self.idempotent.rows

    def is_free(self) -> bool:
        return self.idempotent == Matrix.identity(self.ring, self.ambient)

    def complement(self) -> Matrix:
        return Matrix.identity(self.ring, self.ambient) - self.idempotent

    def direct_sum_free(self, k: int) -> 'ProjModule':
        """P + R^k, the free summands appended after the ambient of P."""
        idem = orthogonal_sum(self.idempotent, Matrix.identity(self.ring, k))
        frame = self.frame.padded(k) if self.frame is not None else None
        return ProjModule(self.ring, idem, self.rank + k, frame)

    def complement_pairing(self) -> Matrix:
        """Symmetric N used to fill image(I - Pi) in the generalized inverse."""
        if self.frame is None:
            return Matrix.identity(self.ring, self.ambient)
        return self.frame.C.T @ self.frame.C

    def restrict(self, B: Matrix) -> Matrix:
        return self.idempotent.T @ B @ self.idempotent

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjModule):
            return NotImplemented
        return self.ring == other.ring and self.rank == other.rank and self.idempotent == other.idempotent

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProjModule({self.ring}, ambient={self.ambient}, rank={self.rank})"


def generalized_inverse(module: ProjModule, B: Matrix) -> Matrix:
    """
    Ambient matrix of B^-1 : P^v -> P for a form B restricted invertible on P.

    C1 = B + (I - Pi)^T N (I - Pi) fills the complement; B+ = Pi C1^-1 Pi^T.

    Raises:
        NotInvertible: C1 is singular (the form is degenerate on P, or the
            module needs a complement frame)
        VerificationError: B B+ B != B
    """
    J = module.complement()
    C1 = B + J.T @ module.complement_pairing() @ J
    try:
        C1_inv = C1.inverse()
    except NotInvertible as exc:
        raise NotInvertible(f"form is not invertible on the module: {exc}") from exc
    Pi = module.idempotent
    result = Pi @ C1_inv @ Pi.T
    if B @ result @ B != B:
        raise VerificationError("generalized inverse does not invert the form on the module")
    return result


@dataclass
class UmEpi:
    """
    An epimorphism a: P -> R with a section s, a(s) = 1.

    `module` is the whole source P (typically P0 + R); a is stored already
    precomposed with its idempotent.
    """
    module: ProjModule
    a: Matrix
    s: Matrix

    @classmethod
    def create(cls, module: ProjModule, a: Matrix, s: Matrix) -> 'UmEpi':
        """
        Raises:
            ValueError: shapes, or s outside the module
            NotUnimodular: a(s) != 1
        """
        m = module.ambient
        if a.shape != (1, m) or s.shape != (m, 1):
            raise ValueError(f"epimorphism needs a 1x{m} row and a {m}x1 section")
        Pi = module.idempotent
        if Pi @ s != s:
            raise ValueError("section does not lie in the module")
        a = a @ Pi
        if (a @ s)[0, 0] != 1:
            raise NotUnimodular("section mismatch: a(s) != 1")
        return cls(module, a, s)

    @property
    def ring(self) -> RingSpec:
        return self.module.ring

    def value(self) -> RingElement:
        return (self.a @ self.s)[0, 0]

    def retraction(self) -> Matrix:
        return self.module.idempotent - self.s @ self.a


def kernel_module(epi: UmEpi) -> ProjModule:
    """
    ker(a) as the image of Pi - s a, rank one less; the frame gains (s, a).

    Raises:
        ValueError: section mismatch or a not compatible with the idempotent
    """
    module = epi.module
    Pi = module.idempotent
    if epi.a @ Pi != epi.a or Pi @ epi.s != epi.s or epi.value() != 1:
        raise ValueError("section mismatch")
    K = epi.retraction()
    if epi.a @ K != Matrix.zeros(module.ring, 1, module.ambient):
        raise VerificationError("retraction does not land in the kernel")
    if module.frame is None and module.is_free():
        frame = ComplementFrame(epi.s, epi.a)
    elif module.frame is not None:
        frame = ComplementFrame(block_matrix([[module.frame.S, epi.s]]),
                                block_matrix([[module.frame.C], [epi.a]]))
    else:
        frame = None
    return ProjModule(module.ring, K, module.rank - 1, frame)


@dataclass
class Trivialization:
    """w spans the determinant of a rank-2 module; lam is its dual: lam(w) = 1."""
    w: Matrix
    lam: Matrix

    def check(self, module: ProjModule) -> None:
        """
        Raises:
            ValueError: the pair does not trivialize det(module)
        """
        if module.rank != 2:
            raise ValueError("trivializations are only defined for rank 2")
        L = exterior_square(module.idempotent)
        if self.w.shape != (L.rows, 1) or self.lam.shape != (1, L.rows):
            raise ValueError("trivialization has the wrong number of coordinates")
        if L @ self.w != self.w:
            raise ValueError("w does not lie in the exterior square of the module")
        if self.lam @ L != self.lam:
            raise ValueError("lam does not factor through the module")
        if (self.lam @ self.w)[0, 0] != 1:
            raise ValueError("lam(w) != 1")

    def scaled(self, u: RingElement) -> 'Trivialization':
        """The trivialization whose functional is u * lam."""
        u_inv = u.inverse()
        return Trivialization(self.w.scale(u_inv), self.lam.scale(u))

    def negated(self) -> 'Trivialization':
        return Trivialization(-self.w, -self.lam)

    def value(self, x: Matrix, y: Matrix) -> RingElement:
        """lam(x ^ y)."""
        return (self.lam @ wedge(x, y))[0, 0]


def standard_trivialization(ring: RingSpec) -> Trivialization:
    """w = e1 ^ e2 on R^2."""
    return Trivialization(Matrix.column(ring, [1]), Matrix.row(ring, [1]))


def _det3(x: Matrix, y: Matrix, z: Matrix) -> RingElement:
    return block_matrix([[x, y, z]]).determinant()


def trivialization_from_row(c: Matrix, t: Matrix) -> Tuple[ProjModule, Trivialization]:
    """
    Kernel of a unimodular row of length 3 with its induced trivialization.

    w is the contraction of e1^e2^e3 by c and lam(x ^ y) = det[t, x, y].

    Args:
        c: 1 x 3 row
        t: 3 x 1 section, c t = 1

    Raises:
        NotUnimodular: c t != 1
    """
    ring = c.ring
    if c.shape != (1, 3) or t.shape != (3, 1):
        raise ValueError("trivialization_from_row needs a 1x3 row and a 3x1 section")
    if (c @ t)[0, 0] != 1:
        raise NotUnimodular("row is not split by the given section: c t != 1")
    module = kernel_module(UmEpi.create(ProjModule.free(ring, 3), c, t))
    # pairs (0,1), (0,2), (1,2): w = c3 e12 - c2 e13 + c1 e23
    w = Matrix.column(ring, [c[0, 2], -c[0, 1], c[0, 0]])
    basis = [Matrix.unit_vector(ring, 3, k) for k in range(3)]
    lam = Matrix.row(ring, [_det3(t, basis[k], basis[l]) for k, l in wedge_pairs(3)])
    triv = Trivialization(w, lam)
    triv.check(module)
    return module, triv


def chi0_form(module: ProjModule, triv: Trivialization) -> Matrix:
    """Ambient skew matrix of chi0(x, y) = lam(Pi x ^ Pi y)."""
    triv.check(module)
    m = module.ambient
    ring = module.ring
    B = Matrix.zeros(ring, m, m)
    updates = {}
    for idx, (k, l) in enumerate(wedge_pairs(m)):
        updates[(k, l)] = triv.lam[0, idx]
        updates[(l, k)] = -triv.lam[0, idx]
    return B.with_entries(updates)


def chi0_contract_inverse(module: ProjModule, triv: Trivialization, a0: Matrix) -> Matrix:
    """
    q with chi0(q, p) = a0(p) for p in the module: q = -(a0 contracted into w).

    Raises:
        ValueError: a0 does not factor through the idempotent
    """
    m = module.ambient
    if a0.shape != (1, m):
        raise ValueError(f"a0 must be a 1x{m} row")
    if a0 @ module.idempotent != a0:
        raise ValueError("a0 is not compatible with the idempotent")
    ring = module.ring
    q = [ring(0)] * m
    for idx, (k, l) in enumerate(wedge_pairs(m)):
        w_kl = triv.w[idx, 0]
        if w_kl.is_zero():
            continue
        q[l] = q[l] - w_kl * a0[0, k]
        q[k] = q[k] + w_kl * a0[0, l]
    return Matrix.column(ring, q)


class Lambda3:
    """
    Alternating trilinear functional on the ambient of P0 + R.

    lam3(x, y, z) = lam(x' ^ y') z_R - lam(x' ^ z') y_R + lam(y' ^ z') x_R,
    where x' drops the last coordinate x_R.
    """

    def __init__(self, module: ProjModule, triv: Trivialization):
        triv.check(module)
        self.module = module
        self.triv = triv
        self.m = module.ambient

    def _split(self, x: Matrix) -> Tuple[Matrix, RingElement]:
        if x.shape != (self.m + 1, 1):
            raise ValueError(f"expected a column of length {self.m + 1}")
        return x[0:self.m, 0:1], x[self.m, 0]

    def __call__(self, x: Matrix, y: Matrix, z: Matrix) -> RingElement:
        (xb, xr), (yb, yr), (zb, zr) = self._split(x), self._split(y), self._split(z)
        lam = self.triv.value
        return lam(xb, yb) * zr - lam(xb, zb) * yr + lam(yb, zb) * xr

    def covector(self, x: Matrix, y: Matrix) -> Matrix:
        """The row z -> lam3(x, y, z)."""
        ring = self.module.ring
        basis = [Matrix.unit_vector(ring, self.m + 1, k) for k in range(self.m + 1)]
        return Matrix.row(ring, [self(x, y, e) for e in basis])

    def pairing(self, z: Matrix) -> Matrix:
        """L with L[k, l] = lam3(e_k, e_l, z)."""
        ring = self.module.ring
        n = self.m + 1
        basis = [Matrix.unit_vector(ring, n, k) for k in range(n)]
        return Matrix.build(ring, n, n, lambda k, l: self(basis[k], basis[l], z))

    def on_triples(self) -> List[RingElement]:
        """Values on lexicographic index triples."""
        ring = self.module.ring
        n = self.m + 1
        basis = [Matrix.unit_vector(ring, n, k) for k in range(n)]
        return [self(basis[i], basis[j], basis[k]) for i, j, k in combinations(range(n), 3)]


def lambda3_functional(module: ProjModule, triv: Trivialization) -> Lambda3:
    return Lambda3(module, triv)


def chi_a_form(module: ProjModule, triv: Trivialization, epi: UmEpi) -> Matrix:
    """
    Ambient (m+1) x (m+1) matrix of chi_a(x, y) = lam3(x, y, s) on ker(a).

    The form is K^T L K with L the lam3 pairing against s and K = Pi - s a
    the retraction onto the kernel.

    Raises:
        ValueError: the epimorphism does not live on P0 + R, or s is not a section of a
        NotInvertible: the form is degenerate on ker(a)
    """
    if epi.module.ambient != module.ambient + 1:
        raise ValueError("epimorphism must live on P0 + R")
    lam3 = Lambda3(module, triv)
    K = epi.retraction()
    form = K.T @ lam3.pairing(epi.s) @ K
    generalized_inverse(kernel_module(epi), form)
    return form
