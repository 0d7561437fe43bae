"""
Determinant-1 completions of epimorphisms (a0, a_R^2): P0 + R -> R.
"""
from dataclasses import dataclass

from .errors import NotUnimodular, VerificationError
from .matrix import Matrix, block_matrix
from .projmod import ProjModule, Trivialization, UmEpi, chi0_contract_inverse, chi0_form
from .ring import RingElement


@dataclass
class Completion:
    """Automorphism of P0 + R (identity on the complement) whose last row is `target`."""
    matrix: Matrix
    target: Matrix


def krusemeyer(b: RingElement, c: RingElement, a: RingElement,
               q: RingElement, r: RingElement, p: RingElement) -> Matrix:
    """
    Completion of (b, c, a^2) given qb + rc + ap = 1.

    Raises:
        NotUnimodular: the side condition fails
        VerificationError: the determinant is not 1
    """
    ring = b.ring
    if q * b + r * c + a * p != 1:
        raise NotUnimodular("side condition qb + rc + ap = 1 fails")
    M = Matrix.from_rows(ring, [[-p - q * r, q * q, -c + 2 * a * q],
                                [-r * r, -p + q * r, b + 2 * a * r],
                                [b, c, a * a]])
    if M.determinant() != 1:
        raise VerificationError("completion determinant is not 1")
    return M


def generalized_completion(P0: ProjModule, triv: Trivialization, epi: UmEpi) -> Completion:
    """
    Completion of (a0, a_R^2) from a = (a0, a_R) and s = (q, p).

    phi0 = -q chi0(-, q) - p id_P0 and the last column is
    2 a_R q + chi0^-1(a0), where chi0^-1(a0) pairs as chi0(-, x) = a0.

    Raises:
        ValueError: P0 is not of rank 2, or the epimorphism does not live on P0 + R
        VerificationError: determinant or last row check fails
    """
    if P0.rank != 2:
        raise ValueError(f"completion needs a rank-2 module, got rank {P0.rank}")
    if epi.module != P0.direct_sum_free(1):
        raise ValueError("epimorphism does not live on P0 + R")
    ring = P0.ring
    m = P0.ambient
    Pi = P0.idempotent
    q = epi.s[0:m, 0:1]
    p = epi.s[m, 0]
    a0 = epi.a[0:1, 0:m]
    a_r = epi.a[0, m]
    B = chi0_form(P0, triv)
    phi0 = -(q @ (B @ q).T) - Pi.scale(p) + P0.complement()
    phi_r = q.scale(2 * a_r) - chi0_contract_inverse(P0, triv, a0)
    corner = Matrix.from_rows(ring, [[a_r * a_r]])
    M = block_matrix([[phi0, phi_r], [a0 @ Pi, corner]])
    target = block_matrix([[a0, corner]])
    if M.determinant() != 1:
        raise VerificationError("completion determinant is not 1")
    if M[m:m + 1, 0:m + 1] != target:
        raise VerificationError("completion last row is not (a0, a_R^2)")
    return Completion(M, target)
