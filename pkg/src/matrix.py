"""
Dense exact matrices over a RingSpec.

Entries are RingElements stored in an object-dtype numpy array, so numpy's
object arithmetic (including @) runs on exact ring operations. Determinants
go through the division-free characteristic-polynomial recursion, which works
for every ring family, zero divisors included.
"""
from functools import reduce
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.combinatorics import Permutation

from .errors import NotInvertible, SizeLimit
from .ring import RingElement, RingSpec

PFAFFIAN_SIZE_LIMIT = 24

Index = Union[int, slice, Sequence[int]]


def _as_index(key: Index, n: int) -> np.ndarray:
    if isinstance(key, (int, np.integer)):
        return np.array([int(key)], dtype=int)
    if isinstance(key, slice):
        return np.array(range(*key.indices(n)), dtype=int)
    return np.array(list(key), dtype=int)


class Matrix:
    """Rectangular matrix whose entries all belong to one ring."""

    def __init__(self, ring: RingSpec, data: np.ndarray):
        if data.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        self.ring = ring
        self._data = data

    # -- construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Iterable[Iterable[Any]], cols: Optional[int] = None) -> 'Matrix':
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else (cols or 0)
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        data = np.empty((len(rows), ncols), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                data[i, j] = ring(x)
        return cls(ring, data)

    @classmethod
    def build(cls, ring: RingSpec, rows: int, cols: int, entry: Callable[[int, int], Any]) -> 'Matrix':
        data = np.empty((rows, cols), dtype=object)
        for i in range(rows):
            for j in range(cols):
                data[i, j] = ring(entry(i, j))
        return cls(ring, data)

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> 'Matrix':
        return cls.build(ring, rows, cols, lambda i, j: 0)

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> 'Matrix':
        return cls.build(ring, n, n, lambda i, j: 1 if i == j else 0)

    @classmethod
    def diagonal(cls, ring: RingSpec, values: Sequence[Any]) -> 'Matrix':
        values = [ring(v) for v in values]
        return cls.build(ring, len(values), len(values), lambda i, j: values[i] if i == j else 0)

    @classmethod
    def column(cls, ring: RingSpec, values: Sequence[Any]) -> 'Matrix':
        return cls.from_rows(ring, [[v] for v in values], cols=1)

    @classmethod
    def row(cls, ring: RingSpec, values: Sequence[Any]) -> 'Matrix':
        return cls.from_rows(ring, [list(values)])

    @classmethod
    def unit_vector(cls, ring: RingSpec, n: int, k: int) -> 'Matrix':
        return cls.build(ring, n, 1, lambda i, j: 1 if i == k else 0)

    # -- shape and access -------------------------------------------------

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, key):
        i, j = key
        if isinstance(i, (int, np.integer)) and isinstance(j, (int, np.integer)):
            return self._data[i, j]
        r = _as_index(i, self.rows)
        c = _as_index(j, self.cols)
        return Matrix(self.ring, self._data[np.ix_(r, c)])

    def entries(self) -> List[RingElement]:
        """Entries in row-major order."""
        return list(self._data.flat)

    def to_rows(self) -> List[List[RingElement]]:
        return [list(row) for row in self._data]

    def with_entries(self, updates: dict) -> 'Matrix':
        """Copy with {(i, j): value} replaced."""
        data = self._data.copy()
        for (i, j), value in updates.items():
            data[i, j] = self.ring(value)
        return Matrix(self.ring, data)

    def key(self) -> Tuple:
        """Hashable canonical key, used for sorting and deduplication."""
        return (str(self.ring), self.shape, tuple(str(x) for x in self._data.flat))

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: 'Matrix') -> None:
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    @property
    def T(self) -> 'Matrix':
        return Matrix(self.ring, self._data.T.copy())

    def __add__(self, other: 'Matrix') -> 'Matrix':
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return Matrix(self.ring, self._data + other._data)

    def __sub__(self, other: 'Matrix') -> 'Matrix':
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")
        return Matrix(self.ring, self._data - other._data)

    def __neg__(self) -> 'Matrix':
        return Matrix(self.ring, -self._data)

    def __matmul__(self, other: 'Matrix') -> 'Matrix':
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return Matrix.zeros(self.ring, self.rows, other.cols)
        return Matrix(self.ring, self._data @ other._data)

    def scale(self, x: Any) -> 'Matrix':
        x = self.ring(x)
        if self.rows == 0 or self.cols == 0:
            return self
        return Matrix(self.ring, self._data * x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.ring == other.ring and self.shape == other.shape
                and all(a == b for a, b in zip(self._data.flat, other._data.flat)))

    __hash__ = None

    def __repr__(self) -> str:
        body = '; '.join(', '.join(str(x) for x in row) for row in self._data)
        return f"Matrix({self.ring}, {self.rows}x{self.cols}, [{body}])"

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self._data.flat)

    def is_skew(self) -> bool:
        """M^T = -M with zero diagonal."""
        if not self.is_square():
            return False
        if any(not self._data[i, i].is_zero() for i in range(self.rows)):
            return False
        return self.T == -self

    def is_idempotent(self) -> bool:
        return self.is_square() and self @ self == self

    # -- convenience wrappers -------------------------------------------

    def determinant(self) -> RingElement:
        return determinant(self)

    def inverse(self) -> 'Matrix':
        return inverse(self)

    def pfaffian(self) -> RingElement:
        return pfaffian(self)


def _sum(ring: RingSpec, terms: Iterable[RingElement]) -> RingElement:
    return reduce(lambda a, b: a + b, terms, ring(0))


def orthogonal_sum(*blocks: Matrix) -> Matrix:
    """Block-diagonal placement in argument order."""
    if not blocks:
        raise ValueError("orthogonal sum of nothing")
    ring = blocks[0].ring
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = Matrix.zeros(ring, rows, cols)._data
    r = c = 0
    for b in blocks:
        b._check(blocks[0])
        data[r:r + b.rows, c:c + b.cols] = b._data
        r += b.rows
        c += b.cols
    return Matrix(ring, data)


def block_matrix(blocks: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble [[A, B], [C, D]]-style block layouts."""
    ring = blocks[0][0].ring
    rows = [np.concatenate([b._data for b in row], axis=1) for row in blocks]
    return Matrix(ring, np.concatenate(rows, axis=0))


def characteristic_polynomial(M: Matrix) -> List[RingElement]:
    """
    Coefficients [1, c_1, ..., c_n] of det(tI - M), highest degree first.

    Division-free Berkowitz recursion: M = [[a, R], [C, A]] and the vector
    for M is a lower-triangular Toeplitz matrix built from a and R A^k C
    applied to the vector for A.
    """
    if not M.is_square():
        raise ValueError("characteristic polynomial requires a square matrix")
    ring = M.ring
    n = M.rows
    one = ring(1)
    if n == 0:
        return [one]
    if n == 1:
        return [one, -M[0, 0]]
    a = M[0, 0]
    R = M[0:1, 1:]
    C = M[1:, 0:1]
    A = M[1:, 1:]
    powers = [C]
    for i in range(n - 2):
        powers.append(A @ powers[i])
    toeplitz = [one, -a] + [-((R @ p)[0, 0]) for p in powers]
    sub = characteristic_polynomial(A)
    return [_sum(ring, (toeplitz[i - j] * sub[j] for j in range(min(i, n - 1) + 1)))
            for i in range(n + 1)]


def determinant(M: Matrix) -> RingElement:
    """
    Exact determinant via the characteristic polynomial.

    Raises:
        ValueError: if M is not square
    """
    if not M.is_square():
        raise ValueError("determinant requires a square matrix")
    coeffs = characteristic_polynomial(M)
    return coeffs[-1] if M.rows % 2 == 0 else -coeffs[-1]


def adjugate(M: Matrix) -> Matrix:
    """
    Adjugate by Cayley-Hamilton: adj(M) = (-1)^(n+1) (M^(n-1) + c_1 M^(n-2) + ... + c_(n-1) I).
    """
    if not M.is_square():
        raise ValueError("adjugate requires a square matrix")
    n = M.rows
    ring = M.ring
    if n == 0:
        return M
    coeffs = characteristic_polynomial(M)
    identity = Matrix.identity(ring, n)
    Q = identity
    for k in range(1, n):
        Q = Q @ M + identity.scale(coeffs[k])
    return Q if n % 2 == 1 else -Q


def inverse(M: Matrix) -> Matrix:
    """
    Exact inverse as adjugate times the inverse determinant.

    Raises:
        ValueError: if M is not square
        NotInvertible: if the determinant is not a unit
    """
    if not M.is_square():
        raise ValueError("inverse requires a square matrix")
    det = determinant(M)
    det_inv = M.ring.inverse(det.value)
    if det_inv is None:
        raise NotInvertible(f"determinant {det} is not a unit in {M.ring}")
    return adjugate(M).scale(RingElement(M.ring, det_inv))


def _support_components(M: Matrix) -> List[List[int]]:
    n = M.rows
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if not M[i, j].is_zero():
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[root] for root in sorted(groups)]


def _pfaffian_subsets(M: Matrix, idx: List[int]) -> RingElement:
    ring = M.ring
    k = len(idx)
    entries = [[M[i, j] for j in idx] for i in idx]
    cache = {0: ring(1)}

    def pf(mask: int) -> RingElement:
        if mask in cache:
            return cache[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        total = ring(0)
        between = 0
        for j in range(i + 1, k):
            if not (rest >> j) & 1:
                continue
            a = entries[i][j]
            if not a.is_zero():
                term = a * pf(rest & ~(1 << j))
                total = total - term if between % 2 else total + term
            between += 1
        cache[mask] = total
        return total

    return pf((1 << k) - 1)


def pfaffian(M: Matrix) -> RingElement:
    """
    Exact Pfaffian by dynamic programming over vertex subsets.

    The support graph is split into connected components first; an odd
    component forces Pf = 0, otherwise Pf is the sign of the regrouping
    permutation times the product of the component Pfaffians.

    Raises:
        ValueError: non-square, odd size, or not skew-symmetric
        SizeLimit: size above PFAFFIAN_SIZE_LIMIT
    """
    if not M.is_square():
        raise ValueError("pfaffian requires a square matrix")
    n = M.rows
    if n % 2:
        raise ValueError("pfaffian requires even size")
    if not M.is_skew():
        raise ValueError("pfaffian requires a skew-symmetric matrix")
    if n > PFAFFIAN_SIZE_LIMIT:
        raise SizeLimit(f"pfaffian size {n} exceeds {PFAFFIAN_SIZE_LIMIT}")
    ring = M.ring
    if n == 0:
        return ring(1)
    components = _support_components(M)
    if any(len(c) % 2 for c in components):
        return ring(0)
    order = [i for comp in components for i in comp]
    result = ring(Permutation(order).signature())
    for comp in components:
        result = result * _pfaffian_subsets(M, comp)
    return result


def standard_form(ring: RingSpec, kind: str, n: int, u: Any = None) -> Matrix:
    """
    The inductively defined standard matrices.

    Args:
        ring: coefficient ring
        kind: 'psi', 'sigma', 'h' or 'gamma'
        n: half size (result is 2n x 2n)
        u: unit, required for 'gamma'

    Raises:
        ValueError: n < 1 or unknown kind
        NotInvertible: gamma with a non-unit u
    """
    if n < 1:
        raise ValueError("standard forms need n >= 1")
    if kind == 'psi':
        return orthogonal_sum(*[Matrix.from_rows(ring, [[0, 1], [-1, 0]])] * n)
    if kind == 'sigma':
        return orthogonal_sum(*[Matrix.from_rows(ring, [[0, 1], [1, 0]])] * n)
    if kind == 'h':
        eye = Matrix.identity(ring, n)
        zero = Matrix.zeros(ring, n, n)
        return block_matrix([[zero, eye], [-eye, zero]])
    if kind == 'gamma':
        if u is None:
            raise ValueError("gamma requires a unit u")
        u = ring(u)
        if ring.inverse(u.value) is None:
            raise NotInvertible(f"gamma requires a unit, got {u}")
        return orthogonal_sum(*[Matrix.diagonal(ring, [u, 1])] * n)
    raise ValueError(f"unknown standard form: {kind}")


def congruence(G: Matrix, N: Matrix) -> Matrix:
    """G^T N G."""
    if not N.is_square() or G.rows != N.rows:
        raise ValueError(f"congruence size mismatch: G {G.shape}, N {N.shape}")
    return G.T @ N @ G
