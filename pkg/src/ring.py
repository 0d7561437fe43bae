"""
Exact commutative ring arithmetic.

Supported families: integers (Z), rationals (Q), integers modulo n (Z/n),
prime fields (F_p) and polynomial rings over one of those in named variables
(e.g. Z/9[x,y]). Values are kept in a canonical raw form so that equality is
plain representation equality:

    Z      -> int
    Q      -> fractions.Fraction
    Z/n    -> int in [0, n)
    F_p    -> int in [0, p)
    poly   -> sorted tuple of (exponents, coefficient) with nonzero coefficients
"""
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from tokenize import TokenError
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import GF, QQ, Poly, Rational, Symbol, isprime, primefactors
from sympy.core.intfunc import igcdex
from sympy.core.sympify import SympifyError
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import BasePolynomialError

from .errors import NotInvertible, NotUnimodular, Unsupported

FAMILIES = ('Z', 'Q', 'Z/n', 'F_p', 'poly')

_MOD_RE = re.compile(r'^Z/(\d+)$')
_FIELD_RE = re.compile(r'^F_(\d+)$')
_POLY_RE = re.compile(r'^(.+)\[([^\[\]]+)\]$')
_VAR_RE = re.compile(r'^[A-Za-z][A-Za-z0-9_]*$')
_TRANSFORMS = standard_transformations + (convert_xor,)


@dataclass(frozen=True)
class RingSpec:
    """
    A declared commutative ring together with raw-value arithmetic.

    Calling a RingSpec coerces ints, Fractions and element text into a
    RingElement of this ring.
    """
    family: str
    modulus: Optional[int] = None
    base: Optional['RingSpec'] = None
    variables: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown ring family: {self.family}")
        if self.family in ('Z/n', 'F_p'):
            if self.modulus is None or self.modulus < 2:
                raise ValueError("modulus must be at least 2")
            if self.family == 'F_p' and not isprime(self.modulus):
                raise ValueError(f"F_{self.modulus}: {self.modulus} is not prime")
        if self.family == 'poly':
            if self.base is None or self.base.family == 'poly':
                raise ValueError("polynomial rings need a Z, Q, Z/n or F_p base")
            if not self.variables:
                raise ValueError("polynomial rings need at least one variable")
            if len(set(self.variables)) != len(self.variables):
                raise ValueError("polynomial variables must be distinct")
            for name in self.variables:
                if not _VAR_RE.match(name):
                    raise ValueError(f"invalid variable name: {name!r}")

    def __str__(self) -> str:
        if self.family in ('Z', 'Q'):
            return self.family
        if self.family == 'Z/n':
            return f"Z/{self.modulus}"
        if self.family == 'F_p':
            return f"F_{self.modulus}"
        return f"{self.base}[{','.join(self.variables)}]"

    def __call__(self, value: Any) -> 'RingElement':
        if isinstance(value, RingElement):
            if value.ring != self:
                raise ValueError(f"ring mismatch: {value.ring} vs {self}")
            return value
        if isinstance(value, str):
            return RingElement(self, self.parse(value))
        if isinstance(value, Fraction):
            return RingElement(self, self.from_fraction(value))
        if isinstance(value, (int, np.integer)):
            return RingElement(self, self.from_int(int(value)))
        raise TypeError(f"cannot coerce {type(value).__name__} into {self}")

    # -- properties -----------------------------------------------------

    @property
    def is_modular(self) -> bool:
        return self.family in ('Z/n', 'F_p')

    @property
    def is_finite(self) -> bool:
        return self.is_modular

    def size(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.modulus

    def elements(self) -> List['RingElement']:
        """All elements of a finite ring, in canonical order."""
        return [RingElement(self, k) for k in range(self.size())]

    def two_is_unit(self) -> bool:
        return self.inverse(self.from_int(2)) is not None

    # -- raw arithmetic ---------------------------------------------------

    def zero(self) -> Any:
        if self.family == 'Q':
            return Fraction(0)
        if self.family == 'poly':
            return ()
        return 0

    def one(self) -> Any:
        return self.from_int(1)

    def is_zero(self, x: Any) -> bool:
        return x == self.zero()

    def from_int(self, k: int) -> Any:
        if self.family == 'Z':
            return int(k)
        if self.family == 'Q':
            return Fraction(k)
        if self.is_modular:
            return int(k) % self.modulus
        return self._constant(self.base.from_int(k))

    def from_fraction(self, value: Fraction) -> Any:
        if self.family == 'Z':
            if value.denominator != 1:
                raise ValueError(f"{value} is not an integer")
            return value.numerator
        if self.family == 'Q':
            return Fraction(value)
        if self.is_modular:
            inv = self.inverse(value.denominator % self.modulus)
            if inv is None:
                raise ValueError(f"denominator of {value} is not invertible in {self}")
            return value.numerator * inv % self.modulus
        return self._constant(self.base.from_fraction(value))

    def add(self, x: Any, y: Any) -> Any:
        if self.family in ('Z', 'Q'):
            return x + y
        if self.is_modular:
            return (x + y) % self.modulus
        acc = dict(x)
        for exps, c in y:
            acc[exps] = self.base.add(acc[exps], c) if exps in acc else c
        return self._normalize(acc)

    def neg(self, x: Any) -> Any:
        if self.family in ('Z', 'Q'):
            return -x
        if self.is_modular:
            return (-x) % self.modulus
        return tuple((exps, self.base.neg(c)) for exps, c in x)

    def sub(self, x: Any, y: Any) -> Any:
        return self.add(x, self.neg(y))

    def mul(self, x: Any, y: Any) -> Any:
        if self.family in ('Z', 'Q'):
            return x * y
        if self.is_modular:
            return (x * y) % self.modulus
        acc: Dict[Tuple[int, ...], Any] = {}
        for e1, c1 in x:
            for e2, c2 in y:
                exps = tuple(a + b for a, b in zip(e1, e2))
                term = self.base.mul(c1, c2)
                acc[exps] = self.base.add(acc[exps], term) if exps in acc else term
        return self._normalize(acc)

    def is_nilpotent(self, x: Any) -> bool:
        if self.family == 'Z/n':
            radical = reduce(lambda a, b: a * b, primefactors(self.modulus), 1)
            return x % radical == 0
        if self.family == 'poly':
            return all(self.base.is_nilpotent(c) for _, c in x)
        return self.is_zero(x)

    def inverse(self, x: Any) -> Optional[Any]:
        """Raw inverse of x, or None when x is not a unit."""
        if self.family == 'Z':
            return x if x in (1, -1) else None
        if self.family == 'Q':
            return None if x == 0 else 1 / x
        if self.is_modular:
            u, _, g = igcdex(x, self.modulus)
            return int(u) % self.modulus if g == 1 else None
        origin = (0,) * len(self.variables)
        constant = dict(x).get(origin, self.base.zero())
        c_inv = self.base.inverse(constant)
        if c_inv is None:
            return None
        rest = tuple((e, c) for e, c in x if e != origin)
        if not all(self.base.is_nilpotent(c) for _, c in rest):
            return None
        # x = c(1 + N) with N nilpotent, so x^-1 = c^-1 (1 - N + N^2 - ...)
        minus_nil = self.neg(self.mul(self._constant(c_inv), rest))
        total = self.one()
        term = self.one()
        while True:
            term = self.mul(term, minus_nil)
            if self.is_zero(term):
                break
            total = self.add(total, term)
        return self.mul(total, self._constant(c_inv))

    # -- text -------------------------------------------------------------

    def parse(self, text: str) -> Any:
        """Parse element text: decimal, `p/q`, or `3*x^2*y - 1` for polynomials."""
        text = text.strip()
        if self.family == 'Z':
            return int(text)
        if self.family == 'Q':
            return Fraction(text)
        if self.is_modular:
            return self.from_fraction(Fraction(text))
        symbols = {name: Symbol(name) for name in self.variables}
        try:
            expr = parse_expr(text, local_dict=symbols, transformations=_TRANSFORMS)
            poly = Poly(expr, *symbols.values(), domain=QQ)
        except (SyntaxError, TypeError, ValueError, SympifyError, BasePolynomialError, TokenError) as exc:
            raise ValueError(f"malformed polynomial over {self}: {text!r}") from exc
        acc = {}
        for monom, coeff in poly.terms():
            value = Fraction(int(coeff.p), int(coeff.q))
            acc[tuple(int(e) for e in monom)] = self.base.from_fraction(value)
        return self._normalize(acc)

    def format(self, x: Any) -> str:
        if self.family != 'poly':
            return str(x)
        if not x:
            return '0'
        parts = []
        for exps, c in reversed(x):
            mono = '*'.join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, exps) if k)
            ctext = self.base.format(c)
            negative = ctext.startswith('-')
            magnitude = ctext[1:] if negative else ctext
            if not mono:
                body = magnitude
            elif magnitude == '1':
                body = mono
            else:
                body = f"{magnitude}*{mono}"
            parts.append(('-' if negative else '+', body))
        text = ('-' if parts[0][0] == '-' else '') + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    # -- randomness -------------------------------------------------------

    def random(self, rng: np.random.Generator, bound: int = 9) -> 'RingElement':
        """Random element; integer-like entries are drawn from [-bound, bound]."""
        if self.family == 'Z':
            value = int(rng.integers(-bound, bound + 1))
        elif self.family == 'Q':
            value = Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))
        elif self.is_modular:
            value = int(rng.integers(0, self.modulus))
        else:
            acc = {}
            for exps in itertools.product(range(2), repeat=len(self.variables)):
                acc[exps] = self.base.random(rng, bound).value
            value = self._normalize(acc)
        return RingElement(self, value)

    # -- Euclidean structure ---------------------------------------------

    def euclid_size(self, x: Any) -> int:
        """Euclidean size; Z/n uses the lift in [0, n)."""
        if self.family == 'Z':
            return abs(x)
        if self.family in ('Q', 'F_p'):
            return 0 if self.is_zero(x) else 1
        if self.family == 'Z/n':
            return x
        self._sympy_domain()
        return 0 if not x else max(exps[0] for exps, _ in x) + 1

    def euclid_quotient(self, x: Any, y: Any) -> Any:
        """q with euclid_size(x - q*y) < euclid_size(y), for y != 0."""
        if self.family in ('Z', 'Z/n'):
            return x // y
        if self.family == 'Q':
            return x / y
        if self.family == 'F_p':
            return self.mul(x, self.inverse(y))
        q, _ = self._to_sympy(x).div(self._to_sympy(y))
        return self._from_sympy(q)

    # -- polynomial helpers ---------------------------------------------

    def _constant(self, c: Any) -> Tuple:
        if self.base.is_zero(c):
            return ()
        return (((0,) * len(self.variables), c),)

    def _normalize(self, acc: Dict[Tuple[int, ...], Any]) -> Tuple:
        return tuple(sorted((e, c) for e, c in acc.items() if not self.base.is_zero(c)))

    def _sympy_domain(self):
        if self.family != 'poly' or len(self.variables) != 1 or self.base.family not in ('Q', 'F_p'):
            raise Unsupported(f"no Euclidean solver for {self}")
        return QQ if self.base.family == 'Q' else GF(self.base.modulus)

    def _to_sympy(self, x: Any) -> Poly:
        domain = self._sympy_domain()
        rep = {}
        for exps, c in x:
            rep[exps] = Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
        return Poly.from_dict(rep, Symbol(self.variables[0]), domain=domain)

    def _from_sympy(self, poly: Poly) -> Tuple:
        acc = {}
        for monom, coeff in poly.terms():
            if self.base.family == 'Q':
                value = Fraction(int(coeff.p), int(coeff.q))
            else:
                value = int(coeff) % self.base.modulus
            acc[tuple(int(e) for e in monom)] = value
        return self._normalize(acc)


@dataclass(frozen=True, eq=False)
class RingElement:
    """An exact element of a RingSpec; ints coerce on either side of an operator."""
    ring: RingSpec
    value: Any

    def _raw(self, other: Any) -> Any:
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.ring.from_int(int(other))
        if isinstance(other, Fraction):
            return self.ring.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        raw = self._raw(other)
        if raw is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.add(self.value, raw))

    __radd__ = __add__

    def __sub__(self, other):
        raw = self._raw(other)
        if raw is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.sub(self.value, raw))

    def __rsub__(self, other):
        raw = self._raw(other)
        if raw is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.sub(raw, self.value))

    def __mul__(self, other):
        raw = self._raw(other)
        if raw is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.mul(self.value, raw))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.value))

    def __truediv__(self, other):
        raw = self._raw(other)
        if raw is NotImplemented:
            return NotImplemented
        return self * RingElement(self.ring, raw).inverse()

    def __pow__(self, k: int):
        base = self if k >= 0 else self.inverse()
        result = self.ring(1)
        for _ in range(abs(k)):
            result = result * base
        return result

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == self.ring.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.value))

    def __str__(self) -> str:
        return self.ring.format(self.value)

    def __repr__(self) -> str:
        return f"RingElement({self.ring}, {self})"

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.value)

    def inverse(self) -> 'RingElement':
        inv = self.ring.inverse(self.value)
        if inv is None:
            raise NotInvertible(f"{self} is not a unit in {self.ring}")
        return RingElement(self.ring, inv)


def ring_parse(text: str) -> RingSpec:
    """
    Parse a ring spec: `Z | Q | Z/<n> | F_<p> | <base>[x1,...,xk]`.

    Raises:
        ValueError: malformed text, modulus below 2, or p not prime
    """
    text = text.strip()
    if text in ('Z', 'Q'):
        return RingSpec(text)
    match = _POLY_RE.match(text)
    if match:
        base = ring_parse(match.group(1))
        variables = tuple(v.strip() for v in match.group(2).split(','))
        return RingSpec('poly', base=base, variables=variables)
    match = _MOD_RE.match(text)
    if match:
        return RingSpec('Z/n', modulus=int(match.group(1)))
    match = _FIELD_RE.match(text)
    if match:
        return RingSpec('F_p', modulus=int(match.group(1)))
    raise ValueError(f"malformed ring spec: {text!r}")


def is_unit(x: RingElement) -> Optional[RingElement]:
    """Inverse of x when x is a unit, else None."""
    inv = x.ring.inverse(x.value)
    if inv is None:
        return None
    y = RingElement(x.ring, inv)
    if x * y != 1:
        return None
    return y


def dot(xs: Sequence[RingElement], ys: Sequence[RingElement]) -> RingElement:
    if len(xs) != len(ys):
        raise ValueError("dot product of vectors with different lengths")
    ring = xs[0].ring
    total = ring(0)
    for x, y in zip(xs, ys):
        total = total + x * y
    return total


def _integer_fold(values: Sequence[int]) -> List[int]:
    g, coeffs = 0, []
    for x in values:
        u, v, h = igcdex(g, x)
        coeffs = [c * int(u) for c in coeffs] + [int(v)]
        g = int(h)
    if g not in (1, -1):
        raise NotUnimodular(f"row has gcd {abs(g)}")
    if g == -1:
        coeffs = [-c for c in coeffs]
    return coeffs


def _polynomial_fold(ring: RingSpec, row: Sequence[RingElement]) -> List[Any]:
    polys = [ring._to_sympy(x.value) for x in row]
    start = next((k for k, p in enumerate(polys) if not p.is_zero), None)
    if start is None:
        raise NotUnimodular("zero row")
    zero_poly = ring._to_sympy(ring.zero())
    coeffs = [zero_poly] * len(polys)
    coeffs[start] = ring._to_sympy(ring.one())
    g = polys[start]
    for k in range(start + 1, len(polys)):
        if polys[k].is_zero:
            continue
        s, t, h = g.gcdex(polys[k])
        coeffs = [c * s for c in coeffs]
        coeffs[k] = t
        g = h
    if g.degree() != 0:
        raise NotUnimodular(f"row has gcd {g.as_expr()}")
    return [ring._from_sympy(c) for c in coeffs]


def bezout_witness(row: Sequence[RingElement]) -> List[RingElement]:
    """
    Find b with sum(a_i * b_i) = 1.

    Any unit entry gives a witness directly. Otherwise Z, Z/n, Q, F_p and
    univariate polynomials over Q or F_p are solved by extended-gcd folds.

    Args:
        row: entries of one ring

    Returns:
        witness b, checked exactly

    Raises:
        NotUnimodular: no witness exists
        Unsupported: no solver for this ring family
    """
    if not row:
        raise NotUnimodular("empty row")
    ring = row[0].ring
    if any(x.ring != ring for x in row):
        raise ValueError("row entries belong to different rings")
    witness = None
    for k, x in enumerate(row):
        inv = ring.inverse(x.value)
        if inv is not None:
            witness = [ring.zero()] * len(row)
            witness[k] = inv
            break
    if witness is None:
        if ring.family == 'Z':
            witness = _integer_fold([x.value for x in row])
        elif ring.is_modular:
            coeffs = _integer_fold([x.value for x in row] + [ring.modulus])
            witness = [c % ring.modulus for c in coeffs[:-1]]
        elif ring.family == 'Q':
            raise NotUnimodular("zero row")
        else:
            witness = _polynomial_fold(ring, row)
    result = [RingElement(ring, b) for b in witness]
    if dot(list(row), result) != 1:
        raise NotUnimodular("witness check failed")
    return result
