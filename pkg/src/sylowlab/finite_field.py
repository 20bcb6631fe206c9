"""Exact arithmetic in F_p and in F_p(i) = F_p[x]/(x^2 + 1).

F_p(i) is only built for p = 3 (mod 4), where x^2 + 1 is irreducible.
Elements are immutable values; all functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from ._arith import is_prime, order_from_group_order, prime_factors, strip, valuation
from .errors import DomainError, ModulusMismatch

__all__ = [
    "FpElement",
    "FqElement",
    "Valuation",
    "field_mul",
    "field_inv",
    "field_pow",
    "mult_order",
    "v_adic",
    "norm",
    "norm_via_frobenius",
    "primitive_root",
    "two_part_generator",
    "two_part_elements",
]


def _check_prime(p):
    if not isinstance(p, int) or not is_prime(p):
        raise DomainError(f"modulus {p!r} is not prime")


@dataclass(frozen=True, eq=False)
class FpElement:
    value: int
    modulus: int

    def __post_init__(self):
        _check_prime(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"F_{self.modulus} vs F_{other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def _new(self, v: int) -> "FpElement":
        return FpElement(v, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __neg__(self):
        return self._new(-self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return self._new(pow(self.value, n, self.modulus))

    def inverse(self) -> "FpElement":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.modulus}")
        return self._new(pow(self.value, -1, self.modulus))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * self._new(o).inverse()

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"

    @property
    def group_order(self) -> int:
        return self.modulus - 1


@dataclass(frozen=True, eq=False)
class FqElement:
    """a + b*i in F_p(i), i^2 = -1, p = 3 (mod 4).

    The components are kept as plain residues; ``re``/``im`` give them as
    FpElement values.
    """

    a: int
    b: int
    modulus: int

    def __post_init__(self):
        _check_prime(self.modulus)
        if self.modulus % 4 != 3:
            raise DomainError(
                f"x^2+1 is reducible over F_{self.modulus} (p = 1 mod 4 or p = 2); "
                "F_p(i) is only constructed for p = 3 mod 4"
            )
        object.__setattr__(self, "a", self.a % self.modulus)
        object.__setattr__(self, "b", self.b % self.modulus)

    @property
    def re(self) -> FpElement:
        return FpElement(self.a, self.modulus)

    @property
    def im(self) -> FpElement:
        return FpElement(self.b, self.modulus)

    def _coerce(self, other):
        if isinstance(other, FqElement):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"F_{self.modulus}(i) vs F_{other.modulus}(i)")
            return other.a, other.b
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"F_{self.modulus}(i) vs F_{other.modulus}")
            return other.value, 0
        if isinstance(other, int):
            return other, 0
        return NotImplemented

    def _new(self, a, b):
        return FqElement(a, b, self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.a + o[0], self.b + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.a - o[0], self.b - o[1])

    def __neg__(self):
        return self._new(-self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c, d = o
        p = self.modulus
        return self._new((self.a * c - self.b * d) % p, (self.a * d + self.b * c) % p)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        p = self.modulus
        ra, rb = 1, 0
        xa, xb = self.a, self.b
        while n:
            if n & 1:
                ra, rb = (ra * xa - rb * xb) % p, (ra * xb + rb * xa) % p
            xa, xb = (xa * xa - xb * xb) % p, (2 * xa * xb) % p
            n >>= 1
        return self._new(ra, rb)

    def conjugate(self) -> "FqElement":
        return self._new(self.a, -self.b)

    def inverse(self) -> "FqElement":
        n = (self.a * self.a + self.b * self.b) % self.modulus
        if n == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.modulus}(i)")
        t = pow(n, -1, self.modulus)
        return self._new(self.a * t, -self.b * t)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * self._new(*o).inverse()

    def __eq__(self, other):
        if isinstance(other, FqElement):
            return (self.a, self.b, self.modulus) == (other.a, other.b, other.modulus)
        if isinstance(other, (int, FpElement)):
            o = self._coerce(other)
            return self.b == 0 and self.a == o[0] % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.modulus))

    def __bool__(self):
        return bool(self.a or self.b)

    def __repr__(self):
        return f"{self.a}+{self.b}i (mod {self.modulus})"

    @property
    def group_order(self) -> int:
        return self.modulus * self.modulus - 1


Element = Union[FpElement, FqElement]


def _same_modulus(x, y):
    if type(x) is not type(y) or x.modulus != y.modulus:
        raise ModulusMismatch(f"cannot combine {x!r} and {y!r}")


def field_mul(x: Element, y: Element) -> Element:
    _same_modulus(x, y)
    return x * y


def field_inv(x: Element) -> Element:
    return x.inverse()


def field_pow(x: Element, n: int) -> Element:
    if n < 0:
        raise ValueError("field_pow takes non-negative exponents")
    return x ** n


def mult_order(x: Element) -> int:
    """Multiplicative order of a nonzero element."""
    if not x:
        raise DomainError("0 has no multiplicative order")
    return order_from_group_order(lambda m: x ** m == 1, x.group_order)


@dataclass(frozen=True)
class Valuation:
    base: int
    exponent: int

    def __int__(self):
        return self.exponent


def v_adic(n: int, ell: int) -> Valuation:
    """Exponent of the exact power of the prime ``ell`` dividing ``n``."""
    _check_prime(ell)
    return Valuation(ell, valuation(n, ell))


def norm(x: FqElement) -> FpElement:
    """N(a+bi) = (a+bi)(a-bi) = a^2 + b^2."""
    return FpElement(x.a * x.a + x.b * x.b, x.modulus)


def norm_via_frobenius(x: FqElement) -> FpElement:
    """Norm computed as x^(p+1); must agree with :func:`norm`."""
    y = x ** (x.modulus + 1)
    if y.b != 0:
        raise AssertionError(f"x^(p+1) left F_p for x = {x!r}")
    return FpElement(y.a, x.modulus)


def _candidates(p):
    # diagonals a + b = s with a descending: (1+i), (2+i), (1+2i), (3+i), ...
    s = 2
    while True:
        for b in range(1, s):
            a = s - b
            if a < p and b < p:
                yield a, b
        s += 1
        if s > 2 * (p - 1):
            return


@lru_cache(maxsize=256)
def primitive_root(p: int) -> FqElement:
    """First generator of F_p(i)* in the fixed candidate order."""
    FqElement(0, 0, p)  # validates p
    n = p * p - 1
    qs = prime_factors(n)
    for a, b in _candidates(p):
        g = FqElement(a, b, p)
        if all(g ** (n // q) != 1 for q in qs):
            return g
    raise AssertionError(f"no primitive root found in F_{p}(i)")


@lru_cache(maxsize=256)
def two_part_generator(p: int) -> FqElement:
    """Generator of the Sylow 2-subgroup of the cyclic group F_p(i)*."""
    g = primitive_root(p)
    return g ** strip(p * p - 1, 2)


def two_part_elements(p: int) -> list:
    """All 2-elements of F_p(i)*, as powers g^0, g^1, ... of the 2-part generator."""
    g = two_part_generator(p)
    size = 2 ** valuation(p * p - 1, 2)
    out, x = [], FqElement(1, 0, p)
    for _ in range(size):
        out.append(x)
        x = x * g
    return out
