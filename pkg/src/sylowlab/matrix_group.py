"""GL2(F_p): elements, enumeration, subgroup closure and the non-split torus.

Single matrices are :class:`Mat2` values with Python-int entries.  Full
enumerations are held as numpy arrays of shape (n, 4) (row-major entries),
sorted by entry tuple, which is also the canonical order on subgroups.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional

import numpy as np

from ._arith import is_prime, order_from_group_order, valuation
from .errors import BudgetExceeded, DomainError, ModulusMismatch
from .finite_field import FqElement

DEFAULT_ENUMERATION_BOUND = 2_000_000


def _check_prime(p):
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise DomainError(f"{p!r} is not prime")


def gl2_order(p: int) -> int:
    _check_prime(p)
    return (p * p - 1) * (p * p - p)


@dataclass(frozen=True, eq=False)
class Mat2:
    """Invertible 2x2 matrix over F_p, entries (a, b, c, d) = [[a, b], [c, d]]."""

    entries: tuple
    modulus: int

    def __post_init__(self):
        p = int(self.modulus)
        _check_prime(p)
        e = tuple(int(x) % p for x in self.entries)
        if len(e) != 4:
            raise ValueError("Mat2 needs exactly four entries")
        if (e[0] * e[3] - e[1] * e[2]) % p == 0:
            raise DomainError(f"singular matrix {e} over F_{p}")
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "modulus", p)

    @classmethod
    def from_rows(cls, rows, p: int) -> "Mat2":
        (a, b), (c, d) = rows
        return cls((a, b, c, d), p)

    @classmethod
    def identity(cls, p: int) -> "Mat2":
        return cls((1, 0, 0, 1), p)

    @property
    def det(self) -> int:
        a, b, c, d = self.entries
        return (a * d - b * c) % self.modulus

    @property
    def code(self) -> int:
        p = self.modulus
        a, b, c, d = self.entries
        return ((a * p + b) * p + c) * p + d

    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def __mul__(self, other: "Mat2") -> "Mat2":
        if not isinstance(other, Mat2):
            return NotImplemented
        if other.modulus != self.modulus:
            raise ModulusMismatch(f"GL2(F_{self.modulus}) vs GL2(F_{other.modulus})")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h), self.modulus)

    def inverse(self) -> "Mat2":
        a, b, c, d = self.entries
        t = pow(self.det, -1, self.modulus)
        return Mat2((d * t, -b * t, -c * t, a * t), self.modulus)

    def __pow__(self, n: int) -> "Mat2":
        if n < 0:
            return self.inverse() ** (-n)
        r, x = Mat2.identity(self.modulus), self
        while n:
            if n & 1:
                r = r * x
            x = x * x
            n >>= 1
        return r

    def order(self) -> int:
        return order_from_group_order(lambda m: (self ** m).is_identity(), gl2_order(self.modulus))

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.modulus == other.modulus and self.entries == other.entries

    def __hash__(self):
        return hash((self.entries, self.modulus))

    def __lt__(self, other: "Mat2"):
        return self.entries < other.entries

    def __repr__(self):
        a, b, c, d = self.entries
        return f"[[{a},{b}],[{c},{d}]]/F{self.modulus}"


def mat_mul(x: Mat2, y: Mat2) -> Mat2:
    return x * y


def mat_inv(x: Mat2) -> Mat2:
    return x.inverse()


def mat_order(x: Mat2) -> int:
    return x.order()


# -- vectorised kernels on (..., 4) int64 arrays ------------------------------

def vmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    a, b, c, d = (A[..., k] for k in range(4))
    e, f, g, h = (B[..., k] for k in range(4))
    return np.stack(
        [(a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p],
        axis=-1,
    )


@lru_cache(maxsize=64)
def _inverse_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        t[x] = pow(x, -1, p)
    return t


def vinv(A: np.ndarray, p: int) -> np.ndarray:
    a, b, c, d = (A[..., k] for k in range(4))
    t = _inverse_table(p)[(a * d - b * c) % p]
    return np.stack([(d * t) % p, (-b * t) % p, (-c * t) % p, (a * t) % p], axis=-1)


def vpow(A: np.ndarray, n: int, p: int) -> np.ndarray:
    r = np.broadcast_to(np.array([1, 0, 0, 1], dtype=np.int64), A.shape).copy()
    x = A
    while n:
        if n & 1:
            r = vmul(r, x, p)
        x = vmul(x, x, p)
        n >>= 1
    return r


def vcode(A: np.ndarray, p: int) -> np.ndarray:
    return ((A[..., 0] * p + A[..., 1]) * p + A[..., 2]) * p + A[..., 3]


def as_array(mats: Iterable[Mat2]) -> np.ndarray:
    rows = [m.entries for m in mats]
    return np.array(rows, dtype=np.int64).reshape(-1, 4)


class GL2Enumeration(Sequence):
    """All of GL2(F_p), canonically sorted, backed by numpy arrays."""

    def __init__(self, p: int):
        self.p = p
        grid = np.indices((p, p, p, p), dtype=np.int64).reshape(4, -1).T
        det = (grid[:, 0] * grid[:, 3] - grid[:, 1] * grid[:, 2]) % p
        self.array = np.ascontiguousarray(grid[det != 0])
        self.codes = vcode(self.array, p)
        self._masks: dict = {}

    @property
    def order(self) -> int:
        return len(self.codes)

    def __len__(self):
        return len(self.codes)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return Mat2(tuple(int(x) for x in self.array[i]), self.p)

    def index_of_codes(self, codes: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.codes, codes)

    def index(self, m: Mat2) -> int:
        i = int(np.searchsorted(self.codes, m.code))
        if i >= len(self.codes) or self.codes[i] != m.code:
            raise ValueError(f"{m!r} not in GL2(F_{self.p})")
        return i

    def ell_element_mask(self, ell: int) -> np.ndarray:
        """Boolean mask of the ell-elements (orders a power of ell)."""
        if ell not in self._masks:
            e = ell ** valuation(self.order, ell)
            powered = vpow(self.array, e, self.p)
            ident = np.array([1, 0, 0, 1], dtype=np.int64)
            self._masks[ell] = np.all(powered == ident, axis=1)
        return self._masks[ell]

    def __repr__(self):
        return f"GL2Enumeration(p={self.p}, order={self.order})"


@lru_cache(maxsize=6)
def _enumerate(p: int) -> GL2Enumeration:
    return GL2Enumeration(p)


def enumerate_group(p: int, bound: int = DEFAULT_ENUMERATION_BOUND) -> GL2Enumeration:
    """Every element of GL2(F_p) in canonical order.

    Raises BudgetExceeded when |GL2(F_p)| is above ``bound``; in that case only
    formula-based operations are available for this p.
    """
    n = gl2_order(p)
    if n > bound:
        raise BudgetExceeded(
            f"|GL2(F_{p})| = {n} exceeds the enumeration bound {bound}", reached=n
        )
    return _enumerate(p)


@dataclass(frozen=True, eq=False)
class SubgroupHandle:
    """A finite subgroup of GL2(F_p): generators plus its sorted element list.

    Equality and hashing use the element list only, so two handles with
    different generators for the same subgroup compare equal.
    """

    generators: tuple
    elements: tuple
    ambient_prime: int

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def codes(self) -> frozenset:
        return frozenset(m.code for m in self.elements)

    @cached_property
    def code_array(self) -> np.ndarray:
        return np.array(sorted(self.codes), dtype=np.int64)

    @cached_property
    def generator_array(self) -> np.ndarray:
        return as_array(self.generators)

    def __contains__(self, m: Mat2) -> bool:
        return m.modulus == self.ambient_prime and m.code in self.codes

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, SubgroupHandle):
            return NotImplemented
        return self.ambient_prime == other.ambient_prime and self.elements == other.elements

    def __hash__(self):
        return hash((self.ambient_prime, self.elements))

    def __repr__(self):
        return f"SubgroupHandle(order={self.order}, p={self.ambient_prime}, gens={list(self.generators)})"


class CapExceeded(BudgetExceeded):
    pass


def closure(gens: Sequence[Mat2], cap: int = 10_000, p: Optional[int] = None) -> SubgroupHandle:
    """Subgroup generated by ``gens``, built breadth-first up to ``cap`` elements."""
    gens = tuple(gens)
    primes = {g.modulus for g in gens}
    if p is not None:
        primes.add(p)
    if len(primes) != 1:
        raise ModulusMismatch(f"generators over several primes or none given: {sorted(primes)}")
    (p,) = primes
    one = Mat2.identity(p)
    seen = {one}
    frontier = [one]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise CapExceeded(
                            f"closure exceeded cap {cap} (reached {len(seen)} elements)",
                            reached=len(seen),
                        )
        frontier = nxt
    return SubgroupHandle(gens, tuple(sorted(seen)), p)


def embed_torus(x: FqElement) -> Mat2:
    """a + b*i  ->  [[a, -b], [b, a]]: the non-split torus inside GL2(F_p)."""
    if not x:
        raise DomainError("0 is not in F_p(i)*")
    return Mat2((x.a, -x.b, x.b, x.a), x.modulus)
