"""Prime families: arithmetic progressions and the two families behind the
conjugate / non-conjugate GL2 examples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from ._arith import valuation
from .errors import DomainError


@lru_cache(maxsize=16)
def _sieve(limit: int) -> tuple:
    if limit < 2:
        return ()
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if flags[q]:
            flags[q * q :: q] = False
    return tuple(int(x) for x in np.flatnonzero(flags))


def primes_upto(limit: int) -> list:
    return list(_sieve(limit))


def primes_in_ap(residue: int, modulus: int, limit: int) -> list:
    """Primes p <= limit with p = residue (mod modulus), ascending."""
    if modulus < 1:
        raise DomainError("modulus must be positive")
    if math.gcd(residue, modulus) != 1:
        raise DomainError(
            f"gcd({residue}, {modulus}) != 1: the progression holds at most one prime"
        )
    r = residue % modulus
    return [p for p in _sieve(limit) if p % modulus == r]


def family_J(N: int, limit: int) -> list:
    """Primes p = 3 (mod 4) with 2^N | p + 1, up to ``limit``."""
    if N < 2:
        raise DomainError("N must be at least 2 (p = 3 mod 4 forces 4 | p + 1)")
    by_valuation = [p for p in primes_in_ap(3, 4, limit) if valuation(p + 1, 2) >= N]
    by_congruence = primes_in_ap(2 ** N - 1, 2 ** N, limit)
    if by_valuation != by_congruence:
        raise AssertionError(f"family_J({N}) characterizations disagree up to {limit}")
    return by_congruence


def staircase_family(limit: int) -> list:
    """A concrete family along which v2(p + 1) is unbounded.

    Starting from N = 2, take the least prime p with v2(p + 1) >= N, then
    move N past the valuation actually reached and repeat.  Every member is
    3 mod 4 and the members' v2(p + 1) strictly increase.
    """
    if limit < 3:
        raise DomainError("staircase family needs limit >= 3")
    out, need = [], 2
    for p in _sieve(limit):
        v = valuation(p + 1, 2)
        if v >= need:
            out.append(p)
            need = v + 1
    if len(out) < 3:
        raise DomainError(f"limit {limit} too small: staircase has {len(out)} < 3 members")
    return out


@dataclass(frozen=True)
class FamilySpec:
    """A family of primes: a congruence class, optionally refined by
    2^N | p + 1, or the staircase family (``staircase=True``)."""

    residue: int
    modulus: int
    min_two_valuation_of_p_plus_1: Optional[int] = None
    label: str = ""
    staircase: bool = False

    def __post_init__(self):
        if self.modulus < 1 or math.gcd(self.residue, self.modulus) != 1:
            raise DomainError(f"gcd({self.residue}, {self.modulus}) must be 1")
        N = self.min_two_valuation_of_p_plus_1
        if N is not None:
            if N < 2:
                raise DomainError("N must be at least 2")
            # p = r (mod m) and p = -1 (mod 2^N) must be simultaneously solvable
            g = math.gcd(self.modulus, 2 ** N)
            if (self.residue + 1) % g:
                raise DomainError(
                    f"p = {self.residue} (mod {self.modulus}) is incompatible with 2^{N} | p+1"
                )
        if not self.label:
            object.__setattr__(self, "label", self.describe())

    def describe(self) -> str:
        if self.staircase:
            return "staircase"
        s = f"p = {self.residue} mod {self.modulus}"
        if self.min_two_valuation_of_p_plus_1 is not None:
            s += f", v2(p+1) >= {self.min_two_valuation_of_p_plus_1}"
        return s

    @property
    def forces_unbounded_two_part(self) -> bool:
        """True when the construction itself drives v2(p+1) to infinity."""
        return self.staircase

    def members(self, limit: int) -> list:
        if self.staircase:
            base = staircase_family(limit)
        elif self.min_two_valuation_of_p_plus_1 is not None:
            base = family_J(self.min_two_valuation_of_p_plus_1, limit)
        else:
            return primes_in_ap(self.residue, self.modulus, limit)
        r = self.residue % self.modulus
        return [p for p in base if p % self.modulus == r]


FAMILY_I = FamilySpec(3, 8, label="I")
STAIRCASE = FamilySpec(3, 4, label="staircase", staircase=True)


def family_J_spec(N: int) -> FamilySpec:
    return FamilySpec(3, 4, N, label=f"J(N={N})")


def parse_family(text: str) -> FamilySpec:
    """``I``, ``staircase``, ``J:<N>`` (or ``J<N>``), ``ap:<r>:<m>``."""
    t = text.strip()
    low = t.lower()
    if low == "i":
        return FAMILY_I
    if low == "staircase":
        return STAIRCASE
    try:
        if low.startswith("j"):
            return family_J_spec(int(low[1:].lstrip(":=")))
        if low.startswith("ap:"):
            r, m = low[3:].split(":")
            return FamilySpec(int(r), int(m))
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"malformed family spec {text!r}") from None
    raise DomainError(f"unknown family {text!r}; expected I, staircase, J:<N> or ap:<r>:<m>")
