"""Vol'vachev's conditions on a field K of odd characteristic.

    V1  -1 is a sum of two squares in K
    V2  K has no element of multiplicative order 4
    V3  every 2-element a+bi of K(i) has (a+bi)(a-bi) = 1

All three together are exactly when Sylow 2-subgroups of GL2(K) can fail to
be conjugate.  Over a finite field V2 and V3 never hold together; in an
ultraproduct of F_p's they can, when the 2-part of F_p(i)* grows without
bound along the family.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ._arith import require_prime, valuation
from .cache import MISSING
from .errors import DomainError, InvariantViolation
from .families import FamilySpec
from .finite_field import FqElement, mult_order, norm, two_part_elements
from .harness import (
    Bounded,
    eventual_value,
    running_max_increases,
    sylow_bound_detect,
)
from .matrix_group import gl2_order
from .sylow import sylow_order

MIN_RUNNING_MAX_INCREASES = 3


def _require_odd_prime(p):
    require_prime(p, "p")
    if p == 2:
        raise DomainError("characteristic 2 is excluded")


def check_v1(p: int) -> tuple:
    """First (a, b) in scan order (a, then b ascending) with a^2 + b^2 = -1 mod p."""
    _require_odd_prime(p)
    root = {}
    for b in range(p):
        root.setdefault(b * b % p, b)
    for a in range(p):
        b = root.get((-1 - a * a) % p)
        if b is not None:
            return a, b
    raise InvariantViolation(f"-1 is not a sum of two squares in F_{p}")


def check_v2(p: int) -> bool:
    """No element of order 4 in F_p*, found by scanning; must agree with p = 3 mod 4."""
    _require_odd_prime(p)
    x = np.arange(1, p, dtype=np.int64)
    x2 = x * x % p
    has_order_4 = bool(np.any((x2 * x2 % p == 1) & (x2 != 1)))
    by_congruence = p % 4 == 3
    if (not has_order_4) != by_congruence:
        raise InvariantViolation(f"order scan and congruence disagree on V2 for p = {p}")
    return not has_order_4


@dataclass(frozen=True)
class V3Witness:
    element: FqElement
    order: int
    norm: int  # residue in [0, p); p - 1 stands for -1

    @property
    def norm_is_minus_one(self) -> bool:
        return self.norm == self.element.modulus - 1


def check_v3_finite(p: int) -> tuple:
    """(holds, witness) for V3 over F_p.

    Scans the whole cyclic 2-part of F_p(i)*.  When V3 fails, the witness is
    a counterexample of least order (ties broken by (a, b)).
    """
    _require_odd_prime(p)
    if p % 4 != 3:
        raise DomainError(f"V3 is evaluated over F_p(i) with p = 3 mod 4; got p = {p}")
    bad = []
    for x in two_part_elements(p):
        n = norm(x).value
        if n != 1:
            if n != p - 1:
                raise InvariantViolation(f"2-element {x!r} has norm {n}, expected +-1")
            bad.append(V3Witness(x, mult_order(x), n))
    if not bad:
        return True, None
    return False, min(bad, key=lambda w: (w.order, w.element.a, w.element.b))


@dataclass(frozen=True)
class VolvachevVerdict:
    context: str
    v1: bool
    v1_witness: Optional[tuple]
    v2: bool
    v3: Optional[bool]
    v3_witness: Optional[V3Witness]


def volvachev_finite(p: int) -> VolvachevVerdict:
    w1 = check_v1(p)
    v2 = check_v2(p)
    if p % 4 == 3:
        v3, w3 = check_v3_finite(p)
    else:
        v3, w3 = None, None  # i lies in F_p; F_p(i) is not a quadratic extension
    return VolvachevVerdict(f"FINITE({p})", True, w1, v2, v3, w3)


class LimitStatus(str, enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LimitVerdict:
    status: LimitStatus
    level: Optional[int]  # m with 2^m the eventual 2-part of |F_p(i)*|, when FAILS
    profile: tuple  # (p, v2(p^2 - 1))
    witnesses: tuple  # (p, V3Witness) for FAILS
    lower_levels_norm_one: tuple  # (p, every non-maximal 2-element has norm 1)
    sample_bound: int
    note: str


def _sample(source, sample_bound):
    if isinstance(source, FamilySpec):
        return source.members(sample_bound), source.forces_unbounded_two_part, source.label
    primes = list(source)
    return primes, False, "explicit sample"


def _lower_levels_norm_one(p: int) -> bool:
    top = 2 ** valuation(p * p - 1, 2)
    return all(norm(x).value == 1 for x in two_part_elements(p) if mult_order(x) < top)


def check_v3_limit(source: Union[FamilySpec, Sequence[int]], sample_bound: int) -> LimitVerdict:
    """Decide V3 for the ultraproduct field from a finite sample of the family.

    * v2(p^2 - 1) eventually constant = m: an element of order 2^m with norm -1
      exists in every tail factor, a first-order fact at fixed level 2^m, so
      V3 FAILS in the limit.
    * v2(p^2 - 1) strictly growing (running maximum up at least 3 times) on a
      family whose construction forces growth: the 2-torsion of F(i)* is
      Prüfer, every 2-element has a 2-element square root, and norm -1 would
      give (c^2 + d^2)^2 = -1 against V2.  V3 HOLDS.
    * otherwise INCONCLUSIVE.
    """
    primes, forced, label = _sample(source, sample_bound)
    if not primes:
        raise DomainError(f"empty sample for {label} up to {sample_bound}")
    for p in primes:
        if p % 4 != 3:
            raise DomainError(f"family member {p} is not 3 mod 4")
    profile = tuple((p, valuation(p * p - 1, 2)) for p in primes)
    lower = tuple((p, _lower_levels_norm_one(p)) for p in primes)
    vals = [v for _, v in profile]
    m = eventual_value(vals)
    bound_note = f"consistent with the classification at bound {sample_bound} ({len(primes)} primes)"
    if m is not None:
        witnesses = []
        for p, v in profile:
            if v == m:
                holds, w = check_v3_finite(p)
                if holds or w.order != 2 ** m or not w.norm_is_minus_one:
                    raise InvariantViolation(f"no order-2^{m} norm -1 element in F_{p}(i)")
                witnesses.append((p, w))
        return LimitVerdict(
            LimitStatus.FAILS, m, profile, tuple(witnesses), lower, sample_bound,
            f"2-part of F_p(i)* eventually 2^{m}; norm -1 witness of order 2^{m} transfers; {bound_note}",
        )
    if forced and running_max_increases(vals) >= MIN_RUNNING_MAX_INCREASES:
        if not all(ok for _, ok in lower):
            raise InvariantViolation("a non-maximal 2-element with norm -1 was found")
        return LimitVerdict(
            LimitStatus.HOLDS, None, profile, (), lower, sample_bound,
            f"2-part of F_p(i)* unbounded (Prüfer limit); every bounded-order 2-element has norm 1; {bound_note}",
        )
    return LimitVerdict(
        LimitStatus.INCONCLUSIVE, None, profile, (), lower, sample_bound,
        f"2-part neither eventually constant nor forced to grow; {bound_note}",
    )


class Classification(str, enum.Enum):
    CONJUGATE_FINITE = "CONJUGATE_FINITE"
    NONCONJUGATE_VOLVACHEV = "NONCONJUGATE_VOLVACHEV"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ConjugacyClassification:
    kind: Classification
    sylow_order: Optional[int]
    rows: tuple  # per-prime evidence dicts, ascending p
    v3_limit: Optional[LimitVerdict]
    sample_bound: int
    note: str

    @property
    def label(self) -> str:
        if self.kind is Classification.CONJUGATE_FINITE:
            return f"CONJUGATE_FINITE({self.sylow_order})"
        return self.kind.value

    def __str__(self):
        return self.label


def evidence_row(p: int) -> dict:
    """Per-prime facts feeding the classification (cacheable, JSON-safe)."""
    odd = p != 2
    v2_ok = check_v2(p) if odd else None
    v3 = check_v3_finite(p)[0] if odd and p % 4 == 3 else None
    return {
        "p": p,
        "v2_p_minus_1": valuation(p - 1, 2),
        "v2_p_plus_1": valuation(p + 1, 2),
        "v2_p2_minus_1": valuation(p * p - 1, 2),
        "sylow2_order": sylow_order(gl2_order(p), 2),
        "V1": (check_v1(p) is not None) if odd else None,
        "V2": v2_ok,
        "V3": v3,
    }


def classify_conjugacy(family: FamilySpec, sample_bound: int, cache=None) -> ConjugacyClassification:
    """Sylow 2-conjugacy in GL2 over the family's pseudofinite field.

    Bounded Sylow 2-orders (constant tail) give CONJUGATE_FINITE; V1 and V2
    on every sampled prime together with V3 holding in the limit give
    NONCONJUGATE_VOLVACHEV; anything else is INCONCLUSIVE.
    """
    primes = family.members(sample_bound)
    if not primes:
        raise DomainError(f"family {family.label!r} has no primes up to {sample_bound}")
    rows = []
    for p in primes:
        row = cache.get(p, "evidence_row", {}) if cache is not None else MISSING
        if row is MISSING:
            row = evidence_row(p)
            if cache is not None:
                cache.put(p, "evidence_row", {}, row)
        rows.append(row)
    rows = tuple(rows)
    bound_note = f"finite evidence, consistent with the classification at bound {sample_bound}"
    detected = sylow_bound_detect(family, 2, sample_bound, primes=primes)
    if isinstance(detected, Bounded):
        return ConjugacyClassification(
            Classification.CONJUGATE_FINITE, detected.order, rows, None, sample_bound,
            f"Sylow 2-order of GL2(F_p) constant = {detected.order} on the sample tail; {bound_note}",
        )
    if all(r["V1"] and r["V2"] for r in rows):
        lim = check_v3_limit(family, sample_bound)
        if lim.status is LimitStatus.HOLDS:
            return ConjugacyClassification(
                Classification.NONCONJUGATE_VOLVACHEV, None, rows, lim, sample_bound,
                f"V1, V2 on every sampled prime and V3 in the limit; {bound_note}",
            )
        return ConjugacyClassification(
            Classification.INCONCLUSIVE, None, rows, lim, sample_bound,
            f"Sylow orders unbounded on the sample but V3 limit is {lim.status}; {bound_note}",
        )
    return ConjugacyClassification(
        Classification.INCONCLUSIVE, None, rows, None, sample_bound,
        f"Sylow orders not eventually constant and V1/V2 not satisfied throughout; {bound_note}",
    )
