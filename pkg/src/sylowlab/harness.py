"""Finite evidence for ultraproduct statements.

A property is evaluated on each prime of a family sample; the resulting
true/false pattern is summarised as a Łoś-style verdict.  No ultrafilter is
ever constructed: the verdicts only say what the finite sample supports.

Tail rule (shared with :mod:`sylowlab.volvachev`): a sequence is "eventually
constant" when its last ``max(5, ceil(0.2 n))`` entries agree.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np

from ._arith import require_prime
from .cache import MISSING
from .errors import DomainError, SylowlabError
from .families import FamilySpec
from .matrix_group import gl2_order
from .sylow import sylow_order

TAIL_MIN = 5
TAIL_FRACTION = 0.2
MIXED_MIN_ALTERNATIONS = 3
DEFAULT_EXCEPTION_WINDOW = 1


def tail_length(n: int) -> int:
    return max(TAIL_MIN, math.ceil(TAIL_FRACTION * n))


def eventual_value(values: Sequence) -> Optional[Any]:
    """The common value of the sample tail, or None if the tail is not constant
    (or the sample is too short to have a tail)."""
    n = len(values)
    t = tail_length(n)
    if n < t:
        return None
    tail = values[n - t :]
    return tail[0] if all(v == tail[0] for v in tail) else None


def running_max_increases(values: Sequence[int]) -> int:
    count, best = 0, None
    for v in values:
        if best is not None and v > best:
            count += 1
        best = v if best is None else max(best, v)
    return count


class Verdict(str, enum.Enum):
    TRUE_COFINITE = "TRUE_COFINITE"
    FALSE_COFINITE = "FALSE_COFINITE"
    MIXED = "MIXED"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LosVerdict:
    kind: Verdict
    exceptions: tuple = ()
    threshold_index: int = 0

    def __str__(self):
        return self.kind.value


@dataclass(frozen=True)
class Property:
    """A per-prime predicate (bool) or measurement (int) with a stable id."""

    property_id: str
    fn: Callable[[int], Any]

    def __call__(self, p: int):
        return self.fn(p)


@dataclass
class EvidenceReport:
    family: FamilySpec
    property_id: str
    per_index: list
    holds_count: int
    fails_count: int
    verdict: Optional[LosVerdict]
    sample_bound: int
    errors: list = field(default_factory=list)
    measured: bool = False

    @property
    def booleans(self) -> list:
        return [(p, v) for p, v in self.per_index if v is not None]


def _as_property(prop) -> Property:
    if isinstance(prop, Property):
        return prop
    if hasattr(prop, "as_property"):
        return prop.as_property()
    if callable(prop):
        return Property(getattr(prop, "__name__", repr(prop)), prop)
    raise TypeError(f"cannot use {prop!r} as a property")


def evaluate_family(
    family: FamilySpec,
    prop: Union[Property, Callable[[int], Any]],
    sample_bound: int,
    *,
    cache=None,
    workers: int = 1,
    primes: Optional[Sequence[int]] = None,
) -> EvidenceReport:
    """Evaluate ``prop`` on every family prime up to ``sample_bound``.

    Failures on single primes are recorded in ``errors`` and excluded from the
    counts.  For measurements the recorded predicate is "value equals the
    value at the last sampled prime", so a constant measurement reads as
    TRUE_COFINITE.
    """
    prop = _as_property(prop)
    sample = list(primes) if primes is not None else family.members(sample_bound)
    if not sample:
        raise DomainError(f"family {family.label!r} has no primes up to {sample_bound}")

    def run(p):
        if cache is not None:
            hit = cache.get(p, "property", {"id": prop.property_id})
            if hit is not MISSING:
                return p, hit, None
        try:
            v = prop(p)
        except SylowlabError as e:
            return p, None, f"{type(e).__name__}: {e}"
        if isinstance(v, np.generic):
            v = v.item()
        if cache is not None:
            cache.put(p, "property", {"id": prop.property_id}, v)
        return p, v, None

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, sample))
    else:
        results = [run(p) for p in sample]

    errors = [(p, msg) for p, _, msg in results if msg is not None]
    raw = [(p, v) for p, v, msg in results if msg is None]
    measured = any(not isinstance(v, bool) for _, v in raw)
    pid = prop.property_id
    if measured and raw:
        ref = raw[-1][1]
        pid = f"{pid} == {ref}"
        values = [(p, v == ref) for p, v in raw]
    else:
        values = raw
    lookup = dict(values)
    per_index = [(p, lookup.get(p)) for p in sample]
    holds = sum(1 for _, v in values if v)
    report = EvidenceReport(
        family=family,
        property_id=pid,
        per_index=per_index,
        holds_count=holds,
        fails_count=len(values) - holds,
        verdict=None,
        sample_bound=sample_bound,
        errors=errors,
        measured=measured,
    )
    if values:
        report.verdict = los_verdict(report)
    return report


def los_verdict(report, exception_window: int = DEFAULT_EXCEPTION_WINDOW) -> LosVerdict:
    """Aggregate per-prime truth values into a finite-evidence verdict.

    * no exception at all (and more than ``exception_window`` indices):
      TRUE_COFINITE / FALSE_COFINITE;
    * both values recur (>= 3 alternations, each >= 20%): MIXED;
    * exceptions only among the first ``exception_window`` indices, followed
      by at least 5 agreeing indices: COFINITE with the exception list;
    * anything else: INCONCLUSIVE.

    Because exceptions are confined to a fixed initial window, extending the
    sample can never turn TRUE_COFINITE into FALSE_COFINITE.
    """
    pairs = report.booleans if isinstance(report, EvidenceReport) else list(report)
    if not pairs:
        raise DomainError("cannot aggregate an empty report")
    n = len(pairs)
    vals = [bool(v) for _, v in pairs]
    k = exception_window
    if n <= k:
        return LosVerdict(Verdict.INCONCLUSIVE)
    if all(vals):
        return LosVerdict(Verdict.TRUE_COFINITE)
    if not any(vals):
        return LosVerdict(Verdict.FALSE_COFINITE)
    alternations = sum(1 for a, b in zip(vals, vals[1:]) if a != b)
    frac = sum(vals) / n
    if alternations >= MIXED_MIN_ALTERNATIONS and TAIL_FRACTION <= frac <= 1 - TAIL_FRACTION:
        return LosVerdict(Verdict.MIXED)
    rest = vals[k:]
    if n - k >= TAIL_MIN and len(set(rest)) == 1:
        kind = Verdict.TRUE_COFINITE if rest[0] else Verdict.FALSE_COFINITE
        exc = tuple(p for (p, _), v in zip(pairs[:k], vals[:k]) if v != rest[0])
        return LosVerdict(kind, exc, k)
    return LosVerdict(Verdict.INCONCLUSIVE)


@dataclass(frozen=True)
class Bounded:
    order: int
    profile: tuple

    def __str__(self):
        return f"Bounded({self.order})"


@dataclass(frozen=True)
class GrowingEvidence:
    profile: tuple

    def __str__(self):
        return "GrowingEvidence"


def sylow_bound_detect(family: FamilySpec, p: int, sample_bound: int, primes=None):
    """Bounded(p^k) when the Sylow p-order of GL2(F_q) is constant on the
    sample tail, otherwise GrowingEvidence with the (q, order) profile."""
    sample = list(primes) if primes is not None else family.members(sample_bound)
    if not sample:
        raise DomainError(f"family {family.label!r} has no primes up to {sample_bound}")
    profile = tuple((q, sylow_order(gl2_order(q), p)) for q in sample)
    v = eventual_value([o for _, o in profile])
    return Bounded(v, profile) if v is not None else GrowingEvidence(profile)


@dataclass(frozen=True)
class PruferReport:
    p: int
    max_level: int
    rows: tuple  # (i, j, count, expected)
    embeddings_ok: bool

    @property
    def counts_ok(self) -> bool:
        return all(c == e for _, _, c, e in self.rows)

    @property
    def ok(self) -> bool:
        return self.counts_ok and self.embeddings_ok


def prufer_check(p: int, max_level: int) -> PruferReport:
    """Order statistics of C_{p^i} for i <= max_level.

    Checks that C_{p^i} has exactly p^j - p^(j-1) elements of order p^j, so
    each level has a unique subgroup of order p^j, and that x -> p*x embeds
    C_{p^i} into C_{p^(i+1)} onto that subgroup.
    """
    require_prime(p, "p")
    if max_level < 1:
        raise DomainError("max_level must be >= 1")
    rows, emb_ok = [], True
    for i in range(1, max_level + 1):
        n = p ** i
        x = np.arange(n, dtype=np.int64)
        orders = n // np.gcd(x, n)
        for j in range(0, i + 1):
            count = int(np.count_nonzero(orders == p ** j))
            expected = 1 if j == 0 else p ** j - p ** (j - 1)
            rows.append((i, j, count, expected))
        if i < max_level:
            big = p ** (i + 1)
            img = (p * x) % big
            y = np.arange(big, dtype=np.int64)
            sub = y[(big // np.gcd(y, big)) <= n]
            emb_ok &= len(np.unique(img)) == n and np.array_equal(np.sort(img), sub)
    return PruferReport(p, max_level, tuple(rows), bool(emb_ok))
