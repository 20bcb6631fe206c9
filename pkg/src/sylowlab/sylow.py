"""Sylow subgroups of enumerated GL2(F_q).

Everything here works on a full enumeration (:class:`GL2Enumeration`):
normalizers and conjugators are found by scanning the whole group with the
vectorised kernels from :mod:`sylowlab.matrix_group`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._arith import is_prime, strip, valuation
from .errors import BudgetExceeded, DomainError, InvariantViolation
from .matrix_group import (
    DEFAULT_ENUMERATION_BOUND,
    GL2Enumeration,
    Mat2,
    SubgroupHandle,
    as_array,
    closure,
    enumerate_group,
    gl2_order,
    vcode,
    vinv,
    vmul,
    vpow,
)

DEFAULT_SUBGROUP_BUDGET = 100_000


def sylow_order(group_order: int, p: int) -> int:
    """p-part of ``group_order``."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return p ** valuation(group_order, p)


def _require_enumeration(ambient):
    if not isinstance(ambient, GL2Enumeration):
        raise DomainError("this operation needs a full enumeration of the ambient group")


def _conjugation_mask(G: GL2Enumeration, gens: np.ndarray, target: np.ndarray, idx=None) -> np.ndarray:
    """For each candidate g, whether g^-1 h g lies in ``target`` for every generator h.

    ``target`` is a sorted code array; ``idx`` restricts the scan to those
    positions of G.
    """
    X = G.array if idx is None else G.array[idx]
    ok = np.ones(len(X), dtype=bool)
    if len(gens) == 0:
        return ok
    Xi = vinv(X, G.p)
    for h in gens:
        y = vcode(vmul(vmul(Xi, h, G.p), X, G.p), G.p)
        ok &= np.isin(y, target, assume_unique=False)
    return ok


def normalizer_order(H: SubgroupHandle, ambient: GL2Enumeration) -> int:
    _require_enumeration(ambient)
    return int(_conjugation_mask(ambient, H.generator_array, H.code_array).sum())


def _extension_candidates(G: GL2Enumeration, H: SubgroupHandle, ell: int) -> np.ndarray:
    """Positions of ell-elements g outside H with g^ell in H and g normalizing H.

    These are exactly the g for which <H, g> is an ell-group of order ell*|H|.
    """
    E = _ell_data(G, ell)
    codes = H.code_array
    keep = ~np.isin(E["codes"], codes) & np.isin(E["pow_codes"], codes)
    idx = E["idx"][keep]
    if len(idx) and H.order > 1:
        idx = idx[_conjugation_mask(G, H.generator_array, codes, idx)]
    return idx


def _ell_data(G: GL2Enumeration, ell: int) -> dict:
    key = ("ell-data", ell)
    if key not in G._masks:
        idx = np.flatnonzero(G.ell_element_mask(ell))
        arr = G.array[idx]
        G._masks[key] = {
            "idx": idx,
            "codes": G.codes[idx],
            "pow_codes": vcode(vpow(arr, ell, G.p), G.p),
        }
    return G._masks[key]


def find_sylow(
    p_group_prime: int,
    ambient: GL2Enumeration,
    seed: int = 0,
    start: Optional[SubgroupHandle] = None,
) -> SubgroupHandle:
    """Build a Sylow subgroup by normalizer ascent.

    Start from the ell-part of a random element (or from ``start``), then keep
    adjoining an ell-element of N_G(P) outside P until |P| is the full ell-part
    of |G|.  In a finite group such an element exists whenever P is not Sylow.
    """
    _require_enumeration(ambient)
    ell, G = p_group_prime, ambient
    target = sylow_order(G.order, ell)
    rng = random.Random(seed)
    if start is None:
        x = G[rng.randrange(len(G))]
        y = x ** strip(x.order(), ell)
        P = closure([] if y.is_identity() else [y], cap=target, p=G.p)
    else:
        P = start
        if target % P.order:
            raise DomainError(f"start subgroup of order {P.order} is not an {ell}-group")
    while P.order < target:
        idx = _extension_candidates(G, P, ell)
        if len(idx) == 0:
            raise InvariantViolation(
                f"normalizer ascent stalled at order {P.order} < {target} in GL2(F_{G.p})"
            )
        g = G[int(idx[rng.randrange(len(idx))])]
        P = closure(P.generators + (g,), cap=target)
    return P


def conjugacy_witness(P: SubgroupHandle, Q: SubgroupHandle, ambient: GL2Enumeration) -> Optional[Mat2]:
    """Canonically first g with g^-1 P g = Q, or None."""
    _require_enumeration(ambient)
    if P.order != Q.order:
        raise DomainError(f"subgroup orders differ: {P.order} vs {Q.order}")
    if not (P.ambient_prime == Q.ambient_prime == ambient.p):
        raise DomainError("subgroups live in different ambient groups")
    hits = np.flatnonzero(_conjugation_mask(ambient, P.generator_array, Q.code_array))
    if len(hits) == 0:
        return None
    return ambient[int(hits[0])]


def count_sylow(p: int, ambient: GL2Enumeration, seed: int = 0) -> int:
    """n_p = [G : N_G(P)], with the Sylow congruences asserted."""
    _require_enumeration(ambient)
    P = find_sylow(p, ambient, seed=seed)
    n = ambient.order // normalizer_order(P, ambient)
    cofactor = strip(ambient.order, p)
    if n % p != 1 % p or cofactor % n:
        raise InvariantViolation(f"n_{p} = {n} violates Sylow's theorems for |G| = {ambient.order}")
    return n


class PSubgroupLattice:
    """All ell-subgroups of G, layer by layer (layer j holds those of order ell^j).

    Each subgroup of order ell^(j+1) contains a normal subgroup H of index ell,
    so it equals <H, g> for a suitable g; the layers are grown this way from
    the trivial group, deduplicated by element set.
    """

    def __init__(self, G: GL2Enumeration, ell: int, budget: int = DEFAULT_SUBGROUP_BUDGET):
        self.G, self.ell, self.budget = G, ell, budget
        self.layers = [[closure([], cap=1, p=G.p)]]
        self.total = 1

    def extensions(self, H: SubgroupHandle) -> list:
        found, covered = [], set(H.codes)
        for i in _extension_candidates(self.G, H, self.ell):
            code = int(self.G.codes[i])
            if code in covered:
                continue
            K = closure(H.generators + (self.G[int(i)],), cap=self.ell * H.order)
            if K.order != self.ell * H.order:
                raise InvariantViolation(f"<H, g> has order {K.order}, expected {self.ell * H.order}")
            covered |= K.codes
            found.append(K)
        return found

    def is_extendable(self, H: SubgroupHandle) -> bool:
        return len(_extension_candidates(self.G, H, self.ell)) > 0

    def layer(self, k: int) -> list:
        while len(self.layers) <= k:
            seen = {}
            for H in self.layers[-1]:
                for K in self.extensions(H):
                    if K not in seen:
                        seen[K] = K
                        if self.total + len(seen) > self.budget:
                            raise BudgetExceeded(
                                f"more than {self.budget} {self.ell}-subgroups enumerated",
                                reached=self.total + len(seen),
                            )
            self.total += len(seen)
            self.layers.append(sorted(seen, key=lambda s: s.elements))
        return self.layers[k]


def _lattice(ambient: GL2Enumeration, ell: int, budget: int) -> PSubgroupLattice:
    key = ("lattice", ell, budget)
    if key not in ambient._masks:
        ambient._masks[key] = PSubgroupLattice(ambient, ell, budget)
    return ambient._masks[key]


def sentence_unextendable(ambient: GL2Enumeration, p: int, k: int, budget: int = DEFAULT_SUBGROUP_BUDGET) -> bool:
    """Some subgroup of order p^k lies in no subgroup of order p^(k+1)."""
    _require_enumeration(ambient)
    if k < 0:
        raise DomainError("k must be non-negative")
    L = _lattice(ambient, p, budget)
    return any(not L.is_extendable(H) for H in L.layer(k))


def conjugacy_class_of(H: SubgroupHandle, ambient: GL2Enumeration) -> set:
    """Element-code tuples of all conjugates g^-1 H g."""
    G = ambient
    X = G.array
    Xi = vinv(X, G.p)
    Hs = as_array(H.elements)
    Y = vmul(vmul(Xi[:, None, :], Hs[None, :, :], G.p), X[:, None, :], G.p)
    codes = np.sort(vcode(Y, G.p), axis=1)
    return {tuple(row) for row in np.unique(codes, axis=0).tolist()}


def sentence_all_conjugate(ambient: GL2Enumeration, p: int, k: int, budget: int = DEFAULT_SUBGROUP_BUDGET) -> bool:
    """Any two subgroups of order p^k are conjugate."""
    _require_enumeration(ambient)
    if k < 0:
        raise DomainError("k must be non-negative")
    subs = _lattice(ambient, p, budget).layer(k)
    if len(subs) <= 1:
        return True
    cls = conjugacy_class_of(subs[0], ambient)
    return all(tuple(sorted(H.codes)) in cls for H in subs)


@dataclass(frozen=True)
class SylowReport:
    prime_p: int
    ambient_prime: int
    sylow_order: int
    subgroup: Optional[SubgroupHandle] = None
    n_p: Optional[int] = None
    maximality_checked: bool = False


def sylow_report(
    p: int,
    ell: int,
    enumerate: bool = False,
    seed: int = 0,
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> SylowReport:
    order = sylow_order(gl2_order(p), ell)
    if not enumerate:
        return SylowReport(ell, p, order)
    G = enumerate_group(p, bound)
    P = find_sylow(ell, G, seed=seed)
    if P.order != order:
        raise InvariantViolation(f"find_sylow returned order {P.order}, expected {order}")
    n = count_sylow(ell, G, seed=seed)
    # no ell-element of N_G(P) outside P  <=>  P is a maximal ell-subgroup
    maximal = len(_extension_candidates(G, P, ell)) == 0
    return SylowReport(ell, p, order, P, n, maximal)
