import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sylowlab._arith import valuation
from sylowlab.errors import BudgetExceeded, DomainError
from sylowlab.matrix_group import Mat2, closure, enumerate_group
from sylowlab.sylow import (
    PSubgroupLattice,
    conjugacy_witness,
    count_sylow,
    find_sylow,
    normalizer_order,
    sentence_all_conjugate,
    sentence_unextendable,
    sylow_order,
    sylow_report,
)

import oracles


def test_sylow_order_examples():
    assert sylow_order(48, 2) == 16
    assert sylow_order(13200, 2) == 16
    assert sylow_order(35, 2) == 1
    assert sylow_order(48, 3) == 3


@pytest.mark.parametrize("p, ell, n", [(3, 2, 16), (3, 3, 3), (2, 2, 2), (2, 3, 3), (5, 2, 32), (5, 5, 5)])
def test_find_sylow_orders(p, ell, n):
    G = enumerate_group(p)
    P = find_sylow(ell, G)
    assert P.order == n == sylow_order(G.order, ell)


@pytest.mark.parametrize("p, ell", [(3, 2), (3, 3), (5, 2), (7, 2), (7, 3)])
def test_find_sylow_invariants(p, ell):
    G = enumerate_group(p)
    for seed in range(3):
        P = find_sylow(ell, G, seed=seed)
        es = set(P.elements)
        assert all(x * y in es for x in P.elements[:8] for y in P.elements)
        assert all(o == ell ** valuation(o, ell) for o in (m.order() for m in es))


def test_unipotent_sylow_3_over_f3():
    P = find_sylow(3, enumerate_group(3))
    non_id = [m for m in P if not m.is_identity]
    assert all(((m.entries[0] - 1) * (m.entries[3] - 1) - m.entries[1] * m.entries[2]) % 3 == 0 for m in non_id)
    assert all(m.order() == 3 for m in non_id)


def test_conjugacy_witness_self():
    G = enumerate_group(3)
    P = find_sylow(2, G)
    g = conjugacy_witness(P, P, G)
    # the scan returns the canonically first normalizing element, not necessarily I
    first = next(x for x in G if {x.inverse() * h * x for h in P} == set(P.elements))
    assert g == first


def test_conjugacy_witness_distinct_sylows_f3():
    G = enumerate_group(3)
    sylows = {find_sylow(2, G, seed=s) for s in range(10)}
    assert len(sylows) >= 2
    for P, Q in itertools.permutations(sylows, 2):
        g = conjugacy_witness(P, Q, G)
        assert g is not None
        assert {g.inverse() * h * g for h in P} == set(Q.elements)


def test_conjugacy_witness_order_mismatch():
    G = enumerate_group(3)
    P = closure([Mat2.from_rows([[2, 0], [0, 2]], 3)])
    Q = closure([Mat2.from_rows([[0, 2], [1, 0]], 3)])
    assert (P.order, Q.order) == (2, 4)
    with pytest.raises(DomainError):
        conjugacy_witness(P, Q, G)


def test_conjugacy_witness_none_for_nonconjugate():
    G = enumerate_group(3)
    central = closure([Mat2.from_rows([[2, 0], [0, 2]], 3)])
    reflection = closure([Mat2.from_rows([[1, 0], [0, 2]], 3)])
    assert conjugacy_witness(central, reflection, G) is None


@pytest.mark.parametrize("p, ell, n", [(2, 3, 1), (3, 2, 3), (2, 2, 3), (3, 3, 4)])
def test_count_sylow_examples(p, ell, n):
    assert count_sylow(ell, enumerate_group(p)) == n


@pytest.mark.parametrize("p, ell", [(5, 2), (5, 3), (5, 5), (7, 2), (7, 3), (11, 2)])
def test_count_sylow_congruences(p, ell):
    G = enumerate_group(p)
    n = count_sylow(ell, G)
    assert n % ell == 1 % ell
    assert (G.order // sylow_order(G.order, ell)) % n == 0


def test_sentence_examples_f3():
    G = enumerate_group(3)
    assert sentence_unextendable(G, 2, 4) is True
    assert sentence_unextendable(G, 2, 3) is False
    assert sentence_unextendable(G, 2, 0) is False
    assert sentence_all_conjugate(G, 2, 4) is True
    assert sentence_all_conjugate(G, 2, 1) is False
    assert sentence_all_conjugate(G, 2, 0) is True


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("ell", [2, 3])
def test_sentences_match_oracle(p, ell):
    G = enumerate_group(p)
    top = valuation(G.order, ell)
    for k in range(top + 2):
        assert sentence_unextendable(G, ell, k) == oracles.unextendable(p, ell, k)
        assert sentence_all_conjugate(G, ell, k) == oracles.all_conjugate(p, ell, k)


def test_lattice_matches_oracle_f3():
    L = PSubgroupLattice(enumerate_group(3), 2)
    L.layer(5)
    want = oracles.ell_subgroups(3, 2)
    got = {frozenset(m.entries for m in H) for layer in L.layers for H in layer}
    assert got == set(want)


def test_lattice_budget():
    with pytest.raises(BudgetExceeded):
        PSubgroupLattice(enumerate_group(5), 2, budget=5).layer(3)


def test_normalizer_of_sylow_f3():
    G = enumerate_group(3)
    P = find_sylow(2, G)
    assert normalizer_order(P, G) == 16


def test_sylow_report_formula_only():
    r = sylow_report(11, 2)
    assert r.sylow_order == 16 and r.subgroup is None


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10 ** 6), p=st.sampled_from([3, 5, 7]), ell=st.sampled_from([2, 3]))
def test_random_seeds_give_conjugate_sylows(seed, p, ell):
    G = enumerate_group(p)
    P = find_sylow(ell, G, seed=0)
    Q = find_sylow(ell, G, seed=seed)
    assert Q.order == sylow_order(G.order, ell)
    assert conjugacy_witness(P, Q, G) is not None


def test_requires_enumeration():
    with pytest.raises((DomainError, TypeError)):
        find_sylow(2, [Mat2.identity(3)])
