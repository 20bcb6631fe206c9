import pytest

from sylowlab._arith import valuation
from sylowlab.cache import ResultCache
from sylowlab.errors import DomainError
from sylowlab.families import FAMILY_I, STAIRCASE, FamilySpec, family_J_spec, primes_in_ap
from sylowlab.finite_field import mult_order, norm, two_part_elements
from sylowlab.volvachev import (
    Classification,
    LimitStatus,
    check_v1,
    check_v2,
    check_v3_finite,
    check_v3_limit,
    classify_conjugacy,
    volvachev_finite,
)

import oracles


def test_v1_examples():
    assert check_v1(3) == (1, 1)
    a, b = check_v1(7)
    assert (a * a + b * b) % 7 == 6
    a, b = check_v1(11)
    assert (a * a + b * b) % 11 == 10


@pytest.mark.parametrize("p", oracles.primes_where(200, lambda q: q > 2))
def test_v1_always_holds_and_is_first_in_scan(p):
    a, b = check_v1(p)
    first = next((x, y) for x in range(p) for y in range(p) if (x * x + y * y + 1) % p == 0)
    assert (a, b) == first


def test_v2_examples():
    assert check_v2(5) is False
    assert check_v2(3) is True
    assert check_v2(11) is True


@pytest.mark.parametrize("p", oracles.primes_where(300, lambda q: q > 2))
def test_v2_scan_agrees_with_congruence(p):
    brute = not any(pow(x, 4, p) == 1 and pow(x, 2, p) != 1 for x in range(1, p))
    assert check_v2(p) == brute == (p % 4 == 3)


@pytest.mark.parametrize("p, order", [(3, 8), (11, 8), (31, 64)])
def test_v3_finite_examples(p, order):
    holds, w = check_v3_finite(p)
    assert holds is False
    assert w.order == order and w.norm_is_minus_one


def test_v3_at_3_witness_is_order_8():
    _, w = check_v3_finite(3)
    assert mult_order(w.element) == 8 and norm(w.element) == -1


@pytest.mark.parametrize("p", oracles.primes_where(200, lambda q: q % 4 == 3))
def test_v3_never_holds_over_finite_fields(p):
    holds, w = check_v3_finite(p)
    assert not holds
    assert w.order == 2 ** valuation(p * p - 1, 2)


@pytest.mark.parametrize("p", oracles.primes_where(31, lambda q: q % 4 == 3))
def test_square_root_mechanism(p):
    top = 2 ** oracles.v(p * p - 1, 2)
    for (a, b), o in oracles.two_elements(p):
        n = (a * a + b * b) % p
        assert n == (p - 1 if o == top else 1)


def test_v3_finite_rejects_1_mod_4():
    with pytest.raises(DomainError):
        check_v3_finite(13)
    assert volvachev_finite(13).v3 is None


def test_v3_limit_family_I():
    lim = check_v3_limit(FAMILY_I, 500)
    assert lim.status is LimitStatus.FAILS and lim.level == 3
    assert all(w.order == 8 and w.norm_is_minus_one for _, w in lim.witnesses)


def test_v3_limit_growing_family():
    lim = check_v3_limit(STAIRCASE, 5000)
    assert lim.status is LimitStatus.HOLDS
    assert all(ok for _, ok in lim.lower_levels_norm_one)


@pytest.mark.parametrize("p", [3, 11, 19, 7])
def test_v3_limit_constant_family_reduces_to_finite(p):
    lim = check_v3_limit([p] * 6, 0)
    holds, w = check_v3_finite(p)
    assert (lim.status is LimitStatus.HOLDS) == holds
    assert lim.witnesses[0][1] == w


def test_v3_limit_fixed_J_is_inconclusive():
    assert check_v3_limit(family_J_spec(4), 3000).status is LimitStatus.INCONCLUSIVE


def test_classify_family_I():
    c = classify_conjugacy(FAMILY_I, 500)
    assert c.kind is Classification.CONJUGATE_FINITE and c.sylow_order == 16
    assert c.label == "CONJUGATE_FINITE(16)"
    assert "bound 500" in c.note


def test_classify_staircase():
    c = classify_conjugacy(STAIRCASE, 5000)
    assert c.kind is Classification.NONCONJUGATE_VOLVACHEV
    assert c.v3_limit.status is LimitStatus.HOLDS


def test_classify_1_mod_4_inconclusive():
    assert classify_conjugacy(FamilySpec(1, 4), 500).kind is Classification.INCONCLUSIVE


def test_classify_at_every_bound_from_the_5th_member():
    # 5th member of I is 59; of the staircase, 1279
    for bound in [59, 60, 100, 250, 1000]:
        assert classify_conjugacy(FAMILY_I, bound).label == "CONJUGATE_FINITE(16)"
    for bound in [1279, 2000, 3583, 5000, 10000]:
        assert classify_conjugacy(STAIRCASE, bound).kind is Classification.NONCONJUGATE_VOLVACHEV


def test_classify_with_cache_matches_cold(tmp_path):
    cache = ResultCache(tmp_path / "c.jsonl")
    cold = classify_conjugacy(FAMILY_I, 300)
    warm1 = classify_conjugacy(FAMILY_I, 300, cache=cache)
    warm2 = classify_conjugacy(FAMILY_I, 300, cache=ResultCache(tmp_path / "c.jsonl"))
    assert cold.rows == warm1.rows == warm2.rows
    assert cold.label == warm2.label


def test_two_part_count_matches_oracle():
    for p in primes_in_ap(3, 4, 60):
        assert len(two_part_elements(p)) == len(oracles.two_elements(p))
