import random

import pytest
from hypothesis import given, settings, strategies as st

from sylowlab import dsl
from sylowlab._arith import valuation
from sylowlab.dsl import (
    AllConjugate,
    And,
    BinOp,
    Budget,
    Congruence,
    GL2Order,
    Int,
    Not,
    Or,
    ParseError,
    SylowOrderEq,
    Unextendable,
    ValuationCmp,
    Var,
    Volvachev,
    evaluate,
    parse,
    to_text,
)
from sylowlab.errors import BudgetExceeded, DomainError
from sylowlab.families import primes_upto
from sylowlab.matrix_group import enumerate_group, gl2_order
from sylowlab.sylow import sentence_all_conjugate, sentence_unextendable, sylow_order
from sylowlab.volvachev import check_v1, check_v2, check_v3_finite

exprs = st.recursive(
    st.one_of(st.just(Var()), st.just(GL2Order()), st.builds(Int, st.integers(-40, 400))),
    lambda sub: st.builds(BinOp, st.sampled_from(["+", "-", "*", "^"]), sub, sub),
    max_leaves=6,
)
ells = st.sampled_from([2, 3, 5, 7])
leaves = st.one_of(
    st.builds(Congruence, exprs, st.integers(-5, 20), st.integers(1, 64)),
    st.builds(ValuationCmp, exprs, ells, st.sampled_from([">=", "<=", "==", "!=", ">", "<"]), st.integers(0, 9)),
    st.builds(SylowOrderEq, ells, st.integers(1, 4096)),
    st.builds(Volvachev, st.sampled_from(["V1", "V2", "V3"])),
    st.builds(Unextendable, ells, st.integers(0, 6)),
    st.builds(AllConjugate, ells, st.integers(0, 6)),
)
statements = st.recursive(
    leaves,
    lambda sub: st.one_of(st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Not, sub)),
    max_leaves=8,
)


def test_parse_examples():
    assert parse("cong(p, 3, 8)") == Congruence(Var(), 3, 8)
    assert isinstance(parse("v2(p+1) >= 4 & volvachev(V2)"), And)
    with pytest.raises(ParseError) as e:
        parse("sylow2(GL2) == 16)")
    assert e.value.position == 17
    assert "position 17" in str(e.value)


def test_eval_examples():
    assert evaluate(parse("sylow2(GL2) == 16"), 11) is True
    assert evaluate(parse("v2(p+1) >= 4"), 31) is True
    assert evaluate(parse("volvachev(V3)"), 11) is False


def test_print_examples():
    assert to_text(parse("cong(p,3,8)")) == "cong(p, 3, 8)"
    assert to_text(parse("cong(p,3,8)&volvachev(V1)|!volvachev(V2)")) == \
        "((cong(p, 3, 8) & volvachev(V1)) | !volvachev(V2))"
    assert to_text(parse("v2( p^2-1 )==3")) == "v2((p ^ 2) - 1) == 3"
    assert to_text(parse("unextendable(p = 2, k = 4)")) == "unextendable(p=2, k=4)"
    assert to_text(parse("v2(|GL2|) >= 4")) == "v2(|GL2|) >= 4"


@settings(max_examples=300)
@given(statements)
def test_round_trip(stmt):
    text = to_text(stmt)
    assert parse(text) == stmt
    assert to_text(parse(text)) == text


def test_twenty_generated_asts_round_trip():
    rng = random.Random(0)
    seen = 0
    for _ in range(20):
        s = _random_stmt(rng, 3)
        assert parse(to_text(s)) == s
        seen += 1
    assert seen == 20


def _random_expr(rng, depth):
    if depth == 0 or rng.random() < 0.4:
        return rng.choice([Var(), GL2Order(), Int(rng.randint(0, 30))])
    return BinOp(rng.choice("+-*^"), _random_expr(rng, depth - 1), _random_expr(rng, depth - 1))


def _random_leaf(rng):
    kind = rng.randrange(6)
    if kind == 0:
        return Congruence(_random_expr(rng, 2), rng.randint(0, 15), rng.choice([4, 8, 16]))
    if kind == 1:
        return ValuationCmp(_random_expr(rng, 2), rng.choice([2, 3]), rng.choice([">=", "==", "<"]), rng.randint(0, 6))
    if kind == 2:
        return SylowOrderEq(rng.choice([2, 3]), rng.choice([8, 16, 32, 3, 9]))
    if kind == 3:
        return Volvachev(rng.choice(["V1", "V2", "V3"]))
    if kind == 4:
        return Unextendable(rng.choice([2, 3]), rng.randint(0, 5))
    return AllConjugate(rng.choice([2, 3]), rng.randint(0, 5))


def _random_stmt(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        return _random_leaf(rng)
    k = rng.randrange(3)
    if k == 0:
        return And(_random_stmt(rng, depth - 1), _random_stmt(rng, depth - 1))
    if k == 1:
        return Or(_random_stmt(rng, depth - 1), _random_stmt(rng, depth - 1))
    return Not(_random_stmt(rng, depth - 1))


def _direct(leaf, p):
    """The same leaf through the module APIs, bypassing the DSL evaluator."""
    if isinstance(leaf, Congruence):
        return dsl.eval_expr(leaf.expr, p) % leaf.modulus == leaf.residue % leaf.modulus
    if isinstance(leaf, ValuationCmp):
        v = valuation(dsl.eval_expr(leaf.expr, p), leaf.base)
        return {">=": v >= leaf.bound, "==": v == leaf.bound, "<": v < leaf.bound}[leaf.cmp]
    if isinstance(leaf, SylowOrderEq):
        return sylow_order(gl2_order(p), leaf.ell) == leaf.value
    if isinstance(leaf, Volvachev):
        if leaf.condition == "V1":
            return check_v1(p) is not None
        if leaf.condition == "V2":
            return check_v2(p)
        return check_v3_finite(p)[0]
    G = enumerate_group(p)
    if isinstance(leaf, Unextendable):
        return sentence_unextendable(G, leaf.ell, leaf.k)
    return sentence_all_conjugate(G, leaf.ell, leaf.k)


def eval_agreement_pairs(n=50, seed=0):
    rng = random.Random(seed)
    small = [3, 7, 11]
    out = []
    while len(out) < n:
        leaf = _random_leaf(rng)
        if isinstance(leaf, (Unextendable, AllConjugate)):
            p = rng.choice(small)
        else:
            p = rng.choice([q for q in primes_upto(300) if q % 4 == 3])
        try:
            dsl.eval_expr(getattr(leaf, "expr", Int(1)), p)
        except DomainError:
            continue
        if isinstance(leaf, ValuationCmp) and dsl.eval_expr(leaf.expr, p) < 1:
            continue
        out.append((leaf, p))
    return out


def test_eval_agrees_with_api_on_50_pairs():
    pairs = eval_agreement_pairs()
    assert len(pairs) == 50
    for leaf, p in pairs:
        assert evaluate(parse(to_text(leaf)), p) == _direct(leaf, p), (to_text(leaf), p)


@pytest.mark.parametrize("text", [
    "", "cong(p, 3)", "cong(p, 3, 8, 1)", "foo(p)", "v2(p+1) >=", "volvachev(V4)",
    "sylow2(GL3) == 16", "(cong(p,3,8)", "cong(p,3,8) &", "unextendable(p=2)", "v2(p+) >= 1",
    "!!", "|GL2", "cong(p, 3, 0)", "v4(p) >= 1", "sylow6(GL2) == 1", "allconj(p=4, k=1)",
    "unextendable(p=2, k=-1)", "§",
])
def test_parse_errors_carry_position(text):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert e.value.position >= 0


@settings(max_examples=300)
@given(st.text(alphabet="pv2()&|!,=<>+-*^0123456789 cong|GL2syloextabdjkV", max_size=40))
def test_parse_never_panics(text):
    try:
        parse(text)
    except ParseError as e:
        assert 0 <= e.position <= len(text)


def test_enumeration_leaves_respect_budget():
    with pytest.raises(BudgetExceeded):
        evaluate(parse("unextendable(p=2, k=4)"), 43, Budget(enumeration_bound=10 ** 6))
    with pytest.raises(BudgetExceeded):
        evaluate(parse("allconj(p=2, k=3)"), 5, Budget(subgroup_budget=3))


def test_oversized_expressions_are_domain_errors():
    with pytest.raises(DomainError):
        evaluate(parse("v2(|GL2| ^ (|GL2| ^ 9)) >= 1"), 7)


def test_negative_literals_round_trip():
    s = parse("cong(p - -3, -1, 8)")
    assert to_text(s) == "cong(p - -3, -1, 8)"
    assert evaluate(s, 11) == ((11 + 3) % 8 == 7)


def test_combinators():
    assert evaluate(parse("!volvachev(V3) & (cong(p, 3, 8) | cong(p, 7, 8))"), 11)
    assert not evaluate(parse("!(sylow2(GL2) == 16)"), 19)


def test_as_property_id_is_canonical_text():
    s = parse("v2(p+1)>=2")
    prop = s.as_property()
    assert prop.property_id == "v2(p + 1) >= 2"
    assert prop(11) is True
