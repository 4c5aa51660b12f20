import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hmlkit.formula import (
    FF,
    TT,
    And,
    Box,
    Diamond,
    Or,
    conj,
    disj,
    enumerate_formulas,
    height,
    labels_of,
    modal_depth,
    neg,
    size,
)

formulas = st.recursive(
    st.sampled_from([TT, FF]),
    lambda sub: st.one_of(
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Diamond, st.sampled_from("ab"), sub),
        st.builds(Box, st.sampled_from("ab"), sub),
    ),
    max_leaves=20,
)


def test_neg_examples():
    p, q = Diamond("a", TT), Box("b", FF)
    assert neg(TT) == FF
    assert neg(FF) == TT
    assert neg(And(p, q)) == Or(neg(p), neg(q))
    assert neg(Or(p, q)) == And(neg(p), neg(q))
    assert neg(Diamond("a", TT)) == Box("a", FF)
    assert neg(Box("a", TT)) == Diamond("a", FF)


@pytest.mark.parametrize(
    "phi, depth",
    [
        (TT, 0),
        (Diamond("a", Box("a", FF)), 2),
        (And(Diamond("a", TT), TT), 1),
        (Or(Box("b", Diamond("a", TT)), Diamond("a", FF)), 2),
    ],
)
def test_modal_depth(phi, depth):
    assert modal_depth(phi) == depth


def test_size_and_height():
    phi = And(Diamond("a", TT), Or(TT, Box("b", FF)))
    assert size(phi) == 7
    assert height(phi) == 4
    assert labels_of(phi) == {"a", "b"}


def test_empty_conjunction_is_true():
    assert conj([]) == TT
    assert disj([]) == FF
    assert conj([TT, FF, TT]) == And(TT, And(FF, TT))


def test_neg_involution_exhaustive_small():
    count = 0
    for phi in enumerate_formulas(["a", "b"], 6):
        assert neg(neg(phi)) == phi
        assert size(neg(phi)) == size(phi)
        assert modal_depth(neg(phi)) == modal_depth(phi)
        count += 1
    assert count > 5000


@settings(max_examples=300)
@given(formulas)
def test_neg_involution_random(phi):
    assert neg(neg(phi)) == phi
    assert modal_depth(neg(phi)) == modal_depth(phi)
    assert size(neg(phi)) == size(phi)


def _brute_force_formulas(labels, max_size):
    """Every formula (not just canonical ones) by direct recursion on size."""
    by_size = {1: [TT, FF]}
    for n in range(2, max_size + 1):
        out = [cls(a, b) for b in by_size[n - 1] for a in labels for cls in (Diamond, Box)]
        for nl in range(1, n - 1):
            for l, r in itertools.product(by_size[nl], by_size[n - 1 - nl]):
                out += [And(l, r), Or(l, r)]
        by_size[n] = out
    return [phi for n in sorted(by_size) for phi in by_size[n]]


def _aci_normal(phi):
    # normal form modulo associativity, commutativity and idempotence of & and |
    t = type(phi)
    if t in (And, Or):
        ops = set()
        stack = [phi]
        while stack:
            x = stack.pop()
            if type(x) is t:
                stack += [x.left, x.right]
            else:
                ops.add(_aci_normal(x))
        if len(ops) == 1:
            return next(iter(ops))
        return (t.__name__, frozenset(ops))
    if t in (Diamond, Box):
        return (t.__name__, phi.label, _aci_normal(phi.body))
    return t.__name__


def test_canonical_enumeration_covers_all_formulas_once():
    labels = ["a"]
    canonical = list(enumerate_formulas(labels, 6))
    keys = [_aci_normal(phi) for phi in canonical]
    assert len(keys) == len(set(keys)), "a formula class was produced twice"
    # each brute-force formula that is not a trivial idempotent repeat has a
    # canonical representative of no larger size
    best = {}
    for phi, k in zip(canonical, keys):
        best.setdefault(k, size(phi))
    for phi in _brute_force_formulas(labels, 6):
        k = _aci_normal(phi)
        assert k in best and best[k] <= size(phi), phi


def test_enumeration_respects_bounds():
    for phi in enumerate_formulas(["a", "b"], 5, max_depth=2):
        assert size(phi) <= 5
        assert modal_depth(phi) <= 2
    sizes = [size(phi) for phi in enumerate_formulas(["a"], 5)]
    assert sizes == sorted(sizes)


def test_deep_formula_helpers():
    phi = TT
    for _ in range(20_000):
        phi = Diamond("a", phi)
    assert modal_depth(phi) == 20_000
    assert height(phi) == 20_001
    assert modal_depth(neg(phi)) == 20_000
