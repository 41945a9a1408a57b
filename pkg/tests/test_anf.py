import random

import pytest
from hypothesis import given, strategies as st, assume

from cubeforge.anf import (Poly, ZERO, ONE, X, K, Z, NEG_INF, mul, add, compose, restrict, evaluate,
                           vector_degree, degree_from_vdeg, divides, quotient_witness, format_poly,
                           parse_poly, point_mask, product)

from oracle import anf_masks


def polys(nvars=6, space="x", max_terms=8):
    mono = st.sets(st.integers(0, nvars - 1), max_size=nvars).map(
        lambda s: product([Poly.var("%s%d" % (space, i)) for i in s]))
    return st.lists(mono, max_size=max_terms).map(lambda ms: sum(ms, ZERO))


def test_mul_idempotent_variable():
    assert mul(X(0), X(0)) == X(0)


def test_compose_example():
    f = X(0) & X(1)
    g = [(X(0) & X(2)) ^ X(1), (X(0) & X(1)) ^ X(3)]
    want = parse_poly("x0x1x2+x0x1+x0x2x3+x1x3")
    assert compose(f, g) == want


def test_compose_arity():
    with pytest.raises(ValueError):
        compose(X(0) & X(3), [X(1)])


def test_restrict_example():
    p = K(65) ^ X(68) ^ ONE
    assert restrict(p, {"x68": 0}) == K(65) ^ ONE
    assert restrict(p, {"x68": 1}) == K(65)


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a ^ b) ^ c == a ^ (b ^ c)
    assert a ^ b == b ^ a
    assert a ^ a == ZERO
    assert a & (b ^ c) == (a & b) ^ (a & c)
    assert (a & b) & c == a & (b & c)
    assert a & ONE == a and a & ZERO == ZERO
    assert a & a == a          # Boolean ring


@given(polys(), st.integers(0, 63))
def test_add_is_pointwise_xor(a, pt):
    b = parse_poly("x0x1+x3+1")
    assert evaluate(add(a, b), pt) == evaluate(a, pt) ^ evaluate(b, pt)
    assert evaluate(mul(a, b), pt) == evaluate(a, pt) & evaluate(b, pt)


def test_vector_degree_examples():
    p = parse_poly("x0x1x2+x0x1+x0x2x3+x1x3")
    v = vector_degree(p, ["x0", "x1"])
    assert v == (NEG_INF, 2, 1, 1)
    assert degree_from_vdeg(v) == 3
    assert vector_degree(p, []) == (3,)
    assert vector_degree(ZERO, ["x0", "x2"]) == (NEG_INF,) * 4
    assert degree_from_vdeg((NEG_INF,) * 4) == NEG_INF
    assert degree_from_vdeg((5,)) == 5


@given(polys(7), st.sets(st.integers(0, 6), max_size=4))
def test_vdeg_identity(p, J):
    v = vector_degree(p, ["x%d" % j for j in sorted(J)])
    assert degree_from_vdeg(v) == p.degree()


def test_divides_examples():
    assert divides(X(0), parse_poly("x0x1+x0"))
    assert not divides(X(0), X(1))
    h = K(53) ^ (K(78) & K(79))
    assert divides(h, h & (K(2) ^ (K(5) & K(6))))
    with pytest.raises(ZeroDivisionError):
        divides(ZERO, X(0))


def _tt(p, n):
    return [evaluate(p, pt) for pt in range(1 << n)]


@given(polys(5, max_terms=5), polys(5, max_terms=5))
def test_divides_is_vanishing_containment(h, f):
    assume(h)
    th, tf = _tt(h, 5), _tt(f, 5)
    vanish = all(not b for a, b in zip(th, tf) if not a)
    assert divides(h, f) == vanish


def test_divides_truth_table_20_vars():
    rng = random.Random(4)
    n = 20
    for _ in range(3):
        h = parse_poly("x%d+x%dx%d" % tuple(rng.sample(range(n), 3)))
        q = parse_poly("+".join("x%dx%d" % tuple(rng.sample(range(n), 2)) for _ in range(3)))
        f = h & q if rng.random() < 0.5 else q
        th, tf = _tt(h, n), _tt(f, n)
        vanish = all(not b for a, b in zip(th, tf) if not a)
        assert divides(h, f) == vanish


@given(polys(5, max_terms=5), polys(5, max_terms=5))
def test_quotient_witness(h, q):
    assume(h)
    f = h & q
    w = quotient_witness(h, f)
    assert h & w == f


@given(polys(4, max_terms=5), st.lists(polys(6, max_terms=4), min_size=4, max_size=4),
       st.integers(0, 63))
def test_compose_agrees_with_evaluate(f, g, pt):
    inner = sum(evaluate(gi, pt) << i for i, gi in enumerate(g))
    assert evaluate(compose(f, g), pt) == evaluate(f, inner)


def test_compose_agrees_with_evaluate_many_points():
    rng = random.Random(9)
    f = parse_poly("x0x1+x2+x1x2x3+1")
    g = [parse_poly(s) for s in ("x0x2+x1", "x0x1+x3+k4", "k1k2+x5", "x4x5x6+k0")]
    fg = compose(f, g)
    for _ in range(1000):
        x = [rng.getrandbits(1) for _ in range(7)]
        k = [rng.getrandbits(1) for _ in range(5)]
        pt = point_mask(x=x, k=k)
        inner = sum(evaluate(gi, pt) << i for i, gi in enumerate(g))
        assert evaluate(fg, pt) == evaluate(f, inner)


@given(polys(6, "k") , polys(4, "z"), polys(3))
def test_text_roundtrip(a, b, c):
    p = a ^ (b & c)
    assert parse_poly(format_poly(p)) == p
    assert format_poly(parse_poly(format_poly(p))) == format_poly(p)


def test_text_format():
    assert format_poly(ZERO) == "0"
    assert format_poly(ONE) == "1"
    assert format_poly(parse_poly("k7+z3x1+1")) == "1+k7+x1z3"
    with pytest.raises(ValueError):
        parse_poly("k7+y3")


def test_anf_of_truth_table_matches_poly():
    p = parse_poly("x0x1x2+x0x1+x0x2x3+x1x3")
    masks = anf_masks(lambda pt: evaluate(p, pt), 4)
    assert {m for m in p.terms} == masks
