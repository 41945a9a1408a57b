import logging
import random
from itertools import product as iproduct
from math import comb

import pytest
from hypothesis import given, strategies as st

from cubeforge.anf import Poly, ONE, K, parse_poly, divides, evaluate, point_mask
from cubeforge.attack import (Factor, make_factor, default_family, single_bit_family, preprocess,
                              guess_equations, simulate_keys, solve_keys, recover_key,
                              keystream_check, complexity_estimate, binomial_check, key_poly_value,
                              EquationSets, FactorTable, FactorEntry)
from cubeforge.fixtures import load_proportions
from cubeforge.trivium import keystream_fast


def rkey(rng):
    return [rng.getrandbits(1) for _ in range(80)]


def test_default_family_shape():
    fam = default_family()
    assert len(fam) == 66
    assert sorted(f.pivot for f in fam) == list(range(66))
    byname = {f.name: f for f in fam}
    assert byname["k135"].poly == parse_poly("k0+k25k26+k27")
    assert byname["k103"].poly == parse_poly("k32+k57k58+k59")
    assert byname["k82"].poly == parse_poly("k53+k78k79")
    assert byname["k54"].poly == K(54)


def test_make_factor_rules():
    f = make_factor(parse_poly("k4+k9k10"))
    assert f.pivot == 4
    with pytest.raises(ValueError):
        make_factor(parse_poly("k4k5+k9"))
    with pytest.raises(ValueError):
        make_factor(ONE)
    with pytest.raises(ValueError):
        make_factor(parse_poly("k1k2k3+k0"))


def test_preprocess_probabilities_and_gate():
    h = K(3)
    sp = {(1, 2): h & K(7), (4, 5): h & (K(7) ^ K(8) ^ ONE), (6, 7): K(9) & K(10)}
    fam = [make_factor(h), make_factor(K(9)), make_factor(K(11))]
    t = preprocess(sp, fam, p=0.77, samples=10000, seed=1)
    for e in t.entries():
        for I in e.isocs:
            assert divides(e.factor.poly, sp[I])
    by = {e.factor.name: e for e in t.entries()}
    assert "k11" not in by
    # exact: Pr(k3=0 | both zero) = (1/2) / Pr(k3=0 or k7=0 and k7+k8=1)
    num = den = 0
    for k3, k7, k8 in iproduct((0, 1), repeat=3):
        z = (k3 & k7) == 0 and (k3 & (k7 ^ k8 ^ 1)) == 0
        den += z
        num += z and k3 == 0
    assert abs(by["k3"].pr00 - num / den) < 0.02
    assert by["k3"] in t.T and by["k9"] in t.T1          # 4/5 vs 2/3
    assert abs(by["k9"].pr00 - 2 / 3) < 0.02


def test_preprocess_drops_degenerate(caplog):
    h = K(0)
    sp = {(1,): h, (2,): h & (K(1) ^ ONE)}
    for seed in range(200):
        with caplog.at_level(logging.WARNING):
            t = preprocess(sp, [make_factor(h)], samples=3, seed=seed)
        if t.dropped:
            break
    assert t.dropped == ["k0"] and not t.entries()
    assert "dropping" in caplog.text


def test_guess_rules():
    f1, f2 = make_factor(K(1)), make_factor(K(2))
    t = FactorTable(T=[FactorEntry(f1, [(1,), (2,)], 0.9)], T1=[FactorEntry(f2, [(3,)], 0.6)])
    eq = guess_equations(t, {(1,): 0, (2,): 0, (3,): 0})
    assert eq.G0 == [f1] and eq.G1 == []
    eq = guess_equations(t, {(1,): 0, (2,): 1, (3,): 1})
    assert eq.G0 == [] and eq.G1 == [f1, f2]


def test_first_case_certainty_on_exact_superpolys():
    rng = random.Random(2)
    fam = default_family()
    sp = {}
    for n in range(30):
        h = rng.choice(fam).poly
        q = parse_poly("k%d+k%dk%d" % tuple(rng.sample(range(80), 3)))
        sp[(n,)] = h & q
    t = preprocess(sp, fam, samples=4000, seed=3)
    keys = [rkey(rng) for _ in range(200)]
    vals = {I: [evaluate(f, point_mask(k=k)) for k in keys] for I, f in sp.items()}
    res = simulate_keys(keys, t, 0, 10, 10, values=vals)
    assert all(r.g1_all_true for r in res)


def full_equations(key, wrong=()):
    fam = default_family() + single_bit_family(66, 80)
    G0, G1 = [], []
    for f in fam:
        v = key_poly_value(f.poly, key)
        if f.pivot in wrong:
            assert v == 1
            G0.append(f)
        elif v:
            G1.append(f)
        else:
            G0.append(f)
    return G0, G1


def test_full_constraint_unique():
    key = rkey(random.Random(5))
    G0, G1 = full_equations(key)
    cands = list(solve_keys(G0, G1, 0))
    assert cands == [(key, 0)]


def test_back_substitution_deterministic():
    rng = random.Random(6)
    for _ in range(5):
        key = rkey(rng)
        G0, G1 = full_equations(key)
        piv = {f.pivot for f in G0 + G1}
        sub0 = [f for f in G0 if f.pivot < 40]
        sub1 = [f for f in G1 if f.pivot < 40]
        fixed = {i: key[i] for i in range(80) if i >= 40}
        assert [k for k, _ in solve_keys(sub0, sub1, 0, fixed=fixed)] == [key]


def test_planted_two_wrong():
    rng = random.Random(7)
    key = rkey(rng)
    ones = [f.pivot for f in default_family() if key_poly_value(f.poly, key)]
    wrong = rng.sample(ones, 2)
    G0, G1 = full_equations(key, wrong)
    iv = rkey(rng)
    check = keystream_check(iv, keystream_fast(key, iv, 160))
    got, e = recover_key(G0, G1, check)
    assert got == key and e == 2
    assert not [k for k, _ in solve_keys(G0, G1, 1, check)]


@given(st.integers(0, 10 ** 6), st.integers(0, 2))
def test_candidate_stream_complete(seed, w):
    rng = random.Random(seed)
    key = rkey(rng)
    fam = default_family()
    ones = [f.pivot for f in fam if key_poly_value(f.poly, key)]
    wrong = rng.sample(ones, min(w, len(ones)))
    G0, G1 = full_equations(key, wrong)
    stream = [k for k, _ in solve_keys(G0, G1, len(wrong))]
    assert key in stream


def test_empty_equations_cap():
    cands = list(solve_keys([], [], 0, max_candidates=16))
    assert len(cands) == 16 and len({tuple(k) for k, _ in cands}) == 16


def test_complexity_examples():
    c = complexity_estimate(0, 0, 0, 2 ** 13, 38)
    assert c["offline"] == 51 and c["online"] == 80 and abs(c["total"] - 80) < 1e-6
    c = complexity_estimate(30, 31, 0, 2 ** 13, 38)
    assert c["online"] == 19 and abs(c["total"] - 51) < 1e-6
    c = complexity_estimate(30, 31, 2, 2 ** 13, 38)
    assert abs(2 ** c["online"] - 2 ** 19 * (1 + 30 + comb(30, 2))) < 1e-3
    with pytest.raises(ValueError):
        complexity_estimate(-1, 0, 0, 1, 1)


def test_binomial_examples():
    assert binomial_check(5000, 10000, 0.5)
    assert not binomial_check(0, 10000, 0.5)
    assert binomial_check(5732, 10000, 0.58)
    with pytest.raises(ValueError):
        binomial_check(1, 0, 0.5)


def test_binomial_fixture_rows():
    rows = load_proportions()
    assert rows
    for R, c, p, n in rows:
        assert binomial_check(n, 10000, p), (R, c, p, n)
