import random

import pytest
from hypothesis import given, strategies as st

from cubeforge.anf import Poly, ZERO, ONE, X, K, parse_poly, compose, product, evaluate, point_mask
from cubeforge.trails import (build_graph, graph_from_polys, count_trails_parity, sweep, PropGraph,
                              superpoly_direct, obtain_valuable_terms, EnumerationBudgetExceeded,
                              TriviumRound, OutputLayer)
from cubeforge.trivium import cube_sums, symbolic_state, cube_assignment, zpoly, N_STATE, FEEDBACK
from cubeforge.varsub import coefficient_recovery, extract_substitution, expand_z

from cases import sample_cube


def rpoly(rng, nvars, nterms, maxdeg=3):
    ts = []
    for _ in range(nterms):
        ts.append(product([X(i) for i in rng.sample(range(nvars), rng.randint(0, min(maxdeg, nvars)))]))
    return sum(ts, ZERO)


def test_graph_shapes():
    g = build_graph(7, 7)
    assert g.depth == 1 and isinstance(g.layers[0], OutputLayer)
    g = build_graph(8, 7)
    assert g.depth == 2 and isinstance(g.layers[0], TriviumRound)
    with pytest.raises(ValueError):
        build_graph(3, 5)


def test_one_round_layer_by_inspection():
    rnd = build_graph(1, 0).layers[0]
    # shifted cells have one predecessor; the three new bits have four
    for (n, (l1, l2)) in FEEDBACK:
        dst = (n + 1) % N_STATE
        want = sorted([1 << l1, 1 << n, 1 << l2, (1 << (n - 1)) | (1 << (n - 2))])
        assert sorted(rnd.outputs[dst]) == want
    assert rnd.outputs[5] == [1 << 4]
    # fast path agrees with the generic product rule
    rng = random.Random(0)
    for _ in range(50):
        Q = sum(1 << i for i in rng.sample(range(N_STATE), 4))
        generic = [0]
        for i in range(N_STATE):
            if Q >> i & 1:
                generic = [a | m for a in generic for m in rnd.outputs[i]]
        assert sorted(rnd.preimages(Q)) == sorted(generic)


def test_identity_and_no_path():
    g = graph_from_polys([[X(0), X(1), X(2)]], 3)
    assert count_trails_parity(g, 0b101, 0b101) == (1, 1)
    g = graph_from_polys([[X(0) & X(1)]], 3)
    assert count_trails_parity(g, 0b100, 0b1) == (0, 0)


def test_parity_equals_coefficient_six_vars():
    rng = random.Random(1)
    g1 = [rpoly(rng, 6, 4) for _ in range(4)]
    f = rpoly(rng, 4, 5)
    comp = compose(f, g1)
    g = graph_from_polys([g1, [f]], 6)
    for u in range(1 << 6):
        par, _ = count_trails_parity(g, u, 1)
        assert par == (u in comp.terms), u


@given(st.integers(0, 10 ** 9))
def test_parity_soundness_random(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    m = rng.randint(1, 7)
    g1 = [rpoly(rng, n, rng.randint(1, 4)) for _ in range(m)]
    f = rpoly(rng, m, rng.randint(1, 4))
    comp = compose(f, g1)
    g = graph_from_polys([g1, [f]], n)
    tab = sweep(g, 1, 0, parity=True)
    assert set(tab) == set(comp.terms)


def test_trail_count_composition_five_layers():
    rng = random.Random(2)
    n = 5
    layers = [[rpoly(rng, n, 3, 2) for _ in range(n)] for _ in range(4)]
    layers.append([rpoly(rng, n, 4, 2)])
    g = graph_from_polys(layers, n)
    for mid in range(1, 5):
        upper = sweep(g, 1, mid, parity=False)
        lower = PropGraph(g.layers[:mid])
        for u in range(1 << n):
            total = count_trails_parity(g, u, 1)[1]
            split = sum(c * count_trails_parity(lower, u, P)[1] for P, c in upper.items())
            assert total == split


def test_budget():
    with pytest.raises(EnumerationBudgetExceeded):
        superpoly_direct([17, 56, 67, 68, 69], 450, budget=100)


def test_superpoly_round_zero():
    assert superpoly_direct([68], 0) == ONE
    assert superpoly_direct([], 0) == K(65) ^ ONE


def test_superpoly_direct_vs_symbolic():
    rng = random.Random(3)
    for _ in range(4):
        I = sorted(rng.sample(range(80), 4))
        R = rng.randint(60, 160)
        z = symbolic_state(R, cube_assignment(I))
        u = sum(1 << i for i in I)
        coe = Poly(frozenset(m & ~u for m in zpoly(z).terms if m & ((1 << 80) - 1) == u))
        assert superpoly_direct(I, R) == coe


def test_superpoly_direct_matches_cube_sums_430():
    rng = random.Random(430)
    for _ in range(6):
        I = sample_cube(430, 8, rng)
        f = superpoly_direct(I, 430)
        if f:
            break
    assert f
    keys = [[rng.getrandbits(1) for _ in range(80)] for _ in range(200)]
    want = cube_sums(keys, I, 430)
    assert [evaluate(f, point_mask(k=k)) for k in keys] == want


def test_valuable_terms_one_step():
    I = [1, 2, 3]
    R = 60
    state = symbolic_state(R - 1, cube_assignment(I))
    vt = obtain_valuable_terms(I, R - 1, R, state)
    # z after one more round: every valuable term is a single cell or a pair
    # from the one-step pre-image of the output taps
    pre = set()
    from cubeforge.trails import trivium_round
    for t in (65, 92, 161, 176, 242, 287):
        pre.update(trivium_round().preimages(1 << t))
    assert set(vt) <= pre


def test_valuable_terms_decomposition():
    rng = random.Random(4)
    nonzero = 0
    for _ in range(4):
        R = rng.randint(250, 400)
        I = sample_cube(R, 6, rng, lo=3)
        r_m = R // 2
        state = symbolic_state(r_m, cube_assignment(I))
        vt = obtain_valuable_terms(I, r_m, R, state)
        g, zmap = extract_substitution(state, r_m)
        u = sum(1 << i for i in I)
        acc = Poly(frozenset())
        for t in vt:
            acc = acc ^ coefficient_recovery(u, t, g)
        f = superpoly_direct(I, R)
        assert expand_z(acc, zmap) == f
        nonzero += bool(f)
    assert nonzero >= 2


def test_vt_rejects_bad_rm():
    with pytest.raises(ValueError):
        obtain_valuable_terms([1], 10, 10)
