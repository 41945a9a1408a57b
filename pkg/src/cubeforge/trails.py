"""Monomial trails through layered Copy/And/Xor graphs.

A layer maps an input pattern space to an output pattern space; every
output bit is an XOR of And-monomials over the inputs.  A trail step from
an output pattern Q picks one monomial per bit of Q, and the union of the
picks (Copy) is the input pattern.  Distinct pick tuples are distinct
trails, so counting preimage lists counts trails.

Counting runs backward from the sink with one table per layer, which is
the memo keyed by (layer, pattern).  Parity mode keeps only odd entries.
"""
from dataclasses import dataclass, field

from .anf import NEG_INF, XMASK, K0, bits, Poly
from .trivium import FEEDBACK, OUT_TAPS, IV_OFF, N_STATE

DEFAULT_NODE_BUDGET = 10 ** 9


class EnumerationBudgetExceeded(RuntimeError):
    pass


class AnfLayer:
    """Generic layer: outputs[i] is a list of input-position masks."""

    def __init__(self, outputs, n_in):
        self.outputs = [list(o) for o in outputs]
        self.n_in = n_in
        self.n_out = len(self.outputs)

    def preimages(self, Q):
        acc = [0]
        for i in bits(Q):
            terms = self.outputs[i]
            acc = [a | m for a in acc for m in terms]
            if not acc:
                break
        return acc


def _trivium_outputs():
    outs = [[1 << ((i - 1) % N_STATE)] for i in range(N_STATE)]
    # after the rotation, the register writes land one position further on
    for (n, (l1, l2)) in FEEDBACK:
        dst = (n + 1) % N_STATE
        outs[dst] = [1 << l1, 1 << n, 1 << l2, (1 << (n - 1)) | (1 << (n - 2))]
    return outs


class TriviumRound(AnfLayer):
    """One round as a layer; preimages() uses a shift fast path."""

    def __init__(self):
        super().__init__(_trivium_outputs(), N_STATE)
        self.fb = [((n + 1) % N_STATE, self.outputs[(n + 1) % N_STATE]) for n, _ in FEEDBACK]
        self.newmask = sum(1 << p for p, _ in self.fb)
        self.full = (1 << N_STATE) - 1

    def preimages(self, Q):
        acc = [(Q & ~self.newmask & self.full) >> 1]
        for p, terms in self.fb:
            if Q >> p & 1:
                acc = [a | m for a in acc for m in terms]
        return acc


class OutputLayer(AnfLayer):
    def __init__(self):
        super().__init__([[1 << i for i in OUT_TAPS]], N_STATE)


_ROUND = None


def trivium_round():
    global _ROUND
    if _ROUND is None:
        _ROUND = TriviumRound()
    return _ROUND


@dataclass
class PropGraph:
    layers: list
    r_start: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def depth(self):
        return len(self.layers)


def build_graph(R, r_start=0):
    """Source layer: state after r_start rounds.  Sink: z after R rounds."""
    if not 0 <= r_start <= R:
        raise ValueError("need 0 <= r_start <= R")
    rnd = trivium_round()
    return PropGraph([rnd] * (R - r_start) + [OutputLayer()], r_start)


def graph_from_polys(layers_polys, n_in):
    """Toy graphs: each layer a list of Polys over x0..x_{n-1} (positions)."""
    layers = []
    for polys in layers_polys:
        outs = []
        for p in polys:
            if p.support() & ~XMASK:
                raise ValueError("layer polynomials must use x positions only")
            outs.append(sorted(p.terms))
        layers.append(AnfLayer(outs, n_in))
        n_in = len(polys)
    return PropGraph(layers)


def sweep(g, sink, stop=0, parity=True, prune=None, budget=DEFAULT_NODE_BUDGET, blocked=None):
    """Walk from `sink` (pattern or {pattern: count} at the last layer) down
    to layer index `stop`.  Returns {pattern: count} at that layer; counts are
    mod 2 (value 1) in parity mode.  prune(layer, P) -> True drops P.
    Patterns in blocked[layer] are not expanded."""
    if isinstance(sink, int):
        cur = {sink: 1}
    else:
        cur = dict(sink)
    visited = 0
    for li in range(g.depth - 1, stop - 1, -1):
        layer = g.layers[li]
        nxt = {}
        for Q in sorted(cur):
            c = cur[Q]
            if blocked is not None and Q in blocked.get(li + 1, ()):
                continue
            for P in layer.preimages(Q):
                visited += 1
                nxt[P] = nxt.get(P, 0) + c
            if visited > budget:
                raise EnumerationBudgetExceeded("visited %d nodes" % visited)
        if parity:
            cur = {P: 1 for P, v in nxt.items() if v & 1}
        else:
            cur = {P: v for P, v in nxt.items() if v}
        if prune is not None:
            cur = {P: v for P, v in cur.items() if not prune(li, P)}
    return cur


def count_trails_parity(g, source, sink, budget=DEFAULT_NODE_BUDGET):
    """(parity, count) of trails source -> sink through all layers of g."""
    tab = sweep(g, sink, 0, parity=False, budget=budget)
    c = tab.get(source, 0)
    return c & 1, c


# -- degree / support bounds for pruning -------------------------------------

def _forward_bounds(D0, S0, rounds):
    """Numeric-mapping degree bounds and x-support masks per layer."""
    D, S = list(D0), list(S0)
    Ds, Ss = [tuple(D)], [tuple(S)]
    for _ in range(rounds):
        nd, ns = {}, {}
        for (n, (l1, l2)) in FEEDBACK:
            dst = (n + 1) % N_STATE
            nd[dst] = max(D[l1], D[n], D[l2], D[n - 1] + D[n - 2])
            ns[dst] = S[l1] | S[n] | S[l2] | S[n - 1] | S[n - 2]
        D = [D[-1]] + D[:-1]
        S = [S[-1]] + S[:-1]
        for p in nd:
            D[p] = nd[p]
            S[p] = ns[p]
        Ds.append(tuple(D))
        Ss.append(tuple(S))
    return Ds, Ss


def make_pruner(Ds, Ss, need, umask, first_layer=0):
    """prune(li, P): P sits at layer index li of a graph whose layer 0 is
    round `first_layer`; drop it if its degree bound is below `need` or its
    support misses part of the cube."""
    def prune(li, P):
        D = Ds[li]
        S = Ss[li]
        tot = 0
        sup = 0
        m = P
        while m:
            low = m & -m
            j = low.bit_length() - 1
            tot += D[j]
            sup |= S[j]
            m ^= low
        return tot < need or (sup & umask) != umask
    return prune


def _cube_mask(isoc):
    isoc = sorted(set(isoc))
    if isoc and (isoc[0] < 0 or isoc[-1] >= 80):
        raise ValueError("ISoC indices must lie in [0, 80)")
    return isoc, sum(1 << i for i in isoc)


def initial_bounds(isoc):
    """Exact degrees (in cube x) and supports of the loaded state."""
    isoc = set(isoc)
    D = [NEG_INF] * N_STATE
    S = [0] * N_STATE
    for i in range(80):
        D[i] = 0
        if i in isoc:
            D[IV_OFF + i] = 1
            S[IV_OFF + i] = 1 << i
    D[285] = D[286] = D[287] = 0
    return D, S


def superpoly_direct(isoc, R, budget=DEFAULT_NODE_BUDGET):
    """Superpoly of the cube (non-cube IVs 0) by trail parity from round 0."""
    isoc, u = _cube_mask(isoc)
    D0, S0 = initial_bounds(isoc)
    Ds, Ss = _forward_bounds(D0, S0, R)
    prune = make_pruner(Ds, Ss, len(isoc), u)
    g = build_graph(R, 0)
    # the output layer sits at index R; patterns there are over z only
    top = sweep(g, 1, R, parity=True, budget=budget)
    tab = sweep(PropGraph(g.layers[:R]), top, 0, parity=True, prune=prune, budget=budget)
    xu = sum(1 << (IV_OFF + i) for i in isoc)
    ivmask = XMASK << IV_OFF
    keymask = (1 << 80) - 1
    zero = sum(1 << j for j in range(N_STATE) if D0[j] == NEG_INF)
    out = set()
    for P in tab:
        if P & ivmask != xu or P & zero:
            continue
        # constant-1 cells (285..287) drop out; zero cells were pruned
        out ^= {(P & keymask) << K0}
    return Poly(frozenset(out))


def middle_sweep(isoc, r_m, R, state, budget=DEFAULT_NODE_BUDGET):
    """Odd-parity patterns at round r_m reaching z at round R, pruned with
    exact degrees of the round-r_m cells."""
    isoc, u = _cube_mask(isoc)
    D0 = [c.degree(over=u) if c.terms else NEG_INF for c in state]
    S0 = [c.support() & u for c in state]
    Ds, Ss = _forward_bounds(D0, S0, R - r_m)
    prune = make_pruner(Ds, Ss, len(isoc), u)
    g = build_graph(R, r_m)
    top = sweep(g, 1, R - r_m, parity=True, budget=budget)
    return sweep(PropGraph(g.layers[:R - r_m]), top, 0, parity=True, prune=prune, budget=budget)


def reachable_from_cube(term, xparts, u):
    """Some choice of one monomial per factor has x-parts OR-ing to u."""
    acc = {0}
    for j in bits(term):
        opts = xparts[j]
        if not opts:
            return False
        acc = {a | o for a in acc for o in opts if (a | o) & ~u == 0}
        if not acc:
            return False
    return u in acc


def obtain_valuable_terms(u, r_m, R, state=None, budget=DEFAULT_NODE_BUDGET):
    """Valuable terms at round r_m for cube monomial u (list of indices or
    x-mask).  `state` is the round-r_m symbolic state with the cube symbolic
    and other IVs 0; computed if not given."""
    if not 0 < r_m < R:
        raise ValueError("need 0 < r_m < R")
    isoc = bits(u) if isinstance(u, int) else sorted(u)
    _, um = _cube_mask(isoc)
    if state is None:
        from .trivium import symbolic_state, cube_assignment
        state = symbolic_state(r_m, cube_assignment(isoc))
    cand = middle_sweep(isoc, r_m, R, state, budget)
    xparts = [{m & XMASK for m in c.terms} for c in state]
    return frozenset(P for P in cand if reachable_from_cube(P, xparts, um))
