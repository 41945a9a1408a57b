"""Improved correlation cube attack: factor tables, simulated online phase,
key back-substitution and complexity accounting.

Candidate factors have the shape k_p + g(k_{>p}): every factor owns a pivot
bit p that it determines once all higher bits are known.  The default family
(pivots 0..65) is the one used against 820+ rounds.
"""
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, log2

from scipy.stats import binomtest

from .anf import Poly, K, K0, bits, divides
from .trivium import cube_sums, keystream_fast

log = logging.getLogger(__name__)

DEFAULT_P = 0.77
DEFAULT_SAMPLES = 10000


@dataclass(frozen=True)
class Factor:
    name: str
    poly: Poly
    pivot: int

    def __str__(self):
        return "%s = %s" % (self.name, self.poly)


def _pivot(h):
    # lowest key index; must occur only linearly, alone in its monomial
    ks = [b - K0 for b in bits(h.support())]
    p = min(ks)
    lone = 1 << (K0 + p)
    for m in h.terms:
        if m & lone and m != lone:
            raise ValueError("pivot k%d of %s is not linear" % (p, h))
    if lone not in h.terms:
        raise ValueError("no pivot in %s" % h)
    return p


def make_factor(h, name=None):
    if h.is_const() or h.degree() > 2:
        raise ValueError("candidate factors must be non-constant of degree <= 2")
    p = _pivot(h)
    if name is None:
        name = "k%d" % p if h == K(p) else "h%d" % p
    return Factor(name, h, p)


def default_family():
    """k_i + k_{i+25}k_{i+26} + k_{i+27} (0 <= i <= 52), k_53 + k_78k_79 and
    k_i (54 <= i <= 65).  The nonlinear ones are named k_{135-i}."""
    out = []
    for i in range(53):
        out.append(Factor("k%d" % (135 - i), K(i) ^ (K(i + 25) & K(i + 26)) ^ K(i + 27), i))
    out.append(Factor("k82", K(53) ^ (K(78) & K(79)), 53))
    for i in range(54, 66):
        out.append(Factor("k%d" % i, K(i), i))
    return out


def single_bit_family(lo=0, hi=80):
    return [Factor("k%d" % i, K(i), i) for i in range(lo, hi)]


@dataclass
class FactorEntry:
    factor: Factor
    isocs: list
    pr00: float = 0.0
    pr_f1: float = 0.0
    samples: int = 0


@dataclass
class FactorTable:
    T: list = field(default_factory=list)
    T1: list = field(default_factory=list)
    p: float = DEFAULT_P
    seed: int = 0
    rounds: int = 0
    dropped: list = field(default_factory=list)

    def entries(self):
        return self.T + self.T1

    def isocs(self):
        seen = []
        for e in self.entries():
            for I in e.isocs:
                if I not in seen:
                    seen.append(I)
        return seen


# -- bitsliced evaluation of key polynomials over many sampled keys --------

def key_lanes(keys):
    """Bit i of lanes[j] is k_j of keys[i]."""
    lanes = [0] * 80
    for i, k in enumerate(keys):
        for j in range(80):
            if k[j]:
                lanes[j] |= 1 << i
    return lanes


def eval_lanes(p, lanes, full):
    acc = 0
    for m in p.terms:
        v = full
        for b in bits(m):
            v &= lanes[b - K0]
            if not v:
                break
        acc ^= v
    return acc


def random_keys(n, rng):
    return [[rng.getrandbits(1) for _ in range(80)] for _ in range(n)]


def preprocess(superpolys, family=None, p=DEFAULT_P, samples=DEFAULT_SAMPLES, seed=0, rounds=0):
    """superpolys: {isoc: Poly in k}.  Builds T (pr00 > p) and T1."""
    family = default_family() if family is None else list(family)
    if not family:
        raise ValueError("empty candidate family")
    rng = random.Random(seed)
    keys = random_keys(samples, rng)
    lanes = key_lanes(keys)
    full = (1 << samples) - 1
    fvals = {I: eval_lanes(f, lanes, full) for I, f in superpolys.items() if f}
    table = FactorTable(p=p, seed=seed, rounds=rounds)
    for fac in family:
        Th = [I for I, f in superpolys.items() if f and divides(fac.poly, f)]
        if not Th:
            continue
        nz = 0
        for I in Th:
            nz |= fvals[I]
        zero = full & ~nz
        n0 = bin(zero).count("1")
        if n0 == 0:
            log.warning("dropping %s: no sampled key has all superpolys zero", fac.name)
            table.dropped.append(fac.name)
            continue
        hv = eval_lanes(fac.poly, lanes, full)
        pr00 = bin(zero & ~hv).count("1") / n0
        e = FactorEntry(fac, Th, pr00, 1 - n0 / samples, samples)
        (table.T if pr00 > p else table.T1).append(e)
    table.T.sort(key=lambda e: -e.pr00)
    table.T1.sort(key=lambda e: -e.pr00)
    return table


@dataclass
class EquationSets:
    G0: list = field(default_factory=list)    # factors guessed 0
    G1: list = field(default_factory=list)    # factors known to be 1

    def equations(self):
        return [(f, 0) for f in self.G0] + [(f, 1) for f in self.G1]


def guess_equations(table, values):
    """values: {isoc: cube-sum bit}."""
    eq = EquationSets()
    for e in table.T:
        if any(values[I] for I in e.isocs):
            eq.G1.append(e.factor)
        else:
            eq.G0.append(e.factor)
    for e in table.T1:
        if any(values[I] for I in e.isocs):
            eq.G1.append(e.factor)
    return eq


def cube_values(keys, isocs, R, chunk=64):
    """{isoc: [cube sum per key]} from real cube sums."""
    out = {}
    for I in isocs:
        vals = []
        for s in range(0, len(keys), chunk):
            vals += cube_sums(keys[s:s + chunk], I, R)
        out[I] = vals
    return out


def online_simulate(true_key, table, R, values=None):
    if values is None:
        values = {I: v[0] for I, v in cube_values([true_key], table.isocs(), R).items()}
    return guess_equations(table, values)


def key_poly_value(h, key):
    return eval_lanes(h, key_lanes([key]), 1)


@dataclass
class SimResult:
    a: int
    b: int
    e: int
    log2_cost: float
    g1_all_true: bool
    g0_correct: int


def simulate_keys(keys, table, R, cube_count=None, cube_size=None, values=None):
    isocs = table.isocs()
    if values is None:
        values = cube_values(keys, isocs, R)
    cube_count = len(isocs) if cube_count is None else cube_count
    cube_size = max((len(I) for I in isocs), default=0) if cube_size is None else cube_size
    out = []
    for idx, key in enumerate(keys):
        eq = guess_equations(table, {I: values[I][idx] for I in isocs})
        g0_wrong = sum(key_poly_value(f.poly, key) for f in eq.G0)
        g1_ok = all(key_poly_value(f.poly, key) == 1 for f in eq.G1)
        a, b = len(eq.G0), len(eq.G1)
        cost = complexity_estimate(a, b, g0_wrong, cube_count, cube_size)["total"]
        out.append(SimResult(a, b, g0_wrong, cost, g1_ok, a - g0_wrong))
    return out


def proportions(results, thresholds):
    n = len(results)
    return {c: sum(r.log2_cost <= c for r in results) / n for c in thresholds}


# -- key solving -------------------------------------------------------------

def solve_keys(G0, G1, e, check=None, max_candidates=None, fixed=None, start=0):
    """Candidate keys for every choice of at most e flipped G0 equations
    (flip count ascending, then subsets in order, then guesses).  With a
    `check`, only passing keys are yielded.  `fixed` pins known bits."""
    fixed = dict(fixed or {})
    G0, G1 = list(G0), list(G1)
    piv = {}
    for f in G0 + G1:
        if f.pivot in piv:
            raise ValueError("two equations share pivot k%d" % f.pivot)
        piv[f.pivot] = f
    produced = 0
    for w in range(start, e + 1):
        for flip in combinations(range(len(G0)), w):
            flip = set(flip)
            rhs = {f.pivot: 1 for f in G1}
            for i, f in enumerate(G0):
                rhs[f.pivot] = 1 if i in flip else 0
            for key in _back_substitute(piv, rhs, fixed):
                produced += 1
                if check is None or check(key):
                    yield key, w
                if max_candidates is not None and produced >= max_candidates:
                    return


def _back_substitute(piv, rhs, fixed):
    # bits 79 down to 0: pivots are determined, the rest guessed
    order = list(range(79, -1, -1))
    key = [0] * 80

    def rec(pos):
        if pos == 80:
            yield list(key)
            return
        i = order[pos]
        if i in piv:
            f = piv[i]
            # h = k_i + g(higher bits) = rhs
            g = f.poly ^ K(i)
            key[i] = rhs[i] ^ _eval_key(g, key)
            if i in fixed and fixed[i] != key[i]:
                return
            yield from rec(pos + 1)
        elif i in fixed:
            key[i] = fixed[i]
            yield from rec(pos + 1)
        else:
            for v in (0, 1):
                key[i] = v
                yield from rec(pos + 1)
    yield from rec(0)


def _eval_key(p, key):
    r = 0
    for m in p.terms:
        if all(key[b - K0] for b in bits(m)):
            r ^= 1
    return r


def keystream_check(iv, stream, rounds=1152):
    n = len(stream)

    def check(key):
        return keystream_fast(key, iv, n, rounds) == list(stream)
    return check


def recover_key(G0, G1, check, max_e=None, max_candidates=None, fixed=None):
    """Smallest e that yields a passing candidate; returns (key, e)."""
    max_e = len(G0) if max_e is None else max_e
    for e in range(max_e + 1):
        # only the new flip count; smaller ones were already exhausted
        for key, w in solve_keys(G0, G1, e, check, max_candidates, fixed, start=e):
            return key, w
    return None, None


# -- accounting --------------------------------------------------------------

def complexity_estimate(a, b, e, cube_count, cube_size):
    """log2 of both terms of C_k and of their sum."""
    if min(a, b, e) < 0:
        raise ValueError("a, b, e must be >= 0")
    off = log2(cube_count) + cube_size if cube_count > 0 else float("-inf")
    on = 80 - a - b + log2(sum(comb(a, i) for i in range(min(e, a) + 1)))
    hi, lo = max(off, on), min(off, on)
    total = hi + log2(1 + 2 ** (lo - hi)) if lo != float("-inf") else hi
    return {"offline": off, "online": on, "total": total}


def binomial_check(successes, trials, p0, alpha=0.01):
    """Two-sided exact binomial test; True when H0 (rate p0) is kept."""
    if trials < 1 or not 0 < p0 < 1:
        raise ValueError("need trials >= 1 and 0 < p0 < 1")
    return binomtest(successes, trials, p0).pvalue >= alpha


def binomial_pvalue(successes, trials, p0):
    return binomtest(successes, trials, p0).pvalue
