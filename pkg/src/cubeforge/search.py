"""Search for good ISoCs (estimated degree below a threshold).

Candidates are enumerated in lexicographic order.  Whenever a candidate is
bad, a random shrink loop looks for a small bad core K; since the estimate
is monotone in the ISoC for a fixed vector index set, every superset of K
is bad too and is skipped.  Witnesses live in a trie.
"""
import random
from dataclasses import dataclass, field
from math import comb

from .degree import estimate_trivium


@dataclass
class SearchSpace:
    k: int
    J: tuple = ()
    positions: tuple = tuple(range(80))   # toy mode: a subset of IV bits
    excluded: list = field(default_factory=list)

    def __post_init__(self):
        self.J = tuple(sorted(set(self.J)))
        self.positions = tuple(sorted(set(self.positions)))
        if not set(self.J) <= set(self.positions):
            raise ValueError("J must lie inside the allowed positions")
        if len(self.J) > self.k:
            raise ValueError("|J| exceeds the cube size")

    @property
    def free(self):
        js = set(self.J)
        return [p for p in self.positions if p not in js]

    def size(self):
        return comb(len(self.free), self.k - len(self.J))


class WitnessTrie:
    """Sets of free indices; answers 'does S contain some stored set'."""

    def __init__(self):
        self.root = {}
        self.n = 0

    def add(self, w):
        node = self.root
        for e in sorted(w):
            node = node.setdefault(e, {})
        node[None] = True
        self.n += 1

    def covers(self, s):
        s = sorted(s)

        def walk(node, start):
            if None in node:
                return True
            for i in range(start, len(s)):
                nxt = node.get(s[i])
                if nxt is not None and walk(nxt, i + 1):
                    return True
            return False
        return walk(self.root, 0)

    def __len__(self):
        return self.n


class CountingEstimator:
    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, I):
        self.calls += 1
        return self.fn(tuple(sorted(I)))


def trivium_estimator(R, J, mode=3):
    J = tuple(sorted(J))
    return CountingEstimator(lambda I: estimate_trivium(I, J, R, mode))


@dataclass
class GoodSet:
    isocs: list = field(default_factory=list)    # (isoc, estimate)
    witnesses: list = field(default_factory=list)
    calls: int = 0
    seed: int = 0

    def as_set(self):
        return {tuple(i) for i, _ in self.isocs}


def prune_witness(I, J, d, a, estimate, rng):
    """Shrink a bad ISoC: drop a random index of I - J; keep the smaller set
    whenever it is still bad; give up after `a` failed drops in a row."""
    I = sorted(I)
    js = set(J)
    fails = 0
    while fails < a:
        rest = [i for i in I if i not in js]
        if not rest:
            break
        i = rng.choice(rest)
        cand = [x for x in I if x != i]
        if estimate(cand) >= d:
            I = cand
            fails = 0
        else:
            fails += 1
    return tuple(I)


def _combos(items, r, trie, prefix=()):
    # lexicographic; a prefix that already covers a witness is skipped whole
    if trie.covers(prefix):
        return
    if r == 0:
        yield prefix
        return
    for idx in range(len(items) - r + 1):
        yield from _combos(items[idx + 1:], r - 1, trie, prefix + (items[idx],))


def search(space, d, a, estimate, seed=0, shard=None, limit=None):
    """Good ISoCs of `space` under `estimate` (called with a sorted tuple).
    shard=(i, m) keeps candidates whose first free index is the i-th mod m;
    `limit` stops after that many good ISoCs."""
    J = space.J
    if d <= len(J):
        raise ValueError("need d > |J|")
    if a < 1:
        raise ValueError("need a >= 1")
    rng = random.Random(seed)
    out = GoodSet(seed=seed)
    trie = WitnessTrie()
    for w in space.excluded:
        trie.add(set(w) - set(J))
    free = space.free
    start = getattr(estimate, "calls", 0)
    for extra in _combos(free, space.k - len(J), trie):
        if shard is not None and extra and free.index(extra[0]) % shard[1] != shard[0]:
            continue
        if trie.covers(extra):
            continue
        I = tuple(sorted(J + extra))
        e = estimate(I)
        if e < d:
            out.isocs.append((I, e))
            if limit is not None and len(out.isocs) >= limit:
                break
            continue
        K = prune_witness(I, J, d, a, estimate, rng)
        out.witnesses.append(K)
        trie.add(set(K) - set(J))
    out.calls = getattr(estimate, "calls", 0) - start
    return out


def exhaustive(space, d, estimate):
    """Classify every candidate; the reference answer for toy spaces."""
    good = set()
    J = space.J
    for extra in _combos(space.free, space.k - len(J), WitnessTrie()):
        I = tuple(sorted(J + extra))
        if estimate(I) < d:
            good.add(I)
    return good
