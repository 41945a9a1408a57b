"""Numeric mapping and vector numeric mapping degree bounds.

Vector degrees are float arrays with -inf as the zero-polynomial sentinel
(it absorbs under +, and max/min treat it as the bottom element).
"""
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .anf import NEG_INF, XMASK, bits, popcount
from .trivium import FEEDBACK, OUT_TAPS, REG_LEN, IV_OFF, N_STATE

J_CAP = 13


def _clean(x):
    x = float(x)
    return NEG_INF if x == NEG_INF else int(x)


def _tuple(arr):
    return tuple(_clean(v) for v in arr)


def numeric_deg(f, d):
    """DEG(f, d): max over monomials of the summed per-variable degrees."""
    if not f.terms:
        return NEG_INF
    best = NEG_INF
    for m in f.terms:
        if m & ~XMASK:
            raise ValueError("numeric_deg: f must use x-variables only")
        s = 0
        for i in bits(m):
            s += d[i]
        best = max(best, s)
    return _clean(best)


@lru_cache(maxsize=None)
def _conv_plan(d):
    # Ternary digit per index bit: 0 -> (a0, b0), 1 -> (a1, b either),
    # 2 -> (a0, b1).  Every j1|j2 == j pair is covered by some pattern.
    n3 = 3 ** d
    dig = np.zeros((n3, d), dtype=np.int64)
    for k in range(d):
        dig[:, k] = (np.arange(n3) // 3 ** (d - 1 - k)) % 3
    w2 = 2 ** np.arange(d - 1, -1, -1)
    w3 = 3 ** np.arange(d - 1, -1, -1)
    ia = ((dig == 1) * w2).sum(axis=1)
    bt = np.where(dig == 0, 0, np.where(dig == 1, 2, 1))
    ib = (bt * w3).sum(axis=1)
    jj = ((dig > 0) * w2).sum(axis=1)
    order = np.argsort(jj, kind="stable")
    starts = np.searchsorted(jj[order], np.arange(2 ** d))
    return ia[order], ib[order], starts


def _either(b, d):
    # extend each index bit with a third slot holding the max of both values;
    # low bits first so the inner axis stays long
    lead = b.shape[:-1]
    x = b
    for k in range(d):
        x = x.reshape(lead + (2 ** (d - k - 1), 2, 3 ** k))
        y = np.empty(lead + (2 ** (d - k - 1), 3, 3 ** k))
        y[..., :2, :] = x
        np.maximum(x[..., 0, :], x[..., 1, :], out=y[..., 2, :])
        x = y
    return x.reshape(lead + (3 ** d,))


def orconv(a, b):
    """Max-plus OR convolution along the last axis:
    out[j] = max over j1|j2 == j of a[j1] + b[j2].

    Each index bit contributes one of three cases (see _conv_plan), so the
    work is 3^d instead of the 4^d of the pairwise table.
    """
    n = a.shape[-1]
    if n == 1:
        return a + b
    d = n.bit_length() - 1
    if d >= 8 and a.ndim == 2:
        # row by row keeps the 3^d temporaries in cache
        return np.stack([orconv(x, y) for x, y in zip(a, b)])
    ia, ib, starts = _conv_plan(d)
    s = a[..., ia] + _either(b, d)[..., ib]
    return np.maximum.reduceat(s, starts, axis=-1)


def vdegm(*vs):
    """VDEG of a pure product of the given vector degrees."""
    if not vs:
        raise ValueError("vdegm needs at least one vector")
    acc = np.asarray(vs[0], dtype=float)
    for v in vs[1:]:
        acc = orconv(acc, np.asarray(v, dtype=float))
    return _tuple(acc)


def unit_vector(n):
    # vector degree of the constant 1
    e = np.full(n, NEG_INF)
    e[0] = 0
    return e


def vdeg_map(f, V):
    """VDEG(f, V) for f over x-variables; V[i] is the vector of x_i."""
    V = [np.asarray(v, dtype=float) for v in V]
    n = len(V[0]) if V else 1
    if any(len(v) != n for v in V):
        raise ValueError("all rows of V must share J")
    out = np.full(n, NEG_INF)
    for m in f.terms:
        if m & ~XMASK:
            raise ValueError("vdeg_map: f must use x-variables only")
        acc = unit_vector(n)
        for i in bits(m):
            acc = orconv(acc, V[i])
        out = np.maximum(out, acc)
    return _tuple(out)


def apply_mode(out, n_vars, nj, mode):
    """Degree estimate from the output vector degree."""
    out = np.asarray(out, dtype=float)
    wt = np.array([popcount(j) for j in range(len(out))], dtype=float)
    if mode == 1:
        d = np.max(np.minimum(out, n_vars - nj) + wt)
    elif mode == 2:
        d = out[-1] + nj
    elif mode == 3:
        d = np.max(out + wt)
    else:
        raise ValueError("mode must be 1, 2 or 3")
    return _clean(d)


@dataclass
class EstimatorConfig:
    J: tuple = ()
    mode: int = 3
    threshold: int = 0
    repeats: int = 1
    cap: int = J_CAP

    def __post_init__(self):
        if self.mode not in (1, 2, 3):
            raise ValueError("mode must be 1, 2 or 3")
        if len(self.J) > self.cap:
            raise ValueError("|J| = %d exceeds cap %d" % (len(self.J), self.cap))


def initial_vectors(I, J, const=()):
    """vdeg of the loaded state w.r.t. x_I and index set J.  Positions in
    `const` are nonzero constants (degree 0); other non-cube IVs are 0."""
    nj = len(J)
    N = 1 << nj
    V = np.full((N_STATE, N), NEG_INF)
    V[:80, 0] = 0            # key bits: constants in x
    V[285:288, 0] = 0
    jpos = {v: b for b, v in enumerate(J)}
    I = set(I)
    for i in range(80):
        p = IV_OFF + i
        if i in jpos:
            V[p, 1 << jpos[i]] = 0
        elif i in I:
            V[p, 0] = 1
        elif i in const:
            V[p, 0] = 0
    return V


def _check(I, J):
    I = sorted(set(I))
    J = list(J)
    if not set(J) <= set(I):
        raise ValueError("J must be a subset of I")
    if len(set(J)) != len(J):
        raise ValueError("J has repeated indices")
    if any(i < 0 or i >= 80 for i in I):
        raise ValueError("ISoC indices must lie in [0, 80)")
    return I, J


def run_vectors(I, J, R, const=(), every_round=False):
    """Algorithms K.1/K.2.  Returns the output-bit vector degree after R
    rounds, or the list for rounds 0..R when every_round is set."""
    I, J = _check(I, J)
    V = initial_vectors(I, J, const)
    N = V.shape[1]
    Vl = np.full_like(V, NEG_INF)
    Vm = np.full_like(V, NEG_INF)
    Vs = np.full_like(V, NEG_INF)
    taps = list(OUT_TAPS)
    regs = [(n, (n, l1, l2), rl) for (n, (l1, l2)), rl in zip(FEEDBACK, REG_LEN)]

    def outvec(off):
        idx = [(i - off) % N_STATE for i in taps]
        return V[idx].max(axis=0)

    hist = [outvec(0)] if every_round else None
    off = 0
    for t in range(1, R + 1):
        P = lambda i: (i - off) % N_STATE
        A, B, third = [], [], []
        plan = []
        for n, lin, rl in regs:
            if t - rl < 0:
                plan.append((len(A), None))
                A.append(V[P(n - 1)]); B.append(V[P(n - 2)])
            else:
                k = len(A)
                A += [Vm[P(n - 1)], Vs[P(n - 1)], Vs[P(n - 1)], Vm[P(n - 1)], Vl[P(n - 1)]]
                B += [Vs[P(n - 3)], Vm[P(n - 2)], Vs[P(n - 2)], Vl[P(n - 2)], V[P(n - 2)]]
                plan.append((k, len(third)))
                third.append(Vs[P(n - 3)])
        prod = orconv(np.array(A), np.array(B)) if N > 1 else np.array(A) + np.array(B)
        if third:
            idx3 = [k + 2 for k, q in plan if q is not None]
            trip = orconv(prod[idx3], np.array(third)) if N > 1 else prod[idx3] + np.array(third)
        new = []
        for (n, lin, rl), (k, q) in zip(regs, plan):
            vl = V[[P(c) for c in lin]].max(axis=0)
            if q is None:
                vm = prod[k]
            else:
                v4 = np.minimum(np.minimum(prod[k], prod[k + 1]), trip[q])
                vm = np.maximum(v4, np.maximum(prod[k + 3], prod[k + 4]))
            new.append((n, vl, vm))
        for n, vl, vm in new:
            p = P(n)
            Vl[p] = vl
            Vm[p] = vm
            V[p] = np.maximum(vl, vm)
            # cached factor of the product that just entered s_n
            Vs[p] = V[P(n - 1)]
        off += 1
        if every_round:
            hist.append(outvec(off))
    if every_round:
        return hist
    return outvec(off)


def estimate_vector(I, J, R, const=()):
    return _tuple(run_vectors(I, J, R, const))


def estimate_trivium(I, J, R, mode=1, const=()):
    I, J = _check(I, J)
    if len(J) > J_CAP:
        raise ValueError("|J| exceeds cap %d" % J_CAP)
    out = run_vectors(I, J, R, const)
    return apply_mode(out, len(I), len(J), mode)


def degree_curve(I, J, R, mode=1, const=()):
    """Estimated degree of the output bit for every round 0..R."""
    I, J = _check(I, J)
    hist = run_vectors(I, J, R, const, every_round=True)
    return [apply_mode(v, len(I), len(J), mode) for v in hist]


# -- index-set heuristics ----------------------------------------------------

@lru_cache(maxsize=4096)
def _single_estimate(I, i, R):
    const = tuple(j for j in I if j != i)
    return estimate_trivium((i,), (), R, 3, const)


def adjacent_indices(I):
    s = set(I)
    return sorted(i for i in s if i - 1 in s or i + 1 in s)


def choose_index_set(I, R, cap, rng=None, seed=0):
    """Adjacent indices first (randomly cut to cap), then the indices with the
    largest single-index estimates (random tie-breaking) fill up the rest."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    rng = rng or random.Random(seed)
    I = tuple(sorted(set(I)))
    J = adjacent_indices(I)
    if len(J) > cap:
        J = sorted(rng.sample(J, cap))
    if len(J) < cap:
        rest = [i for i in I if i not in J]
        if rest:
            scored = [(_single_estimate(I, i, R), rng.random(), i) for i in rest]
            scored.sort(key=lambda t: (-t[0], t[1]))
            J = sorted(J + [i for _, _, i in scored[:cap - len(J)]])
    return J


def min_curve(I, R, cap, repeats, seed=0, mode=1):
    """Pointwise minimum of degree curves over `repeats` random index sets."""
    rng = random.Random(seed)
    best = None
    for _ in range(repeats):
        J = choose_index_set(I, R, cap, rng=rng)
        c = degree_curve(I, J, R, mode)
        best = c if best is None else [min(a, b) for a, b in zip(best, c)]
    return best


def max_zero_sum_round(curve, n):
    """Last round r such that every round up to r has bound < n."""
    r = -1
    for t, d in enumerate(curve):
        if d >= n:
            break
        r = t
    return r
