"""Trivium in rotation form.

One round, for (n, a, b, lin) in the three registers:
    s_n <- s_{n-1} s_{n-2} + s_n + lin
then s <- (s_287, s_0, ..., s_286).  The same clock loop drives scalar
bits, bitsliced big ints and Poly cells.
"""
import os

from .anf import Poly, ONE, ZERO, mul_terms

N_STATE = 288
FEEDBACK = (
    # n, extra linear taps (besides s_n itself)
    (92, (65, 170)),
    (176, (161, 263)),
    (287, (242, 68)),
)
OUT_TAPS = (65, 92, 161, 176, 242, 287)
REG_LEN = (93, 84, 111)
INIT_ROUNDS = 1152
IV_OFF = 93

DEFAULT_BUDGET = 1 << 24


class TermBudgetExceeded(RuntimeError):
    pass


def budget_from_env():
    v = os.environ.get("CUBEFORGE_BUDGET")
    return int(v) if v else DEFAULT_BUDGET


def _bits80(v, what):
    v = [int(b) & 1 for b in v]
    if len(v) != 80:
        raise ValueError("%s must have exactly 80 bits, got %d" % (what, len(v)))
    return v


def init_state(key, iv):
    key = _bits80(key, "key")
    iv = _bits80(iv, "iv")
    s = [0] * N_STATE
    s[:80] = key
    s[IV_OFF:IV_OFF + 80] = iv
    s[285] = s[286] = s[287] = 1
    return tuple(s)


def clock(cells, R, mul=None, hook=None):
    """Run R rounds over any XOR-able cell type.  Returns a new list."""
    s = list(cells)
    if mul is None:
        mul = lambda a, b: a & b
    off = 0
    for t in range(R):
        new = []
        for n, (l1, l2) in FEEDBACK:
            g = lambda i: s[(i - off) % N_STATE]
            new.append(mul(g(n - 1), g(n - 2)) ^ g(n) ^ g(l1) ^ g(l2))
        for (n, _), v in zip(FEEDBACK, new):
            s[(n - off) % N_STATE] = v
        off += 1
        if hook is not None:
            hook(t + 1, s, off)
    return [s[(i - off) % N_STATE] for i in range(N_STATE)]


def update_rounds(state, R):
    if R < 0:
        raise ValueError("R must be >= 0")
    return tuple(clock(state, R))


def output_bit(state):
    z = 0
    for i in OUT_TAPS:
        z ^= state[i]
    return z


def keystream(key, iv, nbits, rounds=INIT_ROUNDS):
    st = clock(init_state(key, iv), rounds)
    out = []
    # keep clocking one round per bit
    for _ in range(nbits):
        out.append(output_bit(st))
        st = clock(st, 1)
    return out


def keystream_fast(key, iv, nbits, rounds=INIT_ROUNDS):
    # ring buffer, no per-bit state copies
    s = list(init_state(key, iv))
    off = 0
    out = []
    total = rounds + nbits
    for t in range(total):
        if t >= rounds:
            z = 0
            for i in OUT_TAPS:
                z ^= s[(i - off) % N_STATE]
            out.append(z)
        g = lambda i: s[(i - off) % N_STATE]
        t1 = (g(91) & g(90)) ^ g(92) ^ g(65) ^ g(170)
        t2 = (g(175) & g(174)) ^ g(176) ^ g(161) ^ g(263)
        t3 = (g(286) & g(285)) ^ g(287) ^ g(242) ^ g(68)
        s[(92 - off) % N_STATE] = t1
        s[(176 - off) % N_STATE] = t2
        s[(287 - off) % N_STATE] = t3
        off += 1
    return out


# -- hex codec (byte i holds k_{8i+7}..k_{8i}, msb first) --------------------

def bits_from_hex(h):
    h = h.lower().removeprefix("0x")
    if len(h) != 20:
        raise ValueError("expected 20 hex digits, got %d" % len(h))
    out = []
    for i in range(10):
        byte = int(h[2 * i:2 * i + 2], 16)
        out.extend((byte >> j) & 1 for j in range(8))
    return out


def hex_from_bits(b):
    b = _bits80(b, "value")
    return "".join("%02x" % sum(b[8 * i + j] << j for j in range(8)) for i in range(10))


def bytes_from_bits(stream):
    """Pack keystream bits lsb-first into bytes (eSTREAM vector layout)."""
    out = bytearray()
    for i in range(0, len(stream) - 7, 8):
        out.append(sum(stream[i + j] << j for j in range(8)))
    return bytes(out)


# -- cube sums ---------------------------------------------------------------

def _check_isoc(isoc):
    isoc = sorted(set(isoc))
    if isoc and (isoc[0] < 0 or isoc[-1] >= 80):
        raise ValueError("ISoC indices must lie in [0, 80)")
    return isoc


def lane_pattern(j, nlanes):
    """Big int whose bit p is bit j of p, for p < nlanes (power of two)."""
    period = 2 << j
    block = ((1 << (1 << j)) - 1) << (1 << j)
    rep = ((1 << nlanes) - 1) // ((1 << period) - 1)
    return block * rep


def cube_sum_scalar(key, isoc, R, noncube_iv=None):
    isoc = _check_isoc(isoc)
    base = list(noncube_iv) if noncube_iv is not None else [0] * 80
    acc = 0
    for p in range(1 << len(isoc)):
        iv = list(base)
        for b, i in enumerate(isoc):
            iv[i] = (p >> b) & 1
        acc ^= output_bit(update_rounds(init_state(key, iv), R))
    return acc


MAX_LANE_BITS = 20


def cube_sums(keys, isoc, R, noncube_iv=None):
    """Bitsliced cube sums for several keys in one pass.

    Lanes are key-major: lane = key_index * 2^|I| + point.  Cubes wider than
    MAX_LANE_BITS are split into chunks and XOR-reduced.
    """
    isoc = _check_isoc(isoc)
    keys = [_bits80(k, "key") for k in keys]
    base = _bits80(noncube_iv, "iv") if noncube_iv is not None else [0] * 80
    for i in isoc:
        if base[i]:
            raise ValueError("noncube IV must be zero on cube positions")
    inner = isoc[:MAX_LANE_BITS]
    outer = isoc[MAX_LANE_BITS:]
    res = [0] * len(keys)
    for hi in range(1 << len(outer)):
        iv = list(base)
        for b, i in enumerate(outer):
            iv[i] = (hi >> b) & 1
        for kidx, v in enumerate(_lanes_pass(keys, inner, iv, R)):
            res[kidx] ^= v
    return res


def _lanes_pass(keys, cube, iv, R):
    npts = 1 << len(cube)
    nk = len(keys)
    nl = npts * nk
    full = (1 << nl) - 1
    blk = (1 << npts) - 1
    cells = [0] * N_STATE
    for i in range(80):
        v = 0
        for kidx, k in enumerate(keys):
            if k[i]:
                v |= blk << (kidx * npts)
        cells[i] = v
    for i in range(80):
        if iv[i]:
            cells[IV_OFF + i] = full
    rep = full // blk
    for b, i in enumerate(cube):
        cells[IV_OFF + i] = lane_pattern(b, npts) * rep
    cells[285] = cells[286] = cells[287] = full
    st = clock(cells, R)
    z = output_bit(st)
    return [((z >> (kidx * npts)) & blk).bit_count() & 1 for kidx in range(nk)]


def cube_sum(key, isoc, R, noncube_iv=None, batch=True):
    if not batch:
        return cube_sum_scalar(key, isoc, R, noncube_iv)
    return cube_sums([key], isoc, R, noncube_iv)[0]


# -- symbolic ----------------------------------------------------------------

SYM = "sym"


def cube_assignment(isoc, noncube_iv=None, key=None):
    """Cube IVs symbolic, other IVs constant (default 0), key symbolic unless
    a concrete key is given."""
    a = {}
    isoc = set(isoc)
    for i in range(80):
        if i in isoc:
            a["x%d" % i] = SYM
        else:
            a["x%d" % i] = int(noncube_iv[i]) if noncube_iv is not None else 0
        if key is not None:
            a["k%d" % i] = int(key[i])
    return a


def initial_cells(assignment=None):
    assignment = assignment or {}
    cells = [ZERO] * N_STATE
    for i in range(80):
        for name, pos in (("k%d" % i, i), ("x%d" % i, IV_OFF + i)):
            v = assignment.get(name, SYM)
            if v == SYM or v is None:
                cells[pos] = Poly.var(name)
            else:
                cells[pos] = ONE if int(v) else ZERO
    cells[285] = cells[286] = cells[287] = ONE
    return cells


def symbolic_state(R, assignment=None, budget=None):
    """Exact ANF of all 288 cells after R rounds.  Raises TermBudgetExceeded
    once the total term count passes `budget`."""
    budget = budget_from_env() if budget is None else budget
    cells = [c.terms for c in initial_cells(assignment)]
    def hook(t, s, off):
        if t % 16 == 0 or t == R:
            tot = sum(len(c) for c in s)
            if tot > budget:
                raise TermBudgetExceeded("%d terms after %d rounds (budget %d)" % (tot, t, budget))

    cells = clock(cells, R, mul=mul_terms, hook=hook)
    return [Poly(c) for c in cells]


def zpoly(cells):
    acc = frozenset()
    for i in OUT_TAPS:
        acc = acc ^ cells[i].terms
    return Poly(acc)
