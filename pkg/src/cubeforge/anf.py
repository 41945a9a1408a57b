"""Boolean polynomials over GF(2) in algebraic normal form.

A monomial is an int bitmask over one flat variable space:
x_i -> bit i, k_i -> bit 80+i, z_i -> bit 160+i.  Bit order is the
canonical order (space tag first, then index).  A Poly is a frozenset
of such masks, XOR semantics.
"""
import re

NX = 80
NK = 80
NZ = 512
K0 = NX
Z0 = NX + NK
XMASK = (1 << NX) - 1
KMASK = ((1 << NK) - 1) << K0
ZMASK = ((1 << NZ) - 1) << Z0

NEG_INF = float("-inf")


def var_id(name):
    """'x12' -> 12, 'k7' -> 87, 'z3' -> 163.  Ints pass through."""
    if isinstance(name, int):
        return name
    tag, idx = name[0], int(name[1:])
    if tag == "x" and idx < NX:
        return idx
    if tag == "k" and idx < NK:
        return K0 + idx
    if tag == "z" and idx < NZ:
        return Z0 + idx
    raise ValueError("bad variable %r" % (name,))


def var_name(v):
    if v < K0:
        return "x%d" % v
    if v < Z0:
        return "k%d" % (v - K0)
    if v < Z0 + NZ:
        return "z%d" % (v - Z0)
    raise ValueError("variable id out of range: %d" % v)


def bits(m):
    """Indices of set bits, ascending."""
    out = []
    while m:
        low = m & -m
        out.append(low.bit_length() - 1)
        m ^= low
    return out


def popcount(m):
    return bin(m).count("1")


def mask_of(vars_):
    m = 0
    for v in vars_:
        m |= 1 << var_id(v)
    return m


def mono_key(m):
    return (popcount(m), bits(m))


class Poly:
    __slots__ = ("terms", "_h")

    def __init__(self, terms=()):
        if isinstance(terms, frozenset):
            self.terms = terms
        else:
            acc = set()
            for t in terms:
                acc ^= {t}
            self.terms = frozenset(acc)
        self._h = None

    @classmethod
    def var(cls, name):
        return cls(frozenset((1 << var_id(name),)))

    @classmethod
    def mono(cls, *names):
        return cls(frozenset((mask_of(names),)))

    def __xor__(self, other):
        return Poly(self.terms ^ other.terms)

    __add__ = __xor__

    def __and__(self, other):
        return mul(self, other)

    __mul__ = __and__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        if self._h is None:
            self._h = hash(self.terms)
        return self._h

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.sorted())

    def __bool__(self):
        return bool(self.terms)

    def __contains__(self, m):
        return m in self.terms

    def sorted(self):
        return sorted(self.terms, key=mono_key)

    def degree(self, over=None):
        """Max monomial degree, counting only variables in mask `over`."""
        if not self.terms:
            return NEG_INF
        if over is None:
            return max(popcount(m) for m in self.terms)
        return max(popcount(m & over) for m in self.terms)

    def support(self):
        s = 0
        for m in self.terms:
            s |= m
        return s

    def is_const(self):
        return not self.terms or self.terms == ONE.terms

    def __repr__(self):
        return "Poly(%s)" % format_poly(self)

    def __str__(self):
        return format_poly(self)


ZERO = Poly(frozenset())
ONE = Poly(frozenset((0,)))


def X(i):
    return Poly.var("x%d" % i)


def K(i):
    return Poly.var("k%d" % i)


def Z(i):
    return Poly.var("z%d" % i)


def add(p, q):
    return Poly(p.terms ^ q.terms)


def mul_terms(a, b):
    # parity count over a|b; idempotence is the OR
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return frozenset()
    if len(a) == 1:
        (m,) = a
        if m == 0:
            return b if isinstance(b, frozenset) else frozenset(b)
        cnt = {}
        for t in b:
            r = m | t
            cnt[r] = cnt.get(r, 0) ^ 1
        return frozenset(r for r, c in cnt.items() if c)
    cnt = {}
    for s in a:
        for t in b:
            r = s | t
            cnt[r] = cnt.get(r, 0) ^ 1
    return frozenset(r for r, c in cnt.items() if c)


def mul(p, q):
    return Poly(mul_terms(p.terms, q.terms))


def product(polys):
    acc = ONE.terms
    for p in polys:
        acc = mul_terms(acc, p.terms)
        if not acc:
            break
    return Poly(acc)


def compose(f, g):
    """Substitute x_i of f by g[i].  f must live in x-space only."""
    g = list(g)
    sup = f.support()
    if sup & ~XMASK:
        raise ValueError("compose: outer polynomial must use x-variables only")
    if sup and sup.bit_length() > len(g):
        raise ValueError("compose: f uses x%d but only %d inner functions given"
                         % (sup.bit_length() - 1, len(g)))
    out = set()
    for m in f.terms:
        out ^= product(g[i] for i in bits(m)).terms
    return Poly(frozenset(out))


def restrict(p, fixing):
    """Fix variables to constants.  fixing: {name_or_id: 0/1}."""
    zero = one = 0
    for v, b in fixing.items():
        if b:
            one |= 1 << var_id(v)
        else:
            zero |= 1 << var_id(v)
    out = set()
    for m in p.terms:
        if m & zero:
            continue
        out ^= {m & ~one}
    return Poly(frozenset(out))


def evaluate(p, point):
    """point: int mask of the variables set to 1, or a {name: bit} map."""
    if not isinstance(point, int):
        point = mask_of(v for v, b in point.items() if b)
    r = 0
    for m in p.terms:
        if m & point == m:
            r ^= 1
    return r


def point_mask(x=None, k=None, z=None):
    """Pack bit lists for each space into one evaluation mask."""
    m = 0
    for base, vals in ((0, x), (K0, k), (Z0, z)):
        if vals is None:
            continue
        for i, b in enumerate(vals):
            if b:
                m |= 1 << (base + i)
    return m


def degree(p):
    return p.degree()


def vector_degree(p, J, over=None):
    """Entry j = degree (in variables outside J) of the coefficient of the
    J-monomial with pattern j; bit b of j stands for J[b].  `over` limits
    which variables count toward the degree (mask; default all)."""
    J = [var_id(v) for v in J]
    jm = mask_of(J)
    rest = ~jm if over is None else over & ~jm
    out = [NEG_INF] * (1 << len(J))
    for m in p.terms:
        j = 0
        for b, v in enumerate(J):
            if m >> v & 1:
                j |= 1 << b
        d = popcount(m & rest)
        if d > out[j]:
            out[j] = d
    return tuple(out)


def degree_from_vdeg(v):
    best = NEG_INF
    for j, e in enumerate(v):
        if e != NEG_INF:
            best = max(best, e + popcount(j))
    return best


def divides(h, f):
    """h | f in the Boolean ring, i.e. h*f == f."""
    if not h:
        raise ZeroDivisionError("zero divisor")
    return mul(h, f) == f


def quotient_witness(h, f):
    # f itself is a quotient whenever h*f == f
    if not divides(h, f):
        raise ValueError("h does not divide f")
    return f


# -- text format ------------------------------------------------------------

def format_mono(m):
    if m == 0:
        return "1"
    return "".join(var_name(v) for v in bits(m))


def format_poly(p):
    if not p.terms:
        return "0"
    return "+".join(format_mono(m) for m in p.sorted())


_VAR = re.compile(r"([xkz])(\d+)")


def parse_poly(s):
    s = s.strip()
    if s == "0":
        return ZERO
    out = set()
    for tok in s.split("+"):
        tok = tok.strip()
        if tok == "1":
            out ^= {0}
            continue
        pos, m = 0, 0
        for mt in _VAR.finditer(tok):
            if mt.start() != pos:
                raise ValueError("cannot parse term %r" % tok)
            m |= 1 << var_id(mt.group(0))
            pos = mt.end()
        if pos != len(tok) or not tok:
            raise ValueError("cannot parse term %r" % tok)
        out ^= {m}
    return Poly(frozenset(out))
