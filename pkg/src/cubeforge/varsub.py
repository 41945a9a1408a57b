"""Superpoly recovery with variable substitution at a middle round.

The round-r_m cells are polynomials in x whose coefficients are key
polynomials.  Each distinct non-constant coefficient becomes a fresh z, so
many k-space trails collapse into one z-space trail; the superpoly is then
read off in z and expanded back on demand.
"""
from dataclasses import dataclass, field

from .anf import Poly, ONE, XMASK, ZMASK, Z0, NZ, bits, product
from .trails import DEFAULT_NODE_BUDGET, EnumerationBudgetExceeded, obtain_valuable_terms, _cube_mask
from .trivium import symbolic_state, cube_assignment

DEFAULT_RM = 200


class UnmappedVariable(KeyError):
    pass


@dataclass
class SubstitutionMap:
    polys: list = field(default_factory=list)    # z index -> Poly in k

    def __post_init__(self):
        self._index = {p: i for i, p in enumerate(self.polys)}

    def z_for(self, h):
        if h.is_const():
            raise ValueError("constants are never substituted")
        i = self._index.get(h)
        if i is None:
            i = len(self.polys)
            if i >= NZ:
                raise OverflowError("more than %d substituted coefficients" % NZ)
            self.polys.append(h)
            self._index[h] = i
        return i

    def __len__(self):
        return len(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    def lines(self):
        return ["z%d = %s" % (i, p) for i, p in enumerate(self.polys)]


@dataclass
class MidRoundFunction:
    cells: list
    source_round: int = 0


def split_by_x(p):
    """{x-part: Poly of the k-part} for a polynomial in x and k."""
    groups = {}
    for m in p.terms:
        groups.setdefault(m & XMASK, set()).symmetric_difference_update({m & ~XMASK})
    return {v: Poly(frozenset(ks)) for v, ks in groups.items() if ks}


def extract_substitution(state, source_round=0, zmap=None):
    """Rewrite cells over (x, z).  Within a cell, x-monomials are visited in
    increasing mask order; z indices follow first appearance."""
    zmap = zmap if zmap is not None else SubstitutionMap()
    cells = []
    for c in state:
        if c.support() & ZMASK:
            raise ValueError("cell already contains z variables")
        out = set()
        for v, h in sorted(split_by_x(c).items()):
            if h == ONE:
                out ^= {v}
            else:
                out ^= {v | (1 << (Z0 + zmap.z_for(h)))}
        cells.append(Poly(frozenset(out)))
    return MidRoundFunction(cells, source_round), zmap


def _trail_table(u, target, cells, budget):
    # one monomial per selected cell (Copy, And); x-parts must stay inside u
    acc = {0: 1}
    visited = 0
    for j in bits(target):
        nxt = {}
        for a, c in acc.items():
            for m in cells[j].terms:
                if m & XMASK & ~u:
                    continue
                r = a | m
                nxt[r] = nxt.get(r, 0) + c
                visited += 1
        if visited > budget:
            raise EnumerationBudgetExceeded("visited %d nodes" % visited)
        acc = nxt
    # Xor: keep selections whose x-part is exactly u
    return {m: c for m, c in acc.items() if m & XMASK == u}


def trail_count(u, target, cells, budget=DEFAULT_NODE_BUDGET):
    """Number of trails x^u * (anything) -> target through the cells."""
    return sum(_trail_table(u, target, cells, budget).values())


def coefficient_recovery(u, target, g, budget=DEFAULT_NODE_BUDGET):
    """Coe(target(g), x^u) as a polynomial in z.  Parity table over the
    z-exponent c of every trail z^c x^u -> target."""
    if isinstance(g, MidRoundFunction):
        g = g.cells
    if not isinstance(u, int):
        u = sum(1 << i for i in u)
    H = {}
    for m, c in _trail_table(u, target, g, budget).items():
        key = m & ~XMASK
        H[key] = H.get(key, 0) + c
    return Poly(frozenset(c for c, n in H.items() if n & 1))


def expand_z(p, zmap):
    """Substitute every z by its key polynomial."""
    polys = zmap.polys if isinstance(zmap, SubstitutionMap) else list(zmap)
    out = set()
    for m in p.terms:
        zs = [b - Z0 for b in bits(m & ZMASK)]
        for i in zs:
            if i >= len(polys):
                raise UnmappedVariable("z%d" % i)
        rest = Poly(frozenset((m & ~ZMASK,)))
        out ^= product([rest] + [polys[i] for i in zs]).terms
    return Poly(frozenset(out))


@dataclass
class RecoveredSuperpoly:
    poly: Poly
    zmap: SubstitutionMap
    r_m: int
    n_terms: int = 0

    def in_key(self):
        return expand_z(self.poly, self.zmap)


def default_rm(R, r_m=DEFAULT_RM):
    # middle round must sit strictly inside (0, R)
    return max(1, min(r_m, R // 2)) if R >= 2 else None


def recover_superpoly(isoc, R, r_m=DEFAULT_RM, budget=DEFAULT_NODE_BUDGET, term_budget=None):
    isoc, u = _cube_mask(isoc)
    if not 0 < r_m < R:
        raise ValueError("need 0 < r_m < R")
    state = symbolic_state(r_m, cube_assignment(isoc), term_budget)
    vts = obtain_valuable_terms(isoc, r_m, R, state, budget)
    # only cells that some valuable term reads need substituting
    used = 0
    for t in vts:
        used |= t
    cells = [c if used >> i & 1 else Poly() for i, c in enumerate(state)]
    g, zmap = extract_substitution(cells, r_m)
    acc = set()
    for t in sorted(vts):
        acc ^= coefficient_recovery(u, t, g, budget).terms
    return RecoveredSuperpoly(Poly(frozenset(acc)), zmap, r_m, len(vts))
