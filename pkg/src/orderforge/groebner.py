"""Buchberger's algorithm for ideals and submodules of free modules.

Module elements ("vectors") are dicts ``{(component, exponent): coeff}``.
An ideal is a submodule of the rank-one free module.  Over a quotient ring
``R = S/J`` every computation happens in the ambient ring ``S`` with
``J * e_k`` added for each component, and results are reduced modulo ``J``.

Pairs are selected by (degree of the lcm, insertion index), and the
Gebauer-Moeller criteria prune them; the product criterion is only applied
to ideals, where it is valid.  Reduced bases are unique, so every public
result is independent of the order in which pairs happen to be processed.
"""
from __future__ import annotations

import heapq
import math

from .algebra import MonomialOrder, Poly, Ring

INF = math.inf


# ---------------------------------------------------------------- vectors


def vec_from_polys(polys) -> dict:
    v = {}
    for k, p in enumerate(polys):
        for e, c in p.terms.items():
            v[(k, e)] = c
    return v


def vec_to_polys(ring: Ring, vec: dict, rank: int) -> list:
    rows = [dict() for _ in range(rank)]
    for (k, e), c in vec.items():
        rows[k][e] = c
    return [Poly(ring, r) for r in rows]


def vec_components(vec: dict) -> dict:
    out: dict = {}
    for (k, e), c in vec.items():
        out.setdefault(k, {})[e] = c
    return out


def _clean(vec: dict, p: int) -> dict:
    if p:
        return {t: c % p for t, c in vec.items() if c % p}
    return {t: c for t, c in vec.items() if c}


def vec_add(a: dict, b: dict, p: int = 0, scale=1) -> dict:
    out = dict(a)
    for t, c in b.items():
        out[t] = out.get(t, 0) + scale * c
    return _clean(out, p)


def vec_mul(terms: dict, vec: dict, p: int = 0, shift: int = 0) -> dict:
    """Polynomial (as terms) times vector, optionally moving components by ``shift``."""
    out: dict = {}
    get = out.get
    for ea, ca in terms.items():
        for (k, eb), cb in vec.items():
            t = (k + shift, tuple([x + y for x, y in zip(ea, eb)]))
            out[t] = get(t, 0) + ca * cb
    return _clean(out, p)


def vec_shift(vec: dict, shift: int) -> dict:
    return {(k + shift, e): c for (k, e), c in vec.items()}


def mat_apply(ring: Ring, cols: list, x: dict) -> dict:
    """``A x`` where ``A`` is given by its columns and ``x`` is a vector."""
    p = ring.field.characteristic
    out: dict = {}
    for j, terms in vec_components(x).items():
        col = cols[j]
        if col:
            out = vec_add(out, vec_mul(terms, col, p), p)
    return normalize_vec(ring, out)


def normalize_vec(ring: Ring, vec: dict) -> dict:
    if not ring.quotient or not vec:
        return vec
    gb = ring.quotient_gb()
    out = {}
    for k, terms in vec_components(vec).items():
        for e, c in reduce_terms(ring.ambient, terms, gb).items():
            out[(k, e)] = c
    return out


def freeze(vec: dict) -> frozenset:
    return frozenset(vec.items())


# ---------------------------------------------------------------- reduction


class _Basis:
    """Leading-term index over a list of monic vectors."""

    def __init__(self, order: MonomialOrder, p: int):
        self.order = order
        self.p = p
        self.elems: list = []       # (vec, comp, exp)
        self.by_comp: dict = {}

    def add(self, vec: dict):
        comp, exp = max(vec, key=lambda t: self.order.tkey(*t))
        idx = len(self.elems)
        self.elems.append((vec, comp, exp))
        self.by_comp.setdefault(comp, []).append(idx)
        return idx

    def divisor(self, comp: int, exp: tuple, skip=None):
        for idx in self.by_comp.get(comp, ()):
            if idx == skip:
                continue
            lexp = self.elems[idx][2]
            if all(a <= b for a, b in zip(lexp, exp)):
                return idx
        return None


def _reduce(vec: dict, basis: _Basis, full: bool = True, skip=None) -> dict:
    order = basis.order
    p = basis.p
    tkey = order.tkey
    f = dict(vec)
    heap = [tuple(-x for x in tkey(*t)) + (t,) for t in f]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        item = heapq.heappop(heap)
        t = item[-1]
        c = f.get(t)
        if c is None:
            continue
        comp, exp = t
        idx = basis.divisor(comp, exp, skip)
        if idx is None:
            rem[t] = c
            del f[t]
            if not full:
                rem.update(f)
                return rem
            continue
        g, gcomp, gexp = basis.elems[idx]
        del f[t]
        shift = tuple([a - b for a, b in zip(exp, gexp)])
        q = c  # basis elements are monic
        for (k, e), gc in g.items():
            if k == gcomp and e == gexp:
                continue
            s = (k, tuple([a + b for a, b in zip(e, shift)]))
            old = f.get(s)
            val = (old or 0) - q * gc
            if p:
                val %= p
            if val:
                if old is None:
                    heapq.heappush(heap, tuple(-x for x in tkey(*s)) + (s,))
                f[s] = val
            elif old is not None:
                del f[s]
    return rem


def _monic(vec: dict, order: MonomialOrder, field) -> dict:
    lt = max(vec, key=lambda t: order.tkey(*t))
    inv = field.inv(vec[lt])
    p = field.characteristic
    if p:
        return {t: c * inv % p for t, c in vec.items()}
    return {t: c * inv for t, c in vec.items()}


def reduce_terms(ring: Ring, terms: dict, gb: list) -> dict:
    """Normal form of a polynomial (terms dict) against an ideal GB (list of terms dicts)."""
    if not gb:
        return terms
    basis = _ideal_basis(ring, gb)
    rem = _reduce({(0, e): c for e, c in terms.items()}, basis)
    return {e: c for (_, e), c in rem.items()}


_IDEAL_BASIS_CACHE: dict = {}


def _ideal_basis(ring: Ring, gb: list) -> _Basis:
    key = (ring, tuple(freeze(g) for g in gb))
    b = _IDEAL_BASIS_CACHE.get(key)
    if b is None:
        b = _Basis(ring.order, ring.field.characteristic)
        for g in gb:
            b.add({(0, e): c for e, c in g.items()})
        _IDEAL_BASIS_CACHE[key] = b
    return b


# ---------------------------------------------------------------- Buchberger


def _divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: tuple, b: tuple) -> tuple:
    return tuple([max(x, y) for x, y in zip(a, b)])


def _coprime(a: tuple, b: tuple) -> bool:
    return not any(x and y for x, y in zip(a, b))


def buchberger(gens: list, order: MonomialOrder, field, ideal_case: bool = False) -> list:
    """Reduced Groebner basis (monic, sorted by descending leading term)."""
    p = field.characteristic
    basis = _Basis(order, p)
    pairs: dict = {}
    heap: list = []
    live: list = []

    def add(h: dict):
        h = _monic(h, order, field)
        t = basis.add(h)
        _, hc, he = basis.elems[t]
        cand = []
        for i in range(t):
            if not live[i]:
                continue
            _, ic, ie = basis.elems[i]
            if ic != hc:
                continue
            cand.append((_lcm(ie, he), i, ideal_case and _coprime(ie, he)))
        # Gebauer-Moeller: drop pairs whose lcm is strictly divisible by another new lcm
        kept = [c for c in cand
                if not any(d[0] != c[0] and _divides(d[0], c[0]) for d in cand)]
        groups: dict = {}
        for c in kept:
            groups.setdefault(c[0], []).append(c)
        new = []
        for L, grp in groups.items():
            if any(c[2] for c in grp):
                continue
            new.append(min(grp, key=lambda c: c[1]))
        # chain criterion on existing pairs
        for key in list(pairs):
            i, j = key
            L = pairs[key]
            if basis.elems[i][1] != hc or not _divides(he, L):
                continue
            if _lcm(basis.elems[i][2], he) != L and _lcm(basis.elems[j][2], he) != L:
                del pairs[key]
        for L, i, _ in new:
            pairs[(i, t)] = L
            heapq.heappush(heap, (sum(L), t, i))
        # elements whose leading term is divisible by the new one stay for
        # reduction but spawn no new pairs
        for i in range(t):
            if live[i] and basis.elems[i][1] == hc and _divides(he, basis.elems[i][2]):
                live[i] = False
        live.append(True)

    for g in gens:
        if not g:
            continue
        r = _reduce(g, basis)
        if r:
            add(r)
    while heap:
        _, j, i = heapq.heappop(heap)
        if pairs.pop((i, j), None) is None:
            continue
        gi, _, ei = basis.elems[i]
        gj, _, ej = basis.elems[j]
        L = _lcm(ei, ej)
        si = tuple([a - b for a, b in zip(L, ei)])
        sj = tuple([a - b for a, b in zip(L, ej)])
        s: dict = {}
        for (k, e), c in gi.items():
            s[(k, tuple([a + b for a, b in zip(e, si)]))] = c
        for (k, e), c in gj.items():
            t = (k, tuple([a + b for a, b in zip(e, sj)]))
            s[t] = s.get(t, 0) - c
        s = _clean(s, p)
        if not s:
            continue
        r = _reduce(s, basis)
        if r:
            add(r)
    return _interreduce([e[0] for e in basis.elems], order, field)


def _interreduce(elems: list, order: MonomialOrder, field) -> list:
    p = field.characteristic
    leads = [max(g, key=lambda t: order.tkey(*t)) for g in elems]
    keep = []
    for i, (ci, ei) in enumerate(leads):
        redundant = False
        for j, (cj, ej) in enumerate(leads):
            if i == j or ci != cj or not _divides(ej, ei):
                continue
            # equal leading terms: keep the earliest
            if ej != ei or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(elems[i])
    basis = _Basis(order, p)
    for g in keep:
        basis.add(g)
    out = []
    for idx, g in enumerate(keep):
        out.append(_monic(_reduce(g, basis, skip=idx), order, field))
    out.sort(key=lambda g: order.tkey(*max(g, key=lambda t: order.tkey(*t))), reverse=True)
    return out


# ---------------------------------------------------------------- GB front-ends

_GB_CACHE: dict = {}
_GB_CACHE_LIMIT = 4096


def module_gb(ring: Ring, vecs, rank: int, order: MonomialOrder | None = None) -> list:
    """Reduced GB of the submodule of ``R^rank`` generated by ``vecs``."""
    order = order or MonomialOrder(ring.order.kind)
    vecs = [v for v in vecs if v]
    key = (ring, order, rank, frozenset(freeze(v) for v in vecs))
    hit = _GB_CACHE.get(key)
    if hit is not None:
        return hit
    gens = list(vecs)
    if ring.quotient:
        for k in range(rank):
            for q in ring.quotient_gb():
                gens.append({(k, e): c for e, c in q.items()})
    gb = buchberger(gens, order, ring.field, ideal_case=(rank == 1))
    if len(_GB_CACHE) > _GB_CACHE_LIMIT:
        _GB_CACHE.clear()
    _GB_CACHE[key] = gb
    return gb


def ideal_gb_terms(ring: Ring, gens: list) -> list:
    """GB of a polynomial ideal of an ordinary polynomial ring, as terms dicts."""
    vecs = [{(0, e): c for e, c in g.items()} for g in gens if g]
    gb = buchberger(vecs, ring.order, ring.field, ideal_case=True)
    return [{e: c for (_, e), c in g.items()} for g in gb]


class GroebnerBasis:
    """Reduced GB of a submodule of ``R^rank`` (``rank == 1`` for ideals).

    Over a quotient ring the elements include ``J * e_k``.
    """

    def __init__(self, ring: Ring, elements: list, rank: int, order: MonomialOrder):
        self.ring = ring
        self.elements = elements
        self.rank = rank
        self.order = order
        self._basis = _Basis(order, ring.field.characteristic)
        for g in elements:
            self._basis.add(g)

    @classmethod
    def of(cls, ring: Ring, vecs, rank: int, order: MonomialOrder | None = None):
        order = order or MonomialOrder(ring.order.kind)
        return cls(ring, module_gb(ring, vecs, rank, order), rank, order)

    def reduce(self, vec: dict) -> dict:
        return _reduce(vec, self._basis) if vec else {}

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def lead_terms(self) -> list:
        return [e[1:] for e in self._basis.elems]

    def polys(self) -> list:
        """Elements as polynomials (ideal case)."""
        return [Poly(self.ring, {e: c for (_, e), c in g.items()}) for g in self.elements]

    def is_everything(self) -> bool:
        """True when the submodule is all of ``R^rank``."""
        zero = (0,) * self.ring.nvars
        return all(self._basis.divisor(k, zero) is not None for k in range(self.rank))

    def __len__(self):
        return len(self.elements)


def buchberger_polys(gens, order: MonomialOrder | None = None) -> list:
    """Reduced GB of the ideal generated by ``gens`` as a list of :class:`Poly`."""
    gens = list(gens)
    if not gens:
        return []
    ring = gens[0].ring
    order = order or ring.order
    gb = GroebnerBasis.of(ring, [{(0, e): c for e, c in g.terms.items()} for g in gens], 1, order)
    return gb.polys()


def normal_form(p: Poly, gb) -> Poly:
    if isinstance(gb, GroebnerBasis):
        return Poly(p.ring, {e: c for (_, e), c in gb.reduce({(0, e): c for e, c in p.terms.items()}).items()})
    return normal_form(p, GroebnerBasis.of(p.ring, [{(0, e): c for e, c in g.terms.items()} for g in gb], 1))


# ---------------------------------------------------------------- syzygies and lifts


class Lifter:
    """Submodule ``<gens> + <rels>`` of ``R^rank`` with generator tracking.

    The GB of ``(g_i, e_i)``, ``(r, 0)`` under an order eliminating the
    first ``rank`` components yields (a) the relations among the ``gens``
    modulo ``rels`` and (b) coefficient lifts ``v = sum c_i g_i mod rels``.
    """

    def __init__(self, ring: Ring, rank: int, gens: list, rels: list = ()):
        self.ring = ring
        self.rank = rank
        self.ngens = len(gens)
        one = ring.field.one
        zero = (0,) * ring.nvars
        aug = [{**g, (rank + i, zero): one} for i, g in enumerate(gens)]
        aug += [r for r in rels if r]
        if ring.quotient:
            for k in range(rank, rank + self.ngens):
                for q in ring.quotient_gb():
                    aug.append({(k, e): c for e, c in q.items()})
        order = MonomialOrder(ring.order.kind, "pot", split=rank)
        self.gb = GroebnerBasis.of(ring, aug, rank + self.ngens, order)

    def relations(self) -> list:
        """Generators of ``{c : sum c_i g_i in <rels>}`` (vectors in ``R^ngens``)."""
        out = []
        for g in self.gb.elements:
            if all(k >= self.rank for (k, _) in g):
                v = normalize_vec(self.ring, vec_shift(g, -self.rank))
                if v:
                    out.append(v)
        return out

    def lift(self, vec: dict):
        """Coefficients ``c`` with ``vec = sum c_i g_i`` modulo rels, or None."""
        r = self.gb.reduce(vec)
        if any(k < self.rank for (k, _) in r):
            return None
        p = self.ring.field.characteristic
        c = {(k - self.rank, e): -v for (k, e), v in r.items()}
        return normalize_vec(self.ring, _clean(c, p))


def syzygy_vecs(ring: Ring, vecs: list, rank: int) -> list:
    """Generators of the kernel of ``R^n -> R^rank`` sending ``e_i`` to ``vecs[i]``."""
    if not vecs:
        return []
    return Lifter(ring, rank, list(vecs)).relations()


def syzygies(vectors) -> list:
    """Kernel generators for polynomials or lists of polynomials (columns).

    Returns a list of columns, each a list of :class:`Poly`.
    """
    vectors = list(vectors)
    if not vectors:
        return []
    cols = [[v] if isinstance(v, Poly) else list(v) for v in vectors]
    ring = cols[0][0].ring
    rank = len(cols[0])
    out = syzygy_vecs(ring, [vec_from_polys(c) for c in cols], rank)
    return [vec_to_polys(ring, v, len(cols)) for v in out]


# ---------------------------------------------------------------- ideals


class Ideal:
    """Finitely generated ideal with a cached reduced GB."""

    def __init__(self, ring: Ring, gens=()):
        self.ring = ring
        self.gens = tuple(g for g in (ring(x) for x in gens) if g)
        self._gb = None

    @classmethod
    def parse(cls, ring: Ring, text: str) -> "Ideal":
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        parts = [t for t in _split_top(text) if t.strip()]
        return cls(ring, [ring.parse(t) for t in parts])

    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = GroebnerBasis.of(self.ring, [{(0, e): c for e, c in g.terms.items()}
                                                    for g in self.gens], 1)
        return self._gb

    def reduced_gens(self) -> list:
        """GB elements as ring elements (quotient relations dropped)."""
        out = []
        for g in self.gb().polys():
            if g and g not in out:
                out.append(g)
        return out

    def contains(self, p) -> bool:
        p = self.ring(p)
        return self.gb().contains({(0, e): c for e, c in p.terms.items()})

    __contains__ = contains

    def normal_form(self, p) -> Poly:
        p = self.ring(p)
        return normal_form(p, self.gb())

    def is_unit(self) -> bool:
        return self.gb().is_everything()

    def is_zero(self) -> bool:
        return not self.gens

    def issubset(self, other: "Ideal") -> bool:
        return all(other.contains(g) for g in self.gens)

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.issubset(other) and other.issubset(self)

    def __hash__(self):
        return hash((self.ring, tuple(freeze(g) for g in self.gb().elements)))

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [a * b for a in self.gens for b in other.gens])

    def dimension(self) -> int:
        return krull_dimension(self)[0]

    def codimension(self):
        return krull_dimension(self)[1]

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.reduced_gens()) + ")" if self.gens else "(0)"

    def __repr__(self):
        return f"Ideal{str(self)}"


def _split_top(text: str) -> list:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def intersect_submodules(ring: Ring, A: list, B: list, rank: int) -> list:
    """Generators of ``<A> intersect <B>`` inside ``R^rank``."""
    if not A or not B:
        return []
    p = ring.field.characteristic
    out = []
    for s in syzygy_vecs(ring, list(A) + list(B), rank):
        comps = vec_components(s)
        v: dict = {}
        for j, terms in comps.items():
            if j < len(A):
                v = vec_add(v, vec_mul(terms, A[j], p), p)
        v = normalize_vec(ring, v)
        if v:
            out.append(v)
    return out


def colon(N, m) -> Ideal:
    """``(N : m) = {r : r*m in N}``.

    ``N`` is an :class:`Ideal` or a pair ``(rank, list of vectors)``; ``m``
    a polynomial, a vector, or an :class:`Ideal` (intersection over its
    generators).
    """
    if isinstance(m, Ideal):
        result = None
        for g in m.gens:
            c = colon(N, g)
            result = c if result is None else Ideal(
                c.ring, [Poly(c.ring, {e: x for (_, e), x in v.items()})
                         for v in intersect_submodules(
                             c.ring, [_pv(g2) for g2 in result.gens], [_pv(g2) for g2 in c.gens], 1)])
        if result is None:
            ring = N.ring if isinstance(N, Ideal) else m.ring
            return Ideal(ring, [ring.one()])
        return result
    if isinstance(N, Ideal):
        ring, rank, gens = N.ring, 1, [_pv(g) for g in N.gens]
    else:
        ring, rank, gens = N[0], N[1], list(N[2])
    mv = _pv(m) if isinstance(m, Poly) else m
    if not mv:
        return Ideal(ring, [ring.one()])
    rel = Lifter(ring, rank, [mv], gens).relations()
    return Ideal(ring, [Poly(ring, {e: c for (_, e), c in v.items()}) for v in rel])


def _pv(p: Poly) -> dict:
    return {(0, e): c for e, c in p.terms.items()}


# ---------------------------------------------------------------- dimension


def _min_cover(supports: list, nvars: int) -> int:
    """Smallest variable set meeting every support (branching search)."""
    best = [nvars]

    def go(chosen: frozenset, size: int):
        if size >= best[0]:
            return
        for s in supports:
            if not (s & chosen):
                for x in sorted(s):
                    go(chosen | {x}, size + 1)
                return
        best[0] = size

    go(frozenset(), 0)
    return best[0]


def lead_dimension(lead_exps: list, nvars: int) -> int:
    """Dimension of ``S/in(J)`` from leading exponents; -1 for the unit ideal."""
    supports = [frozenset(i for i, a in enumerate(e) if a) for e in lead_exps]
    if any(not s for s in supports):
        return -1
    supports = sorted(set(supports), key=lambda s: (len(s), sorted(s)))
    return nvars - _min_cover(supports, nvars)


def krull_dimension(J: Ideal):
    """``(dim R/J, codim J)``; the unit ideal has dimension -1 and codimension INF."""
    ring = J.ring
    gb = J.gb() if ring.order.kind == "grevlex" else GroebnerBasis.of(
        ring, [_pv(g) for g in J.gens], 1, MonomialOrder("grevlex"))
    d = lead_dimension([e for (_, e) in gb.lead_terms()], ring.nvars)
    dim_r = ring_dimension(ring)
    if d < 0:
        return -1, INF
    return d, dim_r - d


def ring_dimension(ring: Ring) -> int:
    if not ring.quotient:
        return ring.nvars
    lead = [max(q, key=ring.order.key) for q in ring.quotient_gb()]
    return lead_dimension(lead, ring.nvars)


def codimension(J: Ideal):
    return krull_dimension(J)[1]


# ---------------------------------------------------------------- presentations


def _unit_entry(ring: Ring, vec: dict):
    """A ``(row, coeff)`` whose entry is a nonzero constant, else None."""
    comps = vec_components(vec)
    zero = (0,) * ring.nvars
    best = None
    for k in sorted(comps):
        terms = comps[k]
        if len(terms) == 1 and zero in terms:
            # prefer the sparsest column row to keep fill-in small
            return k, terms[zero]
    return best


def prune_presentation(ring: Ring, rank: int, rels: list):
    """Remove generators killed by relations with a unit entry.

    Returns ``(new_rank, new_rels, to_new, from_new)`` where ``to_new``
    (columns indexed by old generators) and ``from_new`` (columns indexed
    by new generators) are mutually inverse isomorphisms of the cokernels.
    """
    p = ring.field.characteristic
    field = ring.field
    zero = (0,) * ring.nvars
    one = field.one
    rels = [normalize_vec(ring, r) for r in rels if r]
    alive = list(range(rank))          # old generator indices still present
    # images of old generators, in terms of old indices (identity to start)
    to_new = {i: {(i, zero): one} for i in range(rank)}
    changed = True
    while changed:
        changed = False
        # pick the shortest column carrying a unit entry
        cands = []
        for ci, r in enumerate(rels):
            u = _unit_entry(ring, r)
            if u is not None:
                cands.append((len(r), ci, u))
        if not cands:
            break
        _, ci, (row, c) = min(cands)
        col = rels.pop(ci)
        cinv = field.inv(c)
        # e_row = -(1/c) * sum_{k != row} col_k e_k
        sub = {t: (-v * cinv) % p if p else -v * cinv for t, v in col.items() if t[0] != row}
        sub = _clean(sub, p)

        def substitute(v: dict) -> dict:
            comps = vec_components(v)
            terms = comps.pop(row, None)
            if terms is None:
                return v
            rest = {t: x for t, x in v.items() if t[0] != row}
            return normalize_vec(ring, vec_add(rest, vec_mul(terms, sub, p), p))

        rels = [r2 for r2 in (substitute(r) for r in rels) if r2]
        for i in to_new:
            to_new[i] = substitute(to_new[i])
        alive.remove(row)
        changed = True
    index = {old: new for new, old in enumerate(alive)}

    def renumber(v: dict) -> dict:
        return {(index[k], e): c for (k, e), c in v.items()}

    new_rels = []
    seen = set()
    for r in rels:
        r = renumber(r)
        f = freeze(r)
        if r and f not in seen:
            seen.add(f)
            new_rels.append(r)
    to_cols = [renumber(to_new[i]) for i in range(rank)]
    from_cols = [{(old, zero): one} for old in alive]
    return len(alive), new_rels, to_cols, from_cols


def minimize_columns(ring: Ring, rank: int, cols: list) -> list:
    """Drop columns lying in the span of the remaining ones.

    Columns are visited by descending degree so that for homogeneous input
    the result is a minimal generating set.
    """
    cols = [c for c in cols if c]
    uniq, seen = [], set()
    for c in cols:
        f = freeze(c)
        if f not in seen:
            seen.add(f)
            uniq.append(c)

    def deg(c):
        return max(sum(e) for (_, e) in c)

    order = sorted(range(len(uniq)), key=lambda i: (-deg(uniq[i]), i))
    keep = set(range(len(uniq)))
    for i in order:
        others = [uniq[j] for j in sorted(keep) if j != i]
        if others and GroebnerBasis.of(ring, others, rank).contains(uniq[i]):
            keep.discard(i)
    return [uniq[i] for i in sorted(keep)]


def grading(ring: Ring, rank: int, cols: list):
    """Generator degrees making every column homogeneous, or None."""
    if ring.quotient and not all(q.is_homogeneous() for q in ring.quotient):
        return None
    degs: list = [None] * rank
    entries = []
    for c in cols:
        comps = vec_components(c)
        col = []
        for k, terms in comps.items():
            ds = {sum(e) for e in terms}
            if len(ds) != 1:
                return None
            col.append((k, ds.pop()))
        entries.append(col)
    # propagate: deg(col) = deg(entry) + deg(row) constant within a column
    pending = True
    while pending:
        pending = False
        for col in entries:
            anchored = [(k, d) for k, d in col if degs[k] is not None]
            if not anchored:
                continue
            k0, d0 = anchored[0]
            total = d0 + degs[k0]
            for k, d in col:
                want = total - d
                if degs[k] is None:
                    degs[k] = want
                    pending = True
                elif degs[k] != want:
                    return None
        if not pending:
            for i, d in enumerate(degs):
                if d is None and any(i in {k for k, _ in col} for col in entries):
                    degs[i] = 0
                    pending = True
                    break
    return [d if d is not None else 0 for d in degs]


class FreeResolution:
    """``F_0 <- F_1 <- ...`` with ``maps[k]`` the columns of ``phi_{k+1}``.

    ``ranks[k]`` is the rank of ``F_k``; ``complete`` is True when the
    resolution provably stops (the last syzygy module vanished).
    """

    def __init__(self, ring: Ring, ranks: list, maps: list, minimal: bool, complete: bool):
        self.ring = ring
        self.ranks = ranks
        self.maps = maps
        self.minimal = minimal
        self.complete = complete

    @property
    def length(self) -> int:
        return len(self.maps)

    def betti(self) -> list:
        return list(self.ranks)

    def matrix(self, k: int) -> list:
        """``phi_k`` as a list of rows of :class:`Poly` (``k >= 1``)."""
        cols = self.maps[k - 1]
        rows = self.ranks[k - 1]
        table = [vec_to_polys(self.ring, c, rows) for c in cols]
        return [[table[j][i] for j in range(len(cols))] for i in range(rows)]

    def check_complex(self) -> bool:
        """Consecutive composites vanish."""
        for k in range(1, len(self.maps)):
            prev = self.maps[k - 1]
            for col in self.maps[k]:
                if mat_apply(self.ring, prev, col):
                    return False
        return True

    def check_exact(self) -> bool:
        """Every syzygy of ``phi_k`` lies in the image of ``phi_{k+1}``."""
        for k in range(len(self.maps)):
            syz = syzygy_vecs(self.ring, self.maps[k], self.ranks[k])
            nxt = self.maps[k + 1] if k + 1 < len(self.maps) else []
            if not nxt:
                if syz and (self.complete or k + 1 < len(self.maps)):
                    return False
                continue
            gb = GroebnerBasis.of(self.ring, nxt, self.ranks[k + 1])
            if not all(gb.contains(s) for s in syz):
                return False
        return True


class ResolutionError(ValueError):
    pass


def resolve(ring: Ring, rank: int, rels: list, length: int, minimal: bool = True) -> FreeResolution:
    """Free resolution of ``coker`` of the columns ``rels`` up to ``length`` maps.

    With ``minimal`` the input must be graded; generators and relations
    are pruned and made irredundant at each step.  Without it the same
    trimming is applied but minimality is not claimed.
    """
    if minimal and grading(ring, rank, rels) is None:
        raise ResolutionError("minimal resolution requested for inhomogeneous input")
    rank, rels, _, _ = prune_presentation(ring, rank, rels)
    ranks = [rank]
    maps: list = []
    cols = minimize_columns(ring, rank, rels)
    complete = False
    while True:
        if not cols:
            complete = True
            break
        if len(maps) >= length:
            break
        maps.append(cols)
        ranks.append(len(cols))
        nxt = syzygy_vecs(ring, cols, ranks[-2])
        cols = minimize_columns(ring, len(cols), nxt)
    return FreeResolution(ring, ranks, maps, minimal, complete)


def free_resolution(M, length: int, minimal: bool = True) -> FreeResolution:
    return resolve(M.ring, M.rank, list(M.rels), length, minimal)
