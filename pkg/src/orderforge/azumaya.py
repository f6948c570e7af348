"""Finite free R-algebras by structure constants, and twisted modules over them.

Twisted sheaves over the gerbe of an Azumaya algebra ``A`` are handled
through their Morita-equivalent description as left ``A``-modules.  Each
such module is carried twice: as a presentation over ``A`` and as the
unfolded presentation over ``R`` obtained from regular representations.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .algebra import Poly, Ring, parse_expression
from .groebner import INF, Ideal, krull_dimension, syzygy_vecs, vec_from_polys, vec_to_polys
from .fpmod import FPModule, det, hom, subquotient


class NotAssociative(ValueError):
    pass


class NoInvolution(ValueError):
    pass


class DegenerateInput(ValueError):
    pass


class SCAlgebra:
    """Free R-algebra with basis ``names`` and ``table[i][j] = coords(e_i * e_j)``."""

    def __init__(self, ring: Ring, names, table, unit=None, involution=None, label: str = ""):
        self.ring = ring
        self.names = tuple(names)
        self.rank = len(self.names)
        clash = set(self.names) & set(ring.variables)
        if clash:
            raise ValueError(f"basis names clash with ring variables: {sorted(clash)}")
        self.table = [[tuple(ring(x) for x in table[i][j]) for j in range(self.rank)]
                      for i in range(self.rank)]
        if unit is None:
            unit = [1] + [0] * (self.rank - 1)
        self.unit = tuple(ring(x) for x in unit)
        self.involution = None if involution is None else [
            [ring(x) for x in row] for row in involution]
        self.label = label or f"algebra of rank {self.rank}"
        self.certify()

    # -- elements
    def elem(self, coords) -> "AlgElem":
        return AlgElem(self, tuple(self.ring(c) for c in coords))

    def basis(self, i: int) -> "AlgElem":
        return self.elem([1 if k == i else 0 for k in range(self.rank)])

    def one(self) -> "AlgElem":
        return AlgElem(self, self.unit)

    def zero(self) -> "AlgElem":
        return self.elem([0] * self.rank)

    def scalar(self, r) -> "AlgElem":
        r = self.ring(r)
        return AlgElem(self, tuple(r * c for c in self.unit))

    def parse(self, text: str) -> "AlgElem":
        symbols = {name: self.scalar(self.ring.var(name)) for name in self.ring.variables}
        symbols.update({name: self.basis(i) for i, name in enumerate(self.names)})
        value = parse_expression(text, symbols, self.scalar)
        if isinstance(value, Poly):
            value = self.scalar(value)
        return value

    def mul_coords(self, a, b) -> tuple:
        out = [self.ring.zero()] * self.rank
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                for k, t in enumerate(self.table[i][j]):
                    if t:
                        out[k] = out[k] + c * t
        return tuple(out)

    # -- certificates
    def certify(self):
        """Exhaustive associativity and unit checks; involution identities when present."""
        n = self.rank
        basis = [self.basis(i) for i in range(n)]
        for a, b, c in product(basis, repeat=3):
            if (a * b) * c != a * (b * c):
                raise NotAssociative(f"({a}*{b})*{c} != {a}*({b}*{c})")
        one = self.one()
        for a in basis:
            if one * a != a or a * one != a:
                raise NotAssociative("unit element does not act as identity")
        if self.involution is not None:
            for a, b in product(basis, repeat=2):
                if (a * b).conj() != b.conj() * a.conj():
                    raise ValueError("involution is not an anti-automorphism")
            for i in range(n):
                for j in range(i, n):
                    q = basis[i] if i == j else basis[i] + basis[j]
                    if not (q * q.conj()).is_scalar():
                        raise ValueError("q * conj(q) is not central")
        return True

    def __repr__(self):
        return f"SCAlgebra({self.label})"


class AlgElem:
    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: SCAlgebra, coords: tuple):
        if len(coords) != algebra.rank:
            raise ValueError("coordinate vector has the wrong length")
        self.algebra = algebra
        self.coords = coords

    def _lift(self, other):
        if isinstance(other, AlgElem):
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        other = self._lift(other)
        return AlgElem(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return AlgElem(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return AlgElem(self.algebra, tuple(-a for a in self.coords))

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            return AlgElem(self.algebra, self.algebra.mul_coords(self.coords, other.coords))
        r = self.algebra.ring(other)
        return AlgElem(self.algebra, tuple(a * r for a in self.coords))

    def __rmul__(self, other):
        r = self.algebra.ring(other)
        return AlgElem(self.algebra, tuple(r * a for a in self.coords))

    def __pow__(self, n: int):
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, AlgElem):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __bool__(self):
        return any(self.coords)

    def conj(self) -> "AlgElem":
        inv = self.algebra.involution
        if inv is None:
            raise NoInvolution("algebra has no involution")
        n = self.algebra.rank
        return AlgElem(self.algebra, tuple(
            sum((inv[r][c] * self.coords[c] for c in range(n)), self.algebra.ring.zero())
            for r in range(n)))

    def is_scalar(self) -> bool:
        unit = self.algebra.unit
        k = next(i for i, c in enumerate(unit) if c)
        lam = self.coords[k] / unit[k]
        return all(self.coords[i] == lam * unit[i] for i in range(self.algebra.rank))

    def __str__(self):
        A = self.algebra
        one = A.ring.one()
        unit_pos = [k for k, c in enumerate(A.unit) if c]
        scalar_slot = unit_pos[0] if len(unit_pos) == 1 and A.unit[unit_pos[0]] == one else None
        parts = []
        for k, (name, c) in enumerate(zip(A.names, self.coords)):
            if not c:
                continue
            s = str(c)
            if k == scalar_slot:
                parts.append(s)
            elif s == "1":
                parts.append(name)
            elif s == "-1":
                parts.append("-" + name)
            elif len(c.terms) == 1:
                parts.append(f"{s}*{name}")
            else:
                parts.append(f"({s})*{name}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self):
        return f"AlgElem({str(self)!r})"


# ---------------------------------------------------------------- constructions


def quaternion_algebra(ring: Ring, a, b) -> SCAlgebra:
    """``(a, b)``: basis ``1, i, j, k`` with ``i^2 = a``, ``j^2 = b``, ``ij = k = -ji``."""
    if ring.field.characteristic == 2:
        raise ValueError("quaternion algebras need characteristic != 2")
    a, b = ring(a), ring(b)
    for x in (a, b):
        if not x or not Ideal(ring, [x]).is_unit():
            raise ValueError(f"{x} is not a unit of {ring}")
    z, o = ring.zero(), ring.one()
    ab = a * b

    def v(c1=z, ci=z, cj=z, ck=z):
        return (c1, ci, cj, ck)

    table = [
        [v(c1=o), v(ci=o), v(cj=o), v(ck=o)],
        [v(ci=o), v(c1=a), v(ck=o), v(cj=a)],
        [v(cj=o), v(ck=-o), v(c1=b), v(ci=-b)],
        [v(ck=o), v(cj=-a), v(ci=b), v(c1=-ab)],
    ]
    conj = [[o, z, z, z], [z, -o, z, z], [z, z, -o, z], [z, z, z, -o]]
    return SCAlgebra(ring, ("1", "i", "j", "k"), table, involution=conj,
                     label=f"quaternion({a}, {b})")


def dual_numbers(ring: Ring) -> SCAlgebra:
    """``R[e]/(e^2)``, the basic non-Azumaya free algebra."""
    z, o = ring.zero(), ring.one()
    table = [[(o, z), (z, o)], [(z, o), (z, z)]]
    return SCAlgebra(ring, ("1", "e"), table, label="R[e]/(e^2)")


def regular_representation(q: AlgElem, side: str = "left") -> list:
    """Matrix (rows) of ``x -> q*x`` (``left``) or ``x -> x*q`` (``right``)."""
    A = q.algebra
    n = A.rank
    cols = []
    for j in range(n):
        e = A.basis(j)
        cols.append((q * e if side == "left" else e * q).coords)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def reduced_norm_deg2(q: AlgElem) -> Poly:
    """``Nrd(q) = q * conj(q)`` read off the unit coordinate."""
    A = q.algebra
    if A.involution is None:
        raise NoInvolution("reduced norm needs the degree-2 involution")
    n = q * q.conj()
    if not n.is_scalar():
        raise ValueError("q * conj(q) is not central")
    k = next(i for i, c in enumerate(A.unit) if c)
    return n.coords[k] / A.unit[k]


@dataclass
class AzumayaReport:
    is_azumaya: bool
    determinant: Poly
    locus: Ideal
    codim: object

    def __bool__(self):
        return self.is_azumaya

    def to_dict(self):
        return {"azumaya": self.is_azumaya, "determinant": str(self.determinant),
                "locus": str(self.locus), "codim": "inf" if self.codim == INF else self.codim}


def enveloping_matrix(A: SCAlgebra) -> list:
    """``A (x) A^op -> End_R(A)``, ``a (x) b -> (x -> a x b)``, as an ``n^2 x n^2`` matrix."""
    n = A.rank
    basis = [A.basis(i) for i in range(n)]
    cols = []
    for i in range(n):
        for j in range(n):
            col = []
            for l in range(n):
                img = (basis[i] * basis[l] * basis[j]).coords
                col.extend(img)
            cols.append(col)
    return [[cols[c][r] for c in range(n * n)] for r in range(n * n)]


def azumaya_test(A: SCAlgebra) -> AzumayaReport:
    """Azumaya exactly where the enveloping map's determinant is a unit."""
    d = det(enveloping_matrix(A))
    locus = Ideal(A.ring, [d])
    _, codim = krull_dimension(locus)
    return AzumayaReport(locus.is_unit(), d, locus, codim)


# ---------------------------------------------------------------- twisted modules


class TwistedModule:
    """``coker(A -> A^2, m -> (m f, m g))`` as a left ``A``-module.

    ``unfolded`` is the same module over ``R``: rank ``2n`` with relation
    columns ``[R_f; R_g]`` (right regular representations).
    """

    def __init__(self, algebra: SCAlgebra, f: AlgElem, g: AlgElem):
        self.algebra = algebra
        self.f = f
        self.g = g
        n = algebra.rank
        Rf = regular_representation(f, "right")
        Rg = regular_representation(g, "right")
        self.stacked = Rf + Rg
        cols = [vec_from_polys([self.stacked[r][c] for r in range(2 * n)]) for c in range(n)]
        self.unfolded = FPModule(algebra.ring, 2 * n, cols)
        self.injective = None
        self.injective_by = None

    @property
    def algebra_presentation(self) -> list:
        return [[self.f, self.g]]


def twisted_cokernel(A: SCAlgebra, f: AlgElem, g: AlgElem) -> TwistedModule:
    if not f and not g:
        raise DegenerateInput("f and g are both zero")
    E = TwistedModule(A, f, g)
    if A.involution is not None:
        for name, x in (("f", f), ("g", g)):
            if reduced_norm_deg2(x):
                E.injective, E.injective_by = True, f"Nrd({name}) != 0"
                break
    if E.injective is None:
        n = A.rank
        cols = [vec_from_polys([E.stacked[r][c] for r in range(2 * n)]) for c in range(n)]
        E.injective = not syzygy_vecs(A.ring, cols, 2 * n)
        E.injective_by = "syzygy kernel"
    return E


class EndAlgebra:
    """An R-algebra carried as an f.p. module plus composition on ambient vectors.

    ``compose(x, y)`` returns the ambient vector of ``x o y``.  The product
    table expresses ``g_p o g_q`` in the generators.
    """

    def __init__(self, module: FPModule, compose, unit_vector: dict, label: str = ""):
        self.module = module
        self.ring = module.ring
        self._compose = compose
        self.unit_vector = unit_vector
        self.label = label
        self._table: dict = {}
        self.unit = module.lift(unit_vector)
        if self.unit is None:
            raise ValueError("identity is not in the endomorphism module")

    @property
    def ngens(self) -> int:
        return self.module.rank

    def gen_vector(self, p: int) -> dict:
        return self.module.ambient[1][p]

    def product(self, p: int, q: int) -> dict:
        """Coordinates of ``g_p o g_q``."""
        key = (p, q)
        if key not in self._table:
            v = self._compose(self.gen_vector(p), self.gen_vector(q))
            c = self.module.lift(v)
            if c is None:
                raise ValueError("composition left the endomorphism module")
            self._table[key] = c
        return self._table[key]

    def left_mult_matrix(self, p: int) -> list:
        """Columns: coordinates of ``g_p o g_q`` for each generator ``q``."""
        return [self.product(p, q) for q in range(self.ngens)]

    def certify(self, max_triples: int = 216) -> bool:
        """Unit, well-definedness on relations, associativity on generator triples."""
        s = self.ngens
        M = self.module
        arank, agens, arels = M.ambient
        from .groebner import GroebnerBasis
        gb = GroebnerBasis.of(self.ring, list(arels), arank) if arels else None

        def zero(v):
            return not v or (gb is not None and gb.contains(v))

        def sub(a, b):
            from .groebner import vec_add
            return vec_add(a, b, self.ring.field.characteristic, -1)

        for p in range(s):
            g = self.gen_vector(p)
            if not zero(sub(self._compose(self.unit_vector, g), g)):
                return False
            if not zero(sub(self._compose(g, self.unit_vector), g)):
                return False
        for rel in M.rels:
            rv = M.element(rel)
            for q in range(s):
                g = self.gen_vector(q)
                if not zero(self._compose(rv, g)) or not zero(self._compose(g, rv)):
                    return False
        count = 0
        for p, q, r in product(range(s), repeat=3):
            if count >= max_triples:
                break
            count += 1
            a = self._compose(self._compose(self.gen_vector(p), self.gen_vector(q)), self.gen_vector(r))
            b = self._compose(self.gen_vector(p), self._compose(self.gen_vector(q), self.gen_vector(r)))
            if not zero(sub(a, b)):
                return False
        return True


def twisted_end(E: TwistedModule) -> EndAlgebra:
    """``End_A(E)``: pairs ``(psi, lambda)`` with ``psi`` an ``A``-matrix on the two generators.

    ``psi(eps_i) = sum_j a_ij eps_j``; ``psi`` respects the relation
    ``f eps_1 + g eps_2`` iff ``(f a11 + g a21, f a12 + g a22) = (lam f, lam g)``
    for some ``lam``.  Maps with ``(a_i1, a_i2)`` in ``A (f, g)`` are zero.
    """
    if not E.injective:
        raise DegenerateInput("twisted module presentation is not injective")
    A = E.algebra
    ring = A.ring
    n = A.rank
    f, g = E.f, E.g
    cols = []
    # unknown order: a11, a12, a21, a22, lam (n coordinates each)
    for block in range(5):
        for t in range(n):
            e = A.basis(t)
            v: dict = {}
            if block == 0:
                parts = [((f * e).coords, 0)]
            elif block == 1:
                parts = [((f * e).coords, n)]
            elif block == 2:
                parts = [((g * e).coords, 0)]
            elif block == 3:
                parts = [((g * e).coords, n)]
            else:
                parts = [(tuple(-c for c in (e * f).coords), 0), (tuple(-c for c in (e * g).coords), n)]
            for coords, off in parts:
                for k, c in enumerate(coords):
                    for ex, x in c.terms.items():
                        v[(off + k, ex)] = x
            cols.append(v)
    sols = syzygy_vecs(ring, cols, 2 * n)
    K = []
    for s in sols:
        k = {(c, e): x for (c, e), x in s.items() if c < 4 * n}
        if k:
            K.append(k)
    trivial = []
    for row in range(2):
        for t in range(n):
            e = A.basis(t)
            v: dict = {}
            for off, x in ((0, e * f), (n, e * g)):
                for k, c in enumerate(x.coords):
                    for ex, val in c.terms.items():
                        v[(row * 2 * n + off + k, ex)] = val
            trivial.append(v)
    module = subquotient(ring, 4 * n, K, trivial)

    def to_mat(vec):
        coords = [[ring.zero()] * n for _ in range(4)]
        rows = [dict() for _ in range(4 * n)]
        for (c, e), x in vec.items():
            rows[c][e] = x
        for c in range(4 * n):
            coords[c // n][c % n] = Poly(ring, rows[c], _normal=True)
        a = [A.elem(c) for c in coords]
        return [[a[0], a[1]], [a[2], a[3]]]

    def to_vec(mat):
        v = {}
        flat = [mat[0][0], mat[0][1], mat[1][0], mat[1][1]]
        for blk, x in enumerate(flat):
            for k, c in enumerate(x.coords):
                for ex, val in c.terms.items():
                    v[(blk * n + k, ex)] = val
        return v

    def compose(x, y):
        # row-vector convention: matrix of x o y is M_y * M_x
        X, Y = to_mat(x), to_mat(y)
        P = [[Y[i][0] * X[0][j] + Y[i][1] * X[1][j] for j in range(2)] for i in range(2)]
        return to_vec(P)

    one, zero = A.one(), A.zero()
    unit = to_vec([[one, zero], [zero, one]])
    return EndAlgebra(module, compose, unit, label="End_A(E)")


def module_end(N: FPModule) -> EndAlgebra:
    """``End_R(N)`` from :func:`hom`, composition as matrix product on generators."""
    H = hom(N, N)
    ring = N.ring
    b = N.rank
    p = ring.field.characteristic
    from .groebner import vec_add, vec_mul, vec_components

    def compose(x, y):
        X = H.vector_to_cols(x)
        Y = H.vector_to_cols(y)
        out = []
        for col in Y:
            acc: dict = {}
            for j, terms in vec_components(col).items():
                acc = vec_add(acc, vec_mul(terms, X[j], p), p)
            out.append(acc)
        from .groebner import normalize_vec
        return normalize_vec(ring, H.cols_to_vector(out))

    zero_exp = (0,) * ring.nvars
    unit = H.cols_to_vector([{(j, zero_exp): ring.field.one} for j in range(b)])
    return EndAlgebra(H, compose, unit, label="End_R(N)")


def sc_algebra_as_order(A: SCAlgebra) -> EndAlgebra:
    """View a free structure-constant algebra through the same interface as an End algebra."""
    ring = A.ring
    n = A.rank
    zero_exp = (0,) * ring.nvars
    gens = [{(i, zero_exp): ring.field.one} for i in range(n)]
    module = FPModule(ring, n, (), ambient=(n, gens, []))

    def to_elem(v):
        return A.elem(vec_to_polys(ring, v, n))

    def compose(x, y):
        return vec_from_polys((to_elem(x) * to_elem(y)).coords)

    return EndAlgebra(module, compose, vec_from_polys(A.unit), label=A.label)
