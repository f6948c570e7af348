"""Finitely presented modules: kernels, Hom, Ext, duals, Fitting loci.

A module is the cokernel of a matrix ``R^a -> R^b`` given by its ``a``
relation columns.  Submodules and maps are carried as matrices; modules
are only ever compared through maps.
"""
from __future__ import annotations

from itertools import combinations

from .algebra import Poly, Ring
from .groebner import (
    INF,
    GroebnerBasis,
    Ideal,
    Lifter,
    freeze,
    krull_dimension,
    mat_apply,
    minimize_columns,
    normalize_vec,
    prune_presentation,
    resolve,
    vec_from_polys,
    vec_to_polys,
)


class NotADomain(ValueError):
    pass


class IncompatibleMap(ValueError):
    pass


def _unit_vec(ring: Ring, k: int) -> dict:
    return {(k, (0,) * ring.nvars): ring.field.one}


def _block(vecs: list, rank: int, copies: int) -> list:
    """``vecs`` repeated on each of ``copies`` diagonal blocks of size ``rank``."""
    out = []
    for b in range(copies):
        off = b * rank
        for v in vecs:
            out.append({(k + off, e): c for (k, e), c in v.items()})
    return out


class FPModule:
    """``coker(R^a -> R^b)`` with relation columns ``rels`` in ``R^rank``.

    When the module was built as a subquotient of a free module, ``ambient``
    holds ``(rank, gens, rels)`` of that realization so that elements can be
    written as concrete vectors and lifted back to coordinates.
    """

    def __init__(self, ring: Ring, rank: int, rels=(), ambient=None, name: str | None = None):
        self.ring = ring
        self.rank = rank
        self.rels = tuple(r for r in (normalize_vec(ring, r) for r in rels) if r)
        self.ambient = ambient
        self.name = name
        self._gb = None
        self._lifter = None

    # -- constructors
    @classmethod
    def free(cls, ring: Ring, n: int) -> "FPModule":
        return cls(ring, n, (), name=f"R^{n}")

    @classmethod
    def from_matrix(cls, ring: Ring, rows) -> "FPModule":
        """Cokernel of a matrix given as rows (entries Poly or text)."""
        rows = [[ring(x) for x in row] for row in rows]
        b = len(rows)
        a = len(rows[0]) if rows else 0
        if any(len(r) != a for r in rows):
            raise ValueError("ragged presentation matrix")
        cols = [vec_from_polys([rows[i][j] for i in range(b)]) for j in range(a)]
        return cls(ring, b, cols)

    @classmethod
    def cyclic(cls, I: Ideal) -> "FPModule":
        """``R/I``."""
        return cls(I.ring, 1, [{(0, e): c for e, c in g.terms.items()} for g in I.gens],
                   name=f"R/{I}")

    @classmethod
    def from_ideal(cls, I: Ideal) -> "FPModule":
        """The ideal ``I`` as an R-module (generators ``I.gens``)."""
        return submodule(I.ring, 1, [{(0, e): c for e, c in g.terms.items()} for g in I.gens],
                         prune=False)

    # -- basic structure
    @property
    def ngens(self) -> int:
        return self.rank

    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = GroebnerBasis.of(self.ring, list(self.rels), self.rank)
        return self._gb

    def reduce(self, vec: dict) -> dict:
        return normalize_vec(self.ring, self.gb().reduce(vec))

    def is_zero_element(self, vec: dict) -> bool:
        return not self.gb().reduce(vec)

    def is_zero(self) -> bool:
        return self.rank == 0 or self.gb().is_everything()

    def matrix(self) -> list:
        """Presentation matrix as rows of :class:`Poly` (``rank x len(rels)``)."""
        cols = [vec_to_polys(self.ring, c, self.rank) for c in self.rels]
        return [[cols[j][i] for j in range(len(cols))] for i in range(self.rank)]

    def direct_sum(self, other: "FPModule") -> "FPModule":
        off = self.rank
        rels = list(self.rels) + [{(k + off, e): c for (k, e), c in r.items()} for r in other.rels]
        return FPModule(self.ring, self.rank + other.rank, rels)

    def __add__(self, other):
        return self.direct_sum(other)

    def power(self, n: int) -> "FPModule":
        return FPModule(self.ring, self.rank * n, _block(list(self.rels), self.rank, n))

    def quotient_by(self, vecs) -> "FPModule":
        return FPModule(self.ring, self.rank, list(self.rels) + [v for v in vecs if v])

    def mod_element(self, r: Poly) -> "FPModule":
        """``M / rM``."""
        return self.quotient_by([{(k, e): c for e, c in r.terms.items()} for k in range(self.rank)])

    def mod_ideal(self, I: Ideal) -> "FPModule":
        """``M / IM``."""
        return self.quotient_by([{(k, e): c for e, c in g.terms.items()}
                                 for g in I.gens for k in range(self.rank)])

    def prune(self):
        """Equivalent presentation without unit relations.

        Returns ``(N, to_N, from_N)`` with mutually inverse maps.
        """
        n, rels, to_cols, from_cols = prune_presentation(self.ring, self.rank, list(self.rels))
        rels = minimize_columns(self.ring, n, rels)
        amb = None
        if self.ambient is not None:
            arank, agens, arels = self.ambient
            alive = [next(k for (k, _) in c) for c in from_cols]
            amb = (arank, [agens[k] for k in alive], arels)
        N = FPModule(self.ring, n, rels, ambient=amb)
        return N, ModuleMap(self, N, to_cols, check=False), ModuleMap(N, self, from_cols, check=False)

    def pruned(self) -> "FPModule":
        return self.prune()[0]

    def is_free(self) -> bool:
        return not self.pruned().rels

    # -- ambient realization
    def element(self, coeffs: dict) -> dict:
        """Ambient vector of the element with generator coordinates ``coeffs``."""
        arank, agens, _ = self.ambient
        return mat_apply(self.ring, agens, coeffs)

    def lift(self, vec: dict):
        """Generator coordinates of an ambient vector, or None if outside."""
        if self._lifter is None:
            arank, agens, arels = self.ambient
            self._lifter = Lifter(self.ring, arank, list(agens), list(arels))
        return self._lifter.lift(vec)

    def __repr__(self):
        return f"FPModule(rank={self.rank}, relations={len(self.rels)})"


def subquotient(ring: Ring, rank: int, gens: list, rels: list = (), prune: bool = True) -> FPModule:
    """Module generated by ``gens`` inside ``R^rank / <rels>``."""
    rels = [r for r in rels if r]
    rgb = GroebnerBasis.of(ring, rels, rank) if rels else None
    clean, seen = [], set()
    for g in gens:
        g = normalize_vec(ring, rgb.reduce(g)) if rgb else normalize_vec(ring, g)
        f = freeze(g)
        if g and f not in seen:
            seen.add(f)
            clean.append(g)
    if prune and len(clean) > 1:
        # drop generators that are combinations of the others
        keep = list(range(len(clean)))
        for i in sorted(range(len(clean)), key=lambda i: (-_degree(clean[i]), i), reverse=False):
            others = [clean[j] for j in keep if j != i] + rels
            if others and GroebnerBasis.of(ring, others, rank).contains(clean[i]):
                keep.remove(i)
        clean = [clean[i] for i in keep]
    relvecs = Lifter(ring, rank, clean, rels).relations() if clean else []
    M = FPModule(ring, len(clean), relvecs, ambient=(rank, clean, rels))
    if prune:
        M = M.pruned()
    return M


def _degree(v: dict) -> int:
    return max((sum(e) for (_, e) in v), default=0)


def submodule(ring: Ring, rank: int, gens: list, prune: bool = True) -> FPModule:
    return subquotient(ring, rank, gens, (), prune)


class ModuleMap:
    """``source -> target`` given by images of source generators (target ambient vectors)."""

    def __init__(self, source: FPModule, target: FPModule, cols, check: bool = True):
        self.source = source
        self.target = target
        self.cols = [normalize_vec(source.ring, c) for c in cols]
        if len(self.cols) != source.rank:
            raise IncompatibleMap("one image per source generator required")
        if check and not self.is_well_defined():
            raise IncompatibleMap("source relations do not map into target relations")

    @classmethod
    def from_matrix(cls, source: FPModule, target: FPModule, rows) -> "ModuleMap":
        ring = source.ring
        rows = [[ring(x) for x in row] for row in rows]
        cols = [vec_from_polys([rows[i][j] for i in range(target.rank)]) for j in range(source.rank)]
        return cls(source, target, cols)

    @classmethod
    def identity(cls, M: FPModule) -> "ModuleMap":
        return cls(M, M, [_unit_vec(M.ring, k) for k in range(M.rank)], check=False)

    @classmethod
    def scalar(cls, M: FPModule, r: Poly) -> "ModuleMap":
        return cls(M, M, [{(k, e): c for e, c in r.terms.items()} for k in range(M.rank)],
                   check=False)

    def is_well_defined(self) -> bool:
        return all(self.target.is_zero_element(self.apply(r)) for r in self.source.rels)

    def apply(self, vec: dict) -> dict:
        return mat_apply(self.source.ring, self.cols, vec)

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self o other``."""
        return ModuleMap(other.source, self.target, [self.apply(c) for c in other.cols], check=False)

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(c) for c in self.cols)

    def matrix(self) -> list:
        cols = [vec_to_polys(self.source.ring, c, self.target.rank) for c in self.cols]
        return [[cols[j][i] for j in range(len(cols))] for i in range(self.target.rank)]

    def kernel_vectors(self) -> list:
        """Generators of the kernel as vectors in ``R^{source.rank}``, reduced mod source relations."""
        ring = self.source.ring
        if not self.cols:
            return []
        K = Lifter(ring, self.target.rank, self.cols, list(self.target.rels)).relations()
        out = []
        for k in K:
            k = self.source.reduce(k)
            if k:
                out.append(k)
        return out

    def is_injective(self) -> bool:
        return not self.kernel_vectors()

    def is_surjective(self) -> bool:
        return cokernel(self).is_zero()


def kernel(f: ModuleMap):
    """``(ker f, inclusion)``; ``f o inclusion = 0`` is checked."""
    src = f.source
    K = f.kernel_vectors()
    M = subquotient(src.ring, src.rank, K, list(src.rels))
    inc = ModuleMap(M, src, list(M.ambient[1]), check=False)
    if not f.compose(inc).is_zero():
        raise AssertionError("kernel inclusion does not compose to zero")
    return M, inc


def image(f: ModuleMap) -> FPModule:
    return subquotient(f.source.ring, f.target.rank, f.cols, list(f.target.rels))


def cokernel(f: ModuleMap) -> FPModule:
    return f.target.quotient_by(f.cols)


# ---------------------------------------------------------------- Hom and Ext


def _right_mult_cols(phi_cols: list, rows_src: int, bN: int) -> list:
    """Columns of ``X -> X*phi`` on ``N^{rows_src}`` (``X`` is ``bN x rows_src``, column-major)."""
    out = []
    for j in range(rows_src):
        for r in range(bN):
            v: dict = {}
            for c, col in enumerate(phi_cols):
                for (k, e), x in col.items():
                    if k == j:
                        v[(c * bN + r, e)] = x
            out.append(v)
    return out


class HomModule(FPModule):
    """``Hom(M, N)`` realized inside ``N^{M.rank}``.

    Generator ``k`` is the map whose matrix has columns
    ``gen_matrix(k)``; :meth:`to_map` and :meth:`from_map` convert.
    """

    def __init__(self, base: FPModule, source: FPModule, target: FPModule):
        super().__init__(base.ring, base.rank, base.rels, ambient=base.ambient)
        self.source = source
        self.target = target

    def gen_vector(self, k: int) -> dict:
        return self.ambient[1][k]

    def vector_to_cols(self, vec: dict) -> list:
        bN = self.target.rank
        cols = [dict() for _ in range(self.source.rank)]
        for (k, e), c in vec.items():
            cols[k // bN][(k % bN, e)] = c
        return cols

    def cols_to_vector(self, cols: list) -> dict:
        bN = self.target.rank
        return {(j * bN + k, e): c for j, col in enumerate(cols) for (k, e), c in col.items()}

    def to_map(self, coeffs: dict) -> ModuleMap:
        return ModuleMap(self.source, self.target, self.vector_to_cols(self.element(coeffs)),
                         check=False)

    def gen_map(self, k: int) -> ModuleMap:
        return ModuleMap(self.source, self.target, self.vector_to_cols(self.gen_vector(k)),
                         check=False)

    def from_map(self, f: ModuleMap):
        return self.lift(self.cols_to_vector(f.cols))


def hom(M: FPModule, N: FPModule) -> HomModule:
    """``Hom_R(M, N)`` as the kernel of ``N^b -> N^a``, ``X -> X*phi_M``."""
    ring = M.ring
    if N.ring != ring:
        raise ValueError("modules over different rings")
    bN, bM = N.rank, M.rank
    amb_rels = _block(list(N.rels), bN, bM)
    if bM == 0 or bN == 0:
        base = FPModule(ring, 0, (), ambient=(bN * bM, [], amb_rels))
        return HomModule(base, M, N)
    delta = _right_mult_cols(list(M.rels), bM, bN)
    if M.rels:
        tgt_rels = _block(list(N.rels), bN, len(M.rels))
        K = Lifter(ring, bN * len(M.rels), delta, tgt_rels).relations()
    else:
        K = [_unit_vec(ring, k) for k in range(bN * bM)]
    base = subquotient(ring, bN * bM, K, amb_rels)
    return HomModule(base, M, N)


def dual(M: FPModule) -> HomModule:
    return hom(M, FPModule.free(M.ring, 1))


def _resolution_for(M: FPModule, length: int):
    from .groebner import grading
    minimal = grading(M.ring, M.rank, list(M.rels)) is not None
    return resolve(M.ring, M.rank, list(M.rels), length, minimal=minimal)


class ExtError(ValueError):
    pass


def ext(i: int, M: FPModule, N: FPModule, resolution=None) -> FPModule:
    """``Ext^i_R(M, N)`` from a free resolution of ``M``."""
    if i < 0:
        raise ValueError("Ext index must be non-negative")
    ring = M.ring
    F = resolution or _resolution_for(M, i + 1)
    if len(F.maps) < i + 1 and not F.complete:
        raise ExtError(f"resolution stopped before length {i + 1}")
    ranks = F.ranks
    if i >= len(ranks):
        return FPModule(ring, 0)
    bN = N.rank
    ri = ranks[i]
    if ri == 0 or bN == 0:
        return FPModule(ring, 0)
    amb_rels = _block(list(N.rels), bN, ri)
    # kernel of delta_i : N^{r_i} -> N^{r_{i+1}}
    if i < len(F.maps):
        phi = F.maps[i]
        delta = _right_mult_cols(phi, ri, bN)
        K = Lifter(ring, bN * len(phi), delta, _block(list(N.rels), bN, len(phi))).relations()
    else:
        K = [_unit_vec(ring, k) for k in range(bN * ri)]
    # image of delta_{i-1} : N^{r_{i-1}} -> N^{r_i}
    img = _right_mult_cols(F.maps[i - 1], ranks[i - 1], bN) if i > 0 else []
    return subquotient(ring, bN * ri, K, img + amb_rels)


# ---------------------------------------------------------------- biduality


class BidualReport:
    def __init__(self, M, Mdual, Mbidual, eta, kernel_vectors, coker):
        self.module = M
        self.Mdual = Mdual
        self.Mbidual = Mbidual
        self.eta = eta
        self.kernel_vectors = kernel_vectors
        self.cokernel = coker
        self.is_injective = not kernel_vectors
        self.is_surjective = coker.is_zero()
        self.is_iso = self.is_injective and self.is_surjective

    def __iter__(self):
        return iter((self.Mdual, self.Mbidual, self.eta, self.is_injective, self.is_iso))


def bidual_map(M: FPModule) -> BidualReport:
    """The natural map ``M -> M**`` with its kernel and cokernel."""
    Md = dual(M)
    Mdd = dual(Md)
    s = Md.rank
    cols = []
    for j in range(M.rank):
        # evaluation at e_j: psi_t -> psi_t(e_j)
        v: dict = {}
        for t in range(s):
            for (k, e), c in Md.gen_vector(t).items():
                if k == j:
                    v[(t, e)] = c
        coords = Mdd.lift(v) if Mdd.rank else {}
        if coords is None:
            raise AssertionError("evaluation map is not a homomorphism of the dual")
        cols.append(coords)
    eta = ModuleMap(M, Mdd, cols, check=False)
    return BidualReport(M, Md, Mdd, eta, eta.kernel_vectors(), cokernel(eta))


# ---------------------------------------------------------------- determinants and ranks


def _ambient_rows(ring: Ring, rows) -> list:
    amb = ring.ambient
    return [[Poly(amb, x.terms, _normal=True) if isinstance(x, Poly) else amb(x) for x in row]
            for row in rows]


def det(rows) -> Poly:
    """Determinant by fraction-free elimination (exact division in the ambient ring)."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    ring = rows[0][0].ring
    A = _ambient_rows(ring, rows)
    amb = ring.ambient
    sign = 1
    prev = amb.one()
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if A[i][k]), None)
        if piv is None:
            return ring.zero()
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            for j in range(k + 1, n):
                num = akk * A[i][j] - aik * A[k][j]
                A[i][j] = num.exact_div(prev) if not prev.is_constant() else num / prev
        prev = akk
    d = A[n - 1][n - 1] if sign == 1 else -A[n - 1][n - 1]
    return ring(Poly(ring, d.terms))


def matrix_rank(ring: Ring, rows) -> int:
    """Rank over the fraction field (the ring must be a domain)."""
    if not ring.domain:
        raise NotADomain(f"{ring} is not known to be a domain")
    if not rows or not rows[0]:
        return 0
    A = _ambient_rows(ring, rows)
    amb = ring.ambient
    m, n = len(A), len(A[0])

    def nonzero(p: Poly) -> bool:
        return bool(p) and (not ring.quotient or bool(ring(Poly(ring, p.terms))))

    prev = amb.one()
    rank = 0
    r = 0
    cols = list(range(n))
    for c in cols:
        piv = next((i for i in range(r, m) if nonzero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        arc = A[r][c]
        for i in range(r + 1, m):
            aic = A[i][c]
            for j in range(n):
                if j == c:
                    continue
                num = arc * A[i][j] - aic * A[r][j]
                A[i][j] = num.exact_div(prev) if not prev.is_constant() else num / prev
            A[i][c] = amb.zero()
        prev = arc
        r += 1
        rank += 1
        if r == m:
            break
    return rank


def generic_rank(M: FPModule) -> int:
    """``dim_K (M tensor K)`` over the fraction field ``K`` of a domain."""
    if not M.ring.domain:
        raise NotADomain(f"{M.ring} is not known to be a domain")
    P = M.pruned()
    if not P.rels:
        return P.rank
    return P.rank - matrix_rank(P.ring, P.matrix())


def minors(ring: Ring, rows, k: int) -> list:
    """All nonzero ``k x k`` minors (deduplicated), by Laplace expansion with memoization."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    if k == 0:
        return [ring.one()]
    if k > m or k > n:
        return []
    A = _ambient_rows(ring, rows)
    amb = ring.ambient
    memo: dict = {}

    def minor(rs: tuple, cs: tuple) -> Poly:
        key = (rs, cs)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(cs) == 1:
            val = A[rs[0]][cs[0]]
        else:
            last = cs[-1]
            rest = cs[:-1]
            val = amb.zero()
            for pos, i in enumerate(rs):
                a = A[i][last]
                if not a:
                    continue
                sub = minor(rs[:pos] + rs[pos + 1:], rest)
                if not sub:
                    continue
                term = a * sub
                # sign of expanding along the last column
                val = val + term if (pos + len(rs) - 1) % 2 == 0 else val - term
        memo[key] = val
        return val

    out, seen = [], set()
    for cs in combinations(range(n), k):
        for rs in combinations(range(m), k):
            d = minor(rs, cs)
            if not d:
                continue
            d = ring(Poly(ring, d.terms)) if ring.quotient else d
            if d and d not in seen:
                seen.add(d)
                out.append(d)
    return out


# ---------------------------------------------------------------- Fitting ideals


class NonfreeLocus:
    def __init__(self, rank: int, ideal: Ideal, codim):
        self.rank = rank
        self.locus_ideal = ideal
        self.locus_codim = codim

    def __iter__(self):
        return iter((self.rank, self.locus_ideal, self.locus_codim))

    @property
    def locally_free_everywhere(self) -> bool:
        return self.locus_codim == INF


def fitting_ideal(M: FPModule, j: int) -> Ideal:
    """``Fitt_j(M)``: ideal of ``(b - j)``-minors of a presentation."""
    P = M.pruned()
    k = P.rank - j
    ring = M.ring
    if k <= 0:
        return Ideal(ring, [ring.one()])
    if not P.rels:
        return Ideal(ring, [])
    return Ideal(ring, minors(ring, P.matrix(), k))


def fitting_nonfree_locus(M: FPModule) -> NonfreeLocus:
    """Generic rank, the Fitting ideal cutting out the non-free locus, and its codimension."""
    if not M.ring.domain:
        raise NotADomain(f"{M.ring} is not known to be a domain")
    r = generic_rank(M)
    I = fitting_ideal(M, r)
    _, codim = krull_dimension(I)
    return NonfreeLocus(r, I, codim)


def annihilator(M: FPModule) -> Ideal:
    """``Ann(M) = {r : r e_j in im(phi) for all j}``."""
    ring = M.ring
    b = M.rank
    if b == 0:
        return Ideal(ring, [ring.one()])
    w = {(j * b + j, (0,) * ring.nvars): ring.field.one for j in range(b)}
    rels = _block(list(M.rels), b, b)
    R = Lifter(ring, b * b, [w], rels).relations()
    return Ideal(ring, [Poly(ring, {e: c for (_, e), c in v.items()}) for v in R])


def is_zero_module(M: FPModule) -> bool:
    return M.is_zero()
