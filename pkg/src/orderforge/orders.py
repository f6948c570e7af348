"""Constructions of non-Azumaya maximal orders, with certificates.

Three constructions are provided.  The division-algebra branch builds the
left module ``E = coker(A -> A^2, m -> (mf, mg))`` over an Azumaya algebra
``A`` and takes ``End_A(E)``.  The syzygy branch takes ``End_R`` of a
reflexive rank-``n`` module that is not locally free.  The surface branch
takes ``End_R(R + M)`` for a non-free maximal Cohen-Macaulay module over a
singular normal surface.

Every hypothesis is recorded as a named check.  Maximality is only ever
claimed through sufficient conditions: the order is reflexive, locally free
in codimension one, and Azumaya in codimension one.
"""
from __future__ import annotations

import math
import multiprocessing
import random
from dataclasses import dataclass, field
from itertools import combinations, product

from .algebra import Poly, Ring
from .groebner import INF, Ideal, Lifter, krull_dimension, vec_to_polys
from .fpmod import (
    FPModule,
    bidual_map,
    det,
    fitting_nonfree_locus,
    generic_rank,
    hom,
    matrix_rank,
    minors,
)
from .homological import (
    depth_ext,
    projective_dimension,
    reflexive_certificate,
    torsionfree_test,
    _num,
)
from .azumaya import (
    AlgElem,
    EndAlgebra,
    SCAlgebra,
    azumaya_test,
    module_end,
    reduced_norm_deg2,
    twisted_cokernel,
    twisted_end,
)

CERTIFIED = "certified_non_azumaya_maximal_order"

MORITA_NOTE = ("twisted sheaves are modeled as left modules over the supplied Azumaya "
               "algebra on an affine chart; descent along an etale cover is not verified")


class PreconditionError(ValueError):
    pass


class NotAnOrder(ValueError):
    """Generic rank is not a perfect square."""


class NotMCM(ValueError):
    pass


# ---------------------------------------------------------------- certificate records


@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    witness: str | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "value": _jsonable(self.value), "witness": self.witness}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return "inf" if x == INF else x
    return str(x)


@dataclass
class OrderCertificate:
    construction: str
    inputs: dict
    checks: list = field(default_factory=list)
    verdict: str = ""
    reason: str | None = None
    witness: str | None = None
    notes: list = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def check(self, name: str) -> Check | None:
        return next((c for c in self.checks if c.name == name), None)

    def add(self, name: str, passed: bool, value=None, witness=None, reason=None) -> bool:
        self.checks.append(Check(name, passed, value, witness))
        if not passed and self.reason is None:
            self.reason = reason or name
            self.witness = witness
        return passed

    def finish(self) -> "OrderCertificate":
        self.verdict = CERTIFIED if self.reason is None else f"rejected({self.reason})"
        return self

    @property
    def passed_count(self) -> int:
        n = 0
        for c in self.checks:
            if not c.passed:
                break
            n += 1
        return n

    def to_dict(self) -> dict:
        return {
            "construction": self.construction,
            "inputs": _jsonable(self.inputs),
            "checks": [c.to_dict() for c in self.checks],
            "verdict": self.verdict,
            "witness": self.witness,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- maximality


@dataclass
class MaximalityRecord:
    generic_rank: int
    degree: int
    reflexive: bool
    nonfree_locus: Ideal
    nonfree_codim: object
    discriminant: Ideal | None
    discriminant_codim: object
    azumaya_codim1: bool
    notes: list = field(default_factory=list)

    @property
    def locally_free_codim1(self) -> bool:
        return self.nonfree_codim >= 2

    @property
    def non_azumaya_codim(self):
        if self.discriminant_codim is None:
            return None
        return min(self.discriminant_codim, self.nonfree_codim)

    @property
    def holds(self) -> bool:
        return self.reflexive and self.locally_free_codim1 and self.azumaya_codim1

    def to_dict(self) -> dict:
        return {
            "generic_rank": self.generic_rank,
            "degree": self.degree,
            "reflexive": self.reflexive,
            "nonfree_locus": str(self.nonfree_locus),
            "nonfree_codim": _num(self.nonfree_codim),
            "discriminant_ideal": None if self.discriminant is None else str(self.discriminant),
            "discriminant_codim": _num(self.discriminant_codim),
            "non_azumaya_codim": _num(self.non_azumaya_codim),
            "locally_free_codim1": self.locally_free_codim1,
            "azumaya_codim1": self.azumaya_codim1,
            "sufficient_conditions_hold": self.holds,
            "notes": list(self.notes),
        }


def _adjugate(B: list, ring: Ring) -> list:
    r = len(B)
    if r == 1:
        return [[ring.one()]]
    adj = [[ring.zero()] * r for _ in range(r)]
    for i in range(r):
        for j in range(r):
            sub = [[B[a][b] for b in range(r) if b != i] for a in range(r) if a != j]
            d = det(sub)
            adj[i][j] = d if (i + j) % 2 == 0 else -d
    return adj


def _divide(ring: Ring, a: Poly, d: Poly) -> Poly:
    """Exact quotient ``a / d`` in the (domain) ring."""
    if not ring.quotient:
        return a.exact_div(d)
    c = Lifter(ring, 1, [{(0, e): x for e, x in d.terms.items()}]).lift(
        {(0, e): x for e, x in a.terms.items()})
    if c is None:
        raise ArithmeticError("trace is not integral over the base")
    return vec_to_polys(ring, c, 1)[0]


def trace_form(L: EndAlgebra) -> list:
    """Gram matrix ``Tr(g_a g_b)`` of the regular trace on the generators.

    ``U`` is the relation matrix.  For rows ``J`` and columns ``C`` with
    ``Delta = det U[J, C] != 0`` the other generators ``T`` are a basis over
    the fraction field, and eliminating the ``J``-coordinates gives
    ``Delta * Tr(y)`` as a polynomial.  Traces of an order over a normal
    domain are integral, so the division by ``Delta`` is exact.
    """
    ring = L.ring
    s = L.ngens
    U = L.module.matrix()
    ncols = len(U[0]) if U else 0
    rank_u = matrix_rank(ring, U) if ncols else 0
    J, C, delta = (), (), ring.one()
    if rank_u:
        for J, C in product(combinations(range(s), rank_u), combinations(range(ncols), rank_u)):
            delta = det([[U[j][c] for c in C] for j in J])
            if delta:
                break
    T = [t for t in range(s) if t not in J]
    B = [[U[j][c] for c in C] for j in J]
    adj = _adjugate(B, ring) if rank_u else []
    W = [[sum((U[t][C[k]] * adj[k][j] for k in range(rank_u)), ring.zero())
          for j in range(rank_u)] for t in T]
    traces = []
    for p in range(s):
        cols = [vec_to_polys(ring, c, s) for c in L.left_mult_matrix(p)]
        # cols[t][row]: coordinate ``row`` of g_p o g_t
        acc = ring.zero()
        for ti, t in enumerate(T):
            acc = acc + delta * cols[t][t]
            for jj, j in enumerate(J):
                acc = acc - W[ti][jj] * cols[t][j]
        traces.append(_divide(ring, acc, delta))
    G = [[ring.zero()] * s for _ in range(s)]
    for a in range(s):
        for b in range(s):
            c = vec_to_polys(ring, L.product(a, b), s)
            G[a][b] = sum((c[q] * traces[q] for q in range(s)), ring.zero())
    return G


def _discriminants(G: list, size: int, max_tries: int):
    """Principal ``size``-minors of the trace Gram matrix, in subset order."""
    for tries, T in enumerate(combinations(range(len(G)), size)):
        if tries >= max_tries:
            return
        d = det([[G[a][b] for b in T] for a in T])
        if d:
            yield d


def maximality_certificate(L: EndAlgebra, max_tries: int = 5000) -> MaximalityRecord:
    """The sufficient conditions for maximality: (a) reflexive, (b) and (c) in codimension one.

    (c) uses the trace form.  Where the order is free of rank ``m^2``,
    some ``m^2`` generators form a basis and the non-Azumaya points are the
    zeros of that basis' discriminant.  So the ideal ``D`` of principal
    ``m^2``-minors of the trace Gram matrix meets the free locus exactly in
    the non-Azumaya locus, and the full non-Azumaya locus is ``V(D)``
    together with the non-free locus.  Minors are added until ``D`` is as
    small as the non-free locus allows or ``max_tries`` is reached.
    """
    ring = L.ring
    M = L.module
    r = generic_rank(M)
    m = math.isqrt(r)
    if m * m != r or r == 0:
        raise NotAnOrder(f"generic rank {r} is not a positive perfect square")
    p = ring.field.characteristic
    notes = []
    reflexive = bidual_map(M).is_iso
    loc = fitting_nonfree_locus(M)
    if p and m % p == 0:
        notes.append(f"trace form degenerate in characteristic {p}; condition (c) not evaluated")
        return MaximalityRecord(r, m, reflexive, loc.locus_ideal, loc.locus_codim, None, None,
                                False, notes)
    G = trace_form(L)
    gens: list = []
    D = Ideal(ring, [])
    codim = 0
    for d in _discriminants(G, r, max_tries):
        if gens and D.contains(d):
            continue
        gens.append(d)
        D = Ideal(ring, list(gens))
        codim = krull_dimension(D)[1]
        if codim >= loc.locus_codim:
            break
    if not gens:
        notes.append("trace form identically degenerate")
        D = Ideal(ring, [])
        codim = 0
    return MaximalityRecord(r, m, reflexive, loc.locus_ideal, loc.locus_codim, D, codim,
                            codim >= 2, notes)


def _maximality_checks(cert: OrderCertificate, L: EndAlgebra):
    rec = maximality_certificate(L)
    cert.add("maximality_sufficient", rec.holds, rec.to_dict(),
             witness=None if rec.holds else _maximality_witness(rec))
    return rec


def _maximality_witness(rec: MaximalityRecord) -> str:
    if not rec.reflexive:
        return "order is not reflexive"
    if not rec.locally_free_codim1:
        return f"non-free locus {rec.nonfree_locus} has codim {_num(rec.nonfree_codim)}"
    return f"trace discriminant {rec.discriminant} has codim {_num(rec.discriminant_codim)}"


def _end_checks(cert: OrderCertificate, L: EndAlgebra, expected_rank: int, point: Ideal | None):
    """Shared tail of every construction: rank, non-free locus, Azumaya verdict, maximality."""
    r = generic_rank(L.module)
    cert.add("end_rank", r == expected_rank, r,
             witness=None if r == expected_rank else f"generic rank {r}, expected {expected_rank}")
    loc = fitting_nonfree_locus(L.module)
    nonfree = loc.locus_codim != INF
    value = {"ideal": str(loc.locus_ideal), "codim": _num(loc.locus_codim)}
    if point is not None:
        at_point = loc.locus_ideal.issubset(point)
        value["contains_point"] = str(point) if at_point else None
        nonfree = nonfree and at_point
    cert.add("end_nonfree_locus", nonfree, value,
             witness=None if nonfree else "End locally free", reason="End locally free")
    # an Azumaya algebra is locally free, so a non-free End is not Azumaya
    cert.add("azumaya_verdict", nonfree, "non_azumaya" if nonfree else "possibly_azumaya",
             reason="End locally free")
    if cert.check("end_rank").passed:
        _maximality_checks(cert, L)


# ---------------------------------------------------------------- division-algebra branch


def _candidate_primes(A: SCAlgebra, f: AlgElem, g: AlgElem) -> list:
    """Height-two test primes for the codim-two failure mode: ``(Nrd f) + coords(g)`` and symmetric."""
    ring = A.ring
    out = []
    if A.involution is None:
        return out
    for x, y in ((f, g), (g, f)):
        n = reduced_norm_deg2(x)
        I = Ideal(ring, [n] + [c for c in y.coords if c])
        if not I.is_unit() and krull_dimension(I)[1] == 2 and not any(I == J for J in out):
            out.append(I)
    return out


def theorem1_construct(A: SCAlgebra, f: AlgElem, g: AlgElem, primes=(), full: bool = True,
                       target: Ideal | None = None) -> OrderCertificate:
    """Build ``E = coker(m -> (mf, mg))`` and ``End_A(E)`` and run the whole check chain.

    With ``full=False`` the chain stops at the first failing check (used by
    the pair search as a cheap filter).
    """
    ring = A.ring
    az = azumaya_test(A)
    if not az.is_azumaya:
        raise PreconditionError(f"{A.label} is not Azumaya (determinant {az.determinant})")
    dim = krull_dimension(Ideal(ring, []))[0]
    if dim < 3:
        raise PreconditionError(f"base ring has dimension {dim} < 3")
    cert = OrderCertificate("theorem1_pair", {
        "algebra": A.label, "ring": str(ring), "f": str(f), "g": str(g)})
    cert.notes.append(MORITA_NOTE)
    cert.notes.append(f"algebra is Azumaya: enveloping determinant {az.determinant}")

    E = twisted_cokernel(A, f, g)
    if not cert.add("presentation_injective", E.injective, E.injective_by,
                    witness=None if E.injective else "syzygy kernel nonzero"):
        return cert.finish()

    loc = fitting_nonfree_locus(E.unfolded)
    codim = loc.locus_codim
    value = {"rank": loc.rank, "ideal": str(loc.locus_ideal), "codim": _num(codim)}
    if codim == INF:
        cert.add("nonfree_locus", False, value, witness="(1)", reason="everywhere locally free")
    else:
        ok = 3 <= codim <= dim
        cert.add("nonfree_locus", ok, value, witness=None if ok else str(loc.locus_ideal),
                 reason=f"nonfree_locus_codim={_num(codim)}")
    if not full and cert.reason:
        return cert.finish()

    b = bidual_map(E.unfolded)
    tf = torsionfree_test(E.unfolded, bidual=b)
    cert.add("torsion_free", tf.torsion_free, tf.to_dict(),
             witness=None if tf.torsion_free else str(tf.witness))
    if not full and cert.reason:
        return cert.finish()

    test_primes = list(primes)
    if codim != INF and codim <= 2:
        test_primes += [P for P in _candidate_primes(A, f, g) if not any(P == Q for Q in test_primes)]
    rc = reflexive_certificate(E.unfolded, primes=test_primes, bidual=b)
    cert.add("reflexive", rc.reflexive, rc.to_dict(), witness=rc.witness)
    if not full and cert.reason:
        return cert.finish()
    if cert.check("reflexive").passed:
        pd = projective_dimension(E.unfolded)
        cert.notes.append(f"pd(E) = {_num(pd)}")

    L = twisted_end(E)
    if target is None:
        target = Ideal(ring, [ring.var(x) for x in ring.variables])
    _end_checks(cert, L, A.rank, target)
    return cert.finish()


# ---------------------------------------------------------------- pair search


def pool_values(target: Ideal, pool_degree: int) -> list:
    """Signed sums of up to ``pool_degree`` distinct generators of the target.

    Each value is immediately followed by its negative, so even positions
    hold one representative per sign class.
    """
    t = [x for x in target.gens if x]
    vals = []
    for size in range(1, min(pool_degree, len(t)) + 1):
        for idx in combinations(range(len(t)), size):
            for signs in product((1, -1), repeat=size - 1):
                v = t[idx[0]]
                for sgn, i in zip(signs, idx[1:]):
                    v = v + t[i].scale(sgn)
                vals.extend([v, -v])
    return vals


def candidate_pairs(A: SCAlgebra, target: Ideal, pool_degree: int, seed: int = 0):
    """Seeded walk over pairs of pool elements.

    An element has its coordinates in ``{0} + pool_values``, so ``f`` and
    ``g`` lie in ``target * A``.  Each draw picks a support size, the
    support positions and the values, so sparse and dense elements are
    equally likely.  Elements are taken up to sign, pairs are unordered,
    and commuting pairs are skipped.  The walk is a function of ``seed``.
    """
    vals = pool_values(target, pool_degree)
    n = A.rank
    rng = random.Random(seed)
    seen = set()

    def element() -> tuple:
        k = rng.randint(1, n)
        pos = sorted(rng.sample(range(n), k))
        digits = [None] * n
        for p in pos:
            digits[p] = rng.randrange(len(vals))
        if digits[pos[0]] % 2:
            # keep the representative whose leading value sits at an even position
            digits = [None if d is None else d ^ 1 for d in digits]
        return tuple(-1 if d is None else d for d in digits)

    misses = 0
    while misses < 10000:
        a, b = element(), element()
        key = (min(a, b), max(a, b))
        if a == b or key in seen:
            misses += 1
            continue
        seen.add(key)
        f = A.elem([vals[d] if d >= 0 else 0 for d in key[0]])
        g = A.elem([vals[d] if d >= 0 else 0 for d in key[1]])
        if f * g == g * f:
            continue
        yield f, g


@dataclass
class SearchResult:
    found: bool
    f: AlgElem | None
    g: AlgElem | None
    certificate: OrderCertificate | None
    examined: int
    budget: int

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "f": None if self.f is None else str(self.f),
            "g": None if self.g is None else str(self.g),
            "examined": self.examined,
            "budget": self.budget,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }

    def __iter__(self):
        return iter((self.f, self.g, self.certificate))


class BudgetExhausted(RuntimeError):
    def __init__(self, result: SearchResult):
        self.result = result
        super().__init__(f"no certified pair among {result.examined} candidates")


def _screen(job):
    A, target, f, g = job
    return theorem1_construct(A, f, g, full=False, target=target)


def _screened(A, target, cands, threads):
    """Yield ``(pair, certificate)`` in candidate order.

    With several workers the candidates run in separate processes; results
    are still consumed in order, so the first success does not depend on
    scheduling.  Workers are terminated once the consumer stops.
    """
    if threads <= 1 or len(cands) <= 1:
        for pair in cands:
            yield pair, _screen((A, target, pair[0], pair[1]))
        return
    jobs = [(A, target, f, g) for f, g in cands]
    pool = multiprocessing.Pool(processes=threads)
    try:
        for pair, cert in zip(cands, pool.imap(_screen, jobs, chunksize=1)):
            yield pair, cert
    finally:
        # speculative candidates past the first success are abandoned
        pool.terminate()
        pool.join()


def pair_search(A: SCAlgebra, target: Ideal, pool_degree: int = 2, budget: int = 500,
                threads: int = 1, seed: int = 0, raise_on_exhaust: bool = False) -> SearchResult:
    """First certified pair in enumeration order, independent of ``threads``.

    Candidates are screened with the cheap prefix of the check chain and
    fully certified once they pass it.  When nothing is certified, the best
    partial certificate (most leading checks passed, earliest on ties) is
    returned with ``found=False``.
    """
    codim = krull_dimension(target)[1]
    if codim < 3:
        raise PreconditionError(f"target ideal {target} has codim {_num(codim)} < 3")
    cands = []
    for pair in candidate_pairs(A, target, pool_degree, seed):
        if len(cands) >= budget:
            break
        cands.append(pair)

    best = None
    for idx, (pair, cert) in enumerate(_screened(A, target, cands, threads)):
        if cert.certified:
            # nothing failed, so the early-exit chain was the full chain
            return SearchResult(True, pair[0], pair[1], cert, idx + 1, budget)
        if best is None or cert.passed_count > best[0].passed_count:
            best = (cert, pair)
    res = SearchResult(False, None if best is None else best[1][0],
                       None if best is None else best[1][1],
                       None if best is None else best[0], len(cands), budget)
    if raise_on_exhaust:
        raise BudgetExhausted(res)
    return res


# ---------------------------------------------------------------- syzygy branch


def koszul_syzygy(ring: Ring) -> FPModule:
    """``Z = ker(R^3 -> R, (u v w))`` on the first three variables, as ``coker(R -> R^3)``.

    The Koszul complex identifies ``Z`` with the cokernel of ``1 -> (x3, -x2, x1)``.
    """
    if ring.nvars < 3:
        raise PreconditionError("the Koszul syzygy needs three variables")
    x = [ring.var(v) for v in ring.variables[:3]]
    return FPModule.from_matrix(ring, [[x[2]], [-x[1]], [x[0]]])


def syzygy_order(ring: Ring, n: int = 2) -> OrderCertificate:
    """``End_R(Z + R^(n-2))`` for the rank-2 Koszul syzygy ``Z``."""
    if n < 2:
        raise PreconditionError("rank must be at least 2: rank-one reflexive orders are R itself")
    if ring.quotient:
        raise PreconditionError("the syzygy branch needs a polynomial ring")
    dim = ring.nvars
    if dim < 3:
        raise PreconditionError(f"base ring has dimension {dim} < 3")
    Z = koszul_syzygy(ring)
    N = Z.direct_sum(FPModule.free(ring, n - 2)) if n > 2 else Z
    cert = OrderCertificate("syzygy_end", {"ring": str(ring), "n": n})
    m = Ideal(ring, [ring.var(v) for v in ring.variables])
    r = generic_rank(N)
    cert.add("module_rank", r == n, r)
    pd = projective_dimension(N)
    d = depth_ext(m, N)
    cert.add("projective_dimension", pd == 1, pd)
    cert.add("depth", d == dim - 1, d)
    b = bidual_map(N)
    rc = reflexive_certificate(N, bidual=b)
    cert.add("reflexive", rc.reflexive, rc.to_dict(), witness=rc.witness)
    loc = fitting_nonfree_locus(N)
    origin = Ideal(ring, [ring.var(v) for v in ring.variables[:3]])
    ok = loc.locus_codim != INF and loc.locus_codim >= 3
    cert.add("nonfree_locus", ok, {"ideal": str(loc.locus_ideal), "codim": _num(loc.locus_codim),
                                   "equals_origin": loc.locus_ideal == origin},
             witness=None if ok else str(loc.locus_ideal))
    L = module_end(N)
    _end_checks(cert, L, n * n, origin)
    return cert.finish()


# ---------------------------------------------------------------- surface branch


def singular_locus(ring: Ring) -> Ideal:
    """Jacobian ideal plus the defining ideal, read in ``ring``.

    For an equidimensional quotient ``S/J`` of codim ``c`` this cuts out the
    singular points: the ``c x c`` minors of the Jacobian matrix of ``J``.
    """
    if not ring.quotient:
        return Ideal(ring, [ring.one()])
    amb = ring.ambient
    J = list(ring.quotient)
    c = amb.nvars - krull_dimension(Ideal(amb, J))[0]
    jac = [[q.derivative(v) for v in amb.variables] for q in J]
    ms = minors(amb, jac, c)
    return Ideal(ring, [ring(m) for m in ms])


def surface_order(ring: Ring, M: FPModule) -> OrderCertificate:
    """``End_R(R + M)`` over a two-dimensional normal base.

    The base must be singular (over a regular surface every reflexive module
    is free and no non-Azumaya order arises this way).
    """
    cert = OrderCertificate("surface_end", {"ring": str(ring), "module": module_text(M)})
    sing = singular_locus(ring)
    dim = krull_dimension(Ideal(ring, []))[0]
    regular = sing.is_unit()
    cert.add("singular_base", not regular, {"singular_locus": str(sing), "dim": dim},
             witness=None if not regular else "Jacobian criterion: singular locus is empty",
             reason="regular base")
    if regular:
        cert.notes.append("a regular surface has no non-free reflexive modules")
        return cert.finish()
    if dim != 2:
        raise PreconditionError(f"base ring has dimension {dim}, expected 2")
    if not ring.domain:
        raise PreconditionError("base ring must be declared a domain")
    m = Ideal(ring, [ring.var(v) for v in ring.variables])
    d = depth_ext(m, M)
    if d != 2:
        raise NotMCM(f"depth of M at the maximal ideal is {_num(d)}, not 2")
    cert.add("mcm", True, {"depth": d})
    tf = torsionfree_test(M)
    cert.add("torsion_free", tf.torsion_free, tf.to_dict())
    rank_m = generic_rank(M)
    R1 = FPModule.free(ring, 1)
    N = R1.direct_sum(M)
    blocks = {"Hom(R,R)": R1, "Hom(M,R)": hom(M, R1), "Hom(R,M)": M, "End(M)": hom(M, M)}
    refl = {k: bidual_map(B).is_iso for k, B in blocks.items()}
    cert.add("reflexive", all(refl.values()), refl,
             witness=next((k for k, v in refl.items() if not v), None))
    L = module_end(N)
    loc = fitting_nonfree_locus(L.module)
    ok = loc.locus_codim >= 2
    cert.add("locally_free_codim1", ok, {"ideal": str(loc.locus_ideal), "codim": _num(loc.locus_codim)},
             witness=None if ok else str(loc.locus_ideal))
    _end_checks(cert, L, (1 + rank_m) ** 2, m)
    return cert.finish()


def module_text(M: FPModule) -> str:
    """Task-file syntax for a presentation: ``R^n`` or ``coker[...]``."""
    rows = M.matrix()
    if not rows or not rows[0]:
        return "R" if M.rank == 1 else f"R^{M.rank}"
    return "coker[" + "; ".join(", ".join(str(x) for x in row) for row in rows) + "]"
