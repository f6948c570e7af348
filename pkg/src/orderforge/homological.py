"""Depth, projective dimension, torsion-freeness and reflexivity certificates.

Depth along an ideal is computed two ways: greedily, by finding a regular
sequence whose elements are each certified by a vanishing kernel, and by
the first non-vanishing ``Ext^i(R/I, M)``.  The Ext value is authoritative;
the search must reproduce it or an error is raised.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import Poly
from .groebner import INF, Ideal, colon, grading, krull_dimension, resolve
from .fpmod import (
    FPModule,
    ModuleMap,
    NotADomain,
    annihilator,
    bidual_map,
    ext,
    fitting_nonfree_locus,
    minors,
)


class DepthUndefined(ValueError):
    """``IM = M``: the depth is +infinity by convention."""


class DepthSearchExhausted(RuntimeError):
    pass


class MethodDisagreement(AssertionError):
    pass


class InfinitePD(ValueError):
    pass


@dataclass(frozen=True)
class AtLeast:
    bound: int

    def __str__(self):
        return f">={self.bound}"


@dataclass
class DepthReport:
    ideal: Ideal
    module: FPModule
    depth: int | float
    regular_sequence_witness: list = field(default_factory=list)
    method_agreement: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ideal": str(self.ideal),
            "depth": _num(self.depth),
            "witness": [str(r) for r in self.regular_sequence_witness],
            "methods": {k: _num(v) for k, v in self.method_agreement.items()},
        }


def _num(x):
    if x == INF:
        return "inf"
    if isinstance(x, AtLeast):
        return str(x)
    return x


# ---------------------------------------------------------------- depth


_RES_CACHE: dict = {}


def _cyclic_resolution(I: Ideal, length: int):
    key = (I.ring, tuple(frozenset(g.terms.items()) for g in I.gens), length)
    F = _RES_CACHE.get(key)
    if F is None:
        rels = [{(0, e): c for e, c in g.terms.items()} for g in I.gens]
        minimal = grading(I.ring, 1, rels) is not None
        F = resolve(I.ring, 1, rels, length, minimal=minimal)
        _RES_CACHE[key] = F
    return F


def _check_defined(I: Ideal, M: FPModule):
    if I.is_unit() and not M.is_zero():
        # R/I = 0: every Ext vanishes; treat like IM = M
        raise DepthUndefined("unit ideal")
    if M.mod_ideal(I).is_zero():
        raise DepthUndefined("IM = M")


def depth_ext(I: Ideal, M: FPModule) -> int | float:
    """``min{i : Ext^i(R/I, M) != 0}``; +inf when ``IM = M``."""
    try:
        _check_defined(I, M)
    except DepthUndefined:
        return INF
    dim_r = krull_dimension(Ideal(I.ring, []))[0]
    top = dim_r + 1
    F = _cyclic_resolution(I, top + 1)
    RI = FPModule.cyclic(I)
    for i in range(top + 1):
        if not ext(i, RI, M, resolution=F).is_zero():
            return i
    raise AssertionError("no non-vanishing Ext below dim R + 2 although IM != M")


def depth_at_prime(P: Ideal, M: FPModule) -> int | float:
    """Depth of ``M_P`` over ``R_P``: least ``i`` with ``Ann Ext^i(R/P, M)`` inside ``P``.

    ``P`` is assumed prime; only properness is checked.  Returns +inf when
    ``M_P = 0``.
    """
    if P.is_unit():
        raise ValueError("P must be a proper ideal")
    if not annihilator(M).issubset(P):
        return INF
    height = krull_dimension(P)[1]
    F = _cyclic_resolution(P, int(height) + 2)
    RP = FPModule.cyclic(P)
    for i in range(int(height) + 1):
        E = ext(i, RP, M, resolution=F)
        if E.is_zero():
            continue
        if annihilator(E).issubset(P):
            return i
    raise AssertionError("depth at P exceeds height P")


def is_regular_element(r: Poly, M: FPModule) -> bool:
    """``r`` is a non-zero-divisor on ``M`` (kernel of multiplication vanishes)."""
    return ModuleMap.scalar(M, r).is_injective()


def _candidates(I: Ideal, rng: random.Random, budget: int):
    gens = list(I.reduced_gens()) or list(I.gens)
    for g in gens:
        yield g
    ring = I.ring
    for _ in range(budget):
        coeffs = [rng.randint(-3, 3) for _ in gens]
        if not any(coeffs):
            continue
        c = ring.zero()
        for a, g in zip(coeffs, gens):
            if a:
                c = c + g.scale(a)
        if c:
            yield c


def depth_regseq(I: Ideal, M: FPModule, max_search: int = 50, seed: int = 0) -> DepthReport:
    """Greedy maximal ``M``-regular sequence in ``I``, cross-checked with :func:`depth_ext`."""
    d_ext = depth_ext(I, M)
    if d_ext == INF:
        return DepthReport(I, M, INF, [], {"regseq": INF, "ext": INF})
    rng = random.Random(seed)
    N = M
    seq: list = []
    while len(seq) < d_ext:
        found = None
        for cand in _candidates(I, rng, max_search):
            if is_regular_element(cand, N):
                found = cand
                break
        if found is None:
            raise DepthSearchExhausted(
                f"found {len(seq)} regular elements, Ext predicts {d_ext}")
        seq.append(found)
        N = N.mod_element(found)
        if N.mod_ideal(I).is_zero():
            break
    # a regular sequence of length depth is maximal; an extension would contradict Ext
    if not N.mod_ideal(I).is_zero():
        for cand in _candidates(I, rng, 4):
            if is_regular_element(cand, N):
                raise MethodDisagreement(
                    f"regular sequence extends past the Ext depth {d_ext}")
    if len(seq) != d_ext:
        raise MethodDisagreement(f"regular sequence length {len(seq)} != Ext depth {d_ext}")
    return DepthReport(I, M, d_ext, seq, {"regseq": len(seq), "ext": d_ext})


def depth(I: Ideal, M: FPModule, seed: int = 0) -> DepthReport:
    return depth_regseq(I, M, seed=seed)


def local_cohomology_vanishing(I: Ideal, M: FPModule, t_max: int = 3) -> list:
    """Sanity data for ``lim Ext^i(R/I^t, M)``: first non-vanishing index for ``t = 1..t_max``."""
    out = []
    power = I
    for t in range(1, t_max + 1):
        out.append(depth_ext(power, M))
        power = power * I
    return out


# ---------------------------------------------------------------- projective dimension


def _ext_pd(M: FPModule) -> int:
    """Over a polynomial ring: ``pd M = max{i : Ext^i(M, R) != 0}``."""
    R1 = FPModule.free(M.ring, 1)
    n = M.ring.nvars
    F = resolve(M.ring, M.rank, list(M.rels), n + 1, minimal=False)
    top = -1
    for i in range(n + 1):
        if not ext(i, M, R1, resolution=F).is_zero():
            top = i
    return top


def projective_dimension(M: FPModule, bound: int | None = None):
    """Length of a minimal free resolution, or ``AtLeast(bound)`` if none ends by ``bound``."""
    ring = M.ring
    if bound is None:
        bound = ring.nvars
    if M.is_zero():
        return -1
    graded = grading(ring, M.rank, list(M.rels)) is not None
    if graded:
        F = resolve(ring, M.rank, list(M.rels), bound, minimal=True)
        if F.complete:
            return F.length
        if not ring.quotient and bound >= ring.nvars:
            raise AssertionError("minimal resolution over a polynomial ring exceeded the variable count")
        return AtLeast(bound)
    if not ring.quotient:
        return _ext_pd(M)
    F = resolve(ring, M.rank, list(M.rels), bound, minimal=False)
    return F.length if F.complete else AtLeast(bound)


def betti_numbers(M: FPModule, length: int) -> list:
    F = resolve(M.ring, M.rank, list(M.rels), length, minimal=True)
    return F.betti()


@dataclass
class ABReport:
    pd: int
    depth_module: int
    depth_ring: int
    holds: bool

    def to_dict(self):
        return {"pd": self.pd, "depth": _num(self.depth_module),
                "depth_R": self.depth_ring, "holds": self.holds}


def ab_verify(M: FPModule, I: Ideal) -> ABReport:
    """Check ``pd M + depth_I M = depth_I R``."""
    if M.ring.quotient:
        raise ValueError("Auslander-Buchsbaum check needs a polynomial ring")
    pd = projective_dimension(M)
    if isinstance(pd, AtLeast):
        raise InfinitePD(f"projective dimension {pd}")
    dM = depth_ext(I, M)
    dR = depth_ext(I, FPModule.free(M.ring, 1))
    return ABReport(pd, dM, dR, pd + dM == dR)


# ---------------------------------------------------------------- torsion and reflexivity


class RouteDisagreement(AssertionError):
    pass


@dataclass
class TorsionReport:
    torsion_free: bool
    witness: Poly | None
    secondary: bool | None
    locus_codim: object = None

    def __bool__(self):
        return self.torsion_free

    def to_dict(self):
        return {"torsion_free": self.torsion_free,
                "witness": None if self.witness is None else str(self.witness),
                "presentation_route": self.secondary,
                "presentation_locus_codim": _num(self.locus_codim) if self.locus_codim is not None else None}


def _torsion_witness(M: FPModule, kernel_vectors: list):
    x = kernel_vectors[0]
    ann = colon((M.ring, M.rank, list(M.rels)), x)
    gens = ann.reduced_gens()
    return gens[0] if gens else None


def presentation_route(M: FPModule):
    """Torsion test for injectively presented modules over a polynomial ring.

    With ``0 -> R^a -> R^b -> M -> 0`` exact, ``M`` is torsion-free exactly
    when the maximal minors of the presentation lie in no height-one prime.
    Returns ``(verdict, codim)`` or ``(None, None)`` when not applicable.
    """
    ring = M.ring
    if ring.quotient:
        return None, None
    P = M.pruned()
    if not P.rels:
        return True, INF
    from .groebner import syzygy_vecs
    if syzygy_vecs(ring, list(P.rels), P.rank):
        return None, None
    I = Ideal(ring, minors(ring, P.matrix(), len(P.rels)))
    codim = krull_dimension(I)[1]
    return codim >= 2, codim


def torsionfree_test(M: FPModule, bidual=None) -> TorsionReport:
    b = bidual or bidual_map(M)
    primary = b.is_injective
    witness = None if primary else _torsion_witness(M, b.kernel_vectors)
    secondary, codim = presentation_route(M)
    if secondary is not None and secondary != primary:
        raise RouteDisagreement(f"bidual route says {primary}, presentation route says {secondary}")
    return TorsionReport(primary, witness, secondary, codim)


def is_prime_like(P: Ideal) -> bool:
    """Proper ideal generated by linear forms (such ideals are prime)."""
    if P.is_unit():
        return False
    gens = P.reduced_gens()
    return all(g.total_degree() == 1 for g in gens)


@dataclass
class ReflexivityCertificate:
    module: FPModule
    torsion_free: bool
    bidual_iso: bool
    critical_primes: list          # (Ideal, height, depth)
    verdict: str
    witness: str | None
    criterion_verdict: str
    findings: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    bidual: object = None

    @property
    def reflexive(self) -> bool:
        return self.verdict == "reflexive"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "torsion_free": self.torsion_free,
            "bidual_iso": self.bidual_iso,
            "critical_primes": [{"prime": str(P), "height": _num(h), "depth": _num(d)}
                                for P, h, d in self.critical_primes],
            "criterion_verdict": self.criterion_verdict,
            "witness": self.witness,
            "findings": list(self.findings),
            "assumptions": list(self.assumptions),
        }


def reflexive_certificate(M: FPModule, primes=(), bidual=None) -> ReflexivityCertificate:
    """Reflexivity verdict from ``M -> M**`` plus the depth criterion at test primes.

    The criterion (torsion-free and depth >= 2 at every tested prime of
    height >= 2) is evaluated at the non-free locus ideal when it is
    generated by linear forms, and at each supplied prime.  Disagreements
    are recorded, not resolved.
    """
    b = bidual or bidual_map(M)
    tf = b.is_injective
    iso = b.is_iso
    test = []
    assumptions = []
    if M.ring.domain:
        try:
            loc = fitting_nonfree_locus(M)
            if loc.locus_codim != INF and is_prime_like(loc.locus_ideal):
                test.append(loc.locus_ideal)
        except NotADomain:
            pass
    for P in primes:
        if not any(P == Q for Q in test):
            test.append(P)
            assumptions.append(f"{P} assumed prime")
    crit = []
    bad = None
    for P in test:
        h = krull_dimension(P)[1]
        d = depth_at_prime(P, M)
        crit.append((P, h, d))
        if h >= 2 and d < 2 and bad is None:
            bad = (P, d)
    criterion_ok = tf and bad is None
    verdict = "reflexive" if iso else "not_reflexive"
    criterion = "reflexive" if criterion_ok else "not_reflexive"
    findings = []
    if criterion != verdict:
        findings.append(f"criterion at tested primes says {criterion}, bidual map says {verdict}")
    witness = None
    if not iso:
        if not tf:
            witness = "torsion element (bidual map not injective)"
        elif bad is not None:
            witness = f"prime {bad[0]} has depth {_num(bad[1])}"
        else:
            witness = "bidual map not surjective"
    return ReflexivityCertificate(M, tf, iso, crit, verdict, witness, criterion, findings,
                                  assumptions, b)
