import pytest
import sympy

from oracles import dimension, minors_ideal, to_matrix
from orderforge.algebra import Ring
from orderforge.azumaya import (SCAlgebra, module_end, quaternion_algebra, sc_algebra_as_order,
                                twisted_cokernel)
from orderforge.fpmod import FPModule
from orderforge.groebner import INF, Ideal
from orderforge.orders import (CERTIFIED, NotAnOrder, NotMCM, PreconditionError,
                               maximality_certificate, pair_search, pool_values, singular_locus,
                               surface_order, syzygy_order, theorem1_construct, koszul_syzygy)

R = Ring(["u", "v", "w"])
H = quaternion_algebra(R, -1, -1)
SYMS = sympy.symbols("u v w")
CONE = Ring(["u", "v", "w"], quotient=[R("u*v - w^2")], domain=True)


def test_literal_pair_is_rejected():
    cert = theorem1_construct(H, H.parse("u*i + v"), H.parse("w*j"))
    assert cert.verdict == "rejected(nonfree_locus_codim=2)"
    assert cert.check("presentation_injective").passed
    assert not cert.check("nonfree_locus").passed


def test_literal_pair_locus_against_minor_oracle():
    E = twisted_cokernel(H, H.parse("u*i + v"), H.parse("w*j"))
    rows = to_matrix(E.unfolded.matrix(), SYMS)
    minors = minors_ideal(rows, 4, SYMS)
    text = [str(m).replace("**", "^") for m in minors]
    assert 3 - dimension(text, SYMS) == 2
    # every maximal minor vanishes on V(u^2 + v^2, w)
    P = Ideal(R, ["u^2 + v^2", "w"])
    assert all(P.contains(R(t)) for t in text)


def test_free_pair_is_rejected():
    cert = theorem1_construct(H, H.one(), H.zero())
    assert cert.verdict == "rejected(everywhere locally free)"


def test_search_certified_pair_recertifies():
    f, g = H.parse("w*i - v*k"), H.parse("u - w + (-u + v)*i + (-v - w)*j + (-u - w)*k")
    cert = theorem1_construct(H, f, g)
    assert cert.certified
    assert cert.check("nonfree_locus").value["codim"] == 3


def test_pair_search_preconditions_and_budget():
    with pytest.raises(PreconditionError):
        pair_search(H, Ideal(R, ["u", "v"]))
    res = pair_search(H, Ideal(R, ["u", "v", "w"]), budget=1, seed=1)
    assert not res.found and res.examined == 1
    assert res.certificate.verdict.startswith("rejected(")


def test_pool_values():
    vals = pool_values(Ideal(R, ["u", "v", "w"]), 2)
    assert len(vals) == 18
    assert all(-x in vals for x in vals)


def test_syzygy_order_ranks():
    cert = syzygy_order(R, 2)
    assert cert.certified
    assert cert.check("end_rank").value == 4
    with pytest.raises(PreconditionError):
        syzygy_order(R, 1)
    with pytest.raises(PreconditionError):
        syzygy_order(Ring(["u", "v"]), 2)


def test_syzygy_order_rank_three():
    cert = syzygy_order(R, 3)
    assert cert.certified
    assert cert.check("end_rank").value == 9


def test_surface_examples():
    assert singular_locus(CONE) == Ideal(CONE, ["u", "v", "w"])
    cert = surface_order(CONE, FPModule.from_ideal(Ideal(CONE, ["u", "w"])))
    assert cert.certified
    assert surface_order(CONE, FPModule.free(CONE, 1)).verdict == "rejected(End locally free)"
    plane = Ring(["u", "v"])
    assert surface_order(plane, FPModule.from_ideal(Ideal(plane, ["u", "v"]))).verdict == \
        "rejected(regular base)"
    with pytest.raises(NotMCM):
        surface_order(CONE, FPModule.cyclic(Ideal(CONE, ["u"])))


def test_maximality_examples():
    rec = maximality_certificate(sc_algebra_as_order(H))
    assert rec.holds and rec.non_azumaya_codim == INF
    rec = maximality_certificate(module_end(koszul_syzygy(R)))
    assert rec.holds and rec.non_azumaya_codim == 3
    z, o = R.zero(), R.one()
    table = [[tuple(o if k == i == j else z for k in range(5)) for j in range(5)] for i in range(5)]
    split = SCAlgebra(R, [f"e{k}" for k in range(5)], table, unit=[1] * 5)
    with pytest.raises(NotAnOrder):
        maximality_certificate(sc_algebra_as_order(split))


def test_certificate_ideals_parse_back():
    d = syzygy_order(R, 2).to_dict()
    checks = {c["name"]: c for c in d["checks"]}
    assert Ideal.parse(R, checks["nonfree_locus"]["value"]["ideal"]) == Ideal(R, ["u", "v", "w"])
    end_locus = Ideal.parse(R, checks["end_nonfree_locus"]["value"]["ideal"])
    assert end_locus.codimension() == 3
    assert d["verdict"] == CERTIFIED
