import pytest

from orderforge.algebra import Ring
from orderforge.fpmod import FPModule
from orderforge.groebner import INF, Ideal
from orderforge.homological import (AtLeast, ab_verify, betti_numbers, depth_at_prime, depth_ext,
                                    depth_regseq, is_regular_element, projective_dimension,
                                    reflexive_certificate, torsionfree_test)
from orderforge.orders import koszul_syzygy

R = Ring(["u", "v", "w"])
m = Ideal(R, ["u", "v", "w"])
S = Ring(["u", "v", "w"], quotient=[R("u*v - w^2")], domain=True)


def cyc(*g):
    return FPModule.cyclic(Ideal(R, list(g)))


def ideal_mod(*g):
    return FPModule.from_ideal(Ideal(R, list(g)))


def test_depth_regseq_examples():
    rep = depth_regseq(m, FPModule.free(R, 1))
    assert rep.depth == 3 and len(rep.regular_sequence_witness) == 3
    assert depth_regseq(m, cyc("u", "v", "w")).depth == 0
    assert depth_regseq(m, koszul_syzygy(R)).depth == 2


def test_witness_is_regular_sequence():
    M = koszul_syzygy(R)
    rep = depth_regseq(m, M, seed=5)
    N = M
    for r in rep.regular_sequence_witness:
        assert is_regular_element(r, N)
        N = N.mod_element(r)


def test_depth_ext_examples():
    assert depth_ext(m, cyc("u")) == 2
    assert depth_ext(Ideal(R, ["u", "v"]), FPModule.free(R, 1)) == 2
    assert depth_ext(m, ideal_mod("u", "v")) == 2


def test_depth_undefined_is_infinite():
    assert depth_ext(Ideal(R, ["u"]), cyc("u - 1")) == INF


def test_depth_at_prime_examples():
    P = Ideal(R, ["u", "v"])
    assert depth_at_prime(P, ideal_mod("u", "v")) == 1
    assert depth_at_prime(P, FPModule.free(R, 1)) == 2
    assert depth_at_prime(P, koszul_syzygy(R)) == 2


def test_projective_dimension_examples():
    assert projective_dimension(cyc("u", "v", "w")) == 3
    assert projective_dimension(FPModule.free(R, 2)) == 0
    k = FPModule.cyclic(Ideal(S, ["u", "v", "w"]))
    assert isinstance(projective_dimension(k, bound=4), AtLeast)


def test_residue_field_betti_numbers_over_cone_grow():
    k = FPModule.cyclic(Ideal(S, ["u", "v", "w"]))
    from orderforge.groebner import resolve
    F = resolve(S, k.rank, list(k.rels), 4, minimal=True)
    b = F.betti()
    assert b[:3] == [1, 3, 4] and all(x > 0 for x in b)


@pytest.mark.parametrize("M,pd", [(cyc("u"), 1), (ideal_mod("u", "v"), 1), (cyc("u", "v", "w"), 3)])
def test_ab_examples(M, pd):
    rep = ab_verify(M, m)
    assert rep.holds and rep.pd == pd and rep.depth_ring == 3


def test_betti_numbers_of_koszul_syzygy():
    assert betti_numbers(koszul_syzygy(R), 3) == [3, 1]


def test_torsion_free_examples():
    assert torsionfree_test(ideal_mod("u", "v")).torsion_free
    rep = torsionfree_test(cyc("u"))
    assert not rep.torsion_free and rep.witness == R("u")


def test_reflexive_examples():
    assert reflexive_certificate(koszul_syzygy(R)).reflexive
    cert = reflexive_certificate(ideal_mod("u", "v"), primes=[Ideal(R, ["u", "v"])])
    assert not cert.reflexive
    assert cert.criterion_verdict == "not_reflexive"
    assert any(P == Ideal(R, ["u", "v"]) and d == 1 for P, _, d in cert.critical_primes)
    assert reflexive_certificate(FPModule.free(R, 2)).reflexive


def test_pd_one_and_height_three_gives_depth_two():
    M = koszul_syzygy(R)
    assert projective_dimension(M) == 1
    assert depth_at_prime(m, M) >= 2


def test_depth_on_quotient_ring_module():
    M = FPModule.from_ideal(Ideal(S, ["u", "w"]))
    assert depth_ext(Ideal(S, ["u", "v", "w"]), M) == 2
