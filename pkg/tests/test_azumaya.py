import random

import pytest
from hypothesis import given, settings, strategies as st

from orderforge.algebra import GF, Ring
from orderforge.azumaya import (DegenerateInput, NoInvolution, NotAssociative, SCAlgebra,
                                azumaya_test, dual_numbers, quaternion_algebra, reduced_norm_deg2,
                                regular_representation, sc_algebra_as_order, twisted_cokernel,
                                twisted_end)
from orderforge.fpmod import det, fitting_nonfree_locus, generic_rank, matrix_rank
from orderforge.groebner import INF, Ideal

R = Ring(["u", "v", "w"])
H = quaternion_algebra(R, -1, -1)
small = st.integers(-3, 3)


def rand_elem(rng, A=H):
    names = ["u", "v", "w", "1"]
    return A.elem([R(f"{rng.choice(range(-2, 3))}*{rng.choice(names)} + {rng.choice(range(-2, 3))}")
                   for _ in range(4)])


quats = st.tuples(*[st.tuples(small, small, small, small)] * 4).map(
    lambda cs: H.elem([R(f"{a}*u + {b}*v + {c}*w + {d}") for a, b, c, d in cs]))


def test_quaternion_relations():
    i, j, k = H.parse("i"), H.parse("j"), H.parse("k")
    assert k * k == H.scalar(-1)
    assert i * j + j * i == H.zero()
    assert H.certify()


def test_quaternion_preconditions():
    with pytest.raises(ValueError):
        quaternion_algebra(Ring(["u"], field=GF(2)), 1, 1)
    with pytest.raises(ValueError):
        quaternion_algebra(R, R("u"), -1)


def test_non_associative_table_rejected():
    z, o = R.zero(), R.one()
    table = [[(o, z), (z, o)], [(z, o), (o, o)]]
    SCAlgebra(R, ("1", "e"), table)  # e^2 = 1 + e is fine
    bad = [[(o, z, z), (z, o, z), (z, z, o)],
           [(z, o, z), (z, z, o), (z, z, z)],
           [(z, z, o), (o, z, z), (z, z, z)]]
    with pytest.raises(NotAssociative):
        SCAlgebra(R, ("1", "a", "b"), bad)


def test_regular_representation_examples():
    L1 = regular_representation(H.one())
    assert L1 == [[R.one() if r == c else R.zero() for c in range(4)] for r in range(4)]
    Ri = regular_representation(H.parse("i"), "right")
    for row in Ri:
        assert sum(1 for x in row if x) == 1
        assert all(x in (R.zero(), R.one(), -R.one()) for x in row)


@settings(max_examples=15, deadline=None)
@given(quats)
def test_det_of_left_multiplication_is_nrd_squared(q):
    assert det(regular_representation(q)) == reduced_norm_deg2(q) ** 2


@settings(max_examples=25, deadline=None)
@given(quats, quats)
def test_nrd_is_multiplicative(p, q):
    assert reduced_norm_deg2(p * q) == reduced_norm_deg2(p) * reduced_norm_deg2(q)


def test_left_regular_representation_is_homomorphism():
    rng = random.Random(1)
    for _ in range(5):
        p, q = rand_elem(rng), rand_elem(rng)
        Lp, Lq, Lpq = (regular_representation(x) for x in (p, q, p * q))
        prod = [[sum((Lp[r][k] * Lq[k][c] for k in range(4)), R.zero()) for c in range(4)] for r in range(4)]
        assert prod == Lpq


def test_nrd_examples():
    assert reduced_norm_deg2(H.parse("u*i + v")) == R("u^2 + v^2")
    assert reduced_norm_deg2(H.parse("w*j")) == R("w^2")
    with pytest.raises(NoInvolution):
        reduced_norm_deg2(dual_numbers(R).parse("e"))


def test_azumaya_examples():
    rep = azumaya_test(H)
    assert rep.is_azumaya and rep.determinant.is_constant() and rep.codim == INF
    assert rep.determinant == R.const(65536)
    F3 = Ring(["u", "v", "w"], field=GF(3))
    assert azumaya_test(quaternion_algebra(F3, -1, -1)).is_azumaya
    rep = azumaya_test(dual_numbers(R))
    assert not rep.is_azumaya and rep.locus == Ideal(R, []) and rep.codim == 0


def test_twisted_examples():
    E = twisted_cokernel(H, H.one(), H.zero())
    assert generic_rank(E.unfolded) == 4
    assert fitting_nonfree_locus(E.unfolded).locally_free_everywhere
    E = twisted_cokernel(H, H.parse("u*i + v"), H.parse("w*j"))
    assert E.injective and E.injective_by == "Nrd(f) != 0"
    rows = E.unfolded.matrix()
    assert len(rows) == 8 and len(rows[0]) == 4
    assert matrix_rank(R, rows) == 4 and generic_rank(E.unfolded) == 4
    with pytest.raises(DegenerateInput):
        twisted_cokernel(H, H.zero(), H.zero())


def test_twisted_end_examples():
    E = twisted_cokernel(H, H.one(), H.zero())
    L = twisted_end(E)
    assert generic_rank(L.module) == 4
    assert fitting_nonfree_locus(L.module).locally_free_everywhere
    L = twisted_end(twisted_cokernel(H, H.parse("u*i + v"), H.parse("w*j")))
    assert generic_rank(L.module) == 4


def test_twisted_end_rejects_torsion_presentation():
    D = dual_numbers(R)
    E = twisted_cokernel(D, D.parse("e"), D.parse("u*e"))
    assert not E.injective
    with pytest.raises(DegenerateInput):
        twisted_end(E)


def test_end_products_match_algebra():
    L = sc_algebra_as_order(H)
    assert L.ngens == 4
    assert L.certify()
