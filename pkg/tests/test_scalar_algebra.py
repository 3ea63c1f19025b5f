import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import oct_table_mul, quat_table_mul
from planelab.errors import DivisionByZeroError, StructuralError
from planelab.scalar_algebra import (
    AlgebraElement,
    basis,
    cd_conj,
    cd_mul,
    cd_norm,
    conj,
    conjugation,
    element,
    half_flip,
    identity,
    inner,
    inverse,
    morphism_apply,
    morphism_verify,
    mul,
    norm,
    octonion_lambda,
    pair_auto,
    random_units,
    twisted_conjugation,
)

coords = lambda n: arrays(np.float64, n, elements=st.floats(-10, 10, allow_nan=False, width=64))


def test_quaternion_relation():
    assert mul(basis("H", "i"), basis("H", "j")) == basis("H", "k")


def test_doubling_unit_squares_to_minus_one():
    l = basis("O", "l")
    assert mul(l, l).isclose(-basis("O", "1"))


def test_i_times_l_against_table_oracle():
    i, l = basis("O", "i"), basis("O", "l")
    assert mul(i, l).isclose(AlgebraElement("O", oct_table_mul(i.coords, l.coords)))
    assert mul(i, l).isclose(basis("O", "il"))
    assert mul(l, i).isclose(-basis("O", "il"))


def test_conj_norm_inverse_examples():
    assert conj(element("C", 1, 1)) == element("C", 1, -1)
    assert norm(element("C", 3, 4)) == pytest.approx(5.0)
    assert inverse(basis("H", "j")).isclose(-basis("H", "j"))
    with pytest.raises(DivisionByZeroError):
        inverse(element("H", 0, 0, 0, 0))


def test_structural_errors():
    with pytest.raises(StructuralError):
        AlgebraElement("H", [1, 2, 3])
    with pytest.raises(StructuralError):
        mul(basis("H", "i"), basis("O", "i"))


def test_elements_are_immutable():
    a = element("H", 1, 2, 3, 4)
    with pytest.raises(AttributeError):
        a.tag = "O"
    with pytest.raises(ValueError):
        a.coords[0] = 5.0


@given(coords(8), coords(8))
def test_octonion_product_matches_table(a, b):
    assert np.allclose(cd_mul(a, b), oct_table_mul(a, b), atol=1e-10)


@given(coords(4), coords(4))
def test_quaternion_product_matches_table(a, b):
    assert np.allclose(cd_mul(a, b), quat_table_mul(a, b), atol=1e-10)


@pytest.mark.parametrize("n", [4, 8])
@given(data=st.data())
def test_composition_law(n, data):
    a, b = data.draw(coords(n)), data.draw(coords(n))
    na, nb = cd_norm(a), cd_norm(b)
    assert abs(cd_norm(cd_mul(a, b)) - na * nb) <= 1e-12 * max(1.0, na * nb)


@pytest.mark.parametrize("n", [2, 4, 8])
@given(data=st.data())
def test_conjugation_reverses_products(n, data):
    a, b = data.draw(coords(n)), data.draw(coords(n))
    assert np.allclose(cd_conj(cd_mul(a, b)), cd_mul(cd_conj(b), cd_conj(a)), atol=1e-12 * max(1, cd_norm(a) * cd_norm(b)))


@given(coords(8), coords(8))
def test_octonions_are_alternative(a, b):
    scale = max(1.0, cd_norm(a) ** 2 * cd_norm(b))
    assert cd_norm(cd_mul(cd_mul(a, a), b) - cd_mul(a, cd_mul(a, b))) <= 1e-12 * scale
    scale = max(1.0, cd_norm(a) * cd_norm(b) ** 2)
    assert cd_norm(cd_mul(cd_mul(a, b), b) - cd_mul(a, cd_mul(b, b))) <= 1e-12 * scale


def test_octonions_are_not_associative_witness():
    i, j, l = (basis("O", n) for n in ("i", "j", "l"))
    left, right = mul(mul(i, j), l), mul(i, mul(j, l))
    assert not left.isclose(right, 1e-6)
    assert left.isclose(-right)


@given(st.floats(-10, 10), st.floats(0.1, 10))
def test_norm_is_positive_definite(x, y):
    assert norm(element("C", x, y)) > 0
    assert norm(element("C", 0, 0)) == 0


# --- morphisms ---------------------------------------------------------------


def test_conjugation_on_i():
    assert morphism_apply(conjugation("H"), basis("H", "i")) == -basis("H", "i")


def test_twisted_conjugation_by_i_fixes_j():
    # i^-1 conj(j) i = (-i)(-j)(i) = k i = j, by the quaternion table
    i = basis("H", "i").coords
    oracle = quat_table_mul(quat_table_mul(-i, -basis("H", "j").coords), i)
    got = morphism_apply(twisted_conjugation(basis("H", "i")), basis("H", "j"))
    assert np.allclose(got.coords, oracle)
    assert got.isclose(basis("H", "j"))


def test_lambda_is_conjugation_after_half_flip():
    z = basis("O", "1") + basis("O", "l")
    flipped = morphism_apply(half_flip(), z)
    assert flipped.isclose(basis("O", "1") - basis("O", "l"))
    assert morphism_apply(octonion_lambda(), z).isclose(conj(flipped))
    # conj(1 - l) = 1 + l, so lambda fixes 1 + l
    assert morphism_apply(octonion_lambda(), z).isclose(z)


@pytest.mark.parametrize(
    "make",
    [
        lambda rng: conjugation("H"),
        lambda rng: conjugation("O"),
        lambda rng: octonion_lambda(),
        lambda rng: half_flip(),
        lambda rng: twisted_conjugation(random_units(rng, 4, pure=True)),
        lambda rng: inner(random_units(rng, 4)),
        lambda rng: pair_auto(random_units(rng, 4), random_units(rng, 4)),
        lambda rng: identity("O"),
    ],
    ids=["conj-h", "conj-o", "lambda", "half-flip", "twisted", "inner", "pair-auto", "identity"],
)
def test_catalog_morphisms_pass(make, rng):
    rep = morphism_verify(make(rng), 1000, 42)
    assert rep.passed and rep.hom_residual < 1e-12 and rep.inverse_residual < 1e-12


def test_conjugation_declared_automorphism_fails_with_witness():
    rep = morphism_verify(conjugation("O", variance="auto"), 1000, 42)
    assert not rep.passed
    x, y = rep.witness
    lhs = conj(mul(x, y))
    rhs = mul(conj(x), conj(y))
    assert not lhs.isclose(rhs, 1e-6)


def test_pair_auto_fixes_quaternions_setwise(rng):
    m = pair_auto(random_units(rng, 4), random_units(rng, 4))
    z = np.concatenate([rng.standard_normal(4), np.zeros(4)])
    assert np.allclose(m(z)[4:], 0.0)


def test_inverses_of_non_involutions(rng):
    for m in (inner(random_units(rng, 4)), pair_auto(random_units(rng, 4), random_units(rng, 4))):
        z = rng.standard_normal(m.dim)
        assert np.allclose(m.inverse()(m(z)), z, atol=1e-12)
    for m in (conjugation("H"), half_flip(), octonion_lambda()):
        assert m.is_involution()
        z = rng.standard_normal(m.dim)
        assert np.allclose(m(m(z)), z)
