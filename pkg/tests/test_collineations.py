import numpy as np
import pytest

from planelab.collineations import (
    AffineMotion,
    Composite,
    DoubleFlagMap,
    ScaleMap,
    SpinStabilizer,
    TschetReflection,
    commutes_with,
    dimension_audit,
    draw_motion,
    make_special,
    membership,
    motion_test,
    recover_unital_motion,
    verify_collineation,
)
from planelab.errors import ParameterError, UnsupportedError
from planelab.plane_engine import Affine, AtInfinity, Infinity, NonVertical, Slope, Vertical, plane_from_id
from planelab.polarities import get_polarity

MUT = "mutation-h:mu=0.75"
MOTION_FAMILIES = [
    (MUT, "rho-bar"),
    (MUT, "pi"),
    ("mutation-o:mu=0.75", "rho-bar"),
    ("mutation-o:mu=0.75", "pi"),
    ("distorted-h:rho=quadmean", "rho"),
    ("distorted-h:rho=quadmean", "kappa"),
    ("spin:r=0.5", "pi"),
    ("spin:r=0.5", "kappa-hat"),
]


def r(v):
    return np.array([float(v)])


def H(*c):
    return np.array(c, dtype=float)


def test_identity_parameters_fix_everything(rng):
    coll = AffineMotion(MUT)
    plane = plane_from_id(MUT)
    for p, L in plane.sample_flags(rng, 50):
        assert coll.apply(p) == p and coll.apply(L) == L


def test_tschet_homology_example():
    coll = make_special("tschet:r=3", "homology", a=1.0, b=2.0)
    assert coll.apply(Affine(r(1), r(1))) == Affine(r(1), r(2))


def test_mutation_motion_example():
    # h = 1, r = s = 1, m = i, q = conj(m) = -i, n = 1/2 + j
    coll = AffineMotion(MUT, None, 1.0, 1.0, H(0, -1, 0, 0), H(0, 1, 0, 0), H(0.5, 0, 1, 0))
    img = coll.apply(Affine(H(0, 0, 0, 0), H(0, 0, 0, 0)))
    assert np.allclose(img.x, [0, 1, 0, 0]) and np.allclose(img.y, [0.5, 0, 1, 0])


@pytest.mark.parametrize("ident,name", MOTION_FAMILIES)
def test_drawn_members_are_collineations(ident, name, rng):
    pol = get_polarity(ident, name)
    for _ in range(3):
        coll = draw_motion(pol, rng, member=True)
        rep = verify_collineation(pol.plane, coll, 300, 1)
        assert rep.passed and rep.max_residual < 1e-8


def test_broken_coupling_fails_with_witness():
    coll = AffineMotion(MUT, None, 1.0, 1.0, H(0, -1, 0, 0), H(0, 1, 0, 0), H(0.5, 0, 1, 0), line_q=H(0, 1, 0, 0))
    rep = verify_collineation(MUT, coll, 300, 2)
    assert not rep.passed and rep.witness is not None
    assert rep.max_residual > 1e-3


def test_tschet_reflection_alpha_homogeneous_form(rng):
    plane = plane_from_id("tschet-dual:r=3")
    alpha = TschetReflection(plane, "alpha")
    # (x, y, 1) <-> (1, y, x) is the affine point (1/x, y/x)
    img = alpha.apply(Affine(r(2.0), r(3.0)))
    assert img.x[0] == pytest.approx(0.5) and img.y[0] == pytest.approx(1.5)
    assert alpha.apply(alpha.apply(Affine(r(-0.7), r(1.3)))).x[0] == pytest.approx(-0.7)
    assert verify_collineation(plane, alpha, 2000, 3).passed
    assert verify_collineation(plane, TschetReflection(plane, "beta"), 2000, 3).passed


def test_motion_examples():
    pol = get_polarity(MUT, "rho-bar")
    good = AffineMotion(MUT, None, 1.0, 1.0, H(0, -1, 0, 0), H(0, 1, 0, 0), H(0.5, 0, 5, 0))
    res = motion_test(pol, good, 100, 0)
    assert (res.condition_membership, res.commutes) == (True, True)
    bad = AffineMotion(MUT, None, 1.0, 2.0)
    res = motion_test(pol, bad, 100, 0)
    assert (res.condition_membership, res.commutes) == (False, False)


def test_double_flag_example():
    # (x, y) -> (i x k, y^k + j): a = i, c = k, b = conj(k) so b y c = conj(k) y k;
    # conj(n) = -n is the real-part condition of rho
    rho = get_polarity("distorted-h:rho=quadmean", "rho")
    coll = DoubleFlagMap(rho.plane, H(0, 1, 0, 0), H(0, 0, 0, -1), H(0, 0, 0, 1), H(0, 0, 1, 0))
    res = motion_test(rho, coll, 100, 0)
    assert (res.condition_membership, res.commutes) == (True, True)
    # kappa needs k a = +-a k, which a = i and c = k violate
    res = motion_test(get_polarity("distorted-h:rho=quadmean", "kappa"), coll, 100, 0)
    assert (res.condition_membership, res.commutes) == (False, False)


def test_make_special_unital_shift():
    plane = plane_from_id("mutation-h:mu=1")
    iota = get_polarity(plane, "rho-bar").alpha
    coll = make_special(plane, "shift", iota=iota, m=H(1, 0, 0, 0), n=H(0.5, 0, 0, 0))
    img = coll.apply(Affine(H(0, 0, 0, 0), H(0, 0, 0, 0)))
    assert np.allclose(img.x, [1, 0, 0, 0]) and np.allclose(img.y, [0.5, 0, 0, 0])
    assert get_polarity(plane, "rho-bar").is_absolute(img)
    with pytest.raises(ParameterError):
        make_special(plane, "shift", iota=iota, m=H(1, 0, 0, 0), n=H(0, 0, 0, 0))


def test_translation_moves_intercepts():
    coll = make_special("classical-r", "translation", n=r(2.0))
    assert coll.apply(NonVertical(r(3), r(1))) == NonVertical(r(3), r(3))


@pytest.mark.parametrize(
    "ident,params",
    [("moulton:k=2", dict(a=1.0, b=2.0)), ("moulton:k=2", dict(a=3.0, b=0.5)), ("tschet:r=3", dict(a=-1.0, b=-2.0)), ("tschet-dual:r=3", dict(a=2.0, b=-1.0))],
)
def test_homologies_are_collineations(ident, params):
    assert verify_collineation(ident, make_special(ident, "homology", **params), 2000, 4).passed


def test_homology_domain_errors():
    with pytest.raises(ParameterError):
        make_special("moulton:k=2", "homology", a=-1.0, b=1.0)
    with pytest.raises(UnsupportedError):
        make_special("classical-h", "homology", a=2.0, b=1.0)


def test_shift_plane_translation():
    coll = make_special("shift-cosh", "shift", d1=0.4, d2=-1.0)
    assert verify_collineation("shift-cosh", coll, 2000, 5).passed


def test_ideal_elements_are_fixed_and_slopes_follow_lines(rng):
    pol = get_polarity(MUT, "rho-bar")
    coll = draw_motion(pol, rng, True)
    assert coll.apply(Infinity) is Infinity and coll.apply(AtInfinity) is AtInfinity
    s = rng.standard_normal(4)
    assert coll.apply(Slope(s)) == Slope(coll.apply(NonVertical(s, np.zeros(4))).s)


def _compose_params(first, second):
    # (a, b) -> (a s + m, r s b + q o (a s) + n) with gamma = 1 composes to
    # s = s1 s2, r = r1 r2, m = m1 s2 + m2, q = r2 q1 + q2,
    # n = r2 s2 n1 + q2 o (m1 s2) + n2 by real bilinearity of the product
    p, q = first.params, second.params
    mul = first.mul
    return dict(
        r=p["r"] * q["r"],
        s=p["s"] * q["s"],
        m=p["m"] * q["s"] + q["m"],
        q=q["r"] * p["q"] + q["q"],
        n=q["r"] * q["s"] * p["n"] + mul(q["q"], p["m"] * q["s"]) + q["n"],
    )


def test_group_closure(rng):
    pol = get_polarity(MUT, "rho-bar")
    iota = pol.alpha
    motions = []
    for _ in range(2):
        m = rng.standard_normal(4)
        rhs = pol.plane.cs.multiply(iota(m), m)
        kern = rng.standard_normal(4)
        sc = float(rng.uniform(0.5, 2))
        motions.append(AffineMotion(pol.plane, None, sc, sc, iota(m), m, 0.5 * rhs + 0.5 * (kern - iota(kern))))
    comp = Composite(*motions)
    assert verify_collineation(pol.plane, comp, 500, 6).passed
    assert commutes_with(pol, comp, 100, 6)
    closed = AffineMotion(pol.plane, None, **_compose_params(*motions))
    x, y = rng.standard_normal((2, 20, 4))
    assert np.allclose(np.stack(comp.points(x, y)), np.stack(closed.points(x, y)), atol=1e-9)
    res = motion_test(pol, closed, 100, 6)
    assert res.condition_membership and res.commutes


@pytest.mark.parametrize("ident,name", MOTION_FAMILIES)
def test_membership_matches_commutation(ident, name):
    pol = get_polarity(ident, name)
    rng = np.random.default_rng(11)
    for k in range(60):
        coll = draw_motion(pol, rng, member=k % 2 == 0)
        res = motion_test(pol, coll, 40, k)
        assert res.condition_membership == res.commutes
        assert res.condition_membership == (k % 2 == 0)


def test_unital_recovery(rng):
    pol = get_polarity(MUT, "rho-bar")
    x, y, _ = pol.sample_unital(rng, 50)
    for a, b in zip(x, y):
        coll, res = recover_unital_motion(pol, a, b)
        assert res < 1e-9
        img = coll.apply(Affine(np.zeros(4), np.zeros(4)))
        assert np.allclose(img.x, a) and np.allclose(img.y, b)
        assert membership(pol, coll)


@pytest.mark.parametrize(
    "ident,name,dim",
    [(MUT, "rho-bar", 11), (MUT, "pi", 7), ("distorted-h:rho=quadmean", "rho", 9), ("distorted-h:rho=quadmean", "kappa", 5), ("spin:r=0.5", "kappa-hat", 7)],
)
def test_dimension_audit(ident, name, dim):
    assert dimension_audit(get_polarity(ident, name), seed=3)[2] == dim


def test_spin_stabilizer_domain():
    with pytest.raises(ParameterError):
        SpinStabilizer("spin:r=0.5", H(2, 0, 0, 0), H(1, 0, 0, 0), 1.0)
    with pytest.raises(UnsupportedError):
        SpinStabilizer("classical-h", H(1, 0, 0, 0), H(1, 0, 0, 0), 1.0)
    with pytest.raises(UnsupportedError):
        AffineMotion("moulton:k=2")
