import numpy as np
import pytest

from oracles import real_cbrt
from planelab.errors import DegenerateInputError, ParameterError, UnsupportedError
from planelab.plane_engine import (
    Affine,
    AtInfinity,
    Infinity,
    NonVertical,
    ReciprocalIsomorphism,
    Slope,
    TschetDuality,
    Vertical,
    catalog_plane_ids,
    dualize,
    incident,
    join,
    meet,
    plane_from_id,
)

SEMIFIELD_PLANES = ["classical-r", "classical-h", "mutation-h:mu=0.75", "mutation-o:mu=0.75", "spin:r=0.5"]


def r(v):
    return np.array([float(v)])


def test_incidence_examples():
    assert incident("classical-r", Affine(r(2), r(5)), NonVertical(r(2), r(1)))
    assert incident("tschet:r=3", Affine(r(-1), r(1)), NonVertical(r(-1), r(0)))
    assert not incident("classical-r", Infinity, NonVertical(r(0), r(0)))
    assert incident("classical-r", Infinity, Vertical(r(3)))
    assert incident("classical-r", Slope(r(2)), NonVertical(r(2), r(-7)))
    assert incident("classical-r", Slope(r(2)), AtInfinity)
    assert not incident("classical-r", Slope(r(2)), Vertical(r(0)))


@pytest.mark.parametrize("ident", SEMIFIELD_PLANES)
def test_join_with_origin_gives_slope_w(ident, rng):
    plane = plane_from_id(ident)
    w = plane.random_coords(rng, 1)[0]
    one = plane.cs.one()
    L = join(plane, Affine(np.zeros_like(w), np.zeros_like(w)), Affine(one, w))
    assert np.allclose(L.s, w, atol=1e-12) and np.allclose(L.t, 0.0, atol=1e-12)


def test_moulton_join_negative_branch():
    # branch oracle: for x < 0, y = 2 s x + t; for x >= 0, y = s x + t
    # 2 = -2 s + t and -2 = s + t give s = -4/3, t = -2/3
    L = join("moulton:k=2", Affine(r(-1), r(2)), Affine(r(1), r(-2)))
    assert L.s[0] == pytest.approx(-4 / 3, abs=1e-12) and L.t[0] == pytest.approx(-2 / 3, abs=1e-12)
    plane = plane_from_id("moulton:k=2")
    assert plane.incident(Affine(r(-1), r(2)), L) and plane.incident(Affine(r(1), r(-2)), L)


def test_ideal_joins_and_meets():
    assert join("classical-r", Slope(r(1)), Infinity) is AtInfinity
    assert join("classical-r", Affine(r(1), r(1)), Infinity) == Vertical(r(1))
    assert meet("classical-r", Vertical(r(0)), AtInfinity) is Infinity
    assert meet("classical-r", NonVertical(r(1), r(0)), NonVertical(r(1), r(3))) == Slope(r(1))
    with pytest.raises(DegenerateInputError):
        join("classical-r", Infinity, Infinity)


def test_meet_examples():
    p = meet("classical-r", NonVertical(r(1), r(0)), NonVertical(r(-1), r(0)))
    assert np.allclose(p.x, 0) and np.allclose(p.y, 0)
    # tau(-1, x, 1) = 0 means -x^3 + 1 = 0, the real cube root gives x = 1
    q = meet("tschet:r=3", NonVertical(r(-1), r(1)), NonVertical(r(0), r(0)))
    assert q.x[0] == pytest.approx(real_cbrt(1.0), abs=1e-9) and q.y[0] == pytest.approx(0.0, abs=1e-9)
    assert plane_from_id("tschet:r=3").incident(q, NonVertical(r(-1), r(1)))


def test_tschet_dual_line_equation():
    plane = plane_from_id("tschet-dual:r=3")
    x, y = -1.3, 0.4
    L = join(plane, Affine(r(x), r(y)), Affine(r(0.8), r(2.0)))
    s, t = L.s[0], L.t[0]
    assert (s * x) ** 3 + t**3 == pytest.approx(y**3, abs=1e-9)


@pytest.mark.parametrize("ident", catalog_plane_ids())
def test_join_meet_adjunction(ident, rng):
    plane = plane_from_id(ident)
    for _ in range(5):
        p, q, w = (Affine(*plane.random_coords(rng, 2)) for _ in range(3))
        L, M = join(plane, p, q), join(plane, p, w)
        back = meet(plane, L, M)
        assert np.allclose(back.x, p.x, atol=1e-7 * max(1, np.abs(p.x).max()))
        assert np.allclose(back.y, p.y, atol=1e-7 * max(1, np.abs(p.y).max()))


def test_shift_plane_parallel_classes(rng):
    plane = plane_from_id("shift-cosh")
    a = r(0.3)
    L, M = NonVertical(a, r(0.0)), NonVertical(a, r(1.0))
    assert meet(plane, L, M) == Slope(a)
    # shifts with different offsets meet exactly once: f(x - a) - f(x - b) is monotone
    q = meet(plane, NonVertical(r(0.3), r(0.0)), NonVertical(r(-1.1), r(0.5)))
    assert plane.incident(q, NonVertical(r(0.3), r(0.0)), 1e-8)
    xs = np.linspace(-30, 30, 20001)
    diff = (np.cosh(xs - 0.3) - np.cosh(xs + 1.1)) - 0.5
    assert np.count_nonzero(np.diff(np.sign(diff))) == 1


def test_shift_identifiers():
    assert plane_from_id("shift-cosh").carrier_dim == 1
    assert plane_from_id("shift-power:c=0.5").carrier_dim == 2
    with pytest.raises(ParameterError):
        plane_from_id("shift-knarr")
    assert plane_from_id("shift-knarr:nonstandard=1").id == "shift-knarr:nonstandard=1"


def _same_incidence(P, Q, rng, n=1000):
    """Incidence of random (point, line) pairs agrees in both planes, with
    half the pairs made incident in P."""
    for k in range(n):
        x, s, t = (P.random_coords(rng, 1) for _ in range(3))
        y = P.tau(s, x, t) if k % 2 else P.random_coords(rng, 1)
        p, L = Affine(x[0], y[0]), NonVertical(s[0], t[0])
        if P.incident(p, L, 1e-9) != Q.incident(p, L, 1e-9):
            return False
    return True


def test_dualize_r1_is_classical(rng):
    assert _same_incidence(dualize("tschet:r=1"), plane_from_id("classical-r"), rng)


def test_dualize_twice(rng):
    T = plane_from_id("tschet:r=3")
    assert dualize(dualize(T)) == T
    assert _same_incidence(dualize(dualize(T)), T, rng)


def test_dualize_other_families_unsupported():
    with pytest.raises(UnsupportedError):
        dualize("classical-h")


@pytest.mark.parametrize("corr", [TschetDuality(3.0), ReciprocalIsomorphism(3.0), ReciprocalIsomorphism(0.5)])
def test_tschet_maps_preserve_incidence(corr, rng):
    flags = corr.source.sample_flags(rng, 2000)
    worst, _ = corr.incidence_defect(flags)
    assert worst <= 1e-8
