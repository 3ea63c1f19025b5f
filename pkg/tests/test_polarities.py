import json

import numpy as np
import pytest

from planelab.errors import NotFoundError
from planelab.plane_engine import Affine, AtInfinity, Infinity, NonVertical, Slope, Vertical, plane_from_id
from planelab.polarities import (
    Polarity,
    catalog_polarities,
    classify_line,
    export_unital,
    get_polarity,
    load_unital,
    local_dimensions,
    random_secant,
    unital_probe,
)
from planelab.scalar_algebra import cd_conj, cd_mul
from planelab.verification import check_polarity


def r(v):
    return np.array([float(v)])


def H(*c):
    return np.array(c, dtype=float)


def test_moulton_polar():
    L = get_polarity("moulton:k=2", "pi").polar(Affine(r(1), r(1)))
    assert L == NonVertical(r(1), r(-1))


def test_mutation_rho_bar_polar(rng):
    pol = get_polarity("mutation-h:mu=0.75", "rho-bar")
    a, b = rng.standard_normal((2, 4))
    L = pol.polar(Affine(a, b))
    assert np.allclose(L.s, cd_conj(a)) and np.allclose(L.t, -cd_conj(b))


def test_shift_polar_of_origin_is_the_graph():
    assert get_polarity("shift-cosh", "pi").polar(Affine(r(0), r(0))) == NonVertical(r(0), r(0))


def test_mutation_absolute_examples():
    pol = get_polarity("mutation-h:mu=0.75", "rho-bar")
    assert pol.is_absolute(Affine(H(0, 0, 0, 0), H(0, 0, 0, 0)))
    assert pol.is_absolute(Affine(H(1, 0, 0, 0), H(0.5, 0, 0, 0)))
    assert not pol.is_absolute(Affine(H(1, 0, 0, 0), H(0, 1, 0, 0)))
    assert pol.is_absolute(Infinity)


def test_spin_pi_expansion(rng):
    # y + k o (k conj y) against y - conj y + 2 r y1, both sides by the spin product
    plane = plane_from_id("spin:r=0.5")
    cs = plane.cs
    k = np.broadcast_to(H(0, 0, 0, 1), (100, 4))
    y = rng.standard_normal((100, 4))
    lhs = y + cs.multiply(k, cd_mul(k, cd_conj(y)))
    rhs = y - cd_conj(y)
    rhs[:, 0] += 2 * 0.5 * y[:, 1]
    assert np.allclose(lhs, rhs, atol=1e-12)
    pol = get_polarity(plane, "pi")
    x, yy, _ = pol.sample_unital(rng, 100)
    expand = cs.multiply(cd_mul(cd_conj(x), k), x)
    target = yy - cd_conj(yy)
    target[:, 0] += 2 * 0.5 * yy[:, 1]
    assert np.allclose(expand, target, atol=1e-9)


@pytest.mark.parametrize("ident,name", catalog_polarities())
def test_predicate_agrees_with_incidence(ident, name, rng):
    pol = get_polarity(ident, name)
    plane = pol.plane
    if name == "elliptic":
        pts = [Affine(*plane.random_coords(rng, 2)) for _ in range(200)]
        assert not any(plane.incident(p, pol.polar(p)) for p in pts)
        return
    x, y, _ = pol.sample_unital(rng, 200)
    on = [Affine(a, b) for a, b in zip(x, y)]
    off = [Affine(*plane.random_coords(rng, 2)) for _ in range(200)]
    for p in on + off:
        assert pol.is_absolute(p) == pol.is_absolute_by_incidence(p), p


@pytest.mark.parametrize("ident,name", catalog_polarities())
def test_involution_on_ideal_elements(ident, name):
    pol = get_polarity(ident, name)
    d = pol.plane.carrier_dim
    for e in (Infinity, AtInfinity, Slope(np.full(d, 0.5)), Vertical(np.full(d, -1.5))):
        assert pol.polar(pol.polar(e)) == e


@pytest.mark.parametrize("ident", ["classical-r", "classical-c", "moulton:k=2", "moulton:k=3.5"])
def test_commutative_cartesian_fields_reflection_polarity(ident):
    # (x, y) <-> [x, -y] in planes over commutative Cartesian fields
    plane = plane_from_id(ident)
    ident_map = lambda z: np.asarray(z, dtype=float) * 1.0
    pol = Polarity(plane, "reflection", ident_map, lambda z: -np.asarray(z, dtype=float), lambda x, y: plane.cs.multiply(x, x) - 2 * y)
    assert check_polarity(pol, 2000, 3).ok


def test_noncommutative_reflection_is_not_a_polarity():
    plane = plane_from_id("classical-h")
    ident_map = lambda z: np.asarray(z, dtype=float) * 1.0
    pol = Polarity(plane, "reflection", ident_map, lambda z: -np.asarray(z, dtype=float), lambda x, y: plane.cs.multiply(x, x) - 2 * y)
    assert not check_polarity(pol, 500, 3).ok


def test_vertical_secant_dimension_three():
    pol = get_polarity("mutation-h:mu=0.75", "rho-bar")
    res = classify_line(pol, Vertical(H(0, 0, 0, 0)))
    assert res.status == "secant" and res.local_dimension == 3
    for p in res.points:
        if isinstance(p, Affine):
            assert abs(p.y[0]) < 1e-9


def test_moulton_tangent():
    # y = x - 1/2 meets x o x = 2y only in the double root x = 1 (x >= 0),
    # and x^2 = x - 1/2 has no real root on the x < 0 branch
    pol = get_polarity("moulton:k=2", "pi")
    res = classify_line(pol, NonVertical(r(1), r(-0.5)))
    assert res.status == "tangent"
    (p,) = res.points
    assert p.x[0] == pytest.approx(1.0, abs=1e-4) and p.y[0] == pytest.approx(0.5, abs=1e-4)


def test_empty_unital_lines_are_exterior():
    pol = get_polarity("classical-r", "elliptic")
    for L in (NonVertical(r(0.3), r(1)), Vertical(r(2)), AtInfinity):
        assert classify_line(pol, L).status == "exterior"


def test_secant_through_a_point_is_secant(rng):
    pol = get_polarity("moulton:k=2", "pi")
    L, p = random_secant(pol, rng)
    assert pol.plane.incident(p, L)
    assert classify_line(pol, L).status in ("secant", "tangent")


@pytest.mark.parametrize(
    "ident,name,dim",
    [("mutation-h:mu=0.75", "rho-bar", 7), ("mutation-h:mu=0.75", "pi", 5), ("shift-cosh", "pi", 1), ("moulton:k=2", "pi", 1)],
)
def test_unital_probe_dimensions(ident, name, dim):
    probe = unital_probe(get_polarity(ident, name), 50, 0)
    assert probe.local_dimension == dim


def test_shift_unital_equation():
    probe = unital_probe(get_polarity("shift-cosh", "pi"), 200, 1)
    x, y = probe.samples[:, 0], probe.samples[:, 1]
    assert np.allclose(2 * y, np.cosh(2 * x) - 1, atol=1e-9)


def test_unknown_polarity():
    with pytest.raises(NotFoundError):
        get_polarity("moulton:k=2", "rho-bar")


def test_export_json_reload(tmp_path):
    pol = get_polarity("mutation-h:mu=0.75", "rho-bar")
    probe = unital_probe(pol, 1000, 5)
    path = tmp_path / "u.json"
    export_unital(path, pol, probe.samples, 5)
    meta, pts = load_unital(path)
    assert meta["plane"] == "mutation-h:mu=0.75" and meta["seed"] == 5 and "version" in meta
    assert pts.shape == (1000, 8)
    # re-check |a|^2 = b + conj(b), the mutation product of conj(a) and a being |a|^2
    a, b = pts[:, :4], pts[:, 4:]
    assert np.allclose(np.sum(a * a, axis=1), 2 * b[:, 0], atol=1e-9)
    assert np.abs(pol.predicate(a, b)).max() < 1e-9


def test_export_csv_header_and_empty(tmp_path):
    pol = get_polarity("mutation-h:mu=0.75", "rho-bar")
    path = tmp_path / "u.csv"
    export_unital(path, pol, np.zeros((0, 8)), 0, "csv")
    assert path.read_text().splitlines() == ["x0,x1,x2,x3,y0,y1,y2,y3"]
    empty = tmp_path / "e.json"
    export_unital(empty, pol, np.zeros((0, 8)), 0)
    assert json.loads(empty.read_text())["points"] == []


def test_local_dimensions_on_octonion_mutation(rng):
    pol = get_polarity("mutation-o:mu=0.75", "rho-bar")
    x, y, _ = pol.sample_unital(rng, 5)
    assert set(local_dimensions(pol, x, y).tolist()) == {15}
