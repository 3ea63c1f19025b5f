import json
from fractions import Fraction

import numpy as np
import pytest

from planelab.errors import ParameterError, UnsupportedError
from planelab.plane_engine import plane_from_id
from planelab.polarities import anti_auto, get_polarity
from planelab.verification import (
    CLASSES,
    Region,
    check_algebra_axioms,
    check_plane_axioms,
    check_polarity,
    configuration_test,
    highest_class,
    nowhere_desarguesian_sample,
    replay_witness,
    smoothness_probe,
)
from planelab.coordinate_structures import structure_from_id

CORRUPTED = "tschet:r=3:boundary=0.1"


def test_classical_h_axioms():
    rep = check_plane_axioms("classical-h", 10_000, 0)
    assert rep.ok and rep.max_residual < 1e-10 and rep.attempted >= 10_000


def test_tschet_axioms():
    rep = check_plane_axioms("tschet:r=3", 2000, 0)
    assert rep.ok and rep.max_residual < 1e-8


def test_corrupted_tschet_fails_with_witness():
    rep = check_plane_axioms(CORRUPTED, 2000, 0)
    assert not rep.ok and rep.witnesses
    w = rep.witnesses[0]
    if w["check"] in ("join", "meet", "parallel", "unique-crossing", "parallel-disjoint"):
        assert replay_witness(CORRUPTED, w) == pytest.approx(w["residual"], abs=1e-12)


def test_axiom_reports_are_deterministic():
    a = check_plane_axioms("moulton:k=2", 500, 9).to_dict()
    b = check_plane_axioms("moulton:k=2", 500, 9).to_dict()
    assert a == b
    json.loads(check_plane_axioms("moulton:k=2", 50, 9).to_json())


def test_algebra_class_examples():
    mut = structure_from_id("mutation-h:mu=0.75")
    assert check_algebra_axioms(mut, "semifield", 1000, 0).ok
    rep = check_algebra_axioms(mut, "skewfield", 1000, 0)
    assert not rep.ok
    assert rep.details["failures"]["associative"] > 0
    assert any(w["check"] == "associative-basis" for w in rep.witnesses)
    assert check_algebra_axioms(structure_from_id("andre:phi=homomorphic:beta=0.5"), "nearfield", 1000, 0).ok


def test_mutation_associativity_witness_on_basis():
    # brute force over basis triples: (i o i) o j against i o (i o j)
    cs = structure_from_id("mutation-h:mu=0.75")
    e = np.eye(4)
    worst = max(
        float(np.linalg.norm(cs.multiply(cs.multiply(e[a], e[b]), e[c]) - cs.multiply(e[a], cs.multiply(e[b], e[c]))))
        for a in range(4)
        for b in range(4)
        for c in range(4)
    )
    assert worst > 0.5
    rep = check_algebra_axioms(cs, "skewfield", 100, 0)
    assert rep.max_residual >= worst - 1e-12


def test_highest_class():
    assert highest_class(structure_from_id("classical-h"), 300) == "skewfield"
    assert highest_class(structure_from_id("moulton:k=2"), 300) == "cartesian"
    with pytest.raises(ParameterError):
        check_algebra_axioms(structure_from_id("classical-h"), "ring", 10, 0)
    assert CLASSES[0] == "cartesian"


def test_polarity_suite_and_negative_control():
    assert check_polarity(get_polarity("mutation-h:mu=0.75", "rho-bar"), 2000, 1).ok
    plane = plane_from_id("classical-h")
    # identity is an automorphism, not an anti-automorphism: no polarity
    fake = anti_auto(plane, "fake", lambda z: np.asarray(z, dtype=float) * 1.0)
    rep = check_polarity(fake, 500, 1)
    assert not rep.ok and rep.witnesses


def test_classical_desargues():
    res = configuration_test("classical-r", "desargues", None, 100, 0)
    assert res.max_discrepancy < 1e-9 and res.failures == 0
    assert configuration_test("classical-r", "pappus", None, 50, 0).max_discrepancy < 1e-9


def _moulton_oracle(k):
    """Exact rational Moulton plane: lines of negative slope bend at x = 0."""
    k = Fraction(k)
    bend = lambda x: k * x if x < 0 else x

    def join(p, q):
        (x1, y1), (x2, y2) = p, q
        s = (y2 - y1) / (x2 - x1)
        if s < 0:
            s = (y2 - y1) / (bend(x2) - bend(x1))
        return s, y1 - (k * s * x1 if s < 0 and x1 < 0 else s * x1)

    def value(L, x):
        s, t = L
        return (k * s * x if s < 0 and x < 0 else s * x) + t

    def meet(L, M):
        hits = []
        for side in (0, 1):
            f1 = L[0] * (k if L[0] < 0 and side == 0 else 1)
            f2 = M[0] * (k if M[0] < 0 and side == 0 else 1)
            if f1 == f2:
                continue
            x = (M[1] - L[1]) / (f1 - f2)
            if (x < 0) == (side == 0):
                hits.append((x, value(L, x)))
        assert len(hits) == 1
        return hits[0]

    return join, meet, value


def test_moulton_desargues_witness_exact_recomputation():
    res = configuration_test("moulton:k=2", "desargues", Region.window(-3, 3, -3, 3), 100, 0)
    assert res.max_discrepancy > 1e-3 and res.witness
    join, meet, value = _moulton_oracle(2)
    P = {k: (Fraction(v[0][0]), Fraction(v[1][0])) for k, v in res.witness["points"].items()}
    X = lambda a, b, c, d: meet(join(P[a], P[b]), join(P[c], P[d]))
    p, q, r = X("A", "B", "A'", "B'"), X("B", "C", "B'", "C'"), X("C", "A", "C'", "A'")
    L = join(p, q)
    exact = abs(value(L, r[0]) - r[1]) / max(1, abs(r[1]))
    assert float(exact) == pytest.approx(res.max_discrepancy, rel=1e-6)
    assert replay_witness("moulton:k=2", res.witness) == pytest.approx(res.max_discrepancy, abs=1e-12)


def test_tschet_fails_in_every_sampled_disk():
    results = nowhere_desarguesian_sample("tschet:r=2", disks=5, seed=4)
    assert all(r.max_discrepancy > 1e-3 for r in results)


def test_regions():
    with pytest.raises(ParameterError):
        Region.window(1, 0, 0, 1)
    with pytest.raises(ParameterError):
        Region.disk(0, 0, 0)
    with pytest.raises(UnsupportedError):
        configuration_test("classical-c", "desargues", Region.disk(0, 0, 1), 5, 0)


def test_smoothness_examples():
    rep = smoothness_probe("moulton:k=2", "slope-sign boundary", 1, at=[-1.0])
    (probe,) = rep.probes
    # analytic one-sided derivatives in s of tau(s, -1, t): k x = -2 on the left, x = -1 on the right
    assert probe["left"] == pytest.approx(-2.0, abs=1e-6) and probe["right"] == pytest.approx(-1.0, abs=1e-6)
    assert probe["jump"] == pytest.approx(1.0, abs=1e-6)
    classical = smoothness_probe("classical-r")
    assert classical.smooth and classical.note == "smooth: no locus"
    tschet = smoothness_probe("tschet:r=3", order=1)
    assert tschet.jump_detected
    assert all(p["jump"] > 0 for p in tschet.probes if p["x"] < 0)
    assert smoothness_probe("tschet-dual:r=3").jump_detected
    with pytest.raises(UnsupportedError):
        smoothness_probe("classical-h")
