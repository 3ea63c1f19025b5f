"""Axiom suites, configuration testers and one-sided smoothness probes.

Every suite is deterministic in (plane, seed). Failures are stored as
witness dictionaries carrying the full input coordinates, so a witness can
be re-evaluated later with :func:`replay_witness`.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import solvers
from .coordinate_structures import (
    SOLVE_TOL,
    CoordinateStructure,
    Moulton,
    Tschet,
    TschetDual,
    structure_from_id,
)
from .errors import DegenerateInputError, ParameterError, SolverError, UnsupportedError
from .plane_engine import (
    Affine,
    Infinity,
    NonVertical,
    Slope,
    TernaryPlane,
    Vertical,
    plane_from_id,
)
from .polarities import Polarity
from .scalar_algebra import cd_norm

MAX_WITNESSES = 5
LAW_TOL = 1e-9
DEGENERACY = 1e-4
FAILURE_THRESHOLD = 1e-6
JUMP_THRESHOLD = 1e-3


@dataclass
class VerificationReport:
    suite: str
    plane: str
    seed: int
    attempted: int = 0
    passed: int = 0
    skipped: int = 0
    max_residual: float = 0.0
    tol: float = 0.0
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.passed + self.skipped == self.attempted and not self.witnesses

    def record(self, check, residual, bad, inputs, track=True):
        """Fold one batched check into the report.

        ``residual`` and ``bad`` are arrays over the batch; ``inputs`` maps
        names to batched coordinate arrays used to rebuild witnesses.
        Residuals of checks that expect large values (``track`` false) stay
        out of ``max_residual``.
        """
        residual = np.asarray(residual, dtype=float)
        bad = np.asarray(bad, dtype=bool)
        if track:
            finite = residual[np.isfinite(residual)]
            if finite.size:
                self.max_residual = max(self.max_residual, float(finite.max()))
            if np.any(~np.isfinite(residual)):
                self.max_residual = math.inf
        n = bad.size
        self.attempted += n
        self.passed += int(n - bad.sum())
        stats = self.details.setdefault("failures", {})
        stats[check] = stats.get(check, 0) + int(bad.sum())
        for i in np.flatnonzero(bad)[: max(0, MAX_WITNESSES - len(self.witnesses))]:
            w = {"check": check, "index": int(i), "residual": float(residual[i])}
            w.update({k: np.asarray(v[i]).tolist() for k, v in inputs.items()})
            self.witnesses.append(w)

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, default=float)


# --- plane axioms ------------------------------------------------------------


def _rel(diff, ref):
    return cd_norm(diff) / np.maximum(1.0, cd_norm(ref))


def _crossings(plane, s1, t1, s2, t2, center, width=None, samples=401):
    """Sign changes of the vertical gap between two real curves on a grid."""
    width = 10.0 * (1.0 + np.abs(center)) if width is None else width
    grid = center + width * np.linspace(-1.0, 1.0, samples)[None, :]
    n = s1.shape[0]
    g = plane.tau(
        np.repeat(s1, samples, axis=1).reshape(-1, 1),
        grid.reshape(-1, 1),
        np.repeat(t1, samples, axis=1).reshape(-1, 1),
    ) - plane.tau(
        np.repeat(s2, samples, axis=1).reshape(-1, 1),
        grid.reshape(-1, 1),
        np.repeat(t2, samples, axis=1).reshape(-1, 1),
    )
    return solvers.count_sign_changes(g.reshape(n, samples))


def _symbolic_pass(plane, rng, m, report, tol):
    flags = plane.sample_flags(rng, 2 * m)
    points = [p for p, _ in flags]
    lines = [L for _, L in flags]
    worst, bad = 0.0, []
    for i in range(m):
        for kind, a, b in (("join", points[2 * i], points[2 * i + 1]), ("meet", lines[2 * i], lines[2 * i + 1])):
            try:
                c = plane.join(a, b) if kind == "join" else plane.meet(a, b)
            except DegenerateInputError:
                report.skipped += 1
                report.attempted += 1
                continue
            except SolverError as exc:
                bad.append((kind, a, b, exc.best_residual))
                report.attempted += 1
                continue
            if kind == "join":
                r = max(plane.incidence_residual(a, c), plane.incidence_residual(b, c))
            else:
                r = max(plane.incidence_residual(c, a), plane.incidence_residual(c, b))
            report.attempted += 1
            if r <= tol:
                report.passed += 1
                worst = max(worst, r)
            else:
                bad.append((kind, a, b, r))
    report.max_residual = max(report.max_residual, worst)
    for kind, a, b, r in bad[: max(0, MAX_WITNESSES - len(report.witnesses))]:
        report.witnesses.append({"check": f"symbolic-{kind}", "first": repr(a), "second": repr(b), "residual": float(r)})
    report.details.setdefault("failures", {})["symbolic"] = len(bad)


def _quadrangle(plane, rng, report, tol):
    d = plane.carrier_dim
    pts = [Affine(np.zeros(d), np.zeros(d)), Affine(*plane.random_coords(rng, 2)), Slope(plane.random_coords(rng, 1)[0]), Infinity]
    collinear = []
    for i in range(4):
        for j in range(i + 1, 4):
            L = plane.join(pts[i], pts[j])
            for k in range(4):
                if k not in (i, j) and plane.incidence_residual(pts[k], L) <= tol:
                    collinear.append((i, j, k))
    report.attempted += 1
    if collinear:
        report.witnesses.append({"check": "quadrangle", "points": [repr(p) for p in pts], "collinear": collinear})
    else:
        report.passed += 1


def check_plane_axioms(plane, n=1000, seed=0, tol=None):
    """Unique join, unique meet, parallels and a nondegenerate quadrangle.

    The affine checks run batched on n samples each. For real planes the
    uniqueness claims are also checked directly: curves of distinct slope
    must cross exactly once and curves of equal slope never, counted by
    sign changes on a grid around the computed meet.
    """
    plane = plane_from_id(plane)
    tol = plane.tol if tol is None else tol
    rng = np.random.default_rng(seed)
    rep = VerificationReport("plane-axioms", plane.id, seed, tol=tol)
    rc = plane.random_coords

    x1, y1, x2, y2 = (rc(rng, n) for _ in range(4))
    s, t, ok = plane.join_affine(x1, y1, x2, y2)
    res = np.maximum(plane.point_on_line_residual(x1, y1, s, t), plane.point_on_line_residual(x2, y2, s, t))
    rep.record("join", res, ~ok | ~(res <= tol), {"x1": x1, "y1": y1, "x2": x2, "y2": y2})

    s1, t1, s2, t2 = (rc(rng, n) for _ in range(4))
    x, y, ok = plane.meet_affine(s1, t1, s2, t2)
    res = np.maximum(plane.point_on_line_residual(x, y, s1, t1), plane.point_on_line_residual(x, y, s2, t2))
    rep.record("meet", res, ~ok | ~(res <= tol), {"s1": s1, "t1": t1, "s2": s2, "t2": t2})

    # through (x, y) there is one line of slope s: its intercept is recovered from tau
    ps, px, pt = (rc(rng, n) for _ in range(3))
    back = plane.intercept(ps, px, plane.tau(ps, px, pt))
    res = _rel(back - pt, pt)
    rep.record("parallel", res, ~(res <= tol), {"s": ps, "x": px, "t": pt})

    if plane.carrier_dim == 1:
        m = min(n, 2000)
        cnt = _crossings(plane, s1[:m], t1[:m], s2[:m], t2[:m], np.where(np.isfinite(x[:m]), x[:m], 0.0))
        rep.record("unique-crossing", np.abs(cnt - 1.0), cnt != 1, {"s1": s1, "t1": t1, "s2": s2, "t2": t2})
        cnt = _crossings(plane, s1[:m], t1[:m], s1[:m], t2[:m], np.zeros((m, 1)))
        rep.record("parallel-disjoint", cnt.astype(float), cnt != 0, {"s": s1, "t1": t1, "t2": t2})

    _symbolic_pass(plane, rng, min(n, 200), rep, tol)
    _quadrangle(plane, rng, rep, tol)
    return rep


# --- algebra classes ---------------------------------------------------------

CLASSES = ("cartesian", "quasifield", "nearfield", "semifield", "skewfield")
_LAWS = {
    "cartesian": ("additive-group", "linear-form", "identity", "zero", "solvability", "difference-solvability"),
    "quasifield": ("left-distributive",),
    "nearfield": ("left-distributive", "associative"),
    "semifield": ("left-distributive", "right-distributive"),
    "skewfield": ("left-distributive", "right-distributive", "associative"),
}


def laws_for(cls):
    if cls not in CLASSES:
        raise ParameterError(f"unknown algebra class {cls!r}; choose from {CLASSES}")
    return _LAWS["cartesian"] + _LAWS[cls] if cls != "cartesian" else _LAWS["cartesian"]


def _basis_triples(d):
    i, j, k = (g.ravel() for g in np.meshgrid(range(d), range(d), range(d), indexing="ij"))
    e = np.eye(d)
    return e[i], e[j], e[k]


def check_algebra_axioms(cs, cls, n=1000, seed=0, tol=None):
    """Test exactly the laws of the requested class on n random samples.

    Associativity is tried on all triples of basis vectors before the random
    samples, so a failing structure reports a basis-level witness when one
    exists.
    """
    cs = structure_from_id(cs) if isinstance(cs, str) else cs
    tol = LAW_TOL if tol is None else tol
    rng = np.random.default_rng(seed)
    rep = VerificationReport(f"algebra-{cls}", cs.id, seed, tol=tol)
    d = cs.carrier_dim
    M, add = cs.multiply, cs.add
    a, b, c = (cs.random(rng, n) for _ in range(3))
    zero, one = np.zeros((n, d)), cs.one((n,))
    rel = lambda u, v: _rel(u - v, v)
    ins = {"a": a, "b": b, "c": c}
    for law in laws_for(cls):
        if law == "additive-group":
            r = np.maximum.reduce([rel(add(add(a, b), c), add(a, add(b, c))), rel(add(a, zero), a), rel(add(zero, a), a)])
            # every x has an additive inverse: a + t = 0 solved through the intercept of slope 1
            inv = cs.intercept(one, a, zero)
            r = np.maximum(r, rel(add(a, inv), zero))
        elif law == "linear-form":
            r = rel(cs.tau(a, b, c), add(M(a, b), c))
        elif law == "identity":
            r = np.maximum(rel(M(one, a), a), rel(M(a, one), a))
        elif law == "zero":
            r = np.maximum(cd_norm(M(zero, a)), cd_norm(M(a, zero)))
        elif law == "solvability":
            xs, r1 = cs.solve_slope(a, b)
            xp, r2 = cs.solve_point(a, b)
            r = np.maximum(np.maximum(r1, r2), np.maximum(rel(M(xs, a), b), rel(M(a, xp), b)))
            r = np.where(np.isfinite(r), r, np.inf)
            rep.record(law, r, ~(r <= max(tol, SOLVE_TOL)), ins)
            continue
        elif law == "difference-solvability":
            # a o x = b o x + c has exactly one solution for a != b
            x, _, okm = cs.meet_affine(a, zero, b, c)
            r = rel(M(a, x), add(M(b, x), c))
            rep.record(law, r, ~okm | ~(r <= max(tol, SOLVE_TOL)), ins)
            continue
        elif law == "left-distributive":
            r = rel(M(a, b + c), M(a, b) + M(a, c))
        elif law == "right-distributive":
            r = rel(M(a + b, c), M(a, c) + M(b, c))
        else:
            ea, eb, ec = _basis_triples(d)
            rb = rel(M(M(ea, eb), ec), M(ea, M(eb, ec)))
            rep.record(law + "-basis", rb, ~(rb <= tol), {"a": ea, "b": eb, "c": ec})
            r = rel(M(M(a, b), c), M(a, M(b, c)))
        rep.record(law, r, ~(r <= tol), ins)
    return rep


def highest_class(cs, n=500, seed=0):
    """The strongest class in CLASSES whose suite passes, or None."""
    best = None
    for cls in CLASSES:
        if check_algebra_axioms(cs, cls, n, seed).ok:
            best = cls
    return best


# --- polarity suites ---------------------------------------------------------


def check_polarity(pol, n=1000, seed=0, tol=1e-8):
    """Involution and the duality law  p on L  <=>  polar(L) on polar(p)."""
    plane = pol.plane
    rng = np.random.default_rng(seed)
    rep = VerificationReport(f"polarity-{pol.name}", plane.id, seed, tol=tol)
    rc = plane.random_coords
    if type(pol) is Polarity:
        s, x, t = rc(rng, n), rc(rng, n), rc(rng, n)
        y = plane.tau(s, x, t)
        px, py = pol.polar_lines(s, t)
        ls, lt = pol.polar_points(x, y)
        r = plane.point_on_line_residual(px, py, ls, lt)
        rep.record("duality-incident", r, ~(r <= tol), {"s": s, "x": x, "t": t})
        # off the line the images must stay off
        y2 = y + 1.0 + np.abs(rc(rng, n))
        ls2, lt2 = pol.polar_points(x, y2)
        r2 = plane.point_on_line_residual(px, py, ls2, lt2)
        rep.record("duality-nonincident", r2, r2 <= tol, {"s": s, "x": x, "t": t, "y": y2}, track=False)
        bx, by = pol.polar_lines(ls, lt)
        r3 = np.maximum(_rel(bx - x, x), _rel(by - y, y))
        rep.record("involution", r3, ~(r3 <= tol), {"x": x, "y": y})
        m = min(n, 300)
    else:
        m = n
    worst, failures = 0.0, []
    for p, L in plane.sample_flags(rng, m):
        q, M = pol.polar(L), pol.polar(p)
        r = plane.incidence_residual(q, M)
        inv = pol.polar(q)
        back = isinstance(inv, type(L)) and all(np.allclose(u, v, rtol=tol, atol=tol) for u, v in zip(inv.arrays(), L.arrays()))
        rep.attempted += 1
        if r <= tol and back:
            rep.passed += 1
            worst = max(worst, r)
        else:
            failures.append({"check": "duality-symbolic", "point": repr(p), "line": repr(L), "residual": float(r), "involution": back})
    rep.max_residual = max(rep.max_residual, worst)
    rep.witnesses.extend(failures[: max(0, MAX_WITNESSES - len(rep.witnesses))])
    return rep


# --- configurations ----------------------------------------------------------


@dataclass
class Region:
    """An affine window (xmin, xmax, ymin, ymax) or a disk (cx, cy, radius)
    for real planes."""

    kind: str
    params: tuple

    @classmethod
    def window(cls, xmin, xmax, ymin, ymax):
        if not (xmin < xmax and ymin < ymax):
            raise ParameterError("window must be nonempty")
        return cls("window", (float(xmin), float(xmax), float(ymin), float(ymax)))

    @classmethod
    def disk(cls, cx, cy, radius):
        if not radius > 0:
            raise ParameterError("disk radius must be positive")
        return cls("disk", (float(cx), float(cy), float(radius)))

    def sample(self, rng):
        if self.kind == "window":
            x0, x1, y0, y1 = self.params
            return np.array([rng.uniform(x0, x1)]), np.array([rng.uniform(y0, y1)])
        cx, cy, r = self.params
        rad, ang = r * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
        return np.array([cx + rad * math.cos(ang)]), np.array([cy + rad * math.sin(ang)])

    def span(self):
        if self.kind == "window":
            return self.params[0], self.params[1]
        cx, _, r = self.params
        return cx - r, cx + r


@dataclass
class ConfigurationResult:
    plane: str
    kind: str
    seed: int
    trials: int
    skipped: int
    max_discrepancy: float
    failures: int
    witness: dict

    def to_dict(self):
        return asdict(self)


def _point_on(plane, L, rng, region):
    if isinstance(L, Vertical):
        return Affine(L.c, plane.random_coords(rng, 1)[0])
    if region is not None:
        lo, hi = region.span()
        x = np.array([rng.uniform(lo, hi)])
    else:
        x = plane.random_coords(rng, 1)[0]
    return Affine(x, plane.tau(np.array(L.s), x, np.array(L.t)))


def _far(p, q):
    return float(np.linalg.norm(np.concatenate([np.subtract(p.x, q.x), np.subtract(p.y, q.y)]))) > DEGENERACY


def _discrepancy(plane, R, L):
    """Vertical chart distance of R from L, relative to the size of R."""
    if isinstance(L, Vertical):
        return float(cd_norm(np.subtract(R.x, L.c)) / max(1.0, float(cd_norm(np.array(R.x)))))
    y = plane.tau(np.array(L.s)[None], np.array(R.x)[None], np.array(L.t)[None])[0]
    return float(cd_norm(y - np.array(R.y)) / max(1.0, float(cd_norm(np.array(R.y)))))


def _slopes_apart(L, M):
    if isinstance(L, Vertical) or isinstance(M, Vertical):
        return not (isinstance(L, Vertical) and isinstance(M, Vertical))
    return float(np.linalg.norm(np.subtract(L.s, M.s))) > DEGENERACY


def _meet_checked(plane, L, M):
    if not _slopes_apart(L, M):
        raise DegenerateInputError("nearly parallel lines")
    P = plane.meet(L, M)
    if not isinstance(P, Affine):
        raise DegenerateInputError("meet at infinity")
    return P


def _close_configuration(plane, kind, base):
    """Closing point, closing line and discrepancy for stored base points."""
    J, X = plane.join, lambda L, M: _meet_checked(plane, L, M)
    if kind == "desargues":
        A, B, C, A2, B2, C2 = (base[k] for k in ("A", "B", "C", "A'", "B'", "C'"))
        P = X(J(A, B), J(A2, B2))
        Q = X(J(B, C), J(B2, C2))
        R = X(J(C, A), J(C2, A2))
    else:
        A1, A2, A3, B1, B2, B3 = (base[k] for k in ("A1", "A2", "A3", "B1", "B2", "B3"))
        P = X(J(A1, B2), J(A2, B1))
        Q = X(J(A1, B3), J(A3, B1))
        R = X(J(A2, B3), J(A3, B2))
    if not _far(P, Q):
        raise DegenerateInputError("closing points coincide")
    L = J(P, Q)
    return R, L, _discrepancy(plane, R, L)


def _random_base(plane, kind, rng, region):
    draw = (lambda: Affine(*region.sample(rng))) if region is not None else (lambda: Affine(*plane.random_coords(rng, 2)))
    if kind == "desargues":
        O, A, B, C = draw(), draw(), draw(), draw()
        pts = {"O": O, "A": A, "B": B, "C": C}
        for name, P in (("A'", A), ("B'", B), ("C'", C)):
            pts[name] = _point_on(plane, plane.join(O, P), rng, region)
        lines = [plane.join(O, A), plane.join(O, B), plane.join(O, C)]
        for i in range(3):
            for j in range(i + 1, 3):
                if not _slopes_apart(lines[i], lines[j]):
                    raise DegenerateInputError("perspective lines nearly coincide")
    else:
        P1, P2, Q1, Q2 = draw(), draw(), draw(), draw()
        l1, l2 = plane.join(P1, P2), plane.join(Q1, Q2)
        if not _slopes_apart(l1, l2):
            raise DegenerateInputError("carrier lines nearly parallel")
        pts = {"A1": P1, "A2": P2, "A3": _point_on(plane, l1, rng, region), "B1": Q1, "B2": Q2, "B3": _point_on(plane, l2, rng, region)}
    vals = list(pts.values())
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if not _far(vals[i], vals[j]):
                raise DegenerateInputError("configuration points too close")
    return pts


def configuration_test(plane, kind="desargues", region=None, trials=100, seed=0, max_retries=50, stop_at=None):
    """Random Desargues or Pappus configurations and their closing discrepancy.

    Desargues: triangles ABC and A'B'C' in perspective from O. Pappus: two
    point triples on two lines. The discrepancy is the vertical chart
    distance of the third closing point from the line through the other
    two, relative to max(1, |R|). Degenerate draws are redrawn. With
    ``stop_at`` the search ends at the first discrepancy above it.
    """
    plane = plane_from_id(plane)
    if kind not in ("desargues", "pappus"):
        raise ParameterError(f"unknown configuration {kind!r}")
    if region is not None and plane.carrier_dim != 1:
        raise UnsupportedError("regions are supported for real planes only")
    rng = np.random.default_rng(seed)
    worst, witness, skipped, failures, done = -1.0, None, 0, 0, 0
    while done < trials:
        for _ in range(max_retries):
            try:
                base = _random_base(plane, kind, rng, region)
                R, L, disc = _close_configuration(plane, kind, base)
                break
            except (DegenerateInputError, SolverError):
                skipped += 1
        else:
            raise SolverError(f"no nondegenerate {kind} configuration after {max_retries} draws", math.nan)
        done += 1
        failures += disc > FAILURE_THRESHOLD
        if disc > worst:
            worst = disc
            witness = {
                "kind": kind,
                "points": {k: [list(v.x), list(v.y)] for k, v in base.items()},
                "closing_point": [list(R.x), list(R.y)],
                "closing_line": repr(L),
                "discrepancy": disc,
            }
        if stop_at is not None and disc > stop_at:
            break
    return ConfigurationResult(plane.id, kind, seed, done, skipped, float(worst), int(failures), witness)


def nowhere_desarguesian_sample(plane, disks=20, radius=1.0, box=5.0, trials=200, seed=0, threshold=1e-3):
    """Sampled form of the claim that Desargues fails in every open region:
    random disks with centers in [-box, box]^2, each searched until a
    configuration misses by more than ``threshold`` or the trials run out.
    Returns the per-disk results."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(disks):
        c = rng.uniform(-box, box, size=2)
        out.append(configuration_test(plane, "desargues", Region.disk(c[0], c[1], radius), trials, seed + 1 + k, stop_at=threshold))
    return out


# --- witness replay ----------------------------------------------------------


def replay_witness(plane, witness):
    """Recompute the residual or discrepancy stored in a witness."""
    plane = plane_from_id(plane)
    if "kind" in witness:
        base = {k: Affine(np.array(v[0]), np.array(v[1])) for k, v in witness["points"].items()}
        return _close_configuration(plane, witness["kind"], base)[2]
    check = witness["check"]
    a = lambda k: np.array(witness[k], dtype=float)[None]
    if check == "join":
        s, t, _ = plane.join_affine(a("x1"), a("y1"), a("x2"), a("y2"))
        return float(max(plane.point_on_line_residual(a("x1"), a("y1"), s, t)[0], plane.point_on_line_residual(a("x2"), a("y2"), s, t)[0]))
    if check == "meet":
        x, y, _ = plane.meet_affine(a("s1"), a("t1"), a("s2"), a("t2"))
        return float(max(plane.point_on_line_residual(x, y, a("s1"), a("t1"))[0], plane.point_on_line_residual(x, y, a("s2"), a("t2"))[0]))
    if check == "parallel":
        back = plane.intercept(a("s"), a("x"), plane.tau(a("s"), a("x"), a("t")))
        return float(_rel(back - a("t"), a("t"))[0])
    if check == "unique-crossing":
        x, _, _ = plane.meet_affine(a("s1"), a("t1"), a("s2"), a("t2"))
        center = np.where(np.isfinite(x), x, 0.0)
        return float(abs(_crossings(plane, a("s1"), a("t1"), a("s2"), a("t2"), center)[0] - 1))
    if check == "parallel-disjoint":
        return float(_crossings(plane, a("s"), a("t1"), a("s"), a("t2"), np.zeros((1, 1)))[0])
    raise UnsupportedError(f"no replay for check {check!r}")


# --- smoothness --------------------------------------------------------------

LOCI = ("slope-sign boundary", "x-sign boundary")


@dataclass
class SmoothnessReport:
    structure: str
    locus: str
    order: int
    smooth: bool
    max_jump: float
    probes: list
    note: str = ""

    @property
    def jump_detected(self):
        return not self.smooth

    def to_dict(self):
        d = asdict(self)
        d["jump_detected"] = self.jump_detected
        return d


def gluing_loci(cs):
    if isinstance(cs, Moulton):
        return LOCI
    if isinstance(cs, Tschet):
        return ("slope-sign boundary",)
    if isinstance(cs, TschetDual):
        return ("x-sign boundary",)
    return ()


def _one_sided(f, order, h):
    if order == 1:
        return (f(0.0) - f(-h)) / h, (f(h) - f(0.0)) / h
    return (f(0.0) - 2 * f(-h) + f(-2 * h)) / h**2, (f(2 * h) - 2 * f(h) + f(0.0)) / h**2


def smoothness_probe(cs, locus=None, order=1, probes=20, steps=None, offset=0.5, at=None):
    """One-sided finite-difference derivatives of tau across a gluing locus.

    ``slope-sign boundary`` differentiates in s at s = 0 for fixed (x, t);
    ``x-sign boundary`` differentiates in x at x = 0 for fixed (s, t). Probe
    points spread over [-2, 2] with t = ``offset``. A jump counts when it
    exceeds the threshold and the two finest steps agree to 10 percent.
    ``at`` replaces the spread of probe coordinates.
    """
    if isinstance(cs, str):
        cs = structure_from_id(cs)
    elif isinstance(cs, TernaryPlane):
        cs = cs.cs
    if not isinstance(cs, CoordinateStructure) or cs.carrier_dim != 1:
        raise UnsupportedError("smoothness probes are provided for real ternary fields")
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    if locus is None:
        loci = gluing_loci(cs)
        if not loci:
            return SmoothnessReport(cs.id, "none", order, True, 0.0, [], "smooth: no locus")
        locus = loci[0]
    if locus not in LOCI:
        raise ParameterError(f"unknown locus {locus!r}; choose from {LOCI}")
    steps = steps or ((1e-3, 1e-4, 1e-5, 1e-6) if order == 1 else (1e-2, 3e-3, 1e-3, 3e-4))
    out, worst = [], 0.0
    for v in np.linspace(-2.0, 2.0, probes) if at is None else np.atleast_1d(np.asarray(at, dtype=float)):
        if locus == "slope-sign boundary":
            f = lambda h, v=v: float(cs.tau(np.array([h]), np.array([v]), np.array([offset]))[0])
            where = {"x": float(v), "t": offset}
        else:
            f = lambda h, v=v: float(cs.tau(np.array([v]), np.array([h]), np.array([offset]))[0])
            where = {"s": float(v), "t": offset}
        est = [_one_sided(f, order, h) for h in steps]
        jumps = [abs(r - l) for l, r in est]
        stable = abs(jumps[-1] - jumps[-2]) <= 0.1 * max(jumps[-1], jumps[-2], 1e-300)
        jump = jumps[-1] if stable and jumps[-1] > JUMP_THRESHOLD else 0.0
        worst = max(worst, jump)
        out.append({**where, "left": est[-1][0], "right": est[-1][1], "jump": jump})
    note = "jump detected" if worst > 0 else "no jump at the probe points"
    return SmoothnessReport(cs.id, locus, order, worst == 0.0, worst, out, note)
