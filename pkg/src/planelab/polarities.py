"""Polarities of the catalog planes, their unitals and line classification.

Every catalog polarity has the linear form

    (x, y) -> [alpha(x), beta(y)],   [s, t] -> (alpha^-1(s), beta^-1(t)),
    [c] -> (alpha(c)),   (s) -> [alpha^-1(s)],   (inf) <-> [inf]

for real-linear maps alpha and beta of the carrier. The absolute points are
then Infinity together with the affine solutions of the closed-form
predicate attached to each polarity.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import solvers
from ._version import __version__
from .errors import NotFoundError, ParameterError, UnsupportedError
from .io_utils import write_atomic
from .plane_engine import (
    Affine,
    AtInfinity,
    Infinity,
    NonVertical,
    ShiftPlane,
    Slope,
    Vertical,
    plane_from_id,
)
from .scalar_algebra import cd_conj, cd_mul

ABSOLUTE_TOL = 1e-9


def _matrix(fn, d):
    return np.stack([fn(np.eye(d)[k]) for k in range(d)], axis=-1)


class Polarity:
    def __init__(self, plane, name, alpha, beta, predicate, note=""):
        self.plane = plane
        self.name = name
        self.note = note
        d = plane.carrier_dim
        self.A = _matrix(alpha, d)
        self.B = _matrix(beta, d)
        self.A_inv = np.linalg.inv(self.A)
        self.B_inv = np.linalg.inv(self.B)
        self._predicate = predicate

    def __repr__(self):
        return f"<Polarity {self.name} on {self.plane.id}>"

    # maps

    def alpha(self, x):
        return np.asarray(x) @ self.A.T

    def beta(self, y):
        return np.asarray(y) @ self.B.T

    def polar_points(self, x, y):
        return self.alpha(x), self.beta(y)

    def polar_lines(self, s, t):
        return np.asarray(s) @ self.A_inv.T, np.asarray(t) @ self.B_inv.T

    def polar(self, e):
        if isinstance(e, Affine):
            s, t = self.polar_points(np.array(e.x), np.array(e.y))
            return NonVertical(s, t)
        if isinstance(e, NonVertical):
            x, y = self.polar_lines(np.array(e.s), np.array(e.t))
            return Affine(x, y)
        if isinstance(e, Vertical):
            return Slope(self.alpha(np.array(e.c)))
        if isinstance(e, Slope):
            return Vertical(np.array(e.s) @ self.A_inv.T)
        if e is Infinity:
            return AtInfinity
        if e is AtInfinity:
            return Infinity
        raise TypeError(f"not a plane element: {e!r}")

    __call__ = polar

    # absolute points

    def predicate(self, x, y):
        """Residual vector of the closed-form unital equation."""
        return self._predicate(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def is_absolute(self, p, tol=ABSOLUTE_TOL):
        if isinstance(p, Affine):
            x, y = np.array(p.x), np.array(p.y)
            r = np.linalg.norm(self.predicate(x, y)) / max(1.0, float(np.linalg.norm(y)))
            return bool(r <= tol)
        return p is Infinity

    def is_absolute_by_incidence(self, p, tol=ABSOLUTE_TOL):
        return self.plane.incident(p, self.polar(p), tol)

    def ideal_absolute_points(self):
        return [Infinity]

    def sample_unital(self, rng, n):
        """n affine absolute points: x is free and y solves (I - B) y = tau(alpha(x), x, 0).

        Returns (x, y, skipped) where skipped counts draws whose right-hand
        side was not in the range of I - B.
        """
        d = self.plane.carrier_dim
        M = np.eye(d) - self.B
        pinv = np.linalg.pinv(M)
        _, sv, vt = np.linalg.svd(M)
        null = vt[np.sum(sv > 1e-12) :]
        xs, ys, skipped = [], [], 0
        while sum(len(v) for v in xs) < n and skipped < 10 * n + 10:
            m = n - sum(len(v) for v in xs)
            x = rng.standard_normal((m, d))
            rhs = self.plane.tau(self.alpha(x), x, np.zeros_like(x))
            y = rhs @ pinv.T + rng.standard_normal((m, len(null))) @ null
            res = np.linalg.norm(self.predicate(x, y), axis=-1) / np.maximum(1.0, np.linalg.norm(y, axis=-1))
            good = res <= ABSOLUTE_TOL
            skipped += int(np.sum(~good))
            xs.append(x[good])
            ys.append(y[good])
        x = np.concatenate(xs) if xs else np.zeros((0, d))
        y = np.concatenate(ys) if ys else np.zeros((0, d))
        return x, y, skipped

    def predicate_jacobian(self, x, y, h=1e-5):
        """Central-difference Jacobian of the predicate in (x, y), one per row."""
        d = self.plane.carrier_dim
        z = np.concatenate([x, y], axis=-1)
        cols = []
        for k in range(2 * d):
            e = np.zeros(2 * d)
            e[k] = h
            zp, zm = z + e, z - e
            cols.append((self.predicate(zp[..., :d], zp[..., d:]) - self.predicate(zm[..., :d], zm[..., d:])) / (2 * h))
        return np.stack(cols, axis=-1)


class EllipticPolarity(Polarity):
    """The classical real elliptic polarity (x : y : z) <-> [x : y : z]
    with no absolute points."""

    def __init__(self, plane):
        self.plane = plane
        self.name = "elliptic"
        self.note = "no absolute points"

    def polar(self, e):
        if isinstance(e, Affine):
            a, b = e.x[0], e.y[0]
            if b != 0:
                return NonVertical(-a / b, -1.0 / b)
            if a != 0:
                return Vertical(-1.0 / a)
            return AtInfinity
        if isinstance(e, Slope):
            s = e.s[0]
            return NonVertical(-1.0 / s, 0.0) if s != 0 else Vertical(0.0)
        if e is Infinity:
            return NonVertical(0.0, 0.0)
        if isinstance(e, NonVertical):
            s, t = e.s[0], e.t[0]
            if t != 0:
                return Affine(s / t, -1.0 / t)
            return Slope(-1.0 / s) if s != 0 else Infinity
        if isinstance(e, Vertical):
            c = e.c[0]
            return Affine(-1.0 / c, 0.0) if c != 0 else Slope(0.0)
        if e is AtInfinity:
            return Affine(0.0, 0.0)
        raise TypeError(f"not a plane element: {e!r}")

    __call__ = polar

    def polar_points(self, x, y):
        raise UnsupportedError("the elliptic polarity has no batched affine form")

    def predicate(self, x, y):
        return np.asarray(x) ** 2 + np.asarray(y) ** 2 + 1.0

    def is_absolute(self, p, tol=ABSOLUTE_TOL):
        return False

    def ideal_absolute_points(self):
        return []

    def sample_unital(self, rng, n):
        return np.zeros((0, 1)), np.zeros((0, 1)), 0


# --- catalog -----------------------------------------------------------------


def _diag(*signs):
    v = np.array(signs, dtype=float)
    return lambda z: np.asarray(z) * v


_K = np.array([0.0, 0.0, 0.0, 1.0])
_CONJ_H = _diag(1, -1, -1, -1)
_PI_H = _diag(1, -1, 1, 1)
_KHAT = _diag(1, 1, 1, -1)
_LAMBDA = _diag(1, -1, -1, -1, 1, 1, 1, 1)


def _neg(f):
    return lambda z: -f(z)


def _cartesian_predicate(cs, iota, plus):
    """x^iota o x = y + y^plus as a residual vector."""

    def pred(x, y):
        return cs.multiply(iota(x), x) - (y + plus(y))

    return pred


def anti_auto(plane, name, iota, note=""):
    """(x, y) <-> [x^iota, -y^iota]; unital x^iota o x = y + y^iota."""
    cs = plane.cs
    return Polarity(plane, name, iota, _neg(iota), _cartesian_predicate(cs, iota, iota), note)


def _spin_pi(plane):
    cs = plane.cs
    r = cs.r

    def alpha(x):
        return cd_mul(cd_conj(x), np.broadcast_to(_K, np.shape(x)))

    def beta(y):
        out = cd_conj(y)
        out[..., 0] -= 2.0 * r * np.asarray(y)[..., 1]
        return out

    def pred(x, y):
        rhs = np.stack([2 * r * y[..., 1], 2 * y[..., 1], 2 * y[..., 2], 2 * y[..., 3]], axis=-1)
        return cs.multiply(alpha(x), x) - rhs

    return Polarity(plane, "pi", alpha, beta, pred, "x -> conj(x) k, unital conj(x)k o x = y - conj(y) + 2 r y1")


def _double_flag_kappa(plane):
    cs = plane.cs

    def kzk(z):
        k = np.broadcast_to(_K, np.shape(z))
        return cd_mul(cd_mul(k, cd_conj(z)), k)

    def pred(x, y):
        y3k = np.zeros_like(y)
        y3k[..., 3] = y[..., 3]
        return cs.multiply(kzk(x), x) - 2.0 * (y - y3k)

    return Polarity(plane, "kappa", kzk, kzk, pred, "unital k conj(x) k o x = 2(y - y3 k)")


def _octonion_lambda(plane, name):
    cs = plane.cs

    def pred(x, y):
        rhs = np.zeros_like(y)
        rhs[..., 0] = 2.0 * y[..., 0]
        rhs[..., 4:] = 2.0 * y[..., 4:]
        return cs.multiply(_LAMBDA(x), x) - rhs

    return Polarity(plane, name, _LAMBDA, _neg(_LAMBDA), pred, "unital x^lambda o x = 2(re y' + y'' l)")


def _real_part_polarity(plane, name):
    """iota = conjugation; unital conj(x) o x = 2 y0."""
    cs = plane.cs
    d = plane.carrier_dim
    conj = _diag(1, *([-1] * (d - 1)))

    def pred(x, y):
        rhs = np.zeros_like(y)
        rhs[..., 0] = 2.0 * y[..., 0]
        return cs.multiply(conj(x), x) - rhs

    return Polarity(plane, name, conj, _neg(conj), pred, "unital conj(x) o x = 2 y0")


def _moulton_pi(plane):
    cs = plane.cs
    ident = lambda z: np.asarray(z, dtype=float) * 1.0
    return Polarity(plane, "pi", ident, _neg(ident), lambda x, y: cs.multiply(x, x) - 2.0 * y, "unital x o x = 2y")


def _shift_pi(plane):
    f = plane.f
    neg = lambda z: -np.asarray(z, dtype=float)
    return Polarity(plane, "pi", neg, neg, lambda x, y: 2.0 * y - f(2.0 * x), "z <-> L - z, unital 2y = f(2x)")


def _rees_khat(plane):
    return anti_auto(plane, "kappa-hat", _KHAT, "iota (a, b) -> (a, conj b)")


_NAMES = {
    "mutation-h": ("rho-bar", "pi"),
    "mutation-o": ("rho-bar", "pi"),
    "spin": ("pi", "kappa-hat"),
    "distorted-h": ("rho", "kappa"),
    "distorted-o": ("pi", "kappa"),
    "rees": ("kappa-hat",),
    "moulton": ("pi",),
    "classical-r": ("pi", "elliptic"),
    "classical-c": ("rho-bar",),
    "classical-h": ("rho-bar",),
    "classical-o": ("rho-bar",),
}


def polarity_names(plane):
    plane = plane_from_id(plane)
    if isinstance(plane, ShiftPlane):
        return ("pi",)
    return _NAMES.get(plane.cs.family, ())


def get_polarity(plane, name):
    """The named catalog polarity of a plane (identifier or model)."""
    plane = plane_from_id(plane)
    if name not in polarity_names(plane):
        raise NotFoundError(f"no polarity {name!r} on {plane.id}; available: {polarity_names(plane)}")
    if isinstance(plane, ShiftPlane):
        return _shift_pi(plane)
    fam = plane.cs.family
    if name == "rho-bar":
        return anti_auto(plane, "rho-bar", _diag(1, *([-1] * (plane.carrier_dim - 1))), "iota = conjugation")
    if fam == "mutation-h" and name == "pi":
        return anti_auto(plane, "pi", _PI_H, "iota z -> conj(z)^i")
    if fam == "mutation-o" and name == "pi":
        return _octonion_lambda(plane, "pi")
    if fam == "spin":
        return _spin_pi(plane) if name == "pi" else anti_auto(plane, "kappa-hat", _KHAT, "iota z -> conj(z)^k")
    if fam == "distorted-h":
        return _real_part_polarity(plane, "rho") if name == "rho" else _double_flag_kappa(plane)
    if fam == "distorted-o":
        return _real_part_polarity(plane, "pi") if name == "pi" else _octonion_lambda(plane, "kappa")
    if fam == "rees":
        return _rees_khat(plane)
    if name == "elliptic":
        return EllipticPolarity(plane)
    return _moulton_pi(plane)


def catalog_polarities():
    """(plane id, polarity name) pairs covered by the polarity suites."""
    return [
        ("classical-r", "pi"),
        ("classical-r", "elliptic"),
        ("classical-h", "rho-bar"),
        ("mutation-h:mu=0.75", "rho-bar"),
        ("mutation-h:mu=0.75", "pi"),
        ("mutation-o:mu=0.75", "rho-bar"),
        ("mutation-o:mu=0.75", "pi"),
        ("spin:r=0.5", "pi"),
        ("spin:r=0.5", "kappa-hat"),
        ("distorted-h:rho=quadmean", "rho"),
        ("distorted-h:rho=quadmean", "kappa"),
        ("distorted-o:rho=quadmean", "pi"),
        ("distorted-o:rho=quadmean", "kappa"),
        ("rees:theta=1.0471975512", "kappa-hat"),
        ("moulton:k=2", "pi"),
        ("shift-cosh", "pi"),
    ]


# --- probes ------------------------------------------------------------------


@dataclass
class UnitalProbe:
    plane: str
    polarity: str
    seed: int
    samples: np.ndarray
    skipped: int
    local_dimension: int
    probe_dimensions: list = field(default_factory=list)


def local_dimensions(pol, x, y, h=1e-5, rel=1e-6):
    J = pol.predicate_jacobian(x, y, h)
    return 2 * pol.plane.carrier_dim - solvers.numerical_rank(J, rel)


def unital_probe(pol, n, seed, probes=10):
    """n affine absolute points plus the local dimension at >= ``probes`` of them."""
    rng = np.random.default_rng(seed)
    x, y, skipped = pol.sample_unital(rng, n)
    d = pol.plane.carrier_dim
    px, py = x[:probes], y[:probes]
    if len(px) < probes:
        ex, ey, extra = pol.sample_unital(rng, probes - len(px))
        px, py = np.concatenate([px, ex]), np.concatenate([py, ey])
        skipped += extra
    dims = [int(v) for v in local_dimensions(pol, px, py)] if len(px) else []
    mode = max(set(dims), key=dims.count) if dims else -1
    return UnitalProbe(pol.plane.id, pol.name, seed, np.concatenate([x, y], axis=-1).reshape(-1, 2 * d), skipped, mode, dims)


@dataclass
class LineClass:
    status: str
    points: list
    local_dimension: int = None
    best_residual: float = 0.0


def _restricted(pol, L):
    """Predicate restricted to an affine line, parametrized by x (or y on verticals)."""
    plane = pol.plane
    if isinstance(L, Vertical):
        c = np.array(L.c)
        return (lambda v: pol.predicate(np.broadcast_to(c, v.shape), v)), (lambda v: Affine(c, v))
    s, t = np.array(L.s), np.array(L.t)

    def G(v):
        return pol.predicate(v, plane.tau(np.broadcast_to(s, v.shape), v, np.broadcast_to(t, v.shape)))

    def point(v):
        return Affine(v, plane.tau(s, v, t))

    return G, point


def classify_line(pol, L, budget=64, seed=0, scale=2.0):
    """Secant, tangent or exterior, by multi-start solving on the line.

    Returns status ``indeterminate`` when no start converged but the best
    residual stayed small, rather than guessing.
    """
    ideal = [p for p in pol.ideal_absolute_points() if pol.plane.incident(p, L)]
    if L is AtInfinity:
        status = "tangent" if len(ideal) == 1 else ("exterior" if not ideal else "secant")
        return LineClass(status, ideal, 0 if ideal else None)
    d = pol.plane.carrier_dim
    G, point = _restricted(pol, L)
    rng = np.random.default_rng(seed)
    starts = scale * rng.standard_normal((budget, d))
    v, rn = solvers.gauss_newton_batch(G, starts)
    good = rn <= 1e-10
    sols = []
    for cand in v[good]:
        if all(np.linalg.norm(cand - o) > 1e-3 * max(1.0, np.linalg.norm(o)) for o in sols):
            sols.append(cand)
    best = float(rn.min()) if len(rn) else np.inf
    points = ideal + [point(s) for s in sols]
    if not points:
        return LineClass("exterior" if best > 1e-3 else "indeterminate", [], None, best)
    if len(points) == 1:
        # a double root has a singular Jacobian yet is isolated
        return LineClass("tangent", points, 0, best)
    dim = 0
    if sols:
        h = 1e-5
        arr = np.array(sols)
        J = np.stack([(G(arr + h * np.eye(d)[k]) - G(arr - h * np.eye(d)[k])) / (2 * h) for k in range(d)], axis=-1)
        dims = d - solvers.numerical_rank(J)
        dim = int(max(set(dims.tolist()), key=dims.tolist().count))
    return LineClass("secant", points, dim, best)


def random_secant(pol, rng):
    """A line of random slope through a random affine unital point."""
    x, y, _ = pol.sample_unital(rng, 1)
    s = pol.plane.random_coords(rng, 1)
    t = pol.plane.intercept(s, x, y)
    return NonVertical(s[0], t[0]), Affine(x[0], y[0])


# --- export ------------------------------------------------------------------


def unital_records(pol, samples, seed):
    return {
        "plane": pol.plane.id,
        "polarity": pol.name,
        "seed": seed,
        "version": __version__,
        "points": [[float(v) for v in row] for row in samples],
    }


def export_unital(path, pol, samples, seed, fmt="json"):
    d = pol.plane.carrier_dim
    if fmt == "json":
        text = json.dumps(unital_records(pol, samples, seed), indent=1) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x{k}" for k in range(d)] + [f"y{k}" for k in range(d)])
        for row in samples:
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
    else:
        raise ParameterError(f"unknown export format {fmt!r}")
    return write_atomic(path, text)


def load_unital(path):
    """Read back a JSON or CSV export as (meta, points array)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return data, np.array(data["points"], dtype=float)
    rows = list(csv.reader(io.StringIO(text)))
    return {"header": rows[0]}, np.array(rows[1:], dtype=float)
