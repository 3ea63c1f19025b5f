"""Collineation families, motion-group membership and special collineations."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import solvers
from .coordinate_structures import Distorted, Moulton, Mutation, Spin, Tschet, TschetDual
from .errors import ParameterError, UnsupportedError
from .plane_engine import (
    Affine,
    AtInfinity,
    IncidenceMap,
    Infinity,
    NonVertical,
    ShiftPlane,
    Slope,
    Vertical,
    elements_close,
    plane_from_id,
)
from .scalar_algebra import Morphism, apply_array, cd_conj, cd_inv, cd_mul, cd_norm, identity

MEMBERSHIP_TOL = 1e-9
_ONE = np.array([1.0, 0.0, 0.0, 0.0])
_K = np.array([0.0, 0.0, 0.0, 1.0])
COMMUTE_TOL = 1e-8


def _a(v, d=None):
    v = np.asarray(v, dtype=float).reshape(-1)
    if d is not None and v.shape[0] != d:
        raise ParameterError(f"expected {d} coordinates, got {v.shape[0]}")
    return v


class Collineation(IncidenceMap):
    """Maps with an affine-form action: nonvertical lines go to nonvertical
    lines, verticals to verticals, slopes to slopes, and the ideal point
    Infinity and line AtInfinity are fixed.

    Subclasses implement the batched ``points``, ``lines``, ``verticals``
    and ``slopes``.
    """

    family = ""

    def __init__(self, plane, **params):
        plane = plane_from_id(plane)
        super().__init__(plane, plane, self.family)
        self.plane = plane
        self.params = params

    def __repr__(self):
        return f"<{type(self).__name__} on {self.plane.id}>"

    def map_point(self, p):
        if isinstance(p, Affine):
            X, Y = self.points(np.array(p.x)[None], np.array(p.y)[None])
            return Affine(X[0], Y[0])
        if isinstance(p, Slope):
            return Slope(self.slopes(np.array(p.s)[None])[0])
        return Infinity

    def map_line(self, L):
        if isinstance(L, NonVertical):
            S, T = self.lines(np.array(L.s)[None], np.array(L.t)[None])
            return NonVertical(S[0], T[0])
        if isinstance(L, Vertical):
            return Vertical(self.verticals(np.array(L.c)[None])[0])
        return AtInfinity

    def slopes(self, s):
        S, _ = self.lines(s, np.zeros_like(s))
        return S

    def verticals(self, c):
        X, _ = self.points(c, np.zeros_like(c))
        return X

    def then(self, other):
        """The composite: first self, then other."""
        return Composite(self, other)


class Composite(Collineation):
    family = "composite"

    def __init__(self, first, second):
        super().__init__(first.plane)
        self.first, self.second = first, second

    def points(self, x, y):
        return self.second.points(*self.first.points(x, y))

    def lines(self, s, t):
        return self.second.lines(*self.first.lines(s, t))

    def slopes(self, s):
        return self.second.slopes(self.first.slopes(s))

    def verticals(self, c):
        return self.second.verticals(self.first.verticals(c))


class AffineMotion(Collineation):
    """(a, b) -> (g(a) s + m, r g(b) s + q o (g(a) s) + n) over a semifield.

    The line action is [c, d] -> [r g(c) + q', r s g(d) - (r g(c) + q') o m + n]
    with q' = q. ``line_q`` overrides q' in the line action only; any other
    value breaks incidence and serves as a negative control.
    """

    family = "affine-motion"

    def __init__(self, plane, gamma=None, r=1.0, s=1.0, q=None, m=None, n=None, line_q=None):
        plane = plane_from_id(plane)
        cs = getattr(plane, "cs", None)
        if cs is None or not (cs.linear_in_x and cs.linear_in_s):
            raise UnsupportedError(f"affine motions need a semifield plane, not {plane.id}")
        d = plane.carrier_dim
        if r == 0 or s == 0:
            raise ParameterError("r and s must be nonzero reals")
        gamma = gamma or identity(cs.tag)
        if isinstance(gamma, Morphism) and gamma.variance != "auto":
            raise ParameterError("gamma must be an automorphism")
        z = np.zeros(d)
        q = z if q is None else _a(q, d)
        super().__init__(
            plane,
            gamma=gamma,
            r=float(r),
            s=float(s),
            q=q,
            m=z if m is None else _a(m, d),
            n=z if n is None else _a(n, d),
            line_q=q if line_q is None else _a(line_q, d),
        )
        self.mul = cs.multiply

    def g(self, z):
        gm = self.params["gamma"]
        return apply_array(gm, z) if isinstance(gm, Morphism) else gm(z)

    def points(self, x, y):
        p = self.params
        ga = self.g(x) * p["s"]
        X = ga + p["m"]
        Y = p["r"] * p["s"] * self.g(y) + self.mul(np.broadcast_to(p["q"], ga.shape), ga) + p["n"]
        return X, Y

    def lines(self, c, d):
        p = self.params
        S = p["r"] * self.g(c) + p["line_q"]
        T = p["r"] * p["s"] * self.g(d) - self.mul(S, np.broadcast_to(p["m"], S.shape)) + p["n"]
        return S, T

    def slopes(self, c):
        return self.params["r"] * self.g(c) + self.params["line_q"]

    def verticals(self, u):
        return self.g(u) * self.params["s"] + self.params["m"]


class SpinStabilizer(Collineation):
    """(x, y) -> (c^-1 x a, conj(a) o (y a) d), [s, t] -> [conj(a) s c d, conj(a) o (t a) d]
    with a a unit quaternion, c a nonzero complex number and d a nonzero real."""

    family = "spin-stabilizer"

    def __init__(self, plane, a, c, d):
        plane = plane_from_id(plane)
        if not isinstance(getattr(plane, "cs", None), Spin):
            raise UnsupportedError("the spin stabilizer acts on spin planes")
        a = _a(a, 4)
        c = _a(c, 4) if np.size(c) == 4 else np.array([float(np.real(c)), float(np.imag(c)), 0.0, 0.0])
        if abs(np.linalg.norm(a) - 1) > 1e-12:
            raise ParameterError("a must be a unit quaternion")
        if np.any(c[2:] != 0) or not np.any(c):
            raise ParameterError("c must be a nonzero complex number")
        if d == 0:
            raise ParameterError("d must be a nonzero real")
        super().__init__(plane, a=a, c=c, d=float(d))
        self.mul = plane.cs.multiply

    def _right(self, y):
        p = self.params
        ab = np.broadcast_to(cd_conj(p["a"]), np.shape(y))
        return self.mul(ab, cd_mul(y, np.broadcast_to(p["a"], np.shape(y)))) * p["d"]

    def points(self, x, y):
        p = self.params
        X = cd_mul(cd_mul(np.broadcast_to(cd_inv(p["c"]), x.shape), x), np.broadcast_to(p["a"], x.shape))
        return X, self._right(y)

    def lines(self, s, t):
        p = self.params
        S = cd_mul(cd_mul(np.broadcast_to(cd_conj(p["a"]), s.shape), s), np.broadcast_to(p["c"], s.shape)) * p["d"]
        return S, self._right(t)


class DoubleFlagMap(Collineation):
    """(x, y) -> (a x c, b y c + n), [s, t] -> [b s conj(a), b t c + n] with unit a, b, c."""

    family = "double-flag"

    def __init__(self, plane, a, b, c, n=None):
        plane = plane_from_id(plane)
        if not isinstance(getattr(plane, "cs", None), Distorted) or plane.carrier_dim != 4:
            raise UnsupportedError("double-flag maps act on distorted quaternion planes")
        a, b, c = (_a(v, 4) for v in (a, b, c))
        for name, v in (("a", a), ("b", b), ("c", c)):
            if abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ParameterError(f"{name} must be a unit quaternion")
        super().__init__(plane, a=a, b=b, c=c, n=np.zeros(4) if n is None else _a(n, 4))

    def _lr(self, left, z, right):
        return cd_mul(cd_mul(np.broadcast_to(left, z.shape), z), np.broadcast_to(right, z.shape))

    def points(self, x, y):
        p = self.params
        return self._lr(p["a"], x, p["c"]), self._lr(p["b"], y, p["c"]) + p["n"]

    def lines(self, s, t):
        p = self.params
        return self._lr(p["b"], s, cd_conj(p["a"])), self._lr(p["b"], t, p["c"]) + p["n"]


class ScaleMap(Collineation):
    """(x, y) -> (a x, b y), [s, t] -> [b s / a, b t] on a real plane."""

    family = "scale"

    def __init__(self, plane, a=1.0, b=1.0):
        plane = plane_from_id(plane)
        cs = getattr(plane, "cs", None)
        a, b = float(a), float(b)
        if a == 0 or b == 0:
            raise ParameterError("scale factors must be nonzero")
        if isinstance(cs, TschetDual):
            if a < 0:
                raise ParameterError("the branch x >= 0 must be kept: need a > 0")
        elif isinstance(cs, Tschet):
            if not cs.rho.odd or b / a < 0:
                raise ParameterError("the branch s >= 0 must be kept: need b / a > 0 and an odd rho")
        elif isinstance(cs, Moulton):
            if a < 0 or b < 0:
                raise ParameterError("Moulton scalings need a, b > 0")
        elif plane.carrier_dim != 1 or not (cs and cs.linear_in_x and cs.linear_in_s):
            raise UnsupportedError(f"scale maps are provided for real planes, not {plane.id}")
        super().__init__(plane, a=a, b=b)

    def points(self, x, y):
        return self.params["a"] * x, self.params["b"] * y

    def lines(self, s, t):
        a, b = self.params["a"], self.params["b"]
        return b * s / a, b * t


class Translation(Collineation):
    """(x, y) -> (x + m, y + n), [s, t] -> [s, t - s o m + n]."""

    family = "translation"

    def __init__(self, plane, m=None, n=None):
        plane = plane_from_id(plane)
        d = plane.carrier_dim
        m = np.zeros(d) if m is None else _a(m, d)
        n = np.zeros(d) if n is None else _a(n, d)
        cs = getattr(plane, "cs", None)
        if cs is None or not cs.cartesian:
            raise UnsupportedError(f"translations need a Cartesian plane, not {plane.id}")
        if np.any(m) and not cs.linear_in_x:
            raise UnsupportedError("horizontal translations need a left distributive product")
        super().__init__(plane, m=m, n=n)
        self.mul = cs.multiply

    def points(self, x, y):
        return x + self.params["m"], y + self.params["n"]

    def lines(self, s, t):
        m = np.broadcast_to(self.params["m"], s.shape)
        return s, t - self.mul(s, m) + self.params["n"]


class ShiftTranslation(Collineation):
    """On a shift plane: z -> z + (d1, d2) moves the shift L + (a, b) to L + (a + d1, b + d2)."""

    family = "shift"

    def __init__(self, plane, d1=0.0, d2=0.0):
        plane = plane_from_id(plane)
        if not isinstance(plane, ShiftPlane):
            raise UnsupportedError("shift translations act on shift planes")
        dim = plane.carrier_dim
        super().__init__(plane, d1=_a(d1, dim), d2=_a(d2, dim))

    def points(self, x, y):
        return x + self.params["d1"], y + self.params["d2"]

    def lines(self, s, t):
        return s + self.params["d1"], t + self.params["d2"]


class TschetReflection(IncidenceMap):
    """Reflections of the dual plane S_r.

    ``alpha``: (x, y) -> (1/x, y/x), in homogeneous form (x, y, z) <-> (z, y, x);
    [s, t] <-> [t, s], [c] -> [1/c], [0] <-> [inf], (s) <-> (0, s).
    ``beta``: (x, y) -> (x, -y).
    """

    def __init__(self, plane, kind="alpha"):
        plane = plane_from_id(plane)
        if not isinstance(getattr(plane, "cs", None), TschetDual):
            raise UnsupportedError("the reflections are stated for the dual plane S_r")
        if kind not in ("alpha", "beta"):
            raise ParameterError(f"unknown reflection {kind!r}")
        super().__init__(plane, plane, kind)
        self.plane = plane
        self.kind = kind
        self.params = {"kind": kind}

    def map_point(self, p):
        if self.kind == "beta":
            if isinstance(p, Affine):
                return Affine(p.x, -np.array(p.y))
            return Slope(-np.array(p.s)) if isinstance(p, Slope) else Infinity
        if isinstance(p, Affine):
            x, y = p.x[0], p.y[0]
            return Slope(y) if x == 0 else Affine(1.0 / x, y / x)
        if isinstance(p, Slope):
            return Affine(0.0, p.s[0])
        return Infinity

    def map_line(self, L):
        if self.kind == "beta":
            if isinstance(L, NonVertical):
                return NonVertical(-np.array(L.s), -np.array(L.t))
            return L
        if isinstance(L, NonVertical):
            return NonVertical(L.t, L.s)
        if isinstance(L, Vertical):
            c = L.c[0]
            return AtInfinity if c == 0 else Vertical(1.0 / c)
        return Vertical(0.0)


# --- verification ------------------------------------------------------------


@dataclass
class CollineationReport:
    plane: str
    family: str
    seed: int
    samples: int
    max_residual: float
    passed: bool
    witness: dict = None

    def to_dict(self):
        return dict(self.__dict__)


def verify_collineation(plane, coll, n, seed, tol=1e-8):
    """Images of n random incident pairs must be incident (within tol)."""
    plane = plane_from_id(plane)
    rng = np.random.default_rng(seed)
    flags = plane.sample_flags(rng, n)
    worst, where = coll.incidence_defect(flags)
    witness = None
    if where >= 0 and not worst <= tol:
        p, L = flags[where]
        q, M = coll.image_flag(p, L)
        witness = {"index": where, "point": repr(p), "line": repr(L), "image_point": repr(q), "image_line": repr(M)}
    return CollineationReport(plane.id, getattr(coll, "family", coll.name), seed, n, float(worst), bool(worst <= tol), witness)


def commutes_with(pol, coll, n, seed, tol=COMMUTE_TOL):
    """polar(apply(e)) == apply(polar(e)) on n sampled points and lines."""
    plane = pol.plane
    rng = np.random.default_rng(seed)
    for p, L in plane.sample_flags(rng, n):
        for e in (p, L):
            if not elements_close(pol.polar(coll.apply(e)), coll.apply(pol.polar(e)), tol):
                return False
    return True


# --- motion-group membership -------------------------------------------------


def _close(u, v, tol=MEMBERSHIP_TOL):
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    return bool(np.linalg.norm(u - v) <= tol * max(1.0, float(np.linalg.norm(v))))


def _iota_of(pol):
    return pol.alpha


def membership(pol, coll):
    """Closed-form motion conditions for the catalog pairs (polarity, family)."""
    fam = pol.plane.cs.family if hasattr(pol.plane, "cs") else "shift"
    if isinstance(coll, AffineMotion):
        p = coll.params
        iota = _iota_of(pol)
        mul = coll.mul
        q, m, n = p["line_q"], p["m"], p["n"]
        if not _close(p["q"], q):
            return False
        if not _close(p["r"], p["s"]):
            return False
        if not _close(q, iota(m)):
            return False
        if not _close(mul(iota(m), m), n + iota(n)):
            return False
        if fam == "mutation-h" and pol.name == "pi":
            gm = p["gamma"]
            h = gm.params[0] if isinstance(gm, Morphism) and gm.kind == "inner" else np.array([1.0, 0, 0, 0])
            return bool(np.linalg.norm(h[2:]) <= MEMBERSHIP_TOL or np.linalg.norm(h[:2]) <= MEMBERSHIP_TOL)
        # octonion pi: the restricted automorphisms 1, half_flip and pair_auto all keep H invariant
        return True
    if isinstance(coll, DoubleFlagMap):
        p = coll.params
        a, b, c, n = p["a"], p["b"], p["c"], p["n"]
        if pol.name == "rho":
            return _close(b, cd_conj(c)) and abs(n[0]) <= MEMBERSHIP_TOL
        k = _K
        for e in (1.0, -1.0):
            if (
                _close(cd_mul(c, k), e * cd_mul(k, cd_conj(b)))
                and _close(cd_mul(k, a), e * cd_mul(a, k))
                and _close(cd_mul(cd_conj(n), k), cd_mul(cd_conj(k), n))
            ):
                return True
        return False
    if isinstance(coll, SpinStabilizer):
        p = coll.params
        a, c, d = p["a"], p["c"], p["d"]
        c2d = cd_mul(c, c) * d
        if pol.name == "pi":
            return _close(c2d, _ONE)
        # a k conj(a) conj(k) = +-1 already forces a into span(1, k) or span(i, j)
        akak = cd_mul(cd_mul(cd_mul(a, _K), cd_conj(a)), cd_conj(_K))
        return any(_close(akak, e * _ONE) and _close(c2d, e * _ONE) for e in (1.0, -1.0))
    raise UnsupportedError(f"no closed-form motion conditions for {type(coll).__name__} and {pol.name}")


@dataclass
class MotionResult:
    condition_membership: bool
    commutes: bool


def motion_test(pol, coll, n=100, seed=0):
    return MotionResult(bool(membership(pol, coll)), bool(commutes_with(pol, coll, n, seed)))


# --- parameter draws ---------------------------------------------------------


def _unit(rng, d=4):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _complex_unit(rng):
    t = rng.uniform(0, 2 * math.pi)
    return np.array([math.cos(t), math.sin(t), 0.0, 0.0])


def _perp_unit(rng):
    t = rng.uniform(0, 2 * math.pi)
    return np.array([0.0, 0.0, math.cos(t), math.sin(t)])


def _octonion_gamma(rng):
    from .scalar_algebra import half_flip, pair_auto

    k = rng.integers(3)
    if k == 0:
        return identity("O")
    if k == 1:
        return half_flip()
    return pair_auto(_unit(rng), _unit(rng))


def draw_motion(pol, rng, member=None):
    """A random family element for the polarity's motion test.

    ``member`` True draws from the closed-form conditions, False perturbs one
    condition, None picks either with equal odds.
    """
    from .scalar_algebra import inner

    if member is None:
        member = bool(rng.integers(2))
    plane = pol.plane
    fam = plane.cs.family
    if fam in ("mutation-h", "mutation-o"):
        d = plane.carrier_dim
        iota = _iota_of(pol)
        if fam == "mutation-h":
            if pol.name == "pi":
                h = _complex_unit(rng) if rng.integers(2) else _perp_unit(rng)
            else:
                h = _unit(rng)
            gamma = inner(h)
        else:
            gamma = _octonion_gamma(rng)
        r = float(rng.uniform(0.3, 3.0) * rng.choice([-1, 1]))
        m = rng.standard_normal(d)
        rhs = plane.cs.multiply(iota(m), m)
        # n + iota(n) = rhs: half of rhs plus an element of the kernel of 1 + iota
        kern = rng.standard_normal(d)
        n = 0.5 * rhs + 0.5 * (kern - iota(kern))
        s, q = r, iota(m)
        if not member:
            broken = rng.integers(4 if not (fam == "mutation-h" and pol.name == "pi") else 5)
            if broken == 0:
                s = r * float(rng.uniform(1.5, 2.5))
            elif broken == 1:
                q = q + rng.standard_normal(d)
            elif broken == 2:
                n = n + 0.5 * float(rng.uniform(0.5, 2.0)) * np.eye(d)[0]
            elif broken == 3:
                m = m + rng.standard_normal(d)
            else:
                gamma = inner(_unit(rng))
        return AffineMotion(plane, gamma, r, s, q, m, n)
    if fam == "distorted-h":
        k = np.array([0.0, 0, 0, 1])
        if pol.name == "rho":
            a, c = _unit(rng), _unit(rng)
            b = cd_conj(c)
            n = rng.standard_normal(4)
            n[0] = 0.0
            if not member:
                if rng.integers(2):
                    b = _unit(rng)
                else:
                    n[0] = float(rng.uniform(0.5, 2.0))
            return DoubleFlagMap(plane, a, b, c, n)
        e = float(rng.choice([-1, 1]))
        # k a = e a k: a in span(1, k) for e = 1, a in span(i, j) for e = -1
        t = rng.uniform(0, 2 * math.pi)
        a = np.array([math.cos(t), 0, 0, math.sin(t)]) if e > 0 else np.array([0, math.cos(t), math.sin(t), 0])
        b = _unit(rng)
        # c k = e k conj(b)  =>  c = e k conj(b) k^-1
        c = e * cd_mul(cd_mul(k, cd_conj(b)), cd_conj(k))
        n = _double_flag_n(rng)
        if not member:
            which = rng.integers(3)
            if which == 0:
                a = _unit(rng)
            elif which == 1:
                c = _unit(rng)
            else:
                n = n + rng.standard_normal(4)
        return DoubleFlagMap(plane, a, b, c, n)
    if fam == "spin":
        a = _unit(rng)
        d = float(rng.uniform(0.3, 3.0) * rng.choice([-1, 1]))
        if pol.name == "pi":
            c = np.array([rng.uniform(0.3, 2.0), 0, 0, 0]) if rng.integers(2) else np.array([0, rng.uniform(0.3, 2.0), 0, 0])
            d = 1.0 / cd_mul(c, c)[0]
            if not member:
                c = np.array([*rng.standard_normal(2), 0, 0])
        else:
            a = _spin_khat_a(rng)
            cr = rng.uniform(0.3, 2.0)
            c = np.array([cr, 0, 0, 0]) if rng.integers(2) else np.array([0, cr, 0, 0])
            akak = cd_mul(cd_mul(cd_mul(a, _K), cd_conj(a)), cd_conj(_K))[0]
            d = akak / cd_mul(c, c)[0]
            if not member:
                which = rng.integers(3)
                if which == 0:
                    a = _unit(rng)
                elif which == 1:
                    d = -d
                else:
                    c = np.array([*rng.standard_normal(2), 0, 0])
        return SpinStabilizer(plane, a, c, d)
    raise UnsupportedError(f"no motion draws for {plane.id}")


def _double_flag_n(rng):
    # conj(n) k = conj(k) n  <=>  2 n0 k = n' k - k n' for n = n0 + n'; the right side
    # is orthogonal to k while the left is a multiple of k, so n is a real multiple of k
    return np.array([0.0, 0.0, 0.0, rng.standard_normal()])


def _spin_khat_a(rng):
    """A unit a with a k conj(a) = +-k: a in span(1, k) or in span(i, j)."""
    t = rng.uniform(0, 2 * math.pi)
    if rng.integers(2):
        return np.array([math.cos(t), 0.0, 0.0, math.sin(t)])
    return np.array([0.0, math.cos(t), math.sin(t), 0.0])


# --- special collineations ---------------------------------------------------


def make_special(plane, kind, **params):
    """Translations, reflections, homologies and shifts with checked constraints.

    kind ``shift`` on a semifield plane is the unital motion
    (a, b) -> (a + m, b + iota(m) o a + n) which needs iota(m) o m = n + iota(n);
    on a shift plane it is the translation by (d1, d2).
    """
    plane = plane_from_id(plane)
    if kind == "translation":
        return Translation(plane, params.get("m"), params.get("n"))
    if kind == "reflection":
        return TschetReflection(plane, params.get("which", "alpha"))
    if kind == "homology":
        return ScaleMap(plane, params.get("a", 1.0), params.get("b", 1.0))
    if kind == "shift":
        if isinstance(plane, ShiftPlane):
            return ShiftTranslation(plane, params.get("d1", 0.0), params.get("d2", 0.0))
        iota = params["iota"]
        d = plane.carrier_dim
        m, n = _a(params["m"], d), _a(params["n"], d)
        lhs = plane.cs.multiply(iota(m), m)
        rhs = n + iota(n)
        tol = params.get("tol", MEMBERSHIP_TOL)
        if np.linalg.norm(lhs - rhs) > tol * max(1.0, float(np.linalg.norm(rhs))):
            raise ParameterError("constraint iota(m) o m = n + iota(n) violated")
        return AffineMotion(plane, None, 1.0, 1.0, iota(m), m, n)
    raise ParameterError(f"unknown special kind {kind!r}")


def recover_unital_motion(pol, x, y):
    """The motion of the sharply transitive group sending the origin to (x, y).

    Returns (motion, constraint residual).
    """
    iota = pol.alpha
    m, n = _a(x), _a(y)
    res = float(np.linalg.norm(pol.plane.cs.multiply(iota(m), m) - (n + iota(n))))
    return AffineMotion(pol.plane, None, 1.0, 1.0, iota(m), m, n), res


# --- dimension audit ---------------------------------------------------------


def _exp_unit(h0, v):
    """h0 * exp(v) for a pure quaternion v given by 3 coordinates."""
    th = float(np.linalg.norm(v))
    e = np.array([math.cos(th), *(np.sin(th) / th * v if th > 0 else v)])
    return cd_mul(h0, e)


def _constraint_rank(C, theta0, h=1e-6):
    J = np.stack([(C(theta0 + h * e) - C(theta0 - h * e)) / (2 * h) for e in np.eye(theta0.size)], axis=-1)
    return int(solvers.numerical_rank(J[None], 1e-6)[0])


def dimension_audit(pol, seed=0):
    """Free parameters minus the rank of the motion constraints at a member.

    Returns (parameters, constraint rank, dimension). Covers the quaternion
    mutation polarities, the double-flag polarities and kappa-hat on spin
    planes.
    """
    rng = np.random.default_rng(seed)
    fam = pol.plane.cs.family
    iota = pol.alpha
    if fam == "mutation-h":
        member = draw_motion(pol, rng, True)
        p = member.params
        h0 = p["gamma"].params[0]
        mul = member.mul
        theta0 = np.concatenate([[0, 0, 0], [p["r"], p["s"]], p["q"], p["m"], p["n"]])

        def C(th):
            h = _exp_unit(h0, th[:3])
            r, s = th[3], th[4]
            q, m, n = th[5:9], th[9:13], th[13:17]
            out = [[r - s], q - iota(m), mul(iota(m), m) - n - iota(n)]
            if pol.name == "pi":
                out.append(h[2:] if np.linalg.norm(h0[2:]) < 1e-9 else h[:2])
            return np.concatenate(out)

    elif fam == "distorted-h":
        member = draw_motion(pol, rng, True)
        p = member.params
        a0, b0, c0 = p["a"], p["b"], p["c"]
        k = _K
        theta0 = np.concatenate([np.zeros(9), p["n"]])
        e = 1.0 if np.linalg.norm(cd_mul(k, a0) - cd_mul(a0, k)) < 1e-9 else -1.0

        def C(th):
            a, b, c = _exp_unit(a0, th[:3]), _exp_unit(b0, th[3:6]), _exp_unit(c0, th[6:9])
            n = th[9:]
            if pol.name == "rho":
                return np.concatenate([b - cd_conj(c), [n[0]]])
            return np.concatenate(
                [cd_mul(c, k) - e * cd_mul(k, cd_conj(b)), cd_mul(k, a) - e * cd_mul(a, k), cd_mul(cd_conj(n), k) - cd_mul(cd_conj(k), n)]
            )

    elif fam == "spin" and pol.name == "kappa-hat":
        # stabilizer (a, c, d) together with the sharply transitive unital motions (m, n)
        member = draw_motion(pol, rng, True)
        p = member.params
        a0 = p["a"]
        e = cd_mul(cd_mul(cd_mul(a0, _K), cd_conj(a0)), cd_conj(_K))[0]
        m0 = rng.standard_normal(4)
        kern = rng.standard_normal(4)
        n0 = 0.5 * pol.plane.cs.multiply(iota(m0), m0) + 0.5 * (kern - iota(kern))
        theta0 = np.concatenate([np.zeros(3), p["c"][:2], [p["d"]], m0, n0])
        mul = pol.plane.cs.multiply

        def C(th):
            a = _exp_unit(a0, th[:3])
            c = np.array([th[3], th[4], 0.0, 0.0])
            m, n = th[6:10], th[10:14]
            akak = cd_mul(cd_mul(cd_mul(a, _K), cd_conj(a)), cd_conj(_K))
            return np.concatenate([akak - e * _ONE, (cd_mul(c, c) * th[5] - e * _ONE)[:2], mul(iota(m), m) - n - iota(n)])

    else:
        raise UnsupportedError(f"no dimension audit for {pol.plane.id} {pol.name}")
    rank = _constraint_rank(C, theta0)
    return theta0.size, rank, theta0.size - rank
