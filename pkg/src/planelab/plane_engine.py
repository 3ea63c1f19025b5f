"""Projective planes over coordinate structures and over shift functions.

Affine points are pairs (x, y) of carrier elements. Ideal points are kept
symbolic: ``Slope(s)`` is the common point of the lines of slope s and
``Infinity`` the common point of the verticals. Lines are ``NonVertical(s, t)``
(the graph of x -> tau(s, x, t)), ``Vertical(c)`` and ``AtInfinity``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import solvers
from .coordinate_structures import Tschet, TschetDual, catalog_ids, structure_from_id, parse_identifier
from .errors import DegenerateInputError, ParameterError, SolverError, UnsupportedError
from .scalar_algebra import AlgebraElement, cd_norm

INCIDENCE_TOL = 1e-9


def _tup(v):
    if isinstance(v, AlgebraElement):
        v = v.coords
    a = np.asarray(v, dtype=float).reshape(-1)
    return tuple(float(c) for c in a)


class _Element:
    __slots__ = ()

    def arrays(self):
        return tuple(np.array(getattr(self, f)) for f in self.__dataclass_fields__)


@dataclass(frozen=True)
class Affine(_Element):
    x: tuple
    y: tuple

    def __init__(self, x, y):
        object.__setattr__(self, "x", _tup(x))
        object.__setattr__(self, "y", _tup(y))


@dataclass(frozen=True)
class Slope(_Element):
    s: tuple

    def __init__(self, s):
        object.__setattr__(self, "s", _tup(s))


@dataclass(frozen=True)
class _InfinityPoint(_Element):
    def __repr__(self):
        return "Infinity"


@dataclass(frozen=True)
class NonVertical(_Element):
    s: tuple
    t: tuple

    def __init__(self, s, t):
        object.__setattr__(self, "s", _tup(s))
        object.__setattr__(self, "t", _tup(t))


@dataclass(frozen=True)
class Vertical(_Element):
    c: tuple

    def __init__(self, c):
        object.__setattr__(self, "c", _tup(c))


@dataclass(frozen=True)
class _LineAtInfinity(_Element):
    def __repr__(self):
        return "AtInfinity"


Infinity = _InfinityPoint()
AtInfinity = _LineAtInfinity()

POINT_TYPES = (Affine, Slope, _InfinityPoint)
LINE_TYPES = (NonVertical, Vertical, _LineAtInfinity)


def is_point(e):
    return isinstance(e, POINT_TYPES)


def is_line(e):
    return isinstance(e, LINE_TYPES)


def elements_close(a, b, tol=1e-8):
    """Same variant and coordinates equal up to a relative tolerance."""
    if type(a) is not type(b):
        return False
    for u, v in zip(a.arrays(), b.arrays()):
        if np.linalg.norm(u - v) > tol * max(1.0, float(np.linalg.norm(v))):
            return False
    return True


def _rel(diff, ref):
    return cd_norm(diff) / np.maximum(1.0, cd_norm(ref))


# --- planes ------------------------------------------------------------------


class PlaneModel:
    """Common incidence logic. Subclasses supply the batched affine kernels
    ``tau``, ``intercept``, ``join_affine`` and ``meet_affine``."""

    id = ""
    carrier_dim = 1
    iterative = False

    @property
    def tol(self):
        return 1e-6 if self.iterative else 1e-8

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"

    def __eq__(self, other):
        return isinstance(other, PlaneModel) and other.id == self.id

    def __hash__(self):
        return hash(self.id)

    def random_coords(self, rng, n):
        return rng.standard_normal((n, self.carrier_dim))

    def point_on_line_residual(self, x, y, s, t):
        """Smaller of the relative defects of y = tau(s, x, t) and of
        t = intercept(s, x, y); either equation characterizes incidence and
        each is well conditioned where the other may not be."""
        with np.errstate(invalid="ignore", over="ignore"):
            r = np.fmin(_rel(self.tau(s, x, t) - y, y), _rel(self.intercept(s, x, y) - t, t))
        return r

    # symbolic layer

    def incidence_residual(self, p, L):
        """0 for symbolic incidence, inf for symbolic non-incidence, else the
        relative residual of the defining equation."""
        if isinstance(p, Affine):
            x, y = np.array(p.x), np.array(p.y)
            if isinstance(L, NonVertical):
                return float(self.point_on_line_residual(x, y, np.array(L.s), np.array(L.t)))
            if isinstance(L, Vertical):
                return float(_rel(x - np.array(L.c), np.array(L.c)))
            return math.inf
        if isinstance(p, Slope):
            if isinstance(L, NonVertical):
                return float(_rel(np.array(p.s) - np.array(L.s), np.array(L.s)))
            return 0.0 if L is AtInfinity else math.inf
        if isinstance(L, Vertical) or L is AtInfinity:
            return 0.0
        return math.inf

    def incident(self, p, L, tol=INCIDENCE_TOL):
        return self.incidence_residual(p, L) <= tol

    def join(self, p, q):
        if p == q:
            raise DegenerateInputError(f"join of a point with itself: {p}")
        if not isinstance(p, Affine) and isinstance(q, Affine):
            p, q = q, p
        if isinstance(p, Affine):
            if isinstance(q, Affine):
                if p.x == q.x:
                    return Vertical(p.x)
                x1, y1, x2, y2 = (np.array(v)[None] for v in (p.x, p.y, q.x, q.y))
                s, t, ok = self.join_affine(x1, y1, x2, y2)
                res = max(self.point_on_line_residual(x1, y1, s, t)[0], self.point_on_line_residual(x2, y2, s, t)[0])
                if not ok[0] or not res <= self.tol:
                    raise SolverError(f"join in {self.id} failed (unique={bool(ok[0])})", res)
                return NonVertical(s[0], t[0])
            if isinstance(q, Slope):
                s = np.array(q.s)
                return NonVertical(s, self.intercept(s, np.array(p.x), np.array(p.y)))
            return Vertical(p.x)
        return AtInfinity

    def meet(self, L, M):
        if L == M:
            raise DegenerateInputError(f"meet of a line with itself: {L}")
        if not isinstance(L, NonVertical) and isinstance(M, NonVertical):
            L, M = M, L
        if isinstance(L, NonVertical):
            if isinstance(M, NonVertical):
                if L.s == M.s:
                    return Slope(L.s)
                s1, t1, s2, t2 = (np.array(v)[None] for v in (L.s, L.t, M.s, M.t))
                x, y, ok = self.meet_affine(s1, t1, s2, t2)
                res = max(self.point_on_line_residual(x, y, s1, t1)[0], self.point_on_line_residual(x, y, s2, t2)[0])
                if not ok[0] or not res <= self.tol:
                    raise SolverError(f"meet in {self.id} failed (unique={bool(ok[0])})", res)
                return Affine(x[0], y[0])
            if isinstance(M, Vertical):
                c = np.array(M.c)
                return Affine(c, self.tau(np.array(L.s), c, np.array(L.t)))
            return Slope(L.s)
        return Infinity

    def sample_flags(self, rng, n):
        """n incident (point, line) pairs, mostly affine, with every ideal
        combination represented."""
        d = self.carrier_dim
        flags = []
        kinds = rng.choice(8, size=n, p=[0.7, 0.1, 0.05, 0.05, 0.025, 0.025, 0.025, 0.025])
        s, x, t = (self.random_coords(rng, n) for _ in range(3))
        y = self.tau(s, x, t)
        for i, k in enumerate(kinds):
            if k == 0:
                flags.append((Affine(x[i], y[i]), NonVertical(s[i], t[i])))
            elif k == 1:
                flags.append((Affine(x[i], t[i]), Vertical(x[i])))
            elif k in (2, 3):
                flags.append((Slope(s[i]), NonVertical(s[i], t[i])))
            elif k == 4:
                flags.append((Slope(s[i]), AtInfinity))
            elif k == 5:
                flags.append((Infinity, Vertical(x[i])))
            elif k == 6:
                flags.append((Infinity, AtInfinity))
            else:
                flags.append((Slope(np.zeros(d)), NonVertical(np.zeros(d), t[i])))
        return flags


class TernaryPlane(PlaneModel):
    def __init__(self, cs):
        self.cs = cs
        self.id = cs.id
        self.carrier_dim = cs.carrier_dim
        self.iterative = not cs.closed_form

    def random_coords(self, rng, n):
        return self.cs.random(rng, n)

    def tau(self, s, x, t):
        return self.cs.tau(s, x, t)

    def intercept(self, s, x, y):
        return self.cs.intercept(s, x, y)

    def join_affine(self, x1, y1, x2, y2):
        return self.cs.join_affine(x1, y1, x2, y2)

    def meet_affine(self, s1, t1, s2, t2):
        return self.cs.meet_affine(s1, t1, s2, t2)


# --- shift planes ------------------------------------------------------------


def _cplx(a):
    return a[..., 0] + 1j * a[..., 1]


def _real2(z):
    return np.stack([z.real, z.imag], axis=-1)


class ShiftFunction:
    """A generating function f with f(0) = 0, over R (dim 1) or C (dim 2)."""

    def __init__(self, kind, c=0.0):
        self.kind = kind
        self.c = float(c)
        if kind in ("cosh", "parabola"):
            self.dim = 1
        elif kind in ("power", "knarr"):
            self.dim = 2
        else:
            raise ParameterError(f"unknown shift function {kind!r}")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "cosh":
            return np.cosh(z) - 1.0
        if self.kind == "parabola":
            return z * z
        w = _cplx(z)
        if self.kind == "power":
            with np.errstate(divide="ignore", invalid="ignore"):
                mod = np.where(w == 0, 0.0, np.abs(w) ** self.c)
            return _real2(w * w * mod)
        x, y = z[..., 0], z[..., 1]
        return np.stack([x * y - x**3 / 3.0, 0.5 * y * y - x**4 / 12.0], axis=-1)


class ShiftPlane(PlaneModel):
    """Lines are the verticals and the shifts of the graph of f.

    The shift of the graph by (a, b) is stored as ``NonVertical(a, b)``:
    it is the set of points (x, f(x - a) + b), so shifts with the same a
    are parallel and share the ideal point ``Slope(a)``.
    """

    iterative = True
    STARTS = 3

    def __init__(self, f, ident):
        self.f = f
        self.id = ident
        self.carrier_dim = f.dim

    def tau(self, s, x, t):
        return self.f(np.asarray(x) - np.asarray(s)) + t

    def intercept(self, s, x, y):
        return y - self.f(np.asarray(x) - np.asarray(s))

    def _solve(self, g, center):
        """Roots of a row-wise g(v, rows) -> (len(rows), d) near ``center``."""
        n, d = center.shape
        if d == 1:
            every = np.arange(n)
            g1 = lambda v: g(v[:, None], every)[:, 0]
            lo, hi, found = solvers.bracket_sign_change(g1, center[:, 0])
            root = solvers.newton_1d(g1, 0.5 * (lo + hi), lo, hi)
            return root[:, None], found
        # the difference map has an everywhere-regular Jacobian for a valid f,
        # so every converged start must land on the same root
        offsets = (np.zeros(d), np.eye(d)[0], -np.eye(d)[1] * 1.5)
        runs = [solvers.newton_batch(g, center + o, iterations=300) for o in offsets[: self.STARTS]]
        xs = np.stack([r[0] for r in runs])
        rns = np.stack([r[1] for r in runs])
        for i in np.flatnonzero(rns.min(axis=0) > 1e-9):
            # far-away roots: trust-region fallback from the same starts
            rows = np.array([i])
            for k, o in enumerate(offsets[: self.STARTS]):
                sol = least_squares(lambda v: g(v[None], rows)[0], center[i] + o, xtol=1e-15, ftol=1e-15, gtol=1e-15)
                xs[k, i], rns[k, i] = sol.x, np.linalg.norm(sol.fun)
        best = np.argmin(rns, axis=0)
        x = xs[best, np.arange(n)]
        converged = rns <= 1e-9
        scale = np.maximum(1.0, np.linalg.norm(x, axis=-1))
        apart = np.linalg.norm(xs - x[None], axis=-1) > 1e-7 * scale[None]
        agree = converged.any(axis=0) & ~(converged & apart).any(axis=0)
        return x, agree

    def join_affine(self, x1, y1, x2, y2):
        dy = y1 - y2

        def g(a, rows):
            return self.f(x1[rows] - a) - self.f(x2[rows] - a) - dy[rows]

        a, ok = self._solve(g, 0.5 * (x1 + x2))
        return a, self.intercept(a, x1, y1), ok

    def meet_affine(self, s1, t1, s2, t2):
        dt = t2 - t1

        def h(x, rows):
            return self.f(x - s1[rows]) - self.f(x - s2[rows]) - dt[rows]

        x, ok = self._solve(h, 0.5 * (s1 + s2))
        return x, self.tau(s1, x, t1), ok


def shift_plane_from_id(text):
    family, p = parse_identifier(text)
    kind = family.split("-", 1)[1] if "-" in family else ""
    if kind == "knarr":
        if p.pop("nonstandard", "0") not in ("1", "true", "yes"):
            raise ParameterError("the Knarr reading is nonstandard; pass nonstandard=1 to opt in")
        f = ShiftFunction("knarr")
        ident = "shift-knarr:nonstandard=1"
    elif kind == "power":
        c = float(p.pop("c", "0.5"))
        f = ShiftFunction("power", c)
        ident = f"shift-power:c={c:.12g}"
    elif kind in ("cosh", "parabola"):
        f = ShiftFunction(kind)
        ident = family
    else:
        raise ParameterError(f"unknown shift plane {text!r}")
    if p:
        raise ParameterError(f"unused parameters for {family}: {sorted(p)}")
    return ShiftPlane(f, ident)


def plane_from_id(text):
    if isinstance(text, PlaneModel):
        return text
    if text.strip().lower().startswith("shift-"):
        return shift_plane_from_id(text)
    return TernaryPlane(structure_from_id(text))


def catalog_plane_ids():
    return catalog_ids() + ["shift-cosh"]


# --- duality and the S_r isomorphism -----------------------------------------


def dualize(plane):
    """The plane coordinatized by tau~(s, x, t) = tau(x, s, t)."""
    plane = plane_from_id(plane)
    cs = getattr(plane, "cs", None)
    if isinstance(cs, Tschet):
        if not cs.rho.odd:
            raise UnsupportedError("dualization needs an odd radial map (rneg == r)")
        if cs.boundary:
            raise UnsupportedError("dualization of a moved branch boundary is not defined")
        return TernaryPlane(TschetDual(cs.rho.r))
    if isinstance(cs, TschetDual):
        return TernaryPlane(Tschet(cs.rho.r))
    raise UnsupportedError(f"dualize is implemented for the Tschetweruchin family, not {plane.id}")


class IncidenceMap:
    """A map between planes given on symbolic elements.

    ``correlation`` maps send points to lines and lines to points. Subclasses
    implement ``map_point`` and ``map_line``.
    """

    correlation = False

    def __init__(self, source, target, name=""):
        self.source = source
        self.target = target
        self.name = name

    def __call__(self, e):
        return self.apply(e)

    def apply(self, e):
        if is_point(e):
            return self.map_point(e)
        if is_line(e):
            return self.map_line(e)
        raise TypeError(f"not a plane element: {e!r}")

    def image_flag(self, p, L):
        """The image of an incident pair as a (point, line) pair of the target."""
        a, b = self.apply(p), self.apply(L)
        return (b, a) if self.correlation else (a, b)

    def incidence_defect(self, flags):
        """Largest residual of image incidences over the given flags, and the
        index of the worst flag."""
        worst, where = 0.0, -1
        for i, (p, L) in enumerate(flags):
            q, M = self.image_flag(p, L)
            r = self.target.incidence_residual(q, M)
            if not r <= worst:
                worst, where = r, i
        return worst, where


class TschetDuality(IncidenceMap):
    """Correlation from the dual plane S_r onto T_r.

    (X, Y) -> [X, -Y] and [S, T] -> (S, -T); it relies on rho being odd.
    """

    correlation = True

    def __init__(self, r=3.0):
        super().__init__(TernaryPlane(TschetDual(r)), TernaryPlane(Tschet(r)), "duality")

    def map_point(self, p):
        if isinstance(p, Affine):
            return NonVertical(p.x, -np.array(p.y))
        if isinstance(p, Slope):
            return Vertical(p.s)
        return AtInfinity

    def map_line(self, L):
        if isinstance(L, NonVertical):
            return Affine(L.s, -np.array(L.t))
        if isinstance(L, Vertical):
            return Slope(L.c)
        return Infinity


class ReciprocalIsomorphism(IncidenceMap):
    """S_r -> S_{1/r}: swaps the half planes x >= 0 and x < 0 via
    (x, y) -> (-rho(x), rho(y)) with rho the odd r-th power."""

    def __init__(self, r=3.0):
        self.r = float(r)
        super().__init__(TernaryPlane(TschetDual(r)), TernaryPlane(TschetDual(1.0 / r)), "reciprocal")

    def _rho(self, v):
        v = np.array(v)
        return np.sign(v) * np.abs(v) ** self.r

    def map_point(self, p):
        if isinstance(p, Affine):
            return Affine(-self._rho(p.x), self._rho(p.y))
        if isinstance(p, Slope):
            return Slope(-self._rho(p.s))
        return Infinity

    def map_line(self, L):
        if isinstance(L, NonVertical):
            return NonVertical(-self._rho(L.s), self._rho(L.t))
        if isinstance(L, Vertical):
            return Vertical(-self._rho(L.c))
        return AtInfinity


# --- module-level API --------------------------------------------------------


def incident(plane, p, L, tol=INCIDENCE_TOL):
    return plane_from_id(plane).incident(p, L, tol)


def join(plane, p, q):
    return plane_from_id(plane).join(p, q)


def meet(plane, L, M):
    return plane_from_id(plane).meet(L, M)
