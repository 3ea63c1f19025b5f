"""Ternary fields, Cartesian fields and semifields with their solving kernels.

Every structure works on coordinate arrays of shape ``(..., d)`` where d is the
carrier dimension (1, 4 or 8), so a whole batch of samples is evaluated in one
call. The module-level functions accept :class:`AlgebraElement` values as well
and hand back elements when they were given elements.

Lines of the plane over a structure are ``y = tau(s, x, t)``. For Cartesian
structures ``tau(s, x, t) = s o x + t``; the Tschetweruchin structures are the
two ternary fields in the catalog where this fails.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import solvers
from .errors import ParameterError, SolverError, StructuralError, UnsupportedError
from .scalar_algebra import (
    AlgebraElement,
    DIM_TO_TAG,
    as_array,
    cd_conj,
    cd_inv,
    cd_mul,
    cd_norm,
    cd_one,
    left_matrix,
    right_matrix,
)

SOLVE_TOL = 1e-9


# --- radial homeomorphisms ---------------------------------------------------

_DEFAULT_SPLINE_KNOTS = ((0.0, 0.0), (0.5, 0.2), (1.0, 1.0), (2.0, 2.6), (4.0, 5.0))


@dataclass(frozen=True)
class RadialSpec:
    """A strictly increasing homeomorphism of [0, inf) fixing 0 and 1.

    kinds: ``identity``, ``power`` (x**r), ``quadmean`` ((x + x**2)/2) and
    ``spline`` (monotone cubic through knots, linear beyond the last knot).
    """

    kind: str = "identity"
    exponent: float = 1.0
    knots: tuple = field(default=_DEFAULT_SPLINE_KNOTS)

    def __post_init__(self):
        if self.kind not in ("identity", "power", "quadmean", "spline"):
            raise ParameterError(f"unknown radial kind {self.kind!r}")
        if self.kind == "power" and not self.exponent > 0:
            raise ParameterError("power exponent must be positive")
        if self.kind == "spline":
            xs = np.array([k[0] for k in self.knots], dtype=float)
            ys = np.array([k[1] for k in self.knots], dtype=float)
            if xs[0] != 0 or ys[0] != 0 or 1.0 not in xs:
                raise ParameterError("spline knots must start at (0, 0) and contain x = 1")
            if ys[list(xs).index(1.0)] != 1.0:
                raise ParameterError("spline must map 1 to 1")
            if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
                raise ParameterError("spline knots must be strictly increasing")
            object.__setattr__(self, "_pchip", PchipInterpolator(xs, ys, extrapolate=False))
            object.__setattr__(self, "_end", (xs[-1], ys[-1], (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])))

    @classmethod
    def parse(cls, text):
        parts = text.split(":")
        name = parts[0]
        if name == "identity":
            return cls("identity")
        if name == "power":
            if len(parts) != 2:
                raise ParameterError("power needs an exponent, e.g. power:2")
            return cls("power", float(parts[1]))
        if name in ("quadmean", "quadratic-mean"):
            return cls("quadmean")
        if name == "spline":
            if len(parts) == 1:
                return cls("spline")
            pts = tuple(tuple(float(v) for v in p.split("/")) for p in parts[1].split(","))
            return cls("spline", knots=pts)
        raise ParameterError(f"unknown radial spec {text!r}")

    @property
    def label(self):
        if self.kind == "power":
            return f"power:{self.exponent:g}"
        if self.kind == "spline" and self.knots != _DEFAULT_SPLINE_KNOTS:
            return "spline:" + ",".join(f"{a:g}/{b:g}" for a, b in self.knots)
        return self.kind

    @property
    def is_multiplicative(self):
        return self.kind in ("identity", "power")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "identity":
            return r.copy()
        if self.kind == "power":
            return np.power(r, self.exponent)
        if self.kind == "quadmean":
            return 0.5 * (r + r * r)
        x_end, y_end, slope = self._end
        inside = self._pchip(np.clip(r, 0.0, x_end))
        return np.where(r <= x_end, inside, y_end + slope * (r - x_end))

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        if self.kind == "identity":
            return y.copy()
        if self.kind == "power":
            return np.power(y, 1.0 / self.exponent)
        if self.kind == "quadmean":
            return 0.5 * (np.sqrt(1.0 + 8.0 * y) - 1.0)
        hi = np.maximum(1.0, y)
        lo = np.zeros_like(y)
        lo, hi = solvers.expand_bracket(self, lo, hi, y)
        return solvers.bisect(self, lo, hi, y, steps=solvers.BISECTION_STEPS)

    def odd(self, x):
        """Odd extension to the whole real line."""
        x = np.asarray(x, dtype=float)
        return np.sign(x) * self(np.abs(x))

    def odd_inverse(self, y):
        y = np.asarray(y, dtype=float)
        return np.sign(y) * self.inverse(np.abs(y))


# --- base class --------------------------------------------------------------


def _fmt(v):
    if isinstance(v, RadialSpec):
        return v.label
    if isinstance(v, str):
        return v
    return format(float(v), ".12g")


def _solve_linear(M, w):
    try:
        return np.linalg.solve(M, w[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular linear system: {exc}", np.inf) from exc


class CoordinateStructure:
    """Base class. Subclasses set the class attributes and implement ``multiply``.

    Methods work on batches (leading axes) of coordinate arrays. The solve
    methods return ``(value, residual)`` pairs; raising is left to the
    module-level wrappers so that batch callers can inspect every residual.
    """

    family = ""
    carrier_dim = 1
    cartesian = True
    linear_in_x = False
    linear_in_s = False
    closed_form = True
    param_order = ()

    def __init__(self, **params):
        self.params = params

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"

    @property
    def id(self):
        tail = "".join(f":{k}={_fmt(self.params[k])}" for k in self.param_order if k in self.params)
        return self.family + tail

    def __eq__(self, other):
        return isinstance(other, CoordinateStructure) and other.id == self.id

    def __hash__(self):
        return hash(self.id)

    @property
    def tag(self):
        return DIM_TO_TAG[self.carrier_dim]

    def one(self, shape=()):
        return cd_one(self.carrier_dim, shape)

    def random(self, rng, size):
        return rng.standard_normal((size, self.carrier_dim))

    # evaluation

    def multiply(self, s, x):
        raise NotImplementedError

    def tau(self, s, x, t):
        return self.multiply(s, x) + t

    def add(self, x, t):
        x = np.asarray(x, dtype=float)
        return self.tau(self.one(x.shape[:-1]), x, t)

    def intercept(self, s, x, y):
        """The t with tau(s, x, t) = y."""
        return y - self.multiply(s, x)

    # solving

    def _residual(self, got, want):
        return cd_norm(got - want) / np.maximum(1.0, cd_norm(want))

    def solve_slope(self, x, w):
        if self.linear_in_s:
            s = _solve_linear(right_matrix(self.multiply, x, self.carrier_dim), w)
            return s, self._residual(self.multiply(s, x), w)
        raise NotImplementedError

    def solve_point(self, s, w):
        if self.linear_in_x:
            x = _solve_linear(left_matrix(self.multiply, s, self.carrier_dim), w)
            return x, self._residual(self.multiply(s, x), w)
        raise NotImplementedError

    def join_affine(self, x1, y1, x2, y2):
        """Line [s, t] through two affine points with different x.

        Returns ``(s, t, ok)`` where ``ok`` flags entries whose solution was
        verified unique by the structure's own case analysis.
        """
        if not self.linear_in_x:
            raise NotImplementedError
        s, _ = self.solve_slope(x1 - x2, y1 - y2)
        t = y1 - self.multiply(s, x1)
        return s, t, np.ones(s.shape[:-1], dtype=bool)

    def meet_affine(self, s1, t1, s2, t2):
        """Common affine point of two lines with different slopes."""
        if not self.linear_in_x:
            raise NotImplementedError
        d = self.carrier_dim
        M = left_matrix(self.multiply, s1, d) - left_matrix(self.multiply, s2, d)
        x = _solve_linear(M, t2 - t1)
        y = self.tau(s1, x, t1)
        return x, y, np.ones(x.shape[:-1], dtype=bool)


# --- the catalog -------------------------------------------------------------


class Classical(CoordinateStructure):
    cartesian = True
    linear_in_x = True
    linear_in_s = True
    param_order = ()

    def __init__(self, alg="R"):
        if alg not in ("R", "C", "H", "O"):
            raise ParameterError(f"unknown classical algebra {alg!r}")
        super().__init__()
        self.alg = alg
        self.family = "classical-" + alg.lower()
        self.carrier_dim = {"R": 1, "C": 2, "H": 4, "O": 8}[alg]

    def multiply(self, s, x):
        return cd_mul(s, x)

    def solve_slope(self, x, w):
        s = cd_mul(w, cd_inv(x))
        return s, self._residual(cd_mul(s, x), w)

    def solve_point(self, s, w):
        x = cd_mul(cd_inv(s), w)
        return x, self._residual(cd_mul(s, x), w)


class Mutation(CoordinateStructure):
    """c o z = mu cz + (1 - mu) zc over H or O, mu > 1/2."""

    linear_in_x = True
    linear_in_s = True
    param_order = ("mu",)

    def __init__(self, alg="H", mu=0.75):
        if alg not in ("H", "O"):
            raise ParameterError("mutations are defined over H or O")
        if not mu > 0.5:
            raise ParameterError(f"mutation parameter must exceed 1/2, got {mu}")
        super().__init__(mu=float(mu))
        self.alg = alg
        self.mu = float(mu)
        self.family = "mutation-" + alg.lower()
        self.carrier_dim = 4 if alg == "H" else 8

    def multiply(self, s, x):
        return self.mu * cd_mul(s, x) + (1.0 - self.mu) * cd_mul(x, s)


def _to_c2(a):
    return a[..., 0] + 1j * a[..., 1], a[..., 2] + 1j * a[..., 3]


def _from_c2(u, v):
    return np.stack([u.real, u.imag, v.real, v.imag], axis=-1)


class Rees(CoordinateStructure):
    """Product on C^2: (a, b) o (x, y) = (ax + e^{i theta} conj(b) y, bx + conj(a) y)."""

    carrier_dim = 4
    family = "rees"
    linear_in_x = True
    linear_in_s = True
    param_order = ("theta",)

    def __init__(self, theta=math.pi / 3):
        if not 0 < theta < math.pi:
            raise ParameterError(f"theta must lie in (0, pi), got {theta}")
        super().__init__(theta=float(theta))
        self.theta = float(theta)
        self.phase = np.exp(1j * self.theta)

    def multiply(self, s, x):
        a, b = _to_c2(np.asarray(s, dtype=float))
        u, v = _to_c2(np.asarray(x, dtype=float))
        return _from_c2(a * u + self.phase * np.conj(b) * v, b * u + np.conj(a) * v)


class Lenz5(CoordinateStructure):
    """Writes s = sigma + p a with sigma real, p pure and a = e^{i alpha}; s o x = sigma x + p x a."""

    carrier_dim = 4
    family = "lenz5"
    linear_in_x = True
    linear_in_s = True
    param_order = ("alpha",)

    def __init__(self, alpha=math.pi / 4):
        if not 0 < alpha < math.pi / 2:
            raise ParameterError(f"alpha must lie in (0, pi/2), got {alpha}")
        super().__init__(alpha=float(alpha))
        self.alpha = float(alpha)
        self.a = np.array([math.cos(alpha), math.sin(alpha), 0.0, 0.0])

    def split(self, s):
        s = np.asarray(s, dtype=float)
        sigma = s[..., 0] + s[..., 1] * math.tan(self.alpha)
        rest = s.copy()
        rest[..., 0] -= sigma
        p = cd_mul(rest, cd_conj(self.a))
        p[..., 0] = 0.0
        return sigma, p

    def multiply(self, s, x):
        sigma, p = self.split(s)
        x = np.asarray(x, dtype=float)
        return sigma[..., None] * x + cd_mul(cd_mul(p, x), self.a)


@dataclass(frozen=True)
class AndreSpec:
    """The map |s| -> unit complex exp(i theta(log|s|)).

    ``homomorphic`` uses theta(u) = beta u. ``spline`` interpolates knots
    (u, theta) with a monotone-free cubic through them and clamps outside.
    """

    kind: str = "homomorphic"
    beta: float = 0.5
    knots: tuple = ((-3.0, 0.4), (-1.0, -0.7), (0.0, 0.0), (1.0, 1.3), (3.0, 0.2))

    def __post_init__(self):
        if self.kind not in ("homomorphic", "spline"):
            raise ParameterError(f"unknown andre map {self.kind!r}")
        if self.kind == "homomorphic" and self.beta == 0:
            raise ParameterError("the homomorphic map must be non-trivial (beta != 0)")
        if self.kind == "spline":
            us = np.array([k[0] for k in self.knots])
            th = np.array([k[1] for k in self.knots])
            if 0.0 not in us or th[list(us).index(0.0)] != 0.0:
                raise ParameterError("spline must send log-radius 0 to angle 0")
            object.__setattr__(self, "_pchip", PchipInterpolator(us, th, extrapolate=False))
            object.__setattr__(self, "_range", (us[0], us[-1]))

    def angle(self, r):
        with np.errstate(divide="ignore"):
            u = np.log(np.asarray(r, dtype=float))
        u = np.where(np.isfinite(u), u, 0.0)
        if self.kind == "homomorphic":
            return self.beta * u
        lo, hi = self._range
        return self._pchip(np.clip(u, lo, hi))

    def unit(self, r):
        th = self.angle(r)
        out = np.zeros(np.shape(th) + (4,))
        out[..., 0] = np.cos(th)
        out[..., 1] = np.sin(th)
        return out


class Andre(CoordinateStructure):
    """s . x = s x^g with g = phi(|s|) and x^g = g^-1 x g; 0 . x = 0."""

    carrier_dim = 4
    family = "andre"
    linear_in_x = True
    closed_form = False
    param_order = ("phi", "beta")

    def __init__(self, phi="homomorphic", beta=0.5, spec=None):
        spec = spec or AndreSpec(phi, beta)
        params = {"phi": spec.kind}
        if spec.kind == "homomorphic":
            params["beta"] = float(spec.beta)
        super().__init__(**params)
        self.spec = spec

    def twist(self, s, x):
        g = self.spec.unit(cd_norm(s))
        return cd_mul(cd_mul(cd_conj(g), x), g)

    def multiply(self, s, x):
        s = np.asarray(s, dtype=float)
        return cd_mul(s, self.twist(s, x))

    def solve_point(self, s, w):
        g = self.spec.unit(cd_norm(s))
        v = cd_mul(cd_inv(s), w)
        x = cd_mul(cd_mul(g, v), cd_conj(g))
        return x, self._residual(self.multiply(s, x), w)

    def solve_slope(self, x, w):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        ratio = cd_norm(w) / cd_norm(x)

        def step(s):
            g = self.spec.unit(cd_norm(s))
            xg = cd_mul(cd_mul(cd_conj(g), x), g)
            return cd_mul(w, cd_inv(xg))

        base = cd_mul(w, cd_inv(x))
        starts = (base, 2.0 * base, 0.5 * base + 0.1 * ratio[..., None])
        runs = [solvers.damped_fixed_point(step, s0) for s0 in starts]
        spread = max(float(np.max(cd_norm(r - runs[0]), initial=0.0)) for r in runs[1:])
        s = runs[0]
        res = self._residual(self.multiply(s, x), w)
        if spread > 1e-8 * max(1.0, float(np.max(ratio, initial=0.0))):
            res = np.maximum(res, spread)
        return s, res


class HaehlSO4(CoordinateStructure):
    """s o (x0 + p) = s (x0 + phi_s p) with phi_s = rho(|s|)/|s|."""

    carrier_dim = 4
    family = "haehl-so4"
    linear_in_x = True
    closed_form = False
    param_order = ("rho",)

    def __init__(self, rho=None):
        rho = rho or RadialSpec("power", 2.0)
        super().__init__(rho=rho)
        self.rho = rho

    def _phi(self, n):
        safe = np.where(n > 0, n, 1.0)
        return np.where(n > 0, self.rho(safe) / safe, 0.0)

    def multiply(self, s, x):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        phi = self._phi(cd_norm(s))
        y = x * phi[..., None]
        y[..., 0] = x[..., 0]
        return cd_mul(s, y)

    def solve_point(self, s, w):
        v = cd_mul(cd_inv(s), w)
        phi = self._phi(cd_norm(s))
        x = v / phi[..., None]
        x[..., 0] = v[..., 0]
        return x, self._residual(self.multiply(s, x), w)

    def solve_slope(self, x, w):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        x0sq = x[..., 0] ** 2
        psq = np.sum(x[..., 1:] ** 2, axis=-1)
        target = np.sum(w * w, axis=-1)

        def f(r):
            return r * r * x0sq + self.rho(r) ** 2 * psq

        r = solvers.solve_increasing(f, target, np.zeros_like(target), np.ones_like(target))
        phi = self._phi(r)
        y = x * phi[..., None]
        y[..., 0] = x[..., 0]
        s = cd_mul(w, cd_inv(y))
        return s, self._residual(self.multiply(s, x), w)


class Distorted(CoordinateStructure):
    """c o z = (|c| * |z|) |cz|^-1 cz, with r * s = rho^-1(rho(r) rho(s)) on norms."""

    linear_in_x = False
    param_order = ("rho",)

    def __init__(self, alg="H", rho=None):
        if alg not in ("H", "O"):
            raise ParameterError("distorted structures are defined over H or O")
        rho = rho or RadialSpec("quadmean")
        super().__init__(rho=rho)
        self.alg = alg
        self.rho = rho
        self.family = "distorted-" + alg.lower()
        self.carrier_dim = 4 if alg == "H" else 8
        self.closed_form = rho.is_multiplicative

    def star(self, a, b):
        """The real Cartesian product on nonnegative reals."""
        return self.rho.inverse(self.rho(a) * self.rho(b))

    def _scale(self, n1, n2):
        nz = (n1 > 0) & (n2 > 0)
        s1 = np.where(nz, n1, 1.0)
        s2 = np.where(nz, n2, 1.0)
        return np.where(nz, self.star(s1, s2) / (s1 * s2), 0.0)

    def multiply(self, s, x):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        return self._scale(cd_norm(s), cd_norm(x))[..., None] * cd_mul(s, x)

    def solve_slope(self, x, w):
        nx, nw = cd_norm(x), cd_norm(w)
        ns = self.rho.inverse(self.rho(nw) / self.rho(nx))
        u = cd_mul(w, cd_inv(x))
        nu = np.where(cd_norm(u) > 0, cd_norm(u), 1.0)
        s = (ns / nu)[..., None] * u
        return s, self._residual(self.multiply(s, x), w)

    def solve_point(self, s, w):
        ns, nw = cd_norm(s), cd_norm(w)
        nx = self.rho.inverse(self.rho(nw) / self.rho(ns))
        u = cd_mul(cd_inv(s), w)
        nu = np.where(cd_norm(u) > 0, cd_norm(u), 1.0)
        x = (nx / nu)[..., None] * u
        return x, self._residual(self.multiply(s, x), w)

    def _radial_terms(self, r, n, v):
        # (r * n)/n times v, and 0 where n = 0
        safe = np.where(n > 0, n, 1.0)
        coef = np.where(n > 0, self.star(r, safe) / safe, 0.0)
        return coef[..., None] * v

    def join_affine(self, x1, y1, x2, y2):
        n1, n2 = cd_norm(x1), cd_norm(x2)
        dy = y1 - y2
        target = cd_norm(dy)

        def F(r):
            return cd_norm(self._radial_terms(r, n1, x1) - self._radial_terms(r, n2, x2))

        r = solvers.solve_increasing(F, target, np.zeros_like(target), np.ones_like(target))
        safe_r = np.where(r > 0, r, 1.0)
        v = (self._radial_terms(r, n1, x1) - self._radial_terms(r, n2, x2)) / safe_r[..., None]
        s = cd_mul(dy, cd_inv(v))
        t = y1 - self.multiply(s, x1)
        return s, t, np.ones(target.shape, dtype=bool)

    def meet_affine(self, s1, t1, s2, t2):
        n1, n2 = cd_norm(s1), cd_norm(s2)
        dt = t2 - t1
        target = cd_norm(dt)

        def G(r):
            return cd_norm(self._radial_terms(r, n1, s1) - self._radial_terms(r, n2, s2))

        r = solvers.solve_increasing(G, target, np.zeros_like(target), np.ones_like(target))
        safe_r = np.where(r > 0, r, 1.0)
        A = (self._radial_terms(r, n1, s1) - self._radial_terms(r, n2, s2)) / safe_r[..., None]
        x = cd_mul(cd_inv(A), dt)
        y = self.tau(s1, x, t1)
        return x, y, np.ones(target.shape, dtype=bool)


class Spin(CoordinateStructure):
    """c o z = cz + 2r (c2 z3 - c3 z2), the correction added to the real part."""

    carrier_dim = 4
    family = "spin"
    linear_in_x = True
    linear_in_s = True
    param_order = ("r",)

    def __init__(self, r=0.5):
        if not r > 0:
            raise ParameterError(f"spin parameter must be positive, got {r}")
        super().__init__(r=float(r))
        self.r = float(r)

    def multiply(self, s, x):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        out = cd_mul(s, x)
        out[..., 0] += 2.0 * self.r * (s[..., 2] * x[..., 3] - s[..., 3] * x[..., 2])
        return out


class Moulton(CoordinateStructure):
    """s o x = s k x when s < 0 and x < 0, otherwise s x."""

    carrier_dim = 1
    family = "moulton"
    param_order = ("k",)

    def __init__(self, k=2.0):
        if not k > 1:
            raise ParameterError(f"Moulton parameter must exceed 1, got {k}")
        super().__init__(k=float(k))
        self.k = float(k)

    def _bend(self, v):
        return np.where(v < 0, self.k * v, v)

    def multiply(self, s, x):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        return np.where((s < 0) & (x < 0), self.k * s * x, s * x)

    def solve_slope(self, x, w):
        # s >= 0 gives sign(w) = sign(x); otherwise s < 0 and s o x = s * bend(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            plain = w / x
            s = np.where(plain >= 0, plain, w / self._bend(x))
        return s, self._residual(self.multiply(s, x), w)

    def solve_point(self, s, w):
        with np.errstate(divide="ignore", invalid="ignore"):
            plain = w / s
            x = np.where(plain >= 0, plain, w / self._bend(s))
        return x, self._residual(self.multiply(s, x), w)

    def join_affine(self, x1, y1, x2, y2):
        dy = y1 - y2
        with np.errstate(divide="ignore", invalid="ignore"):
            plain = dy / (x1 - x2)
            s = np.where(plain >= 0, plain, dy / (self._bend(x1) - self._bend(x2)))
        t = y1 - self.multiply(s, x1)
        return s, t, np.ones(s.shape[:-1], dtype=bool)

    def meet_affine(self, s1, t1, s2, t2):
        dt = t2 - t1
        with np.errstate(divide="ignore", invalid="ignore"):
            plain = dt / (s1 - s2)
            x = np.where(plain >= 0, plain, dt / (self._bend(s1) - self._bend(s2)))
        return x, self.tau(s1, x, t1), np.ones(x.shape[:-1], dtype=bool)


class _PowerRho:
    """rho(x) = x**r for x >= 0 and -|x|**r_neg for x < 0."""

    def __init__(self, r, r_neg):
        self.r = float(r)
        self.r_neg = float(r_neg)

    @property
    def odd(self):
        return self.r == self.r_neg

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        return np.where(x >= 0, a**self.r, -(a**self.r_neg))

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        a = np.abs(y)
        return np.where(y >= 0, a ** (1.0 / self.r), -(a ** (1.0 / self.r_neg)))


class Tschet(CoordinateStructure):
    """tau = s x + t for s >= 0 and rho(tau) = rho(s) rho(x) + rho(t) for s < 0.

    ``boundary`` moves the branch switch away from s = 0. It exists only to
    build a deliberately broken structure for negative controls.
    """

    carrier_dim = 1
    family = "tschet"
    cartesian = False
    closed_form = False
    param_order = ("r", "rneg", "boundary")

    def __init__(self, r=3.0, rneg=None, boundary=0.0):
        if not r > 0 or (rneg is not None and not rneg > 0):
            raise ParameterError("Tschetweruchin exponents must be positive")
        params = {"r": float(r)}
        if rneg is not None and rneg != r:
            params["rneg"] = float(rneg)
        if boundary:
            params["boundary"] = float(boundary)
        super().__init__(**params)
        self.rho = _PowerRho(r, r if rneg is None else rneg)
        self.boundary = float(boundary)

    def _linear(self, s):
        return s >= self.boundary

    def tau(self, s, x, t):
        s, x, t = (np.asarray(v, dtype=float) for v in (s, x, t))
        rho = self.rho
        curved = rho.inverse(rho(s) * rho(x) + rho(t))
        return np.where(self._linear(s), s * x + t, curved)

    def multiply(self, s, x):
        return self.tau(s, x, np.zeros(np.broadcast_shapes(np.shape(s), np.shape(x))))

    def intercept(self, s, x, y):
        rho = self.rho
        curved = rho.inverse(rho(y) - rho(s) * rho(x))
        return np.where(self._linear(s), y - s * x, curved)

    def solve_slope(self, x, w):
        rho = self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            lin = w / x
            cur = rho.inverse(rho(w) / rho(x))
        s = np.where(self._linear(lin), lin, cur)
        return s, self._residual(self.multiply(s, x), w)

    def solve_point(self, s, w):
        rho = self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(self._linear(s), w / s, rho.inverse(rho(w) / rho(s)))
        return x, self._residual(self.multiply(s, x), w)

    def join_candidates(self, x1, y1, x2, y2):
        """Both branch solutions with flags telling which are admissible."""
        rho = self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            s_lin = (y1 - y2) / (x1 - x2)
            s_cur = rho.inverse((rho(y1) - rho(y2)) / (rho(x1) - rho(x2)))
        return s_lin, self._linear(s_lin), s_cur, ~self._linear(s_cur)

    def join_affine(self, x1, y1, x2, y2):
        s_lin, ok_lin, s_cur, ok_cur = self.join_candidates(x1, y1, x2, y2)
        s = np.where(ok_lin, s_lin, s_cur)
        t = self.intercept(s, x1, y1)
        ok = (ok_lin ^ ok_cur)[..., 0]
        return s, t, ok

    def meet_affine(self, s1, t1, s2, t2):
        rho = self.rho
        lin1, lin2 = self._linear(s1), self._linear(s2)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_ll = (t2 - t1) / (s1 - s2)
            x_cc = rho.inverse((rho(t2) - rho(t1)) / (rho(s1) - rho(s2)))
        x = np.where(lin1 & lin2, x_ll, x_cc)
        mixed = (lin1 != lin2)[..., 0]
        if mixed.any():
            sl = np.where(lin1, s1, s2)[mixed]
            tl = np.where(lin1, t1, t2)[mixed]
            sc = np.where(lin1, s2, s1)[mixed]
            tc = np.where(lin1, t2, t1)[mixed]

            def h(xx):
                return self.tau(sl, xx, tl) - self.tau(sc, xx, tc)

            start = np.zeros_like(sl)
            lo, hi = solvers.expand_bracket(h, start - 1.0, start + 1.0)
            x[mixed] = solvers.bisect(h, lo, hi)
        y = self.tau(s1, x, t1)
        return x, y, np.ones(x.shape[:-1], dtype=bool)


class TschetDual(CoordinateStructure):
    """The dual ternary field: tau~(s, x, t) = tau(x, s, t) for an odd rho."""

    carrier_dim = 1
    family = "tschet-dual"
    cartesian = False
    closed_form = False
    param_order = ("r",)

    def __init__(self, r=3.0):
        if not r > 0:
            raise ParameterError("Tschetweruchin exponent must be positive")
        super().__init__(r=float(r))
        self.rho = _PowerRho(r, r)

    def tau(self, s, x, t):
        s, x, t = (np.asarray(v, dtype=float) for v in (s, x, t))
        rho = self.rho
        return np.where(x >= 0, s * x + t, rho.inverse(rho(s) * rho(x) + rho(t)))

    def multiply(self, s, x):
        return self.tau(s, x, np.zeros(np.broadcast_shapes(np.shape(s), np.shape(x))))

    def intercept(self, s, x, y):
        rho = self.rho
        return np.where(x >= 0, y - s * x, rho.inverse(rho(y) - rho(s) * rho(x)))

    def solve_slope(self, x, w):
        rho = self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(x >= 0, w / x, rho.inverse(rho(w) / rho(x)))
        return s, self._residual(self.multiply(s, x), w)

    def solve_point(self, s, w):
        rho = self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            lin = w / s
            cur = rho.inverse(rho(w) / rho(s))
        x = np.where(lin >= 0, lin, cur)
        return x, self._residual(self.multiply(s, x), w)

    def join_affine(self, x1, y1, x2, y2):
        rho = self.rho
        pos1, pos2 = x1 >= 0, x2 >= 0
        with np.errstate(divide="ignore", invalid="ignore"):
            s_ll = (y1 - y2) / (x1 - x2)
            s_cc = rho.inverse((rho(y1) - rho(y2)) / (rho(x1) - rho(x2)))
        s = np.where(pos1 & pos2, s_ll, s_cc)
        mixed = (pos1 != pos2)[..., 0]
        if mixed.any():
            xa = np.where(pos1, x2, x1)[mixed]
            ya = np.where(pos1, y2, y1)[mixed]
            xb = np.where(pos1, x1, x2)[mixed]
            yb = np.where(pos1, y1, y2)[mixed]

            def g(ss):
                # decreasing in ss, so negate for the increasing solver
                return -(self.tau(ss, xa, yb - ss * xb) - ya)

            lo, hi = solvers.expand_bracket(g, -np.ones_like(xa), np.ones_like(xa))
            s[mixed] = solvers.bisect(g, lo, hi)
        t = self.intercept(s, x1, y1)
        return s, t, np.ones(s.shape[:-1], dtype=bool)

    def meet_candidates(self, s1, t1, s2, t2):
        rho = self.rho
        with np.errstate(divide="ignore", invalid="ignore"):
            x_lin = (t2 - t1) / (s1 - s2)
            x_cur = rho.inverse((rho(t2) - rho(t1)) / (rho(s1) - rho(s2)))
        return x_lin, x_lin >= 0, x_cur, x_cur < 0

    def meet_affine(self, s1, t1, s2, t2):
        x_lin, ok_lin, x_cur, ok_cur = self.meet_candidates(s1, t1, s2, t2)
        x = np.where(ok_lin, x_lin, x_cur)
        return x, self.tau(s1, x, t1), (ok_lin ^ ok_cur)[..., 0]


# --- identifiers -------------------------------------------------------------


def parse_identifier(text):
    """Split ``family(:key=value)*`` into (family, {key: value-string}).

    A segment without ``=`` continues the previous value, which lets radial
    specs such as ``rho=power:2`` through.
    """
    parts = text.strip().split(":")
    family = parts[0].strip().lower()
    if not family:
        raise ParameterError(f"empty family in identifier {text!r}")
    params = {}
    last = None
    for seg in parts[1:]:
        if "=" in seg:
            key, value = seg.split("=", 1)
            key = key.strip()
            if not key or key != key.lower():
                raise ParameterError(f"keys must be lowercase: {seg!r}")
            params[key] = value.strip()
            last = key
        elif last is not None:
            params[last] += ":" + seg.strip()
        else:
            raise ParameterError(f"malformed identifier segment {seg!r} in {text!r}")
    return family, params


def _float(params, key, default):
    if key not in params:
        return default
    try:
        return float(params.pop(key))
    except ValueError as exc:
        raise ParameterError(f"{key} must be a decimal number") from exc


def structure_from_id(text):
    family, p = parse_identifier(text)
    if family.startswith("classical-"):
        cs = Classical(family.split("-", 1)[1].upper())
    elif family in ("mutation-h", "mutation-o"):
        cs = Mutation(family[-1].upper(), _float(p, "mu", 0.75))
    elif family == "rees":
        cs = Rees(_float(p, "theta", math.pi / 3))
    elif family == "lenz5":
        cs = Lenz5(_float(p, "alpha", math.pi / 4))
    elif family == "andre":
        kind = p.pop("phi", "homomorphic")
        cs = Andre(kind, _float(p, "beta", 0.5))
    elif family == "haehl-so4":
        cs = HaehlSO4(RadialSpec.parse(p.pop("rho", "power:2")))
    elif family in ("distorted-h", "distorted-o"):
        cs = Distorted(family[-1].upper(), RadialSpec.parse(p.pop("rho", "quadmean")))
    elif family == "spin":
        cs = Spin(_float(p, "r", 0.5))
    elif family == "moulton":
        cs = Moulton(_float(p, "k", 2.0))
    elif family == "tschet":
        r = _float(p, "r", 3.0)
        cs = Tschet(r, _float(p, "rneg", None), _float(p, "boundary", 0.0))
    elif family == "tschet-dual":
        cs = TschetDual(_float(p, "r", 3.0))
    else:
        raise ParameterError(f"unknown structure family {family!r}")
    if p:
        raise ParameterError(f"unused parameters for {family}: {sorted(p)}")
    return cs


# --- element-level API -------------------------------------------------------


def _wrap(cs, value, like):
    if any(isinstance(v, AlgebraElement) for v in like) and np.ndim(value) == 1:
        return AlgebraElement(cs.tag, value)
    return value


def _arr(cs, v):
    a = as_array(v)
    if a.shape[-1] != cs.carrier_dim:
        raise StructuralError(f"{cs.id} expects {cs.carrier_dim} coordinates, got {a.shape[-1]}")
    return a


def ternary_eval(cs, s, x, t):
    return _wrap(cs, cs.tau(_arr(cs, s), _arr(cs, x), _arr(cs, t)), (s, x, t))


def multiply(cs, s, x):
    return _wrap(cs, cs.multiply(_arr(cs, s), _arr(cs, x)), (s, x))


def add(cs, x, t):
    return _wrap(cs, cs.add(_arr(cs, x), _arr(cs, t)), (x, t))


def _checked(value, residual, tol, what):
    worst = float(np.max(residual, initial=0.0))
    if not np.all(np.isfinite(value)) or not worst <= tol:
        raise SolverError(f"{what} did not reach tolerance {tol:g}", worst)
    return value


def solve_slope(cs, x, w, tol=SOLVE_TOL):
    """The s with s o x = w (x must be nonzero)."""
    xa = _arr(cs, x)
    if np.any(cd_norm(xa) == 0):
        raise SolverError("solve_slope needs x != 0", np.inf)
    s, res = cs.solve_slope(xa, _arr(cs, w))
    return _wrap(cs, _checked(s, res, tol, "solve_slope"), (x, w))


def solve_point(cs, s, w, tol=SOLVE_TOL):
    """The x with s o x = w (s must be nonzero)."""
    sa = _arr(cs, s)
    if np.any(cd_norm(sa) == 0):
        raise SolverError("solve_point needs s != 0", np.inf)
    x, res = cs.solve_point(sa, _arr(cs, w))
    return _wrap(cs, _checked(x, res, tol, "solve_point"), (s, w))


def catalog_ids():
    """Identifiers of the structures exercised by the acceptance suite."""
    return [
        "classical-r",
        "classical-c",
        "classical-h",
        "classical-o",
        "mutation-h:mu=0.75",
        "mutation-o:mu=0.75",
        f"rees:theta={math.pi / 3!r}",
        f"lenz5:alpha={math.pi / 4!r}",
        "andre:phi=homomorphic:beta=0.5",
        "andre:phi=spline",
        "haehl-so4:rho=power:2",
        "distorted-h:rho=power:2",
        "distorted-h:rho=quadmean",
        "distorted-o:rho=power:2",
        "distorted-o:rho=quadmean",
        "spin:r=0.5",
        "moulton:k=2",
        "tschet:r=3",
        "tschet-dual:r=3",
    ]
