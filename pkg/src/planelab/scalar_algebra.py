"""Arithmetic in the reals, complexes, quaternions and octonions.

Elements are real coefficient vectors of length 1, 2, 4 or 8. Quaternions use
the basis 1, i, j, k; an octonion is a pair of quaternions written c' + c''l.
Every dimension is produced by Cayley-Dickson doubling with the fixed rule

    (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)),    conj(a, b) = (conj(a), -b)

so that l*l = -1, i*l = il and l*i = -il.

The ``cd_*`` kernels work on the last axis of numpy arrays and broadcast over
any leading axes. Higher layers call them directly on sample batches;
:class:`AlgebraElement` is the immutable single-value wrapper.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionByZeroError, StructuralError

TAGS = {"R": 1, "C": 2, "H": 4, "O": 8}
DIM_TO_TAG = {v: k for k, v in TAGS.items()}

BASIS_NAMES = ("1", "i", "j", "k", "l", "il", "jl", "kl")


def _check_dim(n):
    if n not in DIM_TO_TAG:
        raise StructuralError(f"coordinate length {n} is not 1, 2, 4 or 8")


def _qmul(a, b):
    a0, a1, a2, a3 = np.moveaxis(a, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def cd_conj(a):
    a = np.asarray(a, dtype=float)
    out = -a
    out[..., 0] = a[..., 0]
    return out


def cd_mul(a, b):
    """Product of coordinate arrays along the last axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[-1]
    if b.shape[-1] != n:
        raise StructuralError(f"cannot multiply dimensions {n} and {b.shape[-1]}")
    _check_dim(n)
    if n == 1:
        return a * b
    if n == 2:
        return np.stack(
            [
                a[..., 0] * b[..., 0] - a[..., 1] * b[..., 1],
                a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0],
            ],
            axis=-1,
        )
    if n == 4:
        return _qmul(a, b)
    a1, a2 = a[..., :4], a[..., 4:]
    c1, c2 = b[..., :4], b[..., 4:]
    return np.concatenate(
        [_qmul(a1, c1) - _qmul(cd_conj(c2), a2), _qmul(c2, a1) + _qmul(a2, cd_conj(c1))],
        axis=-1,
    )


def cd_norm(a):
    return np.sqrt(np.sum(np.square(a), axis=-1))


def cd_inv(a):
    a = np.asarray(a, dtype=float)
    n2 = np.sum(np.square(a), axis=-1)
    if np.any(n2 == 0.0):
        raise DivisionByZeroError("inverse of zero")
    return cd_conj(a) / n2[..., None]


def cd_one(n, shape=()):
    out = np.zeros(tuple(shape) + (n,))
    out[..., 0] = 1.0
    return out


def left_matrix(mul, s, n):
    """Matrix of x -> mul(s, x) for each s in a batch, shape (..., n, n)."""
    s = np.asarray(s, dtype=float)
    eye = np.eye(n)
    cols = [mul(s, np.broadcast_to(eye[k], s.shape)) for k in range(n)]
    return np.stack(cols, axis=-1)


def right_matrix(mul, x, n):
    """Matrix of s -> mul(s, x) for each x in a batch, shape (..., n, n)."""
    x = np.asarray(x, dtype=float)
    eye = np.eye(n)
    cols = [mul(np.broadcast_to(eye[k], x.shape), x) for k in range(n)]
    return np.stack(cols, axis=-1)


class AlgebraElement:
    """An immutable element of R, C, H or O."""

    __slots__ = ("tag", "coords")

    def __init__(self, tag, coords):
        if tag not in TAGS:
            raise StructuralError(f"unknown algebra tag {tag!r}")
        arr = np.array(coords, dtype=float).reshape(-1)
        if arr.size != TAGS[tag]:
            raise StructuralError(f"{tag} needs {TAGS[tag]} coordinates, got {arr.size}")
        arr.flags.writeable = False
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "coords", arr)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def from_coords(cls, coords):
        arr = np.asarray(coords, dtype=float).reshape(-1)
        _check_dim(arr.size)
        return cls(DIM_TO_TAG[arr.size], arr)

    @property
    def dim(self):
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)

    def __repr__(self):
        terms = ", ".join(f"{c:.6g}" for c in self.coords)
        return f"AlgebraElement({self.tag}, [{terms}])"

    def _same(self, other):
        if not isinstance(other, AlgebraElement) or other.tag != self.tag:
            raise StructuralError("operands must share an algebra tag")

    def __add__(self, other):
        self._same(other)
        return AlgebraElement(self.tag, self.coords + other.coords)

    def __sub__(self, other):
        self._same(other)
        return AlgebraElement(self.tag, self.coords - other.coords)

    def __neg__(self):
        return AlgebraElement(self.tag, -self.coords)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        return AlgebraElement(self.tag, self.coords * float(other))

    def __rmul__(self, other):
        return AlgebraElement(self.tag, float(other) * self.coords)

    def __truediv__(self, other):
        return AlgebraElement(self.tag, self.coords / float(other))

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and other.tag == self.tag
            and np.array_equal(other.coords, self.coords)
        )

    __hash__ = None

    def isclose(self, other, tol=1e-12):
        self._same(other)
        return bool(np.linalg.norm(self.coords - other.coords) <= tol)

    def conj(self):
        return conj(self)

    def norm(self):
        return norm(self)

    def inverse(self):
        return inverse(self)

    @property
    def real(self):
        return float(self.coords[0])

    @property
    def pure(self):
        c = self.coords.copy()
        c[0] = 0.0
        return AlgebraElement(self.tag, c)

    def halves(self):
        """The pair (c', c'') with self = c' + c'' times the doubling unit."""
        if self.dim == 1:
            raise StructuralError("a real number has no doubling halves")
        h = self.dim // 2
        tag = DIM_TO_TAG[h]
        return AlgebraElement(tag, self.coords[:h]), AlgebraElement(tag, self.coords[h:])


def element(tag, *coords):
    if len(coords) == 1 and np.ndim(coords[0]) > 0:
        coords = coords[0]
    return AlgebraElement(tag, coords)


def basis(tag, name):
    """Basis unit by name, e.g. ``basis("O", "il")``."""
    k = BASIS_NAMES.index(name)
    n = TAGS[tag]
    if k >= n:
        raise StructuralError(f"{name} is not a unit of {tag}")
    c = np.zeros(n)
    c[k] = 1.0
    return AlgebraElement(tag, c)


def mul(a, b):
    if not isinstance(a, AlgebraElement) or not isinstance(b, AlgebraElement):
        raise StructuralError("mul expects AlgebraElement operands")
    if a.tag != b.tag:
        raise StructuralError(f"cannot multiply {a.tag} by {b.tag}")
    return AlgebraElement(a.tag, cd_mul(a.coords, b.coords))


def conj(a):
    return AlgebraElement(a.tag, cd_conj(a.coords))


def norm(a):
    return float(cd_norm(a.coords))


def inverse(a):
    if not np.any(a.coords):
        raise DivisionByZeroError("inverse of zero")
    return AlgebraElement(a.tag, cd_inv(a.coords))


def as_array(x, dim=None):
    """Coordinates of an element or array-like as a float array."""
    arr = x.coords if isinstance(x, AlgebraElement) else np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if dim is not None and arr.shape[-1] != dim:
        raise StructuralError(f"expected {dim} coordinates, got {arr.shape[-1]}")
    return arr


# --- random sampling -------------------------------------------------------


def random_elements(rng, n_dim, size=None):
    shape = (n_dim,) if size is None else (size, n_dim)
    return rng.standard_normal(shape)


def random_units(rng, n_dim, size=None, pure=False):
    """Uniform samples from the unit sphere (or the sphere of pure units).

    Normalizes standard-normal draws and redraws any with norm below 1e-6.
    """
    count = 1 if size is None else size
    out = np.empty((count, n_dim))
    filled = 0
    while filled < count:
        v = rng.standard_normal((count - filled, n_dim))
        if pure:
            v[:, 0] = 0.0
        r = cd_norm(v)
        ok = r >= 1e-6
        v = v[ok] / r[ok, None]
        out[filled : filled + len(v)] = v
        filled += len(v)
    return out[0] if size is None else out


# --- morphisms ---------------------------------------------------------------

KINDS = ("identity", "conjugation", "twisted", "half_flip", "lambda", "inner", "pair_auto")
_NATURAL_VARIANCE = {
    "identity": "auto",
    "conjugation": "anti",
    "twisted": "anti",
    "half_flip": "auto",
    "lambda": "anti",
    "inner": "auto",
    "pair_auto": "auto",
}


@dataclass(frozen=True)
class Morphism:
    """A catalog (anti)automorphism of one of the four algebras.

    kinds:
      conjugation  z -> conj(z)
      twisted      z -> g^-1 conj(z) g for a pure unit g (R, C, H)
      half_flip    z' + z''l -> z' - z''l (O)
      lambda       conjugation after half_flip (O)
      inner        z -> conj(h) z h for a unit h (R, C, H)
      pair_auto    (a, b) -> (p a conj(p), u p b conj(p)) for unit quaternions p, u (O)

    ``variance`` defaults to the true variance of the kind; passing the wrong
    one is allowed so that :func:`morphism_verify` can be shown to reject it.
    """

    kind: str
    tag: str
    params: tuple = field(default=())
    variance: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StructuralError(f"unknown morphism kind {self.kind!r}")
        if self.tag not in TAGS:
            raise StructuralError(f"unknown algebra tag {self.tag!r}")
        if self.kind in ("half_flip", "lambda", "pair_auto") and self.tag != "O":
            raise StructuralError(f"{self.kind} acts on octonions only")
        if self.kind in ("twisted", "inner") and self.tag == "O":
            raise StructuralError(f"{self.kind} is only provided for R, C and H")
        params = tuple(np.array(as_array(p), dtype=float) for p in self.params)
        for p in params:
            p.flags.writeable = False
        object.__setattr__(self, "params", params)
        if not self.variance:
            object.__setattr__(self, "variance", _NATURAL_VARIANCE[self.kind])
        if self.variance not in ("auto", "anti"):
            raise StructuralError("variance must be 'auto' or 'anti'")

    @property
    def dim(self):
        return TAGS[self.tag]

    def __call__(self, z):
        if isinstance(z, AlgebraElement):
            return morphism_apply(self, z)
        return apply_array(self, z)

    def inverse(self):
        if self.kind == "inner":
            return Morphism("inner", self.tag, (cd_conj(self.params[0]),), self.variance)
        if self.kind == "pair_auto":
            p, u = self.params
            pc = cd_conj(p)
            v = cd_mul(cd_mul(pc, cd_conj(u)), p)
            return Morphism("pair_auto", "O", (pc, v), self.variance)
        return self

    def is_involution(self):
        return self.kind not in ("inner", "pair_auto")

    def matrix(self):
        """The real-linear map as an n-by-n matrix."""
        return np.stack([apply_array(self, e) for e in np.eye(self.dim)], axis=-1)


def identity(tag):
    return Morphism("identity", tag)


def conjugation(tag, variance=""):
    return Morphism("conjugation", tag, (), variance)


def twisted_conjugation(g):
    g = g if isinstance(g, AlgebraElement) else AlgebraElement.from_coords(g)
    return Morphism("twisted", g.tag, (g.coords,))


def half_flip():
    return Morphism("half_flip", "O")


def octonion_lambda():
    return Morphism("lambda", "O")


def inner(h):
    h = h if isinstance(h, AlgebraElement) else AlgebraElement.from_coords(h)
    return Morphism("inner", h.tag, (h.coords,))


def pair_auto(p, u):
    return Morphism("pair_auto", "O", (as_array(p, 4), as_array(u, 4)))


def apply_array(m, z):
    z = as_array(z, m.dim)
    k = m.kind
    if k == "identity":
        return np.array(z, dtype=float)
    if k == "conjugation":
        return cd_conj(z)
    if k == "twisted":
        g = m.params[0]
        return cd_mul(cd_mul(cd_inv(g), cd_conj(z)), g)
    if k == "inner":
        h = m.params[0]
        return cd_mul(cd_mul(cd_conj(h), z), h)
    if k == "half_flip":
        out = np.array(z, dtype=float)
        out[..., 4:] *= -1.0
        return out
    if k == "lambda":
        out = np.array(z, dtype=float)
        out[..., 4:] *= -1.0
        return cd_conj(out)
    p, u = m.params
    pc = cd_conj(p)
    a = cd_mul(cd_mul(p, z[..., :4]), pc)
    b = cd_mul(u, cd_mul(cd_mul(p, z[..., 4:]), pc))
    return np.concatenate([a, b], axis=-1)


def morphism_apply(m, a):
    if a.tag != m.tag:
        raise StructuralError(f"morphism on {m.tag} applied to {a.tag}")
    return AlgebraElement(a.tag, apply_array(m, a.coords))


@dataclass
class MorphismReport:
    morphism: str
    variance: str
    samples: int
    hom_residual: float
    inverse_residual: float
    passed: bool
    witness: tuple = None


def morphism_verify(m, n_samples, seed, tol=1e-12):
    """Check the declared (anti)homomorphism law and the inverse law on samples.

    Residuals are relative to max(1, |x||y|). The witness is the worst pair.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    n = m.dim
    x = rng.standard_normal((n_samples, n))
    y = rng.standard_normal((n_samples, n))
    lhs = apply_array(m, cd_mul(x, y))
    if m.variance == "auto":
        rhs = cd_mul(apply_array(m, x), apply_array(m, y))
    else:
        rhs = cd_mul(apply_array(m, y), apply_array(m, x))
    scale = np.maximum(1.0, cd_norm(x) * cd_norm(y))
    hom = cd_norm(lhs - rhs) / scale
    back = apply_array(m.inverse(), apply_array(m, x))
    inv = cd_norm(back - x) / np.maximum(1.0, cd_norm(x))
    worst = int(np.argmax(hom))
    passed = bool(hom.max() <= tol and inv.max() <= tol)
    witness = None
    if not passed:
        w = worst if hom.max() > tol else int(np.argmax(inv))
        witness = (AlgebraElement(m.tag, x[w]), AlgebraElement(m.tag, y[w]))
    return MorphismReport(
        morphism=m.kind,
        variance=m.variance,
        samples=n_samples,
        hom_residual=float(hom.max()),
        inverse_residual=float(inv.max()),
        passed=passed,
        witness=witness,
    )
