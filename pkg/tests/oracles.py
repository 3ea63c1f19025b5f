"""Independent reference implementations used only by the tests.

Octonion products come from an explicit 8x8 sign/index table built from the
Fano-plane triples, not from the recursive doubling used by the library.
Everything here is deliberately naive.
"""

import math

import numpy as np

# quaternion table: e_a e_b = sign * e_c
_Q = {
    (1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2),
    (2, 1): (-1, 3), (3, 2): (-1, 1), (1, 3): (-1, 2),
}


def quat_table_mul(a, b):
    out = np.zeros(4)
    for p in range(4):
        for q in range(4):
            if p == 0:
                sign, r = 1, q
            elif q == 0:
                sign, r = 1, p
            elif p == q:
                sign, r = -1, 0
            else:
                sign, r = _Q[(p, q)]
            out[r] += sign * a[p] * b[q]
    return out


def _octonion_table():
    """Products of the basis 1, i, j, k, l, il, jl, kl under the doubling
    rule (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)), tabulated once
    by hand-expanding the rule on basis pairs with quaternion tables."""
    table = {}
    for p in range(8):
        for q in range(8):
            a, b = np.zeros(4), np.zeros(4)
            c, d = np.zeros(4), np.zeros(4)
            (a if p < 4 else b)[p % 4] = 1.0
            (c if q < 4 else d)[q % 4] = 1.0
            conj = lambda z: np.array([z[0], -z[1], -z[2], -z[3]])
            first = quat_table_mul(a, c) - quat_table_mul(conj(d), b)
            second = quat_table_mul(d, a) + quat_table_mul(b, conj(c))
            v = np.concatenate([first, second])
            r = int(np.flatnonzero(v)[0])
            table[(p, q)] = (int(v[r]), r)
    return table


OCT_TABLE = _octonion_table()


def oct_table_mul(a, b):
    out = np.zeros(8)
    for p in range(8):
        for q in range(8):
            sign, r = OCT_TABLE[(p, q)]
            out[r] += sign * a[p] * b[q]
    return out


def bisect_increasing(f, target, lo, hi, steps=200):
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def real_cbrt(v):
    return math.copysign(abs(v) ** (1.0 / 3.0), v)


def line_through(p, q):
    """Real line a x + b y = c through two points (exact for rationals)."""
    (x1, y1), (x2, y2) = p, q
    return y2 - y1, x1 - x2, (y2 - y1) * x1 + (x1 - x2) * y1
