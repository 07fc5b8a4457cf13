"""Independent reference computations shared by the test modules.

Everything here is deliberately naive: exact rational arithmetic and
O(2^n) subset enumeration.  Agreement between these and the fast library
paths is therefore meaningful evidence, not circular reasoning.
"""

from fractions import Fraction
from itertools import combinations
import math

import numpy as np


def sigma_enumerated(k: int, vals) -> Fraction:
    """Elementary symmetric polynomial by exact subset enumeration.

    Doubles are dyadic rationals, so Fraction(v) is lossless and the
    return value is the true polynomial value at the given inputs.
    """
    fr = [Fraction(v) for v in vals]
    n = len(fr)
    if k < 0 or k > n:
        return Fraction(0)
    if k == 0:
        return Fraction(1)
    return sum((math.prod(c) for c in combinations(fr, k)), Fraction(0))


def ulps_apart(computed: float, exact: Fraction, reference: float | None = None) -> float:
    """|computed - exact| in ulp units.

    The unit defaults to the ulp at the exact value.  For sums with
    cancellation pass ``reference`` = the aggregation mass (sum of the
    absolute summands): rounding can only be judged against the size of
    what was summed, not against a nearly-cancelled total.
    """
    ref = abs(float(exact)) if reference is None else abs(float(reference))
    unit = Fraction(math.ulp(ref) if ref != 0.0 else math.ulp(0.0))
    return float(abs(Fraction(computed) - exact) / unit)


def s_sum_enumerated(k: int, alpha: float, vals) -> Fraction:
    # sigma_k + alpha*sigma_{k-1}, assembled from the enumeration oracle
    return sigma_enumerated(k, vals) + Fraction(alpha) * sigma_enumerated(k - 1, vals)


def quotient_enumerated(n: int, k: int, l: int, alpha: float, lam) -> Fraction:
    """The full operator value composed from first principles.

    eta_i = sum of the other entries; the quotient is evaluated in exact
    arithmetic so the only rounding in a comparison comes from the
    library side.
    """
    fr = [Fraction(v) for v in lam]
    total = sum(fr, Fraction(0))
    eta = [total - v for v in fr]
    num = s_sum_enumerated(k, alpha, eta)
    den = s_sum_enumerated(l, alpha, eta)
    return num / den


def fd_gradient(fn, x, h: float) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return out


def fd_jacobian(fn, x, h: float) -> np.ndarray:
    """Central-difference Jacobian of a vector function (columns = inputs)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2.0 * h))
    return np.stack(cols, axis=-1)


def fd_second_directional(fn, x, d, h: float) -> float:
    """Five-point second derivative of t -> fn(x + t*d) at t = 0."""
    v = [fn(x + t * h * d) for t in (-2.0, -1.0, 0.0, 1.0, 2.0)]
    return (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h)
