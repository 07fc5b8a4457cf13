"""The eta-space quotient F(lam) = S_k(eta) / S_l(eta) and its calculus.

Here eta is the transform eta_i = sum_{j != i} lam_j, S_j = sigma_j +
alpha*sigma_{j-1}, and 0 <= l < k <= n.  Derivatives in lam follow from
the chain rule with d eta_a / d lam_p = 1 - delta_{ap}:

    dF/dlam_p        = sum_{a != p} dF/deta_a
    d2F/dlam_p dlam_q = sum_{a != p, b != q} d2F/deta_a deta_b

so the lam-gradient is (total eta-gradient) minus the componentwise
eta-gradient, and the lam-Hessian is a rank-one-corrected total of the
eta-Hessian.  Derivatives of S_j itself use deleted tuples throughout.

The check_* functions return margins (right side minus left side, or the
quantity asserted positive); callers decide tolerances.  Margins are
reported raw, with the comparison scale max(1, |lhs|, |rhs|) left to the
sweep driver.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .cones import eta_values, gamma_mask, gamma_prime_mask, gamma_tilde_mask
from .errors import InputDomainError, OutsideDomainError
from .symfunc import (
    OperatorSpec,
    deleted,
    deleted_pairs,
    s_from_sigmas,
    sigma_upto,
    values_of,
)

__all__ = [
    "QuotientGradient",
    "GradBounds",
    "PairMargins",
    "ratio_value",
    "ratio_grad",
    "ratio_hess",
    "value_batch",
    "grad_batch",
    "hess_batch",
    "grad_eta_batch",
    "power_grad_batch",
    "power_hess_batch",
    "f_value",
    "f_grad",
    "f_hess",
    "f_grad_eta",
    "f_power",
    "check_concavity_defect",
    "check_maclaurin",
    "check_sum_newton",
    "check_quotient_monotone",
    "check_grad_bounds",
]


@dataclass(frozen=True)
class QuotientGradient:
    """Quotient value with first (and optionally second) lam-derivatives."""

    value: float
    grad: np.ndarray
    hess: np.ndarray | None = None


@dataclass(frozen=True)
class GradBounds:
    """Positive gradient statistics of a single admissible tuple."""

    min_component_share: float  # min_i grad_i / sum_j grad_j
    sum_vs_power: float  # (sum_i grad_i) / F^(1 - 1/(k-l))


@dataclass(frozen=True)
class PairMargins:
    """Margins of the paired-product inequalities (plain sigma and shifted S)."""

    plain: float
    shifted: float


def _pieces(spec: OperatorSpec, y: np.ndarray, order: int) -> dict:
    """S_k/S_l numerator-denominator data at y, through derivative ``order``."""
    k, l, alpha = spec.k, spec.l, spec.alpha
    out: dict = {}
    sig = sigma_upto(y, min(k, y.shape[-1]))
    out["N"] = s_from_sigmas(sig, k, alpha)
    out["D"] = s_from_sigmas(sig, l, alpha)
    if order >= 1:
        sd = sigma_upto(deleted(y), max(k - 1, 0))
        out["Na"] = s_from_sigmas(sd, k - 1, alpha)
        out["Da"] = s_from_sigmas(sd, l - 1, alpha)
    if order >= 2:
        n = y.shape[-1]
        sp = sigma_upto(deleted_pairs(y), max(k - 2, 0))
        eye = np.eye(n, dtype=bool)
        out["Nab"] = np.where(eye, 0.0, s_from_sigmas(sp, k - 2, alpha))
        out["Dab"] = np.where(eye, 0.0, s_from_sigmas(sp, l - 2, alpha))
    return out


def ratio_value(spec: OperatorSpec, y: np.ndarray) -> np.ndarray:
    """S_k(y)/S_l(y) along the last axis (no domain guard)."""
    p = _pieces(spec, np.asarray(y, dtype=float), 0)
    return p["N"] / p["D"]


def ratio_grad(spec: OperatorSpec, y: np.ndarray) -> np.ndarray:
    """Gradient of S_k/S_l in its own variables, component a:

    (S_{k-1}(y|a) S_l(y) - S_k(y) S_{l-1}(y|a)) / S_l(y)^2
    """
    p = _pieces(spec, np.asarray(y, dtype=float), 1)
    D = p["D"][..., None]
    return (p["Na"] * D - p["N"][..., None] * p["Da"]) / D**2


def ratio_hess(spec: OperatorSpec, y: np.ndarray) -> np.ndarray:
    """Hessian of S_k/S_l in its own variables (quotient rule on deleted sums)."""
    p = _pieces(spec, np.asarray(y, dtype=float), 2)
    N, D = p["N"][..., None, None], p["D"][..., None, None]
    Na, Da = p["Na"], p["Da"]
    cross = Na[..., :, None] * Da[..., None, :]
    cross = cross + np.swapaxes(cross, -1, -2)
    rank1 = Da[..., :, None] * Da[..., None, :]
    return p["Nab"] / D - cross / D**2 - N * p["Dab"] / D**2 + 2.0 * N * rank1 / D**3


def grad_eta_batch(spec: OperatorSpec, vals: np.ndarray) -> np.ndarray:
    """dF/deta at eta(lam) for a batch of lam tuples."""
    return ratio_grad(spec, eta_values(vals))


def value_batch(spec: OperatorSpec, vals: np.ndarray) -> np.ndarray:
    """F(lam) along the last axis (no domain guard)."""
    return ratio_value(spec, eta_values(vals))


def grad_batch(spec: OperatorSpec, vals: np.ndarray) -> np.ndarray:
    """dF/dlam: total eta-gradient minus the componentwise eta-gradient."""
    g = grad_eta_batch(spec, vals)
    return g.sum(axis=-1, keepdims=True) - g


def hess_batch(spec: OperatorSpec, vals: np.ndarray) -> np.ndarray:
    """d2F/dlam2 assembled from the eta-Hessian G:

    H[p, q] = (sum of G) - rowsum_p - rowsum_q + G[p, q].
    """
    G = ratio_hess(spec, eta_values(vals))
    rs = G.sum(axis=-1)
    tot = rs.sum(axis=-1)
    return G + tot[..., None, None] - rs[..., :, None] - rs[..., None, :]


def power_grad_batch(spec: OperatorSpec, vals: np.ndarray, exponent: float):
    """Value and lam-gradient of F**exponent (requires F > 0)."""
    v = value_batch(spec, vals)
    g = grad_batch(spec, vals)
    return v**exponent, exponent * (v ** (exponent - 1.0))[..., None] * g


def power_hess_batch(spec: OperatorSpec, vals: np.ndarray, exponent: float):
    """Value, gradient and Hessian of F**exponent via the scalar chain rule."""
    v = value_batch(spec, vals)
    g = grad_batch(spec, vals)
    H = hess_batch(spec, vals)
    pv = v**exponent
    c1 = (exponent * v ** (exponent - 1.0))[..., None]
    c2 = (exponent * (exponent - 1.0) * v ** (exponent - 2.0))[..., None, None]
    outer = g[..., :, None] * g[..., None, :]
    return pv, c1 * g, c2 * outer + c1[..., None] * H


def _single(spec: OperatorSpec, lam) -> np.ndarray:
    vals = values_of(lam)
    if vals.ndim != 1 or vals.shape[0] != spec.n:
        raise InputDomainError(f"expected a single tuple of length n={spec.n}")
    if not np.all(np.isfinite(vals)):
        raise InputDomainError("input contains non-finite entries")
    return vals


def _guard_denominator(spec: OperatorSpec, vals: np.ndarray):
    p = _pieces(spec, eta_values(vals), 0)
    if not p["D"] > 0.0:
        raise OutsideDomainError(
            f"S_{spec.l}(eta) = {float(p['D'])!r} is not positive; quotient undefined"
        )


def f_value(spec: OperatorSpec, lam) -> float:
    """F(lam) = S_k(eta)/S_l(eta); requires S_l(eta) > 0."""
    vals = _single(spec, lam)
    _guard_denominator(spec, vals)
    return float(value_batch(spec, vals))


def f_grad(spec: OperatorSpec, lam) -> QuotientGradient:
    """Value and first lam-derivatives of F."""
    vals = _single(spec, lam)
    _guard_denominator(spec, vals)
    return QuotientGradient(
        value=float(value_batch(spec, vals)), grad=grad_batch(spec, vals)
    )


def f_hess(spec: OperatorSpec, lam) -> QuotientGradient:
    """Value, gradient and Hessian of F."""
    vals = _single(spec, lam)
    _guard_denominator(spec, vals)
    return QuotientGradient(
        value=float(value_batch(spec, vals)),
        grad=grad_batch(spec, vals),
        hess=hess_batch(spec, vals),
    )


def f_grad_eta(spec: OperatorSpec, lam) -> np.ndarray:
    """dF/deta evaluated at eta(lam) for a single tuple."""
    vals = _single(spec, lam)
    _guard_denominator(spec, vals)
    return grad_eta_batch(spec, vals)


def f_power(spec: OperatorSpec, lam, exponent: float) -> QuotientGradient:
    """Derivatives of F**exponent; requires F > 0."""
    vals = _single(spec, lam)
    _guard_denominator(spec, vals)
    if not float(value_batch(spec, vals)) > 0.0:
        raise OutsideDomainError("F must be positive to take a real power")
    v, g, H = power_hess_batch(spec, vals, exponent)
    return QuotientGradient(value=float(v), grad=g, hess=H)


def check_concavity_defect(spec: OperatorSpec, lam, xi) -> float:
    """Margin of the concavity inequality along direction xi:

        (1 - 1/(k-l)) (dF.xi)^2 / F  -  xi' (d2F) xi  >= 0

    equivalent to concavity of F**(1/(k-l)).  For k - l == 1 the right
    side is plain concavity of F itself.
    """
    vals = _single(spec, lam)
    if not gamma_prime_mask(vals[None, :], spec.k, spec.alpha)[0]:
        raise OutsideDomainError("tuple is not admissible for the quotient")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != vals.shape:
        raise InputDomainError("direction must have the same length as the tuple")
    q = f_hess(spec, lam)
    lhs = float(xi @ q.hess @ xi)
    rhs = (1.0 - 1.0 / (spec.k - spec.l)) * float(q.grad @ xi) ** 2 / q.value
    return rhs - lhs


def check_maclaurin(lam, k: int) -> float:
    """Newton-Maclaurin margin at index k on Gamma_n tuples:

        (sigma_k/C(n,k))^2 - (sigma_{k-1}/C(n,k-1))(sigma_{k+1}/C(n,k+1))

    Nonnegative on Gamma_n, zero only at constant tuples.
    """
    vals = values_of(lam)
    if vals.ndim != 1:
        raise InputDomainError("expected a single tuple")
    n = vals.shape[-1]
    if not 1 <= k <= n - 1:
        raise InputDomainError(f"index k={k} must lie in 1..n-1")
    if not gamma_mask(vals[None, :], n)[0]:
        raise OutsideDomainError("tuple must lie in Gamma_n")
    sig = sigma_upto(vals, k + 1)
    mid = sig[k] / comb(n, k)
    return float(mid * mid - (sig[k - 1] / comb(n, k - 1)) * (sig[k + 1] / comb(n, k + 1)))


def check_sum_newton(spec: OperatorSpec, lam, k: int, l: int) -> PairMargins:
    """Margins of the paired-product inequalities for 1 <= l < k <= n:

    plain:   sigma_{k-1} sigma_l / (C(n,k-1) C(n,l))
               - sigma_k sigma_{l-1} / (C(n,k) C(n,l-1))
    shifted: the same shape on S with C(n+1, .) weights, reflecting that
             S_j(lam) = sigma_j of the alpha-augmented (n+1)-tuple.
    """
    vals = values_of(lam)
    if vals.ndim != 1:
        raise InputDomainError("expected a single tuple")
    n = vals.shape[-1]
    if not 1 <= l < k <= n:
        raise InputDomainError(f"need 1 <= l < k <= n, got k={k} l={l} n={n}")
    if not gamma_tilde_mask(vals[None, :], k, spec.alpha)[0]:
        raise OutsideDomainError("tuple must lie in GammaTilde_k")
    sig = sigma_upto(vals, k)
    plain = float(
        (sig[k - 1] / comb(n, k - 1)) * (sig[l] / comb(n, l))
        - (sig[k] / comb(n, k)) * (sig[l - 1] / comb(n, l - 1))
    )
    s = [float(s_from_sigmas(sig, j, spec.alpha)) for j in range(k + 1)]
    m = n + 1
    shifted = (s[k - 1] / comb(m, k - 1)) * (s[l] / comb(m, l)) - (
        s[k] / comb(m, k)
    ) * (s[l - 1] / comb(m, l - 1))
    return PairMargins(plain=plain, shifted=float(shifted))


def check_quotient_monotone(spec: OperatorSpec, lam, p: int, q: int) -> float:
    """Margin (S_p/S_q)^(1/(p-q)) - (S_k/S_l)^(1/(k-l)) >= 0 for k >= p > q, l >= q."""
    vals = values_of(lam)
    if vals.ndim != 1:
        raise InputDomainError("expected a single tuple")
    k, l = spec.k, spec.l
    if not (k >= p > q >= 0 and l >= q):
        raise InputDomainError(f"need k >= p > q >= 0 and l >= q, got p={p} q={q}")
    if not gamma_tilde_mask(vals[None, :], k, spec.alpha)[0]:
        raise OutsideDomainError("tuple must lie in GammaTilde_k")
    sig = sigma_upto(vals, k)
    s = [float(s_from_sigmas(sig, j, spec.alpha)) for j in range(k + 1)]
    coarse = (s[k] / s[l]) ** (1.0 / (k - l))
    fine = (s[p] / s[q]) ** (1.0 / (p - q))
    return fine - coarse


def check_grad_bounds(spec: OperatorSpec, lam) -> GradBounds:
    """Positive gradient statistics for admissible tuples with k < n.

    Both reported ratios are strictly positive on the cone:
    the smallest gradient component as a share of the gradient sum, and
    the gradient sum measured against F^(1 - 1/(k-l)).
    """
    if spec.k >= spec.n:
        raise InputDomainError("gradient bounds require k < n")
    vals = _single(spec, lam)
    if not gamma_prime_mask(vals[None, :], spec.k, spec.alpha)[0]:
        raise OutsideDomainError("tuple is not admissible for the quotient")
    q = f_grad(spec, lam)
    total = float(q.grad.sum())
    share = float(q.grad.min()) / total
    power = q.value ** (1.0 - 1.0 / (spec.k - spec.l))
    return GradBounds(min_component_share=share, sum_vs_power=total / power)
