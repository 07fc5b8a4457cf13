"""Batch verification sweeps over the eigenvalue calculus.

Every check draws seeded random tuples (plain Gaussian for algebraic
identities, cone-constrained for inequalities), evaluates a property in
vectorized form, and reports a CheckResult with the worst margin seen
and any empirical constants worth recording.  The scalar check_*
operations in `quotient` are the reference semantics; unit tests pin
the vectorized forms here against them sample-by-sample.

Margin conventions:

* identity checks report ``worst_margin`` as the largest relative error
  (smaller is better, pass iff <= tol.rel_identity);
* inequality checks report the smallest normalized signed margin
  (larger is better, pass iff >= -tol.ineq_floor);
* exact ordering checks count strict violations with no tolerance.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .cones import (
    eta_values,
    gamma_mask,
    gamma_prime_mask,
    gamma_tilde_mask,
    sample_cone_batch,
)
from .errors import ConfigurationError
from .matrixcalc import jacobi_eigh, second_derivative_forms_from_frame
from .quotient import (
    grad_eta_batch,
    grad_batch,
    hess_batch,
    value_batch,
)
from .symfunc import OperatorSpec, deleted, s_from_sigmas, sigma_upto

__all__ = [
    "Tolerances",
    "SweepGrid",
    "CheckResult",
    "CHECKS",
    "check_names",
    "run_check",
    "run_sweep",
]

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class Tolerances:
    rel_identity: float = 1e-10
    ineq_floor: float = 1e-9
    fd_rel: float = 1e-5
    fd_degenerate: float = 1e-4


@dataclass(frozen=True)
class SweepGrid:
    """Parameter grid a sweep enumerates; the default covers n <= 6."""

    ns: tuple = (2, 3, 4, 5, 6)
    alphas: tuple = (0.0, 0.5, 3.0)


@dataclass
class CheckResult:
    name: str
    params: dict
    samples: int
    failures: int
    worst_margin: float
    margin_kind: str  # "max_rel_err" | "min_margin" | "violations"
    minima: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def row(self) -> dict:
        out = {
            "check": self.name,
            "n": self.params.get("n"),
            "k": self.params.get("k"),
            "l": self.params.get("l"),
            "alpha": self.params.get("alpha"),
            "samples": self.samples,
            "failures": self.failures,
            "worst_margin": self.worst_margin,
            "margin_kind": self.margin_kind,
        }
        for key in sorted(self.minima):
            out[f"min_{key}"] = self.minima[key]
        return out


def _spec(params: dict) -> OperatorSpec:
    n = params["n"]
    k = params.get("k", min(2, n))
    l = params.get("l", 0)
    return OperatorSpec(n=n, k=k, l=l, alpha=params.get("alpha", 0.0))


def _rel(err: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return err / np.maximum(scale, _TINY)


# --- algebraic identities -------------------------------------------------


def _identity_result(name, params, rel_err, tol) -> CheckResult:
    worst = float(rel_err.max()) if rel_err.size else 0.0
    return CheckResult(
        name=name,
        params=params,
        samples=rel_err.shape[0],
        failures=int((rel_err > tol.rel_identity).any(axis=-1).sum())
        if rel_err.ndim > 1
        else int((rel_err > tol.rel_identity).sum()),
        worst_margin=worst,
        margin_kind="max_rel_err",
    )


def check_split_identity(params, samples, rng, tol) -> CheckResult:
    """S_k(lam) = lam_i S_{k-1}(lam|i) + S_k(lam|i) for every i."""
    n, k, alpha = params["n"], params["k"], params["alpha"]
    vals = rng.standard_normal((samples, n)) * rng.uniform(0.5, 2.0, (samples, 1))
    sig = sigma_upto(vals, k)
    s_full = s_from_sigmas(sig, k, alpha)
    dsig = sigma_upto(deleted(vals), k)
    s_km1 = s_from_sigmas(dsig, k - 1, alpha)
    s_k = s_from_sigmas(dsig, k, alpha)
    rhs = vals * s_km1 + s_k
    scale = np.abs(vals * s_km1) + np.abs(s_k) + np.abs(s_full)[..., None]
    rel = _rel(np.abs(rhs - s_full[..., None]), scale)
    return _identity_result("split_identity", params, rel, tol)


def check_deleted_sum_identity(params, samples, rng, tol) -> CheckResult:
    """sum_i S_k(lam|i) = (n-k) S_k(lam) + alpha sigma_{k-1}(lam)."""
    n, k, alpha = params["n"], params["k"], params["alpha"]
    vals = rng.standard_normal((samples, n)) * rng.uniform(0.5, 2.0, (samples, 1))
    sig = sigma_upto(vals, k)
    dsig = sigma_upto(deleted(vals), k)
    lhs = s_from_sigmas(dsig, k, alpha).sum(axis=-1)
    rhs = (n - k) * s_from_sigmas(sig, k, alpha) + alpha * sig[..., k - 1]
    scale = np.abs(s_from_sigmas(dsig, k, alpha)).sum(axis=-1) + np.abs(rhs)
    rel = _rel(np.abs(lhs - rhs), scale + np.abs(lhs))
    return _identity_result("deleted_sum_identity", params, rel, tol)


def check_weighted_sum_identity(params, samples, rng, tol) -> CheckResult:
    """sum_i lam_i S_{k-1}(lam|i) = k S_k(lam) - alpha sigma_{k-1}(lam)."""
    n, k, alpha = params["n"], params["k"], params["alpha"]
    vals = rng.standard_normal((samples, n)) * rng.uniform(0.5, 2.0, (samples, 1))
    sig = sigma_upto(vals, k)
    dsig = sigma_upto(deleted(vals), k)
    terms = vals * s_from_sigmas(dsig, k - 1, alpha)
    lhs = terms.sum(axis=-1)
    rhs = k * s_from_sigmas(sig, k, alpha) - alpha * sig[..., k - 1]
    rel = _rel(np.abs(lhs - rhs), np.abs(terms).sum(axis=-1) + np.abs(rhs) + np.abs(lhs))
    return _identity_result("weighted_sum_identity", params, rel, tol)


def check_eta_transform(params, samples, rng, tol) -> CheckResult:
    """Linear facts of the complement-sum transform:

    sum eta = (n-1) sum lam, and applying the transform twice gives
    (n-2)*(sum lam) + lam componentwise.
    """
    n = params["n"]
    vals = rng.standard_normal((samples, n)) * rng.uniform(0.5, 3.0, (samples, 1))
    eta = eta_values(vals)
    lhs, rhs = eta.sum(axis=-1), (n - 1) * vals.sum(axis=-1)
    rel = _rel(np.abs(lhs - rhs), np.abs(eta).sum(axis=-1) + np.abs(rhs))
    twice = eta_values(eta)
    back = (n - 2) * vals.sum(axis=-1, keepdims=True) + vals
    # each entry of the double transform is a sum over |eta| terms, so
    # rounding must be measured against that scale, not the entry itself
    span = np.abs(eta).sum(axis=-1, keepdims=True)
    rel2 = _rel(np.abs(twice - back), np.abs(twice) + np.abs(back) + span)
    res = _identity_result("eta_transform", params, rel, tol)
    extra = int((rel2 > tol.rel_identity).any(axis=-1).sum())
    res.failures += extra
    res.worst_margin = max(res.worst_margin, float(rel2.max()))
    return res


def check_homogeneity(params, samples, rng, tol) -> CheckResult:
    """F(t lam) with alpha scaled to t alpha equals t^(k-l) F(lam)."""
    spec = _spec(params)
    vals = sample_cone_batch("gamma_prime", spec, samples, rng)
    base = value_batch(spec, vals)
    rels = []
    for tv in (0.5, 1.7, 3.0):
        spec_t = OperatorSpec(spec.n, spec.k, spec.l, alpha=spec.alpha * tv)
        lhs = value_batch(spec_t, tv * vals)
        rhs = tv ** (spec.k - spec.l) * base
        rels.append(_rel(np.abs(lhs - rhs), np.abs(lhs) + np.abs(rhs)))
    rel = np.stack(rels, axis=-1)
    return _identity_result("homogeneity", params, rel, tol)


def check_grad_sum_identity(params, samples, rng, tol) -> CheckResult:
    """sum_p dF/dlam_p = (n-1) sum_a dF/deta_a on admissible tuples."""
    spec = _spec(params)
    vals = sample_cone_batch("gamma_prime", spec, samples, rng)
    g_lam = grad_batch(spec, vals)
    g_eta = grad_eta_batch(spec, vals)
    lhs = g_lam.sum(axis=-1)
    rhs = (spec.n - 1) * g_eta.sum(axis=-1)
    scale = np.abs(g_lam).sum(axis=-1) + (spec.n - 1) * np.abs(g_eta).sum(axis=-1)
    rel = _rel(np.abs(lhs - rhs), scale)
    return _identity_result("grad_sum_identity", params, rel, tol)


# --- cone geometry --------------------------------------------------------


def check_cone_nesting(params, samples, rng, tol) -> CheckResult:
    """Nesting, convexity, and membership consistency of the cones."""
    n, k, alpha = params["n"], params["k"], params["alpha"]
    spec = _spec(params)
    bad = 0
    tilde = sample_cone_batch("gamma_tilde", spec, samples, rng, k=k)
    for j in range(1, k):  # nesting: each tilde cone contains the next
        bad += int((~gamma_tilde_mask(tilde, j, alpha)).sum())
    # plain cone sits inside its tilde companion
    plain = sample_cone_batch("gamma", spec, samples, rng, k=k)
    bad += int((~gamma_tilde_mask(plain, k, alpha)).sum())
    # definition cone membership implies the k-1 cone
    if k >= 2:
        bad += int((~gamma_mask(tilde, k - 1)).sum())
    # convexity at fixed alpha: midpoints of member pairs stay inside
    mid = 0.5 * (tilde + tilde[::-1])
    bad += int((~gamma_tilde_mask(mid, k, alpha)).sum())
    # transformed-cone consistency: lam in prime cone iff eta in tilde cone
    prime = sample_cone_batch("gamma_prime", spec, samples, rng, k=k)
    bad += int((~gamma_tilde_mask(eta_values(prime), k, alpha)).sum())
    return CheckResult(
        name="cone_nesting",
        params=params,
        samples=samples,
        failures=bad,
        worst_margin=float(bad),
        margin_kind="violations",
    )


# --- inequalities ---------------------------------------------------------


def _ineq_result(name, params, margin, tol, minima=None) -> CheckResult:
    worst = float(margin.min()) if margin.size else 0.0
    if margin.ndim > 1:
        fails = int((margin < -tol.ineq_floor).any(axis=tuple(range(1, margin.ndim))).sum())
    else:
        fails = int((margin < -tol.ineq_floor).sum())
    return CheckResult(
        name=name,
        params=params,
        samples=margin.shape[0],
        failures=fails,
        worst_margin=worst,
        margin_kind="min_margin",
        minima=minima or {},
    )


def check_maclaurin_chain(params, samples, rng, tol) -> CheckResult:
    """Binomial-normalized log-concavity of sigma on the positive cone."""
    n = params["n"]
    spec = OperatorSpec(n=n, k=n, l=0, alpha=0.0)
    vals = sample_cone_batch("gamma", spec, samples, rng, k=n)
    sig = sigma_upto(vals, n)
    norm = sig / np.array([comb(n, j) for j in range(n + 1)])
    lhs = norm[..., 1:-1] ** 2
    rhs = norm[..., :-2] * norm[..., 2:]
    margin = _rel(lhs - rhs, lhs + np.abs(rhs))
    return _ineq_result("maclaurin_chain", params, margin, tol)


def check_newton_pair(params, samples, rng, tol) -> CheckResult:
    """Paired-product inequalities on the admissible cone.

    For every 1 <= l < k the plain sigma form uses C(n, .) weights and
    the shifted S form uses C(n+1, .) weights.
    """
    n, k, alpha = params["n"], params["k"], params["alpha"]
    spec = _spec(params)
    vals = sample_cone_batch("gamma_tilde", spec, samples, rng, k=k)
    sig = sigma_upto(vals, k)
    s = np.stack([s_from_sigmas(sig, j, alpha) for j in range(k + 1)], axis=-1)
    cn = np.array([comb(n, j) for j in range(k + 1)])
    cm = np.array([comb(n + 1, j) for j in range(k + 1)])
    margins = []
    for ll in range(1, k):
        t1 = (sig[..., k - 1] / cn[k - 1]) * (sig[..., ll] / cn[ll])
        t2 = (sig[..., k] / cn[k]) * (sig[..., ll - 1] / cn[ll - 1])
        margins.append(_rel(t1 - t2, np.abs(t1) + np.abs(t2)))
        u1 = (s[..., k - 1] / cm[k - 1]) * (s[..., ll] / cm[ll])
        u2 = (s[..., k] / cm[k]) * (s[..., ll - 1] / cm[ll - 1])
        margins.append(_rel(u1 - u2, np.abs(u1) + np.abs(u2)))
    margin = np.stack(margins, axis=-1)
    return _ineq_result("newton_pair", params, margin, tol)


def check_quotient_monotone(params, samples, rng, tol) -> CheckResult:
    """(S_k/S_l)^(1/(k-l)) <= (S_p/S_q)^(1/(p-q)) for k>=p>q, l>=q."""
    n, k, l, alpha = params["n"], params["k"], params["l"], params["alpha"]
    spec = _spec(params)
    vals = sample_cone_batch("gamma_tilde", spec, samples, rng, k=k)
    sig = sigma_upto(vals, k)
    s = np.stack([s_from_sigmas(sig, j, alpha) for j in range(k + 1)], axis=-1)
    with np.errstate(invalid="ignore"):
        coarse = (s[..., k] / s[..., l]) ** (1.0 / (k - l))
    margins = []
    for q in range(0, l + 1):
        for p in range(q + 1, k + 1):
            if (p, q) == (k, l):
                continue
            fine = (s[..., p] / s[..., q]) ** (1.0 / (p - q))
            margins.append(_rel(fine - coarse, np.abs(fine) + np.abs(coarse)))
    if not margins:
        margin = np.zeros((samples, 1))
    else:
        margin = np.stack(margins, axis=-1)
    return _ineq_result("quotient_monotone", params, margin, tol)


def check_concavity_defect(params, samples, rng, tol) -> CheckResult:
    """Power-concavity defect along 10 random directions per sample."""
    spec = _spec(params)
    k, l = spec.k, spec.l
    vals = sample_cone_batch("gamma_prime", spec, samples, rng)
    F = value_batch(spec, vals)
    G = grad_batch(spec, vals)
    H = hess_batch(spec, vals)
    xi = rng.standard_normal((samples, 10, spec.n))
    quad = np.einsum("sdi,sij,sdj->sd", xi, H, xi)
    lin = np.einsum("sdi,si->sd", xi, G)
    rhs = (1.0 - 1.0 / (k - l)) * lin**2 / F[:, None]
    margin = _rel(rhs - quad, np.abs(rhs) + np.abs(quad))
    return _ineq_result("concavity_defect", params, margin, tol)


# --- exact orderings ------------------------------------------------------


def _ordering_result(name, params, samples, violations, minima=None) -> CheckResult:
    return CheckResult(
        name=name,
        params=params,
        samples=samples,
        failures=int(violations),
        worst_margin=float(violations),
        margin_kind="violations",
        minima=minima or {},
    )


def check_deleted_ordering(params, samples, rng, tol) -> CheckResult:
    """Deleted-tuple ordering on the admissible cone, entries ascending:

    deleting a larger entry gives a weakly smaller S_{k-1}(lam|i); the
    value after deleting the largest entry stays strictly positive, and
    so does the entry at depth k-1 from the top.
    """
    n, k, alpha = params["n"], params["k"], params["alpha"]
    spec = _spec(params)
    vals = np.sort(sample_cone_batch("gamma_tilde", spec, samples, rng, k=k), axis=-1)
    dsig = sigma_upto(deleted(vals), k - 1)
    ds = s_from_sigmas(dsig, k - 1, alpha)  # (samples, n), index = deleted entry
    bad = int((np.diff(ds, axis=-1) > 0).any(axis=-1).sum())
    bad += int((ds[:, -1] <= 0).sum())  # delete-largest value strictly positive
    bad += int((vals[:, n - k + 1] <= 0).sum())  # (k-1)-th from the top
    # reported constant: S_{k-1} after deleting the k-th largest entry,
    # measured against S_{k-1} of the full tuple
    sig = sigma_upto(vals, k - 1)
    s_full = s_from_sigmas(sig, k - 1, alpha)
    ratio = ds[:, n - k] / s_full
    return _ordering_result(
        "deleted_ordering",
        params,
        samples,
        bad,
        minima={"depth_k_ratio": float(ratio.min())},
    )


def check_eta_ordering(params, samples, rng, tol) -> CheckResult:
    """Ascending lam gives descending eta exactly; positivity at depth k-1."""
    n, k, alpha = params["n"], params["k"], params["alpha"]
    spec = _spec(params)
    vals = np.sort(sample_cone_batch("gamma_prime", spec, samples, rng, k=k), axis=-1)
    eta = eta_values(vals)
    bad = int((np.diff(eta, axis=-1) > 0).any(axis=-1).sum())
    if k >= 2:
        bad += int((eta[:, k - 2] <= 0).sum())
    return _ordering_result("eta_ordering", params, samples, bad)


def check_grad_ordering(params, samples, rng, tol) -> CheckResult:
    """Gradient orderings for k < n on sorted admissible tuples.

    With lam ascending (eta descending), the eta-gradient components are
    weakly increasing along the tuple and the lam-gradient components
    weakly decreasing.
    """
    spec = _spec(params)
    if spec.k >= spec.n:
        raise ConfigurationError("gradient ordering requires k < n")
    vals = np.sort(sample_cone_batch("gamma_prime", spec, samples, rng), axis=-1)
    g_eta = grad_eta_batch(spec, vals)
    g_lam = grad_batch(spec, vals)
    bad = int((np.diff(g_eta, axis=-1) < 0).any(axis=-1).sum())
    bad += int((np.diff(g_lam, axis=-1) > 0).any(axis=-1).sum())
    return _ordering_result("grad_ordering", params, samples, bad)


def check_grad_bounds(params, samples, rng, tol) -> CheckResult:
    """Strict positivity of gradient shares for k < n, minima reported."""
    spec = _spec(params)
    if spec.k >= spec.n:
        raise ConfigurationError("gradient bounds require k < n")
    vals = sample_cone_batch("gamma_prime", spec, samples, rng)
    g = grad_batch(spec, vals)
    F = value_batch(spec, vals)
    total = g.sum(axis=-1)
    share = g.min(axis=-1) / total
    power = F ** (1.0 - 1.0 / (spec.k - spec.l))
    ratio = total / power
    bad = int((share <= 0).sum()) + int((ratio <= 0).sum())
    return _ordering_result(
        "grad_bounds",
        params,
        samples,
        bad,
        minima={
            "component_share": float(share.min()),
            "sum_vs_power": float(ratio.min()),
        },
    )


# --- finite-difference cross checks --------------------------------------


def _fd_filter(spec, vals):
    """Keep samples whose denominator stays safely positive under FD steps."""
    eta = eta_values(vals)
    sig = sigma_upto(eta, spec.l)
    denom = s_from_sigmas(sig, spec.l, spec.alpha)
    floor = 1e-6 * (1.0 + np.abs(eta).max(axis=-1) ** max(spec.l, 1))
    return vals[denom > floor]


def check_derivative_fd(params, samples, rng, tol) -> CheckResult:
    """Gradient and Hessian against central differences of the value map."""
    spec = _spec(params)
    n = spec.n
    vals = _fd_filter(spec, sample_cone_batch("gamma_prime", spec, 2 * samples, rng))
    vals = vals[:samples]
    m = vals.shape[0]
    scale = np.maximum(1.0, np.abs(vals).max(axis=-1, keepdims=True))
    G = grad_batch(spec, vals)
    H = hess_batch(spec, vals)

    hg = 1e-5 * scale
    fd_g = np.empty_like(G)
    fd_h = np.empty_like(H)
    for a in range(n):
        e = np.zeros(n)
        e[a] = 1.0
        fp = value_batch(spec, vals + hg * e)
        fm = value_batch(spec, vals - hg * e)
        fd_g[:, a] = (fp - fm) / (2.0 * hg[:, 0])
        # column a of the Hessian by differencing the verified gradient at
        # the same step; differencing the value needs a much larger step
        # for the same accuracy, which k = n quotients cannot afford
        gp = grad_batch(spec, vals + hg * e)
        gm = grad_batch(spec, vals - hg * e)
        fd_h[:, :, a] = (gp - gm) / (2.0 * hg)
    rel_g = np.abs(fd_g - G).max(axis=-1) / np.maximum(
        np.abs(G).max(axis=-1), _TINY
    )
    # floor the scale at gradient magnitude per unit length so the
    # exactly-linear (k, l) = (1, 0) map (zero Hessian) stays testable
    hnorm = np.abs(H).max(axis=(-2, -1))
    floor = 1e-2 * np.abs(G).max(axis=-1) / scale[:, 0]
    rel_h = np.abs(fd_h - H).max(axis=(-2, -1)) / np.maximum(
        np.maximum(hnorm, floor), _TINY
    )

    rel = np.stack([rel_g, rel_h], axis=-1)
    res = _identity_result("derivative_fd", params, rel, tol)
    res.failures = int(((rel_g > tol.fd_rel) | (rel_h > tol.fd_rel)).sum())
    res.samples = m
    return res


def _random_frames(rng, m, n):
    """Deterministic batch of orthogonal matrices via sign-fixed QR."""
    g = rng.standard_normal((m, n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.einsum("mii->mi", r))
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def _matrix_fd_check(params, samples, rng, tol, degenerate: bool) -> CheckResult:
    spec = _spec(params)
    n = spec.n
    lam = _fd_filter(spec, sample_cone_batch("gamma_prime", spec, 4 * samples, rng))
    if not degenerate:
        gaps = np.diff(np.sort(lam, axis=-1), axis=-1).min(axis=-1)
        lam = lam[gaps > 1e-2 * (1.0 + np.abs(lam).max(axis=-1))]
    lam = lam[:samples]
    m = lam.shape[0]
    if degenerate and n >= 2:
        lam = np.sort(lam, axis=-1)
        lam[:, 1] = lam[:, 0]  # exact repeat injected before assembling the matrix
        keep = gamma_prime_mask(lam, spec.k, spec.alpha)
        lam = lam[keep]
        m = lam.shape[0]
    q = _random_frames(rng, m, n)
    mats = np.einsum("mip,mp,mjp->mij", q, lam, q)
    mats = 0.5 * (mats + np.swapaxes(mats, -1, -2))
    ndir = 4  # several directions per sample: the quadratic form crosses
    # zero on single random directions, so the error is measured against
    # the largest curvature any direction sees
    dirs = rng.standard_normal((m, ndir, n, n))
    dirs = 0.5 * (dirs + np.swapaxes(dirs, -1, -2))
    dirs /= np.abs(dirs).max(axis=(-2, -1))[:, :, None, None]

    # step proportional to the spectral radius: the map is homogeneous, so
    # a proportional step keeps the relative stencil error scale-invariant
    # (an additive floor would hand tiny spectra a relatively huge step)
    h = 3e-4 * (1e-8 + np.abs(lam).max(axis=-1))

    def phi(ts):
        pts = (
            mats[None, :, None]
            + ts[:, None, None, None, None] * h[None, :, None, None, None] * dirs[None]
        )
        w, _ = jacobi_eigh(pts.reshape(-1, n, n))
        return value_batch(spec, w).reshape(len(ts), m, ndir)

    wm, vm = jacobi_eigh(mats)
    analytic = second_derivative_forms_from_frame(
        spec, wm, vm, h[:, None, None, None] * dirs, 1.0
    )
    ts = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])

    def stencil(vals):
        return (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / 12.0

    # two stencils and one Richardson step: the h^4 truncation term is
    # eliminated, so samples near the cone boundary (large higher
    # derivatives) still measure the quadratic form to roundoff levels
    full = stencil(phi(ts))
    half = stencil(phi(0.5 * ts))
    fd = (16.0 * half * 4.0 - full) / 15.0
    lim = tol.fd_degenerate if degenerate else tol.fd_rel
    # curvature floor: (k,l)=(1,0) is an affine map of the matrix, so the
    # quadratic form vanishes identically and only an absolute comparison
    # against the gradient scale is meaningful
    gscale = np.abs(grad_batch(spec, lam)).max(axis=-1)
    floor = 1e-2 * h * gscale
    scale = np.maximum(np.abs(analytic).max(axis=-1), np.maximum(floor, _TINY))
    rel = np.abs(fd - analytic).max(axis=-1) / scale
    name = "degenerate_spectrum" if degenerate else "matrix_second_derivative"
    res = _identity_result(name, params, rel, tol)
    res.failures = int((rel > lim).sum())
    res.samples = m
    return res


def check_matrix_second_derivative(params, samples, rng, tol) -> CheckResult:
    """Analytic second derivative of the matrix map vs central FD."""
    return _matrix_fd_check(params, samples, rng, tol, degenerate=False)


def check_degenerate_spectrum(params, samples, rng, tol) -> CheckResult:
    """Divided-difference limit path exercised by exactly repeated eigenvalues."""
    return _matrix_fd_check(params, samples, rng, tol, degenerate=True)


def check_concavity_transfer(params, samples, rng, tol) -> CheckResult:
    """Matrix-level concavity: the quadratic form of F**(1/(k-l)) is <= 0.

    The lam-space defect bound promotes to the full matrix map, so the
    second derivative along every symmetric direction stays nonpositive
    on admissible spectra.
    """
    spec = _spec(params)
    n = spec.n
    lam = sample_cone_batch("gamma_prime", spec, samples, rng)
    m = lam.shape[0]
    q = _random_frames(rng, m, n)
    mats = np.einsum("mip,mp,mjp->mij", q, lam, q)
    mats = 0.5 * (mats + np.swapaxes(mats, -1, -2))
    ndir = 10
    dirs = rng.standard_normal((m, ndir, n, n))
    dirs = 0.5 * (dirs + np.swapaxes(dirs, -1, -2))
    dirs /= np.abs(dirs).max(axis=(-2, -1))[:, :, None, None]
    w, V = jacobi_eigh(mats)
    exponent = 1.0 / (spec.k - spec.l)
    form = second_derivative_forms_from_frame(spec, w, V, dirs, exponent)
    # curvature scale: the power value per squared spectral radius keeps
    # the margin meaningful when the form is identically zero (k-l = 1
    # with an affine numerator)
    gval = value_batch(spec, lam) ** exponent
    curv = (gval / (1.0 + np.abs(lam).max(axis=-1)) ** 2)[:, None]
    margin = _rel(-form, np.abs(form) + curv)
    return _ineq_result("concavity_transfer", params, margin, tol)


# --- registry and driver --------------------------------------------------

# name -> (fn, grid kind, sample scale, param filter)
CHECKS = {
    "split_identity": (check_split_identity, "nka", 1.0, None),
    "deleted_sum_identity": (check_deleted_sum_identity, "nka", 1.0, None),
    "weighted_sum_identity": (check_weighted_sum_identity, "nka", 1.0, None),
    "eta_transform": (check_eta_transform, "n", 1.0, None),
    "cone_nesting": (check_cone_nesting, "nka", 1.0, None),
    "maclaurin_chain": (check_maclaurin_chain, "n", 1.0, None),
    "newton_pair": (check_newton_pair, "nka", 1.0, lambda p: p["k"] >= 2),
    "quotient_monotone": (check_quotient_monotone, "nkla", 1.0, None),
    "concavity_defect": (check_concavity_defect, "nkla", 1.0, None),
    "deleted_ordering": (check_deleted_ordering, "nka", 1.0, lambda p: p["k"] >= 2),
    "eta_ordering": (check_eta_ordering, "nka", 1.0, None),
    "grad_ordering": (check_grad_ordering, "nkla", 1.0, lambda p: p["k"] < p["n"]),
    "grad_bounds": (check_grad_bounds, "nkla", 1.0, lambda p: p["k"] < p["n"]),
    "grad_sum_identity": (check_grad_sum_identity, "nkla", 1.0, None),
    "homogeneity": (check_homogeneity, "nkla", 1.0, None),
    "derivative_fd": (check_derivative_fd, "nkla", 0.1, None),
    "matrix_second_derivative": (
        check_matrix_second_derivative,
        "nkla",
        0.1,
        None,
    ),
    "degenerate_spectrum": (check_degenerate_spectrum, "nkla", 0.1, None),
    "concavity_transfer": (check_concavity_transfer, "nkla", 0.1, None),
}


def check_names() -> list:
    return sorted(CHECKS)


def _iter_params(kind: str, grid: SweepGrid):
    for n in grid.ns:
        if kind == "n":
            yield {"n": n}
        elif kind == "nka":
            for k in range(1, n + 1):
                for a in grid.alphas:
                    yield {"n": n, "k": k, "alpha": a}
        elif kind == "nkla":
            for k in range(1, n + 1):
                for l in range(0, k):
                    for a in grid.alphas:
                        yield {"n": n, "k": k, "l": l, "alpha": a}
        else:  # pragma: no cover - registry is static
            raise ConfigurationError(f"unknown grid kind {kind!r}")


def _derive_seed(base_seed: int, name: str, params: dict) -> int:
    tag = "|".join(
        [name] + [f"{key}={params[key]!r}" for key in sorted(params)]
    ).encode()
    return (int(base_seed) * 0x9E3779B1 + zlib.crc32(tag)) % (2**63)


def run_check(
    name: str,
    params: dict,
    samples: int,
    base_seed: int,
    tol: Tolerances | None = None,
) -> CheckResult:
    """Run one named check at one parameter point."""
    if name not in CHECKS:
        raise ConfigurationError(
            f"unknown check {name!r}; known: {', '.join(check_names())}"
        )
    fn, _, _, _ = CHECKS[name]
    rng = np.random.default_rng(_derive_seed(base_seed, name, params))
    return fn(params, samples, rng, tol or Tolerances())


def run_sweep(
    samples: int = 10_000,
    seed: int = 0,
    grid: SweepGrid | None = None,
    names: list | None = None,
    tol: Tolerances | None = None,
) -> list:
    """Run the registry over the grid; results sorted by (name, params)."""
    grid = grid or SweepGrid()
    tol = tol or Tolerances()
    if names is None:
        names = check_names()
    results = []
    for name in sorted(names):
        if name not in CHECKS:
            raise ConfigurationError(
                f"unknown check {name!r}; known: {', '.join(check_names())}"
            )
        fn, kind, scale, keep = CHECKS[name]
        count = max(4, int(round(samples * scale)))
        for params in _iter_params(kind, grid):
            if keep is not None and not keep(params):
                continue
            rng = np.random.default_rng(_derive_seed(seed, name, params))
            results.append(fn(params, count, rng, tol))
    results.sort(key=lambda r: (r.name, sorted(r.params.items()).__repr__()))
    return results
