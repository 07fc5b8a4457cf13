"""Garding cones, the eta-transform, and cone samplers.

Cones of symmetric-function positivity:

    Gamma_k       = { lam : sigma_m(lam) > 0 for m = 1..k }
    GammaTilde_k  = Gamma_{k-1}  intersect  { lam : S_k(lam) > 0 }

with GammaTilde_1 cut out of all of R^n (Gamma_0 is everything).  The
eta-transform sends lam to the spectrum of (trace lam) I - diag(lam):

    eta_i = sum_{j != i} lam_j.

Admissibility for the quotient operator comes in two inequivalent-looking
forms and both are exposed: the definition form asks sigma_m(eta) > 0 for
m = 1..k, the tilde form asks eta in GammaTilde_k.  The solver and the
sampler use the tilde form.

Membership is strict with zero tolerance; callers who need to stay away
from the boundary must perturb their own inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, SamplingExhaustedError
from .symfunc import EigenTuple, OperatorSpec, s_from_sigmas, sigma_upto, values_of

__all__ = [
    "EtaTuple",
    "ConeSample",
    "CONE_IDS",
    "eta_values",
    "eta_from_lambda",
    "gamma_mask",
    "gamma_tilde_mask",
    "gamma_prime_mask",
    "in_gamma",
    "in_gamma_tilde",
    "in_gamma_prime",
    "sample_cone",
    "sample_cone_batch",
]

CONE_IDS = ("gamma", "gamma_tilde", "gamma_prime")

# shift budget: the diagonal shift doubles at most this many times
_MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class EtaTuple:
    """The eta-transform of a source tuple, kept together with its source."""

    values: np.ndarray
    source: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ConeSample:
    """A sampled tuple together with the cone it was drawn into."""

    lam: EigenTuple
    cone_id: str
    seed: int


def eta_values(vals: np.ndarray) -> np.ndarray:
    """Row sums of (sigma_1 I - diag): eta_i = sigma_1(lam) - lam_i, last axis."""
    vals = np.asarray(vals, dtype=float)
    return vals.sum(axis=-1, keepdims=True) - vals


def eta_from_lambda(lam) -> EtaTuple:
    """Eta-transform of a single tuple.

    If lam is sorted descending the result is ascending: both use the
    same minuend, so the order simply reverses.
    """
    vals = values_of(lam)
    if vals.ndim != 1:
        raise InputDomainError("eta_from_lambda expects a single tuple")
    return EtaTuple(values=eta_values(vals), source=vals.copy())


def gamma_mask(vals: np.ndarray, k: int) -> np.ndarray:
    """Gamma_k membership along the last axis (strict, zero tolerance)."""
    vals = np.asarray(vals, dtype=float)
    n = vals.shape[-1]
    if k < 0 or k > n:
        raise InputDomainError(f"cone index {k} out of range for n={n}")
    if k == 0:
        return np.ones(vals.shape[:-1], dtype=bool)
    sig = sigma_upto(vals, k)
    return np.all(sig[..., 1 : k + 1] > 0.0, axis=-1)


def gamma_tilde_mask(vals: np.ndarray, k: int, alpha: float) -> np.ndarray:
    """GammaTilde_k membership: Gamma_{k-1} and S_k > 0."""
    vals = np.asarray(vals, dtype=float)
    n = vals.shape[-1]
    if k < 1 or k > n:
        raise InputDomainError(f"cone index {k} out of range for n={n}")
    sig = sigma_upto(vals, k)
    ok = np.all(sig[..., 1:k] > 0.0, axis=-1)
    return ok & (s_from_sigmas(sig, k, alpha) > 0.0)


def gamma_prime_mask(
    vals: np.ndarray, k: int, alpha: float, form: str = "tilde"
) -> np.ndarray:
    """Admissibility of lam through its eta-transform.

    form="definition" checks sigma_m(eta) > 0 for m = 1..k; form="tilde"
    checks eta in GammaTilde_k.
    """
    eta = eta_values(vals)
    if form == "tilde":
        return gamma_tilde_mask(eta, k, alpha)
    if form == "definition":
        return gamma_mask(eta, k)
    raise InputDomainError(f"unknown admissibility form {form!r}")


def in_gamma(k: int, lam) -> bool:
    """Strict Gamma_k membership of a single tuple."""
    return bool(gamma_mask(values_of(lam), k))


def in_gamma_tilde(k: int, spec: OperatorSpec, lam) -> bool:
    """Strict GammaTilde_k membership of a single tuple (alpha from spec)."""
    return bool(gamma_tilde_mask(values_of(lam), k, spec.alpha))


def in_gamma_prime(k: int, spec: OperatorSpec, lam, form: str = "tilde") -> bool:
    """Admissibility of a single tuple through its eta-transform."""
    return bool(gamma_prime_mask(values_of(lam), k, spec.alpha, form=form))


def _cone_mask(vals: np.ndarray, cone_id: str, k: int, alpha: float) -> np.ndarray:
    if cone_id == "gamma":
        return gamma_mask(vals, k)
    if cone_id == "gamma_tilde":
        return gamma_tilde_mask(vals, k, alpha)
    if cone_id == "gamma_prime":
        return gamma_prime_mask(vals, k, alpha, form="tilde")
    raise InputDomainError(f"unknown cone id {cone_id!r}, expected one of {CONE_IDS}")


def sample_cone_batch(
    cone_id: str,
    spec: OperatorSpec,
    count: int,
    rng: np.random.Generator,
    k: int | None = None,
) -> np.ndarray:
    """Draw ``count`` tuples strictly inside a cone, shape (count, n).

    Standard normal draws are shifted along the diagonal direction
    (1, ..., 1), doubling the shift until membership holds.  Every cone
    here contains the positive diagonal ray, so the walk terminates; a
    row that is still outside after the shift budget raises.
    """
    k = spec.k if k is None else k
    vals = rng.standard_normal((count, spec.n))
    mask = _cone_mask(vals, cone_id, k, spec.alpha)
    t = 1.0
    for _ in range(_MAX_DOUBLINGS):
        if mask.all():
            break
        pending = ~mask
        shifted = vals[pending] + t
        inside = _cone_mask(shifted, cone_id, k, spec.alpha)
        rows = np.flatnonzero(pending)[inside]
        vals[rows] = shifted[inside]
        mask[rows] = True
        t *= 2.0
    if not mask.all():
        raise SamplingExhaustedError(
            f"{int((~mask).sum())} of {count} draws missed {cone_id} after "
            f"{_MAX_DOUBLINGS} doublings"
        )
    return vals


def sample_cone(cone_id: str, spec: OperatorSpec, seed: int) -> ConeSample:
    """Deterministic single draw strictly inside the requested cone."""
    rng = np.random.default_rng(seed)
    vals = sample_cone_batch(cone_id, spec, 1, rng)[0]
    return ConeSample(lam=EigenTuple(values=vals), cone_id=cone_id, seed=seed)
