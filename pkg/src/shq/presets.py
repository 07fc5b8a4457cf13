"""Manufactured solutions and stock right-hand sides for solver runs.

The quadratic case is stencil-exact: central differences reproduce a
constant Hessian to rounding, so the solver recovers it to machine
precision.  The radial quartic has genuine O(h^2) truncation error and
drives convergence-order measurements.  Both carry exact boundary data
and the exact field for error norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quotient import ratio_value
from .solver import DomainSpec, RHSSpec
from .symfunc import OperatorSpec

__all__ = [
    "ManufacturedCase",
    "seed_constant",
    "quadratic_case",
    "radial_quartic_case",
    "constant_rhs",
    "bump_rhs",
]


@dataclass
class ManufacturedCase:
    """A right-hand side with the exact solution it was built from."""

    name: str
    rhs: RHSSpec
    boundary: Callable  # Dirichlet data = exact solution on boundary nodes
    exact: Callable  # exact u at arbitrary coordinates


def seed_constant(spec: OperatorSpec) -> float:
    """F at the quadratic seed: D^2 u = I gives the constant tuple n-1."""
    return float(ratio_value(spec, np.full(spec.n, float(spec.n - 1))))


def _zero_fu(x, u, du):
    return np.zeros(len(x))


def _zero_fp(x, u, du):
    return np.zeros_like(du)


def constant_rhs(value: float) -> RHSSpec:
    if not value > 0:
        raise ValueError("right-hand side constant must be positive")

    def f(x, u, du):
        return np.full(len(x), float(value))

    return RHSSpec(f=f, fu=_zero_fu, fp=_zero_fp, bounds=(value, value))


def bump_rhs(spec: OperatorSpec, amplitude: float = 0.25) -> RHSSpec:
    """A positive radial bump around the seed constant, f depending on x only."""
    c0 = seed_constant(spec)
    if not -1.0 < amplitude:
        raise ValueError("amplitude must keep f positive")

    def f(x, u, du):
        return c0 * (1.0 + amplitude * np.exp(-2.0 * np.sum(x**2, axis=1)))

    lo, hi = c0 * min(1.0, 1.0 + amplitude), c0 * max(1.0, 1.0 + amplitude)
    return RHSSpec(f=f, fu=_zero_fu, fp=_zero_fp, bounds=(lo, hi))


def quadratic_case(spec: OperatorSpec, domain: DomainSpec) -> ManufacturedCase:
    """u = (|x|^2 - R^2)/2, constant right-hand side; stencil-exact."""
    r2 = domain.radius**2
    value = seed_constant(spec)

    def exact(x):
        return 0.5 * (np.sum(np.asarray(x) ** 2, axis=-1) - r2)

    return ManufacturedCase(
        name="quadratic",
        rhs=constant_rhs(value),
        boundary=exact,
        exact=exact,
    )


def radial_quartic_case(spec: OperatorSpec, domain: DomainSpec) -> ManufacturedCase:
    """u = (r^2 - R^2)/2 + (r^4 - R^4)/8, a smooth non-constant radial f.

    The Hessian is (1 + r^2/2) I + x x^T, with radial eigenvalue
    1 + 3 r^2/2 and tangential 1 + r^2/2, so the transformed tuple is
    eta_rad = (n-1)(1 + r^2/2) and eta_tan = (n-1) + (n+1) r^2/2 with
    multiplicity n-1 — everywhere positive, hence admissible for all k.
    """
    n = spec.n
    r2cap = domain.radius**2
    r4cap = r2cap**2

    def exact(x):
        rr = np.sum(np.asarray(x) ** 2, axis=-1)
        return 0.5 * (rr - r2cap) + 0.125 * (rr**2 - r4cap)

    def f(x, u, du):
        rr = np.sum(x**2, axis=1)
        eta = np.empty((len(x), n))
        eta[:, 0] = (n - 1) * (1.0 + rr / 2.0)
        eta[:, 1:] = ((n - 1) + (n + 1) * rr[:, None] / 2.0)
        return ratio_value(spec, eta)

    return ManufacturedCase(
        name="radial_quartic",
        rhs=RHSSpec(f=f, fu=_zero_fu, fp=_zero_fp),
        boundary=exact,
        exact=exact,
    )
