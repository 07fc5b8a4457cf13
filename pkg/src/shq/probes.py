"""Interior-estimate probes over grid solutions.

Two auxiliary scalar fields are evaluated on a solved grid:

* the weighted largest-Hessian-eigenvalue field
  phi = (1 - |x|^2) * (1 - |Du|^2/(2A))^(-1/3) * lambda_max,
  whose supremum controls interior second-derivative bounds on the unit
  ball, together with the ratio |D^2 u(0)| / (1 + sup|Du|);

* the log-composite
  P = beta*log(-u) + log(lambda_max) + (a/2)|Du|^2 + (A/2)|x|^2,
  whose interior maximum drives bounds on (-u)^beta * lambda_max for
  solutions negative inside the domain.

Suprema exclude nodes within one stencil-width of the boundary: the
estimates are interior statements and one-sided contamination would
pollute them.  Reports serialize to a flat key-value record and to CSV
rows, one row per mesh per beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AdmissibilityError,
    ConfigurationError,
    InputDomainError,
    MaximumPrincipleError,
)
from .solver import DomainSpec, GridSolution, discretize

__all__ = [
    "InteriorProbeConfig",
    "PogorelovProbeConfig",
    "EstimateReport",
    "interior_probe",
    "pogorelov_probe",
    "rescale_to_unit_ball",
    "merge_reports",
]

_BETA_SWEEP = (1.0, 1.5, 2.0, 3.0, 5.0)


@dataclass(frozen=True)
class InteriorProbeConfig:
    """Cap A = sup|Du|^2 entering the weight (1 - t/A)^(-1/3), t=|Du|^2/2."""

    A_cap: float

    def __post_init__(self):
        if not self.A_cap > 0:
            raise ConfigurationError("A_cap must be positive")


@dataclass(frozen=True)
class PogorelovProbeConfig:
    beta: float = 1.0
    a: float = 1.0
    A: float = 1.0
    sweep: tuple = _BETA_SWEEP

    def __post_init__(self):
        if not (self.beta >= 1.0 and self.a > 0 and self.A > 0):
            raise ConfigurationError("beta must be >= 1 and a, A positive")


@dataclass
class EstimateReport:
    """Empirical constants from a probe; unused fields stay None.

    ``mesh_sequence`` holds (h, headline-value) pairs, strictly monotone
    decreasing in h once reports over refinements are merged.
    """

    kind: str
    sup_phi: float | None = None
    c2_at_origin: float | None = None
    interior_bound_ratio: float | None = None
    sup_pogorelov: dict | None = None  # beta -> sup (-u)^beta lambda_max
    argmax: tuple | None = None  # coordinates of the probe maximizer
    argmax_is_deep: bool | None = None
    mesh_sequence: list = field(default_factory=list)

    def __post_init__(self):
        for v in (self.sup_phi, self.c2_at_origin, self.interior_bound_ratio):
            if v is not None and not np.isfinite(v):
                raise ConfigurationError("probe report values must be finite")
        if self.sup_pogorelov is not None:
            if not all(np.isfinite(v) for v in self.sup_pogorelov.values()):
                raise ConfigurationError("probe report values must be finite")
        hs = [h for h, _ in self.mesh_sequence]
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise ConfigurationError("mesh_sequence must be monotone in h")

    def to_kv(self) -> str:
        lines = [f"kind {self.kind}"]
        for key in ("sup_phi", "c2_at_origin", "interior_bound_ratio"):
            v = getattr(self, key)
            if v is not None:
                lines.append(f"{key} {v!r}")
        if self.sup_pogorelov is not None:
            for b in sorted(self.sup_pogorelov):
                lines.append(f"sup_pogorelov@{b!r} {self.sup_pogorelov[b]!r}")
        if self.argmax is not None:
            lines.append("argmax " + ",".join(repr(c) for c in self.argmax))
            lines.append(f"argmax_is_deep {int(bool(self.argmax_is_deep))}")
        for h, v in self.mesh_sequence:
            lines.append(f"mesh {h!r} {v!r}")
        return "\n".join(lines) + "\n"

    def to_csv_rows(self) -> list:
        rows = []
        betas = sorted(self.sup_pogorelov) if self.sup_pogorelov else [None]
        for h, v in self.mesh_sequence or [(None, None)]:
            for b in betas:
                rows.append(
                    {
                        "kind": self.kind,
                        "h": h,
                        "beta": b,
                        "sup_at_beta": None if b is None else self.sup_pogorelov[b],
                        "headline": v,
                        "sup_phi": self.sup_phi,
                        "c2_at_origin": self.c2_at_origin,
                        "interior_bound_ratio": self.interior_bound_ratio,
                    }
                )
        return rows


def _require_admissible(sol: GridSolution):
    if not sol.admissible:
        raise AdmissibilityError("probe requires an admissible solution")


def _deep_values(sol: GridSolution):
    deep = sol.grid.deep
    if not deep.any():
        raise InputDomainError("grid has no nodes beyond one stencil-width")
    return deep


def interior_probe(
    sol: GridSolution, cfg: InteriorProbeConfig | None = None
) -> EstimateReport:
    """Evaluate the weighted lambda_max field on the unit ball.

    Uses A_cap = sup|Du|^2 when no config is given, so the weight stays
    finite automatically; a user-supplied smaller cap is rejected the
    moment |Du|^2/2 reaches it.
    """
    _require_admissible(sol)
    dom = sol.grid.domain
    if dom.kind != "ball" or abs(dom.radius - 1.0) > 1e-12:
        raise InputDomainError(
            "interior probe runs on the unit ball; rescale_to_unit_ball first"
        )
    du_sq = np.sum(sol.du**2, axis=1)
    if cfg is None:
        cfg = InteriorProbeConfig(A_cap=float(du_sq.max()))
    t = du_sq / 2.0
    if np.any(t >= cfg.A_cap):
        raise ConfigurationError("|Du|^2/2 reaches A_cap; weight undefined")
    lam_max = sol.eigvals[:, -1]
    xi = sol.grid.xi
    rho = 1.0 - np.sum(xi**2, axis=1)
    phi = rho * (1.0 - t / cfg.A_cap) ** (-1.0 / 3.0) * lam_max

    deep = _deep_values(sol)
    which = int(np.argmax(np.where(deep, phi, -np.inf)))
    sup_phi = float(phi[which])

    o = sol.grid.origin_ord
    if o < 0:
        raise InputDomainError("origin is not an interior node")
    c2 = float(np.abs(sol.eigvals[o]).max())
    ratio = c2 / (1.0 + float(np.sqrt(du_sq.max())))
    return EstimateReport(
        kind="interior",
        sup_phi=sup_phi,
        c2_at_origin=c2,
        interior_bound_ratio=ratio,
        argmax=tuple(float(c) for c in xi[which]),
        argmax_is_deep=True,
        mesh_sequence=[(float(sol.grid.h[0]), sup_phi)],
    )


def pogorelov_probe(
    sol: GridSolution, cfg: PogorelovProbeConfig | None = None
) -> EstimateReport:
    """Sweep sup (-u)^beta * lambda_max and locate the maximum of P."""
    _require_admissible(sol)
    if cfg is None:
        cfg = PogorelovProbeConfig()
    grid = sol.grid
    ui = sol.u[grid.interior]
    if np.any(ui >= 0):
        raise MaximumPrincipleError(
            "solution is not negative at every interior node"
        )
    neg_u = -ui
    lam_max = sol.eigvals[:, -1]
    deep = _deep_values(sol)

    betas = sorted(set(_BETA_SWEEP) | set(cfg.sweep) | {1.0, cfg.beta})
    sweep = {
        float(b): float(np.max(np.where(deep, neg_u**b * lam_max, -np.inf)))
        for b in betas
    }

    du_sq = np.sum(sol.du**2, axis=1)
    xi = grid.xi
    with np.errstate(divide="ignore", invalid="ignore"):
        p_field = np.where(
            lam_max > 0,
            cfg.beta * np.log(neg_u)
            + np.log(np.maximum(lam_max, np.finfo(float).tiny))
            + (cfg.a / 2.0) * du_sq
            + (cfg.A / 2.0) * np.sum(xi**2, axis=1),
            -np.inf,
        )
    which = int(np.argmax(p_field))
    return EstimateReport(
        kind="pogorelov",
        sup_pogorelov=sweep,
        argmax=tuple(float(c) for c in xi[which]),
        argmax_is_deep=bool(deep[which]),
        mesh_sequence=[(float(grid.h[0]), sweep[float(cfg.beta)])],
    )


def rescale_to_unit_ball(sol: GridSolution) -> GridSolution:
    """Map u on a ball of radius R to u(Rx)/R^2 on the unit ball.

    The rescaling leaves the Hessian spectrum at corresponding nodes
    exactly unchanged (finite differences scale the same way as the
    continuum derivatives), so admissibility carries over.
    """
    dom = sol.grid.domain
    if dom.kind != "ball":
        raise InputDomainError("rescaling is defined for ball domains")
    R = dom.radius
    if abs(R - 1.0) <= 1e-12:
        return sol
    unit = DomainSpec(kind="ball", n=dom.n, mesh=dom.mesh, size=1.0)
    grid = discretize(unit)
    return GridSolution(grid, sol.spec, sol.u / R**2)


def merge_reports(reports: list) -> EstimateReport:
    """Stack per-mesh reports into one, ordered coarse-to-fine.

    Scalar fields come from the finest mesh; the mesh_sequence holds one
    (h, headline) pair per input and must end up strictly decreasing.
    """
    if not reports:
        raise ConfigurationError("no reports to merge")
    if len({r.kind for r in reports}) != 1:
        raise ConfigurationError("cannot merge reports of different kinds")
    ordered = sorted(reports, key=lambda r: -r.mesh_sequence[0][0])
    seq = [r.mesh_sequence[0] for r in ordered]
    fine = ordered[-1]
    return EstimateReport(
        kind=fine.kind,
        sup_phi=fine.sup_phi,
        c2_at_origin=fine.c2_at_origin,
        interior_bound_ratio=fine.interior_bound_ratio,
        sup_pogorelov=fine.sup_pogorelov,
        argmax=fine.argmax,
        argmax_is_deep=fine.argmax_is_deep,
        mesh_sequence=seq,
    )
