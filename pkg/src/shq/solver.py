"""Finite-difference Dirichlet solver with damped Newton and continuation.

The PDE is F(U[D^2 u]) = f(x, u, Du) on a box or on a ball handled by a
lattice mask, with Dirichlet data on the boundary nodes (zero for the
native problem; manufactured runs may impose the exact solution).  All
second derivatives use second-order central stencils, mixed terms the
4-point cross, and the per-node Hessian is symmetric by construction.

Newton linearizes through the matrix gradient F^{ij}: the update solves

    sum_{ij} F^{ij} d_i d_j  v - (df/du) v - (df/dp) . Dv = -(F - f)

on interior nodes, then the step is damped (halved) until the trial
iterate is admissible at every interior node and the max-norm residual
satisfies an Armijo decrease.  Continuation walks f from the constant
induced by the quadratic seed u0 = (|x|^2 - R^2)/2 to the target,
morphing boundary data along the same parameter, doubling the step on
success and halving it on failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from hashlib import sha256
from typing import Callable

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from .cones import eta_values, gamma_tilde_mask
from .errors import (
    AdmissibilityError,
    ConfigurationError,
    CorruptInputError,
    InputDomainError,
    NoConvergenceError,
    OutsideDomainError,
)
from .matrixcalc import SymmetricField, jacobi_eigh, matrix_grad_from_frame
from .quotient import ratio_value
from .symfunc import OperatorSpec

__all__ = [
    "DomainSpec",
    "RHSSpec",
    "SolveOptions",
    "Grid",
    "GridSolution",
    "discretize",
    "newton_step",
    "solve",
    "save_snapshot",
    "load_snapshot",
]

_ARMIJO = 1e-4
_MIN_STEP = 2.0**-30


@dataclass(frozen=True)
class DomainSpec:
    """A ball or box domain sampled on a uniform lattice.

    ``size`` is the radius for a ball, a half-width (or per-axis tuple of
    half-widths) for a box.  ``mesh`` counts points per axis including
    the outer layer and must be odd so the origin is a node.
    """

    kind: str
    n: int
    mesh: int
    size: float | tuple = 1.0

    def __post_init__(self):
        if self.kind not in ("ball", "box"):
            raise ConfigurationError(f"unknown domain kind {self.kind!r}")
        if self.n not in (2, 3):
            raise ConfigurationError("grid dimension must be 2 or 3")
        if self.mesh < 9:
            raise ConfigurationError("mesh must have at least 9 points per axis")
        if self.mesh % 2 == 0:
            raise ConfigurationError("mesh must be odd so the origin is a node")
        hw = self.half_widths
        if hw.shape != (self.n,) or not np.all(hw > 0):
            raise ConfigurationError("domain size must be positive per axis")

    @property
    def half_widths(self) -> np.ndarray:
        if np.ndim(self.size) == 0:
            return np.full(self.n, float(self.size))
        return np.asarray(self.size, dtype=float)

    @property
    def radius(self) -> float:
        return float(self.half_widths.max())


@dataclass
class RHSSpec:
    """Right-hand side f(x, u, Du) with optional analytic partials.

    ``f`` maps (x: (m, n), u: (m,), du: (m, n)) to (m,) and must stay
    strictly positive on every queried point.  ``fu`` and ``fp`` are the
    partials in u and Du; when absent the Jacobian falls back to central
    finite differences of f.  ``bounds`` records (m, M) when known.
    """

    f: Callable
    fu: Callable | None = None
    fp: Callable | None = None
    bounds: tuple[float, float] | None = None


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-8
    max_newton: int = 40
    min_t_step: float = 1e-10
    verbose: bool = False


@dataclass
class Grid:
    """Lattice geometry and precomputed stencil index tables."""

    domain: DomainSpec
    shape: tuple
    h: np.ndarray
    x: np.ndarray  # (N, n) node coordinates, C order
    is_interior: np.ndarray  # (N,) bool
    interior: np.ndarray  # (m,) flat indices
    axis_plus: np.ndarray  # (n, m) flat neighbor indices
    axis_minus: np.ndarray
    corner: dict  # (a, b) -> (pp, pm, mp, mm) flat index arrays
    deep: np.ndarray  # (m,) bool: all stencil neighbors interior
    origin_ord: int

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def num_interior(self) -> int:
        return self.interior.shape[0]

    @property
    def xi(self) -> np.ndarray:
        """Coordinates of interior nodes, (m, n)."""
        return self.x[self.interior]


def discretize(domain: DomainSpec) -> Grid:
    """Build the lattice, the interior/boundary mask, and stencil tables."""
    n, mesh = domain.n, domain.mesh
    hw = domain.half_widths
    axes = [np.linspace(-hw[a], hw[a], mesh) for a in range(n)]
    h = np.array([ax[1] - ax[0] for ax in axes])
    shape = (mesh,) * n
    x = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)

    multi = np.stack(
        np.meshgrid(*[np.arange(mesh)] * n, indexing="ij"), axis=-1
    ).reshape(-1, n)
    on_outer = np.any((multi == 0) | (multi == mesh - 1), axis=1)
    if domain.kind == "ball":
        # nodes landing on the sphere to rounding (lattice Pythagorean hits
        # such as (2/3, 2/3, 1/3)) belong to the boundary of the open ball
        rim = domain.radius**2 * (1.0 - 1e-12)
        is_interior = (np.sum(x**2, axis=1) < rim) & ~on_outer
    else:
        is_interior = ~on_outer
    interior = np.flatnonzero(is_interior)
    mi = multi[interior]

    def flat(offset: np.ndarray) -> np.ndarray:
        return np.ravel_multi_index(tuple((mi + offset).T), shape)

    axis_plus = np.empty((n, interior.size), dtype=np.intp)
    axis_minus = np.empty_like(axis_plus)
    for a in range(n):
        e = np.zeros(n, dtype=np.intp)
        e[a] = 1
        axis_plus[a] = flat(e)
        axis_minus[a] = flat(-e)
    corner = {}
    for a in range(n - 1):
        for b in range(a + 1, n):
            ea = np.zeros(n, dtype=np.intp)
            eb = np.zeros(n, dtype=np.intp)
            ea[a] = 1
            eb[b] = 1
            corner[(a, b)] = (
                flat(ea + eb),
                flat(ea - eb),
                flat(-ea + eb),
                flat(-ea - eb),
            )

    deep = np.ones(interior.size, dtype=bool)
    for a in range(n):
        deep &= is_interior[axis_plus[a]] & is_interior[axis_minus[a]]
    for key in corner:
        for idx in corner[key]:
            deep &= is_interior[idx]

    origin_flat = int(np.ravel_multi_index(((mesh - 1) // 2,) * n, shape))
    ords = np.full(x.shape[0], -1, dtype=np.intp)
    ords[interior] = np.arange(interior.size)
    origin_ord = int(ords[origin_flat])

    return Grid(
        domain=domain,
        shape=shape,
        h=h,
        x=x,
        is_interior=is_interior,
        interior=interior,
        axis_plus=axis_plus,
        axis_minus=axis_minus,
        corner=corner,
        deep=deep,
        origin_ord=origin_ord,
    )


def derivatives(grid: Grid, u: np.ndarray):
    """Central first and second differences at interior nodes.

    Returns du (m, n) and the symmetric d2u (m, n, n); mixed entries use
    the 4-point cross and fill both triangles identically.
    """
    n, m = grid.n, grid.num_interior
    c = grid.interior
    du = np.empty((m, n))
    d2u = np.empty((m, n, n))
    for a in range(n):
        up, um = u[grid.axis_plus[a]], u[grid.axis_minus[a]]
        du[:, a] = (up - um) / (2.0 * grid.h[a])
        d2u[:, a, a] = (up - 2.0 * u[c] + um) / grid.h[a] ** 2
    for (a, b), (pp, pm, mp, mm) in grid.corner.items():
        mixed = (u[pp] - u[pm] - u[mp] + u[mm]) / (4.0 * grid.h[a] * grid.h[b])
        d2u[:, a, b] = mixed
        d2u[:, b, a] = mixed
    return du, d2u


class GridSolution:
    """A field on a grid with its derivative data and admissibility audit."""

    def __init__(self, grid, spec, u, rhs=None, residual_norm=None, admissible=None):
        self.grid = grid
        self.spec = spec
        self.u = np.asarray(u, dtype=float)
        self.du, self.d2u = derivatives(grid, self.u)
        self.eigvals, self.eigvecs = jacobi_eigh(self.d2u)
        eta = eta_values(self.eigvals)
        mask = gamma_tilde_mask(eta, spec.k, spec.alpha)
        self.admissible = bool(mask.all()) if admissible is None else admissible
        self._mask = mask
        if residual_norm is None and rhs is not None:
            r, _ = residual(self, rhs)
            residual_norm = float(np.abs(r).max()) if self.admissible else float("inf")
        self.residual_norm = residual_norm
        # continuation bookkeeping, filled by solve()
        self.newton_iterations = 0
        self.continuation_steps = 0
        self.continuation_path: list = []

    def hessian_at(self, ordinal: int) -> SymmetricField:
        """The symmetrized Hessian at one interior node, with eigen cache."""
        return SymmetricField(self.d2u[ordinal])

    def f_values(self) -> np.ndarray:
        """F(U[D^2 u]) at interior nodes (inf where inadmissible)."""
        eta = eta_values(self.eigvals)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = ratio_value(self.spec, eta)
        return np.where(self._mask, vals, np.inf)


def residual(state: GridSolution, rhs: RHSSpec):
    """F(U) - f at interior nodes along with the f values used."""
    grid = state.grid
    ui = state.u[grid.interior]
    fvals = np.asarray(rhs.f(grid.xi, ui, state.du), dtype=float)
    if not np.all(fvals > 0):
        raise ConfigurationError("right-hand side must be strictly positive")
    return state.f_values() - fvals, fvals


def _rhs_partials(rhs: RHSSpec, x, u, du):
    """Analytic partials of f when given, central differences otherwise."""
    if rhs.fu is not None:
        fu = np.asarray(rhs.fu(x, u, du), dtype=float)
    else:
        eps = 1e-6 * max(1.0, float(np.abs(u).max()))
        fu = (rhs.f(x, u + eps, du) - rhs.f(x, u - eps, du)) / (2.0 * eps)
        fu = np.asarray(fu, dtype=float)
    if rhs.fp is not None:
        fp = np.asarray(rhs.fp(x, u, du), dtype=float)
    else:
        fp = np.empty_like(du)
        scale = max(1.0, float(np.abs(du).max()))
        eps = 1e-6 * scale
        for a in range(du.shape[1]):
            bump = np.zeros_like(du)
            bump[:, a] = eps
            fp[:, a] = (rhs.f(x, u, du + bump) - rhs.f(x, u, du - bump)) / (2.0 * eps)
    return fu, fp


def _linear_update(state: GridSolution, rhs: RHSSpec) -> np.ndarray:
    """Solve the linearized equation for the Newton direction (interior)."""
    grid, spec = state.grid, state.spec
    n, m = grid.n, grid.num_interior
    fmat = matrix_grad_from_frame(spec, state.eigvals, state.eigvecs)
    ui = state.u[grid.interior]
    fu, fp = _rhs_partials(rhs, grid.xi, ui, state.du)

    ords = np.full(grid.x.shape[0], -1, dtype=np.intp)
    ords[grid.interior] = np.arange(m)
    row_ord = np.arange(m, dtype=np.intp)

    rows, cols, data = [], [], []

    def add(col_flat: np.ndarray, coeff: np.ndarray):
        co = ords[col_flat]
        live = co >= 0  # boundary columns carry fixed data, not unknowns
        rows.append(row_ord[live])
        cols.append(co[live])
        data.append(coeff[live])

    center = -fu
    for a in range(n):
        ha2 = grid.h[a] ** 2
        center = center - 2.0 * fmat[:, a, a] / ha2
        add(grid.axis_plus[a], fmat[:, a, a] / ha2 - fp[:, a] / (2.0 * grid.h[a]))
        add(grid.axis_minus[a], fmat[:, a, a] / ha2 + fp[:, a] / (2.0 * grid.h[a]))
    for (a, b), (pp, pm, mp, mm) in grid.corner.items():
        w = fmat[:, a, b] / (2.0 * grid.h[a] * grid.h[b])
        add(pp, w)
        add(pm, -w)
        add(mp, -w)
        add(mm, w)
    rows.append(row_ord)
    cols.append(row_ord)
    data.append(center)

    J = csc_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m, m),
    )
    r, _ = residual(state, rhs)
    return splu(J).solve(-r)


def newton_step(
    state: GridSolution, rhs: RHSSpec, spec: OperatorSpec, tol: float = 1e-8
) -> GridSolution:
    """One damped Newton step preserving admissibility.

    The step is halved until the trial iterate is admissible at every
    interior node and the max-norm residual satisfies the Armijo
    decrease (factor 1e-4).  Steps below 2^-30 raise, carrying the
    current state.  At a converged state the update is a no-op.
    """
    if not state.admissible:
        raise AdmissibilityError("newton_step requires an admissible state", last=state)
    if spec != state.spec:
        raise InputDomainError("operator spec does not match the state")
    # measure against the rhs passed here, not the one the state was
    # built with: a state converged for another rhs must still move
    r, _ = residual(state, rhs)
    base = float(np.abs(r).max())
    if base <= tol:
        return state
    delta = _linear_update(state, rhs)
    grid = state.grid
    s = 1.0
    while s >= _MIN_STEP:
        trial = state.u.copy()
        trial[grid.interior] += s * delta
        cand = GridSolution(grid, spec, trial, rhs=rhs)
        if cand.admissible and cand.residual_norm <= (1.0 - _ARMIJO * s) * base:
            cand.newton_iterations = state.newton_iterations + 1
            cand.continuation_steps = state.continuation_steps
            cand.continuation_path = state.continuation_path
            return cand
        s *= 0.5
    raise NoConvergenceError(
        f"step underflow below 2^-30 at residual {base:.3e}", last=state
    )


class _Homotopy:
    """Blend (1-t) * f_seed_constant + t * f_target, with blended partials."""

    def __init__(self, rhs: RHSSpec, seed_value: float, t: float):
        self._rhs = rhs
        self._c = seed_value
        self._t = t
        self.f = self._f
        self.fu = self._fu if rhs.fu is not None else None
        self.fp = self._fp if rhs.fp is not None else None
        self.bounds = None

    def _f(self, x, u, du):
        ft = np.asarray(self._rhs.f(x, u, du), dtype=float)
        return (1.0 - self._t) * self._c + self._t * ft

    def _fu(self, x, u, du):
        return self._t * np.asarray(self._rhs.fu(x, u, du), dtype=float)

    def _fp(self, x, u, du):
        return self._t * np.asarray(self._rhs.fp(x, u, du), dtype=float)


def _newton_to_tol(state: GridSolution, rhs, spec, opts: SolveOptions):
    """Drive newton_step until the residual meets tol; None on stall."""
    for _ in range(opts.max_newton):
        if state.residual_norm <= opts.tol:
            return state
        try:
            state = newton_step(state, rhs, spec, tol=opts.tol)
        except (NoConvergenceError, AdmissibilityError):
            return None
    return state if state.residual_norm <= opts.tol else None


def solve(
    domain: DomainSpec,
    rhs: RHSSpec,
    spec: OperatorSpec,
    opts: SolveOptions | None = None,
    boundary: Callable | None = None,
) -> GridSolution:
    """Continuation solve of F(U[D^2 u]) = f with Dirichlet data.

    ``boundary`` maps coordinates to Dirichlet values (default zero, the
    native problem).  The walk starts at the quadratic seed, which the
    stencils solve exactly, and morphs right-hand side and boundary data
    together; the continuation step doubles on success and halves on
    failure, raising on underflow with the last good iterate attached.
    """
    if opts is None:
        opts = SolveOptions()
    if spec.n != domain.n:
        raise ConfigurationError("operator dimension must match the grid dimension")
    grid = discretize(domain)

    r2 = domain.radius**2
    u_seed = 0.5 * (np.sum(grid.x**2, axis=1) - r2)
    eta0 = np.full(spec.n, float(spec.n - 1))
    f_seed = float(ratio_value(spec, eta0))

    bmask = ~grid.is_interior
    g_seed = u_seed[bmask]
    if boundary is None:
        g_target = np.zeros(int(bmask.sum()))
    else:
        g_target = np.asarray(boundary(grid.x[bmask]), dtype=float)

    def with_boundary(u_int_source: np.ndarray, t: float) -> np.ndarray:
        u = u_int_source.copy()
        u[bmask] = (1.0 - t) * g_seed + t * g_target
        return u

    state = GridSolution(grid, spec, u_seed, rhs=_Homotopy(rhs, f_seed, 0.0))
    if not state.admissible:
        raise AdmissibilityError("quadratic seed is not admissible", last=state)
    newton_total = 0
    accepted = 0
    path = [0.0]
    t, dt = 0.0, 1.0
    while t < 1.0:
        t_try = min(1.0, t + dt)
        hom = _Homotopy(rhs, f_seed, t_try)
        start = GridSolution(grid, spec, with_boundary(state.u, t_try), rhs=hom)
        nxt = None
        if start.admissible:
            nxt = _newton_to_tol(start, hom, spec, opts)
        if nxt is None:
            dt *= 0.5
            if dt < opts.min_t_step:
                raise NoConvergenceError(
                    f"continuation stalled at t={t:.6f}", last=state
                )
            continue
        newton_total += nxt.newton_iterations
        accepted += 1
        path.append(t_try)
        state = nxt
        t = t_try
        dt = min(2.0 * dt, 1.0)
        if opts.verbose:
            print(f"t={t:.4f} residual={state.residual_norm:.3e}")

    final = GridSolution(grid, spec, state.u, rhs=rhs)
    final.newton_iterations = newton_total
    final.continuation_steps = accepted
    final.continuation_path = path
    return final


# --- grid snapshot text format ------------------------------------------
#
# header: "n k l alpha h dims..." followed by comment lines carrying the
# domain, the admissibility flag and the residual; then one line per node
# "index u du... d2u-upper-triangle..." (zeros for boundary nodes); the
# final line is a sha256 checksum of everything above it.


def _fmt(v: float) -> str:
    return repr(float(v))


def snapshot_text(sol: GridSolution) -> str:
    grid, spec = sol.grid, sol.spec
    dom = grid.domain
    n = grid.n
    head = [
        " ".join(
            [str(n), str(spec.k), str(spec.l), _fmt(spec.alpha), _fmt(grid.h[0])]
            + [str(s) for s in grid.shape]
        ),
        f"# domain {dom.kind} " + ",".join(_fmt(w) for w in dom.half_widths),
        f"# admissible {int(sol.admissible)}",
        f"# residual_norm {_fmt(sol.residual_norm)}",
    ]
    n_tri = [(a, b) for a in range(n) for b in range(a, n)]
    ords = np.full(grid.x.shape[0], -1, dtype=np.intp)
    ords[grid.interior] = np.arange(grid.num_interior)
    lines = []
    for flat in range(grid.x.shape[0]):
        o = ords[flat]
        if o >= 0:
            du = [_fmt(v) for v in sol.du[o]]
            d2 = [_fmt(sol.d2u[o, a, b]) for a, b in n_tri]
        else:
            du = ["0.0"] * n
            d2 = ["0.0"] * len(n_tri)
        lines.append(" ".join([str(flat), _fmt(sol.u[flat])] + du + d2))
    body = "\n".join(head + lines) + "\n"
    digest = sha256(body.encode()).hexdigest()
    return body + f"# sha256 {digest}\n"


def save_snapshot(sol: GridSolution, path: str):
    with open(path, "w") as fh:
        fh.write(snapshot_text(sol))


def load_snapshot(path: str) -> GridSolution:
    """Rebuild a GridSolution from a snapshot, verifying its checksum."""
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines or not lines[-1].startswith("# sha256 "):
        raise CorruptInputError("snapshot is missing its checksum line")
    body = "\n".join(lines[:-1]) + "\n"
    expect = lines[-1].split()[-1]
    if sha256(body.encode()).hexdigest() != expect:
        raise CorruptInputError("snapshot failed its checksum")

    head = lines[0].split()
    n = int(head[0])
    k, l, alpha = int(head[1]), int(head[2]), float(head[3])
    h = float(head[4])
    dims = [int(d) for d in head[5 : 5 + n]]
    meta = {}
    for ln in lines[1:4]:
        parts = ln.split()
        meta[parts[1]] = parts[2:]
    kind = meta["domain"][0]
    widths = tuple(float(w) for w in meta["domain"][1].split(","))
    size = widths[0] if len(set(widths)) == 1 else widths
    domain = DomainSpec(kind=kind, n=n, mesh=dims[0], size=size)
    spec = OperatorSpec(n=n, k=k, l=l, alpha=alpha)
    grid = discretize(domain)
    if abs(grid.h[0] - h) > 1e-12 * max(1.0, abs(h)):
        raise CorruptInputError("snapshot spacing does not match its domain")

    total = int(np.prod(dims))
    u = np.empty(total)
    for ln in lines[4 : 4 + total]:
        parts = ln.split()
        u[int(parts[0])] = float(parts[1])
    sol = GridSolution(
        grid,
        spec,
        u,
        residual_norm=float(meta["residual_norm"][0]),
        admissible=bool(int(meta["admissible"][0])),
    )
    return sol
