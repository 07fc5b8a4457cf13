"""Frame-covariant calculus of F on symmetric matrices.

For a symmetric matrix H with spectrum lam, the operator acts through
U[H] = (trace H) I - H, whose spectrum is the eta-transform of lam.  The
matrix gradient of H |-> F(lam(H)) is V diag(dF/dlam) V' in any
eigenframe (V, lam) of H, and the second derivative along a symmetric
direction a, written in that eigenframe, is

    sum_{p,q} F_{pq} a_pp a_qq
      + 2 sum_{p<q} (F_p - F_q)/(lam_p - lam_q) * a_pq^2,

where F_p, F_{pq} are the first and second lam-derivatives.  When two
eigenvalues nearly coincide the divided difference is replaced by its
analytic limit F_pp - F_pq.

Eigen-decompositions use a batched cyclic Jacobi iteration: dimensions
here are small (grid Hessians, n <= 12), the rotation schedule is fixed,
and the result is deterministic for identical input bytes.
"""

from __future__ import annotations

import numpy as np

from .cones import eta_values, gamma_tilde_mask
from .errors import InputDomainError, OutsideDomainError
from .quotient import grad_batch, power_hess_batch, ratio_grad
from .symfunc import OperatorSpec

__all__ = [
    "jacobi_eigh",
    "SymmetricField",
    "u_transform",
    "f_matrix_grad",
    "matrix_grad_from_frame",
    "second_derivative_form",
    "second_derivative_forms_from_frame",
    "t_diagonal",
]

# eigenvalue gap below which the divided difference switches to its limit
_GAP_FLOOR = 1e-7


def jacobi_eigh(mats: np.ndarray, max_sweeps: int = 30):
    """Eigen-decomposition of symmetric matrices by cyclic Jacobi rotations.

    Accepts shape (..., n, n) and returns (w, V) with eigenvalues
    ascending along the last axis and eigenvector columns matching, so
    that mats = V @ diag(w) @ V'.  Sweeps run a fixed (p, q) schedule and
    rotate every matrix of the batch in lockstep; entries already small
    relative to their diagonal pair are left alone.
    """
    A = np.array(mats, dtype=float, copy=True)
    if A.shape[-1] != A.shape[-2]:
        raise InputDomainError("expected square matrices")
    n = A.shape[-1]
    V = np.zeros_like(A)
    V[...] = np.eye(n)
    if n == 1:
        return A[..., 0, 0].copy()[..., None], V
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        diag_scale = np.abs(np.diagonal(A, axis1=-2, axis2=-1)).max(axis=-1)
        off = 0.0
        for p, q in pairs:
            off = max(off, float(np.abs(A[..., p, q]).max()))
        if off <= 1e-15 * max(float(diag_scale.max()), 1e-300):
            break
        for p, q in pairs:
            apq = A[..., p, q]
            app = A[..., p, p]
            aqq = A[..., q, q]
            live = np.abs(apq) > 1e-18 * (np.abs(app) + np.abs(aqq) + np.abs(apq))
            theta = 0.5 * np.arctan2(2.0 * apq, aqq - app)
            c = np.where(live, np.cos(theta), 1.0)
            s = np.where(live, np.sin(theta), 0.0)
            cc, ss = c[..., None], s[..., None]
            rp, rq = A[..., p, :].copy(), A[..., q, :].copy()
            A[..., p, :] = cc * rp - ss * rq
            A[..., q, :] = ss * rp + cc * rq
            cp, cq = A[..., :, p].copy(), A[..., :, q].copy()
            A[..., :, p] = cc * cp - ss * cq
            A[..., :, q] = ss * cp + cc * cq
            vp, vq = V[..., :, p].copy(), V[..., :, q].copy()
            V[..., :, p] = cc * vp - ss * vq
            V[..., :, q] = ss * vp + cc * vq
    w = np.diagonal(A, axis1=-2, axis2=-1).copy()
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    V = np.take_along_axis(V, order[..., None, :], axis=-1)
    return w, V


class SymmetricField:
    """A symmetric matrix with an eagerly cached spectral decomposition."""

    def __init__(self, entries):
        A = np.asarray(entries, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputDomainError("entries must form a square matrix")
        if not np.all(np.isfinite(A)):
            raise InputDomainError("entries must be finite")
        B = 0.5 * (A + A.T)
        # mirror the upper triangle so entries == entries.T holds exactly
        B = np.triu(B) + np.triu(B, 1).T
        self.entries = B
        w, V = jacobi_eigh(B)
        self.eigenvalues = w
        self.eigenvectors = V

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def residual(self) -> float:
        """Max |M v - w v| over eigenpairs, for decomposition audits."""
        M, w, V = self.entries, self.eigenvalues, self.eigenvectors
        return float(np.abs(M @ V - V * w[None, :]).max())


def u_transform(field: SymmetricField | np.ndarray) -> SymmetricField:
    """U[H] = (trace H) I - H; its spectrum is the eta-transform of H's."""
    H = field.entries if isinstance(field, SymmetricField) else np.asarray(field, float)
    return SymmetricField(np.trace(H) * np.eye(H.shape[0]) - H)


def _as_field(h) -> SymmetricField:
    return h if isinstance(h, SymmetricField) else SymmetricField(h)


def _require_admissible(spec: OperatorSpec, w: np.ndarray):
    if not gamma_tilde_mask(eta_values(w[None, :]), spec.k, spec.alpha)[0]:
        raise OutsideDomainError("matrix spectrum is not admissible for the quotient")


def matrix_grad_from_frame(spec: OperatorSpec, w: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Matrix gradient assembled from batched eigenframes (w, V)."""
    g = grad_batch(spec, w)
    return np.einsum("...ip,...p,...jp->...ij", V, g, V)


def f_matrix_grad(spec: OperatorSpec, hessian) -> SymmetricField:
    """Gradient of H |-> F(lam(H)) at a symmetric H, as a SymmetricField.

    Diagonal in any eigenframe of H with entries dF/dlam; covariant under
    conjugation by rotations.  Requires an admissible spectrum.
    """
    field = _as_field(hessian)
    if spec.n != field.n:
        raise InputDomainError(f"matrix must be {spec.n} x {spec.n}")
    _require_admissible(spec, field.eigenvalues)
    mat = matrix_grad_from_frame(
        spec, field.eigenvalues[None, :], field.eigenvectors[None, :, :]
    )[0]
    return SymmetricField(mat)


def second_derivative_forms_from_frame(
    spec: OperatorSpec,
    w: np.ndarray,
    V: np.ndarray,
    dirs: np.ndarray,
    exponent: float = 1.0,
) -> np.ndarray:
    """Quadratic forms of H |-> F(lam(H))**exponent over batched frames.

    w: (m, n) ascending spectra, V: (m, n, n) matching frames, dirs:
    (m, d, n, n) symmetric directions; returns (m, d).  No admissibility
    guard — callers own their sampling.
    """
    _, grad, hess = power_hess_batch(spec, w, exponent)
    at = np.einsum("mip,mdij,mjq->mdpq", V, dirs, V)
    diag = np.einsum("mdpp->mdp", at)
    total = np.einsum("mdp,mpq,mdq->md", diag, hess, diag)
    gaps = w[:, :, None] - w[:, None, :]
    floor = _GAP_FLOOR * (1.0 + np.abs(w).max(axis=-1))
    near = np.abs(gaps) < floor[:, None, None]
    limit = np.einsum("mpp->mp", hess)[:, :, None] - hess
    dd = np.where(near, limit, (grad[:, :, None] - grad[:, None, :]) / np.where(near, 1.0, gaps))
    upper = np.triu(np.ones((spec.n, spec.n), dtype=bool), 1)
    total += 2.0 * np.einsum("mpq,mdpq->md", np.where(upper, dd, 0.0), at**2)
    return total


def second_derivative_form(
    spec: OperatorSpec, hessian, a, exponent: float = 1.0
) -> float:
    """Second derivative of H |-> F(lam(H))**exponent along direction a.

    Written in the eigenframe of H: the f_hess quadratic form on the
    diagonal of a, plus divided-difference terms on the off-diagonal
    squares.  Gaps below 1e-7 * (1 + max|lam|) use the analytic limit
    F_pp - F_pq instead of the quotient.
    """
    field = _as_field(hessian)
    if spec.n != field.n:
        raise InputDomainError(f"matrix must be {spec.n} x {spec.n}")
    A = np.asarray(a.entries if isinstance(a, SymmetricField) else a, dtype=float)
    if A.shape != field.entries.shape:
        raise InputDomainError("direction must match the matrix shape")
    if not np.all(np.isfinite(A)):
        raise InputDomainError("direction must be finite")
    A = 0.5 * (A + A.T)
    w, V = field.eigenvalues, field.eigenvectors
    _require_admissible(spec, w)
    return float(
        second_derivative_forms_from_frame(
            spec, w[None, :], V[None], A[None, None], exponent
        )[0, 0]
    )


def t_diagonal(spec: OperatorSpec, hessian) -> np.ndarray:
    """Complementary sums of the matrix-gradient frame coefficients.

    Component i is the sum of the frame coefficients F^{jj} over all
    j != i, aligned with the ascending eigenvalues of H.  For k < n the
    entries are positive on the admissible cone, ordered oppositely to
    the F^{jj} themselves, and their total is (n-1) times the F total.
    """
    field = _as_field(hessian)
    if spec.n != field.n:
        raise InputDomainError(f"matrix must be {spec.n} x {spec.n}")
    w = field.eigenvalues
    _require_admissible(spec, w)
    g_eta = ratio_grad(spec, eta_values(w[None, :]))[0]
    f_diag = g_eta.sum() - g_eta  # dF/dlam in the shared frame
    return f_diag.sum() - f_diag
