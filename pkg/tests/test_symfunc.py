"""Symmetric-function layer: values, deleted tuples, gradients, Hessians."""

import numpy as np
import numpy.testing as npt
import pytest

from shq import InputDomainError, OperatorSpec, s_sum, s_sum_grad, s_sum_hess, sigma, sigma_deleted
from shq.symfunc import deleted, deleted_pairs, s_from_sigmas, sigma_upto

from oracles import fd_gradient, fd_jacobian, sigma_enumerated, ulps_apart


def test_sigma_pinned_values():
    assert sigma(1, (1.0, 2.0, 3.0)) == 6.0
    assert sigma(2, (1.0, 2.0, 3.0)) == 11.0
    assert sigma(3, (1.0, 2.0, 3.0)) == 6.0
    # conventions outside 1..n
    assert sigma(0, (1.0, 2.0, 3.0)) == 1.0
    assert sigma(4, (1.0, 2.0, 3.0)) == 0.0
    assert sigma(-1, (1.0, 2.0, 3.0)) == 0.0


def test_sigma_rejects_non_finite():
    with pytest.raises(InputDomainError):
        sigma(1, (1.0, np.nan))
    with pytest.raises(InputDomainError):
        sigma(1, (np.inf, 0.0))


def test_sigma_matches_enumeration_oracle():
    rng = np.random.default_rng(101)
    for n in range(2, 9):
        vals = rng.standard_normal((50, n)) * rng.lognormal(0.0, 1.0, (50, 1))
        table = sigma_upto(vals, n)
        mass = sigma_upto(np.abs(vals), n)  # aggregation mass per (tuple, k)
        for row, srow, mrow in zip(vals, table, mass):
            for k in range(n + 1):
                exact = sigma_enumerated(k, row)
                assert ulps_apart(float(srow[k]), exact, float(mrow[k])) <= 4.0


def test_sigma_batch_matches_scalar_loop():
    rng = np.random.default_rng(7)
    vals = rng.standard_normal((20, 5))
    batch = sigma(3, vals)
    assert batch.shape == (20,)
    for i in range(20):
        npt.assert_allclose(batch[i], sigma(3, vals[i]), rtol=1e-15)


def test_sigma_permutation_invariant():
    rng = np.random.default_rng(8)
    v = rng.standard_normal(6)
    p = rng.permutation(6)
    for k in range(7):
        npt.assert_allclose(sigma(k, v), sigma(k, v[p]), rtol=1e-14)


def test_sigma_deleted_pinned_values():
    assert sigma_deleted(1, (1.0, 2.0, 3.0), {2}) == 4.0
    assert sigma_deleted(0, (1.0, 2.0, 3.0), {1, 3}) == 1.0
    assert sigma_deleted(2, (2.0, 3.0, 5.0, 7.0), {1}) == 71.0


def test_sigma_deleted_index_contract():
    # slots are numbered 1..n; duplicates and out-of-range slots are rejected
    with pytest.raises(InputDomainError):
        sigma_deleted(1, (1.0, 2.0, 3.0), [1, 1])
    with pytest.raises(InputDomainError):
        sigma_deleted(1, (1.0, 2.0, 3.0), {0})
    with pytest.raises(InputDomainError):
        sigma_deleted(1, (1.0, 2.0, 3.0), {4})
    with pytest.raises(InputDomainError):
        sigma_deleted(1, (1.0, 2.0, 3.0, 4.0), {1, 2, 3})


def test_sigma_deleted_matches_manual_removal():
    rng = np.random.default_rng(21)
    v = rng.standard_normal(7)
    for slot in range(1, 8):
        kept = np.delete(v, slot - 1)
        for k in range(7):
            npt.assert_allclose(
                sigma_deleted(k, v, {slot}), sigma(k, kept), rtol=1e-13, atol=1e-13
            )


def test_deleted_tables_consistent_with_sigma_deleted():
    rng = np.random.default_rng(22)
    v = rng.standard_normal(6)
    one = deleted(v)
    assert one.shape == (6, 5)
    for i in range(6):
        npt.assert_allclose(sorted(one[i]), sorted(np.delete(v, i)), rtol=0)
    two = deleted_pairs(v)
    assert two.shape == (6, 6, 4)
    for p in range(6):
        for q in range(6):
            if p == q:
                continue  # diagonal is a placeholder by contract
            npt.assert_allclose(
                sorted(two[p, q]), sorted(np.delete(v, [p, q])), rtol=0
            )


def test_s_sum_pinned_values():
    assert s_sum(2, OperatorSpec(2, 2, 0, 1.0), (1.0, 1.0)) == 3.0
    assert s_sum(2, OperatorSpec(3, 2, 0, 0.0), (1.0, 2.0, 3.0)) == 11.0


def test_s_sum_equals_sigma_of_augmented_tuple():
    # sigma_k(lam, alpha) = sigma_k(lam) + alpha*sigma_{k-1}(lam), identically
    rng = np.random.default_rng(31)
    for n in (2, 4, 7):
        for alpha in (0.0, 0.5, 3.0):
            spec = OperatorSpec(n, min(2, n), 0, alpha)
            v = rng.standard_normal(n)
            aug = np.append(v, alpha)
            for k in range(n + 1):
                npt.assert_allclose(
                    s_sum(k, spec, v), sigma(k, aug), rtol=1e-13, atol=1e-13
                )


def test_s_from_sigmas_matches_direct_assembly():
    rng = np.random.default_rng(32)
    vals = rng.standard_normal((10, 5))
    table = sigma_upto(vals, 5)
    spec = OperatorSpec(5, 3, 1, 0.5)
    for j in range(6):
        direct = s_sum(j, spec, vals)
        npt.assert_allclose(s_from_sigmas(table, j, 0.5), direct, rtol=1e-14)


def test_s_sum_grad_pinned_values():
    npt.assert_array_equal(
        s_sum_grad(2, OperatorSpec(3, 2, 0, 0.0), (1.0, 1.0, 1.0)), [2.0, 2.0, 2.0]
    )
    npt.assert_array_equal(
        s_sum_grad(1, OperatorSpec(4, 1, 0, 0.0), (3.0, 1.0, 4.0, 1.0)), np.ones(4)
    )
    g = s_sum_grad(3, OperatorSpec(3, 3, 0, 2.0), (1.0, 2.0, 4.0))
    assert g[0] == 20.0


def test_s_sum_grad_is_deleted_sum():
    # dS_k/dlam_p = sigma_{k-1}(lam|p) + alpha*sigma_{k-2}(lam|p)
    rng = np.random.default_rng(41)
    for n, k, alpha in [(3, 2, 0.0), (5, 3, 0.5), (6, 6, 3.0), (4, 1, 1.0)]:
        spec = OperatorSpec(n, k, 0, alpha)
        v = rng.standard_normal(n) * 2.0
        g = s_sum_grad(k, spec, v)
        for p in range(n):
            want = sigma_deleted(k - 1, v, {p + 1}) + alpha * sigma_deleted(
                k - 2, v, {p + 1}
            )
            npt.assert_allclose(g[p], want, rtol=1e-12, atol=1e-12)


def test_s_sum_grad_matches_finite_differences():
    rng = np.random.default_rng(42)
    spec = OperatorSpec(5, 4, 0, 0.5)
    v = rng.standard_normal(5) + 2.0
    fn = lambda x: float(s_sum(4, spec, x))
    fd = fd_gradient(fn, v, 1e-6)
    npt.assert_allclose(s_sum_grad(4, spec, v), fd, rtol=1e-7)


def test_s_sum_hess_pinned_values():
    h = s_sum_hess(2, OperatorSpec(3, 2, 0, 0.0), (1.0, 1.0, 1.0))
    npt.assert_array_equal(h, np.ones((3, 3)) - np.eye(3))
    h3 = s_sum_hess(2, OperatorSpec(3, 2, 0, 3.0), (9.0, 9.0, 9.0))
    assert h3[0, 1] == 1.0
    h4 = s_sum_hess(3, OperatorSpec(3, 3, 0, 1.0), (1.0, 2.0, 4.0))
    assert h4[0, 1] == 5.0


def test_s_sum_hess_structure():
    # multilinear in each variable: zero diagonal, symmetric off-diagonal
    rng = np.random.default_rng(51)
    for n, k, alpha in [(4, 2, 0.0), (6, 4, 0.5), (5, 5, 3.0)]:
        spec = OperatorSpec(n, k, 0, alpha)
        v = rng.standard_normal(n)
        h = s_sum_hess(k, spec, v)
        npt.assert_array_equal(np.diag(h), np.zeros(n))
        npt.assert_allclose(h, h.T, rtol=0, atol=0)
        for p in range(n):
            for q in range(p + 1, n):
                want = sigma_deleted(k - 2, v, {p + 1, q + 1}) + alpha * sigma_deleted(
                    k - 3, v, {p + 1, q + 1}
                )
                npt.assert_allclose(h[p, q], want, rtol=1e-12, atol=1e-12)


def test_s_sum_hess_matches_jacobian_of_grad():
    rng = np.random.default_rng(52)
    spec = OperatorSpec(5, 3, 1, 0.5)
    v = rng.standard_normal(5) + 1.5
    jac = fd_jacobian(lambda x: s_sum_grad(3, spec, x), v, 1e-6)
    npt.assert_allclose(s_sum_hess(3, spec, v), jac, rtol=1e-6, atol=1e-8)


def test_deletion_identity_reconstructs_s_sum():
    # S_k(lam) = lam_i * S_{k-1}(lam|i) + S_k(lam|i) for every slot i
    rng = np.random.default_rng(61)
    for n in (2, 4, 8):
        for alpha in (0.0, 0.5, 3.0):
            spec = OperatorSpec(n, min(2, n), 0, alpha)
            v = rng.standard_normal(n) * 3.0
            for k in range(1, n + 1):
                full = s_sum(k, spec, v)
                for i in range(1, n + 1):
                    part = v[i - 1] * (
                        sigma_deleted(k - 1, v, {i})
                        + alpha * sigma_deleted(k - 2, v, {i})
                    ) + (sigma_deleted(k, v, {i}) + alpha * sigma_deleted(k - 1, v, {i}))
                    npt.assert_allclose(part, full, rtol=1e-10, atol=1e-10)
