"""Cone membership, the eta map, and the rejection sampler."""

import numpy as np
import numpy.testing as npt
import pytest

from shq import InputDomainError, OperatorSpec, eta_from_lambda, in_gamma, in_gamma_prime, in_gamma_tilde, sample_cone
from shq.cones import (
    eta_values,
    gamma_mask,
    gamma_prime_mask,
    gamma_tilde_mask,
    sample_cone_batch,
)
from shq.symfunc import sigma


def test_eta_pinned_values():
    npt.assert_array_equal(eta_values(np.array([3.0, 2.0, 1.0])), [3.0, 4.0, 5.0])
    npt.assert_array_equal(
        eta_values(np.array([5.0, -1.0, 2.0, 0.0])), [1.0, 7.0, 4.0, 6.0]
    )


def test_eta_constant_tuple():
    for n in (2, 3, 6):
        c = 0.7
        npt.assert_allclose(eta_values(np.full(n, c)), np.full(n, (n - 1) * c), rtol=1e-15)


def test_eta_sum_identity():
    rng = np.random.default_rng(5)
    v = rng.standard_normal((40, 5))
    eta = eta_values(v)
    npt.assert_allclose(eta.sum(axis=-1), (5 - 1) * v.sum(axis=-1), rtol=1e-12)


def test_eta_reverses_order():
    # ascending lambda gives descending eta: eta_i = sum - lam_i
    v = np.array([-1.0, 0.5, 2.0, 7.0])
    eta = eta_values(v)
    assert np.all(np.diff(eta) < 0)


def test_eta_from_lambda_keeps_source():
    lam = np.array([3.0, 2.0, 1.0])
    t = eta_from_lambda(lam)
    npt.assert_array_equal(t.values, [3.0, 4.0, 5.0])
    npt.assert_array_equal(t.source, lam)


def test_in_gamma_pinned():
    assert in_gamma(3, (1.0, 1.0, 1.0))
    assert not in_gamma(1, (-1.0, -1.0, -1.0))
    assert in_gamma(2, (3.0, 1.0, -0.5))


def test_in_gamma_matches_sigma_signs():
    rng = np.random.default_rng(11)
    vals = rng.standard_normal((200, 4))
    for k in range(1, 5):
        mask = gamma_mask(vals, k)
        for row, m in zip(vals, mask):
            want = all(sigma(j, row) > 0 for j in range(1, k + 1))
            assert bool(m) == want


def test_in_gamma_tilde_pinned():
    spec = OperatorSpec(3, 2, 0, 0.1)
    assert in_gamma_tilde(2, spec, (4.0, 1.0, -0.2))
    assert in_gamma_tilde(2, OperatorSpec(3, 2, 0, 0.5), (1.0, 1.0, 1.0))


def test_in_gamma_tilde_alpha_zero_reduces_to_gamma():
    # with alpha = 0 the shifted cone is gamma_{k-1} plus positivity of sigma_k
    rng = np.random.default_rng(12)
    vals = rng.standard_normal((300, 4))
    for k in (1, 2, 3, 4):
        got = gamma_tilde_mask(vals, k, 0.0)
        want = gamma_mask(vals, k - 1) & (sigma(k, vals) > 0) if k > 1 else sigma(1, vals) > 0
        npt.assert_array_equal(got, want)


def test_in_gamma_prime_pinned():
    assert not in_gamma_prime(1, OperatorSpec(2, 1, 0, 0.0), (1.0, -2.0))
    assert in_gamma_prime(2, OperatorSpec(3, 2, 0, 0.0), (10.0, 1.0, 1.0))


def test_in_gamma_prime_is_tilde_membership_of_eta():
    rng = np.random.default_rng(13)
    vals = rng.standard_normal((300, 4)) + 0.5
    for k in (1, 2, 3):
        for alpha in (0.0, 0.5):
            got = gamma_prime_mask(vals, k, alpha)
            want = gamma_tilde_mask(eta_values(vals), k, alpha)
            npt.assert_array_equal(got, want)


def test_gamma_nesting():
    # gamma_{k+1} is contained in gamma_k; same for the shifted family
    rng = np.random.default_rng(14)
    vals = rng.standard_normal((500, 5)) + 0.8
    for k in range(1, 5):
        inner, outer = gamma_mask(vals, k + 1), gamma_mask(vals, k)
        assert not np.any(inner & ~outer)
        ti, to = gamma_tilde_mask(vals, k + 1, 0.5), gamma_tilde_mask(vals, k, 0.5)
        assert not np.any(ti & ~to)


def test_gamma_convexity_midpoints():
    rng = np.random.default_rng(15)
    spec = OperatorSpec(5, 3, 0, 0.5)
    a = sample_cone_batch("gamma", spec, 200, rng)
    b = sample_cone_batch("gamma", spec, 200, rng)
    assert gamma_mask((a + b) / 2.0, 3).all()
    at = sample_cone_batch("gamma_tilde", spec, 200, rng)
    bt = sample_cone_batch("gamma_tilde", spec, 200, rng)
    assert gamma_tilde_mask((at + bt) / 2.0, 3, 0.5).all()


def test_sample_cone_deterministic():
    spec = OperatorSpec(4, 2, 1, 0.5)
    s1 = sample_cone("gamma_tilde", spec, 99)
    s2 = sample_cone("gamma_tilde", spec, 99)
    npt.assert_array_equal(s1.lam.values, s2.lam.values)
    assert s1.cone_id == "gamma_tilde"
    assert s1.seed == 99
    s3 = sample_cone("gamma_tilde", spec, 100)
    assert not np.array_equal(s1.lam.values, s3.lam.values)


def test_sample_cone_membership():
    rng = np.random.default_rng(16)
    for cone_id, check in [
        ("gamma", lambda v, sp: in_gamma(sp.k, v)),
        ("gamma_tilde", lambda v, sp: in_gamma_tilde(sp.k, sp, v)),
        ("gamma_prime", lambda v, sp: in_gamma_prime(sp.k, sp, v)),
    ]:
        for n, k, alpha in [(3, 2, 0.0), (4, 3, 0.5), (5, 5, 3.0), (2, 1, 0.0)]:
            spec = OperatorSpec(n, k, max(k - 2, 0), alpha)
            batch = sample_cone_batch(cone_id, spec, 500, rng)
            assert batch.shape == (500, n)
            assert all(check(v, spec) for v in batch)


def test_sample_cone_full_membership_large_draw():
    spec = OperatorSpec(4, 3, 1, 0.0)
    rng = np.random.default_rng(17)
    batch = sample_cone_batch("gamma", spec, 10_000, rng)
    assert gamma_mask(batch, 3).all()


def test_sample_cone_unknown_id():
    with pytest.raises(InputDomainError):
        sample_cone("gamma_hat", OperatorSpec(3, 2, 0, 0.0), 1)
