"""Grids, stencils, the damped-Newton solve, and snapshot round trips."""

import numpy as np
import numpy.testing as npt
import pytest

from shq import (
    ConfigurationError,
    CorruptInputError,
    DomainSpec,
    GridSolution,
    InputDomainError,
    OperatorSpec,
    RHSSpec,
    SolveOptions,
    discretize,
    load_snapshot,
    newton_step,
    residual,
    save_snapshot,
    solve,
)
from shq.presets import constant_rhs, quadratic_case, radial_quartic_case, seed_constant


def test_operator_spec_validation():
    with pytest.raises(InputDomainError):
        OperatorSpec(3, 2, 2, 0.0)  # l must stay below k
    with pytest.raises(InputDomainError):
        OperatorSpec(3, 4, 0, 0.0)
    with pytest.raises(InputDomainError):
        OperatorSpec(3, 2, 0, -1.0)


def test_domain_spec_validation():
    with pytest.raises(ConfigurationError):
        DomainSpec("ball", 3, 7)  # fewer than 9 points per axis
    with pytest.raises(ConfigurationError):
        DomainSpec("cylinder", 3, 9)
    with pytest.raises(ConfigurationError):
        DomainSpec("ball", 4, 9)


def test_discretize_box_interior_count():
    grid = discretize(DomainSpec("box", 2, 9))
    assert int(grid.is_interior.sum()) == 49  # (9-2)^2


def test_discretize_ball_mask():
    grid = discretize(DomainSpec("ball", 2, 17))
    r2 = np.sum(grid.x**2, axis=1)
    inside = grid.is_interior.ravel()
    assert np.all(r2[inside] < 1.0)
    # center is interior, corner is not
    assert bool(inside[np.argmin(r2)])


def test_discretize_ball_nodes_on_sphere_are_boundary():
    # lattice points that land exactly on the sphere belong to the
    # boundary of the open ball: mesh 13 has (2/3, 2/3, 1/3) with
    # 4/9 + 4/9 + 1/9 = 1, mesh 21 has (0.6, 0.8, 0)
    for mesh, node in [(13, (2 / 3, 2 / 3, 1 / 3)), (21, (0.6, 0.8, 0.0))]:
        grid = discretize(DomainSpec("ball", 3, mesh))
        d = np.abs(grid.x - np.array(node)).sum(axis=1)
        at = int(np.argmin(d))
        assert d[at] < 1e-12
        assert not grid.is_interior.ravel()[at]


def test_stencil_exact_on_quadratic():
    grid = discretize(DomainSpec("box", 2, 11))
    u = 0.5 * np.sum(grid.x**2, axis=1)
    state = GridSolution(grid, OperatorSpec(2, 1, 0, 0.0), u)
    want = np.broadcast_to(np.eye(2), state.d2u.shape)
    npt.assert_allclose(state.d2u, want, atol=1e-12)


def test_solve_manufactured_constant_rhs():
    # u* = (|x|^2 - 1)/2 on the unit ball; D^2 u* = I so the quotient is
    # constant and the stencil is exact: the solve lands on u* itself
    for k, l, alpha, f in [(2, 0, 1.0, 18.0), (2, 1, 0.0, 2.0)]:
        spec = OperatorSpec(3, k, l, alpha)
        domain = DomainSpec("ball", 3, 9)
        case = quadratic_case(spec, domain)
        sol = solve(domain, case.rhs, spec, boundary=case.boundary)
        exact = case.exact(sol.grid.x)
        err = np.abs(sol.u - exact)[sol.grid.is_interior.ravel()].max()
        assert err <= 1e-8
        assert sol.admissible
        assert sol.residual_norm <= 1e-8
        npt.assert_allclose(constant_rhs(f).f(sol.grid.x, sol.u, sol.du), np.full(sol.u.shape, f))


def test_solve_negative_in_interior():
    spec = OperatorSpec(3, 2, 0, 1.0)
    domain = DomainSpec("ball", 3, 9)
    case = quadratic_case(spec, domain)
    sol = solve(domain, case.rhs, spec, boundary=case.boundary)
    assert np.all(sol.u[sol.grid.is_interior.ravel()] < 0.0)


def test_solve_quartic_converges_at_second_order():
    spec = OperatorSpec(2, 2, 0, 1.0)
    errs, hs = [], []
    for mesh in (17, 33):
        domain = DomainSpec("ball", 2, mesh)
        case = radial_quartic_case(spec, domain)
        sol = solve(domain, case.rhs, spec, boundary=case.boundary)
        exact = case.exact(sol.grid.x)
        errs.append(np.abs(sol.u - exact)[sol.grid.is_interior.ravel()].max())
        hs.append(float(sol.grid.h[0]))
    order = np.log(errs[0] / errs[1]) / np.log(hs[0] / hs[1])
    assert 1.7 <= order <= 2.3


def test_seed_constant_matches_quadratic_quotient():
    spec = OperatorSpec(3, 2, 0, 1.0)
    assert seed_constant(spec) == 18.0
    assert seed_constant(OperatorSpec(3, 2, 1, 0.0)) == 2.0


def test_newton_step_fixed_point():
    spec = OperatorSpec(3, 2, 0, 1.0)
    domain = DomainSpec("ball", 3, 9)
    case = quadratic_case(spec, domain)
    sol = solve(domain, case.rhs, spec, boundary=case.boundary)
    stepped = newton_step(sol, case.rhs, spec)
    assert np.abs(stepped.u - sol.u).max() <= 1e-8


def test_newton_step_decreases_residual():
    spec = OperatorSpec(3, 2, 0, 1.0)
    domain = DomainSpec("ball", 3, 9)
    case = quadratic_case(spec, domain)
    start = solve(domain, case.rhs, spec, boundary=case.boundary)
    bumped = RHSSpec(lambda x, u, du: 1.01 * case.rhs.f(x, u, du))
    res0, _ = residual(start, bumped)
    stepped = newton_step(start, bumped, spec)
    res1, _ = residual(stepped, bumped)
    assert np.abs(res1).max() < np.abs(res0).max()
    assert stepped.admissible


def test_solve_rejects_nonpositive_rhs():
    spec = OperatorSpec(3, 2, 0, 1.0)
    domain = DomainSpec("ball", 3, 9)
    with pytest.raises(ConfigurationError):
        solve(domain, RHSSpec(lambda x, u, du: np.zeros(x.shape[0])), spec)


def test_snapshot_round_trip(tmp_path):
    spec = OperatorSpec(3, 2, 0, 1.0)
    domain = DomainSpec("ball", 3, 9)
    case = quadratic_case(spec, domain)
    sol = solve(domain, case.rhs, spec, boundary=case.boundary)
    p1 = tmp_path / "state.snap"
    p2 = tmp_path / "state2.snap"
    save_snapshot(sol, str(p1))
    back = load_snapshot(str(p1))
    npt.assert_array_equal(back.u, sol.u)  # bit-exact fields
    npt.assert_array_equal(back.du, sol.du)
    npt.assert_array_equal(back.d2u, sol.d2u)
    assert back.spec == sol.spec
    assert back.grid.domain == sol.grid.domain
    save_snapshot(back, str(p2))
    assert p1.read_bytes() == p2.read_bytes()  # byte-exact re-serialization
    # header carries the operator and mesh geometry
    head = p1.read_text().splitlines()[0].split()
    assert head[:4] == ["3", "2", "0", repr(1.0)]


def test_snapshot_detects_corruption(tmp_path):
    spec = OperatorSpec(3, 2, 0, 1.0)
    domain = DomainSpec("ball", 3, 9)
    case = quadratic_case(spec, domain)
    sol = solve(domain, case.rhs, spec, boundary=case.boundary)
    p = tmp_path / "state.snap"
    save_snapshot(sol, str(p))
    text = p.read_text()
    lines = text.splitlines()
    p.write_text("\n".join(lines[:-3]) + "\n")  # truncate node records
    with pytest.raises(CorruptInputError):
        load_snapshot(str(p))
    # a flipped digit in a node record must also fail the checksum
    p.write_text(text.replace("0.5", "0.4", 1))
    with pytest.raises(CorruptInputError):
        load_snapshot(str(p))
