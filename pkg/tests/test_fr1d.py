import math

import numpy as np
import pytest

from src.corrections import SchemeParams, build_osfr, iota_of_sd
from src.errors import OperatorError
from src.fr1d import (
    FrOperators,
    LinearAdvection,
    Mesh1D,
    ViscousBurgers,
    broken_sobolev_norm,
    build_operators,
    interpolation_matrix,
    l2_error,
    physical_points,
    project_initial,
    rhs_advection,
    rhs_burgers,
    sample_solution,
    solution_points,
    total_integral,
)
from src.timeint import advance, get_rk, step
from src.vonneumann import cfl_limit

SCHEMES = [
    SchemeParams(3, 0.0, 0.0, 0.0),
    SchemeParams(3, 0.0, 0.0, iota_of_sd(3, 0.0, 0.0)),
    SchemeParams(3, 0.5, -0.3, 0.01),
]


def test_uniform_mesh():
    mesh = Mesh1D.uniform(8)
    assert mesh.n_elements == 8
    assert mesh.length == pytest.approx(2 * math.pi)
    assert np.allclose(mesh.jacobians, math.pi / 8)
    assert mesh.left[0] == 0.0


def test_mesh_rejects_repeated_boundary():
    with pytest.raises(OperatorError):
        Mesh1D(np.array([0.0, 1.0, 1.0]))


def test_dg_p1_operators():
    ops = build_operators(SchemeParams(1, 0.0, 0.0, 0.0))
    r = 1 / math.sqrt(3)
    assert np.allclose(ops.points, [-r, r])
    assert np.allclose(ops.D, [[-math.sqrt(3) / 2, math.sqrt(3) / 2]] * 2)
    assert np.allclose(ops.ell_left, [(1 + math.sqrt(3)) / 2, (1 - math.sqrt(3)) / 2])
    assert np.allclose(ops.g_left, [-0.5 - 1.5 * r, -0.5 + 1.5 * r])
    assert np.allclose(ops.weights, [1.0, 1.0])


@pytest.mark.parametrize("params", SCHEMES)
@pytest.mark.parametrize("rule", ["gauss-legendre", "gauss-jacobi", "gauss-lobatto"])
def test_operator_identities(params, rule):
    ops = build_operators(params, rule)
    assert ops.n_points == params.p + 1
    assert np.allclose(ops.D.sum(axis=1), 0.0, atol=1e-12)
    assert ops.ell_left.sum() == pytest.approx(1.0)
    assert ops.ell_right.sum() == pytest.approx(1.0)
    if rule == "gauss-jacobi":
        assert ops.weights is None
    else:
        # g is degree p and the rule integrates it exactly
        assert ops.weights @ ops.g_left == pytest.approx(-1.0, abs=1e-12)
        assert ops.weights @ ops.g_right == pytest.approx(1.0, abs=1e-12)


def test_unknown_point_rule():
    with pytest.raises(OperatorError, match="unknown point rule"):
        solution_points(SchemeParams(2), "chebyshev")


def test_total_integral_needs_weights():
    params = SchemeParams(2, 0.5, 0.5, 0.0)
    ops = build_operators(params, "gauss-jacobi")
    mesh = Mesh1D.uniform(4)
    with pytest.raises(OperatorError, match="no quadrature weights"):
        total_integral(np.ones((4, 3)), mesh, ops)


def test_interpolation_matrix_hits_nodes():
    points = np.array([-0.5, 0.0, 0.7])
    mat = interpolation_matrix(points, [0.0, 0.2])
    assert np.allclose(mat[0], [0.0, 1.0, 0.0])
    assert mat[1].sum() == pytest.approx(1.0)


def test_projection_and_integral():
    mesh = Mesh1D.uniform(8)
    ops = build_operators(SchemeParams(4))
    ones = project_initial(lambda x: 1.0, mesh, ops)
    assert ones.shape == (8, 5)
    assert total_integral(ones, mesh, ops) == pytest.approx(2 * math.pi, rel=1e-13)
    assert abs(total_integral(project_initial(np.sin, mesh, ops), mesh, ops)) < 1e-12
    single = Mesh1D(np.array([0.0, 1.0]))
    linear = project_initial(lambda x: x, single, build_operators(SchemeParams(1)))
    r = 1 / math.sqrt(3)
    assert np.allclose(linear[0], [(1 - r) / 2, (1 + r) / 2])


def test_sample_solution_reproduces_polynomials():
    mesh = Mesh1D.uniform(5, 0.0, 1.0)
    ops = build_operators(SchemeParams(3))
    state = project_initial(lambda x: x ** 2, mesh, ops)
    x = np.array([0.013, 0.2, 0.41, 0.77, 0.999])
    assert np.allclose(sample_solution(state, mesh, ops, x), x ** 2, atol=1e-12)
    assert l2_error(state, mesh, ops, lambda y: y ** 2) < 1e-12


@pytest.mark.parametrize("params", SCHEMES)
def test_free_stream_preservation(params):
    mesh = Mesh1D.uniform(8)
    ops = build_operators(params)
    state = np.ones((8, params.p + 1))
    for theta in (1.0, 0.5):
        assert np.max(np.abs(rhs_advection(state, mesh, ops, theta=theta))) < 1e-12
    assert np.max(np.abs(rhs_burgers(state, mesh, ops, ViscousBurgers(0.01)))) < 1e-12


def test_advection_is_linear():
    mesh = Mesh1D.uniform(6)
    ops = build_operators(SCHEMES[2])
    rng = np.random.default_rng(3)
    u = rng.standard_normal((6, 4))
    v = rng.standard_normal((6, 4))
    lhs = rhs_advection(2.0 * u - 3.0 * v, mesh, ops, theta=0.7)
    rhs = 2.0 * rhs_advection(u, mesh, ops, theta=0.7) - 3.0 * rhs_advection(v, mesh, ops, theta=0.7)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_theta_out_of_range():
    mesh = Mesh1D.uniform(2)
    ops = build_operators(SchemeParams(1))
    with pytest.raises(OperatorError):
        rhs_advection(np.ones((2, 2)), mesh, ops, theta=1.5)


@pytest.mark.parametrize("params", SCHEMES[:2])
@pytest.mark.parametrize("rule", ["gauss-legendre", "gauss-lobatto"])
def test_conservation(params, rule):
    mesh = Mesh1D.uniform(10)
    ops = build_operators(params, rule)
    rng = np.random.default_rng(11)
    u = rng.standard_normal((10, params.p + 1))
    before = total_integral(u, mesh, ops)

    def rhs(v):
        return rhs_advection(v, mesh, ops, LinearAdvection(1.3))

    after = total_integral(step(get_rk("rk44"), rhs, u, 1e-3), mesh, ops)
    assert after == pytest.approx(before, abs=1e-12)
    burgers = rhs_burgers(u, mesh, ops, ViscousBurgers(0.05))
    assert total_integral(burgers, mesh, ops) == pytest.approx(0.0, abs=1e-11)


def test_first_order_operators():
    ops = FrOperators.first_order()
    mesh = Mesh1D.uniform(4, 0.0, 4.0)
    u = np.array([[1.0], [2.0], [4.0], [8.0]])
    # upwind finite volume: -(u_n - u_{n-1}) / dx
    expected = -(u[:, 0] - np.roll(u[:, 0], 1))
    assert np.allclose(rhs_advection(u, mesh, ops)[:, 0], expected)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_advection_convergence_order(p):
    params = SchemeParams(p)
    ops = build_operators(params)
    tau = cfl_limit(params, "gauss-legendre", get_rk("rk44"), theta=1.0, n_k=64)
    errors, sizes = [], []
    for n in (8, 16, 32, 64):
        mesh = Mesh1D.uniform(n)
        dx = mesh.length / n
        steps = int(math.ceil(1.0 / (0.25 * tau * dx)))
        dt = 1.0 / steps

        def rhs(v, mesh=mesh):
            return rhs_advection(v, mesh, ops)

        u = advance(get_rk("rk44"), rhs, project_initial(np.sin, mesh, ops), dt, steps)
        errors.append(l2_error(u, mesh, ops, lambda x: np.sin(x - 1.0)))
        sizes.append(dx)
    order = np.polyfit(np.log(sizes[1:]), np.log(errors[1:]), 1)[0]
    assert p + 0.7 <= order <= p + 1.5


def test_heat_equation_decay_rate():
    mesh = Mesh1D.uniform(32)
    ops = build_operators(SchemeParams(4))
    flux = ViscousBurgers(1.0, convective=False)
    u0 = project_initial(np.sin, mesh, ops)
    weight = np.sin(physical_points(mesh, ops))
    t, dt = 0.1, 1e-5

    def rhs(v):
        return rhs_burgers(v, mesh, ops, flux)

    u = advance(get_rk("rk44"), rhs, u0, dt, int(round(t / dt)))
    ratio = total_integral(u * weight, mesh, ops) / total_integral(u0 * weight, mesh, ops)
    assert -math.log(ratio) / t == pytest.approx(1.0, rel=1e-4)


def _characteristic_solution(x, t, u0, du0):
    xi = np.array(x, dtype=float)
    for _ in range(50):
        g = xi + t * u0(xi) - x
        xi = xi - g / (1.0 + t * du0(xi))
    return u0(xi)


def test_inviscid_burgers_matches_characteristics():
    def u0(x):
        return 1.0 + 0.2 * np.sin(x)

    def du0(x):
        return 0.2 * np.cos(x)

    errors = []
    for n in (16, 32):
        mesh = Mesh1D.uniform(n)
        ops = build_operators(SchemeParams(3))

        def rhs(v, mesh=mesh):
            return rhs_burgers(v, mesh, ops, ViscousBurgers(0.0))

        u = advance(get_rk("rk44"), rhs, project_initial(u0, mesh, ops), 2e-3, 250)
        errors.append(l2_error(u, mesh, ops, lambda x: _characteristic_solution(x, 0.5, u0, du0)))
    assert errors[1] < 1e-5
    assert errors[1] < errors[0] / 4


def _energy_rate(state, mesh, ops, params):
    r = rhs_advection(state, mesh, ops)
    s = 1.0 / np.max(np.abs(r))
    plus = broken_sobolev_norm(state + s * r, mesh, ops, params)
    minus = broken_sobolev_norm(state - s * r, mesh, ops, params)
    return (plus - minus) / (2 * s), plus + minus


@pytest.mark.parametrize("params,pair", [
    (SchemeParams(3, 0.0, 0.0, 0.0), None),
    (SchemeParams(3, 0.0, 0.0, iota_of_sd(3, 0.0, 0.0)), None),
    (SchemeParams(3, 0.0, 0.0, 0.005), build_osfr(3, 0.01)),
])
def test_semi_discrete_energy_does_not_grow(params, pair):
    mesh = Mesh1D.uniform(12)
    ops = build_operators(params, pair=pair)
    rng = np.random.default_rng(5)
    for _ in range(5):
        state = rng.standard_normal((12, 4))
        rate, scale = _energy_rate(state, mesh, ops, params)
        assert rate <= 1e-10 * scale


@pytest.mark.parametrize("params", [SchemeParams(3), SchemeParams(3, 0.0, 0.0, iota_of_sd(3, 0.0, 0.0))])
def test_discrete_energy_witness(params):
    mesh = Mesh1D.uniform(16)
    ops = build_operators(params)
    tau = cfl_limit(params, "gauss-legendre", get_rk("rk44"), n_k=64)
    dt = 0.5 * tau * mesh.length / mesh.n_elements
    u = project_initial(np.sin, mesh, ops)
    energy = [broken_sobolev_norm(u, mesh, ops, params)]
    for _ in range(100):
        u = step(get_rk("rk44"), lambda v: rhs_advection(v, mesh, ops), u, dt)
        energy.append(broken_sobolev_norm(u, mesh, ops, params))
    growth = np.diff(energy)
    assert np.all(growth <= 1e-12 * energy[0])
