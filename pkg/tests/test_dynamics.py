import math

import numpy as np
import pytest

from ghostcartan.charges import PhaseModel
from ghostcartan.dynamics import (
    CompiledHamiltonian,
    ExtendedStateGrassmann,
    grassmann_state,
    integrate,
    jacobi_vs_finite_difference,
    matrix_state,
    monitor,
    order_check,
    rhs,
)
from ghostcartan.expr import parse
from ghostcartan.grassmann import GrassmannAlgebra


def model(text, n=1):
    return PhaseModel(n, parse(text, n))


def test_oscillator_vector_field_by_hand(oscillator):
    d = rhs(oscillator, matrix_state(oscillator, [1, 0]))
    assert np.allclose(d.phi, [0, -1])
    assert np.allclose(d.J, [[0, 1], [-1, 0]])


def test_free_particle_jacobi_matrix_is_exact():
    m = model("phi[2]^2/2")
    traj = integrate(m, matrix_state(m, [0.3, 1.0]), 0.01, 250)
    J = traj.jacobians()[0]
    for k in (0, 100, 250):
        t = traj.times[k]
        assert np.allclose(J[k], [[1, t], [0, 1]], atol=1e-12)


def test_oscillator_period_closure_and_monodromy(oscillator):
    steps = 6284
    traj = integrate(oscillator, matrix_state(oscillator, [1, 0]), 2 * math.pi / steps, steps)
    assert np.abs(traj.phi[-1] - traj.phi[0]).max() <= 1e-8
    J, K = traj.jacobians()
    assert np.abs(J[-1] - np.eye(2)).max() <= 1e-8
    assert all(v <= 1e-8 for v in monitor(oscillator, traj).values())


def test_monitor_is_zero_at_start(quartic):
    traj = integrate(quartic, matrix_state(quartic, [1, 0.5]), 0.1, 0)
    assert monitor(quartic, traj) == {k: 0.0 for k in
                                      ("energy_drift", "symplectic_defect", "duality_defect", "nh_defect", "k_defect")}


def test_quartic_invariants_hold(quartic):
    traj = integrate(quartic, matrix_state(quartic, [1, 0.5]), 1e-3, 10000)
    report = monitor(quartic, traj)
    assert max(report.values()) <= 1e-7
    J, K = traj.jacobians()
    assert np.abs(np.linalg.det(J) - 1).max() <= 1e-9
    assert np.allclose(K[-1], np.linalg.inv(J[-1]).T, atol=1e-9)


def test_rk4_order_by_step_halving(quartic):
    ratios = order_check(quartic, [1, 0.5], 10.0, 0.02)
    assert 12 <= ratios["state"] <= 20


def test_grassmann_mode_reproduces_matrix_jacobians(quartic):
    g = integrate(quartic, grassmann_state(quartic, [1, 0.5]), 1e-2, 200)
    m = integrate(quartic, matrix_state(quartic, [1, 0.5]), 1e-2, 200)
    for a, b in zip(g.jacobians(), m.jacobians()):
        assert np.abs(a - b).max() <= 1e-12
    assert np.abs(g.phi - m.phi).max() <= 1e-12
    # phi soul stays zero: its first equation is ghost-free
    assert np.abs(g.states[:, 0, :, 1:]).max() == 0


def test_quadratic_model_has_no_lambda_soul():
    m = model("(phi[1]^2 + 3*phi[2]^2)/2 + phi[1]*phi[2]")
    traj = integrate(m, grassmann_state(m, [1, 0], lam0=[0.5, 0.2]), 1e-2, 50)
    assert np.abs(traj.lam[:, :, 1:]).max() == 0


def test_cubic_source_one_euler_step_by_hand():
    # H = q^3/3, c^1 = e*theta_1, cb_2 = f*theta_2: lam_1' gets -i cb_2 omega^{21} H_qqq c^1 = 2 i e f theta_2 theta_1
    m = model("phi[1]^3/3")
    e, f, q = 0.7, -1.3, 0.4
    alg = GrassmannAlgebra.of(2)
    c0 = np.array([e * alg.seed(1), 0 * alg.seed(1)])
    cb0 = np.array([0 * alg.seed(1), f * alg.seed(2)])
    s = grassmann_state(m, [q, 0], c0=c0, cbar0=cb0, G=2)
    d = rhs(m, s)
    theta2_theta1 = -1  # theta_2 theta_1 = -theta_1 theta_2, stored at mask 0b11
    assert d.lam[0, 3] == pytest.approx(2j * e * f * theta2_theta1)
    h = 1e-3
    step = s.lam + h * d.lam
    assert step[0, 3] == pytest.approx(-2j * e * f * h)
    assert np.abs(d.lam[1]).max() == 0


def test_jacobi_fields_match_finite_differences(oscillator, quartic):
    assert jacobi_vs_finite_difference(oscillator, [1, 0], 1e-4, 1.0) <= 1e-6
    errs = [jacobi_vs_finite_difference(quartic, [1, 0.5], d, 1.0) for d in (1e-2, 1e-3, 1e-4)]
    assert errs[-1] <= 1e-6
    slope = np.polyfit(np.log10([1e-2, 1e-3, 1e-4]), np.log10(errs), 1)[0]
    assert 1.8 <= slope <= 2.2


def test_validation():
    m = model("phi[1]^2")
    with pytest.raises(ValueError):
        integrate(m, matrix_state(m, [1, 0]), 0.0, 10)
    with pytest.raises(ValueError):
        matrix_state(m, [1, 0, 0])
    with pytest.raises(ValueError):
        CompiledHamiltonian(model("i*phi[1]^2"))
    with pytest.raises(ValueError):
        integrate(m, matrix_state(m, [1, 0]), 0.1, 1, mode="grassmann")


def test_n2_model_runs_in_both_modes(models_dir):
    from ghostcartan.modelfile import load_model

    m = load_model(models_dir / "coupled.model")
    g = integrate(m, grassmann_state(m, [1, 0, 0, 0.5]), 1e-2, 20)
    mm = integrate(m, matrix_state(m, [1, 0, 0, 0.5]), 1e-2, 20)
    assert isinstance(g.state(0), ExtendedStateGrassmann)
    assert np.abs(g.jacobians()[0] - mm.jacobians()[0]).max() <= 1e-12
    assert max(monitor(m, mm).values()) <= 1e-9
