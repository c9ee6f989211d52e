import numpy as np

import copolyap as cp
from copolyap.poly import Polynomial
from copolyap.sim import evaluate_along, read_csv, simulate, step, write_csv


def test_step_origin_is_fixed(quadfield2d):
    x_next, eta = step(np.zeros(2), quadfield2d.field, 1e-3)
    assert np.array_equal(x_next, np.zeros(2))
    assert np.array_equal(eta, np.zeros(2))


def test_step_rotation_face(rotation2d):
    x_next, eta = step(np.array([1.0, 0.0]), rotation2d.field, 1e-3)
    assert np.array_equal(x_next, [1.0, 0.0])
    assert np.allclose(eta, [0.0, 1.0])


def test_step_interior_no_multiplier(stable2d):
    # roundoff in (x_next - x)/dt - f(x) is amplified by 1/dt
    x_next, eta = step(np.array([1.0, 1.0]), stable2d.field, 1e-4)
    assert np.allclose(eta, np.zeros(2), atol=1e-11)
    assert np.allclose(x_next, [1.0 - 3e-4, 1.0 - 2e-4])


def test_simulate_decay_matches_fine_reference(stable2d):
    traj = simulate(stable2d, [1.0, 1.0], T=10.0, dt=1e-3)
    ref = simulate(stable2d, [1.0, 1.0], T=10.0, dt=1e-5)
    n1 = np.linalg.norm(traj.final_state())
    n2 = np.linalg.norm(ref.final_state())
    assert n1 <= 1e-2
    assert abs(n1 - n2) <= 1e-3


def test_simulate_projects_initial_point(stable2d):
    traj = simulate(stable2d, [-1.0, -1.0], T=0.1, dt=1e-3)
    assert np.array_equal(traj.states[0], [0.0, 0.0])
    assert np.array_equal(traj.final_state(), [0.0, 0.0])


def test_rotation_freezes_on_boundary(rotation2d):
    traj = simulate(rotation2d, [1.0, 1.0], T=np.pi / 2, dt=1e-4)
    target = np.array([np.sqrt(2.0), 0.0])
    assert np.linalg.norm(traj.final_state() - target) <= 5 * 1e-4


def test_confinement(stable2d, rotation2d, quadfield2d, unstable2d):
    for prob in (stable2d, rotation2d, quadfield2d, unstable2d):
        traj = simulate(prob, [0.7, 1.3], T=2.0, dt=1e-3)
        assert traj.states.min() >= -1e-9


def test_multiplier_estimate_bound(stable2d, rotation2d):
    for prob in (stable2d, rotation2d):
        traj = simulate(prob, [1.0, 0.5], T=3.0, dt=1e-3)
        fvals = np.array(
            [[f.eval(x) for f in prob.field] for x in traj.states]
        )
        eta_norm = np.linalg.norm(traj.multipliers, axis=1)
        f_norm = np.linalg.norm(fvals, axis=1)
        assert np.all(eta_norm <= f_norm + 1e-12)


def test_continuity_in_initial_conditions(stable2d):
    A = np.array([[-1.0, -2.0], [-1.0, -1.0]])
    L = np.linalg.norm(A, 2)
    dt = 1e-3
    rng = np.random.default_rng(0)
    for _ in range(25):
        z = rng.uniform(0, 2, 2)
        zh = rng.uniform(0, 2, 2)
        ta = simulate(stable2d, z, T=1.0, dt=dt)
        tb = simulate(stable2d, zh, T=1.0, dt=dt)
        for tau in (0.1, 1.0):
            k = int(round(tau / dt))
            lhs = np.linalg.norm(ta.states[k] - tb.states[k])
            rhs = np.exp(L * tau) * np.linalg.norm(z - zh) * (1 + 10 * dt)
            assert lhs <= rhs


def test_homogeneity_scaling(quadfield2d):
    dt = 1e-3
    for lam in (0.5, 2.0):
        a = simulate(quadfield2d, [lam, 0.5 * lam], T=2.0, dt=dt)
        b = simulate(quadfield2d, [1.0, 0.5], T=2.0 * lam, dt=dt * lam)
        for k in range(0, len(a.states), 100):
            err = np.linalg.norm(a.states[k] - lam * b.states[k])
            assert err <= 10 * dt


def test_non_superposition_gap(rotation2d):
    dt = 1e-4
    z = simulate(rotation2d, [1.0, 1.0], T=np.pi / 2, dt=dt)
    x1 = simulate(rotation2d, [1.0, 0.0], T=np.pi / 2, dt=dt)
    x2 = simulate(rotation2d, [0.0, 1.0], T=np.pi / 2, dt=dt)
    gap = np.linalg.norm(
        z.final_state() - (x1.final_state() + x2.final_state())
    )
    assert gap >= 0.5


def test_evaluate_along_decreases(stable2d, quad_cert_stable2d):
    traj = simulate(stable2d, [1.0, 1.0], T=5.0, dt=1e-3)
    stats = evaluate_along(quad_cert_stable2d, traj)
    assert stats.violations == 0
    assert stats.max_forward_diff <= stats.tol


def test_evaluate_along_constant_zero(stable2d, quad_cert_stable2d):
    traj = simulate(stable2d, [0.0, 0.0], T=0.5, dt=1e-3)
    stats = evaluate_along(quad_cert_stable2d, traj)
    assert np.array_equal(stats.values, np.zeros(len(traj.times)))


def test_unstable_growth(unstable2d, quad_cert_stable2d):
    traj = simulate(unstable2d, [0.0, 1.0], T=5.0, dt=1e-3)
    assert np.linalg.norm(traj.final_state()) > np.linalg.norm(traj.states[0])
    stats = evaluate_along(quad_cert_stable2d, traj)
    assert stats.max_forward_diff > stats.tol


def test_blowup_truncates():
    f = Polynomial(1, {(2,): 1.0})  # xdot = x^2 blows up
    prob = cp.ProblemSpec(n=1, cone=cp.OrthantCone(1), field=(f,))
    traj = simulate(prob, [10.0], T=1.0, dt=1e-3)
    assert traj.truncated
    assert len(traj.times) < 1001


def test_csv_round_trip(tmp_path, stable2d, quad_cert_stable2d):
    traj = simulate(stable2d, [1.0, 0.5], T=0.1, dt=1e-3)
    path = tmp_path / "traj.csv"
    write_csv(traj, path, cert=quad_cert_stable2d)
    header = path.read_text().splitlines()[0]
    assert header == "t,x1,x2,eta1,eta2,V"
    back = read_csv(path)
    assert np.allclose(back.states, traj.states, atol=1e-11)
    assert np.allclose(back.times, traj.times, atol=1e-11)


def test_times_uniform(stable2d):
    traj = simulate(stable2d, [1.0, 1.0], T=0.5, dt=1e-3)
    assert np.allclose(np.diff(traj.times), 1e-3, atol=1e-15)
