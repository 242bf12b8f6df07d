import math

import numpy as np
import pytest

from dilute_anderson.model import RngContract, make_energy_from_E, make_energy_from_k, parse_disorder, pure_atoms
from dilute_anderson.pruefer import (
    action,
    action_grid,
    grid_psi_atoms,
    hat_action,
    ks_distance_uniform_mod_pi,
    printed_half_width_grid,
    run_hat_orbit,
    run_orbit,
    step_log_norm,
)
from dilute_anderson.sl2 import conjugated_transfer


def test_action_anchor_exact():
    E = make_energy_from_k(1.1)
    gen = RngContract(0).generator()
    for theta in gen.uniform(-10, 10, 200):
        assert action(E, 0.0, theta) == theta + E.k


def test_action_at_vertical_phase():
    # the impurity kick vanishes where cos(theta) = 0
    E = make_energy_from_k(0.7)
    for v in (0.5, -3.0, 10.0):
        assert action(E, v, math.pi / 2) == pytest.approx(math.pi / 2 + E.k, abs=1e-14)


def test_action_worked_example():
    # k = pi/2, v = 2, theta = pi/4: S = pi/2 + pi/4 + atan(-1) - atan(1) = pi/4,
    # and the matrix applied to e_{pi/4} stays on the same projective direction
    E0 = make_energy_from_E(0.0)
    s = action(E0, 2.0, math.pi / 4)
    assert s == pytest.approx(math.pi / 4, abs=1e-12)
    m = conjugated_transfer(E0, 2.0)
    x, y = m.apply(math.cos(math.pi / 4), math.sin(math.pi / 4))
    cross = x * math.sin(s) - y * math.cos(s)
    assert abs(cross) <= 1e-12 * math.hypot(x, y)


def test_action_parallelism_random():
    gen = RngContract(7).generator()
    for _ in range(10_000):
        k = gen.uniform(0.05, math.pi - 0.05)
        v = gen.uniform(-8, 8)
        theta = gen.uniform(-7, 7)
        E = make_energy_from_k(k)
        s = action(E, v, theta)
        m = conjugated_transfer(E, v)
        x, y = m.apply(math.cos(theta), math.sin(theta))
        cross = x * math.sin(s) - y * math.cos(s)
        assert abs(cross) <= 1e-10 * math.hypot(x, y)


def test_action_degree_law():
    gen = RngContract(8).generator()
    for _ in range(2000):
        E = make_energy_from_k(gen.uniform(0.1, math.pi - 0.1))
        v = gen.uniform(-5, 5)
        theta = gen.uniform(-4, 4)
        assert action(E, v, theta + math.pi) - action(E, v, theta) == pytest.approx(
            math.pi, abs=1e-12
        )


def test_action_monotone_lift():
    thetas = np.linspace(0.0, math.pi, 10_001)
    for k, v in ((1.3, 4.0), (0.4, -6.0), (2.9, 1.0)):
        E = make_energy_from_k(k)
        s = action_grid(E, v, thetas)
        assert np.all(np.diff(s) > 0.0)


def test_action_continuity_in_v():
    # Lipschitz in v with constant 1 + c^2 + |c| (valid for |v| >= 1)
    gen = RngContract(9).generator()
    h = 1e-6
    for _ in range(2000):
        E = make_energy_from_k(gen.uniform(0.15, math.pi - 0.15))
        v = gen.uniform(1.0, 3.0) * gen.choice([-1.0, 1.0])
        theta = gen.uniform(0, math.pi)
        c = v / E.sin_k
        bound = (1.0 + c * c + abs(c)) * h
        assert abs(action(E, v + h, theta) - action(E, v, theta)) <= bound


def test_hat_action():
    E = make_energy_from_k(0.8)
    assert hat_action(E, 0.0, 1.0, 0.3) == action(E, 1.0, 0.3)
    assert hat_action(E, 0.5, 0.0, 0.3) == pytest.approx(0.3 + E.k + 0.5, abs=1e-15)
    assert hat_action(E, 0.5, 2.0, 0.3 + math.pi) - hat_action(E, 0.5, 2.0, 0.3) == pytest.approx(
        math.pi, abs=1e-12
    )


def test_step_log_norm_matches_matrix():
    gen = RngContract(10).generator()
    for _ in range(2000):
        E = make_energy_from_k(gen.uniform(0.1, math.pi - 0.1))
        v = gen.uniform(-6, 6)
        theta = gen.uniform(-4, 4)
        m = conjugated_transfer(E, v)
        x, y = m.apply(math.cos(theta), math.sin(theta))
        assert step_log_norm(E, v, theta) == pytest.approx(math.log(math.hypot(x, y)), abs=1e-11)
    assert step_log_norm(E, 0.0, 1.23) == 0.0


def test_run_orbit_free_chain_exact():
    E = make_energy_from_k(1.9)
    orbit = run_orbit(E, parse_disorder("2:1", 0.0), n_steps=5000, burn_in=100,
                      rng=RngContract(3))
    assert np.all(orbit.increments == E.k)
    assert np.all(orbit.log_norms == 0.0)
    assert orbit.thetas.size == orbit.n_steps + 1


def test_run_orbit_deterministic():
    E = make_energy_from_k(1.2)
    d = parse_disorder("2:1", 0.3)
    a = run_orbit(E, d, 20_000, rng=RngContract(11, 5))
    b = run_orbit(E, d, 20_000, rng=RngContract(11, 5))
    assert np.array_equal(a.thetas, b.thetas)
    assert np.array_equal(a.log_norms, b.log_norms)
    c = run_orbit(E, d, 20_000, rng=RngContract(11, 6))
    assert not np.array_equal(a.thetas, c.thetas)


def test_run_orbit_increment_range():
    E = make_energy_from_k(2.2)
    orbit = run_orbit(E, parse_disorder("5:1", 0.5), 50_000, rng=RngContract(12))
    assert np.all(orbit.increments > E.k - math.pi)
    assert np.all(orbit.increments < E.k + math.pi)
    assert orbit.thetas[1:] == pytest.approx(orbit.thetas[:-1] + orbit.increments, abs=0)


def test_run_orbit_degenerate_density_one():
    # rho = 1 with one atom is the deterministic chain at that potential
    E = make_energy_from_k(1.0)
    orbit = run_orbit(E, parse_disorder("1.5:1", 1.0), 1000, burn_in=0,
                      rng=RngContract(13), theta0=0.2)
    th = 0.2
    for i in range(5):
        expected = action(E, 1.5, th)
        assert orbit.thetas[i + 1] == pytest.approx(expected, abs=1e-12)
        th = orbit.thetas[i + 1]


def test_orbit_arrays_immutable():
    E = make_energy_from_k(1.0)
    orbit = run_orbit(E, parse_disorder("1:1", 0.2), 100, burn_in=0, rng=RngContract(14))
    with pytest.raises(ValueError):
        orbit.thetas[0] = 0.0


def test_hat_orbit_grid_psi_values():
    atoms0 = pure_atoms("0:1")
    E = make_energy_from_k(1.3)
    orbit = run_hat_orbit(E, atoms0, "grid", 40_000, burn_in=0, rng=RngContract(15), q=2)
    # with delta_0 atoms the increment is k + psi (recovered to rounding)
    psis = orbit.increments - E.k
    near_zero = np.abs(psis) <= 5e-16
    near_half = np.abs(psis - math.pi / 2) <= 5e-16
    assert np.all(near_zero | near_half)
    frac = np.mean(near_zero)
    assert 0.45 <= frac <= 0.55
    assert np.all(orbit.log_norms == 0.0)


def test_grid_psi_atoms():
    assert grid_psi_atoms(2) == pytest.approx([0.0, math.pi / 2])
    assert grid_psi_atoms(3) == pytest.approx([0.0, math.pi / 3, 2 * math.pi / 3])
    g = printed_half_width_grid(2)
    assert g == pytest.approx([-math.pi / 8, math.pi / 8])
    assert np.diff(printed_half_width_grid(5)) == pytest.approx(
        np.full(4, math.pi / 10), abs=1e-15
    )


def test_hat_orbit_uniform_phase_distribution():
    E = make_energy_from_k(0.9)
    orbit = run_hat_orbit(E, pure_atoms("2:1"), "uniform", 100_000, rng=RngContract(16))
    assert ks_distance_uniform_mod_pi(orbit.thetas[1:]) <= 0.01


def test_hat_orbit_deterministic():
    E = make_energy_from_k(1.7)
    atoms = pure_atoms("2:0.5,1:0.5")
    a = run_hat_orbit(E, atoms, "grid", 10_000, rng=RngContract(17), q=3)
    b = run_hat_orbit(E, atoms, "grid", 10_000, rng=RngContract(17), q=3)
    assert np.array_equal(a.thetas, b.thetas)
