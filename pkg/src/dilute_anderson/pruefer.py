"""Projective actions of the conjugated transfer matrices as explicit lifts on R,
and orbit generation for the physical chain and the auxiliary hat chain.

The lift of the action of R_k (1 + P) is branch-free: the unipotent kick
(1+P) e_theta = (cos theta, sin theta - c cos theta) preserves the sign of the
first component, so the pre-rotation angle stays inside its half-circle and the
lift is

    S(theta) = theta + k + arctan(tan theta - c) - arctan(tan theta),

with the kick vanishing when cos theta = 0. This anchors S(theta) = theta + k
at v = 0, is continuous in v, and satisfies S(theta + pi) = S(theta) + pi
without any winding bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import ConfigurationError, DisorderSpec, DomainError, EnergyPoint, RngContract

DEFAULT_BURN_IN = 10_000
DEFAULT_THETA0 = 0.1


def lift_kick(theta: float, c: float) -> float:
    """The impurity part of the lift: arctan(tan theta - c) - arctan(tan theta)."""
    if c == 0.0:
        return 0.0
    ct = math.cos(theta)
    if ct == 0.0:
        return 0.0
    t = math.tan(theta)
    return math.atan(t - c) - math.atan(t)


def action(E: EnergyPoint, v: float, theta: float) -> float:
    """Lifted projective action of M T(E, v) M^{-1} on the phase theta."""
    return theta + E.k + lift_kick(theta, v / E.sin_k)


def hat_action(E: EnergyPoint, psi: float, v: float, theta: float) -> float:
    """Lifted action of the auxiliary matrix R_psi M T M^{-1}: action + psi."""
    return action(E, v, theta) + psi


def action_grid(E: EnergyPoint, v: float, thetas: np.ndarray) -> np.ndarray:
    """Vectorized action over an array of phases."""
    thetas = np.asarray(thetas, dtype=float)
    c = v / E.sin_k
    if c == 0.0:
        return thetas + E.k
    ct = np.cos(thetas)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.tan(thetas)
        kick = np.arctan(t - c) - np.arctan(t)
    kick = np.where(ct == 0.0, 0.0, kick)
    return thetas + E.k + kick


def step_log_norm(E: EnergyPoint, v: float, theta: float) -> float:
    """log ||M T(E, v) M^{-1} e_theta||; exactly 0 for v = 0 (pure rotation)."""
    if v == 0.0:
        return 0.0
    c = v / E.sin_k
    ct = math.cos(theta)
    st = math.sin(theta)
    u = st - c * ct
    return 0.5 * math.log(ct * ct + u * u)


def log_norm_grid(E: EnergyPoint, v: float, thetas: np.ndarray) -> np.ndarray:
    """Vectorized step_log_norm over an array of phases."""
    thetas = np.asarray(thetas, dtype=float)
    if v == 0.0:
        return np.zeros_like(thetas)
    c = v / E.sin_k
    ct = np.cos(thetas)
    u = np.sin(thetas) - c * ct
    return 0.5 * np.log(ct * ct + u * u)


@dataclass(frozen=True)
class PrueferOrbit:
    """Unwrapped phase trajectory with per-step log-norms and increments.

    thetas has one more entry than log_norms/increments; thetas[0] is the
    phase after burn-in.
    """

    thetas: np.ndarray
    log_norms: np.ndarray
    increments: np.ndarray

    def __post_init__(self):
        n = self.increments.size
        if self.log_norms.size != n or self.thetas.size != n + 1:
            raise ConfigurationError("inconsistent orbit array lengths")
        for arr in (self.thetas, self.log_norms, self.increments):
            arr.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return self.increments.size


def sample_potentials(disorder: DisorderSpec, n: int, gen: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. site potentials from (1-rho) delta_0 + rho * atoms.

    One uniform per site: u < rho selects an impurity, and u/rho re-used as the
    atom selector, so the draw is a single deterministic pass.
    """
    u = gen.random(n)
    v = np.zeros(n)
    rho = disorder.rho
    if rho > 0.0:
        hit = u < rho
        cumw = disorder.cumulative_weights()
        idx = np.searchsorted(cumw, u[hit] / rho, side="right")
        np.minimum(idx, len(cumw) - 1, out=idx)
        v[hit] = disorder.values[idx]
    return v


def sample_atoms(disorder: DisorderSpec, n: int, gen: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. impurity values from the atoms alone (no delta_0 part)."""
    cumw = disorder.cumulative_weights()
    idx = np.searchsorted(cumw, gen.random(n), side="right")
    np.minimum(idx, len(cumw) - 1, out=idx)
    return disorder.values[idx]


def grid_psi_atoms(q: int, offset: float = 0.0) -> np.ndarray:
    """The q-point rotation-phase grid {offset + pi j / q : j = 0..q-1}.

    The pi/q spacing (with zero offset) is the grid for which averaging
    e^{2 i m psi} gives exactly 1 when q | m and 0 otherwise.
    """
    if q < 2:
        raise DomainError(f"grid law needs q >= 2, got {q}")
    return offset + math.pi * np.arange(q) / q


def printed_half_width_grid(q: int) -> np.ndarray:
    """Alternative q-point grid with pi/(2q) spacing over a half-width window,
    (pi/2)(p/q - (q+1)/(2q)) for p = 1..q; kept for diagnostics only (it does
    not reproduce the q-periodic harmonic suppression; see
    harmonics.hat_transition_relation_check)."""
    p = np.arange(1, q + 1)
    return (math.pi / 2.0) * (p / q - (q + 1) / (2.0 * q))


def _run_chain(E, v, psi, n_steps, burn_in, theta0):
    total = v.size
    thetas = np.empty(total + 1)
    log_norms = np.empty(total)
    increments = np.empty(total)
    _kernels.pruefer_chain(theta0, E.k, E.sin_k, v, psi, thetas, log_norms, increments)
    return PrueferOrbit(
        thetas=thetas[burn_in:].copy(),
        log_norms=log_norms[burn_in:].copy(),
        increments=increments[burn_in:].copy(),
    )


def run_orbit(
    E: EnergyPoint,
    disorder: DisorderSpec,
    n_steps: int,
    burn_in: int = DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = DEFAULT_THETA0,
) -> PrueferOrbit:
    """Generate a physical-chain Prüfer orbit of n_steps recorded steps.

    The first burn_in steps are executed but excluded from the recorded
    statistics. Same (rng, parameters) always reproduces the orbit bit by bit.
    """
    if n_steps < 1:
        raise ConfigurationError(f"n_steps={n_steps} must be >= 1")
    total = burn_in + n_steps
    gen = rng.generator()
    v = sample_potentials(disorder, total, gen)
    psi = np.zeros(total)
    return _run_chain(E, v, psi, n_steps, burn_in, theta0)


def run_hat_orbit(
    E: EnergyPoint,
    atoms: DisorderSpec,
    psi_law: str,
    n_steps: int,
    burn_in: int = DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = DEFAULT_THETA0,
    q: int | None = None,
    psi_grid: np.ndarray | None = None,
) -> PrueferOrbit:
    """Generate a hat-chain orbit: every step carries an impurity from the
    atoms of `atoms` (its rho is ignored) plus an extra rotation psi.

    psi_law "uniform" draws psi from [-pi/2, pi/2); "grid" draws uniformly from
    the q-point grid (pi/q spacing by default, or an explicit psi_grid
    override). psi is drawn before v at each call, which fixes the stream
    layout for reproducibility.
    """
    if n_steps < 1:
        raise ConfigurationError(f"n_steps={n_steps} must be >= 1")
    total = burn_in + n_steps
    gen = rng.generator()
    if psi_law == "uniform":
        psi = gen.random(total) * math.pi - math.pi / 2.0
    elif psi_law == "grid":
        if psi_grid is None:
            if q is None:
                raise ConfigurationError("grid psi law needs q")
            psi_grid = grid_psi_atoms(q)
        else:
            psi_grid = np.asarray(psi_grid, dtype=float)
        j = gen.integers(0, len(psi_grid), total)
        psi = psi_grid[j]
    else:
        raise ConfigurationError(f"unknown psi law {psi_law!r}")
    v = sample_atoms(atoms, total, gen)
    return _run_chain(E, v, psi, n_steps, burn_in, theta0)


def ks_distance_uniform_mod_pi(thetas: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance of (thetas mod pi)/pi from Uniform(0, 1)."""
    x = np.sort(np.mod(np.asarray(thetas), math.pi)) / math.pi
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))
