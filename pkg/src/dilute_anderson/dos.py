"""Integrated density of states three ways: rotation-number Monte Carlo,
eigenvalue counting on finite boxes (Sturm + dense Jacobi oracle), and the
low-density prediction built from the mean impurity phase shift.

Normalization: the total mass is pi, so the free chain has N(0, E) = k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, pruefer
from .model import (
    ConfigurationError,
    DisorderSpec,
    DomainError,
    EnergyPoint,
    EstimateWithError,
    RngContract,
    batch_means,
    pool_estimates,
)

JACOBI_MAX_N = 64


@dataclass(frozen=True)
class DosResult:
    """Integrated density of states value in [0, pi] plus provenance."""

    value: float
    method: str
    error: EstimateWithError | None = None
    params: dict = field(default_factory=dict)


def dos_rotation(
    E: EnergyPoint,
    disorder: DisorderSpec,
    n_steps: int,
    burn_in: int = pruefer.DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = pruefer.DEFAULT_THETA0,
    n_batches: int = 32,
    replicas: int = 1,
) -> DosResult:
    """Rotation-number estimator: mean phase increment along a Prüfer orbit.

    At rho = 0 every increment is exactly k, so the value is k to machine
    precision.
    """
    estimates = []
    for r in range(replicas):
        orbit = pruefer.run_orbit(
            E, disorder, n_steps, burn_in, rng.spawn(r) if replicas > 1 else rng, theta0
        )
        estimates.append(batch_means(orbit.increments, n_batches))
    est = pool_estimates(estimates)
    return DosResult(est.value, "rotation", est, dict(k=E.k, rho=disorder.rho, n_steps=n_steps))


def sturm_count(diag_shifted: np.ndarray) -> int:
    """Negative-eigenvalue count of the tridiagonal with the given shifted
    diagonal and unit off-diagonals (stabilized ratio recurrence)."""
    return int(_kernels.sturm_negative_count(np.ascontiguousarray(diag_shifted, dtype=float)))


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-13, max_sweeps: int = 60) -> np.ndarray:
    """Dense symmetric eigenvalues by cyclic Jacobi rotations.

    Independent oracle for the Sturm count; capped at JACOBI_MAX_N because the
    cyclic sweep is O(n^3) per pass.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ConfigurationError("jacobi_eigenvalues needs a square matrix")
    if n > JACOBI_MAX_N:
        raise ConfigurationError(f"dense Jacobi oracle capped at n <= {JACOBI_MAX_N}")
    if n == 1:
        return a[0, :1].copy()
    scale = np.max(np.abs(a)) or 1.0
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                off = max(off, abs(apr))
                # Jacobi rotation annihilating a[p, r]
                tau = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot_p = c * a[p, :] - s * a[r, :]
                rot_r = s * a[p, :] + c * a[r, :]
                a[p, :], a[r, :] = rot_p, rot_r
                col_p = c * a[:, p] - s * a[:, r]
                col_r = s * a[:, p] + c * a[:, r]
                a[:, p], a[:, r] = col_p, col_r
        if off <= tol * scale:
            break
    return np.sort(np.diag(a))


def _tridiagonal(diag: np.ndarray) -> np.ndarray:
    n = diag.size
    m = np.zeros((n, n))
    m[np.arange(n), np.arange(n)] = diag
    m[np.arange(n - 1), np.arange(1, n)] = -1.0
    m[np.arange(1, n), np.arange(n - 1)] = -1.0
    return m


def jacobi_count(diag_shifted: np.ndarray) -> int:
    """Negative-eigenvalue count from the dense Jacobi oracle."""
    return int(np.sum(jacobi_eigenvalues(_tridiagonal(diag_shifted)) < 0.0))


def dos_eigencount(
    E: EnergyPoint,
    disorder: DisorderSpec,
    box_size: int,
    rng: RngContract = RngContract(0),
    replicas: int = 1,
) -> DosResult:
    """Eigenvalue-counting estimator: pi * (negative eigenvalues of H - E on a
    box of box_size sites) / box_size, averaged over disorder realizations.

    Free boundary conditions (Dirichlet truncation of the hopping).
    """
    if box_size < 2:
        raise ConfigurationError(f"box_size={box_size} must be >= 2")
    vals = []
    for r in range(replicas):
        gen = (rng.spawn(r) if replicas > 1 else rng).generator()
        v = pruefer.sample_potentials(disorder, box_size, gen)
        count = sturm_count(v - E.E)
        vals.append(math.pi * count / box_size)
    value = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    est = EstimateWithError(value, se, box_size * replicas, replicas)
    return DosResult(value, "eigencount", est, dict(k=E.k, rho=disorder.rho, box_size=box_size))


def mean_phase_shift(E: EnergyPoint, atoms: DisorderSpec, theta) -> float | np.ndarray:
    """Mean impurity phase shift: the atom-weighted average of S(theta) - theta.

    Accepts a scalar or an array of phases; pi-periodic; identically k when
    the atoms reduce to delta_0.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    for v, w in atoms.atoms:
        out += w * (pruefer.action_grid(E, v, theta) - theta)
    return float(out) if out.ndim == 0 else out


def dos_lowdensity(
    E: EnergyPoint,
    disorder: DisorderSpec,
    law: str = "lebesgue",
    q: int | None = None,
    n_grid: int = 4096,
    n_steps: int = 100_000,
    burn_in: int = pruefer.DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = pruefer.DEFAULT_THETA0,
    n_batches: int = 32,
    psi_grid: np.ndarray | None = None,
) -> DosResult:
    """Low-density prediction (1 - rho) k + rho <phase shift>.

    law "lebesgue" averages the mean phase shift over the circle by
    uniform-grid quadrature (the generic-k branch); law "grid" averages it
    along a hat-chain orbit with the q-point rotation law (the rational-k
    branch), which carries a Monte Carlo error bar.
    """
    rho = disorder.rho
    if law == "lebesgue":
        thetas = math.pi * np.arange(n_grid) / n_grid
        mean_shift = float(np.mean(mean_phase_shift(E, disorder, thetas)))
        value = (1.0 - rho) * E.k + rho * mean_shift
        return DosResult(
            value, "lowdensity_prediction",
            EstimateWithError(value, 0.0, 0, 0),
            dict(k=E.k, rho=rho, law=law, n_grid=n_grid),
        )
    if law == "grid":
        if q is None and psi_grid is None:
            raise DomainError("grid law needs q >= 2")
        orbit = pruefer.run_hat_orbit(
            E, disorder, "grid", n_steps, burn_in, rng, theta0, q=q, psi_grid=psi_grid
        )
        shifts = mean_phase_shift(E, disorder, orbit.thetas[:-1])
        est = batch_means(shifts, n_batches)
        value = (1.0 - rho) * E.k + rho * est.value
        scaled = EstimateWithError(value, rho * est.std_error, est.n_samples, est.n_batches)
        return DosResult(value, "lowdensity_prediction", scaled,
                         dict(k=E.k, rho=rho, law=law, q=q, n_steps=n_steps))
    raise ConfigurationError(f"unknown law {law!r}")
