"""Lyapunov exponents: two Monte Carlo estimators on the physical chain, the
closed form and Monte Carlo estimator for the uniform-phase chain, and the
Monte Carlo / spectral routes to the rational-k exponents.

Closed-form note: the uniform-phase exponent is the circle average of the
log-expansion, which evaluates to

    gamma_inf = (1/2) * E_atoms[ log(1 + a/4) ],   a = v^2 / sin^2 k,

equivalently E_atoms[ log((sqrt(lam) + 1/sqrt(lam))/2) ] with lam the largest
eigenvalue of the squared conjugated transfer matrix (lam + 1/lam = 2 + a).
Both forms are evaluated and must agree to 1e-12. The weak-disorder limit
a/8 and the direct quadrature of the defining integral pin the 1 + a/4
argument down; see tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, harmonics, pruefer
from .model import (
    ConfigurationError,
    DisorderSpec,
    EnergyPoint,
    EstimateWithError,
    RngContract,
    batch_means,
    pool_estimates,
)

CLOSED_FORM_TOL = 1e-12


@dataclass(frozen=True)
class LyapunovResult:
    """A Lyapunov exponent estimate (per lattice site) plus its provenance."""

    gamma: EstimateWithError
    method: str
    params: dict = field(default_factory=dict)
    truncation_error: float | None = None


@dataclass(frozen=True)
class FourierCoeffs:
    """Fourier coefficients a_m of the averaged log-expansion function.

    coeffs maps m in [-m_max, m_max] to the coefficient of e^{2 i m theta};
    Hermitian symmetry a_{-m} = conj(a_m) holds because the function is real.
    """

    coeffs: dict[int, complex]
    m_max: int

    def __getitem__(self, m: int) -> complex:
        return self.coeffs[m]

    def abs_array(self) -> np.ndarray:
        return np.array([abs(self.coeffs[m]) for m in range(self.m_max + 1)])

    def decay_fit(self, floor: float = 1e-14) -> tuple[float, float]:
        """Fit |a_m| <= c * exp(-xi m): least-squares xi on log|a_m| above the
        noise floor, then c as the smallest constant making the envelope hold
        for every computed m."""
        mags = self.abs_array()
        usable = [(m, mags[m]) for m in range(1, self.m_max + 1) if mags[m] > floor]
        if len(usable) < 2:
            return (float(mags.max(initial=0.0)), 0.0)
        ms = np.array([m for m, _ in usable], dtype=float)
        logs = np.log([a for _, a in usable])
        slope, _ = np.polyfit(ms, logs, 1)
        xi = -float(slope)
        c = float(np.max(mags * np.exp(xi * np.arange(self.m_max + 1))))
        return (c, xi)


def _mc_result(orbit_fn, rng: RngContract, replicas: int, n_batches: int,
               method: str, params: dict) -> LyapunovResult:
    estimates = []
    for r in range(replicas):
        orbit = orbit_fn(rng.spawn(r) if replicas > 1 else rng)
        estimates.append(batch_means(orbit.log_norms, n_batches))
    return LyapunovResult(pool_estimates(estimates), method, params)


def gamma_mc_telescopic(
    E: EnergyPoint,
    disorder: DisorderSpec,
    n_steps: int,
    burn_in: int = pruefer.DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = pruefer.DEFAULT_THETA0,
    n_batches: int = 32,
    replicas: int = 1,
) -> LyapunovResult:
    """Telescopic estimator: mean per-step log-norm along a Prüfer orbit."""
    params = dict(k=E.k, rho=disorder.rho, n_steps=n_steps, burn_in=burn_in)
    return _mc_result(
        lambda r: pruefer.run_orbit(E, disorder, n_steps, burn_in, r, theta0),
        rng, replicas, n_batches, "telescopic", params,
    )


def gamma_mc_matrix_product(
    E: EnergyPoint,
    disorder: DisorderSpec,
    n_steps: int,
    renorm_every: int = 10,
    rng: RngContract = RngContract(0),
    n_batches: int = 32,
    replicas: int = 1,
) -> LyapunovResult:
    """Direct estimator: log-norm of the raw transfer-matrix product,
    renormalized by its Frobenius norm every renorm_every steps."""
    if not (1 <= renorm_every <= 50):
        raise ConfigurationError(f"renorm_every={renorm_every} outside [1, 50]")
    estimates = []
    for r in range(replicas):
        gen = (rng.spawn(r) if replicas > 1 else rng).generator()
        v = pruefer.sample_potentials(disorder, n_steps, gen)
        n_blocks = -(-n_steps // renorm_every)
        block_logs = np.empty(n_blocks)
        block_steps = np.empty(n_blocks, dtype=np.int64)
        written = _kernels.matrix_product_chain(E.E, v, renorm_every, block_logs, block_steps)
        if written < 0:
            raise ConfigurationError(
                f"matrix product overflowed before renormalization; "
                f"use a smaller renorm_every than {renorm_every}"
            )
        value = float(block_logs[:written].sum() / n_steps)
        b = min(n_batches, written)
        size = written // b
        if b >= 2 and size >= 1:
            logs = block_logs[: b * size].reshape(b, size).sum(axis=1)
            steps = block_steps[: b * size].reshape(b, size).sum(axis=1)
            rates = logs / steps
            se = float(rates.std(ddof=1) / math.sqrt(b))
        else:
            se = 0.0
        estimates.append(EstimateWithError(value, se, n_steps, b))
    params = dict(k=E.k, rho=disorder.rho, n_steps=n_steps, renorm_every=renorm_every)
    return LyapunovResult(pool_estimates(estimates), "matrix_product", params)


def gamma_hat_infinity(E: EnergyPoint, atoms: DisorderSpec) -> LyapunovResult:
    """Closed-form uniform-phase exponent: (1/2) sum_i w_i log(1 + a_i/4).

    Also evaluated through the singular-value form
    sum_i w_i log((sqrt(lam_i) + 1/sqrt(lam_i))/2); the two must agree to
    1e-12 or the function raises (cancellation guard).
    """
    total = 0.0
    alt = 0.0
    for v, w in atoms.atoms:
        a = (v / E.sin_k) ** 2
        total += w * 0.5 * math.log1p(0.25 * a)
        lam = 1.0 + 0.5 * a + math.sqrt(a + 0.25 * a * a)
        rt = math.sqrt(lam)
        alt += w * math.log(0.5 * (rt + 1.0 / rt))
    if abs(total - alt) > CLOSED_FORM_TOL:
        raise AssertionError(
            f"closed-form disagreement {abs(total - alt):.3e} between the "
            "log(1 + a/4) and singular-value evaluations"
        )
    return LyapunovResult(
        EstimateWithError(total, 0.0, 0, 0), "closed_form", dict(k=E.k)
    )


def gamma_hat_uniform_mc(
    E: EnergyPoint,
    atoms: DisorderSpec,
    n_steps: int,
    burn_in: int = pruefer.DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = pruefer.DEFAULT_THETA0,
    n_batches: int = 32,
    replicas: int = 1,
) -> LyapunovResult:
    """Hat-chain Monte Carlo with uniform rotation phases; estimates the same
    quantity as gamma_hat_infinity."""
    params = dict(k=E.k, n_steps=n_steps, psi_law="uniform")
    return _mc_result(
        lambda r: pruefer.run_hat_orbit(E, atoms, "uniform", n_steps, burn_in, r, theta0),
        rng, replicas, n_batches, "hat_chain", params,
    )


def gamma_hat_q_mc(
    E: EnergyPoint,
    atoms: DisorderSpec,
    q: int,
    n_steps: int,
    burn_in: int = pruefer.DEFAULT_BURN_IN,
    rng: RngContract = RngContract(0),
    theta0: float = pruefer.DEFAULT_THETA0,
    n_batches: int = 32,
    replicas: int = 1,
    psi_grid: np.ndarray | None = None,
) -> LyapunovResult:
    """Hat-chain Monte Carlo with the q-point grid rotation law; at k = pi p/q
    this estimates the rational-k exponent gamma_hat_q."""
    params = dict(k=E.k, q=q, n_steps=n_steps, psi_law="grid")
    return _mc_result(
        lambda r: pruefer.run_hat_orbit(
            E, atoms, "grid", n_steps, burn_in, r, theta0, q=q, psi_grid=psi_grid
        ),
        rng, replicas, n_batches, "hat_chain", params,
    )


def fourier_a(E: EnergyPoint, atoms: DisorderSpec, m_max: int, n_grid: int) -> FourierCoeffs:
    """Fourier coefficients a_m = (1/pi) int_0^pi e^{-2 i m theta} g(theta) dtheta
    of g(theta) = E_atoms[ log ||M T M^{-1} e_theta|| ].

    Uniform-grid quadrature (the discrete Fourier sum), spectrally accurate for
    this analytic pi-periodic integrand. n_grid must be a power of two with
    n_grid >= 8 m_max.
    """
    if n_grid < 8 * m_max:
        raise ConfigurationError(f"n_grid={n_grid} must be >= 8*m_max={8 * m_max}")
    if n_grid & (n_grid - 1):
        raise ConfigurationError(f"n_grid={n_grid} must be a power of two")
    thetas = math.pi * np.arange(n_grid) / n_grid
    g = np.zeros(n_grid)
    for v, w in atoms.atoms:
        g += w * pruefer.log_norm_grid(E, v, thetas)
    fhat = np.fft.fft(g) / n_grid
    coeffs = {0: complex(fhat[0])}
    for m in range(1, m_max + 1):
        coeffs[m] = complex(fhat[m])
        coeffs[-m] = complex(fhat[n_grid - m])
    return FourierCoeffs(coeffs=coeffs, m_max=m_max)


def gamma_hat_q_spectral(
    E: EnergyPoint,
    atoms: DisorderSpec,
    q: int,
    n_max: int,
    m_max: int | None = None,
    l_max: int | None = None,
    n_grid: int | None = None,
) -> LyapunovResult:
    """Deterministic rational-k exponent: gamma_hat_q = sum_n a_{nq} J_n with
    the invariant-measure harmonics J_n from the truncated linear system.

    No Monte Carlo error; the reported truncation error is the magnitude of
    the first discarded Fourier term |a_{(n_max+1) q}|.
    """
    need_m = (n_max + 1) * q
    if m_max is None or m_max < need_m:
        m_max = need_m
    if n_grid is None:
        grid_span = m_max + (l_max if l_max is not None else 2 * need_m)
        n_grid = 1 << max(8, (8 * grid_span - 1).bit_length())
    coeffs = fourier_a(E, atoms, m_max, n_grid)

    def window_value(nw: int) -> float:
        if nw == 0:
            return coeffs[0].real
        system = harmonics.solve_harmonic_system(E, atoms, q, nw, l_max, n_grid)
        acc = coeffs[0] + 2.0 * sum(
            (coeffs[n * q] * system.values[n] for n in range(1, nw + 1)),
            start=0j,
        )
        return float(acc.real)

    value = window_value(n_max)
    # the measure's harmonics can decay much more slowly than the a_m, so the
    # largest discarded Fourier term alone understates the truncation; add the
    # half-window convergence difference
    trunc = abs(coeffs[(n_max + 1) * q]) if (n_max + 1) * q <= m_max else 0.0
    if n_max >= 2:
        trunc = max(trunc, abs(value - window_value(n_max // 2)))
    params = dict(k=E.k, q=q, n_max=n_max, m_max=m_max, l_max=l_max, n_grid=n_grid)
    return LyapunovResult(
        EstimateWithError(value, 0.0, 0, 0),
        "spectral",
        params,
        truncation_error=float(trunc),
    )
