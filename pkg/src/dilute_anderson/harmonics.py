"""Harmonics of the phase dynamics: empirical oscillatory sums, transition
coefficients of the averaged action, the grid-law suppression identity, and
the truncated linear system for the invariant-measure harmonics.

All quantities here are intrinsically complex; realness of observables is
recovered through Hermitian-symmetry invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pruefer
from .model import ConfigurationError, DisorderSpec, EnergyPoint, EstimateWithError, batch_means


class IllConditionedError(RuntimeError):
    """Truncated harmonic system too ill-conditioned to solve."""

    def __init__(self, cond: float, message: str):
        super().__init__(message)
        self.cond = cond


@dataclass(frozen=True)
class HarmonicVector:
    """Harmonics of a phase measure, keyed by integer frequency index.

    For empirical oscillatory sums the key is m (harmonic e^{2 i m theta}) and
    std_errors carries batch-means errors; for the truncated-system solution
    the key is n (harmonic e^{2 i n q theta}) and residual/cond describe the
    solve. values[0] is exactly 1 in both cases.
    """

    values: dict[int, complex]
    n_steps: int
    std_errors: dict[int, float] | None = None
    residual: float | None = None
    cond: float | None = None
    conj_sym_error: float | None = None

    def __getitem__(self, m: int) -> complex:
        return self.values[m]


def oscillatory_sums(orbit: pruefer.PrueferOrbit, m_max: int, n_batches: int = 32) -> HarmonicVector:
    """Empirical harmonics I_m(N) = (1/N) sum_n e^{2 i m theta_n} of an orbit,
    for |m| <= m_max, with batch-means errors on each component.

    I_0 is pinned to exactly 1; negative m follow by exact conjugation.
    """
    thetas = orbit.thetas[1:]
    n = thetas.size
    values: dict[int, complex] = {0: 1.0 + 0.0j}
    errors: dict[int, float] = {0: 0.0}
    base = np.exp(2j * thetas)
    zm = np.ones(n, dtype=complex)
    for m in range(1, m_max + 1):
        zm = zm * base
        re = batch_means(zm.real, n_batches)
        im = batch_means(zm.imag, n_batches)
        val = complex(re.value, im.value)
        se = math.hypot(re.std_error, im.std_error)
        values[m] = val
        values[-m] = val.conjugate()
        errors[m] = se
        errors[-m] = se
    return HarmonicVector(values=values, n_steps=n, std_errors=errors)


@dataclass(frozen=True)
class TransitionCoeffs:
    """Coefficients b^{(m)}_l of E_atoms[e^{2 i m S(theta)}] on the harmonic
    e^{2 i (m+l) theta}, for |m| <= m_max, |l| <= l_max."""

    table: np.ndarray
    m_max: int
    l_max: int
    n_grid: int
    E: EnergyPoint
    atoms: DisorderSpec

    def b(self, m: int, l: int) -> complex:
        if abs(m) > self.m_max or abs(l) > self.l_max:
            raise ConfigurationError(f"(m={m}, l={l}) outside the stored table")
        return complex(self.table[m + self.m_max, l + self.l_max])

    def row(self, m: int) -> np.ndarray:
        return self.table[m + self.m_max]


def _averaged_harmonic(E, atoms, m, thetas, s_grid, psi_grid=None):
    """E[e^{2 i m S(theta)}] on the theta grid, optionally also averaged over
    an extra rotation grid (the hat action)."""
    g = np.zeros(thetas.size, dtype=complex)
    for (v, w), s in zip(atoms.atoms, s_grid):
        if psi_grid is None:
            g += w * np.exp(2j * m * s)
        else:
            for psi in psi_grid:
                g += (w / len(psi_grid)) * np.exp(2j * m * (s + psi))
    return g


def _coeff_table(E, atoms, m_max, l_max, n_grid, psi_grid=None):
    thetas = math.pi * np.arange(n_grid) / n_grid
    s_grid = [pruefer.action_grid(E, v, thetas) for v, _ in atoms.atoms]
    table = np.empty((2 * m_max + 1, 2 * l_max + 1), dtype=complex)
    ls = np.arange(-l_max, l_max + 1)
    for m in range(-m_max, m_max + 1):
        g = _averaged_harmonic(E, atoms, m, thetas, s_grid, psi_grid)
        c = np.fft.fft(g) / n_grid
        table[m + m_max] = c[(m + ls) % n_grid]
    return thetas, s_grid, table


def transition_coeffs(
    E: EnergyPoint, atoms: DisorderSpec, m_max: int, l_max: int, n_grid: int
) -> TransitionCoeffs:
    """Extract the b^{(m)}_l table by evaluating the averaged action harmonics
    on a uniform phase grid and reading off Fourier coefficients."""
    if n_grid < 8 * (m_max + l_max):
        raise ConfigurationError(
            f"n_grid={n_grid} must be >= 8*(m_max+l_max)={8 * (m_max + l_max)}"
        )
    _, _, table = _coeff_table(E, atoms, m_max, l_max, n_grid)
    return TransitionCoeffs(table=table, m_max=m_max, l_max=l_max, n_grid=n_grid,
                            E=E, atoms=atoms)


def reconstruction_residual(coeffs: TransitionCoeffs, m: int) -> float:
    """Max deviation on the sampling grid between E[e^{2 i m S(theta)}] and its
    stored truncated Fourier row (the row-sum identity)."""
    n = coeffs.n_grid
    thetas = math.pi * np.arange(n) / n
    s_grid = [pruefer.action_grid(coeffs.E, v, thetas) for v, _ in coeffs.atoms.atoms]
    g = _averaged_harmonic(coeffs.E, coeffs.atoms, m, thetas, s_grid)
    recon = np.zeros(n, dtype=complex)
    for l in range(-coeffs.l_max, coeffs.l_max + 1):
        recon += coeffs.b(m, l) * np.exp(2j * (m + l) * thetas)
    return float(np.max(np.abs(recon - g)))


@dataclass(frozen=True)
class HatRelationReport:
    """Outcome of checking b-hat^{(m)}_l = [q | m] * b^{(m)}_l for a psi grid."""

    q: int
    psi_grid: np.ndarray
    tol: float
    max_dev_multiples: float
    max_mag_nonmultiples: float
    passed: bool
    psi_factors: dict[int, complex] = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] q={self.q}: max |b_hat - b| on q-multiples = "
            f"{self.max_dev_multiples:.3e}, max |b_hat| off-multiples = "
            f"{self.max_mag_nonmultiples:.3e} (tol {self.tol:.1e})"
        )


def hat_transition_relation_check(
    coeffs: TransitionCoeffs,
    q: int,
    psi_grid: np.ndarray | None = None,
    tol: float = 1e-10,
) -> HatRelationReport:
    """Compute the hat-chain coefficients directly from the hat action (the
    extra rotation averaged over the grid) and verify they equal b^{(m)}_l on
    q-multiples of m and vanish otherwise.

    Run with the default pi/q-spaced grid this validates the grid choice; run
    with pruefer.printed_half_width_grid(q) it documents that the half-width
    grid breaks the identity.
    """
    if psi_grid is None:
        psi_grid = pruefer.grid_psi_atoms(q)
    psi_grid = np.asarray(psi_grid, dtype=float)
    _, _, hat_table = _coeff_table(
        coeffs.E, coeffs.atoms, coeffs.m_max, coeffs.l_max, coeffs.n_grid, psi_grid
    )
    dev_mult = 0.0
    mag_non = 0.0
    factors = {}
    for m in range(-coeffs.m_max, coeffs.m_max + 1):
        factors[m] = complex(np.mean(np.exp(2j * m * psi_grid)))
        hat_row = hat_table[m + coeffs.m_max]
        if m % q == 0:
            dev_mult = max(dev_mult, float(np.max(np.abs(hat_row - coeffs.row(m)))))
        else:
            mag_non = max(mag_non, float(np.max(np.abs(hat_row))))
    return HatRelationReport(
        q=q,
        psi_grid=psi_grid,
        tol=tol,
        max_dev_multiples=dev_mult,
        max_mag_nonmultiples=mag_non,
        passed=(dev_mult <= tol and mag_non <= tol),
        psi_factors=factors,
    )


def solve_harmonic_system(
    E: EnergyPoint,
    atoms: DisorderSpec,
    q: int,
    n_max: int,
    l_max: int | None = None,
    n_grid: int | None = None,
    cond_limit: float = 1e12,
) -> HarmonicVector:
    """Solve the truncated linear system J_n = sum_r b^{(nq)}_{rq} J_{n+r} for
    the harmonics J_n (n = +-1..+-n_max) of the grid-law invariant measure,
    with J_0 = 1 imposed exactly and out-of-window unknowns set to zero.

    The reported residual is the magnitude the first dropped row (|n| =
    n_max + 1) would assign to its harmonic, a direct truncation diagnostic.
    """
    if n_max < 1:
        raise ConfigurationError(f"n_max={n_max} must be >= 1")
    if l_max is None:
        l_max = 2 * (n_max + 1) * q
    m_need = (n_max + 1) * q
    if n_grid is None:
        n_grid = 1 << max(8, (8 * (m_need + l_max) - 1).bit_length())
    coeffs = transition_coeffs(E, atoms, m_need, l_max, n_grid)

    ns = [n for n in range(-n_max, n_max + 1) if n != 0]
    col = {n: i for i, n in enumerate(ns)}
    dim = len(ns)
    A = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros(dim, dtype=complex)
    r_span = l_max // q
    for i, n in enumerate(ns):
        A[i, col[n]] = 1.0
        for r in range(-r_span, r_span + 1):
            bb = coeffs.b(n * q, r * q)
            target = n + r
            if target == 0:
                rhs[i] += bb
            elif abs(target) <= n_max:
                A[i, col[target]] -= bb

    svals = np.linalg.svd(A, compute_uv=False)
    cond = float(svals.max() / svals.min()) if svals.min() > 0.0 else math.inf
    # the coefficients are O(1), so a tiny smallest singular value means the
    # truncated equations pin (almost) nothing down, e.g. a pure rotation at
    # rational k where the invariant measure is not unique
    if not math.isfinite(cond) or cond > cond_limit or svals.min() < 1e-10:
        raise IllConditionedError(
            cond,
            f"truncated harmonic system is near-singular (smallest singular value "
            f"{svals.min():.3e}, condition estimate {cond:.3e})",
        )
    sol = np.linalg.solve(A, rhs)
    J = {0: 1.0 + 0.0j}
    for n in ns:
        J[n] = complex(sol[col[n]])
    sym_err = max(abs(J[n] - J[-n].conjugate()) for n in range(1, n_max + 1))
    for n in range(1, n_max + 1):
        avg = 0.5 * (J[n] + J[-n].conjugate())
        J[n], J[-n] = avg, avg.conjugate()

    # first dropped row: how large the neglected harmonic would be (its own
    # stationarity equation solved for J_{n_out} with in-window values)
    n_out = n_max + 1
    pred = 0j
    for r in range(-r_span, r_span + 1):
        target = n_out + r
        if target == 0:
            pred += coeffs.b(n_out * q, r * q)
        elif abs(target) <= n_max:
            pred += coeffs.b(n_out * q, r * q) * J[target]
    denom = 1.0 - coeffs.b(n_out * q, 0)
    if abs(denom) > 0.1:
        pred /= denom
    return HarmonicVector(
        values=J,
        n_steps=0,
        residual=float(abs(pred)),
        cond=cond,
        conj_sym_error=float(sym_err),
    )
