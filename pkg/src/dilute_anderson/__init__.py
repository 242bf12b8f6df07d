"""Dilute-impurity Anderson chain toolkit.

Lyapunov exponents and the integrated density of states for the 1D Anderson
model with a low density of strong impurities, computed by independent Monte
Carlo, closed-form, and spectral routes, with rational-quasi-momentum anomaly
diagnostics.
"""

from .model import (
    DisorderSpec,
    DomainError,
    ConfigurationError,
    EnergyPoint,
    EstimateWithError,
    RngContract,
    make_energy_from_E,
    make_energy_from_k,
    parse_disorder,
    pure_atoms,
)
from .pruefer import PrueferOrbit, action, hat_action, run_hat_orbit, run_orbit
from .lyapunov import (
    FourierCoeffs,
    LyapunovResult,
    fourier_a,
    gamma_hat_infinity,
    gamma_hat_q_mc,
    gamma_hat_q_spectral,
    gamma_hat_uniform_mc,
    gamma_mc_matrix_product,
    gamma_mc_telescopic,
)
from .harmonics import (
    HarmonicVector,
    TransitionCoeffs,
    hat_transition_relation_check,
    oscillatory_sums,
    solve_harmonic_system,
    transition_coeffs,
)
from .dos import DosResult, dos_eigencount, dos_lowdensity, dos_rotation, mean_phase_shift
from .arith import KClassification, classify_k, dio_margin, dio_margin_rational

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
