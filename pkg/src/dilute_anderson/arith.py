"""Quasi-momentum classification: rational detection via continued-fraction
convergents of k/pi, and the small-divisor margin diagnostic |1 - e^{2imk}|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, EnergyPoint, make_energy_from_k

DEFAULT_TOL = 1e-9
_XI_GRID = (0.0, 1e-3, 1e-2, 1e-1)
_DIO_M_RANGE = 1000


@dataclass(frozen=True)
class KClassification:
    """Either rational(p, q) with k ~ pi p/q, or generic with fitted
    small-divisor constants (c, xi) such that |1 - e^{2imk}| >= c e^{-xi |m|}
    over the tested m range."""

    kind: str
    p: int | None = None
    q: int | None = None
    dio_constants: tuple[float, float] | None = None

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"


def convergents(x: float, q_max: int, max_terms: int = 64):
    """Continued-fraction convergents p/q of x with q <= q_max.

    Yields successive best rational approximations in lowest terms.
    """
    p_m2, q_m2 = 0, 1
    p_m1, q_m1 = 1, 0
    rem = x
    for _ in range(max_terms):
        a = math.floor(rem)
        p = a * p_m1 + p_m2
        q = a * q_m1 + q_m2
        if q > q_max:
            return
        yield p, q
        p_m2, q_m2 = p_m1, q_m1
        p_m1, q_m1 = p, q
        frac = rem - a
        if frac < 1e-15:
            return
        rem = 1.0 / frac


def dio_margin(k: float, m_max: int) -> np.ndarray:
    """Margins |1 - e^{2imk}| = 2 |sin(m k)| for m = 1..m_max, as rows (m, margin)."""
    if m_max < 1:
        raise DomainError(f"m_max={m_max} must be >= 1")
    m = np.arange(1, m_max + 1)
    return np.column_stack([m.astype(float), 2.0 * np.abs(np.sin(m * k))])


def dio_margin_rational(p: int, q: int, m_max: int) -> np.ndarray:
    """Margins at k = pi p/q with the reduction m p mod q done in integer
    arithmetic, so the zeros at q | m are exact."""
    m = np.arange(1, m_max + 1)
    residues = (m * p) % q
    return np.column_stack([m.astype(float), 2.0 * np.abs(np.sin(math.pi * residues / q))])


def fit_dio_constants(k: float, m_range: int = _DIO_M_RANGE,
                      xi_grid=_XI_GRID) -> tuple[float, float]:
    """Fit (c, xi) with |1 - e^{2imk}| >= c e^{-xi |m|} for all tested m.

    c(xi) = min_m margin * e^{xi m} makes the bound hold by construction; the
    smallest xi on the grid with a healthy c is reported (the diagnostic only
    needs existence, not optimality).
    """
    margins = dio_margin(k, m_range)[:, 1]
    ms = np.arange(1, m_range + 1)
    best = None
    for xi in xi_grid:
        c = float(np.min(margins * np.exp(xi * ms)))
        best = (c, float(xi))
        if c >= 1e-3:
            break
    return best


def classify_k(k: float, q_max: int = 10**6, tol: float = DEFAULT_TOL) -> KClassification:
    """Classify a quasi-momentum as rational(p, q) when a continued-fraction
    convergent of k/pi with q <= q_max lies within tol/pi, generic otherwise."""
    if not (0.0 < k < math.pi):
        raise DomainError(f"k={k!r} outside (0, pi)")
    if q_max < 2:
        raise DomainError(f"q_max={q_max} must be >= 2")
    if tol < 0.0:
        raise DomainError(f"tol={tol!r} must be >= 0")
    x = k / math.pi
    for p, q in convergents(x, q_max):
        if p >= 1 and abs(x - p / q) <= tol / math.pi:
            return KClassification(kind="rational", p=p, q=q)
    return KClassification(kind="generic", dio_constants=fit_dio_constants(k))


def parse_rational(text: str) -> tuple[int, int]:
    """Parse "p/q" into coprime positive integers with 0 < p < q."""
    parts = text.split("/")
    if len(parts) != 2:
        raise DomainError(f"rational {text!r} is not of the form p/q")
    try:
        p, q = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise DomainError(f"rational {text!r} needs integer numerator/denominator") from exc
    if p <= 0 or q <= 0:
        raise DomainError(f"rational {text!r} needs positive p and q")
    g = math.gcd(p, q)
    p, q = p // g, q // g
    if not (0 < p < q):
        raise DomainError(f"rational {text!r} must reduce to 0 < p/q < 1")
    return p, q


def energy_from_rational(p: int, q: int) -> EnergyPoint:
    """Energy point at k = pi p/q (validated coprime, inside the band)."""
    g = math.gcd(p, q)
    if g != 1:
        raise DomainError(f"p/q = {p}/{q} not in lowest terms")
    return make_energy_from_k(math.pi * p / q)


def nearest_coprime_to_half(q: int) -> int:
    """The p closest to q/2 with gcd(p, q) = 1 (smallest p on ties); used for
    picking representative rational quasi-momenta near the band center."""
    candidates = sorted(range(1, q), key=lambda p: (abs(p - q / 2.0), p))
    for p in candidates:
        if math.gcd(p, q) == 1:
            return p
    raise DomainError(f"no coprime residue for q={q}")
