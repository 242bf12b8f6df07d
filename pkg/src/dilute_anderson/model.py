"""Shared parameter types: spectral points, disorder mixtures, RNG streams, MC errors.

Everything here is an immutable value type; instances can be shared freely
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Guard margins. The conjugated dynamics carries 1/sin(k), which diverges at
# the band edges; sin(k) >= SIN_K_GUARD keeps every downstream formula
# well-conditioned.
SIN_K_GUARD = 1e-6
BAND_EDGE_GUARD = 1e-9

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


class DomainError(ValueError):
    """Parameter outside its valid domain."""


class ConfigurationError(ValueError):
    """Unusable combination of run parameters."""


# ---------------------------------------------------------------------------
# spectral parameter


@dataclass(frozen=True)
class EnergyPoint:
    """Spectral point inside the band, stored as the pair (k, E) with E = -2 cos k.

    k is the quasi-momentum in (0, pi); E the energy in lattice units.
    """

    k: float
    E: float

    def __post_init__(self):
        if not (0.0 < self.k < math.pi) or math.sin(self.k) < SIN_K_GUARD:
            raise DomainError(
                f"quasi-momentum k={self.k} outside the open interval (0, pi) "
                f"(guard: sin(k) >= {SIN_K_GUARD})"
            )
        if abs(self.E + 2.0 * math.cos(self.k)) > 1e-12:
            raise DomainError(
                f"inconsistent pair (k={self.k}, E={self.E}): expected E = -2 cos k"
            )

    @property
    def sin_k(self) -> float:
        return math.sin(self.k)

    @property
    def cos_k(self) -> float:
        return math.cos(self.k)


def make_energy_from_k(k: float) -> EnergyPoint:
    """Energy point at quasi-momentum k in (0, pi)."""
    if not (0.0 < k < math.pi) or math.sin(k) < SIN_K_GUARD:
        raise DomainError(
            f"k={k!r} invalid: need k in the open interval (0, pi) with "
            f"sin(k) >= {SIN_K_GUARD}"
        )
    return EnergyPoint(k=k, E=-2.0 * math.cos(k))


def make_energy_from_E(E: float) -> EnergyPoint:
    """Energy point at energy E strictly inside the band (-2, 2)."""
    if not math.isfinite(E) or abs(E) > 2.0 - BAND_EDGE_GUARD:
        raise DomainError(
            f"E={E!r} invalid: need |E| <= 2 - {BAND_EDGE_GUARD} (open band)"
        )
    return EnergyPoint(k=math.acos(-E / 2.0), E=E)


# ---------------------------------------------------------------------------
# disorder


@dataclass(frozen=True)
class DisorderSpec:
    """Impurity density rho plus a finite atomic impurity distribution.

    The full single-site distribution is (1-rho)*delta_0 + rho * sum_i w_i delta_{v_i}.
    Atom weights are normalized to sum to 1.
    """

    rho: float
    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not (0.0 <= self.rho <= 1.0):
            raise DomainError(f"rho={self.rho!r} outside [0, 1]")
        if not self.atoms:
            raise DomainError("impurity distribution needs at least one atom")
        for v, w in self.atoms:
            if not math.isfinite(v):
                raise DomainError(f"non-finite impurity value {v!r}")
            if not (w > 0.0) or not math.isfinite(w):
                raise DomainError(f"non-positive impurity weight {w!r} for value {v!r}")
        total = math.fsum(w for _, w in self.atoms)
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"atom weights sum to {total!r}, expected 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    def cumulative_weights(self) -> np.ndarray:
        return np.cumsum(self.weights)

    def canonical_text(self) -> str:
        """Serialization in the "v:w,v:w" grammar; parse_disorder round-trips it."""
        return ",".join(f"{v!r}:{w!r}" for v, w in self.atoms)

    def with_rho(self, rho: float) -> "DisorderSpec":
        return DisorderSpec(rho=rho, atoms=self.atoms)


def _normalize_atoms(pairs: list[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    # deduplicate by exact value match, summing weights, keeping first-seen order
    order: list[float] = []
    acc: dict[float, float] = {}
    for v, w in pairs:
        if v in acc:
            acc[v] += w
        else:
            acc[v] = w
            order.append(v)
    total = math.fsum(acc.values())
    if total <= 0.0 or not math.isfinite(total):
        raise DomainError(f"atom weights sum to {total!r}")
    # skip the division when already normalized, so re-parsing a canonical
    # serialization is exactly idempotent
    if abs(total - 1.0) > 1e-12:
        return tuple((v, acc[v] / total) for v in order)
    return tuple((v, acc[v]) for v in order)


def parse_disorder(text: str, rho: float) -> DisorderSpec:
    """Parse the "v:w[,v:w]*" grammar into a DisorderSpec with density rho."""
    if not (0.0 <= rho <= 1.0):
        raise DomainError(f"rho={rho!r} outside [0, 1]")
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            raise DomainError(f"empty atom entry in disorder string {text!r}")
        parts = item.split(":")
        if len(parts) != 2:
            raise DomainError(f"atom entry {item!r} is not of the form v:w")
        try:
            v, w = float(parts[0]), float(parts[1])
        except ValueError as exc:
            raise DomainError(f"bad decimal literal in atom entry {item!r}") from exc
        if not math.isfinite(v):
            raise DomainError(f"non-finite impurity value in {item!r}")
        if not (w > 0.0) or not math.isfinite(w):
            raise DomainError(f"non-positive weight in atom entry {item!r}")
        pairs.append((v, w))
    if not pairs:
        raise DomainError("empty impurity distribution")
    return DisorderSpec(rho=rho, atoms=_normalize_atoms(pairs))


def pure_atoms(text: str) -> DisorderSpec:
    """Impurity-only distribution (used by the hat chains, where rho plays no role)."""
    return parse_disorder(text, rho=1.0)


# ---------------------------------------------------------------------------
# reproducible randomness


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a fixed multiply-xor-shift avalanche on 64 bits."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class RngContract:
    """Deterministic per-task random streams.

    The per-task seed is mix64(master_seed + GOLDEN * (stream_index + 1)); the
    avalanche mixing makes distinct stream indices statistically independent,
    and the same (master_seed, stream_index) always yields the bit-identical
    sample sequence regardless of execution order or parallelism.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            val = getattr(self, name)
            if not (0 <= val <= _MASK64):
                raise DomainError(f"{name}={val!r} is not an unsigned 64-bit integer")

    def derived_seed(self) -> int:
        return mix64((self.master_seed + _GOLDEN64 * (self.stream_index + 1)) & _MASK64)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.derived_seed()))

    def spawn(self, *indices: int) -> "RngContract":
        """Child contract whose stream index folds in the given task indices."""
        s = self.stream_index
        for i in indices:
            s = mix64((s + _GOLDEN64 * (i + 1)) & _MASK64)
        return RngContract(self.master_seed, s)


def parse_seed(text: str) -> int:
    """Accept a 64-bit seed as a decimal or 0x-prefixed hex literal."""
    try:
        value = int(text, 16) if text.lower().startswith("0x") else int(text)
    except ValueError as exc:
        raise DomainError(f"seed {text!r} is not a decimal or 0x-hex integer") from exc
    if not (0 <= value <= _MASK64):
        raise DomainError(f"seed {text!r} outside the unsigned 64-bit range")
    return value


# ---------------------------------------------------------------------------
# Monte Carlo error bars


@dataclass(frozen=True)
class EstimateWithError:
    """Monte Carlo estimate with a batch-means standard error."""

    value: float
    std_error: float
    n_samples: int
    n_batches: int


def batch_means(samples: np.ndarray, n_batches: int = 32) -> EstimateWithError:
    """Mean of a correlated series with a batch-means standard error.

    The series is split into n_batches contiguous batches (>= 16 for honest
    error bars on correlated orbits); the standard error is the sample standard
    deviation of the batch means divided by sqrt(n_batches). The value itself
    is the mean over the full series.
    """
    samples = np.asarray(samples)
    n = samples.size
    if n == 0:
        raise ConfigurationError("batch_means needs a non-empty sample series")
    value = float(samples.mean())
    b = min(n_batches, n)
    if b < 2:
        return EstimateWithError(value, 0.0, n, b)
    size = n // b
    means = samples[: b * size].reshape(b, size).mean(axis=1)
    se = float(means.std(ddof=1) / math.sqrt(b))
    return EstimateWithError(value, se, n, b)


def pool_estimates(estimates: list[EstimateWithError]) -> EstimateWithError:
    """Inverse-variance pooling of independent replica estimates.

    Deterministic in the list order, hence independent of completion order
    when replicas are computed in parallel and collected by index.
    """
    if not estimates:
        raise ConfigurationError("nothing to pool")
    if len(estimates) == 1:
        return estimates[0]
    ses = np.array([e.std_error for e in estimates])
    vals = np.array([e.value for e in estimates])
    n_samples = int(sum(e.n_samples for e in estimates))
    n_batches = int(sum(e.n_batches for e in estimates))
    if np.all(ses == 0.0):
        return EstimateWithError(float(vals.mean()), 0.0, n_samples, n_batches)
    # degenerate zero-error replicas would get infinite weight; floor them at
    # the smallest positive error seen
    floor = ses[ses > 0.0].min()
    w = 1.0 / np.maximum(ses, floor) ** 2
    value = float(np.sum(w * vals) / np.sum(w))
    se = float(1.0 / math.sqrt(np.sum(w)))
    return EstimateWithError(value, se, n_samples, n_batches)
