import math

import numpy as np
import pytest

from dilute_anderson.model import (
    DisorderSpec,
    DomainError,
    EstimateWithError,
    RngContract,
    batch_means,
    make_energy_from_E,
    make_energy_from_k,
    mix64,
    parse_disorder,
    parse_seed,
    pool_estimates,
)


def test_energy_from_k_examples():
    assert abs(make_energy_from_k(math.pi / 2).E) <= 1e-12
    assert abs(make_energy_from_k(math.pi / 3).E + 1.0) <= 1e-12
    with pytest.raises(DomainError):
        make_energy_from_k(0.0)
    with pytest.raises(DomainError):
        make_energy_from_k(math.pi)
    with pytest.raises(DomainError):
        make_energy_from_k(1e-8)  # below the sin(k) guard


def test_energy_from_E_examples():
    assert abs(make_energy_from_E(0.0).k - math.pi / 2) <= 1e-12
    assert abs(make_energy_from_E(-1.0).k - math.pi / 3) <= 1e-12
    for bad in (2.5, -2.5, 2.0, -2.0, float("nan")):
        with pytest.raises(DomainError):
            make_energy_from_E(bad)


def test_energy_round_trip_grid():
    ks = np.linspace(0.01, math.pi - 0.01, 1000)
    for k in ks:
        ep = make_energy_from_k(float(k))
        back = make_energy_from_E(ep.E)
        assert abs(back.k - k) <= 1e-12


def test_energy_pair_consistency_guard():
    with pytest.raises(DomainError):
        # mismatched (k, E) pair
        from dilute_anderson.model import EnergyPoint

        EnergyPoint(k=1.0, E=0.5)


def test_parse_disorder_basic():
    d = parse_disorder("2:1", 0.05)
    assert d.rho == 0.05
    assert d.atoms == ((2.0, 1.0),)
    d = parse_disorder("1:1,3:1", 0.1)
    assert d.atoms == ((1.0, 0.5), (3.0, 0.5))


def test_parse_disorder_dedup_and_normalize():
    d = parse_disorder("1:1,1:1,2:2", 0.2)
    assert d.atoms == ((1.0, 0.5), (2.0, 0.5))
    assert math.fsum(d.weights) == pytest.approx(1.0, abs=1e-9)


def test_parse_disorder_errors():
    for text in ("2:-1", "", "2", "a:b", "2:0", "inf:1", "2:1,"):
        with pytest.raises(DomainError):
            parse_disorder(text, 0.1)
    for rho in (-0.1, 1.1):
        with pytest.raises(DomainError):
            parse_disorder("2:1", rho)


def test_parse_disorder_idempotent():
    d = parse_disorder("1:0.1,2.5:0.3,-0.75:0.11", 0.3)
    again = parse_disorder(d.canonical_text(), d.rho)
    assert again.atoms == d.atoms
    third = parse_disorder(again.canonical_text(), d.rho)
    assert third.atoms == again.atoms


def test_mix64_avalanche():
    # fixed finalizer: single-bit input changes flip about half the output bits
    flips = []
    for bit in range(64):
        a, b = mix64(12345), mix64(12345 ^ (1 << bit))
        flips.append(bin(a ^ b).count("1"))
    assert 20 <= np.mean(flips) <= 44


def test_rng_contract_determinism():
    a = RngContract(42, 7).generator().random(1000)
    b = RngContract(42, 7).generator().random(1000)
    assert np.array_equal(a, b)
    c = RngContract(42, 8).generator().random(1000)
    assert not np.array_equal(a, c)


def test_rng_spawn_is_order_sensitive():
    base = RngContract(1)
    assert base.spawn(1, 2) != base.spawn(2, 1)
    assert base.spawn(3).spawn(4) == base.spawn(3, 4)


def test_parse_seed():
    assert parse_seed("42") == 42
    assert parse_seed("0xff") == 255
    with pytest.raises(DomainError):
        parse_seed("nope")
    with pytest.raises(DomainError):
        parse_seed(str(1 << 64))


def test_batch_means_constant_series():
    est = batch_means(np.full(10_000, 1.25))
    assert est.value == 1.25
    assert est.std_error == 0.0
    assert est.n_batches >= 16


def test_batch_means_ar1_oracle():
    # AR(1) x_n = phi x_{n-1} + e_n has mean-std sigma/sqrt(N) * sqrt((1+phi)/(1-phi));
    # batch means must recover the correlated error, not the iid one
    phi, n = 0.5, 400_000
    gen = RngContract(5).generator()
    e = gen.standard_normal(n)
    x = np.empty(n)
    x[0] = e[0]
    for i in range(1, n):
        x[i] = phi * x[i - 1] + e[i]
    est = batch_means(x, n_batches=64)
    sigma_e = 1.0 / math.sqrt(1 - phi**2)
    truth = sigma_e / math.sqrt(n) * math.sqrt((1 + phi) / (1 - phi))
    assert est.std_error == pytest.approx(truth, rel=0.35)
    naive = x.std() / math.sqrt(n)
    assert est.std_error > 1.3 * naive


def test_pool_estimates():
    a = EstimateWithError(1.0, 0.1, 100, 16)
    b = EstimateWithError(2.0, 0.1, 100, 16)
    pooled = pool_estimates([a, b])
    assert pooled.value == pytest.approx(1.5)
    assert pooled.std_error == pytest.approx(0.1 / math.sqrt(2))
    assert pooled.n_samples == 200
    exact = pool_estimates([EstimateWithError(3.0, 0.0, 10, 1)] * 3)
    assert exact.value == 3.0 and exact.std_error == 0.0
