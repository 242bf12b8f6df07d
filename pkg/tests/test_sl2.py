import math

import numpy as np
import pytest

from dilute_anderson.model import RngContract, make_energy_from_E, make_energy_from_k
from dilute_anderson.sl2 import (
    IDENTITY,
    Mat2,
    basis_change,
    basis_change_inv,
    conjugated_transfer,
    hat_transfer,
    perturbation,
    rotation,
    squared_singular_value,
    transfer,
)


def eig2_sym(m: Mat2):
    """Direct closed-form eigenvalues of a symmetric 2x2 (independent oracle)."""
    mid = 0.5 * (m.a11 + m.a22)
    rad = math.sqrt((0.5 * (m.a11 - m.a22)) ** 2 + m.a12 * m.a21)
    return mid - rad, mid + rad


def test_transfer_examples():
    E0 = make_energy_from_E(0.0)
    assert transfer(E0, 0.0).as_array() == pytest.approx(np.array([[0, -1], [1, 0]]), abs=1e-12)
    assert transfer(E0, 1.0).as_array() == pytest.approx(np.array([[1, -1], [1, 0]]), abs=1e-12)
    Em1 = make_energy_from_E(-1.0)
    assert transfer(Em1, 2.0).as_array() == pytest.approx(np.array([[3, -1], [1, 0]]), abs=1e-12)


def test_basis_change_examples():
    E = make_energy_from_k(math.pi / 2)
    assert basis_change(E).max_abs_diff(IDENTITY) <= 1e-12
    E3 = make_energy_from_k(math.pi / 3)
    s = math.sin(math.pi / 3)
    expected = Mat2(s / math.sqrt(s), 0.0, -0.5 / math.sqrt(s), 1.0 / math.sqrt(s))
    assert basis_change(E3).max_abs_diff(expected) <= 1e-12
    m = basis_change(E3) @ basis_change_inv(E3)
    assert m.max_abs_diff(IDENTITY) <= 1e-12


def test_rotation_examples():
    assert rotation(0.0).max_abs_diff(IDENTITY) == 0.0
    assert rotation(math.pi / 2).as_array() == pytest.approx(np.array([[0, -1], [1, 0]]), abs=1e-12)
    gen = RngContract(1).generator()
    for _ in range(100):
        a, b = gen.uniform(-10, 10, 2)
        assert (rotation(a) @ rotation(b)).max_abs_diff(rotation(a + b)) <= 1e-12


def test_perturbation_examples():
    E0 = make_energy_from_E(0.0)
    assert perturbation(E0, 0.0).max_abs_diff(Mat2(0, 0, 0, 0)) == 0.0
    assert perturbation(E0, 2.0).as_array() == pytest.approx(np.array([[0, 0], [-2, 0]]), abs=1e-12)
    gen = RngContract(2).generator()
    for _ in range(100):
        p = perturbation(make_energy_from_k(gen.uniform(0.1, math.pi - 0.1)), gen.uniform(-5, 5))
        assert (p @ p).max_abs_diff(Mat2(0, 0, 0, 0)) == 0.0  # nilpotent


def test_determinants_random():
    gen = RngContract(3).generator()
    for _ in range(10_000):
        k = gen.uniform(0.05, math.pi - 0.05)
        v = gen.uniform(-10, 10)
        E = make_energy_from_k(k)
        assert abs(transfer(E, v).det() - 1.0) <= 1e-12
        assert abs(basis_change(E).det() - 1.0) <= 1e-12
        assert abs(rotation(gen.uniform(-7, 7)).det() - 1.0) <= 1e-12


def test_conjugation_identity_random():
    gen = RngContract(4).generator()
    for _ in range(10_000):
        k = gen.uniform(0.0, math.pi)
        if math.sin(k) < 1e-3:
            continue
        v = gen.uniform(-10, 10)
        E = make_energy_from_k(k)
        m = conjugated_transfer(E, v)  # raises AssertionError on mismatch > 1e-11
        assert abs(m.det() - 1.0) <= 1e-10


def test_conjugated_transfer_values():
    # v = 0 reduces to the rotation
    E = make_energy_from_k(1.234)
    assert conjugated_transfer(E, 0.0).max_abs_diff(rotation(E.k)) <= 1e-12
    # at k = pi/2 the basis change is the identity, so the conjugated matrix
    # is the raw transfer matrix; R_{pi/2}(1 + P) multiplied by hand gives the same
    E0 = make_energy_from_E(0.0)
    assert conjugated_transfer(E0, 2.0).max_abs_diff(Mat2(2.0, -1.0, 1.0, 0.0)) <= 1e-12


def test_spectrum_and_trace_identities():
    gen = RngContract(5).generator()
    for _ in range(2000):
        E = make_energy_from_k(gen.uniform(0.1, math.pi - 0.1))
        v = gen.uniform(-8, 8)
        m = conjugated_transfer(E, v)
        sym = Mat2(
            m.a11 * m.a11 + m.a21 * m.a21,
            m.a11 * m.a12 + m.a21 * m.a22,
            m.a11 * m.a12 + m.a21 * m.a22,
            m.a12 * m.a12 + m.a22 * m.a22,
        )
        lo, hi = eig2_sym(sym)
        lam = squared_singular_value(E, v)
        a = (v / E.sin_k) ** 2
        assert hi == pytest.approx(lam, abs=1e-10 * max(1.0, lam))
        assert lo == pytest.approx(1.0 / lam, abs=1e-10)
        assert lam + 1.0 / lam == pytest.approx(2.0 + a, abs=1e-10 * max(1.0, a))


def test_hat_transfer():
    E = make_energy_from_k(0.9)
    assert hat_transfer(E, 0.0, 1.3).max_abs_diff(conjugated_transfer(E, 1.3)) == 0.0
    assert hat_transfer(E, 0.4, 0.0).max_abs_diff(rotation(0.4 + E.k)) <= 1e-12
    gen = RngContract(6).generator()
    for _ in range(1000):
        E = make_energy_from_k(gen.uniform(0.1, math.pi - 0.1))
        m = hat_transfer(E, gen.uniform(-3, 3), gen.uniform(-5, 5))
        assert abs(m.det() - 1.0) <= 1e-11
