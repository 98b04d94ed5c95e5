from __future__ import annotations

import math

import numpy as np
import pytest

from pplab import (
    DensityMatrix,
    InvalidInputError,
    Projector,
    anticommutator,
    expectation,
    partial_trace,
    resolve_tolerance,
    tensor_product,
)
from support import ginibre_density, haar_projector


def test_density_matrix_accepts_valid():
    rho = DensityMatrix(np.eye(2, dtype=complex) / 2)
    assert rho.dim == 2


def test_density_matrix_rejects_bad_trace():
    with pytest.raises(InvalidInputError, match="trace = 1"):
        DensityMatrix(np.diag([0.5, 0.4]).astype(complex))


def test_density_matrix_rejects_non_hermitian():
    m = np.array([[0.5, 0.3], [0.1, 0.5]], dtype=complex)
    with pytest.raises(InvalidInputError, match="Hermitian"):
        DensityMatrix(m)


def test_density_matrix_rejects_negative_eigenvalue():
    m = np.diag([1.2, -0.2]).astype(complex)
    with pytest.raises(InvalidInputError, match="positive semidefinite"):
        DensityMatrix(m)


def test_projector_rejects_non_idempotent():
    with pytest.raises(InvalidInputError, match="idempotent"):
        Projector(np.diag([0.5, 0.5]).astype(complex))


def test_projector_rank_inferred():
    p = Projector(np.diag([1.0, 1.0, 0.0]).astype(complex))
    assert p.rank == 2


def test_projector_rejects_zero():
    with pytest.raises(InvalidInputError):
        Projector(np.zeros((2, 2), dtype=complex))


def test_anticommutator_matches_definition():
    rng = np.random.default_rng(7)
    a = haar_projector(rng, 3).matrix
    b = haar_projector(rng, 3).matrix
    assert np.allclose(anticommutator(a, b), a @ b + b @ a)


def test_tensor_product_dimensions_and_order():
    a = np.diag([1.0, 0.0]).astype(complex)
    b = np.array([[0, 1], [1, 0]], dtype=complex)
    t = tensor_product(a, b)
    assert t.shape == (4, 4)
    assert np.allclose(t, np.kron(a, b))


def test_expectation_density_and_array():
    rho = DensityMatrix(np.diag([0.75, 0.25]).astype(complex))
    sz = np.diag([1.0, -1.0]).astype(complex)
    assert expectation(rho, sz) == pytest.approx(0.5)
    assert expectation(rho.matrix, sz) == pytest.approx(0.5)


def test_partial_trace_of_product_state():
    rng = np.random.default_rng(11)
    a = ginibre_density(rng, 2).matrix
    b = ginibre_density(rng, 3).matrix
    joint = np.kron(a, b)
    assert np.allclose(partial_trace(joint, (2, 3), 0), a)
    assert np.allclose(partial_trace(joint, (2, 3), 1), b)


def test_partial_trace_three_factors():
    rng = np.random.default_rng(13)
    parts = [ginibre_density(rng, d).matrix for d in (2, 2, 2)]
    joint = np.kron(np.kron(parts[0], parts[1]), parts[2])
    assert np.allclose(partial_trace(joint, (2, 2, 2), 1), parts[1])


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(17)
    rho = ginibre_density(rng, 4).matrix
    reduced = partial_trace(rho, (2, 2), 0)
    assert np.trace(reduced) == pytest.approx(1.0)


def test_resolve_tolerance_default_and_env(monkeypatch):
    monkeypatch.delenv("PPLAB_TOL", raising=False)
    assert resolve_tolerance() == pytest.approx(1e-10)
    monkeypatch.setenv("PPLAB_TOL", "1e-6")
    assert resolve_tolerance() == pytest.approx(1e-6)


def test_resolve_tolerance_rejects_garbage(monkeypatch):
    monkeypatch.setenv("PPLAB_TOL", "not-a-number")
    with pytest.raises(InvalidInputError):
        resolve_tolerance()
    monkeypatch.setenv("PPLAB_TOL", "-1e-10")
    with pytest.raises(InvalidInputError):
        resolve_tolerance()


def test_density_matrix_accepts_tiny_negative_noise():
    eps = 1e-13
    m = np.diag([1.0 + eps, -eps]).astype(complex)
    rho = DensityMatrix(m)
    assert math.isclose(float(np.real(np.trace(rho.matrix))), 1.0, abs_tol=1e-9)
