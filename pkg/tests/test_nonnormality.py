import numpy as np
import pytest
from conftest import random_circulant, random_hermitian, random_matrix, random_unitary

from specto import (
    Matrix,
    commutator_norm,
    frobenius_norm,
    henrici_number,
    is_normal,
    nonnormality_report,
    schur_departure,
)

JORDAN2 = Matrix([[0.0, 1.0], [0.0, 0.0]])


class TestHenrici:
    def test_identity_is_normal(self):
        assert henrici_number(Matrix.identity(4)) == 0.0

    def test_jordan_block_closed_form(self):
        # commutator = diag(1, -1), ||.||_F = sqrt(2); ||W||_F^2 = 1
        assert henrici_number(JORDAN2) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_jordan_block_brute_force_oracle(self):
        a = JORDAN2.array
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.linalg.norm(comm) / np.linalg.norm(a) ** 2
        assert henrici_number(JORDAN2) == pytest.approx(expected, abs=1e-14)

    def test_zero_matrix_flagged_degenerate(self):
        with pytest.warns(RuntimeWarning, match="degenerate"):
            assert henrici_number(Matrix.zeros(3, 3)) == 0.0

    def test_scale_invariant(self, rng):
        m = random_matrix(rng, 6)
        base = henrici_number(m)
        for c in (0.01, 3.0, -17.5):
            assert henrici_number(c * m) == pytest.approx(base, abs=1e-10)

    def test_unitary_similarity_invariant(self, rng):
        for _ in range(10):
            m = random_matrix(rng, 6)
            u = random_unitary(rng, 6)
            rotated = u @ m @ u.adjoint()
            assert henrici_number(rotated) == pytest.approx(henrici_number(m), abs=1e-9)

    def test_requires_square(self):
        with pytest.raises(ValueError):
            henrici_number(Matrix.zeros(2, 3))


class TestSchurDeparture:
    def test_already_triangular(self):
        evs, dep = schur_departure(Matrix([[1.0, 3.0], [0.0, 2.0]]))
        assert dep == pytest.approx(3.0, abs=1e-10)

    def test_hermitian(self, rng):
        _, dep = schur_departure(random_hermitian(rng, 6))
        assert dep <= 1e-10

    def test_jordan_block(self):
        evs, dep = schur_departure(JORDAN2)
        assert dep == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(evs, [0, 0], atol=1e-12)

    def test_departure_identity(self, rng):
        # dep^2 + sum|lambda|^2 == ||W||_F^2, 100 random matrices n <= 16
        for _ in range(100):
            n = int(rng.integers(2, 17))
            m = random_matrix(rng, n)
            evs, dep = schur_departure(m)
            lhs = dep**2 + np.sum(np.abs(evs) ** 2)
            assert lhs == pytest.approx(frobenius_norm(m) ** 2, rel=1e-8)


class TestIsNormal:
    def test_unitary(self, rng):
        assert is_normal(random_unitary(rng, 5))

    def test_jordan_block(self):
        assert not is_normal(JORDAN2, tol=1e-8)
        assert commutator_norm(JORDAN2) == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_circulant(self, rng):
        c = random_circulant(rng, 4)
        assert is_normal(c)
        a = c.array
        assert np.linalg.norm(a @ a.conj().T - a.conj().T @ a) <= 1e-10

    def test_departure_zero_iff_normal(self, rng):
        normal_samples = [random_hermitian(rng, 5), random_unitary(rng, 4), random_circulant(rng, 6)]
        for m in normal_samples:
            _, dep = schur_departure(m)
            assert dep <= 1e-8
            assert is_normal(m, tol=1e-10)
        for _ in range(5):
            m = random_matrix(rng, 5)
            _, dep = schur_departure(m)
            assert dep > 1e-6
            assert not is_normal(m, tol=1e-10)


class TestReport:
    def test_fields_consistent(self, rng):
        m = random_matrix(rng, 5)
        rep = nonnormality_report(m)
        assert rep.henrici == pytest.approx(commutator_norm(m) / frobenius_norm(m) ** 2, rel=1e-12)
        assert not rep.is_normal

    def test_normal_report(self, rng):
        rep = nonnormality_report(random_hermitian(rng, 4))
        assert rep.is_normal
        assert rep.henrici <= 1e-10
        assert rep.schur_departure <= 1e-10 * max(1.0, rep.commutator_norm)
