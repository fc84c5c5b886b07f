import numpy as np
import pytest

from fockforge.linalg import (NonSquareError, double_factorial, enumerate_pairings,
                              fredholm_det, is_antisymmetric, is_symmetric,
                              polar_decompose, sqrtm_psd, transpose_sharp)


def test_transpose_sharp_examples():
    assert np.array_equal(transpose_sharp([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]))
    assert np.array_equal(transpose_sharp(np.eye(3)), np.eye(3))
    assert transpose_sharp([[1j]])[0, 0] == 1j


def test_transpose_sharp_involution_and_product():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    b = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    assert np.allclose(transpose_sharp(transpose_sharp(a)), a)
    assert np.allclose(transpose_sharp(a @ b), transpose_sharp(b) @ transpose_sharp(a))


def test_symmetry_predicates():
    assert is_symmetric([[0, 1], [1, 0]])
    assert is_antisymmetric([[0, 1], [-1, 0]])
    assert not is_symmetric([[0, 1], [2, 0]])
    with pytest.raises(NonSquareError):
        is_symmetric(np.zeros((2, 3)))


def test_fredholm_det_examples():
    assert fredholm_det(np.zeros((2, 2))) == pytest.approx(1.0)
    assert fredholm_det(np.diag([1.0, 2.0])) == pytest.approx(6.0)
    assert fredholm_det(np.diag([-1.0, 0.0])) == pytest.approx(0.0)


def test_fredholm_det_multiplicative_and_eigenvalues():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    b = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    lhs = fredholm_det(a + b + a @ b)  # (1+a)(1+b) = 1 + (a + b + ab)
    assert lhs == pytest.approx(fredholm_det(a) * fredholm_det(b), rel=1e-9)
    eigprod = np.prod(np.linalg.eigvals(np.eye(6) + a))
    assert abs(fredholm_det(a) - eigprod) <= 1e-9 * abs(eigprod)


def test_polar_examples():
    u, pos = polar_decompose(np.diag([2.0, -3.0]))
    assert np.allclose(u, np.diag([1.0, -1.0]))
    assert np.allclose(pos, np.diag([2.0, 3.0]))
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    u2, pos2 = polar_decompose(rot)
    assert np.allclose(u2, rot) and np.allclose(pos2, np.eye(2))


def test_polar_reconstruction_and_positivity():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u, pos = polar_decompose(a)
    assert np.linalg.norm(u @ pos - a, 2) <= 1e-10
    assert np.linalg.norm(pos - pos.conj().T, 2) <= 1e-10
    assert np.linalg.eigvalsh(pos).min() >= -1e-10


def test_polar_kernel_partial_isometry():
    a = np.diag([2.0, 0.0, 1.0])
    u, pos = polar_decompose(a)
    # initial space excludes the kernel direction
    assert np.allclose(u @ u.T @ u, u)
    assert abs(u[1, 1]) <= 1e-12
    assert np.allclose(u @ pos, a)


@pytest.mark.parametrize("m", range(7))
def test_pairing_counts(m):
    pairings = enumerate_pairings(m)
    assert len(pairings) == double_factorial(2 * m - 1)
    for p in pairings:
        assert p.sign in (-1, 1)
        firsts = [p.perm[2 * j] for j in range(m)]
        assert firsts == sorted(firsts)
        for i, j in p.pairs():
            assert i < j
        assert sorted(p.perm) == list(range(2 * m))


def test_pairing_m2_signs():
    # (01)(23) +, (02)(13) -, (03)(12) +
    signs = {tuple(p.perm): p.sign for p in enumerate_pairings(2)}
    assert signs[(0, 1, 2, 3)] == 1
    assert signs[(0, 2, 1, 3)] == -1
    assert signs[(0, 3, 1, 2)] == 1


def test_sqrtm_psd():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    p = a @ a.conj().T
    s = sqrtm_psd(p)
    assert np.linalg.norm(s @ s - p, 2) <= 1e-10 * np.linalg.norm(p, 2)
    with pytest.raises(ValueError):
        sqrtm_psd(np.diag([1.0, -1.0]))
