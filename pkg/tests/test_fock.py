import numpy as np
import pytest
import scipy.linalg

from fockforge.fock import (CutoffError, FockSpace, build_space, dgamma, exp_law,
                            gamma, gamma_by_columns)


def test_dimensions():
    assert build_space("fermi", 2).dim == 4
    assert build_space("bose", 1, 5).dim == 6
    assert build_space("bose", 2, 3).dim == 10  # C(5,2)


def test_basis_is_graded_then_lexicographic():
    sp = FockSpace("bose", 2, 2)
    assert sp.basis == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    spf = FockSpace("fermi", 3)
    assert spf.basis[0] == (0, 0, 0)
    totals = [sum(occ) for occ in spf.basis]
    assert totals == sorted(totals)


def test_dimension_guard():
    with pytest.raises(CutoffError):
        FockSpace("bose", 6, 40)


def test_bose_ladder_matrix():
    sp = FockSpace("bose", 1, 4)
    a_dag = sp.creation(0)
    assert np.allclose(np.diagonal(a_dag, -1), [1, np.sqrt(2), np.sqrt(3), 2.0])
    assert np.allclose(a_dag @ sp.vacuum(), np.eye(5)[1])


def test_fermi_creation_d1():
    sp = FockSpace("fermi", 1)
    assert np.allclose(sp.creation(0), [[0, 0], [1, 0]])


def test_fermi_car_exact():
    sp = FockSpace("fermi", 4)
    rng = np.random.default_rng(0)
    w1 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    w2 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a1, a2s = sp.annihilate(w1), sp.create(w2)
    anti = a1 @ a2s + a2s @ a1
    scale = np.linalg.norm(w1) * np.linalg.norm(w2)
    assert np.linalg.norm(anti - np.vdot(w1, w2) * np.eye(sp.dim), 2) <= 1e-13 * scale
    both = sp.create(w1) @ sp.create(w2) + sp.create(w2) @ sp.create(w1)
    assert np.linalg.norm(both, 2) <= 1e-13 * scale


def test_annihilate_kills_vacuum():
    for sp in (FockSpace("fermi", 3), FockSpace("bose", 2, 4)):
        w = np.array([1.0, 2.0j] + [0.5] * (sp.d - 2))
        assert np.linalg.norm(sp.annihilate(w) @ sp.vacuum()) == 0.0


def test_dgamma_examples():
    sp = FockSpace("bose", 2, 3)
    n_op = dgamma(sp, np.eye(2))
    assert np.allclose(n_op, sp.number_op())
    assert not np.any(dgamma(sp, np.zeros((2, 2))))
    spf = FockSpace("fermi", 2)
    h = np.diag([1.5, 2.5])
    diag = np.diagonal(dgamma(spf, h)).real
    expect = [n1 * 1.5 + n2 * 2.5 for (n1, n2) in spf.basis]
    assert np.allclose(diag, expect)


def test_dgamma_lie_morphism():
    sp = FockSpace("bose", 2, 4)
    rng = np.random.default_rng(1)
    h1 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    h2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    d1, d2 = dgamma(sp, h1), dgamma(sp, h2)
    lhs = d1 @ d2 - d2 @ d1
    rhs = dgamma(sp, h1 @ h2 - h2 @ h1)
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-9


def test_gamma_diagonal_and_parity():
    sp = FockSpace("bose", 1, 4)
    lam = 0.7 - 0.2j
    assert np.allclose(gamma(sp, np.array([[lam]])), np.diag([lam**n for n in range(5)]))
    for space in (FockSpace("bose", 2, 3), FockSpace("fermi", 3)):
        assert np.array_equal(gamma(space, -np.eye(space.d)), space.parity())


def test_gamma_fermi_diagonal_eigenvalues():
    sp = FockSpace("fermi", 2)
    a, b = 0.3, 1.7
    got = np.sort_complex(np.diagonal(gamma(sp, np.diag([a, b]))))
    assert np.allclose(np.sort_complex(np.array([1, a, b, a * b])), got)


def test_gamma_morphism_and_two_routes():
    rng = np.random.default_rng(2)
    for sp in (FockSpace("bose", 2, 5), FockSpace("fermi", 3)):
        p1 = rng.standard_normal((sp.d, sp.d)) + 1j * rng.standard_normal((sp.d, sp.d))
        p2 = rng.standard_normal((sp.d, sp.d)) + 1j * rng.standard_normal((sp.d, sp.d))
        p1 /= 2.0
        p2 /= 2.0
        lhs = gamma(sp, p2) @ gamma(sp, p1)
        assert np.linalg.norm(lhs - gamma(sp, p2 @ p1), 2) <= 1e-9
        assert np.linalg.norm(gamma(sp, p1) - gamma_by_columns(sp, p1), 2) <= 1e-10
    assert np.allclose(gamma(FockSpace("bose", 2, 3), np.eye(2)), np.eye(10))


def test_gamma_exp_identity():
    sp = FockSpace("fermi", 3)
    rng = np.random.default_rng(3)
    h = rng.standard_normal((3, 3))
    h = h + h.T
    lhs = gamma(sp, scipy.linalg.expm(1j * h))
    rhs = scipy.linalg.expm(1j * dgamma(sp, h))
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-8


def test_gamma_singular_fallback():
    sp = FockSpace("bose", 2, 3)
    p = np.array([[0.0, 0.0], [0.0, 0.5]])
    g = gamma(sp, p)
    # vacuum stays, any occupation of mode 0 is annihilated
    assert g[0, 0] == 1.0
    idx = sp.index[(1, 0)]
    assert np.linalg.norm(g[:, idx]) == 0.0


def test_lambda_values():
    sp = FockSpace("bose", 1, 4)
    assert np.allclose(np.diagonal(sp.lambda_op()).real, [1, 1, -1, -1, 1])
    assert np.allclose(sp.lambda_op() @ sp.lambda_op(), np.eye(sp.dim))


def test_exp_law_vacuum_dims_isometry():
    f1, f2 = FockSpace("fermi", 1), FockSpace("fermi", 1)
    u, tgt = exp_law(f1, f2)
    assert tgt.dim == 4 and u.shape == (4, 4)
    assert np.allclose(u @ np.kron(f1.vacuum(), f2.vacuum()), tgt.vacuum())
    assert np.linalg.norm(u.conj().T @ u - np.eye(4), 2) <= 1e-10
    b1, b2 = FockSpace("bose", 1, 3), FockSpace("bose", 1, 2)
    ub, tb = exp_law(b1, b2)
    assert tb.n_max == 5
    assert np.linalg.norm(ub.conj().T @ ub - np.eye(b1.dim * b2.dim), 2) <= 1e-10


def test_exp_law_errors():
    with pytest.raises(ValueError):
        exp_law(FockSpace("fermi", 1), FockSpace("bose", 1, 2))
    small = FockSpace("bose", 2, 3)
    with pytest.raises(CutoffError):
        exp_law(FockSpace("bose", 1, 2), FockSpace("bose", 1, 2), target=small)


def test_exp_law_intertwines_dgamma_and_gamma():
    rng = np.random.default_rng(4)
    s1, s2 = FockSpace("bose", 1, 3), FockSpace("bose", 1, 3)
    u, tgt = exp_law(s1, s2)
    h1 = rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1))
    h2 = rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1))
    hsum = scipy.linalg.block_diag(h1, h2)
    lhs = dgamma(tgt, hsum) @ u
    rhs = u @ (np.kron(dgamma(s1, h1), np.eye(s2.dim)) + np.kron(np.eye(s1.dim), dgamma(s2, h2)))
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-9
    p1 = 0.5 * (rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1)))
    p2 = 0.5 * (rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1)))
    lhs2 = gamma(tgt, scipy.linalg.block_diag(p1, p2)) @ u
    rhs2 = u @ np.kron(gamma(s1, p1), gamma(s2, p2))
    assert np.linalg.norm(lhs2 - rhs2, 2) <= 1e-9


def test_exp_law_two_particle_prefactor():
    # the sqrt(2!/1!1!) normalization: one particle on each side lands on
    # the normalized two-particle state, matching a*(e1) a*(e2) vacuum
    f1, f2 = FockSpace("fermi", 1), FockSpace("fermi", 1)
    u, tgt = exp_law(f1, f2)
    pair = u @ np.kron(f1.creation(0) @ f1.vacuum(), f2.creation(0) @ f2.vacuum())
    direct = tgt.creation(0) @ tgt.creation(1) @ tgt.vacuum()
    assert np.allclose(pair, direct)
    assert np.linalg.norm(pair) == pytest.approx(1.0)


def test_exp_law_parity_string_for_fermions():
    # a*(0, w) on the sum space corresponds to parity (x) a*(w)
    f1, f2 = FockSpace("fermi", 2), FockSpace("fermi", 1)
    u, tgt = exp_law(f1, f2)
    w = np.array([0.3 + 1j])
    lhs = tgt.create(np.concatenate([np.zeros(2), w])) @ u
    rhs = u @ np.kron(f1.parity(), f2.create(w))
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-12


def test_lambda_exp_law_identity():
    # Lambda U = U (Lambda1 (x) Lambda2) (-1)^{N1 (x) N2}
    f1, f2 = FockSpace("fermi", 2), FockSpace("fermi", 2)
    u, tgt = exp_law(f1, f2)
    cross = np.diag([(-1.0) ** (sum(o1) * sum(o2))
                     for o1 in f1.basis for o2 in f2.basis]).astype(complex)
    lhs = tgt.lambda_op() @ u
    rhs = u @ np.kron(f1.lambda_op(), f2.lambda_op()) @ cross
    assert np.linalg.norm(lhs - rhs, 2) == 0.0
