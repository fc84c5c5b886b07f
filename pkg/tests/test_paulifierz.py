import numpy as np
import pytest
import scipy.linalg

from fockforge.fock import FockSpace
from fockforge.ops import pair_exponential_vacuum
from fockforge.paulifierz import (PauliFierzModel, check_middle, confined_pf_check,
                                  coupled_annihilate, coupled_create, dressed_coupling,
                                  hamiltonian, jpvj_closed_form, liouvillean_bundle,
                                  pair_squeezer, semi_comparison_operator, semi_liouvillean,
                                  spin_boson, standard_comparison_operator,
                                  standard_liouvillean, v_star)


@pytest.fixture
def rng():
    return np.random.default_rng(17)


def test_model_validation():
    with pytest.raises(ValueError):
        PauliFierzModel(np.array([[0, 1j], [1j, 0]]), np.eye(1), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        PauliFierzModel(np.eye(2), -np.eye(1), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        PauliFierzModel(np.eye(2), np.eye(1), np.zeros((3, 2)))
    model = spin_boson()
    norms = model.hypothesis_norms()
    assert all(np.isfinite(v) for v in norms.values())
    assert "(1+rho)^1/2 v" in norms


def test_coupled_create_factored(rng):
    k, d = 2, 2
    sp = FockSpace("bose", d, 4)
    b = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    w = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    q = np.einsum("ij,m->imj", b, w).reshape(k * d, k)
    got = coupled_create(k, sp, q)
    assert np.linalg.norm(got - np.kron(b, sp.create(w)), 2) <= 1e-12
    assert np.linalg.norm(coupled_annihilate(k, sp, q) - got.conj().T, 2) == 0.0
    assert not np.any(coupled_create(k, sp, np.zeros((k * d, k))))


def test_coupled_create_linearity(rng):
    k, d = 2, 2
    sp = FockSpace("bose", d, 3)
    q1 = rng.standard_normal((k * d, k)) + 1j * rng.standard_normal((k * d, k))
    q2 = rng.standard_normal((k * d, k)) + 1j * rng.standard_normal((k * d, k))
    lhs = coupled_create(k, sp, q1 + q2)
    rhs = coupled_create(k, sp, q1) + coupled_create(k, sp, q2)
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-12


def test_v_star(rng):
    k, d = 3, 2
    v = rng.standard_normal((k * d, k)) + 1j * rng.standard_normal((k * d, k))
    vs = v_star(v, k, d)
    assert np.linalg.norm(v_star(vs, k, d) - v) <= 1e-14
    b = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    w = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    q = np.einsum("ij,m->imj", b, w).reshape(k * d, k)
    expect = np.einsum("ij,m->imj", b.conj().T, np.conj(w)).reshape(k * d, k)
    assert np.linalg.norm(v_star(q, k, d) - expect) <= 1e-13
    # Hermitian system part with a real mode function is a fixed point
    b_h = b + b.conj().T
    q_h = np.einsum("ij,m->imj", b_h, w.real).reshape(k * d, k)
    assert np.linalg.norm(v_star(q_h, k, d) - q_h) <= 1e-13
    # defining bilinear identity
    phi = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    psi = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    wv = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    lhs = np.vdot(np.einsum("i,m->im", phi, wv).reshape(-1), v @ psi)
    rhs = np.vdot(vs @ phi, np.einsum("i,m->im", psi, np.conj(wv)).reshape(-1))
    assert abs(lhs - rhs) <= 1e-12


def test_check_middle(rng):
    k, h1, h2 = 2, 3, 3
    a0 = rng.standard_normal((h1, h1))
    c = rng.standard_normal((k, k))
    bbar = rng.standard_normal((k, k))
    lhs = check_middle(bbar, np.kron(c, a0), k, h1)
    assert np.linalg.norm(lhs - np.kron(c, np.kron(bbar, a0))) <= 1e-12
    eye_mid = check_middle(np.eye(k), np.kron(c, a0), k, h1)
    assert np.linalg.norm(eye_mid - np.kron(c, np.kron(np.eye(k), a0))) <= 1e-12
    a = rng.standard_normal((k * h1, k * h1))
    with pytest.raises(ValueError):
        check_middle(bbar, a, k, h1 + 1)


def test_check_middle_iterated(rng):
    # inserting twice stacks the middle legs: C (x) b2 (x) b1 (x) A0
    k, h = 2, 2
    c = rng.standard_normal((k, k))
    a0 = rng.standard_normal((h, h))
    b1 = rng.standard_normal((k, k))
    b2 = rng.standard_normal((k, k))
    once = check_middle(b1, np.kron(c, a0), k, h)
    twice = check_middle(b2, once, k, k * h)
    want = np.kron(c, np.kron(b2, np.kron(b1, a0)))
    assert np.linalg.norm(twice - want) <= 1e-12


def test_hamiltonian_free_spectrum():
    model = spin_boson(coupling=0.0, splitting=2.0, gamma_value=None, cutoff=2)
    ham, _ = hamiltonian(model)
    got = np.sort(np.linalg.eigvalsh(ham))
    expect = np.sort([s + n for s in (-1.0, 1.0) for n in range(3)])
    assert np.allclose(got, expect)


def test_hamiltonian_ground_state_lowering():
    e0 = {}
    for lam in (0.0, 0.2):
        model = spin_boson(coupling=lam, gamma_value=None, cutoff=12)
        ham, _ = hamiltonian(model)
        e0[lam] = np.linalg.eigvalsh(ham).min()
    assert e0[0.2] < e0[0.0]


def test_hamiltonian_hermitian(rng):
    model = spin_boson(coupling=0.3, gamma_value=None, cutoff=6)
    ham, _ = hamiltonian(model)
    assert np.linalg.norm(ham - ham.conj().T, 2) <= 1e-12


def test_semi_liouvillean_structure():
    with pytest.raises(ValueError):
        semi_liouvillean(spin_boson(gamma_value=None, cutoff=4))
    model = spin_boson(coupling=0.2, gamma_value=0.25, cutoff=4)
    ell, space = semi_liouvillean(model)
    assert space.n_max == 8
    assert np.linalg.norm(ell - ell.conj().T, 2) <= 1e-12


def test_semi_liouvillean_free_difference_spectrum():
    model = spin_boson(coupling=0.0, gamma_value=0.0, cutoff=3)
    ell, space = semi_liouvillean(model)
    got = np.sort(np.linalg.eigvalsh(ell))
    expect = []
    for s in (-0.5, 0.5):
        for occ in space.basis:
            expect.append(s + occ[0] - occ[1])
    assert np.allclose(got, np.sort(expect))


def test_standard_liouvillean_structure():
    model = spin_boson(coupling=0.2, gamma_value=0.25, cutoff=4)
    ell, _ = standard_liouvillean(model)
    assert np.linalg.norm(ell - ell.conj().T, 2) <= 1e-12
    assert abs(np.trace(ell)) <= 1e-9
    free = spin_boson(coupling=0.0, gamma_value=0.25, cutoff=4)
    ell0, _ = standard_liouvillean(free)
    ev = np.sort(np.linalg.eigvalsh(ell0))
    assert np.max(np.abs(ev + ev[::-1])) <= 1e-10


def test_jpvj_closed_form(rng):
    from fockforge.paulifierz import _doubled_swap_gamma

    model = spin_boson(coupling=0.15, gamma_value=0.25, cutoff=4)
    _, space = semi_liouvillean(model)
    inter = coupled_create(2, space, dressed_coupling(model))
    v_full = inter + inter.conj().T
    jw = _doubled_swap_gamma(space)
    mirrored = np.kron(np.eye(2), jw) @ np.conj(v_full) @ np.kron(np.eye(2), jw)
    sandwich = np.kron(np.eye(2), mirrored)
    closed = jpvj_closed_form(model, space)
    assert np.linalg.norm(sandwich - closed, 2) <= 1e-10


def test_left_right_interactions_commute_subcutoff():
    model = spin_boson(coupling=0.15, gamma_value=0.25, cutoff=5)
    _, space = semi_liouvillean(model)
    inter = coupled_create(2, space, dressed_coupling(model))
    v_full = inter + inter.conj().T
    pi_v = check_middle(np.eye(2), v_full, 2, space.dim)
    jvj = jpvj_closed_form(model, space)
    comm = pi_v @ jvj - jvj @ pi_v
    sub = np.kron(np.eye(4), space.sector_projector(space.n_max - 2))
    assert np.linalg.norm(sub @ comm @ sub, 2) <= 1e-9


def test_free_kms_vector_in_kernel():
    # gamma = exp(-beta h), v = 0: the Gibbs-dressed vector is L-null
    beta = 1.0
    h = np.array([[1.0]])
    g = float(np.exp(-beta))
    model = spin_boson(coupling=0.0, gamma_value=g, cutoff=5)
    ell, space = standard_liouvillean(model)
    pair = np.zeros((2, 2), dtype=complex)
    pair[0, 1] = np.sqrt(g)
    pair[1, 0] = np.sqrt(g)
    boson_vec = pair_exponential_vacuum(space, pair)
    kvec = scipy.linalg.expm(-beta * model.K / 2).reshape(-1)
    vec = np.kron(kvec, boson_vec)
    vec /= np.linalg.norm(vec)
    assert np.linalg.norm(ell @ vec) <= 1e-10


def test_comparison_operators_v0_exact():
    model = spin_boson(coupling=0.0, gamma_value=0.25, cutoff=4)
    l_semi, _ = semi_liouvillean(model)
    d_semi, _ = semi_comparison_operator(model, 4)
    assert np.max(np.abs(np.sort(np.linalg.eigvalsh(l_semi))
                         - np.sort(np.linalg.eigvalsh(d_semi)))) <= 1e-10
    l_std, _ = standard_liouvillean(model)
    d_std, _ = standard_comparison_operator(model, 4)
    assert np.max(np.abs(np.sort(np.linalg.eigvalsh(l_std))
                         - np.sort(np.linalg.eigvalsh(d_std)))) <= 1e-10


def test_pair_squeezer_is_thermal_dressing():
    from fockforge.thermal import DoubledRep, ThermalParams

    rep = DoubledRep(ThermalParams("bose", np.array([[0.25]])), single_cutoff=4)
    assert np.linalg.norm(pair_squeezer(rep.space, np.array([[0.25]])) - rep.r_gamma(), 2) <= 1e-12


@pytest.mark.slow
def test_confined_check_small_grid():
    model = spin_boson(coupling=0.1, gamma_value=0.25, cutoff=8)
    rep = confined_pf_check(model, cutoffs=(6, 8))
    assert rep["semi"][1] < rep["semi"][0]
    assert rep["standard"][1] < rep["standard"][0]
    assert not rep["semi_detail"][-1]["unmatched"]


def test_liouvillean_bundle():
    model = spin_boson(coupling=0.1, gamma_value=0.25, cutoff=3)
    bundle = liouvillean_bundle(model)
    for op in (bundle.semi, bundle.standard, bundle.semi_free, bundle.standard_free):
        assert np.linalg.norm(op - op.conj().T, 2) <= 1e-12
    assert bundle.semi.shape == bundle.semi_free.shape
