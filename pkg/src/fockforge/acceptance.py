"""The acceptance battery: one function per criterion, each returning a
report dict with named residuals, tolerances and a pass flag.

Shared by the test suite and the command-line runner; every tolerance is
pinned here, not at call sites.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .bogolubov import (metaplectic_pair, positive_symplectic_from_c,
                        random_orthogonal_blocks, shale_implementer)
from .fock import FockSpace, gamma
from .lattice import RealSubspace, fermionic_duality_check
from .ops import DoubledVector, apply_doubled_matrix, euclidean_form, field, gaussian_vector
from .paulifierz import confined_pf_check, spin_boson
from .quasifree import aw_covariance, reduce_bose, reconstruction_defect
from .thermal import DoubledRep, ThermalParams, confined_gibbs, kms_check


def _rng(seed):
    return np.random.default_rng(seed)


def _report(name, residual, tolerance, extras=None):
    rep = {
        "name": name,
        "residual": float(residual),
        "tolerance": float(tolerance),
        "pass": bool(residual <= tolerance),
    }
    if extras:
        rep.update(extras)
    return rep


def criterion_car_exactness(seed=42):
    """CAR anticommutators are exact for random dimensions and vectors."""
    rng = _rng(seed)
    worst = 0.0
    for d in (2, 4, 6):
        space = FockSpace("fermi", d)
        eye = np.eye(space.dim)
        for _ in range(34):
            y1 = DoubledVector.real_point(rng.standard_normal(d) + 1j * rng.standard_normal(d))
            y2 = DoubledVector.real_point(rng.standard_normal(d) + 1j * rng.standard_normal(d))
            f1, f2 = field(space, y1), field(space, y2)
            target = 2.0 * euclidean_form(y1, y2) * eye
            worst = max(worst, np.linalg.norm(f1 @ f2 + f2 @ f1 - target, 2))
    return _report("car-exactness", worst, 1e-12)


def criterion_ccr_truncation(seed=42):
    """[a(w1), a*(w2)] - (w1|w2) vanishes exactly below the top sector."""
    rng = _rng(seed)
    worst = 0.0
    for d, cutoff in ((1, 10), (2, 8), (3, 6)):
        space = FockSpace("bose", d, cutoff)
        sub = space.sector_projector(cutoff - 1)
        for _ in range(10):
            w1 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            w2 = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            comm = space.annihilate(w1) @ space.create(w2) - space.create(w2) @ space.annihilate(w1)
            defect = comm - np.vdot(w1, w2) * np.eye(space.dim)
            worst = max(worst, np.linalg.norm(sub @ defect @ sub, 2))
    return _report("ccr-truncation", worst, 1e-12)


def criterion_trace_identities(seed=42):
    """Tr Gamma(gamma) against the closed determinant formulas."""
    rng = _rng(seed)
    worst_fermi = 0.0
    for d in (2, 3, 4):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        g = a @ a.conj().T / d
        space = FockSpace("fermi", d)
        _, trace, reference, _ = confined_gibbs(space, g)
        worst_fermi = max(worst_fermi, abs(trace - reference) / abs(reference))
    worst_bose = 0.0
    cutoff = 20
    for d in (1, 2):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        g = a @ a.conj().T
        g = 0.8 * g / max(np.linalg.eigvalsh(g).max(), 1e-12)
        space = FockSpace("bose", d, cutoff)
        _, trace, reference, tail = confined_gibbs(space, g)
        evals = np.linalg.eigvalsh(g)
        bound = 0.0
        top = float(evals.max())
        for n in range(cutoff + 1, cutoff + 400):
            bound += (n + 1) ** (d - 1) * top ** n * d
        ok = 0.0 <= tail <= bound + 1e-12
        worst_bose = max(worst_bose, 0.0 if ok else tail)
    res = max(worst_fermi, worst_bose)
    return _report("trace-identities", res, 1e-12,
                   {"fermi_rel": worst_fermi, "bose_tail_violation": worst_bose})


def criterion_implementers(seed=42):
    """Shale/Pin intertwining and the metaplectic composition sign."""
    rng = _rng(seed)
    worst_fermi = 0.0
    for d in (2, 3):
        space = FockSpace("fermi", d)
        for _ in range(10):
            blocks = random_orthogonal_blocks(d, rng)
            u = shale_implementer(space, blocks)
            mat = blocks.matrix()
            z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            y = DoubledVector.real_point(z)
            lhs = u @ field(space, y) @ u.conj().T
            rhs = field(space, apply_doubled_matrix(mat, y))
            worst_fermi = max(worst_fermi, np.linalg.norm(lhs - rhs, 2))
    space_b = FockSpace("bose", 1, 20)
    sub = space_b.sector_projector(2)
    worst_bose = 0.0
    for t in (0.1, 0.2, 0.3):
        blocks = positive_symplectic_from_c(np.array([[np.tanh(t)]], dtype=complex))
        u = shale_implementer(space_b, blocks)
        y = DoubledVector.real_point(np.array([1.0 + 0.3j]))
        lhs = u @ field(space_b, y) @ u.conj().T
        rhs = field(space_b, apply_doubled_matrix(blocks.matrix(), y))
        worst_bose = max(worst_bose, np.linalg.norm(sub @ (lhs - rhs) @ sub, 2))
    # composition sign of the two-valued implementer
    space_f = FockSpace("fermi", 3)
    worst_comp_f = 0.0
    for _ in range(5):
        r1 = random_orthogonal_blocks(3, rng)
        r2 = random_orthogonal_blocks(3, rng)
        u1, _ = metaplectic_pair(space_f, r1)
        u2, _ = metaplectic_pair(space_f, r2)
        u12, _ = metaplectic_pair(space_f, r1.compose(r2))
        prod = u1 @ u2
        worst_comp_f = max(worst_comp_f, min(np.linalg.norm(prod - u12, 2),
                                             np.linalg.norm(prod + u12, 2)))
    space_big = FockSpace("bose", 1, 32)
    sub_big = space_big.sector_projector(2)
    r1 = positive_symplectic_from_c(np.array([[np.tanh(0.25)]], dtype=complex))
    r2 = positive_symplectic_from_c(np.array([[-np.tanh(0.2)]], dtype=complex))
    u1, _ = metaplectic_pair(space_big, r1)
    u2, _ = metaplectic_pair(space_big, r2)
    u12, _ = metaplectic_pair(space_big, r1.compose(r2))
    prod = u1 @ u2
    comp_b = min(np.linalg.norm((prod - u12) @ sub_big, 2),
                 np.linalg.norm((prod + u12) @ sub_big, 2))
    extras = {"fermi_intertwining": worst_fermi, "bose_intertwining": worst_bose,
              "fermi_composition": worst_comp_f, "bose_composition": comp_b}
    passed = (worst_fermi <= 1e-10 and worst_bose <= 1e-7
              and worst_comp_f <= 1e-7 and comp_b <= 1e-7)
    return {"name": "bogolubov-implementers", "residual": float(max(extras.values())),
            "tolerance": 1e-7, "pass": bool(passed), **extras}


def criterion_gaussian_kernels(seed=42):
    """(a(z) -+ a*(c zbar)) Omega_c residuals for random kernels."""
    rng = _rng(seed)
    worst_fermi = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 5))
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        c = (a - a.T) / 2
        space = FockSpace("fermi", d)
        om = gaussian_vector(space, c)
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        op = space.annihilate(z) + space.create(c @ np.conj(z))
        worst_fermi = max(worst_fermi, np.linalg.norm(op @ om))
    worst_bose = 0.0
    space_b = FockSpace("bose", 1, 20)
    sub = space_b.sector_projector(18)
    for _ in range(20):
        c = np.array([[0.6 * (rng.random() - 0.5) * 2]], dtype=complex)
        om = gaussian_vector(space_b, c)
        z = rng.standard_normal(1) + 1j * rng.standard_normal(1)
        op = space_b.annihilate(z) - space_b.create(c @ np.conj(z))
        worst_bose = max(worst_bose, np.linalg.norm(sub @ (op @ om)))
    passed = worst_fermi <= 1e-12 and worst_bose <= 1e-8
    return {"name": "gaussian-kernels", "residual": float(max(worst_fermi, worst_bose)),
            "tolerance": 1e-8, "pass": bool(passed),
            "fermi": worst_fermi, "bose": worst_bose}


def criterion_two_point(seed=42):
    """Thermal two-point functions against the closed forms."""
    rng = _rng(seed)
    worst_fermi = 0.0
    worst_bose = 0.0
    for beta in (0.5, 1.0, 2.0):
        h = np.array([[1.0, 0.2], [0.2, 1.5]], dtype=complex)
        params_f = ThermalParams.gibbs("fermi", h, beta)
        rep_f = DoubledRep(params_f)
        chi = params_f.density
        vac = rep_f.space.vacuum()
        for _ in range(4):
            z1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            z2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            got = np.vdot(vac, rep_f.annihilate_left(z1) @ rep_f.create_left(z2) @ vac)
            worst_fermi = max(worst_fermi, abs(got - (np.vdot(z1, z2) - np.vdot(z1, chi @ z2))))
            got2 = np.vdot(vac, rep_f.create_left(z1) @ rep_f.annihilate_left(z2) @ vac)
            worst_fermi = max(worst_fermi, abs(got2 - np.vdot(z2, chi @ z1)))
        params_b = ThermalParams.gibbs("bose", h, beta)
        rep_b = DoubledRep(params_b, single_cutoff=5)
        rho = params_b.density
        vacb = rep_b.space.vacuum()
        for _ in range(4):
            z1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            z2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            got = np.vdot(vacb, rep_b.annihilate_left(z1) @ rep_b.create_left(z2) @ vacb)
            want = np.vdot(z1, z2) + np.vdot(z1, rho @ z2)
            worst_bose = max(worst_bose, abs(got - want))
            got2 = np.vdot(vacb, rep_b.create_left(z1) @ rep_b.annihilate_left(z2) @ vacb)
            worst_bose = max(worst_bose, abs(got2 - np.vdot(z2, rho @ z1)))
    passed = worst_fermi <= 1e-10 and worst_bose <= 1e-6
    return {"name": "thermal-two-point", "residual": float(max(worst_fermi, worst_bose)),
            "tolerance": 1e-6, "pass": bool(passed),
            "fermi": worst_fermi, "bose": worst_bose}


def criterion_modular(seed=42):
    """Modular operator and conjugation against the polar-of-S oracle."""
    h = np.array([[1.0, 0.3], [0.3, 0.6]], dtype=complex)
    rep_f = DoubledRep(ThermalParams.gibbs("fermi", h, 1.0))
    j_f, delta_f = rep_f.modular_data()
    j_lin, delta_oracle = rep_f.modular_oracle()
    res_delta_f = np.linalg.norm(delta_oracle - delta_f, 2) / np.linalg.norm(delta_f, 2)
    res_j = np.linalg.norm(j_lin - j_f.unitary, 2)
    rng = _rng(seed)
    res_conj = 0.0
    for _ in range(5):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        res_conj = max(res_conj, np.linalg.norm(
            j_f.sandwich(rep_f.field_left(z)) - rep_f.field_right(z), 2))
    rep_b = DoubledRep(ThermalParams.gibbs("bose", np.array([[1.0]]), 1.0), single_cutoff=7)
    j_b, delta_b = rep_b.modular_data()
    jb_lin, delta_b_oracle = rep_b.modular_oracle()
    res_delta_b = np.linalg.norm(delta_b_oracle - delta_b, 2) / np.linalg.norm(delta_b, 2)
    res_jb = np.linalg.norm(jb_lin - j_b.unitary, 2)
    ell = rep_b.standard_liouvillean()
    res_exp = np.linalg.norm(delta_b - scipy.linalg.expm(-ell), 2) / np.linalg.norm(delta_b, 2)
    worst_oracle = max(res_delta_f, res_j, res_delta_b, res_jb)
    passed = worst_oracle <= 1e-7 and res_conj <= 1e-10 and res_exp <= 1e-9
    return {"name": "modular-data", "residual": float(max(worst_oracle, res_conj, res_exp)),
            "tolerance": 1e-7, "pass": bool(passed),
            "oracle": worst_oracle, "conjugation": res_conj, "exp_liouvillean": res_exp}


def criterion_kms(seed=42):
    """KMS boundary defect, matched and deliberately mismatched."""
    rng = _rng(seed)
    results = {}
    for kind, cutoff in (("fermi", None), ("bose", 6)):
        h = np.array([[1.0, 0.2], [0.2, 0.7]], dtype=complex) if kind == "fermi" \
            else np.array([[1.0]], dtype=complex)
        beta = 1.0
        d = h.shape[0]
        rep = DoubledRep(ThermalParams.gibbs(kind, h, beta), single_cutoff=cutoff)
        gens = []
        for k in range(d):
            e = np.zeros(d)
            e[k] = 1.0
            gens.append(rep.create_left(e))
            gens.append(rep.annihilate_left(e))
        coeff = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        a_op = coeff[0] * gens[0] @ gens[1] + coeff[1] * gens[1]
        b_op = coeff[2] * gens[1] @ gens[1 % len(gens)] + coeff[3] * gens[0]
        results[f"{kind}_match"] = kms_check(rep, h, beta, a_op, b_op, t=0.3)
        # the witness pair carries a creation/annihilation imbalance so the
        # boundary condition actually probes the density
        bad = DoubledRep(ThermalParams(kind, scipy.linalg.expm(-2 * beta * h)),
                         single_cutoff=cutoff)
        e0 = np.zeros(d)
        e0[0] = 1.0
        results[f"{kind}_mismatch"] = kms_check(
            bad, h, beta, bad.annihilate_left(e0), bad.create_left(e0), t=0.3)
    match_res = max(results["fermi_match"], results["bose_match"])
    mismatch_res = min(results["fermi_mismatch"], results["bose_mismatch"])
    passed = match_res <= 1e-8 and mismatch_res > 1e-4
    return {"name": "kms-boundary", "residual": float(match_res), "tolerance": 1e-8,
            "pass": bool(passed), **{k: float(v) for k, v in results.items()}}


def criterion_lattice_duality(seed=42):
    """Fermionic duality between the commutant and the dressed complement."""
    rng = _rng(seed)
    d = 2
    space = FockSpace("fermi", d)
    worst = 0.0
    for _ in range(10):
        k = int(rng.integers(1, 4))
        v = RealSubspace.from_vectors(d, rng.standard_normal((2 * d, k)))
        rep = fermionic_duality_check(v, space)
        if rep["dim_commutant"] != rep["dim_dressed_dual"]:
            worst = max(worst, 1.0)
        worst = max(worst, rep["defect_comm_in_dual"], rep["defect_dual_in_comm"])
    return _report("fermionic-duality", worst, 1e-8)


def criterion_confined_pf(seed=42):
    """Confined Liouvillean spectra against the difference spectra of H."""
    model = spin_boson(coupling=0.1, gamma_value=0.25, cutoff=14)
    rep = confined_pf_check(model, cutoffs=(8, 10, 12, 14))
    dev14 = max(rep["semi"][-1], rep["standard"][-1])
    monotone = all(a > b for a, b in zip(rep["semi"], rep["semi"][1:])) and \
        all(a > b for a, b in zip(rep["standard"], rep["standard"][1:]))
    complete = not rep["semi_detail"][-1]["unmatched"] and \
        not rep["standard_detail"][-1]["unmatched"]
    passed = dev14 <= 1e-5 and monotone and complete
    return {"name": "confined-pauli-fierz", "residual": float(dev14), "tolerance": 1e-5,
            "pass": bool(passed), "semi": rep["semi"], "standard": rep["standard"],
            "monotone": bool(monotone), "all_matched": bool(complete),
            "tail_estimate": rep["tail_estimate"]}


def criterion_quasifree_reduction(seed=42):
    """Covariance reduction reproduces the density and the two-point form."""
    rng = _rng(seed)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rho = a @ a.conj().T / 2
    cov = aw_covariance(rho)
    red = reduce_bose(cov)
    spec_in = np.sort(np.linalg.eigvalsh(rho))
    spec_out = np.sort(np.linalg.eigvals(red.density).real)
    res = float(np.max(np.abs(spec_in - spec_out)))
    res = max(res, reconstruction_defect(cov, red, rng))
    return _report("quasifree-reduction", res, 1e-8)


FULL_BATTERY = [
    ("criterion-01", criterion_car_exactness),
    ("criterion-02", criterion_ccr_truncation),
    ("criterion-03", criterion_trace_identities),
    ("criterion-04", criterion_implementers),
    ("criterion-05", criterion_gaussian_kernels),
    ("criterion-06", criterion_two_point),
    ("criterion-07", criterion_modular),
    ("criterion-08", criterion_kms),
    ("criterion-09", criterion_lattice_duality),
    ("criterion-10", criterion_confined_pf),
    ("criterion-extra-quasifree", criterion_quasifree_reduction),
]

SMOKE_BATTERY = [
    ("criterion-01", criterion_car_exactness),
    ("criterion-02", criterion_ccr_truncation),
    ("criterion-03", criterion_trace_identities),
    ("criterion-05", criterion_gaussian_kernels),
    ("criterion-08", criterion_kms),
]


def run_battery(which="full", seed=42):
    battery = FULL_BATTERY if which == "full" else SMOKE_BATTERY
    return [(name, fn(seed)) for name, fn in battery]
