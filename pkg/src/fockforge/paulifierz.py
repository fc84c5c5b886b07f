"""Small quantum system linearly coupled to a truncated boson field:
Hamiltonians, semi-Liouvilleans and standard Liouvilleans at positive
density, and the confined-case spectral equivalences.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fock import BOSE, FockSpace, dgamma
from .linalg import require_square, sqrtm_psd
from .thermal import ThermalParams

DEFAULT_CUTOFF = 10


@dataclass(frozen=True)
class PauliFierzModel:
    """System Hamiltonian K, boson energy h > 0, coupling v : K -> K (x) Z."""

    K: np.ndarray
    h: np.ndarray
    v: np.ndarray
    gamma: np.ndarray | None = None
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        k = require_square(np.asarray(self.K, dtype=complex))
        h = require_square(np.asarray(self.h, dtype=complex))
        v = np.asarray(self.v, dtype=complex)
        if np.linalg.norm(k - k.conj().T, 2) > 1e-12 * max(1.0, np.linalg.norm(k, 2)):
            raise ValueError("K must be Hermitian")
        if np.linalg.eigvalsh(h).min() <= 0:
            raise ValueError("boson one-particle energy must be positive")
        if v.shape != (k.shape[0] * h.shape[0], k.shape[0]):
            raise ValueError(f"v must be {(k.shape[0] * h.shape[0], k.shape[0])}, got {v.shape}")
        object.__setattr__(self, "K", k)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)
        if self.gamma is not None:
            g = require_square(np.asarray(self.gamma, dtype=complex))
            ThermalParams(BOSE, g, h=h)  # validates spectrum and [h, gamma] = 0
            object.__setattr__(self, "gamma", g)
        if self.dim_k > 8 or self.d > 3 or self.cutoff > 16:
            warnings.warn("model exceeds the desk-scale defaults (dim_K<=8, d<=3, cutoff<=16)",
                          RuntimeWarning)

    @property
    def dim_k(self) -> int:
        return self.K.shape[0]

    @property
    def d(self) -> int:
        return self.h.shape[0]

    @property
    def rho(self) -> np.ndarray:
        if self.gamma is None:
            raise ValueError("model carries no density gamma")
        return ThermalParams(BOSE, self.gamma).density

    def hypothesis_norms(self) -> dict:
        """Norms of the coupling dressed by the standard hypotheses.

        All finite here by construction; reported so the desk-scale model
        stays explicit about which assumptions it trivializes.
        """
        d = self.d
        hinv_sq = np.linalg.inv(sqrtm_psd(self.h))
        out = {"h^-1/2 v": float(np.linalg.norm(apply_boson_leg(hinv_sq, self.v, self.dim_k, d), 2))}
        if self.gamma is not None:
            amp = sqrtm_psd(np.eye(d) + self.rho)
            dressed = apply_boson_leg(amp, self.v, self.dim_k, d)
            out["(1+rho)^1/2 v"] = float(np.linalg.norm(dressed, 2))
            out["(1+h)(1+rho)^1/2 v"] = float(
                np.linalg.norm(apply_boson_leg(np.eye(d) + self.h, dressed, self.dim_k, d), 2))
        return out


def apply_boson_leg(mat: np.ndarray, q: np.ndarray, dim_k: int, d: int) -> np.ndarray:
    """(1_K (x) mat) q for q : K -> K (x) Z stored with K-major rows."""
    q4 = q.reshape(dim_k, d, q.shape[1])
    return np.einsum("mn,inj->imj", mat, q4).reshape(dim_k * mat.shape[0], q.shape[1])


def coupled_create(dim_k: int, space: FockSpace, q: np.ndarray) -> np.ndarray:
    """a*(q) on C^k (x) Fock for a coupling q : K -> K (x) Z.

    Decomposing q along the boson modes as sum_m B_m (x) |e_m) gives
    a*(q) = sum_m B_m (x) a*_m; for q = B (x) |w) this is B (x) a*(w).
    """
    q = np.asarray(q, dtype=complex)
    d = space.d
    if q.shape != (dim_k * d, dim_k):
        raise ValueError(f"coupling must be {(dim_k * d, dim_k)}, got {q.shape}")
    out = np.zeros((dim_k * space.dim, dim_k * space.dim), dtype=complex)
    q4 = q.reshape(dim_k, d, dim_k)
    for m in range(d):
        b_m = q4[:, m, :]
        if np.any(b_m):
            out += np.kron(b_m, space.creation(m))
    return out


def coupled_annihilate(dim_k: int, space: FockSpace, q: np.ndarray) -> np.ndarray:
    return coupled_create(dim_k, space, q).conj().T


def v_star(v: np.ndarray, dim_k: int, d: int) -> np.ndarray:
    """The conjugate-leg coupling: sum B_m (x) |e_m) -> sum B_m* (x) |conj e_m)."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (dim_k * d, dim_k):
        raise ValueError(f"coupling must be {(dim_k * d, dim_k)}, got {v.shape}")
    v4 = v.reshape(dim_k, d, dim_k)
    out = np.conj(np.einsum("imj->jmi", v4))
    return out.reshape(dim_k * d, dim_k)


def check_middle(bbar: np.ndarray, a: np.ndarray, dim_k: int, dim_h_out: int,
                 dim_h_in: int | None = None) -> np.ndarray:
    """Tensor bbar into the middle leg: K (x) H -> K (x) Kbar (x) H.

    For a = C (x) A0 the result is C (x) bbar (x) A0.
    """
    bbar = require_square(np.asarray(bbar, dtype=complex))
    a = np.asarray(a, dtype=complex)
    if dim_h_in is None:
        dim_h_in = dim_h_out
    if a.shape != (dim_k * dim_h_out, dim_k * dim_h_in):
        raise ValueError("operator shape does not match the stated legs")
    a4 = a.reshape(dim_k, dim_h_out, dim_k, dim_h_in)
    r6 = np.einsum("iajc,bd->ibajdc", a4, bbar)
    kb = bbar.shape[0]
    return r6.reshape(dim_k * kb * dim_h_out, dim_k * kb * dim_h_in)


def hamiltonian(model: PauliFierzModel, cutoff: int | None = None):
    """H = K (x) 1 + 1 (x) dGamma(h) + a*(v) + a(v); returns (H, space)."""
    n = model.cutoff if cutoff is None else cutoff
    space = FockSpace(BOSE, model.d, n)
    eye_k = np.eye(model.dim_k)
    h_free = np.kron(model.K, np.eye(space.dim)) + np.kron(eye_k, dgamma(space, model.h))
    inter = coupled_create(model.dim_k, space, model.v)
    ham = h_free + inter + inter.conj().T
    return ham, space


def _doubled_energy(model: PauliFierzModel) -> np.ndarray:
    d = model.d
    block = np.zeros((2 * d, 2 * d), dtype=complex)
    block[:d, :d] = model.h
    block[d:, d:] = -np.conj(model.h)
    return block


def dressed_coupling(model: PauliFierzModel) -> np.ndarray:
    """q_gamma = ((1+rho)^{1/2} v on the Z leg, rho-bar^{1/2} v-star on the Zbar leg)."""
    d, k = model.d, model.dim_k
    rho = model.rho
    top = apply_boson_leg(sqrtm_psd(np.eye(d) + rho), model.v, k, d)
    vst = v_star(model.v, k, d)
    bottom = apply_boson_leg(np.conj(sqrtm_psd(rho)), vst, k, d)
    q = np.zeros((k * 2 * d, k), dtype=complex)
    q4 = q.reshape(k, 2 * d, k)
    q4[:, :d, :] = top.reshape(k, d, k)
    q4[:, d:, :] = bottom.reshape(k, d, k)
    return q4.reshape(k * 2 * d, k)


def mirrored_coupling(model: PauliFierzModel) -> np.ndarray:
    """The right-leg coupling (rho^{1/2} conj(v-star), (1+rho-bar)^{1/2} conj(v))."""
    d, k = model.d, model.dim_k
    rho = model.rho
    vst_bar = np.conj(v_star(model.v, k, d))
    top = apply_boson_leg(sqrtm_psd(rho), vst_bar, k, d)
    bottom = apply_boson_leg(np.conj(sqrtm_psd(np.eye(d) + rho)), np.conj(model.v), k, d)
    q = np.zeros((k * 2 * d, k), dtype=complex)
    q4 = q.reshape(k, 2 * d, k)
    q4[:, :d, :] = top.reshape(k, d, k)
    q4[:, d:, :] = bottom.reshape(k, d, k)
    return q4.reshape(k * 2 * d, k)


def semi_liouvillean(model: PauliFierzModel, cutoff: int | None = None):
    """L_fr + V on K (x) Gamma(Z (+) Zbar); returns (L, doubled space).

    The doubled space is truncated at twice the stated single-sided
    cutoff, since the density dressing populates pairs.
    """
    if model.gamma is None:
        raise ValueError("semi-Liouvillean needs a density gamma")
    n = model.cutoff if cutoff is None else cutoff
    space = FockSpace(BOSE, 2 * model.d, 2 * n)
    eye_k = np.eye(model.dim_k)
    free = np.kron(model.K, np.eye(space.dim)) + np.kron(eye_k, dgamma(space, _doubled_energy(model)))
    inter = coupled_create(model.dim_k, space, dressed_coupling(model))
    return free + inter + inter.conj().T, space


def _doubled_swap_gamma(space: FockSpace) -> np.ndarray:
    """Gamma of the leg swap on Z (+) Zbar, a real sector-preserving unitary."""
    from .fock import gamma as second_quantize

    d = space.d // 2
    x = np.zeros((2 * d, 2 * d))
    x[:d, d:] = np.eye(d)
    x[d:, :d] = np.eye(d)
    return second_quantize(space, x).real


def standard_liouvillean(model: PauliFierzModel, cutoff: int | None = None):
    """L = L_fr + pi(V) - J pi(V) J on K (x) Kbar (x) Gamma(Z (+) Zbar)."""
    if model.gamma is None:
        raise ValueError("standard Liouvillean needs a density gamma")
    n = model.cutoff if cutoff is None else cutoff
    space = FockSpace(BOSE, 2 * model.d, 2 * n)
    k = model.dim_k
    eye_k = np.eye(k)
    eye_f = np.eye(space.dim)
    free = (np.kron(model.K, np.kron(eye_k, eye_f))
            - np.kron(eye_k, np.kron(np.conj(model.K), eye_f))
            + np.kron(np.eye(k * k), dgamma(space, _doubled_energy(model))))
    inter = coupled_create(k, space, dressed_coupling(model))
    v_full = inter + inter.conj().T
    pi_v = check_middle(eye_k, v_full, k, space.dim)
    jw = _doubled_swap_gamma(space)
    mirrored = np.kron(eye_k, jw) @ np.conj(v_full) @ np.kron(eye_k, jw)
    j_pi_v_j = np.kron(eye_k, mirrored)
    return free + pi_v - j_pi_v_j, space


def jpvj_closed_form(model: PauliFierzModel, space: FockSpace) -> np.ndarray:
    """1_K (x) (a*(mirrored coupling) + h.c.) acting on the Kbar and boson legs."""
    k = model.dim_k
    inter = coupled_create(k, space, mirrored_coupling(model))
    return np.kron(np.eye(k), inter + inter.conj().T)


def _doubled_chart_indices(space_z: FockSpace, space_zbar: FockSpace, space_w: FockSpace):
    """Index arrays (n_idx, m_idx) of the pair (n, m) behind each doubled state."""
    d = space_z.d
    n_idx = np.empty(space_w.dim, dtype=int)
    m_idx = np.empty(space_w.dim, dtype=int)
    for t, occ in enumerate(space_w.basis):
        n_idx[t] = space_z.index[occ[:d]]
        m_idx[t] = space_zbar.index[occ[d:]]
    return n_idx, m_idx


def semi_comparison_operator(model: PauliFierzModel, cutoff: int):
    """Compression of H (x) 1 - 1 (x) dGamma(h-bar) to the doubled truncation.

    Rows are pairs (kappa, doubled occupation); the doubled occupation
    splits into a left occupation n and a right occupation m through the
    exponential-law chart, where the matrix is assembled entrywise.
    """
    n_tot = 2 * cutoff
    ham, space_z = hamiltonian(model, n_tot)
    space_zbar = FockSpace(BOSE, model.d, n_tot)
    space_w = FockSpace(BOSE, 2 * model.d, n_tot)
    k = model.dim_k
    n_idx, m_idx = _doubled_chart_indices(space_z, space_zbar, space_w)
    f_bar = dgamma(space_zbar, np.conj(model.h))
    kap = np.repeat(np.arange(k), space_w.dim)
    nn = np.tile(n_idx, k)
    mm = np.tile(m_idx, k)
    h_rows = kap * space_z.dim + nn
    ham_part = ham[np.ix_(h_rows, h_rows)] * (mm[:, None] == mm[None, :])
    f_part = f_bar[np.ix_(mm, mm)] * ((kap[:, None] == kap[None, :]) & (nn[:, None] == nn[None, :]))
    return ham_part - f_part, space_w


def standard_comparison_operator(model: PauliFierzModel, cutoff: int):
    """Compression of H (x) 1 - 1 (x) conj(H) to K (x) Kbar (x) doubled truncation."""
    n_tot = 2 * cutoff
    ham, space_z = hamiltonian(model, n_tot)
    space_zbar = FockSpace(BOSE, model.d, n_tot)
    space_w = FockSpace(BOSE, 2 * model.d, n_tot)
    k = model.dim_k
    n_idx, m_idx = _doubled_chart_indices(space_z, space_zbar, space_w)
    dw = space_w.dim
    kap = np.repeat(np.arange(k), k * dw)
    kbar = np.tile(np.repeat(np.arange(k), dw), k)
    nn = np.tile(n_idx, k * k)
    mm = np.tile(m_idx, k * k)
    left_rows = kap * space_z.dim + nn
    right_rows = kbar * space_zbar.dim + mm
    hbar = np.conj(ham)
    left = ham[np.ix_(left_rows, left_rows)] * (
        (kbar[:, None] == kbar[None, :]) & (mm[:, None] == mm[None, :]))
    right = hbar[np.ix_(right_rows, right_rows)] * (
        (kap[:, None] == kap[None, :]) & (nn[:, None] == nn[None, :]))
    return left - right, space_w


def pair_squeezer(space_w: FockSpace, gamma_one: np.ndarray) -> np.ndarray:
    """The thermal dressing unitary on a doubled bosonic Fock space."""
    from .ops import squeezer

    d = space_w.d // 2
    g = sqrtm_psd(np.asarray(gamma_one, dtype=complex))
    c = np.zeros((2 * d, 2 * d), dtype=complex)
    c[:d, d:] = g
    c[d:, :d] = g.T
    return squeezer(space_w, c)


def difference_targets(model: PauliFierzModel, n_levels: int = 3, n_right: int = 2,
                       reference_cutoff: int = 30) -> list:
    """Well-converged difference eigenvalues E_i - j h for the check families."""
    ham, _ = hamiltonian(model, reference_cutoff)
    e_h = np.sort(np.linalg.eigvalsh(ham))[:n_levels]
    h0 = float(np.linalg.eigvalsh(model.h).min())
    return [(f"E{i}-{j}", float(e_h[i] - j * h0))
            for i in range(n_levels) for j in range(n_right + 1)]


def matched_spectral_deviation(liouvillean: np.ndarray, comparison: np.ndarray,
                               dressing: np.ndarray, targets, overlap_min: float = 0.9,
                               cluster_tol: float = 1e-4) -> dict:
    """Deviation of overlap-identified eigenvalue pairs.

    Each target value is located in the comparison spectrum, its
    eigenvector is pushed through the dressing chart, and the
    Liouvillean partner is the eigenvalue of maximal overlap; the
    deviation is the gap between the two.  Targets whose identification
    falls below overlap_min are reported but not counted.
    """
    vals_d, vecs_d = np.linalg.eigh(comparison)
    vals_l, vecs_l = np.linalg.eigh(liouvillean)
    out = {"matched": [], "unmatched": [], "deviation": 0.0}
    for name, tgt in targets:
        i = int(np.argmin(np.abs(vals_d - tgt)))
        if abs(vals_d[i] - tgt) > 1e-6 + 1e-3 * abs(tgt):
            out["unmatched"].append((name, "target missing from comparison spectrum"))
            continue
        psi = dressing @ vecs_d[:, i]
        psi = psi / np.linalg.norm(psi)
        overlaps = np.abs(vecs_l.conj().T @ psi) ** 2
        j = int(np.argmax(overlaps))
        # near-degenerate eigenvalues act as one cluster for the overlap count
        cluster = np.abs(vals_l - vals_l[j]) <= cluster_tol * max(1.0, abs(vals_l[j]))
        weight = float(overlaps[cluster].sum())
        if weight < overlap_min:
            out["unmatched"].append((name, f"best overlap {weight:.3f}"))
            continue
        matched_val = float((overlaps[cluster] * vals_l[cluster]).sum() / weight)
        dev = float(abs(matched_val - tgt))
        out["matched"].append((name, dev, weight))
        out["deviation"] = max(out["deviation"], dev)
    return out


def confined_pf_check(model: PauliFierzModel, cutoffs=(8, 10, 12, 14),
                      n_levels: int = 3, n_right: int = 2) -> dict:
    """Spectral comparison of both Liouvilleans with the difference spectra of H.

    For each single-sided cutoff the semi-Liouvillean is compared with
    the compression of H (x) 1 - 1 (x) dGamma(h-bar) and the standard
    Liouvillean with H (x) 1 - 1 (x) conj(H).  A fixed family of
    difference eigenvalues (the lowest system levels minus a few boson
    quanta) is followed across cutoffs through the dressing chart; the
    reported deviation is the worst matched gap, and it shrinks as the
    cutoff grows because the dressing tail of the density dies off.
    """
    targets_semi = difference_targets(model, n_levels, n_right)
    ham_ref, _ = hamiltonian(model, 30)
    e_h = np.sort(np.linalg.eigvalsh(ham_ref))[:n_levels]
    targets_std = [(f"E{i}-E{j}", float(e_h[i] - e_h[j]))
                   for i in range(n_levels) for j in range(n_levels)]
    report = {"cutoffs": list(cutoffs), "semi": [], "standard": [],
              "semi_detail": [], "standard_detail": []}
    for n in cutoffs:
        l_semi, space_w = semi_liouvillean(model, n)
        d_semi, _ = semi_comparison_operator(model, n)
        dress = np.kron(np.eye(model.dim_k), pair_squeezer(space_w, model.gamma))
        res = matched_spectral_deviation(l_semi, d_semi, dress, targets_semi)
        report["semi"].append(res["deviation"])
        report["semi_detail"].append(res)
        l_std, space_w2 = standard_liouvillean(model, n)
        d_std, _ = standard_comparison_operator(model, n)
        dress2 = np.kron(np.eye(model.dim_k ** 2), pair_squeezer(space_w2, model.gamma))
        res2 = matched_spectral_deviation(l_std, d_std, dress2, targets_std)
        report["standard"].append(res2["deviation"])
        report["standard_detail"].append(res2)
    report["tail_estimate"] = float(
        np.linalg.norm(model.gamma, 2) ** max(1, min(cutoffs)))
    return report


@dataclass(frozen=True)
class LiouvilleanBundle:
    semi: np.ndarray
    standard: np.ndarray
    semi_free: np.ndarray
    standard_free: np.ndarray
    space_semi: FockSpace = dc_field(repr=False, default=None)
    space_standard: FockSpace = dc_field(repr=False, default=None)


def liouvillean_bundle(model: PauliFierzModel, cutoff: int | None = None) -> LiouvilleanBundle:
    n = model.cutoff if cutoff is None else cutoff
    semi, space_semi = semi_liouvillean(model, n)
    zero_v = PauliFierzModel(model.K, model.h, np.zeros_like(model.v), model.gamma, n)
    semi_free, _ = semi_liouvillean(zero_v, n)
    std, space_std = standard_liouvillean(model, n)
    std_free, _ = standard_liouvillean(zero_v, n)
    return LiouvilleanBundle(semi, std, semi_free, std_free, space_semi, space_std)


def spin_boson(coupling: float = 0.1, splitting: float = 1.0, omega: float = 1.0,
               gamma_value: float | None = 0.25, cutoff: int = DEFAULT_CUTOFF) -> PauliFierzModel:
    """Two-level system coupled to one boson mode through sigma_x."""
    k = np.array([[splitting / 2, 0], [0, -splitting / 2]], dtype=complex)
    h = np.array([[omega]], dtype=complex)
    v = coupling * np.array([[0, 1], [1, 0]], dtype=complex)
    g = None if gamma_value is None else np.array([[gamma_value]], dtype=complex)
    return PauliFierzModel(k, h, v, g, cutoff)
