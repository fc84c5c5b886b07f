"""Symplectic and orthogonal block maps on the doubled one-particle space
and their unitary implementers on Fock space.

A map r restricted to the doubled coordinates (z1, z2bar) has the block
form [[p, q], [conj q, conj p]].  Bosonic (symplectic) blocks satisfy
the minus-sign relations, fermionic (orthogonal) blocks the plus-sign
ones; ``validate_blocks`` reports all four residuals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

from .fock import BOSE, FERMI, FockSpace, gamma
from .linalg import require_square, sqrtm_psd
from .ops import bogolubov_matrix_on_doubled, multi_annihilate, multi_create


class FermiDegenerateError(ValueError):
    """p has a kernel, so the closed-form fermionic implementer fails."""


@dataclass(frozen=True)
class BogolubovBlocks:
    p: np.ndarray
    q: np.ndarray
    statistics: str

    def __post_init__(self):
        p = require_square(np.asarray(self.p, dtype=complex))
        q = require_square(np.asarray(self.q, dtype=complex))
        if p.shape != q.shape:
            raise ValueError("p and q must have the same shape")
        if self.statistics not in (BOSE, FERMI):
            raise ValueError(f"unknown statistics {self.statistics!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def kind(self) -> str:
        return "orthogonal" if self.statistics == FERMI else "symplectic"

    @property
    def d(self) -> int:
        return self.p.shape[0]

    @property
    def sign(self) -> float:
        # sign in p*p + s q# qbar = 1 and friends
        return 1.0 if self.statistics == FERMI else -1.0

    def matrix(self) -> np.ndarray:
        return bogolubov_matrix_on_doubled(self.p, self.q)

    def compose(self, other: "BogolubovBlocks") -> "BogolubovBlocks":
        if other.statistics != self.statistics:
            raise ValueError("statistics mismatch")
        p = self.p @ other.p + self.q @ other.q.conj()
        q = self.p @ other.q + self.q @ other.p.conj()
        return BogolubovBlocks(p, q, self.statistics)

    def inverse(self) -> "BogolubovBlocks":
        # bose: (p*, -q^T); fermi: (p*, q^T)
        qt = self.q.T if self.statistics == FERMI else -self.q.T
        return BogolubovBlocks(self.p.conj().T, qt, self.statistics)

    @classmethod
    def identity(cls, d: int, statistics: str) -> "BogolubovBlocks":
        return cls(np.eye(d, dtype=complex), np.zeros((d, d), dtype=complex), statistics)


def validate_blocks(blocks: BogolubovBlocks) -> dict:
    """Residuals of the four block relations; pure diagnostic.

    Also reports the Hilbert-Schmidt norms of the off-diagonal block and
    of p - 1; in finite dimension these are always finite, so group
    membership beyond the relations is automatic and only the sizes are
    interesting.
    """
    p, q, s = blocks.p, blocks.q, blocks.sign
    eye = np.eye(blocks.d)
    res = {
        "p*p+s.q#qbar-1": np.linalg.norm(p.conj().T @ p + s * q.T @ q.conj() - eye, 2),
        "p#qbar+s.q*p": np.linalg.norm(p.T @ q.conj() + s * q.conj().T @ p, 2),
        "pp*+s.qq*-1": np.linalg.norm(p @ p.conj().T + s * q @ q.conj().T - eye, 2),
        "pq#+s.qp#": np.linalg.norm(p @ q.T + s * q @ p.T, 2),
        "hs_norm_q": np.linalg.norm(q, "fro"),
        "hs_norm_p_minus_1": np.linalg.norm(p - eye, "fro"),
    }
    if blocks.statistics == BOSE:
        w = np.linalg.eigvalsh(p @ p.conj().T)
        res["pp*_minus_1_min_eig"] = float(w.min() - 1.0)
    return {k: float(np.real(v)) for k, v in res.items()}


@dataclass(frozen=True)
class CDPair:
    c: np.ndarray
    d_kernel: np.ndarray


def blocks_to_cd(blocks: BogolubovBlocks, tol: float = 1e-9) -> CDPair:
    """The pair kernels c = p^{-1} q and d = q pbar^{-1}.

    Both defining expressions are evaluated and must agree within tol;
    fermionic blocks with Ker p != 0 raise FermiDegenerateError.
    """
    p, q = blocks.p, blocks.q
    svals = np.linalg.svd(p, compute_uv=False)
    if svals.min() <= 1e-10 * max(svals.max(), 1.0):
        if blocks.statistics == FERMI:
            raise FermiDegenerateError("Ker p is nontrivial")
        raise np.linalg.LinAlgError("bosonic p unexpectedly singular")
    c1 = np.linalg.solve(p, q)
    d1 = q @ np.linalg.inv(p.conj())
    if blocks.statistics == FERMI:
        c2 = -q.T @ np.linalg.inv(p.T)
        d2 = -np.linalg.inv(p.conj().T) @ q.T
    else:
        c2 = q.T @ np.linalg.inv(p.T)
        d2 = np.linalg.inv(p.conj().T) @ q.T
    scale = max(1.0, float(np.abs(c1).max()), float(np.abs(d1).max()))
    if np.max(np.abs(c1 - c2)) > tol * scale or np.max(np.abs(d1 - d2)) > tol * scale:
        raise np.linalg.LinAlgError("the two defining expressions for c or d disagree")
    return CDPair((c1 + c2) / 2, (d1 + d2) / 2)


def factorized_matrix(blocks: BogolubovBlocks) -> np.ndarray:
    """Rebuild the doubled matrix from the (c, d) triangular factorization."""
    cd = blocks_to_cd(blocks)
    d = blocks.d
    eye = np.eye(d)
    zero = np.zeros((d, d))
    upper = np.block([[eye, cd.d_kernel], [zero, eye]])
    mid = np.block([[np.linalg.inv(blocks.p.conj().T), zero], [zero, blocks.p.conj()]])
    lower = np.block([[eye, zero], [cd.c.conj(), eye]])
    return upper @ mid @ lower


def _implementer_from_cd(space: FockSpace, blocks: BogolubovBlocks, prefactor: complex) -> np.ndarray:
    cd = blocks_to_cd(blocks)
    mid = gamma(space, np.linalg.inv(blocks.p.conj().T))
    if blocks.statistics == FERMI:
        left = scipy.linalg.expm(0.5 * multi_create(space, cd.d_kernel))
        right = scipy.linalg.expm(-0.5 * multi_annihilate(space, cd.c))
    else:
        left = scipy.linalg.expm(-0.5 * multi_create(space, cd.d_kernel))
        right = scipy.linalg.expm(0.5 * multi_annihilate(space, cd.c))
    return prefactor * (left @ mid @ right)


def _expected_pair_excitation(blocks: BogolubovBlocks) -> float:
    cd = blocks_to_cd(blocks)
    return 2.0 * float(np.trace(cd.d_kernel @ cd.d_kernel.conj().T).real)


def shale_implementer(space: FockSpace, blocks: BogolubovBlocks,
                      allow_degenerate: bool = False) -> np.ndarray:
    """The unitary with positive vacuum expectation implementing r.

    Conjugation sends phi(y) to phi(r y).  Bosonic implementers live on
    the truncated space and are unitary only up to the truncation tail;
    a warning fires when the cutoff looks too small for the squeezing
    content.  For fermionic r with Ker p != 0 the closed form fails; see
    degenerate_implementer for the opt-in composed path.
    """
    if space.statistics != blocks.statistics:
        raise ValueError("space and blocks disagree on statistics")
    if blocks.statistics == FERMI:
        svals = np.linalg.svd(blocks.p, compute_uv=False)
        if svals.min() <= 1e-10 * max(svals.max(), 1.0):
            if allow_degenerate:
                return degenerate_implementer(space, blocks)
            raise FermiDegenerateError("Ker p is nontrivial; use degenerate_implementer")
    det = np.linalg.det(blocks.p @ blocks.p.conj().T).real
    expo = 0.25 if blocks.statistics == FERMI else -0.25
    pref = float(abs(det)) ** expo
    if blocks.statistics == BOSE:
        exc = _expected_pair_excitation(blocks)
        if space.n_max < 2.0 * exc:
            warnings.warn(
                f"cutoff {space.n_max} may be too small for expected pair excitation {exc:.2f}",
                RuntimeWarning,
            )
    return _implementer_from_cd(space, blocks, pref)


def metaplectic_pair(space: FockSpace, blocks: BogolubovBlocks):
    """The two-valued implementer (U, -U) with the determinantal phase.

    The phase is the principal square root of det p* (fermionic) or of
    its inverse (bosonic); either member differs from the Shale
    implementer by a modulus-one scalar.
    """
    det = complex(np.linalg.det(blocks.p.conj().T))
    if blocks.statistics == FERMI:
        pref = np.sqrt(det)
    else:
        pref = 1.0 / np.sqrt(det)
    u = _implementer_from_cd(space, blocks, pref)
    return u, -u


def positive_symplectic_from_c(c) -> BogolubovBlocks:
    """The positive symplectic map whose implementer is the squeezer of c."""
    c = require_square(np.asarray(c, dtype=complex))
    if np.linalg.norm(c, 2) >= 1.0:
        raise ValueError("need ||c|| < 1")
    if np.max(np.abs(c - c.T)) > 1e-12 * max(1.0, np.abs(c).max()):
        raise ValueError("bosonic kernel must be symmetric")
    g = c @ c.conj().T
    p = np.linalg.inv(sqrtm_psd(np.eye(c.shape[0]) - g))
    return BogolubovBlocks(p, p @ c, BOSE)


def positive_orthogonal_from_c(c) -> BogolubovBlocks:
    """The j-self-adjoint orthogonal map whose implementer is the squeezer of c."""
    c = require_square(np.asarray(c, dtype=complex))
    if np.max(np.abs(c + c.T)) > 1e-12 * max(1.0, np.abs(c).max()):
        raise ValueError("fermionic kernel must be antisymmetric")
    g = c @ c.conj().T
    p = np.linalg.inv(sqrtm_psd(np.eye(c.shape[0]) + g))
    return BogolubovBlocks(p, p @ c, FERMI)


def mode_pair_swap(d: int, k: int, l: int) -> BogolubovBlocks:
    """The orthogonal map implemented by the field monomial phi_k phi_l.

    Sends a*_k -> -a_k, a*_l -> -a_l and flips the sign of every other
    mode; p = 1 - E_kk - E_ll is singular by construction.
    """
    if k == l:
        raise ValueError("need two distinct modes")
    p = np.eye(d, dtype=complex)
    p[k, k] = 0.0
    p[l, l] = 0.0
    q = np.zeros((d, d), dtype=complex)
    q[k, k] = -1.0
    q[l, l] = -1.0
    return BogolubovBlocks(p, q, FERMI)


def mode_pair_swap_implementer(space: FockSpace, k: int, l: int) -> np.ndarray:
    phi_k = space.creation(k) + space.annihilation(k)
    phi_l = space.creation(l) + space.annihilation(l)
    return phi_k @ phi_l


def degenerate_implementer(space: FockSpace, blocks: BogolubovBlocks) -> np.ndarray:
    """Implementer for fermionic r with Ker p != 0.

    Composes r with a mode-pair swap whose implementer is a known field
    monomial, applies the closed form to the nondegenerate product, and
    undoes the swap.  The phase is normalized deterministically: by a
    positive vacuum expectation when that is nonzero, otherwise by the
    largest matrix entry.
    """
    if blocks.statistics != FERMI:
        raise ValueError("only the fermionic case can be p-degenerate")
    d = blocks.d
    for k, l in combinations(range(d), 2):
        s = mode_pair_swap(d, k, l)
        composed = blocks.compose(s)
        svals = np.linalg.svd(composed.p, compute_uv=False)
        if svals.min() > 1e-6 * max(svals.max(), 1e-300):
            u_comp = shale_implementer(space, composed)
            u_swap = mode_pair_swap_implementer(space, k, l)
            u = u_comp @ u_swap.conj().T
            vac = u[0, 0]
            if abs(vac) > 1e-8:
                u = u * (vac.conjugate() / abs(vac))
            else:
                flat = np.argmax(np.abs(u))
                lead = u.flat[flat]
                u = u * (lead.conjugate() / abs(lead))
            return u
    raise FermiDegenerateError("no mode-pair completion made p invertible")


def random_orthogonal_blocks(d: int, rng: np.random.Generator,
                             amplitude: float = 0.6) -> BogolubovBlocks:
    """Generic j-nondegenerate fermionic Bogolubov map, u . r_c . v."""
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    c = (a - a.T) / 2
    nrm = np.linalg.norm(c, 2)
    if nrm > 0:
        c = amplitude * c / nrm
    core = positive_orthogonal_from_c(c)

    def unitary_blocks():
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        u, _ = np.linalg.qr(g)
        return BogolubovBlocks(u, np.zeros((d, d), dtype=complex), FERMI)

    return unitary_blocks().compose(core).compose(unitary_blocks())


def random_symplectic_blocks(d: int, rng: np.random.Generator,
                             amplitude: float = 0.3) -> BogolubovBlocks:
    """Generic bosonic Bogolubov map with a bounded squeezing kernel."""
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    c = (a + a.T) / 2
    nrm = np.linalg.norm(c, 2)
    if nrm > 0:
        c = amplitude * c / nrm
    core = positive_symplectic_from_c(c)

    def unitary_blocks():
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        u, _ = np.linalg.qr(g)
        return BogolubovBlocks(u, np.zeros((d, d), dtype=complex), BOSE)

    return unitary_blocks().compose(core).compose(unitary_blocks())
