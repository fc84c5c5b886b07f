"""Doubled-Fock-space thermal representations, modular data, Gibbs
densities, and the confined-gas identifications.

The doubled one-particle space is C^{2d}: the first d modes are the
original ones, the last d their conjugates.  Bosonic fields on the
doubled space carry the 1/sqrt(2) normalization, fermionic ones do not,
matching the respective single-space identifications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fock import BOSE, FERMI, FockSpace, dgamma, exp_law, gamma
from .linalg import require_square, sqrtm_psd

DEFAULT_SINGLE_CUTOFF = 8


class KernelViolationError(ValueError):
    pass


class Antiunitary:
    """An antiunitary operator stored as (unitary matrix, conjugation).

    Acts as psi -> u conj(psi); the sandwich J M J of a linear map M is
    u conj(M) conj(u), linear again.
    """

    def __init__(self, unitary: np.ndarray):
        self.unitary = np.asarray(unitary, dtype=complex)

    def __call__(self, psi: np.ndarray) -> np.ndarray:
        return self.unitary @ np.conj(psi)

    def sandwich(self, m: np.ndarray) -> np.ndarray:
        return self.unitary @ np.conj(m) @ np.conj(self.unitary)

    def squared(self) -> np.ndarray:
        return self.unitary @ np.conj(self.unitary)

    def compose_linear(self, m: np.ndarray) -> np.ndarray:
        """Linear part of J following m, i.e. (J m) psi = u conj(m) conj(psi)."""
        return self.unitary @ np.conj(m)


@dataclass(frozen=True)
class ThermalParams:
    """One-particle density data for a thermal representation."""

    kind: str
    gamma: np.ndarray
    h: np.ndarray | None = None
    beta: float | None = None

    def __post_init__(self):
        g = require_square(np.asarray(self.gamma, dtype=complex))
        g = (g + g.conj().T) / 2
        w = np.linalg.eigvalsh(g)
        if self.kind == BOSE:
            if w.min() < -1e-12 or w.max() >= 1.0 - 1e-14:
                raise ValueError(f"bosonic gamma needs spectrum in [0,1), got [{w.min()},{w.max()}]")
        elif self.kind == FERMI:
            if w.min() < -1e-12:
                raise ValueError("fermionic gamma must be positive semidefinite")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "gamma", g)
        if self.h is not None:
            h = require_square(np.asarray(self.h, dtype=complex))
            if np.linalg.norm(h @ g - g @ h, 2) > 1e-10 * max(1.0, np.linalg.norm(h, 2)):
                raise ValueError("h must commute with gamma")
            object.__setattr__(self, "h", h)

    @property
    def d(self) -> int:
        return self.gamma.shape[0]

    @property
    def density(self) -> np.ndarray:
        """rho = gamma (1-gamma)^{-1} (bosons), chi = gamma (1+gamma)^{-1} (fermions)."""
        eye = np.eye(self.d)
        if self.kind == BOSE:
            out = self.gamma @ np.linalg.inv(eye - self.gamma)
        else:
            out = self.gamma @ np.linalg.inv(eye + self.gamma)
        return (out + out.conj().T) / 2

    @classmethod
    def gibbs(cls, kind: str, h, beta: float) -> "ThermalParams":
        h = require_square(np.asarray(h, dtype=complex))
        return cls(kind, scipy.linalg.expm(-beta * h), h=h, beta=beta)


class DoubledRep:
    """Thermal representation on the Fock space over C^{2d}."""

    def __init__(self, params: ThermalParams, single_cutoff: int | None = None):
        self.params = params
        d = params.d
        if params.kind == FERMI:
            single_cutoff = d
        elif single_cutoff is None:
            # keep the doubled dimension moderate for several modes
            single_cutoff = DEFAULT_SINGLE_CUTOFF if d == 1 else 4
        self.single_cutoff = single_cutoff
        # doubled cutoff is twice the single-sided one: pair excitations
        self.space = FockSpace(params.kind, 2 * d, 2 * single_cutoff)
        self.space_single = FockSpace(params.kind, d, single_cutoff)
        self.space_single_bar = FockSpace(params.kind, d, single_cutoff)
        dens = params.density
        eye = np.eye(d)
        if params.kind == BOSE:
            self._amp_left = sqrtm_psd(eye + dens)   # creation side
            self._amp_right = sqrtm_psd(dens)
        else:
            self._amp_left = sqrtm_psd(eye - dens)
            self._amp_right = sqrtm_psd(dens)
        self._u_pair = None

    @property
    def kind(self) -> str:
        return self.params.kind

    @property
    def d(self) -> int:
        return self.params.d

    def _doubled(self, top, bottom) -> np.ndarray:
        w = np.zeros(2 * self.d, dtype=complex)
        w[: self.d] = top
        w[self.d:] = bottom
        return w

    # -- left and right representations ---------------------------------

    def create_left(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        op = self.space.create(self._doubled(self._amp_left @ z, 0))
        return op + self.space.annihilate(self._doubled(0, np.conj(self._amp_right @ z)))

    def annihilate_left(self, z) -> np.ndarray:
        return self.create_left(z).conj().T

    def field_left(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = self._doubled(self._amp_left @ z, np.conj(self._amp_right @ z))
        phi = self.space.create(w) + self.space.annihilate(w)
        return phi / math.sqrt(2) if self.kind == BOSE else phi

    def field_right(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = self._doubled(self._amp_right @ z, np.conj(self._amp_left @ z))
        phi = self.space.create(w) + self.space.annihilate(w)
        if self.kind == BOSE:
            return phi / math.sqrt(2)
        lam = self.space.lambda_op()
        return lam @ phi @ lam

    def create_right(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        op = self.space.annihilate(self._doubled(self._amp_right @ z, 0))
        op = op + self.space.create(self._doubled(0, np.conj(self._amp_left @ z)))
        if self.kind == FERMI:
            lam = self.space.lambda_op()
            return lam @ op @ lam
        return op

    def annihilate_right(self, z) -> np.ndarray:
        return self.create_right(z).conj().T

    def weyl_left(self, z) -> np.ndarray:
        if self.kind != BOSE:
            raise ValueError("Weyl operators are bosonic")
        phi = self.field_left(z)
        w, v = np.linalg.eigh(phi)
        return (v * np.exp(1j * w)) @ v.conj().T

    def weyl_right(self, z) -> np.ndarray:
        if self.kind != BOSE:
            raise ValueError("Weyl operators are bosonic")
        phi = self.field_right(z)
        w, v = np.linalg.eigh(phi)
        return (v * np.exp(1j * w)) @ v.conj().T

    # -- modular structure ----------------------------------------------

    def _leg_swap(self) -> np.ndarray:
        d = self.d
        x = np.zeros((2 * d, 2 * d))
        x[:d, d:] = np.eye(d)
        x[d:, :d] = np.eye(d)
        return x

    def modular_conjugation(self) -> Antiunitary:
        """J = Gamma(leg swap) o conj, dressed by Lambda for fermions."""
        g = gamma(self.space, self._leg_swap()).real
        if self.kind == FERMI:
            g = self.space.lambda_op().real @ g
        return Antiunitary(g)

    def modular_operator(self) -> np.ndarray:
        """Delta = Gamma(gamma (+) conj(gamma)^{-1}); needs trivial kernels."""
        g = self.params.gamma
        w = np.linalg.eigvalsh(g)
        if w.min() <= 1e-12:
            raise KernelViolationError(f"gamma has (near-)kernel, eigenvalues {w}")
        block = np.zeros((2 * self.d, 2 * self.d), dtype=complex)
        block[: self.d, : self.d] = g
        block[self.d:, self.d:] = np.conj(np.linalg.inv(g))
        return gamma(self.space, block)

    def modular_data(self):
        return self.modular_conjugation(), self.modular_operator()

    def left_monomials(self, max_degree: int | None = None):
        """Products of left creation/annihilation generators, vacuum-cyclic."""
        d = self.d
        gens = []
        for k in range(d):
            e = np.zeros(d)
            e[k] = 1.0
            gens.append(self.create_left(e))
            gens.append(self.annihilate_left(e))
        eye = np.eye(self.space.dim, dtype=complex)
        if self.kind == FERMI:
            words = [eye]
            frontier = [eye]
            for _ in range(2 * d):
                new = []
                for w in frontier:
                    for g in gens:
                        new.append(g @ w)
                words.extend(new)
                frontier = new
                if len(words) > 4 ** (2 * d):
                    break
            return words
        if max_degree is None:
            max_degree = self.space.n_max
        words = []
        powers_up = [eye]
        for _ in range(max_degree):
            powers_up.append(gens[0] @ powers_up[-1])
        powers_dn = [eye]
        for _ in range(max_degree):
            powers_dn.append(gens[1] @ powers_dn[-1])
        for m in range(max_degree + 1):
            for n in range(max_degree + 1 - m):
                words.append(powers_up[m] @ powers_dn[n])
        if d > 1:
            extra = [eye]
            for k in range(1, d):
                extra = [w @ p for w in extra for p in
                         (eye, gens[2 * k], gens[2 * k + 1], gens[2 * k] @ gens[2 * k])]
            words = [w @ x for w in words for x in extra]
        return words

    def modular_oracle(self, monomials=None):
        """(J, Delta) recovered from the polar decomposition of S: A Omega -> A* Omega.

        Returns (j_linear, delta); j_linear is the linear part of the
        antiunitary J.  Independent of modular_data up to the shared
        field definitions.
        """
        if monomials is None:
            monomials = self.left_monomials()
        vac = self.space.vacuum()
        xs = np.column_stack([m @ vac for m in monomials])
        ys = np.column_stack([m.conj().T @ vac for m in monomials])
        norms = np.linalg.norm(xs, axis=0)
        keep = norms > 1e-13
        xs = xs[:, keep] / norms[keep]
        ys = ys[:, keep] / norms[keep]  # real rescaling commutes with the antilinear S
        # S (x) = y antilinearly: linear part L solves L conj(xs) = ys
        l_part, *_ = np.linalg.lstsq(np.conj(xs).T, ys.T, rcond=1e-12)
        l_part = l_part.T
        delta = l_part.T @ np.conj(l_part)
        uu, sv, vh = np.linalg.svd(l_part)
        j_lin = uu @ vh
        return j_lin, delta

    def standard_liouvillean(self, h=None) -> np.ndarray:
        """dGamma(h (+) -conj h); generates the dressed dynamics, kills Omega."""
        if h is None:
            h = self.params.h
        h = require_square(np.asarray(h, dtype=complex))
        block = np.zeros((2 * self.d, 2 * self.d), dtype=complex)
        block[: self.d, : self.d] = h
        block[self.d:, self.d:] = -np.conj(h)
        return dgamma(self.space, block)

    # -- confined-gas identifications ------------------------------------

    def pair_kernel(self) -> np.ndarray:
        """The off-diagonal two-mode kernel with blocks gamma^{1/2}."""
        g = sqrtm_psd(self.params.gamma)
        d = self.d
        c = np.zeros((2 * d, 2 * d), dtype=complex)
        c[:d, d:] = g
        c[d:, :d] = g.T if self.kind == BOSE else -g.T
        return c

    def omega_vector(self) -> np.ndarray:
        """Standard vector representative of the Gibbs state."""
        g = self.params.gamma
        eye = np.eye(self.d)
        if self.kind == BOSE:
            pref = np.linalg.det(eye - g).real ** 0.5
        else:
            pref = np.linalg.det(eye + g).real ** (-0.5)
        from .ops import pair_exponential_vacuum

        return pref * pair_exponential_vacuum(self.space, self.pair_kernel())

    def r_gamma(self) -> np.ndarray:
        """The dressing unitary mapping omega_vector back to the vacuum."""
        from .ops import squeezer

        return squeezer(self.space, self.pair_kernel())

    def pair_embedding(self):
        """Isometry from Gamma(Z) (x) Gamma(Zbar) box into the doubled space."""
        if self._u_pair is None:
            self._u_pair, _ = exp_law(self.space_single, self.space_single_bar,
                                      target=self.space)
        return self._u_pair

    def iota(self, b: np.ndarray) -> np.ndarray:
        """Identify a (Hilbert-Schmidt) matrix on Gamma(Z) with a doubled vector.

        Fermionic identification reverses the particle order on the
        conjugate leg, i.e. carries a Lambda sign.
        """
        u = self.pair_embedding()
        b = np.asarray(b, dtype=complex)
        if self.kind == FERMI:
            lam = self.space_single_bar.lambda_op()
            b = b @ lam.conj()  # column index lives on the conjugate leg
        return u @ b.reshape(-1)

    def theta_left(self, a: np.ndarray) -> np.ndarray:
        u = self.pair_embedding()
        eye = np.eye(self.space_single_bar.dim)
        return u @ np.kron(np.asarray(a, dtype=complex), eye) @ u.conj().T

    def theta_right(self, a: np.ndarray) -> np.ndarray:
        """Right multiplication by a*, i.e. the image of conj(a)."""
        u = self.pair_embedding()
        eye = np.eye(self.space_single.dim)
        abar = np.conj(np.asarray(a, dtype=complex))
        if self.kind == FERMI:
            lam = self.space_single_bar.lambda_op()
            abar = lam @ abar @ lam
        return u @ np.kron(eye, abar) @ u.conj().T

    def theta_left_field(self, z) -> np.ndarray:
        """theta_l of the single-space field, written directly on the doubled space."""
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = self._doubled(z, 0)
        phi = self.space.create(w) + self.space.annihilate(w)
        return phi / math.sqrt(2) if self.kind == BOSE else phi

    def theta_right_field(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex).reshape(-1)
        w = self._doubled(0, np.conj(z))
        phi = self.space.create(w) + self.space.annihilate(w)
        if self.kind == BOSE:
            return phi / math.sqrt(2)
        lam = self.space.lambda_op()
        return lam @ phi @ lam

    def gibbs_expectation(self, a: np.ndarray) -> complex:
        """Tr(Gamma(gamma) a) / Tr Gamma(gamma) on the single space."""
        dens = gamma(self.space_single, self.params.gamma)
        return complex(np.trace(dens @ a) / np.trace(dens))

    def confined_equivalence_report(self, h=None, window: int | None = None) -> dict:
        """Residuals of the dressing identities relating theta and the thermal fields.

        Bosonic field identities are compared on the sectors below
        ``window`` (double-sided compression), since the dressing
        unitary loses unitarity near the cutoff; the Liouvillean
        invariance is a commutator, exact on the truncation, and is
        reported at full norm.
        """
        r = self.r_gamma()
        rdag = r.conj().T
        d = self.d
        if self.kind == BOSE:
            if window is None:
                window = 2
            sub = self.space.sector_projector(window)
        else:
            sub = np.eye(self.space.dim)
        out = {}
        worst_l = 0.0
        worst_r = 0.0
        for k in range(d):
            z = np.zeros(d)
            z[k] = 1.0
            lhs = r @ self.theta_left_field(z) @ rdag
            worst_l = max(worst_l, np.linalg.norm(sub @ (lhs - self.field_left(z)) @ sub, 2))
            lhs_r = r @ self.theta_right_field(z) @ rdag
            worst_r = max(worst_r, np.linalg.norm(sub @ (lhs_r - self.field_right(z)) @ sub, 2))
        out["left_field_residual"] = float(worst_l)
        out["right_field_residual"] = float(worst_r)
        vac = self.space.vacuum()
        out["vacuum_residual"] = float(np.linalg.norm(r @ self.omega_vector() - vac))
        if h is None:
            h = self.params.h
        if h is not None:
            ell = self.standard_liouvillean(h)
            out["liouvillean_residual"] = float(np.linalg.norm(r @ ell - ell @ r, 2))
        return out


def confined_gibbs(space: FockSpace, gamma_one: np.ndarray):
    """Gibbs density Gamma(gamma)/Tr and the truncated trace.

    Returns (density, trace, reference, tail): reference is the closed
    determinantal value det(1-gamma)^{-1} or det(1+gamma); tail is the
    (nonnegative) part of the reference missed by the truncation.
    """
    g = require_square(np.asarray(gamma_one, dtype=complex))
    w = np.linalg.eigvalsh(g)
    eye = np.eye(space.d)
    if space.is_fermi:
        reference = float(np.linalg.det(eye + g).real)
    else:
        if w.max() >= 1.0:
            raise ValueError("bosonic gamma needs spectrum inside [0,1)")
        reference = float(np.linalg.det(eye - g).real ** (-1.0))
    big = gamma(space, g)
    trace = float(np.trace(big).real)
    tail = reference - trace
    return big / trace, trace, reference, tail


def _complex_time_conjugation(ell: np.ndarray, b: np.ndarray, z: complex) -> np.ndarray:
    """exp(izL) b exp(-izL) for Hermitian L via eigendecomposition."""
    w, v = np.linalg.eigh(ell)
    left = (v * np.exp(1j * z * w)) @ v.conj().T
    right = (v * np.exp(-1j * z * w)) @ v.conj().T
    return left @ b @ right


def kms_check(rep: DoubledRep, h, beta: float, a: np.ndarray, b: np.ndarray,
              t: float = 0.0) -> float:
    """KMS boundary defect |omega(A tau^{t+i beta}(B)) - omega(tau^t(B) A)|.

    The state is the doubled vacuum, the dynamics is generated by the
    standard Liouvillean of h; the defect vanishes when the
    representation density is the Gibbs density exp(-beta h).
    """
    ell = rep.standard_liouvillean(h)
    vac = rep.space.vacuum()
    bz = _complex_time_conjugation(ell, b, t + 1j * beta)
    bt = _complex_time_conjugation(ell, b, t)
    lhs = np.vdot(vac, a @ bz @ vac)
    rhs = np.vdot(vac, bt @ a @ vac)
    return float(abs(lhs - rhs))


def kms_check_density(space: FockSpace, gamma_one: np.ndarray, h, beta: float,
                      a: np.ndarray, b: np.ndarray, t: float = 0.0) -> float:
    """Trace-cyclicity KMS defect in the irreducible single-space picture."""
    dens = gamma(space, np.asarray(gamma_one, dtype=complex))
    z = np.trace(dens)
    ham = dgamma(space, np.asarray(h, dtype=complex))
    bz = _complex_time_conjugation(ham, b, t + 1j * beta)
    bt = _complex_time_conjugation(ham, b, t)
    lhs = np.trace(dens @ a @ bz) / z
    rhs = np.trace(dens @ bt @ a) / z
    return float(abs(lhs - rhs))


def tracial_field(space: FockSpace, v, side: str = "left") -> np.ndarray:
    """Tracial CAR fields over a real vector v: left phi(v), right Lambda phi(v) Lambda."""
    if not space.is_fermi:
        raise ValueError("tracial fields are fermionic")
    v = np.asarray(v, dtype=float).reshape(-1)
    phi = space.create(v) + space.annihilate(v)
    if side == "left":
        return phi
    if side == "right":
        lam = space.lambda_op()
        return lam @ phi @ lam
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def tracial_conjugation(space: FockSpace) -> Antiunitary:
    """J = Lambda o (entrywise conjugation) for the tracial representation."""
    return Antiunitary(space.lambda_op().real)
