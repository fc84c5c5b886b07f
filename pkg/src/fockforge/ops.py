"""Fock-space field machinery: fields, Weyl operators, pair creation,
Gaussian vectors, squeezers, Jordan-Wigner strings and the orientation
operator Q.

A doubled vector carries (z1, z2bar): the first leg lives in the
one-particle space, the second in its conjugate.  The associated field
is a*(z1) + a(z2) with z2 = conj(z2bar), which is Hermitian exactly on
the real points z2bar = conj(z1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fock import FockSpace, gamma
from .linalg import require_square, sqrtm_psd

PAULI_1 = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DoubledVector:
    z1: np.ndarray
    z2bar: np.ndarray

    @classmethod
    def real_point(cls, z) -> "DoubledVector":
        z = np.asarray(z, dtype=complex).reshape(-1)
        return cls(z, z.conj())

    def conj_pair(self) -> np.ndarray:
        """The vector z2 whose conjugate is stored in z2bar."""
        return np.asarray(self.z2bar, dtype=complex).conj()


def as_doubled(y, d: int) -> DoubledVector:
    if isinstance(y, DoubledVector):
        return y
    arr = np.asarray(y, dtype=complex).reshape(-1)
    if arr.shape[0] == d:
        return DoubledVector.real_point(arr)
    if arr.shape[0] == 2 * d:
        return DoubledVector(arr[:d], arr[d:])
    raise ValueError(f"cannot interpret length-{arr.shape[0]} vector on d={d}")


def symplectic_form(y1: DoubledVector, y2: DoubledVector) -> complex:
    """Bilinear extension of 2 Im(z|w) to the doubled space."""
    return complex(-1j * (np.dot(y1.z2bar, y2.z1) - np.dot(y2.z2bar, y1.z1)))


def euclidean_form(y1: DoubledVector, y2: DoubledVector) -> complex:
    """Bilinear extension of Re(z|w) to the doubled space."""
    return complex(0.5 * (np.dot(y1.z2bar, y2.z1) + np.dot(y2.z2bar, y1.z1)))


def field(space: FockSpace, y) -> np.ndarray:
    """phi(y) = a*(z1) + a(z2) for a doubled vector y = (z1, z2bar)."""
    y = as_doubled(y, space.d)
    return space.create(y.z1) + space.annihilate(y.conj_pair())


def weyl(space: FockSpace, y) -> np.ndarray:
    """W(y) = exp(i phi(y)) through Hermitian eigendecomposition.

    Bosonic only; y must be a real point so the field is Hermitian.
    """
    if space.is_fermi:
        raise ValueError("Weyl operators are defined on bosonic spaces")
    y = as_doubled(y, space.d)
    if np.max(np.abs(y.z1 - y.conj_pair())) > 1e-12:
        raise ValueError("Weyl operator needs a real doubled vector")
    phi = field(space, y)
    w, v = np.linalg.eigh(phi)
    return (v * np.exp(1j * w)) @ v.conj().T


def multi_create(space: FockSpace, c, symmetry_tol: float = 1e-12) -> np.ndarray:
    """Two-particle creation a*(c) = sum_{jk} c_jk a*_j a*_k.

    c is the kernel of a Hilbert-Schmidt map from the conjugate space,
    symmetric for bosons and antisymmetric for fermions.  Raises the
    particle number by two; for c the (anti)symmetrized product of w1, w2
    it reduces to a*(w1) a*(w2).
    """
    c = require_square(np.asarray(c, dtype=complex))
    if c.shape[0] != space.d:
        raise ValueError(f"kernel is {c.shape}, expected {space.d}x{space.d}")
    scale = max(1.0, float(np.max(np.abs(c))))
    if space.is_fermi:
        if np.max(np.abs(c + c.T)) > symmetry_tol * scale:
            raise ValueError("fermionic pair kernel must be antisymmetric")
    else:
        if np.max(np.abs(c - c.T)) > symmetry_tol * scale:
            raise ValueError("bosonic pair kernel must be symmetric")
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for j in range(space.d):
        if np.any(c[j, :]):
            out += space.creation(j) @ space.create(c[j, :])
    return out


def multi_annihilate(space: FockSpace, c) -> np.ndarray:
    return multi_create(space, c).conj().T


def pair_exponential_vacuum(space: FockSpace, c) -> np.ndarray:
    """exp(a*(c)/2) applied to the vacuum; the series is finite."""
    ac = multi_create(space, c)
    vec = space.vacuum()
    term = vec
    k = 0
    while True:
        k += 1
        term = (ac @ term) / (2.0 * k)
        if not np.any(term):
            break
        vec = vec + term
        if 2 * k > space.n_max:
            break
    return vec


def gaussian_normalization(space: FockSpace, c) -> float:
    """det(1 -+ c c*)^{+-1/4}: + for bosons, - for fermions."""
    c = np.asarray(c, dtype=complex)
    g = c @ c.conj().T
    eye = np.eye(space.d)
    if space.is_fermi:
        val = np.linalg.det(eye + g).real ** (-0.25)
    else:
        val = np.linalg.det(eye - g).real ** 0.25
    return float(val)


def gaussian_vector(space: FockSpace, c) -> np.ndarray:
    """The normalized pair-coherent vector built from the kernel c.

    Annihilated by a(z) - a*(c zbar) for bosons and a(z) + a*(c zbar)
    for fermions; the bosonic kernel must be a strict contraction.
    """
    c = np.asarray(c, dtype=complex)
    if not space.is_fermi:
        norm = np.linalg.norm(c, 2)
        if norm >= 1.0:
            raise ValueError(f"bosonic Gaussian kernel needs ||c|| < 1, got {norm}")
    return gaussian_normalization(space, c) * pair_exponential_vacuum(space, c)


def squeezer(space: FockSpace, c) -> np.ndarray:
    """The unitary mapping the Gaussian vector of c back to the vacuum.

    Both statistics share the shape det(1 -+ cc*)^{+-1/4} exp(-a*(c)/2)
    Gamma((1 -+ cc*)^{+-1/2})^{-1}-free form exp(a(c)/2); the fermionic
    middle factor is Gamma((1+cc*)^{1/2}), the exponent that makes the
    operator unitary and consistent with the thermal dressing
    identities.  Conjugation acts as a*(z) -> a*((1 -+ cc*)^{-1/2} z)
    +- a((1 -+ cc*)^{-1/2} c conj z), plus for bosons, minus for
    fermions.
    """
    c = require_square(np.asarray(c, dtype=complex))
    g = c @ c.conj().T
    eye = np.eye(space.d)
    ac = multi_create(space, c)
    aa = ac.conj().T
    if space.is_fermi:
        mid = gamma(space, sqrtm_psd(eye + g))
        pref = np.linalg.det(eye + g).real ** (-0.25)
    else:
        if np.linalg.norm(c, 2) >= 1.0:
            raise ValueError("bosonic squeezer needs ||c|| < 1")
        mid = gamma(space, sqrtm_psd(eye - g))
        pref = np.linalg.det(eye - g).real ** 0.25
    return pref * (scipy.linalg.expm(-0.5 * ac) @ mid @ scipy.linalg.expm(0.5 * aa))


def jordan_wigner(n: int, include_tail: bool = False, tail_sign: int = 1):
    """CAR generators on (C^2)^(x n) from Pauli strings.

    Returns the 2n operators (sigma1^(1), sigma2^(1), I_1 sigma1^(2), ...)
    where I_j is the product of the first j sigma3 factors; with
    include_tail a (2n+1)-th element tail_sign * I_n is appended.  All
    pairwise anticommutators equal 2 delta_ij exactly.
    """
    if n < 1:
        raise ValueError("need at least one site")
    eye = np.eye(2, dtype=complex)

    def site_op(op, j):
        mats = [PAULI_3] * j + [op] + [eye] * (n - j - 1)
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    ops = []
    for j in range(n):
        ops.append(site_op(PAULI_1, j))
        ops.append(site_op(PAULI_2, j))
    if include_tail:
        tail = np.eye(1, dtype=complex)
        for _ in range(n):
            tail = np.kron(tail, PAULI_3)
        ops.append(tail_sign * tail)
    return ops


def q_operator(space: FockSpace, basis, tol: float = 1e-10) -> np.ndarray:
    """Q = i^{n(n-1)/2} phi(y_1) ... phi(y_n) for an orthonormal family.

    Orthonormality is with respect to the Euclidean form Re(z|w); Q is
    unitary, self-adjoint, squares to one, flips sign with the
    orientation, and satisfies the volume-element relation
    Q phi(y) = (-1)^{n-1} phi(y) Q.
    """
    if not space.is_fermi:
        raise ValueError("Q is a fermionic construction")
    ys = [as_doubled(y, space.d) for y in basis]
    n = len(ys)
    for i in range(n):
        for j in range(n):
            expect = 1.0 if i == j else 0.0
            if abs(euclidean_form(ys[i], ys[j]) - expect) > tol:
                raise ValueError("basis is not orthonormal for the Euclidean form")
    q = np.eye(space.dim, dtype=complex) * (1j) ** (n * (n - 1) // 2)
    for y in ys:
        q = q @ field(space, y)
    return q


def canonical_doubled_basis(d: int):
    """The oriented doubled basis (w_j, conj w_j), (-i w_j, conj(-i w_j))."""
    out = []
    for j in range(d):
        w = np.zeros(d, dtype=complex)
        w[j] = 1.0
        out.append(DoubledVector.real_point(w))
        out.append(DoubledVector.real_point(-1j * w))
    return out


def bogolubov_matrix_on_doubled(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """[[p, q], [conj q, conj p]] acting on doubled coordinates (z1, z2bar)."""
    top = np.hstack([p, q])
    bot = np.hstack([q.conj(), p.conj()])
    return np.vstack([top, bot])


def apply_doubled_matrix(r: np.ndarray, y: DoubledVector) -> DoubledVector:
    d = r.shape[0] // 2
    coords = np.concatenate([y.z1, y.z2bar])
    out = r @ coords
    return DoubledVector(out[:d], out[d:])
