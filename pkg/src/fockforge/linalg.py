"""Dense complex linear-algebra primitives shared by the whole package.

Everything here works on plain ``numpy`` arrays (complex128 unless the
input is real).  Tolerances follow the package-wide defaults: 1e-10 for
identities that hold algebraically, 1e-8 for spectral comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ALG_TOL = 1e-10
SPECTRAL_TOL = 1e-8
KERNEL_RTOL = 1e-12  # singular values below this (relative) count as zero


class NonSquareError(ValueError):
    pass


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {m.ndim}")
    return m


def require_square(a) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {m.shape}")
    return m


def transpose_sharp(a) -> np.ndarray:
    """Transpose of ``a`` seen as a map between conjugate spaces.

    The two entrywise conjugations cancel, so numerically this is the
    plain transpose.  It is an involution and reverses products.
    """
    return as_matrix(a).T.copy()


def is_symmetric(a, tol: float = ALG_TOL) -> bool:
    """True iff the transpose equals ``a`` entrywise within ``tol``."""
    m = require_square(a)
    return bool(np.max(np.abs(m - m.T), initial=0.0) <= tol)


def is_antisymmetric(a, tol: float = ALG_TOL) -> bool:
    """True iff the transpose equals ``-a`` entrywise within ``tol``."""
    m = require_square(a)
    return bool(np.max(np.abs(m + m.T), initial=0.0) <= tol)


def fredholm_det(a) -> complex:
    """det(1 + a); in finite dimension the ordinary determinant of 1 + a."""
    m = require_square(a)
    return complex(np.linalg.det(np.eye(m.shape[0]) + m))


def sqrtm_psd(a, tol: float = 1e-11) -> np.ndarray:
    """Square root of a Hermitian positive-semidefinite matrix via eigh.

    Eigenvalues in [-tol, 0) are clipped to zero; anything more negative
    raises, since the callers all rely on positivity.
    """
    m = require_square(a)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    if w.min(initial=0.0) < -tol * max(1.0, abs(w).max(initial=1.0)):
        raise ValueError(f"matrix is not positive semidefinite (min eig {w.min()})")
    s = v @ np.diag(np.sqrt(np.clip(w, 0.0, None)).astype(complex)) @ v.conj().T
    if np.isrealobj(m):
        s = s.real
    return s


def funm_herm(a, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through eigh."""
    m = require_square(a)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    out = v @ np.diag(np.asarray([f(x) for x in w], dtype=complex)) @ v.conj().T
    return out


def polar_decompose(a, kernel_rtol: float = KERNEL_RTOL):
    """Return (u, pos) with a = u @ pos, pos = (a* a)^{1/2} >= 0.

    ``u`` is a partial isometry whose initial space is the orthogonal
    complement of Ker a; singular values below kernel_rtol * s_max are
    treated as zero.  Real input gives real factors.
    """
    m = require_square(a)
    uu, s, vh = np.linalg.svd(m)
    smax = s.max(initial=0.0)
    keep = s > kernel_rtol * max(smax, 1e-300)
    pos = (vh.conj().T * s) @ vh
    iso = uu[:, keep] @ vh[keep, :]
    if np.isrealobj(m):
        pos = pos.real
        iso = iso.real
    return iso, pos


def _permutation_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Pairing:
    """A pairing of {0, ..., 2m-1}: partition into ordered pairs.

    ``perm`` lists the pairs flattened, (i1, j1, i2, j2, ...), with
    i1 < i2 < ... and ik < jk.  ``sign`` is the parity of that
    permutation, the one entering fermionic pairing sums.
    """

    m: int
    perm: tuple
    sign: int

    def pairs(self):
        return [(self.perm[2 * j], self.perm[2 * j + 1]) for j in range(self.m)]


def enumerate_pairings(m: int):
    """All (2m-1)!! pairings of {0,...,2m-1}, each with its sign.

    m = 0 returns the single empty pairing (empty-product convention).
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    results = []

    def recurse(remaining, acc):
        if not remaining:
            perm = tuple(acc)
            results.append(Pairing(m, perm, _permutation_sign(perm)))
            return
        first = remaining[0]
        for k in range(1, len(remaining)):
            partner = remaining[k]
            rest = remaining[1:k] + remaining[k + 1:]
            recurse(rest, acc + [first, partner])

    recurse(list(range(2 * m)), [])
    return results


def double_factorial(n: int) -> int:
    if n <= 0:
        return 1
    return math.prod(range(n, 0, -2))


def subspace_distance(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Max distance of a unit vector of span(a) from span(b) and back.

    Both arguments are matrices whose columns span the subspaces; they
    need not be orthonormal.
    """
    qa, _ = np.linalg.qr(basis_a) if basis_a.shape[1] else (basis_a, None)
    qb, _ = np.linalg.qr(basis_b) if basis_b.shape[1] else (basis_b, None)
    if basis_a.shape[1] == 0 and basis_b.shape[1] == 0:
        return 0.0
    if basis_a.shape[1] != basis_b.shape[1]:
        return 1.0
    pa = qa @ qa.conj().T
    pb = qb @ qb.conj().T
    return float(np.linalg.norm(pa - pb, 2))
