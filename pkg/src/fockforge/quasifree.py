"""Quasi-free state machinery: Wick pairing sums, quasi-freeness testing
of concrete vectors, and the reduction of a covariance pair to doubled
representation data (a complex structure plus a one-particle density).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .fock import BOSE, FERMI, FockSpace
from .linalg import enumerate_pairings, require_square, sqrtm_psd
from .ops import as_doubled, field


class NonPositiveEtaError(ValueError):
    pass


class DegenerateOmegaError(ValueError):
    pass


class OddKernelError(ValueError):
    """The commutator form has an odd-dimensional kernel; a tracial
    component is required and no complex structure extends over it."""


@dataclass(frozen=True)
class CovarianceData:
    """Real covariance pair: symmetric part and antisymmetric part.

    The convention is <phi(y1) phi(y2)> = y1 (eta + i/2 omega) y2, with
    eta symmetric positive semidefinite and omega antisymmetric obeying
    the Cauchy-Schwarz bound |y1 omega y2| <= 2 sqrt(y1 eta y1 y2 eta y2).
    """

    kind: str
    symmetric_form: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        eta = require_square(np.asarray(self.symmetric_form, dtype=float))
        om = require_square(np.asarray(self.omega, dtype=float))
        if eta.shape != om.shape:
            raise ValueError("forms must have equal shape")
        if self.kind not in (BOSE, FERMI):
            raise ValueError(f"unknown kind {self.kind!r}")
        scale = max(1.0, np.abs(eta).max(), np.abs(om).max())
        if np.max(np.abs(eta - eta.T)) > 1e-10 * scale:
            raise ValueError("symmetric form is not symmetric")
        if np.max(np.abs(om + om.T)) > 1e-10 * scale:
            raise ValueError("omega is not antisymmetric")
        w = np.linalg.eigvalsh(eta)
        if w.min() < -1e-10 * scale:
            raise NonPositiveEtaError(f"eta has negative eigenvalue {w.min()}")
        if w.min() > 1e-12 * scale:
            mu = 0.5 * np.linalg.solve(eta, om)
            g = sqrtm_psd(eta)
            mu_t = g @ mu @ np.linalg.inv(g)
            if np.linalg.norm(mu_t, 2) > 1.0 + 1e-8:
                raise ValueError("Cauchy-Schwarz bound between omega and eta fails")
        object.__setattr__(self, "symmetric_form", eta)
        object.__setattr__(self, "omega", om)

    @property
    def dim(self) -> int:
        return self.symmetric_form.shape[0]


def wick_npoint(two_point, ys, kind: str) -> complex:
    """Pairing sum of a two-point function over an even list of labels.

    two_point(y_i, y_j) supplies the entries; fermionic sums carry the
    pairing signs.  Odd lists return 0 by definition.
    """
    n = len(ys)
    if n % 2 == 1:
        return 0.0 + 0.0j
    m = n // 2
    total = 0.0 + 0.0j
    for pairing in enumerate_pairings(m):
        prod = 1.0 + 0.0j
        for i, j in pairing.pairs():
            prod *= complex(two_point(ys[i], ys[j]))
        if kind == FERMI:
            prod *= pairing.sign
        total += prod
    return total


def npoint_function(space: FockSpace, vector: np.ndarray, ys) -> complex:
    """<vector | phi(y_1) ... phi(y_n) vector> by matrix-vector chains."""
    out = np.asarray(vector, dtype=complex)
    for y in reversed(list(ys)):
        out = field(space, y) @ out
    return complex(np.vdot(vector, out))


def verify_quasifree(space: FockSpace, vector, ys_family, kind: str | None = None,
                     max_order: int = 6, rng=None) -> dict:
    """Compare operator n-point functions against Wick sums (n <= 6).

    The two-point function is measured from the vector itself, so the
    report quantifies quasi-freeness rather than assuming it.  Returns
    per-order maximal defects and their overall maximum.
    """
    if kind is None:
        kind = space.statistics
    vector = np.asarray(vector, dtype=complex)
    ys = [as_doubled(y, space.d) for y in ys_family]
    k = len(ys)
    fields = [field(space, y) for y in ys]
    applied = [f @ vector for f in fields]
    tp = np.empty((k, k), dtype=complex)
    for i in range(k):
        fi_dag_v = fields[i].conj().T @ vector
        for j in range(k):
            tp[i, j] = np.vdot(fi_dag_v, applied[j])

    def measured_two_point(i, j):
        return tp[i, j]

    defects = {}
    # odd orders must vanish
    odd_max = 0.0
    for i in range(k):
        odd_max = max(odd_max, abs(npoint_function(space, vector, [ys[i]])))
    if max_order >= 3:
        for i in range(min(k, 3)):
            for j in range(min(k, 3)):
                for l in range(min(k, 3)):
                    odd_max = max(odd_max, abs(npoint_function(space, vector, [ys[i], ys[j], ys[l]])))
    defects["odd"] = odd_max

    if rng is None:
        rng = np.random.default_rng(0)

    def check_order(n, tuples):
        worst = 0.0
        for idx in tuples:
            actual = npoint_function(space, vector, [ys[i] for i in idx])
            expected = wick_npoint(measured_two_point, list(idx), kind)
            worst = max(worst, abs(actual - expected))
        return worst

    if max_order >= 4:
        pool = range(min(k, 4))
        tuples4 = [(a, b, c, e) for a in pool for b in pool for c in pool for e in pool]
        defects["4"] = check_order(4, tuples4)
    if max_order >= 6:
        tuples6 = [tuple(rng.integers(0, k, size=6)) for _ in range(60)]
        defects["6"] = check_order(6, tuples6)
    defects["max"] = max(defects.values())
    return defects


@dataclass(frozen=True)
class ReducedRepData:
    """Output of the covariance reduction.

    j is the real matrix of the complex structure; chart maps real
    coordinates to the complex coordinates of the constructed
    one-particle space; density is rho (bosonic) or chi (fermionic) as a
    complex matrix in that chart.
    """

    kind: str
    complex_dim: int
    j: np.ndarray
    density: np.ndarray
    chart: np.ndarray
    abs_mu: np.ndarray
    metric: np.ndarray = dc_field(repr=False, default=None)

    def to_complex(self, y) -> np.ndarray:
        return self.chart @ np.asarray(y, dtype=float)

    def inner(self, y1, y2) -> complex:
        return complex(np.vdot(self.to_complex(y1), self.to_complex(y2)))


def _complex_chart(g: np.ndarray, jc: np.ndarray):
    """Deterministic g-orthonormal basis (f_a, jc f_a) and the chart T.

    T y = g(f_a, y) + i g(jc f_a, y) identifies the real space, with jc
    acting as multiplication by i, with C^{dim/2}.
    """
    dim = g.shape[0]
    chosen = []

    def g_dot(a, b):
        return float(a @ g @ b)

    def project_out(v):
        for f in chosen:
            v = v - g_dot(f, v) * f
        return v

    for seed in range(dim):
        if len(chosen) >= dim:
            break
        cand = np.zeros(dim)
        cand[seed] = 1.0
        cand = project_out(cand)
        nrm = g_dot(cand, cand)
        if nrm < 1e-18:
            continue
        f = cand / np.sqrt(nrm)
        jf = jc @ f
        jf = project_out(jf)
        nrm2 = g_dot(jf, jf)
        if nrm2 < 1e-12:
            continue
        jf = jf / np.sqrt(nrm2)
        chosen.append(f)
        chosen.append(jf)
    if len(chosen) != dim:
        raise np.linalg.LinAlgError("failed to build a complex chart")
    fs = chosen[0::2]
    t = np.zeros((dim // 2, dim), dtype=complex)
    for a, f in enumerate(fs):
        t[a, :] = f @ g + 1j * ((jc @ f) @ g)
    return t, fs


def _reduce_common(cov: CovarianceData, allow_kernel: bool):
    eta = cov.symmetric_form
    om = cov.omega
    dim = cov.dim
    if dim % 2 == 1:
        raise OddKernelError("odd real dimension forces an odd kernel")
    w = np.linalg.eigvalsh(eta)
    if w.min() <= 1e-12 * max(1.0, w.max()):
        raise NonPositiveEtaError("the symmetric form must be positive definite")
    g = sqrtm_psd(eta)
    ginv = np.linalg.inv(g)
    mu_t = 0.5 * (ginv @ om @ ginv)
    mu_t = (mu_t - mu_t.T) / 2
    uu, s, vh = np.linalg.svd(mu_t)
    smax = max(s.max(initial=0.0), 1e-300)
    null = s <= 1e-10 * smax
    n_null = int(null.sum())
    if n_null and not allow_kernel:
        raise DegenerateOmegaError("omega is degenerate relative to eta")
    if n_null % 2 == 1:
        raise OddKernelError(f"kernel of the commutator form has odd dimension {n_null}")
    abs_mu_t = (vh.T * s) @ vh
    if n_null == 0:
        j_t = mu_t @ np.linalg.inv(abs_mu_t)
    else:
        keep = ~null
        inv_s = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
        j_t = mu_t @ ((vh.T * inv_s) @ vh)
        # extend over the kernel by pairing its basis vectors in svd order
        kernel_basis = vh[null, :].T
        for i in range(0, n_null, 2):
            v1 = kernel_basis[:, i]
            v2 = kernel_basis[:, i + 1]
            j_t = j_t + np.outer(v2, v1) - np.outer(v1, v2)
    j_t = (j_t - j_t.T) / 2
    return g, ginv, mu_t, abs_mu_t, j_t


def reduce_bose(cov: CovarianceData) -> ReducedRepData:
    """Map a bosonic covariance pair to doubled-representation data.

    Solves omega = 2 eta mu, takes the polar part mu = |mu| j, treats -j
    as the imaginary unit and returns rho = |mu|^{-1} - 1 in a
    deterministic complex chart.  The chart inner product satisfies
    y1 (eta + i/2 omega) y2 = <y1|y2> + Re <y1| rho y2>.
    """
    if cov.kind != BOSE:
        raise ValueError("expected bosonic covariance data")
    g, ginv, mu_t, abs_mu_t, j_t = _reduce_common(cov, allow_kernel=False)
    j = ginv @ j_t @ g
    abs_mu = ginv @ abs_mu_t @ g
    rho_real = np.linalg.inv(abs_mu) - np.eye(cov.dim)
    metric = cov.symmetric_form @ abs_mu
    metric = (metric + metric.T) / 2
    chart, _ = _complex_chart(metric, -j)
    rho_c = np.zeros((cov.dim // 2, cov.dim // 2), dtype=complex)
    # columns via T(rho f_b); T f_b is the unit vector e_b
    pinv = np.linalg.pinv(np.vstack([chart.real, chart.imag]))
    for b in range(cov.dim // 2):
        e = np.zeros(2 * (cov.dim // 2))
        e[b] = 1.0
        f_b = pinv @ e
        rho_c[:, b] = chart @ (rho_real @ f_b)
    return ReducedRepData(BOSE, cov.dim // 2, j, rho_c, chart, abs_mu, metric)


def reduce_fermi(cov: CovarianceData) -> ReducedRepData:
    """Map a fermionic covariance pair to doubled-representation data.

    chi = (1 - |mu|)/2 in the chart whose metric is the symmetric form
    itself; the complex structure is extended over Ker mu by pairing
    kernel vectors in a deterministic order, which requires the kernel
    to be even dimensional.
    """
    if cov.kind != FERMI:
        raise ValueError("expected fermionic covariance data")
    g, ginv, mu_t, abs_mu_t, j_t = _reduce_common(cov, allow_kernel=True)
    j = ginv @ j_t @ g
    abs_mu = ginv @ abs_mu_t @ g
    chi_real = 0.5 * (np.eye(cov.dim) - abs_mu)
    metric = cov.symmetric_form.copy()
    chart, _ = _complex_chart(metric, -j)
    chi_c = np.zeros((cov.dim // 2, cov.dim // 2), dtype=complex)
    pinv = np.linalg.pinv(np.vstack([chart.real, chart.imag]))
    for b in range(cov.dim // 2):
        e = np.zeros(2 * (cov.dim // 2))
        e[b] = 1.0
        f_b = pinv @ e
        chi_c[:, b] = chart @ (chi_real @ f_b)
    return ReducedRepData(FERMI, cov.dim // 2, j, chi_c, chart, abs_mu, metric)


def reconstruction_defect(cov: CovarianceData, red: ReducedRepData, rng=None,
                          trials: int = 25) -> float:
    """Max defect of the two-point reconstruction identity on random pairs."""
    if rng is None:
        rng = np.random.default_rng(7)
    worst = 0.0
    sign = -2.0 if cov.kind == FERMI else 1.0
    for _ in range(trials):
        y1 = rng.standard_normal(cov.dim)
        y2 = rng.standard_normal(cov.dim)
        lhs = y1 @ cov.symmetric_form @ y2 + 0.5j * (y1 @ cov.omega @ y2)
        t1 = red.to_complex(y1)
        t2 = red.to_complex(y2)
        if cov.kind == BOSE:
            rhs = np.vdot(t1, t2) + np.real(np.vdot(t1, red.density @ t2))
        else:
            rhs = np.vdot(t1, t2) - 2j * np.imag(np.vdot(t1, red.density @ t2))
        worst = max(worst, abs(lhs - rhs))
    return worst


def aw_covariance(rho_complex: np.ndarray) -> CovarianceData:
    """Covariance pair of the thermal doubled state with density rho.

    Uses the unit-normalized convention in which the reduction returns
    rho itself: for d complex modes the real dimension is 2d, eta is the
    real form of (z1|(1+rho) z2) and omega that of 2 Im(z1|z2).
    """
    rho = require_square(np.asarray(rho_complex, dtype=complex))
    d = rho.shape[0]
    one_plus = np.eye(d) + rho

    def embed(m):
        # real 2d x 2d matrix of the sesquilinear form (z1| m z2)
        re = m.real
        im = m.imag
        top = np.hstack([re, -im])
        bot = np.hstack([im, re])
        return np.vstack([top, bot])

    eta = embed(one_plus)
    eta = (eta + eta.T) / 2
    # real bilinear form of 2 Im(z1|z2)
    omega = np.block([[np.zeros((d, d)), 2.0 * np.eye(d)],
                      [-2.0 * np.eye(d), np.zeros((d, d))]])
    return CovarianceData(BOSE, eta, omega)
