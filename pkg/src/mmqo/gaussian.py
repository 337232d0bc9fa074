"""Gaussian states: covariance matrices, Wigner evaluation, coherency matrices.

A Gaussian state of N modes is ``(mean, cov)`` where ``mean = <Q>`` and
``cov`` holds the symmetrized second moments of ``Q = (X_1..X_N, P_1..P_N)``.
With the vacuum normalized to unit variance, the Heisenberg inequality reads
``cov + i beta >= 0`` with ``beta = [[0, I], [-I, 0]]``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidParam,
    NotHermitian,
    NotPhysical,
    NotSquare,
    NotSymmetric,
    NotSymplectic,
    SingularCovariance,
    ZeroTrace,
)

SYMMETRY_TOL = 1e-10
PHYSICALITY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-9


def symplectic_form(n_modes):
    """The form ``beta = [[0, I], [-I, 0]]`` in xxpp ordering."""
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


def validate_symplectic(S, tol=SYMPLECTIC_TOL):
    """Check ``S beta S.T = beta`` within ``tol`` (max entry)."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        raise NotSquare("expected an even-dimensional square matrix", shape=S.shape)
    beta = symplectic_form(S.shape[0] // 2)
    dev = np.max(np.abs(S @ beta @ S.T - beta))
    if dev > tol:
        raise NotSymplectic("matrix does not preserve the symplectic form",
                            deviation=float(dev), tol=tol)
    return S


@dataclass
class PhysicalityCheck:
    ok: bool
    violation: float  # min eigenvalue of cov + i*beta (negative => unphysical)


def check_physical(cov, tol=PHYSICALITY_TOL):
    """Test the uncertainty principle on a covariance matrix.

    Accepts a GaussianState or a raw 2N x 2N symmetric matrix; returns the
    minimum eigenvalue of the Hermitian matrix ``cov + i beta``. Physical
    states have it >= 0 up to roundoff.
    """
    if isinstance(cov, GaussianState):
        cov = cov.cov
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    if cov.shape != (2 * n, 2 * n):
        raise NotSquare("covariance must be even-dimensional square", shape=cov.shape)
    m = cov + 1j * symplectic_form(n)
    lo = float(np.min(np.linalg.eigvalsh(m)))
    return PhysicalityCheck(ok=lo >= -tol, violation=lo)


@dataclass
class GaussianState:
    """Mean vector and xxpp covariance matrix of a Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=float).copy()
        self.cov = np.asarray(self.cov, dtype=float).copy()
        if self.cov.ndim != 2 or self.cov.shape[0] != self.cov.shape[1]:
            raise NotSquare("covariance must be square", shape=self.cov.shape)
        if self.cov.shape[0] % 2 or self.cov.shape[0] == 0:
            raise DimensionMismatch("covariance must be 2N x 2N", shape=self.cov.shape)
        if self.mean.shape != (self.cov.shape[0],):
            raise DimensionMismatch("mean and covariance sizes differ",
                                    mean=self.mean.shape, cov=self.cov.shape)
        dev = np.max(np.abs(self.cov - self.cov.T))
        if dev > SYMMETRY_TOL:
            raise NotSymmetric("covariance is not symmetric", deviation=float(dev))
        self.cov = 0.5 * (self.cov + self.cov.T)
        chk = check_physical(self.cov)
        if not chk.ok:
            raise NotPhysical("covariance violates the uncertainty principle",
                              violation=chk.violation)

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2


def vacuum_state(n_modes):
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes))


def coherent_state(alphas):
    """Product of coherent states; mean ``(2 Re a, 2 Im a)``, covariance I."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=complex))
    mean = np.concatenate([2 * alphas.real, 2 * alphas.imag])
    return GaussianState(mean, np.eye(2 * alphas.size))


def squeezed_state(sigmas):
    """Product of squeezed vacua with X variance ``sigma^2`` per mode."""
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    if np.any(sigmas <= 0):
        raise InvalidParam("squeezing sigma must be positive", sigmas=sigmas.tolist())
    cov = np.diag(np.concatenate([sigmas ** 2, sigmas ** -2]))
    return GaussianState(np.zeros(2 * sigmas.size), cov)


def thermal_state(kappas):
    """Product of thermal states with quadrature variance ``kappa >= 1``."""
    kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
    if np.any(kappas < 1):
        raise InvalidParam("thermal kappa must be >= 1", kappas=kappas.tolist())
    cov = np.diag(np.concatenate([kappas, kappas]))
    return GaussianState(np.zeros(2 * kappas.size), cov)


def standard_state(kind, params):
    """Dispatching constructor for the standard state families."""
    if kind == "vacuum":
        return vacuum_state(int(params))
    if kind == "coherent":
        return coherent_state(params)
    if kind == "squeezed":
        return squeezed_state(params)
    if kind == "thermal":
        return thermal_state(params)
    raise InvalidParam("unknown standard state kind", kind=kind)


def apply_symplectic(st, S):
    """Transform a state by a symplectic map: mean -> S mean, cov -> S cov S.T."""
    S = validate_symplectic(S)
    if S.shape[0] != 2 * st.n_modes:
        raise DimensionMismatch("symplectic size does not match the state",
                                S=S.shape, n_modes=st.n_modes)
    return GaussianState(S @ st.mean, S @ st.cov @ S.T)


def wigner_eval(st, q):
    """Wigner function of a Gaussian state at phase-space points.

    ``W(q) = exp(-(q - <Q>)^T cov^-1 (q - <Q>) / 2) / ((2 pi)^N sqrt(det cov))``,
    the normal density with covariance equal to the symmetrized quadrature
    covariance; it integrates to 1 and the vacuum origin value is ``1/(2 pi)``
    per mode. ``q`` may be a single 2N vector or an (M, 2N) array.
    """
    n = st.n_modes
    eigs = np.linalg.eigvalsh(st.cov)
    if eigs[0] <= 1e-12:
        raise SingularCovariance("covariance is numerically singular",
                                 min_eig=float(eigs[0]))
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    pts = np.atleast_2d(q)
    if pts.shape[1] != 2 * n:
        raise DimensionMismatch("phase-space point has wrong dimension",
                                expected=2 * n, got=pts.shape[1])
    d = pts - st.mean
    sol = np.linalg.solve(st.cov, d.T)
    quad = np.einsum("ij,ji->i", d, sol)
    sign, logdet = np.linalg.slogdet(st.cov)
    vals = np.exp(-0.5 * quad - 0.5 * logdet - n * np.log(2 * np.pi))
    return float(vals[0]) if single else vals


def purity(st):
    """``P = det(cov)^(-1/2)`` = product of inverse Williamson eigenvalues."""
    sign, logdet = np.linalg.slogdet(st.cov)
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularCovariance("covariance has non-positive determinant")
    return float(np.exp(-0.5 * logdet))


def validate_coherency(coh, tol=PHYSICALITY_TOL):
    """Check Hermiticity and positivity of a coherency matrix."""
    coh = np.asarray(coh, dtype=complex)
    if coh.ndim != 2 or coh.shape[0] != coh.shape[1]:
        raise NotSquare("coherency matrix must be square", shape=coh.shape)
    dev = np.max(np.abs(coh - coh.conj().T))
    if dev > SYMMETRY_TOL:
        raise NotHermitian("coherency matrix is not Hermitian", deviation=float(dev))
    lo = float(np.min(np.linalg.eigvalsh(coh)))
    if lo < -tol:
        raise NotPhysical("coherency matrix has a negative eigenvalue", min_eig=lo)
    return 0.5 * (coh + coh.conj().T)


def cov_to_coherency(st):
    """First-order coherency matrix ``G1[m, n] = <a^dag_m a_n>``.

    Fluctuation part from the quadrature covariance,
    ``(C_XX + C_PP + i (C_XP - C_PX)) / 4 - delta_mn / 2``,
    plus the mean-field term ``conj(abar_m) abar_n`` with
    ``abar = (mean_X + i mean_P) / 2``.
    """
    n = st.n_modes
    cxx = st.cov[:n, :n]
    cpp = st.cov[n:, n:]
    cxp = st.cov[:n, n:]
    coh = 0.25 * (cxx + cpp + 1j * (cxp - cxp.T)) - 0.5 * np.eye(n)
    abar = 0.5 * (st.mean[:n] + 1j * st.mean[n:])
    coh = coh + np.outer(np.conj(abar), abar)
    return validate_coherency(coh)


def total_photon_number(coh):
    """Mean photon number: the (real) trace of the coherency matrix."""
    coh = np.asarray(coh, dtype=complex)
    return float(np.real(np.trace(coh)))


def reduced_state(st, modes):
    """Marginal Gaussian state on a subset of modes (order preserved)."""
    modes = list(modes)
    n = st.n_modes
    for m in modes:
        if not 0 <= m < n:
            raise IndexOutOfRange("mode index out of range", mode=m, n_modes=n)
    idx = np.array(modes + [n + m for m in modes])
    return GaussianState(st.mean[idx], st.cov[np.ix_(idx, idx)])


def direct_sum(st_a, st_b):
    """Join two states on disjoint mode sets (xxpp ordering re-interleaved)."""
    na, nb = st_a.n_modes, st_b.n_modes
    n = na + nb
    mean = np.zeros(2 * n)
    cov = np.zeros((2 * n, 2 * n))
    # index map from each state's xxpp slots into the joint xxpp layout
    ia = np.concatenate([np.arange(na), n + np.arange(na)])
    ib = np.concatenate([na + np.arange(nb), n + na + np.arange(nb)])
    mean[ia] = st_a.mean
    mean[ib] = st_b.mean
    cov[np.ix_(ia, ia)] = st_a.cov
    cov[np.ix_(ib, ib)] = st_b.cov
    return GaussianState(mean, cov)
