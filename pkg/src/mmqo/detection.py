"""Homodyne detection, covariance reconstruction, multipixel emulation and
Hong-Ou-Mandel coincidence rates."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotAProbability,
    NotNormalized,
    OverlapOutOfRange,
    ZeroLO,
)
from .gaussian import total_photon_number
from .modal import validate_unitary


def quadrature_direction(lo, phi=0.0):
    """Real 2N direction of the quadrature measured by a homodyne with local
    oscillator mode ``lo`` at phase ``phi``: ``(Re(lo e^{i phi}), Im(lo e^{i phi}))``."""
    g = np.asarray(lo, dtype=complex)
    if g.ndim != 1 or g.size == 0:
        raise ZeroLO("local oscillator mode must be a nonempty vector")
    norm = np.linalg.norm(g)
    if norm < 1e-12:
        raise ZeroLO("local oscillator mode is numerically zero", norm=float(norm))
    if abs(norm - 1.0) >= 1e-6:
        raise NotNormalized("local oscillator mode must be unit-norm",
                            norm=float(norm))
    if abs(norm - 1.0) > 1e-12:
        warnings.warn("local oscillator re-normalized (|norm-1| = %.3g)"
                      % abs(norm - 1.0), stacklevel=2)
    g = (g / norm) * np.exp(1j * phi)
    return np.concatenate([g.real, g.imag])


def homodyne_variance(st, lo, phi=0.0):
    """Noise variance of the quadrature selected by ``(lo, phi)``:
    ``v^T cov v`` with v from :func:`quadrature_direction`."""
    v = quadrature_direction(lo, phi)
    if v.size != 2 * st.n_modes:
        raise DimensionMismatch("local oscillator does not match the state",
                                lo_modes=v.size // 2, n_modes=st.n_modes)
    return float(v @ st.cov @ v)


def homodyne_schedule(n_modes):
    """Measurement settings sufficient to reconstruct a full covariance:
    three phases per mode and two LO modes (x2 phases) per pair, i.e.
    ``N(2N+1)`` variance measurements.

    Returns a list of ``(label, lo, phi)``; labels are ``("m", j)``,
    ``("s", m, n)`` and ``("i", m, n)`` for single-mode, balanced-sum and
    i-shifted-sum local oscillators.
    """
    sched = []
    eye = np.eye(n_modes, dtype=complex)
    for j in range(n_modes):
        for phi in (0.0, np.pi / 2, np.pi / 4):
            sched.append((("m", j), eye[j], phi))
    for m in range(n_modes):
        for n in range(m + 1, n_modes):
            lo_s = (eye[m] + eye[n]) / np.sqrt(2)
            lo_i = (eye[m] + 1j * eye[n]) / np.sqrt(2)
            for phi in (0.0, np.pi / 2):
                sched.append((("s", m, n), lo_s, phi))
            for phi in (0.0, np.pi / 2):
                sched.append((("i", m, n), lo_i, phi))
    return sched


def reconstruct_covariance(oracle, n_modes):
    """Rebuild the full quadrature covariance from homodyne variances.

    ``oracle(lo, phi)`` must return the variance measured with local
    oscillator mode ``lo`` at phase ``phi``. Exactly ``N(2N+1)`` calls are
    made. Diagonal blocks come from the per-mode phases {0, pi/2, pi/4};
    cross covariances from balanced and i-shifted two-mode local oscillators,
    e.g. ``<dX_m dX_n> = V_sum - (<dX_m^2> + <dX_n^2>)/2``.
    """
    nm = n_modes
    eye = np.eye(nm, dtype=complex)
    vx = np.zeros(nm)
    vp = np.zeros(nm)
    cxx = np.zeros((nm, nm))
    cpp = np.zeros((nm, nm))
    cxp = np.zeros((nm, nm))
    for j in range(nm):
        vx[j] = oracle(eye[j], 0.0)
        vp[j] = oracle(eye[j], np.pi / 2)
        v45 = oracle(eye[j], np.pi / 4)
        cxx[j, j] = vx[j]
        cpp[j, j] = vp[j]
        cxp[j, j] = v45 - 0.5 * (vx[j] + vp[j])
    for m in range(nm):
        for n in range(m + 1, nm):
            lo_s = (eye[m] + eye[n]) / np.sqrt(2)
            lo_i = (eye[m] + 1j * eye[n]) / np.sqrt(2)
            cxx[m, n] = cxx[n, m] = oracle(lo_s, 0.0) - 0.5 * (vx[m] + vx[n])
            cpp[m, n] = cpp[n, m] = oracle(lo_s, np.pi / 2) - 0.5 * (vp[m] + vp[n])
            cxp[m, n] = oracle(lo_i, 0.0) - 0.5 * (vx[m] + vp[n])
            cxp[n, m] = 0.5 * (vp[m] + vx[n]) - oracle(lo_i, np.pi / 2)
    return np.block([[cxx, cxp], [cxp.T, cpp]])


# -----------------------------------------------------------------------------------
# Multipixel homodyne emulation
# -----------------------------------------------------------------------------------

@dataclass
class MphdResult:
    feasible: bool
    O: np.ndarray | None          # real orthogonal recombination
    delta: np.ndarray | None      # unit-modulus per-pixel phases
    phase_spread: float           # worst column phase non-constancy (mod pi)
    secondary_residual: float     # off-diagonality of U_b U^T U U_b^dag
    secondary_agrees: bool        # whether the quoted condition matches


def mphd_emulate(U_b, U_target, tol=1e-8):
    """Emulate a mode unitary with a multipixel homodyne: seek
    ``U_target = O diag(e^{i psi}) U_b`` with ``O`` real orthogonal.

    Feasible exactly when every column of ``M = U_target U_b^dag`` has entries
    of constant phase modulo pi. The quoted algebraic condition
    ``U_b U^T U U_b^dag`` diagonal is evaluated as a secondary check and any
    disagreement is reported, not resolved.
    """
    U_b = validate_unitary(U_b)
    U_target = validate_unitary(U_target)
    if U_b.shape != U_target.shape:
        raise DimensionMismatch("bin and target bases differ in size",
                                bins=U_b.shape, target=U_target.shape)
    m = U_target @ U_b.conj().T
    n = m.shape[0]
    psis = np.zeros(n)
    spread = 0.0
    for k in range(n):
        col = m[:, k]
        ref = col[np.argmax(np.abs(col))]
        psis[k] = np.angle(ref)
        spread = max(spread, float(np.max(np.abs(np.imag(col * np.exp(-1j * psis[k]))))))
    feasible = spread <= tol
    o = delta = None
    if feasible:
        delta = np.exp(1j * psis)
        o = np.real(m * np.conj(delta)[None, :])
        feasible = np.max(np.abs(o.T @ o - np.eye(n))) <= max(tol, 1e-8)
        if not feasible:
            o = delta = None
    d_check = U_b @ U_target.T @ U_target @ U_b.conj().T
    off = d_check - np.diag(np.diag(d_check))
    sec_res = float(np.max(np.abs(off)))
    return MphdResult(feasible=feasible, O=o, delta=delta, phase_spread=spread,
                      secondary_residual=sec_res,
                      secondary_agrees=(sec_res <= tol) == feasible)


# -----------------------------------------------------------------------------------
# Hong-Ou-Mandel coincidences
# -----------------------------------------------------------------------------------

def _check_overlap(o):
    if abs(o) > 1 + 1e-9:
        raise OverlapOutOfRange("mode overlap magnitude exceeds 1",
                                overlap=abs(o))
    return complex(o)


def hom_single_photon(overlap, phi=0.0):
    """Normalized coincidence rate for one photon per arm with mode overlap
    ``overlap`` and relative spectral phase ``phi``:
    ``g2 = (1 - |overlap|^2 cos(2 phi)) / 2``."""
    o = _check_overlap(overlap)
    return 0.5 * (1.0 - abs(o) ** 2 * np.cos(2.0 * phi))


def hom_schmidt(probabilities, overlaps):
    """Coincidence rate at zero delay for photons drawn from Schmidt
    distributions with mode-overlap matrix ``overlaps[i, j] = <A_i | B_j>``:

    ``g2 = (1 - sum_ij sqrt(p_i p_j) M_ij conj(M_ji)) / 2``.
    """
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < -1e-12) or abs(np.sum(p) - 1.0) > 1e-8:
        raise NotAProbability("Schmidt weights must be a probability vector",
                              total=float(np.sum(p)))
    p = np.clip(p, 0.0, None)
    m = np.asarray(overlaps, dtype=complex)
    if m.shape != (p.size, p.size):
        raise DimensionMismatch("overlap matrix must be S x S",
                                S=p.size, got=m.shape)
    if np.max(np.abs(m)) > 1 + 1e-9:
        raise OverlapOutOfRange("mode overlap magnitude exceeds 1",
                                max_abs=float(np.max(np.abs(m))))
    root_p = np.sqrt(p)
    s = np.real(np.einsum("i,j,ij,ji->", root_p, root_p, m, np.conj(m)))
    return float(np.clip(0.5 * (1.0 - s), 0.0, 1.0))


def hom_coherent(overlap, psi=0.0):
    """Coincidence rate for weak coherent pulses: same dip shape,
    ``(1 - |overlap|^2 cos(2 psi)) / 2``, with ``psi`` the relative optical
    phase."""
    o = _check_overlap(overlap)
    return 0.5 * (1.0 - abs(o) ** 2 * np.cos(2.0 * psi))


def bucket_photon_count(coh):
    """Mean photon number seen by a bucket detector: the coherency trace."""
    return total_photon_number(coh)
