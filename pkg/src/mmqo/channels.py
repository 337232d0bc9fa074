"""Gaussian gain/loss channels, two-mode entanglement witnesses, and the
sum-frequency quantum pulse gate."""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidGain,
    InvalidParam,
    NotNormalized,
)
from .gaussian import GaussianState, apply_symplectic, direct_sum
from .modal import extend_to_basis, unitary_to_orthogonal


def gaussian_channel(st, gain, kappa_env=1.0):
    """Phase-insensitive gain (``gain > 1``) or loss (``gain < 1``) applied to
    every mode:

    ``cov -> gain * cov + |gain - 1| * kappa_env * I``,
    ``mean -> sqrt(gain) * mean``.

    ``kappa_env`` sets the environment quadrature variance (1 for vacuum).
    Loss channels form a semigroup: loss(P2) o loss(P1) = loss(P1 P2).
    """
    if not (np.isfinite(gain) and gain >= 0):
        raise InvalidGain("gain must be a nonnegative real number", gain=gain)
    if not (np.isfinite(kappa_env) and kappa_env >= 1):
        raise InvalidParam("environment variance must be >= 1", kappa_env=kappa_env)
    d = st.cov.shape[0]
    cov = gain * st.cov + abs(gain - 1.0) * kappa_env * np.eye(d)
    return GaussianState(np.sqrt(gain) * st.mean, cov)


@dataclass
class DuanResult:
    product: float
    var_x: float        # <((X_i + sx X_j)/sqrt(2))^2> (centered)
    var_p: float        # <((P_i + sp P_j)/sqrt(2))^2> (centered)
    entangled: bool     # product < 1 certifies inseparability


def duan_mancini(st, i, j, signs=(1, -1)):
    """Product form of the Duan-Mancini inseparability criterion for modes
    ``i`` and ``j``: the product of the two joint-quadrature variances
    ``<((X_i + sx X_j)/sqrt 2)^2> <((P_i + sp P_j)/sqrt 2)^2>`` is below 1
    only for entangled states. Default signs (+, -) witness the
    X-correlated / P-anticorrelated quadrant.
    """
    n = st.n_modes
    for m in (i, j):
        if not 0 <= m < n:
            raise IndexOutOfRange("mode index out of range", mode=m, n_modes=n)
    if i == j:
        raise InvalidParam("need two distinct modes", i=i, j=j)
    sx, sp = signs
    if sx not in (-1, 1) or sp not in (-1, 1):
        raise InvalidParam("signs must be +1 or -1", signs=signs)
    vx = np.zeros(2 * n)
    vx[i], vx[j] = 1 / np.sqrt(2), sx / np.sqrt(2)
    vp = np.zeros(2 * n)
    vp[n + i], vp[n + j] = 1 / np.sqrt(2), sp / np.sqrt(2)
    var_x = float(vx @ st.cov @ vx)
    var_p = float(vp @ st.cov @ vp)
    product = var_x * var_p
    return DuanResult(product=product, var_x=var_x, var_p=var_p,
                      entangled=product < 1.0 - 1e-12)


def pulse_gate_symplectic(target_mode, mu, n_modes):
    """Quadrature-space matrix of the pulse gate on ``n_modes + 1`` modes
    (the ancilla is the last mode).

    The gate couples the target-mode content to the ancilla through

        b_t_out = cos(mu) b_t + i sin(mu) b_anc,
        b_anc_out = i sin(mu) b_t + cos(mu) b_anc,

    and leaves every mode orthogonal to the target untouched.
    """
    g = np.asarray(target_mode, dtype=complex)
    if g.size != n_modes:
        raise DimensionMismatch("target mode does not match the state",
                                mode_dim=g.size, n_modes=n_modes)
    if abs(np.linalg.norm(g) - 1.0) > 1e-8:
        raise NotNormalized("target mode must be unit-norm",
                            norm=float(np.linalg.norm(g)))
    v = np.eye(n_modes + 1, dtype=complex)
    v[:n_modes, :n_modes] = extend_to_basis(g)
    gate = np.eye(n_modes + 1, dtype=complex)
    c, s = np.cos(mu), 1j * np.sin(mu)
    gate[0, 0] = gate[n_modes, n_modes] = c
    gate[0, n_modes] = gate[n_modes, 0] = s
    # annihilation coefficients map a' = (V^T gate conj(V)) a; the modal
    # unitary in our convention is its conjugate
    u = np.conj(v.T @ gate @ np.conj(v))
    return unitary_to_orthogonal(u)


def pulse_gate(st, target_mode, ancilla_init, mu):
    """Mode-selective extraction: beamsplitter-like coupling of angle ``mu``
    between the ``target_mode`` content of ``st`` and a fresh ancilla mode
    appended as the last mode. ``mu = pi/2`` swaps the target mode into the
    ancilla."""
    if ancilla_init.n_modes != 1:
        raise DimensionMismatch("ancilla must be a single mode",
                                ancilla_modes=ancilla_init.n_modes)
    joint = direct_sum(st, ancilla_init)
    o = pulse_gate_symplectic(target_mode, mu, st.n_modes)
    return apply_symplectic(joint, o)
