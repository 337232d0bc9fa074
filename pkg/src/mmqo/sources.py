"""Multimode squeezed-light sources: parametric down-conversion supermodes,
twin-photon amplitudes, synchronously pumped OPOs and cluster states."""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import sqrtm

from .decomp import takagi
from .errors import (
    InvalidGain,
    InvalidParam,
    InvalidPumpRatio,
    InvalidSqueezing,
    NotSymmetric,
)
from .gaussian import GaussianState
from .modal import unitary_to_orthogonal


# -----------------------------------------------------------------------------------
# Parametric down-conversion
# -----------------------------------------------------------------------------------

@dataclass
class PdcResult:
    lambdas: np.ndarray      # Takagi spectrum of the joint two-photon matrix
    sigmas: np.ndarray       # per-supermode squeezing exp(gain * lambda)
    basis: np.ndarray        # rows are the supermode vectors in the input basis
    state: GaussianState
    symplectic: np.ndarray   # cov = symplectic @ symplectic.T


def pdc_supermodes(G, gain):
    """Output of a parametric interaction ``sum G[l, l'] a^dag_l a^dag_l'``.

    The Takagi factorization of ``G`` defines independent supermodes; each is
    squeezed by ``sigma_i = exp(gain * lambda_i)`` (dimensionless gain
    absorbing interaction length and pump amplitude), and the product of
    squeezers is rotated back to the input basis. The output is pure.
    """
    if not np.isfinite(gain) or gain < 0:
        raise InvalidGain("gain must be a nonnegative real number", gain=gain)
    tk = takagi(G)
    n = tk.lambdas.size
    # supermode operators are b = U a for the Takagi U, i.e. b^dag = conj(U) a^dag
    o = unitary_to_orthogonal(np.conj(tk.U))
    sigmas = np.exp(gain * tk.lambdas)
    s = o.T @ np.diag(np.concatenate([sigmas, 1.0 / sigmas]))
    cov = s @ s.T
    state = GaussianState(np.zeros(2 * n), 0.5 * (cov + cov.T))
    return PdcResult(lambdas=tk.lambdas, sigmas=sigmas, basis=np.conj(tk.U),
                     state=state, symplectic=s)


def signal_idler_block(G_si):
    """Assemble the full joint two-photon matrix for distinct signal and idler
    mode families: ``[[0, G_si], [G_si.T, 0]]`` (symmetric by construction)."""
    G_si = np.asarray(G_si, dtype=complex)
    if G_si.ndim != 2:
        raise InvalidParam("signal-idler amplitude must be a matrix")
    ns, ni = G_si.shape
    top = np.hstack([np.zeros((ns, ns)), G_si])
    bot = np.hstack([G_si.T, np.zeros((ni, ni))])
    return np.vstack([top, bot])


@dataclass
class TwinPhotonResult:
    amplitudes: np.ndarray   # pair-creation amplitude for each (l, l') pair
    vacuum_amplitude: float  # 1 at lowest order


def twin_photon_amplitudes(G, L_over_hbar_c):
    """First-order pair-production amplitudes ``-i (L / hbar c) G[l, l']``."""
    if not (np.isfinite(L_over_hbar_c) and L_over_hbar_c > 0):
        raise InvalidParam("interaction scale must be positive",
                           L_over_hbar_c=L_over_hbar_c)
    G = np.asarray(G, dtype=complex)
    return TwinPhotonResult(amplitudes=-1j * L_over_hbar_c * G,
                            vacuum_amplitude=1.0)


# -----------------------------------------------------------------------------------
# Synchronously pumped OPO below threshold
# -----------------------------------------------------------------------------------

def spopo_squeezing(lambdas, r):
    """Squeezed quadrature noise of each supermode of a synchronously pumped
    OPO at pump ratio ``r``:

    ``dX_i^2 = ((lambda_1 - r |lambda_i|) / (lambda_1 + r |lambda_i|))^2``

    with ``lambda_1`` the largest ``|lambda|``. ``r`` < 1 (below threshold).
    """
    if not (0 <= r < 1):
        raise InvalidPumpRatio("pump ratio must satisfy 0 <= r < 1", r=r)
    lam = np.abs(np.asarray(lambdas, dtype=float))
    if lam.size == 0 or np.max(lam) <= 0:
        raise InvalidParam("spectrum must contain a nonzero eigenvalue")
    lam1 = np.max(lam)
    return ((lam1 - r * lam) / (lam1 + r * lam)) ** 2


# -----------------------------------------------------------------------------------
# Cluster states
# -----------------------------------------------------------------------------------

def _check_adjacency(V):
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InvalidParam("adjacency matrix must be square", shape=V.shape)
    if np.max(np.abs(V - V.T)) > 1e-10:
        raise NotSymmetric("adjacency matrix must be symmetric")
    return 0.5 * (V + V.T)


def cluster_unitary(V):
    """Mode unitary ``U = (V + i I)(I + V^2)^(-1/2)`` whose quadrature lift
    turns a product of squeezers into a cluster state with graph ``V``.
    Satisfies ``Re U = V Im U``."""
    V = _check_adjacency(V)
    n = V.shape[0]
    w, e = np.linalg.eigh(np.eye(n) + V @ V)
    inv_sqrt = e @ np.diag(w ** -0.5) @ e.T
    return (V + 1j * np.eye(n)) @ inv_sqrt


@dataclass
class ClusterResult:
    state: GaussianState
    symplectic: np.ndarray   # M K with M the controlled-phase map


def cluster_state(V, sigmas):
    """Canonical cluster state: P-squeezed inputs (variance ``1/sigma^2``)
    sent through controlled-phase gates ``M = [[I, 0], [V, I]]``;
    ``cov = M K K.T M.T`` with ``K = diag(sigma, 1/sigma)``."""
    V = _check_adjacency(V)
    n = V.shape[0]
    sig = np.atleast_1d(np.asarray(sigmas, dtype=float))
    if sig.size == 1:
        sig = np.full(n, sig[0])
    if sig.shape != (n,):
        raise InvalidParam("need one squeezing value per mode",
                           got=sig.shape, n_modes=n)
    if np.any(sig <= 1):
        raise InvalidSqueezing("cluster inputs must be squeezed, sigma > 1",
                               sigmas=sig.tolist())
    m = np.block([[np.eye(n), np.zeros((n, n))], [V, np.eye(n)]])
    s = m @ np.diag(np.concatenate([sig, 1.0 / sig]))
    cov = s @ s.T
    return ClusterResult(state=GaussianState(np.zeros(2 * n), 0.5 * (cov + cov.T)),
                         symplectic=s)


def nullifier_covariance(st, V):
    """Covariance of the nullifier combinations ``P - V X`` of a state with
    respect to graph ``V``; an ideal cluster gives ``diag(1/sigma^2)``."""
    V = _check_adjacency(V)
    n = V.shape[0]
    if st.n_modes != n:
        raise InvalidParam("graph size does not match the state",
                           n_modes=st.n_modes, graph=n)
    t = np.hstack([-V, np.eye(n)])
    return t @ st.cov @ t.T
