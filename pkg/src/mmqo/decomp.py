"""Normal-form decompositions of Gaussian states and mode structures.

Williamson normal form, Bloch-Messiah reduction, Takagi factorization of
complex symmetric matrices, Schmidt decomposition of joint two-photon
amplitudes, and principal-mode analysis of coherency matrices.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag, polar, schur, sqrtm

from .errors import (
    InvalidParam,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
    NotSymmetricComplex,
    OracleFailure,
    ZeroTrace,
)
from .gaussian import symplectic_form, validate_coherency, validate_symplectic

_UNIT_TOL = 1e-9


def symplectic_inverse(S):
    """Inverse of a symplectic matrix, ``S^-1 = -beta S.T beta``."""
    S = np.asarray(S, dtype=float)
    beta = symplectic_form(S.shape[0] // 2)
    return -beta @ S.T @ beta


# -----------------------------------------------------------------------------------
# Williamson normal form
# -----------------------------------------------------------------------------------

@dataclass
class WilliamsonFactors:
    S_prime: np.ndarray    # symplectic with S' cov S'.T = diag(kappas, kappas)
    kappas: np.ndarray     # symplectic eigenvalues, ascending, all >= 1


def williamson(cov):
    """Williamson normal form of a positive definite covariance matrix.

    Finds a symplectic ``S'`` such that ``S' cov S'.T = diag(k, k)`` with the
    symplectic eigenvalues ``k`` ascending. The antisymmetric matrix
    ``cov^(-1/2) beta cov^(-1/2)`` is brought to real Schur form; its 2x2
    blocks carry ``1/k`` and the Schur basis assembles the symplectic.

    Args:
        cov (array): real symmetric positive definite 2N x 2N matrix (xxpp)

    Returns:
        WilliamsonFactors: the symplectic ``S_prime`` and ``kappas``
    """
    cov = np.asarray(cov, dtype=float)
    n2 = cov.shape[0]
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or n2 % 2:
        raise NotSquare("covariance must be 2N x 2N", shape=cov.shape)
    if np.max(np.abs(cov - cov.T)) > 1e-10:
        raise NotSymmetric("covariance must be symmetric")
    n = n2 // 2
    w, v = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise NotPositiveDefinite("covariance must be positive definite",
                                  min_eig=float(w[0]))
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.T
    beta = symplectic_form(n)
    b = inv_sqrt @ beta @ inv_sqrt
    b = 0.5 * (b - b.T)
    t, k0 = schur(b, output="real")

    # normalize each 2x2 block to [[0, 1/kappa], [-1/kappa, 0]] with 1/kappa > 0
    cols = np.arange(n2)
    for j in range(n):
        if t[2 * j, 2 * j + 1] < 0:
            cols[[2 * j, 2 * j + 1]] = cols[[2 * j + 1, 2 * j]]
    k0 = k0[:, cols]
    inv_kappas = np.abs(np.array([t[2 * j, 2 * j + 1] for j in range(n)]))
    kappas = 1.0 / inv_kappas

    # ascending kappas, then interleaved -> xxpp column order
    order = np.argsort(kappas)
    kappas = kappas[order]
    perm = np.concatenate([2 * order, 2 * order + 1])
    k = k0[:, perm]

    d_half = np.sqrt(np.concatenate([kappas, kappas]))
    s_prime = d_half[:, None] * (k.T @ inv_sqrt)
    return WilliamsonFactors(S_prime=s_prime, kappas=kappas)


# -----------------------------------------------------------------------------------
# Bloch-Messiah reduction
# -----------------------------------------------------------------------------------

@dataclass
class BlochMessiahFactors:
    O1: np.ndarray   # orthogonal symplectic
    K: np.ndarray    # squeezing values sigma_i >= 1, descending
    O2: np.ndarray   # orthogonal symplectic

    def k_matrix(self):
        return np.diag(np.concatenate([self.K, 1.0 / self.K]))


def _symplectic_pair_basis(p_mat, n):
    """Eigenbasis of a symmetric symplectic PD matrix arranged as a
    symplectic-orthogonal matrix ``R`` with ``R.T p R = diag(s, 1/s)``."""
    beta = symplectic_form(n)
    w, v = np.linalg.eigh(p_mat)
    big = [i for i in range(2 * n) if w[i] > 1.0 + _UNIT_TOL]
    big.sort(key=lambda i: -w[i])
    n_unit_pairs = n - len(big)
    vs = [v[:, i] for i in big]
    sigmas = [w[i] for i in big]
    ws = [-beta @ x for x in vs]
    if n_unit_pairs:
        # eigenvalues nearest 1 form the (beta-invariant) unit subspace
        rest = sorted((i for i in range(2 * n) if i not in big),
                      key=lambda i: abs(w[i] - 1.0))
        unit = v[:, rest[: 2 * n_unit_pairs]]
        chosen = []
        for j in range(unit.shape[1]):
            c = unit[:, j].copy()
            for u in chosen:
                c -= (u @ c) * u
            nc = np.linalg.norm(c)
            if nc < 1e-8:
                continue
            u = c / nc
            chosen.append(u)
            chosen.append(-beta @ u)
            vs.append(u)
            ws.append(-beta @ u)
            sigmas.append(1.0)
            if len(sigmas) == n:
                break
    if len(sigmas) != n:
        raise OracleFailure("failed to pair the polar-factor eigenbasis",
                            got=len(sigmas), expected=n)
    r = np.column_stack(vs + ws)
    return r, np.array(sigmas)


def bloch_messiah(S, tol=1e-9):
    """Bloch-Messiah reduction ``S = O1 diag(sigma, 1/sigma) O2``.

    ``O1`` and ``O2`` are orthogonal symplectic (lifted modal unitaries) and
    the ``sigma_i >= 1`` are the squeezing values of ``S``, descending. Under
    degenerate ``sigma`` the factors are not unique; a deterministic choice is
    made and only the reconstruction is guaranteed.

    Args:
        S (array): symplectic 2N x 2N matrix (xxpp)

    Returns:
        BlochMessiahFactors
    """
    S = validate_symplectic(S, tol=tol)
    n = S.shape[0] // 2
    w_orth, p_sym = polar(S, side="right")   # S = w_orth @ p_sym
    p_sym = 0.5 * (p_sym + p_sym.T)
    r, sigmas = _symplectic_pair_basis(p_sym, n)
    o1 = w_orth @ r
    o2 = r.T
    return BlochMessiahFactors(O1=o1, K=sigmas, O2=o2)


# -----------------------------------------------------------------------------------
# Takagi factorization
# -----------------------------------------------------------------------------------

@dataclass
class TakagiFactors:
    lambdas: np.ndarray   # real, >= 0, descending (the singular values)
    U: np.ndarray         # unitary with U G U.T = diag(lambdas)


def takagi(G, degeneracy_tol=1e-10):
    """Takagi factorization of a complex symmetric matrix.

    Returns a unitary ``U`` and real ``lambdas >= 0`` (descending) with
    ``U G U.T = diag(lambdas)``. Built on the SVD; degenerate singular values
    are phase-corrected blockwise through the symmetric square root of the
    corresponding singular-vector overlap.

    Args:
        G (array): complex symmetric matrix
        degeneracy_tol (float): relative gap below which consecutive singular
            values are treated as one degenerate group.  Grouping must not
            split a true multiplet: the overlap block for a lone member of a
            degenerate pair is rank-deficient and the phase correction breaks
            down, so the clustering errs on the side of merging.

    Returns:
        TakagiFactors
    """
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise NotSquare("matrix must be square", shape=G.shape)
    if np.max(np.abs(G - G.T)) > 1e-10:
        raise NotSymmetricComplex("matrix must be complex symmetric",
                                  deviation=float(np.max(np.abs(G - G.T))))

    if np.max(np.abs(G.imag)) < 1e-14:
        # real symmetric shortcut: eigenvectors, with an i on the negative branch
        w, v = np.linalg.eigh(G.real)
        order = np.argsort(-np.abs(w))
        w, v = w[order], v[:, order].astype(complex)
        v[:, w < 0] *= 1j
        lambdas = np.abs(w)
        u_cols = v
    else:
        v, lambdas, wh = np.linalg.svd(G)
        w = wh.conj().T
        # cluster by consecutive gap (lambdas come out descending); rounding to
        # a fixed decimal can split a pair that straddles a rounding boundary
        gap = degeneracy_tol * max(1.0, lambdas[0])
        blocks = [[0]] if len(lambdas) else []
        for i in range(1, len(lambdas)):
            if lambdas[i - 1] - lambdas[i] <= gap:
                blocks[-1].append(i)
            else:
                blocks.append([i])
        qs = [sqrtm(v[:, idx].T @ w[:, idx]) for idx in blocks]
        u_cols = v @ np.conj(block_diag(*qs))

    u = u_cols.conj().T
    if np.max(np.abs(u @ G @ u.T - np.diag(lambdas))) > 1e-8 * max(1.0, np.max(np.abs(G))):
        raise OracleFailure("Takagi phase correction failed to converge")
    return TakagiFactors(lambdas=np.asarray(lambdas, dtype=float), U=u)


# -----------------------------------------------------------------------------------
# Schmidt decomposition of a signal-idler amplitude
# -----------------------------------------------------------------------------------

@dataclass
class SchmidtFactors:
    lambdas: np.ndarray   # singular values, descending
    U_s: np.ndarray       # signal-side unitary
    U_i: np.ndarray       # idler-side unitary; U_s G U_i.T = diag(lambdas)


def schmidt(G_si):
    """Schmidt decomposition ``U_s G_si U_i.T = diag(lambdas)`` via the SVD."""
    G_si = np.asarray(G_si, dtype=complex)
    if G_si.ndim != 2:
        raise InvalidParam("signal-idler amplitude must be a matrix")
    u, s, vh = np.linalg.svd(G_si)
    return SchmidtFactors(lambdas=s, U_s=u.conj().T, U_i=vh.conj())


def schmidt_mode_count(lambdas, rel_tol=1e-10):
    """Number of modes populated by a two-photon state with Schmidt spectrum
    ``lambdas``: twice the number of nonzero coefficients."""
    lam = np.abs(np.asarray(lambdas, dtype=float))
    if lam.size == 0 or np.max(lam) == 0:
        return 0
    return 2 * int(np.sum(lam > rel_tol * np.max(lam)))


def biphoton_coherency(lambdas):
    """Coherency matrix of ``sum_i lambda_i |1: s_i> |1: i_i>`` in its Schmidt
    basis: ``diag(lambda^2, lambda^2)`` normalized to two photons."""
    lam = np.asarray(lambdas, dtype=float)
    p = lam ** 2
    tot = np.sum(p)
    if tot <= 0:
        raise ZeroTrace("Schmidt spectrum is empty")
    # one photon in each family: per-family occupations sum to 1
    return np.diag(np.concatenate([p, p]) / tot)


# -----------------------------------------------------------------------------------
# Principal modes of a coherency matrix
# -----------------------------------------------------------------------------------

@dataclass
class PrincipalModes:
    basis: np.ndarray        # rows are the principal mode vectors
    occupations: np.ndarray  # eigenvalues, descending, clamped at 0
    rank: int


def principal_modes(coh, rel_tol=1e-10):
    """Diagonalize a coherency matrix: ``V coh V^dag = diag(occupations)``.

    The rows of ``basis`` are both the diagonalizing map and the principal
    mode vectors; ``rank`` counts occupations above ``rel_tol * max``.
    """
    coh = validate_coherency(coh)
    w, v = np.linalg.eigh(coh)
    w, v = w[::-1], v[:, ::-1]
    occ = np.clip(w.real, 0.0, None)
    top = occ[0] if occ.size else 0.0
    rank = int(np.sum(occ > rel_tol * top)) if top > 0 else 0
    return PrincipalModes(basis=v.conj().T, occupations=occ, rank=rank)


def effective_mode_number(coh):
    """Inverse participation ratio ``(Tr coh)^2 / Tr(coh^2)``."""
    coh = validate_coherency(coh)
    tr = float(np.real(np.trace(coh)))
    if tr <= 0:
        raise ZeroTrace("coherency matrix has zero trace")
    tr2 = float(np.sum(np.abs(coh) ** 2))
    return tr * tr / tr2


@dataclass
class SingleModeCheck:
    single: bool
    rank: int


def is_intrinsic_single_mode(coh, rel_tol=1e-10):
    """A state is intrinsically single-mode iff its coherency matrix has
    rank 1."""
    pm = principal_modes(coh, rel_tol=rel_tol)
    return SingleModeCheck(single=pm.rank == 1, rank=pm.rank)


# -----------------------------------------------------------------------------------
# Squeezed-core / classical-noise separation of a mixed Gaussian state
# -----------------------------------------------------------------------------------

@dataclass
class IntrinsicSeparation:
    O1: np.ndarray        # orthogonal symplectic frame of the squeezed core
    sigmas: np.ndarray    # core squeezing values, descending
    gamma_s: np.ndarray   # pure squeezed covariance O1 diag(s^2, s^-2) O1.T
    gamma_c: np.ndarray   # classical (positive semidefinite) remainder
    kappas: np.ndarray    # Williamson spectrum of the input


def intrinsic_separation(st):
    """Split ``cov = gamma_s + gamma_c`` into a pure squeezed covariance and a
    PSD classical-noise part.

    ``gamma_s`` is the Bloch-Messiah squeezed core of the Williamson
    purification; the remainder ``gamma_c = O1 K (gamma_th - I) K O1.T`` is
    positive semidefinite, so the full Wigner function is the convolution of
    the core Wigner function with a classical Gaussian of covariance
    ``gamma_c``.
    """
    wf = williamson(st.cov)
    f = symplectic_inverse(wf.S_prime)      # cov = f diag(k,k) f.T
    bm = bloch_messiah(f)
    k2 = np.concatenate([bm.K ** 2, bm.K ** -2.0])
    gamma_s = bm.O1 @ np.diag(k2) @ bm.O1.T
    gamma_s = 0.5 * (gamma_s + gamma_s.T)
    gamma_c = st.cov - gamma_s
    gamma_c = 0.5 * (gamma_c + gamma_c.T)
    lo = float(np.min(np.linalg.eigvalsh(gamma_c)))
    if lo < -1e-8:
        raise OracleFailure("classical remainder failed positivity",
                            min_eig=lo)
    return IntrinsicSeparation(O1=bm.O1, sigmas=bm.K, gamma_s=gamma_s,
                               gamma_c=gamma_c, kappas=wf.kappas)


# -----------------------------------------------------------------------------------
# Transverse-mode counting of a multimode beam
# -----------------------------------------------------------------------------------

@dataclass
class M2Result:
    delta_x2: float
    delta_k2: float
    M: float


def m2_mode_count(p, waist=1.0):
    """Beam-quality factor of an equal-weight mixture of the first ``p``
    transverse Hermite-Gauss modes:
    ``delta_x2 = p^2 w^2``, ``delta_k2 = p^2 / (4 w^2)``,
    ``M = sqrt(2 delta_x delta_k) = p``.
    """
    if int(p) != p or p < 1:
        raise InvalidParam("mode count p must be a positive integer", p=p)
    if not waist > 0:
        raise InvalidParam("waist must be positive", waist=waist)
    p = int(p)
    dx2 = p * p * waist * waist
    dk2 = p * p / (4.0 * waist * waist)
    m = float(np.sqrt(2.0 * np.sqrt(dx2 * dk2)))
    return M2Result(delta_x2=dx2, delta_k2=dk2, M=m)
