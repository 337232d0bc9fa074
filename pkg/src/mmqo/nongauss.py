"""Single-photon addition/subtraction on Gaussian states, Wigner-function
negativity measures, and a truncated Fock-basis oracle for cross-checking.

The degaussified Wigner function is evaluated from the closed form

    W_pm(q) = 1/2 [ q^T G^-1 A G^-1 q - Tr(G^-1 A) + 2 ] * W_G(q)

with G the base covariance and A the rank-two correlation matrix of the
added/subtracted photon.  The Fock oracle rebuilds the same states in a
number-state basis (thermal decomposition + squeezer/phase/beamsplitter
factors) and evaluates its Wigner function through displaced-parity matrix
elements in associated-Laguerre form.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .decomp import bloch_messiah, symplectic_inverse, williamson
from .errors import (
    CutoffTooSmall,
    DimensionMismatch,
    GridTooCoarse,
    NonzeroMean,
    NotNormalized,
    OracleFailure,
    TooManyModes,
    VacuumSubtraction,
)
from .gaussian import GaussianState, wigner_eval
from .modal import extend_to_basis, orthogonal_to_unitary, unitary_to_orthogonal

_SIGNS = ("add", "subtract")


def mode_plane_projector(g):
    """Rank-2 projector onto the (X, P) quadrature plane of mode ``g``,
    built by extending ``g`` to a mode basis and lifting it to quadrature
    space."""
    g = np.asarray(g, dtype=complex)
    u_ext = extend_to_basis(g)
    o = unitary_to_orthogonal(u_ext)
    n = g.size
    v = o[0]
    w = o[n]
    return np.outer(v, v) + np.outer(w, w)


@dataclass
class PhotonOpState:
    """Gaussian state dressed by one photon added to / subtracted from
    mode ``mode``; ``a_mat`` is the induced rank-2 correlation matrix."""
    base_cov: np.ndarray
    base_mean: np.ndarray
    a_mat: np.ndarray
    sign: str
    mode: np.ndarray

    @property
    def n_modes(self):
        return self.base_cov.shape[0] // 2


def photon_operation(st, g, sign):
    """Add or subtract a single photon in mode ``g`` of a zero-mean Gaussian
    state.  Returns the :class:`PhotonOpState` carrying the A matrix

        A = 2 (G ± 1) P_g (G ± 1) / Tr[(G ± 1) P_g].
    """
    if sign not in _SIGNS:
        raise ValueError("sign must be 'add' or 'subtract', got %r" % (sign,))
    if np.max(np.abs(st.mean)) > 1e-12:
        raise NonzeroMean("photon operations require a zero-mean base state",
                          max_mean=float(np.max(np.abs(st.mean))))
    g = np.asarray(g, dtype=complex)
    if g.size != st.n_modes:
        raise DimensionMismatch("mode vector does not match the state",
                                mode_dim=g.size, n_modes=st.n_modes)
    norm = np.linalg.norm(g)
    if abs(norm - 1.0) > 1e-8:
        raise NotNormalized("photon-operation mode must be unit-norm",
                            norm=float(norm))
    p_g = mode_plane_projector(g)
    gamma = st.cov
    s = 1.0 if sign == "add" else -1.0
    m = gamma + s * np.eye(gamma.shape[0])
    denom = float(np.trace(m @ p_g))
    if abs(denom) <= 1e-10:
        raise VacuumSubtraction(
            "cannot subtract a photon: mode is in the vacuum state",
            denominator=denom)
    a = 2.0 * (m @ p_g @ m) / denom
    a = 0.5 * (a + a.T)
    return PhotonOpState(base_cov=gamma.copy(), base_mean=st.mean.copy(),
                         a_mat=a, sign=sign, mode=g.copy())


def wigner_eval_nongauss(p, q):
    """Wigner function of a photon-added/subtracted Gaussian state at
    phase-space point(s) ``q`` (a 2N vector or an (M, 2N) array)."""
    st = GaussianState(mean=p.base_mean, cov=p.base_cov)
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    pts = q[None, :] if single else q
    gamma_inv = np.linalg.inv(st.cov)
    b = gamma_inv @ p.a_mat @ gamma_inv
    tr = float(np.trace(gamma_inv @ p.a_mat))
    d = pts - st.mean[None, :]
    quad = np.einsum("ij,jk,ik->i", d, b, d)
    vals = 0.5 * (quad - tr + 2.0) * wigner_eval(st, pts)
    return float(vals[0]) if single else vals


@dataclass
class OriginSign:
    """Sign of the degaussified Wigner function at the origin; ``value`` is
    2 - Tr(G^-1 A)."""
    label: str
    value: float


def wigner_origin_sign(p, tol=1e-12):
    if np.max(np.abs(p.base_mean)) > 1e-12:
        raise NonzeroMean("origin-sign shortcut requires a zero-mean base",
                          max_mean=float(np.max(np.abs(p.base_mean))))
    gamma_inv = np.linalg.inv(p.base_cov)
    value = 2.0 - float(np.trace(gamma_inv @ p.a_mat))
    if value < -tol:
        label = "negative"
    elif value > tol:
        label = "positive"
    else:
        label = "zero"
    return OriginSign(label=label, value=value)


# -----------------------------------------------------------------------------------
# Phase-space grids and the log-negativity integral
# -----------------------------------------------------------------------------------

@dataclass
class GridSpec:
    half_width: float = 8.0
    step: float = 0.05


DEFAULT_GRIDS = {1: GridSpec(8.0, 0.05), 2: GridSpec(6.0, 0.15)}


def wigner_log_negativity(wigner_fn, n_modes, grid=None):
    """log of the phase-space integral of |W|; zero for Gaussian states.

    ``wigner_fn`` maps an (M, 2N) array of points to M Wigner values.  One
    mode integrates on a uniform grid, two modes with a tensor Gauss-Legendre
    rule (node count ~ 2·half_width/step per axis, evaluated in slabs).
    """
    if n_modes not in (1, 2):
        raise TooManyModes("log-negativity integration supports 1 or 2 modes",
                           n_modes=n_modes)
    if grid is None:
        grid = DEFAULT_GRIDS[n_modes]
    hw, step = float(grid.half_width), float(grid.step)
    if n_modes == 1:
        ax = np.arange(-hw, hw + 0.5 * step, step)
        xx, pp = np.meshgrid(ax, ax, indexing="ij")
        pts = np.column_stack([xx.ravel(), pp.ravel()])
        vals = np.abs(np.asarray(wigner_fn(pts), dtype=float))
        cell = step * step
        total = float(np.sum(vals) * cell)
        vals2 = vals.reshape(xx.shape)
        edge = (np.sum(vals2[0, :]) + np.sum(vals2[-1, :])
                + np.sum(vals2[:, 0]) + np.sum(vals2[:, -1])) * cell
        if edge > 1e-4:
            raise GridTooCoarse("boundary mass suggests the grid window "
                                "is too small", edge_mass=float(edge),
                                half_width=hw)
        return float(np.log(total))
    nodes = max(4, int(round(2.0 * hw / step)))
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = x * hw
    w = w * hw
    total = 0.0
    edge = 0.0
    x2, x3, x4 = np.meshgrid(x, x, x, indexing="ij")
    w234 = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    slab = np.empty((x2.size, 4))
    slab[:, 1] = x2.ravel()
    slab[:, 2] = x3.ravel()
    slab[:, 3] = x4.ravel()
    outermost = np.max(np.abs(x)) - 1e-12
    inner_edge = np.max(np.abs(slab[:, 1:]), axis=1) >= outermost
    for i in range(nodes):
        slab[:, 0] = x[i]
        vals = np.abs(np.asarray(wigner_fn(slab), dtype=float))
        total += w[i] * np.sum(w234 * vals)
        mask = inner_edge if abs(x[i]) < outermost else slice(None)
        edge += w[i] * np.sum(w234[mask] * vals[mask])
    if edge > 1e-4:
        raise GridTooCoarse("boundary mass suggests the grid window is "
                            "too small", edge_mass=float(edge), half_width=hw)
    return float(np.log(total))


# -----------------------------------------------------------------------------------
# Truncated Fock-basis oracle
# -----------------------------------------------------------------------------------

def _destroy(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def _squeeze_op(r, dim):
    # stretches X by e^r: exp(r/2 (a^dag^2 - a^2))
    a = _destroy(dim)
    gen = 0.5 * r * (a.conj().T @ a.conj().T - a @ a)
    return expm(gen)


def _displace_op(alpha, dim):
    a = _destroy(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def _phase_op(theta, dim):
    # mode map b = e^{i theta} a  <->  Fock rotation e^{-i theta n}
    return np.exp(-1j * theta * np.arange(dim))


def _u2_factors(u):
    """Factor a 2x2 unitary as diag(e^{i a1}, e^{i a2}) R(theta)
    diag(e^{i b1}, e^{i b2}) with R a real rotation [[c, -s], [s, c]]."""
    c = abs(u[0, 0])
    s = abs(u[1, 0])
    theta = math.atan2(s, c)
    if s < 1e-12:
        return (np.angle(u[0, 0]), np.angle(u[1, 1])), 0.0, (0.0, 0.0)
    if c < 1e-12:
        return ((np.angle(-u[0, 1]), np.angle(u[1, 0])), 0.5 * np.pi,
                (0.0, 0.0))
    a1 = np.angle(u[0, 0])
    a2 = np.angle(u[1, 0])
    b2 = np.angle(-u[0, 1]) - a1
    return (a1, a2), theta, (0.0, b2)


def _rotation_op(theta, dim):
    """Two-mode Fock unitary mapping coherent amplitudes by the real
    rotation R(theta) = [[cos, -sin], [sin, cos]], built sector-by-sector
    in total photon number."""
    d2 = dim * dim
    u = np.zeros((d2, d2))
    idx = np.arange(d2)
    n1, n2 = divmod(idx, dim)
    tot = n1 + n2
    for n in range(2 * dim - 1):
        members = idx[tot == n]
        k = n1[members]
        gen = np.zeros((members.size, members.size))
        # generator a1^dag a2 - a2^dag a1 restricted to the sector
        for a_pos, ki in enumerate(k):
            if ki + 1 <= dim - 1 and n - ki - 1 >= 0:
                j_state = (ki + 1) * dim + (n - ki - 1)
                b_pos = np.searchsorted(members, j_state)
                if b_pos < members.size and members[b_pos] == j_state:
                    amp = math.sqrt((ki + 1) * (n - ki))
                    gen[b_pos, a_pos] += amp
                    gen[a_pos, b_pos] -= amp
        u[np.ix_(members, members)] = expm(-theta * gen)
    return u


def _passive_op(u_modes, dim):
    """Fock-space unitary of an N-mode passive mode map (N = 1 or 2)."""
    n = u_modes.shape[0]
    if n == 1:
        return np.diag(_phase_op(np.angle(u_modes[0, 0]), dim))
    (a1, a2), theta, (b1, b2) = _u2_factors(u_modes)
    left = np.kron(_phase_op(a1, dim), np.ones(dim)) * \
        np.kron(np.ones(dim), _phase_op(a2, dim))
    right = np.kron(_phase_op(b1, dim), np.ones(dim)) * \
        np.kron(np.ones(dim), _phase_op(b2, dim))
    rot = _rotation_op(theta, dim)
    return (left[:, None] * rot) * right[None, :]


def _mode_ops(n_modes, dim):
    a = _destroy(dim)
    eye = np.eye(dim)
    if n_modes == 1:
        return [a]
    return [np.kron(a, eye), np.kron(eye, a)]


def _displacement_elements(beta, n, m):
    """<n|D(beta)|m> for an array of beta values, associated-Laguerre form."""
    beta = np.asarray(beta, dtype=complex)
    absb2 = np.abs(beta) ** 2
    base = np.exp(-0.5 * absb2)
    if n >= m:
        pref = math.exp(0.5 * (gammaln(m + 1) - gammaln(n + 1)))
        return pref * beta ** (n - m) * base * eval_genlaguerre(m, n - m, absb2)
    pref = math.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1)))
    return pref * (-np.conj(beta)) ** (m - n) * base * \
        eval_genlaguerre(n, m - n, absb2)


class FockOracle:
    """Density matrix of a (possibly degaussified) state in a truncated
    number basis, with moment extraction and exact Wigner evaluation."""

    def __init__(self, rho, n_modes, cutoff):
        self.rho = rho
        self.n_modes = n_modes
        self.cutoff = cutoff
        self._dim = cutoff + 1

    def purity(self):
        return float(np.real(np.trace(self.rho @ self.rho)))

    def mean_photon(self):
        dim = self._dim
        idx = np.arange(dim ** self.n_modes)
        total = np.zeros_like(idx, dtype=float)
        rem = idx
        for _ in range(self.n_modes):
            rem, n = divmod(rem, dim)
            total = total + n
        return float(np.real(np.sum(np.diag(self.rho) * total)))

    def moments(self):
        """Quadrature mean vector and covariance matrix implied by rho."""
        ops = _mode_ops(self.n_modes, self._dim)
        nm = self.n_modes
        quads = []
        for a in ops:
            quads.append(a + a.conj().T)          # X
        for a in ops:
            quads.append(1j * (a.conj().T - a))   # P
        mean = np.array([np.real(np.trace(self.rho @ q)) for q in quads])
        cov = np.zeros((2 * nm, 2 * nm))
        for i in range(2 * nm):
            for j in range(i, 2 * nm):
                anti = quads[i] @ quads[j] + quads[j] @ quads[i]
                val = 0.5 * np.real(np.trace(self.rho @ anti)) - \
                    mean[i] * mean[j]
                cov[i, j] = cov[j, i] = val
        return mean, cov

    def reduced(self, mode):
        """Partial trace onto a single mode (two-mode oracles only)."""
        if self.n_modes == 1:
            return self
        dim = self._dim
        r = self.rho.reshape(dim, dim, dim, dim)
        if mode == 0:
            rho = np.einsum("ikjk->ij", r)
        else:
            rho = np.einsum("kikj->ij", r)
        return FockOracle(rho, 1, self.cutoff)

    def wigner(self, q):
        """Wigner values at point(s) q via displaced parity:
        W = (1/2pi)^N sum_{ij} rho_ij (-1)^{n(j)} <j|D(-2 alpha)|i>."""
        q = np.asarray(q, dtype=float)
        single = q.ndim == 1
        pts = q[None, :] if single else q
        nm = self.n_modes
        dim = self._dim
        alphas = 0.5 * (pts[:, :nm] + 1j * pts[:, nm:])
        betas = -2.0 * alphas
        rows, cols = np.nonzero(np.abs(self.rho) > 1e-14)
        cache = {}

        def elem(mode, n, m):
            key = (mode, n, m)
            if key not in cache:
                cache[key] = _displacement_elements(betas[:, mode], n, m)
            return cache[key]

        vals = np.zeros(pts.shape[0], dtype=complex)
        for i, j in zip(rows, cols):
            term = np.full(pts.shape[0], self.rho[i, j], dtype=complex)
            ii, jj = i, j
            parity = 0
            for mode in range(nm - 1, -1, -1):
                ii, ni = divmod(ii, dim)
                jj, nj = divmod(jj, dim)
                parity += nj
                term = term * elem(mode, nj, ni)
            vals += term * ((-1) ** parity)
        w = np.real(vals) / (2.0 * np.pi) ** nm
        return float(w[0]) if single else w


def _tail_mass(rho, n_modes, dim):
    diag = np.real(np.diag(rho))
    idx = np.arange(diag.size)
    top = np.zeros_like(idx, dtype=bool)
    rem = idx
    for _ in range(n_modes):
        rem, n = divmod(rem, dim)
        top |= n >= dim - 2
    return float(np.sum(diag[top]))


def _thermal_diag(kappa, dim):
    nbar = 0.5 * (kappa - 1.0)
    if nbar < 1e-14:
        d = np.zeros(dim)
        d[0] = 1.0
        return d
    q = nbar / (nbar + 1.0)
    return (1.0 - q) * q ** np.arange(dim)


def fock_oracle(base, ops=(), cutoff=20):
    """Rebuild a Gaussian state (at most two modes) in a truncated Fock
    basis, optionally apply photon additions/subtractions, and return a
    :class:`FockOracle`.

    The Gaussian synthesis goes through Williamson (thermal populations) and
    Bloch-Messiah (passive/squeeze/passive factors); the reconstructed
    moments are checked against the requested state and any mismatch raises
    OracleFailure rather than returning a silently wrong oracle.
    """
    nm = base.n_modes
    if nm > 2:
        raise TooManyModes("Fock oracle capped at two modes", n_modes=nm)
    if cutoff < 10:
        raise CutoffTooSmall("cutoff must be at least 10", cutoff=cutoff)
    dim = cutoff + 1

    wf = williamson(base.cov)
    f = symplectic_inverse(wf.S_prime)
    bm = bloch_messiah(f)
    u1 = orthogonal_to_unitary(bm.O1)
    u2 = orthogonal_to_unitary(bm.O2)

    diags = [_thermal_diag(k, dim) for k in wf.kappas]
    captured = float(np.prod([np.sum(d) for d in diags]))
    if captured < 1.0 - 1e-6:
        raise CutoffTooSmall("thermal populations exceed the cutoff",
                             captured=captured, cutoff=cutoff)
    rho = np.diag(diags[0]).astype(complex)
    if nm == 2:
        rho = np.kron(rho, np.diag(diags[1]))

    def apply(u):
        return u @ rho @ u.conj().T

    rho = apply(_passive_op(u2, dim))
    sq = _squeeze_op(math.log(bm.K[0]), dim)
    if nm == 2:
        sq = np.kron(sq, _squeeze_op(math.log(bm.K[1]), dim))
    rho = apply(sq)
    rho = apply(_passive_op(u1, dim))
    if np.max(np.abs(base.mean)) > 1e-12:
        alphas = 0.5 * (base.mean[:nm] + 1j * base.mean[nm:])
        d = _displace_op(alphas[0], dim)
        if nm == 2:
            d = np.kron(d, _displace_op(alphas[1], dim))
        rho = apply(d)

    if _tail_mass(rho, nm, dim) > 1e-6:
        raise CutoffTooSmall("state population reaches the truncation edge",
                             cutoff=cutoff,
                             tail=_tail_mass(rho, nm, dim))

    oracle = FockOracle(rho, nm, cutoff)
    mean, cov = oracle.moments()
    scale = max(1.0, float(np.max(np.abs(base.cov))))
    if np.max(np.abs(mean - base.mean)) > 1e-5 * scale or \
            np.max(np.abs(cov - base.cov)) > 1e-5 * scale:
        raise OracleFailure(
            "Fock synthesis does not reproduce the requested moments",
            mean_err=float(np.max(np.abs(mean - base.mean))),
            cov_err=float(np.max(np.abs(cov - base.cov))))

    mode_ops = _mode_ops(nm, dim)
    for sign, g in ops:
        if sign not in _SIGNS:
            raise ValueError("op sign must be 'add' or 'subtract'")
        g = np.atleast_1d(np.asarray(g, dtype=complex))
        if abs(np.linalg.norm(g) - 1.0) > 1e-8:
            raise NotNormalized("photon-operation mode must be unit-norm",
                                norm=float(np.linalg.norm(g)))
        b = sum(np.conj(g[m]) * mode_ops[m] for m in range(nm))
        op = b.conj().T if sign == "add" else b
        rho = op @ rho @ op.conj().T
        tr = float(np.real(np.trace(rho)))
        if tr <= 1e-10:
            raise VacuumSubtraction(
                "cannot subtract a photon: mode is in the vacuum state",
                trace=tr)
        rho = rho / tr
        if _tail_mass(rho, nm, dim) > 1e-6:
            raise CutoffTooSmall("photon operation pushed population to the "
                                 "truncation edge", cutoff=cutoff)
    return FockOracle(rho, nm, cutoff)
