"""Mode functions, overlaps and unitary changes of mode basis.

Conventions used throughout the package:

* quadratures ``X = b^dag + b``, ``P = i(b^dag - b)``, so ``[X, P] = 2i`` and the
  vacuum variance of every quadrature is 1;
* quadrature vectors are ordered xxpp: ``Q = (X_1..X_N, P_1..P_N)``;
* a unitary change of mode basis ``U`` acts on creation operators as
  ``b^dag_m = sum_l U[m, l] a^dag_l`` and on modal coefficient vectors as
  ``c_out = U.T c_in``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    GridMismatch,
    InvalidParam,
    NotSquare,
    NotUnitary,
    ZeroVector,
)

UNITARY_TOL = 1e-10


@dataclass
class ModeFunction:
    """A mode profile sampled on a uniform grid.

    samples: complex amplitudes at the grid points.
    grid_step: spacing of the grid; overlaps are plain Riemann sums.
    """

    samples: np.ndarray
    grid_step: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise InvalidParam("mode samples must be a non-empty 1-d array")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidParam("mode samples must be finite")
        if not (self.grid_step > 0):
            raise InvalidParam("grid_step must be positive", grid_step=self.grid_step)


def _check_same_grid(f, g):
    if f.samples.size != g.samples.size:
        raise GridMismatch(
            "mode functions sampled on different grids",
            n_f=f.samples.size, n_g=g.samples.size,
        )
    if abs(f.grid_step - g.grid_step) > 1e-12 * max(f.grid_step, g.grid_step):
        raise GridMismatch(
            "mode functions sampled with different steps",
            step_f=f.grid_step, step_g=g.grid_step,
        )


def mode_overlap(f, g):
    """Inner product ``(f, g) = sum_k conj(f_k) g_k * grid_step``.

    Equals the overlap of the corresponding single-photon states and the
    commutator ``[b_f, b_g^dag]`` of the mode operators.
    """
    _check_same_grid(f, g)
    return complex(np.sum(np.conj(f.samples) * g.samples) * f.grid_step)


def mode_norm(f):
    """L2 norm of a sampled mode."""
    return float(np.sqrt(np.real(mode_overlap(f, f))))


def normalize_mode(f):
    """Return ``f`` scaled to unit norm."""
    n = mode_norm(f)
    if n < 1e-300:
        raise ZeroVector("cannot normalize a zero mode")
    return ModeFunction(f.samples / n, f.grid_step)


def hermite_gauss(n, x, waist=1.0):
    """Hermite-Gauss profile ``h_n`` evaluated at points ``x``, normalized so
    that ``integral |h_n|^2 dx = 1``.
    """
    if n < 0:
        raise InvalidParam("mode index must be >= 0", n=n)
    if not waist > 0:
        raise InvalidParam("waist must be positive", waist=waist)
    xi = np.asarray(x, dtype=float) / waist
    # stable recurrence on the normalized functions themselves
    h_prev = np.pi ** (-0.25) * np.exp(-xi ** 2 / 2.0)
    if n == 0:
        return h_prev / np.sqrt(waist)
    h = np.sqrt(2.0) * xi * h_prev
    for k in range(2, n + 1):
        h, h_prev = np.sqrt(2.0 / k) * xi * h - np.sqrt((k - 1) / k) * h_prev, h
    return h / np.sqrt(waist)


def sample_hermite_gauss(n, half_width, step, waist=1.0, center=0.0):
    """Sample ``h_n(x - center)`` on ``[-half_width, half_width]``."""
    x = np.arange(-half_width, half_width + step / 2, step)
    return ModeFunction(hermite_gauss(n, x - center, waist), step)


def validate_unitary(U, tol=UNITARY_TOL):
    """Check that ``U`` is square and unitary within ``tol`` (max entry of
    ``U^dag U - I``)."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotSquare("expected a square matrix", shape=U.shape)
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > tol:
        raise NotUnitary("matrix is not unitary", deviation=float(dev), tol=tol)
    return U


def apply_basis_change(U, coeffs):
    """Transform modal coefficients to the original basis: ``c_out = U.T c``.

    ``U`` rows hold the new basis modes expressed in the original one, so a
    field with coefficients ``c`` on the new modes has original-basis
    coefficients ``U.T c``.
    """
    U = validate_unitary(U)
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (U.shape[0],):
        raise DimensionMismatch(
            "coefficient vector does not match basis size",
            n_modes=U.shape[0], n_coeffs=c.shape,
        )
    return U.T @ c


def unitary_to_orthogonal(U):
    """Lift a modal unitary to its quadrature-space action.

    Returns the orthogonal symplectic ``O = [[Re U, Im U], [-Im U, Re U]]``
    acting on xxpp quadrature vectors. The map is a group homomorphism:
    ``lift(U V) = lift(U) lift(V)``.
    """
    U = validate_unitary(U)
    re, im = U.real, U.imag
    return np.block([[re, im], [-im, re]])


def orthogonal_to_unitary(O):
    """Inverse of :func:`unitary_to_orthogonal` (reads off the blocks)."""
    O = np.asarray(O, dtype=float)
    n = O.shape[0] // 2
    if O.shape != (2 * n, 2 * n):
        raise NotSquare("expected an even-dimensional square matrix", shape=O.shape)
    U = O[:n, :n] + 1j * O[:n, n:]
    return validate_unitary(U)


def extend_to_basis(f, residual_tol=1e-8):
    """Extend a single mode to a full orthonormal basis.

    ``f`` is a coefficient vector in some N-mode basis. Returns an N x N
    unitary whose first row is ``f / ||f||``; the remaining rows are produced
    by deterministic modified Gram-Schmidt over the canonical vectors,
    skipping candidates whose residual norm falls below ``residual_tol``.
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1:
        raise InvalidParam("mode coefficients must be a 1-d vector")
    n = f.size
    norm = np.linalg.norm(f)
    if norm < 1e-300:
        raise ZeroVector("cannot extend a zero vector to a basis")
    rows = [f / norm]
    for k in range(n):
        if len(rows) == n:
            break
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        for r in rows:
            v = v - np.vdot(r, v) * r
        res = np.linalg.norm(v)
        if res < residual_tol:
            continue
        v = v / res
        # second Gram-Schmidt pass for orthogonality at working precision
        for r in rows:
            v = v - np.vdot(r, v) * r
        rows.append(v / np.linalg.norm(v))
    if len(rows) != n:
        raise ZeroVector("Gram-Schmidt failed to complete a basis", got=len(rows))
    return np.array(rows)
