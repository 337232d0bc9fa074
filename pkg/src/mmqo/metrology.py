"""Quantum Cramér-Rao machinery for single-parameter estimation with
Gaussian probes: detection-mode extraction by finite differences and the
bound Delta a = a0 * Delta_det / (2 sqrt(N))."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .detection import quadrature_direction
from .errors import (
    DimensionMismatch,
    FlatModel,
    InvalidParam,
    SingularCovariance,
    StepTooLarge,
)
from .modal import sample_hermite_gauss

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class ParameterizedField:
    """Mean-field model: ``evaluate(a)`` returns the complex mode
    coefficients at parameter value ``a``, normalized so that the squared
    norm is ``n_photons``."""
    evaluate: Callable[[float], np.ndarray]
    n_photons: float

    def __post_init__(self):
        if self.n_photons <= 0:
            raise InvalidParam("photon number must be positive",
                               n_photons=self.n_photons)

    def unit_mean(self, a):
        v = np.asarray(self.evaluate(a), dtype=complex)
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            raise FlatModel("mean field vanishes", a=float(a))
        return v / nrm


def _fd_derivative(model, h):
    return (model.unit_mean(h) - model.unit_mean(-h)) / (2.0 * h)


def detection_mode(model, h=1e-5):
    """Normalized derivative of the unit mean field at a = 0.

    Returns ``(u_det, a0)`` with ``u_det`` the unit-norm detection mode and
    ``a0 = 1/|d u_mean/d a|`` the scaling factor. A halved-step check guards
    against a step too large for the model's curvature.
    """
    if h <= 0:
        raise InvalidParam("finite-difference step must be positive", h=h)
    d = _fd_derivative(model, h)
    nd = np.linalg.norm(d)
    if nd < 1e-12:
        raise FlatModel("model mean field does not depend on the parameter",
                        derivative_norm=float(nd))
    u = d / nd
    d2 = _fd_derivative(model, 0.5 * h)
    nd2 = np.linalg.norm(d2)
    if nd2 < 1e-12:
        raise FlatModel("model mean field does not depend on the parameter",
                        derivative_norm=float(nd2))
    if np.linalg.norm(u - d2 / nd2) >= 1e-6:
        raise StepTooLarge("halving h moves the detection mode",
                           h=h, shift=float(np.linalg.norm(u - d2 / nd2)))
    return u, 1.0 / nd


def _noise_factor(cov_inv, u_det, phi):
    v = quadrature_direction(u_det, phi)
    val = float(v @ cov_inv @ v)
    if val <= 0:
        raise SingularCovariance("inverse covariance is not positive along "
                                 "the detection mode", value=val)
    return 1.0 / np.sqrt(val)


def _best_phase(cov_inv, u_det):
    # minimize the noise factor = maximize v(phi)^T cov_inv v(phi);
    # coarse scan over half a period, then golden-section refinement
    phis = np.linspace(0.0, np.pi, 180, endpoint=False)
    vals = [float(quadrature_direction(u_det, p) @ cov_inv
                  @ quadrature_direction(u_det, p)) for p in phis]
    i = int(np.argmax(vals))
    span = np.pi / 180.0
    lo, hi = phis[i] - span, phis[i] + span

    def f(p):
        v = quadrature_direction(u_det, p)
        return -float(v @ cov_inv @ v)

    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > 1e-8:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def qcr_bound(model, st_cov, quadrature_phase=None, h=1e-5):
    """Quantum Cramér-Rao bound ``a0 * Delta_det / (2 sqrt(N))`` for the
    model probed with covariance ``st_cov``.

    ``Delta_det`` is the noise factor of the detection-mode quadrature at
    ``quadrature_phase``; when the phase is omitted it is optimized (the
    bound is reported for the best measurement quadrature).
    """
    u_det, a0 = detection_mode(model, h=h)
    cov = np.asarray(st_cov, dtype=float)
    if cov.shape != (2 * u_det.size, 2 * u_det.size):
        raise DimensionMismatch("covariance does not match the model "
                                "dimension", cov_shape=cov.shape,
                                model_dim=u_det.size)
    w = np.linalg.eigvalsh(cov)
    if w[0] <= 1e-12:
        raise SingularCovariance("probe covariance is singular",
                                 min_eig=float(w[0]))
    cov_inv = np.linalg.inv(cov)
    if quadrature_phase is None:
        quadrature_phase = _best_phase(cov_inv, u_det)
    delta_det = _noise_factor(cov_inv, u_det, quadrature_phase)
    return a0 * delta_det / (2.0 * np.sqrt(model.n_photons))


# -----------------------------------------------------------------------------------
# Built-in parameterized families
# -----------------------------------------------------------------------------------

def mz_model(n_photons):
    """Mach-Zehnder at mid-fringe: mean field
    sin(pi/4 + a/2) f1 + cos(pi/4 + a/2) f2 over the two output modes,
    detection mode (f1 - f2)/sqrt(2)."""
    root_n = np.sqrt(n_photons)

    def evaluate(a):
        return root_n * np.array([np.sin(np.pi / 4 + 0.5 * a),
                                  np.cos(np.pi / 4 + 0.5 * a)],
                                 dtype=complex)

    return ParameterizedField(evaluate=evaluate, n_photons=n_photons)


def phase_model(n_photons, n_modes=1, mode=0):
    """Global phase on one basis mode: e^{ia} f; detection mode i f, a0 = 1."""
    root_n = np.sqrt(n_photons)

    def evaluate(a):
        v = np.zeros(n_modes, dtype=complex)
        v[mode] = root_n * np.exp(1j * a)
        return v

    return ParameterizedField(evaluate=evaluate, n_photons=n_photons)


def displacement_model(n_photons, half_width=6.0, step=0.01, waist=1.0):
    """Transverse displacement of a Gaussian beam: the sampled fundamental
    Hermite-Gauss envelope shifted by ``a``; the detection mode approaches
    the first excited Hermite-Gauss mode."""
    root_n = np.sqrt(n_photons)

    def evaluate(a):
        mf = sample_hermite_gauss(0, half_width=half_width, step=step,
                                  waist=waist, center=a)
        coeffs = mf.samples * np.sqrt(mf.grid_step)
        return root_n * coeffs / np.linalg.norm(coeffs)

    return ParameterizedField(evaluate=evaluate, n_photons=n_photons)


BUILTIN_MODELS = {
    "mz": mz_model,
    "phase": phase_model,
    "displacement": displacement_model,
}
