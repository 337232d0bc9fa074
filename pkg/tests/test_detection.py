"""Homodyne measurement model, covariance reconstruction, multipixel
emulation and coincidence rates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ortho_group

from _gen import random_state, random_unitary
from _oracles import hom_coincidence_two_photon
from mmqo import channels, detection, gaussian
from mmqo.errors import (
    DimensionMismatch,
    NotAProbability,
    NotNormalized,
    OverlapOutOfRange,
    ZeroLO,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


# ---------------------------------------------------------------------------
# homodyne variances
# ---------------------------------------------------------------------------

def test_quadrature_direction():
    assert np.allclose(detection.quadrature_direction([1.0], 0.0), [1.0, 0.0])
    assert np.allclose(detection.quadrature_direction([1.0], np.pi / 2),
                       [0.0, 1.0], atol=1e-15)
    with pytest.raises(ZeroLO):
        detection.quadrature_direction([0.0, 0.0])
    with pytest.raises(NotNormalized):
        detection.quadrature_direction([2.0, 0.0])


def test_quadrature_direction_renormalizes_with_warning():
    with pytest.warns(UserWarning):
        v = detection.quadrature_direction([1.0 + 3e-9])
    assert np.allclose(v, [1.0, 0.0])


def test_homodyne_variance_on_squeezed_vacuum():
    sta = gaussian.squeezed_state([0.5])
    assert detection.homodyne_variance(sta, [1.0], 0.0) == pytest.approx(0.25)
    assert detection.homodyne_variance(sta, [1.0], np.pi / 2) == \
        pytest.approx(4.0)
    lossy = channels.gaussian_channel(sta, 0.5)
    assert detection.homodyne_variance(lossy, [1.0], 0.0) == \
        pytest.approx(0.625)


def test_homodyne_variance_selects_joint_modes():
    # the (e1 + e2)/sqrt2 local oscillator reads out the EPR combination
    cov0 = np.diag([0.25, 4.0, 4.0, 0.25])
    sta = gaussian.GaussianState(np.zeros(4), cov0)
    from mmqo.modal import unitary_to_orthogonal
    u = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    epr = gaussian.apply_symplectic(sta, unitary_to_orthogonal(u))
    lo = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert detection.homodyne_variance(epr, lo, 0.0) == pytest.approx(0.25)
    with pytest.raises(DimensionMismatch):
        detection.homodyne_variance(epr, [1.0], 0.0)


@given(seeds)
def test_homodyne_variance_positive_and_phase_periodic(seed):
    rng = np.random.default_rng(seed)
    sta = random_state(rng, 2)
    lo = rng.normal(size=2) + 1j * rng.normal(size=2)
    lo /= np.linalg.norm(lo)
    phi = rng.uniform(0.0, np.pi)
    v1 = detection.homodyne_variance(sta, lo, phi)
    v2 = detection.homodyne_variance(sta, lo, phi + np.pi)
    assert v1 > 0.0
    assert v1 == pytest.approx(v2, rel=1e-10)


# ---------------------------------------------------------------------------
# schedule + reconstruction
# ---------------------------------------------------------------------------

def test_schedule_size_and_labels():
    sched = detection.homodyne_schedule(3)
    assert len(sched) == 3 * (2 * 3 + 1)
    kinds = {label[0] for label, _, _ in sched}
    assert kinds == {"m", "s", "i"}
    for _, lo, _ in sched:
        assert abs(np.linalg.norm(lo) - 1.0) < 1e-12


@given(seeds, st.integers(min_value=1, max_value=3))
@settings(max_examples=25)
def test_reconstruction_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    sta = random_state(rng, n)
    cov = detection.reconstruct_covariance(
        lambda lo, phi: detection.homodyne_variance(sta, lo, phi), n)
    assert np.max(np.abs(cov - sta.cov)) < 1e-10


def test_reconstruction_with_measurement_noise(rng):
    # 1e-4 additive noise on every variance stays below 1e-3 in the result
    worst = 0.0
    for _ in range(100):
        sta = random_state(rng, 2)

        def noisy(lo, phi):
            return detection.homodyne_variance(sta, lo, phi) + \
                rng.normal(scale=1e-4)

        cov = detection.reconstruct_covariance(noisy, 2)
        worst = max(worst, float(np.max(np.abs(cov - sta.cov))))
    assert worst < 1e-3


# ---------------------------------------------------------------------------
# multipixel homodyne emulation
# ---------------------------------------------------------------------------

def test_mphd_feasible_case_reconstructs(rng):
    o0 = ortho_group.rvs(3, random_state=11)
    delta = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, 3))
    u_b = random_unitary(rng, 3)
    u_t = o0 @ np.diag(delta) @ u_b
    res = detection.mphd_emulate(u_b, u_t)
    assert res.feasible
    assert np.max(np.abs(res.O @ np.diag(res.delta) @ u_b - u_t)) < 1e-10
    assert np.max(np.abs(res.O.T @ res.O - np.eye(3))) < 1e-10
    # the quoted algebraic condition is basis dependent: it rejects this
    # feasible target because U_b U_b^T != I for a complex pixel basis
    assert not res.secondary_agrees


def test_mphd_infeasible_balanced_mixer():
    u_t = np.array([[1.0, 1.0j], [1.0j, 1.0]]) / np.sqrt(2.0)
    res = detection.mphd_emulate(np.eye(2), u_t)
    assert not res.feasible
    assert res.O is None and res.delta is None
    assert res.phase_spread == pytest.approx(np.sqrt(0.5), abs=1e-12)
    # here the secondary condition flags infeasibility as well
    assert res.secondary_residual == pytest.approx(1.0, abs=1e-12)
    assert res.secondary_agrees


def test_mphd_identity_is_trivially_feasible():
    res = detection.mphd_emulate(np.eye(3), np.eye(3))
    assert res.feasible
    assert np.allclose(res.O, np.eye(3))
    with pytest.raises(DimensionMismatch):
        detection.mphd_emulate(np.eye(3), np.eye(2))


# ---------------------------------------------------------------------------
# coincidence rates
# ---------------------------------------------------------------------------

def test_hom_dip_and_fringes():
    assert detection.hom_single_photon(1.0, 0.0) == pytest.approx(0.0)
    assert detection.hom_single_photon(0.0, 0.3) == pytest.approx(0.5)
    assert detection.hom_single_photon(1.0, np.pi / 2) == pytest.approx(1.0)
    with pytest.raises(OverlapOutOfRange):
        detection.hom_single_photon(1.2)


@given(st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=0.0, max_value=np.pi))
def test_hom_against_two_photon_enumeration(overlap, phi):
    u = np.array([1.0, 0.0])
    w = np.array([overlap, np.sqrt(max(0.0, 1.0 - overlap ** 2))])
    expect = hom_coincidence_two_photon(u, w, phi)
    assert detection.hom_single_photon(overlap, phi) == \
        pytest.approx(expect, abs=1e-12)


def test_hom_schmidt_values():
    g2 = detection.hom_schmidt([0.5, 0.5], np.diag([1.0, 0.0]))
    assert g2 == pytest.approx(0.25)
    # a single perfectly matched Schmidt mode reproduces the full dip
    assert detection.hom_schmidt([1.0], [[1.0]]) == pytest.approx(0.0)
    assert detection.hom_schmidt([1.0], [[0.6]]) == \
        pytest.approx(detection.hom_single_photon(0.6, 0.0))


def test_hom_schmidt_validation():
    with pytest.raises(NotAProbability):
        detection.hom_schmidt([0.7, 0.7], np.eye(2))
    with pytest.raises(DimensionMismatch):
        detection.hom_schmidt([0.5, 0.5], np.eye(3))
    with pytest.raises(OverlapOutOfRange):
        detection.hom_schmidt([0.5, 0.5], 2.0 * np.eye(2))


def test_hom_coherent():
    assert detection.hom_coherent(1.0, np.pi / 2) == pytest.approx(1.0)
    assert detection.hom_coherent(1.0, 0.0) == pytest.approx(0.0)
    assert detection.hom_coherent(0.0, 1.0) == pytest.approx(0.5)


def test_bucket_photon_count():
    coh = gaussian.cov_to_coherency(gaussian.coherent_state([2.0, 1.0j]))
    assert detection.bucket_photon_count(coh) == pytest.approx(5.0)
