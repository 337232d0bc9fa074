"""Gaussian gain/loss channels, the two-mode inseparability witness and the
mode-selective pulse gate."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_state
from mmqo import channels, gaussian
from mmqo.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidGain,
    InvalidParam,
    NotNormalized,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def balanced_splitter_pair(cov_diag):
    """Two single-mode states with X variances ``cov_diag`` mixed on a
    balanced beam splitter (xxpp lift of the real Hadamard)."""
    from mmqo.modal import unitary_to_orthogonal
    st0 = gaussian.GaussianState(np.zeros(4), np.diag(cov_diag))
    u = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    return gaussian.apply_symplectic(st0, unitary_to_orthogonal(u))


def epr_state(sigma2):
    """(X1+X2)/sqrt2 and (P1-P2)/sqrt2 both carrying variance sigma2."""
    return balanced_splitter_pair([sigma2, 1.0 / sigma2, 1.0 / sigma2, sigma2])


# ---------------------------------------------------------------------------
# gain / loss channel
# ---------------------------------------------------------------------------

def test_loss_on_squeezed_vacuum():
    # 3 dB loss on a 6 dB squeezed quadrature: 0.5*0.25 + 0.5 = 0.625
    out = channels.gaussian_channel(gaussian.squeezed_state([0.5]), 0.5)
    assert out.cov[0, 0] == pytest.approx(0.625, abs=1e-14)
    assert out.cov[1, 1] == pytest.approx(0.5 * 4.0 + 0.5, abs=1e-14)


def test_unit_gain_is_identity(rng):
    sta = random_state(rng, 2)
    out = channels.gaussian_channel(sta, 1.0)
    assert np.allclose(out.cov, sta.cov) and np.allclose(out.mean, sta.mean)


def test_gain_two_restores_perfect_squeezing_to_vacuum_level():
    sta = gaussian.squeezed_state([1e-4])     # X variance 1e-8
    out = channels.gaussian_channel(sta, 2.0)
    assert out.cov[0, 0] == pytest.approx(1.0, abs=3e-8)


def test_amplifier_mean_and_environment_noise(rng):
    sta = gaussian.coherent_state([1.0 + 0.5j])
    out = channels.gaussian_channel(sta, 4.0, kappa_env=2.0)
    assert np.allclose(out.mean, 2.0 * sta.mean)
    assert np.allclose(out.cov, 4.0 * np.eye(2) + 3.0 * 2.0 * np.eye(2))


@given(seeds)
def test_loss_semigroup(seed):
    rng = np.random.default_rng(seed)
    sta = random_state(rng, 2)
    p1, p2 = rng.uniform(0.05, 1.0, size=2)
    once = channels.gaussian_channel(sta, p1 * p2)
    twice = channels.gaussian_channel(channels.gaussian_channel(sta, p1), p2)
    assert np.max(np.abs(once.cov - twice.cov)) < 1e-12
    assert np.max(np.abs(once.mean - twice.mean)) < 1e-12


@given(seeds)
def test_amplifier_added_noise_is_psd(seed):
    rng = np.random.default_rng(seed)
    sta = random_state(rng, 2)
    gain = rng.uniform(1.0, 5.0)
    out = channels.gaussian_channel(sta, gain, kappa_env=rng.uniform(1.0, 3.0))
    added = out.cov - gain * sta.cov
    assert np.min(np.linalg.eigvalsh(added)) >= -1e-12


def test_channel_rejects():
    sta = gaussian.vacuum_state(1)
    with pytest.raises(InvalidGain):
        channels.gaussian_channel(sta, -0.5)
    with pytest.raises(InvalidParam):
        channels.gaussian_channel(sta, 2.0, kappa_env=0.5)


# ---------------------------------------------------------------------------
# Duan-Mancini witness
# ---------------------------------------------------------------------------

def test_duan_vacuum_is_separable():
    res = channels.duan_mancini(gaussian.vacuum_state(2), 0, 1)
    assert res.product == pytest.approx(1.0)
    assert not res.entangled


def test_duan_epr_product_is_sigma_fourth():
    res = channels.duan_mancini(epr_state(0.25), 0, 1)
    assert res.product == pytest.approx(0.0625, abs=1e-12)
    assert res.var_x == pytest.approx(0.25, abs=1e-12)
    assert res.entangled


def test_duan_entangled_through_gain_closed_form():
    # each combination variance maps sigma2 -> P sigma2 + (P - 1)
    sigma2, gain = 0.01, 1.7
    out = channels.gaussian_channel(epr_state(sigma2), gain)
    res = channels.duan_mancini(out, 0, 1)
    expect = (gain * sigma2 + gain - 1.0) ** 2
    assert res.product == pytest.approx(expect, rel=1e-12)


def test_duan_maximally_entangled_through_gain_limit():
    # sigma2 below ~1e-7 the anti-squeezed 1/sigma2 entries (1e7+) eat the
    # combination variance in float subtraction, so probe at 1e-6
    out = channels.gaussian_channel(epr_state(1e-6), 2.0)
    assert channels.duan_mancini(out, 0, 1).product == \
        pytest.approx(1.0, abs=1e-5)   # (P - 1)^2 at P = 2


@given(seeds)
@settings(max_examples=30)
def test_duan_product_monotone_in_loss(seed):
    rng = np.random.default_rng(seed)
    sta = epr_state(rng.uniform(0.05, 0.8))
    ps = np.sort(rng.uniform(0.05, 1.0, size=4))[::-1]
    prods = [channels.duan_mancini(channels.gaussian_channel(sta, p), 0, 1).product
             for p in ps]
    assert np.all(np.diff(prods) >= -1e-12)


def test_duan_sign_quadrants():
    sta = epr_state(0.0625)
    wrong = channels.duan_mancini(sta, 0, 1, signs=(-1, 1))
    assert not wrong.entangled     # anti-correlated quadrant sees excess noise
    assert wrong.product > 1.0


def test_duan_validation():
    sta = gaussian.vacuum_state(2)
    with pytest.raises(IndexOutOfRange):
        channels.duan_mancini(sta, 0, 2)
    with pytest.raises(InvalidParam):
        channels.duan_mancini(sta, 1, 1)
    with pytest.raises(InvalidParam):
        channels.duan_mancini(sta, 0, 1, signs=(1, 0))


# ---------------------------------------------------------------------------
# pulse gate
# ---------------------------------------------------------------------------

def test_pulse_gate_symplectic_identity_at_zero():
    o = channels.pulse_gate_symplectic(np.array([1.0, 0.0]), 0.0, 2)
    assert np.allclose(o, np.eye(6), atol=1e-12)


@given(seeds)
@settings(max_examples=30)
def test_pulse_gate_is_passive(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=3) + 1j * rng.normal(size=3)
    g /= np.linalg.norm(g)
    mu = rng.uniform(0.0, np.pi)
    o = channels.pulse_gate_symplectic(g, mu, 3)
    gaussian.validate_symplectic(o)
    assert np.max(np.abs(o.T @ o - np.eye(8))) < 1e-10


def test_pulse_gate_full_swap_extracts_target_mode(rng):
    # distinct thermal occupations land in the ancilla after a pi/2 swap
    sta = gaussian.thermal_state([5.0, 2.0])
    anc = gaussian.vacuum_state(1)
    out = channels.pulse_gate(sta, np.array([1.0, 0.0]), anc, np.pi / 2)
    assert out.n_modes == 3
    extracted = gaussian.reduced_state(out, [2])
    assert np.allclose(extracted.cov, 5.0 * np.eye(2), atol=1e-10)
    remaining = gaussian.reduced_state(out, [0])
    assert np.allclose(remaining.cov, np.eye(2), atol=1e-10)


def test_pulse_gate_conserves_photon_number(rng):
    sta = random_state(rng, 2, mean_scale=1.0)
    n0 = gaussian.total_photon_number(gaussian.cov_to_coherency(sta))
    for mu in (0.3, np.pi / 2):
        out = channels.pulse_gate(sta, np.array([1.0, 1.0j]) / np.sqrt(2.0),
                                  gaussian.vacuum_state(1), mu)
        n1 = gaussian.total_photon_number(gaussian.cov_to_coherency(out))
        assert n1 == pytest.approx(n0, abs=1e-10)


def test_pulse_gate_validation():
    sta = gaussian.vacuum_state(2)
    with pytest.raises(NotNormalized):
        channels.pulse_gate_symplectic(np.array([1.0, 1.0]), 0.3, 2)
    with pytest.raises(DimensionMismatch):
        channels.pulse_gate_symplectic(np.array([1.0]), 0.3, 2)
    with pytest.raises(DimensionMismatch):
        channels.pulse_gate(sta, np.array([1.0, 0.0]),
                            gaussian.vacuum_state(2), 0.3)
