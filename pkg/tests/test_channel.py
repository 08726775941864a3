import numpy as np
import pytest

from chirpkey import (
    ChannelModel,
    IqSamples,
    LoRaParams,
    ParameterError,
    apply_channel,
    exponential_profile,
    gen_preamble,
    probe,
    sample_channel,
)


def test_exponential_profile_shape():
    p = exponential_profile(4, decay_db=3.0)
    assert p.sum() == pytest.approx(1.0)
    ratios = p[:-1] / p[1:]
    np.testing.assert_allclose(ratios, 10 ** 0.3, rtol=1e-12)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_taps=0),
        dict(reciprocity_rho=1.5),
        dict(reciprocity_rho=-0.1),
        dict(num_taps=3, power_delay_profile=np.array([0.5, 0.5])),
        dict(num_taps=2, power_delay_profile=np.array([0.9, 0.2])),
    ],
)
def test_invalid_model_rejected(kwargs):
    with pytest.raises(ParameterError):
        ChannelModel(**kwargs)


def test_perfect_reciprocity_is_exact():
    model = ChannelModel(reciprocity_rho=1.0)
    real = sample_channel(model, seed=42)
    np.testing.assert_array_equal(real.forward_taps, real.reverse_taps)


def test_sample_channel_deterministic():
    model = ChannelModel()
    a = sample_channel(model, seed=7)
    b = sample_channel(model, seed=7)
    np.testing.assert_array_equal(a.forward_taps, b.forward_taps)
    np.testing.assert_array_equal(a.reverse_taps, b.reverse_taps)
    np.testing.assert_array_equal(a.eve_taps, b.eve_taps)


def test_zero_rho_decorrelates_directions():
    model = ChannelModel(reciprocity_rho=0.0)
    n = 100_000
    fwd = np.empty(n, dtype=complex)
    rev = np.empty(n, dtype=complex)
    for i in range(n):
        real = sample_channel(model, seed=i)
        fwd[i], rev[i] = real.forward_taps[0], real.reverse_taps[0]
    corr = np.abs(np.mean(fwd * np.conj(rev))) / (np.std(fwd) * np.std(rev))
    assert corr < 0.02


def test_per_tap_power_matches_profile():
    model = ChannelModel()
    n = 100_000
    powers = np.zeros(model.num_taps)
    for i in range(n):
        powers += np.abs(sample_channel(model, seed=i).forward_taps) ** 2
    powers /= n
    np.testing.assert_allclose(powers, model.power_delay_profile, rtol=0.03)


def test_identity_channel_passthrough(default_params):
    tx = gen_preamble(default_params)
    rx = apply_channel(tx, np.array([1.0]), snr_db=None, seed=0)
    np.testing.assert_array_equal(rx.samples, tx.samples)
    rx = apply_channel(tx, np.array([0.5]), snr_db=np.inf, seed=0)
    np.testing.assert_allclose(rx.samples, 0.5 * tx.samples, rtol=1e-15)


def test_noise_power_calibration(default_params):
    tx = IqSamples(np.ones(100_000, dtype=complex), default_params.fs)
    rx = apply_channel(tx, np.array([1.0]), snr_db=0.0, seed=3)
    noise = rx.samples - tx.samples
    ratio = np.mean(np.abs(noise) ** 2) / np.mean(np.abs(tx.samples) ** 2)
    assert 0.9 <= ratio <= 1.1


def test_empty_taps_rejected(default_params):
    tx = gen_preamble(default_params)
    with pytest.raises(ParameterError):
        apply_channel(tx, np.array([]), snr_db=None, seed=0)


def test_energy_preserved_on_average(default_params):
    model = ChannelModel()
    tx = IqSamples(gen_preamble(LoRaParams(preamble_len=1)).samples, default_params.fs)
    total = 0.0
    trials = 10_000
    for i in range(trials):
        taps = sample_channel(model, seed=i).forward_taps
        rx = apply_channel(tx, taps, snr_db=None, seed=0)
        total += np.mean(np.abs(rx.samples) ** 2)
    assert total / trials == pytest.approx(1.0, rel=0.05)


def test_probe_perfect_channel_matches_bin_for_bin(default_params):
    model = ChannelModel(reciprocity_rho=1.0, snr_db=np.inf)
    result = probe(default_params, model, seed=5)
    assert len(result.cfr_a) == len(result.cfr_g) == len(result.cfr_e)
    np.testing.assert_allclose(result.cfr_a.bins, result.cfr_g.bins, atol=1e-9)


def test_probe_amplitude_correlation_at_30db(default_params):
    model = ChannelModel(reciprocity_rho=0.99, snr_db=30.0)
    corrs = []
    for seed in range(100):
        r = probe(default_params, model, seed, bin_policy="occupied-band")
        a = np.abs(r.cfr_a.bins)
        g = np.abs(r.cfr_g.bins)
        corrs.append(np.corrcoef(a, g)[0, 1])
    assert np.mean(corrs) >= 0.95


def test_probe_eavesdropper_decorrelated(default_params):
    model = ChannelModel(eavesdropper_independent=True)
    corrs = []
    for seed in range(100):
        r = probe(default_params, model, seed)
        corrs.append(np.corrcoef(np.abs(r.cfr_e.bins), np.abs(r.cfr_g.bins))[0, 1])
    assert abs(np.mean(corrs)) < 0.2


def test_probe_dependent_eavesdropper_tracks_far_end():
    model = ChannelModel(eavesdropper_independent=False)
    real = sample_channel(model, seed=9)
    np.testing.assert_array_equal(real.eve_taps, real.reverse_taps)


def test_probe_deterministic(default_params):
    model = ChannelModel()
    r1 = probe(default_params, model, seed=11)
    r2 = probe(default_params, model, seed=11)
    np.testing.assert_array_equal(r1.cfr_a.bins, r2.cfr_a.bins)
    np.testing.assert_array_equal(r1.cfr_e.bins, r2.cfr_e.bins)


def test_reciprocity_monotone_in_rho(default_params):
    means = []
    for rho in (0.0, 0.5, 0.9, 0.99, 1.0):
        model = ChannelModel(reciprocity_rho=rho, snr_db=np.inf)
        corrs = []
        for seed in range(200):
            r = probe(default_params, model, seed)
            corrs.append(
                np.corrcoef(np.abs(r.cfr_a.bins), np.abs(r.cfr_g.bins))[0, 1]
            )
        means.append(np.mean(corrs))
    assert all(b >= a for a, b in zip(means, means[1:]))
