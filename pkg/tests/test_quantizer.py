import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpkey import (
    CfrAmplitudes,
    IndexList,
    ParameterError,
    QuantizerConfig,
    ThresholdPair,
    censoring_exchange,
    compute_thresholds,
    quantize,
    quantize_pipeline,
    shuffle,
    skdr,
)
from chirpkey.metrics import max_run_lengths
from chirpkey.quantizer import BitKey, block_thresholds

amplitude_arrays = st.lists(
    st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
    min_size=1,
    max_size=300,
).map(lambda xs: np.array(xs))


@given(amplitude_arrays, st.integers(min_value=0, max_value=2**31))
def test_shuffle_is_a_permutation(values, seed):
    amps = CfrAmplitudes(values)
    out = shuffle(amps, seed)
    assert sorted(out.values.tolist()) == sorted(values.tolist())


@given(st.integers(min_value=2, max_value=200), st.integers(min_value=0, max_value=2**31))
def test_shuffle_shared_rule_aligns_positions(n, seed):
    # applying the same seed to paired vectors keeps pairs aligned
    base = np.arange(n, dtype=float)
    a = shuffle(CfrAmplitudes(base), seed)
    g = shuffle(CfrAmplitudes(base + 1000.0), seed)
    np.testing.assert_array_equal(g.values - a.values, 1000.0)


def test_shuffle_length_one_is_identity():
    amps = CfrAmplitudes(np.array([3.5]))
    np.testing.assert_array_equal(shuffle(amps, 99).values, amps.values)


def test_thresholds_constant_block():
    pair = compute_thresholds([4.2] * 10, alpha=1.5)
    assert pair.q_plus == pair.q_minus == pytest.approx(4.2)


def test_thresholds_worked_example():
    pair = compute_thresholds([1, 2, 3, 4, 5], alpha=0.5)
    # population std of 1..5 is sqrt(2)
    assert pair.q_plus == pytest.approx(3 + 0.5 * np.sqrt(2), abs=1e-12)
    assert pair.q_minus == pytest.approx(3 - 0.5 * np.sqrt(2), abs=1e-12)


def test_thresholds_alpha_zero_collapse():
    pair = compute_thresholds([1.0, 9.0], alpha=0.0)
    assert pair.q_plus == pair.q_minus == pytest.approx(5.0)


def test_thresholds_variance_spread():
    pair = compute_thresholds([1, 2, 3, 4, 5], alpha=0.5, spread="variance")
    assert pair.q_plus == pytest.approx(3 + 0.5 * 2.0)


def test_censoring_identical_inputs_alpha_zero_retains_all():
    amps = CfrAmplitudes(np.array([5.0, 1.0, 8.0, 9.0, 2.0, 7.0]))
    retained, _, _ = censoring_exchange(amps, amps, QuantizerConfig(alpha=0.0, block_size=6))
    np.testing.assert_array_equal(retained.indices, np.arange(6))


def test_censoring_worked_example():
    amps = CfrAmplitudes(np.array([0.0, 10.0, 5.01, 10.0, 0.0]))
    cfg = QuantizerConfig(alpha=0.5, block_size=5)
    retained, th_a, _ = censoring_exchange(amps, amps, cfg)
    block = amps.values
    assert th_a[0].q_plus == pytest.approx(block.mean() + 0.5 * block.std())
    np.testing.assert_array_equal(retained.indices, [0, 1, 3, 4])


@given(
    st.integers(min_value=2, max_value=128),
    st.integers(min_value=0, max_value=2**31),
)
@settings(max_examples=50)
def test_retained_sets_identical_for_adversarial_inputs(m, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 400))
    amps_a = CfrAmplitudes(rng.rayleigh(size=n))
    amps_g = CfrAmplitudes(rng.rayleigh(size=n))  # unrelated on purpose
    cfg = QuantizerConfig(alpha=0.5, block_size=m)
    retained, th_a, th_g = censoring_exchange(amps_a, amps_g, cfg)
    key_a = quantize(amps_a, retained, th_a, block_size=m)
    key_g = quantize(amps_g, retained, th_g, block_size=m)
    assert len(key_a) == len(key_g) == len(retained)


def test_censoring_length_mismatch():
    a = CfrAmplitudes(np.ones(4))
    g = CfrAmplitudes(np.ones(5))
    with pytest.raises(ParameterError):
        censoring_exchange(a, g, QuantizerConfig())


def test_quantize_plain_and_dgray():
    amps = CfrAmplitudes(np.array([9.0, 1.0, 9.0]))
    retained = IndexList(np.arange(3))
    th = [ThresholdPair(6.0, 4.0)]
    plain = quantize(amps, retained, th, "plain", block_size=3)
    np.testing.assert_array_equal(plain.bits, [1, 0, 1])
    dgray = quantize(amps, retained, th, "d-gray", block_size=3)
    np.testing.assert_array_equal(dgray.bits, [1, 0, 0, 1, 1, 0])


def test_quantize_gap_values_map_to_nearest_threshold():
    th = [ThresholdPair(6.0, 4.0)]
    retained = IndexList(np.arange(3))
    amps = CfrAmplitudes(np.array([4.5, 5.0, 5.5]))
    bits = quantize(amps, retained, th, block_size=3)
    # 4.5 is nearer the lower threshold; the exact midpoint 5.0 ties to 1
    np.testing.assert_array_equal(bits.bits, [0, 1, 1])


def test_quantize_zero_spread_block():
    th = [ThresholdPair(5.0, 5.0)]
    retained = IndexList(np.arange(2))
    bits = quantize(CfrAmplitudes(np.array([5.0, 4.99])), retained, th, block_size=2)
    np.testing.assert_array_equal(bits.bits, [1, 0])


@given(st.integers(min_value=0, max_value=2**31))
@settings(max_examples=30)
def test_dgray_doubles_length_without_double_runs(seed):
    rng = np.random.default_rng(seed)
    amps_a = CfrAmplitudes(rng.rayleigh(size=256))
    amps_g = CfrAmplitudes(np.abs(amps_a.values + 0.01 * rng.standard_normal(256)))
    cfg = QuantizerConfig(encoding="d-gray", shuffle_seed=seed)
    key_a, key_g = quantize_pipeline(amps_a, amps_g, cfg)
    assert len(key_a) == len(key_g)
    assert len(key_a) % 2 == 0
    pairs = key_a.bits.reshape(-1, 2)
    assert np.all(pairs.sum(axis=1) == 1)  # every aligned pair is 01 or 10


def test_pipeline_identical_amplitudes_agree_with_and_without_shuffle():
    rng = np.random.default_rng(17)
    amps = CfrAmplitudes(rng.rayleigh(size=512))
    for shuffle_on in (True, False):
        cfg = QuantizerConfig(shuffle_enabled=shuffle_on, shuffle_seed=5)
        key_a, key_g = quantize_pipeline(amps, amps, cfg)
        assert len(key_a) > 0
        assert skdr(key_a, key_g) == 0.0


def test_pipeline_correlated_gaussian_pairs():
    rng = np.random.default_rng(2024)
    skdrs, fractions = [], []
    for _ in range(100):
        base = rng.standard_normal(512)
        noise = rng.standard_normal(512)
        rho = 0.99
        a = 10 + base
        g = 10 + rho * base + np.sqrt(1 - rho**2) * noise
        cfg = QuantizerConfig(shuffle_seed=int(rng.integers(2**31)))
        key_a, key_g = quantize_pipeline(
            CfrAmplitudes(np.abs(a)), CfrAmplitudes(np.abs(g)), cfg
        )
        skdrs.append(skdr(key_a, key_g))
        fractions.append(len(key_a) / 512)
    assert np.mean(skdrs) < 0.05
    assert 0.55 <= np.mean(fractions) <= 0.85


def test_pipeline_shuffle_shortens_runs_on_smooth_profiles():
    rng = np.random.default_rng(31)
    on_runs, off_runs = [], []
    for trial in range(50):
        # smooth low-pass profile: few random harmonics over the vector
        t = np.linspace(0, 2 * np.pi, 512, endpoint=False)
        coef = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        smooth = np.abs(sum(c * np.exp(1j * (k + 1) * t) for k, c in enumerate(coef)))
        amps = CfrAmplitudes(smooth)
        for shuffle_on, sink in ((True, on_runs), (False, off_runs)):
            cfg = QuantizerConfig(shuffle_enabled=shuffle_on, shuffle_seed=trial)
            key_a, _ = quantize_pipeline(amps, amps, cfg)
            l0, l1 = max_run_lengths(key_a)
            sink.append(max(l0, l1))
    assert np.mean(off_runs) > np.mean(on_runs)


def test_shuffle_preserves_bit_multiset_under_global_thresholds():
    rng = np.random.default_rng(8)
    values = rng.rayleigh(size=128)
    amps = CfrAmplitudes(values)
    cfg_off = QuantizerConfig(shuffle_enabled=False, block_size=128)
    cfg_on = QuantizerConfig(shuffle_enabled=True, block_size=128, shuffle_seed=77)
    key_off, _ = quantize_pipeline(amps, amps, cfg_off)
    key_on, _ = quantize_pipeline(amps, amps, cfg_on)
    assert sorted(key_off.bits.tolist()) == sorted(key_on.bits.tolist())


def test_retained_fraction_monotone_in_alpha():
    rng = np.random.default_rng(12)
    amps_a = CfrAmplitudes(rng.rayleigh(size=512))
    amps_g = CfrAmplitudes(amps_a.values + 0.05 * rng.standard_normal(512))
    previous = None
    for alpha in (0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.2):
        cfg = QuantizerConfig(alpha=alpha, shuffle_enabled=False)
        retained, _, _ = censoring_exchange(amps_a, amps_g, cfg)
        if previous is not None:
            assert len(retained) <= previous
        previous = len(retained)


def test_trailing_blocks():
    # length 130 with m=64: two full blocks + a 2-wide tail block
    rng = np.random.default_rng(3)
    amps = CfrAmplitudes(rng.rayleigh(size=130))
    th = block_thresholds(amps, QuantizerConfig())
    assert len(th) == 3
    # length 129: the singleton tail is censored outright
    amps1 = CfrAmplitudes(rng.rayleigh(size=129))
    retained, _, _ = censoring_exchange(amps1, amps1, QuantizerConfig(alpha=0.0))
    assert 128 not in retained.indices.tolist()
    np.testing.assert_array_equal(retained.indices, np.arange(128))


def test_pipeline_deterministic():
    rng = np.random.default_rng(5)
    a = CfrAmplitudes(rng.rayleigh(size=300))
    g = CfrAmplitudes(rng.rayleigh(size=300))
    cfg = QuantizerConfig(shuffle_seed=21)
    k1 = quantize_pipeline(a, g, cfg)
    k2 = quantize_pipeline(a, g, cfg)
    np.testing.assert_array_equal(k1[0].bits, k2[0].bits)
    np.testing.assert_array_equal(k1[1].bits, k2[1].bits)


def test_index_list_wire_roundtrip():
    idx = IndexList(np.array([1, 5, 9, 200]))
    assert idx.to_wire() == "1,5,9,200\n"
    back = IndexList.from_wire(idx.to_wire())
    np.testing.assert_array_equal(back.indices, idx.indices)
    assert IndexList.from_wire("\n").indices.size == 0


def test_index_list_must_increase():
    with pytest.raises(ParameterError):
        IndexList(np.array([3, 3]))
    with pytest.raises(ParameterError):
        IndexList(np.array([5, 2]))


def test_bitkey_rejects_non_bits():
    with pytest.raises(ParameterError):
        BitKey(np.array([0, 2], dtype=np.uint8))


def test_config_validation():
    with pytest.raises(ParameterError):
        QuantizerConfig(alpha=-0.1)
    with pytest.raises(ParameterError):
        QuantizerConfig(block_size=1)
    with pytest.raises(ParameterError):
        QuantizerConfig(encoding="gray-3")
    with pytest.raises(ParameterError):
        QuantizerConfig(spread="iqr")
