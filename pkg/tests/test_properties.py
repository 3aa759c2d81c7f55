"""Property suites. Self-contained: no network, no corpus files."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chirp_glottal.cli import main
from chirp_glottal.lf import LFParams, lf_pulse
from chirp_glottal.metrics import determination_rate, spectral_distortion
from chirp_glottal.polyroots import find_roots
from chirp_glottal.signal import SampleBuffer, blackman_window, difference_egg, extract_frame
from chirp_glottal.synth import VOWELS, period_samples, vowel_filter

from oracles import matched_relative_error, poly_from_roots

finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
# frame samples: zero, or at most 120 dB below full scale
sample = st.one_of(st.just(0.0), st.floats(1e-6, 1.0), st.floats(-1.0, -1e-6))


def _real_frame(draw_len=st.integers(8, 96)):
    return draw_len.flatmap(
        lambda n: arrays(float, n, elements=sample).filter(lambda x: np.count_nonzero(x) > 2 and x[0] != 0)
    )


class TestWindowProperties:
    @given(st.integers(4, 4096))
    def test_symmetry(self, L):
        w = blackman_window(L)
        t = np.arange(1, L)
        np.testing.assert_allclose(w[t], w[L - t], rtol=0, atol=1e-12)

    @given(st.integers(4, 4096))
    def test_range(self, L):
        w = blackman_window(L)
        assert w[0] == 0.0
        assert np.all((w >= -1e-17) & (w <= 1.0 + 1e-15))


class TestSignalProperties:
    @given(arrays(float, 300, elements=finite), st.integers(16, 60), st.integers(60, 240))
    def test_frame_is_windowed_slice(self, x, T0, gci):
        buf = SampleBuffer(x, 8000)
        f = extract_frame(buf, gci, T0)
        L = 2 * T0
        assert np.array_equal(f.samples, x[f.anchor:f.anchor + L] * blackman_window(L))

    @given(arrays(float, 64, elements=finite), arrays(float, 64, elements=finite), finite, finite)
    def test_diff_egg_linear(self, x, y, a, b):
        lhs = difference_egg(SampleBuffer(a * x + b * y, 8000)).samples
        rhs = a * difference_egg(SampleBuffer(x, 8000)).samples + b * difference_egg(SampleBuffer(y, 8000)).samples
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestRootProperties:
    @settings(max_examples=25)
    @given(_real_frame())
    def test_conjugate_closure(self, x):
        r = find_roots(x).roots
        d = np.abs(r[:, None] - np.conj(r)[None, :]).min(axis=1)
        assert np.all(d <= 1e-6 * np.maximum(np.abs(r), 1.0))

    @settings(max_examples=25)
    @given(_real_frame(), st.sampled_from([1e-6, 1.0, 1e6]))
    def test_scale_equivariance(self, x, alpha):
        a = find_roots(x)
        b = find_roots(alpha * x)
        assert b.gain == pytest.approx(alpha * a.gain, rel=1e-15)
        nz = np.abs(a.roots) > 0
        assert np.array_equal(np.abs(b.roots) > 0, nz) or nz.all()
        assert matched_relative_error(b.roots[np.abs(b.roots) > 0], a.roots[nz]) <= 1e-9

    @settings(max_examples=25)
    @given(_real_frame(), st.integers(1, 5))
    def test_delay_invariance(self, x, k):
        a = find_roots(x)
        b = find_roots(np.r_[np.zeros(k), x])
        assert b.delay == k and b.gain == a.gain
        np.testing.assert_array_equal(a.roots, b.roots)

    @settings(max_examples=15)
    @given(st.integers(2, 128).flatmap(lambda n: arrays(float, n + 1, elements=st.builds(lambda m, s: m * s, st.floats(1e-3, 1), st.sampled_from((-1.0, 1.0))))))
    def test_round_trip_expansion(self, c):
        rs = find_roots(c)
        back = poly_from_roots(rs.roots, rs.gain).real
        assert np.max(np.abs(back - c)) / np.max(np.abs(c)) <= 1e-8


class TestSourceProperties:
    @settings(max_examples=60)
    @given(
        st.floats(0.4, 0.9),
        st.floats(0.6, 0.9),
        st.floats(60, 180),
        st.floats(0.0, 0.2),
    )
    def test_net_flow_balance(self, oq, am, f0, qa):
        p = lf_pulse(LFParams(oq, am, f0, qa), period_samples(f0, 16000))
        assert abs(p.sum()) <= 1e-6 * np.abs(p).sum()

    @pytest.mark.parametrize("fs", [8000, 16000, 44100])
    @pytest.mark.parametrize("vowel", VOWELS)
    def test_filter_stability(self, vowel, fs):
        _, a = vowel_filter(vowel, fs)
        assert np.max(np.abs(np.roots(a))) < 1.0


class TestMetricProperties:
    @given(arrays(float, 40, elements=finite), arrays(float, 40, elements=finite))
    def test_sd_symmetric_and_non_negative(self, x, y):
        if not (np.any(x) and np.any(y)):
            return
        a, b = spectral_distortion(x, y, K=256), spectral_distortion(y, x, K=256)
        if np.isnan(a):
            assert np.isnan(b)
        else:
            assert a >= 0 and a == pytest.approx(b, abs=1e-12)

    @given(arrays(float, 40, elements=finite).filter(np.any), st.floats(1e-3, 1e3))
    def test_sd_gain_invariant(self, x, alpha):
        sd = spectral_distortion(x, alpha * x, K=256)
        assert np.isnan(sd) or sd == pytest.approx(0.0, abs=1e-9)

    @given(st.lists(st.floats(0, 2), min_size=1, max_size=50), st.randoms())
    def test_rate_permutation_invariant(self, errs, rnd):
        r = determination_rate(errs)
        shuffled = list(errs)
        rnd.shuffle(shuffled)
        assert determination_rate(shuffled) == r and 0 <= r <= 100


class TestCliDeterminism:
    @settings(max_examples=3)
    @given(st.sampled_from(["unit", "auto", "ideal"]), st.sampled_from(["csv", "json"]))
    def test_byte_identical_reports(self, tmp_path_factory, strategy, fmt):
        d = tmp_path_factory.mktemp("det")
        wav = d / "v.wav"
        main(["synth", str(wav), "--f0", "150", "--periods", "5"])
        outs = []
        for k in range(2):
            out = d / f"r{k}.{fmt}"
            main(["decompose", str(wav), "--gci", str(d / "v.gci"), "--strategy", strategy, "--format", fmt, "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
