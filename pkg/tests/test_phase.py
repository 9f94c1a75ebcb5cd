import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import signal as sps

from phaselock.core import RAW, PhaseSeries, wrap_angle
from phaselock.models import LorenzParams
from phaselock.phase import (AnalyticSeries, UndefinedPhaseError,
                             analytic_signal, bandpass, bandpass_coeffs_csv,
                             hilbert_phase_pipeline, instantaneous_phase,
                             lorenz_fixed_point, phase_lorenz, protophase,
                             ring_transform)

PI = np.pi


class TestProtophase:
    def test_positive_x_axis(self):
        assert protophase(1.0, 0.0) == pytest.approx(0.0)

    def test_positive_y_axis(self):
        assert protophase(0.0, 1.0) == pytest.approx(PI / 2)

    def test_third_quadrant(self):
        assert protophase(-1.0, -1.0) == pytest.approx(5 * PI / 4)

    def test_origin_rejected(self):
        with pytest.raises(UndefinedPhaseError):
            protophase(0.0, 0.0)

    def test_vectorized(self):
        out = protophase(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert np.allclose(out, [0.0, PI / 2])

    def test_rotation_consistency(self):
        # adding full turns to the geometric angle leaves the result alone
        ang = 1.234
        assert protophase(np.cos(ang), np.sin(ang)) == pytest.approx(
            protophase(np.cos(ang + 2 * PI), np.sin(ang + 2 * PI)))


class TestLorenzPhase:
    def test_fixed_point_positive_detuning(self):
        ref = lorenz_fixed_point(LorenzParams(gamma1=1.5, gamma2=-1.5), which=1)
        assert ref.u_hat == pytest.approx(np.sqrt(222.0))
        assert ref.z_hat == pytest.approx(37.0)

    def test_fixed_point_negative_detuning(self):
        ref = lorenz_fixed_point(LorenzParams(gamma1=1.5, gamma2=-1.5), which=2)
        assert ref.u_hat == pytest.approx(np.sqrt(204.0))
        assert ref.z_hat == pytest.approx(34.0)

    def test_degenerate_detuning_rejected(self):
        with pytest.raises(ValueError):
            LorenzParams(gamma1=-35.5, gamma2=0.0)

    def test_axis_cases(self):
        ref = lorenz_fixed_point(LorenzParams(), which=1)
        # u = u_hat + 1 along the x axis: pick x = u_hat + 1, y = 0
        assert phase_lorenz(ref.u_hat + 1.0, 0.0, ref.z_hat, ref) == \
            pytest.approx(0.0)
        assert phase_lorenz(ref.u_hat, 0.0, ref.z_hat + 1.0, ref) == \
            pytest.approx(PI / 2)

    def test_against_independent_arctangent(self):
        ref = lorenz_fixed_point(LorenzParams(), which=1)
        rng = np.random.default_rng(3)
        for _ in range(25):
            x, y = rng.normal(0, 12, size=2)
            z = rng.uniform(5, 60)
            u = np.hypot(x, y)
            expected = np.arctan2(z - ref.z_hat, u - ref.u_hat) % (2 * PI)
            assert phase_lorenz(x, y, z, ref) == pytest.approx(expected)

    def test_reference_point_rejected(self):
        ref = lorenz_fixed_point(LorenzParams(), which=1)
        with pytest.raises(UndefinedPhaseError):
            phase_lorenz(ref.u_hat, 0.0, ref.z_hat, ref)


class TestRingTransform:
    def test_zero_rotation_identity(self):
        assert ring_transform(1.3, -0.7, 0.0) == (1.3, -0.7)

    def test_quarter_rotation(self):
        xh, yh = ring_transform(1.0, 0.0, PI / 2)
        assert xh == pytest.approx(0.0, abs=1e-15)
        assert yh == pytest.approx(-1.0)

    @settings(max_examples=50)
    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
    def test_isometry(self, x, y, phi):
        xh, yh = ring_transform(x, y, phi)
        assert np.hypot(xh, yh) == pytest.approx(np.hypot(x, y), abs=1e-9)

    def test_inverse(self):
        xh, yh = ring_transform(0.4, 2.2, 1.1)
        back = ring_transform(xh, yh, -1.1)
        assert back[0] == pytest.approx(0.4) and back[1] == pytest.approx(2.2)


def tone(freq_hz, dt, n, phase=0.0):
    t = np.arange(n) * dt
    return np.cos(2 * PI * freq_hz * t + phase)


class TestBandpass:
    DT = 1e-4  # 10 kHz, the rate used for the neuron voltages

    def test_midband_tone_passes(self):
        # single-pass |H| at 50 Hz squared by the forward-backward pass;
        # tolerance window from the analytic response of the 4th-order
        # Butterworth design
        x = PhaseSeries(tone(50.0, self.DT, 200_000), self.DT, RAW)
        out = bandpass(x, 30.0, 80.0).samples
        mid = out[50_000:150_000]
        amp = np.max(np.abs(mid))
        assert 0.89 <= amp <= 1.12

    def test_stopband_tone_attenuated(self):
        x = PhaseSeries(tone(10.0, self.DT, 200_000), self.DT, RAW)
        out = bandpass(x, 30.0, 80.0).samples
        assert np.max(np.abs(out[50_000:150_000])) <= 0.1

    def test_dc_killed(self):
        x = PhaseSeries(np.ones(100_000), self.DT, RAW)
        out = bandpass(x, 30.0, 80.0).samples
        assert np.max(np.abs(out[20_000:80_000])) <= 1e-3

    def test_linearity(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=20_000)
        b = rng.normal(size=20_000)
        fa = bandpass(PhaseSeries(a, self.DT, RAW), 30.0, 80.0).samples
        fb = bandpass(PhaseSeries(b, self.DT, RAW), 30.0, 80.0).samples
        fab = bandpass(PhaseSeries(a + b, self.DT, RAW), 30.0, 80.0).samples
        scale = np.max(np.abs(fab))
        assert np.max(np.abs(fab - fa - fb)) / scale < 1e-10

    def test_zero_phase(self):
        # cross-correlation of a mid-band tone with its filtered copy must
        # peak at zero lag
        x = tone(55.0, self.DT, 100_000)
        out = bandpass(PhaseSeries(x, self.DT, RAW), 30.0, 80.0).samples
        seg = slice(30_000, 70_000)
        lags = np.arange(-20, 21)
        corr = [np.dot(x[seg.start + l:seg.stop + l], out[seg]) for l in lags]
        assert lags[int(np.argmax(corr))] == 0

    def test_band_validation(self):
        x = PhaseSeries(np.zeros(1000), self.DT, RAW)
        with pytest.raises(ValueError):
            bandpass(x, 80.0, 30.0)
        with pytest.raises(ValueError):
            bandpass(x, 30.0, 6000.0)

    def test_coeff_dump(self, tmp_path):
        path = tmp_path / "sos.csv"
        sos = bandpass_coeffs_csv(path, 30.0, 80.0, 1e4)
        loaded = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(loaded, sos)


def hilbert_convolution_oracle(x, half_width):
    """Independent Hilbert transform: convolution with the Blackman-windowed
    odd-tap kernel h[n] = 2/(pi n) for odd n, 0 otherwise."""
    n = np.arange(-half_width, half_width + 1)
    h = np.zeros(n.size)
    odd = n % 2 != 0
    h[odd] = 2.0 / (PI * n[odd])
    h *= np.blackman(n.size)
    return sps.fftconvolve(x, h, mode="same")


class TestAnalyticSignal:
    DT = 0.01

    def test_cosine_phase_and_amplitude(self):
        omega = 2 * PI * 1.3
        t = np.arange(16384) * self.DT
        series = PhaseSeries(np.cos(omega * t), self.DT, RAW)
        a = analytic_signal(series)
        phase = instantaneous_phase(a)
        n_edge = a.n_edge
        expected = wrap_angle(omega * t[n_edge:t.size - n_edge])
        err = np.angle(np.exp(1j * (phase.samples - expected)))
        assert np.max(np.abs(err)) < 0.02
        amp = a.amplitude()[n_edge:t.size - n_edge]
        assert np.all(np.abs(amp - 1.0) < 0.02)

    def test_sine_is_quadrature_shifted(self):
        omega = 2 * PI * 0.9
        t = np.arange(16384) * self.DT
        series = PhaseSeries(np.sin(omega * t), self.DT, RAW)
        phase = instantaneous_phase(analytic_signal(series))
        n_edge = analytic_signal(series).n_edge
        expected = wrap_angle(omega * t[n_edge:t.size - n_edge] - PI / 2)
        err = np.angle(np.exp(1j * (phase.samples - expected)))
        assert np.max(np.abs(err)) < 0.02

    def test_real_part_preserved(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=2048)
        series = PhaseSeries(x, self.DT, RAW)
        a = analytic_signal(series)
        assert np.allclose(a.real, x - x.mean(), atol=1e-10)

    def test_two_tone_against_convolution_oracle(self):
        t = np.arange(16384) * self.DT
        x = np.cos(2 * PI * 1.1 * t) + 0.5 * np.cos(2 * PI * 2.3 * t + 0.7)
        series = PhaseSeries(x, self.DT, RAW)
        a = analytic_signal(series)
        imag_oracle = hilbert_convolution_oracle(x - x.mean(), half_width=2000)
        core = slice(6000, 10000)
        phase_fft = np.arctan2(a.imag[core], a.real[core])
        phase_conv = np.arctan2(imag_oracle[core], (x - x.mean())[core])
        err = np.angle(np.exp(1j * (phase_fft - phase_conv)))
        assert np.max(np.abs(err)) < 1e-3

    def test_modulated_tone_against_oracle(self):
        rng = np.random.default_rng(5)
        t = np.arange(16384) * self.DT
        am = 1.0 + 0.3 * np.cos(2 * PI * 0.07 * t + rng.uniform(0, PI))
        x = am * np.cos(2 * PI * 1.7 * t + rng.uniform(0, PI))
        a = analytic_signal(PhaseSeries(x, self.DT, RAW))
        imag_oracle = hilbert_convolution_oracle(x - x.mean(), half_width=2000)
        core = slice(6000, 10000)
        phase_fft = np.arctan2(a.imag[core], a.real[core])
        phase_conv = np.arctan2(imag_oracle[core], (x - x.mean())[core])
        err = np.angle(np.exp(1j * (phase_fft - phase_conv)))
        assert np.max(np.abs(err)) < 1e-3

    def test_short_input_rejected(self):
        with pytest.raises(ValueError):
            analytic_signal(PhaseSeries(np.zeros(32), 0.1, RAW))

    def test_edge_discard_bounds(self):
        with pytest.raises(ValueError):
            AnalyticSeries(np.zeros(10), np.zeros(10), 0.1, edge_discard=0.3)


class TestInstantaneousPhase:
    def test_quadrature_pair_is_ramp(self):
        omega = 0.3
        t = np.arange(1000) * 0.1
        a = AnalyticSeries(np.cos(omega * t), np.sin(omega * t), 0.1,
                           edge_discard=0.0)
        phase = instantaneous_phase(a)
        assert np.allclose(phase.samples, wrap_angle(omega * t), atol=1e-9)

    def test_constant_real_is_zero(self):
        a = AnalyticSeries(np.ones(100), np.zeros(100), 0.1, edge_discard=0.0)
        assert np.allclose(instantaneous_phase(a).samples, 0.0)

    def test_zero_amplitude_rejected(self):
        real = np.ones(100)
        real[40] = 0.0
        a = AnalyticSeries(real, np.zeros(100), 0.1, edge_discard=0.0)
        with pytest.raises(UndefinedPhaseError) as exc:
            instantaneous_phase(a)
        assert exc.value.index == 40


class TestPipelineHelper:
    def test_tone_recovers_frequency(self):
        dt = 1e-4
        x = tone(55.0, dt, 400_000)
        phase = hilbert_phase_pipeline(x, dt, 30.0, 80.0, decimate=10)
        lifted = np.unwrap(phase.samples)
        slope = np.polyfit(np.arange(lifted.size) * phase.dt, lifted, 1)[0]
        assert slope == pytest.approx(2 * PI * 55.0, rel=1e-3)
