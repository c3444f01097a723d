import numpy as np
import pytest
from scipy.fft import idct

from essumm.audio_io import AudioBuffer
from essumm.errors import ConfigError, FormatError, ValidationError
from essumm.features import (
    FeatureMatrix,
    load_features,
    mfcc,
    slice_frames,
    store_features,
)
from essumm.segmenter import Segment

from conftest import tone


def test_frame_count_one_second_defaults():
    fm = mfcc(AudioBuffer(np.zeros(16000), 16000))
    assert fm.n_frames == (16000 - 400) // 160 + 1 == 98
    assert fm.dim == 13
    assert fm.frame_hop_s == 0.010
    assert fm.first_center_s == 0.0125


def test_constant_zero_input_gives_identical_frames():
    fm = mfcc(AudioBuffer(np.zeros(8000), 16000))
    np.testing.assert_array_equal(fm.frames, np.tile(fm.frames[0], (fm.n_frames, 1)))


def _oracle_filter_energies(frame: np.ndarray, n_mels: int, n_fft: int, rate: int):
    """Independent route: build the triangular filters point by point and
    apply them to the frame's FFT magnitude."""

    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    edges = [mel_to_hz(hz_to_mel(rate / 2) * i / (n_mels + 1)) for i in range(n_mels + 2)]
    mag = np.abs(np.fft.rfft(frame, n_fft))
    energies = []
    for m in range(n_mels):
        total = 0.0
        for b, a in enumerate(mag):
            f = b * rate / n_fft
            if edges[m] <= f <= edges[m + 1]:
                w = (f - edges[m]) / (edges[m + 1] - edges[m])
            elif edges[m + 1] < f <= edges[m + 2]:
                w = (edges[m + 2] - f) / (edges[m + 2] - edges[m + 1])
            else:
                w = 0.0
            total += w * a
        energies.append(total)
    return np.array(energies)


def test_pure_1khz_sine_peaks_in_covering_filter():
    buf = AudioBuffer(tone(0.5, freq_hz=1000.0, amplitude=0.8), 16000)
    # full DCT so the log energies can be recovered exactly from the output
    fm = mfcc(buf, n_coeffs=26, n_mels=26)
    log_energy = idct(fm.frames[5], type=2, norm="ortho")
    got = int(np.argmax(log_energy))

    x = buf.samples
    emphasized = np.concatenate(([x[0]], x[1:] - 0.97 * x[:-1]))
    frame = emphasized[5 * 160 : 5 * 160 + 400] * np.hamming(400)
    expected = int(np.argmax(_oracle_filter_energies(frame, 26, 512, 16000)))
    assert got == expected

    # and the winning filter's support really covers 1 kHz
    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + f / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (m / 2595.0) - 1.0)

    top = hz_to_mel(8000.0)
    left = mel_to_hz(top * got / 27)
    right = mel_to_hz(top * (got + 2) / 27)
    assert left < 1000.0 < right


def test_gain_covariance_of_higher_coefficients():
    rng = np.random.default_rng(5)
    buf = AudioBuffer(rng.uniform(-0.3, 0.3, 16000), 16000)
    doubled = AudioBuffer(buf.samples * 2.0, 16000)
    a = mfcc(buf)
    b = mfcc(doubled)
    np.testing.assert_allclose(a.frames[:, 1:], b.frames[:, 1:], rtol=0, atol=1e-9)
    # coefficient 0 shifts by sqrt(n_mels) * ln-gain under the orthonormal DCT
    np.testing.assert_allclose(
        b.frames[:, 0] - a.frames[:, 0], np.sqrt(26) * np.log(2.0), atol=1e-9
    )


def test_too_short_input_yields_empty_matrix():
    fm = mfcc(AudioBuffer(np.zeros(100), 16000))
    assert fm.n_frames == 0
    assert fm.dim == 13


def test_wrong_rate_rejected():
    with pytest.raises(ConfigError, match="16000"):
        mfcc(AudioBuffer(np.zeros(8000), 8000))


def test_esf1_header_and_sizes(tmp_path):
    fm = FeatureMatrix(np.zeros((0, 13), dtype=np.float32), 0.02, 0.01)
    path = tmp_path / "f.esf1"
    store_features(fm, path)
    raw = path.read_bytes()
    assert len(raw) == 37
    assert raw[:4] == b"ESF1"
    assert raw[4] == 1

    fm = FeatureMatrix(np.arange(6, dtype=np.float32).reshape(3, 2), 0.02, 0.01)
    store_features(fm, path)
    assert len(path.read_bytes()) == 37 + 3 * 2 * 4
    out = load_features(path)
    assert out.n_frames == 3 and out.dim == 2
    assert out.frame_hop_s == 0.02 and out.first_center_s == 0.01


def test_esf1_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(9)
    fm = FeatureMatrix(rng.normal(size=(50, 13)).astype(np.float32), 0.010, 0.0125)
    p1, p2 = tmp_path / "a.esf1", tmp_path / "b.esf1"
    store_features(fm, p1)
    loaded = load_features(p1)
    np.testing.assert_array_equal(loaded.frames, fm.frames)
    store_features(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_esf1_bad_magic(tmp_path):
    path = tmp_path / "bad.esf1"
    path.write_bytes(b"NOPE" + b"\x00" * 40)
    with pytest.raises(FormatError, match="magic"):
        load_features(path)


def test_esf1_truncated_payload(tmp_path):
    fm = FeatureMatrix(np.zeros((3, 2), dtype=np.float32), 0.02, 0.01)
    path = tmp_path / "t.esf1"
    store_features(fm, path)
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(FormatError, match="expected 24"):
        load_features(path)


def test_esf1_nonfinite_payload(tmp_path):
    fm = FeatureMatrix(np.zeros((2, 2), dtype=np.float32), 0.02, 0.01)
    path = tmp_path / "n.esf1"
    store_features(fm, path)
    raw = bytearray(path.read_bytes())
    raw[37 + 8 : 37 + 12] = np.array([np.inf], dtype="<f4").tobytes()
    path.write_bytes(bytes(raw))
    with pytest.raises(ValidationError, match="index 2"):
        load_features(path)


def test_slice_by_center_containment():
    fm = FeatureMatrix(np.arange(100, dtype=np.float64)[:, None], 0.02, 0.01)
    got = slice_frames(fm, Segment(0, 0.0, 0.1))
    np.testing.assert_array_equal(got.frames.ravel(), [0, 1, 2, 3, 4])
    assert got.first_center_s == pytest.approx(0.01)


def test_slice_beyond_audio_is_empty():
    fm = FeatureMatrix(np.zeros((10, 3)), 0.02, 0.01)
    got = slice_frames(fm, Segment(0, 5.0, 6.0))
    assert got.n_frames == 0
    assert got.dim == 3


def test_adjacent_segments_partition_frames():
    fm = FeatureMatrix(np.arange(100, dtype=np.float64)[:, None], 0.02, 0.01)
    a = slice_frames(fm, Segment(0, 0.0, 0.3))
    b = slice_frames(fm, Segment(1, 0.3, 0.8))
    ids = np.concatenate([a.frames.ravel(), b.frames.ravel()])
    np.testing.assert_array_equal(ids, np.arange(ids.size))
