import numpy as np
import pytest

from essumm.audio_io import AudioBuffer, write_wav

RATE = 16000


def tone(duration_s: float, freq_hz: float = 440.0, amplitude: float = 0.5,
         rate: int = RATE) -> np.ndarray:
    t = np.arange(int(round(duration_s * rate))) / rate
    return amplitude * np.sin(2.0 * np.pi * freq_hz * t)


def silence(duration_s: float, rate: int = RATE) -> np.ndarray:
    return np.zeros(int(round(duration_s * rate)))


def bursts(*spans: tuple[str, float], rate: int = RATE) -> AudioBuffer:
    """Build a buffer from ('tone', dur) / ('silence', dur) spans."""
    parts = []
    for kind, dur in spans:
        parts.append(tone(dur, rate=rate) if kind == "tone" else silence(dur, rate=rate))
    return AudioBuffer(np.concatenate(parts), rate)


@pytest.fixture
def wav_file(tmp_path):
    def make(buf: AudioBuffer, name: str = "in.wav"):
        path = tmp_path / name
        write_wav(buf, path)
        return path

    return make
