import wave

import numpy as np
import pytest


@pytest.fixture(scope="session")
def tiny_encoder(tmp_path_factory):
    """A small deterministic wav2vec2-style encoder saved to a local
    directory, so tests run without any network or model hub access."""
    import torch
    from transformers import Wav2Vec2Config, Wav2Vec2Model

    torch.manual_seed(0)
    config = Wav2Vec2Config(
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        conv_dim=(32, 32, 32, 32, 32, 32, 32),
        vocab_size=16,
    )
    model = Wav2Vec2Model(config)
    path = tmp_path_factory.mktemp("encoder") / "tiny"
    model.save_pretrained(path)
    return str(path)


def write_pcm16(path, samples: np.ndarray, rate: int = 16000):
    pcm = np.clip(samples, -1.0, 1.0)
    pcm = (np.sign(pcm) * np.floor(np.abs(pcm) * 32767 + 0.5)).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(pcm.tobytes())


@pytest.fixture
def tone_wav(tmp_path):
    def make(duration_s: float, rate: int = 16000, name: str = "in.wav"):
        t = np.arange(int(round(duration_s * rate))) / rate
        x = 0.5 * np.sin(2 * np.pi * 440.0 * t) + 0.2 * np.sin(2 * np.pi * 97.0 * t)
        path = tmp_path / name
        write_pcm16(path, x, rate)
        return path

    return make
