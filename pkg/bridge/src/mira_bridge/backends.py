"""Model backends: one adapter per supported checkpoint family.

Each backend declares its input rate and windowing, and maps a mono
waveform to either frame embeddings (clap, defnet) or label probabilities
(passt). ML runtimes are imported lazily so the bridge installs and fails
cleanly on machines without them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np


class BridgeModelError(Exception):
    """Model runtime or checkpoint could not be loaded."""


class ModelBackend(Protocol):
    model_id: str
    target_rate: int
    window_s: float
    hop_s: float
    emits: str  # "embeddings" | "probs"

    def process(self, samples: np.ndarray) -> np.ndarray:
        """Mono float32 at target_rate -> (frames, D) embeddings or (N, K) probabilities."""
        ...


def _windows(samples: np.ndarray, rate: int, window_s: float, hop_s: float) -> list[np.ndarray]:
    size = int(window_s * rate)
    hop = int(hop_s * rate)
    if len(samples) <= size:
        return [np.pad(samples, (0, size - len(samples)))]
    return [samples[start : start + size] for start in range(0, len(samples) - size + 1, hop)]


@dataclass
class ClapBackend:
    """LAION-CLAP music checkpoint; one 512-D embedding per 10 s window."""

    checkpoint: str
    model_id: str = "clap"
    target_rate: int = 48000
    window_s: float = 10.0
    hop_s: float = 10.0
    emits: str = "embeddings"
    _model: object = field(default=None, repr=False)

    def _load(self):
        if self._model is None:
            try:
                import laion_clap
            except ImportError as exc:
                raise BridgeModelError(
                    "clap backend needs the laion_clap package (pip install laion_clap torch)"
                ) from exc
            try:
                model = laion_clap.CLAP_Module(enable_fusion=False, amodel="HTSAT-base")
                model.load_ckpt(self.checkpoint)
            except Exception as exc:
                raise BridgeModelError(f"cannot load CLAP checkpoint {self.checkpoint!r}: {exc}") from exc
            self._model = model
        return self._model

    def process(self, samples: np.ndarray) -> np.ndarray:
        model = self._load()
        chunks = np.stack(_windows(samples, self.target_rate, self.window_s, self.hop_s))
        emb = model.get_audio_embedding_from_data(x=chunks, use_tensor=False)
        return np.asarray(emb, dtype=np.float32)


@dataclass
class DefnetBackend:
    """Essentia Discogs-EffNet track embeddings at 16 kHz."""

    checkpoint: str
    model_id: str = "defnet"
    target_rate: int = 16000
    window_s: float = 0.0  # essentia handles patching internally
    hop_s: float = 0.0
    emits: str = "embeddings"
    _predict: Callable | None = field(default=None, repr=False)

    def _load(self):
        if self._predict is None:
            try:
                from essentia.standard import TensorflowPredictEffnetDiscogs
            except ImportError as exc:
                raise BridgeModelError(
                    "defnet backend needs essentia-tensorflow (pip install essentia-tensorflow)"
                ) from exc
            try:
                self._predict = TensorflowPredictEffnetDiscogs(
                    graphFilename=self.checkpoint, output="PartitionedCall:1"
                )
            except Exception as exc:
                raise BridgeModelError(f"cannot load Discogs-EffNet graph {self.checkpoint!r}: {exc}") from exc
        return self._predict

    def process(self, samples: np.ndarray) -> np.ndarray:
        predict = self._load()
        return np.asarray(predict(samples.astype(np.float32)), dtype=np.float32)


@dataclass
class PasstBackend:
    """PaSST Audioset classifier; softmax label probabilities per track."""

    checkpoint: str
    model_id: str = "passt"
    target_rate: int = 32000
    window_s: float = 10.0
    hop_s: float = 10.0
    emits: str = "probs"
    _model: object = field(default=None, repr=False)

    def _load(self):
        if self._model is None:
            try:
                import torch
                from hear21passt.base import get_basic_model
            except ImportError as exc:
                raise BridgeModelError(
                    "passt backend needs hear21passt and torch (pip install hear21passt torch)"
                ) from exc
            try:
                model = get_basic_model(mode="logits")
                if self.checkpoint:
                    state = torch.load(self.checkpoint, map_location="cpu")
                    model.load_state_dict(state)
                model.eval()
            except Exception as exc:
                raise BridgeModelError(f"cannot load PaSST checkpoint {self.checkpoint!r}: {exc}") from exc
            self._model = model
        return self._model

    def process(self, samples: np.ndarray) -> np.ndarray:
        import torch

        model = self._load()
        chunks = np.stack(_windows(samples, self.target_rate, self.window_s, self.hop_s))
        with torch.no_grad():
            logits = model(torch.from_numpy(chunks))
            probs = torch.softmax(logits, dim=-1).mean(dim=0, keepdim=True)
        return probs.numpy().astype(np.float32)


BACKENDS: dict[str, Callable[[str], ModelBackend]] = {
    "clap": ClapBackend,
    "defnet": DefnetBackend,
    "passt": PasstBackend,
}


def resolve_backend(model: str, checkpoint: str) -> ModelBackend:
    factory = BACKENDS.get(model)
    if factory is None:
        raise BridgeModelError(f"unknown model {model!r}; known: {sorted(BACKENDS)}")
    return factory(checkpoint)
