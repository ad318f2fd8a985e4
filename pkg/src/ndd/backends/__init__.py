"""Masked-LM backends: the abstract interface, deterministic toy oracles,
and the ONNX bundle backend."""

from .base import MlmBackend
from .embedded_corpus import embedded_corpus, embedded_vocabulary
from .onnx_backend import OnnxBackend, check_parity, load_bundle, verify_parity
from .toy import NgramOracle, UniformOracle

__all__ = [
    "MlmBackend",
    "NgramOracle",
    "UniformOracle",
    "OnnxBackend",
    "load_bundle",
    "check_parity",
    "verify_parity",
    "embedded_corpus",
    "embedded_vocabulary",
]
