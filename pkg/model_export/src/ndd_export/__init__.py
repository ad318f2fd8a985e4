"""One-shot export of a masked-LM checkpoint into an inference bundle."""

from .errors import CheckpointError, ConfigError, ExportError, GraphError
from .export import (
    BUNDLE_CONFIG,
    BUNDLE_MANIFEST,
    BUNDLE_MODEL,
    BUNDLE_PARITY,
    BUNDLE_VOCAB,
    ExportManifest,
    compute_parity,
    export_bundle,
)
from .probes import DEFAULT_PROBES, MIN_PROBES, Probe, load_probes

__version__ = "0.1.0"

__all__ = [
    "BUNDLE_CONFIG",
    "BUNDLE_MANIFEST",
    "BUNDLE_MODEL",
    "BUNDLE_PARITY",
    "BUNDLE_VOCAB",
    "CheckpointError",
    "ConfigError",
    "DEFAULT_PROBES",
    "ExportError",
    "ExportManifest",
    "GraphError",
    "MIN_PROBES",
    "Probe",
    "compute_parity",
    "export_bundle",
    "load_probes",
]
