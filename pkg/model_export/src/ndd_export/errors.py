"""Failure taxonomy for bundle export, one class per CLI exit code."""


class ExportError(Exception):
    """Base class for every export failure."""


class ConfigError(ExportError):
    """Invalid invocation: bad probe set, bad probes file, bad tolerance."""


class CheckpointError(ExportError):
    """The checkpoint cannot be loaded or lacks a required piece."""


class GraphError(ExportError):
    """Graph emission failed or the model outputs violate the bundle contract."""
