"""Seed-reproducible simulator of the single-photon Sagnac interferometer."""

from . import analysis, core_optics, detector_model, experiment, source_model
from .cli import main

__all__ = [
    "analysis",
    "core_optics",
    "detector_model",
    "experiment",
    "main",
    "source_model",
]
