"""Reflection positivity: quotient constructions on finite and truncated models."""
from .errors import ReflectionError
from .osr import (
    CompressedSystem,
    OsrRealization,
    ReflectionSystem,
    compress,
    intertwiner,
    osr_construct,
    validate_system,
)

__version__ = "0.1.0"

__all__ = [
    "CompressedSystem",
    "OsrRealization",
    "ReflectionError",
    "ReflectionSystem",
    "compress",
    "intertwiner",
    "osr_construct",
    "validate_system",
]
