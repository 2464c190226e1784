"""Optical Layered Encryption - Robot Framework Libraries"""

__version__ = "0.1.0"

from .OnionEncryptionLibrary import OnionEncryptionLibrary

__all__ = [
    "OnionEncryptionLibrary",
]
