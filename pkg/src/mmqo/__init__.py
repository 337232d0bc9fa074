"""Multimode continuous-variable quantum optics toolkit."""

from . import channels, decomp, detection, gaussian, metrology, modal, nongauss, sources
from .errors import MmqoError

__all__ = [
    "modal",
    "gaussian",
    "decomp",
    "sources",
    "channels",
    "detection",
    "nongauss",
    "metrology",
    "MmqoError",
]

__version__ = "0.1.0"
