"""
gramslice - Certified sparse sensor and actuator schedules.

A library and CLI that picks a sparse, time-varying set of sensors and
actuators for a discrete-time linear system while keeping its Gramians and
Hankel singular values within a provable e^{±ε} factor of the full system.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("gramslice")
except PackageNotFoundError:
    # Fallback for local source execution without installed metadata.
    __version__ = "0.1.0"

__all__ = ["__version__"]
