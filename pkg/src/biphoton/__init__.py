"""Single-photon and entangled two-photon interferometry simulator."""

__version__ = "0.1.0"
