"""Simulation and benchmarking toolkit for geared series-compliant drives."""

__version__ = "0.1.0"
