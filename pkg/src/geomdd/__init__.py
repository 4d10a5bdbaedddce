"""Geometric quantum gates for SiV centers with dynamical-decoupling protection."""

__version__ = "0.1.0"
