"""Transverse and temporal correlation structure of SPDC photon pairs."""

__version__ = "0.1.0"
