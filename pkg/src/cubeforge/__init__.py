"""Cube-attack toolkit for Trivium: degree bounds, ISoC search, superpoly
recovery and the correlation cube attack."""
__version__ = "0.1.0"
