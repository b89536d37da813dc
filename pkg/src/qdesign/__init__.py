"""Mutually unbiased bases, SIC-POVMs and the finite geometries behind them."""

__version__ = "0.1.0"
