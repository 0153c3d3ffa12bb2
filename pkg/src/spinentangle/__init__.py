"""Entanglement dynamics of small qubit registers under Ising, XY and three-body couplings."""

__version__ = "0.1.0"
