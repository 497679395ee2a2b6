"""Simulation and Monte-Carlo verification toolkit for extreme events of
first-order Markov chains: transition kernels, norming schemes, tail chains,
hidden tail chains, and convergence diagnostics.
"""

__version__ = "0.1.0"
