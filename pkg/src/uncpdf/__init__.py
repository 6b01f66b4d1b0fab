"""Probability densities of expectation values and uncertainties of observables
in Haar-random pure states, with Monte Carlo verification."""

__version__ = "0.1.0"
