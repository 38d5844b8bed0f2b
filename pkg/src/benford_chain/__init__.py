"""Benford behaviour of finite-state Markov chains: spectral analysis, resonance
detection and digit statistics of P**n - P* and P**(n+1) - P**n."""

__version__ = "0.1.0"
