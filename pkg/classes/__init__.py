"""Library package for the half-line oscillator spectral toolkit."""
