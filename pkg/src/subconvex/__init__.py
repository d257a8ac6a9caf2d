"""Numerical laboratory for subconvex L^p-sets: moments of exponential sums,
restricted Weyl sums, equidistribution and restricted arithmetic averages."""

__version__ = "0.1.0"
