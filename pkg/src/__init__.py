"""Extreme-value statistics of interval-map orbits with Cantor-set observables"""

__version__ = "1.0.0"
