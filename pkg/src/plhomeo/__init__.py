"""Exact analysis of periodic piecewise-linear homeomorphisms.

Classifies periodic PL self-maps of the interval, line, circle, disc and
sphere up to topological conjugacy and constructs explicit PL conjugacies
to model isometries, verified with zero tolerance over the rationals.
"""

__version__ = "0.1.0"
