"""Certify ball rigidity of bodies of revolution in R^4 from constant
tangent-section area, via continued fractions of the rotation number."""

__version__ = "0.1.0"
