# src/__init__.py

"""
privgmm - Source Package

Differentially private Gaussian mixture estimation: subsample-and-aggregate
estimation with a private agreement test, mixture masking, calibration
formulas, and Monte-Carlo audits.
"""

__version__ = "1.0.0"
