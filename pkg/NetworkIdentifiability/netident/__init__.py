"""
netident: identifiability of dynamical-network transfer functions from partial node measurements
"""

__version__ = "1.0.0"
