"""Decide positive almost-sure termination of simple randomized linear loops."""

__version__ = "0.1.0"
