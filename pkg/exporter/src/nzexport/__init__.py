"""Neumann-Zagier data exporter: census triangulations to NZ-datum JSON."""

__version__ = "0.1.0"
