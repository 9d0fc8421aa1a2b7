"""Perturbative complex Chern-Simons invariants at level k from
Neumann-Zagier data, with the LLL arithmetic-recognition pipeline."""

__version__ = "0.1.0"
