"""Exact workbench for W3 conformal blocks at c=2, sl3 webs and triple-dimer probabilities."""

__version__ = "0.1.0"
