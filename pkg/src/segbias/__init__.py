"""Subword segmentation toolkit with gender-bias diagnostics."""

__version__ = "0.1.0"
