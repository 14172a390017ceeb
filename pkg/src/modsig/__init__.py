"""Significance of network modularity under the free-labeling null model."""

__version__ = "0.1.0"
