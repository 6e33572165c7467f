"""Optimal partitioning of multi-zone building thermal networks for decentralized MPC."""

__version__ = "0.1.0"
