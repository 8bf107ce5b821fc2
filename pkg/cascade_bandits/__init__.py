"""Cascading bandits with linear generalization: simulator, policies and experiment harness."""

__version__ = "0.1.0"
