"""Perceive, imagine, act: a simulation-driven agent for a slingshot physics game."""

__version__ = "0.1.0"
