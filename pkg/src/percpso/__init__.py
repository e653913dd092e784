"""Particle swarm optimization on radius-limited geometric neighborhoods."""

__version__ = "0.1.0"
