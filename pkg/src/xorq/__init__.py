"""Quantum XOR games: generators, bias heuristics, and SDP relaxations."""

__version__ = "0.1.0"
