"""Closed non-CMC biconservative surfaces of the round 3-sphere."""
__version__ = "0.1.0"
