"""
flowgame - referee, strategies and certificates for the Mathematician-vs-Adversary
weight/flow game on binary trees.
"""

__version__ = "0.1.0"
