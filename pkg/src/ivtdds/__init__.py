"""Integral Value Transformations, affine dynamics over them, and the
scheduling topology they induce."""

__version__ = "0.1.0"
