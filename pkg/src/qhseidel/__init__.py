"""Exact quantum homology over Z/2 Novikov rings and Seidel-element calculus."""

__version__ = "0.1.0"
