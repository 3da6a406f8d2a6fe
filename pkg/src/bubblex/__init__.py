"""bubblex: exact space-preserving bubble decomposition of piecewise
polynomial differential forms on simplicial meshes."""

__version__ = "0.1.0"
