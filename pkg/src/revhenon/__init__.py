"""Reversible Henon-like maps: orbits, symmetry breaking and invariant measures."""
