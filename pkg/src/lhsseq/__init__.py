"""Exact mod-p cohomology of finite p-groups via spectral sequences.

The package computes the Lyndon-Hochschild-Serre spectral sequence of a
central extension of a finite abelian p-group by a cyclic p-group, with
exact F_p arithmetic throughout: the known d2/d3 differentials, the d4
differential (which needs Massey triple products), override-driven higher
differentials, and independent brute-force oracles that recompute every
page dimension from minimal free resolutions without using any of the
closed differential formulas.
"""

__version__ = "0.1.0"
