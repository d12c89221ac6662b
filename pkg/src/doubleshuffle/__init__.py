"""Exact-arithmetic workbench for double shuffle relations.

Subpackages are organized by algebraic layer:

- ``ncalg``: truncated noncommutative power series over exact rationals
- ``dr_side``: harmonic coproducts on the graded (de Rham) objects
- ``betti_side``: group-algebra (Betti) objects, Magnus expansion, filtrations
- ``braids``: braid/moduli machinery, matrix morphisms, diagram checkers
- ``dmr``: group laws, membership tests, the truncated associator solver
- ``mzv``: numerical multizeta evaluation with certified error bounds
- ``cli``: batch command-line surface
"""

__version__ = "0.1.0"
