"""mclift: exact-arithmetic homological algebra over Q.

Subpackages cover sparse rational linear algebra, dg modules with
Maurer-Cartan twists, planar-tree combinatorics, asymmetric and circular
operads, Hochschild / cyclic complexes with braces and the periodicity
operator, weight-filtered (quantum/classical) objects, an order-by-order
obstruction-theoretic lifting solver, and Cech complexes of finite
covers.  See README.md for the command-line frontend.
"""

__version__ = "0.1.0"
