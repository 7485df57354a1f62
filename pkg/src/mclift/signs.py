"""Sign conventions, fixed in one place and versioned.

The literature offers several mutually incompatible sign tables for
braces, the cyclic rotation, and the Connes boundary; what matters for
an exact engine is internal consistency, which the test suite asserts
as properties (b^2 = 0, B^2 = 0, bB + Bb = 0, pre-Lie, Jacobi, d^2 = 0
of the free presentation calculus).  Reports emitted by the CLI embed
SIGN_TABLE_VERSION so golden files are pinned to these choices.

Two insertion conventions coexist, related by the factor
(-1)^{q(p+1)} when a q-slot operation enters a p-slot one:

* ``gerstenhaber_sign`` (and the multi-argument ``brace_sign``): the
  classical convention, used by the brace / Gerstenhaber-bracket
  operations.  Single insertion of g (level q) at slot i of f (level p)
  carries (-1)^{(i-1)(q-1)}.

* ``mc_insertion_sign``: the (-1)^{r+st} convention (r = i-1, s = q,
  t = p-i), used by the Maurer-Cartan machinery: the quadratic
  differential of the free operad presentation, the curved-structure
  checker, and the lifting solver all expand through this table, which
  is what makes their outputs mutually consistent.  In this convention
  m{f} + f{m} = -b(f) on the nose, for every level of f.

The cyclic (trace) sector: insertions into the s-slot trace generator
use the same (-1)^{r+st} table (``mc_cyclic_sign``), and the trace
vertex contributes one extra suspension to Leibniz prefixes
(QuasiFreePresentation.MU_PREFIX_SHIFT = 1).  This pair was pinned by
an exhaustive search over affine sign ansatzes: it is one of exactly
four tables making d^2 = 0 hold for the curved presentation through
arity 6 (the other three are global regrades of it), and the only one
whose cyclic table coincides with the noncyclic one.  Slot rotations of
the trace generator act without an extra character: the differential
calculus runs on plain slot tuples, and rotation-invariance is imposed
where maps into concrete operads are checked.
"""

SIGN_TABLE_VERSION = "mclift-signs-1"


def mc_insertion_sign(p, q, i):
    """Insert a q-ary operation at slot i (1-based) of a p-ary one."""
    return -1 if ((i - 1) + q * (p - i)) % 2 else 1


def mc_cyclic_sign(p, q, j):
    """Insert a q-ary operation at slot j (1-based) of the p-slot trace
    generator; same table as the noncyclic insertions."""
    return mc_insertion_sign(p, q, j)


def gerstenhaber_sign(p, q, i):
    return -1 if ((i - 1) * (q - 1)) % 2 else 1


def brace_sign(levels, final_positions):
    """Getzler sign for a multi-brace: product over inserted operations
    of (-1)^{(level_j - 1)(pos_j - 1)}, pos_j the 1-based position of the
    block of g_j in the final argument sequence."""
    e = 0
    for q, pos in zip(levels, final_positions):
        e += (q - 1) * (pos - 1)
    return -1 if e % 2 else 1


def lambda_sign(level):
    """Sign of the cyclic rotation on functionals with level+1 slots."""
    return -1 if level % 2 else 1


def shift_regrade(p, q):
    """(-1)^{q(p+1)}: the factor between the two insertion tables."""
    return -1 if (q * (p + 1)) % 2 else 1
