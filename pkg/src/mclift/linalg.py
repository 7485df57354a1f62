"""Exact sparse linear algebra over the rationals.

Everything downstream (homology dimensions, kernels, obstruction solves)
reduces to the routines in this file.  All arithmetic uses
``fractions.Fraction``; there is no floating point anywhere and no
tolerance in any comparison.

Matrices are sparse, row-major: ``entries[(i, j)]`` holds the nonzero
entry in row i, column j.  Zero entries are never stored.  Matrices act
on column vectors (sparse dicts index -> Fraction), and composition is
ordinary matrix product, so for differentials d_out . d_in means
"apply d_in first".
"""

from fractions import Fraction

Q0 = Fraction(0)
Q1 = Fraction(1)


def parity_sign(k):
    """(-1)^k for any integer k, exactly: negative exponents of a Python
    int produce floats, which must never touch these computations."""
    return -1 if k % 2 else 1


def qf(x):
    """Coerce ints / 'p/q' strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class QMatrix:
    """Immutable sparse matrix over Q."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        assert rows >= 0 and cols >= 0
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (i, j), v in entries.items():
                v = qf(v)
                if v != 0:
                    assert 0 <= i < rows and 0 <= j < cols, (i, j, rows, cols)
                    ent[(i, j)] = v
        self.entries = ent

    @classmethod
    def from_rows(cls, row_lists):
        rows = len(row_lists)
        cols = len(row_lists[0]) if rows else 0
        ent = {}
        for i, row in enumerate(row_lists):
            assert len(row) == cols
            for j, v in enumerate(row):
                v = qf(v)
                if v != 0:
                    ent[(i, j)] = v
        return cls(rows, cols, ent)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Q1 for i in range(n)})

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return "QMatrix(%d, %d, %d nonzero)" % (self.rows, self.cols, len(self.entries))

    def is_zero(self):
        return not self.entries

    def get(self, i, j):
        return self.entries.get((i, j), Q0)

    def to_rows(self):
        return [[self.get(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def transpose(self):
        return QMatrix(self.cols, self.rows,
                       {(j, i): v for (i, j), v in self.entries.items()})

    def __add__(self, other):
        assert (self.rows, self.cols) == (other.rows, other.cols)
        ent = dict(self.entries)
        for k, v in other.entries.items():
            w = ent.get(k, Q0) + v
            if w == 0:
                ent.pop(k, None)
            else:
                ent[k] = w
        return QMatrix(self.rows, self.cols, ent)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = qf(c)
        if c == 0:
            return QMatrix.zero(self.rows, self.cols)
        return QMatrix(self.rows, self.cols,
                       {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other):
        assert self.cols == other.rows, (self.cols, other.rows)
        by_row = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        acc = {}
        for (i, k), u in self.entries.items():
            for j, v in by_row.get(k, ()):
                key = (i, j)
                w = acc.get(key, Q0) + u * v
                if w == 0:
                    acc.pop(key, None)
                else:
                    acc[key] = w
        return QMatrix(self.rows, other.cols, acc)

    def apply(self, vec):
        """Matrix times sparse column vector (dict index -> Fraction)."""
        by_col = {}
        for (i, j), v in self.entries.items():
            by_col.setdefault(j, []).append((i, v))
        out = {}
        for j, x in vec.items():
            if x == 0:
                continue
            assert 0 <= j < self.cols
            for i, v in by_col.get(j, ()):
                w = out.get(i, Q0) + v * x
                if w == 0:
                    out.pop(i, None)
                else:
                    out[i] = w
        return out

    def column(self, j):
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def stack_blocks(blocks, row_dims, col_dims):
        """Assemble a block matrix.  blocks: dict (bi, bj) -> QMatrix."""
        roff = [0]
        for r in row_dims:
            roff.append(roff[-1] + r)
        coff = [0]
        for c in col_dims:
            coff.append(coff[-1] + c)
        ent = {}
        for (bi, bj), M in blocks.items():
            assert M.rows == row_dims[bi] and M.cols == col_dims[bj]
            for (i, j), v in M.entries.items():
                ent[(roff[bi] + i, coff[bj] + j)] = v
        return QMatrix(roff[-1], coff[-1], ent)

    stack_blocks = staticmethod(stack_blocks)


def _pick_pivot(rows_in_col):
    """Deterministic pivot: smallest |numerator|, then row index.

    rows_in_col: list of (row_index, value) with value != 0.
    """
    return min(rows_in_col, key=lambda t: (abs(t[1].numerator), t[0]))[0]


def rref(M):
    """Reduced row echelon form.

    Returns (R, pivots, rank).  Row space is preserved; pivot entries are
    1 and are the only nonzero entries in their columns.  The pivot rule
    (first nonzero column, smallest-|numerator| entry, then lowest row)
    makes the output deterministic.
    """
    rows = [dict() for _ in range(M.rows)]
    for (i, j), v in M.entries.items():
        rows[i][j] = v
    pivots = []
    r = 0
    for c in range(M.cols):
        cand = [(i, rows[i].get(c, Q0)) for i in range(r, M.rows) if rows[i].get(c, Q0) != 0]
        if not cand:
            continue
        p = _pick_pivot(cand)
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = {j: v / pv for j, v in rows[r].items()}
        for i in range(M.rows):
            if i == r:
                continue
            f = rows[i].get(c, Q0)
            if f == 0:
                continue
            ri = rows[i]
            for j, v in rows[r].items():
                w = ri.get(j, Q0) - f * v
                if w == 0:
                    ri.pop(j, None)
                else:
                    ri[j] = w
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    ent = {}
    for i, row in enumerate(rows):
        for j, v in row.items():
            if v != 0:
                ent[(i, j)] = v
    return QMatrix(M.rows, M.cols, ent), pivots, len(pivots)


def rank(M):
    return rref(M)[2]


class Subspace:
    """A subspace of Q^n given by a list of sparse basis vectors."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient, basis):
        self.ambient = ambient
        self.basis = list(basis)

    @property
    def dim(self):
        return len(self.basis)

    def basis_matrix(self):
        """Columns are the basis vectors."""
        ent = {}
        for j, vec in enumerate(self.basis):
            for i, v in vec.items():
                ent[(i, j)] = v
        return QMatrix(self.ambient, len(self.basis), ent)

    def check_independent(self):
        return rank(self.basis_matrix()) == len(self.basis)


def kernel_basis(M):
    """Basis of ker(M) as a Subspace of Q^cols.

    Standard back-substitution from rref: one basis vector per free
    column, with entry 1 at the free column.
    """
    R, pivots, rk = rref(M)
    pivot_set = set(pivots)
    free = [j for j in range(M.cols) if j not in pivot_set]
    basis = []
    for f in free:
        vec = {f: Q1}
        for r, c in enumerate(pivots):
            v = R.get(r, f)
            if v != 0:
                vec[c] = -v
        basis.append(vec)
    return Subspace(M.cols, basis)


def solve(M, b):
    """One solution x of M x = b, or None if inconsistent.

    b is a sparse dict over range(M.rows).  The returned solution is the
    one with zeros in all free columns (deterministic given the pivot
    rule).
    """
    for i in b:
        if not (0 <= i < M.rows):
            raise ValueError("rhs index %r out of range for %d rows" % (i, M.rows))
    aug = QMatrix(M.rows, M.cols + 1, dict(M.entries))
    ent = dict(M.entries)
    for i, v in b.items():
        if v != 0:
            ent[(i, M.cols)] = qf(v)
    aug = QMatrix(M.rows, M.cols + 1, ent)
    R, pivots, rk = rref(aug)
    if M.cols in pivots:
        return None
    x = {}
    for r, c in enumerate(pivots):
        v = R.get(r, M.cols)
        if v != 0:
            x[c] = v
    return x


def homology_dim(d_in, d_out):
    """dim ker(d_out) - rank(d_in) for a two-step complex.

    d_in : C^{n-1} -> C^n and d_out : C^n -> C^{n+1}; requires
    d_out . d_in = 0 and raises if the composite is nonzero, since that
    means a differential upstream is broken.
    """
    assert d_in.rows == d_out.cols, (d_in.rows, d_out.cols)
    comp = d_out @ d_in
    if not comp.is_zero():
        raise ValueError("composite differential is nonzero: not a complex")
    return (d_out.cols - rank(d_out)) - rank(d_in)


def image_contains(M, b):
    """Is b in the column space of M?"""
    return solve(M, b) is not None


def vec_add(u, v, c=Q1):
    """u + c*v for sparse vectors."""
    out = dict(u)
    for i, x in v.items():
        w = out.get(i, Q0) + c * x
        if w == 0:
            out.pop(i, None)
        else:
            out[i] = w
    return out


def vec_scale(u, c):
    c = qf(c)
    if c == 0:
        return {}
    return {i: c * x for i, x in u.items()}


def vec_eq(u, v):
    return {i: x for i, x in u.items() if x != 0} == {i: x for i, x in v.items() if x != 0}
