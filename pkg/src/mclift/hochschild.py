"""Finite-dimensional associative algebras, Hochschild cochains, braces,
and the curved Maurer-Cartan checker.

An algebra is given by structure constants c[i][j] = coefficient vector
of e_i e_j; associativity and the two-sided unit law are verified on
construction.  Cochains are sparse coefficient tensors; a level-n
cochain f stores values[(out, args)] with args an n-tuple of basis
indices, meaning f(e_{args}) = sum values * e_out.

The JSON file format (bit-exact, rationals as "p/q" strings):

    {"dim": n, "unit": [...], "mult": [[...row-major c_ij...]],
     "trace": [...]}        # trace optional

mult[i][j] is the list of coefficients of e_i e_j.
"""

import itertools
import json
from fractions import Fraction

from .linalg import QMatrix, homology_dim, qf, solve
from .signs import brace_sign, mc_insertion_sign


class Algebra:
    """Associative unital algebra over Q given by structure constants."""

    def __init__(self, dim, mult, unit, labels=None):
        self.dim = int(dim)
        self.mult = [[[qf(c) for c in mult[i][j]] for j in range(dim)] for i in range(dim)]
        self.unit = {i: qf(c) for i, c in enumerate(unit) if qf(c) != 0}
        self.labels = list(labels) if labels else ["e%d" % i for i in range(dim)]
        self._check()

    def product_vec(self, u, v):
        """Product of two coefficient dicts."""
        out = {}
        for i, a in u.items():
            if a == 0:
                continue
            for j, b in v.items():
                if b == 0:
                    continue
                for k, c in enumerate(self.mult[i][j]):
                    if c:
                        w = out.get(k, Fraction(0)) + a * b * c
                        if w == 0:
                            out.pop(k, None)
                        else:
                            out[k] = w
        return out

    def basis_product(self, i, j):
        return {k: c for k, c in enumerate(self.mult[i][j]) if c}

    def _check(self):
        d = self.dim
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    lhs = self.product_vec(self.basis_product(i, j), {k: Fraction(1)})
                    rhs = self.product_vec({i: Fraction(1)}, self.basis_product(j, k))
                    if lhs != rhs:
                        raise ValueError("associativity fails on (e%d e%d) e%d" % (i, j, k))
        for i in range(d):
            e = {i: Fraction(1)}
            if self.product_vec(self.unit, e) != e or self.product_vec(e, self.unit) != e:
                raise ValueError("unit law fails at e%d" % i)

    def multiplication_cochain(self):
        vals = {}
        for i in range(self.dim):
            for j in range(self.dim):
                for k, c in self.basis_product(i, j).items():
                    vals[(k, (i, j))] = c
        return HochCochain(self.dim, 2, vals)

    def change_basis(self, P):
        """Transport structure constants through an invertible matrix P
        whose columns are the new basis in old coordinates."""
        d = self.dim
        cols = [P.column(j) for j in range(d)]
        mult = []
        for i in range(d):
            row = []
            for j in range(d):
                prod = self.product_vec(cols[i], cols[j])
                x = solve(P, prod)
                assert x is not None, "basis matrix not invertible"
                row.append([x.get(k, Fraction(0)) for k in range(d)])
            mult.append(row)
        u = solve(P, self.unit)
        assert u is not None
        return Algebra(d, mult, [u.get(k, Fraction(0)) for k in range(d)])

    def unit_first_basis(self):
        """An invertible P with first column the unit (used to form the
        normalized cochain complex)."""
        from .linalg import rank
        d = self.dim
        cols = [self.unit]
        for j in range(d):
            if len(cols) == d:
                break
            test = QMatrix(d, len(cols) + 1,
                           {**{(i, c): v for c, col in enumerate(cols) for i, v in col.items()},
                            (j, len(cols)): Fraction(1)})
            if rank(test) == len(cols) + 1:
                cols.append({j: Fraction(1)})
        assert len(cols) == d
        return QMatrix(d, d, {(i, c): v for c, col in enumerate(cols) for i, v in col.items()})

    def to_json(self):
        return {
            "dim": self.dim,
            "unit": [str(self.unit.get(i, Fraction(0))) for i in range(self.dim)],
            "mult": [[[str(c) for c in self.mult[i][j]] for j in range(self.dim)]
                     for i in range(self.dim)],
        }

    @classmethod
    def from_json(cls, data):
        return cls(data["dim"], data["mult"], data["unit"])


class TracedAlgebra:
    """Algebra plus a symmetric trace functional: tr(ab) = tr(ba)."""

    def __init__(self, algebra, trace):
        self.algebra = algebra
        self.trace = [qf(c) for c in trace]
        assert len(self.trace) == algebra.dim
        d = algebra.dim
        for i in range(d):
            for j in range(d):
                if self.tr(algebra.basis_product(i, j)) != self.tr(algebra.basis_product(j, i)):
                    raise ValueError("trace not symmetric on (e%d, e%d)" % (i, j))

    def tr(self, vec):
        return sum((self.trace[i] * c for i, c in vec.items()), Fraction(0))


def load_algebra(path_or_dict):
    """Load the JSON algebra format; returns Algebra or TracedAlgebra."""
    data = path_or_dict
    if isinstance(path_or_dict, str):
        with open(path_or_dict) as fh:
            data = json.load(fh)
    A = Algebra.from_json(data)
    if data.get("trace") is not None:
        return TracedAlgebra(A, data["trace"])
    return A


def truncated_polynomial_algebra(n):
    """Q[x]/x^n with basis 1, x, ..., x^{n-1}."""
    mult = [[[Fraction(1) if k == i + j else Fraction(0) for k in range(n)]
             for j in range(n)] for i in range(n)]
    unit = [Fraction(1)] + [Fraction(0)] * (n - 1)
    labels = ["1"] + ["x^%d" % i if i > 1 else "x" for i in range(1, n)]
    return Algebra(n, mult, unit, labels)


def dual_numbers():
    return truncated_polynomial_algebra(2)


def matrix_algebra(n):
    """n x n matrices over Q, basis E_{ij} ordered row-major."""
    d = n * n
    def idx(i, j):
        return i * n + j
    mult = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if j == k:
                        mult[idx(i, j)][idx(k, l)][idx(i, l)] = Fraction(1)
    unit = [Fraction(0)] * d
    for i in range(n):
        unit[idx(i, i)] = Fraction(1)
    return Algebra(d, mult, unit,
                   ["E%d%d" % (i, j) for i in range(n) for j in range(n)])


def matrix_trace(n):
    tr = [Fraction(0)] * (n * n)
    for i in range(n):
        tr[i * n + i] = Fraction(1)
    return tr


class HochCochain:
    """Sparse multilinear map A^{(x) level} -> A over a dim-dimensional
    space.  Cohomological degree in the total complex is the level."""

    __slots__ = ("dim", "level", "values")

    def __init__(self, dim, level, values=None):
        self.dim = int(dim)
        self.level = int(level)
        vals = {}
        for (out, args), c in (values or {}).items():
            c = qf(c)
            if c != 0:
                assert len(args) == level
                vals[(out, tuple(args))] = c
        self.values = vals

    def is_zero(self):
        return not self.values

    def __add__(self, other):
        assert (self.dim, self.level) == (other.dim, other.level)
        vals = dict(self.values)
        for k, c in other.values.items():
            w = vals.get(k, Fraction(0)) + c
            if w == 0:
                vals.pop(k, None)
            else:
                vals[k] = w
        return HochCochain(self.dim, self.level, vals)

    def scale(self, c):
        c = qf(c)
        if c == 0:
            return HochCochain(self.dim, self.level)
        return HochCochain(self.dim, self.level,
                           {k: c * v for k, v in self.values.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        return isinstance(other, HochCochain) and \
            (self.dim, self.level, self.values) == (other.dim, other.level, other.values)

    def apply_basis(self, args):
        """Value on a tuple of basis indices, as a coefficient dict."""
        out = {}
        for (o, a), c in self.values.items():
            if a == tuple(args):
                out[o] = out.get(o, Fraction(0)) + c
        return out

    def __repr__(self):
        return "HochCochain(dim=%d, level=%d, %d terms)" % (self.dim, self.level, len(self.values))


def compose_at(f, g, i):
    """Plain insertion f o_i g (1-based slot i), no sign."""
    assert f.dim == g.dim and 1 <= i <= f.level
    out_level = f.level + g.level - 1
    vals = {}
    for (fo, fa), fc in f.values.items():
        for (go, ga), gc in g.values.items():
            if fa[i - 1] != go:
                continue
            args = fa[:i - 1] + ga + fa[i:]
            key = (fo, args)
            w = vals.get(key, Fraction(0)) + fc * gc
            if w == 0:
                vals.pop(key, None)
            else:
                vals[key] = w
    return HochCochain(f.dim, out_level, vals)


def mc_brace(f, g):
    """Single brace in the Maurer-Cartan convention:
    sum_i (-1)^{(i-1) + |g|(|f|-i)} f o_i g."""
    acc = HochCochain(f.dim, f.level + g.level - 1)
    for i in range(1, f.level + 1):
        acc = acc + compose_at(f, g, i).scale(mc_insertion_sign(f.level, g.level, i))
    return acc


def brace(f, gs):
    """Multi-brace f{g_1,...,g_k} with Getzler signs (positions counted
    in the final argument sequence); k > level(f) gives zero."""
    gs = list(gs)
    k = len(gs)
    if k == 0:
        return f
    if k > f.level:
        lvl = f.level + sum(g.level for g in gs) - k
        return HochCochain(f.dim, max(lvl, 0))
    out_level = f.level + sum(g.level for g in gs) - k
    acc = HochCochain(f.dim, out_level)
    # choose slots 1 <= i_1 < i_2 < ... <= level(f), order preserving
    for slots in itertools.combinations(range(1, f.level + 1), k):
        # final positions: slot i_j shifted by the sizes of earlier g's
        final_pos = []
        shift = 0
        for j, i in enumerate(slots):
            final_pos.append(i + shift)
            shift += gs[j].level - 1
        sgn = brace_sign([g.level for g in gs], final_pos)
        term = f
        # insert right-to-left so earlier slot indices stay valid
        for j in range(k - 1, -1, -1):
            term = compose_at(term, gs[j], slots[j])
        acc = acc + term.scale(sgn)
    return acc


def gerstenhaber_circle(f, g):
    return brace(f, [g])


def gerstenhaber_bracket(f, g):
    """[f, g] = f{g} - (-1)^{(|f|-1)(|g|-1)} g{f}."""
    sgn = -1 if ((f.level - 1) * (g.level - 1)) % 2 else 1
    return gerstenhaber_circle(f, g) - gerstenhaber_circle(g, f).scale(sgn)


def cup(f, g, mult):
    """Cup product through a fixed product cochain (oracle plumbing)."""
    vals = {}
    for (fo, fa), fc in f.values.items():
        for (go, ga), gc in g.values.items():
            for k, c in mult.apply_basis((fo, go)).items():
                key = (k, fa + ga)
                w = vals.get(key, Fraction(0)) + fc * gc * c
                if w == 0:
                    vals.pop(key, None)
                else:
                    vals[key] = w
    return HochCochain(f.dim, f.level + g.level, vals)


def hochschild_differential(f, algebra, bimodule=None):
    """(bf)(a_1..a_{n+1}) = a_1 f(a_2..) + sum_i (-1)^i f(..a_i a_{i+1}..)
    + (-1)^{n+1} f(a_1..a_n) a_{n+1}.

    Values in the regular bimodule by default; with a Bimodule, outer
    terms use its actions.
    """
    n = f.level
    d = f.dim
    act_l = bimodule.left_action if bimodule else (lambda i, m: algebra.product_vec({i: Fraction(1)}, m))
    act_r = bimodule.right_action if bimodule else (lambda m, i: algebra.product_vec(m, {i: Fraction(1)}))
    vals = {}

    def add(key, c):
        w = vals.get(key, Fraction(0)) + c
        if w == 0:
            vals.pop(key, None)
        else:
            vals[key] = w

    for (out, args), c in f.values.items():
        for a in range(d):
            for k, u in act_l(a, {out: Fraction(1)}).items():
                add((k, (a,) + args), c * u)
            sgn = -1 if (n + 1) % 2 else 1
            for k, u in act_r({out: Fraction(1)}, a).items():
                add((k, args + (a,)), sgn * c * u)
        for i in range(1, n + 1):
            sgn = -1 if i % 2 else 1
            for ai in range(d):
                for aj in range(d):
                    u = algebra.mult[ai][aj][args[i - 1]]
                    if u:
                        big = args[:i - 1] + (ai, aj) + args[i:]
                        add((out, big), sgn * c * u)
    return HochCochain(d, n + 1, vals)


class Bimodule:
    """A bimodule over an algebra: left[i][m], right[m][i] coefficient
    vectors; axioms verified on construction."""

    def __init__(self, algebra, dim, left, right):
        self.algebra = algebra
        self.dim = int(dim)
        self.left = [[[qf(c) for c in left[i][m]] for m in range(dim)]
                     for i in range(algebra.dim)]
        self.right = [[[qf(c) for c in right[m][i]] for i in range(algebra.dim)]
                      for m in range(dim)]
        self._check()

    def left_action(self, i, mvec):
        out = {}
        for m, c in mvec.items():
            for k, u in enumerate(self.left[i][m]):
                if u:
                    w = out.get(k, Fraction(0)) + c * u
                    if w == 0:
                        out.pop(k, None)
                    else:
                        out[k] = w
        return out

    def right_action(self, mvec, i):
        out = {}
        for m, c in mvec.items():
            for k, u in enumerate(self.right[m][i]):
                if u:
                    w = out.get(k, Fraction(0)) + c * u
                    if w == 0:
                        out.pop(k, None)
                    else:
                        out[k] = w
        return out

    def _check(self):
        A = self.algebra
        for i in range(A.dim):
            for j in range(A.dim):
                for m in range(self.dim):
                    mv = {m: Fraction(1)}
                    prod = A.basis_product(i, j)
                    lhs = {}
                    for k, c in prod.items():
                        for kk, u in self.left_action(k, mv).items():
                            lhs[kk] = lhs.get(kk, Fraction(0)) + c * u
                    rhs = self.left_action(i, self.left_action(j, mv))
                    if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                        raise ValueError("left action not associative")
                    lhs2 = {}
                    for k, c in prod.items():
                        for kk, u in self.right_action(mv, k).items():
                            lhs2[kk] = lhs2.get(kk, Fraction(0)) + c * u
                    rhs2 = self.right_action(self.right_action(mv, i), j)
                    if {k: v for k, v in lhs2.items() if v} != {k: v for k, v in rhs2.items() if v}:
                        raise ValueError("right action not associative")
                    mid1 = self.right_action(self.left_action(i, mv), j)
                    mid2 = self.left_action(i, self.right_action(mv, j))
                    if {k: v for k, v in mid1.items() if v} != {k: v for k, v in mid2.items() if v}:
                        raise ValueError("bimodule compatibility fails")
        for m in range(self.dim):
            mv = {m: Fraction(1)}
            lu = {}
            ru = {}
            for i, c in A.unit.items():
                for k, u in self.left_action(i, mv).items():
                    lu[k] = lu.get(k, Fraction(0)) + c * u
                for k, u in self.right_action(mv, i).items():
                    ru[k] = ru.get(k, Fraction(0)) + c * u
            if {k: v for k, v in lu.items() if v} != mv or {k: v for k, v in ru.items() if v} != mv:
                raise ValueError("unit does not act as identity on the bimodule")

    @classmethod
    def regular(cls, algebra):
        d = algebra.dim
        left = [[[algebra.mult[i][m][k] for k in range(d)] for m in range(d)] for i in range(d)]
        right = [[[algebra.mult[m][i][k] for k in range(d)] for i in range(d)] for m in range(d)]
        return cls(algebra, d, left, right)


def hochschild_cohomology(algebra, bimodule=None, n_max=4):
    """dim HH^n(A, M) for 0 <= n <= n_max via the normalized complex.

    The algebra is first rebased so e_0 is the unit; normalized cochains
    take arguments in the complement basis e_1..e_{d-1} and values in M.
    Quasi-isomorphic to the full complex in characteristic 0.
    """
    P = algebra.unit_first_basis()
    A = algebra.change_basis(P)
    if bimodule is None:
        M = Bimodule.regular(A)
    else:
        assert bimodule.algebra is algebra
        M = _rebase_bimodule(bimodule, algebra, A, P)
    d = A.dim
    md = M.dim

    def basis(n):
        return [(out, args) for args in itertools.product(range(1, d), repeat=n)
                for out in range(md)]

    def b_matrix(n):
        src = basis(n)
        tgt = basis(n + 1)
        tindex = {t: r for r, t in enumerate(tgt)}
        ent = {}
        for col, (out, args) in enumerate(src):
            for a in range(1, d):
                for k, u in M.left_action(a, {out: Fraction(1)}).items():
                    key = (tindex[(k, (a,) + args)], col)
                    ent[key] = ent.get(key, Fraction(0)) + u
                sgn = -1 if (n + 1) % 2 else 1
                for k, u in M.right_action({out: Fraction(1)}, a).items():
                    key = (tindex[(k, args + (a,))], col)
                    ent[key] = ent.get(key, Fraction(0)) + sgn * u
            for i in range(1, n + 1):
                sgn = -1 if i % 2 else 1
                for ai in range(1, d):
                    for aj in range(1, d):
                        u = A.mult[ai][aj][args[i - 1]]
                        if u:
                            big = args[:i - 1] + (ai, aj) + args[i:]
                            key = (tindex[(out, big)], col)
                            ent[key] = ent.get(key, Fraction(0)) + sgn * u
        return QMatrix(len(tgt), len(src), ent)

    mats = {n: b_matrix(n) for n in range(n_max + 1)}
    dims = []
    for n in range(n_max + 1):
        d_in = mats[n - 1] if n > 0 else QMatrix.zero(mats[n].cols, 0)
        dims.append(homology_dim(d_in, mats[n]))
    return dims


def _rebase_bimodule(bimodule, old, new, P):
    d = old.dim
    cols = [P.column(j) for j in range(d)]
    left = []
    for i in range(d):
        rowm = []
        for m in range(bimodule.dim):
            acc = {}
            for ii, c in cols[i].items():
                for k, u in bimodule.left_action(ii, {m: Fraction(1)}).items():
                    acc[k] = acc.get(k, Fraction(0)) + c * u
            rowm.append([acc.get(k, Fraction(0)) for k in range(bimodule.dim)])
        left.append(rowm)
    right = []
    for m in range(bimodule.dim):
        rowi = []
        for i in range(d):
            acc = {}
            for ii, c in cols[i].items():
                for k, u in bimodule.right_action({m: Fraction(1)}, ii).items():
                    acc[k] = acc.get(k, Fraction(0)) + c * u
            rowi.append([acc.get(k, Fraction(0)) for k in range(bimodule.dim)])
        right.append(rowi)
    return Bimodule(new, bimodule.dim, left, right)


# ---------------------------------------------------------------------------
# curved Maurer-Cartan structures
# ---------------------------------------------------------------------------

class CurvedMC:
    """Weight-filtered family M_n^k of cochains; M_n^0 = 0 for n != 2 and
    M_2^0 is the designated product (not required associative: that is
    exactly what the checker decides)."""

    def __init__(self, dim, components):
        self.dim = int(dim)
        self.components = {}
        for (n, k), f in components.items():
            assert k >= 0, "negative weight"
            assert f.dim == self.dim and f.level == n
            if k == 0 and n != 2 and not f.is_zero():
                raise ValueError("normalization: M_%d^0 must vanish" % n)
            if not f.is_zero():
                self.components[(n, k)] = f

    def get(self, n, k):
        f = self.components.get((n, k))
        return f if f is not None else HochCochain(self.dim, n)

    @classmethod
    def from_product(cls, algebra_or_cochain, extra=None):
        if isinstance(algebra_or_cochain, Algebra):
            m = algebra_or_cochain.multiplication_cochain()
        else:
            m = algebra_or_cochain
        comps = {(2, 0): m}
        comps.update(extra or {})
        return cls(m.dim, comps)


def curved_mc_residual(M, n, k):
    """The (n, k) component of the structure equation:
    sum over p+q = n+1, l+l' = k of the mc-signed insertions
    M_p^l { M_q^{l'} }."""
    acc = HochCochain(M.dim, n)
    for p in range(1, n + 2):
        q = n + 1 - p
        if q < 0:
            continue
        for l in range(0, k + 1):
            f = M.get(p, l)
            g = M.get(q, k - l)
            if f.is_zero() or g.is_zero():
                continue
            acc = acc + mc_brace(f, g)
    return acc


def check_curved_mc(M, n_max, k_max):
    """Verify the curved structure equation on the window; returns a
    report with ok flag and the failing (n, k) residuals."""
    failures = []
    for n in range(0, n_max + 1):
        for k in range(0, k_max + 1):
            r = curved_mc_residual(M, n, k)
            if not r.is_zero():
                failures.append(((n, k), r))
    return MCReport(n_max, k_max, failures)


class MCReport:
    def __init__(self, n_max, k_max, failures):
        self.n_max = n_max
        self.k_max = k_max
        self.failures = failures

    @property
    def ok(self):
        return not self.failures

    def first_failure(self):
        return self.failures[0][0] if self.failures else None

    def __repr__(self):
        if self.ok:
            return "MCReport(OK through (n<=%d, k<=%d))" % (self.n_max, self.k_max)
        return "MCReport(failures at %s)" % ([f[0] for f in self.failures],)


# ---------------------------------------------------------------------------
# trace pairing
# ---------------------------------------------------------------------------

class CyclicCochain:
    """A functional on A^{(x)(level+1)}: values[args] with len(args) =
    level + 1."""

    __slots__ = ("dim", "level", "values")

    def __init__(self, dim, level, values=None):
        self.dim = int(dim)
        self.level = int(level)
        vals = {}
        for args, c in (values or {}).items():
            c = qf(c)
            if c != 0:
                assert len(args) == level + 1
                vals[tuple(args)] = c
        self.values = vals

    def is_zero(self):
        return not self.values

    def __add__(self, other):
        assert (self.dim, self.level) == (other.dim, other.level)
        vals = dict(self.values)
        for k, c in other.values.items():
            w = vals.get(k, Fraction(0)) + c
            if w == 0:
                vals.pop(k, None)
            else:
                vals[k] = w
        return CyclicCochain(self.dim, self.level, vals)

    def scale(self, c):
        c = qf(c)
        if c == 0:
            return CyclicCochain(self.dim, self.level)
        return CyclicCochain(self.dim, self.level, {k: c * v for k, v in self.values.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        return isinstance(other, CyclicCochain) and \
            (self.dim, self.level, self.values) == (other.dim, other.level, other.values)


def map_I(f, traced):
    """I(f)(a_0, ..., a_n) = tr(a_0 . f(a_1, ..., a_n))."""
    A = traced.algebra
    vals = {}
    for (out, args), c in f.values.items():
        for a0 in range(A.dim):
            t = traced.tr(A.basis_product(a0, out))
            if t:
                key = (a0,) + args
                w = vals.get(key, Fraction(0)) + c * t
                if w == 0:
                    vals.pop(key, None)
                else:
                    vals[key] = w
    return CyclicCochain(f.dim, f.level, vals)
