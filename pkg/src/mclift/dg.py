"""Complexes of finite-dimensional Q-vector spaces and the standard
constructions on them: shifts, cones, Maurer-Cartan twists, hom and
tensor complexes, double-complex totalization, two-sided bar / cobar
models of derived (co)limits over finite Q-linear categories, and the
canonical truncation tau_{<=0}.

Conventions, fixed once for the whole package:
  * cohomological grading, differentials have degree +1;
  * shift is X[k]^n = X^{n+k} with differential (-1)^k d;
  * Cone(f)^n = X^{n+1} (+) Y^n with differential [[-d_X, 0], [f, d_Y]],
    so Cone(id) is strictly acyclic and Cone(X -> 0) = X[1];
  * hom differential d f = d_Y f - (-1)^{|f|} f d_X, and with twists
    d' f = d f + D_Y f - (-1)^{|f|} f D_X;
  * tensor differential d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy.
"""

from fractions import Fraction

from .linalg import QMatrix, homology_dim, kernel_basis, parity_sign, solve


class GradedSpace:
    """Finitely supported family of dimensions indexed by integer degree."""

    __slots__ = ("components", "labels")

    def __init__(self, components, labels=None):
        self.components = {int(n): int(d) for n, d in components.items() if d}
        for d in self.components.values():
            assert d > 0
        self.labels = {}
        for n, d in self.components.items():
            if labels and n in labels:
                assert len(labels[n]) == d
                self.labels[n] = list(labels[n])
            else:
                self.labels[n] = ["e%d_%d" % (n, i) for i in range(d)]

    def dim(self, n):
        return self.components.get(n, 0)

    def degrees(self):
        return sorted(self.components)

    def total_dim(self):
        return sum(self.components.values())

    def euler(self):
        return sum(parity_sign(n) * d for n, d in self.components.items())

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.components == other.components

    def __repr__(self):
        return "GradedSpace(%r)" % (self.components,)


class DGModule:
    """A complex: graded space plus degree +1 differential, d^2 = 0.

    differential[n] maps degree n to degree n+1 and has shape
    dim(n+1) x dim(n).  Construction verifies shapes and d.d = 0.
    """

    __slots__ = ("space", "differential")

    def __init__(self, space, differential=None, _skip_check=False):
        self.space = space
        diffs = {}
        for n, M in (differential or {}).items():
            if M.is_zero():
                continue
            assert M.cols == space.dim(n) and M.rows == space.dim(n + 1), \
                ("differential shape at degree %d" % n, M.rows, M.cols)
            diffs[n] = M
        self.differential = diffs
        if not _skip_check:
            for n in diffs:
                sq = self.d(n + 1) @ self.d(n)
                if not sq.is_zero():
                    raise ValueError("d^2 != 0 at degree %d" % n)

    def dim(self, n):
        return self.space.dim(n)

    def degrees(self):
        return self.space.degrees()

    def d(self, n):
        M = self.differential.get(n)
        if M is None:
            return QMatrix.zero(self.dim(n + 1), self.dim(n))
        return M

    def homology_dim(self, n):
        return homology_dim(self.d(n - 1), self.d(n))

    def homology_dims(self, lo, hi):
        return {n: self.homology_dim(n) for n in range(lo, hi + 1)}

    def is_acyclic(self, lo=None, hi=None):
        degs = self.degrees()
        if not degs:
            return True
        lo = degs[0] - 1 if lo is None else lo
        hi = degs[-1] + 1 if hi is None else hi
        return all(self.homology_dim(n) == 0 for n in range(lo, hi + 1))

    def euler(self):
        return self.space.euler()

    def __repr__(self):
        return "DGModule(dims=%r)" % (self.space.components,)


def dg_module(dims, diffs=None, labels=None):
    """Convenience constructor from {deg: dim} and {deg: row-lists}."""
    sp = GradedSpace(dims, labels)
    dd = {}
    for n, rows in (diffs or {}).items():
        dd[n] = QMatrix.from_rows(rows) if not isinstance(rows, QMatrix) else rows
    return DGModule(sp, dd)


def ground_field(degree=0):
    """Q concentrated in one degree."""
    return DGModule(GradedSpace({degree: 1}))


def zero_module():
    return DGModule(GradedSpace({}))


class GradedMap:
    """A degree-k family of matrices X^n -> Y^{n+k}."""

    __slots__ = ("source", "target", "degree", "components")

    def __init__(self, source, target, degree, components):
        self.source = source
        self.target = target
        self.degree = int(degree)
        comps = {}
        for n, M in components.items():
            if M.is_zero():
                continue
            assert M.cols == source.dim(n) and M.rows == target.dim(n + self.degree), \
                ("component shape at degree %d" % n, M.rows, M.cols)
            comps[n] = M
        self.components = comps

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, degree, {})

    @classmethod
    def identity(cls, X):
        return cls(X, X, 0, {n: QMatrix.identity(X.dim(n)) for n in X.degrees()})

    def comp(self, n):
        M = self.components.get(n)
        if M is None:
            return QMatrix.zero(self.target.dim(n + self.degree), self.source.dim(n))
        return M

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        assert self.degree == other.degree
        degs = set(self.components) | set(other.components)
        return GradedMap(self.source, self.target, self.degree,
                         {n: self.comp(n) + other.comp(n) for n in degs})

    def scale(self, c):
        return GradedMap(self.source, self.target, self.degree,
                         {n: M.scale(c) for n, M in self.components.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def then(self, other):
        """other . self (apply self first)."""
        assert other.source is self.target or other.source.space.components == self.target.space.components
        degs = set(self.components)
        comps = {}
        for n in degs:
            M = other.comp(n + self.degree) @ self.comp(n)
            if not M.is_zero():
                comps[n] = M
        return GradedMap(self.source, other.target, self.degree + other.degree, comps)

    def hom_d(self):
        """The hom-complex differential of this map:
        d f = d_Y f - (-1)^{|f|} f d_X, again a GradedMap."""
        k = self.degree
        sgn = -parity_sign(k)
        degs = set(self.components)
        for n in self.source.differential:
            degs.add(n)
        comps = {}
        for n in degs:
            M = self.target.d(n + k) @ self.comp(n) + (self.comp(n + 1) @ self.source.d(n)).scale(sgn)
            if not M.is_zero():
                comps[n] = M
        return GradedMap(self.source, self.target, k + 1, comps)

    def is_chain_map(self):
        return self.degree == 0 and self.hom_d().is_zero()


class MCElement:
    """Maurer-Cartan element: degree 1 self-map D with dD + D^2 = 0."""

    __slots__ = ("carrier", "D")

    def __init__(self, carrier, D):
        assert D.degree == 1
        self.carrier = carrier
        self.D = D
        bad = _mc_defect_degrees(carrier, D)
        if bad:
            raise ValueError("Maurer-Cartan equation fails at degrees %r" % (bad,))

    @classmethod
    def zero(cls, X):
        return cls(X, GradedMap.zero(X, X, 1))


def _mc_defect_degrees(X, D):
    lhs = D.hom_d() + D.then(D)
    return sorted(n for n, M in lhs.components.items() if not M.is_zero())


def shift(X, k):
    sp = GradedSpace({n - k: X.dim(n) for n in X.degrees()},
                     {n - k: X.space.labels[n] for n in X.degrees()})
    sgn = parity_sign(k)
    diffs = {n - k: M.scale(sgn) for n, M in X.differential.items()}
    return DGModule(sp, diffs)


def shift_map(f, k):
    """The same components viewed X[k] -> Y[k]."""
    S, T = shift(f.source, k), shift(f.target, k)
    return GradedMap(S, T, f.degree, {n - k: M for n, M in f.components.items()})


def cone(f):
    """Mapping cone of a degree-0 chain map f : X -> Y.

    Cone(f)^n = X^{n+1} (+) Y^n, ordered X-part first.
    """
    if f.degree != 0 or not f.is_chain_map():
        raise ValueError("cone requires a degree-0 chain map")
    X, Y = f.source, f.target
    dims = {}
    for n in X.degrees():
        dims[n - 1] = dims.get(n - 1, 0) + X.dim(n)
    for n in Y.degrees():
        dims[n] = dims.get(n, 0) + Y.dim(n)
    sp = GradedSpace(dims)
    diffs = {}
    for n in sorted(dims):
        xs, ys = X.dim(n + 1), Y.dim(n)
        xt, yt = X.dim(n + 2), Y.dim(n + 1)
        if xt + yt == 0 or xs + ys == 0:
            continue
        blocks = {
            (0, 0): X.d(n + 1).scale(-1),
            (1, 0): f.comp(n + 1),
            (1, 1): Y.d(n),
        }
        diffs[n] = QMatrix.stack_blocks(blocks, [xt, yt], [xs, ys])
    return DGModule(sp, diffs)


def cone_inclusion(f):
    """The canonical chain map Y -> Cone(f)."""
    C = cone(f)
    X, Y = f.source, f.target
    comps = {}
    for n in Y.degrees():
        xs = X.dim(n + 1)
        ent = {(xs + i, i): Fraction(1) for i in range(Y.dim(n))}
        comps[n] = QMatrix(C.dim(n), Y.dim(n), ent)
    return GradedMap(Y, C, 0, comps)


def cone_projection(f):
    """The canonical chain map Cone(f) -> X[1]."""
    C = cone(f)
    X = f.source
    X1 = shift(X, 1)
    comps = {}
    for n in X1.degrees():
        ent = {(i, i): Fraction(1) for i in range(X.dim(n + 1))}
        comps[n] = QMatrix(X1.dim(n), C.dim(n), ent)
    return GradedMap(C, X1, 0, comps)


def twist(X, mc):
    """Same graded space, differential d + D."""
    if isinstance(mc, GradedMap):
        mc = MCElement(X, mc)
    D = mc.D
    diffs = {}
    for n in X.degrees():
        M = X.d(n) + D.comp(n)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(X.space, diffs)


def _hom_basis(X, Y, n):
    """Basis of hom^n(X, Y): triples (p, i, j) = elementary map
    sending basis vector i of X^p to basis vector j of Y^{p+n}."""
    out = []
    for p in X.degrees():
        dt = Y.dim(p + n)
        for i in range(X.dim(p)):
            for j in range(dt):
                out.append((p, i, j))
    return out


def hom_dg(X, Y, DX=None, DY=None):
    """The hom complex hom(X, Y), optionally twisted on either side.

    Degree-n part has basis the elementary maps X^p -> Y^{p+n}; the
    differential is d'f = df + D_Y f - (-1)^{|f|} f D_X.
    """
    dX = X.d
    dY = Y.d
    DXc = DX.D.comp if isinstance(DX, MCElement) else (DX.comp if DX else None)
    DYc = DY.D.comp if isinstance(DY, MCElement) else (DY.comp if DY else None)

    def total_dX(p):
        M = dX(p)
        if DXc:
            M = M + DXc(p)
        return M

    def total_dY(p):
        M = dY(p)
        if DYc:
            M = M + DYc(p)
        return M

    degrees = X.degrees()
    ydegs = Y.degrees()
    if not degrees or not ydegs:
        return DGModule(GradedSpace({})), {}, {}
    nmin = min(q - p for p in degrees for q in ydegs)
    nmax = max(q - p for p in degrees for q in ydegs)
    bases = {n: _hom_basis(X, Y, n) for n in range(nmin, nmax + 2)}
    dims = {n: len(b) for n, b in bases.items() if b}
    sp = GradedSpace(dims)
    index = {n: {t: k for k, t in enumerate(b)} for n, b in bases.items()}
    diffs = {}
    for n in range(nmin, nmax + 1):
        src = bases.get(n, [])
        tgt_index = index.get(n + 1, {})
        if not src or not tgt_index:
            continue
        ent = {}
        msign = -parity_sign(n)
        for col, (p, i, j) in enumerate(src):
            # d_Y . f : lands in maps X^p -> Y^{p+n+1}
            col_dY = total_dY(p + n).column(j)
            for jj, v in col_dY.items():
                row = tgt_index.get((p, i, jj))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + v
            # -(-1)^n f . d_X : lands in maps X^{p-1} -> Y^{p+n}
            for (ti, si), v in total_dX(p - 1).entries.items():
                if ti != i:
                    continue
                row = tgt_index.get((p - 1, si, j))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + msign * v
        M = QMatrix(len(bases[n + 1]), len(src), ent)
        if not M.is_zero():
            diffs[n] = M
    H = DGModule(sp, diffs)
    return H, bases, index


def hom_complex(X, Y, DX=None, DY=None):
    """hom_dg returning only the DGModule."""
    return hom_dg(X, Y, DX, DY)[0]


def graded_map_to_hom_vector(f, bases_index):
    """Coordinates of a GradedMap in the hom complex basis (degree |f|)."""
    idx = bases_index.get(f.degree) if isinstance(bases_index, dict) else bases_index
    vec = {}
    for p, M in f.components.items():
        for (j, i), v in M.entries.items():
            vec[idx[(p, i, j)]] = v
    return vec


def tensor_basis(X, Y, n):
    out = []
    for p in X.degrees():
        q = n - p
        for i in range(X.dim(p)):
            for j in range(Y.dim(q)):
                out.append((p, i, j))
    return out


def tensor_dg(X, Y):
    """Tensor product complex with the Koszul sign."""
    xdeg, ydeg = X.degrees(), Y.degrees()
    if not xdeg or not ydeg:
        return DGModule(GradedSpace({}))
    degs = sorted({p + q for p in xdeg for q in ydeg})
    bases = {n: tensor_basis(X, Y, n) for n in range(degs[0], degs[-1] + 2)}
    sp = GradedSpace({n: len(b) for n, b in bases.items() if b})
    index = {n: {t: k for k, t in enumerate(b)} for n, b in bases.items()}
    diffs = {}
    for n in range(degs[0], degs[-1] + 1):
        src = bases.get(n, [])
        tgt_index = index.get(n + 1, {})
        if not src or not tgt_index:
            continue
        ent = {}
        for col, (p, i, j) in enumerate(src):
            for (i2, si), v in X.d(p).entries.items():
                if si != i:
                    continue
                row = tgt_index.get((p + 1, i2, j))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + v
            sgn = parity_sign(p)
            for (j2, sj), v in Y.d(n - p).entries.items():
                if sj != j:
                    continue
                row = tgt_index.get((p, i, j2))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + sgn * v
        M = QMatrix(len(bases[n + 1]), len(src), ent)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(sp, diffs)


class DoubleComplex:
    """Bigraded with anticommuting differentials d_h: (p,q)->(p+1,q) and
    d_v: (p,q)->(p,q+1); finite support."""

    __slots__ = ("dims", "dh", "dv")

    def __init__(self, dims, dh, dv):
        self.dims = {k: int(v) for k, v in dims.items() if v}
        self.dh = {k: M for k, M in dh.items() if not M.is_zero()}
        self.dv = {k: M for k, M in dv.items() if not M.is_zero()}
        for (p, q), M in self.dh.items():
            assert M.cols == self.dim(p, q) and M.rows == self.dim(p + 1, q)
        for (p, q), M in self.dv.items():
            assert M.cols == self.dim(p, q) and M.rows == self.dim(p, q + 1)
        for (p, q) in self.dims:
            if not (self.h(p + 1, q) @ self.h(p, q)).is_zero():
                raise ValueError("d_h^2 != 0 at (%d,%d)" % (p, q))
            if not (self.v(p, q + 1) @ self.v(p, q)).is_zero():
                raise ValueError("d_v^2 != 0 at (%d,%d)" % (p, q))
            anti = self.v(p + 1, q) @ self.h(p, q) + self.h(p, q + 1) @ self.v(p, q)
            if not anti.is_zero():
                raise ValueError("d_h d_v + d_v d_h != 0 at (%d,%d)" % (p, q))

    def dim(self, p, q):
        return self.dims.get((p, q), 0)

    def h(self, p, q):
        M = self.dh.get((p, q))
        return M if M is not None else QMatrix.zero(self.dim(p + 1, q), self.dim(p, q))

    def v(self, p, q):
        M = self.dv.get((p, q))
        return M if M is not None else QMatrix.zero(self.dim(p, q + 1), self.dim(p, q))


def totalize(B):
    """Total complex of a double complex: Tot^n = (+)_{p+q=n} B^{p,q},
    differential d_h + d_v."""
    by_total = {}
    for (p, q), d in sorted(B.dims.items()):
        by_total.setdefault(p + q, []).append((p, q, d))
    offsets = {}
    dims = {}
    for n, cells in by_total.items():
        off = 0
        for (p, q, d) in cells:
            offsets[(p, q)] = off
            off += d
        dims[n] = off
    sp = GradedSpace(dims)
    diffs = {}
    for n in sorted(dims):
        if dims.get(n + 1, 0) == 0:
            continue
        ent = {}
        for (p, q, d) in by_total.get(n, []):
            for M, (tp, tq) in ((B.h(p, q), (p + 1, q)), (B.v(p, q), (p, q + 1))):
                if (tp, tq) not in offsets:
                    continue
                ro, co = offsets[(tp, tq)], offsets[(p, q)]
                for (i, j), v in M.entries.items():
                    key = (ro + i, co + j)
                    ent[key] = ent.get(key, Fraction(0)) + v
        M = QMatrix(dims[n + 1], dims.get(n, 0), ent)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(sp, diffs)


# ---------------------------------------------------------------------------
# finite Q-linear categories, functors, bar and cobar models
# ---------------------------------------------------------------------------

class FiniteCategory:
    """A Q-linear category with finitely many objects and f.d. hom spaces.

    hom_dims[(a, b)] is the dimension of hom(a, b); composition is given
    by structure tensors: compose[(a, b, c)] maps column index
    (k_bc * hom_dim(a,b) + k_ab) to a vector in hom(a, c), meaning
    basis_bc[k_bc] . basis_ab[k_ab].  identity[a] is a vector in
    hom(a, a).  An optional augmentation eps (a functional on every hom
    space, multiplicative and 1 on identities) feeds the constant
    functor used by hocolim / holim.
    """

    def __init__(self, objects, hom_dims, compose, identity, augmentation=None):
        self.objects = list(objects)
        self.hom_dims = {k: int(v) for k, v in hom_dims.items()}
        self.compose_t = compose
        self.identity = identity
        self.augmentation = augmentation
        self._check()

    def hom_dim(self, a, b):
        return self.hom_dims.get((a, b), 0)

    def compose_basis(self, a, b, c, k_ab, k_bc):
        """Vector in hom(a,c) for basis_bc[k_bc] . basis_ab[k_ab]."""
        T = self.compose_t.get((a, b, c))
        if T is None:
            return {}
        return T.column(k_bc * self.hom_dim(a, b) + k_ab)

    def eps(self, a, b, k):
        assert self.augmentation is not None, "category has no augmentation"
        return self.augmentation[(a, b)].get(k, Fraction(0))

    def _check(self):
        for a in self.objects:
            ida = self.identity[a]
            assert set(ida) <= set(range(self.hom_dim(a, a)))
            for b in self.objects:
                nab = self.hom_dim(a, b)
                for k in range(nab):
                    # id_b . f = f and f . id_a = f
                    left = {}
                    for ki, c in self.identity[b].items():
                        for kk, v in self.compose_basis(a, b, b, k, ki).items():
                            left[kk] = left.get(kk, Fraction(0)) + c * v
                    right = {}
                    for ki, c in self.identity[a].items():
                        for kk, v in self.compose_basis(a, a, b, ki, k).items():
                            right[kk] = right.get(kk, Fraction(0)) + c * v
                    unit_vec = {k: Fraction(1)}
                    if {k2: v for k2, v in left.items() if v} != unit_vec or \
                       {k2: v for k2, v in right.items() if v} != unit_vec:
                        raise ValueError("unit law fails in hom(%r,%r)" % (a, b))
        # associativity on all basis triples
        for a in self.objects:
            for b in self.objects:
                for c in self.objects:
                    for d in self.objects:
                        for i in range(self.hom_dim(a, b)):
                            for j in range(self.hom_dim(b, c)):
                                for k in range(self.hom_dim(c, d)):
                                    lhs = {}
                                    for m, v in self.compose_basis(b, c, d, j, k).items():
                                        for mm, w in self.compose_basis(a, b, d, i, m).items():
                                            lhs[mm] = lhs.get(mm, Fraction(0)) + v * w
                                    rhs = {}
                                    for m, v in self.compose_basis(a, b, c, i, j).items():
                                        for mm, w in self.compose_basis(a, c, d, m, k).items():
                                            rhs[mm] = rhs.get(mm, Fraction(0)) + v * w
                                    if {x: y for x, y in lhs.items() if y} != {x: y for x, y in rhs.items() if y}:
                                        raise ValueError(
                                            "composition not associative on (%r,%r,%r,%r)" % (a, b, c, d))
        if self.augmentation is not None:
            for a in self.objects:
                s = Fraction(0)
                for k, c in self.identity[a].items():
                    s += c * self.eps(a, a, k)
                assert s == 1, "augmentation not unital at %r" % (a,)


def poset_category(objects, relation):
    """The Q-linearization of a finite poset: hom(a,b) = Q if a <= b.

    relation is a set of pairs (a, b) meaning a <= b; reflexivity is
    added and transitivity verified.  Carries the canonical
    augmentation.
    """
    rel = set(relation) | {(a, a) for a in objects}
    for (a, b) in list(rel):
        for (c, d) in list(rel):
            if b == c and (a, d) not in rel:
                raise ValueError("relation not transitive: %r %r" % ((a, b), (c, d)))
    hom_dims = {(a, b): 1 for (a, b) in rel}
    compose = {}
    for (a, b) in rel:
        for c in objects:
            if (b, c) in rel:
                compose[(a, b, c)] = QMatrix(1, 1, {(0, 0): Fraction(1)})
    identity = {a: {0: Fraction(1)} for a in objects}
    augmentation = {(a, b): {0: Fraction(1)} for (a, b) in rel}
    return FiniteCategory(objects, hom_dims, compose, identity, augmentation)


class DGFunctor:
    """A functor I -> complexes: values on objects, chain-map action on
    hom basis elements.  contravariant=True means action of a hom(a,b)
    basis element is a map F(b) -> F(a)."""

    def __init__(self, category, values, action, contravariant=False):
        self.category = category
        self.values = values
        self.action = action
        self.contravariant = contravariant
        self._check()

    def act(self, a, b, k):
        return self.action[(a, b)][k]

    def _check(self):
        I = self.category
        for (a, b), maps in self.action.items():
            assert len(maps) == I.hom_dim(a, b)
            for f in maps:
                if not f.is_chain_map():
                    raise ValueError("functor action of hom(%r,%r) is not a chain map" % (a, b))
                src, tgt = (self.values[b], self.values[a]) if self.contravariant \
                    else (self.values[a], self.values[b])
                assert f.source is src and f.target is tgt
        for a in I.objects:
            for b in I.objects:
                for c in I.objects:
                    for i in range(I.hom_dim(a, b)):
                        for j in range(I.hom_dim(b, c)):
                            if self.contravariant:
                                comp = self.act(b, c, j).then(self.act(a, b, i))
                            else:
                                comp = self.act(a, b, i).then(self.act(b, c, j))
                            expect = GradedMap.zero(comp.source, comp.target, 0)
                            for k, v in I.compose_basis(a, b, c, i, j).items():
                                expect = expect + self.act(a, c, k).scale(v)
                            if not (comp - expect).is_zero():
                                raise ValueError("functoriality fails on hom(%r,%r) x hom(%r,%r)" % (a, b, b, c))


def constant_functor(category, contravariant=False, value=None):
    """The constant functor with value Q (or a given complex), acting
    through the category's augmentation."""
    V = value if value is not None else ground_field()
    values = {a: V for a in category.objects}
    action = {}
    for (a, b), n in category.hom_dims.items():
        maps = []
        for k in range(n):
            maps.append(GradedMap.identity(V).scale(category.eps(a, b, k)))
        action[(a, b)] = maps
    return DGFunctor(category, values, action, contravariant)


def _chains(I, n):
    """All composable chains (X_0, k_1, X_1, ..., k_n, X_n) of hom basis
    elements, as tuples (objects_tuple, indices_tuple)."""
    if n == 0:
        return [((a,), ()) for a in I.objects]
    out = []
    for (objs, idxs) in _chains(I, n - 1):
        a = objs[-1]
        for b in I.objects:
            for k in range(I.hom_dim(a, b)):
                out.append((objs + (b,), idxs + (k,)))
    return out


def bar_tensor(F, G, L):
    """Two-sided bar model of F (x)^L_I G, truncated at length L.

    F covariant, G contravariant, over the same finite category.  Layer
    n occupies horizontal degree -n; the n-th layer is the direct sum
    over length-n chains of F(X_0) (x) G(X_n), with the bar differential
    (inner face maps compose in I, outer faces act on F resp. G).
    Returns (DGModule, stable_degree): homology in degrees >= stable
    cannot change when L is increased.
    """
    I = F.category
    assert G.contravariant and not F.contravariant
    layers = {}
    for n in range(L + 1):
        cells = []
        for (objs, idxs) in _chains(I, n):
            X0, Xn = objs[0], objs[-1]
            T = tensor_dg(F.values[X0], G.values[Xn])
            cells.append(((objs, idxs), T))
        layers[n] = cells

    dims = {}
    offsets = {}
    for n, cells in layers.items():
        for (key, T) in cells:
            for q in T.degrees():
                off = dims.get((-n, q), 0)
                offsets[(n, key, q)] = off
                dims[(-n, q)] = off + T.dim(q)

    dv = {}
    for n, cells in layers.items():
        sgn = parity_sign(n)
        for (key, T) in cells:
            for q in T.degrees():
                M = T.d(q)
                if M.is_zero():
                    continue
                ro = offsets.get((n, key, q + 1))
                if ro is None:
                    continue
                co = offsets[(n, key, q)]
                cur = dv.setdefault((-n, q), {})
                for (i, j), v in M.entries.items():
                    cur[(ro + i, co + j)] = cur.get((ro + i, co + j), Fraction(0)) + sgn * v

    dh = {}

    def add_block(n, q, tgt_key, src_key, M, sign, src_T, tgt_T):
        # M : (F(X0') (x) G(Xn'))^q -> same degree of the target cell
        if M.is_zero():
            return
        ro = offsets.get((n - 1, tgt_key, q))
        co = offsets.get((n, src_key, q))
        if ro is None or co is None:
            return
        cur = dh.setdefault((-n, q), {})
        for (i, j), v in M.entries.items():
            cur[(ro + i, co + j)] = cur.get((ro + i, co + j), Fraction(0)) + sign * v

    for n in range(1, L + 1):
        for (key, T) in layers[n]:
            objs, idxs = key
            for q in T.degrees():
                # face 0: absorb first arrow into F
                f0 = F.act(objs[0], objs[1], idxs[0])
                tgt_key = (objs[1:], idxs[1:])
                Ttgt = dict(layers[n - 1])[tgt_key]
                M = _tensor_map_q(f0, GradedMap.identity(G.values[objs[-1]]),
                                  F.values[objs[0]], G.values[objs[-1]],
                                  F.values[objs[1]], G.values[objs[-1]], q)
                add_block(n, q, tgt_key, key, M, 1, T, Ttgt)
                # inner faces: compose consecutive arrows
                for i in range(1, n):
                    a, b, c = objs[i - 1], objs[i], objs[i + 1]
                    comp = I.compose_basis(a, b, c, idxs[i - 1], idxs[i])
                    for k2, cval in comp.items():
                        tkey = (objs[:i] + objs[i + 1:],
                                idxs[:i - 1] + (k2,) + idxs[i + 1:])
                        Midq = _identity_block(T, q)
                        add_block(n, q, tkey, key, Midq, cval * parity_sign(i), T, T)
                # face n: absorb last arrow into G (contravariant)
                gn = G.act(objs[-2], objs[-1], idxs[-1])
                tgt_key = (objs[:-1], idxs[:-1])
                M = _tensor_map_q(GradedMap.identity(F.values[objs[0]]), gn,
                                  F.values[objs[0]], G.values[objs[-1]],
                                  F.values[objs[0]], G.values[objs[-2]], q)
                add_block(n, q, tgt_key, key, M, parity_sign(n), T, None)

    dh_m = {k: QMatrix(dims.get((k[0] + 1, k[1]), 0), dims[k], v) for k, v in dh.items()}
    dv_m = {k: QMatrix(dims.get((k[0], k[1] + 1), 0), dims[k], v) for k, v in dv.items()}
    B = DoubleComplex(dims, dh_m, dv_m)
    tot = totalize(B)
    qmax = max((q for (_p, q) in dims), default=0)
    stable = qmax - L + 1
    return tot, stable


def _identity_block(T, q):
    return QMatrix.identity(T.dim(q))


def _tensor_map_q(f, g, Xs, Ys, Xt, Yt, q):
    """Degree-q component of f (x) g on tensor_dg bases (degree-0 maps,
    no Koszul sign)."""
    src = tensor_basis(Xs, Ys, q)
    tgt = tensor_basis(Xt, Yt, q)
    tidx = {t: k for k, t in enumerate(tgt)}
    ent = {}
    for col, (p, i, j) in enumerate(src):
        fM = f.comp(p)
        gM = g.comp(q - p)
        for (i2, si), v in fM.entries.items():
            if si != i:
                continue
            for (j2, sj), w in gM.entries.items():
                if sj != j:
                    continue
                row = tidx.get((p, i2, j2))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + v * w
    return QMatrix(len(tgt), len(src), ent)


def hocolim(F, L):
    """hocolim_I F = F (x)^L_I Q, truncated at bar length L."""
    K = constant_functor(F.category, contravariant=True)
    return bar_tensor(F, K, L)


def holim(F, L):
    """holim_I F = Rhom_I(Q, F) via the cobar model, truncated at L.

    Level n sits in horizontal degree +n and is the sum over length-n
    chains of F(X_n); the differential is the cosimplicial alternating
    sum (augmentation, inner compositions, F-action)."""
    I = F.category
    assert not F.contravariant
    layers = {n: [((objs, idxs), F.values[objs[-1]]) for (objs, idxs) in _chains(I, n)]
              for n in range(L + 1)}
    dims = {}
    offsets = {}
    for n, cells in layers.items():
        for (key, T) in cells:
            for q in T.degrees():
                off = dims.get((n, q), 0)
                offsets[(n, key, q)] = off
                dims[(n, q)] = off + T.dim(q)

    dv = {}
    for n, cells in layers.items():
        sgn = parity_sign(n)
        for (key, T) in cells:
            for q in T.degrees():
                M = T.d(q)
                if M.is_zero():
                    continue
                ro = offsets.get((n, key, q + 1))
                if ro is None:
                    continue
                co = offsets[(n, key, q)]
                cur = dv.setdefault((n, q), {})
                for (i, j), v in M.entries.items():
                    cur[(ro + i, co + j)] = cur.get((ro + i, co + j), Fraction(0)) + sgn * v

    dh = {}

    def add(n, q, tgt_key, src_key, M, sign):
        if M.is_zero():
            return
        ro = offsets.get((n + 1, tgt_key, q))
        co = offsets.get((n, src_key, q))
        if ro is None or co is None:
            return
        cur = dh.setdefault((n, q), {})
        for (i, j), v in M.entries.items():
            cur[(ro + i, co + j)] = cur.get((ro + i, co + j), Fraction(0)) + sign * v

    for n in range(L):
        for (tkey, Ttgt) in layers[n + 1]:
            objs, idxs = tkey
            # delta_0 : drop the first arrow through the augmentation
            skey = (objs[1:], idxs[1:])
            e = I.eps(objs[0], objs[1], idxs[0])
            if e != 0:
                for q in Ttgt.degrees():
                    add(n, q, tkey, skey, QMatrix.identity(Ttgt.dim(q)).scale(e), 1)
            # delta_i : a cochain evaluated on a composed chain
            for i in range(1, n + 1):
                a, b, c = objs[i - 1], objs[i], objs[i + 1]
                comp = I.compose_basis(a, b, c, idxs[i - 1], idxs[i])
                for k2, cval in comp.items():
                    skey = (objs[:i] + objs[i + 1:], idxs[:i - 1] + (k2,) + idxs[i + 1:])
                    for q in Ttgt.degrees():
                        add(n, q, tkey, skey, QMatrix.identity(Ttgt.dim(q)).scale(cval), parity_sign(i))
            # delta_{n+1} : push the cochain value along the last arrow
            skey = (objs[:-1], idxs[:-1])
            f = F.act(objs[-2], objs[-1], idxs[-1])
            for q in f.source.degrees():
                add(n, q, tkey, skey, f.comp(q), parity_sign(n + 1))

    dh_m = {k: QMatrix(dims.get((k[0] + 1, k[1]), 0), dims[k], v) for k, v in dh.items()}
    dv_m = {k: QMatrix(dims.get((k[0], k[1] + 1), 0), dims[k], v) for k, v in dv.items()}
    B = DoubleComplex(dims, dh_m, dv_m)
    tot = totalize(B)
    qmin = min((q for (_p, q) in dims), default=0)
    stable = qmin + L - 1
    return tot, stable


def tau_leq0(X):
    """Canonical truncation: degrees < 0 kept, degree 0 replaced by
    ker d^0, degrees > 0 dropped."""
    K = kernel_basis(X.d(0))
    B = K.basis_matrix()
    dims = {n: X.dim(n) for n in X.degrees() if n < 0}
    if K.dim:
        dims[0] = K.dim
    sp = GradedSpace(dims)
    diffs = {n: X.d(n) for n in X.degrees() if n < -1 and not X.d(n).is_zero()}
    if X.dim(-1) and K.dim:
        # rewrite d^{-1} in the kernel basis: solve B c = d^{-1} column-wise
        cols = {}
        for j in range(X.dim(-1)):
            c = solve(B, X.d(-1).column(j))
            assert c is not None, "image of d^{-1} not inside ker d^0"
            for i, v in c.items():
                cols[(i, j)] = v
        M = QMatrix(K.dim, X.dim(-1), cols)
        if not M.is_zero():
            diffs[-1] = M
    return DGModule(sp, diffs)


def h0(X):
    """Degree-0 cohomology as a GradedSpace."""
    d = X.homology_dim(0)
    return GradedSpace({0: d} if d else {})
