"""Weight-filtered complexes and the quantum/classical formalism:
weight-graded complexes with lower-triangular connecting differentials,
the forgetful reduction, the q-realization, the epsilon-hom cones, and
weight truncations.

A QuantObject is a finite family gr^n of complexes (n >= 0) together
with degree-+1 connecting maps D_{nm}: gr^n -> gr^m for n < m (the
diagonal components vanish: the normal form) satisfying the
componentwise Maurer-Cartan equation, i.e. the total differential d + D
on the direct sum squares to zero.  A FilteredComplex is the same data
presented as one bigraded object with d = sum d_i raising weight by i.
"""

from fractions import Fraction

from .dg import DGModule, GradedMap, GradedSpace, cone
from .linalg import QMatrix, parity_sign


class ClassicObject:
    """A weight-indexed family of complexes, no connecting maps."""

    def __init__(self, grs):
        self.grs = {int(n): X for n, X in grs.items()}
        assert all(n >= 0 for n in self.grs)

    def weights(self):
        return sorted(self.grs)

    def gr(self, n):
        from .dg import zero_module
        return self.grs.get(n) or zero_module()

    def __eq__(self, other):
        if not isinstance(other, ClassicObject):
            return NotImplemented
        if self.weights() != other.weights():
            return False
        for n in self.weights():
            A, B = self.gr(n), other.gr(n)
            if A.space.components != B.space.components or A.differential != B.differential:
                return False
        return True


class QuantObject:
    """Weight-graded complexes with a lower-triangular twist."""

    def __init__(self, grs, D=None):
        self.grs = {int(n): X for n, X in grs.items()}
        self.D = {}
        for (n, m), f in (D or {}).items():
            if f.is_zero():
                continue
            assert n < m, "normal form requires strictly weight-raising components"
            assert f.degree == 1
            self.D[(n, m)] = f
        self._check_mc()

    def weights(self):
        return sorted(self.grs)

    def gr(self, n):
        from .dg import zero_module
        return self.grs.get(n) or zero_module()

    def component(self, n, m):
        f = self.D.get((n, m))
        if f is None:
            return GradedMap.zero(self.gr(n), self.gr(m), 1)
        return f

    def _check_mc(self):
        # (d + D)^2 = 0 componentwise: for every n < m,
        # d_m D_{nm} + D_{nm} d_n + sum_{n<p<m} D_{pm} D_{np} = 0
        for n in self.weights():
            for m in self.weights():
                if not n < m:
                    continue
                f = self.component(n, m)
                acc = f.hom_d()
                for p in self.weights():
                    if n < p < m:
                        acc = acc + self.component(n, p).then(self.component(p, m))
                if not acc.is_zero():
                    raise ValueError("Maurer-Cartan fails on gr^%d -> gr^%d" % (n, m))


def red(X):
    """Forget the connecting differential; idempotent."""
    if isinstance(X, ClassicObject):
        return ClassicObject(dict(X.grs))
    return ClassicObject(dict(X.grs))


def q_realization(X, window):
    """The realizations R_n = (prod_{p >= n} gr^p, d + D) for n in the
    window, together with the chain inclusions q : R_{n+1} -> R_n
    (multiplication by the Novikov variable).  Returns (dict n -> DGModule,
    dict n -> GradedMap R_{n+1} -> R_n)."""
    lo, hi = window
    top = max(X.weights()) if X.weights() else 0
    reals = {}
    offsets = {}
    for n in range(lo, hi + 1):
        ws = [p for p in X.weights() if p >= n]
        dims = {}
        offs = {}
        for p in ws:
            for d in X.gr(p).degrees():
                offs[(p, d)] = dims.get(d, 0)
                dims[d] = dims.get(d, 0) + X.gr(p).dim(d)
        offsets[n] = offs
        diffs = {}
        for d in sorted(dims):
            if dims.get(d + 1, 0) == 0:
                continue
            ent = {}
            for p in ws:
                co = offs.get((p, d))
                if co is None:
                    continue
                M = X.gr(p).d(d)
                ro = offs.get((p, d + 1))
                if ro is not None:
                    for (i, j), v in M.entries.items():
                        ent[(ro + i, co + j)] = ent.get((ro + i, co + j), Fraction(0)) + v
                for q in ws:
                    if q <= p:
                        continue
                    f = X.component(p, q).comp(d)
                    ro2 = offs.get((q, d + 1))
                    if ro2 is None or f.is_zero():
                        continue
                    for (i, j), v in f.entries.items():
                        ent[(ro2 + i, co + j)] = ent.get((ro2 + i, co + j), Fraction(0)) + v
            M = QMatrix(dims.get(d + 1, 0), dims[d], ent)
            if not M.is_zero():
                diffs[d] = M
        reals[n] = DGModule(GradedSpace(dims), diffs)
    qmaps = {}
    for n in range(lo, hi):
        src, tgt = reals[n + 1], reals[n]
        comps = {}
        for d in src.degrees():
            ent = {}
            for p in [p for p in X.weights() if p >= n + 1]:
                co = offsets[n + 1].get((p, d))
                ro = offsets[n].get((p, d))
                if co is None or ro is None:
                    continue
                for i in range(X.gr(p).dim(d)):
                    ent[(ro + i, co + i)] = Fraction(1)
            comps[d] = QMatrix(tgt.dim(d), src.dim(d), ent)
        qmaps[n] = GradedMap(src, tgt, 0, comps)
        assert qmaps[n].is_chain_map()
    return reals, qmaps


def _hom_weight_basis(F, G, n, min_raise):
    """Basis of weight-raising graded maps of internal degree n:
    (wf, p, i, wg, j) for gr^wf(F)^p basis i -> gr^wg(G)^{p+n} basis j
    with wg - wf >= min_raise."""
    out = []
    for wf in F.weights():
        for wg in G.weights():
            if wg - wf < min_raise:
                continue
            Xf, Xg = F.gr(wf), G.gr(wg)
            for p in Xf.degrees():
                for i in range(Xf.dim(p)):
                    for j in range(Xg.dim(p + n)):
                        out.append((wf, p, i, wg, j))
    return out


def hom_quant(F, G, min_raise=0):
    """The twisted hom complex of QuantObjects restricted to components
    raising weight by at least min_raise; differential
    d'f = (d + D_G) f - (-1)^{|f|} f (d + D_F)."""
    degs = set()
    for w in F.weights():
        degs.update(F.gr(w).degrees())
    gdegs = set()
    for w in G.weights():
        gdegs.update(G.gr(w).degrees())
    if not degs or not gdegs:
        return DGModule(GradedSpace({})), {}, {}
    nmin = min(gdegs) - max(degs)
    nmax = max(gdegs) - min(degs)
    bases = {n: _hom_weight_basis(F, G, n, min_raise) for n in range(nmin, nmax + 2)}
    dims = {n: len(b) for n, b in bases.items() if b}
    index = {n: {t: k for k, t in enumerate(b)} for n, b in bases.items()}

    diffs = {}
    for n in range(nmin, nmax + 1):
        src = bases.get(n, [])
        tix = index.get(n + 1, {})
        if not src or not tix:
            continue
        ent = {}
        msign = -parity_sign(n)
        for col, (wf, p, i, wg, j) in enumerate(src):
            # (d_G + D_G) . f
            M = G.gr(wg).d(p + n)
            for (jj, sj), v in M.entries.items():
                if sj != j:
                    continue
                row = tix.get((wf, p, i, wg, jj))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + v
            for wg2 in G.weights():
                if wg2 <= wg:
                    continue
                Dg = G.component(wg, wg2).comp(p + n)
                for (jj, sj), v in Dg.entries.items():
                    if sj != j:
                        continue
                    row = tix.get((wf, p, i, wg2, jj))
                    if row is not None:
                        ent[(row, col)] = ent.get((row, col), Fraction(0)) + v
            # -(-1)^n f . (d_F + D_F)
            M = F.gr(wf).d(p - 1)
            for (ti, si), v in M.entries.items():
                if ti != i:
                    continue
                row = tix.get((wf, p - 1, si, wg, j))
                if row is not None:
                    ent[(row, col)] = ent.get((row, col), Fraction(0)) + msign * v
            for wf2 in F.weights():
                if wf2 >= wf:
                    continue
                Df = F.component(wf2, wf).comp(p - 1)
                for (ti, si), v in Df.entries.items():
                    if ti != i:
                        continue
                    row = tix.get((wf2, p - 1, si, wg, j))
                    if row is not None:
                        ent[(row, col)] = ent.get((row, col), Fraction(0)) + msign * v
        M = QMatrix(len(bases[n + 1]), len(src), ent)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(GradedSpace(dims), diffs), bases, index


def hom_eps(F, G):
    """hom_eps(F, G) = Cone(hom(F, T_{-eps} G) -> hom(F, G)): the
    inclusion of the weight-raising (>= 1) part into the full twisted
    hom complex, coned."""
    H1, b1, i1 = hom_quant(F, G, min_raise=1)
    H0, b0, i0 = hom_quant(F, G, min_raise=0)
    comps = {}
    for n in H1.degrees():
        ent = {}
        for t, col in i1.get(n, {}).items():
            row = i0[n].get(t)
            assert row is not None
            ent[(row, col)] = Fraction(1)
        comps[n] = QMatrix(H0.dim(n), H1.dim(n), ent)
    incl = GradedMap(H1, H0, 0, comps)
    assert incl.is_chain_map()
    return cone(incl)


class FilteredComplex:
    """One bigraded object: dims[(degree, weight)], differential
    components diffs[(i, degree, weight)] raising weight by i >= 0 and
    degree by 1; the total differential squares to zero."""

    def __init__(self, dims, diffs):
        self.dims = {(int(n), int(w)): int(d) for (n, w), d in dims.items() if d}
        assert all(w >= 0 for (_n, w) in self.dims)
        self.diffs = {}
        for (i, n, w), M in diffs.items():
            if M.is_zero():
                continue
            assert i >= 0
            assert M.cols == self.dim(n, w) and M.rows == self.dim(n + 1, w + i)
            self.diffs[(i, n, w)] = M
        self._check()

    def dim(self, n, w):
        return self.dims.get((n, w), 0)

    def max_weight(self):
        return max((w for (_n, w) in self.dims), default=0)

    def d_comp(self, i, n, w):
        M = self.diffs.get((i, n, w))
        if M is None:
            return QMatrix.zero(self.dim(n + 1, w + i), self.dim(n, w))
        return M

    def _check(self):
        shifts = sorted({i for (i, _n, _w) in self.diffs})
        for (n, w) in self.dims:
            for j in range(0, 2 * max(shifts, default=0) + 1):
                acc = QMatrix.zero(self.dim(n + 2, w + j), self.dim(n, w))
                for i in shifts:
                    i2 = j - i
                    if i2 < 0 or i2 not in shifts:
                        continue
                    acc = acc + self.d_comp(i2, n + 1, w + i) @ self.d_comp(i, n, w)
                if not acc.is_zero():
                    raise ValueError("total d^2 fails at (%d, %d), weight shift %d" % (n, w, j))

    def graded_piece(self, k):
        dims = {n: d for (n, w), d in self.dims.items() if w == k}
        diffs = {n: self.d_comp(0, n, k) for (n, w) in self.dims if w == k
                 and not self.d_comp(0, n, k).is_zero()}
        return DGModule(GradedSpace(dims), diffs)

    def truncate(self, k):
        dims = {(n, w): d for (n, w), d in self.dims.items() if w <= k}
        diffs = {(i, n, w): M for (i, n, w), M in self.diffs.items()
                 if w <= k and w + i <= k}
        return FilteredComplex(dims, diffs)

    def total(self):
        """The underlying plain complex (sum over weights)."""
        offs = {}
        dims = {}
        for (n, w) in sorted(self.dims):
            offs[(n, w)] = dims.get(n, 0)
            dims[n] = dims.get(n, 0) + self.dim(n, w)
        diffs = {}
        for (i, n, w), M in self.diffs.items():
            cur = diffs.setdefault(n, {})
            ro, co = offs[(n + 1, w + i)], offs[(n, w)]
            for (r, c), v in M.entries.items():
                cur[(ro + r, co + c)] = cur.get((ro + r, co + c), Fraction(0)) + v
        mats = {n: QMatrix(dims.get(n + 1, 0), dims[n], ent) for n, ent in diffs.items()}
        return DGModule(GradedSpace(dims), mats)


def tensor_filtered(X, Y):
    """Tensor of filtered complexes: weights add, Koszul signs on the
    degree; diagonal-weight differential components combine."""
    bases = {}
    for (n1, w1), d1 in X.dims.items():
        for (n2, w2), d2 in Y.dims.items():
            key = (n1 + n2, w1 + w2)
            bases.setdefault(key, []).extend(
                ((n1, w1, i), (n2, w2, j)) for i in range(d1) for j in range(d2))
    dims = {k: len(v) for k, v in bases.items()}
    index = {k: {t: i for i, t in enumerate(v)} for k, v in bases.items()}
    diffs = {}
    shifts = sorted({i for (i, _n, _w) in list(X.diffs) + list(Y.diffs)})
    for (n, w), basis in bases.items():
        for i in shifts:
            ent = {}
            tix = index.get((n + 1, w + i), {})
            if not tix:
                continue
            for col, ((n1, w1, b1), (n2, w2, b2)) in enumerate(basis):
                Mx = X.d_comp(i, n1, w1)
                for (r, c), v in Mx.entries.items():
                    if c != b1:
                        continue
                    row = tix.get(((n1 + 1, w1 + i, r), (n2, w2, b2)))
                    if row is not None:
                        ent[(row, col)] = ent.get((row, col), Fraction(0)) + v
                sgn = parity_sign(n1)
                My = Y.d_comp(i, n2, w2)
                for (r, c), v in My.entries.items():
                    if c != b2:
                        continue
                    row = tix.get(((n1, w1, b1), (n2 + 1, w2 + i, r)))
                    if row is not None:
                        ent[(row, col)] = ent.get((row, col), Fraction(0)) + sgn * v
            M = QMatrix(dims.get((n + 1, w + i), 0), dims[(n, w)], ent)
            if not M.is_zero():
                diffs[(i, n, w)] = M
    return FilteredComplex(dims, diffs)


def quant_to_filtered(X):
    """Repackage a QuantObject as a FilteredComplex (basis order: the
    graded pieces')."""
    dims = {}
    for w in X.weights():
        for n in X.gr(w).degrees():
            dims[(n, w)] = X.gr(w).dim(n)
    diffs = {}
    for w in X.weights():
        for n in X.gr(w).degrees():
            M = X.gr(w).d(n)
            if not M.is_zero():
                diffs[(0, n, w)] = M
    for (n0, m0), f in X.D.items():
        for p, M in f.components.items():
            if not M.is_zero():
                diffs[(m0 - n0, p, n0)] = M
    return FilteredComplex(dims, diffs)


def tower_holim_acyclic(X, window=None):
    """Acyclicity of the homotopy projective limit of the tower
    gr^0 <- gr^1 <- ... holds for sheaf-theoretic examples but not for
    generic weight-graded objects, so it is exposed as a checkable
    predicate rather than enforced.  With finitely many weights the
    tower of realizations R_n = (prod_{p >= n} gr^p, d + D) is
    eventually zero, so its homotopy limit is the bottom realization;
    the predicate asks that it be acyclic."""
    ws = X.weights()
    if not ws:
        return True
    lo = min(ws) if window is None else window[0]
    reals, _ = q_realization(X, (lo, lo))
    return reals[lo].is_acyclic()
