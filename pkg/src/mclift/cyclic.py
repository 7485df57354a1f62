"""Cocyclic modules, Connes operators, cyclic cohomology, the
periodicity operator, c1-localization, the diamond product, and the
deformation complex Cone(omega) of a traced algebra.

The concrete model: for an algebra A, level n holds the functionals on
A^{(x)(n+1)}.  Cofaces multiply adjacent arguments (with the wrap-around
face), codegeneracies insert the unit, and the rotation carries the sign
(-1)^n fixed in signs.py.  b is the alternating coface sum; the Connes
boundary is B = N s (1 - lambda) with s the dual extra degeneracy
(evaluation with a fresh unit in front) and N the rotation norm.

Two models of HC are computed and compared: the lambda-invariant
subcomplex with b (the default for dimensions) and the (b, B) total
complex, on which the periodicity map S is the canonical index shift.
"""

import itertools
from fractions import Fraction

from .linalg import QMatrix, homology_dim, kernel_basis, parity_sign, rank, solve
from .dg import DGModule, GradedMap, GradedSpace, cone
from .hochschild import (Algebra, HochCochain, TracedAlgebra,
                         hochschild_differential, map_I)
from .signs import lambda_sign


class CocyclicModule:
    """Levelwise spaces with cofaces, codegeneracies and rotation.

    dims[n] for 0 <= n <= top; cofaces[(n, i)]: level n -> n+1 for
    0 <= i <= n+1; codegens[(n, j)]: level n -> n-1 for 0 <= j <= n-1;
    lam[n]: level n -> level n.  b^2 = 0 and lam^{n+1} = 1 are verified.

    complete=True declares that every level above top is genuinely zero
    (a finite-length module); otherwise the data is a window of a larger
    object and computations refuse to look past top - 1.
    """

    def __init__(self, dims, cofaces, codegens, lam, complete=False):
        self.dims = list(dims)
        self.top = len(dims) - 1
        self.cofaces = cofaces
        self.codegens = codegens
        self.lam = lam
        self.complete = complete
        for n in range(self.top):
            bb = self.b(n + 1) @ self.b(n)
            if not bb.is_zero():
                raise ValueError("b^2 != 0 at level %d" % n)
        for n in range(self.top + 1):
            L = self.lam[n]
            P = QMatrix.identity(self.dims[n])
            for _ in range(n + 1):
                P = L @ P
            if P != QMatrix.identity(self.dims[n]):
                raise ValueError("rotation does not have order %d at level %d" % (n + 1, n))

    def dim(self, n):
        return self.dims[n] if 0 <= n <= self.top else 0

    def coface(self, n, i):
        M = self.cofaces.get((n, i))
        return M if M is not None else QMatrix.zero(self.dim(n + 1), self.dim(n))

    def b(self, n):
        """Alternating sum of all cofaces (with the wrap term)."""
        acc = QMatrix.zero(self.dim(n + 1), self.dim(n))
        for i in range(n + 2):
            acc = acc + self.coface(n, i).scale(parity_sign(i))
        return acc

    def b_prime(self, n):
        acc = QMatrix.zero(self.dim(n + 1), self.dim(n))
        for i in range(n + 1):
            acc = acc + self.coface(n, i).scale(parity_sign(i))
        return acc

    def rotation(self, n):
        if n > self.top:
            return QMatrix.zero(0, 0)
        return self.lam[n]

    def norm(self, n):
        acc = QMatrix.zero(self.dim(n), self.dim(n))
        P = QMatrix.identity(self.dim(n))
        for _ in range(n + 1):
            acc = acc + P
            P = self.rotation(n) @ P
        return acc

    def extra_degeneracy(self, n):
        """s: level n+1 -> level n, dual to prepending the unit."""
        if self.dim(n + 1) == 0:
            return QMatrix.zero(self.dim(n), 0)
        M = self.codegens.get((n + 1, -1))
        if M is not None:
            return M
        raise ValueError("module carries no extra degeneracy at level %d" % (n + 1,))

    def connes_B(self, n):
        """B: level n+1 -> level n, namely N s (1 - lambda)."""
        one = QMatrix.identity(self.dim(n + 1))
        return self.norm(n) @ (self.extra_degeneracy(n) @ (one - self.lam[n + 1]))

    def truncate(self, L):
        dims = self.dims[:L + 1]
        cofaces = {(n, i): M for (n, i), M in self.cofaces.items() if n + 1 <= L}
        codegens = {(n, j): M for (n, j), M in self.codegens.items() if n <= L}
        lam = {n: self.lam[n] for n in range(L + 1)}
        return CocyclicModule(dims, cofaces, codegens, lam)


def algebra_cocyclic_module(algebra, n_max):
    """The dual cocyclic module of an algebra: level n = functionals on
    A^{(x)(n+1)}, with basis indexed by argument tuples."""
    d = algebra.dim
    dims = [d ** (n + 1) for n in range(n_max + 1)]

    def tuples(n):
        return list(itertools.product(range(d), repeat=n + 1))

    index = {n: {t: k for k, t in enumerate(tuples(n))} for n in range(n_max + 1)}

    cofaces = {}
    codegens = {}
    lam = {}
    for n in range(n_max + 1):
        src = tuples(n)
        # rotation: (lam psi)(a_0..a_n) = sign * psi(a_n, a_0, .., a_{n-1});
        # on the dual basis this sends the functional delta_t to
        # sign * delta_{rot^{-1} t}
        ent = {}
        sgn = lambda_sign(n)
        for col, t in enumerate(src):
            rt = t[1:] + (t[0],)
            ent[(index[n][rt], col)] = Fraction(sgn)
        lam[n] = QMatrix(dims[n], dims[n], ent)
        if n + 1 <= n_max:
            tgt = tuples(n + 1)
            for i in range(n + 2):
                ent = {}
                for row, t in enumerate(tgt):
                    if i <= n:
                        prod = algebra.basis_product(t[i], t[i + 1])
                        rest_pre, rest_post = t[:i], t[i + 2:]
                        for k, c in prod.items():
                            col = index[n][rest_pre + (k,) + rest_post]
                            ent[(row, col)] = ent.get((row, col), Fraction(0)) + c
                    else:
                        prod = algebra.basis_product(t[n + 1], t[0])
                        for k, c in prod.items():
                            col = index[n][(k,) + t[1:n + 1]]
                            ent[(row, col)] = ent.get((row, col), Fraction(0)) + c
                cofaces[(n, i)] = QMatrix(dims[n + 1], dims[n], ent)
        if n >= 1:
            # ordinary codegeneracies (dual to inserting the unit after
            # slot j) and the extra degeneracy j = -1 (unit in front)
            for j in range(-1, n):
                codegens[(n, j)] = _codegen_matrix(algebra, n, j, index)
    return CocyclicModule(dims, cofaces, codegens, lam)


def _codegen_matrix(algebra, n, j, index):
    """sigma_j: level n -> level n-1 on dual bases: the dual of inserting
    the unit at position j+1 of an (n)-tuple."""
    d = algebra.dim
    src_dim = d ** (n + 1)
    tgt_dim = d ** n
    ent = {}
    for t, col in index[n - 1].items():
        # delta_t pulls back to the functional psi -> psi(..., 1, ...)
        for u, c in algebra.unit.items():
            big = t[:j + 1] + (u,) + t[j + 1:]
            row = index[n][big]
            # entries of the matrix from level n to n-1: (sigma psi)(t) =
            # psi(big); dual: column = basis functional at level n
            ent[(col, row)] = ent.get((col, row), Fraction(0)) + c
    return QMatrix(tgt_dim, src_dim, ent)


def constant_cocyclic_module(n_max):
    """The dual module of the ground field: every level Q."""
    from .hochschild import truncated_polynomial_algebra
    return algebra_cocyclic_module(truncated_polynomial_algebra(1), n_max)


def connes_operators(module, n):
    """(b, lambda, N, B) at level n (B requires level n+1)."""
    return (module.b(n), module.rotation(n), module.norm(n),
            module.connes_B(n) if n + 1 <= module.top else None)


def lambda_complex(module):
    """The Connes lambda-complex: the rotation-invariant subcomplex with
    b (which restricts, since b' (1 - lambda) = (1 - lambda) b).  Also
    returns the per-level inclusion matrices, whose columns are the
    invariant basis vectors in the ambient level."""
    bases = {}
    dims = {}
    for n in range(module.top + 1):
        one = QMatrix.identity(module.dim(n))
        K = kernel_basis(one - module.rotation(n))
        bases[n] = K.basis_matrix()
        if K.dim:
            dims[n] = K.dim
    diffs = {}
    for n in range(module.top):
        if dims.get(n, 0) == 0 or dims.get(n + 1, 0) == 0:
            continue
        Bn = module.b(n) @ bases[n]
        ent = {}
        for j in range(bases[n].cols):
            c = solve(bases[n + 1], Bn.column(j))
            assert c is not None, "b does not preserve lambda-invariants"
            for i, v in c.items():
                ent[(i, j)] = v
        M = QMatrix(bases[n + 1].cols, bases[n].cols, ent)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(GradedSpace(dims), diffs), bases


def hc_dims_lambda(module, n_max):
    """Cyclic cohomology dimensions from the lambda-model.  Honest in
    degrees n <= top - 1."""
    assert module.complete or n_max <= module.top - 1, "build the module one level deeper"
    C, _ = lambda_complex(module)
    return [C.homology_dim(n) for n in range(n_max + 1)]


def underlying_complex(module):
    """The total cochain complex of the cocyclic object: levels with b,
    as a DGModule (level n in degree n)."""
    dims = {n: module.dim(n) for n in range(module.top + 1)}
    diffs = {}
    for n in range(module.top):
        M = module.b(n)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(GradedSpace(dims), diffs)


class BBTotal:
    """The (b, B) total complex Tot^n = (+)_{j >= 0} level(n - 2j)."""

    def __init__(self, module, n_top):
        self.module = module
        self.n_top = n_top
        self.cells = {}
        self.offsets = {}
        dims = {}
        for n in range(n_top + 1):
            off = 0
            for j in itertools.count():
                lvl = n - 2 * j
                if lvl < 0:
                    break
                if lvl > module.top:
                    continue
                self.offsets[(n, j)] = off
                off += module.dim(lvl)
            dims[n] = off
        self.dims = dims

    def dim(self, n):
        return self.dims.get(n, 0)

    def d(self, n):
        ent = {}
        for (nn, j), co in self.offsets.items():
            if nn != n:
                continue
            lvl = n - 2 * j
            # b component stays at the same j
            ro = self.offsets.get((n + 1, j))
            if ro is not None and lvl + 1 <= self.module.top:
                for (i, k), v in self.module.b(lvl).entries.items():
                    ent[(ro + i, co + k)] = ent.get((ro + i, co + k), Fraction(0)) + v
            # B component moves to j + 1
            ro = self.offsets.get((n + 1, j + 1))
            if ro is not None and lvl - 1 >= 0:
                for (i, k), v in self.module.connes_B(lvl - 1).entries.items():
                    ent[(ro + i, co + k)] = ent.get((ro + i, co + k), Fraction(0)) + v
        return QMatrix(self.dim(n + 1), self.dim(n), ent)

    def shift_S(self, n):
        """The periodicity inclusion Tot^n -> Tot^{n+2} (slot j -> j+1)."""
        ent = {}
        for (nn, j), co in self.offsets.items():
            if nn != n:
                continue
            ro = self.offsets.get((n + 2, j + 1))
            if ro is None:
                continue
            lvl = n - 2 * j
            for i in range(self.module.dim(lvl)):
                ent[(ro + i, co + i)] = Fraction(1)
        return QMatrix(self.dim(n + 2), self.dim(n), ent)

    def cohomology_basis(self, n):
        """Representatives of H^n: columns of a matrix, plus the data
        needed to express arbitrary cocycles in this basis."""
        Z = kernel_basis(self.d(n)).basis_matrix()
        Bimg = self.d(n - 1) if n >= 1 else QMatrix.zero(self.dim(n), 0)
        return Z, Bimg


def hc_dims_bb(module, n_max):
    """Cyclic cohomology dims from the (b, B) total complex.  Honest for
    n <= top - 1, or any n for a complete (finite-length) module."""
    assert module.complete or n_max <= module.top - 1
    T = BBTotal(module, n_max + 1)
    return [homology_dim(T.d(n - 1) if n else QMatrix.zero(T.dim(0), 0), T.d(n))
            for n in range(n_max + 1)]


def periodicity_S_matrix(module, n, n_max):
    """The induced map S: HC^n -> HC^{n+2} (bb-model) as a matrix in the
    chosen cohomology bases."""
    assert n + 2 <= n_max and (module.complete or n_max <= module.top - 1)
    T = BBTotal(module, n_max + 1)
    Zn = kernel_basis(T.d(n)).basis_matrix()
    Zt = kernel_basis(T.d(n + 2)).basis_matrix()
    Bt = T.d(n + 1)
    # express S(z) in H^{n+2}: coordinates in [Zt | Bt], keep the Zt part,
    # then reduce modulo the coboundary coordinates of the Zt basis itself
    S = T.shift_S(n)
    # build the quotient: solve [Zt Bt] x = S z
    cols = {}
    amb = T.dim(n + 2)
    big = QMatrix(amb, Zt.cols + Bt.cols,
                  {**{(i, j): v for (i, j), v in Zt.entries.items()},
                   **{(i, Zt.cols + j): v for (i, j), v in Bt.entries.items()}})
    for j in range(Zn.cols):
        z = S.apply(Zn.column(j))
        x = solve(big, z)
        assert x is not None, "S image not a cocycle"
        for i, v in x.items():
            if i < Zt.cols and v != 0:
                cols[(i, j)] = v
    return QMatrix(Zt.cols, Zn.cols, cols), Zn, Zt, T


def hc_class_rank_through(module, n_from, n_to, n_max):
    """rank of the composite S^k : HC^{n_from} -> HC^{n_to} in the
    bb-model (n_to - n_from even)."""
    assert (n_to - n_from) % 2 == 0 and n_to >= n_from
    if n_from == n_to:
        T = BBTotal(module, n_max + 1)
        return homology_dim(T.d(n_from - 1) if n_from else QMatrix.zero(T.dim(0), 0),
                            T.d(n_from))
    # compose the S matrices on cohomology step by step; bases are chosen
    # consistently by periodicity_S_matrix
    M = None
    for n in range(n_from, n_to, 2):
        Sn, _, _, _ = periodicity_S_matrix(module, n, n_max)
        M = Sn if M is None else Sn @ M
    # rank of M modulo coboundaries: the target basis is the full cocycle
    # basis, so quotient by expressing coboundary coordinates
    T = BBTotal(module, n_max + 1)
    Zt = kernel_basis(T.d(n_to)).basis_matrix()
    Bt = T.d(n_to - 1)
    # coboundary coordinates inside the Zt basis
    ent = {}
    for j in range(Bt.cols):
        x = solve(Zt, Bt.column(j))
        assert x is not None
        for i, v in x.items():
            ent[(i, j)] = v
    Bcoords = QMatrix(Zt.cols, Bt.cols, ent)
    both = QMatrix(Zt.cols, M.cols + Bcoords.cols,
                   {**{(i, j): v for (i, j), v in M.entries.items()},
                    **{(i, M.cols + j): v for (i, j), v in Bcoords.entries.items()}})
    return rank(both) - rank(Bcoords)


class NotStabilized(Exception):
    def __init__(self, parity, trace):
        super().__init__("c1 localization not stabilized in window (parity %d): %r"
                         % (parity, trace))
        self.parity = parity
        self.trace = trace


def localize_c1(module, n_max):
    """Stabilized 2-periodic dimensions under iterating the periodicity
    map, per parity, with the first-stable index as certificate.

    For each parity the trace records dim im(S^k : HC^{t-2k} -> HC^t)
    with t the top window degree of that parity; stabilization means two
    consecutive entries agree and the value persists to the window edge.
    """
    out = {}
    for parity in (0, 1):
        t = n_max if n_max % 2 == parity else n_max - 1
        if t < 0:
            out[parity] = (0, 0, [])
            continue
        trace = []
        for k in itertools.count():
            a = t - 2 * k
            if a < 0:
                break
            trace.append(hc_class_rank_through(module, a, t, n_max))
        cert = None
        for k in range(1, len(trace)):
            if trace[k] == trace[k - 1] and all(x == trace[k] for x in trace[k:]):
                cert = k
                break
        if cert is None:
            if len(trace) == 1:
                cert = 0
            else:
                raise NotStabilized(parity, trace)
        out[parity] = (trace[cert], cert, trace)
    return {"even": out[0][0], "odd": out[1][0],
            "certificate": {"even": out[0][1], "odd": out[1][1]},
            "trace": {"even": out[0][2], "odd": out[1][2]}}


def diamond(X, Y):
    """Levelwise tensor with the diagonal cocyclic structure."""
    top = min(X.top, Y.top)
    dims = [X.dim(n) * Y.dim(n) for n in range(top + 1)]

    def kron(A, B):
        ent = {}
        bc, br = B.cols, B.rows
        for (i, j), v in A.entries.items():
            for (k, l), w in B.entries.items():
                ent[(i * br + k, j * bc + l)] = v * w
        return QMatrix(A.rows * br, A.cols * bc, ent)

    cofaces = {}
    for n in range(top):
        for i in range(n + 2):
            cofaces[(n, i)] = kron(X.coface(n, i), Y.coface(n, i))
    codegens = {}
    for (n, j), M in X.codegens.items():
        if n <= top and (n, j) in Y.codegens:
            codegens[(n, j)] = kron(M, Y.codegens[(n, j)])
    lam = {n: kron(X.rotation(n), Y.rotation(n)) for n in range(top + 1)}
    return CocyclicModule(dims, cofaces, codegens, lam)


# ---------------------------------------------------------------------------
# the deformation complex of a traced algebra
# ---------------------------------------------------------------------------

def hochschild_complex_module(algebra, n_max):
    """The full (unnormalized) Hochschild cochain complex as a DGModule,
    levels 0..n_max in matching cohomological degrees."""
    d = algebra.dim

    def basis(n):
        return [(out, args) for out in range(d)
                for args in itertools.product(range(d), repeat=n)]

    dims = {n: d ** (n + 1) for n in range(n_max + 1)}
    index = {n: {t: k for k, t in enumerate(basis(n))} for n in range(n_max + 1)}
    diffs = {}
    for n in range(n_max):
        ent = {}
        for (out, args), col in index[n].items():
            f = HochCochain(d, n, {(out, args): 1})
            bf = hochschild_differential(f, algebra)
            for (o2, a2), c in bf.values.items():
                ent[(index[n + 1][(o2, a2)], col)] = c
        M = QMatrix(dims[n + 1], dims[n], ent)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(GradedSpace(dims), diffs), index


def omega_map(traced, n_max):
    """omega : Hoch -> Hochcyc, the trace comparison map f -> I(f).

    The target is the total cochain complex of the cocyclic object
    (levels with b); I intertwines the two b's on the nose, which is the
    chain-map property the deformation complex needs.  The symmetrized
    variants (norm-averaged or coinvariant-projected I) fail the
    chain-map property in any fixed sign table because of the
    wrap-around face, so the comparison is taken in this model; on
    multiplication cochains the image is rotation-invariant anyway,
    which is the trace axiom the tests assert."""
    A = traced.algebra
    H, hidx = hochschild_complex_module(A, n_max)
    module = algebra_cocyclic_module(A, n_max)
    C = underlying_complex(module)
    d = A.dim
    comps = {}
    for n in range(n_max + 1):
        if C.dim(n) == 0 or H.dim(n) == 0:
            continue
        ent = {}
        tuples = list(itertools.product(range(d), repeat=n + 1))
        tindex = {t: k for k, t in enumerate(tuples)}
        for (out, args), col in hidx[n].items():
            f = HochCochain(d, n, {(out, args): 1})
            If = map_I(f, traced)
            for a, c in If.values.items():
                ent[(tindex[a], col)] = c
        M = QMatrix(C.dim(n), H.dim(n), ent)
        if not M.is_zero():
            comps[n] = M
    return GradedMap(H, C, 0, comps), H, C


def deformation_complex(traced, n_max=4):
    """Cone of the trace comparison map omega, with its homology.

    With a zero trace omega vanishes and the cone splits.  The chain-map
    property of omega is re-verified inside cone()."""
    om, H, C = omega_map(traced, n_max)
    return cone(om), om, H, C


def cyclic_cohomology(algebra, trace, n_max):
    """HC^n dims for 0 <= n <= n_max, lambda-model (the default), with
    the (b, B)-model comparison.  The trace fixes the traced-algebra
    interface; the dual cocyclic module itself does not depend on it."""
    if trace is not None:
        TracedAlgebra(algebra, trace)  # validates symmetry
    module = algebra_cocyclic_module(algebra, n_max + 1)
    lam = hc_dims_lambda(module, n_max)
    bb = hc_dims_bb(module, n_max)
    assert lam == bb, "the two cyclic models disagree"
    return lam


def periodicity_S(algebra, n, n_max, trace=None):
    """The induced matrix of S : HC^n -> HC^{n+2} on the (b, B) model."""
    module = algebra_cocyclic_module(algebra, n_max + 1)
    S, _, _, _ = periodicity_S_matrix(module, n, n_max)
    return S
