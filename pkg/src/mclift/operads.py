"""Asymmetric and circular operads over Q, quasi-free presentations with
a symbolic differential calculus on decorated planar trees, the curved
A-infinity presentation, endomorphism operads of (traced) algebras,
Kaehler differentials, and derivation complexes.

Basis elements of a free operad are decorated trees: a planar tree
encoding together with the tuple of generator names at its vertices in
depth-first order.  The cyclic part is spanned by composites
[mu; T_1, ..., T_s]: a cyclic generator with noncyclic decorated trees
(or the unit "*") plugged into its s slots.  The differential calculus
runs on plain slot tuples; rotation-invariance of the cyclic generators
is a property of maps into concrete operads (checked there) and of the
invariant subspaces computed by normalize(), never an identification
inside the calculus.

Orientation convention: a decorated tree stands for the tensor product
of its generators in depth-first order; every operation computes the
Koszul sign of the permutation from its natural tensor order to the
result's depth-first order.  Generator degrees drive all signs; the
insertion table is the Maurer-Cartan one from signs.py.

The presentation file format (JSON, shared with the CLI):

    {"generators": [{"name": .., "arity": .., "cyclic": bool,
                     "degree": .., "weight": ..}, ...],
     "differential": {gen: [[coeff, key...], ...]}}

with noncyclic keys ["nc", encoding, [gens...]] and cyclic keys
["cy", mu, [slot trees...]] (slot tree = ["*"] or [enc, [gens...]]).
"""

import itertools
from fractions import Fraction

from .hochschild import (Algebra, CyclicCochain, HochCochain, TracedAlgebra,
                         compose_at)
from .linalg import QMatrix, parity_sign, qf
from .signs import mc_insertion_sign
from .trees import LEAF, PlanarTree, corolla, enumerate_trees, parse_tree


class Gen:
    """Operad generator.  For cyclic generators, chi is the character of
    the one-step slot rotation (+1 invariant; -1 only possible for even
    slot counts); canonical_cyclic multiplies the Koszul sign by chi per
    rotation step when computing invariant representatives."""

    __slots__ = ("name", "arity", "cyclic", "degree", "weight", "chi")

    def __init__(self, name, arity, cyclic, degree, weight, chi=1):
        self.name = name
        self.arity = int(arity)
        self.cyclic = bool(cyclic)
        self.degree = int(degree)
        self.weight = int(weight)
        self.chi = int(chi)
        assert self.weight >= 0
        assert self.chi in (1, -1)
        if self.cyclic and self.arity % 2:
            assert self.chi == 1, "odd slot count forces a trivial character"

    def __repr__(self):
        return "Gen(%s/%d%s, deg %d, wt %d)" % (
            self.name, self.arity, " cyc" if self.cyclic else "", self.degree, self.weight)


UNIT_KEY = ("nc", "*", ())


def nc_key(tree, gens):
    return ("nc", tree.encoding if isinstance(tree, PlanarTree) else tree, tuple(gens))


def cy_key(mu, slots):
    return ("cy", mu, tuple(slots))


def is_cyclic_key(key):
    return key[0] == "cy"


class FormalSum(dict):
    """Sparse Q-linear combination of basis keys."""

    def add(self, key, coeff):
        w = self.get(key, Fraction(0)) + coeff
        if w == 0:
            self.pop(key, None)
        else:
            self[key] = w
        return self

    def add_sum(self, other, coeff=Fraction(1)):
        for k, c in other.items():
            self.add(k, c * coeff)
        return self

    def is_zero(self):
        return not self

    @classmethod
    def single(cls, key, coeff=Fraction(1)):
        s = cls()
        s.add(key, qf(coeff))
        return s


def koszul_sort_sign(tagged):
    """Koszul sign of sorting (tag, degree) pairs by tag with a stable
    bubble sort; tags are distinct integers."""
    items = list(tagged)
    sign = 1
    for i in range(len(items)):
        for j in range(len(items) - 1 - i):
            if items[j][0] > items[j + 1][0]:
                if items[j][1] % 2 and items[j + 1][1] % 2:
                    sign = -sign
                items[j], items[j + 1] = items[j + 1], items[j]
    return sign


class _TNode:
    """Mutable decorated tree used internally for sign bookkeeping."""

    __slots__ = ("tag", "slots")

    def __init__(self, tag, slots):
        self.tag = tag
        self.slots = slots  # list of _TNode or LEAF

    def dfs(self, out):
        out.append(self.tag)
        for s in self.slots:
            if s is not LEAF:
                s.dfs(out)
        return out

    def to_tree(self):
        return PlanarTree([LEAF if s is LEAF else s.to_tree() for s in self.slots])


def _build_tnode(tree, tags):
    it = iter(range(len(tags)))

    def rec(node):
        tag = tags[next(it)]
        slots = []
        for s in node.slots:
            slots.append(LEAF if s == LEAF else rec(s))
        return _TNode(tag, slots)

    if tree.is_unit:
        return None
    return rec(tree)


def _graft_tnode(base, items):
    """Replace the leaves of base (or the unit) by items (tnodes/LEAF)."""
    items = list(items)
    if base is None:
        assert len(items) == 1
        return items[0]
    it = iter(items)

    def rec(node):
        slots = []
        for s in node.slots:
            if s is LEAF:
                slots.append(next(it))
            else:
                slots.append(rec(s))
        return _TNode(node.tag, slots)

    return rec(base)


def _replace_vertex_tnode(root, position, repl, child_map):
    """Replace the vertex with DFS position `position` by the tnode repl
    (or None = unit), grafting the vertex's former slots into repl's
    leaves in order."""
    counter = [-1]

    def rec(node):
        counter[0] += 1
        me = counter[0]
        if me == position:
            former = []
            for s in node.slots:
                former.append(LEAF if s is LEAF else rec_copy(s))
            return _graft_tnode(repl, former)
        slots = []
        for s in node.slots:
            slots.append(LEAF if s is LEAF else rec(s))
        return _TNode(node.tag, slots)

    def rec_copy(node):
        counter[0] += 1
        return _TNode(node.tag, [LEAF if s is LEAF else rec_copy(s) for s in node.slots])

    return rec(root)


class QuasiFreePresentation:
    """Generators with a differential given by formal sums of decorated
    trees; d^2 = 0 on generators is verified on request (and by
    mc_operad() on construction for the curved presentation)."""

    MU_PREFIX_SHIFT = 1  # trace-vertex suspension parity; see signs.py

    def __init__(self, generators, differential=None, check=True):
        self.gens = {}
        for g in generators:
            assert g.name not in self.gens, "duplicate generator %s" % g.name
            self.gens[g.name] = g
        self.differential = {name: FormalSum() for name in self.gens}
        for name, s in (differential or {}).items():
            assert name in self.gens
            self.differential[name] = s
        if check:
            for name, s in self.differential.items():
                self._check_term_shapes(name, s)

    def _check_term_shapes(self, name, s):
        g = self.gens[name]
        for key in s:
            if g.cyclic:
                assert is_cyclic_key(key), "cyclic generator with noncyclic differential"
                assert self.cy_inputs(key) == g.arity
                assert self.key_degree(key) == g.degree + 1, (name, key)
            else:
                assert not is_cyclic_key(key)
                assert parse_tree(key[1]).n_inputs == g.arity
                assert self.key_degree(key) == g.degree + 1, (name, key)

    def gen(self, name):
        return self.gens[name]

    def key_degree(self, key):
        if is_cyclic_key(key):
            _, mu, slots = key
            d = self.gens[mu].degree
            for sl in slots:
                if sl != "*":
                    d += sum(self.gens[g].degree for g in sl[1])
            return d
        return sum(self.gens[g].degree for g in key[2])

    def key_weight(self, key):
        if is_cyclic_key(key):
            _, mu, slots = key
            w = self.gens[mu].weight
            for sl in slots:
                if sl != "*":
                    w += sum(self.gens[g].weight for g in sl[1])
            return w
        return sum(self.gens[g].weight for g in key[2])

    def cy_inputs(self, key):
        _, mu, slots = key
        n = 0
        for sl in slots:
            n += 1 if sl == "*" else parse_tree(sl[0]).n_inputs
        return n

    # -- canonicalization of cyclic keys ---------------------------------

    def canonical_cyclic(self, key):
        """Rotate the slot tuple to its lexicographically least position;
        returns (key, sign) or None when the rotation sign kills it."""
        _, mu, slots = key
        s = len(slots)
        degs = []
        for sl in slots:
            degs.append(0 if sl == "*" else sum(self.gens[g].degree for g in sl[1]))

        if s == 0:
            return key, 1

        def slot_sort_key(tup):
            return tuple(("", ()) if sl == "*" else (sl[0], tuple(sl[1])) for sl in tup)

        best = None
        seen = {}
        sign = 1
        cur = tuple(slots)
        cdegs = list(degs)
        for r in range(s):
            cand = (cur, sign)
            if cur in seen and seen[cur] != sign:
                return None  # rotation stabilizer acts by -1
            seen[cur] = sign
            if best is None or slot_sort_key(cur) < slot_sort_key(best[0]):
                best = cand
            # rotate by one: move first block past the rest
            d0 = cdegs[0]
            rest = sum(cdegs[1:])
            if d0 % 2 and rest % 2:
                sign = -sign
            sign *= self.gens[mu].chi
            cur = cur[1:] + (cur[0],)
            cdegs = cdegs[1:] + [cdegs[0]]
        return cy_key(mu, best[0]), best[1]

    def normalize(self, s):
        out = FormalSum()
        for key, c in s.items():
            if is_cyclic_key(key):
                canon = self.canonical_cyclic(key)
                if canon is None:
                    continue
                out.add(canon[0], c * canon[1])
            else:
                out.add(key, c)
        return out

    # -- structural operations with signs --------------------------------

    def _tags_degrees_nc(self, key):
        return [self.gens[g].degree for g in key[2]]

    def graft_nc(self, xkey, i, ykey):
        """x o_i y on decorated trees (1-based slot), with Koszul sign.
        Returns FormalSum."""
        _, xenc, xgens = xkey
        _, yenc, ygens = ykey
        xt, yt = parse_tree(xenc), parse_tree(yenc)
        assert 1 <= i <= xt.n_inputs
        if xt.is_unit:
            return FormalSum.single(ykey)
        nx = len(xgens)
        xnode = _build_tnode(xt, list(range(nx)))
        ynode = _build_tnode(yt, list(range(nx, nx + len(ygens))))
        items = [LEAF] * xt.n_inputs
        items[i - 1] = ynode if ynode is not None else LEAF
        res = _graft_tnode(xnode, items)
        degs = list(self._tags_degrees_nc(xkey)) + list(self._tags_degrees_nc(ykey))
        order = res.dfs([])
        sign = koszul_sort_sign([(t, degs[t]) for t in order])
        all_names = list(xgens) + list(ygens)
        gens = tuple(all_names[t] for t in order)
        return FormalSum.single(nc_key(res.to_tree(), gens), sign)

    def replace_vertex_nc(self, key, position, repl_sum):
        """Substitute a formal sum of decorated trees (or unit) for the
        vertex at DFS `position`; Leibniz prefix sign NOT included."""
        _, enc, gens = key
        t = parse_tree(enc)
        nx = len(gens)
        out = FormalSum()
        xdegs = self._tags_degrees_nc(key)
        for rkey, rc in repl_sum.items():
            _, renc, rgens = rkey
            rt = parse_tree(renc)
            xnode = _build_tnode(t, list(range(nx)))
            rnode = _build_tnode(rt, list(range(nx, nx + len(rgens))))
            res = _replace_vertex_tnode(xnode, position, rnode, None)
            if res is None:
                # whole tree collapsed to the unit
                out.add(UNIT_KEY, rc)
                continue
            rdegs = [self.gens[g].degree for g in rgens]
            degs = xdegs + rdegs
            # natural order: x-gens before position, repl block, x-gens after
            natural = list(range(position)) + list(range(nx, nx + len(rgens))) + \
                list(range(position + 1, nx))
            rankof = {tag: r for r, tag in enumerate(natural)}
            order = res.dfs([])
            sign = koszul_sort_sign([(rankof[t_], degs[t_]) for t_ in order])
            names = list(gens) + list(rgens)
            gens_out = tuple(names[t_] for t_ in order)
            out.add(nc_key(res.to_tree(), gens_out), rc * sign)
        return out

    def nc_vertices(self, key):
        return len(key[2])

    # -- the differential as a derivation --------------------------------

    def d_key(self, key):
        """Differential of a single basis key, fully normalized."""
        out = FormalSum()
        if not is_cyclic_key(key):
            _, enc, gens = key
            prefix = 0
            for pos, gname in enumerate(gens):
                dg = self.differential[gname]
                if not dg.is_zero():
                    term = self.replace_vertex_nc(key, pos, dg)
                    out.add_sum(term, Fraction(parity_sign(prefix)))
                prefix += self.gens[gname].degree
            return out
        _, mu, slots = key
        mug = self.gens[mu]
        # differential hitting the principal vertex
        dmu = self.differential[mu]
        if not dmu.is_zero():
            for rkey, rc in dmu.items():
                out.add_sum(self._plug_cyclic(rkey, slots), rc)
        # differential hitting a slot tree; the trace vertex contributes
        # an extra suspension to the Leibniz prefix (see signs.py)
        prefix = mug.degree + self.MU_PREFIX_SHIFT
        for j, sl in enumerate(slots):
            if sl != "*":
                subkey = ("nc",) + tuple(sl)
                _, senc, sgens = subkey
                sub_prefix = 0
                for pos, gname in enumerate(sgens):
                    dg = self.differential[gname]
                    if not dg.is_zero():
                        repl = self.replace_vertex_nc(subkey, pos, dg)
                        for nk, nc_ in repl.items():
                            new_slots = list(slots)
                            new_slots[j] = "*" if nk == UNIT_KEY else (nk[1], nk[2])
                            out.add(cy_key(mu, tuple(new_slots)),
                                    nc_ * Fraction(parity_sign(prefix + sub_prefix)))
                    sub_prefix += self.gens[gname].degree
                prefix += sum(self.gens[g].degree for g in sgens)
        return out

    def _plug_cyclic(self, cykey, outer_slots):
        """Substitute a cyclic key [mu'; S_*] for the principal vertex and
        graft the outer slot trees into its total inputs, with signs."""
        _, mu2, inner = cykey
        # assign tags: mu' has no tag weight here (its degree rides along
        # the whole block); track blocks: inner slot trees then outer trees
        # natural order: (mu' block: mu' + inner gens) then outer trees
        # result order: mu', then slotwise interleave of inner trees with
        # the outer trees grafted into their leaves
        inner_gens = []
        for sl in inner:
            if sl != "*":
                inner_gens.append(sl)
        # flatten: work slot by slot grafting outer trees into inner leaves
        outer = list(outer_slots)
        oi = 0
        new_slots = []
        sign = 1
        # degrees of the outer blocks
        out_degs = [0 if sl == "*" else sum(self.gens[g].degree for g in sl[1])
                    for sl in outer]
        # degrees of inner blocks
        in_degs = [0 if sl == "*" else sum(self.gens[g].degree for g in sl[1])
                   for sl in inner]
        # натural: inner_1 .. inner_p, outer_1 .. outer_s
        # result: for each inner slot: inner_j then its grafted outers
        # compute permutation sign on the block level
        blocks = []  # (natural_rank, degree)
        rank_inner = list(range(len(inner)))
        rank_outer = [len(inner) + k for k in range(len(outer))]
        for j, sl in enumerate(inner):
            n_in = 1 if sl == "*" else parse_tree(sl[0]).n_inputs
            take = list(range(oi, oi + n_in))
            oi += n_in
            if sl == "*":
                # slot of mu' receives the outer tree directly
                assert len(take) == 1
                new_slots.append(outer[take[0]])
                blocks.append((rank_outer[take[0]], out_degs[take[0]]))
                continue
            # graft outer trees into the leaves of the inner tree
            subkey = ("nc",) + tuple(sl)
            acc = FormalSum.single(subkey)
            # graft right-to-left so leaf indices stay valid
            for pos in range(n_in - 1, -1, -1):
                ok = outer[take[pos]]
                if ok == "*":
                    continue
                nxt = FormalSum()
                for k2, c2 in acc.items():
                    nxt.add_sum(self.graft_nc(k2, pos + 1, ("nc",) + tuple(ok)), c2)
                acc = nxt
            assert len(acc) == 1
            (k2, c2), = acc.items()
            sign *= c2
            new_slots.append("*" if k2 == UNIT_KEY else (k2[1], k2[2]))
            blocks.append((rank_inner[j], in_degs[j]))
            for pos in take:
                if outer[pos] != "*":
                    blocks.append((rank_outer[pos], out_degs[pos]))
        sign *= koszul_sort_sign(blocks)
        return FormalSum.single(cy_key(mu2, tuple(new_slots)), sign)

    def d_sum(self, s):
        out = FormalSum()
        for key, c in s.items():
            out.add_sum(self.d_key(key), c)
        return out

    def check_d_squared(self, names=None, max_arity=None):
        """Expand d^2 on the listed generators; returns the failing
        (name, residual) pairs (empty = pass)."""
        failures = []
        for name in (names or sorted(self.gens)):
            g = self.gens[name]
            if max_arity is not None and g.arity > max_arity:
                continue
            r = self.d_sum(self.differential[name])
            if not r.is_zero():
                failures.append((name, r))
        return failures

    def to_json(self):
        gens = [{"name": g.name, "arity": g.arity, "cyclic": g.cyclic,
                 "degree": g.degree, "weight": g.weight}
                for g in self.gens.values()]
        diff = {}
        for name, s in self.differential.items():
            if s.is_zero():
                continue
            terms = []
            for key, c in sorted(s.items(), key=lambda kv: repr(kv[0])):
                if is_cyclic_key(key):
                    slots = [["*"] if sl == "*" else [sl[0], list(sl[1])] for sl in key[2]]
                    terms.append([str(c), "cy", key[1], slots])
                else:
                    terms.append([str(c), "nc", key[1], list(key[2])])
            diff[name] = terms
        return {"generators": gens, "differential": diff}

    @classmethod
    def from_json(cls, data):
        gens = [Gen(g["name"], g["arity"], g.get("cyclic", False),
                    g["degree"], g.get("weight", 0)) for g in data["generators"]]
        diff = {}
        for name, terms in data.get("differential", {}).items():
            s = FormalSum()
            for t in terms:
                c = qf(t[0])
                if t[1] == "nc":
                    s.add(("nc", t[2], tuple(t[3])), c)
                else:
                    slots = tuple("*" if sl == ["*"] else (sl[0], tuple(sl[1]))
                                  for sl in t[3])
                    s.add(("cy", t[2], slots), c)
            diff[name] = s
        return cls(gens, diff)


# ---------------------------------------------------------------------------
# the curved A-infinity presentation
# ---------------------------------------------------------------------------

def cyclic_insertion_sign(p, q, j):
    """Sign for inserting m_q at slot j (1-based) of the cyclic mu_p in
    the structure differential; see signs.py for the derivation of the
    table by the d^2 = 0 consistency search."""
    from .signs import mc_cyclic_sign
    return mc_cyclic_sign(p, q, j)


def mc_operad(max_arity=6, with_cyclic=True, internal_margin=2,
              _cyc_sign=None):
    """The curved A-infinity presentation: generators m_n (degree 2-n,
    weight 0 for n >= 2 and 1 for n <= 1) and cyclic mu_s (s slots,
    degree 1-s, weight 0, rotation-invariant up to the character fixed
    in signs.py), with

        d m_n = - sum_{p+q=n+1} m_p{m_q},
        d mu_s = - sum_{p+q=s+1, p>=1} mu_p{m_q},

    braces expanded with the Maurer-Cartan insertion signs.  Generators
    are built through max_arity + internal_margin so that d^2 closes on
    everything of arity <= max_arity."""
    N = max_arity + internal_margin
    cyc_sign = _cyc_sign or cyclic_insertion_sign
    gens = []
    for n in range(0, N + 1):
        gens.append(Gen("m%d" % n, n, False, 2 - n, 0 if n >= 2 else 1))
    if with_cyclic:
        for s in range(0, N + 1):
            gens.append(Gen("mu%d" % s, s, True, 1 - s, 0))
    P = QuasiFreePresentation(gens, check=False)
    diff = {}
    for n in range(0, N + 1):
        s = FormalSum()
        for p in range(1, n + 2):
            q = n + 1 - p
            if q > N or p > N:
                continue
            for i in range(1, p + 1):
                slots = [LEAF] * p
                slots[i - 1] = corolla(q)
                tree = PlanarTree(slots)
                sign = mc_insertion_sign(p, q, i)
                s.add(nc_key(tree, ("m%d" % p, "m%d" % q)), Fraction(-sign))
        diff["m%d" % n] = s
    if with_cyclic:
        # insertion into the slotless mu_0 is the zero operation, so the
        # p = 0 term of the structure equation is absent identically
        for t in range(0, N + 1):
            s = FormalSum()
            for p in range(1, t + 2):
                q = t + 1 - p
                if q > N or p > N:
                    continue
                for j in range(1, p + 1):
                    slots = ["*"] * p
                    slots[j - 1] = (corolla(q).encoding, ("m%d" % q,))
                    sign = cyc_sign(p, q, j)
                    s.add(cy_key("mu%d" % p, tuple(slots)), Fraction(-sign))
            diff["mu%d" % t] = s
    P2 = QuasiFreePresentation(gens, diff)
    return P2


def associative_presentation(max_arity=4):
    """The uncurved sub-presentation on m_2, m_3, ... (the A-infinity
    resolution of the associative operad, truncated)."""
    gens = [Gen("m%d" % n, n, False, 2 - n, 0) for n in range(2, max_arity + 1)]
    P = QuasiFreePresentation(gens, check=False)
    diff = {}
    for n in range(2, max_arity + 1):
        s = FormalSum()
        for p in range(2, n):
            q = n + 1 - p
            if q < 2 or q > max_arity or p > max_arity:
                continue
            for i in range(1, p + 1):
                slots = [LEAF] * p
                slots[i - 1] = corolla(q)
                s.add(nc_key(PlanarTree(slots), ("m%d" % p, "m%d" % q)),
                      Fraction(-mc_insertion_sign(p, q, i)))
        diff["m%d" % n] = s
    return QuasiFreePresentation(gens, diff)


# ---------------------------------------------------------------------------
# free operads: dimensions and composition
# ---------------------------------------------------------------------------

class FreeOperad:
    """The free (circular) operad on a presentation's generators,
    arity-truncated; spaces are enumerated as decorated trees within a
    vertex budget."""

    def __init__(self, presentation, n_max, max_vertices=8):
        self.P = presentation
        self.n_max = n_max
        self.max_vertices = max_vertices

    def nc_basis(self, n):
        arities = sorted({g.arity for g in self.P.gens.values() if not g.cyclic})
        out = []
        for enc in enumerate_trees(n, lambda k: k in arities, self.max_vertices):
            t = parse_tree(enc)
            if t.is_unit:
                out.append(UNIT_KEY)
                continue
            vert_arities = [t.vertex_arity(v) for v in t.vertices()]
            pools = [[g.name for g in self.P.gens.values()
                      if not g.cyclic and g.arity == a] for a in vert_arities]
            for combo in itertools.product(*pools):
                out.append(nc_key(t, combo))
        return sorted(out)

    def nc_dim(self, n):
        return len(self.nc_basis(n))

    def nc_dims_by_degree(self, n):
        out = {}
        for key in self.nc_basis(n):
            d = self.P.key_degree(key)
            out[d] = out.get(d, 0) + 1
        return out

    def compose(self, x, i, y):
        """Bilinear o_i on FormalSums of noncyclic keys."""
        out = FormalSum()
        for kx, cx in x.items():
            for ky, cy_ in y.items():
                out.add_sum(self.P.graft_nc(kx, i, ky), cx * cy_)
        return out

    def unit(self):
        return FormalSum.single(UNIT_KEY)


def free_operad(generators, n_max, max_vertices=8):
    """Free operad on plain generator data (no differential)."""
    P = QuasiFreePresentation(list(generators))
    return FreeOperad(P, n_max, max_vertices)


# ---------------------------------------------------------------------------
# endomorphism circular operads and Y-modules
# ---------------------------------------------------------------------------

class EndomorphismOperad:
    """The circular operad of a finite-dimensional algebra, with the
    cyclic part present exactly when a trace is given: noncyc(n) =
    multilinear maps A^{(x)n} -> A, cyc(n) = functionals on
    A^{(x)(n+1)} with the rotation action.

    Elements are HochCochain / CyclicCochain; everything sits in
    internal degree 0, so compositions carry no Koszul signs."""

    def __init__(self, algebra, trace=None):
        if isinstance(algebra, TracedAlgebra):
            self.traced = algebra
            self.algebra = algebra.algebra
        else:
            self.algebra = algebra
            self.traced = TracedAlgebra(algebra, trace) if trace is not None else None
        self.dim = self.algebra.dim

    @property
    def has_cyclic(self):
        return self.traced is not None

    def nc_zero(self, arity):
        return HochCochain(self.dim, arity)

    def cy_zero(self, slots):
        return CyclicCochain(self.dim, slots - 1)

    def nc_unit(self):
        return HochCochain(self.dim, 1,
                           {(i, (i,)): Fraction(1) for i in range(self.dim)})

    def nc_compose(self, f, i, g):
        return compose_at(f, g, i)

    def nc_basis(self, arity):
        return [(out, args) for out in range(self.dim)
                for args in itertools.product(range(self.dim), repeat=arity)]

    def cy_basis(self, slots):
        return list(itertools.product(range(self.dim), repeat=slots))

    def cyc_insert(self, psi, j, f):
        """Plug the multilinear map f into slot j (0-based) of the
        functional psi; result has level psi.level + f.level - 1."""
        assert 0 <= j <= psi.level
        vals = {}
        for args, c in psi.values.items():
            for (out, fargs), cf in f.values.items():
                if args[j] != out:
                    continue
                big = args[:j] + fargs + args[j + 1:]
                key = tuple(big)
                w = vals.get(key, Fraction(0)) + c * cf
                if w == 0:
                    vals.pop(key, None)
                else:
                    vals[key] = w
        return CyclicCochain(self.dim, psi.level + f.level - 1, vals)

    def cy_rotate(self, psi):
        """Plain rotation of tensor slots (the Z/(n+1) action)."""
        if psi.level < 1:
            return psi
        vals = {}
        for args, c in psi.values.items():
            vals[(args[-1],) + args[:-1]] = c
        return CyclicCochain(self.dim, psi.level, vals)

    def trace_functional(self):
        assert self.has_cyclic
        return CyclicCochain(self.dim, 0,
                             {(i,): self.traced.trace[i] for i in range(self.dim)
                              if self.traced.trace[i] != 0})

    def unit_scalar(self):
        """The canonical element of the slotless cyclic line Tr(unit)."""
        return CyclicCochain(self.dim, -1, {(): Fraction(1)})


def evaluate_key(P, key, assign, target):
    """Evaluate a basis key under a generator assignment (dict name ->
    target element).  Cyclic composites insert the slot values into the
    cyclic element of the principal vertex."""
    if not is_cyclic_key(key):
        values = [assign[g] for g in key[2]]
        return _eval_nc(P, key, values, target)
    _, mu, slots = key
    psi = assign[mu]
    # insert slot values right-to-left (0-based target slots)
    out = psi
    for j in range(len(slots) - 1, -1, -1):
        sl = slots[j]
        if sl == "*":
            continue
        sub = ("nc",) + tuple(sl)
        f = _eval_nc(P, sub, [assign[g] for g in sl[1]], target)
        out = target.cyc_insert(out, j, f)
    return out


def _eval_nc(P, key, values, target):
    _, enc, gens = key
    t = parse_tree(enc)
    if t.is_unit:
        return target.nc_unit()
    it = iter(values)

    def rec(node):
        f = next(it)
        outs = []
        for i, s in enumerate(node.slots):
            if s != LEAF:
                outs.append((i, rec(s)))
        for i, sub in reversed(outs):
            f = target.nc_compose(f, i + 1, sub)
        return f

    return rec(t)


def evaluate_sum(P, s, assign, target, arity, cyclic):
    acc = target.cy_zero(arity) if cyclic else target.nc_zero(arity)
    for key, c in s.items():
        v = evaluate_key(P, key, assign, target)
        acc = acc + v.scale(c)
    return acc


class OperadMapReport:
    def __init__(self, failures):
        self.failures = failures

    @property
    def ok(self):
        return not self.failures

    def first_failure(self):
        return self.failures[0] if self.failures else None

    def __repr__(self):
        return "OperadMapReport(%s)" % ("OK" if self.ok else
                                        "fails at %s" % self.failures[0][0])


def check_operad_map(P, target, assign, check_invariance=True):
    """Verify f(d_P g) = d_T f(g) for every generator (d_T = 0 for plain
    algebra targets), plus rotation-invariance of cyclic images."""
    failures = []
    for name in sorted(P.gens):
        g = P.gens[name]
        if g.cyclic and not getattr(target, "has_cyclic", False):
            # vacuous: assignment must be zero-ish
            continue
        if name not in assign:
            continue
        lhs = evaluate_sum(P, P.differential[name], assign, target,
                           g.arity, g.cyclic)
        # plain targets are complexes with zero differential
        if not lhs.is_zero():
            failures.append((name, lhs))
            continue
        if check_invariance and g.cyclic:
            psi = assign[name]
            if not (target.cy_rotate(psi) - psi).is_zero():
                failures.append((name, "image not rotation-invariant"))
    return OperadMapReport(failures)


def classical_assignment(P, target):
    """m_2 -> product, the slotless mu_0 -> the canonical scalar,
    everything else 0 (the weight-0 layer of the quantization problem;
    insertions into the slotless generator vanish, which is what makes
    the cyclic relations hold for any symmetric trace)."""
    assign = {}
    for name, g in P.gens.items():
        if g.cyclic:
            if not getattr(target, "has_cyclic", False):
                continue
            if g.arity == 0:
                assign[name] = target.unit_scalar()
            else:
                assign[name] = target.cy_zero(g.arity)
        else:
            if g.arity == 2 and g.weight == 0:
                assign[name] = target.algebra.multiplication_cochain()
            else:
                assign[name] = target.nc_zero(g.arity)
    return assign


# ---------------------------------------------------------------------------
# Kaehler differentials and derivation complexes
# ---------------------------------------------------------------------------

HAT = "d:"


def hat_name(name):
    return HAT + name


def is_hatted(name):
    return name.startswith(HAT)


def _hat_key_at(key, pos):
    """The key with the generator at global vertex position pos replaced
    by its hatted version."""
    if not is_cyclic_key(key):
        gens = list(key[2])
        gens[pos] = hat_name(gens[pos])
        return ("nc", key[1], tuple(gens))
    _, mu, slots = key
    if pos == 0:
        return ("cy", hat_name(mu), slots)
    p = 1
    new_slots = list(slots)
    for j, sl in enumerate(slots):
        if sl == "*":
            continue
        n = len(sl[1])
        if p <= pos < p + n:
            gens = list(sl[1])
            gens[pos - p] = hat_name(gens[pos - p])
            new_slots[j] = (sl[0], tuple(gens))
            return ("cy", mu, tuple(new_slots))
        p += n
    raise IndexError(pos)


def universal_derivation(P, key, coeff=Fraction(1)):
    """D(key): the sum over vertices of the key with that vertex hatted,
    with the degree-(+1)-derivation Leibniz signs (the trace vertex
    contributes its extra suspension, matching d_key)."""
    out = FormalSum()
    names = key_vertex_gens(key)
    prefix = 0
    for pos, nm in enumerate(names):
        out.add(_hat_key_at(key, pos), coeff * Fraction(parity_sign(prefix)))
        prefix += P.gens[nm].degree
        if is_cyclic_key(key) and pos == 0:
            prefix += P.MU_PREFIX_SHIFT
    return out


def extended_presentation(P):
    """The presentation freely extended by hatted generators d:g with
    differential -D(d_P g); its one-hat subspace realizes the Kaehler
    module Omega_P.  The sign: d and the universal derivation D are both
    odd derivations, so they anticommute once [d, D] kills every
    generator, and then d^2(d:g) = +D(d_P^2 g) = 0."""
    gens = list(P.gens.values())
    for g in P.gens.values():
        gens.append(Gen(hat_name(g.name), g.arity, g.cyclic, g.degree + 1,
                        g.weight, chi=g.chi))
    diff = {name: P.differential[name] for name in P.gens}
    for name in P.gens:
        s = FormalSum()
        for key, c in P.differential[name].items():
            s.add_sum(universal_derivation(P, key, -c))
        diff[hat_name(name)] = s
    return QuasiFreePresentation(gens, diff, check=False)


class KaehlerModule:
    """Omega_P: the free module on symbols dg, realized as decorated
    trees with one hatted vertex inside the extended presentation; the
    differential is the extended presentation's, restricted to the
    one-hat subspace (which it preserves)."""

    def __init__(self, P):
        self.P = P
        self.ext = extended_presentation(P)

    def basis(self, n, max_vertices=4):
        """Marked decorated trees with n inputs (noncyclic part), as
        (key, position) pairs."""
        F = FreeOperad(self.P, n, max_vertices)
        out = []
        for key in F.nc_basis(n):
            if key == UNIT_KEY:
                continue
            for pos in range(len(key[2])):
                out.append((key, pos))
        return out

    def mark_degree(self, mkey):
        key, pos = mkey
        return self.P.key_degree(key) + 1

    def d_marked(self, mkey):
        """Differential of a marked tree, as a dict of (key, pos)."""
        key, mark = mkey
        hatted = _hat_key_at(key, mark)
        out = {}
        for k2, c in self.ext.d_key(hatted).items():
            out_key, pos = _unhat_key(k2)
            mk = (out_key, pos)
            w = out.get(mk, Fraction(0)) + c
            if w == 0:
                out.pop(mk, None)
            else:
                out[mk] = w
        return out

    def check_d_squared(self, max_arity=3):
        """d^2 = 0 on all hatted generators of the extended presentation
        (which spans the module over the operad)."""
        names = [hat_name(n) for n in self.P.gens
                 if self.P.gens[n].arity <= max_arity]
        return self.ext.check_d_squared(names=names)


def _unhat_key(key):
    """Locate the single hatted vertex; returns (unhatted key, position)."""
    names = key_vertex_gens(key)
    marks = [i for i, nm in enumerate(names) if is_hatted(nm)]
    assert len(marks) == 1, key
    pos = marks[0]
    if not is_cyclic_key(key):
        gens = list(key[2])
        gens[pos] = gens[pos][len(HAT):]
        return ("nc", key[1], tuple(gens)), pos
    _, mu, slots = key
    if pos == 0:
        return ("cy", mu[len(HAT):], slots), 0
    p = 1
    new_slots = list(slots)
    for j, sl in enumerate(slots):
        if sl == "*":
            continue
        n = len(sl[1])
        if p <= pos < p + n:
            gens = list(sl[1])
            gens[pos - p] = gens[pos - p][len(HAT):]
            new_slots[j] = (sl[0], tuple(gens))
            return ("cy", mu, tuple(new_slots)), pos
        p += n
    raise AssertionError(key)


def kaehler_module(P):
    return KaehlerModule(P)


# ---------------------------------------------------------------------------
# evaluation with one module slot, and derivation complexes
# ---------------------------------------------------------------------------

def key_vertex_gens(key):
    """Generator names at the vertices of a key, in the global order
    (principal cyclic vertex first, then slot trees left to right)."""
    if not is_cyclic_key(key):
        return list(key[2])
    _, mu, slots = key
    out = [mu]
    for sl in slots:
        if sl != "*":
            out.extend(sl[1])
    return out


def evaluate_key_with_values(key, values, target):
    """Evaluate a key with explicit target elements per vertex (global
    vertex order as in key_vertex_gens)."""
    if not is_cyclic_key(key):
        return _eval_nc_values(key, values, target)
    _, mu, slots = key
    psi = values[0]
    pos = 1
    evaluated = []
    for sl in slots:
        if sl == "*":
            evaluated.append(None)
        else:
            nverts = len(sl[1])
            sub = ("nc",) + tuple(sl)
            evaluated.append(_eval_nc_values(sub, values[pos:pos + nverts], target))
            pos += nverts
    for j in range(len(slots) - 1, -1, -1):
        if evaluated[j] is not None:
            psi = target.cyc_insert(psi, j, evaluated[j])
    return psi


def _eval_nc_values(key, values, target):
    _, enc, gens = key
    t = parse_tree(enc)
    if t.is_unit:
        return target.nc_unit()
    it = iter(values)

    def rec(node):
        f = next(it)
        outs = []
        for i, s in enumerate(node.slots):
            if s != LEAF:
                outs.append((i, rec(s)))
        for i, sub in reversed(outs):
            f = target.nc_compose(f, i + 1, sub)
        return f

    return rec(t)


def evaluate_key(P, key, assign, target):
    """Evaluate a basis key under a generator assignment."""
    return evaluate_key_with_values(key, [assign[g] for g in key_vertex_gens(key)],
                                    target)


def evaluate_sum(P, s, assign, target, arity, cyclic):
    acc = target.cy_zero(arity) if cyclic else target.nc_zero(arity)
    for key, c in s.items():
        v = evaluate_key(P, key, assign, target)
        acc = acc + v.scale(c)
    return acc


def evaluate_sum_weighted(P, s, wassign, target, arity, cyclic, weight):
    """Evaluate with weight-graded assignments (dict gen -> dict weight
    -> element), collecting the given total weight; generator weights of
    the presentation shift each vertex's contribution."""
    acc = target.cy_zero(arity) if cyclic else target.nc_zero(arity)
    for key, c in s.items():
        names = key_vertex_gens(key)
        pools = []
        for g in names:
            comp = wassign.get(g, {})
            pools.append(sorted(comp))
        for combo in itertools.product(*pools):
            if sum(combo) != weight:
                continue
            values = [wassign[g][w] for g, w in zip(names, combo)]
            v = evaluate_key_with_values(key, values, target)
            acc = acc + v.scale(c)
    return acc


class EndoYModule:
    """One weight layer of the endomorphism target, as a module over the
    weight-0 classical map: spaces are the cochain spaces; the action is
    evaluation of decorated trees with the classical assignment at all
    vertices but one.  Square-zero by construction (two module slots
    never meet in the one-slot evaluation)."""

    def __init__(self, target, beta0):
        self.target = target
        self.beta0 = beta0

    def nc_space_basis(self, arity):
        return self.target.nc_basis(arity)

    def cy_space_basis(self, slots):
        return self.target.cy_basis(slots)

    def nc_elem(self, arity, basis_item, coeff=Fraction(1)):
        out, args = basis_item
        return HochCochain(self.target.dim, arity, {(out, tuple(args)): coeff})

    def cy_elem(self, slots, basis_item, coeff=Fraction(1)):
        return CyclicCochain(self.target.dim, slots - 1, {tuple(basis_item): coeff})

    def d_internal(self, elem):
        return None  # plain algebra layers carry no differential


def derivation_slot(gen):
    """Which degree of the derivation complex a generator's slot sits in
    (level grading: the slot of g lands in degree -deg g)."""
    return -gen.degree


def derivation_complex(P, module, gens=None):
    """The derivation/obstruction complex of the presentation with
    coefficients in a Y-module layer, as an explicit DGModule plus the
    basis bookkeeping (degree -> list of (gen name, basis item)).

    D(xi)(h) = -(-1)^{|xi|} xi_der(d_P h), the derivation extension of
    xi evaluated with the classical map at the unmarked vertices; the
    layer's internal differential is zero for plain algebra targets.
    """
    from .dg import DGModule, GradedSpace
    names = sorted(gens or P.gens)
    slots = {}
    for name in names:
        g = P.gens[name]
        k = derivation_slot(g)
        if g.cyclic:
            basis = module.cy_space_basis(g.arity)
        else:
            basis = module.nc_space_basis(g.arity)
        if basis:
            slots.setdefault(k, []).extend((name, item) for item in basis)
    dims = {k: len(v) for k, v in slots.items()}
    index = {k: {t: i for i, t in enumerate(v)} for k, v in slots.items()}

    diffs = {}
    for k in sorted(dims):
        if dims.get(k + 1, 0) == 0:
            continue
        ent = {}
        tgt_index = index[k + 1]
        for col, (gname, item) in enumerate(slots[k]):
            g = P.gens[gname]
            elem = module.cy_elem(g.arity, item) if g.cyclic else \
                module.nc_elem(g.arity, item)
            for hname in names:
                h = P.gens[hname]
                if derivation_slot(h) != k + 1:
                    continue
                val = _derivation_value(P, module, hname, gname, elem, k)
                if val is None or val.is_zero():
                    continue
                if h.cyclic:
                    for args, c in val.values.items():
                        row = tgt_index[(hname, args)]
                        ent[(row, col)] = ent.get((row, col), Fraction(0)) + c
                else:
                    for (out, args), c in val.values.items():
                        row = tgt_index[(hname, (out, args))]
                        ent[(row, col)] = ent.get((row, col), Fraction(0)) + c
        M = QMatrix(dims[k + 1], dims[k], ent)
        if not M.is_zero():
            diffs[k] = M
    X = DGModule(GradedSpace(dims), diffs)
    return X, slots, index


def _derivation_value(P, module, hname, gname, elem, kdeg):
    """Value at h of D(xi) for xi supported at g with the given element:
    -(-1)^{kdeg} sum over terms of d_P(h) and occurrences of g."""
    target = module.target
    beta0 = module.beta0
    h = P.gens[hname]
    acc = None
    for key, c in P.differential[hname].items():
        names = key_vertex_gens(key)
        for pos, nm in enumerate(names):
            if nm != gname:
                continue
            prefix = sum(P.gens[x].degree for x in names[:pos])
            if is_cyclic_key(key) and pos > 0:
                prefix += P.MU_PREFIX_SHIFT
            values = [beta0[x] for x in names]
            values[pos] = elem
            v = evaluate_key_with_values(key, values, target)
            sgn = Fraction(parity_sign(kdeg * prefix))
            term = v.scale(c * sgn)
            acc = term if acc is None else acc + term
    if acc is None:
        return None
    # D(xi) = d_M xi - (-1)^{|xi|} xi_der d_P with d_M = 0 on plain layers
    return acc.scale(-parity_sign(kdeg))
