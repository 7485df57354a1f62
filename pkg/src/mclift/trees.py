"""Planar trees, insertion, enumeration, and tree-indexed collections.

Encoding grammar (stable across versions, bit-exact):

    tree ::= "(" slot* ")" | "*"
    slot ::= "*" | tree

"*" at top level is the unit tree (the no-vertex pass-through with one
input); inside a tree "*" is a leaf.  Two trees are planar-isomorphic
iff their encodings are equal, so collections key on encodings.

Vertices are addressed by their path from the root: a tuple of slot
indices.  Vertex order used everywhere (signs, decorations) is
depth-first: the root first, then the subtrees left to right.
"""

import itertools

LEAF = "*"


class PlanarTree:
    """Immutable planar rooted tree.  slots is a tuple whose items are
    LEAF or PlanarTree; slots=None marks the unit tree."""

    __slots__ = ("slots", "_enc", "_n")

    def __init__(self, slots=None):
        if slots is None:
            self.slots = None
            self._enc = LEAF
            self._n = 1
        else:
            self.slots = tuple(slots)
            for s in self.slots:
                assert s is LEAF or s == LEAF or isinstance(s, PlanarTree)
            parts = []
            n = 0
            for s in self.slots:
                if s == LEAF:
                    parts.append(LEAF)
                    n += 1
                else:
                    assert not s.is_unit, "unit tree cannot be a subtree slot"
                    parts.append(s.encoding)
                    n += s.n_inputs
            self._enc = "(" + "".join(parts) + ")"
            self._n = n

    @property
    def is_unit(self):
        return self.slots is None

    @property
    def encoding(self):
        return self._enc

    @property
    def n_inputs(self):
        return self._n

    @property
    def root_arity(self):
        return 0 if self.is_unit else len(self.slots)

    def __eq__(self, other):
        return isinstance(other, PlanarTree) and self._enc == other._enc

    def __hash__(self):
        return hash(self._enc)

    def __repr__(self):
        return "PlanarTree(%r)" % self._enc

    def vertices(self):
        """All vertex paths in depth-first order (root = ())."""
        if self.is_unit:
            return []
        out = [()]
        for i, s in enumerate(self.slots):
            if s != LEAF:
                out.extend((i,) + p for p in s.vertices())
        return out

    def n_vertices(self):
        return len(self.vertices())

    def subtree(self, path):
        t = self
        for i in path:
            t = t.slots[i]
            assert t != LEAF
        return t

    def vertex_arity(self, path):
        return self.subtree(path).root_arity

    def leaf_positions(self):
        """For each leaf, the path (vertex path, slot index), in planar
        left-to-right order."""
        if self.is_unit:
            return [None]
        out = []
        for i, s in enumerate(self.slots):
            if s == LEAF:
                out.append(((), i))
            else:
                out.extend(((i,) + vp, si) for (vp, si) in s.leaf_positions())
        return out

    def dfs_leaf_order_key(self, path):
        """Position of vertex `path` in depth-first order, and the number
        of leaves strictly before it in planar order."""
        verts = self.vertices()
        return verts.index(path)


def corolla(n):
    return PlanarTree([LEAF] * n)


UNIT_TREE = PlanarTree(None)


def parse_tree(encoding):
    """Inverse of .encoding."""
    if encoding == LEAF:
        return UNIT_TREE
    pos = 0

    def rec():
        nonlocal pos
        assert encoding[pos] == "(", encoding
        pos += 1
        slots = []
        while encoding[pos] != ")":
            if encoding[pos] == LEAF:
                slots.append(LEAF)
                pos += 1
            else:
                slots.append(rec())
        pos += 1
        return PlanarTree(slots)

    t = rec()
    assert pos == len(encoding), "trailing garbage in %r" % encoding
    return t


def canonical_form(t):
    """Canonical encoding: equal iff planar-isomorphic."""
    return t.encoding


def graft(t, items):
    """Replace the leaves of t (left to right) by the given items, each
    LEAF or a PlanarTree (units collapse to leaves)."""
    items = list(items)
    assert len(items) == t.n_inputs, (len(items), t.n_inputs)
    if t.is_unit:
        x = items[0]
        return x if isinstance(x, PlanarTree) else UNIT_TREE
    it = iter(items)

    def rec(node):
        slots = []
        for s in node.slots:
            if s == LEAF:
                x = next(it)
                if x == LEAF or (isinstance(x, PlanarTree) and x.is_unit):
                    slots.append(LEAF)
                elif isinstance(x, PlanarTree):
                    slots.append(x)
                else:
                    slots.append(LEAF)
            else:
                slots.append(rec(s))
        return PlanarTree(slots)

    return rec(t)


def insert(t, plugs):
    """Operadic substitution t{t_v}: replace each vertex v by plugs[v]
    (a tree with n_inputs = arity of v), wiring the old subtrees of v
    into the plug's leaves in planar order.

    plugs maps vertex paths to PlanarTrees; vertices may be omitted, in
    which case the corolla of matching arity is used (no change).
    Raises ValueError on arity mismatch, naming the offending vertex.
    """
    if t.is_unit:
        assert not plugs
        return t

    def rec(node):
        return _insert_at(node, ())

    def _insert_at(node, path):
        plug = plugs.get(path)
        k = len(node.slots)
        if plug is None:
            plug = corolla(k)
        if plug.n_inputs != k:
            raise ValueError("arity mismatch at vertex %r: plug has %d inputs, vertex has %d slots"
                             % (path, plug.n_inputs, k))
        children = []
        for i, s in enumerate(node.slots):
            if s == LEAF:
                children.append(LEAF)
            else:
                children.append(_insert_at(s, path + (i,)))
        return graft(plug, children)

    return rec(t)


def enumerate_trees(n, arity_allowed, max_vertices, include_unit=True):
    """All planar trees with n inputs, every vertex arity satisfying the
    predicate, at most max_vertices vertices.  Returns encodings, sorted.

    The unit (no-vertex) tree counts as a tree with one input when
    include_unit is set; see the package docs for the convention.
    """
    found = set()
    if n == 1 and include_unit:
        found.add(UNIT_TREE.encoding)
    arities = [k for k in range(0, n + max(2, n) + 1) if arity_allowed(k)]
    memo = {}

    def build(inputs, budget):
        """Set of non-unit trees with `inputs` inputs and <= budget vertices."""
        key = (inputs, budget)
        if key in memo:
            return memo[key]
        out = set()
        if budget > 0:
            for k in arities:
                if k == 0:
                    if inputs == 0:
                        out.add(corolla(0))
                    continue
                for parts in _compositions(inputs, k):
                    for slots in _fill_slots(parts, budget - 1):
                        out.add(PlanarTree(slots))
        memo[key] = out
        return out

    def _fill_slots(parts, budget):
        if not parts:
            yield ()
            return
        head, rest = parts[0], parts[1:]
        options = []
        if head == 1:
            options.append(LEAF)
        options.extend(sorted(build(head, budget), key=lambda t: t.encoding))
        for o in options:
            used = 0 if o == LEAF else o.n_vertices()
            for tail in _fill_slots(rest, budget - used):
                yield (o,) + tail

    for t in build(n, max_vertices):
        found.add(t.encoding)
    return sorted(found)


def _compositions(n, k):
    if k == 0:
        if n == 0:
            yield ()
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def decompositions(T, upper_support=None, plug_support=None):
    """All pairs (t, plugs) with insert(t, plugs) == T.

    Restricted to t in upper_support and every plug in plug_support when
    given (both sets of encodings); without restrictions, unit plugs at
    arity-1 vertices make the list infinite, so at least one support
    bound is required in that case.
    """
    if upper_support is None and plug_support is None:
        raise ValueError("unbounded decomposition enumeration; give a support")
    out = []
    if upper_support is not None:
        for enc in sorted(upper_support):
            t = parse_tree(enc)
            if t.n_inputs != T.n_inputs:
                continue
            verts = t.vertices()
            if t.is_unit:
                if T.is_unit:
                    out.append((t, {}))
                continue
            slots_options = []
            for v in verts:
                k = t.vertex_arity(v)
                opts = []
                if plug_support is not None:
                    opts = [parse_tree(e) for e in sorted(plug_support)
                            if parse_tree(e).n_inputs == k]
                else:
                    opts = [c for c in _all_plugs_of_arity(T, k)]
                slots_options.append(opts)
            for combo in itertools.product(*slots_options):
                plugs = dict(zip(verts, combo))
                if insert(t, plugs) == T:
                    out.append((t, plugs))
    return out


def _all_plugs_of_arity(T, k):
    """Candidate plug trees with k inputs built from subtree shapes of T
    (plus the unit when k = 1)."""
    cands = set()
    if k == 1:
        cands.add(UNIT_TREE)

    def walk(node):
        if node == LEAF or node.is_unit:
            return
        if node.n_inputs == k:
            cands.add(node)
        for s in node.slots:
            if s != LEAF:
                walk(s)

    if not T.is_unit:
        walk(T)
        # also contracted shapes: any tree with <= #vertices of T and k inputs
        for enc in enumerate_trees(k, lambda a: True, T.n_vertices(), include_unit=(k == 1)):
            cands.add(parse_tree(enc))
    return sorted(cands, key=lambda t: t.encoding)


class TreeCollection:
    """Map canonical encoding -> DGModule, finitely supported."""

    def __init__(self, modules):
        self.modules = {}
        for enc, X in modules.items():
            assert parse_tree(enc).encoding == enc, "non-canonical key %r" % enc
            if X.space.total_dim():
                self.modules[enc] = X

    def support(self):
        return sorted(self.modules)

    def value(self, enc):
        from .dg import zero_module
        return self.modules.get(enc) or zero_module()

    def dim(self, enc):
        X = self.modules.get(enc)
        return X.space.total_dim() if X else 0


def unit_collection(max_arity):
    """The monoidal unit: Q on every corolla up to the arity bound."""
    from .dg import ground_field
    return TreeCollection({corolla(k).encoding: ground_field()
                           for k in range(0, max_arity + 1)})


def compose_collections(X, Y):
    """(X o Y)(T) = (+)_{T = t{t_v}} X(t) (x) (x)_v Y(t_v).

    Runs over the supports of X and Y, so the result is exact on the
    nose for finitely supported collections.
    """
    from .dg import tensor_dg
    acc = {}
    for enc in X.support():
        t = parse_tree(enc)
        if t.is_unit:
            _acc_add(acc, UNIT_TREE.encoding, [X.value(enc)])
            continue
        verts = t.vertices()
        opts = []
        for v in verts:
            k = t.vertex_arity(v)
            opts.append([e for e in Y.support() if parse_tree(e).n_inputs == k])
        for combo in itertools.product(*opts):
            plugs = {v: parse_tree(e) for v, e in zip(verts, combo)}
            T = insert(t, plugs)
            factors = [X.value(enc)] + [Y.value(e) for e in combo]
            _acc_add(acc, T.encoding, factors)
    out = {}
    for enc, pieces in acc.items():
        out[enc] = _direct_sum(pieces)
    return TreeCollection(out)


def _acc_add(acc, enc, factors):
    from .dg import tensor_dg
    X = factors[0]
    for Y in factors[1:]:
        X = tensor_dg(X, Y)
    acc.setdefault(enc, []).append(X)


def _direct_sum(pieces):
    from .dg import DGModule, GradedSpace
    from .linalg import QMatrix
    dims = {}
    offsets = []
    for X in pieces:
        off = {n: dims.get(n, 0) for n in X.degrees()}
        offsets.append(off)
        for n in X.degrees():
            dims[n] = dims.get(n, 0) + X.dim(n)
    sp = GradedSpace(dims)
    diffs = {}
    for X, off in zip(pieces, offsets):
        for n, M in X.differential.items():
            cur = diffs.setdefault(n, {})
            ro, co = off[n + 1], off[n]
            for (i, j), v in M.entries.items():
                cur[(ro + i, co + j)] = v
    mats = {n: QMatrix(dims.get(n + 1, 0), dims.get(n, 0), ent)
            for n, ent in diffs.items()}
    return DGModule(sp, mats)
