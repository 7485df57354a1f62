"""Cech complexes of finite covers on finite Alexandrov spaces, with
constant Q coefficients.

Opens are the up-closed subsets of a finite poset.  The Cech complex of
a cover evaluates the constant sheaf on every nonempty intersection:
one copy of Q per connected component (connectivity in the
comparability graph), with the alternating restriction differential.
The nerve of the cover and its cohomology serve as the independent
oracle for good covers.

File format (JSON): {"points": [...], "order": [[a, b], ...]  # a <= b,
"covers": {name: [[pts of U_0], [pts of U_1], ...]}}.
"""

import itertools
import json
from fractions import Fraction

from .dg import DGModule, GradedSpace
from .linalg import QMatrix


class FiniteSpace:
    """A finite poset; opens are up-closed sets."""

    def __init__(self, points, relation):
        self.points = list(points)
        rel = {(a, b) for (a, b) in relation}
        for p in self.points:
            rel.add((p, p))
        # transitive closure
        changed = True
        while changed:
            changed = False
            for (a, b) in list(rel):
                for (c, d) in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        for (a, b) in rel:
            if (b, a) in rel and a != b:
                raise ValueError("order not antisymmetric: %r, %r" % (a, b))
        self.rel = rel

    def leq(self, a, b):
        return (a, b) in self.rel

    def is_open(self, U):
        U = set(U)
        for p in U:
            for q in self.points:
                if self.leq(p, q) and q not in U:
                    return False
        return True

    def up_set(self, p):
        return frozenset(q for q in self.points if self.leq(p, q))

    def components(self, S):
        """Connected components of a subset in the comparability graph."""
        S = set(S)
        comps = []
        while S:
            p = min(S, key=lambda x: self.points.index(x))
            comp = {p}
            frontier = [p]
            while frontier:
                x = frontier.pop()
                for y in list(S):
                    if y not in comp and (self.leq(x, y) or self.leq(y, x)):
                        comp.add(y)
                        frontier.append(y)
            comps.append(frozenset(comp))
            S -= comp
        return sorted(comps, key=lambda c: sorted(self.points.index(p) for p in c))


class Cover:
    """A list of opens of a finite space."""

    def __init__(self, space, opens):
        self.space = space
        self.opens = [frozenset(U) for U in opens]
        for U in self.opens:
            if not space.is_open(U):
                raise ValueError("cover member %r is not up-closed" % (sorted(U),))

    def intersection(self, indices):
        out = set(self.space.points)
        for i in indices:
            out &= self.opens[i]
        return out


def cech_complex(cover):
    """Degree-n space: one Q per connected component of each nonempty
    (n+1)-fold intersection; differential the alternating sum of
    restrictions.  Componentwise evaluation is the constant sheaf's
    sections, which is what makes good covers compute the space."""
    space = cover.space
    N = len(cover.opens)
    cells = {}
    for n in range(N):
        items = []
        for idx in itertools.combinations(range(N), n + 1):
            inter = cover.intersection(idx)
            if not inter:
                continue
            for comp in space.components(inter):
                items.append((idx, comp))
        if items:
            cells[n] = items
    dims = {n: len(items) for n, items in cells.items()}
    index = {n: {t: i for i, t in enumerate(items)} for n, items in cells.items()}
    diffs = {}
    for n in sorted(cells):
        if n + 1 not in cells:
            continue
        ent = {}
        for (big_idx, big_comp), row in index[n + 1].items():
            # restriction: a section on the small intersection maps to its
            # value on the component containing the bigger one
            for j in range(len(big_idx)):
                small_idx = big_idx[:j] + big_idx[j + 1:]
                target = None
                for comp in space.components(cover.intersection(small_idx)):
                    if big_comp <= comp:
                        target = comp
                        break
                assert target is not None
                col = index[n].get((small_idx, target))
                if col is None:
                    continue
                ent[(row, col)] = ent.get((row, col), Fraction(0)) + Fraction((-1) ** j)
        M = QMatrix(dims[n + 1], dims[n], ent)
        if not M.is_zero():
            diffs[n] = M
    return DGModule(GradedSpace(dims), diffs)


def cech_dims(cover, n_max):
    C = cech_complex(cover)
    return [C.homology_dim(n) for n in range(n_max + 1)]


def nerve(cover):
    """Simplices = index sets with nonempty total intersection (all
    faces included by heredity)."""
    N = len(cover.opens)
    simplices = []
    for n in range(N):
        for idx in itertools.combinations(range(N), n + 1):
            if cover.intersection(idx):
                simplices.append(frozenset(idx))
    return simplices


def nerve_cohomology(cover, n_max):
    """Simplicial cohomology of the nerve over Q by explicit coboundary
    matrices (the oracle for the Cech computation)."""
    simps = nerve(cover)
    by_dim = {}
    for s in simps:
        by_dim.setdefault(len(s) - 1, []).append(tuple(sorted(s)))
    for k in by_dim:
        by_dim[k] = sorted(set(by_dim[k]))
    dims = []
    import itertools as it

    def cob(lower, upper):
        lidx = {s: i for i, s in enumerate(lower)}
        ent = {}
        for r, s in enumerate(upper):
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                c = lidx.get(face)
                if c is not None:
                    ent[(r, c)] = ent.get((r, c), Fraction(0)) + Fraction((-1) ** j)
        return QMatrix(len(upper), len(lower), ent)

    from .linalg import homology_dim
    out = []
    for n in range(n_max + 1):
        small = by_dim.get(n, [])
        big = by_dim.get(n + 1, [])
        prev = by_dim.get(n - 1, [])
        d_out = cob(small, big)
        d_in = cob(prev, small)
        out.append(homology_dim(d_in, d_out))
    return out


def pseudocircle():
    """The minimal finite model of the circle: two open points a, b over
    two closed points c, d."""
    points = ["a", "b", "c", "d"]
    order = [("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")]
    return FiniteSpace(points, order)


def circle_cover(space=None):
    """The two-arc cover of the pseudocircle: U_c = {c, a, b},
    U_d = {d, a, b}; the intersection {a, b} has two components."""
    X = space or pseudocircle()
    return Cover(X, [{"c", "a", "b"}, {"d", "a", "b"}])


def load_space(path_or_dict):
    data = path_or_dict
    if isinstance(path_or_dict, str):
        with open(path_or_dict) as fh:
            data = json.load(fh)
    X = FiniteSpace(data["points"], [tuple(p) for p in data["order"]])
    covers = {name: Cover(X, [set(u) for u in opens])
              for name, opens in data.get("covers", {}).items()}
    return X, covers
