"""The order-by-order Maurer-Cartan lifting solver.

A lifting problem carries a quasi-free presentation P, a weighted
endomorphism-type target (weights 0..W, compositions add weights,
internal differential zero on plain algebra layers), a verified
classical map beta_0 on the weight-0 layer, and optionally prescribed
components at higher weights (seeds and pinned slots: the solver treats
them as fixed and corrects only the free slots, which realizes the
gauge freedom the correction choice leaves open).

Stage k -> k+1: the defect theta(g) is the weight-(k+1) component of
the structure relations of the current assignment; it is a cocycle of
the derivation complex (verified, abort otherwise), and the stage is
solvable iff its class in the effective complex (free slots) vanishes.
Coordinates of an unsolvable class are reported together with a
certificate functional that kills the image but not the defect.

All arithmetic exact; with the fixed pivoting rule the corrections, and
hence the whole run, are deterministic.
"""

import json
from fractions import Fraction

from .dg import cone
from .hochschild import (Algebra, CurvedMC, CyclicCochain, HochCochain,
                         TracedAlgebra, check_curved_mc, load_algebra, qf)
from .linalg import QMatrix, kernel_basis, parity_sign, solve
from .operads import (EndomorphismOperad, EndoYModule, QuasiFreePresentation,
                      check_operad_map, classical_assignment,
                      derivation_complex, derivation_slot,
                      evaluate_sum_weighted, mc_operad)


class LiftingProblem:
    """P, weighted target, classical map, seeds and prescriptions.

    seeds: dict (gen name, weight) -> element: initial values the solver
    starts from and may correct (the deformation directions).
    prescribed: same shape, but pinned: never touched by corrections
    (gauge fixing / designed problems).
    arity_window: restrict generators and relations to arities <= this
    bound; identities hold within the window, per the global truncation
    policy.
    """

    def __init__(self, presentation, target, max_weight, beta0=None,
                 seeds=None, prescribed=None, arity_window=None, check=True):
        self.P = presentation
        self.target = target
        self.W = int(max_weight)
        self.beta0 = beta0 if beta0 is not None else \
            classical_assignment(presentation, target)
        self.seeds = dict(seeds or {})
        self.prescribed = dict(prescribed or {})
        for (name, w), elem in list(self.seeds.items()) + list(self.prescribed.items()):
            assert 1 <= w <= self.W and name in self.P.gens
        overlap = set(self.seeds) & set(self.prescribed)
        assert not overlap, "slots both seeded and pinned: %r" % (overlap,)
        self.arity_window = arity_window
        if check:
            rep = check_operad_map(self.P, self.target, self.beta0)
            if not rep.ok:
                raise ValueError("classical map fails: %r" % (rep,))
        self._dc_cache = None

    def window_gens(self):
        names = []
        for name in sorted(self.P.gens):
            g = self.P.gens[name]
            if self.arity_window is not None and g.arity > self.arity_window:
                continue
            if g.cyclic and not self.target.has_cyclic:
                continue
            names.append(name)
        return names

    def derivation_data(self):
        if self._dc_cache is None:
            M = EndoYModule(self.target, self.beta0)
            self._dc_cache = derivation_complex(self.P, M,
                                                gens=self.window_gens())
        return self._dc_cache

    def zero_elem(self, name):
        g = self.P.gens[name]
        return self.target.cy_zero(g.arity) if g.cyclic else self.target.nc_zero(g.arity)


class PartialLift:
    """Assignment gen -> {weight -> element} complete through `stage`."""

    def __init__(self, problem, stage, assignment):
        self.problem = problem
        self.stage = int(stage)
        self.assignment = assignment

    @classmethod
    def initial(cls, problem):
        assignment = {name: {0: problem.beta0[name]} for name in problem.beta0}
        for table in (problem.seeds, problem.prescribed):
            for (name, w), elem in table.items():
                cur = assignment.setdefault(name, {})
                cur[w] = cur.get(w, problem.zero_elem(name)) + elem
        return cls(problem, 0, assignment)

    def weighted(self, upto=None):
        upto = self.stage if upto is None else upto
        out = {}
        for name, comps in self.assignment.items():
            out[name] = {w: e for w, e in comps.items() if w <= upto}
        return out

    def value(self, name, weight):
        return self.assignment.get(name, {}).get(weight)

    def to_curved_mc(self):
        """The induced weighted Hochschild structure (noncyclic sector)."""
        comps = {}
        for name, by_w in self.assignment.items():
            g = self.problem.P.gens[name]
            if g.cyclic:
                continue
            for w, e in by_w.items():
                if not e.is_zero():
                    comps[(g.arity, w)] = comps.get((g.arity, w), e.scale(0)) + e
        return CurvedMC(self.problem.target.dim, comps)


def residuals_at_weight(problem, lift_assignment, weight):
    """theta(g) = weight component of evaluate(d_P g) minus the target
    differential of the assignment (zero on plain algebra layers);
    relations ranging over the problem's arity window."""
    P, T = problem.P, problem.target
    out = {}
    for name in problem.window_gens():
        g = P.gens[name]
        wassign = {}
        for nm, by_w in lift_assignment.items():
            wassign[nm] = by_w
        r = evaluate_sum_weighted(P, P.differential[name], wassign, T,
                                  g.arity, g.cyclic, weight)
        if not r.is_zero():
            out[name] = r
    return out


def defect(problem, lift):
    """Per-generator residual at weight stage+1.  Seed and prescribed
    components at that weight are already part of the assignment and
    contribute linearly."""
    k = lift.stage
    if k >= problem.W:
        return {}
    return residuals_at_weight(problem, lift.weighted(upto=k + 1), k + 1)


def _theta_coords(problem, theta):
    """Flatten residuals into coordinate vectors per derivation degree."""
    X, slots, index = problem.derivation_data()
    coords = {}
    for name, elem in theta.items():
        g = problem.P.gens[name]
        k = derivation_slot(g) + 0
        deg = -g.degree
        idx = index.get(deg)
        assert idx is not None, name
        vec = coords.setdefault(deg, {})
        if g.cyclic:
            for args, c in elem.values.items():
                vec[idx[(name, args)]] = c
        else:
            for (out, args), c in elem.values.items():
                vec[idx[(name, (out, args))]] = c
    return coords


def verify_cocycle(problem, theta):
    """The derivation-complex differential kills every defect; a failure
    means an upstream inconsistency and raises."""
    X, slots, index = problem.derivation_data()
    coords = _theta_coords(problem, theta)
    for deg, vec in coords.items():
        img = X.d(deg).apply(vec)
        if img:
            raise ValueError("defect is not a cocycle at derivation degree %d" % deg)
    return True


class ObstructionReport:
    """Unsolvable stage: the class of the defect in the effective
    derivation complex, with a certificate functional."""

    def __init__(self, stage, theta, classes, certificates):
        self.stage = stage
        self.theta = theta
        self.classes = classes          # degree -> coordinate dict over H-basis
        self.certificates = certificates  # degree -> (functional, pairing value)

    @property
    def solvable(self):
        return all(not v for v in self.classes.values())

    def class_vector(self):
        return [(deg, dict(vec)) for deg, vec in sorted(self.classes.items())]

    def __repr__(self):
        nz = {d: v for d, v in self.classes.items() if v}
        return "ObstructionReport(stage %d, classes %r)" % (self.stage, nz)


def _free_columns(problem, slots, deg):
    """Columns of the derivation complex at a degree, split into free and
    pinned; pinned = any (gen, weight) prescription at the current
    extension weight is handled by the caller, so pinned here means the
    gen appears in problem.prescribed for the weight being solved."""
    return slots.get(deg, [])


def solve_step(problem, lift, theta=None):
    """Extend a valid stage-k lift to stage k+1, or report the
    obstruction class.  The linear system runs over the free slots at
    weight k+1 (prescribed slots are fixed data already inside theta)."""
    k = lift.stage
    assert k < problem.W, "already at the top weight"
    if theta is None:
        theta = defect(problem, lift)
    verify_cocycle(problem, theta)
    X, slots, index = problem.derivation_data()
    coords = _theta_coords(problem, theta)

    pinned = {name for (name, w) in problem.prescribed if w == k + 1}
    correction = {}
    classes = {}
    certificates = {}
    solvable = True
    degrees = sorted(set(coords) | set())
    for deg, vec in sorted(coords.items()):
        ksrc = deg - 1
        src = slots.get(ksrc, [])
        tgt_dim = X.dim(deg)
        # build the matrix of D restricted to free source slots, with the
        # sign (-1)^{ksrc} relating the residual to the correction
        cols = [i for i, (name, _item) in enumerate(src) if name not in pinned]
        D = X.d(ksrc)
        ent = {}
        for cnew, c in enumerate(cols):
            for i, v in D.column(c).items():
                ent[(i, cnew)] = v
        Dfree = QMatrix(tgt_dim, len(cols), ent)
        sgn = Fraction(parity_sign(ksrc))
        rhs = {i: sgn * v for i, v in vec.items()}
        x = solve(Dfree, rhs)
        if x is None:
            solvable = False
            cls, cert = _obstruction_class(X, deg, Dfree, vec)
            classes[deg] = cls
            certificates[deg] = cert
            continue
        for cnew, c in enumerate(cols):
            val = x.get(cnew)
            if not val:
                continue
            name, item = src[c]
            g = problem.P.gens[name]
            M = EndoYModule(problem.target, problem.beta0)
            elem = M.cy_elem(g.arity, item, val) if g.cyclic else \
                M.nc_elem(g.arity, item, val)
            correction[name] = correction.get(name, problem.zero_elem(name)) + elem
    if not solvable:
        return ObstructionReport(k + 1, theta, classes, certificates)

    assignment = {name: dict(by_w) for name, by_w in lift.assignment.items()}
    for name, elem in correction.items():
        cur = assignment.setdefault(name, {})
        prev = cur.get(k + 1, problem.zero_elem(name))
        cur[k + 1] = prev + elem
    new = PartialLift(problem, k + 1, assignment)
    # re-verify the relation through the new weight
    for w in range(0, k + 2):
        res = residuals_at_weight(problem, new.weighted(upto=k + 1), w)
        assert not res, ("post-correction residual at weight %d" % w, sorted(res))
    return new


def _obstruction_class(X, deg, Dfree, vec):
    """Class coordinates of vec in ker(d^deg)/im(Dfree) and a certificate
    functional vanishing on the image but not on vec."""
    Z = kernel_basis(X.d(deg)).basis_matrix()
    big = QMatrix(X.dim(deg), Z.cols + Dfree.cols,
                  {**{(i, j): v for (i, j), v in Z.entries.items()},
                   **{(i, Z.cols + j): v for (i, j), v in Dfree.entries.items()}})
    x = solve(big, vec)
    assert x is not None, "defect not even a cocycle-coordinate vector"
    cls = {i: v for i, v in x.items() if i < Z.cols and v != 0}
    # certificate: y with y^T Dfree = 0 and y^T vec != 0
    K = kernel_basis(Dfree.transpose())
    cert = None
    for y in K.basis:
        pairing = sum((y.get(i, Fraction(0)) * v for i, v in vec.items()), Fraction(0))
        if pairing != 0:
            cert = (y, pairing)
            break
    assert cert is not None, "inconsistent system without certificate"
    return cls, cert


def lift(problem, k_max=None):
    """Iterate defect / verify / solve from the classical map.  Returns
    the final PartialLift, or the first ObstructionReport."""
    k_max = problem.W if k_max is None else min(k_max, problem.W)
    cur = PartialLift.initial(problem)
    while cur.stage < k_max:
        nxt = solve_step(problem, cur)
        if isinstance(nxt, ObstructionReport):
            return nxt
        cur = nxt
    return cur


def rigidity_check(A, B, comparison):
    """Acyclicity of the cone of a chain map of derivation-complex data;
    returns (acyclic, homology dims of the cone)."""
    if not comparison.is_chain_map():
        raise ValueError("comparison is not a chain map")
    C = cone(comparison)
    degs = C.degrees()
    lo = degs[0] - 1 if degs else 0
    hi = degs[-1] + 1 if degs else 0
    dims = {n: C.homology_dim(n) for n in range(lo, hi + 1)}
    return all(v == 0 for v in dims.values()), dims


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def _cochain_from_json(dim, data):
    """[["out", [args], "p/q"], ...] or cyclic [[args], "p/q"]."""
    if data.get("cyclic"):
        vals = {tuple(t[0]): qf(t[1]) for t in data["terms"]}
        level = data["level"]
        return CyclicCochain(dim, level, vals)
    vals = {(t[0], tuple(t[1])): qf(t[2]) for t in data["terms"]}
    return HochCochain(dim, data["level"], vals)


def load_problem(path_or_dict):
    """Lifting-problem JSON: {"algebra": {...}, "max_weight": W,
    "presentation": {...} (optional; curved A-infinity by default),
    "max_arity": n (used when presentation omitted),
    "prescribed": [{"gen": name, "weight": w, "cochain": {...}}, ...]}.
    """
    data = path_or_dict
    if isinstance(path_or_dict, str):
        with open(path_or_dict) as fh:
            data = json.load(fh)
    A = load_algebra(data["algebra"])
    target = EndomorphismOperad(A)
    if "presentation" in data:
        P = QuasiFreePresentation.from_json(data["presentation"])
    else:
        P = mc_operad(max_arity=data.get("max_arity", 4))
    dim = target.dim
    prescribed = {}
    for item in data.get("prescribed", []):
        prescribed[(item["gen"], item["weight"])] = \
            _cochain_from_json(dim, item["cochain"])
    return LiftingProblem(P, target, data["max_weight"], prescribed=prescribed)


def report_json(result):
    """Serializable outcome of lift()."""
    if isinstance(result, PartialLift):
        comps = {}
        for name, by_w in sorted(result.assignment.items()):
            for w, e in sorted(by_w.items()):
                if e.is_zero():
                    continue
                if isinstance(e, CyclicCochain):
                    terms = [[list(a), str(c)] for a, c in sorted(e.values.items())]
                else:
                    terms = [[o, list(a), str(c)] for (o, a), c in sorted(e.values.items())]
                comps["%s@%d" % (name, w)] = terms
        return {"status": "lifted", "stage": result.stage, "components": comps}
    rep = {"status": "obstructed", "stage": result.stage, "classes": {}}
    for deg, cls in sorted(result.classes.items()):
        rep["classes"][str(deg)] = {str(i): str(c) for i, c in sorted(cls.items())}
    return rep
