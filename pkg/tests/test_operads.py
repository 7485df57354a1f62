import itertools
import random
from fractions import Fraction

from mclift.hochschild import (HochCochain, TracedAlgebra, dual_numbers,
                               hochschild_cohomology, matrix_algebra,
                               matrix_trace, mc_brace)
from mclift.operads import (EndomorphismOperad, EndoYModule, FormalSum,
                            FreeOperad, Gen, QuasiFreePresentation, UNIT_KEY,
                            associative_presentation, check_operad_map,
                            classical_assignment, derivation_complex,
                            evaluate_key, evaluate_sum, free_operad,
                            kaehler_module, mc_operad, nc_key)
from mclift.trees import corolla, parse_tree
from oracles import catalan


def binary_gen():
    return Gen("b", 2, False, 0, 0)


def test_free_operad_catalan_dims():
    F = free_operad([binary_gen()], 5)
    dims = [F.nc_dim(n) for n in range(1, 6)]
    assert dims == [1, 1, 2, 5, 14]
    assert dims[1:] == [catalan(n - 1) for n in range(2, 6)]


def test_free_operad_no_generators():
    F = free_operad([], 3)
    assert F.nc_dim(1) == 1  # the unit
    assert F.nc_dim(2) == 0
    assert F.nc_dim(0) == 0


def test_free_operad_nullary_and_binary():
    F = free_operad([Gen("c", 0, False, 0, 0), binary_gen()], 3, max_vertices=5)
    # trees with all leaves plugged: count matches enumeration of shapes
    # with arities {0, 2} and 0 inputs within the vertex budget
    from mclift.trees import enumerate_trees
    shapes = enumerate_trees(0, lambda k: k in (0, 2), 5, include_unit=False)
    assert F.nc_dim(0) == len(shapes)
    assert F.nc_dim(0) > 0


def test_compose_unit_laws():
    P = QuasiFreePresentation([binary_gen()])
    F = FreeOperad(P, 4)
    b = FormalSum.single(nc_key(corolla(2), ("b",)))
    u = F.unit()
    assert F.compose(u, 1, b) == b
    assert F.compose(b, 1, u) == b
    assert F.compose(b, 2, u) == b


def test_compose_sequential_associativity():
    P = QuasiFreePresentation([binary_gen()])
    F = FreeOperad(P, 6)
    b = FormalSum.single(nc_key(corolla(2), ("b",)))
    # (b o_1 b) o_1 b = b o_1 (b o_1 b)
    lhs = F.compose(F.compose(b, 1, b), 1, b)
    rhs = F.compose(b, 1, F.compose(b, 1, b))
    assert lhs == rhs


def test_compose_parallel_axiom():
    P = QuasiFreePresentation([binary_gen()])
    F = FreeOperad(P, 6)
    b = FormalSum.single(nc_key(corolla(2), ("b",)))
    # (x o_i y) o_{j+m-1} z = (x o_j z) o_i y for i < j, |y| = m
    lhs = F.compose(F.compose(b, 1, b), 3, b)
    rhs = F.compose(F.compose(b, 2, b), 1, b)
    assert lhs == rhs


def test_compose_koszul_signs_odd_generators():
    # two odd generators: swapping the order of parallel insertions must
    # produce the Koszul sign
    g1 = Gen("u", 1, False, 1, 0)
    P = QuasiFreePresentation([binary_gen(), g1])
    F = FreeOperad(P, 4)
    b = FormalSum.single(nc_key(corolla(2), ("b",)))
    u = FormalSum.single(nc_key(corolla(1), ("u",)))
    lhs = F.compose(F.compose(b, 1, u), 2, u)
    rhs = F.compose(F.compose(b, 2, u), 1, u)
    # identical decorated tree, opposite orientations: sign -1
    ((k1, c1),) = lhs.items()
    ((k2, c2),) = rhs.items()
    assert k1 == k2 and c1 == -c2


def test_mc_presentation_d_squared():
    P = mc_operad(max_arity=4)
    assert P.check_d_squared(max_arity=4) == []


def test_mc_differential_weight_filtration():
    # every term of d(g) has weight w(g) or w(g) + 1 and matching arity
    P = mc_operad(max_arity=5)
    for name, s in P.differential.items():
        g = P.gens[name]
        for key in s:
            w = P.key_weight(key)
            assert w in (g.weight, g.weight + 1), (name, key, w)
            if g.cyclic:
                assert P.cy_inputs(key) == g.arity
            else:
                assert parse_tree(key[1]).n_inputs == g.arity
            assert P.key_degree(key) == g.degree + 1


def test_mc_d_m2_terms():
    # d(m2) = -(m1{m2} + m2{m1} + m3{m0}): all weight-1, arity-2 trees
    P = mc_operad(max_arity=3)
    keys = set(P.differential["m2"])
    gens_used = {key[2] for key in keys}
    assert ("m2", "m1") in gens_used
    assert ("m1", "m2") in gens_used
    assert ("m3", "m0") in gens_used
    assert all(P.key_weight(k) == 1 for k in keys)


def test_mc_json_roundtrip():
    P = mc_operad(max_arity=3)
    data = P.to_json()
    Q = QuasiFreePresentation.from_json(data)
    assert set(Q.gens) == set(P.gens)
    for name in P.gens:
        assert Q.differential[name] == P.differential[name]
    assert Q.check_d_squared(max_arity=3) == []


def test_associative_presentation_d_squared():
    A = associative_presentation(6)
    assert A.check_d_squared() == []


def test_endomorphism_dims():
    A = dual_numbers()
    T = EndomorphismOperad(A)
    for n in range(4):
        assert len(T.nc_basis(n)) == A.dim ** (n + 1)
    assert not T.has_cyclic
    T2 = EndomorphismOperad(TracedAlgebra(A, [0, 1]))
    assert T2.has_cyclic
    assert len(T2.cy_basis(3)) == A.dim ** 3


def test_endomorphism_rotation_is_cyclic_permutation():
    A = dual_numbers()
    T = EndomorphismOperad(TracedAlgebra(A, [0, 1]))
    from mclift.hochschild import CyclicCochain
    psi = CyclicCochain(2, 2, {(0, 1, 1): 1, (1, 0, 0): 2})
    rot = T.cy_rotate(psi)
    assert rot.values == {(1, 0, 1): Fraction(1), (0, 1, 0): Fraction(2)}
    r3 = T.cy_rotate(T.cy_rotate(rot))
    assert r3 == psi


def test_endomorphism_operad_axioms_random():
    rng = random.Random(21)
    A = dual_numbers()
    T = EndomorphismOperad(A)

    def rand_cochain(level):
        vals = {}
        for out in range(2):
            for args in itertools.product(range(2), repeat=level):
                c = rng.randint(-2, 2)
                if c:
                    vals[(out, args)] = Fraction(c)
        return HochCochain(2, level, vals)

    for _ in range(15):
        x = rand_cochain(2)
        y = rand_cochain(2)
        z = rand_cochain(1)
        # sequential: (x o_1 y) o_1 z = x o_1 (y o_1 z)
        lhs = T.nc_compose(T.nc_compose(x, 1, y), 1, z)
        rhs = T.nc_compose(x, 1, T.nc_compose(y, 1, z))
        assert (lhs - rhs).is_zero()
        # parallel: (x o_1 y) o_3 z = (x o_2 z) o_1 y (arities 2,2,1)
        lhs2 = T.nc_compose(T.nc_compose(x, 1, y), 3, z)
        rhs2 = T.nc_compose(T.nc_compose(x, 2, z), 1, y)
        assert (lhs2 - rhs2).is_zero()


def test_endomorphism_cyclic_equivariance():
    # inserting at slot j then rotating = rotating then inserting at the
    # reindexed slot, for the plain rotation action
    rng = random.Random(22)
    A = dual_numbers()
    T = EndomorphismOperad(TracedAlgebra(A, [0, 1]))
    from mclift.hochschild import CyclicCochain
    for _ in range(10):
        psi_vals = {}
        for args in itertools.product(range(2), repeat=3):
            c = rng.randint(-2, 2)
            if c:
                psi_vals[args] = Fraction(c)
        psi = CyclicCochain(2, 2, psi_vals)
        f_vals = {}
        for out in range(2):
            for args in itertools.product(range(2), repeat=2):
                c = rng.randint(-2, 2)
                if c:
                    f_vals[(out, args)] = Fraction(c)
        f = HochCochain(2, 2, f_vals)
        # slot 1 of psi; rotation sends tensor slot j to j+1 (mod 3)
        ins_then_rot = T.cy_rotate(T.cyc_insert(psi, 1, f))
        rot_then_ins = T.cyc_insert(T.cy_rotate(psi), 2, f)
        assert (ins_then_rot - rot_then_ins).is_zero()


def test_classical_map_passes():
    P = mc_operad(max_arity=4)
    for A, tr in [(dual_numbers(), [0, 1]), (matrix_algebra(2), matrix_trace(2))]:
        T = EndomorphismOperad(TracedAlgebra(A, tr))
        rep = check_operad_map(P, T, classical_assignment(P, T))
        assert rep.ok, rep


def test_nonassociative_assignment_fails_at_m3():
    rng = random.Random(23)
    P = mc_operad(max_arity=4)
    A = dual_numbers()
    T = EndomorphismOperad(A)
    found = 0
    for _ in range(20):
        vals = {}
        for out in range(2):
            for args in itertools.product(range(2), repeat=2):
                c = rng.randint(-2, 2)
                if c:
                    vals[(out, args)] = Fraction(c)
        m = HochCochain(2, 2, vals)
        if mc_brace(m, m).is_zero():
            continue
        assign = classical_assignment(P, T)
        assign["m2"] = m
        rep = check_operad_map(P, T, assign)
        assert not rep.ok
        assert rep.first_failure()[0] == "m3"
        found += 1
    assert found >= 10


def test_mu0_only_assignment_zero_trace_vacuous():
    P = mc_operad(max_arity=3)
    A = dual_numbers()
    T = EndomorphismOperad(TracedAlgebra(A, [0, 0]))
    assign = classical_assignment(P, T)
    rep = check_operad_map(P, T, assign)
    assert rep.ok


def test_kaehler_marked_tree_count():
    # one binary generator, zero differential: dim Omega(3) = 2 dim O(3)
    P = QuasiFreePresentation([binary_gen()])
    Om = kaehler_module(P)
    F = FreeOperad(P, 3)
    assert len(Om.basis(3)) == 2 * F.nc_dim(3)


def test_kaehler_d_squared():
    # d_Omega^2 = 0 on marked trees of the curved presentation
    P = mc_operad(max_arity=3)
    Om = kaehler_module(P)
    checked = 0
    for key in [nc_key(corolla(2), ("m2",)), nc_key(corolla(3), ("m3",)),
                nc_key(parse_tree("((**)*)"), ("m2", "m2"))]:
        for pos in range(len(key[2])):
            once = Om.d_marked((key, pos))
            acc = {}
            for mk, c in once.items():
                for mk2, c2 in Om.d_marked(mk).items():
                    w = acc.get(mk2, Fraction(0)) + c * c2
                    if w == 0:
                        acc.pop(mk2, None)
                    else:
                        acc[mk2] = w
            assert not acc, (key, pos, acc)
            checked += 1
    assert checked == 4
    assert Om.check_d_squared(max_arity=3) == []


def test_derivation_correspondence_dimensions():
    # dim Der(P, M)^0 = number of degree-0 generator slots' dimensions =
    # dim Hom_{Y(P)}(Omega_P, M)^0: both count one M-space per generator
    P = mc_operad(max_arity=3)
    A = dual_numbers()
    T = EndomorphismOperad(TracedAlgebra(A, [0, 1]))
    M = EndoYModule(T, classical_assignment(P, T))
    X, slots, _ = derivation_complex(P, M)
    der_dim = X.dim(0)
    # independent count: generators of degree 0 paired with their spaces
    expect = 0
    for name, g in P.gens.items():
        if g.degree == 0:
            expect += len(T.cy_basis(g.arity)) if g.cyclic else len(T.nc_basis(g.arity))
    assert der_dim == expect


def test_derivation_complex_matches_hochschild():
    # untraced target, uncurved presentation: in interior degrees (away
    # from the arity truncation) H^k(D) = HH^{k+2}(A)
    A = dual_numbers()
    P = associative_presentation(6)
    T = EndomorphismOperad(A)
    assign = {name: (T.nc_zero(g.arity) if g.arity != 2 else A.multiplication_cochain())
              for name, g in P.gens.items()}
    M = EndoYModule(T, assign)
    X, slots, _ = derivation_complex(P, M)
    hh = hochschild_cohomology(A, n_max=4)
    assert X.homology_dim(1) == hh[3]
    assert X.homology_dim(2) == hh[4]


def test_derivation_complex_zero_module():
    class ZeroModule:
        target = None

        def nc_space_basis(self, arity):
            return []

        def cy_space_basis(self, slots):
            return []

    P = mc_operad(max_arity=3)
    X, slots, _ = derivation_complex(P, ZeroModule())
    assert X.space.total_dim() == 0
