"""Batch command-line frontend.

Subcommands: hh, hc, mc-check, lift, trees, operad-dims, cech,
defcomplex.  JSON in; JSON (default) or TSV out, rationals as "p/q"
strings.  Every JSON report embeds the sha256 of each input file, the
sign-table version, and the seed, so equal inputs and seed give
byte-identical output.  Exit codes: 2 parse error, 3 invariant
violation, 4 localization not stabilized; a lifting obstruction is a
result, not a failure.
"""

import argparse
import hashlib
import json
import sys

from .cech import cech_dims, load_space, nerve_cohomology
from .cyclic import (NotStabilized, algebra_cocyclic_module, deformation_complex,
                     hc_class_rank_through, hc_dims_bb, hc_dims_lambda,
                     localize_c1)
from .hochschild import (CurvedMC, HochCochain, TracedAlgebra,
                         check_curved_mc, hochschild_cohomology, load_algebra,
                         qf)
from .lifting import lift, load_problem, report_json
from .operads import Gen, free_operad
from .signs import SIGN_TABLE_VERSION
from .trees import enumerate_trees


def _hash_file(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _emit(args, command, inputs, result, tsv_rows=None):
    if args.format == "tsv" and tsv_rows is not None:
        out = "\n".join("\t".join(str(c) for c in row) for row in tsv_rows)
        print(out)
        return
    report = {
        "command": command,
        "inputs": {p: _hash_file(p) for p in inputs},
        "sign_table": SIGN_TABLE_VERSION,
        "seed": args.seed,
        "result": result,
    }
    print(json.dumps(report, sort_keys=True, indent=1))


def _load_algebra_arg(path):
    try:
        return load_algebra(path)
    except (OSError, json.JSONDecodeError, KeyError) as e:
        print("parse error: %s" % e, file=sys.stderr)
        sys.exit(2)
    except ValueError as e:
        print("invariant violation: %s" % e, file=sys.stderr)
        sys.exit(3)


def cmd_hh(args):
    A = _load_algebra_arg(args.algebra)
    alg = A.algebra if isinstance(A, TracedAlgebra) else A
    dims = hochschild_cohomology(alg, n_max=args.n_max)
    _emit(args, "hh", [args.algebra], {"dims": dims}, tsv_rows=[dims])


def cmd_hc(args):
    A = _load_algebra_arg(args.algebra)
    alg = A.algebra if isinstance(A, TracedAlgebra) else A
    module = algebra_cocyclic_module(alg, args.n_max + 1)
    lam = hc_dims_lambda(module, args.n_max)
    bb = hc_dims_bb(module, args.n_max)
    s_ranks = {}
    for n in range(0, args.n_max - 1):
        s_ranks["%d->%d" % (n, n + 2)] = hc_class_rank_through(
            module, n, n + 2, args.n_max)
    result = {"lambda_dims": lam, "bb_dims": bb, "periodicity_ranks": s_ranks}
    if args.localize:
        try:
            out = localize_c1(module, args.n_max)
            result["localized"] = {"even": out["even"], "odd": out["odd"],
                                   "certificate": out["certificate"]}
        except NotStabilized as e:
            print("not stabilized in window: %r" % (e.trace,), file=sys.stderr)
            sys.exit(4)
    _emit(args, "hc", [args.algebra], result, tsv_rows=[lam, bb])


def cmd_mc_check(args):
    A = _load_algebra_arg(args.algebra)
    alg = A.algebra if isinstance(A, TracedAlgebra) else A
    comps = {}
    inputs = [args.algebra]
    if args.components:
        inputs.append(args.components)
        try:
            with open(args.components) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            print("parse error: %s" % e, file=sys.stderr)
            sys.exit(2)
        for item in data:
            vals = {(t[0], tuple(t[1])): qf(t[2]) for t in item["terms"]}
            comps[(item["n"], item["k"])] = HochCochain(alg.dim, item["n"], vals)
    try:
        M = CurvedMC.from_product(alg, comps)
    except ValueError as e:
        print("invariant violation: %s" % e, file=sys.stderr)
        sys.exit(3)
    rep = check_curved_mc(M, args.n_max, args.k_max)
    if rep.ok:
        result = {"ok": True,
                  "message": "OK through (n<=%d, k<=%d)" % (args.n_max, args.k_max)}
        rows = [["OK", args.n_max, args.k_max]]
    else:
        result = {"ok": False, "failures": [list(f[0]) for f in rep.failures]}
        rows = [["FAIL"] + list(rep.first_failure())]
    _emit(args, "mc-check", inputs, result, tsv_rows=rows)


def cmd_lift(args):
    try:
        prob = load_problem(args.problem)
    except (OSError, json.JSONDecodeError, KeyError) as e:
        print("parse error: %s" % e, file=sys.stderr)
        sys.exit(2)
    except (ValueError, AssertionError) as e:
        print("invariant violation: %s" % e, file=sys.stderr)
        sys.exit(3)
    res = lift(prob, args.k_max)
    _emit(args, "lift", [args.problem], report_json(res))


def cmd_trees(args):
    arities = {int(a) for a in args.arity.split(",")}
    if args.min_arity:
        pred = lambda k: k >= min(arities)
    else:
        pred = lambda k: k in arities
    encs = enumerate_trees(args.inputs, pred, args.max_vertices,
                           include_unit=not args.no_unit)
    result = {"count": len(encs)}
    if args.list:
        result["trees"] = encs
    _emit(args, "trees", [], result, tsv_rows=[[len(encs)]])


def cmd_operad_dims(args):
    gens = []
    for spec in args.generators.split(","):
        name, arity, degree, weight = spec.split(":")
        gens.append(Gen(name, int(arity), False, int(degree), int(weight)))
    F = free_operad(gens, args.n_max, max_vertices=args.max_vertices)
    dims = [F.nc_dim(n) for n in range(0, args.n_max + 1)]
    _emit(args, "operad-dims", [], {"dims": dims}, tsv_rows=[dims])


def cmd_cech(args):
    try:
        X, covers = load_space(args.space)
    except (OSError, json.JSONDecodeError, KeyError) as e:
        print("parse error: %s" % e, file=sys.stderr)
        sys.exit(2)
    except ValueError as e:
        print("invariant violation: %s" % e, file=sys.stderr)
        sys.exit(3)
    if args.cover not in covers:
        print("no cover named %r" % args.cover, file=sys.stderr)
        sys.exit(2)
    cov = covers[args.cover]
    dims = cech_dims(cov, args.n_max)
    result = {"cech_dims": dims, "nerve_dims": nerve_cohomology(cov, args.n_max)}
    _emit(args, "cech", [args.space], result, tsv_rows=[dims])


def cmd_defcomplex(args):
    A = _load_algebra_arg(args.algebra)
    if not isinstance(A, TracedAlgebra):
        print("invariant violation: defcomplex needs a trace", file=sys.stderr)
        sys.exit(3)
    D, om, H, C = deformation_complex(A, args.n_max)
    dims = [D.homology_dim(n) for n in range(0, args.n_max)]
    _emit(args, "defcomplex", [args.algebra], {"cone_dims": dims}, tsv_rows=[dims])


def build_parser():
    p = argparse.ArgumentParser(
        prog="mclift",
        description="exact Hochschild/cyclic computations, tree operads, "
                    "and Maurer-Cartan lifting")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in reports; fixes any sampled diagnostics")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("hh", help="Hochschild cohomology dimensions")
    s.add_argument("algebra")
    s.add_argument("--n-max", type=int, default=4)
    s.set_defaults(func=cmd_hh)

    s = sub.add_parser("hc", help="cyclic cohomology dims and periodicity")
    s.add_argument("algebra")
    s.add_argument("--n-max", type=int, default=4)
    s.add_argument("--localize", action="store_true")
    s.set_defaults(func=cmd_hc)

    s = sub.add_parser("mc-check", help="verify a curved structure")
    s.add_argument("algebra")
    s.add_argument("--components", help="JSON list of {n, k, terms}")
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--k-max", type=int, default=3)
    s.set_defaults(func=cmd_mc_check)

    s = sub.add_parser("lift", help="run the lifting solver")
    s.add_argument("problem")
    s.add_argument("--k-max", type=int, default=None)
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("trees", help="count planar trees")
    s.add_argument("--arity", default="2", help="comma list of allowed arities")
    s.add_argument("--min-arity", action="store_true",
                   help="treat --arity as a lower bound")
    s.add_argument("--inputs", type=int, required=True)
    s.add_argument("--max-vertices", type=int, default=10)
    s.add_argument("--no-unit", action="store_true")
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_trees)

    s = sub.add_parser("operad-dims", help="free-operad dimensions")
    s.add_argument("--generators", default="b:2:0:0",
                   help="comma list name:arity:degree:weight")
    s.add_argument("--n-max", type=int, default=5)
    s.add_argument("--max-vertices", type=int, default=8)
    s.set_defaults(func=cmd_operad_dims)

    s = sub.add_parser("cech", help="Cech cohomology of a finite cover")
    s.add_argument("space")
    s.add_argument("--cover", required=True)
    s.add_argument("--n-max", type=int, default=2)
    s.set_defaults(func=cmd_cech)

    s = sub.add_parser("defcomplex", help="deformation complex of a traced algebra")
    s.add_argument("algebra")
    s.add_argument("--n-max", type=int, default=4)
    s.set_defaults(func=cmd_defcomplex)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
