"""Command-line entry points for the construction-to-decoding pipeline."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import base, certify, decode, harness, lift
from .binmat import from_alist, to_alist
from .gf import make_field


def _parse_field(spec: str):
    """Field spec 'p' or 'p^e', e.g. '7' or '2^4'."""
    if "^" in spec:
        p, e = spec.split("^")
        return make_field(int(p), int(e))
    return make_field(int(spec))


def _load_code(code_path: str, labels_path: str | None = None) -> certify.CssCode:
    with open(code_path) as fh:
        text = fh.read()
    if "\n#Z\n" in text:
        xpart, zpart = text.split("\n#Z\n", 1)
        hx = from_alist(xpart.replace("#X\n", ""))
        hz = from_alist(zpart)
        return certify.CssCode(hx=hx, hz=hz, check_orthogonality=False)
    raise SystemExit("code file must contain '#X' and '#Z' alist sections")


def _save_code(path: str, code: certify.CssCode) -> None:
    with open(path, "w") as fh:
        fh.write("#X\n" + to_alist(code.hx) + "\n#Z\n" + to_alist(code.hz))


def cmd_search_base(args) -> int:
    field = _parse_field(args.field)
    mode = "exhaustive" if args.exhaustive else "first-found"
    results = base.search_coefficients(field, args.m, args.J, mode)
    if not results:
        print("no certificate-valid coefficients found")
        return 1
    for i, cand in enumerate(results):
        out = args.out if len(results) == 1 else f"{args.out}.{i}"
        with open(out, "w") as fh:
            fh.write(cand.to_text())
        print(f"candidate {i}: {cand.arrays()} -> {out}")
    return 0


def _load_coeffs(path: str) -> base.TwoBranchCoefficients:
    with open(path) as fh:
        return base.TwoBranchCoefficients.from_text(fh.read())


def cmd_build_base(args) -> int:
    coeffs = _load_coeffs(args.coeffs)
    pair = base.build_base(coeffs)
    _save_code(args.out, certify.CssCode(hx=pair.hx, hz=pair.hz, check_orthogonality=False))
    with open(args.out + ".map", "w") as fh:
        fh.write(pair.mapping_text())
    print(f"built base: {pair.hx} -> {args.out}")
    return 0


def cmd_certify_base(args) -> int:
    coeffs = _load_coeffs(args.coeffs)
    orth = base.check_orthogonality_certificate(coeffs)
    four = base.check_4cycle_certificate(coeffs)
    pair = base.build_base(coeffs)
    direct4 = base.verify_4cycles_directly(pair)
    from .binmat import product_is_zero
    orth_direct = product_is_zero(pair.hx, pair.hz)
    cen = base.census(pair)
    code = certify.code_params(pair)
    print(f"orthogonality certificate: {'pass' if orth else 'FAIL ' + str(orth.failures[:3])}")
    print(f"4-cycle certificate: {'pass' if four else 'FAIL ' + str(four.failures[:3])}")
    print(f"direct H_X.H_Z^T = 0: {'pass' if orth_direct else 'FAIL'}")
    print(f"direct 4-cycle absence: {'pass' if direct4 else 'FAIL'}")
    print(f"parameters: [[{code.n},{code.k}]]")
    print(f"cross-overlap pairs sharing two columns: {cen.n_xz2}")
    print(f"same-type 6-cycles: ({cen.n6_x},{cen.n6_z})")
    print(f"overlap histogram: {cen.overlap_histogram}")
    return 0 if (orth and four and direct4 and orth_direct) else 1


def cmd_lift(args) -> int:
    coeffs = _load_coeffs(args.base)
    pair = base.build_base(coeffs)
    cen = base.census(pair)
    seeds = []
    if args.orbit:
        with open(args.orbit) as fh:
            seeds += [tuple(int(x) for x in ln.split()) for ln in fh if ln.strip()]
    if args.orbit_supports:
        seeds += [tuple(int(x) for x in chunk.split(",")) for chunk in args.orbit_supports.split(";")]
    orbit_obj = None
    if seeds:
        K = lift.cyclic_subgroup(args.P, args.K_order)
        orbit_obj = lift.orbit_from_seeds(pair, seeds, args.P, K)
        print(f"orbit: {len(orbit_obj.supports)} supports")
    system = lift.build_congruence_system(pair, args.P, cen, orbit_obj)
    print(f"congruence system: {len(system.zero_rows)} zero rows, {len(system.forms)} nonzero forms")
    result = lift.solve_labels(system, seed=args.seed, mode=args.mode)
    print(f"label search: {result.status} (pins {result.pins}, {result.elapsed:.1f}s)")
    if result.labels is None:
        return 1
    with open(args.out, "w") as fh:
        fh.write(result.labels.to_text())
    code = lift.build_lift(pair, result.labels)
    _save_code(args.out + ".code", code)
    cert = lift.verify_lift(code, pair, result.labels, orbit_obj, cen)
    sys.stdout.write(cert.report_text())
    return 0 if cert.passed else 1


def cmd_certify_lift(args) -> int:
    coeffs = _load_coeffs(args.base)
    pair = base.build_base(coeffs)
    labels = lift.LiftLabels.from_text(open(args.labels).read())
    code = lift.build_lift(pair, labels)
    cen = base.census(pair)
    cert = lift.verify_lift(code, pair, labels, None, cen)
    sys.stdout.write(cert.report_text())
    return 0 if cert.passed else 1


def cmd_distance(args) -> int:
    code = _load_code(args.code)
    result = certify.certify_lower_bound(code, args.target, budget_seconds=args.budget)
    sys.stdout.write(certify.certification_report_text(result))
    return 0 if result.status == "accepted" else 1


def cmd_witness(args) -> int:
    code = _load_code(args.code)
    side, K, pairs = certify.witness_from_text(open(args.witness).read())
    if K and code.lift_order:
        support = certify.lifted_witness_support(pairs, K, code.lift_order)
    elif K and args.P:
        support = certify.lifted_witness_support(pairs, K, args.P)
    else:
        support = tuple(c for c, _ in pairs)
    report = certify.verify_witness(code, side, support)
    print(f"side {report.side} weight {report.weight}")
    print(f"kernel membership: {report.in_kernel}")
    print(f"row-space membership: {report.in_row_space}")
    print(f"valid witness: {report.valid}")
    return 0 if report.valid else 1


def cmd_decode(args) -> int:
    code = _load_code(args.code)
    prior = decode.DepolarizingPrior(args.p)
    rng = np.random.default_rng(args.seed)
    ex, ez = decode.sample_error(prior, code.n, rng)
    sx, sz = decode.syndromes(code, ex, ez)
    decoder = decode.JointBPDecoder(code, prior)
    outcome = decoder.decode(sx, sz)
    verdict = decode.classify_outcome(code, ex, ez, outcome.ex_hat, outcome.ez_hat)
    print(f"status {outcome.status} iterations {outcome.iterations} verdict {verdict}")
    return 0


def cmd_fer(args) -> int:
    code = _load_code(args.code)
    p_list = [float(x) for x in args.p_list.split(",")]
    records = harness.run_fer(
        code, p_list, trials=args.trials, failure_target=args.failures,
        master_seed=args.seed, checkpoint_path=args.checkpoint, dump_dir=args.dump_dir,
    )
    refs = None
    if 0.0 < code.rate < 1.0:
        refs = harness.ReferenceLines(p_hash=harness.hashing_threshold(code.rate))
    text = harness.emit_plot_data(records, refs)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cssldpc")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search-base", help="normalized coefficient search")
    p.add_argument("--field", required=True, help="p or p^e")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--out", default="base.coeffs")
    p.set_defaults(func=cmd_search_base)

    p = sub.add_parser("build-base", help="build matrices from a coefficient file")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--out", default="base.code")
    p.set_defaults(func=cmd_build_base)

    p = sub.add_parser("certify-base", help="certificates, census and parameters")
    p.add_argument("--coeffs", required=True)
    p.set_defaults(func=cmd_certify_base)

    p = sub.add_parser("lift", help="solve lift labels and verify")
    p.add_argument("--base", required=True, help="coefficient file")
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--orbit", default=None, help="file of seed supports, one per line")
    p.add_argument("--orbit-supports", default=None,
                   help="semicolon-separated seed supports, comma-separated columns")
    p.add_argument("--K-order", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["randomized", "complete"], default="randomized")
    p.add_argument("--out", default="lift.labels")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("certify-lift", help="re-verify labels against a base")
    p.add_argument("--base", required=True)
    p.add_argument("--labels", required=True)
    p.set_defaults(func=cmd_certify_lift)

    p = sub.add_parser("distance", help="certified lower bound at a target weight")
    p.add_argument("--code", required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--budget", type=float, default=None, help="seconds")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("witness", help="verify a distance upper-bound witness")
    p.add_argument("--code", required=True)
    p.add_argument("--witness", required=True)
    p.add_argument("--P", type=int, default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("decode", help="one sampled decode trial")
    p.add_argument("--code", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("fer", help="Monte Carlo FER sweep")
    p.add_argument("--code", required=True)
    p.add_argument("--p-list", required=True, help="comma-separated")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--failures", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--dump-dir", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fer)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
