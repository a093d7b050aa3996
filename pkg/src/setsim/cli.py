"""Command-line front end.

Exit codes: 0 = ran and (where applicable) matched expectations, 1 = a
verified mismatch or violation was found, 2 = usage/config error.  All
commands are deterministic given their full flag set including --seed, and
JSON output is byte-stable across runs.
"""

import argparse
import csv
import io
import json
import sys
from typing import Optional

from . import catalog, construct, lsh
from .catalog import SimilaritySpec, check_metric, classify
from .rational import as_fraction
from .setfunctions import PreconditionError, SetFunctionTable
from .sets import Universe

DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 100_000
DEFAULT_ZMAX = 4.0


def _emit(args, payload: dict, text: str, csv_rows: Optional[list[dict]] = None) -> None:
    if args.format == "json":
        out = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    elif args.format == "csv":
        rows = csv_rows if csv_rows is not None else [payload]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        out = buf.getvalue()
    else:
        out = text + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _parse_descriptor(text: str) -> tuple[str, dict]:
    """'sorensen_gamma:gamma=2' -> ('sorensen_gamma', {'gamma': '2'})."""
    name, _, tail = text.partition(":")
    params = {}
    if tail:
        for item in tail.split(","):
            key, _, value = item.partition("=")
            if not value:
                raise ValueError(f"malformed parameter {item!r} in descriptor {text!r}")
            params[key.strip()] = value.strip()
    return name.strip(), params


def _resolve_similarity(args) -> SimilaritySpec:
    if getattr(args, "table", None):
        with open(args.table) as fh:
            obj = json.load(fh)
        return SimilaritySpec.from_table(obj["S"])
    if not getattr(args, "sim", None):
        raise ValueError("provide --sim NAME or --table FILE")
    name, params = _parse_descriptor(args.sim)
    gamma = params.get("gamma", args.gamma)
    x = params.get("x", args.x)
    hstep = params.get("h", params.get("hstep", args.hstep))
    k = int(params.get("k", args.k))
    nint = int(params.get("nint", args.nint))
    if name == "cardinality_intersection":
        return SimilaritySpec.cardinality_intersection(as_fraction(x), as_fraction(hstep), k, nint)
    if name == "identity_intersection":
        return SimilaritySpec.identity_intersection(as_fraction(x), as_fraction(hstep), k, nint)
    if name in catalog.GAMMA_KINDS:
        if gamma is None:
            raise ValueError(f"{name} requires --gamma")
        return SimilaritySpec.named(name, gamma=as_fraction(gamma))
    return SimilaritySpec.named(name)


def _universe_for(spec: SimilaritySpec, args) -> Universe:
    req = spec.required_universe_size()
    if req is not None:
        return Universe(req)
    if args.n is None:
        raise ValueError(f"{spec.descriptor()} needs --n")
    return Universe(args.n)


def cmd_classify(args) -> int:
    spec = _resolve_similarity(args)
    universe = _universe_for(spec, args)
    report = classify(spec, universe, tol=args.tol)
    text = (
        f"similarity: {report.similarity}\n"
        f"n: {report.universe_size}\n"
        f"modularity: {report.modularity}\n"
        f"monotone (nonincreasing slices): {report.monotone}\n"
        f"similarity axioms: {'pass' if report.similarity_axioms else 'FAIL'}\n"
        f"metric: {report.metric if report.metric else 'skipped (n over cap)'}"
    )
    for prop, cert in sorted(report.certificates.items()):
        text += f"\n  {prop} violated at {cert.witness} by {float(cert.margin):.6g}"
    _emit(args, report.to_json(), text, [_classify_csv_row(report)])
    return 0


def _classify_csv_row(report) -> dict:
    return {
        "similarity": report.similarity,
        "n": report.universe_size,
        "modularity": report.modularity,
        "monotone": report.monotone,
        "similarity_axioms": report.similarity_axioms,
        "metric": report.metric,
    }


def _catalog_evaluations(args) -> list[dict]:
    """Classify every catalog row at the configured parameters."""
    n = args.n
    gammas = [as_fraction(g) for g in args.gammas.split(",")]
    tol = args.tol
    evaluations = []

    def run(row_name, spec, gamma=None):
        universe = spec.universe(None if spec.required_universe_size() else n)
        report = classify(spec, universe, tol=tol)
        expected = catalog.expected_classification(spec.kind, gamma)
        evaluations.append(
            {
                "row": row_name,
                "similarity": report.similarity,
                "n": universe.size,
                "verdict": report.modularity,
                "expected": expected,
                "match": catalog.verdict_matches(report.modularity, expected),
                "monotone": report.monotone,
                "metric": report.metric,
                "lshable": catalog.is_lshable(spec.kind, gamma),
            }
        )

    for kind in catalog.FORMULA_KINDS:
        run(kind, SimilaritySpec.named(kind))
    for kind in catalog.GAMMA_KINDS:
        for g in gammas:
            run(kind, SimilaritySpec.named(kind, gamma=g), gamma=g)
    x, hstep = as_fraction(args.x), as_fraction(args.hstep)
    run(
        "cardinality_intersection",
        SimilaritySpec.cardinality_intersection(x, hstep, args.k, args.nint),
    )
    run(
        "identity_intersection",
        SimilaritySpec.identity_intersection(x, hstep, args.k, args.nint),
    )
    return evaluations


def cmd_classify_function(args) -> int:
    from . import setfunctions as sf

    table = SetFunctionTable.load(args.f)
    sub = sf.is_submodular(table, args.tol)
    sup = sf.is_supermodular(table, args.tol)
    down = sf.is_monotone(table, "nonincreasing", args.tol)
    up = sf.is_monotone(table, "nondecreasing", args.tol)
    profile = sf.cardinality_profile_of(table, args.tol)

    if sub is None and sup is None:
        verdict = "modular"
    elif sub is None:
        verdict = "submodular"
    elif sup is None:
        verdict = "supermodular"
    else:
        verdict = "neither"
    if down is None and up is None:
        monotone = "constant"
    elif down is None:
        monotone = "nonincreasing"
    elif up is None:
        monotone = "nondecreasing"
    else:
        monotone = "none"

    certificates = {
        k: c.to_json()
        for k, c in (("submodularity", sub), ("supermodularity", sup))
        if c is not None
    }
    payload = {
        "n": table.universe.size,
        "modularity": verdict,
        "monotone": monotone,
        "cardinality_profile": None if profile is None else [float(v) for v in profile.values],
        "certificates": certificates,
    }
    text = f"n: {table.universe.size}\nmodularity: {verdict}\nmonotone: {monotone}"
    if profile is not None:
        text += "\ncardinality profile: " + ", ".join(f"{float(v):g}" for v in profile.values)
    for prop, cert in sorted(certificates.items()):
        text += f"\n  {prop} violated at {cert['witness']} by {cert['margin']:.6g}"
    _emit(args, payload, text, [
        {"n": table.universe.size, "modularity": verdict, "monotone": monotone}
    ])
    return 0


def cmd_table1(args) -> int:
    evaluations = _catalog_evaluations(args)
    row_names = [e["row"] for e in evaluations]
    unique_rows = list(dict.fromkeys(row_names))
    row_match = {
        name: all(e["match"] for e in evaluations if e["row"] == name) for name in unique_rows
    }
    matched = sum(row_match.values())
    total = len(unique_rows)

    width = max(len(e["similarity"]) for e in evaluations) + 2
    lines = [f"{'similarity':<{width}}{'verdict':<14}{'expected':<14}{'LSHable':<9}match"]
    for e in evaluations:
        lines.append(
            f"{e['similarity']:<{width}}{e['verdict']:<14}{e['expected']:<14}"
            f"{'yes' if e['lshable'] else 'no':<9}{'yes' if e['match'] else 'NO'}"
        )
    lines.append(f"rows matched: {matched}/{total}")
    payload = {
        "n": args.n,
        "evaluations": evaluations,
        "rows_matched": matched,
        "rows_total": total,
    }
    csv_rows = [
        {
            "similarity": e["similarity"],
            "verdict": e["verdict"],
            "expected": e["expected"],
            "lshable": "yes" if e["lshable"] else "no",
            "match": "yes" if e["match"] else "no",
        }
        for e in evaluations
    ]
    _emit(args, payload, "\n".join(lines), csv_rows)
    return 0 if matched == total else 1


def cmd_verify_lsh(args) -> int:
    spec = _resolve_similarity(args)
    universe = _universe_for(spec, args)
    fam = lsh.family_for_similarity(spec, universe)
    pairs = lsh.load_pairs(args.pairs, fam.universe) if args.pairs else None

    if args.exact:
        if pairs is None:
            u = fam.universe
            if u.size > lsh.ALL_PAIRS_MAX:
                raise ValueError(f"all-pairs mode capped at n <= {lsh.ALL_PAIRS_MAX}")
            pairs = [
                (u.from_mask(a), u.from_mask(b))
                for a in range(u.n_subsets)
                for b in range(a + 1, u.n_subsets)
            ]
        mismatches = []
        for x, y in pairs:
            got = fam.exact_collision(x, y)
            want = catalog.eval_similarity(spec, x, y)
            if got != want:
                mismatches.append(
                    {"X": list(x.elements()), "Y": list(y.elements()),
                     "collision": str(got), "similarity": str(want)}
                )
        payload = {
            "family": fam.name,
            "similarity": spec.descriptor(),
            "mode": "exact",
            "pairs": len(pairs),
            "mismatches": mismatches,
            "passed": not mismatches,
        }
        text = (
            f"family: {fam.name}   similarity: {spec.descriptor()}\n"
            f"exact collision check over {len(pairs)} pairs: "
            f"{'pass' if not mismatches else f'{len(mismatches)} mismatches'}"
        )
        _emit(args, payload, text)
        return 0 if not mismatches else 1

    report = lsh.verify_lsh(
        fam, spec, pairs=pairs, samples=args.samples, seed=args.seed, zmax=args.zmax
    )
    csv_rows = [
        {"X": str(r.x), "Y": str(r.y), "target": r.target, "rate": r.rate,
         "stderr": r.stderr, "z": r.z}
        for r in report.rows
    ]
    _emit(args, report.to_json(), report.to_text(), csv_rows)
    return 0 if report.passed else 1


def cmd_counterexample(args) -> int:
    if args.name == "gamma_matrix":
        gamma = as_fraction(args.gamma)
        spec = catalog.gamma_counterexample_matrix(gamma)
        universe = Universe(2)
        report = classify(spec, universe, tol=args.tol)
        metric = check_metric(spec, universe, tol=args.tol)
        margin = float(metric.certificate.margin) if metric.certificate else 0.0
        expected_margin = float(gamma)
        confirmed = (
            report.modularity == "supermodular"
            and report.monotone
            and (
                (gamma > 0 and abs(margin - expected_margin) <= 1e-12)
                or (gamma == 0 and metric.passed)
            )
        )
        payload = {
            "counterexample": "gamma_matrix",
            "gamma": str(gamma),
            "modularity": report.modularity,
            "monotone": report.monotone,
            "metric": metric.verdict,
            "triangle_margin": margin,
            "confirmed": confirmed,
        }
        text = (
            f"gamma matrix at gamma={gamma}\n"
            f"modularity: {report.modularity}   monotone: {report.monotone}\n"
            f"metric: {metric.verdict}   triangle margin: {margin:.12g}\n"
            f"confirmed: {confirmed}"
        )
        _emit(args, payload, text)
        return 0 if confirmed else 1

    if args.name == "cshs_pgf":
        witness = construct.cshs_counterexample(args.n)
        check = witness.pgf_check
        confirmed = (not check.ok) and check.witness_index == 3
        payload = {
            "counterexample": "cshs_pgf",
            "n": args.n,
            "profile": [float(v) for v in witness.profile.values],
            "profile_valid": True,
            "pgf_dilution": check.ok,
            "pgf_witness_index": check.witness_index,
            "confirmed": confirmed,
        }
        text = (
            f"profile similarity on n={args.n}: "
            + ", ".join(f"{float(v):g}" for v in witness.profile.values)
            + "\nprofile accepted: yes (convex, nonincreasing, h(0)=1)"
            + f"\ndiluted-PGF coefficients: no (negative at index {check.witness_index})"
            + f"\nconfirmed: {confirmed}"
        )
        _emit(args, payload, text)
        return 0 if confirmed else 1

    raise ValueError(f"unknown counterexample {args.name!r}")


def cmd_construct(args) -> int:
    if args.profile:
        with open(args.profile) as fh:
            obj = json.load(fh)
        values = obj["values"] if isinstance(obj, dict) else obj
        spec = construct.cshs_from_profile(values)
        universe = Universe(len(values) - 1)
    else:
        if not args.g:
            raise ValueError("provide --g FILE (with optional --m FILE) or --profile FILE")
        g = SetFunctionTable.load(args.g)
        m = None
        if args.m:
            with open(args.m) as fh:
                m = construct.ModularSpec.from_json(json.load(fh))
        f = construct.shs_from_supermodular(g, m, tol=args.tol)
        spec = construct.similarity_from_slice_function(f, tol=args.tol)
        universe = g.universe

    matrix = catalog.similarity_matrix(spec, universe)
    table_json = {
        "n": universe.size,
        "S": [[float(v) for v in row] for row in matrix],
    }
    report = classify(spec, universe, tol=args.tol)
    payload = {
        "table": table_json,
        "verification": report.to_json(),
    }
    text = (
        f"constructed similarity on n={universe.size}\n"
        f"modularity: {report.modularity}   monotone: {report.monotone}   "
        f"metric: {report.metric}"
    )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(table_json, fh, sort_keys=True, indent=2)
            fh.write("\n")
        sys.stdout.write(text + f"\ntable written to {args.out}\n")
    else:
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def _add_similarity_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sim", help="similarity name, optionally 'name:key=value,...'")
    p.add_argument("--table", help="JSON file with a custom similarity table")
    p.add_argument("--n", type=int, default=None, help="universe size")
    p.add_argument("--gamma", default=None, help="gamma for the gamma families")
    p.add_argument("--x", default="0.1", help="intersection base probability")
    p.add_argument("--hstep", default="0.2", help="intersection per-element step")
    p.add_argument("--k", type=int, default=2, help="intersection set-part size")
    p.add_argument("--nint", type=int, default=4, help="intersection integer-part size")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", default=None, help="write output to a file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="setsim",
        description="Classify set similarities and verify their hash families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one similarity")
    _add_similarity_flags(p)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("classify-function", help="property verdicts for a set-function table")
    p.add_argument("--f", required=True, help="JSON set-function table")
    _add_output_flags(p)
    p.set_defaults(fn=cmd_classify_function)

    p = sub.add_parser("table1", help="classify the full catalog against reference verdicts")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--gammas", default="0.5,2", help="comma-separated gamma values")
    p.add_argument("--x", default="0.1")
    p.add_argument("--hstep", default="0.2")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--nint", type=int, default=4)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_table1)

    p = sub.add_parser("verify-lsh", help="check a hash family against its similarity")
    _add_similarity_flags(p)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--zmax", type=float, default=DEFAULT_ZMAX)
    p.add_argument("--pairs", default=None, help="JSON pair file instead of all pairs")
    p.add_argument("--exact", action="store_true", help="exact enumeration instead of sampling")
    _add_output_flags(p)
    p.set_defaults(fn=cmd_verify_lsh)

    p = sub.add_parser("counterexample", help="run a named counterexample")
    p.add_argument("name", choices=("gamma_matrix", "cshs_pgf"))
    p.add_argument("--gamma", default="0.25")
    p.add_argument("--n", type=int, default=4)
    _add_output_flags(p)
    p.set_defaults(fn=cmd_counterexample)

    p = sub.add_parser("construct", help="build a similarity from ingredients")
    p.add_argument("--g", default=None, help="JSON set-function table (supermodular)")
    p.add_argument("--m", default=None, help="JSON modular spec")
    p.add_argument("--profile", default=None, help="JSON convex profile")
    p.add_argument("--out", default=None, help="write the similarity table here")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(fn=cmd_construct)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.fn is cmd_verify_lsh and not args.exact and args.seed is None:
        parser.error("--seed is required for sampled verification")
    if args.fn is cmd_verify_lsh and args.seed is None:
        args.seed = 0
    try:
        return args.fn(args)
    except (ValueError, PreconditionError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
