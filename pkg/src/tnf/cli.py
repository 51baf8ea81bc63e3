"""Command-line entry point.

One executable, ``tnf``, exposing the library operations with uniform
conventions: explicit seeds for anything stochastic (omitting --seed is a
usage error), a numeric mode switch, JSON output by default and CSV behind
--format csv / --csv.  Rationals are printed as "p/q" strings so rational
mode survives a round trip through text; floats appear only when
--mode float is given.

Exit codes: 0 success, 1 domain error (structured JSON on stderr), 2 usage
error.  No environment variables and no ambient randomness are consulted.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from .errors import DomainError
from .lattice import (LatticeMeasure, check_transitive_tnf, enumerate_subgroups,
                      FiniteGroup, hierarchy_chain)
from .measures import (classify_nu, classify_sequence_action, definetti_estimate,
                       independence_check, mc_fixed_probability, parse_alpha,
                       part_l_overlap, part_l_overlap_mc, sample_labels,
                       thoma_character, newton_sum, super_newton_sum,
                       fixed_measure_paper, fixed_measure_full)
from .perms import Permutation, cycle_type
from .seeding import child_seed
from .young import SignedPartition, SignedYoungSubgroup


def _encode(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {k: _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return value


def _emit(payload: dict, rows: list[dict], fmt: str) -> None:
    if fmt == "csv":
        columns: list[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        writer = csv.DictWriter(sys.stdout, fieldnames=columns, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _encode(v) for k, v in row.items()})
    else:
        json.dump(_encode(payload), sys.stdout, indent=2)
        sys.stdout.write("\n")


def _parse_perm(text: str) -> Permutation:
    try:
        return Permutation.parse(text)
    except ValueError as exc:
        raise DomainError(f"bad permutation {text!r}: {exc}") from None


def _parse_partition(text: str) -> SignedPartition:
    import os
    data = text
    if os.path.exists(text):
        with open(text) as fh:
            data = fh.read()
    try:
        return SignedPartition.from_json(data)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"bad signed partition: {exc}") from None


# ---------------------------------------------------------------------------
# subcommand handlers (each returns (payload, csv_rows, exit_code))


def _cmd_sample(args) -> tuple[dict, list[dict], int]:
    alpha = parse_alpha(args.alpha, args.mode)
    sample = sample_labels(alpha, args.n, args.seed)
    Y = sample.subgroup()
    payload = {
        "partition": sample.partition().to_json(),
        "summary": Y.summary(),
        "n2_equals_n": Y.check_n2_equals_n(),
        "alpha": alpha.as_dict(),
        "seed": args.seed,
        "mode": args.mode,
    }
    rows = [{"point": x, "label": lab}
            for x, lab in enumerate(sample.labels, start=1)]
    return payload, rows, 0


def _cmd_fixprob(args) -> tuple[dict, list[dict], int]:
    alpha = parse_alpha(args.alpha, args.mode)
    g = _parse_perm(args.g)
    report = mc_fixed_probability(alpha, g, args.samples, args.seed,
                                  shards=args.shards)
    payload = report.to_json()
    payload["alpha"] = alpha.as_dict()
    payload["g"] = str(g)
    rows = [{"kind": "factor", "k": f.k, "count": f.count,
             "paper_factor": f.paper_factor, "full_factor": f.full_factor}
            for f in report.factors]
    rows.append({"kind": "estimate",
                 "paper_value": report.paper_value,
                 "full_value": report.full_value,
                 "mc_estimate": report.mc_estimate,
                 "mc_stderr": report.mc_stderr,
                 "sample_count": report.sample_count,
                 "seed": report.seed, "mode": report.mode})
    return payload, rows, 0


def _cmd_character(args) -> tuple[dict, list[dict], int]:
    alpha = parse_alpha(args.alpha, args.mode)
    g = _parse_perm(args.g)
    ct = cycle_type(g)
    factors = [{"k": k, "count": c, "factor": super_newton_sum(alpha, k) ** c}
               for k, c in ct.items()]
    payload = {
        "character": thoma_character(alpha, g),
        "factors": factors,
        "fixed_measure_paper": fixed_measure_paper(alpha, g),
        "fixed_measure_full": fixed_measure_full(alpha, g),
        "g": str(g),
        "cycle_type": list(ct.counts),
        "alpha": alpha.as_dict(),
        "mode": args.mode,
    }
    rows = [{"kind": "factor", **f} for f in factors]
    rows.append({"kind": "value", "character": payload["character"],
                 "mode": args.mode})
    return payload, rows, 0


def _cmd_classify(args) -> tuple[dict, list[dict], int]:
    alpha = parse_alpha(args.alpha, args.mode)
    law = classify_nu(alpha)
    seq = classify_sequence_action(alpha)
    payload = {
        "law": law.to_json(),
        "sequence_action": seq.to_json(),
        "alpha": alpha.as_dict(),
        "mode": args.mode,
    }
    rows = [{"alpha": json.dumps(alpha.as_dict()),
             "classification": law.classification,
             "degenerate": law.degenerate, "atomic": law.atomic,
             "sequence_classification": seq.classification,
             "sequence_symmetry": seq.symmetry_size, "mode": args.mode}]
    return payload, rows, 0


def _cmd_finetti(args) -> tuple[dict, list[dict], int]:
    alpha = parse_alpha(args.alpha, args.mode)
    sample = sample_labels(alpha, args.n, args.seed)
    est = definetti_estimate(sample)
    errors = {str(i): abs(float(est.weight(i)) - float(alpha.weight(i)))
              for i in sorted(set(alpha.support()) | set(est.support()))}
    payload = {
        "estimates": est.as_dict(),
        "true_weights": alpha.as_dict(),
        "abs_errors": errors,
        "max_abs_error": max(errors.values()),
        "window": args.n,
        "seed": args.seed,
        "mode": args.mode,
    }
    rows = [{"label": i, "estimate": est.weight(i), "truth": alpha.weight(i),
             "abs_error": errors[str(i)]} for i in sorted(
                 set(alpha.support()) | set(est.support()))]
    if args.independence_t is not None:
        # independent stream, derived from the master seed with counter 1
        ind_seed = child_seed(args.seed, 1)
        dev = independence_check(alpha, args.n, args.independence_t,
                                 args.replicates, ind_seed)
        payload["independence"] = {
            "t": args.independence_t, "replicates": args.replicates,
            "max_deviation": dev, "seed": ind_seed,
        }
        rows.append({"label": f"joint(t={args.independence_t})",
                     "estimate": dev})
    return payload, rows, 0


def _cmd_part_l(args) -> tuple[dict, list[dict], int]:
    if (args.samples is None) != (args.seed is None):
        raise UsageError("--samples and --seed must be given together")
    payload: dict = {"l": args.l, "m": args.m, "mode": args.mode}
    if args.l == 2:
        exact = part_l_overlap(2, args.m)
        payload["exact"] = exact
    elif args.samples is None:
        raise DomainError(
            "no exact value for block length > 2; give --samples and --seed "
            "for the Monte Carlo tensor estimate")
    if args.samples is not None:
        est, se = part_l_overlap_mc(args.l, args.m, args.samples, args.seed)
        payload.update({"mc_estimate": est, "mc_stderr": se,
                        "samples": args.samples, "seed": args.seed})
    rows = [dict(payload)]
    return payload, rows, 0


def _cmd_young(args) -> tuple[dict, list[dict], int]:
    partition = _parse_partition(args.partition)
    Y = SignedYoungSubgroup(partition)
    payload = {
        "partition": partition.to_json(),
        "canonical_labels": list(partition.canonical().labels),
        "summary": Y.summary(),
        "normalizer": Y.normalizer_symbolic().partition.canonical().to_json(),
        "n2_equals_n": Y.check_n2_equals_n(),
        "mode": args.mode,
    }
    if args.g is not None:
        g = _parse_perm(args.g)
        payload["g"] = str(g)
        payload["contains"] = Y.contains(g)
        payload["is_fixed"] = Y.is_fixed(g)
        payload["ad_image"] = Y.ad_image(g).partition.to_json()
    rows = [{"point": x, "label": lab}
            for x, lab in enumerate(partition.labels, start=1)]
    return payload, rows, 0


def _cmd_lattice_enumerate(args) -> tuple[dict, list[dict], int]:
    lattice = enumerate_subgroups(args.n, allow_degree_6=args.allow_degree_6)
    sn = lattice.self_normalizing_set()
    rows = []
    for i, H in enumerate(lattice.subgroups):
        rows.append({
            "index": i,
            "order": H.order,
            "generators": ",".join(str(g) for g in H.generators) or "()",
            "normalizer": lattice.normalizer_table[i],
            "conjugacy_class": lattice.class_of(i),
            "self_normalizing": i in sn,
            "transitive_tnf": check_transitive_tnf(lattice, i) if args.check_tnf else None,
        })
        if not args.check_tnf:
            rows[-1].pop("transitive_tnf")
    payload = {
        "n": args.n,
        "counts": {"subgroups": len(lattice.subgroups),
                   "conjugacy_classes": len(lattice.conjugacy_classes),
                   "self_normalizing": len(sn)},
        "subgroups": rows,
        "mode": args.mode,
    }
    return payload, rows, 0


def _cmd_lattice_hierarchy(args) -> tuple[dict, list[dict], int]:
    lattice = enumerate_subgroups(args.n, allow_degree_6=args.allow_degree_6)
    if (args.cls is None) == (args.start is None):
        raise UsageError("give exactly one of --class or --start")
    if args.cls is not None:
        if not 0 <= args.cls < len(lattice.conjugacy_classes):
            raise DomainError(f"class index {args.cls} out of range "
                              f"(0..{len(lattice.conjugacy_classes) - 1})")
        measure = LatticeMeasure.uniform_on_class(lattice, args.cls)
        start_desc = {"class": args.cls}
    else:
        gens = [_parse_perm(s) for s in args.start.split(",") if s.strip()]
        H = FiniteGroup.generate(args.n, gens)
        measure = LatticeMeasure.point_mass(lattice, lattice.index_of(H))
        start_desc = {"generators": args.start}
    chain = hierarchy_chain(measure)
    sn = lattice.self_normalizing_set()
    steps = []
    for step, m in enumerate(chain):
        steps.append({
            "step": step,
            "measure": {str(i): v for i, v in m.as_dict().items()},
            "support_orders": sorted(lattice.subgroups[i].order
                                     for i in m.support()),
        })
    payload = {
        "n": args.n,
        "start": start_desc,
        "steps": steps,
        "step_count": len(chain) - 1,
        "fixpoint_self_normalizing": chain[-1].support() <= sn,
        "mode": args.mode,
    }
    rows = [{"step": s["step"],
             "support_size": len(s["measure"]),
             "support_orders": json.dumps(s["support_orders"]),
             "measure": json.dumps(_encode(s["measure"]))} for s in steps]
    return payload, rows, 0


def _cmd_experiments_run(args) -> tuple[dict, list[dict], int]:
    from .experiments import run_suite, write_report
    config = None
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    report = run_suite(args.name, config)
    paths = write_report(report, args.out, figures=not args.no_figures)
    payload = {
        "name": report.name,
        "verdict": report.verdict,
        "rows": len(report.rows),
        "failed_rows": [r for r in report.rows if not r.get("pass", True)],
        "out": str(args.out),
        "files": [str(p) for p in paths],
        "wallclock_seconds": round(report.wallclock, 3),
        "seed": report.config.get("seed"),
        "mode": report.config.get("mode"),
    }
    return payload, report.rows, 0 if report.verdict else 1


class UsageError(Exception):
    """Bad flag combinations caught after argparse; exits with code 2."""


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("rational", "float"),
                        default=argparse.SUPPRESS,
                        help="numeric mode (default rational)")
    common.add_argument("--format", choices=("json", "csv"),
                        default=argparse.SUPPRESS, help="output format")
    common.add_argument("--csv", dest="format", action="store_const",
                        const="csv", default=argparse.SUPPRESS,
                        help="shorthand for --format csv")
    common.add_argument("-v", "--verbose", action="store_true",
                        default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="tnf",
        description="Random signed Young subgroups: sampling, closed-form "
                    "fixed-point and character calculus, and exhaustive "
                    "finite-lattice verification.",
        parents=[common])
    parser.set_defaults(mode="rational", format="json", verbose=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common],
                       help="sample a signed Young subgroup on a window")
    p.add_argument("--alpha", required=True, help="weights JSON (inline or file)")
    p.add_argument("--n", type=int, required=True, help="window size")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("fixprob", parents=[common],
                       help="fixed-point probability: closed forms + Monte Carlo")
    p.add_argument("--alpha", required=True)
    p.add_argument("--g", required=True, help='permutation in cycle notation, e.g. "(1 2)(3 4 5)"')
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--shards", type=int, default=8)
    p.set_defaults(handler=_cmd_fixprob)

    p = sub.add_parser("character", parents=[common],
                       help="character value at a permutation")
    p.add_argument("--alpha", required=True)
    p.add_argument("--g", required=True)
    p.set_defaults(handler=_cmd_character)

    p = sub.add_parser("classify", parents=[common],
                       help="classify the subgroup law and the sequence action")
    p.add_argument("--alpha", required=True)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("finetti", parents=[common],
                       help="empirical label frequencies on one window")
    p.add_argument("--alpha", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--independence-t", type=int, default=None,
                   help="also check joint/product deviation on t coordinates")
    p.add_argument("--replicates", type=int, default=100_000)
    p.set_defaults(handler=_cmd_finetti)

    p = sub.add_parser("part-l", parents=[common],
                       help="overlap probability of a fixed block with a "
                            "uniform partition into equal blocks")
    p.add_argument("--m", type=int, required=True, help="number of blocks")
    p.add_argument("--l", type=int, default=2, help="block length (exact only for 2)")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=_cmd_part_l)

    p = sub.add_parser("young", parents=[common],
                       help="inspect a signed partition (JSON inline or file)")
    p.add_argument("--partition", required=True)
    p.add_argument("--g", default=None,
                   help="optional permutation to test against the subgroup")
    p.set_defaults(handler=_cmd_young)

    lat = sub.add_parser("lattice", help="exhaustive finite-lattice oracles")
    latsub = lat.add_subparsers(dest="lattice_command", required=True)

    p = latsub.add_parser("enumerate", parents=[common],
                          help="all subgroups of a small symmetric group")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--allow-degree-6", action="store_true")
    p.add_argument("--check-tnf", action="store_true",
                   help="also evaluate the transitive-action criterion per subgroup")
    p.set_defaults(handler=_cmd_lattice_enumerate)

    p = latsub.add_parser("hierarchy", parents=[common],
                          help="normalization chain of a measure on the lattice")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="cls", type=int, default=None,
                   help="start from the uniform measure on this conjugacy class")
    p.add_argument("--start", default=None,
                   help='start from the point mass at the subgroup generated by '
                        'these comma-separated cycles, e.g. "(1 2),(3 4)"')
    p.add_argument("--allow-degree-6", action="store_true")
    p.set_defaults(handler=_cmd_lattice_hierarchy)

    exp = sub.add_parser("experiments", help="seeded report-emitting suites")
    expsub = exp.add_subparsers(dest="experiments_command", required=True)

    p = expsub.add_parser("run", parents=[common], help="run one suite")
    from .experiments import SUITES
    p.add_argument("--name", required=True, choices=sorted(SUITES))
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering, write only report.json/report.csv")
    p.set_defaults(handler=_cmd_experiments_run)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        payload, rows, code = args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        json.dump({"error": {"type": type(exc).__name__, "message": str(exc)}},
                  sys.stderr)
        sys.stderr.write("\n")
        return 1
    if args.verbose:
        print(f"# mode={args.mode} format={args.format}", file=sys.stderr)
    _emit(payload, rows, args.format)
    return code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
