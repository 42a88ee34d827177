"""Command-line front end.

Subcommands: build (weight files), sample (corpora), check (membership of a
token string), verify (correctness suites), metric (bracket-closing score).
Exit status is 0 exactly when every requested check passes; 2 signals a
usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .automaton import (ACCEPT, DyckParams, EMPTY, REJECT, format_string,
                        parse_string, transition)
from .builders import DEFAULT_PARAMETER_BUDGET, build
from .encodings import ARCH_LSTM, ARCH_NAIVE, ARCH_SIMPLE, BINARY, ONEHOT
from .numerics import NumericConfig
from .sampler import (SamplerConfig, corpus_statistics, format_corpus,
                      parse_corpus, sample_corpus, sample_strings)
from .verify import (QuantizedEncoder, VerificationReport,
                     applicable_constructions, check_cross_construction_agreement,
                     check_full_depth_distinctness, check_generation_equivalence,
                     check_probability_margins, check_saturation_exactness,
                     check_stack_correspondence, closing_metric,
                     closing_metric_uniform, find_collision)
from .weightio import atomic_write_text, load_weights, save_weights

SUITES = ("equivalence", "stack", "margins", "saturation", "distinct",
          "collide", "cross")


def _add_language_args(parser, required=True):
    parser.add_argument("-k", type=int, required=required, help="bracket types")
    parser.add_argument("-m", type=int, required=required, help="depth bound")


def _add_numeric_args(parser):
    parser.add_argument("--beta", type=float, default=None,
                        help="saturation threshold (default 20)")
    parser.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="recurrent scale (default 2*beta/gamma + 1)")
    parser.add_argument("--zeta", type=float, default=None,
                        help="readout scale (default (ln(10k)+0.5)/gamma)")


def _numeric_config(args, k: int) -> NumericConfig:
    kwargs = {}
    if args.beta is not None:
        kwargs["beta"] = args.beta
    return NumericConfig.for_language(k, zeta=args.zeta, lam=args.lam, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyckrnn",
        description="Build, run, and verify bracket-language generator networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="construct a weight file")
    _add_language_args(p_build)
    p_build.add_argument("--arch", choices=(ARCH_SIMPLE, ARCH_LSTM, ARCH_NAIVE),
                         default=ARCH_SIMPLE)
    p_build.add_argument("--enc", choices=(ONEHOT, BINARY), default=None,
                         help="slot encoding (default onehot; not applicable "
                              "to the naive architecture)")
    _add_numeric_args(p_build)
    p_build.add_argument("--naive-budget", type=int,
                         default=DEFAULT_PARAMETER_BUDGET,
                         help="dense parameter budget for the automaton network")
    p_build.add_argument("-o", "--output", required=True, help="weight file path")

    p_sample = sub.add_parser("sample", help="sample a corpus file")
    _add_language_args(p_sample)
    p_sample.add_argument("--tokens", type=int, required=True,
                          help="minimum cumulative token count")
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--min-len", type=int, default=1)
    p_sample.add_argument("--max-len", type=int, default=None)
    p_sample.add_argument("-o", "--output", required=True, help="corpus file path")

    p_check = sub.add_parser("check", help="membership of one token string")
    _add_language_args(p_check)
    p_check.add_argument("string", help='token string, e.g. "(1 (2 )2 )1 $"')

    p_verify = sub.add_parser("verify", help="run correctness suites")
    _add_language_args(p_verify)
    p_verify.add_argument("--suite", action="append", choices=SUITES + ("all",),
                          default=None, help="suite selection (repeatable)")
    p_verify.add_argument("--arch",
                          choices=(ARCH_SIMPLE, ARCH_LSTM, ARCH_NAIVE, "all"),
                          default="all")
    p_verify.add_argument("--enc", choices=(ONEHOT, BINARY, "all"), default="all")
    p_verify.add_argument("--weights", default=None,
                          help="verify this weight file instead of building")
    _add_numeric_args(p_verify)
    p_verify.add_argument("--max-len", type=int, default=8,
                          help="string length cap for enumeration suites")
    p_verify.add_argument("--strings", type=int, default=1000,
                          help="sampled corpus size for corpus suites")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--epsilon", type=float, default=None)
    p_verify.add_argument("-d", "--units", type=int, default=1,
                          help="encoder width for the collision suite")
    p_verify.add_argument("-p", "--bits", type=int, default=1,
                          help="encoder bits per unit for the collision suite")
    p_verify.add_argument("--encoder-seed", type=int, default=0)
    p_verify.add_argument("--naive-budget", type=int,
                          default=DEFAULT_PARAMETER_BUDGET)
    p_verify.add_argument("--json-report", default=None)
    p_verify.add_argument("--text-report", default=None)

    p_metric = sub.add_parser("metric", help="bracket-closing confidence score")
    p_metric.add_argument("--weights", required=True)
    p_metric.add_argument("--corpus", required=True)
    p_metric.add_argument("--uniform-baseline", action="store_true",
                          help="score the uniform-over-closes baseline instead")
    p_metric.add_argument("--threshold", type=float, default=0.8)
    return parser


def cmd_build(args) -> int:
    params = DyckParams(args.k, args.m)
    numeric = _numeric_config(args, args.k)
    if args.arch == ARCH_NAIVE:
        if args.enc is not None:
            raise ValueError("the naive architecture has no slot encoding; "
                             "drop --enc")
        kwargs, enc = {"parameter_budget": args.naive_budget}, None
    else:
        kwargs, enc = {}, args.enc or ONEHOT
    paramset = build(args.arch, params, enc, numeric, **kwargs)
    save_weights(args.output, paramset)
    print(f"hidden_units: {paramset.hidden_size}")
    print(f"wrote {args.output}")
    return 0


def cmd_sample(args) -> int:
    params = DyckParams(args.k, args.m)
    cfg = SamplerConfig(params, seed=args.seed, min_len=args.min_len,
                        max_len=args.max_len)
    corpus = sample_corpus(cfg, args.tokens)
    atomic_write_text(args.output, format_corpus(cfg, corpus))
    stats = corpus_statistics(params, corpus)
    print(f"wrote {stats['strings']} strings ({stats['tokens']} tokens) "
          f"to {args.output}")
    if stats["mean_hitting_time"] is not None:
        print(f"mean empty-to-full hitting time: "
              f"{stats['mean_hitting_time']:.2f} tokens "
              f"({stats['hitting_observations']} observations)")
    return 0


def cmd_check(args) -> int:
    params = DyckParams(args.k, args.m)
    tokens = parse_string(args.string)
    state = EMPTY
    for pos, token in enumerate(tokens, start=1):
        prev = state
        state = transition(params, state, token)
        if state == REJECT:
            print(f"false at position {pos} ({format_string([token])} from "
                  f"state {prev})")
            return 1
    if state == ACCEPT:
        print("true")
        return 0
    print(f"false (no end-of-string; final state {state})")
    return 1


def _verify_constructions(args):
    if args.weights:
        return [load_weights(args.weights)]
    params = DyckParams(args.k, args.m)
    numeric = _numeric_config(args, args.k)
    selected = []
    for arch, enc in applicable_constructions(args.k):
        if args.arch != "all" and arch != args.arch:
            continue
        if args.enc != "all" and enc is not None and enc != args.enc:
            continue
        kwargs = {"parameter_budget": args.naive_budget} if arch == ARCH_NAIVE else {}
        selected.append(build(arch, params, enc, numeric, **kwargs))
    return selected


def cmd_verify(args) -> int:
    suites = args.suite or ["all"]
    if "all" in suites:
        suites = list(SUITES)
    params = DyckParams(args.k, args.m)
    reports: list[VerificationReport] = []

    corpus = None
    if any(s in suites for s in ("stack", "margins", "saturation")):
        corpus = sample_strings(SamplerConfig(params, seed=args.seed),
                                args.strings)

    constructions = None
    needs_nets = any(s in suites for s in
                     ("equivalence", "stack", "margins", "saturation", "distinct"))
    if needs_nets:
        constructions = _verify_constructions(args)

    for suite in suites:
        if suite == "equivalence":
            for ps in constructions:
                reports.append(check_generation_equivalence(
                    ps, max_len=args.max_len, epsilon=args.epsilon))
        elif suite == "stack":
            for ps in constructions:
                reports.append(check_stack_correspondence(ps, corpus))
        elif suite == "margins":
            for ps in constructions:
                reports.append(check_probability_margins(
                    ps, corpus, epsilon=args.epsilon))
        elif suite == "saturation":
            for ps in constructions:
                reports.append(check_saturation_exactness(ps, corpus))
        elif suite == "distinct":
            for ps in constructions:
                reports.append(check_full_depth_distinctness(ps))
        elif suite == "collide":
            reports.append(_collision_report(args, params))
        elif suite == "cross":
            reports.append(check_cross_construction_agreement(
                params, max_len=args.max_len, epsilon=args.epsilon,
                numeric=None if args.weights else _numeric_config(args, args.k)))

    for report in reports:
        print(report.summary_line())
    if args.text_report:
        atomic_write_text(args.text_report,
                          "\n".join(r.summary_line() for r in reports) + "\n")
    if args.json_report:
        atomic_write_text(args.json_report,
                          json.dumps([r.as_dict() for r in reports], indent=2) + "\n")
    return 0 if all(r.passed for r in reports) else 1


def _collision_report(args, params: DyckParams) -> VerificationReport:
    encoder = QuantizedEncoder.from_table(args.units, args.bits, args.k,
                                          seed=args.encoder_seed)
    collision = find_collision(encoder, params)
    pigeonhole = encoder.state_budget < params.k**params.m
    passed = (collision is not None) if pigeonhole else True
    details = {"d": args.units, "p": args.bits,
               "state_budget": encoder.state_budget,
               "full_depth_strings": params.k**params.m,
               "collision": collision.describe() if collision else None}
    return VerificationReport(
        suite="lower_bound_collision",
        instance={"k": params.k, "m": params.m, "d": args.units, "p": args.bits},
        checked=params.k**params.m, passed=passed,
        counterexample=None if passed else "pigeonhole collision not found",
        details=details)


def cmd_metric(args) -> int:
    paramset = load_weights(args.weights)
    with open(args.corpus) as handle:
        header, corpus = parse_corpus(handle.read())
    if header["k"] != paramset.k or header["m"] != paramset.m:
        print(f"corpus is for k={header['k']}, m={header['m']} but weights are "
              f"for k={paramset.k}, m={paramset.m}", file=sys.stderr)
        return 2
    if args.uniform_baseline:
        report = closing_metric_uniform(paramset.dyck_params, corpus,
                                        threshold=args.threshold)
    else:
        report = closing_metric(paramset, corpus, threshold=args.threshold)
    for line in report.table_lines():
        print(line)
    if report.missing_separations:
        print(f"empty separation buckets (excluded from the mean): "
              f"{report.missing_separations}")
    print(f"mean_p: {report.value}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"build": cmd_build, "sample": cmd_sample, "check": cmd_check,
                "verify": cmd_verify, "metric": cmd_metric}
    try:
        return handlers[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
