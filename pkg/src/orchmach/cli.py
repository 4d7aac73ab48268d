"""Command-line entry point.

Data goes to stdout (or -o files), logs to stderr.  Exit codes: 0 on
success (unknown verdicts are data, not errors), 1 on input or usage
errors, 2 on policy or replay mismatches.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (EnumerationBounds, accepted_words, breed_iq_eq,
                       enumerate_computations, purebred_check_om1,
                       purebred_check_om2, recognized_language_bounded,
                       w_iq_eq)
from .engine import (Breed, PolicyError, RandomPolicy, ReplayMismatchError,
                     ScriptedPolicy, om1_run, om2_run, om3_run, replay)
from .fileio import (append_jsonl, dump_selections, load_breed, save_breed,
                     trace_record)
from .machines import decode_rule_index, parse_rule_index_text, tm_run
from .ndtm import decompose_to_breed, load_ndtm, verify_equivalence_bounded
from .search import (ExperimentConfig, emit_iqplot_data, emit_table_report,
                     format_table, iqplot_csv, load_experiment_config,
                     run_experiment, table_csv)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PolicyError, ReplayMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orchmach",
                                description=__doc__.splitlines()[0])
    p.add_argument("--backend-info", action="store_true",
                   help=argparse.SUPPRESS)
    sub = p.add_subparsers(required=True, metavar="command")

    tm = sub.add_parser("run-tm", help="run a single machine standalone")
    src = tm.add_mutually_exclusive_group(required=True)
    src.add_argument("--code", help="rule-index sequence, e.g. '1,0,4'")
    src.add_argument("--file", help="file holding a rule-index sequence")
    tm.add_argument("--cap", type=int, default=10 ** 8)
    tm.add_argument("--json", action="store_true")
    tm.set_defaults(func=cmd_run_tm)

    rb = sub.add_parser("run-breed", help="run a breed once")
    rb.add_argument("--breed", required=True, help="breed JSON file or @catalog-name")
    rb.add_argument("--engine", choices=("om1", "om2", "om3"), default="om1")
    rb.add_argument("--word", default="", help="input word (om2)")
    rb.add_argument("--inputs", default="", help="comma-separated per-member words (om3)")
    pol = rb.add_mutually_exclusive_group()
    pol.add_argument("--seed", type=int, default=0)
    pol.add_argument("--script", help="comma-separated member names or indices")
    rb.add_argument("--cap", type=int, default=1_000_000)
    rb.add_argument("--return", dest="ret", choices=("N", "T", "O", "o"), default="N")
    rb.add_argument("--blank-background", action="store_true",
                    help="blank tape for the empty input word instead of zeros")
    rb.add_argument("--trace-out", help="append a JSONL trace record here")
    rb.add_argument("--oseq-out", help="write the full selection dump here")
    rb.add_argument("--json", action="store_true")
    rb.set_defaults(func=cmd_run_breed)

    en = sub.add_parser("enumerate", help="exhaustively enumerate computations")
    _breed_and_bounds(en)
    en.add_argument("--engine", choices=("om1", "om2"), default="om1")
    en.add_argument("--word", default="")
    en.add_argument("--json", action="store_true")
    en.set_defaults(func=cmd_enumerate)

    an = sub.add_parser("analyze", help="verdicts: purebred, convergence, iq/eq, language")
    _breed_and_bounds(an)
    what = an.add_mutually_exclusive_group(required=True)
    what.add_argument("--purebred", action="store_true")
    what.add_argument("--convergence", action="store_true")
    what.add_argument("--iq-eq", action="store_true")
    what.add_argument("--language", action="store_true")
    what.add_argument("--w-iq", metavar="WORD")
    an.add_argument("--om2", action="store_true",
                    help="use the shared-input flavour for purebred checks")
    an.add_argument("--schedule-k", type=int, default=100_000,
                    help="length of scripted divergence witnesses")
    an.add_argument("--json", action="store_true")
    an.set_defaults(func=cmd_analyze)

    de = sub.add_parser("decompose", help="compile an NDTM into an equivalent breed")
    de.add_argument("--ndtm", required=True)
    de.add_argument("-o", "--out", required=True)
    de.set_defaults(func=cmd_decompose)

    ve = sub.add_parser("verify", help="bounded NDTM/breed equivalence check")
    ve.add_argument("--ndtm", required=True)
    ve.add_argument("--breed", required=True)
    ve.add_argument("--cap", type=int, default=12, help="transition depth")
    ve.add_argument("--nodes", type=int, default=200_000)
    ve.add_argument("--word", default="")
    ve.add_argument("--json", action="store_true")
    ve.set_defaults(func=cmd_verify)

    se = sub.add_parser("search", help="randomized episode experiment")
    se.add_argument("--config", help="experiment config JSON")
    se.add_argument("--breed", help="breed file or @catalog-name")
    se.add_argument("--episodes", type=int, default=100)
    se.add_argument("--cap", type=int, default=100_000)
    se.add_argument("--seed-base", type=int, default=0)
    se.add_argument("--jobs", type=int, default=0,
                    help="0 = all cores; ORCHMACH_JOBS overrides")
    se.add_argument("--long-run", action="store_true")
    se.add_argument("-o", "--out", default="results.jsonl")
    se.add_argument("--table", help="also write a triplet table (CSV) here")
    se.add_argument("--individual-cap", type=int, default=10 ** 8)
    se.add_argument("--json", action="store_true")
    se.set_defaults(func=cmd_search)

    iq = sub.add_parser("iq-plot", help="o2 -> max N rows from episode records")
    iq.add_argument("--in", dest="infile", required=True)
    iq.add_argument("-o", "--out", help="CSV output (default stdout)")
    iq.set_defaults(func=cmd_iqplot)

    rp = sub.add_parser("replay", help="re-execute a logged selection sequence")
    rp.add_argument("--breed", required=True)
    rp.add_argument("--oseq", help="selection dump file (from run-breed --oseq-out)")
    rp.add_argument("--script", help="comma-separated member names or indices")
    rp.add_argument("--engine", choices=("om1", "om2"), default="om1")
    rp.add_argument("--word", default="")
    rp.add_argument("--cap", type=int)
    rp.add_argument("--json", action="store_true")
    rp.set_defaults(func=cmd_replay)

    return p


def _breed_and_bounds(sp):
    sp.add_argument("--breed", required=True, help="breed JSON file or @catalog-name")
    sp.add_argument("--depth", type=int, default=64)
    sp.add_argument("--nodes", type=int, default=100_000)
    sp.add_argument("--word-length", type=int, default=4)


def _bounds(args) -> EnumerationBounds:
    return EnumerationBounds(depth_cap=args.depth, node_cap=args.nodes,
                             word_length_cap=args.word_length)


def cmd_run_tm(args) -> int:
    text = args.code if args.code else Path(args.file).read_text()
    machine = decode_rule_index(parse_rule_index_text(text))
    result = tm_run(machine, args.cap)
    if args.json:
        out = {"halted": result.halted, "steps": result.steps,
               "ones": result.ones, "bb_steps": result.bb_steps,
               "bb_ones": result.bb_ones, "tape_word_length": len(result.tape_word)}
        print(json.dumps(out))
    elif result.halted:
        print(f"halted steps {result.steps} ones {result.ones} "
              f"(with halt transition: steps {result.bb_steps} ones {result.bb_ones})")
    else:
        print(f"cap reached steps {result.steps} ones {result.ones}")
    return 0


def _policy_for(args, breed: Breed):
    if args.script:
        tokens = [t.strip() for t in args.script.split(",") if t.strip()]
        script = tuple(int(t) if t.lstrip("-").isdigit() else breed.member_index(t)
                       for t in tokens)
        return ScriptedPolicy(script)
    return RandomPolicy(args.seed)


def cmd_run_breed(args) -> int:
    breed = load_breed(args.breed)
    policy = _policy_for(args, breed)
    if args.engine == "om1":
        trace = om1_run(breed, policy, args.cap)
    elif args.engine == "om2":
        trace = om2_run(breed, args.word, policy, args.cap,
                        blank_background=args.blank_background)
    else:
        inputs = args.inputs.split(",") if args.inputs else [""] * len(breed)
        trace = om3_run(breed, inputs, policy, args.cap)
    if args.trace_out:
        append_jsonl(trace_record(trace, policy), args.trace_out)
    if args.oseq_out:
        dump_selections(trace, breed, args.oseq_out)
    if args.json:
        print(json.dumps(_trace_obj(trace, breed)))
        return 0
    print(_projection_text(trace, breed, args.ret))
    return 0


def _projection_text(trace, breed, mode) -> str:
    if not trace.halted and mode in ("N", "T"):
        return f"inf ({trace.stop} at {trace.n})"
    if mode == "N":
        return str(trace.n)
    if mode == "T":
        return trace.tape_word
    if mode == "O":
        if trace.selections is None:
            return f"(selections not recorded; total {trace.selections_total})"
        return ",".join(breed.members[i].name for i in trace.selections)
    return ",".join(str(v) for v in (trace.o_seq or ()))


def _trace_obj(trace, breed) -> dict:
    return {
        "breed": trace.breed_name,
        "engine": trace.engine,
        "halted": trace.halted,
        "stop": trace.stop,
        "N": trace.n if trace.halted else None,
        "rounds": trace.n,
        "selections_total": trace.selections_total,
        "ones": trace.ones,
        "tape_word": trace.tape_word,
        "o2": trace.o2,
        "o_mean_floor": trace.o_mean_floor,
        "per_member_selected_counts": list(trace.selected_counts),
        "o_seq": list(trace.o_seq) if trace.o_seq is not None else None,
        "selections": list(trace.selections) if trace.selections is not None else None,
    }


def cmd_enumerate(args) -> int:
    breed = load_breed(args.breed)
    enum = enumerate_computations(breed, _bounds(args), args.engine, args.word)
    if args.json:
        print(json.dumps({
            "breed": breed.name,
            "verdict": enum.verdict.kind,
            "detail": enum.verdict.detail,
            "computations": len(enum.halting),
            "outcomes": sorted(enum.outputs),
            "n_values": sorted({t.n for t in enum.halting}),
            "cycles": len(enum.cycles),
            "frontier": enum.frontier,
            "nodes": enum.nodes,
        }))
        return 0
    print(f"{breed.name}: {enum.verdict.kind} ({enum.verdict.detail})")
    print(f"halting computations: {len(enum.halting)}; "
          f"outputs: {sorted(enum.outputs)}; cycles: {len(enum.cycles)}; "
          f"frontier: {enum.frontier}")
    return 0


def cmd_analyze(args) -> int:
    breed = load_breed(args.breed)
    bounds = _bounds(args)
    # one report schema for every analysis flavour
    out = {"breed": breed.name,
           "verdict": None,
           "bounds": {"depth_cap": bounds.depth_cap, "node_cap": bounds.node_cap,
                      "word_length_cap": bounds.word_length_cap},
           "witnesses": [],
           "iq_lower": None, "eq_lower": None, "exact": None}
    if args.purebred:
        verdict = (purebred_check_om2(breed, bounds) if args.om2
                   else purebred_check_om1(breed, bounds))
        out |= {"verdict": verdict.kind, "witnesses": list(verdict.witness),
                "detail": verdict.detail}
        text = (f"{breed.name}: {verdict.kind}"
                + (f", witness {{{','.join(verdict.witness)}}}" if verdict.witness else "")
                + f" ({verdict.detail})")
    elif args.convergence:
        enum = enumerate_computations(breed, bounds, schedule_k=args.schedule_k)
        witness = _witness_obj(enum.verdict.witness)
        out |= {"verdict": enum.verdict.kind, "detail": enum.verdict.detail,
                "witnesses": [witness] if witness else []}
        text = f"{breed.name}: {enum.verdict.kind} ({enum.verdict.detail})"
    elif args.iq_eq:
        rep = breed_iq_eq(breed, bounds)
        out |= {"verdict": "halting" if rep.found_halting else "no_halt_within_bounds",
                "iq_lower": rep.iq_lower, "eq_lower": rep.eq_lower,
                "exact": rep.exact,
                "witnesses": [{"n": t.n, "o_mean_floor": t.o_mean_floor,
                               "path": list(t.path)} for t in rep.witnesses]}
        text = (f"{breed.name}: iq>={rep.iq_lower} eq>={rep.eq_lower} "
                f"exact={rep.exact}" if rep.found_halting
                else f"{breed.name}: no halting computation within bounds")
    elif args.language:
        lang = recognized_language_bounded(breed, bounds)
        acc = sorted(accepted_words(lang))
        undet = sorted(w for w, (s, _x) in lang.items() if s == "undetermined")
        out |= {"verdict": "language", "accepted": acc, "undetermined": undet,
                "words_checked": len(lang)}
        text = f"{breed.name}: accepts {acc}" + (f"; undetermined {undet}" if undet else "")
    else:
        rep = w_iq_eq(breed, args.w_iq, bounds)
        out |= {"verdict": "halting" if rep.found_halting else "no_halt_within_bounds",
                "word": args.w_iq, "iq_lower": rep.iq_lower,
                "eq_lower": rep.eq_lower, "exact": rep.exact}
        text = f"{breed.name} on {args.w_iq!r}: w-iq>={rep.iq_lower} w-eq>={rep.eq_lower}"
    print(json.dumps(out) if args.json else text)
    return 0


def _witness_obj(witness):
    if not witness:
        return None
    if witness[0] == "cycle":
        depth, _key = witness[1]
        return {"kind": "cycle", "depth": depth}
    return {"kind": "schedule", "member": witness[1], "rounds": witness[2]}


def cmd_decompose(args) -> int:
    machine = load_ndtm(args.ndtm)
    breed = decompose_to_breed(machine)
    save_breed(breed, args.out)
    print(f"{machine.name}: {len(breed)} deterministic machines -> {args.out}",
          file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    machine = load_ndtm(args.ndtm)
    breed = load_breed(args.breed)
    verdict = verify_equivalence_bounded(machine, breed, args.cap, args.nodes,
                                         args.word)
    if args.json:
        print(json.dumps({"ndtm": machine.name, "breed": breed.name,
                          "status": verdict.status, "detail": verdict.detail}))
    else:
        print(f"{verdict.status} ({verdict.detail})")
    return 0


def cmd_search(args) -> int:
    if args.config:
        cfg = load_experiment_config(args.config)
    else:
        if not args.breed:
            raise ValueError("need --config or --breed")
        cfg = ExperimentConfig(breed=load_breed(args.breed),
                               episodes=args.episodes, cap=args.cap,
                               seed_base=args.seed_base, jobs=args.jobs,
                               long_run=args.long_run)
    best, episodes = run_experiment(cfg)
    out_path = Path(args.out)
    with open(out_path, "w") as fh:
        for e in episodes:
            fh.write(json.dumps(e.record(cfg.breed.name)) + "\n")
    print(f"{len(episodes)} episodes -> {out_path}", file=sys.stderr)
    if args.table:
        header, rows = emit_table_report([(cfg.breed, best)], args.individual_cap)
        Path(args.table).write_text(table_csv(header, rows))
        print(f"table -> {args.table}", file=sys.stderr)
        if not args.json:
            sys.stdout.write(format_table(header, rows))
    summary = {
        "breed": cfg.breed.name,
        "episodes": len(episodes),
        "halted": sum(1 for e in episodes if e.halted),
        "best_by_o2": best.by_o2.cells() if best.by_o2 else None,
        "best_by_N": best.by_n.cells() if best.by_n else None,
        "best_by_ones": best.by_ones.cells() if best.by_ones else None,
    }
    if args.json:
        print(json.dumps(summary))
    else:
        if best.empty:
            print("no halted episodes")
        else:
            print(f"best (o2,N,1s): by o2 {summary['best_by_o2']}, "
                  f"by N {summary['best_by_N']}, by ones {summary['best_by_ones']}")
    return 0


def cmd_iqplot(args) -> int:
    from .fileio import read_jsonl

    class _Row:
        def __init__(self, rec):
            self.halted = rec.get("halted", False)
            self.o2 = rec.get("o2")
            self.n = rec.get("N") or 0

    rows = emit_iqplot_data([_Row(r) for r in read_jsonl(args.infile)])
    text = iqplot_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        print(f"{len(rows)} rows -> {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def cmd_replay(args) -> int:
    breed = load_breed(args.breed)
    if bool(args.oseq) == bool(args.script):
        raise ValueError("need exactly one of --oseq or --script")
    if args.oseq:
        selections = _read_oseq(args.oseq)
    else:
        selections = [t.strip() for t in args.script.split(",") if t.strip()]
        selections = [int(t) if t.lstrip("-").isdigit() else t for t in selections]
    trace = replay(breed, selections, cap=args.cap, engine=args.engine,
                   word=args.word)
    if args.json:
        print(json.dumps(_trace_obj(trace, breed)))
    else:
        print(f"{'halted' if trace.halted else trace.stop} N={trace.n_repr} "
              f"ones={trace.ones} word={trace.tape_word!r}")
    return 0


def _read_oseq(path) -> list[int]:
    out = []
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("step,member"):
            raise ValueError(f"{path}: not a selection dump")
        for line in fh:
            line = line.strip()
            if line:
                out.append(int(line.split(",")[1]))
    return out


if __name__ == "__main__":
    sys.exit(main())
