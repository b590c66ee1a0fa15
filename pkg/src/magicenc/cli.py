"""Command-line front end: single runs, sweeps, schedule search, planners,
and lattice/circuit audits.

Every flag can also be supplied through a flat `key = value` config file
(`--config PATH`); explicit command-line flags win.  Worker count comes
from --threads, else the MAGICENC_THREADS environment variable, else 1.
"""

from __future__ import annotations

import argparse
import os
import sys
from collections import Counter
from typing import Dict, List, Optional, Tuple

from .circuits import (OPTIMAL_SCHEDULE, Schedule, expand_phase1,
                       expand_phase2, valid_schedules, validate_circuit)
from .experiments import (SweepSpec, available_copies, parse_csv,
                          plan_copies, plan_distillation, run_sweep,
                          simulate_point, write_csv)
from .lattice import Region, build_lattice, deterministic_stabilizers
from .noise import GENERIC_AXIS, AxisMode, NoiseParams
from .oracle import (coefficient_stability, csv_lines, enumerate_first_order,
                     schedule_search)
from .protocol import ProtocolConfig

ENV_THREADS = "MAGICENC_THREADS"

_AXES = {"generic": GENERIC_AXIS, "X": AxisMode("X"),
         "Y": AxisMode("Y"), "Z": AxisMode("Z")}


def _floats(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected comma-separated numbers, got %r" % text)


def _ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected comma-separated integers, got %r" % text)


def load_config(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError("%s:%d: expected key = value, got %r"
                                     % (path, lineno, raw.rstrip()))
                key, val = line.split("=", 1)
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise ValueError("cannot read config file %r: %s" % (path, exc))
    return values


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return args.threads
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError("bad %s value %r" % (ENV_THREADS, env))
    return 1


def _noise_from(args) -> NoiseParams:
    p2 = args.p2
    if p2 is None:
        raise ValueError("--p2 is required")
    p_i = args.pI if args.pI is not None else p2 * args.pI_ratio
    p_m = args.pM if args.pM is not None else p2 * args.pM_ratio
    p_1 = args.p1 if args.p1 is not None else p2 * args.p1_ratio
    return NoiseParams(p_I=p_i, p_M=p_m, p_1=p_1, p_2=p2)


def _config_from(args) -> ProtocolConfig:
    d2 = args.d2 if args.d2 is not None else args.d1
    return ProtocolConfig(
        args.d1, d2, _noise_from(args),
        schedule=Schedule.from_token(args.schedule),
        phase2_rounds=args.rounds,
        axis_mode=_AXES[args.axis],
        diagonal_region=Region[args.diagonal])


def _print_record(rec) -> None:
    print("p2=%g pI=%g pM=%g p1=%g d1=%d d2=%d schedule=%s"
          % (rec.p2, rec.pI, rec.pM, rec.p1, rec.d1, rec.d2, rec.schedule))
    print("trials=%d accepted=%d accept_rate=%.6g"
          % (rec.trials, rec.accepted, rec.accept_rate))
    if rec.accepted:
        print("harmful=%d pL=%.6g ci95=[%.6g, %.6g] pL/p2=%.6g"
              % (rec.harmful, rec.pL, rec.pL_ci_low, rec.pL_ci_high,
                 rec.pL / rec.p2))
    else:
        print("harmful=0 pL=nan (no accepted trials)")


def _cmd_simulate(args) -> int:
    cfg = _config_from(args)
    rec = simulate_point(cfg, args.trials, args.seed,
                         threads=_resolve_threads(args),
                         min_accepted=args.min_accepted)
    _print_record(rec)
    return 0


def _cmd_sweep(args) -> int:
    spec = SweepSpec(
        p2_values=args.p2, ratios=(args.pI_ratio, args.pM_ratio, args.p1_ratio),
        d1=args.d1, d2=args.d2 if args.d2 is not None else args.d1,
        trials=args.trials, master_seed=args.seed, schedule=args.schedule)

    def progress(rec):
        print("p2=%g trials=%d accepted=%d pL=%.6g"
              % (rec.p2, rec.trials, rec.accepted, rec.pL), file=sys.stderr)

    records = run_sweep(spec, out=args.out, threads=_resolve_threads(args),
                        min_accepted=args.min_accepted, progress=progress)
    print("wrote %d records to %s" % (len(records), args.out))
    return 0


def _vector_text(vec) -> str:
    return "c2=%s cI=%s c1=%s cM=%s" % (vec.c2, vec.cI, vec.c1, vec.cM)


def _cmd_enumerate(args) -> int:
    sched = Schedule.from_token(args.schedule)
    vec, verdicts = enumerate_first_order(
        args.d1, sched, _AXES[args.axis], Region[args.diagonal])
    print("schedule %s at d1=%d: %s" % (sched.token(), args.d1, _vector_text(vec)))
    counted = [v for v in verdicts if v.counted]
    print("%d fault locations inspected, %d counted:" % (len(verdicts), len(counted)))
    for v in counted:
        print("  %-4s step=%-3d op=%-3d pauli=%-6s class=%s -> %s += %s"
              % (v.fault.kind, v.fault.step, v.fault.op_index,
                 "".join(v.fault.pauli) or "-", v.residual_class, v.param,
                 v.weight))
    return 0


def _cmd_search_schedule(args) -> int:
    results = schedule_search(args.d1, _AXES[args.axis], Region[args.diagonal])
    c2s = [vec.c2 for _, vec in results]
    print("%d valid schedules at d1=%d; c2 range %s .. %s"
          % (len(results), args.d1, min(c2s), max(c2s)))
    for sched, vec in results[:args.top]:
        print("  %s  %s" % (sched.token(), _vector_text(vec)))
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write("\n".join(csv_lines(results)) + "\n")
        except OSError as exc:
            raise ValueError("cannot write %r: %s" % (args.out, exc))
        print("wrote %d rows to %s" % (len(results), args.out))
    return 0


def _cmd_coeff_stability(args) -> int:
    sched = Schedule.from_token(args.schedule)
    table, stable = coefficient_stability(sched, args.d1s, _AXES[args.axis])
    for d1, vec in sorted(table.items()):
        print("d1=%d: %s" % (d1, _vector_text(vec)))
    print("stable across d1=%s: %s"
          % (",".join(str(d) for d in args.d1s), "yes" if stable else "no"))
    return 0


def _cmd_plan_copies(args) -> int:
    if args.copies is not None:
        copies = args.copies
    elif args.d1 is not None and args.d2 is not None:
        copies = available_copies(args.d1, args.d2)
        print("d1=%d d2=%d -> %d seed-size copies" % (args.d1, args.d2, copies))
    else:
        raise ValueError("need --copies, or both --d1 and --d2")
    prob = plan_copies(args.success_prob, copies)
    print("P(at least one of %d succeeds at s=%g) = %.6g"
          % (copies, args.success_prob, prob))
    return 0


def _cmd_plan_distillation(args) -> int:
    rounds, trajectory = plan_distillation(args.p_in, args.target)
    for i, p in enumerate(trajectory):
        print("round %d: p=%.6g" % (i, p))
    print("%d round(s) to reach %.6g" % (rounds, args.target))
    return 0


def _cmd_validate(args) -> int:
    d2 = args.d2 if args.d2 is not None else args.d1
    if not (d2 >= args.d1 >= 3) or args.d1 % 2 == 0 or d2 % 2 == 0:
        raise ValueError("need odd 3 <= d1 <= d2")
    sched = Schedule.from_token(args.schedule)
    lat = build_lattice(d2, args.d1, Region[args.diagonal])
    n = lat.size
    kinds = Counter(s.kind for s in lat.stabilizers)
    print("lattice %dx%d: %d data qubits, %d X + %d Z stabilizers"
          % (n, n, len(lat.data_qubits), kinds["X"], kinds["Z"]))
    regions = Counter(lat.region_map[q].name for q in lat.data_qubits)
    print("regions: " + " ".join("%s=%d" % kv for kv in sorted(regions.items())))
    print("logical supports: X on %d qubits, Z on %d qubits"
          % (len(lat.xl_support), len(lat.zl_support)))
    for phase in (1, 2):
        det = deterministic_stabilizers(lat, phase)
        print("phase %d: %d deterministic stabilizers" % (phase, len(det)))
    ok = True
    for name, circ in (("phase 1", expand_phase1(lat, sched)),
                       ("phase 2", expand_phase2(lat, sched, args.rounds or d2))):
        violations = validate_circuit(circ)
        print("%s circuit: %d layers, %d rounds, %s"
              % (name, len(circ.layers), len(circ.round_starts),
                 "no violations" if not violations else "VIOLATIONS:"))
        for v in violations:
            print("  " + v)
            ok = False
    if not ok:
        print("schedule %s is not valid" % sched.token(), file=sys.stderr)
        return 2
    print("all audits passed")
    return 0


def _add_common(sub, trials_default=100_000):
    sub.add_argument("--config", help="key = value file of flag defaults")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker processes (default: $%s or 1)" % ENV_THREADS)
    sub.add_argument("--trials", type=int, default=trials_default)
    sub.add_argument("--seed", type=int, default=0, help="master seed")
    sub.add_argument("--min-accepted", type=int, default=0,
                     help="grow the budget until this many trials accept")


def _add_geometry(sub, schedule_default):
    sub.add_argument("--d1", type=int, default=3, help="seed block distance")
    sub.add_argument("--d2", type=int, default=None,
                     help="grown distance (default: d1)")
    sub.add_argument("--schedule", default=schedule_default,
                     help="token such as %s" % OPTIMAL_SCHEDULE.token())
    sub.add_argument("--rounds", type=int, default=None,
                     help="full-size measurement rounds (default: d2)")
    sub.add_argument("--axis", choices=sorted(_AXES), default="generic")
    sub.add_argument("--diagonal", choices=("I", "II"), default="I",
                     help="region assignment of the block diagonal")


def _add_noise(sub):
    sub.add_argument("--p2", type=float, default=None,
                     help="two-qubit depolarizing rate")
    sub.add_argument("--pI-ratio", type=float, default=0.0)
    sub.add_argument("--pM-ratio", type=float, default=0.0)
    sub.add_argument("--p1-ratio", type=float, default=0.0)
    sub.add_argument("--pI", type=float, default=None,
                     help="absolute init-flip rate (overrides --pI-ratio)")
    sub.add_argument("--pM", type=float, default=None,
                     help="absolute readout-flip rate (overrides --pM-ratio)")
    sub.add_argument("--p1", type=float, default=None,
                     help="absolute one-qubit rate (overrides --p1-ratio)")


def build_parser() -> Tuple[argparse.ArgumentParser, Dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="magicenc",
        description="Post-selected magic-state encoding on the planar "
                    "surface code: Monte Carlo, schedule search, planners.")
    subs = parser.add_subparsers(dest="command", required=True)
    registry: Dict[str, argparse.ArgumentParser] = {}

    def register(name, handler, **kw):
        sub = subs.add_parser(name, **kw)
        sub.set_defaults(handler=handler)
        registry[name] = sub
        return sub

    sub = register("simulate", _cmd_simulate,
                   help="Monte Carlo at a single parameter point")
    _add_geometry(sub, OPTIMAL_SCHEDULE.token())
    _add_noise(sub)
    _add_common(sub)

    sub = register("sweep", _cmd_sweep, help="sweep p2 values, write a CSV")
    sub.add_argument("--p2", type=_floats, required=True,
                     help="comma-separated rate list")
    sub.add_argument("--pI-ratio", type=float, default=0.0)
    sub.add_argument("--pM-ratio", type=float, default=0.0)
    sub.add_argument("--p1-ratio", type=float, default=0.0)
    sub.add_argument("--d1", type=int, default=3)
    sub.add_argument("--d2", type=int, default=None)
    sub.add_argument("--schedule", default=OPTIMAL_SCHEDULE.token())
    sub.add_argument("--out", required=True, help="CSV output path")
    _add_common(sub)

    sub = register("enumerate", _cmd_enumerate,
                   help="exact first-order fault census for one schedule")
    sub.add_argument("--d1", type=int, default=3)
    sub.add_argument("--schedule", default=OPTIMAL_SCHEDULE.token())
    sub.add_argument("--axis", choices=sorted(_AXES), default="generic")
    sub.add_argument("--diagonal", choices=("I", "II"), default="I")
    sub.add_argument("--config", help="key = value file of flag defaults")

    sub = register("search-schedule", _cmd_search_schedule,
                   help="rank every valid CNOT order by its coefficients")
    sub.add_argument("--d1", type=int, default=3)
    sub.add_argument("--axis", choices=sorted(_AXES), default="generic")
    sub.add_argument("--diagonal", choices=("I", "II"), default="I")
    sub.add_argument("--top", type=int, default=10,
                     help="rows to print (the CSV always has all of them)")
    sub.add_argument("--out", default=None, help="optional CSV output path")
    sub.add_argument("--config", help="key = value file of flag defaults")

    sub = register("coeff-stability", _cmd_coeff_stability,
                   help="check coefficients across seed distances")
    sub.add_argument("--schedule", default=OPTIMAL_SCHEDULE.token())
    sub.add_argument("--d1s", type=_ints, default=(3, 5, 7, 9))
    sub.add_argument("--axis", choices=sorted(_AXES), default="generic")
    sub.add_argument("--config", help="key = value file of flag defaults")

    sub = register("plan-copies", _cmd_plan_copies,
                   help="success probability of parallel seed attempts")
    sub.add_argument("--success-prob", type=float, required=True)
    sub.add_argument("--copies", type=int, default=None)
    sub.add_argument("--d1", type=int, default=None)
    sub.add_argument("--d2", type=int, default=None)
    sub.add_argument("--config", help="key = value file of flag defaults")

    sub = register("plan-distillation", _cmd_plan_distillation,
                   help="rounds of 15-to-1 cubing to reach a target rate")
    sub.add_argument("--p-in", type=float, required=True)
    sub.add_argument("--target", type=float, required=True)
    sub.add_argument("--config", help="key = value file of flag defaults")

    sub = register("validate", _cmd_validate,
                   help="lattice and circuit audits for a configuration")
    _add_geometry(sub, OPTIMAL_SCHEDULE.token())
    sub.add_argument("--config", help="key = value file of flag defaults")

    return parser, registry


def _apply_config(argv: List[str],
                  registry: Dict[str, argparse.ArgumentParser]) -> None:
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return
    command = next((tok for tok in argv if tok in registry), None)
    if command is None:
        return
    values = load_config(path)
    sub = registry[command]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ValueError("config file %r sets unknown option(s) for %r: %s"
                         % (path, command, ", ".join(unknown)))
    sub.set_defaults(**values)


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, registry = build_parser()
    try:
        _apply_config(argv, registry)
        args = parser.parse_args(argv)
        return args.handler(args)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
