"""Command line entry point: ``rackrepair <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds
from .acceptance import random_family_instance
from .field import get_field, subfield
from .flowgraph import min_cut, random_evolution, worst_case_graph
from .harness import (SCHEMES, ClusterState, VerificationError, bench, cluster_encode, inject,
                      read_back, rows_to_csv, run_repair)
from .repair import RepairError
from .tamo_barg import (INSTANCE_NAMES, CodeConfig, build_monomial_good_poly, instantiate_tower,
                        named_instance)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Config handling


def config_from_spec(spec: dict) -> CodeConfig:
    """Build a configuration from a JSON spec.

    Accepted forms: {"instance": name}, a serialized configuration (has
    "classes"), or {"p", "n", "w", "class_values", "m1", "m2", "r"} with
    optional "tower_degrees" (replaces p/n/class_values) or "common_subfield".
    """
    if "instance" in spec:
        return named_instance(spec["instance"])
    if "classes" in spec:
        return CodeConfig.from_json(spec)
    try:
        w, m1, m2, r = (int(spec[k]) for k in ("w", "m1", "m2", "r"))
        if "tower_degrees" in spec:
            sk = instantiate_tower(int(spec.get("p", 2)), spec["tower_degrees"], w,
                                   int(spec.get("seed", 0)))
            good = build_monomial_good_poly(sk.field, w, sk.values)
            return CodeConfig(good, m1, m2, r, tower=sk.helper_subfields,
                              name=spec.get("name", ""))
        F = get_field(int(spec["p"]), int(spec.get("n", 1)))
        good = build_monomial_good_poly(F, w, [F.coerce(v) for v in spec["class_values"]])
    except KeyError as exc:
        raise UsageError(f"config spec is missing key {exc}") from None
    common = subfield(F, int(spec["common_subfield"])) if spec.get("common_subfield") else None
    return CodeConfig(good, m1, m2, r, common_subfield=common, name=spec.get("name", ""))


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _config(args) -> CodeConfig:
    if getattr(args, "instance", None):
        return named_instance(args.instance)
    if args.config:
        return config_from_spec(_load_json(args.config))
    raise UsageError("give --instance or --config")


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _dump_state(args, state: ClusterState, path: str) -> None:
    Path(path).write_text(json.dumps(state.to_json()))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_construct(args) -> int:
    config = _config(args)
    _emit(args, json.dumps(config.to_json(), indent=2))
    return 0


def cmd_encode(args) -> int:
    config = _config(args)
    data = sys.stdin.buffer.read() if args.input == "-" else Path(args.input).read_bytes()
    state = cluster_encode(config, data, pad=args.pad)
    if not args.out:
        raise UsageError("encode needs --out for the state file")
    _dump_state(args, state, args.out)
    print(f"{len(state.stripes)} stripes, {len(data)} bytes")
    return 0


def _load_state(path: str) -> ClusterState:
    return ClusterState.from_json(_load_json(path))


def cmd_inject(args) -> int:
    state = _load_state(args.state)
    if args.pattern:
        event = {"pattern": json.loads(args.pattern)}
    elif args.rack is not None:
        event = {"rack": args.rack}
        if args.positions:
            event["positions"] = [int(p) for p in args.positions.split(",")]
    else:
        raise UsageError("give --rack or --pattern")
    inject(state, event)
    _dump_state(args, state, args.out or args.state)
    print(json.dumps({str(k): v for k, v in state.erased().items()}))
    return 0


def cmd_repair(args) -> int:
    state = _load_state(args.state)
    _, rows = run_repair(state, args.scheme, rng_seed=args.seed)
    _dump_state(args, state, args.out or args.state)
    if args.format == "csv":
        sys.stdout.write(rows_to_csv(rows, args.timing))
    else:
        print(json.dumps([r.to_json() for r in rows], indent=2))
    if args.read_back:
        Path(args.read_back).write_bytes(read_back(state))
    return 0


def cmd_bench(args) -> int:
    matrix = None
    if args.config:
        spec = _load_json(args.config)
        matrix = spec.get("matrix", spec)
    if args.instance:
        from .harness import DEFAULT_MATRIX
        matrix = {args.instance: (matrix or DEFAULT_MATRIX)[args.instance]}
    rows = bench(matrix, seeds=args.seeds, base_seed=args.seed)
    if args.format == "json":
        _emit(args, json.dumps([r.to_json() for r in rows], indent=2))
    else:
        _emit(args, rows_to_csv(rows, args.timing))
    return 0


def _kv(items) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"expected NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k] = v
    return out


def _int(kv, name):
    try:
        return int(kv[name])
    except KeyError:
        raise UsageError(f"missing {name}=...") from None


def _rat(kv, name):
    try:
        return Fraction(kv[name])
    except KeyError:
        raise UsageError(f"missing {name}=...") from None


def _ints(kv, name, n=None):
    try:
        vals = [int(x) for x in kv[name].split(",")]
    except KeyError:
        raise UsageError(f"missing {name}=...") from None
    if n is not None and len(vals) == 1:
        vals = vals * n
    return vals


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v).lower() if isinstance(v, bool) else str(v)


BOUND_QUERIES = ("cutset-mds", "cutset-locality", "partial-cutset", "singleton", "capacity",
                 "capacity-stated", "feasible", "beta-min", "r-star", "r-min")


def cmd_bounds(args) -> int:
    kv = _kv(args.params)
    q = args.query
    branch = None
    if q == "cutset-mds":
        value = bounds.cutset_mds(_int(kv, "D"), _int(kv, "K"), _int(kv, "L"), _int(kv, "e"))
    elif q == "cutset-locality":
        value = bounds.cutset_locality(_int(kv, "D"), _int(kv, "K"), _int(kv, "r"))
    elif q == "partial-cutset":
        value = bounds.partial_cutset(_int(kv, "D"), _int(kv, "K"), _int(kv, "e"),
                                      _int(kv, "delta"))
    elif q == "singleton":
        value = bounds.singleton_locality_bound(_int(kv, "n"), _int(kv, "k"), _int(kv, "r"),
                                                _int(kv, "delta"))
    else:
        N, K, D = _int(kv, "N"), _int(kv, "K"), _int(kv, "D")
        s = _ints(kv, "s", N)
        if q in ("capacity", "capacity-stated", "feasible"):
            fn = {"capacity": bounds.capacity_c, "capacity-stated": bounds.capacity_c_stated,
                  "feasible": bounds.feasible}[q]
            value = fn(N, K, D, _rat(kv, "beta"), s, _int(kv, "r"))
        elif q == "beta-min":
            value = bounds.beta_min(N, K, D, _int(kv, "r"), s)
        elif q == "r-star":
            got = bounds.r_star(N, K, D, _rat(kv, "beta"), s, _rat(kv, "M"))
            value, branch = got if got is not None else (None, None)
        else:
            value = bounds.r_min_direct(N, K, D, _rat(kv, "beta"), s, _rat(kv, "M"))
    if args.format == "json":
        print(json.dumps({"query": {"name": q, **kv}, "value": _fmt(value),
                          "branch": None if branch is None else str(branch)}))
    else:
        print(_fmt(value))
    return 0


def cmd_flow_verify(args) -> int:
    rng = random.Random(args.seed)
    exact = 0
    lower = 0
    for t in range(args.trials):
        N, K, D, beta, s, r = random_family_instance(rng, args.max_n)
        c = bounds.capacity_c(N, K, D, beta, s, r)
        if min_cut(worst_case_graph(N, K, D, beta, s, r)) == c:
            exact += 1
        g = random_evolution(N, K, D, beta, s, r, rng.randint(0, 2 * N), rng_seed=rng.randrange(2 ** 32))
        if min_cut(g) >= c:
            lower += 1
    print(f"{exact}/{args.trials} exact matches")
    print(f"{lower}/{args.trials} evolutions at or above capacity")
    return 0 if exact == lower == args.trials else 2


def cmd_selftest(args) -> int:
    from .acceptance import CRITERIA

    failed = 0
    for number, check in CRITERIA:
        result = check()
        print(f"criterion {number}: {'PASS' if result.ok else 'FAIL'} {result.detail}")
        sys.stdout.flush()
        failed += not result.ok
    return 2 if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, default):
        parser.add_argument("--seed", type=int, default=default(0))
        parser.add_argument("--config", default=default(None), help="JSON config spec or matrix")
        parser.add_argument("--out", default=default(None), help="output file (default stdout)")
        parser.add_argument("--format", choices=("json", "csv"), default=default(None))

    p = _Parser(prog="rackrepair",
                description="Rack-aware locally repairable codes: encode, repair, meter, bound.")
    global_flags(p, lambda v: v)
    # subcommand copies leave values given before the subcommand alone
    common = _Parser(add_help=False)
    global_flags(common, lambda v: argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", parents=[common], help="build and serialize a configuration")
    c.add_argument("--instance", choices=INSTANCE_NAMES)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("encode", parents=[common], help="encode a file into a cluster state")
    c.add_argument("--instance", choices=INSTANCE_NAMES)
    c.add_argument("--input", required=True, help="input file, or - for stdin")
    c.add_argument("--pad", action="store_true", help="zero-fill the last stripe")
    c.set_defaults(func=cmd_encode)

    c = sub.add_parser("inject", parents=[common], help="erase cells in a cluster state")
    c.add_argument("--state", required=True)
    c.add_argument("--rack", type=int)
    c.add_argument("--positions", help="comma separated positions (default: whole rack)")
    c.add_argument("--pattern", help='JSON object, e.g. {"1": [0, 2], "3": [1]}')
    c.set_defaults(func=cmd_inject)

    c = sub.add_parser("repair", parents=[common], help="repair all erased cells")
    c.add_argument("--state", required=True)
    c.add_argument("--scheme", choices=SCHEMES, default="auto")
    c.add_argument("--timing", action="store_true", help="add a wall_clock column")
    c.add_argument("--read-back", help="write the decoded bytes here")
    c.set_defaults(func=cmd_repair)

    c = sub.add_parser("bench", parents=[common], help="sweep events x seeds into CSV")
    c.add_argument("--instance", choices=INSTANCE_NAMES)
    c.add_argument("--seeds", type=int, default=3)
    c.add_argument("--timing", action="store_true", help="add a wall_clock column")
    c.set_defaults(func=cmd_bench)

    c = sub.add_parser("bounds", parents=[common], help="evaluate a bound")
    group = c.add_mutually_exclusive_group(required=True)
    for name in BOUND_QUERIES:
        group.add_argument(f"--{name}", dest="query", action="store_const", const=name)
    c.add_argument("params", nargs="*", metavar="NAME=VALUE")
    c.set_defaults(func=cmd_bounds)

    c = sub.add_parser("flow-verify", parents=[common],
                       help="compare the capacity formula with exact min cuts")
    c.add_argument("--trials", type=int, default=500)
    c.add_argument("--max-n", type=int, default=8)
    c.set_defaults(func=cmd_flow_verify)

    c = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    c.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, KeyError, TypeError, RepairError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
