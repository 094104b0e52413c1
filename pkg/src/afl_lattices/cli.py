"""Command-line front end.

Every subcommand reads one JSON input (a file path, inline JSON, or "-" for
stdin) and writes JSON lines.  Exit status: 0 when every check passes, 1 on a
failed check, 2 on malformed input, 3 when an enumeration cap is exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .hermitian import FormError, HermitianSpace, Parity, dual_index, parity
from .lattices import DEFAULT_CAP, CapExceeded, standard_lattice
from .local_rings import LocalFieldSpec, PrecisionError, RingSpecError
from .orbital import NotAdjointStable, NotRegularSemisimple, pair_from_json, results_json
from .reductions import (ExtensionError, InstanceProfile, ProfileError, SplitError, base_change_compare,
                         check_block_reduction, check_extension, check_product, digest, fl_check,
                         gen_instance, gen_subfield_instance, vanishing_check)
from . import witt_frames

ENV_PREFIX = "AFL_"
EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_CAP = 0, 1, 2, 3

SCHEMA_ERRORS = (json.JSONDecodeError, KeyError, TypeError, FormError, RingSpecError,
                 NotRegularSemisimple, NotAdjointStable, ProfileError, ExtensionError, SplitError,
                 ValueError)

PAIR_CHECKS = {
    "vanishing": vanishing_check,
    "fl": fl_check,
    "product": check_product,
    "extend": check_extension,
    "block": check_block_reduction,
}


class SchemaError(ValueError):
    pass


# -- input handling --------------------------------------------------------

def load_input(src: str):
    if src == "-":
        text = sys.stdin.read()
    elif src.lstrip().startswith(("{", "[")):
        text = src
    else:
        path = Path(src)
        if not path.exists():
            raise SchemaError(f"no such input file: {src}")
        text = path.read_text()
    text = text.strip()
    if not text:
        raise SchemaError("empty input")
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        # JSON lines
        return [json.loads(line) for line in text.splitlines() if line.strip()]


def parse_profile(data: dict, seed: int) -> InstanceProfile:
    if not isinstance(data, dict):
        raise SchemaError("profile must be an object")
    try:
        par = Parity(data["parity"])
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"profile needs parity 'even' or 'odd': {exc}") from exc
    known = {"p", "f0", "n", "parity", "structure", "factors", "mode", "cap", "max_entry",
             "min_jj_valuation", "require_sub_dual", "seeds", "seed"}
    extra = set(data) - known
    if extra:
        raise SchemaError(f"unknown profile keys: {sorted(extra)}")
    return InstanceProfile(p=int(data["p"]), f0=int(data.get("f0", 1)), n=int(data["n"]), parity=par,
                           structure=data.get("structure", "generic"), factors=int(data.get("factors", 2)),
                           mode=data.get("mode", "lie"), seed=int(data.get("seed", seed)),
                           cap=int(data.get("cap", 10 ** 4)),
                           require_sub_dual=bool(data.get("require_sub_dual", True)),
                           max_entry=data.get("max_entry"), min_jj_valuation=data.get("min_jj_valuation"))


def profile_seeds(data: dict, seed: int) -> list:
    """A profile may carry "seeds": [start, count]; otherwise one seed."""
    if "seeds" in data:
        start, count = data["seeds"]
        return list(range(int(start), int(start) + int(count)))
    return [int(data.get("seed", seed))]


def expand_instances(data, seed: int, precision: int | None) -> list:
    """Pairs from: a pair object, a profile object, or a list of either."""
    items = data if isinstance(data, list) else [data]
    out = []
    for item in items:
        if not isinstance(item, dict):
            raise SchemaError("instances must be JSON objects")
        if "space" in item:
            out.append(pair_from_json(item, precision))
        elif "parity" in item:
            for s in profile_seeds(item, seed):
                out.append(gen_instance(parse_profile(dict(item, seed=s), s), precision))
        else:
            raise SchemaError("expected a pair (with 'space') or a profile (with 'parity')")
    return out


# -- output ----------------------------------------------------------------

def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def report_record(rep, timings: bool) -> dict:
    out = rep.to_json()
    if not timings:
        out.pop("millis", None)
    return out


def emit(records: list, fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(_canon(r) + "\n")
    elif fmt == "pretty":
        for r in records:
            out.write(json.dumps(r, sort_keys=True, indent=2) + "\n")
    elif fmt == "csv":
        keys = sorted({k for r in records for k in r})
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in records:
            w.writerow([v if isinstance(v, str) else _canon(v) for v in (r.get(k) for k in keys)])
        out.write(buf.getvalue())
    else:
        raise SchemaError(f"unknown format {fmt}")


def verdict_code(records: list) -> int:
    if any(r.get("verdict") == "fail" for r in records):
        return EXIT_FAIL
    if any(r.get("status") == "cap_exceeded" for r in records):
        return EXIT_CAP
    return EXIT_OK


# -- subcommands -----------------------------------------------------------

def cmd_parity(args, data) -> list:
    items = data if isinstance(data, list) else [data]
    out = []
    for item in items:
        sp = item.get("space", item) if isinstance(item, dict) else None
        if sp is None:
            raise SchemaError("expected a space or pair object")
        space = HermitianSpace.from_json(sp, args.precision)
        std = standard_lattice(space.ring, space.n)
        out.append({"parity": parity(space).value, "dual_index": dual_index(std, space), "n": space.n})
    return out


def cmd_orbital(args, data) -> list:
    out = []
    for pair in expand_instances(data, args.seed, args.precision):
        rec = results_json(pair, args.cap)
        rec["parity"] = pair.parity().value
        rec["inputs_digest"] = digest(pair.to_json())
        out.append(rec)
    return out


def _pair_check(name: str):
    def run(args, data) -> list:
        fn = PAIR_CHECKS[name]
        out = []
        for pair in expand_instances(data, args.seed, args.precision):
            out.append(report_record(fn(pair, cap=args.cap), args.timings))
            if name == "extend" and not pair.group:
                out.append(report_record(check_block_reduction(pair, cap=args.cap), args.timings))
        return out
    return run


def cmd_base_change(args, data) -> list:
    items = data if isinstance(data, list) else [data]
    out = []
    for item in items:
        a_spec = LocalFieldSpec.from_json(dict(item["a_spec"], quadratic=True))
        inst = gen_subfield_instance(int(item["p"]), int(item.get("f0", 1)), a_spec, int(item.get("n_A", 1)),
                                     int(item.get("j_val", 1)), int(item.get("seed", args.seed)),
                                     precision=args.precision or int(item.get("precision", 16)))
        out.append(report_record(base_change_compare(inst, args.cap), args.timings))
    return out


def cmd_witt(args, data) -> list:
    if data is None or data == {} or data == []:
        reps = witt_frames.witt_suite(args.seed)
        return [report_record(r, args.timings) for r in reps]
    items = data if isinstance(data, list) else [data]
    out = []
    for item in items:
        spec = LocalFieldSpec.from_json(dict(item, quadratic=False))
        reps = witt_frames.witt_check(spec, int(item.get("seed", args.seed)), int(item.get("m", 4)),
                                      item.get("k"))
        out.extend(report_record(r, args.timings) for r in reps)
    return out


def cmd_gen(args, data) -> list:
    items = data if isinstance(data, list) else [data]
    out = []
    for item in items:
        if "parity" not in item:
            raise SchemaError("gen needs a profile object")
        for s in profile_seeds(item, args.seed):
            pair = gen_instance(parse_profile(dict(item, seed=s), s), args.precision)
            out.append(pair.to_json())
    return out


# -- scan ------------------------------------------------------------------

def _scan_task(task: tuple) -> tuple:
    """Runs in a worker: (check, profile dict, seed, precision, cap) ->
    (digest, record).  The digest keys the canonical instance JSON."""
    check, prof, seed, precision, cap = task
    try:
        pair = gen_instance(parse_profile(dict(prof, seed=seed), seed), precision)
    except ProfileError as exc:
        key = digest({"profile": prof, "seed": seed})
        return key, {"check": check, "inputs_digest": key, "status": "no_instance", "seed": seed,
                     "diagnostic": str(exc)}
    key = digest(pair.to_json())
    try:
        rep = PAIR_CHECKS[check](pair, cap=cap)
    except CapExceeded as exc:
        return key, {"check": check, "inputs_digest": key, "status": "cap_exceeded",
                     "required": exc.required, "cap": exc.cap, "seed": seed}
    rec = report_record(rep, False)
    rec["check"] = check
    rec["seed"] = seed
    return key, rec


def read_journal(path: Path) -> dict:
    done = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if line.strip():
                entry = json.loads(line)
                done[(entry["check"], entry["task"])] = entry
    return done


def cmd_scan(args, data) -> list:
    if args.check not in PAIR_CHECKS:
        raise SchemaError(f"unknown check {args.check}")
    items = data if isinstance(data, list) else [data]
    tasks = []
    for item in items:
        if not isinstance(item, dict) or "parity" not in item:
            raise SchemaError("scan needs profile objects")
        parse_profile(item, args.seed)  # validate early
        for s in profile_seeds(item, args.seed):
            prof = {k: v for k, v in item.items() if k not in ("seeds", "seed")}
            tasks.append((args.check, prof, s, args.precision, args.cap))
    journal = Path(args.journal) if args.journal else None
    done = read_journal(journal) if journal else {}

    def task_key(t):
        # profile, seed, precision and cap; a changed precision is a new task
        return _canon(t[1:])

    todo = [t for t in tasks if (t[0], task_key(t)) not in done]
    if todo:
        fh = journal.open("a") if journal else None
        pool = ProcessPoolExecutor(max_workers=args.jobs) if args.jobs > 1 else None
        try:
            stream = pool.map(_scan_task, todo) if pool else map(_scan_task, todo)
            for t, (key, rec) in zip(todo, stream):
                entry = {"check": t[0], "task": task_key(t), "digest": key, "record": rec}
                if fh:
                    # one line per finished task, so an interrupted scan keeps its work
                    fh.write(_canon(entry) + "\n")
                    fh.flush()
                done[(t[0], task_key(t))] = entry
        finally:
            if pool:
                pool.shutdown()
            if fh:
                fh.close()
    results = [(done[(t[0], task_key(t))]["digest"], done[(t[0], task_key(t))]["record"]) for t in tasks]
    # deterministic merge: by instance digest, then seed
    results.sort(key=lambda kr: (kr[0], kr[1].get("seed", -1)))
    return [rec for _, rec in results]


COMMANDS = {
    "parity": cmd_parity,
    "orbital": cmd_orbital,
    "fl-check": _pair_check("fl"),
    "vanishing-check": _pair_check("vanishing"),
    "product-check": _pair_check("product"),
    "extend-check": _pair_check("extend"),
    "base-change-check": cmd_base_change,
    "witt-check": cmd_witt,
    "gen": cmd_gen,
    "scan": cmd_scan,
}


def _env_default(name: str, default, conv=str):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    try:
        return conv(raw)
    except ValueError as exc:
        raise SchemaError(f"bad value for {ENV_PREFIX}{name.upper()}: {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="pi-adic working precision")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None, help="worker processes for scan")
    common.add_argument("--cap", type=int, default=None, help="enumeration cap on |L^dual / L|")
    common.add_argument("--format", choices=("json", "csv", "pretty"), default=None)
    common.add_argument("--timings", action="store_true", help="include wall-clock millis in reports")
    ap = argparse.ArgumentParser(prog="afl-lattices", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", nargs="?" if name == "witt-check" else None, default=None,
                        help="JSON file, inline JSON, or - for stdin")
        if name == "scan":
            sp.add_argument("--check", required=True, choices=sorted(PAIR_CHECKS))
            sp.add_argument("--journal", default=None, help="JSON-lines journal for resuming")
    return ap


def main(argv: list | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.precision is None:
            args.precision = _env_default("precision", None, int)
        if args.seed is None:
            args.seed = _env_default("seed", 0, int)
        if args.jobs is None:
            args.jobs = _env_default("jobs", 1, int)
        if args.cap is None:
            args.cap = _env_default("cap", DEFAULT_CAP, int)
        if args.format is None:
            args.format = _env_default("format", "json")
        data = load_input(args.input) if args.input is not None else None
        records = COMMANDS[args.command](args, data)
    except CapExceeded as exc:
        sys.stderr.write(_canon({"error": "cap_exceeded", "required": exc.required, "cap": exc.cap}) + "\n")
        return EXIT_CAP
    except PrecisionError as exc:
        sys.stderr.write(_canon({"error": "precision", "message": str(exc)}) + "\n")
        return EXIT_FAIL
    except (SchemaError,) + SCHEMA_ERRORS as exc:
        sys.stderr.write(_canon({"error": "schema", "message": f"{type(exc).__name__}: {exc}"}) + "\n")
        return EXIT_SCHEMA
    emit(records, args.format, sys.stdout)
    return verdict_code(records)


if __name__ == "__main__":
    sys.exit(main())
