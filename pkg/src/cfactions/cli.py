"""``cf``: generate schemas, validate them, certify claims, query measures.

Exit codes: 0 pass, 2 fail, 3 inconclusive, 1 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import certificates as cert
from . import markov
from .cylinders import Cylinder, DepthExhausted, measure, meet_measure
from .groups import centered_cube
from .schema import (CFSchema, LevelError, build_theorem01, build_theorem02, build_theorem03,
                     toy_schema, validate)

EXIT_PASS, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ io

def atomic_write(path: str | None, text: str) -> None:
    """Write via a temporary file and rename; '-' or None means stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def load_schema(spec: str) -> tuple[CFSchema, str]:
    """A schema file, or the built-in name 'toy'."""
    if spec == "toy":
        s = toy_schema()
        return s, s.dumps()
    try:
        text = Path(spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read schema {spec}: {exc}") from exc
    try:
        return CFSchema.loads(text), text
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed schema {spec}: {exc}") from exc


def frac(q) -> str:
    return cert.frac_str(q)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run_report(args, inputs: dict, started: float, **extra) -> dict:
    return {"command": args._argv,
            "inputs": inputs, "seconds": round(time.time() - started, 3), **extra}


# --------------------------------------------------------------- gen

def parse_N(text: str | None) -> tuple:
    if not text:
        raise UsageError("--N is required for theorem 0.3 (e.g. --N 20,40,80)")
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --N value {text!r}") from exc


def build_from_args(args) -> CFSchema:
    try:
        if args.theorem == "0.1":
            return build_theorem01(args.k, args.d, args.depth)
        if args.theorem == "0.2":
            return build_theorem02(args.k, args.d, args.depth)
        return build_theorem03(args.d, args.depth, parse_N(args.N))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_gen(args) -> int:
    schema = build_from_args(args)
    atomic_write(args.out, schema.dumps() + "\n")
    if args.out not in (None, "-"):
        print(f"wrote {args.out}: variant {schema.variant}, depth {schema.depth}", file=sys.stderr)
    return EXIT_PASS


# ---------------------------------------------------------- validate

def cmd_validate(args) -> int:
    started = time.time()
    schema, text = load_schema(args.schema)
    ball = centered_cube(args.gball, schema.d) if args.gball is not None else ()
    rep = validate(schema, ball)
    for c in rep.checks:
        tag = "info" if c.informational else ("ok" if c.passed else "FAIL")
        lvl = "-" if c.level is None else c.level
        print(f"{tag:4} level {lvl:>2} {c.condition:22} {c.detail}")
    bad_thresholds = [g for g, n in rep.thresholds.items() if n is None]
    if bad_thresholds:
        print(f"FAIL absorbing level missing for {len(bad_thresholds)} elements of the ball")
    ok = rep.all_pass
    if args.out:
        out = {"report": run_report(args, {args.schema: sha256_text(text)}, started),
               "verdict": "pass" if ok else "fail", **rep.to_json()}
        atomic_write(args.out, json.dumps(out, indent=1, sort_keys=True) + "\n")
    print("pass" if ok else "fail")
    return EXIT_PASS if ok else EXIT_FAIL


# ----------------------------------------------------------- certify

CLAIMS = {
    "thm04-conservative", "thm01-ergodic", "thm01-nonergodic", "thm01-rigidity",
    "thm02-conservative", "thm02-wandering", "thm02-zero-type",
    "thm03-ergodic", "thm03-nonergodic", "thm03-wandering",
}
ALIASES = {"thm02-wandering-k2": "thm02-wandering"}


def _profile_outcome(schema: CFSchema, levels) -> tuple[cert.Outcome, dict]:
    meta = schema.meta
    A = Cylinder(schema, 0, [((0,) * schema.d,)], power=1)
    try:
        ratios = cert.rigidity_profile(schema, A, levels)
    except DepthExhausted as exc:
        return cert.Outcome(cert.Verdict.INCONCLUSIVE, str(exc)), {}
    floors = [Fraction(meta.R[n - 1] - meta.k - 2, meta.R[n - 1]) for n in levels]
    ok = all(r >= f for r, f in zip(ratios, floors)) and all(
        a <= b for a, b in zip(ratios, ratios[1:])) and all(r <= 1 for r in ratios)
    body = {"levels": list(levels), "ratios": [frac(r) for r in ratios], "floors": [frac(f) for f in floors]}
    verdict = cert.Verdict.PASS if ok else cert.Verdict.FAIL
    return cert.Outcome(verdict, "ratios above (R_n-k-2)/R_n and nondecreasing" if ok
                        else "profile below floor or not monotone"), body


def _zero_type_outcome(schema: CFSchema, levels) -> tuple[cert.Outcome, dict]:
    scans = [cert.zero_type_scan(schema, [(0,) * schema.d], n) for n in levels]
    ok = all(s.passed for s in scans)
    verdict = cert.Verdict.PASS if ok else cert.Verdict.FAIL
    return cert.Outcome(verdict, "max ratio below (k+1)^2/#C_n at every level" if ok
                        else "bound violated"), {"scans": [s.to_json() for s in scans]}


def default_levels(schema: CFSchema, claim: str, level, ball_level):
    D = schema.depth
    if claim == "thm01-rigidity":
        return list(range(1, D)) if level is None else [level]
    if claim == "thm02-zero-type":
        return list(range(1, D + 1)) if level is None else [level]
    return level


def build_claim(schema: CFSchema, claim: str, level, ball_level, L):
    """Returns a certificate object or, for profiles, an (outcome, body) pair."""
    D = schema.depth
    if claim == "thm04-conservative":
        return cert.build_thm04_swap_witness(schema, D - 1 if level is None else level)
    if claim == "thm01-ergodic":
        k = getattr(schema.meta, "k", 1)
        z = ((0,) * schema.d,) * k
        n = level or 0
        if L is None and k > 1:
            L = min(D, n + 3)  # first-hit pieces grow like #C^(k*levels)
        return cert.build_thm01_ergodicity_witness(schema, z, z, n=n, L=L)
    if claim == "thm01-nonergodic":
        return cert.build_thm01_nonergodicity_certificate(schema, level, ball_level)
    if claim == "thm02-conservative":
        k = getattr(schema.meta, "k", 1)
        n = max(0, D - (3 if k == 1 else 2)) if level is None else level
        return cert.build_thm02_conservativity_witness(schema, n, L)
    if claim == "thm02-wandering":
        return cert.build_thm02_wandering_certificate(schema, level, ball_level)
    if claim == "thm03-ergodic":
        m = 1 if level is None else level
        return cert.build_thm03_ergodicity_witness(schema, *cert.thm03_default_targets(schema, m), m)
    if claim == "thm03-nonergodic":
        return cert.build_thm03_nonergodicity_certificate(schema, ball_level)
    if claim == "thm03-wandering":
        return cert.build_thm03_wandering_certificate(schema, 1 if ball_level is None else ball_level)
    levels = default_levels(schema, claim, level, ball_level)
    if claim == "thm01-rigidity":
        if schema.variant != "thm01":
            raise ValueError("rigidity profile needs a rigid build (theorem 0.1)")
        return _profile_outcome(schema, levels)
    if schema.variant != "thm02":
        raise ValueError("zero-type scan needs a theorem 0.2 build")
    return _zero_type_outcome(schema, levels)


def _emit(args, schema_text, started, claim, outcome: cert.Outcome, body: dict) -> int:
    doc = {
        "claim": claim,
        "schema_sha256": sha256_text(schema_text),
        "outcome": outcome.to_json(),
        "verdict": outcome.verdict.value,
        "report": run_report(args, {args.schema: sha256_text(schema_text)}, started),
        **body,
    }
    if args.out:
        atomic_write(args.out, json.dumps(doc, sort_keys=True) + "\n")
    print(f"{claim}: {outcome.verdict.value} ({outcome.reason})")
    for key in ("delta", "fraction", "bound", "certified"):
        if key in outcome.data:
            print(f"  {key} = {frac(outcome.data[key])}")
    return outcome.verdict.exit_code


def cmd_certify(args) -> int:
    started = time.time()
    claim = ALIASES.get(args.claim, args.claim)
    if claim not in CLAIMS:
        raise UsageError(f"unknown claim {args.claim!r}; known: {', '.join(sorted(CLAIMS | set(ALIASES)))}")
    schema, text = load_schema(args.schema)
    try:
        obj = build_claim(schema, claim, args.level, args.ball_level, args.L)
    except DepthExhausted as exc:
        return _emit(args, text, started, claim, cert.Outcome(cert.Verdict.INCONCLUSIVE, str(exc)), {})
    except (ValueError, LevelError) as exc:
        raise UsageError(str(exc)) from exc
    if isinstance(obj, tuple):
        outcome, body = obj
        body = {"profile": {"kind": claim, **body}}
    else:
        outcome = cert.check_any(obj)
        body = {"certificate": obj.to_json()}
    return _emit(args, text, started, claim, outcome, body)


def cmd_verify(args) -> int:
    started = time.time()
    schema, text = load_schema(args.schema)
    try:
        doc = json.loads(Path(args.certificate).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    if doc.get("schema_sha256") not in (None, sha256_text(text)):
        print("warning: certificate was produced for a different schema file", file=sys.stderr)
    claim = doc.get("claim", "")
    if "certificate" in doc:
        try:
            obj = cert.certificate_from_json(schema, doc["certificate"])
        except (ValueError, KeyError) as exc:
            raise UsageError(f"malformed certificate: {exc}") from exc
        outcome = cert.check_any(obj)
    elif "profile" in doc:
        prof = doc["profile"]
        levels = prof.get("levels") or [s["level"] for s in prof.get("scans", [])]
        outcome, body = (_profile_outcome if prof["kind"] == "thm01-rigidity" else _zero_type_outcome)(
            schema, levels)
        recorded = {k: v for k, v in prof.items() if k != "kind"}
        if outcome and body != recorded:
            outcome = cert.Outcome(cert.Verdict.FAIL, "recorded values differ from recomputation")
    else:
        raise UsageError("document holds neither a certificate nor a profile")
    print(f"{claim}: {outcome.verdict.value} ({outcome.reason})")
    if args.out:
        atomic_write(args.out, json.dumps({"verdict": outcome.verdict.value, "outcome": outcome.to_json(),
                                           "report": run_report(args, {args.schema: sha256_text(text)},
                                                                started)}, sort_keys=True) + "\n")
    return outcome.verdict.exit_code


# ----------------------------------------------------------- measure

def parse_set(text: str) -> list:
    """'0..4', '0,3,7' or '-2..2,9' -> sorted ints."""
    out = set()
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.update(range(int(lo), int(hi) + 1))
        elif part:
            out.add(int(part))
    return sorted(out)


def parse_cylinder(schema: CFSchema, text: str) -> Cylinder:
    """'LEVEL:SET[xSET...]' over d = 1, e.g. '1:0..4' or '1:0x3'."""
    if schema.d != 1:
        raise UsageError("command-line cylinders are for d = 1; use the Python API otherwise")
    try:
        level, sets = text.split(":", 1)
        parts = [[(x,) for x in parse_set(s)] for s in sets.split("x")]
        return Cylinder.from_sets(schema, int(level), *parts)
    except (ValueError, LevelError) as exc:
        raise UsageError(f"bad cylinder {text!r}: {exc}") from exc


_WORKER = {}


def _init_worker(schema_text, c1, c2, signs):
    s = CFSchema.loads(schema_text)
    _WORKER.update(schema=s, c1=Cylinder.from_json(s, c1), c2=Cylinder.from_json(s, c2), signs=signs)


def _meet_row(g: int):
    w = _WORKER
    try:
        return g, frac(meet_measure(w["c1"], (g,), w["signs"], w["c2"]))
    except DepthExhausted:
        return g, "deferred"


def cmd_measure(args) -> int:
    schema, text = load_schema(args.schema)
    c1 = parse_cylinder(schema, args.cyl)
    c2 = parse_cylinder(schema, args.target) if args.target else c1
    if c2.power != c1.power:
        raise UsageError("cylinders must have the same power")
    signs = args.signs or "+" * c1.power
    if args.sweep is None and args.g is None:
        print(frac(measure(c1)))
        return EXIT_PASS
    gs = parse_set(args.sweep) if args.sweep is not None else [args.g]
    if args.jobs and args.jobs > 1 and len(gs) > 1:
        with ProcessPoolExecutor(args.jobs, initializer=_init_worker,
                                 initargs=(schema.dumps(), c1.to_json(), c2.to_json(), signs)) as ex:
            rows = list(ex.map(_meet_row, gs))
    else:
        _WORKER.update(schema=schema, c1=c1, c2=c2, signs=signs)
        rows = [_meet_row(g) for g in gs]
    atomic_write(args.report, csv_text(["g", "measure"], rows))
    return EXIT_PASS


# ------------------------------------------------------------ markov

def cmd_markov(args) -> int:
    try:
        P = markov.kernel(args.kernel)
    except markov.KernelError as exc:
        raise UsageError(str(exc)) from exc
    if args.N < 1 or args.k < 1:
        raise UsageError("--N and --k must be positive")
    a = (0,) * (2 if args.kernel.strip() == "srw2d" else 1)
    sums = markov.index_partial_sums(P, a, args.k, args.N)
    rows = [(n, frac(s)) for n, s in enumerate(sums, start=1)]
    text = csv_text(["N", f"S_N(k={args.k})"], rows)
    if args.report:
        atomic_write(args.report, text)
    else:
        sys.stdout.write(text)
    if args.N >= 4:
        N = args.N - args.N % 4
        trend = markov.dyadic_trend(P, a, args.k, N)
        label = "diverging" if trend.diverging else "converging"
        print(f"k={args.k}: dyadic increment ratio {float(trend.ratio):.4f} -> {label} trend (indicator)",
              file=sys.stderr)
        if args.k == 2:
            print(markov.inverse_product_indicator(P, a, N), file=sys.stderr)
    return EXIT_PASS


# -------------------------------------------------------------- main

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cf", description="Exact (C,F)-construction toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a schema")
    g.add_argument("--theorem", choices=["0.1", "0.2", "0.3"], required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--depth", type=int, default=5)
    g.add_argument("--N", help="comma-separated N_n for theorem 0.3")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check the structural conditions of a schema")
    v.add_argument("schema")
    v.add_argument("--gball", type=int, default=None, help="radius of the cube of g whose absorbing levels are reported")
    v.add_argument("--out")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("certify", help="build and check a certificate")
    c.add_argument("schema")
    c.add_argument("--claim", required=True)
    c.add_argument("--level", type=int, default=None)
    c.add_argument("--ball-level", type=int, default=None)
    c.add_argument("--L", type=int, default=None, help="truncation level for first-hit witnesses")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    r = sub.add_parser("verify", help="re-check a certificate file")
    r.add_argument("schema")
    r.add_argument("certificate")
    r.add_argument("--out")
    r.set_defaults(func=cmd_verify)

    m = sub.add_parser("measure", help="exact cylinder measures and intersection sweeps")
    m.add_argument("schema", help="schema file or 'toy'")
    m.add_argument("--cyl", required=True, help="LEVEL:SET[xSET...], e.g. 1:0..4")
    m.add_argument("--target", help="second cylinder (default: same as --cyl)")
    m.add_argument("--g", type=int, default=None)
    m.add_argument("--sweep", help="set of g, e.g. 0..20")
    m.add_argument("--signs", help="sign pattern such as +-")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--report", help="CSV output file")
    m.set_defaults(func=cmd_measure)

    k = sub.add_parser("markov", help="exact return-probability partial sums")
    k.add_argument("--kernel", default="srw1d")
    k.add_argument("--k", type=int, default=1)
    k.add_argument("--N", type=int, default=64)
    k.add_argument("--report", help="CSV output file (default stdout)")
    k.set_defaults(func=cmd_markov)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    args._argv = argv
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
