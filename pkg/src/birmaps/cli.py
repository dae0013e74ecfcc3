"""Batch front end: one JSON job in, one JSON report out.

Exit codes: 0 the property holds (or the artifact was produced), 1 it fails,
2 inconclusive within the caps, 3 input error.  See ``jobs/README.md`` for
the job schema and one example per subcommand.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from .checks import (
    check_birational,
    check_closed_embedding_affine,
    check_dominant,
    check_isomorphism_onto,
    check_regular,
    check_regular_affine,
    check_regular_embedding,
)
from .groebner import Budget, BudgetExceeded, Ideal, reduced_groebner_basis
from .nullcert import certify_containment
from .polyring import GREVLEX, LEX, PolynomialSyntaxError, Ring, field_from_spec, parse
from .varieties import RationalMap, Variety
from .verdict import Answer, Verdict
from .wsystem import (
    WCaps,
    WitnessAssignment,
    WitnessFailed,
    build_birational_plus_system,
    build_dominance_system,
    build_system,
    construct_witness,
    toy_solve,
    verify_witness,
)

COMMANDS = (
    "check-birational",
    "check-dominant",
    "check-regular",
    "check-embedding",
    "check-iso",
    "build-system",
    "build-wplus",
    "build-dominance",
    "construct-witness",
    "verify-witness",
    "certify",
    "groebner",
)

EXIT_INPUT = 3


class JobError(ValueError):
    pass


@dataclass(frozen=True)
class Settings:
    spairs: int = 20000
    degree: int = 60
    cert_cap: int = 4
    monoid_cap: int = 3
    tau_cap: int = 2
    field: str | None = None

    @property
    def budget(self) -> Budget:
        return Budget(max_spairs=self.spairs, max_degree=self.degree)

    def caps(self) -> dict:
        return {
            "budget_spairs": self.spairs,
            "budget_degree": self.degree,
            "cert_cap": self.cert_cap,
            "monoid_cap": self.monoid_cap,
            "tau_cap": self.tau_cap,
        }


# ---------------------------------------------------------------------------
# job parsing


def _need(doc: dict, key: str):
    if key not in doc:
        raise JobError(f"missing field {key!r}")
    return doc[key]


def _poly(text: str, ring: Ring, where: str):
    try:
        return parse(text, ring)
    except PolynomialSyntaxError as e:
        raise JobError(f"{where}: {e}") from None


def _variety(spec: dict, field, where: str) -> Variety:
    names = _need(spec, "variables")
    mode = spec.get("mode", "projective")
    try:
        R = Ring(names, field)
    except ValueError as e:
        raise JobError(f"{where}: {e}") from None
    gens = [_poly(t, R, f"{where}.equations[{i}]") for i, t in enumerate(spec.get("equations", []))]
    try:
        return Variety(gens, mode, ring=R)
    except ValueError as e:
        raise JobError(f"{where}: {e}") from None


def _map(spec: dict, X: Variety, targets: list[str] | None) -> RationalMap:
    R = X.ring
    comps = [_poly(t, R, f"map.components[{i}]") for i, t in enumerate(_need(spec, "components"))]
    den = spec.get("denominator")
    den = _poly(den, R, "map.denominator") if den is not None else None
    try:
        return RationalMap(comps, X.mode, denominator=den, target_names=targets)
    except ValueError as e:
        raise JobError(f"map: {e}") from None


def _settings_for(job: dict, base: Settings, overridden: set[str]) -> Settings:
    caps = job.get("caps", {})
    s = base
    mapping = {"spairs": "spairs", "degree": "degree", "certificate": "cert_cap", "monoid": "monoid_cap", "tau": "tau_cap"}
    for k, attr in mapping.items():
        if k in caps and attr not in overridden:
            s = replace(s, **{attr: int(caps[k])})
    return s


# ---------------------------------------------------------------------------
# evidence serialization


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items() if k != "inverse_map"}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, bool)) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def _report(command: str, verdict: str, code: int, evidence: dict, settings: Settings, spent: dict | None = None) -> dict:
    return {
        "schema": 1,
        "tool": f"birmaps {__version__}",
        "command": command,
        "verdict": verdict,
        "exit_code": code,
        "evidence": _jsonable(evidence),
        "caps": settings.caps(),
        "budget_spent": _jsonable(spent or {}),
    }


def _from_verdict(command: str, v: Verdict, settings: Settings) -> dict:
    return _report(command, v.answer.value, v.answer.exit_code, v.evidence, settings, v.budget_spent)


# ---------------------------------------------------------------------------
# commands


def _pair(job: dict, field):
    X = _variety(_need(job, "source"), field, "source")
    Y = _variety(_need(job, "target"), field, "target")
    if X.mode != Y.mode:
        raise JobError("source and target modes differ")
    F = _map(_need(job, "map"), X, list(Y.ring.names))
    return F, X, Y


def _wcaps(s: Settings) -> WCaps:
    return WCaps(monoid_degree=s.monoid_cap, tau_degree=s.tau_cap)


def _run_check(command: str, job: dict, field, s: Settings) -> dict:
    F, X, Y = _pair(job, field)
    b = s.budget
    affine = X.mode == "affine"
    if command == "check-birational":
        v = check_birational(F, X, Y, b)
    elif command == "check-dominant":
        v = check_dominant(F, X, Y, b)
    elif command == "check-regular":
        v = check_regular_affine(F, X, b) if affine else check_regular(F, X, b)
    elif command == "check-embedding":
        v = check_closed_embedding_affine(F, X, Y, b) if affine else check_regular_embedding(F, X, Y, b)
    else:
        if affine:
            v = check_closed_embedding_affine(F, X, Y, b)
            if v.yes:
                d = check_dominant(F, X, Y, b)
                v = d if not d.yes else v
        else:
            v = check_isomorphism_onto(F, X, Y, b)
    return _from_verdict(command, v, s)


def _run_build(command: str, job: dict, field, s: Settings) -> dict:
    X = _variety(_need(job, "source"), field, "source")
    Y = _variety(_need(job, "target"), field, "target")
    d = int(job.get("d", 1))
    n = job.get("n")
    caps = _wcaps(s)
    if command == "build-system":
        systems = {"S": build_system(X, Y, n, d, caps)}
    elif command == "build-wplus":
        systems = {"S+": build_birational_plus_system(X, Y, n, d, caps)}
    else:
        E, Ep = build_dominance_system(X, Y, n, d, caps)
        systems = {"E": E, "E'": Ep}
    ev = {
        name: {
            "equations": len(S.equations),
            "point_vars": len(S.point_vars),
            "param_vars": len(S.param_vars),
            "counts_by_tag": S.counts_by_tag(),
        }
        for name, S in systems.items()
    }
    if job.get("solve"):
        results = {name: toy_solve(S, s.budget) for name, S in systems.items()}
        for name, r in results.items():
            ev[name]["toy_solve"] = {"status": r.status, **r.evidence}
        code = max(r.exit_code for r in results.values())
        verdict = {0: "sat", 1: "unsat", 2: "inconclusive"}[code]
        rep = _report(command, verdict, code, ev, s)
    else:
        rep = _report(command, Answer.YES.value, 0, ev, s)
    rep["systems"] = {name: S.to_json() for name, S in systems.items()}
    return rep


def _run_witness(command: str, job: dict, field, s: Settings) -> dict:
    F, X, Y = _pair(job, field)
    if X.mode != "projective":
        raise JobError("witnesses need projective inputs")
    d = int(job.get("d", 1))
    plus = job.get("variant", "W") == "W+"
    caps = _wcaps(s)
    builder = build_birational_plus_system if plus else build_system
    S = builder(X, Y, None, d, caps)
    if command == "construct-witness":
        try:
            w = construct_witness(F, X, Y, d, caps, plus=plus, system=S)
        except WitnessFailed as e:
            return _report(command, "inconclusive", 2, {"reason": str(e)}, s)
        check = verify_witness(S, w, s.budget)
        ev = {"verified": check.ok, "info": w.info, "witness": w.to_json(S.field)["values"]}
        return _report(command, "yes" if check.ok else "inconclusive", 0 if check.ok else 2, ev, s)
    wdoc = job.get("witness")
    if wdoc is None:
        path = _need(job, "witness_file")
        wdoc = json.loads(Path(path).read_text())
    if "values" not in wdoc:
        wdoc = {"values": wdoc}
    try:
        w = WitnessAssignment.from_json(wdoc, S.field)
    except (ValueError, ZeroDivisionError) as e:
        raise JobError(f"witness: {e}") from None
    missing = w.complete_for(S)
    if missing:
        raise JobError(f"witness is incomplete: {len(missing)} parameters missing, e.g. {missing[:3]}")
    check = verify_witness(S, w, s.budget)
    return _report(command, "yes" if check.ok else "no", 0 if check.ok else 1, {"violated": check.violated}, s)


def _run_certify(job: dict, field, s: Settings) -> dict:
    X = _variety(_need(job, "source"), field, "source")
    h = _poly(_need(job, "polynomial"), X.ring, "polynomial")
    v = certify_containment(X.ideal, h, s.cert_cap, s.budget)
    return _from_verdict("certify", v, s)


def _run_groebner(job: dict, field, s: Settings) -> dict:
    X = _variety(_need(job, "source"), field, "source")
    order = {"grevlex": GREVLEX, "lex": LEX}.get(job.get("order", "grevlex"))
    if order is None:
        raise JobError("order must be grevlex or lex")
    try:
        rep = reduced_groebner_basis(X.ideal, order, s.budget)
    except BudgetExceeded as e:
        return _report("groebner", "inconclusive", 2, {"reason": e.reason}, s, e.spent)
    ev = {"basis": [str(g) for g in rep.basis], "unit": rep.is_unit}
    spent = {"s_pairs": rep.s_pairs_processed, "max_degree": rep.max_intermediate_degree}
    return _report("groebner", "yes", 0, ev, s, spent)


def run_job(job: dict, command: str | None = None, settings: Settings | None = None, overridden: frozenset = frozenset()) -> dict:
    """Run one parsed job; never raises for bad input (exit code 3 instead)."""
    base = settings or Settings()
    try:
        if not isinstance(job, dict):
            raise JobError("a job is a JSON object")
        if job.get("schema") != 1:
            raise JobError("job schema must be 1")
        cmd = job.get("command")
        if command is not None:
            if cmd is not None and cmd != command:
                raise JobError(f"job is for {cmd!r}, not {command!r}")
            cmd = command
        if cmd not in COMMANDS:
            raise JobError(f"unknown command {cmd!r}")
        s = _settings_for(job, base, set(overridden))
        try:
            field = field_from_spec(s.field or job.get("field", "q"))
        except ValueError as e:
            raise JobError(str(e)) from None
        if cmd.startswith("check-"):
            return _run_check(cmd, job, field, s)
        if cmd.startswith("build-"):
            return _run_build(cmd, job, field, s)
        if cmd in ("construct-witness", "verify-witness"):
            return _run_witness(cmd, job, field, s)
        if cmd == "certify":
            return _run_certify(job, field, s)
        return _run_groebner(job, field, s)
    except (JobError, KeyError, TypeError) as e:
        return _report(command or str(job.get("command") if isinstance(job, dict) else None), "error", EXIT_INPUT, {"error": str(e)}, base)
    except ValueError as e:
        return _report(command or str(job.get("command")), "error", EXIT_INPUT, {"error": str(e)}, base)
    except BudgetExceeded as e:
        return _report(command or str(job.get("command")), "inconclusive", 2, {"reason": e.reason}, base, e.spent)


def _run_file(args) -> dict:
    path, command, settings, overridden = args
    try:
        job = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        return _report(command or "unknown", "error", EXIT_INPUT, {"error": f"{path}: {e}"}, settings)
    if isinstance(job, dict) and isinstance(job.get("witness_file"), str):
        wf = Path(job["witness_file"])
        if not wf.is_absolute():
            job["witness_file"] = str(Path(path).parent / wf)
    return run_job(job, command, settings, overridden)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="birmaps", description="Decide properties of explicit maps and emit parameterised systems.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="subcommand (defaults to the job's 'command' field)")
    p.add_argument("--job", action="append", required=True, help="job file (repeat for a batch)")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--budget-spairs", type=int)
    p.add_argument("--budget-degree", type=int)
    p.add_argument("--cert-cap", type=int)
    p.add_argument("--monoid-cap", type=int)
    p.add_argument("--field", help="q or fp:<p>")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for a batch")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    s = Settings()
    overridden = set()
    for flag, attr in (("budget_spairs", "spairs"), ("budget_degree", "degree"), ("cert_cap", "cert_cap"), ("monoid_cap", "monoid_cap"), ("field", "field")):
        v = getattr(args, flag)
        if v is not None:
            s = replace(s, **{attr: v})
            overridden.add(attr)
    tasks = [(path, args.command, s, frozenset(overridden)) for path in args.job]
    if len(tasks) > 1 and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(_run_file, tasks))
    else:
        reports = [_run_file(t) for t in tasks]
    out = reports[0] if len(reports) == 1 else reports
    text = json.dumps(out, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return max(r["exit_code"] for r in reports)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
