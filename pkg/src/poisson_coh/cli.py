"""Command-line front end: ``poisson-coh {hp,verify,deform}``.

Reports are JSON documents with a reproducibility header (tool, version,
structure hash, parameters) and rows in a fixed order, so identical inputs
give byte-identical output.  Ranges are written ``A..B`` (inclusive); use
``--weights=-8..4`` when the range starts with a minus sign.

Exit codes: 0 ok, 1 verification counterexample, 2 input error,
3 unstable truncation under ``--require-stable``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from . import __version__
from .cartan import NonConstantDeterminant
from .deform import (build_dual_number_algebra, enumerate_first_order, from_bivector, verify_first_order)
from .gradedpoly import format_monomial
from .harrison import TruncationExceeded, total_hp
from .lp_cohomology import NotHomogeneous, UnsupportedAlgebra, build_slice, cochain_dimension
from .poisson_core import JacobiFailure, QuotientIncompatible, jacobi_check, weight_audit
from .structures import (BUILTINS, StructureDescription, StructureError, build_structure, load_deformation_bivector,
                         load_description)

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_INPUT, EXIT_UNSTABLE = 0, 1, 2, 3
TOOL = "poisson-coh"


class InputError(Exception):
    pass


def parse_range(text: str) -> list:
    """``"A..B"`` -> ``[A, ..., B]``; a bare integer is a one-element range."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise InputError(f"bad range {text!r}; expected A..B") from None
    if hi < lo:
        raise InputError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _description(args) -> StructureDescription:
    if args.example and args.structure:
        raise InputError("give either --example or --structure, not both")
    if args.example:
        if args.example not in BUILTINS:
            raise InputError(f"unknown example {args.example!r}; choose from {', '.join(sorted(BUILTINS))}")
        return BUILTINS[args.example]
    if args.structure:
        return load_description(args.structure)
    raise InputError("a structure is required: --example NAME or --structure FILE")


def _header(command: str, desc: StructureDescription, params: dict) -> dict:
    return {"tool": TOOL, "version": __version__, "command": command,
            "structure": {"name": desc.name, "sha256": desc.sha256()}, "params": params}


def _emit(doc: dict, fmt: str, out) -> None:
    if fmt == "csv":
        rows = doc.get("rows", [])
        cols = []
        for r in rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in cols})
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(doc, indent=2, sort_keys=False) + "\n")


# -- hp ----------------------------------------------------------------------


def _lp_rows(desc: StructureDescription, defer: bool, degree: int, w: int) -> dict:
    ps = build_structure(desc, defer)
    W = w + degree * ps.l
    sl = build_slice(ps, W, [degree], variant="extended")
    ext = sl.cohomology(degree)
    paper = None
    if degree >= 1:
        sp = build_slice(ps, W, [degree], variant="paper")
        paper = sp.cohomology(degree)
    return {"method": "lp", "degree": degree, "weight": w, "invariant": W,
            "cochain_dim": cochain_dimension(ps, degree, w), "dim": paper, "dim_extended": ext}


def _harrison_row(desc: StructureDescription, defer: bool, degree: int, w: int, D: int) -> dict:
    ps = build_structure(desc, defer)
    r = total_hp(ps, degree, w, D)
    return {"method": "harrison", "degree": degree, "weight": w, "invariant": r.invariant, "trunc": D,
            "cochain_dim": r.cochain_dim, "dim": r.dim, "dim_previous": r.dim_previous, "stable": r.stable}


def _task(spec):
    kind, desc_json, defer, degree, w, D = spec
    from .structures import description_from_json
    desc = description_from_json(desc_json)
    if kind == "lp":
        return _lp_rows(desc, defer, degree, w)
    return _harrison_row(desc, defer, degree, w, D)


def cmd_hp(args, out) -> int:
    desc = _description(args)
    ps = build_structure(desc, args.defer_jacobi)  # validates before fanning out
    method = args.method
    if args.hp is not None and args.degrees is not None:
        raise InputError("give either --hp or --degrees")
    if args.hp is not None:
        degrees = [args.hp]
    elif args.degrees is not None:
        degrees = parse_range(args.degrees)
    else:
        degrees = list(range(0, ps.n + 1)) if method == "lp" else [1, 2]
    D = args.trunc
    if method == "harrison":
        if D is None:
            raise InputError("--method harrison needs --trunc D")
        bad = [i for i in degrees if i not in (1, 2)]
        if bad:
            raise InputError(f"the Harrison route computes degrees 1 and 2 only, got {bad}")
    else:
        if ps.quotient is not None:
            raise InputError("the polyvector complex needs a polynomial ring; use --method harrison")
        bad = [i for i in degrees if not 0 <= i <= ps.n]
        if bad:
            raise InputError(f"degrees must lie in 0..{ps.n}, got {bad}")
    if args.weights is not None:
        weights = parse_range(args.weights)
    elif method == "harrison":
        weights = list(range(-D, D + 1))
    else:
        weights = list(range(-ps.n * max(ps.ctx.weights), 9))
    specs = [(method, desc.to_json(), args.defer_jacobi, i, w, D) for i in degrees for w in weights]
    if args.jobs and args.jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_task, specs))
    else:
        rows = [_task(s) for s in specs]
    params = {"method": method, "degrees": degrees, "weights": [weights[0], weights[-1]], "trunc": D,
              "require_stable": bool(args.require_stable)}
    if method == "lp":
        params["complex"] = {"dim": "degrees >= 1", "dim_extended": "degree 0 included"}
    doc = _header("hp", desc, params)
    doc["rows"] = rows
    _emit(doc, args.format, out)
    if args.require_stable and any(r.get("stable") is False for r in rows):
        return EXIT_UNSTABLE
    return EXIT_OK


# -- verify --------------------------------------------------------------------


def _names(ctx, triple) -> list:
    return [format_monomial(m, ctx) for m in triple]


def cmd_verify(args, out) -> int:
    desc = _description(args)
    ps = build_structure(desc, defer_jacobi=True)
    ctx = ps.ctx
    rep = jacobi_check(ps)
    audit = weight_audit(ps)
    cert = {"jacobi": {"ok": rep.ok, "triples_checked": rep.triples_checked},
            "weights": {"homogeneous": audit.homogeneous, "declared_l": audit.declared_l,
                        "inferred_l": audit.inferred_l}}
    code = EXIT_OK
    if not rep.ok:
        cert["jacobi"]["counterexample"] = {"triple": [ctx.variables[i] for i in rep.triple],
                                            "jacobiator": rep.value.to_text(ctx)}
        code = EXIT_COUNTEREXAMPLE
    D = args.trunc if args.trunc is not None else 3
    if args.deformation and code == EXIT_OK:
        P = load_deformation_bivector(args.deformation, ctx)
        d = from_bivector(ps, P, D)
        vr = verify_first_order(ps, d, D)
        cert["deformation"] = {"ok": vr.ok, "trunc": D, "psi": P.to_text(ctx),
                               "triples_checked": vr.checked}
        if not vr.ok:
            cert["deformation"]["counterexample"] = {"condition": vr.condition, "triple": _names(ctx, vr.triple),
                                                     "discrepancy": vr.discrepancy.to_text(ctx)}
            code = EXIT_COUNTEREXAMPLE
    doc = _header("verify", desc, {"trunc": D, "deformation": bool(args.deformation)})
    doc["ok"] = code == EXIT_OK
    doc["certificate"] = cert
    _emit(doc, "json", out)
    return code


# -- deform --------------------------------------------------------------------


def _cochain_entries(ctx, cochain) -> list:
    out = []
    for key in sorted(cochain.values):
        v = cochain.values[key]
        if v:
            inputs = [" ".join(format_monomial(m, ctx) for m in f) for f in key]
            out.append({"inputs": inputs, "value": v.to_text(ctx)})
    return out


def cmd_deform(args, out) -> int:
    desc = _description(args)
    ps = build_structure(desc, args.defer_jacobi)
    D = args.trunc if args.trunc is not None else 6
    weights = parse_range(args.weights) if args.weights is not None else list(range(-D, D + 1))
    route = args.route
    if route == "lp" and ps.quotient is not None:
        raise InputError("the bivector route needs a polynomial ring; use --route direct")
    rows = []
    for w in weights:
        classes = enumerate_first_order(ps, w, D, route)
        reps = []
        for d in classes:
            vr = verify_first_order(ps, d, D)
            if not vr.ok:
                raise AssertionError(f"enumerated class fails {vr.condition} at {vr.triple}")
            build_dual_number_algebra(ps, d, D)
            entry = {"verified": True}
            if d.bivector is not None:
                entry["psi_bivector"] = d.bivector.to_text(ps.ctx)
            else:
                entry["phi"] = _cochain_entries(ps.ctx, d.phi)
                entry["psi"] = _cochain_entries(ps.ctx, d.psi)
            reps.append(entry)
        rows.append({"weight": w, "classes": len(classes), "representatives": reps})
    doc = _header("deform", desc, {"weights": [weights[0], weights[-1]], "trunc": D,
                                   "route": route if route != "auto" else ("lp" if ps.quotient is None else "direct")})
    doc["rows"] = rows
    if args.format == "csv":
        doc = {"rows": [{"weight": r["weight"], "classes": r["classes"]} for r in rows]}
    _emit(doc, args.format, out)
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description="Weighted Poisson cohomology and first-order deformations.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--example", choices=sorted(BUILTINS), help="built-in structure")
        sp.add_argument("--structure", help="JSON structure file")
        sp.add_argument("--defer-jacobi", action="store_true", help="skip the Jacobi check at load time")
        sp.add_argument("--trunc", type=int, help="truncation D (max total input weight)")

    hp = sub.add_parser("hp", help="cohomology dimension tables")
    common(hp)
    hp.add_argument("--method", choices=("lp", "harrison"), default="lp")
    hp.add_argument("--degrees", help="degree range A..B")
    hp.add_argument("--hp", type=int, help="single degree (shorthand for --degrees N..N)")
    hp.add_argument("--weights", help="polyvector weight range A..B")
    hp.add_argument("--require-stable", action="store_true", help="exit 3 if any truncated row is unstable")
    hp.add_argument("--format", choices=("json", "csv"), default="json")
    hp.add_argument("--jobs", type=int, default=1, help="worker processes for independent slices")

    ve = sub.add_parser("verify", help="check Jacobi and optionally a first-order deformation")
    common(ve)
    ve.add_argument("--deformation", help="JSON file with a bivector 'psi'")

    de = sub.add_parser("deform", help="enumerate first-order deformation classes")
    common(de)
    de.add_argument("--weights", help="weight range A..B")
    de.add_argument("--route", choices=("auto", "lp", "direct"), default="auto")
    de.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    handler = {"hp": cmd_hp, "verify": cmd_verify, "deform": cmd_deform}[args.command]
    try:
        return handler(args, out)
    except (InputError, StructureError, UnsupportedAlgebra, NotHomogeneous, NonConstantDeterminant,
            TruncationExceeded, QuotientIncompatible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except JacobiFailure as exc:
        print(f"error: {exc} (use verify for a certificate, or --defer-jacobi)", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
