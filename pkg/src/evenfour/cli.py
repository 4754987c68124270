"""Command-line front end.

Every subcommand reads one JSON value (inline, as ``key=value`` pairs, or via
``--input FILE|-``) and prints either aligned text or JSON. Exit codes:
0 success / all checks hold, 1 a check failed or a result excludes the
input, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Callable

from . import abgrp, covers, forms, intalg, manifold, rinv
from .manifold import fraction_json

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InputError(ValueError):
    pass


class Outcome:
    def __init__(self, payload: dict, text: str, code: int = EXIT_OK):
        self.payload = payload
        self.text = text
        self.code = code


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return fraction_json(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _table(rows: list[tuple[str, Any]]) -> str:
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _matrix_text(M: intalg.IntegerMatrix) -> str:
    rows = M.to_rows()
    if not rows:
        return "  []"
    w = max(len(str(x)) for r in rows for x in r)
    return "\n".join("  [" + " ".join(str(x).rjust(w) for x in r) + "]" for r in rows)


# ---------------------------------------------------------------- parsers

def _need_dict(obj, what: str) -> dict:
    if not isinstance(obj, dict):
        raise InputError(f"{what} input must be a JSON object")
    return obj


def _group_of(obj) -> abgrp.FGAbelianGroup:
    if isinstance(obj, list):
        return abgrp.from_presentation(intalg.parse_matrix(obj))
    obj = _need_dict(obj, "group")
    if "relations" in obj:
        rel = obj["relations"]
        gens = obj.get("generators")
        if rel == [] and isinstance(gens, int):
            return abgrp.FGAbelianGroup(gens, ())
        M = intalg.parse_matrix(rel)
        if gens is not None and gens != M.cols:
            raise InputError("relation matrix needs one column per generator")
        return abgrp.from_presentation(M)
    return abgrp.parse_group(obj)


def _w2_of(obj, t: int) -> abgrp.Ext2Class:
    bits = obj.get("w2", obj.get("w"))
    if bits is None:
        return abgrp.Ext2Class.zero(t)
    if not isinstance(bits, list):
        raise InputError("w2 must be a list of 0/1 bits")
    w = abgrp.Ext2Class(tuple(bits))
    if len(w) != t:
        raise InputError(f"w2 has {len(w)} bits but H_1 has {t} even torsion slots")
    return w


def _descriptor_of(obj, extra=frozenset()) -> manifold.ManifoldDescriptor:
    obj = _need_dict(obj, "descriptor")
    return manifold.parse_descriptor(obj, frozenset(extra))


def _valid_descriptor(obj, extra=frozenset()) -> manifold.ManifoldDescriptor:
    d = _descriptor_of(obj, extra)
    problems = manifold.validate(d)
    if problems:
        raise InputError("invalid descriptor: " + "; ".join(map(str, problems)))
    return d


# ---------------------------------------------------------------- commands

def cmd_snf(obj) -> Outcome:
    M = intalg.parse_matrix(obj)
    res = intalg.smith_normal_form(M)
    payload = {
        "U": res.U.to_rows(), "D": res.D.to_rows(), "V": res.V.to_rows(),
        "invariant_factors": res.invariant_factors, "rank": res.rank,
    }
    text = "\n".join([
        f"invariant factors: {res.invariant_factors}",
        f"rank: {res.rank}",
        "U =", _matrix_text(res.U),
        "D =", _matrix_text(res.D),
        "V =", _matrix_text(res.V),
    ])
    return Outcome(payload, text)


def _group_summary(G: abgrp.FGAbelianGroup) -> tuple[dict, list[tuple[str, Any]]]:
    tp = abgrp.two_primary(G)
    payload = {
        "group": G.to_json(),
        "two_primary_exponents": list(tp.exponents),
        "mu": tp.mu, "t": tp.t,
        "ext_z2_dim": abgrp.ext_z2_dim(G),
        "even_slots": list(G.even_slots),
    }
    rows = [
        ("group", str(G)),
        ("free rank", G.free_rank),
        ("torsion", list(G.torsion)),
        ("2-primary exponents", list(tp.exponents)),
        ("mu", tp.mu),
        ("t", tp.t),
        ("dim Ext(G;Z2)", abgrp.ext_z2_dim(G)),
    ]
    return payload, rows


def cmd_group(obj) -> Outcome:
    G = _group_of(obj)
    payload, rows = _group_summary(G)
    for n in (2, 4):
        payload[f"hom_count_z{n}"] = abgrp.hom_count(G, n)
        rows.append((f"|Hom(G,Z{n})|", payload[f"hom_count_z{n}"]))
    payload["hom_z4_onto_hom_z2"] = abgrp.reduction_onto(G)
    rows.append(("Hom(G,Z4) -> Hom(G,Z2) onto", payload["hom_z4_onto_hom_z2"]))
    return Outcome(payload, _table(rows))


def cmd_ext(obj) -> Outcome:
    """Ext(G;Z2), and the induced map of a character when one is given."""
    obj = _need_dict(obj, "ext")
    if "coeffs" not in obj:
        payload, rows = _group_summary(_group_of(obj.get("group", obj)))
        return Outcome(payload, _table(rows))
    G = _group_of(obj["group"])
    nu = obj.get("target_exponent")
    if not isinstance(nu, int):
        raise InputError("target_exponent must be an integer")
    f = abgrp.Character(G, nu, tuple(obj["coeffs"]), tuple(obj.get("free_coeffs", ())))
    induced = abgrp.ext_induced_oracle(f)
    payload = {
        "group": G.to_json(), "character": f.to_json(),
        "source_dim": induced.source_dim,
        "image_of_generator": list(induced.image_of_generator),
        "lift_on_relations": list(induced.f2_row),
    }
    rows = [
        ("group", str(G)),
        ("character", f"{list(f.coeffs)} into Z/{f.modulus}"),
        ("dim Ext(Z/2^nu;Z2)", induced.source_dim),
        ("lift on relations", list(induced.f2_row)),
        ("Ext(f;Z2)(1)", list(induced.image_of_generator)),
    ]
    return Outcome(payload, _table(rows))


def cmd_character(obj) -> Outcome:
    obj = _need_dict(obj, "character")
    G = _group_of(obj.get("group", {}))
    w = _w2_of(obj, abgrp.ext_z2_dim(G))
    f = abgrp.lemma2_character(G, w)
    nu = abgrp.character_image_exponent(f)
    restricted = abgrp.restrict_to_image(f)
    cert = abgrp.ext_induced_oracle(f).image_of_generator
    payload = {
        "group": G.to_json(), "w": list(w.bits),
        "character": f.to_json(),
        "well_defined": f.is_well_defined(),
        "image_exponent": nu,
        "restricted": restricted.to_json(),
        "oracle_image": list(cert),
        "certified": cert == w.bits,
    }
    rows = [
        ("group", str(G)),
        ("w", list(w.bits)),
        ("character", f"{list(f.coeffs)} into Z/{f.modulus}"),
        ("well defined", f.is_well_defined()),
        ("image", f"Z/{2 ** nu} (nu = {nu})"),
        ("restricted", f"{list(restricted.coeffs)} onto Z/{restricted.modulus}"),
        ("oracle Ext(f;Z2)(1)", list(cert)),
        ("certified", cert == w.bits),
    ]
    return Outcome(payload, _table(rows), EXIT_OK if cert == w.bits else EXIT_FAIL)


def _replay_payload(rep: covers.Theorem3Replay) -> tuple[dict, list[str]]:
    payload = {
        "m": rep.m, "e": rep.e, "tau": rep.tau,
        "b1_z2": rep.b1_z2, "h2_z2": rep.h2_z2,
        "cover_tau": rep.cover_tau, "cover_b1_z2_bound": rep.cover_b1_z2_bound,
        "lines": [
            {"label": ln.label, "betti": ln.betti, "expression": ln.expression,
             "value": ln.value}
            for ln in rep.lines
        ],
        "furuta_lhs": rep.furuta_lhs, "furuta_rhs": rep.furuta_rhs,
        "scaled_bound": rep.scaled_bound, "final_bound": rep.final_bound,
        "chain_consistent": rep.chain_consistent,
        "holds": rep.holds,
    }
    w = max(len(ln.expression) for ln in rep.lines)
    text = [
        f"m = {rep.m}, e = {rep.e}, tau = {rep.tau}, "
        f"b1(X;Z2) = {rep.b1_z2}, b2(X;Z2) = {rep.h2_z2}",
        f"Lemma 4: b1(X~;Z2) <= {rep.cover_b1_z2_bound}",
    ]
    for ln in rep.lines:
        val = "?" if ln.value is None else ln.value
        rel = "=" if ln.label == "identity" else "<="
        text.append(f"  {ln.betti:<10} {rel} {ln.expression.ljust(w)}  [{ln.label}] {val}")
    text += [
        f"Furuta on X~: (5/4)|tau(X~)| = {fraction_json(rep.furuta_lhs)} "
        f"<= m*b2(X;Z2) - 2 = {rep.furuta_rhs}",
        f"divide by m: (5/4)|tau| <= {fraction_json(rep.scaled_bound)}",
        f"parity: (5/4)|tau| <= {rep.final_bound}  "
        f"{'holds' if rep.holds else 'FAILS: excluded by Theorem 3'}",
    ]
    return payload, text


def cmd_cover_plan(obj) -> Outcome:
    d = _valid_descriptor(obj, {"w2", "abelian_cover_even"})
    if not d.even:
        raise InputError("cover plan needs an even descriptor (Lemma 1)")
    t = abgrp.two_primary(d.h1).t
    w2 = _w2_of(obj, t)
    if d.spin and not w2.is_zero():
        raise InputError("spin descriptor must have w2 = 0")
    if not d.spin and w2.is_zero() and t:
        raise InputError("non-spin descriptor needs a nonzero w2")
    plan = covers.spin_cover_plan(d, w2)
    f = plan.character
    payload = {
        "degree": plan.degree, "nu": plan.nu, "already_spin": plan.already_spin,
        "character": f.to_json(),
        "certificate": list(plan.certificate),
        "tower": [
            {"level": s.level, "degree": s.degree,
             "subgroup_exponent": s.subgroup_exponent, "lemma3_applies": s.lemma3_applies}
            for s in plan.tower
        ],
        "exponent_bound": abgrp.two_primary(d.h1).exponent,
    }
    text = [_table([
        ("degree", plan.degree),
        ("already spin", plan.already_spin),
        ("character", f"{list(f.coeffs)} onto Z/{f.modulus}"),
        ("Ext(phi;Z2)(1)", list(plan.certificate)),
        ("2-primary exponent", payload["exponent_bound"]),
    ])]
    for s in plan.tower:
        text.append(f"  step {s.level}: double cover, subgroup Z/{2 ** s.subgroup_exponent}"
                    f"{', Lemma 3 applies' if s.lemma3_applies else ''}")
    code = EXIT_OK
    if d.tau != 0:
        rep = covers.replay_theorem3(d, w2)
        rp, rt = _replay_payload(rep)
        payload["replay"] = rp
        text += ["Theorem 3 replay:"] + rt
        code = EXIT_OK if rep.holds else EXIT_FAIL
    return Outcome(payload, "\n".join(text), code)


def cmd_form_classify(obj) -> Outcome:
    try:
        if isinstance(obj, list):
            f = forms.BilinearForm(intalg.parse_matrix(obj))
            rank, tau = f.rank, forms.signature(f)
            t = forms.classify_form(f)
        else:
            obj = _need_dict(obj, "form-classify")
            if "gram" in obj:
                return cmd_form_classify(obj["gram"])
            rank, tau = obj.get("rank"), obj.get("tau")
            if not isinstance(rank, int) or not isinstance(tau, int):
                raise InputError("need integer 'rank' and 'tau' (or a Gram matrix)")
            t = forms.classify_even_indefinite(rank, tau)
    except forms.DegenerateFormError as exc:
        raise InputError(str(exc))
    except forms.DefiniteFormError as exc:
        payload = {"classified": False, "reason": "definite", "message": str(exc)}
        return Outcome(payload, f"definite, excluded: {exc}", EXIT_FAIL)
    except forms.FormError as exc:
        if isinstance(exc, forms.NotEvenUnimodularError) or isinstance(
            exc, forms.InconsistentRankError
        ):
            payload = {"classified": False, "reason": "not_even_unimodular", "message": str(exc)}
            return Outcome(payload, f"excluded: {exc}", EXIT_FAIL)
        raise InputError(str(exc))
    payload = {
        "classified": True, "rank": t.rank, "tau": t.signature, "p": t.p, "q": t.q,
        "five_fourths": t.satisfies_five_fourths(),
    }
    rows = [("rank", t.rank), ("signature", t.signature),
            ("type", f"{t.p} E8 + {t.q} H"),
            ("|p| <= q", t.satisfies_five_fourths())]
    return Outcome(payload, _table(rows))


def cmd_form_build(obj) -> Outcome:
    obj = _need_dict(obj, "form-build")
    p, q = obj.get("p"), obj.get("q")
    if not isinstance(p, int) or not isinstance(q, int):
        raise InputError("need integer 'p' and 'q'")
    try:
        t = forms.EvenIndefiniteType(p, q)
    except forms.FormError as exc:
        raise InputError(str(exc))
    f = forms.build(t)
    payload = {
        "p": p, "q": q, "rank": f.rank, "signature": forms.signature(f),
        "det": intalg.det(f.gram), "even": forms.is_even(f), "gram": f.gram.to_rows(),
    }
    rows = [("rank", f.rank), ("signature", payload["signature"]),
            ("det", payload["det"]), ("even", payload["even"])]
    return Outcome(payload, _table(rows) + "\ngram =\n" + _matrix_text(f.gram))


def _verdict_line(v: manifold.CheckVerdict) -> str:
    status = "HOLDS" if v.holds else "FAILS"
    if v.conditional:
        status += " (conditional)"
    slack = fraction_json(v.slack)
    tail = f"  -- {v.note}" if v.note else ""
    return f"{v.name:<24} {status:<20} slack {str(slack):>6}  {v.statement}  [{v.citation}]{tail}"


def cmd_check(obj) -> Outcome:
    d = _valid_descriptor(obj, {"abelian_cover_even", "w2"})
    cover_even = bool(obj.get("abelian_cover_even", False))
    verdicts = [v for v in manifold.run_all_checks(d, cover_even) if v.applicable]
    failed = [v for v in verdicts if not v.holds and not v.conditional]
    dims = manifold.derive(d)
    payload = {
        "descriptor": d.to_json(),
        "derived": {"e": dims.e, "t": dims.t, "h2_z2": dims.h2_z2,
                    "b1_z2": dims.b1_z2, "b2_l2": dims.b2_l2},
        "verdicts": [v.to_json() for v in verdicts],
        "all_hold": not failed,
    }
    text = [f"e = {dims.e}, t = {dims.t}, dim H^2(X;Z2) = {dims.h2_z2}, "
            f"dim H^1(X;Z2) = {dims.b1_z2}"
            + ("" if dims.b2_l2 is None else f", b2_l2 = {fraction_json(dims.b2_l2)}")]
    text += [_verdict_line(v) for v in verdicts]
    if not verdicts:
        text.append("no applicable checks")
    return Outcome(payload, "\n".join(text), EXIT_FAIL if failed else EXIT_OK)


def cmd_replay(obj) -> Outcome:
    obj = _need_dict(obj, "replay")
    if "genus" in obj:
        g = obj["genus"]
        if not isinstance(g, int) or g < 1:
            raise InputError("genus must be an integer >= 1")
        rep = rinv.replay_prop15(g)
        payload = {
            "genus": g, "assumed_r": rep.assumed_r, "h": rep.h,
            "cover_value": rep.cover_value, "floor_h": rep.floor_h,
            "inequality_holds": rep.inequality_holds,
            "contradiction": rep.contradiction, "conclusion": rep.conclusion,
        }
        text = "\n".join([
            f"assume r(Gamma_{g}) = {rep.assumed_r}",
            f"double cover has genus h = {rep.h}",
            f"need {rep.cover_value} >= {rep.floor_h}: "
            f"{'true' if rep.inequality_holds else 'false, contradiction'}",
            f"so r(Gamma_{g}) = {rep.conclusion}",
        ])
        return Outcome(payload, text, EXIT_OK if rep.contradiction else EXIT_FAIL)
    d = _valid_descriptor(obj, {"w2", "abelian_cover_even"})
    if not d.even:
        raise InputError("Theorem 3 replay needs an even descriptor")
    if d.tau == 0:
        raise InputError("Theorem 3 replay needs non-zero signature")
    w2 = _w2_of(obj, abgrp.two_primary(d.h1).t)
    rep = covers.replay_theorem3(d, w2)
    payload, text = _replay_payload(rep)
    payload["agrees_with_checker"] = rep.holds == manifold.check_theorem3_even(d).holds
    return Outcome(payload, "\n".join(text), EXIT_OK if rep.holds else EXIT_FAIL)


def cmd_rbounds(obj) -> Outcome:
    obj = _need_dict(obj, "rbounds")
    wits = obj.get("witnesses", [])
    body = {k: v for k, v in obj.items() if k != "witnesses"}
    if "group" in body and "tag" not in body:
        body = body["group"]
    g = rinv.parse_group_descriptor(body)
    if not isinstance(wits, list):
        raise InputError("witnesses must be a list of descriptors")
    witnesses = tuple(_valid_descriptor(w) for w in wits)
    try:
        iv = rinv.r_bounds(g, witnesses)
    except rinv.InconsistentWitness as exc:
        return Outcome({"group": g.describe(), "error": str(exc)},
                       f"inconsistent witness: {exc}", EXIT_FAIL)
    except rinv.InconsistentBounds as exc:
        return Outcome({"group": g.describe(), "error": str(exc)},
                       f"inconsistent bounds: {exc}", EXIT_FAIL)
    payload = {"group": g.describe(), "interval": iv.to_json(), "exact": iv.exact}
    text = [f"r({g.describe()}) in {iv}"] + [f"  {why}" for why in iv.trail]
    return Outcome(payload, "\n".join(text))


def cmd_rtable(obj) -> Outcome:
    rows = rinv.prq_table()
    payload = {"rows": [{"group": r.group, "p": r.p, "q": r.q, "r": r.r} for r in rows]}
    cols = [("Gamma", "p", "q", "r")] + [(r.group, r.p, r.q, r.r) for r in rows]
    widths = [max(len(c[i]) for c in cols) for i in range(4)]
    text = "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(4)).rstrip() for c in cols)
    return Outcome(payload, text)


COMMANDS: dict[str, Callable[[Any], Outcome]] = {
    "snf": cmd_snf,
    "group": cmd_group,
    "ext": cmd_ext,
    "character": cmd_character,
    "cover-plan": cmd_cover_plan,
    "form-classify": cmd_form_classify,
    "form-build": cmd_form_build,
    "check": cmd_check,
    "replay": cmd_replay,
    "rbounds": cmd_rbounds,
    "rtable": cmd_rtable,
}


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def read_input(tokens: list[str], path: str | None, stdin=None) -> Any:
    if path is not None:
        if tokens:
            raise InputError("give either --input or inline arguments, not both")
        text = (stdin or sys.stdin).read() if path == "-" else open(path).read()
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON in {path}: {exc}")
    if not tokens:
        return {}
    if len(tokens) == 1 and "=" not in tokens[0].split("{")[0].split("[")[0]:
        try:
            return json.loads(tokens[0])
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON argument: {exc}")
    out = {}
    for tok in tokens:
        key, sep, raw = tok.partition("=")
        if not sep:
            raise InputError(f"expected key=value, got {tok!r}")
        out[key] = _parse_value(raw)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="evenfour", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("args", nargs="*", help="inline JSON or key=value pairs")
        p.add_argument("--input", metavar="FILE|-", help="read JSON input from a file or stdin")
        p.add_argument("--format", choices=("text", "json"), default="text")
        return p

    add("snf", "Smith normal form of an integer matrix")
    add("group", "canonical form of an abelian group (literal or relation matrix)")
    add("ext", "Ext(G;Z2) and induced maps of characters")
    add("character", "character G -> Z/2^mu hitting a given Ext class")
    add("cover-plan", "spin cover plan and Theorem 3 replay for a descriptor")
    cover = sub.add_parser("cover", help="alias group: 'cover plan' = 'cover-plan'")
    csub = cover.add_subparsers(dest="cover_command", required=True)
    cp = csub.add_parser("plan")
    cp.add_argument("args", nargs="*")
    cp.add_argument("--input", metavar="FILE|-")
    cp.add_argument("--format", choices=("text", "json"), default="text")
    add("form-classify", "pE8 + qH type from (rank, tau) or a Gram matrix")
    add("form-build", "Gram matrix of pE8 + qH")
    add("check", "run every applicable signature checker on a descriptor")
    add("replay", "replay Theorem 3 (descriptor + w2) or Prop 1(5) ({'genus': g})")
    add("rbounds", "interval bounds on r for a group descriptor")
    add("rtable", "the table of p, q, r values")
    return ap


def run(argv: list[str] | None = None, stdout=None, stderr=None, stdin=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    name = "cover-plan" if args.command == "cover" else args.command
    try:
        obj = read_input(args.args, args.input, stdin)
        out = COMMANDS[name](obj)
    except (InputError, ValueError, TypeError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=stderr)
        return EXIT_INVALID
    if args.format == "json":
        print(json.dumps(_jsonable(out.payload), indent=2), file=stdout)
    else:
        print(out.text, file=stdout)
    return out.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
