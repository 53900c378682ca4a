"""Batch command-line front end.

Subcommands map one-to-one onto the package's pipelines: expansion,
modularity checking, cusp orders, the identity suite, decomposition, the
j(4 tau) hauptmodul relation, class invariants, minimal polynomials, the
degree formula, and the tower sign flip.  All numeric output is decimal
strings so identical invocations produce byte-identical JSON.

Exit codes: 0 success, 1 any computation-reported failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .cyclotomic import QQ
from .decompose import (
    G04,
    decompose_form,
    decompose_weight0,
    j4_hauptmodul_relation,
    j_series,
    sturm_truncation,
)
from .elliptic import h_n_series, siegel_series, translate_factor
from .errors import EtaforgeError
from .etaq import (
    EtaQuotient,
    cusp_orders,
    eta_quotient_series,
    ligozat_check,
)
from .cm import ImagQuadOrder, class_invariant, integrality_check
from .qseries import QSeries
from .reciprocity import (
    class_number,
    conjugates_of_invariant,
    coset_reps,
    degree_formula,
    min_poly_from_orbit,
    verify_sign_flip,
)

DEFAULT_TRUNC = 200
DEFAULT_DIGITS = 300
DEFAULT_DEGREE_BOUND = 6


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters shared by the subcommands."""

    digits: int = DEFAULT_DIGITS
    trunc: int = DEFAULT_TRUNC
    degree_bound: int = DEFAULT_DEGREE_BOUND
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.digits < 50:
            raise ValueError("--digits must be at least 50")
        if self.trunc < 20:
            raise ValueError("--trunc must be at least 20")
        if self.format not in ("json", "text"):
            raise ValueError("format must be json or text")


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        digits=getattr(args, "digits", DEFAULT_DIGITS),
        trunc=getattr(args, "trunc", DEFAULT_TRUNC),
        degree_bound=getattr(args, "degree_bound", DEFAULT_DEGREE_BOUND),
        out=getattr(args, "out", None),
        format=getattr(args, "format", "json"),
    )


def _parse_exps(text: str) -> dict[int, int]:
    out = {}
    for part in text.split(","):
        d, _, m = part.partition(":")
        out[int(d)] = int(m)
    return out


def _quotient_from_args(args) -> EtaQuotient:
    if args.level is None or args.exps is None:
        raise EtaforgeError("both --level and --exps are required here")
    return EtaQuotient(args.level, _parse_exps(args.exps))


def _emit(args, payload) -> None:
    if args.format == "text":
        body = _render_text(payload) + "\n"
    else:
        body = json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _render_text(payload, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(payload, dict):
        lines = []
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(payload, list):
        return "\n".join(_render_text(v, indent) for v in payload) or f"{pad}[]"
    return f"{pad}{payload}"


def _cmd_expand(args) -> dict:
    quot = _quotient_from_args(args)
    series = eta_quotient_series(quot, args.trunc)
    return series.to_json_dict()


def _cmd_ligozat(args) -> dict:
    rep = ligozat_check(_quotient_from_args(args))
    return rep.to_json_dict()


def _cmd_cusp_orders(args) -> dict:
    orders = cusp_orders(_quotient_from_args(args))
    return {f"{a}/{c}": str(v) for (a, c), v in orders.items()}


def _identity_report(name: str, trunc, residual: QSeries) -> dict:
    lead = None
    if not residual.is_zero():
        lead = str(residual.leading_exponent())
    return {
        "identity": name,
        "trunc": str(trunc),
        "max_abs_residual_exponent": lead,
        "pass": residual.is_zero(),
    }


def _cmd_verify_identities(args) -> list:
    from .etaq import eta_series

    t = args.trunc
    reports = []

    g = siegel_series((QQ(1, 2), 0), t)
    eta_ratio = -(eta_series(QQ(1, 2), t + 2) ** 2) * (eta_series(1, t + 2) ** 2).inverse()
    reports.append(_identity_report("siegel_half_eta_ratio", t, (g - eta_ratio.truncated(t))))

    triple = (
        siegel_series((QQ(1, 2), 0), t)
        * siegel_series((QQ(1, 2), QQ(1, 2)), t)
        * siegel_series((0, QQ(1, 2)), t)
    )
    from .cyclotomic import CyclotomicNumber

    const = QSeries.from_terms({0: 2 * CyclotomicNumber.zeta(8)}, triple.trunc)
    reports.append(_identity_report("siegel_triple_constant", t, triple - const))

    # translation factors on a fixed spot-check set (the exhaustive grid
    # lives in the acceptance suite)
    t_small = min(t, 12)
    spots = [
        (QQ(1, 12), QQ(5, 12)),
        (QQ(1, 2), QQ(1, 3)),
        (QQ(7, 12), QQ(11, 12)),
        (QQ(1, 6), QQ(0)),
        (QQ(0), QQ(1, 6)),
    ]
    worst = QSeries.zero(t_small)
    for v in spots:
        base = siegel_series(v, t_small)
        for s1 in (-3, -1, 0, 2, 3):
            for s2 in (-2, 0, 1, 3):
                shifted = siegel_series((v[0] + s1, v[1] + s2), t_small)
                resid = shifted - base.scaled(translate_factor(v, (s1, s2)))
                if not resid.is_zero():
                    worst = resid
    reports.append(_identity_report("siegel_translation_spots", t_small, worst))

    for n in range(3, 9):
        resid = h_n_series(n, t, "definition") - h_n_series(n, t, "eta")
        reports.append(_identity_report(f"h_{n}_dual_route", t, resid))

    return reports


def _cmd_decompose(args) -> dict:
    if args.target:
        with open(args.target) as fh:
            target = QSeries.from_json_dict(json.load(fh))
    else:
        quot = _quotient_from_args(args)
        order = sturm_truncation(1 << args.tower, args.weight, args.degree_bound)
        target = eta_quotient_series(quot, order + args.weight // 2 + 2)
    if args.weight:
        combo = decompose_form(target, args.tower, args.weight, args.degree_bound)
    else:
        combo = decompose_weight0(target, args.tower, args.degree_bound)
    return combo.to_json_dict()


def _cmd_j4_relation(args) -> dict:
    rel = j4_hauptmodul_relation(args.degree_bound)
    g = eta_quotient_series(G04, 66)
    j4 = j_series(QQ(70, 4)).rescale(4).truncated(66)
    a, b = rel.evaluate_series(g)
    resid = a - j4 * b
    payload = rel.to_json_dict()
    payload["residual_order_checked"] = str(resid.trunc)
    payload["residual_zero"] = resid.is_zero()
    return payload


def _cmd_class_invariant(args) -> dict:
    order = ImagQuadOrder(args.disc, args.conductor)
    val = class_invariant(order, args.digits)
    return {
        "d_K": args.disc,
        "conductor": args.conductor,
        "value": val.to_json_dict(),
    }


def _cmd_min_poly(args) -> dict:
    order = ImagQuadOrder(args.disc, args.conductor)
    quot = EtaQuotient(args.conductor, {args.conductor: 8, args.conductor // 4: -8})
    orbit = conjugates_of_invariant(order, [(256, quot)], args.digits)
    poly = min_poly_from_orbit(orbit)
    payload = orbit.to_json_dict()
    payload.update(poly.to_json_dict())
    return payload


def _cmd_degree(args) -> dict:
    order = ImagQuadOrder(args.disc, args.conductor)
    deg = degree_formula(order)
    h = class_number(args.disc)
    reps = coset_reps(order) if args.conductor >= 2 else []
    return {
        "d_K": args.disc,
        "conductor": args.conductor,
        "degree": deg,
        "class_number": h,
        "coset_count": len(reps),
    }


def _cmd_verify_sign_flip(args) -> dict:
    order = ImagQuadOrder(args.disc, 1 << args.m)
    ok = verify_sign_flip(args.m, order, args.digits)
    return {"m": args.m, "d_K": args.disc, "pass": ok}


def _cmd_integrality(args) -> dict:
    order = ImagQuadOrder(args.disc, args.conductor)
    rep = integrality_check(args.M, order, args.digits)
    return rep.to_json_dict()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etaforge",
        description="exact eta-quotient computer algebra and class-invariant pipelines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, trunc=False, digits=False, quotient=False, bound=False):
        p.add_argument("--json", dest="format", action="store_const", const="json", default="json")
        p.add_argument("--text", dest="format", action="store_const", const="text")
        p.add_argument("--out", default=None, help="write output to a file instead of stdout")
        if trunc:
            p.add_argument("--trunc", type=int, default=DEFAULT_TRUNC)
        if digits:
            p.add_argument(
                "--digits",
                type=int,
                default=int(os.environ.get("ETAFORGE_DIGITS", DEFAULT_DIGITS)),
            )
        if quotient:
            p.add_argument("--level", type=int, default=None)
            p.add_argument("--exps", default=None, help="d:m[,d:m...] exponent map")
        if bound:
            p.add_argument("--degree-bound", dest="degree_bound", type=int, default=DEFAULT_DEGREE_BOUND)

    p = sub.add_parser("expand", help="q-expansion of an eta-quotient")
    common(p, trunc=True, quotient=True)
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("ligozat", help="modularity criterion report")
    common(p, quotient=True)
    p.set_defaults(func=_cmd_ligozat)

    p = sub.add_parser("cusp-orders", help="vanishing orders at all cusps")
    common(p, quotient=True)
    p.set_defaults(func=_cmd_cusp_orders)

    p = sub.add_parser("verify-identities", help="exact series identity suite")
    common(p, trunc=True, digits=True)
    p.set_defaults(func=_cmd_verify_identities)

    p = sub.add_parser("decompose", help="decompose a form into eta-quotients")
    common(p, quotient=True, bound=True)
    p.add_argument("--target", default=None, help="path to a QSeries JSON file")
    p.add_argument("--n", dest="tower", type=int, required=True, help="level exponent: level 2^n")
    p.add_argument("--weight", type=int, default=0)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("j4-relation", help="rational relation j(4t) = A(g)/B(g)")
    common(p, bound=True)
    p.set_defaults(func=_cmd_j4_relation)

    p = sub.add_parser("class-invariant", help="256 eta(N tau_K)^8/eta((N/4) tau_K)^8")
    common(p, digits=True)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--conductor", type=int, required=True)
    p.set_defaults(func=_cmd_class_invariant)

    p = sub.add_parser("min-poly", help="minimal polynomial of the class invariant")
    common(p, digits=True)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--conductor", type=int, required=True)
    p.set_defaults(func=_cmd_min_poly)

    p = sub.add_parser("degree", help="ring class field degree and orbit size")
    common(p)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--conductor", type=int, required=True)
    p.set_defaults(func=_cmd_degree)

    p = sub.add_parser("verify-sign-flip", help="h_m conjugate negation at tau_K")
    common(p, digits=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--disc", type=int, required=True)
    p.set_defaults(func=_cmd_verify_sign_flip)

    p = sub.add_parser("integrality", help="minimal polynomial of M eta(M t)^2/eta(t)^2")
    common(p, digits=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--conductor", type=int, default=None)
    p.set_defaults(func=_cmd_integrality)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return 2 if ex.code else 0
    if getattr(args, "conductor", -1) is None:
        args.conductor = args.M if hasattr(args, "M") else None
    try:
        _config_from_args(args)
    except ValueError as ex:
        sys.stderr.write(f"etaforge: usage: {ex}\n")
        return 2
    try:
        payload = args.func(args)
    except (EtaforgeError, ValueError, OverflowError, ZeroDivisionError) as ex:
        sys.stderr.write(f"etaforge: {type(ex).__name__}: {ex}\n")
        return 1
    _emit(args, payload)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
