"""Command line driver for the library.

Subcommands map one-to-one onto library entry points:

    refine       enumerate refinements of a filtered Frobenius module
    normal-form  normal form of a (phi, nabla)-module over E<<x>>
    uadj         section / invariants / analytic-test in the u-model
    sen          infinitesimal operator from a group-action matrix
    newton       Newton polygon of a series
    anticyclo    kernel of the anticyclotomic connection
    dtri         x-window lattice attached to a filtered module

Inputs are JSON files with a "schema" field; p-adic scalars are
{"digits": "...", "precision": k} objects (precision null = exact) and
series are lists of [exponent, scalar] pairs.  Exit codes: 0 success,
1 parse or configuration error, 2 precondition failure, 3 precision
exhaustion.
"""

import argparse
import json
import sys
from fractions import Fraction

from .bdr import BdRElement, sen_operator
from .cyclotomic import CycloElement
from .errors import ParseError, PreconditionError, PrecisionError
from .linalg import padic_poly_roots
from .padic import INF, PadicElement, padic
from .phimod import PhiModuleX, normal_form
from .refine import (
    FilteredPhiModule,
    dtri_lattice,
    enumerate_refinements,
    sen_polynomial,
)
from .series import TruncSeries, anticyclo_kernel, newton_polygon
from .uadj import (
    bdr_coefficient_ops,
    bdr_uadj_invariants,
    gamma_n_analytic_test,
    uadj_is_invariant,
    uadj_section,
)

SCHEMA_IN = "padicperiods/1"
SCHEMA_OUT = "padicperiods.report/1"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=5)
    common.add_argument("--precision", type=int, default=16)
    common.add_argument("--trunc-t", type=int, default=8, dest="trunc_t")
    common.add_argument("--trunc-x", type=int, default=8, dest="trunc_x")
    common.add_argument("--trunc-u", type=int, default=8, dest="trunc_u")
    common.add_argument("--level", type=int, default=1)
    common.add_argument("--input")
    common.add_argument("--output")
    common.add_argument("--format", choices=("text", "json"), default="text")
    parser = _Parser(prog="padicperiods")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("refine", parents=[common])
    sub.add_parser("normal-form", parents=[common])
    up = sub.add_parser("uadj", parents=[common])
    up.add_argument("mode", choices=("section", "invariants", "analytic-test"))
    sub.add_parser("sen", parents=[common])
    sub.add_parser("newton", parents=[common])
    ap = sub.add_parser("anticyclo", parents=[common])
    ap.add_argument("degree", type=int)
    sub.add_parser("dtri", parents=[common])
    return parser


def _is_prime(n):
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _check_config(args):
    if not _is_prime(args.prime):
        raise ParseError(f"--prime {args.prime} is not prime")
    if args.precision < 1:
        raise ParseError("--precision must be at least 1")
    for name in ("trunc_t", "trunc_x", "trunc_u"):
        if getattr(args, name) < 1:
            raise ParseError(f"--{name.replace('_', '-')} must be at least 1")
    if args.level < 1:
        raise ParseError("--level must be at least 1")


# -- input parsing ----------------------------------------------------------


def _load_payload(args):
    if not args.input:
        raise ParseError(f"'{args.command}' requires --input FILE")
    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read input: {e}")
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise ParseError(f"input is not valid JSON: {e}")
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_IN:
        raise ParseError(f'input must carry "schema": "{SCHEMA_IN}"')
    return doc


def _field(doc, key):
    if key not in doc:
        raise ParseError(f"input is missing the '{key}' field")
    return doc[key]


def _parse_scalar(obj, p, prec):
    if isinstance(obj, bool):
        raise ParseError(f"not a scalar: {obj!r}")
    if isinstance(obj, int):
        return padic(p, obj, prec)
    if isinstance(obj, dict):
        try:
            digits = Fraction(str(obj["digits"]))
        except (KeyError, ValueError, ZeroDivisionError):
            raise ParseError(f"bad scalar object: {obj!r}")
        pr = obj.get("precision", prec)
        if pr is not None and (not isinstance(pr, int) or pr < 1):
            raise ParseError(f"bad precision in scalar: {obj!r}")
        return padic(p, digits, pr)
    raise ParseError(f"not a scalar: {obj!r}")


def _parse_matrix(obj, p, prec):
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix must be a nonempty list of rows")
    out = []
    for row in obj:
        if not isinstance(row, list) or len(row) != len(obj):
            raise ParseError("matrix must be square")
        out.append([_parse_scalar(v, p, prec) for v in row])
    return out


def _parse_series(obj, var, N, p, prec):
    if not isinstance(obj, list):
        raise ParseError("series must be a list of [exponent, scalar] pairs")
    coeffs = {}
    for item in obj:
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"bad series term: {item!r}")
        e, c = item
        if not isinstance(e, int) or e < 0:
            raise ParseError(f"bad series exponent: {e!r}")
        coeffs[e] = _parse_scalar(c, p, prec)
    return TruncSeries(var, N, coeffs)


def _parse_series_matrix(obj, var, N, p, prec):
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix must be a nonempty list of rows")
    out = []
    for row in obj:
        if not isinstance(row, list) or len(row) != len(obj):
            raise ParseError("matrix must be square")
        out.append([_parse_series(v, var, N, p, prec) for v in row])
    return out


# -- output rendering -------------------------------------------------------


def _scalar_json(a):
    if isinstance(a, PadicElement):
        num = a.coeffs[0]
        if a.prec is not None:
            # balanced lift: small negatives print as negatives
            m = a.p ** (a.prec + a.den)
            num %= m
            if num > m // 2:
                num -= m
        return {"digits": str(Fraction(num, a.p**a.den)), "precision": a.prec}
    return {"digits": str(a), "precision": None}


def _series_json(f):
    return [[e, _scalar_json(f.coeffs[e])] for e in sorted(f.coeffs)]


def _matrix_json(rows, fn):
    return [[fn(v) for v in row] for row in rows]


def _bdr_json(x):
    out = []
    for c in x.coeffs:
        if isinstance(c, CycloElement):
            out.append({"components": [_scalar_json(a) for a in c.coeffs]})
        else:
            out.append(_scalar_json(c))
    return out


def _scan_min_prec(node):
    found = []

    def walk(v):
        if isinstance(v, dict):
            pr = v.get("precision")
            if isinstance(pr, int):
                found.append(pr)
            for inner in v.values():
                walk(inner)
        elif isinstance(v, list):
            for inner in v:
                walk(inner)

    walk(node)
    return min(found) if found else None


def _emit(args, lines, data, notes):
    minp = _scan_min_prec(data)
    if minp is None:
        footer = ["precision: all reported values are exact"]
    else:
        footer = [
            f"precision: minimum absolute precision in output is {minp} "
            f"digits (working precision {args.precision})"
        ]
    footer.extend(f"precision: {n}" for n in notes)
    if args.format == "json":
        doc = {
            "schema": SCHEMA_OUT,
            "command": args.command,
            "result": data,
            "precision": {"min_output": minp, "notes": list(notes)},
        }
        text = json.dumps(doc, indent=2)
    else:
        text = "\n".join(lines + [""] + footer)
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text + "\n")
        except OSError as e:
            raise ParseError(f"cannot write output: {e}")
    else:
        print(text)


# -- commands ---------------------------------------------------------------


def _filtered_module_from(args, doc):
    p, prec = args.prime, args.precision
    phi = _parse_matrix(_field(doc, "phi"), p, prec)
    weights = _field(doc, "weights")
    if not isinstance(weights, list) or not all(
        isinstance(s, int) for s in weights
    ):
        raise ParseError("'weights' must be a list of integers")
    basis = doc.get("basis")
    if basis is not None:
        basis = [
            [_parse_scalar(v, p, prec) for v in col] for col in basis
        ]
    return FilteredPhiModule(p, phi, weights, basis=basis, prec=prec)


def cmd_refine(args):
    doc = _load_payload(args)
    D = _filtered_module_from(args, doc)
    refs = enumerate_refinements(D)
    sen = sen_polynomial(refs[0].deltas)
    lines = [f"refinements: {len(refs)}"]
    data_refs = []
    for i, ref in enumerate(refs, start=1):
        phis = ", ".join(repr(v) for v in ref.phis)
        deltas = ", ".join(repr(v) for v, _s in ref.deltas)
        lines.append(f"[{i}] eigenvalue order: {phis}")
        lines.append(f"[{i}] weight order:     {list(ref.ss)}")
        lines.append(f"[{i}] delta_i(p):       {deltas}")
        data_refs.append(
            {
                "phis": [_scalar_json(v) for v in ref.phis],
                "weights": list(ref.ss),
                "delta_p": [_scalar_json(v) for v, _s in ref.deltas],
            }
        )
    lines.append(f"sen polynomial (constant first): {sen}")
    data = {"refinements": data_refs, "sen_polynomial": sen}
    return lines, data, []


def cmd_normal_form(args):
    doc = _load_payload(args)
    p, prec, N = args.prime, args.precision, args.trunc_x
    F = _parse_series_matrix(_field(doc, "phi"), "x", N, p, prec)
    G = doc.get("nabla")
    if G is not None:
        G = _parse_series_matrix(G, "x", N, p, prec)
    M = PhiModuleX(p, F, G)
    nf = normal_form(M, prec=prec)
    lines = ["eigenvalues: " + ", ".join(repr(v) for v in nf.eigenvalues)]
    if nf.resonances:
        for k, r, c in nf.resonances:
            lines.append(f"resonance at degree {k}, entry ({r}, {c})")
    else:
        lines.append("resonances: none")
    lines.append("base change B:")
    for row in nf.B:
        lines.append("  [" + ", ".join(repr(v) for v in row) + "]")
    for k in sorted(nf.N):
        lines.append(f"N_{k}:")
        for row in nf.N[k]:
            lines.append("  [" + ", ".join(repr(v) for v in row) + "]")
    lines.append("conjugation verified: residual 0 at truncation")
    data = {
        "eigenvalues": [_scalar_json(v) for v in nf.eigenvalues],
        "resonances": [list(t) for t in nf.resonances],
        "B": _matrix_json(nf.B, _series_json),
        "N": {
            str(k): _matrix_json(
                nf.N[k],
                lambda v: _scalar_json(v) if not isinstance(v, int) else v,
            )
            for k in sorted(nf.N)
        },
        "verified": True,
    }
    return lines, data, []


def cmd_uadj(args):
    p, n = args.prime, args.level
    Nt, Mu = args.trunc_t, args.trunc_u
    ops = bdr_coefficient_ops(p, n, Nt)
    if args.mode == "section":
        doc = _load_payload(args)
        raw = _field(doc, "element")
        if not isinstance(raw, list):
            raise ParseError("'element' must be a list of scalars")
        coeffs = [_parse_scalar(c, p, args.precision) for c in raw]
        z0 = BdRElement(p, n, Nt, coeffs)
        z = uadj_section(z0, ops, n, Mu)
        lines = [f"section of the given element, truncated at u^{Mu}:"]
        for k, a in enumerate(z.coeffs):
            lines.append(f"  u^{k}: {a!r}")
        data = {"section": [[k, _bdr_json(a)] for k, a in enumerate(z.coeffs)]}
        return lines, data, []
    if args.mode == "invariants":
        basis = bdr_uadj_invariants(p, n, Nt, n, Mu, prec=args.precision)
        sample = [1 + p**n, 1 + 2 * p**n]
        for z in basis:
            if not uadj_is_invariant(z, sample):
                raise PrecisionError(
                    "an invariant basis element failed the invariance check"
                )
        lines = [
            f"invariant basis size: {len(basis)} (= min(N_t, M_u+1) "
            f"= min({Nt}, {Mu + 1}))",
            f"invariance verified on character values {sample}",
        ]
        data = {
            "dimension": len(basis),
            "basis": [
                [[k, _bdr_json(a)] for k, a in enumerate(z.coeffs)]
                for z in basis
            ],
        }
        return lines, data, []
    # analytic-test
    doc = _load_payload(args)
    raw = _field(doc, "element")
    if not isinstance(raw, list):
        raise ParseError("'element' must be a list of scalars")
    coeffs = [_parse_scalar(c, p, args.precision) for c in raw]
    z0 = BdRElement(p, n, Nt, coeffs)
    ok, table = gamma_n_analytic_test(z0, ops, n, Mu)
    shown = ["inf" if v is INF else str(v) for v in table]
    lines = [
        f"analytic at level {n}: {'pass' if ok else 'fail'}",
        "section coefficient valuations: " + ", ".join(shown),
    ]
    data = {"pass": ok, "valuations": shown}
    return lines, data, []


def cmd_sen(args):
    doc = _load_payload(args)
    p, prec = args.prime, args.precision
    M = _parse_matrix(_field(doc, "matrix"), p, prec)
    c = _parse_scalar(_field(doc, "c"), p, prec)
    sd = sen_operator(M, c)
    roots, missing = padic_poly_roots(sd.charpoly)
    lines = ["operator matrix:"]
    for row in sd.theta:
        lines.append("  [" + ", ".join(repr(v) for v in row) + "]")
    lines.append("weights: " + ", ".join(repr(r) for r in roots))
    if missing:
        lines.append(f"({missing} weight(s) lie outside the base field)")
    k = sd.trunc_len
    loss = 0
    q = p
    while q <= k:
        loss += k // q
        q *= p
    notes = [
        f"matrix log summed {k} terms; loss bounded by v_p({k}!) = {loss}"
    ]
    data = {
        "theta": _matrix_json(sd.theta, _scalar_json),
        "charpoly": [_scalar_json(v) for v in sd.charpoly],
        "weights": [_scalar_json(r) for r in roots],
        "missing": missing,
    }
    return lines, data, notes


def cmd_newton(args):
    doc = _load_payload(args)
    p, prec = args.prime, args.precision
    raw = _field(doc, "series")
    if not isinstance(raw, list) or not raw:
        raise ParseError("'series' must be a nonempty list of terms")
    N = max(
        (t[0] for t in raw if isinstance(t, list) and t and isinstance(t[0], int)),
        default=0,
    )
    f = _parse_series(raw, "x", max(N, 1), p, prec)
    np = newton_polygon(f)
    lines = [f"order of vanishing at x = 0: {np.x_valuation}"]
    if np.slopes:
        for s, length in np.slopes:
            lines.append(f"slope {s} over horizontal length {length}")
    else:
        lines.append("no finite slopes (single vertex)")
    data = {
        "x_valuation": np.x_valuation,
        "slopes": [[str(s), length] for s, length in np.slopes],
    }
    return lines, data, []


def cmd_anticyclo(args):
    basis = anticyclo_kernel(args.degree)
    rendered = []
    for f in basis:
        terms = []
        for (i, j), c in sorted(f.coeffs.items()):
            mono = "1" if i == j == 0 else f"T1^{i}*T2^{j}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
        rendered.append(" + ".join(terms))
    lines = [
        f"kernel dimension at total degree <= {args.degree}: {len(basis)}",
        "kernel basis: {" + ", ".join(rendered) + "}",
    ]
    data = {
        "dimension": len(basis),
        "basis": [
            [[list(e), str(c)] for e, c in sorted(f.coeffs.items())]
            for f in basis
        ],
    }
    return lines, data, []


def cmd_dtri(args):
    doc = _load_payload(args)
    D = _filtered_module_from(args, doc)
    window = _field(doc, "window")
    if (
        not isinstance(window, list)
        or len(window) != 2
        or not all(isinstance(v, int) for v in window)
    ):
        raise ParseError("'window' must be [lo, hi] with integer bounds")
    L = dtri_lattice(D, tuple(window))
    lines = [f"x-exponent window: [{window[0]}, {window[1]}]", "generators:"]
    for e, v in L.gens:
        vec = ", ".join(repr(a) for a in v)
        lines.append(f"  x^{e} * ({vec})")
    data = {
        "window": list(window),
        "generators": [
            {"exponent": e, "vector": [_scalar_json(a) for a in v]}
            for e, v in L.gens
        ],
    }
    return lines, data, []


_DISPATCH = {
    "refine": cmd_refine,
    "normal-form": cmd_normal_form,
    "uadj": cmd_uadj,
    "sen": cmd_sen,
    "newton": cmd_newton,
    "anticyclo": cmd_anticyclo,
    "dtri": cmd_dtri,
}


def main(argv=None):
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        if args.command is None:
            raise ParseError("a subcommand is required (see --help)")
        _check_config(args)
        lines, data, notes = _DISPATCH[args.command](args)
        _emit(args, lines, data, notes)
        return 0
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except PreconditionError as e:
        print(f"precondition failed: {e}", file=sys.stderr)
        return 2
    except PrecisionError as e:
        print(f"precision exhausted: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
