"""``nclab`` command line: verify, construct and export triples.

Exit codes: 0 pass, 1 condition failure, 2 structural, parse or usage error.
The tolerance is taken from ``--tol``, else the document, else
``NCLAB_TOL``, else the library default. ``-`` means stdin / stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import catalog as cat
from . import constructions as con
from .checks import verify
from .io import DocumentError, decode_matrix, dumps_report, load_document, save_triple
from .operator_core import DEFAULT_TAU, OperatorError, SpectrumError
from .triple import StructuralError

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
MODES = ("auto", "classical", "nu", "rho", "general")


def _env_tol():
    raw = os.environ.get("NCLAB_TOL")
    if raw is None or raw == "":
        return None
    try:
        tau = float(raw)
    except ValueError:
        raise StructuralError(f"NCLAB_TOL is not a number: {raw!r}") from None
    if not tau > 0:
        raise StructuralError(f"NCLAB_TOL must be positive, got {raw!r}")
    return tau


def resolve_tol(cli_tol=None, doc_tol=None):
    for tau in (cli_tol, doc_tol, _env_tol()):
        if tau is not None:
            return float(tau)
    return DEFAULT_TAU


def report_exit_code(report):
    if not report.structural_ok:
        return EXIT_ERROR
    return EXIT_PASS if report.overall else EXIT_FAIL


def _emit_report(report, fmt, stream):
    stream.write(dumps_report(report) if fmt == "json" else report.to_text() + "\n")


def _load(path):
    return load_document(path, check=True)


def _load_matrix(path, dim):
    with (sys.stdin if path == "-" else open(path, encoding="utf-8")) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    if isinstance(doc, dict):
        if "matrix" not in doc:
            raise DocumentError("$.matrix", "missing field")
        return decode_matrix(doc["matrix"], "$.matrix", dim)
    return decode_matrix(doc, "$", dim)


def _signs(text):
    try:
        a, b = (int(v) for v in text.split(","))
        return con.TensorSignData(a, b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'alpha,beta' with entries +-1, got {text!r}") from None


def _permutation(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated block indices, got {text!r}") from None


# -- verbs ---------------------------------------------------------------------

def cmd_verify(args):
    doc = load_document(args.path, check=False)
    tau = resolve_tol(args.tol, doc.tolerance)
    report = verify(doc.triple, tau, args.mode)
    _emit_report(report, args.format, sys.stdout)
    return report_exit_code(report)


def _factor(args, t):
    if args.u_index is not None:
        return args.u_index
    return con.positive_element(t, args.u_seed)


def _finish(args, t, tau, mode="auto"):
    """Write the constructed triple and report on it."""
    save_triple(t, args.output)
    report = verify(t, tau, mode)
    _emit_report(report, args.format, sys.stderr if args.output == "-" else sys.stdout)
    return report_exit_code(report)


def cmd_construct(args):
    verb = args.verb
    inputs = args.inputs
    need = 2 if verb in ("tensor", "equiv-check") else 1
    if len(inputs) != need:
        raise StructuralError(f"{verb} takes {need} input file(s), got {len(inputs)}")
    docs = [_load(p) for p in inputs]
    t = docs[0].triple
    tau = resolve_tol(args.tol, docs[0].tolerance)

    if verb == "conformal-nu":
        return _finish(args, con.conformal_nu_twist(t, _factor(args, t), tau), tau, "nu")
    if verb == "conformal-rho":
        return _finish(args, con.conformal_rho_twist(t, _factor(args, t), tau), tau, "rho")
    if verb == "conformal-commutant":
        return _finish(args, con.conformal_commutant_twist(t, _factor(args, t), tau), tau, "general")
    if verb == "untwist":
        nu = np.eye(t.dim) if args.nu_file is None else _load_matrix(args.nu_file, t.dim)
        return _finish(args, con.untwist(t, nu, args.case, tau), tau, "nu")
    if verb == "tensor":
        out = con.tensor_product(t, docs[1].triple, args.signs1, args.signs2, tau)
        return _finish(args, out, tau, "nu")
    if verb == "double":
        return _finish(args, con.double(t, args.placement, tau), tau)
    if verb == "minimal-twist":
        return _finish(args, con.minimal_twist(t, tau), tau, "rho")
    if verb == "minimal-untwist":
        untwisted, diagonal = con.minimal_untwist(t, tau)
        if args.diagonal_out is not None:
            save_triple(diagonal, args.diagonal_out)
        return _finish(args, untwisted, tau, "nu")
    if verb == "classify":
        result = con.classify_type(t, tau)
        if args.format == "json":
            sys.stdout.write(json.dumps({
                "row": result.row,
                "verdicts": {k: "pass" if v else "fail" for k, v in result.verdicts.items()},
                "reports": {k: r.to_dict() for k, r in result.reports.items()},
            }, indent=2) + "\n")
        else:
            for row, ok in result.verdicts.items():
                print(f"{row:36s} {'pass' if ok else 'fail'}")
            print(f"row: {result.row}")
        return EXIT_PASS if result.classified or result.row == "classical" else EXIT_FAIL
    if verb == "equiv-check":
        t2 = docs[1].triple
        if args.w_file is not None:
            W = _load_matrix(args.w_file, t.dim)
        elif args.permutation is not None:
            W = con.block_permutation_unitary(args.permutation, t.dim)
        else:
            W = np.eye(t.dim)
        report = con.unitary_equivalence_check(t, t2, W, tau, args.compare_twist)
        _emit_report(report, args.format, sys.stdout)
        return report_exit_code(report)
    raise StructuralError(f"unknown verb {verb!r}")


def cmd_catalog(args):
    names = cat.catalog_names()
    if args.list:
        for e in cat.list_catalog():
            print(f"{e.name:28s} {e.provenance}")
        return EXIT_PASS
    if args.name is None:
        raise StructuralError("catalog needs a NAME or --list")
    try:
        entry = cat.catalog_entry(args.name, args.seed)
    except KeyError:
        sys.stderr.write(f"error: unknown catalog entry {args.name!r}; available: "
                         f"{', '.join(names)}, matrix-even-n<k>\n")
        return EXIT_ERROR
    save_triple(entry.triple, args.output)
    return EXIT_PASS


# -- parser --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="nclab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="verify a triple document")
    v.add_argument("path")
    v.add_argument("--mode", choices=MODES, default="auto")
    v.add_argument("--tol", type=float)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("construct", help="run a construction on triple documents")
    c.add_argument("verb", choices=("conformal-nu", "conformal-rho", "conformal-commutant",
                                    "untwist", "tensor", "double", "minimal-twist",
                                    "minimal-untwist", "classify", "equiv-check"))
    c.add_argument("inputs", nargs="+")
    c.add_argument("-o", "--output", default="-")
    c.add_argument("--tol", type=float)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--u-index", type=int, help="span index of the conformal factor")
    c.add_argument("--u-seed", type=int, default=0, help="seed for a positive conformal factor")
    c.add_argument("--nu-file", help="JSON matrix for untwist (default: identity)")
    c.add_argument("--case", choices=("implemented_automorphism", "unitary"),
                   default="implemented_automorphism")
    c.add_argument("--signs1", type=_signs, default=con.TensorSignData(1, 1), help="alpha,beta")
    c.add_argument("--signs2", type=_signs, default=con.TensorSignData(1, 1), help="alpha,beta")
    c.add_argument("--placement", choices=("diagonal", "off_diagonal"), default="diagonal")
    c.add_argument("--diagonal-out", help="minimal-untwist: also write the diagonal picture")
    c.add_argument("--permutation", type=_permutation, help="1-based block order, e.g. 1,4,3,2")
    c.add_argument("--w-file", help="JSON unitary for equiv-check")
    c.add_argument("--compare-twist", choices=("nu", "nu_squared"), default="nu")
    c.set_defaults(func=cmd_construct)

    k = sub.add_parser("catalog", help="export a built-in triple")
    k.add_argument("name", nargs="?")
    k.add_argument("--list", action="store_true")
    k.add_argument("--seed", type=int)
    k.add_argument("-o", "--output", default="-")
    k.set_defaults(func=cmd_catalog)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DocumentError, StructuralError, OperatorError, SpectrumError,
            con.ResolventError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"error: {exc.filename or ''}: {exc.strerror}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
