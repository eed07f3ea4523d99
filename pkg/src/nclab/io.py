"""The ``nclab-triple/1`` JSON document format.

A document holds exactly one triple::

    {
      "format": "nclab-triple/1",
      "name": "two-point",
      "dimension": 2,
      "algebra": {"names": [...], "elements": [M, ...],
                  "star": [j, ...] | null,
                  "products": [[i, j, [c, ...]], ...] | null},
      "D": M,
      "self_adjoint": true,
      "gamma": M | null,
      "J": {"unitary_part": M, "epsilon": 1},
      "signs": {"eps": 1, "eps_prime": 1, "eps_dprime": 1 | null},
      "twist": null | {"flavor": "...", "nu": M | null,
                       "rho": null | {"kind": "implemented", "witness": M}
                                   | {"kind": "coordinate", "matrix": M}},
      "tolerance": null | number,
      "meta": {...}
    }

A matrix ``M`` is a row-major list of rows, each a list of ``[re, im]``
pairs; scalars ``c`` are ``[re, im]`` pairs too. Floats are written in the
shortest representation that reads back to the same double, so
``save(load(save(t)))`` is byte-identical to ``save(t)``.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .checks import structural_checks
from .operator_core import AntilinearOp, OperatorError
from .triple import (
    AlgebraPresentation,
    Automorphism,
    FiniteSpectralTriple,
    KOSigns,
    StructuralError,
    TwistSpec,
)

FORMAT = "nclab-triple/1"


class DocumentError(ValueError):
    """A triple document failed to parse; ``location`` names the field."""

    def __init__(self, location, message):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


@dataclass(frozen=True, eq=False)
class TripleDocument:
    triple: FiniteSpectralTriple
    tolerance: Optional[float] = None


# -- encoding ------------------------------------------------------------------

def _num(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(M):
    M = np.asarray(M, dtype=np.complex128)
    return [[_num(z) for z in row] for row in M]


def encode_vector(v):
    return [_num(z) for z in np.asarray(v, dtype=np.complex128).ravel()]


def _encode_meta(meta):
    out = {}
    for k in sorted(meta):
        v = meta[k]
        if isinstance(v, np.ndarray):
            out[k] = {"matrix": encode_matrix(v)}
        elif isinstance(v, (bool, int, float, str)) or v is None:
            out[k] = v
        else:
            out[k] = str(v)
    return out


def triple_to_dict(t, tolerance=None):
    alg = t.algebra
    products = None
    if alg.products:
        products = [[int(i), int(j), encode_vector(alg.products[(i, j)])]
                    for (i, j) in sorted(alg.products)]
    twist = None
    if t.twist is not None:
        rho = None
        if t.rho is not None:
            if t.rho.kind == "implemented":
                rho = {"kind": "implemented", "witness": encode_matrix(t.rho.witness)}
            else:
                rho = {"kind": "coordinate", "matrix": encode_matrix(t.rho.matrix)}
        twist = {"flavor": t.twist.flavor,
                 "nu": None if t.nu is None else encode_matrix(t.nu),
                 "rho": rho}
    return {
        "format": FORMAT,
        "name": t.name,
        "dimension": t.dim,
        "algebra": {
            "names": list(alg.names),
            "elements": [encode_matrix(x) for x in alg.elements],
            "star": None if alg.star is None else list(alg.star),
            "products": products,
        },
        "D": encode_matrix(t.D),
        "self_adjoint": bool(t.self_adjoint),
        "gamma": None if t.gamma is None else encode_matrix(t.gamma),
        "J": {"unitary_part": encode_matrix(t.J.U), "epsilon": int(t.J.epsilon)},
        "signs": {"eps": t.signs.eps, "eps_prime": t.signs.eps_prime,
                  "eps_dprime": t.signs.eps_dprime},
        "twist": twist,
        "tolerance": None if tolerance is None else float(tolerance),
        "meta": _encode_meta(t.meta),
    }


def _depth(x):
    if isinstance(x, list):
        return 1 + max((_depth(y) for y in x), default=0)
    return 0


def _emit(obj, indent, out):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for n, (k, v) in enumerate(items):
            out.append(f"{pad}  {json.dumps(k)}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list) and obj and (
            all(isinstance(y, dict) for y in obj)
            or (_depth(obj) > 2 and all(isinstance(y, list) for y in obj))):
        # one matrix row (or product entry) per line
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(pad + "]")
    else:
        out.append(json.dumps(obj, allow_nan=False))


def dumps_triple(t, tolerance=None):
    """Serialize ``t`` to the document text (deterministic, newline-terminated)."""
    out = []
    _emit(triple_to_dict(t, tolerance), 0, out)
    return "".join(out) + "\n"


def save_triple(t, path, tolerance=None):
    """Write ``t`` to ``path``; ``"-"`` means standard output."""
    text = dumps_triple(t, tolerance)
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- decoding ------------------------------------------------------------------

def _require(doc, key, loc):
    if not isinstance(doc, dict):
        raise DocumentError(loc, "expected an object")
    if key not in doc:
        raise DocumentError(f"{loc}.{key}", "missing field")
    return doc[key]


def _scalar(x, loc):
    if (not isinstance(x, list) or len(x) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)):
        raise DocumentError(loc, "expected a [re, im] pair of numbers")
    return complex(float(x[0]), float(x[1]))


def decode_matrix(x, loc, dim=None):
    if not isinstance(x, list) or not x:
        raise DocumentError(loc, "expected a non-empty list of rows")
    n = len(x)
    if dim is not None and n != dim:
        raise DocumentError(loc, f"expected {dim} rows, got {n}")
    M = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(x):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"{loc}[{i}]", f"expected a row of {n} entries")
        for j, z in enumerate(row):
            M[i, j] = _scalar(z, f"{loc}[{i}][{j}]")
    if not np.all(np.isfinite(M)):
        raise DocumentError(loc, "non-finite entry")
    return M


def _sign(x, loc, allow_none=False):
    if x is None and allow_none:
        return None
    if x not in (1, -1) or isinstance(x, bool):
        raise DocumentError(loc, "expected +1 or -1" + (" or null" if allow_none else ""))
    return int(x)


def _decode_algebra(a, dim):
    loc = "$.algebra"
    elements = _require(a, "elements", loc)
    if not isinstance(elements, list) or not elements:
        raise DocumentError(f"{loc}.elements", "expected a non-empty list of matrices")
    els = tuple(decode_matrix(x, f"{loc}.elements[{k}]", dim) for k, x in enumerate(elements))
    names = a.get("names") or ()
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise DocumentError(f"{loc}.names", "expected a list of strings")
    if names and len(names) != len(els):
        raise DocumentError(f"{loc}.names", f"expected {len(els)} names, got {len(names)}")
    star = a.get("star")
    if star is not None:
        if (not isinstance(star, list) or len(star) != len(els)
                or not all(isinstance(s, int) and 0 <= s < len(els) for s in star)):
            raise DocumentError(f"{loc}.star", f"expected {len(els)} indices in range")
    products = a.get("products")
    prod = None
    if products is not None:
        if not isinstance(products, list):
            raise DocumentError(f"{loc}.products", "expected a list of [i, j, coords]")
        prod = {}
        for k, entry in enumerate(products):
            ploc = f"{loc}.products[{k}]"
            if not isinstance(entry, list) or len(entry) != 3:
                raise DocumentError(ploc, "expected [i, j, coords]")
            i, j, c = entry
            if not all(isinstance(v, int) and 0 <= v < len(els) for v in (i, j)):
                raise DocumentError(ploc, "index out of range")
            if not isinstance(c, list) or len(c) != len(els):
                raise DocumentError(f"{ploc}[2]", f"expected {len(els)} coordinates")
            prod[(i, j)] = np.array([_scalar(z, f"{ploc}[2][{m}]") for m, z in enumerate(c)])
    try:
        return AlgebraPresentation(els, tuple(names), None if star is None else tuple(star), prod)
    except (StructuralError, OperatorError) as exc:
        raise DocumentError(loc, str(exc)) from exc


def _decode_twist(tw, dim):
    loc = "$.twist"
    if tw is None:
        return None
    flavor = _require(tw, "flavor", loc)
    nu = tw.get("nu")
    nu = None if nu is None else decode_matrix(nu, f"{loc}.nu", dim)
    rho = tw.get("rho")
    if rho is not None:
        kind = _require(rho, "kind", f"{loc}.rho")
        try:
            if kind == "implemented":
                rho = Automorphism.implemented(decode_matrix(_require(rho, "witness", f"{loc}.rho"),
                                                             f"{loc}.rho.witness", dim))
            elif kind == "coordinate":
                rho = Automorphism.coordinate(decode_matrix(_require(rho, "matrix", f"{loc}.rho"),
                                                            f"{loc}.rho.matrix"))
            else:
                raise DocumentError(f"{loc}.rho.kind", f"unknown kind {kind!r}")
        except StructuralError as exc:
            raise DocumentError(f"{loc}.rho", str(exc)) from exc
    try:
        return TwistSpec(flavor, nu, rho)
    except StructuralError as exc:
        raise DocumentError(loc, str(exc)) from exc


def _decode_meta(meta):
    if meta is None:
        return {}
    if not isinstance(meta, dict):
        raise DocumentError("$.meta", "expected an object")
    out = {}
    for k, v in meta.items():
        if isinstance(v, dict) and set(v) == {"matrix"}:
            out[k] = decode_matrix(v["matrix"], f"$.meta.{k}.matrix")
        else:
            out[k] = v
    return out


# structural check name prefix -> document field it points at
_FIELD_OF_CHECK = (("algebra", "$.algebra"), ("J gamma", "$.signs.eps_dprime"),
                   ("J", "$.J"), ("D", "$.D"), ("gamma", "$.gamma"))


def triple_from_dict(doc, check=True):
    """Build a :class:`TripleDocument` from parsed JSON.

    With ``check=True`` the structural invariants are evaluated and the first
    violation is raised as a :class:`DocumentError` naming the field.
    """
    if not isinstance(doc, dict):
        raise DocumentError("$", "expected a JSON object")
    fmt = _require(doc, "format", "$")
    if fmt != FORMAT:
        raise DocumentError("$.format", f"unsupported format {fmt!r} (expected {FORMAT!r})")
    dim = _require(doc, "dimension", "$")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError("$.dimension", "expected a positive integer")
    algebra = _decode_algebra(_require(doc, "algebra", "$"), dim)
    D = decode_matrix(_require(doc, "D", "$"), "$.D", dim)
    g = doc.get("gamma")
    gamma = None if g is None else decode_matrix(g, "$.gamma", dim)
    Jd = _require(doc, "J", "$")
    J = AntilinearOp(decode_matrix(_require(Jd, "unitary_part", "$.J"), "$.J.unitary_part", dim),
                     _sign(_require(Jd, "epsilon", "$.J"), "$.J.epsilon"))
    sd = _require(doc, "signs", "$")
    try:
        signs = KOSigns(_sign(_require(sd, "eps", "$.signs"), "$.signs.eps"),
                        _sign(_require(sd, "eps_prime", "$.signs"), "$.signs.eps_prime"),
                        _sign(sd.get("eps_dprime"), "$.signs.eps_dprime", allow_none=True))
    except StructuralError as exc:
        raise DocumentError("$.signs", str(exc)) from exc
    twist = _decode_twist(doc.get("twist"), dim)
    sa = doc.get("self_adjoint", True)
    if not isinstance(sa, bool):
        raise DocumentError("$.self_adjoint", "expected a boolean")
    tol = doc.get("tolerance")
    if tol is not None and (isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0):
        raise DocumentError("$.tolerance", "expected a positive number or null")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise DocumentError("$.name", "expected a string")
    try:
        t = FiniteSpectralTriple(algebra, D, J, signs, gamma, twist, sa, name, _decode_meta(doc.get("meta")))
    except StructuralError as exc:
        raise DocumentError("$", str(exc)) from exc
    if check:
        rep = structural_checks(t, tol)
        bad = rep.first_failure()
        if bad is not None:
            loc = next((f for p, f in _FIELD_OF_CHECK if bad.name.startswith(p)), "$")
            raise DocumentError(loc, f"{bad.note or bad.name} (residual {bad.residual:.3e})")
    return TripleDocument(t, None if tol is None else float(tol))


def loads_document(text, check=True):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    return triple_from_dict(doc, check)


def load_document(path, check=True):
    """Read a document from ``path``; ``"-"`` means standard input."""
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return loads_document(text, check)


def load_triple(path, check=True):
    return load_document(path, check).triple


def dumps_report(report):
    return json.dumps(report.to_dict(), indent=2) + "\n"
