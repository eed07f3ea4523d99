"""Built-in, exactly reproducible triples.

Seeded data use ``numpy.random.default_rng(seed)`` (PCG64); see
:func:`matrix_even_triple` for the draw order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .checks import verify
from .operator_core import AntilinearOp, dagger, random_unitary
from .triple import AlgebraPresentation, FiniteSpectralTriple, KOSigns, TwistSpec


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    triple: FiniteSpectralTriple
    provenance: str


def two_point_triple():
    """``C + C`` on ``C^2``: ``D = 0``, ``J`` complex conjugation,
    ``gamma = diag(1, -1)`` and the swap as ``nu``."""
    e1 = np.diag([1.0, 0.0]).astype(np.complex128)
    e2 = np.diag([0.0, 1.0]).astype(np.complex128)
    algebra = AlgebraPresentation((e1, e2), ("f", "g"), star=(0, 1),
                                  products={(0, 0): [1, 0], (0, 1): [0, 0],
                                            (1, 0): [0, 0], (1, 1): [0, 1]})
    nu = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    return FiniteSpectralTriple(
        algebra=algebra,
        D=np.zeros((2, 2), dtype=np.complex128),
        J=AntilinearOp(np.eye(2), 1),
        signs=KOSigns(1, 1, 1),
        gamma=np.diag([1.0, -1.0]).astype(np.complex128),
        twist=TwistSpec("nu_twisted", nu=nu),
        name="two-point",
    )


def chiral_point_triple(d=1.0):
    """Even KO-dimension 0 triple of ``C`` on ``C^2`` with ``D = [[0, d], [d, 0]]``.

    ``d`` must be real for ``DJ = JD`` with ``J`` complex conjugation.
    """
    D = np.array([[0, d], [d, 0]], dtype=np.complex128)
    return FiniteSpectralTriple(
        algebra=AlgebraPresentation((np.eye(2, dtype=np.complex128),), ("1",), star=(0,),
                                    products={(0, 0): [1]}),
        D=D,
        J=AntilinearOp(np.eye(2), 1),
        signs=KOSigns(1, 1, 1),
        gamma=np.diag([1.0, -1.0]).astype(np.complex128),
        name="chiral-point",
    )


def _transpose_permutation(n):
    P = np.zeros((n * n, n * n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            P[i * n + j, j * n + i] = 1.0
    return P


def matrix_even_triple(n=2, seed=0, upper="minus"):
    """Even real spectral triple of ``M_n(C)`` on ``M_n + M_n``.

    The algebra acts by left multiplication on both summands (row-major
    vectorisation). With a seeded normal ``L``, ``d_plus(X) = L X + X L*``
    and ``d_minus = d_plus*``; ``D = [[0, d_minus], [d_plus, 0]]``,
    ``gamma = diag(1, -1)`` and ``J`` is ``X -> X*`` on each summand, which
    gives KO signs ``(+1, +1, +1)``. Commutators ``[D, a]`` are left
    multiplications, so the first-order condition holds exactly.

    ``L = V diag(lam) V*`` with ``V`` drawn by :func:`random_unitary` and
    then ``lam = (x + iy) / sqrt(2)``. Normality of ``L`` makes ``d_plus``
    commute with ``d_minus``, the finite analogue of a flat Dirac operator.
    ``upper="plus"`` places ``d_plus`` in the upper-right block instead
    (the same operator written in the other chirality convention).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if upper not in ("minus", "plus"):
        raise ValueError("upper must be 'minus' or 'plus'")
    rng = np.random.default_rng(seed)
    V = random_unitary(n, rng)
    lam = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    L = V @ np.diag(lam) @ dagger(V)
    suffix = "" if upper == "minus" else "-plus-upper"
    if upper == "plus":
        L = dagger(L)
    return _matrix_even_from_L(L, name=f"matrix-even-n{n}-s{seed}{suffix}", seed=seed)


def _matrix_even_from_L(L, name="", seed=None):
    n = L.shape[0]
    m = n * n
    I = np.eye(n)
    d_plus = np.kron(L, I) + np.kron(I, np.conj(L))
    d_minus = dagger(d_plus)
    Z = np.zeros((m, m))
    D = np.block([[Z, d_minus], [d_plus, Z]])
    P = _transpose_permutation(n)
    elements, names, star = [], [], []
    products = {}
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=np.complex128)
            E[i, j] = 1.0
            left = np.kron(E, I)
            elements.append(np.block([[left, Z], [Z, left]]))
            names.append(f"e{i}{j}")
            star.append(j * n + i)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    c = np.zeros(m)
                    if j == k:
                        c[i * n + l] = 1.0
                    products[(i * n + j, k * n + l)] = c
    return FiniteSpectralTriple(
        algebra=AlgebraPresentation(tuple(elements), tuple(names), tuple(star), products),
        D=D,
        J=AntilinearOp(np.block([[P, Z], [Z, P]]), 1),
        signs=KOSigns(1, 1, 1),
        gamma=np.block([[np.eye(m), Z], [Z, -np.eye(m)]]),
        name=name,
        meta={"L": L} if seed is None else {"seed": seed},
    )


def chirality_blocks(t):
    """The blocks ``d_plus`` (lower-left) and ``d_minus`` (upper-right) of ``D``."""
    m = t.dim // 2
    return t.D[m:, :m], t.D[:m, m:]


def two_point_product(t, signs=None):
    """Tensor product of ``t`` with :func:`two_point_triple`, in block order.

    The result is reordered from Kronecker order ``(chirality, inner, point)``
    to ``(chirality, point, inner)`` so it displays as four blocks.
    """
    from .constructions import TensorSignData, tensor_product, permute_triple

    if signs is None:
        signs = TensorSignData(1, 1)
    tp = tensor_product(t, two_point_triple(), signs, TensorSignData(1, -1))
    m = t.dim // 2
    order = [s * 2 * m + inner * 2 + c for s in range(2) for c in range(2) for inner in range(m)]
    return permute_triple(tp, order, name=f"two-point-product({t.name})")


def list_catalog(tau=1e-12):
    """Deterministic catalog; every entry is verified on load."""
    base = matrix_even_triple(2, 7)
    entries = [
        CatalogEntry("two-point", two_point_triple(), "reference: two-point example data"),
        CatalogEntry("chiral-point", chiral_point_triple(), "derived: even KO-dim 0 base on C^2"),
        CatalogEntry("matrix-even-n2", base, "derived stand-in for the even manifold triple"),
        CatalogEntry("tensor-4x4", two_point_product(chiral_point_triple()),
                     "reference: 4x4 tensor product with the two-point triple"),
        CatalogEntry("matrix-even-n2-two-point", two_point_product(base),
                     "derived: matrix-even base times the two-point triple"),
    ]
    for e in entries:
        rep = verify(e.triple, tau)
        if not rep.overall:
            raise RuntimeError(f"catalog entry {e.name} fails verification:\n{rep.to_text()}")
    return entries


def catalog_entry(name, seed=None, tau=1e-12):
    """Look up an entry; ``matrix-even-n<k>`` accepts any seed."""
    if name.startswith("matrix-even-n") and name[len("matrix-even-n"):].isdigit():
        n = int(name[len("matrix-even-n"):])
        s = 7 if seed is None else seed
        return CatalogEntry(name, matrix_even_triple(n, s), "derived stand-in for the even manifold triple")
    for e in list_catalog(tau):
        if e.name == name:
            return e
    raise KeyError(name)


def catalog_names():
    return [e.name for e in list_catalog()]
