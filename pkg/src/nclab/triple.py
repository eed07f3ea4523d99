"""Data model for finite spectral triples with (twisted) real structures."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .operator_core import (
    AntilinearOp,
    OperatorError,
    antilinear_conjugate,
    as_matrix,
    dagger,
    rel_residual,
)

FLAVORS = ("nu_twisted", "rho_twisted", "general")


class StructuralError(ValueError):
    """Input data violates a structural hypothesis (not a condition verdict)."""


@dataclass(frozen=True)
class KOSigns:
    """Signs from ``J^2 = eps``, ``DJ = eps' JD`` and ``J gamma = eps'' gamma J``."""

    eps: int = 1
    eps_prime: int = 1
    eps_dprime: Optional[int] = None

    def __post_init__(self):
        for name in ("eps", "eps_prime"):
            if getattr(self, name) not in (1, -1):
                raise StructuralError(f"{name} must be +1 or -1")
        if self.eps_dprime not in (None, 1, -1):
            raise StructuralError("eps_dprime must be +1, -1 or absent")


@dataclass(frozen=True, eq=False)
class AlgebraPresentation:
    """A vector-space spanning set of represented algebra elements.

    ``star[i] = j`` records ``pi(a_i)^* = pi(a_j)``. When ``star`` is omitted
    the adjoint of each element is required to lie in the span and is handled
    through coordinates. ``products`` optionally maps ``(i, j)`` to the span
    coordinates of ``pi(a_i) pi(a_j)``.
    """

    elements: tuple
    names: tuple = ()
    star: Optional[tuple] = None
    products: Optional[dict] = None

    def __post_init__(self):
        if len(self.elements) == 0:
            raise StructuralError("algebra needs at least one spanning element")
        els = tuple(as_matrix(e, f"algebra element {k}") for k, e in enumerate(self.elements))
        d = els[0].shape[0]
        for k, e in enumerate(els):
            if e.shape[0] != d:
                raise StructuralError(f"algebra element {k} has dimension {e.shape[0]}, expected {d}")
        object.__setattr__(self, "elements", els)
        names = tuple(self.names) if self.names else tuple(f"a{k}" for k in range(len(els)))
        if len(names) != len(els):
            raise StructuralError("names and elements differ in length")
        object.__setattr__(self, "names", names)
        if self.star is not None:
            star = tuple(int(s) for s in self.star)
            if len(star) != len(els) or any(not 0 <= s < len(els) for s in star):
                raise StructuralError("star must be an index map on the spanning set")
            object.__setattr__(self, "star", star)

    def __len__(self):
        return len(self.elements)

    @property
    def dim(self):
        return self.elements[0].shape[0]

    @cached_property
    def _basis(self):
        return np.stack([e.reshape(-1) for e in self.elements], axis=1)

    @cached_property
    def rank(self):
        s = np.linalg.svd(self._basis, compute_uv=False)
        return int(np.sum(s > s[0] * 1e-10)) if s[0] > 0 else 0

    def coords(self, X):
        """Least-squares span coordinates of ``X`` and the projection residual."""
        X = np.asarray(X, dtype=np.complex128)
        c, *_ = np.linalg.lstsq(self._basis, X.reshape(-1), rcond=None)
        return c, rel_residual(X, self.combine(c))

    def combine(self, c):
        c = np.asarray(c, dtype=np.complex128)
        return (self._basis @ c).reshape(self.dim, self.dim)

    def adjoint_image(self, i):
        """Matrix of ``pi(a_i^*)``."""
        if self.star is not None:
            return self.elements[self.star[i]]
        return dagger(self.elements[i])

    def structure_residuals(self):
        """Residuals for independence, star consistency and the product table."""
        out = {"independence": 0.0 if self.rank == len(self) else 1.0}
        worst = 0.0
        for i, e in enumerate(self.elements):
            if self.star is not None:
                r = max(rel_residual(dagger(e), self.elements[self.star[i]]),
                        0.0 if self.star[self.star[i]] == i else 1.0)
            else:
                r = self.coords(dagger(e))[1]
            worst = max(worst, r)
        out["star"] = worst
        worst = 0.0
        for (i, j), c in (self.products or {}).items():
            worst = max(worst, rel_residual(self.elements[i] @ self.elements[j], self.combine(c)))
        out["products"] = worst
        return out

    def transformed(self, f, names=None):
        return AlgebraPresentation(tuple(f(e) for e in self.elements),
                                   names or self.names, self.star, self.products)


def close_under_products(generators, max_dim=64, tau=1e-10, names=None):
    """Build a spanning set from generators by adjoining products until closed.

    The identity is included. Raises :class:`StructuralError` if the span would
    exceed ``max_dim``.
    """
    gens = [as_matrix(g, "generator") for g in generators]
    d = gens[0].shape[0]
    basis = []

    def independent(X):
        if not basis:
            return np.linalg.norm(X) > tau
        B = np.stack([b.reshape(-1) for b in basis], axis=1)
        c, *_ = np.linalg.lstsq(B, X.reshape(-1), rcond=None)
        return rel_residual(X, (B @ c).reshape(d, d)) > tau

    frontier = [np.eye(d, dtype=np.complex128)]
    for g in gens:
        frontier += [g, dagger(g)]
    while frontier:
        X = frontier.pop(0)
        if not independent(X):
            continue
        basis.append(X)
        if len(basis) > max_dim:
            raise StructuralError(f"span exceeds the cap of {max_dim}")
        for Y in list(basis):
            frontier += [X @ Y, Y @ X]
    return AlgebraPresentation(tuple(basis), names or ())


@dataclass(frozen=True, eq=False)
class Automorphism:
    """Algebra automorphism, either implemented by conjugation or by coordinates.

    ``kind="implemented"``: ``pi(rho(a)) = W pi(a) W^{-1}``.
    ``kind="coordinate"``: ``pi(rho(a_i)) = sum_j R[j, i] pi(a_j)``.
    """

    kind: str
    witness: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "implemented":
            W = as_matrix(self.witness, "automorphism witness")
            if np.linalg.cond(W) > 1e12:
                raise StructuralError("automorphism witness is not invertible")
            object.__setattr__(self, "witness", W)
        elif self.kind == "coordinate":
            R = as_matrix(self.matrix, "automorphism matrix")
            if np.linalg.cond(R) > 1e12:
                raise StructuralError("coordinate automorphism is not invertible")
            object.__setattr__(self, "matrix", R)
        else:
            raise StructuralError(f"unknown automorphism kind {self.kind!r}")

    @classmethod
    def implemented(cls, W):
        return cls("implemented", witness=W)

    @classmethod
    def coordinate(cls, R):
        return cls("coordinate", matrix=R)

    @classmethod
    def identity(cls, dim):
        return cls.implemented(np.eye(dim))

    @cached_property
    def _winv(self):
        return np.linalg.inv(self.witness)

    def apply(self, X, algebra):
        """Image of the span element ``X`` (a matrix) under the automorphism."""
        if self.kind == "implemented":
            return self.witness @ X @ self._winv
        c, res = algebra.coords(X)
        if res > 1e-8:
            raise StructuralError("coordinate automorphism applied outside the span")
        return algebra.combine(self.matrix @ c)

    def image(self, i, algebra):
        if self.kind == "implemented":
            return self.apply(algebra.elements[i], algebra)
        return algebra.combine(self.matrix[:, i])

    def inverse(self):
        if self.kind == "implemented":
            return Automorphism.implemented(self._winv)
        return Automorphism.coordinate(np.linalg.inv(self.matrix))

    def closure_residual(self, algebra):
        """Worst projection residual of the images of the spanning set."""
        if self.kind == "coordinate":
            if self.matrix.shape[0] != len(algebra):
                return 1.0
            return 0.0
        return max(algebra.coords(self.image(i, algebra))[1] for i in range(len(algebra)))

    def multiplicativity_residual(self, algebra):
        worst = 0.0
        for (i, j), c in (algebra.products or {}).items():
            lhs = self.apply(algebra.combine(c), algebra)
            rhs = self.image(i, algebra) @ self.image(j, algebra)
            worst = max(worst, rel_residual(lhs, rhs))
        return worst

    def star_residual(self, algebra):
        """Residual of ``rho o * = * o rho^{-1}`` on the spanning set."""
        inv = self.inverse()
        worst = 0.0
        for i in range(len(algebra)):
            lhs = self.apply(algebra.adjoint_image(i), algebra)
            rhs = dagger(inv.image(i, algebra))
            worst = max(worst, rel_residual(lhs, rhs))
        return worst


@dataclass(frozen=True, eq=False)
class TwistSpec:
    flavor: str
    nu: Optional[np.ndarray] = None
    rho: Optional[Automorphism] = None

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise StructuralError(f"unknown twist flavor {self.flavor!r}")
        if self.nu is not None:
            nu = as_matrix(self.nu, "nu")
            if np.linalg.cond(nu) > 1e12:
                raise StructuralError("nu is singular")
            object.__setattr__(self, "nu", nu)
        if self.flavor == "nu_twisted" and self.nu is None:
            raise StructuralError("nu_twisted flavor requires nu")
        if self.flavor == "rho_twisted" and self.rho is None:
            raise StructuralError("rho_twisted flavor requires rho")


@dataclass(frozen=True, eq=False)
class FiniteSpectralTriple:
    """Finite spectral triple ``(A, H, pi, D, gamma, J)`` with optional twist.

    ``self_adjoint=False`` opts out of the self-adjointness invariant of ``D``
    for the intermediate operators produced when untwisting with a
    non-self-adjoint ``nu``.
    """

    algebra: AlgebraPresentation
    D: np.ndarray
    J: AntilinearOp
    signs: KOSigns = KOSigns()
    gamma: Optional[np.ndarray] = None
    twist: Optional[TwistSpec] = None
    self_adjoint: bool = True
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.algebra.dim
        try:
            object.__setattr__(self, "D", as_matrix(self.D, "D", d))
            if self.gamma is not None:
                object.__setattr__(self, "gamma", as_matrix(self.gamma, "gamma", d))
            if self.J.dim != d:
                raise OperatorError(f"J has dimension {self.J.dim}, expected {d}")
            if self.twist is not None and self.twist.nu is not None and self.twist.nu.shape[0] != d:
                raise OperatorError("nu has the wrong dimension")
        except OperatorError as exc:
            raise StructuralError(str(exc)) from exc
        if self.J.epsilon != self.signs.eps:
            raise StructuralError("J.epsilon disagrees with signs.eps")
        if (self.gamma is None) != (self.signs.eps_dprime is None):
            raise StructuralError("eps_dprime must be present exactly when a grading is present")

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def even(self):
        return self.gamma is not None

    @property
    def flavor(self):
        return None if self.twist is None else self.twist.flavor

    def pi(self, i):
        return self.algebra.elements[i]

    def pi_J(self, i):
        return antilinear_conjugate(self.J, self.algebra.elements[i])

    @property
    def nu(self):
        return None if self.twist is None else self.twist.nu

    @property
    def rho(self):
        return None if self.twist is None else self.twist.rho


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    witness: Optional[tuple] = None
    note: str = ""


@dataclass
class VerificationReport:
    """Per-condition verdicts plus structural checks and free-form flags."""

    checks: list = field(default_factory=list)
    structure: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    tau: float = 1e-10

    @property
    def structural_ok(self):
        return all(c.passed for c in self.structure)

    @property
    def overall(self):
        return self.structural_ok and all(c.passed for c in self.checks)

    @property
    def worst_residual(self):
        return max((c.residual for c in self.checks + self.structure), default=0.0)

    def add(self, name, residual, witness=None, note="", structural=False):
        res = CheckResult(name, bool(residual <= self.tau), float(residual), witness, note)
        (self.structure if structural else self.checks).append(res)
        return res

    def get(self, name):
        for c in self.structure + self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self):
        for c in self.structure + self.checks:
            if not c.passed:
                return c
        return None

    def extend(self, other):
        self.checks += other.checks
        self.structure += other.structure
        self.flags += [f for f in other.flags if f not in self.flags]
        return self

    def to_dict(self):
        def row(c):
            return {"name": c.name, "passed": c.passed, "residual": repr(c.residual),
                    "witness": list(c.witness) if c.witness is not None else None,
                    "note": c.note}
        return {"overall": "pass" if self.overall else "fail",
                "structural": "pass" if self.structural_ok else "fail",
                "tolerance": repr(self.tau),
                "structure": [row(c) for c in self.structure],
                "checks": [row(c) for c in self.checks],
                "flags": list(self.flags)}

    def to_text(self):
        lines = []
        for kind, group in (("structure", self.structure), ("condition", self.checks)):
            for c in group:
                w = "" if c.witness is None else f" witness={tuple(c.witness)}"
                n = f" ({c.note})" if c.note else ""
                lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {kind:9s} {c.name:32s} "
                             f"residual={c.residual:.3e}{w}{n}")
        for f in self.flags:
            lines.append(f"[FLAG] {f}")
        lines.append(f"overall: {'pass' if self.overall else 'fail'} (tau={self.tau:g})")
        return "\n".join(lines)
