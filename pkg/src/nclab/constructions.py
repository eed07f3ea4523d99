"""Constructive procedures on finite triples.

Conformal rescalings, untwisting, the opposite-algebra transition, tensor
products, doubling, the minimal twist and its untwisting, unitary
equivalence and twist-type classification.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .checks import (
    check_zero_order,
    nu_hat_closure,
    verify,
)
from .operator_core import (
    AntilinearOp,
    antilinear_conjugate,
    as_matrix,
    as_tolerance,
    dagger,
    opnorm,
    rel_residual,
    spectrum,
)
from .triple import (
    AlgebraPresentation,
    Automorphism,
    FiniteSpectralTriple,
    KOSigns,
    StructuralError,
    TwistSpec,
    VerificationReport,
)

TABLE_ROWS = ("nu_twisted_real_structure", "real_rho_twisted", "twisted_with_untwisted_first_order")


class ResolventError(ArithmeticError):
    """``w`` lies on the spectrum, so ``(D - w)^{-1}`` is undefined."""


class IncompatibleRealStructure(StructuralError):
    pass


def replace(t, **changes):
    return dataclasses.replace(t, **changes)


def _eye(d):
    return np.eye(d, dtype=np.complex128)


# -- unitary relabelling -----------------------------------------------------

def transform_triple(t, W, name=None):
    """Conjugate every datum of ``t`` by the unitary ``W``."""
    W = as_matrix(W, "W", t.dim)
    Wd = dagger(W)
    conj = lambda X: W @ X @ Wd  # noqa: E731
    twist = None
    if t.twist is not None:
        rho = t.rho
        if rho is not None and rho.kind == "implemented":
            rho = Automorphism.implemented(conj(rho.witness))
        twist = TwistSpec(t.twist.flavor, None if t.nu is None else conj(t.nu), rho)
    return replace(
        t,
        algebra=t.algebra.transformed(conj),
        D=conj(t.D),
        gamma=None if t.gamma is None else conj(t.gamma),
        J=t.J.transform(W),
        twist=twist,
        name=t.name if name is None else name,
    )


def permutation_unitary(order):
    """``W`` with ``(W v)[k] = v[order[k]]``."""
    n = len(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of range(n)")
    W = np.zeros((n, n), dtype=np.complex128)
    W[np.arange(n), order] = 1.0
    return W


def block_permutation_unitary(perm, dim):
    """Permutation of ``len(perm)`` equal blocks; ``perm`` is 1-based as on the CLI."""
    p = len(perm)
    if dim % p:
        raise ValueError(f"dimension {dim} is not divisible into {p} blocks")
    m = dim // p
    order = [(perm[b] - 1) * m + k for b in range(p) for k in range(m)]
    return permutation_unitary(order)


def permute_triple(t, order, name=None):
    return transform_triple(t, permutation_unitary(order), name=name)


def grading_adapted(t):
    """Unitarily rotate ``t`` so that ``gamma = diag(1, ..., 1, -1, ..., -1)``."""
    if t.gamma is None:
        raise StructuralError("triple has no grading")
    w, V = np.linalg.eigh((t.gamma + dagger(t.gamma)) / 2)
    order = np.argsort(-w, kind="stable")
    W = dagger(V[:, order])
    out = transform_triple(t, W)
    g = np.diag(np.sign(np.real(np.diag(out.gamma)))).astype(np.complex128)
    return replace(out, gamma=g)


# -- conformal rescalings ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConformalFactor:
    """``k = pi(u)`` positive and ``k' = J k J^{-1}``."""

    coords: np.ndarray
    k: np.ndarray
    k_prime: np.ndarray


def positive_element(t, seed=0, shift=0.5):
    """Span coordinates of a seeded positive invertible element ``x* x + s``.

    Needs the unit and the product ``x* x`` inside the span.
    """
    rng = np.random.default_rng(seed)
    alg = t.algebra
    c = rng.standard_normal(len(alg)) + 1j * rng.standard_normal(len(alg))
    X = alg.combine(c)
    Y = dagger(X) @ X / np.linalg.norm(X) ** 2 + shift * _eye(t.dim)
    coords, res = alg.coords(Y)
    if res > 1e-10:
        raise StructuralError("span is not closed under x* x + 1; no positive element available")
    return coords


def conformal_factor(t, u, tol=None):
    tol = as_tolerance(tol)
    if np.ndim(u) == 0:
        c = np.zeros(len(t.algebra), dtype=np.complex128)
        c[int(u)] = 1.0
    else:
        c = np.asarray(u, dtype=np.complex128)
    k = t.algebra.combine(c)
    if rel_residual(k, dagger(k)) > tol.tau:
        raise StructuralError("pi(u) is not self-adjoint")
    if np.min(np.linalg.eigvalsh((k + dagger(k)) / 2)) <= tol.tau:
        raise StructuralError("pi(u) is not positive definite")
    kp = antilinear_conjugate(t.J, k)
    if rel_residual(k @ kp, kp @ k) > tol.tau:
        raise StructuralError("k and k' do not commute (zero-order failure)")
    return ConformalFactor(c, k, kp)


def _require_zero_order(t, tol):
    rep = check_zero_order(t, tol)
    if not rep.overall:
        raise StructuralError(f"zero-order condition fails on input (residual {rep.worst_residual:.3e})")


def conformal_nu_twist(t, u, tol=None):
    """``D -> k' D k'`` with ``nu = k^{-1} k'``."""
    _require_zero_order(t, tol)
    f = conformal_factor(t, u, tol)
    nu = np.linalg.solve(f.k, f.k_prime)
    return replace(t, D=f.k_prime @ t.D @ f.k_prime, twist=TwistSpec("nu_twisted", nu=nu),
                   name=f"conformal-nu({t.name})", meta={})


def conformal_rho_twist(t, u, tol=None):
    """``D -> k' k D k' k`` with ``rho = Ad_{u^2}`` implemented by ``k^2``."""
    _require_zero_order(t, tol)
    f = conformal_factor(t, u, tol)
    rho = Automorphism.implemented(f.k @ f.k)
    if rho.closure_residual(t.algebra) > as_tolerance(tol).tau:
        raise StructuralError("span is not closed under Ad_{u^2}")
    kk = f.k_prime @ f.k
    return replace(t, D=kk @ t.D @ kk, twist=TwistSpec("rho_twisted", rho=rho),
                   name=f"conformal-rho({t.name})", meta={})


def conformal_commutant_twist(t, u, tol=None):
    """``D -> k D k`` with ``nu = k k'^{-1}`` and ``rho = nu-hat^2 = Ad_{u^2}``."""
    _require_zero_order(t, tol)
    f = conformal_factor(t, u, tol)
    nu = f.k @ np.linalg.inv(f.k_prime)
    rho = Automorphism.implemented(f.k @ f.k)
    if rho.closure_residual(t.algebra) > as_tolerance(tol).tau:
        raise StructuralError("span is not closed under Ad_{u^2}")
    return replace(t, D=f.k @ t.D @ f.k, twist=TwistSpec("general", nu=nu, rho=rho),
                   name=f"conformal-commutant({t.name})", meta={})


# -- untwisting ----------------------------------------------------------------

def untwist(t, nu, case="implemented_automorphism", tol=None):
    """Turn a real rho-twisted triple into one with ``nu^2``-twisted real structure.

    ``D = nu D~ nu``. In the ``implemented_automorphism`` case ``nu`` must
    implement an automorphism of the span and the representation is kept;
    in the ``unitary`` case ``nu`` must be unitary and the representation
    becomes ``a -> nu^{-1} pi(a) nu``. Both cases need ``nu J nu = J`` and
    ``rho`` implemented by ``nu^{-2}``. A grading ``gamma`` becomes
    ``nu^{-1} gamma nu`` and requires ``nu^2 gamma = gamma nu^2``.
    """
    tol = as_tolerance(tol)
    if case not in ("implemented_automorphism", "unitary"):
        raise ValueError("case must be 'implemented_automorphism' or 'unitary'")
    nu = as_matrix(nu, "nu", t.dim)
    rho = t.rho if t.rho is not None else Automorphism.identity(t.dim)
    U = t.J.U
    r = rel_residual(nu @ U @ np.conj(nu), U)
    if r > tol.tau:
        raise IncompatibleRealStructure(f"nu J nu != J (residual {r:.3e})")
    ninv = np.linalg.inv(nu)
    n2, n2inv = nu @ nu, ninv @ ninv
    alg = t.algebra
    worst = max(rel_residual(rho.image(i, alg), n2inv @ x @ n2) for i, x in enumerate(alg.elements))
    if worst > tol.tau:
        raise StructuralError(f"rho is not implemented by nu^-2 (residual {worst:.3e})")
    if case == "implemented_automorphism":
        r, _ = nu_hat_closure(t, nu)
        if r > tol.tau:
            raise StructuralError("nu does not implement an automorphism of the span")
        algebra = alg
    else:
        if rel_residual(nu @ dagger(nu), _eye(t.dim)) > tol.tau:
            raise StructuralError("nu is not unitary")
        algebra = alg.transformed(lambda x: ninv @ x @ nu)
    gamma = None
    if t.gamma is not None:
        if rel_residual(n2 @ t.gamma, t.gamma @ n2) > tol.tau:
            raise StructuralError("nu^2 gamma != gamma nu^2")
        gamma = ninv @ t.gamma @ nu
    self_adjoint = t.self_adjoint and rel_residual(nu, dagger(nu)) <= tol.tau
    return replace(t, algebra=algebra, D=nu @ t.D @ nu, gamma=gamma,
                   twist=TwistSpec("nu_twisted", nu=n2), self_adjoint=self_adjoint,
                   name=f"untwist({t.name})", meta={})


def commutator_transport_residual(t_in, t_out, nu):
    """Worst residual of ``[D, pi_nu(a)] = nu [D~, a]_rho nu`` over the span."""
    nu = as_matrix(nu)
    ninv = np.linalg.inv(nu)
    rho = t_in.rho if t_in.rho is not None else Automorphism.identity(t_in.dim)
    worst = 0.0
    for i, x in enumerate(t_in.algebra.elements):
        pnu = ninv @ x @ nu
        lhs = t_out.D @ pnu - pnu @ t_out.D
        tw = t_in.D @ x - rho.image(i, t_in.algebra) @ t_in.D
        worst = max(worst, rel_residual(lhs, nu @ tw @ nu))
    return worst


def kato_condition(D_tilde, nu, w=0.0, z=0.0, tau=1e-10):
    """Evaluate ``||w - z nu^{-2}|| ||(D~ - w)^{-1}||`` in operator norm.

    Returns ``(holds, value)`` with ``holds = value < 1``. Raises
    :class:`ResolventError` if ``w`` is within ``tau`` of the spectrum.
    """
    D_tilde = as_matrix(D_tilde, "D_tilde")
    nu = as_matrix(nu, "nu", D_tilde.shape[0])
    d = D_tilde.shape[0]
    dist = np.min(np.abs(spectrum(D_tilde) - w))
    if dist <= tau:
        raise ResolventError(f"resolvent undefined: w={w} is within {dist:.3e} of the spectrum")
    n2inv = np.linalg.matrix_power(np.linalg.inv(nu), 2)
    first = opnorm(w * _eye(d) - z * n2inv)
    if first == 0.0:
        return True, 0.0
    value = first * opnorm(np.linalg.inv(D_tilde - w * _eye(d)))
    return bool(value < 1.0), float(value)


def kato_grid(D_tilde, nu, ws, zs, tau=1e-10):
    """Best ``(w, z, value)`` over an explicit grid; spectral ``w`` are skipped."""
    best = None
    for w in ws:
        for z in zs:
            try:
                _, v = kato_condition(D_tilde, nu, w, z, tau)
            except ResolventError:
                continue
            if best is None or v < best[2]:
                best = (w, z, v)
    if best is None:
        raise ResolventError("every grid point lies on the spectrum")
    return best


# -- commutant ------------------------------------------------------------------

def opposite_triple(t, tol=None):
    """The triple over the opposite algebra represented by ``a -> J pi(a*) J^{-1}``.

    For a nu-twisted input the output carries flavor ``general`` with the same
    ``nu`` and ``rho = nu-hat^{-2}`` of the original algebra, which acts on the
    opposite span by conjugation with ``nu^2``. The composite outer twist
    ``rho o nu-hat^{-2}`` of the output is then trivial, i.e. its ``J``
    first-order condition is the untwisted one.
    """
    alg = t.algebra
    els = tuple(antilinear_conjugate(t.J, dagger(x)) for x in alg.elements)
    products = None
    if alg.products:
        products = {(i, j): alg.products[(j, i)] for (i, j) in alg.products if (j, i) in alg.products}
    op = AlgebraPresentation(els, tuple(f"{n}°" for n in alg.names), alg.star, products)
    twist = None
    if t.nu is not None:
        r, _ = nu_hat_closure(t, t.nu)
        if r > as_tolerance(tol).tau:
            raise StructuralError("nu-hat is not defined on the span")
        twist = TwistSpec("general", nu=t.nu, rho=Automorphism.implemented(t.nu @ t.nu))
    return replace(t, algebra=op, twist=twist, name=f"opposite({t.name})", meta={})


# -- tensor products -----------------------------------------------------------

@dataclass(frozen=True)
class TensorSignData:
    """``nu^2 = alpha`` and ``nu gamma = beta gamma nu``."""

    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha not in (1, -1) or self.beta not in (1, -1):
            raise StructuralError("alpha and beta must be +1 or -1")

    def residuals(self, t):
        nu = t.nu if t.nu is not None else _eye(t.dim)
        return (rel_residual(nu @ nu, self.alpha * _eye(t.dim)),
                rel_residual(nu @ t.gamma, self.beta * t.gamma @ nu))


def tensor_sign_condition(t1, s1, t2, s2):
    """``alpha_2 eps'_2 == alpha_1 eps'_1 beta_1 eps''_1``.

    Equivalently the ``D_1 x 1`` and ``gamma_1 x D_2`` terms of the product
    obey ``D J nu = eps' nu J D`` with the same sign.
    """
    return s2.alpha * t2.signs.eps_prime == (
        s1.alpha * t1.signs.eps_prime * s1.beta * t1.signs.eps_dprime)


def tensor_product(t1, t2, s1, s2, tol=None):
    """Product with ``D = D_1 x 1 + gamma_1 x D_2``, ``J_1 x J_2``, ``gamma_1 x gamma_2``,
    ``nu_1 x nu_2``.

    The declared ``eps'`` of the product is ``alpha_2 eps'_1`` (from the
    ``D_1`` term; from the ``D_2`` term when ``D_1 = 0``). Whether the stated
    sign condition holds is recorded in ``meta["sign_condition"]``.
    """
    tol = as_tolerance(tol)
    if t1.gamma is None or t2.gamma is None:
        raise StructuralError("tensor product needs two even triples (missing grading)")
    for t, s, label in ((t1, s1, "first"), (t2, s2, "second")):
        ra, rb = s.residuals(t)
        if ra > tol.tau or rb > tol.tau:
            raise StructuralError(f"invalid TensorSignData for the {label} factor "
                                  f"(nu^2 residual {ra:.2e}, nu gamma residual {rb:.2e})")
    a1, a2 = t1.algebra, t2.algebra
    n2 = len(a2)
    els = tuple(np.kron(x, y) for x in a1.elements for y in a2.elements)
    names = tuple(f"{p}⊗{q}" for p in a1.names for q in a2.names)
    star = None
    if a1.star is not None and a2.star is not None:
        star = tuple(a1.star[i] * n2 + a2.star[j] for i in range(len(a1)) for j in range(n2))
    products = None
    if a1.products and a2.products:
        products = {}
        for (i, k), c1 in a1.products.items():
            for (j, l), c2 in a2.products.items():
                products[(i * n2 + j, k * n2 + l)] = np.kron(np.asarray(c1), np.asarray(c2))
    d2 = t2.dim
    D = np.kron(t1.D, _eye(d2)) + np.kron(t1.gamma, t2.D)
    nu1 = t1.nu if t1.nu is not None else _eye(t1.dim)
    nu2 = t2.nu if t2.nu is not None else _eye(d2)
    if np.linalg.norm(t1.D) > 0:
        eps_p = s2.alpha * t1.signs.eps_prime
    else:
        eps_p = s1.alpha * s1.beta * t1.signs.eps_dprime * t2.signs.eps_prime
    signs = KOSigns(t1.signs.eps * t2.signs.eps, eps_p, t1.signs.eps_dprime * t2.signs.eps_dprime)
    ok = tensor_sign_condition(t1, s1, t2, s2)
    return FiniteSpectralTriple(
        algebra=AlgebraPresentation(els, names, star, products),
        D=D,
        J=AntilinearOp(np.kron(t1.J.U, t2.J.U), signs.eps),
        signs=signs,
        gamma=np.kron(t1.gamma, t2.gamma),
        twist=TwistSpec("nu_twisted", nu=np.kron(nu1, nu2)),
        self_adjoint=t1.self_adjoint and t2.self_adjoint,
        name=f"({t1.name})⊗({t2.name})",
        meta={"sign_condition": ok},
    )


# -- doubling --------------------------------------------------------------------

def double(t, j_placement="diagonal", tol=None):
    """Embed ``D`` into ``[[0, D], [D*, 0]]`` on ``H + H``.

    The twist operator ``T`` of ``t`` (its ``nu``; the square of the
    untwisting operator) must be self-adjoint. The output has twist
    ``diag(T, T)``, grading ``diag(1, -1)`` and ``J`` placed diagonally or
    off-diagonally. The resulting KO signs are recorded, not prescribed:
    ``eps''`` is ``+1`` / ``-1`` for the two placements and ``eps'`` is the
    sign that best fits ``D J T = eps' T J D`` on the doubled data.
    """
    tol = as_tolerance(tol)
    if j_placement not in ("diagonal", "off_diagonal"):
        raise ValueError("j_placement must be 'diagonal' or 'off_diagonal'")
    d = t.dim
    T = t.nu if t.nu is not None else _eye(d)
    if rel_residual(T, dagger(T)) > tol.tau:
        raise StructuralError("twist operator is not self-adjoint (nu^2 != nu*^2)")
    Z = np.zeros((d, d), dtype=np.complex128)
    D = np.block([[Z, t.D], [dagger(t.D), Z]])
    U = t.J.U
    if j_placement == "diagonal":
        Ub, eps_dd = np.block([[U, Z], [Z, U]]), 1
    else:
        Ub, eps_dd = np.block([[Z, U], [U, Z]]), -1
    Tb = np.block([[T, Z], [Z, T]])
    lhs = D @ Ub @ np.conj(Tb)
    rhs = Tb @ Ub @ np.conj(D)
    eps_p = 1 if rel_residual(lhs, rhs) <= rel_residual(lhs, -rhs) else -1
    alg = t.algebra.transformed(lambda x: np.block([[x, Z], [Z, x]]))
    return replace(
        t,
        algebra=alg,
        D=D,
        J=AntilinearOp(Ub, t.signs.eps),
        signs=KOSigns(t.signs.eps, eps_p, eps_dd),
        gamma=np.block([[_eye(d), Z], [Z, -_eye(d)]]),
        twist=None if t.nu is None else TwistSpec("nu_twisted", nu=Tb),
        self_adjoint=True,
        name=f"double({t.name})",
        meta={},
    )


# -- minimal twist ---------------------------------------------------------------

def flip_matrix(m):
    """``rho-check``: the swap of the two chirality blocks of size ``m``."""
    Z = np.zeros((m, m))
    I = np.eye(m)
    return np.block([[Z, I], [I, Z]]).astype(np.complex128)


def minimal_nu(m):
    """``((1+i) + (1-i) rho-check) / 2``: a unitary square root of the swap."""
    return ((1 + 1j) * _eye(2 * m) + (1 - 1j) * flip_matrix(m)) / 2


def minimal_twist(t, tol=None):
    """Extend ``A`` to ``A + A`` acting as ``diag(f, g)``, twisted by the flip.

    The input must be grading-adapted (``gamma = diag(1, -1)`` in blocks of
    equal size, see :func:`grading_adapted`) with ``D`` block off-diagonal.
    The grading becomes part of the algebra, so the output is odd.
    """
    tol = as_tolerance(tol)
    if t.gamma is None:
        raise StructuralError("minimal twist needs an even triple")
    d = t.dim
    if d % 2:
        raise StructuralError("chirality blocks must have equal size")
    m = d // 2
    g = np.diag(np.r_[np.ones(m), -np.ones(m)]).astype(np.complex128)
    if rel_residual(t.gamma, g) > tol.tau:
        raise StructuralError("grading is not diag(1, -1); call grading_adapted first")
    if rel_residual(t.D[:m, :m], 0 * t.D[:m, :m]) > tol.tau or \
            rel_residual(t.D[m:, m:], 0 * t.D[m:, m:]) > tol.tau:
        raise StructuralError("D is not block off-diagonal in the grading basis")
    Pp = (_eye(d) + g) / 2
    Pm = (_eye(d) - g) / 2
    alg = t.algebra
    for k, x in enumerate(alg.elements):
        if rel_residual(x[:m, :m], x[m:, m:]) > tol.tau:
            raise StructuralError(f"element {alg.names[k]} acts differently on the two chiralities")
    n = len(alg)
    els = tuple(x @ Pp for x in alg.elements) + tuple(x @ Pm for x in alg.elements)
    names = tuple(f"({a},0)" for a in alg.names) + tuple(f"(0,{a})" for a in alg.names)
    star = None
    if alg.star is not None:
        star = tuple(alg.star) + tuple(s + n for s in alg.star)
    products = None
    if alg.products:
        products = {}
        z = np.zeros(n)
        for (i, j), c in alg.products.items():
            c = np.asarray(c)
            products[(i, j)] = np.r_[c, z]
            products[(i + n, j + n)] = np.r_[z, c]
            products[(i, j + n)] = np.r_[z, z]
            products[(i + n, j)] = np.r_[z, z]
    return replace(
        t,
        algebra=AlgebraPresentation(els, names, star, products),
        gamma=None,
        signs=KOSigns(t.signs.eps, t.signs.eps_prime, None),
        twist=TwistSpec("rho_twisted", rho=Automorphism.implemented(flip_matrix(m))),
        name=f"minimal-twist({t.name})",
        meta={},
    )


def real_structure_blocks(t):
    """Classify ``J`` against the chirality split: ``("diagonal", J+, J-)`` or
    ``("off_diagonal", J+, J-)`` with ``J = [[0, J-], [J+, 0]]``."""
    m = t.dim // 2
    U = t.J.U
    if np.allclose(U[:m, m:], 0) and np.allclose(U[m:, :m], 0):
        return "diagonal", U[:m, :m], U[m:, m:]
    if np.allclose(U[:m, :m], 0) and np.allclose(U[m:, m:], 0):
        return "off_diagonal", U[m:, :m], U[:m, m:]
    return "mixed", None, None


def minimal_untwist(t, tol=None):
    """Untwist a minimal twist with the unitary square root of the flip.

    Returns ``(untwisted, diagonal_picture)``. The first is
    ``(pi_nu, D = nu D~ nu, J, nu^2)``; the second is its conjugate by ``nu``:
    the diagonal representation with ``D' = rho-check D~`` and
    ``J' = nu J nu^{-1}``. Both have normal but not self-adjoint ``D``.
    """
    tol = as_tolerance(tol)
    m = t.dim // 2
    nu = minimal_nu(m)
    kind, jp, jm = real_structure_blocks(t)
    mismatch = rel_residual(nu @ t.J.U @ np.conj(nu), t.J.U)
    if kind == "mixed" or rel_residual(jp, jm) > tol.tau:
        raise IncompatibleRealStructure(
            f"incompatible real structure: J+ != J- (nu J nu - J residual {mismatch:.3e})")
    untwisted = untwist(t, nu, case="unitary", tol=tol)
    untwisted = replace(untwisted, self_adjoint=False, name=f"minimal-untwist({t.name})")
    diag = transform_triple(untwisted, nu, name=f"minimal-untwist-diagonal({t.name})")
    return untwisted, replace(diag, algebra=t.algebra)


def normality_residual(D):
    return rel_residual(D @ dagger(D), dagger(D) @ D)


# -- equivalence & classification ---------------------------------------------

def unitary_equivalence_check(t1, t2, W, tol=None, compare_twist="nu"):
    """Does ``W`` carry ``t1`` onto ``t2``?

    Checks the algebra span, ``D``, ``gamma``, the twist (``nu`` itself or,
    with ``compare_twist="nu_squared"``, its square) and ``J`` via
    ``U_2 = W U_1 W^T``.
    """
    tol = as_tolerance(tol)
    W = as_matrix(W, "W")
    if W.shape[0] != t1.dim or t1.dim != t2.dim:
        raise StructuralError("dimension mismatch")
    if rel_residual(W @ dagger(W), _eye(t1.dim)) > tol.tau:
        raise StructuralError("W is not unitary")
    Wd = dagger(W)
    rep = VerificationReport(tau=tol.tau)
    fwd = max((t2.algebra.coords(W @ x @ Wd)[1] for x in t1.algebra.elements), default=0.0)
    back = max((t1.algebra.coords(Wd @ y @ W)[1] for y in t2.algebra.elements), default=0.0)
    rep.add("algebra span", max(fwd, back))
    rep.add("D", rel_residual(W @ t1.D @ Wd, t2.D))

    def optional(name, a, b):
        if a is None and b is None:
            rep.add(name, 0.0)
        elif a is None or b is None:
            rep.add(name, 1.0, note="present on one side only")
        else:
            rep.add(name, rel_residual(W @ a @ Wd, b))

    optional("gamma", t1.gamma, t2.gamma)
    nu1 = t1.nu if t1.nu is not None else _eye(t1.dim)
    nu2 = t2.nu if t2.nu is not None else _eye(t2.dim)
    if compare_twist == "nu_squared":
        optional("nu squared", nu1 @ nu1, nu2 @ nu2)
    else:
        optional("nu", nu1, nu2)
    rep.add("J", rel_residual(W @ t1.J.U @ W.T, t2.J.U) if t1.J.epsilon == t2.J.epsilon else 1.0)
    return rep


@dataclass
class Classification:
    row: Optional[str]
    verdicts: dict
    reports: dict

    @property
    def classified(self):
        return self.row in TABLE_ROWS


def classify_type(t, tol=None):
    """Run the three conformal-twist condition families and pick the unique row.

    Missing twist data count as trivial. Row three uses ``rho = nu-hat^2``
    derived from ``nu``. If all three pass with trivial data the triple is
    ``classical``; any other non-unique outcome is ``unclassifiable``.
    """
    tol = as_tolerance(tol)
    d = t.dim
    nu = t.nu if t.nu is not None else _eye(d)
    rho = t.rho if t.rho is not None else Automorphism.identity(d)
    candidates = {
        TABLE_ROWS[0]: (replace(t, twist=TwistSpec("nu_twisted", nu=nu)), "nu"),
        TABLE_ROWS[1]: (replace(t, twist=TwistSpec("rho_twisted", rho=rho)), "rho"),
        TABLE_ROWS[2]: (replace(t, twist=TwistSpec("general", nu=nu,
                                                   rho=Automorphism.implemented(nu @ nu))), "general"),
    }
    reports = {row: verify(tt, tol, mode) for row, (tt, mode) in candidates.items()}
    verdicts = {row: r.overall for row, r in reports.items()}
    passing = [row for row, ok in verdicts.items() if ok]
    if len(passing) == 1:
        row = passing[0]
    else:
        trivial_nu = rel_residual(nu, _eye(d)) <= tol.tau
        trivial_rho = max(rel_residual(rho.image(i, t.algebra), x)
                          for i, x in enumerate(t.algebra.elements)) <= tol.tau
        row = "classical" if len(passing) == 3 and trivial_nu and trivial_rho else "unclassifiable"
    return Classification(row, verdicts, reports)
