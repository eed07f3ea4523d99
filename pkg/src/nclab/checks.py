"""Zero-order, first-order and twisted reality checkers.

All conditions quantified over the algebra are evaluated on the spanning set
of the presentation. They are linear in ``a`` and conjugate-linear in ``b``,
so the spanning-set check is exact.
"""

from __future__ import annotations

import numpy as np

from .operator_core import (
    antilinear_conjugate,
    as_tolerance,
    dagger,
    rel_residual,
)
from .triple import Automorphism, StructuralError, VerificationReport

PI_CHOICES = ("direct", "conjugated")


def _tw(T, X, aX):
    """Algebraic twisted commutator ``T X - aX T``."""
    return T @ X - aX @ T


def _worst_pair(pairs):
    """Max residual over ``((i, j), residual)`` with lexicographic tie-break."""
    worst, witness = 0.0, None
    for key, r in pairs:
        if r > worst:
            worst, witness = r, key
    return worst, witness


def twisted_commutator(T, t, i, alpha=None, pi_choice="direct"):
    """``T pi(a_i) - pi(alpha(a_i)) T`` with ``pi`` either the representation
    or its ``J``-conjugate ``Ad_J o pi``."""
    if pi_choice not in PI_CHOICES:
        raise ValueError(f"pi_choice must be one of {PI_CHOICES}")
    if not 0 <= i < len(t.algebra):
        raise IndexError(f"span index {i} out of range")
    x = t.pi(i)
    ax = x if alpha is None else alpha.image(i, t.algebra)
    if pi_choice == "conjugated":
        x, ax = antilinear_conjugate(t.J, x), antilinear_conjugate(t.J, ax)
    return _tw(np.asarray(T, dtype=np.complex128), x, ax)


def jacobi_sides(T, x, ax, y, by):
    """Both sides of the twisted Jacobi identity for explicit matrices.

    ``x, y`` are the represented elements and ``ax, by`` their twisted images.
    Returns ``(lhs, rhs)`` with
    ``lhs = [[T,x]_a, y]_b - [[T,y]_b, x]_a`` and
    ``rhs = T [x, y] - [ax, by] T``.
    """
    Tx = _tw(T, x, ax)
    Ty = _tw(T, y, by)
    lhs = _tw(Tx, y, by) - _tw(Ty, x, ax)
    rhs = T @ (x @ y - y @ x) - (ax @ by - by @ ax) @ T
    return lhs, rhs


def jacobi_residual(T, t, i, j, alpha=None, beta=None,
                    pi_choice_x="direct", pi_choice_y="conjugated"):
    def rep(k, auto, choice):
        m = t.pi(k)
        am = m if auto is None else auto.image(k, t.algebra)
        if choice == "conjugated":
            return antilinear_conjugate(t.J, m), antilinear_conjugate(t.J, am)
        return m, am

    x, ax = rep(i, alpha, pi_choice_x)
    y, by = rep(j, beta, pi_choice_y)
    lhs, rhs = jacobi_sides(np.asarray(T, dtype=np.complex128), x, ax, y, by)
    return lhs, rhs, rel_residual(lhs, rhs)


# -- structure -------------------------------------------------------------

def structural_checks(t, tol=None):
    """Invariants of the data itself; failures here precede any condition."""
    tol = as_tolerance(tol)
    rep = VerificationReport(tau=tol.tau)
    alg = t.algebra.structure_residuals()
    rep.add("algebra independent", alg["independence"], structural=True,
            note="" if alg["independence"] == 0 else "spanning matrices are linearly dependent")
    rep.add("algebra star", alg["star"], structural=True)
    if t.algebra.products:
        rep.add("algebra products", alg["products"], structural=True)
    rep.add("J isometry", t.J.isometry_residual(), structural=True)
    rep.add("J square", t.J.square_residual(), structural=True, note=f"eps={t.signs.eps:+d}")
    if t.self_adjoint:
        rep.add("D self-adjoint", rel_residual(t.D, dagger(t.D)), structural=True)
    g = t.gamma
    if g is not None:
        r = rel_residual(g @ g, np.eye(t.dim))
        rep.add("gamma involutive", r, structural=True,
                note="gamma not involutive" if r > tol.tau else "")
        rep.add("gamma self-adjoint", rel_residual(g, dagger(g)), structural=True)
        rep.add("gamma anticommutes D", rel_residual(g @ t.D, -t.D @ g), structural=True)
        r, w = _worst_pair(((i,), rel_residual(g @ x, x @ g)) for i, x in enumerate(t.algebra.elements))
        rep.add("gamma commutes algebra", r, w, structural=True)
        rep.add("J gamma sign", rel_residual(t.J.U @ np.conj(g), t.signs.eps_dprime * g @ t.J.U),
                structural=True, note=f"eps''={t.signs.eps_dprime:+d}")
    return rep


# -- conditions --------------------------------------------------------------

def _zero_order(t, rep):
    P = t.algebra.elements
    PJ = [antilinear_conjugate(t.J, x) for x in P]
    r, w = _worst_pair(((i, j), rel_residual(x @ y, y @ x))
                       for i, x in enumerate(P) for j, y in enumerate(PJ))
    rep.add("zero_order", r, w)


def check_zero_order(t, tol=None):
    """``[pi(a_i), J pi(a_j) J^{-1}] = 0`` over all spanning pairs."""
    rep = VerificationReport(tau=as_tolerance(tol).tau)
    _zero_order(t, rep)
    return rep


def _j_sign(t, rep, name="J_sign"):
    # D J = eps' J D, on unitary parts: D U = eps' U conj(D)
    rep.add(name, rel_residual(t.D @ t.J.U, t.signs.eps_prime * t.J.U @ np.conj(t.D)),
            note=f"eps'={t.signs.eps_prime:+d}")


def check_first_order_classical(t, tol=None):
    """``[[D, pi(a_i)], J pi(a_j) J^{-1}] = 0`` over all spanning pairs."""
    rep = VerificationReport(tau=as_tolerance(tol).tau)
    D = t.D
    C = [D @ x - x @ D for x in t.algebra.elements]
    PJ = [t.pi_J(j) for j in range(len(t.algebra))]
    r, w = _worst_pair(((i, j), rel_residual(c @ y, y @ c))
                       for i, c in enumerate(C) for j, y in enumerate(PJ))
    rep.add("first_order", r, w)
    return rep


def nu_hat_closure(t, nu):
    """Worst projection residual of ``nu pi(a_i) nu^{-1}`` onto the span."""
    ninv = np.linalg.inv(nu)
    r, w = _worst_pair(((i,), t.algebra.coords(nu @ x @ ninv)[1])
                       for i, x in enumerate(t.algebra.elements))
    return r, w


def nu_exchange_residuals(t, nu=None):
    """Per-element residual of ``[D, pi_J(b)]_{nu-bar^2} = [D, b]^{pi_J}_{nu-hat^-2}``.

    The left side twists by conjugation with ``nu^2`` on operators, the right
    side by ``nu-hat^{-2}`` on the algebra before applying ``pi_J``.
    """
    nu = t.nu if nu is None else nu
    n2 = nu @ nu
    n2inv = np.linalg.inv(n2)
    out = []
    for x in t.algebra.elements:
        y = antilinear_conjugate(t.J, x)
        lhs = _tw(t.D, y, n2 @ y @ n2inv)
        rhs = _tw(t.D, y, antilinear_conjugate(t.J, n2inv @ x @ n2))
        out.append(rel_residual(lhs, rhs))
    return out


def _nu_conditions(t, rep, nu):
    D, U = t.D, t.J.U
    ninv = np.linalg.inv(nu)
    r, w = nu_hat_closure(t, nu)
    c = rep.add("nu_closure", r, w)
    if not c.passed:
        rep.add("nu_hat defined", r, w, structural=True,
                note="nu pi(a) nu^-1 leaves the span")
    eps_p = t.signs.eps_prime
    rep.add("twisted_J_sign", rel_residual(D @ U @ np.conj(nu), eps_p * nu @ U @ np.conj(D)),
            note=f"eps'={eps_p:+d}")
    rep.add("nu_regularity", rel_residual(nu @ U @ np.conj(nu), U))
    if t.gamma is not None:
        n2 = nu @ nu
        rep.add("nu2_grading", rel_residual(n2 @ t.gamma, t.gamma @ n2))
    P = t.algebra.elements
    C = [D @ x - x @ D for x in P]
    Bp = [antilinear_conjugate(t.J, nu @ x @ ninv) for x in P]
    Bm = [antilinear_conjugate(t.J, ninv @ x @ nu) for x in P]
    r, w = _worst_pair(((i, j), rel_residual(c @ Bp[j], Bm[j] @ c))
                       for i, c in enumerate(C) for j in range(len(P)))
    first = rep.add("nu_first_order", r, w)
    n2 = nu @ nu
    n2inv = np.linalg.inv(n2)
    PJ = [antilinear_conjugate(t.J, x) for x in P]
    X = [_tw(D, y, n2 @ y @ n2inv) for y in PJ]
    r, w = _worst_pair(((i, j), rel_residual(X[j] @ x, x @ X[j]))
                       for i, x in enumerate(P) for j in range(len(P)))
    ex = rep.add("nu_first_order_exchanged", r, w)
    if first.passed != ex.passed:
        rep.flags.append("verdict disagreement between first-order forms")


def verify_nu_twisted(t, tol=None):
    """Conditions for a spectral triple with nu-twisted real structure.

    Checks closure of ``nu-hat``, ``DJnu = eps' nu J D``, ``nu J nu = J``,
    ``nu^2 gamma = gamma nu^2`` (even case), the nu-twisted first-order
    condition, and its exchanged form; the two first-order verdicts must agree.
    """
    if t.nu is None:
        raise StructuralError("verify_nu_twisted needs a twist nu")
    rep = VerificationReport(tau=as_tolerance(tol).tau)
    _nu_conditions(t, rep, t.nu)
    return rep


def _rho_closure(t, rho, rep):
    rep.add("rho closure", rho.closure_residual(t.algebra), structural=True)
    if t.algebra.products:
        rep.add("rho multiplicative", rho.multiplicativity_residual(t.algebra), structural=True)


def verify_rho_twisted(t, tol=None):
    """Conditions for a real rho-twisted spectral triple."""
    rho = t.rho
    if rho is None:
        raise StructuralError("verify_rho_twisted needs an automorphism rho")
    rep = VerificationReport(tau=as_tolerance(tol).tau)
    _rho_closure(t, rho, rep)
    if not rep.structural_ok:
        return rep
    alg = t.algebra
    rep.add("rho_star", rho.star_residual(alg))
    _j_sign(t, rep)
    D = t.D
    P = alg.elements
    RP = [rho.image(i, alg) for i in range(len(P))]
    PJ = [antilinear_conjugate(t.J, x) for x in P]
    RPJ = [antilinear_conjugate(t.J, x) for x in RP]
    C = [_tw(D, P[i], RP[i]) for i in range(len(P))]
    r, w = _worst_pair(((i, j), rel_residual(C[i] @ PJ[j], RPJ[j] @ C[i]))
                       for i in range(len(P)) for j in range(len(P)))
    first = rep.add("rho_first_order", r, w)
    E = [_tw(D, PJ[j], RPJ[j]) for j in range(len(P))]
    r, w = _worst_pair(((i, j), rel_residual(E[j] @ P[i], RP[i] @ E[j]))
                       for i in range(len(P)) for j in range(len(P)))
    ex = rep.add("rho_first_order_exchanged", r, w)
    if first.passed != ex.passed:
        rep.flags.append("verdict disagreement between first-order forms")
    return rep


def verify_general_type(t, tol=None, rho=None, nu=None):
    """The ``(nu, rho)``-twisted real structure.

    ``[[D, a]_rho, b]^{pi_J}_{rho o nu-hat^{-2}} = 0`` over spanning pairs,
    with ``nu J nu = J`` and ``D J nu = +/- nu J D`` (best sign reported).
    Missing data default to the trivial twist.
    """
    rep = VerificationReport(tau=as_tolerance(tol).tau)
    d = t.dim
    rho = rho if rho is not None else (t.rho if t.rho is not None else Automorphism.identity(d))
    nu = nu if nu is not None else (t.nu if t.nu is not None else np.eye(d, dtype=np.complex128))
    _rho_closure(t, rho, rep)
    ninv = np.linalg.inv(nu)
    r, w = nu_hat_closure(t, nu)
    rep.add("nu_closure", r, w)
    if not rep.structural_ok:
        return rep
    D, U = t.D, t.J.U
    rep.add("nu_regularity", rel_residual(nu @ U @ np.conj(nu), U))
    lhs = D @ U @ np.conj(nu)
    rhs = nu @ U @ np.conj(D)
    rp, rm = rel_residual(lhs, rhs), rel_residual(lhs, -rhs)
    sign = 1 if rp <= rm else -1
    rep.add("twisted_J_sign", min(rp, rm), note=f"sign={sign:+d}")
    alg = t.algebra
    P = alg.elements
    n2inv = ninv @ ninv
    n2 = nu @ nu
    RP = [rho.image(i, alg) for i in range(len(P))]
    C = [_tw(D, P[i], RP[i]) for i in range(len(P))]
    PJ = [antilinear_conjugate(t.J, x) for x in P]
    outer = [antilinear_conjugate(t.J, rho.apply(n2inv @ x @ n2, alg)) for x in P]
    r, w = _worst_pair(((i, j), rel_residual(C[i] @ PJ[j], outer[j] @ C[i]))
                       for i in range(len(P)) for j in range(len(P)))
    rep.add("general_first_order", r, w)
    return rep


def verify(t, tol=None, mode="auto"):
    """Structural invariants, zero-order, then the first-order family.

    ``mode="auto"`` follows ``t.twist.flavor`` (classical when untwisted).
    Structural failures short-circuit the condition checks.
    """
    tol = as_tolerance(tol)
    rep = structural_checks(t, tol)
    if not rep.structural_ok:
        rep.flags.append("structural failure: conditions not evaluated")
        return rep
    if mode == "auto":
        mode = t.flavor or "classical"
    if mode == "nu_twisted":
        mode = "nu"
    elif mode == "rho_twisted":
        mode = "rho"
    _zero_order(t, rep)
    if mode == "classical":
        _j_sign(t, rep)
        rep.extend(check_first_order_classical(t, tol))
    elif mode == "nu":
        if t.nu is None:
            rep.add("twist nu present", 1.0, structural=True, note="no nu on this triple")
            return rep
        rep.extend(verify_nu_twisted(t, tol))
    elif mode == "rho":
        if t.rho is None:
            rep.add("twist rho present", 1.0, structural=True, note="no rho on this triple")
            return rep
        rep.extend(verify_rho_twisted(t, tol))
    elif mode == "general":
        rep.extend(verify_general_type(t, tol))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if t.meta.get("sign_condition") is False:
        rep.flags.append("sign-condition violated")
    return rep
