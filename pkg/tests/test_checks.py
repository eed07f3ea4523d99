import numpy as np
import pytest

from nclab.catalog import list_catalog
from nclab.checks import (
    check_first_order_classical,
    check_zero_order,
    jacobi_residual,
    jacobi_sides,
    nu_exchange_residuals,
    structural_checks,
    twisted_commutator,
    verify,
    verify_general_type,
    verify_nu_twisted,
    verify_rho_twisted,
)
from nclab.constructions import minimal_twist, replace
from nclab.operator_core import AntilinearOp
from nclab.triple import (
    AlgebraPresentation,
    Automorphism,
    FiniteSpectralTriple,
    KOSigns,
    StructuralError,
    TwistSpec,
)

import oracles
from helpers import violating_perturbation


def test_catalog_entries_pass():
    for e in list_catalog():
        assert verify(e.triple).overall, e.name


def test_first_order_matches_bruteforce(base, rng):
    assert check_first_order_classical(base).get("first_order").residual == 0.0
    assert oracles.first_order_bruteforce(base.D, base.algebra.elements, base.J.U, 1) < 1e-13
    bad = replace(base, D=base.D + violating_perturbation(base, rng))
    rep = verify(bad)
    worst = oracles.first_order_bruteforce(bad.D, bad.algebra.elements, bad.J.U, 1)
    c = rep.get("first_order")
    assert not c.passed and c.residual == pytest.approx(worst, rel=1e-9)
    assert c.witness is not None and len(c.witness) == 2
    assert rep.get("J_sign").passed and rep.get("zero_order").passed


def test_zero_order_failure():
    # M_2 acting on C^2 with complex conjugation: J a J^-1 = conj(a) does not commute
    units = []
    for i in range(2):
        for j in range(2):
            E = np.zeros((2, 2))
            E[i, j] = 1
            units.append(E)
    t = FiniteSpectralTriple(AlgebraPresentation(tuple(units)), np.zeros((2, 2)),
                             AntilinearOp(np.eye(2)), KOSigns(1, 1))
    c = check_zero_order(t).get("zero_order")
    assert not c.passed and c.residual > 0.1


def test_wrong_eps_prime(chiral):
    t = replace(chiral, signs=KOSigns(1, -1, 1))
    assert not verify(t).get("J_sign").passed


def test_gamma_not_involutive(chiral):
    t = replace(chiral, gamma=np.diag([1.0, -2.0]))
    rep = verify(t)
    bad = rep.first_failure()
    assert bad.name == "gamma involutive" and bad.note == "gamma not involutive"
    assert "structural failure: conditions not evaluated" in rep.flags
    assert rep.checks == []


def test_non_self_adjoint_flagged(chiral):
    t = replace(chiral, D=np.array([[0, 1], [2, 0]]))
    assert not structural_checks(t).get("D self-adjoint").passed
    # opting out of self-adjointness leaves a structurally valid triple
    assert structural_checks(replace(t, self_adjoint=False)).structural_ok


def test_twisted_commutator_and_choices(two_point):
    T = np.array([[0, 1], [1, 0]], dtype=complex)
    flip = Automorphism.implemented(T)
    # [T, e1]_flip = T e1 - e2 T = 0 because T implements the flip
    assert np.allclose(twisted_commutator(T, two_point, 0, flip), 0)
    assert not np.allclose(twisted_commutator(T, two_point, 0), 0)
    assert np.allclose(twisted_commutator(T, two_point, 0, flip, "conjugated"), 0)
    with pytest.raises(ValueError):
        twisted_commutator(T, two_point, 0, pi_choice="sideways")
    with pytest.raises(IndexError):
        twisted_commutator(T, two_point, 5)


def test_jacobi_sides_match_monomials(rng):
    for n in (1, 3, 5):
        T, x, ax, y, by = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                           for _ in range(5))
        lhs, rhs = jacobi_sides(T, x, ax, y, by)
        np.testing.assert_allclose(lhs, oracles.jacobi_monomials(T, x, ax, y, by), atol=1e-12)
        assert oracles.residual(lhs, rhs) < 1e-14


def test_jacobi_on_triple_vanishes_under_zero_order(base):
    flip = Automorphism.identity(base.dim)
    lhs, rhs, r = jacobi_residual(base.D, base, 1, 2, flip, flip)
    assert r < 1e-14 and np.linalg.norm(rhs) < 1e-12


class TestNuTwisted:
    def test_two_point(self, two_point):
        rep = verify_nu_twisted(two_point)
        assert rep.overall
        assert {c.name for c in rep.checks} >= {"nu_closure", "twisted_J_sign", "nu_regularity",
                                                "nu2_grading", "nu_first_order",
                                                "nu_first_order_exchanged"}

    def test_regularity_failure(self, two_point):
        t = replace(two_point, twist=TwistSpec("nu_twisted", nu=np.diag([1.0, 2.0])))
        rep = verify(t)
        assert not rep.get("nu_regularity").passed

    def test_closure_failure_is_structural(self):
        alg = AlgebraPresentation((np.diag([1.0, 0]), np.diag([0, 1.0])))
        H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        t = FiniteSpectralTriple(alg, np.zeros((2, 2)), AntilinearOp(np.eye(2)), KOSigns(1, 1),
                                 twist=TwistSpec("nu_twisted", nu=H))
        rep = verify(t)
        assert not rep.structural_ok
        assert rep.get("nu_hat defined").note == "nu pi(a) nu^-1 leaves the span"

    def test_exchange_identity(self):
        for e in list_catalog():
            if e.triple.flavor == "nu_twisted":
                assert max(nu_exchange_residuals(e.triple)) <= 1e-12

    def test_needs_nu(self, chiral):
        with pytest.raises(StructuralError):
            verify_nu_twisted(chiral)
        rep = verify(chiral, mode="nu")
        assert rep.get("twist nu present").note == "no nu on this triple"


def test_rho_twisted(base):
    t = minimal_twist(base)
    rep = verify_rho_twisted(t)
    assert rep.overall and rep.get("rho_star").passed
    with pytest.raises(StructuralError):
        verify_rho_twisted(base)
    assert not verify(base, mode="rho").structural_ok


def test_rho_closure_structural(two_point):
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    t = replace(two_point, twist=TwistSpec("rho_twisted", rho=Automorphism.implemented(H)))
    rep = verify(t)
    assert not rep.structural_ok and rep.first_failure().name == "rho closure"


def test_general_with_trivial_twist_is_classical(base):
    rep = verify_general_type(base)
    assert rep.overall
    assert rep.get("general_first_order").residual == 0.0


def test_unknown_mode(base):
    with pytest.raises(ValueError):
        verify(base, mode="quantum")
