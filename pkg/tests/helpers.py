"""Shared test data builders."""

import numpy as np

from nclab.constructions import replace
from nclab.operator_core import antilinear_conjugate, random_hermitian
from nclab.triple import KOSigns, TwistSpec


def violating_perturbation(t, rng, size=0.3):
    """Hermitian, grading-odd and ``J``-compatible, but generic otherwise."""
    E = random_hermitian(t.dim, rng)
    if t.gamma is not None:
        E = (E - t.gamma @ E @ t.gamma) / 2
    E = (E + t.signs.eps_prime * antilinear_conjugate(t.J, E)) / 2
    return size * E


def with_grading_twist(t, use_gamma):
    """``t`` with twist ``nu = I`` or ``nu = gamma``; the latter flips ``eps'``."""
    if not use_gamma:
        return replace(t, twist=TwistSpec("nu_twisted", nu=np.eye(t.dim, dtype=np.complex128)))
    s = t.signs
    return replace(t, twist=TwistSpec("nu_twisted", nu=t.gamma),
                   signs=KOSigns(s.eps, -s.eps_prime, s.eps_dprime))
