"""Acceptance gate: ten criteria, each a function returning ``(ok, detail)``.

Run under pytest for one test per criterion, or directly with
``python tests/test_acceptance.py`` for one PASS/FAIL line each.
"""

import io
import json
import pathlib
import sys
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from nclab import cli  # noqa: E402
from nclab.catalog import (  # noqa: E402
    chiral_point_triple,
    chirality_blocks,
    list_catalog,
    matrix_even_triple,
    two_point_product,
    two_point_triple,
)
from nclab.checks import (  # noqa: E402
    jacobi_sides,
    nu_exchange_residuals,
    verify,
    verify_nu_twisted,
    verify_rho_twisted,
)
from nclab.constructions import (  # noqa: E402
    IncompatibleRealStructure,
    ResolventError,
    TensorSignData,
    block_permutation_unitary,
    classify_type,
    conformal_commutant_twist,
    conformal_factor,
    conformal_nu_twist,
    conformal_rho_twist,
    double,
    kato_condition,
    minimal_nu,
    minimal_twist,
    minimal_untwist,
    normality_residual,
    opposite_triple,
    positive_element,
    replace,
    tensor_product,
    unitary_equivalence_check,
    untwist,
)
from nclab.io import dumps_triple, load_document, loads_document  # noqa: E402
from nclab.operator_core import (  # noqa: E402
    AntilinearOp,
    random_hermitian,
    random_unitary,
    rel_residual,
)

from helpers import violating_perturbation, with_grading_twist  # noqa: E402

GOLDEN = pathlib.Path(__file__).parent / "golden"
SEED = 7
RESULTS = {}


def _exact(a, b):
    return np.array_equal(np.asarray(a), np.asarray(b, dtype=np.complex128))


# 1 -----------------------------------------------------------------------------

def criterion_1():
    tp = two_point_triple()
    displayed = {
        "two-point": (tp, [np.diag([1, 0]), np.diag([0, 1])], np.zeros((2, 2)),
                      np.eye(2), np.diag([1, -1]), [[0, 1], [1, 0]]),
        "tensor-4x4": (two_point_product(chiral_point_triple()),
                       [np.diag([1, 0, 1, 0]), np.diag([0, 1, 0, 1])],
                       [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]],
                       np.eye(4), np.diag([1, -1, -1, 1]),
                       [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]),
    }
    worst, mismatches = 0.0, []
    for name, (t, alg, D, J, g, nu) in displayed.items():
        data = {"pi": all(_exact(x, y) for x, y in zip(t.algebra.elements, alg))
                and len(t.algebra) == len(alg),
                "D": _exact(t.D, D), "J": _exact(t.J.U, J),
                "gamma": _exact(t.gamma, g), "nu": _exact(t.nu, nu)}
        mismatches += [f"{name}.{k}" for k, ok in data.items() if not ok]
        rep = verify_nu_twisted(t)
        if not rep.overall:
            mismatches.append(f"{name}.verify")
        worst = max(worst, rep.worst_residual)
    ok = not mismatches and worst <= 1e-12
    return ok, f"bit-exact data, worst residual {worst:.1e}" if ok else f"mismatch {mismatches}"


# 2 -----------------------------------------------------------------------------

def criterion_2():
    base = matrix_even_triple(2, SEED)
    t = minimal_twist(base)
    rep = verify_rho_twisted(t, 1e-10)
    un, _ = minimal_untwist(t)
    m = base.dim // 2
    nu = minimal_nu(m)
    n2 = un.nu  # the output twist operator is nu^2
    rho_check = rel_residual(nu @ nu, t.rho.witness)
    unitarity = np.linalg.norm(nu @ nu.conj().T - np.eye(base.dim))
    dp, dm = chirality_blocks(base)
    d1, d2 = (dp + dm) / 2, -1j * (dp - dm) / 2
    block = rel_residual(un.D, np.block([[d1, d2], [-d2, d1]]))
    normal = normality_residual(un.D)
    U = base.J.U.copy()
    U[m:, m:] *= -1
    try:
        minimal_untwist(minimal_twist(replace(base, J=AntilinearOp(U))))
        rejected = False
    except IncompatibleRealStructure:
        rejected = True
    ok = (rep.overall and rho_check == 0.0 and rel_residual(n2, nu @ nu) == 0.0
          and unitarity <= 1e-14 and block <= 1e-12 and normal <= 1e-12 and rejected)
    return ok, (f"rho-twisted worst {rep.worst_residual:.1e}, nu^2-rho {rho_check:.1e}, "
                f"||nu nu*-I|| {unitarity:.1e}, block {block:.1e}, normality {normal:.1e}, "
                f"J+=-J- rejected {rejected}")


# 3 -----------------------------------------------------------------------------

def criterion_3():
    base = matrix_even_triple(2, SEED)
    _, diagonal = minimal_untwist(minimal_twist(base))
    d = double(diagonal)
    target = two_point_product(matrix_even_triple(2, SEED, upper="plus"))
    W = block_permutation_unitary([1, 4, 3, 2], d.dim)
    rep = unitary_equivalence_check(d, target, W, tol=1e-12, compare_twist="nu_squared")
    detail = ", ".join(f"{c.name} {c.residual:.1e}" for c in rep.checks)
    return rep.overall, detail


# 4 -----------------------------------------------------------------------------

def criterion_4(pairs=50):
    failures, worst_D = [], 0.0
    flips_in = flips_out = 0
    for s in range(pairs):
        base = matrix_even_triple(2, 100 + s)
        u = positive_element(base, s)
        f = conformal_factor(base, u)
        t = conformal_rho_twist(base, u)
        nu = f.k_prime @ np.linalg.inv(f.k)
        out = untwist(t, nu)
        if not verify_nu_twisted(out).overall:
            failures.append(s)
        kp2 = f.k_prime @ f.k_prime
        worst_D = max(worst_D, rel_residual(out.D, kp2 @ base.D @ kp2))

        rng = np.random.default_rng(s)
        # input side: break the rho-twisted condition, untwist, expect a nu-twisted failure
        bad_in = replace(t, D=t.D + violating_perturbation(t, rng))
        if not verify(bad_in).overall and not verify_nu_twisted(untwist(bad_in, nu)).overall:
            flips_in += 1
        # output side: break the nu-twisted condition, twist back, expect a rho failure
        bad_out = replace(out, D=out.D + violating_perturbation(out, rng))
        ninv = np.linalg.inv(nu)
        back = replace(t, D=ninv @ bad_out.D @ ninv)
        if not verify(bad_out).overall and not verify_rho_twisted(back).overall:
            flips_out += 1
    ok = not failures and worst_D <= 1e-10 and flips_in == pairs and flips_out == pairs
    return ok, (f"{pairs - len(failures)}/{pairs} untwists pass, D residual {worst_D:.1e}, "
                f"verdict flips {flips_in}/{pairs} input side, {flips_out}/{pairs} output side")


# 5 -----------------------------------------------------------------------------

def criterion_5(instances=200):
    rng = np.random.default_rng(2024)
    worst = worst_rhs = 0.0

    def mat(n):
        return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))

    for _ in range(instances):
        n = int(rng.integers(1, 7))
        T, x, ax, y, by = (mat(n) for _ in range(5))
        lhs, rhs = jacobi_sides(T, x, ax, y, by)
        worst = max(worst, rel_residual(lhs, rhs))
        # zero-order pair: x, ax commute with y, by (simultaneously diagonal)
        S = random_unitary(n, rng)
        x, ax, y, by = (S @ np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n))
                        @ S.conj().T for _ in range(4))
        worst_rhs = max(worst_rhs, np.linalg.norm(jacobi_sides(T, x, ax, y, by)[1]))
    ok = worst <= 1e-12 and worst_rhs <= 1e-12
    return ok, f"{instances} instances, lhs/rhs {worst:.1e}, zero-order rhs norm {worst_rhs:.1e}"


# 6 -----------------------------------------------------------------------------

def criterion_6():
    agree, exch, opp = True, 0.0, True
    names = []
    for e in list_catalog():
        t = e.triple
        if t.flavor != "nu_twisted":
            continue
        names.append(e.name)
        rep = verify_nu_twisted(t)
        agree &= rep.get("nu_first_order").passed == rep.get("nu_first_order_exchanged").passed
        bad = replace(t, D=t.D + violating_perturbation(t, np.random.default_rng(1)))
        rb = verify_nu_twisted(bad)
        agree &= rb.get("nu_first_order").passed == rb.get("nu_first_order_exchanged").passed
        exch = max(exch, max(nu_exchange_residuals(t)))
        opp &= verify(opposite_triple(t), mode="general").overall
    ok = agree and exch <= 1e-12 and opp
    return ok, (f"{len(names)} entries: verdicts agree {agree}, exchange worst {exch:.1e}, "
                f"opposite passes {opp}")


# 7 -----------------------------------------------------------------------------

def criterion_7():
    base, point = matrix_even_triple(2, SEED), chiral_point_triple(0.8)
    s = TensorSignData(1, 1)
    lines, ok = [], True
    for g1 in (False, True):
        for g2 in (False, True):
            t1, t2 = with_grading_twist(base, g1), with_grading_twist(point, g2)
            lhs = s.alpha * t2.signs.eps_prime
            rhs = s.alpha * t1.signs.eps_prime * s.beta * t1.signs.eps_dprime
            rep = verify(tensor_product(t1, t2, s, s))
            worst = rep.worst_residual
            expected = lhs == rhs
            ok &= rep.overall == expected and (expected or worst >= 1e-3)
            lines.append(f"({lhs:+d},{rhs:+d}) {'pass' if rep.overall else 'fail'} {worst:.1e}")
    return ok, "; ".join(lines)


# 8 -----------------------------------------------------------------------------

def criterion_8():
    base = matrix_even_triple(2, SEED)
    u = positive_element(base, 3)
    rows = [classify_type(c(base, u)).row
            for c in (conformal_nu_twist, conformal_rho_twist, conformal_commutant_twist)]
    expected = ["nu_twisted_real_structure", "real_rho_twisted",
                "twisted_with_untwisted_first_order"]
    return rows == expected, ", ".join(rows)


# 9 -----------------------------------------------------------------------------

def criterion_9():
    rng = np.random.default_rng(SEED)
    Dt = random_hermitian(6, rng) + 0.2 * np.eye(6)
    nu = random_unitary(6, rng)
    holds, value = kato_condition(Dt, nu, 0.0, 0.0)
    try:
        kato_condition(Dt, nu, w=np.linalg.eigvalsh(Dt)[2], z=0.0)
        raised = False
    except ResolventError:
        raised = True
    ok = holds and value == 0.0 and raised
    return ok, f"w=z=0 holds {holds} with value {value}, eigenvalue w raises {raised}"


# 10 ----------------------------------------------------------------------------

def criterion_10():
    drift = []
    for e in list_catalog():
        text = dumps_triple(e.triple)
        doc = loads_document(text)
        if dumps_triple(doc.triple, doc.tolerance) != text:
            drift.append(e.name)
    manifest = json.loads((GOLDEN / "manifest.json").read_text())
    wrong = []
    for name, expected in manifest.items():
        path = str(GOLDEN / f"{name}.json")
        with redirect_stdout(io.StringIO()), redirect_stderr(io.StringIO()):
            code = cli.main(["verify", path, "--format", "json"])
        try:
            verdict = cli.report_exit_code(verify(load_document(path, check=False).triple))
        except Exception:
            verdict = 2
        if code != expected or code != verdict:
            wrong.append(f"{name}: {code}")
    ok = not drift and not wrong and len(manifest) == 12
    return ok, (f"{len(list_catalog())} entries byte-identical, {len(manifest)} golden cases"
                if ok else f"drift {drift}, wrong {wrong}")


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, detail = CRITERIA[n]()
    RESULTS[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    sys.exit(1 if failed else 0)
