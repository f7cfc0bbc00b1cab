import random
from fractions import Fraction

import pytest

from ncdiffop import library as L
from ncdiffop.calculus import module_curvature, omega1_module
from ncdiffop.diffops import act
from ncdiffop.scalar import ONE, ZERO, Scalar, substitute
from ncdiffop.tensors import DiffOp

q = Scalar.var("q")
mu_p, mu_m = Scalar.var("mu_p"), Scalar.var("mu_m")


def test_builtins_load():
    for name in L.BUILTINS:
        spec = L.builtin(name)
        assert spec.name == name
    with pytest.raises(KeyError):
        L.builtin("torus")


def test_substitution_examples():
    n_p, n_m, r = Scalar.var("n_p"), Scalar.var("n_m"), Scalar.var("r")
    assert substitute(-1 - q**2 + n_p * q**4 - r, {"n_p": q**-2 * (1 + q**-2), "r": ZERO}) == ZERO
    assert substitute(1 + n_m + q**2 - q**4 * r, {"n_m": -ONE, "r": q**-2}) == ZERO


# --- flat cases ---------------------------------------------------------------


@pytest.fixture(scope="module")
def coeffs():
    return L.su2q_curvature_coefficients()


def test_generic_connection_is_curved(coeffs):
    assert len(coeffs) == 7


@pytest.mark.parametrize("label", ["a", "b", "c"])
def test_flat_cases(coeffs, label):
    case = next(c for c in L.su2q_flat_cases() if c.label == label)
    assert L.curvature_under(case.bindings, coeffs) == {}


def test_case_a_via_module(su2q):
    case = L.su2q_flat_cases()[0]
    spec = L.su2q_3d(L.Su2qConnectionParams(**case.bindings))
    E = omega1_module(spec)
    assert all(not module_curvature(spec, E, E.basis(a)) for a in range(3))


def test_case_d_verbatim_fails(coeffs):
    """μ₊ = 0 contradicts the product constraint μ₊m₋ = q of this case."""
    case = next(c for c in L.su2q_flat_cases() if c.label == "d")
    assert L.curvature_under(case.bindings, coeffs)


def test_case_d_corrected(coeffs):
    res = L.search_case_d()
    assert res.verbatim_residual
    fix = res.corrected
    assert fix is not None
    assert fix["n_p"] == ZERO and fix["m_p"] == ZERO and fix["n_m"] == -ONE and fix["r"] == q**-2
    assert L.curvature_under(fix, coeffs) == {}


def _perturb(bindings, rng):
    out = dict(bindings)
    key = rng.choice(sorted(out))
    eps = Scalar.coerce(Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)))
    out[key] = out[key] + eps
    return out


def test_perturbations_of_case_b_are_curved(coeffs):
    rng = random.Random(11)
    case = next(c for c in L.su2q_flat_cases() if c.label == "b")
    for _ in range(20):
        assert L.curvature_under(_perturb(case.bindings, rng), coeffs)


# --- matrices and consistency -------------------------------------------------


def test_matrix_rep(su2q):
    rep = L.su2q_matrix_rep()
    n_p, r, n_m = (Scalar.var(v) for v in ("n_p", "r", "n_m"))
    assert [rep["u0"][i][i] for i in range(3)] == [n_p, r, n_m]
    assert all(rep["u+"][i][2] == ZERO for i in range(3))
    assert L.action_matrices(su2q) == [rep["u+"], rep["u0"], rep["u-"]]


def test_matrix_rep_matches_action(su2q):
    E = omega1_module(su2q)
    mats = L.action_matrices(su2q)
    for i in range(3):
        for a in range(3):
            col = {(b,): mats[i][b][a] for b in range(3) if mats[i][b][a]}
            assert dict(act(su2q, E, DiffOp.basis((i,)), E.basis(a)).items()) == col


def test_consistency_equations_match_golden():
    derived = L.su2q_consistency_equations()
    golden = L.su2q_consistency_golden()
    assert len(derived) == len(golden) == 7
    for g in golden:
        assert sum(L.same_up_to_scalar(d, g) for d in derived) == 1


def test_consistency_zero_set_contains_flat_cases(coeffs):
    golden = L.su2q_consistency_golden()
    cases = [c.bindings for c in L.su2q_flat_cases() if c.label != "d"]
    cases.append(L.search_case_d().corrected)
    for b in cases:
        assert all(substitute(g, b) == ZERO for g in golden)


def test_consistency_nonzero_generically():
    assert all(L.su2q_consistency_golden())


def test_relation_matrices_vanish_on_flat_case():
    case = next(c for c in L.su2q_flat_cases() if c.label == "b")
    params = L.Su2qConnectionParams(**case.bindings)
    spec = L.su2q_3d(params)
    rep = L.su2q_matrix_rep(params)
    for M in L.relation_matrices(spec, [rep["u+"], rep["u0"], rep["u-"]]):
        assert all(x == ZERO for row in M for x in row)


def test_same_up_to_scalar():
    a = Scalar.var("r") + q
    assert L.same_up_to_scalar(a, a * q**3 * 2)
    assert not L.same_up_to_scalar(a, a * mu_p)
    assert L.same_up_to_scalar(ZERO, ZERO)
    assert not L.same_up_to_scalar(a, ZERO)


# --- Podleś -------------------------------------------------------------------


def test_podles_sigma(podles):
    s = podles.sigma_inv
    assert s[0][1][1][0] == q**-2 and s[1][0][0][1] == q**2
    assert all(not c for k in podles.christoffel for row in k for c in row)
