"""The twelve acceptance criteria, one PASS/FAIL line each.

Run under pytest (the lines are collected into the terminal summary) or
directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import io
import random
import sys
from contextlib import redirect_stdout
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from ncdiffop import cli
from ncdiffop import holomorphic as H
from ncdiffop import library as L
from ncdiffop import suites as S
from ncdiffop.calculus import omega1_module, trivial_module
from ncdiffop.diffops import act_function, bullet, da_relations, expand_words, phi, relation_words, symbol
from ncdiffop.scalar import ONE, ZERO, Scalar, parse_scalar, render, substitute
from ncdiffop.tensors import DiffOp, TensorField

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

q = Scalar.var("q")


def _suite_ok(res) -> tuple[bool, str]:
    bad = [c.label for c in res.checks if not c.ok]
    return not bad, "; ".join(bad) or f"{len(res.checks)} checks"


# ---------------------------------------------------------------------------


def crit_1():
    """su2q relations from the CLI, exactly as displayed, with grade-1 corrections."""
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(["relations", "--builtin", "su2q", "--json"])
    doc = json.loads(buf.getvalue())
    # q³u₀ = u₋•u₊ − q²u₊•u₋ and ∓q^{±2}(1+q⁻²)u± = u₀•u± − q^{±4}u±•u₀, as LHS − RHS
    golden = [
        {(1,): q**3, (2, 0): -ONE, (0, 2): q**2},
        {(0,): -q**2 * (1 + q**-2), (1, 0): -ONE, (0, 1): q**4},
        {(2,): q**-2 * (1 + q**-2), (1, 2): -ONE, (2, 1): q**-4},
    ]
    names = L.SU2Q_PARAMETERS
    got = [{tuple(w): parse_scalar(c, names) for w, c in r["words"]} for r in doc["relations"]]
    spec = L.su2q_3d()
    rels = da_relations(spec, cross_check=True)
    expanded = [expand_words(spec, w) for w in relation_words(spec)]
    corrections = [r.part(1) for r in rels]
    mu_dependent = all({"mu_p", "mu_m", "n_p", "n_m", "m_p", "m_m"} & c.free_vars() for t in corrections for c in t.comps.values())
    ok = code == 0 and got == golden and expanded == list(rels) and mu_dependent
    return ok, f"{len(got)} relations; grade-1 parts " + ", ".join(
        render(next(iter(t.comps.values()))) for t in corrections
    )


CURVATURE_GOLDEN = {
    (0, 0, 0): "n_p*q^3 - mu_m*m_p",
    (0, 1, 1): "m_p*(-q^2*(1+q^-2) + n_p*q^4 - r)",
    (2, 0, 2): "n_m*q^3 + q^2*mu_p*m_m",
    (2, 2, 1): "m_m*(q^-2*(1+q^-2) + n_m*q^-4 - r)",
    (1, 0, 1): "r*q^3 - mu_p*m_m + mu_m*m_p*q^2",
    (1, 1, 2): "mu_p*(-q^2*(1+q^-2) + r*q^4 - n_m)",
    (1, 2, 0): "mu_m*(q^-2*(1+q^-2) + r*q^-4 - n_p)",
}


def crit_2():
    """Every displayed curvature coefficient, exactly."""
    got = L.su2q_curvature_coefficients()
    want = {k: parse_scalar(v, L.SU2Q_PARAMETERS) for k, v in CURVATURE_GOLDEN.items()}
    bad = [k for k in set(got) | set(want) if got.get(k, ZERO) != want.get(k, ZERO)]
    return not bad, f"{len(want)} coefficients" if not bad else f"mismatch at {sorted(bad)}"


def crit_3():
    """Cases (a)–(c) flat, case (d) verbatim reported, 20 perturbations of (b) curved."""
    coeffs = L.su2q_curvature_coefficients()
    cases = {c.label: c for c in L.su2q_flat_cases()}
    abc = all(not L.curvature_under(cases[k].bindings, coeffs) for k in "abc")
    d_flat = not L.curvature_under(cases["d"].bindings, coeffs)
    rng = random.Random(3)
    curved = 0
    for _ in range(20):
        b = dict(cases["b"].bindings)
        key = rng.choice(sorted(b))
        b[key] = b[key] + Scalar.coerce(Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)))
        curved += bool(L.curvature_under(b, coeffs))
    fix = L.search_case_d().corrected
    detail = (
        f"(a)(b)(c) flat={abc}; (d) verbatim {'PASS' if d_flat else 'FAIL (not flat)'}"
        f"; corrected (d) flat={fix is not None}; perturbations curved {curved}/20"
    )
    return abc and curved == 20, detail


def crit_4():
    """Derived matrix constraints = the seven displayed polynomials; flat cases solve them."""
    derived, golden = L.su2q_consistency_equations(), L.su2q_consistency_golden()
    match = len(derived) == len(golden) == 7 and all(
        sum(L.same_up_to_scalar(d, g) for d in derived) == 1 for g in golden
    )
    flats = [c.bindings for c in L.su2q_flat_cases() if c.label != "d"] + [L.search_case_d().corrected]
    zero = all(not substitute(g, b) for g in golden for b in flats)
    return match and zero, f"{len(derived)} derived, matched={match}, flat cases in zero set={zero}"


def crit_5():
    """𝓡▷e = R_E(e) for E = Ω¹ on the plane and on generic su2q."""
    results = [S.suite_curvature_op(s) for s in (L.classical_plane(), L.su2q_3d())]
    oks = [_suite_ok(r) for r in results]
    return all(o for o, _ in oks), "; ".join(d for _, d in oks)


def crit_6():
    """Classical relations and the composed-operator oracle."""
    spec = L.classical_plane()
    rels = da_relations(spec)
    Dx, Dy = DiffOp.basis((0,)), DiffOp.basis((1,))
    commutator = bullet(spec, Dy, Dx) - bullet(spec, Dx, Dy)
    rel_ok = len(rels) == 1 and (rels[0] == commutator or rels[0] == -commutator)
    rng = random.Random(6)
    bad = 0
    for _ in range(20):
        v, w = S.random_diffop(spec, rng, 2), S.random_diffop(spec, rng, 2)
        vw = bullet(spec, v, w)
        for _ in range(20):
            f = S.random_polynomial(spec, rng, 4)
            if act_function(spec, vw, f) != S.classical_action(spec, v, S.classical_action(spec, w, f)):
                bad += 1
    return rel_ok and not bad, f"relation = ±(∂y•∂x − ∂x•∂y): {rel_ok}; oracle failures {bad}/400"


def crit_7():
    """Associativity and the action law on both classical backends."""
    out = []
    for s in (L.classical_plane(), L.classical_complex_plane()):
        out.append(_suite_ok(S.suite_associativity(s, trials=50)))
        out.append(_suite_ok(S.suite_action(s, trials=50)))
    return all(o for o, _ in out), "; ".join(d for _, d in out)


def crit_8():
    """Relations annihilate flat modules and detect a curved line module."""
    out = [_suite_ok(S.suite_relations_annihilate(s)) for s in (L.classical_plane(), L.su2q_3d())]
    return all(o for o, _ in out), "; ".join(d for _, d in out)


def crit_9():
    """ϑ product law and ideal stability on the plane with E = Ω¹."""
    return _suite_ok(S.suite_theta(L.classical_plane(), trials=20))


def crit_10():
    """Nice connections, holomorphic vector fields, factorization, holomorphic operators."""
    cplane = L.classical_complex_plane()
    nice = [H.nice_connection(s, H.HoloConnectionPair()) for s in (cplane, L.podles_base())]
    nice_ok = all(all(H.nice_conclusions(s).values()) for s in nice)
    rng = random.Random(10)
    z, zb = Scalar.var("z"), Scalar.var("zb")
    holo_ok = True
    for k in range(20):
        f = Scalar.coerce(rng.randint(-3, 3))
        for _ in range(rng.randint(1, 3)):
            f = f + rng.randint(-4, 4) * z ** rng.randint(0, 3) * (zb ** rng.randint(0, 2) if k % 2 else ONE)
        v = TensorField(("v",), {(0,): f}) if f else TensorField(("v",))
        holo_ok &= H.holo_vec_check(cplane, v) == (not f.diff("zb"))
    fact_ok = True
    for E in (trivial_module(cplane), omega1_module(cplane)):
        for n in range(4):
            fact_ok &= H.factorization_holds(cplane, E, n, S.random_element(cplane, E, rng))
    reps = [H.holo_op_tests(s, pairs=20) for s in nice]
    ops_ok = all(r.ok and r.pairs == 20 for r in reps)
    detail = f"nice (i)-(iii)={nice_ok}; holo_vec oracle={holo_ok}; factorization n≤3={fact_ok}; operator pairs ok={ops_ok}"
    return nice_ok and holo_ok and fact_ok and ops_ok, detail


def crit_11():
    """φ of random antisymmetric (1,0) tensors stays in Vec^{1,0}."""
    spec = L.classical_complex_plane()
    rng = random.Random(11)
    hits = 0
    for _ in range(20):
        a, b = (S.random_coeff(spec, rng) for _ in range(2))
        u = TensorField(("v",), {(0,): a}) if a else TensorField(("v",))
        w = TensorField(("v",), {(0,): b}) if b else TensorField(("v",))
        x = [(u, w), (w.scale(-1), u)]
        hits += H.nn_bracket_check(spec, x) and H.in_vec10(spec, phi(spec, x))
    return hits == 20, f"{hits}/20 in Vec^(1,0)"


def crit_12():
    """Symbols of the su2q relations and multiplicativity."""
    spec = L.su2q_3d()
    match = S.su2q_symbol_relations_match(spec)
    mult = [_suite_ok(S.suite_symbols(s, trials=50)) for s in (spec, L.classical_plane())]
    return match and all(o for o, _ in mult), f"relation symbols match={match}; " + "; ".join(d for _, d in mult)


CRITERIA = [
    (1, "DA relations, quantum SU(2)", crit_1),
    (2, "curvature family", crit_2),
    (3, "zero-curvature classification", crit_3),
    (4, "consistency equations", crit_4),
    (5, "curvature as operator", crit_5),
    (6, "classical sanity", crit_6),
    (7, "algebra laws", crit_7),
    (8, "flat-module action", crit_8),
    (9, "crossing map", crit_9),
    (10, "complex layer", crit_10),
    (11, "Newlander-Nirenberg bracket", crit_11),
    (12, "symbols", crit_12),
]


def run(n: int) -> tuple[bool, str]:
    _, title, fn = CRITERIA[n - 1]
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported as such
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return ok, f"{'PASS' if ok else 'FAIL'}  criterion {n:2d} ({title}): {detail}"


@pytest.mark.parametrize("n", [c[0] for c in CRITERIA])
def test_criterion(n):
    ok, line = run(n)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    lines = [run(n) for n, _, _ in CRITERIA]
    for _, line in lines:
        print(line, flush=True)
    sys.exit(0 if all(ok for ok, _ in lines) else 1)
