"""Named verification suites shared by the CLI, the scripts and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .calculus import (
    CalculusSpec,
    ModuleConnection,
    module_curvature,
    omega1_module,
    trivial_module,
)
from .diffops import (
    act,
    act_function,
    bullet,
    curvature_element,
    da_relations,
    symbol,
    theta,
    theta_product_rhs,
    theta_relation_check,
)
from .scalar import ONE, ZERO, Scalar
from .tensors import DiffOp, TensorField


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    spec: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(label, bool(ok), detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "spec": self.spec,
            "ok": self.ok,
            "checks": [{"label": c.label, "ok": c.ok, "detail": c.detail} for c in self.checks],
        }


# ---------------------------------------------------------------------------
# sampling


def random_coeff(spec: CalculusSpec, rng: random.Random, degree: int = 2) -> Scalar:
    """Small random polynomial in the coordinates, or a random rational."""
    coords = spec.algebra.coordinate_vars
    c = Scalar.coerce(rng.randint(-3, 3))
    if not coords:
        return c + Scalar.coerce(rng.randint(1, 4)) / rng.randint(1, 3)
    for _ in range(rng.randint(0, 2)):
        t = Scalar.coerce(rng.randint(-3, 3))
        budget = degree
        for x in coords:
            e = rng.randint(0, budget)
            budget -= e
            t = t * Scalar.var(x) ** e
        c = c + t
    return c


def random_diffop(spec: CalculusSpec, rng: random.Random, max_grade: int = 2, degree: int = 2) -> DiffOp:
    acc: dict = {}
    for _ in range(rng.randint(1, 4)):
        n = rng.randint(0, max_grade)
        idx = tuple(rng.randrange(spec.n1) for _ in range(n))
        c = random_coeff(spec, rng, degree)
        acc[idx] = acc[idx] + c if idx in acc else c
    out = DiffOp.build(acc)
    return out if out else DiffOp.basis((0,) * max_grade)


def random_polynomial(spec: CalculusSpec, rng: random.Random, degree: int = 4) -> Scalar:
    coords = spec.algebra.coordinate_vars
    out = ZERO
    for _ in range(rng.randint(1, 4)):
        t = Scalar.coerce(rng.randint(-5, 5))
        budget = rng.randint(0, degree)
        for x in coords:
            e = rng.randint(0, budget)
            budget -= e
            t = t * Scalar.var(x) ** e
        out = out + t
    return out


def default_module(spec: CalculusSpec) -> ModuleConnection:
    """The algebra itself when it has coordinates, otherwise Ω¹ with Γ."""
    if spec.algebra.kind == "commutative_polynomial":
        return trivial_module(spec)
    return omega1_module(spec)


def random_element(spec: CalculusSpec, E: ModuleConnection, rng: random.Random) -> TensorField:
    return E.element({a: random_coeff(spec, rng) for a in range(E.rank)})


# ---------------------------------------------------------------------------
# classical oracle


def classical_action(spec: CalculusSpec, v: DiffOp, f: Scalar) -> Scalar:
    """Composed partial derivatives, for coordinate calculi with d-table = identity."""
    coords = spec.algebra.coordinate_vars
    total = ZERO
    for idx, c in v.items():
        g = f
        for i in idx:
            g = g.diff(coords[i])
        total = total + c * g
    return total


def _is_coordinate_calculus(spec: CalculusSpec) -> bool:
    alg = spec.algebra
    n = len(alg.coordinate_vars)
    return (
        alg.kind == "commutative_polynomial"
        and n == spec.n1
        and all(alg.derivation_table[i][j] == (ONE if i == j else ZERO) for i in range(n) for j in range(n))
        and spec.christoffel is not None
        and all(not x for plane in spec.christoffel for row in plane for x in row)
    )


# ---------------------------------------------------------------------------
# suites


def suite_associativity(spec: CalculusSpec, trials: int = 50, seed: int = 0) -> SuiteResult:
    res = SuiteResult("associativity", spec.name)
    rng = random.Random(seed)
    bad = 0
    for _ in range(trials):
        u, v, w = (random_diffop(spec, rng) for _ in range(3))
        if bullet(spec, bullet(spec, u, v), w) != bullet(spec, u, bullet(spec, v, w)):
            bad += 1
    res.add(f"(u•v)•w = u•(v•w) on {trials} triples", not bad, f"{bad} failures")
    return res


def suite_action(spec: CalculusSpec, trials: int = 50, seed: int = 0) -> SuiteResult:
    res = SuiteResult("action", spec.name)
    rng = random.Random(seed)
    E = default_module(spec)
    bad = 0
    for _ in range(trials):
        v, w = random_diffop(spec, rng), random_diffop(spec, rng)
        e = random_element(spec, E, rng)
        if act(spec, E, bullet(spec, v, w), e) != act(spec, E, v, act(spec, E, w, e)):
            bad += 1
    res.add(f"(v•w)▷e = v▷(w▷e) on {trials} pairs, E = {E.name}", not bad, f"{bad} failures")
    if _is_coordinate_calculus(spec):
        bad = 0
        for _ in range(min(trials, 20)):
            v, w = random_diffop(spec, rng), random_diffop(spec, rng)
            f = random_polynomial(spec, rng)
            lhs = act_function(spec, bullet(spec, v, w), f)
            if lhs != classical_action(spec, v, classical_action(spec, w, f)):
                bad += 1
        res.add("(v•w)▷f matches composed partial derivatives", not bad, f"{bad} failures")
    return res


def suite_curvature_op(spec: CalculusSpec, seed: int = 0) -> SuiteResult:
    res = SuiteResult("curvature-op", spec.name)
    curvature_element(spec)
    for E in (omega1_module(spec),) + ((trivial_module(spec),) if spec.algebra.kind != "constants" else ()):
        R = curvature_element(spec)
        for a in range(E.rank):
            e = E.basis(a)
            lhs = {}
            for k, D in R.comps.items():
                for (b,), c in act(spec, E, D, e).items():
                    lhs[(k, b)] = c
            rhs = dict(module_curvature(spec, E, e).items())
            res.add(f"𝓡▷e_{a} = R_E(e_{a}), E = {E.name}", lhs == rhs)
    return res


def flat_modules(spec: CalculusSpec) -> list[ModuleConnection]:
    out = []
    if spec.algebra.kind == "commutative_polynomial":
        out.append(trivial_module(spec))
    E = omega1_module(spec)
    if all(not module_curvature(spec, E, E.basis(a)) for a in range(E.rank)):
        out.append(E)
    return out


def curving_line_module(spec: CalculusSpec) -> ModuleConnection | None:
    """A rank-1 module ∇e = a ξ_k ⊗ e with nonzero curvature, if one of the simple choices works."""
    coords = spec.algebra.coordinate_vars
    choices = [Scalar.var(x) for x in coords] + [ONE]
    for a in choices:
        for k in range(spec.n1):
            nab = TensorField(("f", "e"), {(k, 0): a})
            E = ModuleConnection(1, (nab,), name=f"line(∇e = {a}·ξ{k}⊗e)")
            if module_curvature(spec, E, E.basis(0)):
                return E
    return None


def suite_relations_annihilate(spec: CalculusSpec, seed: int = 0, trials: int = 10) -> SuiteResult:
    res = SuiteResult("relations-annihilate", spec.name)
    rng = random.Random(seed)
    target = spec
    mods = flat_modules(spec)
    if not mods and spec.name == "su2q":
        from . import library as L

        case = next(c for c in L.su2q_flat_cases() if c.label == "b")
        free = {"mu_p": ONE, "mu_m": ONE}
        vals = {k: L.substitute(v, free) for k, v in case.bindings.items()}
        vals.update(free)
        target = L.su2q_3d(L.Su2qConnectionParams(**vals))
        mods = flat_modules(target)
        res.add("Ω¹ is flat for case (b) with μ± = 1", bool(mods))
    if not mods:
        res.add("a flat module is available", False, "Ω¹ is curved and A has no coordinates")
    rels = list(da_relations(target))
    # without σ⁻¹ the • product beyond grade 2 is unavailable, so only R̂ ▷ e is tested
    sandwich = target.sigma_inv is not None
    for E in mods:
        bad = 0
        for g in rels:
            for _ in range(trials):
                e = random_element(target, E, rng)
                op = g
                if sandwich:
                    x, y = random_diffop(target, rng, 1), random_diffop(target, rng, 1)
                    op = bullet(target, bullet(target, x, g), y)
                if act(target, E, op, e):
                    bad += 1
        what = "x•R̂•y" if sandwich else "R̂"
        res.add(f"{what} ▷ e = 0 on flat E = {E.name}", not bad, f"{bad} failures")
    L1 = curving_line_module(spec)
    if L1 is not None:
        e = L1.basis(0)
        hit = any(act(spec, L1, g, e) for g in da_relations(spec))
        res.add(f"some relation acts nontrivially on the curved {L1.name}", hit)
    return res


def suite_theta(spec: CalculusSpec, trials: int = 20, seed: int = 0) -> SuiteResult:
    res = SuiteResult("theta", spec.name)
    rng = random.Random(seed)
    E = omega1_module(spec)
    bad = 0
    for _ in range(trials):
        u, v = random_diffop(spec, rng, 1), random_diffop(spec, rng, 2)
        e = random_element(spec, E, rng)
        if theta(spec, E, bullet(spec, u, v), e) != theta_product_rhs(spec, E, u, v, e):
            bad += 1
    res.add(f"ϑ product law on {trials} instances", not bad, f"{bad} failures")
    rep = theta_relation_check(spec, E)
    res.add("ϑ(R̂⊗e) closed formula", rep.prop_identity)
    res.add(f"ideal stable under ϑ up to grade 3 ({rep.checked} legs)", rep.ideal_stable)
    return res


def suite_symbols(spec: CalculusSpec, trials: int = 50, seed: int = 0) -> SuiteResult:
    res = SuiteResult("symbols", spec.name)
    rng = random.Random(seed)
    grade = 2 if spec.sigma_inv is not None else 1
    bad = 0
    for _ in range(trials):
        v, w = random_diffop(spec, rng, grade), random_diffop(spec, rng, 1)
        if symbol(bullet(spec, v, w)) != symbol(v).tensor(symbol(w)):
            bad += 1
    res.add(f"symbol(v•w) = symbol(v)⊗symbol(w) on {trials} pairs", not bad, f"{bad} failures")
    if spec.name == "su2q":
        ok = su2q_symbol_relations_match(spec)
        res.add("relation symbols match the quadratic q-commutation relations", ok)
    return res


def su2q_symbol_relations_match(spec: CalculusSpec) -> bool:
    from .library import su2q_symbol_relations

    golden = su2q_symbol_relations()
    got = [symbol(r) for r in da_relations(spec)]
    return all(any(_proportional(g, s) for s in got) for g in golden) and len(got) == len(golden)


def _proportional(a: TensorField, b: TensorField) -> bool:
    if set(a.comps) != set(b.comps) or a.slots != b.slots:
        return False
    k0 = next(iter(a.comps))
    r = a.comps[k0] / b.comps[k0]
    return all(a.comps[k] == r * b.comps[k] for k in a.comps) and r.free_vars() <= {"q"}


def suite_complex(spec: CalculusSpec, seed: int = 0) -> SuiteResult:
    from . import holomorphic as H

    res = SuiteResult("complex", spec.name)
    dec = H.decompose(spec)
    n = spec.n1
    from . import linalg

    res.add("p10 + p01 = id, p10·p01 = 0", linalg.matadd(dec.p10, dec.p01) == linalg.identity(n)
            and linalg.is_zero_matrix(linalg.matmul(dec.p10, dec.p01)))
    res.add("integrable", H.integrable(spec))
    for k, v in H.nice_conclusions(spec).items():
        res.add(f"nice-connection conclusion ({k})", v)
    for k, v in H.j_compatibility(spec).items():
        res.add(f"J commutes with {k}", v)
    res.add("sectors closed under •", H.sector_bullet_closure(spec, seed=seed))
    E = trivial_module(spec) if spec.algebra.kind != "constants" else omega1_module(spec)
    rng = random.Random(seed)
    ok = all(H.factorization_holds(spec, E, m, random_element(spec, E, rng)) for m in range(4) for _ in range(3))
    res.add("∂^(n) = (π^{1,0})^{⊗n}∇^(n) for n ≤ 3", ok)
    rep = H.holo_op_tests(spec, pairs=10, seed=seed)
    res.add("holomorphic operators closed under •", rep.closure_ok, f"{rep.pairs} pairs")
    res.add("∂̄(v▷a) = ∂̄_HD(v)▷a", rep.action_ok)
    res.add("∂̄_HD(v•w) = ∂̄_HD(v)•w + v▷∂̄_HD(w)", rep.product_law_ok)
    return res


def suite_su2q_consistency(spec: CalculusSpec, seed: int = 0) -> SuiteResult:
    from . import library as L

    res = SuiteResult("su2q-consistency", spec.name)
    if spec.name != "su2q":
        res.add("calculus is su2q", False, "this suite only applies to the su2q builtin")
        return res
    mats = L.action_matrices(spec)
    rep = L.su2q_matrix_rep()
    res.add("action matrices equal the displayed matrices", mats == [rep["u+"], rep["u0"], rep["u-"]])
    eqs = L.su2q_consistency_equations()
    gold = L.su2q_consistency_golden()
    same = all(any(L.same_up_to_scalar(a, b) for b in eqs) for a in gold) and all(
        any(L.same_up_to_scalar(a, b) for b in gold) for a in eqs
    )
    res.add("derived equations = the seven displayed polynomials", same, f"{len(eqs)} derived")
    for case in L.su2q_flat_cases():
        if case.label == "d":
            continue
        zero = all(not L.substitute(e, case.bindings) for e in gold)
        res.add(f"flat case ({case.label}) solves the equations", zero)
    corrected = L.search_case_d().corrected
    if corrected is not None:
        res.add("corrected case (d) solves the equations", all(not L.substitute(e, corrected) for e in gold))
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "associativity": suite_associativity,
    "action": suite_action,
    "curvature-op": suite_curvature_op,
    "relations-annihilate": suite_relations_annihilate,
    "complex": suite_complex,
    "theta": suite_theta,
    "symbols": suite_symbols,
    "su2q-consistency": suite_su2q_consistency,
}
