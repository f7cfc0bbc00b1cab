import random
from itertools import product

import pytest

from ncdiffop import library as L
from ncdiffop.calculus import (
    CapabilityError,
    ModuleConnection,
    module_curvature,
    nabla_module,
    omega1_module,
    trivial_module,
)
from ncdiffop.diffops import (
    EndoOperator,
    NotAntisymmetric,
    act,
    act_function,
    act_vec,
    bullet,
    bullet_many,
    curvature_element,
    da_relations,
    directional,
    expand_words,
    is_antisymmetric,
    k_op,
    nabla_of_endo,
    nabla_tvec,
    phi,
    relation_words,
    sigma_inv_vec,
    symbol,
    theta,
    theta_relation_check,
    wedge_splitting,
)
from ncdiffop.scalar import ONE, ZERO, Scalar
from ncdiffop.suites import classical_action, random_coeff, random_diffop, random_element, random_polynomial
from ncdiffop.tensors import DiffOp, OpTensor, TensorField

x, y, q = Scalar.var("x"), Scalar.var("y"), Scalar.var("q")
mu_p, mu_m, m_p, r = (Scalar.var(n) for n in ("mu_p", "mu_m", "m_p", "r"))
UP, U0, UM = 0, 1, 2


def D(*terms) -> DiffOp:
    """D((idx, coeff), ...)."""
    return DiffOp({idx: Scalar.coerce(c) for idx, c in terms})


def V(*terms) -> TensorField:
    return TensorField(("v",), {(i,): Scalar.coerce(c) for i, c in terms})


Dx, Dy = D(((0,), 1)), D(((1,), 1))


# --- • ------------------------------------------------------------------------


def test_unit(plane, su2q):
    rng = random.Random(0)
    for spec in (plane, su2q):
        w = random_diffop(spec, rng)
        assert bullet(spec, DiffOp.const(ONE), w) == w
        assert bullet(spec, w, DiffOp.const(ONE)) == w


def test_plane_composition(plane):
    got = bullet(plane, Dx, D(((1,), x)))
    assert got == D(((0, 1), x), ((1,), 1))
    rng = random.Random(1)
    for _ in range(20):
        f = random_polynomial(plane, rng)
        assert act_function(plane, got, f) == (x * f.diff("y")).diff("x")


def test_su2q_grade_one_products(su2q):
    assert bullet(su2q, D(((UM,), 1)), D(((UP,), 1))) == D(((UM, UP), 1), ((U0,), -mu_p))
    assert bullet(su2q, D(((UP,), 1)), D(((UM,), 1))) == D(((UP, UM), 1), ((U0,), -mu_m))


def test_bullet_needs_sigma_beyond_grade_two(su2q):
    with pytest.raises(CapabilityError):
        bullet(su2q, D(((UP,), 1)), D(((UM, U0), 1)))


def test_bullet_left_linear(plane):
    rng = random.Random(2)
    for _ in range(10):
        a = random_coeff(plane, rng)
        v, w = random_diffop(plane, rng), random_diffop(plane, rng)
        assert bullet(plane, v.scale(a), w) == bullet(plane, v, w).scale(a)


# --- ▷ ------------------------------------------------------------------------


def test_act_examples(plane):
    assert act_function(plane, D(((0, 1), 1)), x**2 * y) == 2 * x
    A = trivial_module(plane)
    e = A.element([x + y])
    assert act(plane, A, DiffOp.const(x), e) == e.scale(x)


def test_su2q_action_matrices(su2q):
    E = omega1_module(su2q)
    assert act(su2q, E, D(((UP,), 1)), E.basis(1)) == E.element({2: mu_p})
    assert act(su2q, E, D(((UP,), 1)), E.basis(0)) == E.element({1: m_p})
    assert not act(su2q, E, D(((UP,), 1)), E.basis(2))
    rep = L.su2q_matrix_rep()
    assert L.action_matrices(su2q) == [rep["u+"], rep["u0"], rep["u-"]]


def test_act_vec_is_evpart(su2q):
    got = act_vec(su2q, V((UM, 1)), D(((UP,), 1)))
    assert got == D(((U0,), -mu_p))


def test_nabla_tvec(plane, su2q):
    got = nabla_tvec(plane, Dx)
    assert got == OpTensor("f", {0: D(((0, 0), 1)), 1: D(((1, 0), 1))})
    assert nabla_tvec(plane, DiffOp.const(ONE)) == OpTensor("f", {0: Dx, 1: Dy})
    # the grade-1 part of the ξ_i leg is the ▷ correction of u_i•u₊
    got = nabla_tvec(su2q, D(((UP,), 1)))
    assert got.get(UM).part(1) == TensorField(("v",), {(U0,): -mu_p})
    assert not got.get(UP).part(1)


def test_directional(plane, su2q):
    assert directional(plane, V((0, 1)), x**2) == 2 * x
    assert directional(su2q, V((U0, 1)), q**2 + 5) == ZERO
    assert directional(plane, V((1, x)), x * y) == x**2


# --- curvature element and relations ------------------------------------------


def test_plane_relation(plane):
    rels = da_relations(plane)
    assert len(rels) == 1
    commutator = bullet(plane, Dy, Dx) - bullet(plane, Dx, Dy)
    # the relation is R̂(α) = −e_ijk u_j•u_i, the negative of ∂y•∂x − ∂x•∂y
    assert rels[0] == -commutator
    assert curvature_element(plane) == OpTensor("w", {0: -commutator})


def test_su2q_relations(su2q):
    rels = da_relations(su2q)
    up, u0, um = D(((UP,), 1)), D(((U0,), 1)), D(((UM,), 1))
    b = lambda s, t: bullet(su2q, s, t)
    want = [
        u0.scale(q**3) - (b(um, up) - b(up, um).scale(q**2)),
        up.scale(-q**2 * (1 + q**-2)) - (b(u0, up) - b(up, u0).scale(q**4)),
        um.scale(q**-2 * (1 + q**-2)) - (b(u0, um) - b(um, u0).scale(q**-4)),
    ]
    assert list(rels) == want
    # grade-1 corrections carry the connection parameters
    assert rels[0].part(1) == TensorField(("v",), {(U0,): q**3 + mu_p - q**2 * mu_m})


def test_words_expand_to_relations(su2q, plane, podles):
    for spec in (su2q, plane, podles):
        words = relation_words(spec)
        assert [expand_words(spec, w) for w in words] == list(da_relations(spec))


def test_relations_cross_check_on_all_builtins():
    for name in L.BUILTINS:
        spec = L.builtin(name)
        # cross_check compares with the φ-bracket form and raises on mismatch
        assert len(da_relations(spec, cross_check=True)) == spec.n2


def test_curvature_element_acts_as_curvature(su2q, plane):
    for spec in (su2q, plane):
        E = omega1_module(spec)
        R = curvature_element(spec)
        for a in range(E.rank):
            got = {}
            for k, Dk in R.comps.items():
                for (b,), c in act(spec, E, Dk, E.basis(a)).items():
                    got[(k, b)] = c
            assert got == dict(module_curvature(spec, E, E.basis(a)).items())


def test_curvature_element_central(plane):
    rng = random.Random(3)
    R = curvature_element(plane)
    for _ in range(10):
        a = random_coeff(plane, rng)
        for k, Dk in R.comps.items():
            assert bullet(plane, Dk, DiffOp.const(a)) == Dk.scale(a)


def test_relations_detect_curvature(plane):
    E = ModuleConnection(1, (TensorField(("f", "e"), {(0, 0): y}),), name="curved")
    assert module_curvature(plane, E, E.basis(0))
    assert any(act(plane, E, g, E.basis(0)) for g in da_relations(plane))
    A = trivial_module(plane)
    rng = random.Random(4)
    for g in da_relations(plane):
        for _ in range(5):
            assert not act(plane, A, g, random_element(plane, A, rng))


# --- splitting, antisymmetry, φ ----------------------------------------------


def test_splittings(plane, su2q, podles):
    assert wedge_splitting(plane).images[0] == TensorField(("f", "f"), {(0, 1): ONE})
    assert wedge_splitting(su2q).images[0] == TensorField(("f", "f"), {(0, 2): ONE})
    assert wedge_splitting(podles).images[0] == TensorField(("f", "f"), {(0, 1): ONE})


def test_antisymmetry(plane, su2q):
    vv = lambda d: TensorField(("v", "v"), {k: Scalar.coerce(c) for k, c in d.items()})
    assert is_antisymmetric(plane, vv({(0, 1): 1, (1, 0): -1}))
    assert not is_antisymmetric(plane, vv({(0, 1): 1}))
    assert is_antisymmetric(su2q, vv({(UM, UP): 1, (UP, UM): -q**2}))
    assert not is_antisymmetric(su2q, vv({(UM, UP): 1, (UP, UM): -1}))


def test_phi_examples(plane):
    assert not phi(plane, TensorField(("v", "v"), {(0, 1): ONE, (1, 0): -ONE}))
    pairs = [(V((0, 1)), V((1, x))), (V((1, -x)), V((0, 1)))]
    assert phi(plane, pairs) == V((1, 1))
    with pytest.raises(NotAntisymmetric):
        phi(plane, TensorField(("v", "v"), {(0, 1): ONE}))


def test_phi_lie_bracket_oracle(plane):
    """φ(u⊗v − v⊗u) is the commutator vector field."""
    rng = random.Random(5)
    for _ in range(10):
        u = V((0, random_coeff(plane, rng)), (1, random_coeff(plane, rng)))
        v = V((0, random_coeff(plane, rng)), (1, random_coeff(plane, rng)))
        bracket = phi(plane, [(u, v), (v.scale(-1), u)])
        f = random_polynomial(plane, rng)
        U, W = DiffOp.from_tensor(u), DiffOp.from_tensor(v)
        comm = classical_action(plane, U, classical_action(plane, W, f)) - classical_action(
            plane, W, classical_action(plane, U, f)
        )
        assert act_function(plane, DiffOp.from_tensor(bracket), f) == comm


def test_phi_independent_of_splitting(su2q):
    other = wedge_splitting(su2q, order=list(reversed(list(product(range(3), repeat=2)))))
    assert other.images != wedge_splitting(su2q).images
    ins = [
        TensorField(("v", "v"), {(UM, UP): ONE, (UP, UM): -q**2}),
        TensorField(("v", "v"), {(U0, UP): ONE, (UP, U0): -q**4}),
        TensorField(("v", "v"), {(U0, UM): 3 * ONE, (UM, U0): -3 * q**-4}),
    ]
    for t in ins:
        assert phi(su2q, t) == phi(su2q, t, other)


# --- ϑ --------------------------------------------------------------------------


def test_theta_examples(plane):
    E = omega1_module(plane)
    e = E.element([x, y])
    assert theta(plane, E, DiffOp.const(x + 1), e) == OpTensor(
        "e", {0: DiffOp.const(x * (x + 1)), 1: DiffOp.const(y * (x + 1))}
    )
    assert theta(plane, E, Dx, E.basis(1)) == OpTensor("e", {1: Dx})


def test_theta_relation_checks(plane):
    assert theta_relation_check(plane, omega1_module(plane)).ok
    assert theta_relation_check(plane, trivial_module(plane)).ok


def test_theta_check_needs_sigma_on_su2q():
    case = next(c for c in L.su2q_flat_cases() if c.label == "b")
    vals = {k: L.substitute(v, {"mu_p": ONE, "mu_m": ONE}) for k, v in case.bindings.items()}
    spec = L.su2q_3d(L.Su2qConnectionParams(mu_p=ONE, mu_m=ONE, **vals))
    with pytest.raises(CapabilityError):
        theta_relation_check(spec, omega1_module(spec))


# --- symbols --------------------------------------------------------------------


def test_symbol_examples(plane, su2q):
    assert symbol(D(((0, 1), 1), ((0,), 1), ((), 3))) == TensorField(("v", "v"), {(0, 1): ONE})
    assert symbol(bullet(su2q, D(((U0,), 1)), D(((UP,), 1)))) == TensorField(("v", "v"), {(U0, UP): ONE})
    assert L.su2q_symbol_relations()[0] == TensorField(("v", "v"), {(UM, UP): ONE, (UP, UM): -q**2})
    assert symbol(da_relations(su2q)[0]) == L.su2q_symbol_relations()[0].scale(-1)
    with pytest.raises(ValueError):
        symbol(DiffOp())


# --- endomorphisms ------------------------------------------------------------


def test_nabla_of_endo_trivial(plane, su2q):
    for spec in (plane, su2q):
        E = omega1_module(spec)
        assert all(not img for img in nabla_of_endo(spec, E, EndoOperator.identity(E.rank)).images)
        c = EndoOperator.from_matrix([[Scalar(5) if i == j else ZERO for j in range(E.rank)] for i in range(E.rank)])
        assert all(not img for img in nabla_of_endo(spec, E, c).images)


def test_multiplication_by_x(plane):
    A = trivial_module(plane)
    T = EndoOperator.from_matrix([[x]])
    NT = nabla_of_endo(plane, A, T)
    assert NT.images[0] == TensorField(("f", "e"), {(0, 0): ONE})
    # K_1(∂x, ∇(T)) = [∂x, x·] = 1
    f = x**3 * y + y
    e = A.element([f])
    assert k_op(plane, A, V((0, 1)), NT, e) == e


def _random_endo(spec, E, order, rng):
    imgs = []
    for _ in range(E.rank):
        comps = {}
        for _ in range(3):
            idx = tuple(rng.randrange(spec.n1) for _ in range(order)) + (rng.randrange(E.rank),)
            comps[idx] = random_coeff(spec, rng)
        imgs.append(TensorField(("f",) * order + ("e",), comps))
    return EndoOperator(order, tuple(imgs))


def _random_vecs(spec, n, rng):
    if n == 0:
        return TensorField((), {(): random_coeff(spec, rng)})
    return TensorField(("v",) * n, {tuple(rng.randrange(spec.n1) for _ in range(n)): random_coeff(spec, rng) for _ in range(2)})


def test_k0_is_scaling(plane):
    A = trivial_module(plane)
    T = EndoOperator.from_matrix([[x + y]])
    e = A.element([y])
    assert k_op(plane, A, TensorField((), {(): x}), T, e) == T(e).scale(x)


def test_commutator_identity(plane):
    """(u▷)∘T − T∘(u▷) = K_1(u, ∇(T))."""
    rng = random.Random(6)
    E = omega1_module(plane)
    for _ in range(10):
        T = _random_endo(plane, E, 0, rng)
        u = _random_vecs(plane, 1, rng)
        e = random_element(plane, E, rng)
        U = DiffOp.from_tensor(u)
        lhs = act(plane, E, U, T(e)) - T(act(plane, E, U, e))
        assert lhs == k_op(plane, E, u, nabla_of_endo(plane, E, T), e)


def test_k_composition(plane):
    rng = random.Random(7)
    E = omega1_module(plane)
    for _ in range(10):
        n, m = rng.randint(0, 2), rng.randint(0, 2)
        S, U = _random_endo(plane, E, n, rng), _random_endo(plane, E, m, rng)
        v, w = _random_vecs(plane, n, rng), _random_vecs(plane, m, rng)
        e = random_element(plane, E, rng)
        lhs = k_op(plane, E, v, S, k_op(plane, E, w, U, e))
        assert lhs == k_op(plane, E, v.tensor(w), S.compose(U), e)


def test_reorder_identity(plane):
    """(u▷)∘K_n(v,S) = K_n(u▷v,S) + K_{n+1}(u⊗v,∇_E(S)) + K_n(v′,S)∘(u′▷)."""
    rng = random.Random(8)
    count = 0
    for E in (trivial_module(plane), omega1_module(plane)):
        for _ in range(10):
            n = rng.randint(0, 2)
            u, v = _random_vecs(plane, 1, rng), _random_vecs(plane, n, rng)
            S = _random_endo(plane, E, n, rng)
            e = random_element(plane, E, rng)
            lhs = act(plane, E, DiffOp.from_tensor(u), k_op(plane, E, v, S, e))
            if n:
                uv = act_vec(plane, u, DiffOp.from_tensor(v)).part(n)
            else:
                uv = TensorField((), {(): directional(plane, u, v.get(()))})
            rhs = k_op(plane, E, uv, S, e) + k_op(plane, E, u.tensor(v), nabla_of_endo(plane, E, S), e)
            for K, c in sigma_inv_vec(plane, u.tensor(v)).items():
                v_, u_ = TensorField(("v",) * n, {K[:-1]: c}), DiffOp.basis(K[-1:])
                rhs = rhs + k_op(plane, E, v_, S, act(plane, E, u_, e))
            assert lhs == rhs
            count += 1
    assert count == 20


def test_bullet_many(plane):
    assert bullet_many(plane, Dx, Dy, D(((), x))) == bullet(plane, Dx, bullet(plane, Dy, D(((), x))))
