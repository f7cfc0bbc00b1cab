"""Complex structures: sector projections, holomorphic vector fields, the
nice connection and the holomorphic operator calculus ∂̄_HD.

Matrices on Ω¹ follow the convention of ``spec.J``: M(ξ_i) = Σ_j M[i][j] ξ_j.
On Vec the same matrix acts through duality, M(u_c) = Σ_k M[k][c] u_k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from . import linalg
from .calculus import (
    CalculusSpec,
    CapabilityError,
    ModuleConnection,
    SpecError,
    nabla_iter,
    nabla_module,
    sigma_inv_at,
    square_forms_n,
    square_vec_n,
    torsion,
    wedge_at,
)
from .diffops import (
    InternalCheckFailed,
    act_function,
    act_vec,
    as_diffop,
    bullet,
    phi,
    wedge_splitting,
)
from .scalar import I, ONE, ZERO, Scalar
from .tensors import DiffOp, OpTensor, TensorField, apply_block, sum_fields

Matrix = list[list[Scalar]]


class NoComplexStructure(CapabilityError):
    pass


class ConditionFailed(SpecError):
    """A hypothesis of a lemma or proposition does not hold; ``condition`` names it."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"condition ({condition}) fails: {message}")
        self.condition = condition


class NotInSector(ValueError):
    pass


# ---------------------------------------------------------------------------
# sector decomposition


def _lagrange(M: Matrix, eigs: Sequence[Scalar]) -> list[Matrix]:
    n = len(M)
    out = []
    for a, la in enumerate(eigs):
        P = linalg.identity(n)
        for b, lb in enumerate(eigs):
            if b != a:
                shifted = linalg.matadd(M, linalg.matscale(lb, linalg.identity(n)), sign=-1)
                P = linalg.matscale((la - lb).inverse(), linalg.matmul(P, shifted))
        out.append(P)
    return out


def _row_basis(P: Matrix) -> list[list[Scalar]]:
    red, piv = linalg.rref(P)
    return [red[r] for r in range(len(piv))]


@dataclass(frozen=True)
class SectorDecomposition:
    p10: Matrix
    p01: Matrix
    J2: Matrix
    pq: Mapping[tuple[int, int], Matrix]
    basis10: tuple[tuple[Scalar, ...], ...]
    basis01: tuple[tuple[Scalar, ...], ...]
    basis11: tuple[tuple[Scalar, ...], ...]


def decompose(spec: CalculusSpec) -> SectorDecomposition:
    """Eigenprojections of J on Ω¹ and of the induced J on Ω²."""
    hit = spec._cache.get("sectors")
    if hit is not None:
        return hit
    if spec.J is None:
        if spec.n1 % 2:
            raise NoComplexStructure(f"Ω¹ has odd dimension {spec.n1}; no almost complex structure exists")
        raise NoComplexStructure("this calculus carries no J")
    n, m = spec.n1, spec.n2
    J = [list(r) for r in spec.J]
    half = Scalar.coerce(1) / 2
    Id = linalg.identity(n)
    p10 = linalg.matscale(half, linalg.matadd(Id, linalg.matscale(I, J), sign=-1))
    p01 = linalg.matscale(half, linalg.matadd(Id, linalg.matscale(I, J)))
    # induced J on Ω² through a splitting of ∧
    J2 = linalg.zeros(m, m)
    if m:
        split = wedge_splitting(spec)
        for k in range(m):
            s = split(TensorField.basis(("w",), (k,)))
            img = _mat_form(J, s, 0) + _mat_form(J, s, 1)
            for (l,), c in wedge_at(spec, img, 0).items():
                J2[k][l] = c
    eig = {(2, 0): 2 * I, (1, 1): ZERO, (0, 2): -2 * I}
    projs = _lagrange(J2, list(eig.values())) if m else [linalg.zeros(0, 0)] * 3
    pq = dict(zip(eig, projs))
    total = linalg.zeros(m, m)
    for P in pq.values():
        total = linalg.matadd(total, P)
        if linalg.matmul(P, P) != P:
            raise SpecError("the induced J on Ω² is not diagonalizable with eigenvalues 2i, 0, −2i")
    if m and total != linalg.identity(m):
        raise SpecError("the induced Ω² projections are not complementary")
    dec = SectorDecomposition(
        p10,
        p01,
        J2,
        pq,
        tuple(map(tuple, _row_basis(p10))),
        tuple(map(tuple, _row_basis(p01))),
        tuple(map(tuple, _row_basis(pq[(1, 1)]))) if m else (),
    )
    spec._cache["sectors"] = dec
    return dec


def _mat_form(M: Matrix, t: TensorField, pos: int) -> TensorField:
    n = len(M)
    return apply_block(t, pos, 1, lambda k: TensorField(("f",), {(j,): M[k[0]][j] for j in range(n)}), ("f",))


def _mat_vec(M: Matrix, t: TensorField, pos: int) -> TensorField:
    n = len(M)
    return apply_block(t, pos, 1, lambda k: TensorField(("v",), {(j,): M[j][k[0]] for j in range(n)}), ("v",))


def _mat_w(M: Matrix, t: TensorField, pos: int) -> TensorField:
    m = len(M)
    return apply_block(t, pos, 1, lambda k: TensorField(("w",), {(j,): M[k[0]][j] for j in range(m)}), ("w",))


def proj_form(spec: CalculusSpec, t: TensorField, pos: int, kind: str) -> TensorField:
    """π^{1,0} (kind '10') or π^{0,1} (kind '01') on an Ω¹ slot."""
    dec = decompose(spec)
    return _mat_form(dec.p10 if kind == "10" else dec.p01, t, pos)


def proj_vec(spec: CalculusSpec, t: TensorField, pos: int, kind: str) -> TensorField:
    dec = decompose(spec)
    return _mat_vec(dec.p10 if kind == "10" else dec.p01, t, pos)


def proj_omega2(spec: CalculusSpec, t: TensorField, pos: int, pq: tuple[int, int]) -> TensorField:
    return _mat_w(decompose(spec).pq[pq], t, pos)


def J_vec(spec: CalculusSpec, t: TensorField, pos: int = 0) -> TensorField:
    return _mat_vec([list(r) for r in spec.J], t, pos)


def J_form(spec: CalculusSpec, t: TensorField, pos: int = 0) -> TensorField:
    return _mat_form([list(r) for r in spec.J], t, pos)


def dbar(spec: CalculusSpec, a) -> TensorField:
    return proj_form(spec, spec.d0(Scalar.coerce(a)), 0, "01")


def partial(spec: CalculusSpec, a) -> TensorField:
    return proj_form(spec, spec.d0(Scalar.coerce(a)), 0, "10")


def integrable(spec: CalculusSpec) -> bool:
    """dξ has no (2,0) part for ξ in a basis of Ω^{0,1}."""
    dec = decompose(spec)
    for row in dec.basis01:
        dxi = sum_fields(("w",), [spec.d1_image(j).scale(c) for j, c in enumerate(row) if c])
        if proj_omega2(spec, dxi, 0, (2, 0)):
            return False
    return True


def holomorphic_coordinates(spec: CalculusSpec) -> list[str]:
    """Generators x of the polynomial backend with ∂̄x = 0."""
    alg = spec.algebra
    if alg.kind != "commutative_polynomial":
        return []
    return [x for x in alg.coordinate_vars if not dbar(spec, Scalar.var(x))]


# ---------------------------------------------------------------------------
# restricted wedge inverses


@dataclass(frozen=True)
class MixedWedgeInverse:
    """Inverse of ∧ on Ω^{a}⊗Ω^{b} → Ω^{1,1} for (a, b) = (10, 01) or (01, 10)."""

    left: tuple[tuple[Scalar, ...], ...]
    right: tuple[tuple[Scalar, ...], ...]
    images: tuple[TensorField, ...]  # one per basis11 vector, in Ω¹⊗Ω¹
    basis11: tuple[tuple[Scalar, ...], ...]

    def __call__(self, spec: CalculusSpec, w: TensorField) -> TensorField:
        """Apply to the (1,1) part of an Ω² element (coefficients allowed)."""
        w11 = proj_omega2(spec, w, 0, (1, 1))
        if not w11:
            return TensorField(("f", "f"))
        rows = linalg.transpose([list(b) for b in self.basis11])
        coords = linalg.solve(rows, [w11.get((k,)) for k in range(spec.n2)])
        parts = [img.scale(c) for img, c in zip(self.images, coords) if c]
        return sum_fields(("f", "f"), parts)


def _mixed_inverse(spec: CalculusSpec, left, right, label: str) -> MixedWedgeInverse:
    dec = decompose(spec)
    pairs = list(product(range(len(left)), range(len(right))))
    tensors = []
    for a, b in pairs:
        t = TensorField(
            ("f", "f"),
            {(i, j): left[a][i] * right[b][j] for i in range(spec.n1) for j in range(spec.n1)},
        )
        tensors.append(t)
    cols = [[wedge_at(spec, t, 0).get((k,)) for k in range(spec.n2)] for t in tensors]
    M = linalg.transpose(cols) if cols else linalg.zeros(spec.n2, 0)
    dim11 = len(dec.basis11)
    if len(pairs) != dim11 or (pairs and linalg.rank(M) != dim11):
        raise ConditionFailed("a", f"∧ on {label} → Ω^{{1,1}} is not an isomorphism")
    images = []
    for b11 in dec.basis11:
        x = linalg.solve(M, list(b11))
        if x is None:
            raise ConditionFailed("a", f"∧ on {label} does not reach Ω^{{1,1}}")
        images.append(sum_fields(("f", "f"), [t.scale(c) for t, c in zip(tensors, x) if c]))
    return MixedWedgeInverse(left, right, tuple(images), dec.basis11)


def phi11(spec: CalculusSpec) -> MixedWedgeInverse:
    """φ: Ω^{1,1} → Ω^{1,0}⊗Ω^{0,1}."""
    key = "phi11"
    if key not in spec._cache:
        dec = decompose(spec)
        spec._cache[key] = _mixed_inverse(spec, dec.basis10, dec.basis01, "Ω^{1,0}⊗Ω^{0,1}")
    return spec._cache[key]


def psi11(spec: CalculusSpec) -> MixedWedgeInverse:
    """ψ: Ω^{1,1} → Ω^{0,1}⊗Ω^{1,0}."""
    key = "psi11"
    if key not in spec._cache:
        dec = decompose(spec)
        spec._cache[key] = _mixed_inverse(spec, dec.basis01, dec.basis10, "Ω^{0,1}⊗Ω^{1,0}")
    return spec._cache[key]


# ---------------------------------------------------------------------------
# conditions


def _basis_form(spec: CalculusSpec, k: int) -> TensorField:
    return TensorField.basis(("f",), (k,))


def condition_b(spec: CalculusSpec) -> bool:
    """(J⊗id)□ = □J on Ω¹."""
    for k in range(spec.n1):
        xi = _basis_form(spec, k)
        if J_form(spec, square_forms_n(spec, xi), 0) != square_forms_n(spec, J_form(spec, xi)):
            return False
    return True


def condition_c(spec: CalculusSpec) -> bool:
    """π^{1,1}Tor = 0 (enough on the basis, torsion being right linear)."""
    return all(not proj_omega2(spec, torsion(spec, _basis_form(spec, k)), 0, (1, 1)) for k in range(spec.n1))


def condition_d(spec: CalculusSpec) -> bool:
    """π^{1,1}∧σ⁻¹ = −π^{0,1}∧π^{1,0} − π^{1,0}∧π^{0,1} on Ω¹⊗Ω¹."""
    for i, j in product(range(spec.n1), repeat=2):
        t = TensorField.basis(("f", "f"), (i, j))
        lhs = proj_omega2(spec, wedge_at(spec, sigma_inv_at(spec, t, 0), 0), 0, (1, 1))
        a = wedge_at(spec, proj_form(spec, proj_form(spec, t, 0, "01"), 1, "10"), 0)
        b = wedge_at(spec, proj_form(spec, proj_form(spec, t, 0, "10"), 1, "01"), 0)
        if lhs != -(a + b):
            return False
    return True


def check_lemma_conditions(spec: CalculusSpec, with_d: bool = False) -> dict[str, bool]:
    """Evaluate (a), (b), (c) (and (d)) individually."""
    out = {}
    try:
        phi11(spec)
        out["a"] = True
    except ConditionFailed:
        out["a"] = False
    out["b"] = condition_b(spec)
    out["c"] = condition_c(spec)
    if with_d:
        out["d"] = condition_d(spec)
    return out


def require(conds: Mapping[str, bool]) -> None:
    for name, ok in conds.items():
        if not ok:
            raise ConditionFailed(name, _CONDITION_TEXT[name])


_CONDITION_TEXT = {
    "a": "∧: Ω^{1,0}⊗Ω^{0,1} → Ω^{1,1} is not invertible",
    "b": "(J⊗id)□ ≠ □J",
    "c": "π^{1,1}Tor_R ≠ 0",
    "d": "π^{1,1}∧σ⁻¹ ≠ −π^{0,1}∧π^{1,0} − π^{1,0}∧π^{0,1}",
    "integrable": "dΩ^{0,1} has a (2,0) component",
}


def j_compatibility(spec: CalculusSpec) -> dict[str, bool]:
    """Consequences of (J⊗id)□ = □J on Vec, σ⁻¹ and σ."""
    n = spec.n1
    out = {"vec": True}
    for c in range(n):
        u = TensorField.basis(("v",), (c,))
        if J_vec(spec, square_vec_n(spec, u), 1) != square_vec_n(spec, J_vec(spec, u)):
            out["vec"] = False
    if spec.sigma_inv is not None:
        ok_inv = ok_sig = True
        for i, j in product(range(n), repeat=2):
            t = TensorField.basis(("f", "f"), (i, j))
            if J_form(spec, sigma_inv_at(spec, t, 0), 0) != sigma_inv_at(spec, J_form(spec, t, 1), 0):
                ok_inv = False
            s = TensorField.basis(("v", "f"), (i, j))
            lhs = J_vec(spec, _sigma_vf(spec, s), 1)
            rhs = _sigma_vf(spec, J_vec(spec, s, 0))
            if lhs != rhs:
                ok_sig = False
        out["sigma_inv"] = ok_inv
        out["sigma"] = ok_sig
    return out


def _sigma_vf(spec: CalculusSpec, t: TensorField) -> TensorField:
    return apply_block(t, 0, 2, lambda k: spec.sigma_image(k[0], k[1]), ("f", "v"))


# ---------------------------------------------------------------------------
# Newlander–Nirenberg


class PreconditionFailed(ValueError):
    pass


def in_vec10(spec: CalculusSpec, t: TensorField) -> bool:
    """Every Vec slot of t lies in Vec^{1,0}."""
    return all(
        not proj_vec(spec, t, pos, "01") for pos, s in enumerate(t.slots) if s == "v"
    )


def ker_wedge_10(spec: CalculusSpec) -> list[TensorField]:
    dec = decompose(spec)
    B = dec.basis10
    pairs = list(product(range(len(B)), repeat=2))
    tens = [
        TensorField(("f", "f"), {(i, j): B[a][i] * B[b][j] for i in range(spec.n1) for j in range(spec.n1)})
        for a, b in pairs
    ]
    rows = [[wedge_at(spec, t, 0).get((k,)) for t in tens] for k in range(spec.n2)]
    out = []
    for x in linalg.nullspace(rows, len(tens)):
        out.append(sum_fields(("f", "f"), [t.scale(c) for t, c in zip(tens, x) if c]))
    return out


def nn_bracket_check(spec: CalculusSpec, x) -> bool:
    """φ(x) ∈ Vec^{1,0} for x in the (1,0)-sector pairing to zero with ker ∧|Ω^{1,0}⊗Ω^{1,0}."""
    from .diffops import _as_pairs, _pairs_tensor

    if not integrable(spec):
        raise ConditionFailed("integrable", _CONDITION_TEXT["integrable"])
    pairs = _as_pairs(x)
    for u, v in pairs:
        if not in_vec10(spec, u) or not in_vec10(spec, v):
            raise NotInSector("input is not in the (1,0)-sector")
    t = _pairs_tensor(pairs) if pairs else TensorField(("v", "v"))
    for k in ker_wedge_10(spec):
        total = ZERO
        for (a, b), c in t.items():
            kv = k.get((b, a))
            if kv:
                total = total + c * kv
        if total:
            raise PreconditionFailed("x pairs nontrivially with ker ∧ on Ω^{1,0}⊗Ω^{1,0}")
    if not pairs:
        return True
    return not proj_vec(spec, phi(spec, pairs), 0, "01")


# ---------------------------------------------------------------------------
# holomorphic vector fields


@dataclass
class HoloVecReport:
    conditions: dict[str, bool]
    holomorphic: bool
    samples_checked: int = 0


def _holo_samples(spec: CalculusSpec, count: int, rng: random.Random, degree: int = 3) -> list[Scalar]:
    coords = holomorphic_coordinates(spec)
    out = []
    for _ in range(count):
        a = Scalar.coerce(rng.randint(-3, 3))
        for _ in range(rng.randint(1, 3)):
            term = Scalar.coerce(rng.randint(-4, 4))
            for x in coords:
                term = term * Scalar.var(x) ** rng.randint(0, degree)
            a = a + term
        out.append(a)
    return out


def holo_vec_check(spec: CalculusSpec, v: TensorField, samples: int = 5, seed: int = 0, report: bool = False):
    """True iff (π^{0,1}⊗id)□v = 0, after checking (a)–(c).  When true,
    ∂̄(v▷a) = 0 is confirmed on sample holomorphic polynomials a."""
    if v.slots != ("v",):
        raise ValueError("expected a vector field")
    if not in_vec10(spec, v):
        raise NotInSector("v is not in Vec^{1,0}")
    conds = check_lemma_conditions(spec)
    require(conds)
    holo = not proj_form(spec, square_vec_n(spec, v), 0, "01")
    checked = 0
    if holo:
        for a in _holo_samples(spec, samples, random.Random(seed)):
            if dbar(spec, a):
                raise InternalCheckFailed("sample polynomial is not holomorphic")
            if dbar(spec, act_function(spec, DiffOp.from_tensor(v), a)):
                raise InternalCheckFailed("∂̄(v▷a) ≠ 0 for a holomorphic v and a")
            checked += 1
    if report:
        return HoloVecReport(conds, holo, checked)
    return holo


# ---------------------------------------------------------------------------
# nice connection


@dataclass(frozen=True)
class HoloConnectionPair:
    """Right bimodule covariant derivatives on Ω^{1,0} and Ω^{0,1}.

    ``nabla10[k]`` is ∇₁₀(π^{1,0}ξ_k) in Ω¹⊗Ω¹ (zero when absent) and
    ``sigma10_inv[(i, k)]`` is σ₁₀⁻¹(ξ_i⊗π^{1,0}ξ_k) in Ω¹⊗Ω¹ (the flip when
    absent); likewise for (0,1).
    """

    nabla10: Mapping[int, TensorField] = field(default_factory=dict)
    nabla01: Mapping[int, TensorField] = field(default_factory=dict)
    sigma10_inv: Mapping[tuple[int, int], TensorField] | None = None
    sigma01_inv: Mapping[tuple[int, int], TensorField] | None = None


def _proj_row(dec: SectorDecomposition, k: int, kind: str) -> TensorField:
    P = dec.p10 if kind == "10" else dec.p01
    return TensorField(("f",), {(j,): P[k][j] for j in range(len(P))})


def nice_connection(spec: CalculusSpec, pair: HoloConnectionPair) -> CalculusSpec:
    """Assemble □ and σ⁻¹ from the two sector connections and check the conclusions."""
    dec = decompose(spec)
    ph, ps = phi11(spec), psi11(spec)
    n = spec.n1
    gamma = {}
    sig = {}
    for k in range(n):
        parts = []
        for kind, nab, inv in (("10", pair.nabla10, ph), ("01", pair.nabla01, ps)):
            x = _proj_row(dec, k, kind)
            if k in nab and nab[k]:
                parts.append(proj_form(spec, nab[k], 1, kind))
            dx = sum_fields(("w",), [spec.d1_image(j).scale(c) for (j,), c in x.items()])
            if dx:
                parts.append(-inv(spec, dx))
        for (i, j), c in sum_fields(("f", "f"), parts).items():
            gamma[(k, i, j)] = c
    for i, k in product(range(n), repeat=2):
        parts = []
        for kind, sig_tab, inv in (("10", pair.sigma10_inv, ph), ("01", pair.sigma01_inv, ps)):
            x = _proj_row(dec, k, kind)
            xi = TensorField.basis(("f",), (i,))
            if sig_tab is not None and (i, k) in sig_tab:
                s = sig_tab[(i, k)]
            else:
                s = x.tensor(xi)
            if s:
                parts.append(proj_form(spec, s, 1, kind))
            w = wedge_at(spec, xi.tensor(x), 0)
            if w:
                parts.append(-inv(spec, w))
        for (a, b), c in sum_fields(("f", "f"), parts).items():
            sig[(i, k, a, b)] = c
    out = spec.replace(
        christoffel=tuple(
            tuple(tuple(gamma.get((k, i, j), ZERO) for j in range(n)) for i in range(n)) for k in range(n)
        ),
        sigma_inv=tuple(
            tuple(tuple(tuple(sig.get((i, k, a, b), ZERO) for b in range(n)) for a in range(n)) for k in range(n))
            for i in range(n)
        ),
    )
    res = nice_conclusions(out)
    if not all(res.values()):
        bad = [k for k, v in res.items() if not v]
        raise InternalCheckFailed(f"assembled connection violates conclusion(s) {bad}")
    return out


def nice_conclusions(spec: CalculusSpec) -> dict[str, bool]:
    """(i) (J⊗id)□ = □J, (ii) π^{1,1}Tor = 0, (iii) the σ⁻¹ wedge identity."""
    return {"i": condition_b(spec), "ii": condition_c(spec), "iii": condition_d(spec)}


# ---------------------------------------------------------------------------
# sectors of 𝒯Vec


def diffop_in_sector(spec: CalculusSpec, v: DiffOp, kind: str = "10") -> bool:
    other = "01" if kind == "10" else "10"
    for n, part in v.parts.items():
        for pos in range(n):
            if proj_vec(spec, part, pos, other):
                return False
    return True


def sector_basis(spec: CalculusSpec, kind: str = "10") -> list[TensorField]:
    """η^i = P(u_i) for the independent columns of P."""
    dec = decompose(spec)
    P = dec.p10 if kind == "10" else dec.p01
    _, piv = linalg.rref(P)
    return [TensorField(("v",), {(j,): P[j][i] for j in range(spec.n1)}) for i in piv]


def _coeff_sample(spec: CalculusSpec, rng: random.Random, holomorphic: bool = False) -> Scalar:
    alg = spec.algebra
    c = Scalar.coerce(rng.randint(-3, 3))
    if alg.kind == "commutative_polynomial":
        coords = holomorphic_coordinates(spec) if holomorphic else list(alg.coordinate_vars)
        for _ in range(rng.randint(0, 2)):
            t = Scalar.coerce(rng.randint(-3, 3))
            for x in coords:
                t = t * Scalar.var(x) ** rng.randint(0, 2)
            c = c + t
    return c


def random_sector_element(
    spec: CalculusSpec, rng: random.Random, kind: str = "10", max_grade: int = 2, holomorphic: bool = False
) -> DiffOp:
    basis = sector_basis(spec, kind)
    out = DiffOp.const(_coeff_sample(spec, rng, holomorphic))
    for n in range(1, max_grade + 1):
        for _ in range(rng.randint(0, 2)):
            t = TensorField.scalar(_coeff_sample(spec, rng, holomorphic))
            for _ in range(n):
                t = t.tensor(rng.choice(basis))
            out = out + DiffOp.from_tensor(t)
    return out


def sector_bullet_closure(spec: CalculusSpec, trials: int = 10, seed: int = 0) -> bool:
    if not condition_b(spec):
        raise ConditionFailed("b", _CONDITION_TEXT["b"])
    if not j_compatibility(spec)["vec"]:
        raise InternalCheckFailed("(id⊗J)□ ≠ □J on Vec although (b) holds")
    rng = random.Random(seed)
    for kind in ("10", "01"):
        for _ in range(trials):
            v = random_sector_element(spec, rng, kind)
            w = random_sector_element(spec, rng, kind)
            if not diffop_in_sector(spec, bullet(spec, v, w), kind):
                return False
    return True


# ---------------------------------------------------------------------------
# ∂^{(n)}


def partial_iter(spec: CalculusSpec, E: ModuleConnection, n: int, e: TensorField) -> TensorField:
    """∂_E^{(n)} by the recursion ((id⊗π^{1,0})□⟨k⟩⊗id + id⊗∂_E)∂_E^{(k)}."""
    if n < 0:
        raise ValueError("n ≥ 0")
    if not condition_b(spec):
        raise ConditionFailed("b", _CONDITION_TEXT["b"])
    X = e
    for k in range(n):
        X = proj_form(spec, nabla_module(spec, E, X), k, "10")
    return X


def factorization_holds(spec: CalculusSpec, E: ModuleConnection, n: int, e: TensorField) -> bool:
    """∂_E^{(n)} = ((π^{1,0})^{⊗n}⊗id)∇_E^{(n)}."""
    full = nabla_iter(spec, E, n, e)
    for pos in range(n):
        full = proj_form(spec, full, pos, "10")
    return full == partial_iter(spec, E, n, e)


# ---------------------------------------------------------------------------
# ∂̄_HD


def _op_from(t: TensorField) -> OpTensor:
    """Ω¹⊗Vec^{⊗n} tensor → OpTensor."""
    acc: dict[int, dict] = {}
    for idx, c in t.items():
        acc.setdefault(idx[0], {})[idx[1:]] = c
    return OpTensor("f", {k: DiffOp.build(d) for k, d in acc.items()})


def _dbar_coeff(spec: CalculusSpec, c: Scalar, word: DiffOp) -> OpTensor:
    db = dbar(spec, c)
    return OpTensor("f", {k: word.scale(a) for (k,), a in db.items()})


class _Basis10:
    """Change of basis to (η-basis of Vec^{1,0}, η-basis of Vec^{0,1})."""

    def __init__(self, spec: CalculusSpec):
        self.b10 = sector_basis(spec, "10")
        self.b01 = sector_basis(spec, "01")
        cols = self.b10 + self.b01
        n = spec.n1
        M = [[cols[t].get((j,)) for t in range(n)] for j in range(n)]
        self.minv = linalg.inverse(M)
        self.m = len(self.b10)

    def words(self, v: DiffOp) -> dict[tuple[int, ...], Scalar]:
        acc: dict = {}
        for idx, c in v.items():
            expansions = [((), c)]
            for j in idx:
                expansions = [
                    (w + (t,), a * self.minv[t][j]) for w, a in expansions for t in range(len(self.minv)) if self.minv[t][j]
                ]
            for w, a in expansions:
                acc[w] = acc[w] + a if w in acc else a
        out = {w: a for w, a in acc.items() if a}
        if any(t >= self.m for w in out for t in w):
            raise NotInSector("operator is not in the (1,0)-sector")
        return out

    def word_op(self, w: tuple[int, ...]) -> DiffOp:
        t = TensorField.scalar(ONE)
        for i in w:
            t = t.tensor(self.b10[i])
        return DiffOp.from_tensor(t)


def _basis10(spec: CalculusSpec) -> _Basis10:
    if "basis10" not in spec._cache:
        spec._cache["basis10"] = _Basis10(spec)
    return spec._cache["basis10"]


def _ev_first(u: TensorField, y: TensorField) -> TensorField:
    """(ev⊗id)(u ⊗ y) for y ∈ Ω¹⊗Ω¹, giving Ω¹."""
    acc: dict = {}
    for (a, b), c in y.items():
        ua = u.get((a,))
        if ua:
            acc[(b,)] = acc[(b,)] + ua * c if (b,) in acc else ua * c
    return TensorField.build(("f",), acc)


def _form_times_op(f: TensorField, W: DiffOp) -> OpTensor:
    return OpTensor("f", {k: W.scale(a) for (k,), a in f.items()})


def _eta_up(spec: CalculusSpec, i: int) -> TensorField:
    dec = decompose(spec)
    return TensorField(("v",), {(j,): dec.p10[j][i] for j in range(spec.n1)})


def _form_d(spec: CalculusSpec, xi: TensorField) -> TensorField:
    """d of a 1-form given with constant coefficients in the ξ basis."""
    return sum_fields(("w",), [spec.d1_image(j).scale(c) for (j,), c in xi.items()])


def _term1(spec: CalculusSpec, u: TensorField, v: DiffOp) -> OpTensor:
    head = _op_from(proj_form(spec, square_vec_n(spec, u), 0, "01"))
    return OpTensor("f", {k: bullet(spec, U, v) for k, U in head.comps.items()})


def _third(spec: CalculusSpec, u: TensorField, xi: TensorField, W: DiffOp) -> OpTensor:
    ph = phi11(spec)
    out = OpTensor("f")
    for i in range(spec.n1):
        eta = proj_form(spec, TensorField.basis(("f",), (i,)), 0, "10")
        w = wedge_at(spec, xi.tensor(eta), 0)
        if not w:
            continue
        f = _ev_first(u, ph(spec, w))
        if f:
            out = out - _form_times_op(f, bullet(spec, DiffOp.from_tensor(_eta_up(spec, i)), W))
    return out


def _three_term_A(spec: CalculusSpec, u: TensorField, v: DiffOp, X: OpTensor) -> OpTensor:
    """Coefficients kept on the 𝒯Vec leg: ξ = π^{0,1}ξ_k, w = X_k."""
    dec = decompose(spec)
    ph = phi11(spec)
    out = _term1(spec, u, v)
    for k, W in X.comps.items():
        xi = _proj_row(dec, k, "01")
        sq = proj_form(spec, proj_form(spec, square_forms_n(spec, xi), 0, "01"), 1, "10")
        f = _ev_first(u, ph(spec, wedge_at(spec, sq, 0)))
        if f:
            out = out - _form_times_op(f, W)
        out = out + _third(spec, u, xi, W)
    return out


def _three_term_B(spec: CalculusSpec, u: TensorField, v: DiffOp, X: OpTensor) -> OpTensor:
    """Coefficients moved onto the form leg: ξ = (π^{0,1}ξ_k).c, w = u_J."""
    dec = decompose(spec)
    ph = phi11(spec)
    out = _term1(spec, u, v)
    for k, W in X.comps.items():
        base = _proj_row(dec, k, "01")
        for J, c in W.items():
            xi = base.scale(c)
            word = DiffOp.basis(J)
            sq = proj_form(spec, proj_form(spec, square_forms_n(spec, xi), 0, "01"), 1, "10")
            f = _ev_first(u, ph(spec, wedge_at(spec, sq, 0)))
            if f:
                out = out - _form_times_op(f, word)
            out = out + _third(spec, u, xi, word)
    return out


def act_on_dbar_module(spec: CalculusSpec, v, X: OpTensor) -> OpTensor:
    """v ▷ X on Ω^{0,1}⊗𝒯Vec^{*,0} from the left ∂-connection
    ∂(ξ⊗w) = φπ^{1,1}dξ⊗w + (σ⊗id)(ξ⊗η_i⊗η^i•w), σ(ξ⊗η) = −φπ^{1,1}(ξ∧η)."""
    v = as_diffop(v)
    B = _basis10(spec)
    out = OpTensor("f")
    for w, c in B.words(v).items():
        out = out + _act_word(spec, B, w, X).scale(c)
    return out


def _act_word(spec: CalculusSpec, B: _Basis10, w: tuple[int, ...], X: OpTensor) -> OpTensor:
    if not w:
        return X
    u = B.b10[w[0]]
    inner = _act_word(spec, B, w[1:], X)
    out = _act_grade1(spec, u, inner)
    if len(w) > 1:
        lower = act_vec(spec, u, B.word_op(w[1:]))
        if lower:
            out = out - act_on_dbar_module(spec, lower, X)
    return out


def _act_grade1(spec: CalculusSpec, u: TensorField, X: OpTensor) -> OpTensor:
    dec = decompose(spec)
    ph = phi11(spec)
    out = OpTensor("f")
    for k, W in X.comps.items():
        xi = _proj_row(dec, k, "01")
        dxi = _form_d(spec, xi)
        if dxi:
            f = _ev_first(u, ph(spec, dxi))
            if f:
                out = out + _form_times_op(f, W)
        out = out + _third(spec, u, xi, W)
    return out


def dbar_hd_conditions(spec: CalculusSpec) -> dict[str, bool]:
    conds = check_lemma_conditions(spec, with_d=True)
    conds["integrable"] = integrable(spec)
    return conds


def dbar_hd(spec: CalculusSpec, v) -> OpTensor:
    """∂̄_HD on 𝒯Vec^{*,0}, an element of Ω^{0,1}⊗𝒯Vec^{*,0} (form index k → operator)."""
    if "dbar_hd_ok" not in spec._cache:
        require(dbar_hd_conditions(spec))
        spec._cache["dbar_hd_ok"] = True
    v = as_diffop(v)
    B = _basis10(spec)
    out = OpTensor("f")
    for w, c in B.words(v).items():
        word = B.word_op(w)
        out = out + _dbar_coeff(spec, c, word) + _dbar_word(spec, B, w).scale(c)
    return out


def _dbar_word(spec: CalculusSpec, B: _Basis10, w: tuple[int, ...]) -> OpTensor:
    memo = spec._cache.setdefault("dbar_word", {})
    if w in memo:
        return memo[w]
    if not w:
        out = OpTensor("f")
    elif len(w) == 1:
        out = _op_from(proj_form(spec, square_vec_n(spec, B.b10[w[0]]), 0, "01"))
    else:
        u = B.b10[w[0]]
        rest = B.word_op(w[1:])
        X = _dbar_word(spec, B, w[1:])
        prod_a = _three_term_A(spec, u, rest, X)
        prod_b = _three_term_B(spec, u, rest, X)
        compact = _term1(spec, u, rest) + _act_grade1(spec, u, X)
        if prod_a != prod_b:
            raise InternalCheckFailed("∂̄_HD(u•v) depends on the tensor representative")
        if prod_a != compact:
            raise InternalCheckFailed("three-term and compact forms of ∂̄_HD(u•v) disagree")
        lower = act_vec(spec, u, rest)
        out = prod_a - dbar_hd(spec, lower) if lower else prod_a
    memo[w] = out
    return out


def dbar_hd_act(spec: CalculusSpec, X: OpTensor, a) -> TensorField:
    """∂̄_HD(v)▷a = Σ_k ξ_k (X_k ▷ a)."""
    acc = {}
    for k, W in X.comps.items():
        val = act_function(spec, W, a)
        if val:
            acc[(k,)] = val
    return TensorField.build(("f",), acc)


def op_bullet_right(spec: CalculusSpec, X: OpTensor, w) -> OpTensor:
    return OpTensor("f", {k: bullet(spec, W, w) for k, W in X.comps.items()})


@dataclass
class HoloOpReport:
    pairs: int = 0
    holomorphic_samples: int = 0
    closure_ok: bool = True
    action_ok: bool = True
    product_law_ok: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.closure_ok and self.action_ok and self.product_law_ok


def holomorphic_samples(spec: CalculusSpec, count: int, seed: int = 0, max_grade: int = 2) -> list[DiffOp]:
    """Random elements of the ∂̄_HD kernel, confirmed by computing ∂̄_HD."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        v = random_sector_element(spec, rng, "10", max_grade, holomorphic=True)
        if dbar_hd(spec, v).is_zero():
            out.append(v)
    return out


def holo_op_tests(spec: CalculusSpec, pairs: int = 20, seed: int = 0) -> HoloOpReport:
    """Closure of holomorphic operators under •, the action identity and the product law."""
    require(dbar_hd_conditions(spec))
    rep = HoloOpReport()
    samples = holomorphic_samples(spec, 2 * pairs, seed)
    rep.holomorphic_samples = len(samples)
    funcs = _holo_samples(spec, 3, random.Random(seed + 1))
    rng = random.Random(seed + 2)
    for i in range(min(pairs, len(samples) // 2)):
        v, w = samples[2 * i], samples[2 * i + 1]
        rep.pairs += 1
        if not dbar_hd(spec, bullet(spec, v, w)).is_zero():
            rep.closure_ok = False
            rep.failures.append(f"closure pair {i}")
        for a in funcs:
            if dbar(spec, act_function(spec, v, a)) != dbar_hd_act(spec, dbar_hd(spec, v), a):
                rep.action_ok = False
                rep.failures.append(f"action pair {i}")
        # product law on general (not necessarily holomorphic) sector elements
        x = random_sector_element(spec, rng, "10", 2)
        y = random_sector_element(spec, rng, "10", 1)
        lhs = dbar_hd(spec, bullet(spec, x, y))
        rhs = op_bullet_right(spec, dbar_hd(spec, x), y) + act_on_dbar_module(spec, x, dbar_hd(spec, y))
        if lhs != rhs:
            rep.product_law_ok = False
            rep.failures.append(f"product law pair {i}")
    return rep
