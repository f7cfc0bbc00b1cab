"""Differential calculi given by structure constants, and the iterated
operators built from them: ev⟨n⟩, □⟨n⟩ on forms and on vector fields,
σ⁻⟨n⟩, ∇_E^(n), torsion and module curvature.

Conventions (all indices 0-based):

    ξ_i ∧ ξ_j = Σ_k W[i][j][k] ω_k          dξ_i = Σ_k N[i][k] ω_k
    □ξ_k = Σ_{i,j} Γ[k][i][j] ξ_i ⊗ ξ_j      (module slot first, direction last)
    σ⁻¹(ξ_i ⊗ ξ_j) = Σ_{a,b} S[i][j][a][b] ξ_a ⊗ ξ_b
    J(ξ_i) = Σ_j J[i][j] ξ_j
    d(x_v) = Σ_i D[v][i] ξ_i                 (polynomial backend)

The Ω¹ basis is free and central, ev(u_i ⊗ ξ_j) = δ_ij and
coev(1) = Σ_i ξ_i ⊗ u_i.  ev⟨n⟩ nests, so the last vector slot pairs with
the first form slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .scalar import ONE, ZERO, Scalar
from .tensors import Index, TensorField, apply_block, sum_fields


class CalculusError(Exception):
    pass


class SpecError(CalculusError):
    """The calculus data is malformed or lacks something the operation needs."""


class ChristoffelRequired(SpecError):
    pass


class CapabilityError(CalculusError):
    """An optional structure (σ⁻¹, σ_E, J) is needed but absent."""


class SigmaRequired(CapabilityError):
    pass


class SigmaERequired(CapabilityError):
    pass


def _scalar_grid(data, shape: tuple[int, ...]) -> tuple:
    """Nested tuples of Scalars from nested sequences or a sparse dict."""
    if isinstance(data, Mapping):
        def build(prefix: tuple[int, ...]):
            if len(prefix) == len(shape):
                return Scalar.coerce(data.get(prefix, ZERO))
            return tuple(build(prefix + (i,)) for i in range(shape[len(prefix)]))
        return build(())

    def conv(x, depth):
        if depth == len(shape):
            return Scalar.coerce(x)
        if len(x) != shape[depth]:
            raise SpecError(f"expected length {shape[depth]} at depth {depth}, got {len(x)}")
        return tuple(conv(y, depth + 1) for y in x)
    return conv(data, 0)


@dataclass(frozen=True)
class CoeffAlgebra:
    kind: str = "constants"
    coordinate_vars: tuple[str, ...] = ()
    derivation_table: tuple[tuple[Scalar, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in ("constants", "commutative_polynomial"):
            raise SpecError(f"unknown algebra kind {self.kind!r}")
        if self.kind == "constants" and self.coordinate_vars:
            raise SpecError("the constants backend has no coordinates")
        if len(self.derivation_table) != len(self.coordinate_vars):
            raise SpecError("one d-table row per coordinate is required")

    def d(self, a: Scalar, n1: int) -> list[Scalar]:
        """Components of da in the Ω¹ basis."""
        out = [ZERO] * n1
        if self.kind == "constants":
            return out
        for v, row in zip(self.coordinate_vars, self.derivation_table):
            da = a.diff(v)
            if da:
                for i, c in enumerate(row):
                    if c:
                        out[i] = out[i] + da * c
        return out


@dataclass(frozen=True)
class CalculusSpec:
    n1: int
    n2: int
    wedge: tuple
    d1: tuple
    algebra: CoeffAlgebra = CoeffAlgebra()
    christoffel: tuple | None = None
    sigma_inv: tuple | None = None
    J: tuple | None = None
    parameters: tuple[str, ...] = ()
    omega1_names: tuple[str, ...] = ()
    omega2_names: tuple[str, ...] = ()
    vec_names: tuple[str, ...] = ()
    name: str = ""
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @classmethod
    def build(
        cls,
        n1: int,
        n2: int,
        wedge,
        d1=None,
        algebra: CoeffAlgebra | None = None,
        christoffel=None,
        sigma_inv=None,
        J=None,
        parameters: Iterable[str] = (),
        omega1_names: Iterable[str] = (),
        omega2_names: Iterable[str] = (),
        vec_names: Iterable[str] = (),
        name: str = "",
    ) -> "CalculusSpec":
        """Accepts nested lists or sparse {index tuple: value} dicts."""
        omega1_names = tuple(omega1_names) or tuple(f"xi{i}" for i in range(n1))
        return cls(
            n1=n1,
            n2=n2,
            wedge=_scalar_grid(wedge, (n1, n1, n2)),
            d1=_scalar_grid(d1 if d1 is not None else {}, (n1, n2)),
            algebra=algebra or CoeffAlgebra(),
            christoffel=None if christoffel is None else _scalar_grid(christoffel, (n1, n1, n1)),
            sigma_inv=None if sigma_inv is None else _scalar_grid(sigma_inv, (n1, n1, n1, n1)),
            J=None if J is None else _scalar_grid(J, (n1, n1)),
            parameters=tuple(parameters),
            omega1_names=omega1_names,
            omega2_names=tuple(omega2_names) or tuple(f"w{k}" for k in range(n2)),
            vec_names=tuple(vec_names) or tuple(f"u{i}" for i in range(n1)),
            name=name,
        )

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 0:
            raise SpecError("basis dimensions must be positive")
        for nm, n in (("omega1_names", self.n1), ("omega2_names", self.n2), ("vec_names", self.n1)):
            if getattr(self, nm) and len(getattr(self, nm)) != n:
                raise SpecError(f"{nm} has the wrong length")
        if self.algebra.kind == "commutative_polynomial":
            for row in self.algebra.derivation_table:
                if len(row) != self.n1:
                    raise SpecError("d-table rows must have n1 entries")
        if self.J is not None:
            check_J(self)

    def replace(self, **changes) -> "CalculusSpec":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "_cache"}
        data.update(changes)
        return CalculusSpec(**data)

    # sparse views ----------------------------------------------------------
    def _memo(self, key: str, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def wedge_image(self, i: int, j: int) -> TensorField:
        def build():
            return {
                (a, b): TensorField(("w",), {(k,): self.wedge[a][b][k] for k in range(self.n2)})
                for a in range(self.n1)
                for b in range(self.n1)
            }
        return self._memo("wedge", build)[(i, j)]

    def d1_image(self, i: int) -> TensorField:
        def build():
            return [TensorField(("w",), {(k,): self.d1[a][k] for k in range(self.n2)}) for a in range(self.n1)]
        return self._memo("d1", build)[i]

    def gamma_image(self, k: int) -> TensorField:
        if self.christoffel is None:
            raise ChristoffelRequired("this operation needs the Christoffel symbols Γ")

        def build():
            G = self.christoffel
            return [
                TensorField(("f", "f"), {(i, j): G[a][i][j] for i in range(self.n1) for j in range(self.n1)})
                for a in range(self.n1)
            ]
        return self._memo("gamma", build)[k]

    def sigma_inv_image(self, i: int, j: int) -> TensorField:
        if self.sigma_inv is None:
            raise SigmaRequired(
                "σ⁻¹ is not supplied for this calculus; iterated □ beyond order 1 needs it"
            )

        def build():
            Sg = self.sigma_inv
            n = self.n1
            return {
                (a, b): TensorField(("f", "f"), {(c, d): Sg[a][b][c][d] for c in range(n) for d in range(n)})
                for a in range(n)
                for b in range(n)
            }
        return self._memo("sigma_inv", build)[(i, j)]

    def sigma_image(self, c: int, k: int) -> TensorField:
        """σ(u_c ⊗ ξ_k) ∈ Ω¹⊗Vec, composed from σ⁻¹."""
        if self.sigma_inv is None:
            raise SigmaRequired("σ is derived from σ⁻¹, which is not supplied for this calculus")

        def build():
            Sg = self.sigma_inv
            n = self.n1
            out = {}
            for cc, kk in product(range(n), repeat=2):
                acc = {}
                for i, b in product(range(n), repeat=2):
                    if Sg[kk][i][cc][b]:
                        acc[(b, i)] = Sg[kk][i][cc][b]
                out[(cc, kk)] = TensorField(("f", "v"), acc)
            return out
        return self._memo("sigma", build)[(c, k)]

    def d0(self, a: Scalar) -> TensorField:
        if self.algebra.kind == "constants":
            return TensorField(("f",))
        comps = self.algebra.d(Scalar.coerce(a), self.n1)
        return TensorField.build(("f",), {(i,): c for i, c in enumerate(comps)})


# ---------------------------------------------------------------------------
# small helpers


def form(spec: CalculusSpec, coeffs: Mapping[int, Scalar] | Sequence[Scalar]) -> TensorField:
    if not isinstance(coeffs, Mapping):
        coeffs = dict(enumerate(coeffs))
    return TensorField(("f",), {(i,): c for i, c in coeffs.items()})


def vec(spec: CalculusSpec, coeffs: Mapping[int, Scalar] | Sequence[Scalar]) -> TensorField:
    if not isinstance(coeffs, Mapping):
        coeffs = dict(enumerate(coeffs))
    return TensorField(("v",), {(i,): c for i, c in coeffs.items()})


def wedge_at(spec: CalculusSpec, t: TensorField, pos: int = 0) -> TensorField:
    """Apply ∧ to two adjacent Ω¹ slots."""
    if t.slots[pos:pos + 2] != ("f", "f"):
        raise ValueError("∧ needs two adjacent Ω¹ slots")
    return apply_block(t, pos, 2, lambda k: spec.wedge_image(*k), ("w",))


def sigma_inv_at(spec: CalculusSpec, t: TensorField, pos: int) -> TensorField:
    if t.slots[pos:pos + 2] != ("f", "f"):
        raise ValueError("σ⁻¹ needs two adjacent Ω¹ slots")
    return apply_block(t, pos, 2, lambda k: spec.sigma_inv_image(*k), ("f", "f"))


def sigma_at(spec: CalculusSpec, t: TensorField, pos: int) -> TensorField:
    if t.slots[pos:pos + 2] != ("v", "f"):
        raise ValueError("σ needs adjacent Vec, Ω¹ slots")
    return apply_block(t, pos, 2, lambda k: spec.sigma_image(*k), ("f", "v"))


def d_form1(spec: CalculusSpec, xi: TensorField) -> TensorField:
    """Exterior derivative Ω¹ → Ω²: d(c ξ_k) = dc∧ξ_k + c dξ_k."""
    parts = []
    for (k,), c in xi.items():
        parts.append(spec.d1_image(k).scale(c))
        dc = spec.d0(c)
        if dc:
            parts.append(wedge_at(spec, dc.tensor(TensorField.basis(("f",), (k,)))))
    return sum_fields(("w",), parts)


@dataclass(frozen=True)
class LinearMap:
    """Central-coefficient linear map given on basis tensors."""

    src: tuple[str, ...]
    dst: tuple[str, ...]
    images: Mapping[Index, TensorField]

    def __call__(self, t: TensorField) -> TensorField:
        if t.slots != self.src:
            raise ValueError(f"expected slots {self.src}, got {t.slots}")
        return apply_block(t, 0, len(self.src), lambda k: self.images.get(k), self.dst)

    def matrix(self, n: int) -> dict[Index, dict[Index, Scalar]]:
        return {k: dict(v.items()) for k, v in self.images.items() if v}


# ---------------------------------------------------------------------------
# evaluation


def ev_n(v: TensorField, w: TensorField) -> Scalar:
    """ev⟨n⟩(v ⊗ w) for v ∈ Vec^{⊗n}, w ∈ Ω^{⊗n}; n = 0 multiplies."""
    n = len(v.slots)
    if v.slots != ("v",) * n or w.slots != ("f",) * len(w.slots):
        raise ValueError("ev_n pairs Vec^{⊗n} with Ω^{⊗n}")
    if len(w.slots) != n:
        raise ValueError(f"grade mismatch: {n} vs {len(w.slots)}")
    total = ZERO
    for k, c in v.items():
        d = w.get(k[::-1])
        if d:
            total = total + c * d
    return total


def coev(spec: CalculusSpec) -> TensorField:
    return TensorField(("f", "v"), {(i, i): ONE for i in range(spec.n1)})


# ---------------------------------------------------------------------------
# □ on forms


def _square_forms_basis(spec: CalculusSpec, idx: Index) -> TensorField:
    memo = spec._cache.setdefault("sqf", {})
    hit = memo.get(idx)
    if hit is not None:
        return hit
    n = len(idx)
    if n == 0:
        out = TensorField(("f",))
    elif n == 1:
        out = spec.gamma_image(idx[0])
    else:
        head, k = idx[:-1], idx[-1]
        first = TensorField.basis(("f",) * (n - 1), head).tensor(spec.gamma_image(k))
        prev = _square_forms_basis(spec, head).tensor(TensorField.basis(("f",), (k,)))
        out = first + sigma_inv_at(spec, prev, n - 1) if prev else first
    memo[idx] = out
    return out


def square_forms_n(spec: CalculusSpec, w: TensorField) -> TensorField:
    """□⟨n⟩: Ω^{⊗n} → Ω^{⊗(n+1)}, a right covariant derivative.

    On ξ_I.c it gives □⟨n⟩(ξ_I).c + ξ_I ⊗ dc; n = 0 is d on A.
    """
    n = len(w.slots)
    if w.slots != ("f",) * n:
        raise ValueError("square_forms_n acts on pure forms")
    slots = ("f",) * (n + 1)
    parts = []
    for idx, c in w.items():
        if n:
            b = _square_forms_basis(spec, idx)
            if b:
                parts.append(b.scale(c))
        dc = spec.d0(c)
        if dc:
            parts.append(TensorField.basis(("f",) * n, idx).tensor(dc))
    return sum_fields(slots, parts)


def sigma_inv_n(spec: CalculusSpec, n: int) -> LinearMap:
    """σ⁻⟨n⟩ = (id^{n-1}⊗σ⁻¹)…(σ⁻¹⊗id^{n-1}) on Ω^{⊗(n+1)}."""
    if n < 1:
        raise ValueError("n ≥ 1")
    slots = ("f",) * (n + 1)
    images = {}
    for idx in product(range(spec.n1), repeat=n + 1):
        t = TensorField.basis(slots, idx)
        for pos in range(n):
            t = sigma_inv_at(spec, t, pos)
        images[idx] = t
    return LinearMap(slots, slots, images)


def sigma_from_sigma_inv(spec: CalculusSpec) -> LinearMap:
    """σ = (ev⊗id⊗id)(id⊗σ⁻¹⊗id)(id⊗id⊗coev(1)) : Vec⊗Ω¹ → Ω¹⊗Vec."""
    images = {(c, k): spec.sigma_image(c, k) for c in range(spec.n1) for k in range(spec.n1)}
    return LinearMap(("v", "f"), ("f", "v"), images)


# ---------------------------------------------------------------------------
# □ on vector fields


def _dual_basis(spec: CalculusSpec, c: int) -> TensorField:
    """□u_c = −Σ Γ[k][c][a] ξ_a ⊗ u_k, forced by d∘ev = (id⊗ev)(□⊗id)+(ev⊗id)(id⊗□)."""
    memo = spec._cache.setdefault("sqv1", {})
    if c not in memo:
        acc = {}
        for k in range(spec.n1):
            for (i, a), g in spec.gamma_image(k).items():
                if i == c:
                    acc[(a, k)] = acc.get((a, k), ZERO) - g
        memo[c] = TensorField.build(("f", "v"), acc)
    return memo[c]


def dual_connection_vec(spec: CalculusSpec, v: TensorField) -> TensorField:
    """Left covariant derivative on Vec: □(a.u_c) = a.□u_c + da ⊗ u_c."""
    if v.slots != ("v",):
        raise ValueError("dual_connection_vec acts on Vec")
    return square_vec_n(spec, v)


def _square_vec_basis(spec: CalculusSpec, idx: Index) -> TensorField:
    memo = spec._cache.setdefault("sqv", {})
    hit = memo.get(idx)
    if hit is not None:
        return hit
    n = len(idx)
    if n == 0:
        out = TensorField(("f",))
    elif n == 1:
        out = _dual_basis(spec, idx[0])
    else:
        c, rest = idx[0], idx[1:]
        first = _dual_basis(spec, c).tensor(TensorField.basis(("v",) * (n - 1), rest))
        inner = _square_vec_basis(spec, rest)
        if inner:
            second = sigma_at(spec, TensorField.basis(("v",), (c,)).tensor(inner), 0)
            out = first + second
        else:
            out = first
    memo[idx] = out
    return out


def square_vec_n(spec: CalculusSpec, v: TensorField) -> TensorField:
    """□⟨n⟩ on Vec^{⊗n}: □⊗id + (σ⊗id)(id⊗□⟨n-1⟩), left Leibniz in the coefficients."""
    n = len(v.slots)
    if v.slots != ("v",) * n:
        raise ValueError("square_vec_n acts on pure vector fields")
    slots = ("f",) + ("v",) * n
    parts = []
    for idx, c in v.items():
        if n:
            b = _square_vec_basis(spec, idx)
            if b:
                parts.append(b.scale(c))
        dc = spec.d0(c)
        if dc:
            parts.append(dc.tensor(TensorField.basis(("v",) * n, idx)))
    return sum_fields(slots, parts)


# ---------------------------------------------------------------------------
# modules with left covariant derivatives


@dataclass(frozen=True, eq=False)
class ModuleConnection:
    """Free left module with basis e_a and ∇e_a = Σ_b A[b][a] ⊗ e_b.

    ``nabla[a]`` stores ∇e_a as a tensor with slots ('f', 'e');
    ``sigma_E[(a, k)]`` is σ_E(e_a ⊗ ξ_k) with slots ('f', 'e').
    """

    rank: int
    nabla: tuple[TensorField, ...]
    sigma_E: Mapping[tuple[int, int], TensorField] | None = None
    flat: bool | None = None
    name: str = ""

    @classmethod
    def from_matrix(cls, rank: int, A: Sequence[Sequence[TensorField]], **kw) -> "ModuleConnection":
        nabla = []
        for a in range(rank):
            parts = [A[b][a].tensor(TensorField.basis(("e",), (b,))) for b in range(rank)]
            nabla.append(sum_fields(("f", "e"), parts))
        return cls(rank, tuple(nabla), **kw)

    def element(self, coeffs: Mapping[int, Scalar] | Sequence[Scalar]) -> TensorField:
        if not isinstance(coeffs, Mapping):
            coeffs = dict(enumerate(coeffs))
        return TensorField(("e",), {(a,): c for a, c in coeffs.items()})

    def basis(self, a: int) -> TensorField:
        return TensorField.basis(("e",), (a,))


def trivial_module(spec: CalculusSpec) -> ModuleConnection:
    """E = A with ∇ = d and σ_E the flip."""
    sig = {(0, k): TensorField.basis(("f", "e"), (k, 0)) for k in range(spec.n1)}
    return ModuleConnection(1, (TensorField(("f", "e")),), sigma_E=sig, flat=True, name="algebra")


def omega1_module(spec: CalculusSpec, sigma_E: str | Mapping | None = "flip", flat: bool | None = None) -> ModuleConnection:
    """E = Ω¹ with the left connection read off the same tensor as Γ.

    ∇e_a = Σ Γ[a][i][j] ξ_i ⊗ e_j, i.e. the first slot is the form.
    """
    n = spec.n1
    if spec.christoffel is None:
        nabla = tuple(TensorField(("f", "e")) for _ in range(n))
    else:
        nabla = tuple(TensorField(("f", "e"), dict(spec.gamma_image(a).items())) for a in range(n))
    if sigma_E == "flip":
        sig = {(a, k): TensorField.basis(("f", "e"), (k, a)) for a in range(n) for k in range(n)}
    else:
        sig = sigma_E
    return ModuleConnection(n, nabla, sigma_E=sig, flat=flat, name="omega1")


def nabla_module(spec: CalculusSpec, E: ModuleConnection, X: TensorField) -> TensorField:
    """(□⟨n⟩⊗id_E + id^{⊗n}⊗∇_E) on Ω^{⊗n}⊗E."""
    n = len(X.slots) - 1
    if X.slots != ("f",) * n + ("e",):
        raise ValueError("expected an element of Ω^{⊗n}⊗E")
    out_slots = ("f",) * (n + 1) + ("e",)
    parts = []
    for idx, c in X.items():
        I, b = idx[:-1], idx[-1]
        eb = TensorField.basis(("e",), (b,))
        if n:
            sq = _square_forms_basis(spec, I)
            if sq:
                parts.append(sq.scale(c).tensor(eb))
        dc = spec.d0(c)
        if dc:
            parts.append(TensorField.basis(("f",) * n, I).tensor(dc).tensor(eb))
        nb = E.nabla[b]
        if nb:
            parts.append(TensorField.basis(("f",) * n, I).tensor(nb).scale(c))
    return sum_fields(out_slots, parts)


def nabla_iter(spec: CalculusSpec, E: ModuleConnection, n: int, e: TensorField) -> TensorField:
    """∇_E^(n) e ∈ Ω^{⊗n}⊗E; n = 0 returns e."""
    if n < 0:
        raise ValueError("n ≥ 0")
    X = e
    for _ in range(n):
        X = nabla_module(spec, E, X)
    return X


def torsion(spec: CalculusSpec, xi: TensorField) -> TensorField:
    """Tor_R = d + ∧□ on Ω¹."""
    return d_form1(spec, xi) + wedge_at(spec, square_forms_n(spec, xi), 0)


def module_curvature(spec: CalculusSpec, E: ModuleConnection, e: TensorField) -> TensorField:
    """R_E(e) = (d⊗id − id∧∇)∇e."""
    X = nabla_module(spec, E, e)
    parts = []
    for (k, b), c in X.items():
        parts.append(spec.d1_image(k).tensor(TensorField.basis(("e",), (b,))).scale(c))
        inner = nabla_module(spec, E, TensorField.basis(("e",), (b,), c))
        if inner:
            parts.append(-wedge_at(spec, TensorField.basis(("f",), (k,)).tensor(inner), 0))
    return sum_fields(("w", "e"), parts)


# ---------------------------------------------------------------------------
# structure checks


def ker_wedge(spec: CalculusSpec) -> list[TensorField]:
    """Spanning set of ker(∧: Ω¹⊗Ω¹ → Ω²)."""
    def build():
        n = spec.n1
        pairs = list(product(range(n), repeat=2))
        rows = [[spec.wedge[i][j][k] for (i, j) in pairs] for k in range(spec.n2)]
        basis = linalg.nullspace(rows, len(pairs))
        return [TensorField(("f", "f"), {p: x for p, x in zip(pairs, vecx)}) for vecx in basis]
    return spec._memo("ker_wedge", build)


def J_on_forms(spec: CalculusSpec, t: TensorField, pos: int) -> TensorField:
    J = spec.J
    n = spec.n1
    return apply_block(
        t, pos, 1, lambda k: TensorField(("f",), {(j,): J[k[0]][j] for j in range(n)}), ("f",)
    )


def check_J(spec: CalculusSpec) -> None:
    n = spec.n1
    J = [list(r) for r in spec.J]
    sq = linalg.matmul(J, J)
    if any(sq[i][j] != (-ONE if i == j else ZERO) for i in range(n) for j in range(n)):
        raise SpecError("J² ≠ −id")
    for k in ker_wedge(spec):
        img = J_on_forms(spec, k, 0) + J_on_forms(spec, k, 1)
        if wedge_at(spec, img, 0):
            raise SpecError("J⊗id + id⊗J does not preserve ker ∧; J does not descend to Ω²")


def check_duality(spec: CalculusSpec) -> bool:
    """d∘ev = (id⊗ev)(□⊗id) + (ev⊗id)(id⊗□) on all basis pairs u_c ⊗ ξ_k."""
    for c in range(spec.n1):
        sq_u = _dual_basis(spec, c)
        for k in range(spec.n1):
            acc = {}
            for (a, kk), g in sq_u.items():
                if kk == k:
                    acc[(a,)] = acc.get((a,), ZERO) + g
            for (i, j), g in spec.gamma_image(k).items():
                if i == c:
                    acc[(j,)] = acc.get((j,), ZERO) + g
            if TensorField.build(("f",), acc):
                return False
    return True


def check_sigma_pair(spec: CalculusSpec) -> bool:
    """(id⊗ev)(σ⊗id) = (ev⊗id)(id⊗σ⁻¹) on all basis triples u_c ⊗ ξ_k ⊗ ξ_l."""
    n = spec.n1
    for c, k, l in product(range(n), repeat=3):
        lhs = {}
        for (b, i), s in spec.sigma_image(c, k).items():
            if i == l:
                lhs[(b,)] = lhs.get((b,), ZERO) + s
        rhs = {}
        for (a, b), s in spec.sigma_inv_image(k, l).items():
            if a == c:
                rhs[(b,)] = rhs.get((b,), ZERO) + s
        if TensorField.build(("f",), lhs) != TensorField.build(("f",), rhs):
            return False
    return True
