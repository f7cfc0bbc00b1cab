"""Built-in calculi and the quantum SU(2) verification artifacts."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from itertools import product
from typing import Callable, Mapping

from . import linalg
from .calculus import CalculusSpec, CoeffAlgebra, module_curvature, omega1_module
from .diffops import act, da_relations, relation_words
from .scalar import I, ONE, ZERO, Scalar, substitute
from .tensors import DiffOp, TensorField

PLUS, ZERO_IDX, MINUS = 0, 1, 2


def _flip(n: int) -> dict:
    return {(i, j, j, i): ONE for i in range(n) for j in range(n)}


def classical_plane() -> CalculusSpec:
    """Polynomials in x, y with dx, dy, flat Γ and flip σ⁻¹."""
    return CalculusSpec.build(
        2,
        1,
        {(0, 1, 0): 1, (1, 0, 0): -1},
        algebra=CoeffAlgebra("commutative_polynomial", ("x", "y"), ((ONE, ZERO), (ZERO, ONE))),
        christoffel={},
        sigma_inv=_flip(2),
        omega1_names=("dx", "dy"),
        omega2_names=("dx^dy",),
        vec_names=("Dx", "Dy"),
        name="classical-plane",
    )


def classical_complex_plane() -> CalculusSpec:
    """Polynomials in z and zb (standing for z̄) with J dz = i dz, J dzb = −i dzb."""
    return CalculusSpec.build(
        2,
        1,
        {(0, 1, 0): 1, (1, 0, 0): -1},
        algebra=CoeffAlgebra("commutative_polynomial", ("z", "zb"), ((ONE, ZERO), (ZERO, ONE))),
        christoffel={},
        sigma_inv=_flip(2),
        J=[[I, ZERO], [ZERO, -I]],
        omega1_names=("dz", "dzb"),
        omega2_names=("dz^dzb",),
        vec_names=("Dz", "Dzb"),
        name="complex-plane",
    )


@dataclass(frozen=True)
class Su2qConnectionParams:
    """Connection parameters; None leaves the parameter free."""

    r: Scalar | None = None
    mu_p: Scalar | None = None
    mu_m: Scalar | None = None
    n_p: Scalar | None = None
    n_m: Scalar | None = None
    m_p: Scalar | None = None
    m_m: Scalar | None = None

    def values(self) -> dict[str, Scalar]:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = Scalar.var(f.name) if v is None else Scalar.coerce(v)
        return out


SU2Q_PARAMETERS = ("q", "r", "mu_p", "mu_m", "n_p", "n_m", "m_p", "m_m")


def su2q_structure() -> tuple[dict, dict]:
    """Wedge and d constants for (e+, e0, e-) and (w0 = e+∧e-, w+ = e+∧e0, w- = e-∧e0)."""
    q = Scalar.var("q")
    wedge = {
        (PLUS, MINUS, 0): ONE,
        (MINUS, PLUS, 0): -q**2,
        (PLUS, ZERO_IDX, 1): ONE,
        (ZERO_IDX, PLUS, 1): -q**4,
        (MINUS, ZERO_IDX, 2): ONE,
        (ZERO_IDX, MINUS, 2): -q**-4,
    }
    d1 = {
        (ZERO_IDX, 0): q**3,
        (PLUS, 1): -q**2 * (1 + q**-2),
        (MINUS, 2): q**-2 * (1 + q**-2),
    }
    return wedge, d1


def su2q_gamma(params: Su2qConnectionParams | None = None) -> dict:
    """□e0 = r e0⊗e0 + μ₊ e+⊗e- + μ₋ e-⊗e+,  □e± = n± e0⊗e± + m± e±⊗e0."""
    p = (params or Su2qConnectionParams()).values()
    return {
        (ZERO_IDX, ZERO_IDX, ZERO_IDX): p["r"],
        (ZERO_IDX, PLUS, MINUS): p["mu_p"],
        (ZERO_IDX, MINUS, PLUS): p["mu_m"],
        (PLUS, ZERO_IDX, PLUS): p["n_p"],
        (PLUS, PLUS, ZERO_IDX): p["m_p"],
        (MINUS, ZERO_IDX, MINUS): p["n_m"],
        (MINUS, MINUS, ZERO_IDX): p["m_m"],
    }


def su2q_3d(params: Su2qConnectionParams | None = None, sigma_inv=None) -> CalculusSpec:
    """Woronowicz 3D calculus, left-invariant sector, with the connection family."""
    wedge, d1 = su2q_structure()
    return CalculusSpec.build(
        3,
        3,
        wedge,
        d1,
        christoffel=su2q_gamma(params),
        sigma_inv=sigma_inv,
        parameters=SU2Q_PARAMETERS,
        omega1_names=("e+", "e0", "e-"),
        omega2_names=("w0", "w+", "w-"),
        vec_names=("u+", "u0", "u-"),
        name="su2q",
    )


# ---------------------------------------------------------------------------
# flat cases


@dataclass(frozen=True)
class FlatCase:
    label: str
    bindings: Mapping[str, Scalar]
    free: tuple[str, ...]
    note: str = ""


def su2q_flat_cases() -> list[FlatCase]:
    """The four zero-curvature cases, as printed.  Underdetermined products
    keep one factor free.  Case (d) is encoded verbatim (μ₊ = 0), which
    leaves the product constraint μ₊m₋ = q unsatisfiable; see
    :func:`search_case_d`."""
    q, mu_p, mu_m = Scalar.var("q"), Scalar.var("mu_p"), Scalar.var("mu_m")
    zero_all = {k: ZERO for k in ("r", "mu_p", "mu_m", "n_p", "n_m", "m_p", "m_m")}
    case_b = {
        "n_m": -q**2 * (1 + q**-2),
        "m_m": q * q**2 * (1 + q**-2) / mu_p,
        "n_p": q**-2 * (1 + q**-2),
        "m_p": q**3 * q**-2 * (1 + q**-2) / mu_m,
        "r": ZERO,
    }
    case_c = {"n_m": ZERO, "m_m": ZERO, "mu_p": ZERO, "n_p": q**-2, "m_p": q**3 * q**-2 / mu_m, "r": -ONE}
    case_d = {"n_p": ZERO, "m_p": ZERO, "mu_p": ZERO, "n_m": -ONE, "r": q**-2}
    return [
        FlatCase("a", zero_all, ()),
        FlatCase("b", case_b, ("mu_p", "mu_m")),
        FlatCase("c", case_c, ("mu_m",)),
        FlatCase("d", case_d, ("mu_m", "m_m"), note="verbatim; μ₊m₋ = q cannot hold with μ₊ = 0"),
    ]


def su2q_curvature_coefficients(spec: CalculusSpec | None = None) -> dict[tuple[int, int, int], Scalar]:
    """All coefficients (basis a, ω_k, e_b) of R(e_a) on Ω¹ with free parameters."""
    spec = spec or su2q_3d()
    E = omega1_module(spec)
    out = {}
    for a in range(3):
        for (k, b), c in module_curvature(spec, E, E.basis(a)).items():
            out[(a, k, b)] = c
    return out


def curvature_under(bindings: Mapping[str, Scalar], coeffs=None) -> dict:
    coeffs = coeffs if coeffs is not None else su2q_curvature_coefficients()
    out = {}
    for key, c in coeffs.items():
        v = substitute(c, bindings)
        if v:
            out[key] = v
    return out


def _solve_linear(eqs: list[Scalar], unknowns: list[str]) -> dict[str, Scalar] | None:
    """Eliminate unknowns appearing linearly in numerators; None if inconsistent."""
    sol: dict[str, Scalar] = {}
    eqs = [e for e in eqs if e]
    while eqs:
        e = eqs.pop(0).numerator()
        if not e:
            continue
        live = [u for u in unknowns if u not in sol and u in e.free_vars()]
        pick = None
        for u in live:
            a = e.diff(u)
            if a and not a.diff(u) and u not in a.free_vars():
                pick = (u, a)
                break
        if pick is None:
            if not live:
                return None
            eqs.append(e)
            if all(not any(u in x.free_vars() for u in unknowns if u not in sol) for x in eqs):
                return None
            if len(eqs) > 4 * len(unknowns) + 10:
                return None
            continue
        u, a = pick
        b = substitute(e, {u: ZERO})
        val = -b / a
        sol = {k: substitute(v, {u: val}) for k, v in sol.items()}
        sol[u] = val
        eqs = [substitute(x, {u: val}) for x in eqs]
        eqs = [x for x in eqs if x]
    return sol


@dataclass
class CaseDSearch:
    verbatim_residual: dict
    candidates: list[tuple[str, dict[str, Scalar] | None]] = field(default_factory=list)

    @property
    def corrected(self) -> dict[str, Scalar] | None:
        for _, sol in self.candidates:
            if sol is not None:
                return sol
        return None


def search_case_d() -> CaseDSearch:
    """Replace the contradictory μ₊ = 0 of case (d) by zeroing one of
    μ₊, μ₋, m₋ in turn, then solve the curvature equations linearly."""
    coeffs = su2q_curvature_coefficients()
    verbatim = next(c for c in su2q_flat_cases() if c.label == "d")
    report = CaseDSearch(curvature_under(verbatim.bindings, coeffs))
    q = Scalar.var("q")
    base = {"n_p": ZERO, "m_p": ZERO, "n_m": -ONE, "r": q**-2}
    for zeroed in ("mu_p", "mu_m", "m_m"):
        fixed = dict(base)
        fixed[zeroed] = ZERO
        eqs = list(curvature_under(fixed, coeffs).values())
        unknowns = [u for u in ("m_m", "mu_m", "mu_p") if u != zeroed]
        sol = _solve_linear(eqs, unknowns)
        if sol is not None:
            full = dict(fixed)
            full.update(sol)
            if curvature_under(full, coeffs):
                sol = None
            else:
                sol = full
        report.candidates.append((zeroed, sol))
    return report


# ---------------------------------------------------------------------------
# matrix representation and consistency equations


def su2q_matrix_rep(params: Su2qConnectionParams | None = None) -> dict[str, list[list[Scalar]]]:
    """Matrices of u+, u0, u- on (e+, e0, e-), acting on column vectors."""
    p = (params or Su2qConnectionParams()).values()
    Z = ZERO
    return {
        "u+": [[Z, Z, Z], [p["m_p"], Z, Z], [Z, p["mu_p"], Z]],
        "u0": [[p["n_p"], Z, Z], [Z, p["r"], Z], [Z, Z, p["n_m"]]],
        "u-": [[Z, p["mu_m"], Z], [Z, Z, p["m_m"]], [Z, Z, Z]],
    }


def action_matrices(spec: CalculusSpec, E=None) -> list[list[list[Scalar]]]:
    """M_i[out][in] = coefficient of e_out in u_i ▷ e_in."""
    E = E or omega1_module(spec)
    mats = []
    for i in range(spec.n1):
        M = linalg.zeros(E.rank, E.rank)
        for a in range(E.rank):
            for (b,), c in act(spec, E, DiffOp.basis((i,)), E.basis(a)).items():
                M[b][a] = c
        mats.append(M)
    return mats


def relation_matrices(spec: CalculusSpec, mats) -> list[list[list[Scalar]]]:
    """Substitute the matrices into the •-word form of each relation."""
    out = []
    n = len(mats[0])
    for words in relation_words(spec):
        total = linalg.zeros(n, n)
        for word, c in words.items():
            P = linalg.identity(n)
            for i in word:
                P = linalg.matmul(P, mats[i])
            total = linalg.matadd(total, linalg.matscale(c, P))
        out.append(total)
    return out


def su2q_consistency_equations(params: Su2qConnectionParams | None = None) -> list[Scalar]:
    """Entries of the relation matrices, with the matrices read off the connection."""
    spec = su2q_3d(params)
    rep = su2q_matrix_rep(params)
    mats = [rep["u+"], rep["u0"], rep["u-"]]
    eqs: list[Scalar] = []
    seen: list[Scalar] = []
    for M in relation_matrices(spec, mats):
        for row in M:
            for x in row:
                if x and not any(same_up_to_scalar(x, y) for y in seen):
                    seen.append(x)
                    eqs.append(x)
    return eqs


def su2q_consistency_golden() -> list[Scalar]:
    """The seven polynomials as displayed, written as expressions equal to zero."""
    q = Scalar.var("q")
    r, mu_p, mu_m, n_p, n_m, m_p, m_m = (Scalar.var(n) for n in ("r", "mu_p", "mu_m", "n_p", "n_m", "m_p", "m_m"))
    return [
        m_p * mu_m - n_p * q**3,
        m_m * mu_p - m_p * mu_m * q**2 - q**3 * r,
        m_m * mu_p + n_m * q,
        m_p * (-1 - q**2 + n_p * q**4 - r),
        mu_p * (1 + n_m + q**2 - q**4 * r),
        mu_m * (-1 - q**2 + n_p * q**4 - r),
        m_m * (1 + n_m + q**2 - q**4 * r),
    ]


def same_up_to_scalar(a: Scalar, b: Scalar, scalar_vars: tuple[str, ...] = ("q",)) -> bool:
    """a = c·b with c nonzero and depending only on ``scalar_vars``."""
    if not a or not b:
        return not a and not b
    ratio = a / b
    return ratio.free_vars() <= set(scalar_vars)


# ---------------------------------------------------------------------------
# Podleś sphere


def podles_base() -> CalculusSpec:
    """Invariant sector: e±∧e± = 0, e-∧e+ = −q² e+∧e-, de± = 0, □ = 0, J e± = ±i e±."""
    q = Scalar.var("q")
    return CalculusSpec.build(
        2,
        1,
        {(0, 1, 0): ONE, (1, 0, 0): -q**2},
        christoffel={},
        J=[[I, ZERO], [ZERO, -I]],
        parameters=("q",),
        omega1_names=("e+", "e-"),
        omega2_names=("e+^e-",),
        vec_names=("v+", "v-"),
        name="podles",
    )


def podles_sphere() -> CalculusSpec:
    """The base data with (□, σ⁻¹) assembled by the nice-connection construction."""
    from .holomorphic import HoloConnectionPair, nice_connection

    return nice_connection(podles_base(), HoloConnectionPair())


BUILTINS: dict[str, Callable[[], CalculusSpec]] = {
    "classical-plane": classical_plane,
    "complex-plane": classical_complex_plane,
    "su2q": su2q_3d,
    "podles": podles_sphere,
}


def builtin(name: str) -> CalculusSpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}") from None


def su2q_symbol_relations() -> list[TensorField]:
    """u-⊗u+ − q² u+⊗u-,  u0⊗u± − q^{±4} u±⊗u0."""
    q = Scalar.var("q")
    return [
        TensorField(("v", "v"), {(MINUS, PLUS): ONE, (PLUS, MINUS): -q**2}),
        TensorField(("v", "v"), {(ZERO_IDX, PLUS): ONE, (PLUS, ZERO_IDX): -q**4}),
        TensorField(("v", "v"), {(ZERO_IDX, MINUS): ONE, (MINUS, ZERO_IDX): -q**-4}),
    ]
