"""Sparse tensors over the coefficient algebra.

Both coefficient backends have a free, central Ω¹ basis, so an element of
Ω^{⊗n}, Vec^{⊗n} or a mixed product is just a finitely supported map from
multi-indices to coefficients.  Slot kinds:

    'f'  Ω¹ (basis ξ_i)        'v'  Vec (dual basis u_i)
    'w'  Ω² (basis ω_k)        'e'  module basis e_a

A :class:`DiffOp` is an element of the tensor algebra of vector fields, with
terms of mixed grade keyed by the index tuple (its length is the grade).
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Mapping

from .scalar import ONE, ZERO, Scalar, render

Index = tuple[int, ...]


def _accumulate(acc: dict, key, c: Scalar) -> None:
    old = acc.get(key)
    acc[key] = c if old is None else old + c


def _prune(d: dict) -> dict:
    return {k: c for k, c in d.items() if c}


class TensorField:
    """Finitely supported map multi-index -> coefficient, with named slot kinds."""

    __slots__ = ("slots", "comps", "_hash")

    def __init__(self, slots: Iterable[str], comps: Mapping[Index, Scalar] | None = None, *, _trusted: bool = False):
        self.slots = tuple(slots)
        if comps is None:
            self.comps = {}
        elif _trusted:
            self.comps = comps
        else:
            out = {}
            n = len(self.slots)
            for k, c in comps.items():
                k = tuple(k)
                if len(k) != n:
                    raise ValueError(f"index {k} does not match slots {self.slots}")
                c = Scalar.coerce(c)
                if c:
                    out[k] = c
            self.comps = out
        self._hash = None

    @classmethod
    def build(cls, slots: Iterable[str], acc: dict) -> "TensorField":
        return cls(slots, _prune(acc), _trusted=True)

    @classmethod
    def basis(cls, slots: Iterable[str], idx: Index, coeff: Scalar = ONE) -> "TensorField":
        return cls(slots, {tuple(idx): coeff})

    @classmethod
    def scalar(cls, a) -> "TensorField":
        return cls((), {(): a})

    @property
    def grade(self) -> int:
        return len(self.slots)

    def __iter__(self) -> Iterator[tuple[Index, Scalar]]:
        return iter(self.comps.items())

    def items(self):
        return self.comps.items()

    def get(self, idx: Index) -> Scalar:
        return self.comps.get(tuple(idx), ZERO)

    def __getitem__(self, idx) -> Scalar:
        if isinstance(idx, int):
            idx = (idx,)
        return self.get(idx)

    def is_zero(self) -> bool:
        return not self.comps

    def __bool__(self) -> bool:
        return bool(self.comps)

    def _check(self, other: "TensorField") -> None:
        if self.slots != other.slots:
            raise ValueError(f"slot mismatch {self.slots} vs {other.slots}")

    def __add__(self, other: "TensorField") -> "TensorField":
        self._check(other)
        acc = dict(self.comps)
        for k, c in other.comps.items():
            _accumulate(acc, k, c)
        return TensorField.build(self.slots, acc)

    def __sub__(self, other: "TensorField") -> "TensorField":
        return self + (-other)

    def __neg__(self) -> "TensorField":
        return TensorField(self.slots, {k: -c for k, c in self.comps.items()}, _trusted=True)

    def scale(self, a) -> "TensorField":
        a = Scalar.coerce(a)
        if not a:
            return TensorField(self.slots)
        if a == ONE:
            return self
        return TensorField.build(self.slots, {k: a * c for k, c in self.comps.items()})

    def __rmul__(self, a) -> "TensorField":
        return self.scale(a)

    def tensor(self, other: "TensorField") -> "TensorField":
        """self ⊗ other; coefficients multiply (they are central)."""
        acc = {}
        for k1, c1 in self.comps.items():
            for k2, c2 in other.comps.items():
                acc[k1 + k2] = c1 * c2
        return TensorField.build(self.slots + other.slots, acc)

    def map_coeffs(self, f: Callable[[Scalar], Scalar]) -> "TensorField":
        return TensorField.build(self.slots, {k: f(c) for k, c in self.comps.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorField):
            return NotImplemented
        return self.slots == other.slots and self.comps == other.comps

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.slots, frozenset(self.comps.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.comps:
            return f"TensorField({''.join(self.slots) or '-'}: 0)"
        body = " + ".join(f"({render(c)})[{','.join(map(str, k))}]" for k, c in sorted(self.comps.items()))
        return f"TensorField({''.join(self.slots) or '-'}: {body})"


def zeros(slots: Iterable[str]) -> TensorField:
    return TensorField(slots)


def sum_fields(slots: Iterable[str], fields: Iterable[TensorField]) -> TensorField:
    slots = tuple(slots)
    acc: dict = {}
    for t in fields:
        if t.slots != slots:
            raise ValueError(f"slot mismatch {t.slots} vs {slots}")
        for k, c in t.comps.items():
            _accumulate(acc, k, c)
    return TensorField.build(slots, acc)


def apply_block(
    t: TensorField,
    pos: int,
    width: int,
    images: Callable[[Index], TensorField | None],
    out_slots: Iterable[str],
) -> TensorField:
    """Apply a (central-coefficient) linear map to slots pos..pos+width-1.

    ``images(key)`` returns the image of the basis tensor with that index
    block, or None for zero.  ``out_slots`` are the slot kinds replacing the
    block.
    """
    out_slots = tuple(out_slots)
    new_slots = t.slots[:pos] + out_slots + t.slots[pos + width:]
    acc: dict = {}
    for k, c in t.comps.items():
        img = images(k[pos:pos + width])
        if img is None:
            continue
        head, tail = k[:pos], k[pos + width:]
        for k2, c2 in img.comps.items():
            _accumulate(acc, head + k2 + tail, c * c2)
    return TensorField.build(new_slots, acc)


class DiffOp:
    """Element of ⊕_n Vec^{⊗n}: index tuple (length = grade) -> coefficient."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Index, Scalar] | None = None, *, _trusted: bool = False):
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            self.terms = {tuple(k): Scalar.coerce(c) for k, c in terms.items() if Scalar.coerce(c)}
        self._hash = None

    @classmethod
    def build(cls, acc: dict) -> "DiffOp":
        return cls(_prune(acc), _trusted=True)

    @classmethod
    def const(cls, a) -> "DiffOp":
        return cls({(): a})

    @classmethod
    def basis(cls, idx: Index, coeff=ONE) -> "DiffOp":
        return cls({tuple(idx): coeff})

    @classmethod
    def from_tensor(cls, t: TensorField) -> "DiffOp":
        if any(s != "v" for s in t.slots):
            raise ValueError("a DiffOp is built from pure vector-field tensors")
        return cls(dict(t.comps), _trusted=True)

    @classmethod
    def from_parts(cls, parts: Iterable[TensorField]) -> "DiffOp":
        acc: dict = {}
        for t in parts:
            for k, c in DiffOp.from_tensor(t).terms.items():
                _accumulate(acc, k, c)
        return cls.build(acc)

    def grades(self) -> list[int]:
        return sorted({len(k) for k in self.terms})

    @property
    def parts(self) -> dict[int, TensorField]:
        out: dict[int, dict] = {}
        for k, c in self.terms.items():
            out.setdefault(len(k), {})[k] = c
        return {n: TensorField("v" * n, d, _trusted=True) for n, d in sorted(out.items())}

    def part(self, n: int) -> TensorField:
        return TensorField("v" * n, {k: c for k, c in self.terms.items() if len(k) == n}, _trusted=True)

    @property
    def top_grade(self) -> int:
        if not self.terms:
            raise ValueError("zero operator has no grade")
        return max(len(k) for k in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def items(self):
        return self.terms.items()

    def get(self, idx: Index) -> Scalar:
        return self.terms.get(tuple(idx), ZERO)

    def __add__(self, other: "DiffOp") -> "DiffOp":
        acc = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(acc, k, c)
        return DiffOp.build(acc)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __neg__(self) -> "DiffOp":
        return DiffOp({k: -c for k, c in self.terms.items()}, _trusted=True)

    def scale(self, a) -> "DiffOp":
        a = Scalar.coerce(a)
        if not a:
            return DiffOp()
        if a == ONE:
            return self
        return DiffOp.build({k: a * c for k, c in self.terms.items()})

    def __rmul__(self, a) -> "DiffOp":
        return self.scale(a)

    def tensor(self, other: "DiffOp") -> "DiffOp":
        acc: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                _accumulate(acc, k1 + k2, c1 * c2)
        return DiffOp.build(acc)

    def map_coeffs(self, f: Callable[[Scalar], Scalar]) -> "DiffOp":
        return DiffOp.build({k: f(c) for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"DiffOp({format_diffop(self)})"


def format_diffop(v: DiffOp, names: list[str] | None = None) -> str:
    """Human-readable rendering, highest grade first."""
    if not v.terms:
        return "0"

    def word(k: Index) -> str:
        if not k:
            return "1"
        return "⊗".join(names[i] if names else f"u{i}" for i in k)

    out = []
    for k, c in sorted(v.terms.items(), key=lambda kc: (-len(kc[0]), kc[0])):
        coeff = render(c)
        if not k:
            out.append(coeff)
        elif coeff == "1":
            out.append(word(k))
        elif coeff == "-1":
            out.append(f"-{word(k)}")
        else:
            out.append(f"({coeff})*{word(k)}")
    return " + ".join(out).replace("+ -", "- ")


class OpTensor:
    """Element of X ⊗ 𝒯Vec for X ∈ {Ω¹, Ω², E}: basis index of X -> DiffOp.

    ``x_k ⊗ D`` with D carrying its coefficients on the left, which is the
    same as x_k.c ⊗ (rest) because the X basis is central.
    """

    __slots__ = ("slot", "comps")

    def __init__(self, slot: str, comps: Mapping[int, DiffOp] | None = None):
        self.slot = slot
        self.comps = {k: d for k, d in (comps or {}).items() if d}

    def __add__(self, other: "OpTensor") -> "OpTensor":
        if self.slot != other.slot:
            raise ValueError("slot mismatch")
        out = dict(self.comps)
        for k, d in other.comps.items():
            out[k] = out[k] + d if k in out else d
        return OpTensor(self.slot, out)

    def __neg__(self) -> "OpTensor":
        return OpTensor(self.slot, {k: -d for k, d in self.comps.items()})

    def __sub__(self, other: "OpTensor") -> "OpTensor":
        return self + (-other)

    def scale(self, a) -> "OpTensor":
        return OpTensor(self.slot, {k: d.scale(a) for k, d in self.comps.items()})

    def get(self, k: int) -> DiffOp:
        return self.comps.get(k, DiffOp())

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other) -> bool:
        if not isinstance(other, OpTensor):
            return NotImplemented
        return self.slot == other.slot and self.comps == other.comps

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {format_diffop(d)}" for k, d in sorted(self.comps.items()))
        return f"OpTensor({self.slot}; {{{body}}})"
