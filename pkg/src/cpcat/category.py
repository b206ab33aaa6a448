"""Two concrete compact dagger categories on one morphism type.

FHilb: objects are lists of factor dimensions, morphisms complex matrices.
Rel: objects are finite set sizes, morphisms boolean matrices composed over
the (or, and) semiring.  The dual A* is identified with A through the chosen
basis, so duality acts on data as conjugation plus factor reversal (reversal
only in Rel) and cups/caps are plain 0/1 vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import Tolerance, DEFAULT_TOLERANCE, as_complex_matrix, kron, max_abs_diff, permute_factors

__all__ = [
    "FHILB",
    "REL",
    "Obj",
    "fhilb",
    "rel",
    "unit_object",
    "dual",
    "PureMorphism",
    "morphism",
    "identity",
    "compose",
    "tensor",
    "dagger",
    "cup",
    "cap",
    "dualize",
    "pure_equal",
    "bool_matmul",
]

FHILB = "fhilb"
REL = "rel"
_CATEGORIES = (FHILB, REL)


@dataclass(frozen=True)
class Obj:
    """An object: a category tag plus an ordered tuple of factor dimensions."""

    category: str
    factors: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.category not in _CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        object.__setattr__(self, "factors", tuple(int(d) for d in self.factors))
        if any(d < 1 for d in self.factors):
            raise ValueError(f"factor dimensions must be >= 1, got {self.factors}")

    @property
    def dim(self) -> int:
        return math.prod(self.factors)

    def tensor(self, other: "Obj") -> "Obj":
        if other.category != self.category:
            raise ValueError("cannot tensor objects of different categories")
        return Obj(self.category, self.factors + other.factors)


def fhilb(*factors: int) -> Obj:
    return Obj(FHILB, tuple(factors))


def rel(*factors: int) -> Obj:
    return Obj(REL, tuple(factors))


def unit_object(category: str = FHILB) -> Obj:
    return Obj(category, ())


def dual(a: Obj) -> Obj:
    """The dual object: same dimensions, factor order reversed."""
    return Obj(a.category, tuple(reversed(a.factors)))


def _coerce_data(category: str, data) -> np.ndarray:
    if category == REL:
        a = np.asarray(data)
        if a.dtype != np.bool_:
            a = a.astype(bool)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2:
            raise ValueError(f"expected a matrix, got array of rank {a.ndim}")
        return a
    return as_complex_matrix(data)


@dataclass(frozen=True, eq=False)
class PureMorphism:
    """A morphism dom -> cod, stored as a (cod.dim x dom.dim) matrix."""

    dom: Obj
    cod: Obj
    data: np.ndarray

    def __post_init__(self) -> None:
        if self.dom.category != self.cod.category:
            raise ValueError("dom and cod live in different categories")
        a = _coerce_data(self.dom.category, self.data)
        if a.shape != (self.cod.dim, self.dom.dim):
            raise ValueError(
                f"data shape {a.shape} does not match boundary "
                f"({self.cod.dim}, {self.dom.dim})"
            )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def category(self) -> str:
        return self.dom.category


def morphism(dom: Obj, cod: Obj, data) -> PureMorphism:
    return PureMorphism(dom, cod, data)


def identity(a: Obj) -> PureMorphism:
    eye = np.eye(a.dim, dtype=bool if a.category == REL else np.complex128)
    return PureMorphism(a, a, eye)


def bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over the (or, and) semiring."""
    return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0


def compose(g: PureMorphism, f: PureMorphism) -> PureMorphism:
    """g after f.  Boundaries and categories must line up."""
    if g.category != f.category:
        raise ValueError("cannot compose morphisms of different categories")
    if g.dom != f.cod:
        raise ValueError(f"boundary mismatch: dom(g)={g.dom} but cod(f)={f.cod}")
    if g.category == REL:
        return PureMorphism(f.dom, g.cod, bool_matmul(g.data, f.data))
    return PureMorphism(f.dom, g.cod, g.data @ f.data)


def tensor(f: PureMorphism, g: PureMorphism) -> PureMorphism:
    if f.category != g.category:
        raise ValueError("cannot tensor morphisms of different categories")
    return PureMorphism(f.dom.tensor(g.dom), f.cod.tensor(g.cod), kron(f.data, g.data))


def dagger(f: PureMorphism) -> PureMorphism:
    """Conjugate transpose in FHilb, plain transpose in Rel."""
    if f.category == REL:
        return PureMorphism(f.cod, f.dom, f.data.T)
    return PureMorphism(f.cod, f.dom, f.data.conj().T)


def cup(a: Obj) -> PureMorphism:
    """The unit of the duality I -> A* (x) A: the column vector sum_i e_i (x) e_i."""
    d = a.dim
    if a.category == REL:
        vec = np.zeros((d * d, 1), dtype=bool)
    else:
        vec = np.zeros((d * d, 1), dtype=np.complex128)
    for i in range(d):
        vec[i * d + i, 0] = True if a.category == REL else 1.0
    return PureMorphism(unit_object(a.category), dual(a).tensor(a), vec)


def cap(a: Obj) -> PureMorphism:
    """The counit A (x) A* -> I; the dagger of cup under the basis identification."""
    c = cup(a)
    return PureMorphism(a.tensor(dual(a)), unit_object(a.category), dagger(c).data)


def _reversal(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def dualize(f: PureMorphism) -> PureMorphism:
    """Entrywise conjugation plus reversal of the tensor factors on both
    boundaries (reversal only in Rel); an involution."""
    data = f.data if f.category == REL else f.data.conj()
    row_dims = f.cod.factors if f.cod.factors else (1,)
    col_dims = f.dom.factors if f.dom.factors else (1,)
    data = permute_factors(
        data, row_dims, col_dims, _reversal(len(row_dims)), _reversal(len(col_dims))
    )
    if f.category == REL:
        data = data > 0
    return PureMorphism(dual(f.dom), dual(f.cod), data)


def pure_equal(
    f: PureMorphism, g: PureMorphism, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Boundary-aware equality: exact in Rel, within structural_eps in FHilb."""
    if f.category != g.category or f.dom != g.dom or f.cod != g.cod:
        return False
    if f.category == REL:
        return bool(np.array_equal(f.data, g.data))
    return max_abs_diff(f.data, g.data) <= tol.structural_eps
