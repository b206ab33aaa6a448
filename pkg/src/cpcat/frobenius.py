"""Special dagger Frobenius structures: generator families and the axiom checker.

A structure stores only its carrier, multiplication and unit; the
comultiplication and counit are always the daggers of those, so the
"dagger" part of the axioms holds by construction and the checker verifies
associativity, unitality, specialty and the Frobenius law.  Structures are
checked, never normalized: a failing input is reported, not rescaled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .category import (
    FHILB,
    REL,
    Obj,
    PureMorphism,
    bool_matmul,
    compose,
    dagger,
    identity,
    morphism,
    tensor,
    unit_object,
)
from .report import CheckItem
from .tensor import Tolerance, DEFAULT_TOLERANCE, kron, max_abs_diff, permute_factors

__all__ = [
    "FrobeniusStructure",
    "AxiomReport",
    "check_frobenius",
    "classical",
    "pants",
    "pants_z",
    "pants_z_squared",
    "cyclic_group_algebra",
    "direct_sum",
    "tensor_structure",
    "groupoid_structure",
    "transport",
    "trivial",
    "metric",
    "structures_equal",
]

AXIOM_NAMES = (
    "associativity",
    "unit_left",
    "unit_right",
    "specialty",
    "frobenius_left",
    "frobenius_right",
)


@dataclass(frozen=True, eq=False)
class FrobeniusStructure:
    """Carrier object plus multiplication (d x d^2) and unit (d x 1)."""

    carrier: Obj
    mult: PureMorphism
    unit: PureMorphism

    def __post_init__(self) -> None:
        if self.mult.dom != self.carrier.tensor(self.carrier) or self.mult.cod != self.carrier:
            raise ValueError(
                f"multiplication boundary {self.mult.dom} -> {self.mult.cod} "
                f"does not match carrier {self.carrier}"
            )
        if self.unit.dom != unit_object(self.carrier.category) or self.unit.cod != self.carrier:
            raise ValueError("unit must be a state of the carrier")

    @property
    def category(self) -> str:
        return self.carrier.category

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def comult(self) -> PureMorphism:
        return dagger(self.mult)

    def counit(self) -> PureMorphism:
        return dagger(self.unit)


@dataclass(frozen=True)
class AxiomReport:
    """Per-axiom residuals plus an informational commutativity flag."""

    items: tuple[CheckItem, ...]
    commutative: bool

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def residual(self, name: str) -> float:
        for item in self.items:
            if item.name == name:
                return item.residual
        raise KeyError(name)

    def failed_axioms(self) -> tuple[str, ...]:
        return tuple(item.name for item in self.items if not item.passed)


def check_frobenius(s: FrobeniusStructure, tol: Tolerance = DEFAULT_TOLERANCE) -> AxiomReport:
    """Evaluate both sides of every axiom and report max residuals.

    Rel residuals are exact (0.0 or 1.0, checked against eps 0); FHilb
    residuals are compared against ``tol.structural_eps``.
    """
    m = s.mult
    u = s.unit
    d = dagger(m)
    one = identity(s.carrier)
    eps = 0.0 if s.category == REL else tol.structural_eps

    pairs = {
        "associativity": (compose(m, tensor(m, one)), compose(m, tensor(one, m))),
        "unit_left": (compose(m, tensor(u, one)), one),
        "unit_right": (compose(m, tensor(one, u)), one),
        "specialty": (compose(m, d), one),
        "frobenius_left": (compose(tensor(one, m), tensor(d, one)), compose(d, m)),
        "frobenius_right": (compose(tensor(m, one), tensor(one, d)), compose(d, m)),
    }
    items = []
    for name in AXIOM_NAMES:
        lhs, rhs = pairs[name]
        residual = max_abs_diff(lhs.data, rhs.data)
        items.append(CheckItem(name, residual <= eps, residual, eps))

    dim = s.dim
    swap = permute_factors(
        np.eye(dim * dim, dtype=bool if s.category == REL else np.complex128),
        [dim, dim],
        [dim * dim],
        [1, 0],
        [0],
    )
    commutative = max_abs_diff(m.data @ swap if s.category == FHILB else bool_matmul(m.data, swap), m.data) <= eps

    return AxiomReport(tuple(items), bool(commutative))


def structures_equal(
    a: FrobeniusStructure, b: FrobeniusStructure, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Same carrier and the same multiplication and unit data."""
    if a.category != b.category or a.carrier != b.carrier:
        return False
    eps = 0.0 if a.category == REL else tol.structural_eps
    return (
        max_abs_diff(a.mult.data, b.mult.data) <= eps
        and max_abs_diff(a.unit.data, b.unit.data) <= eps
    )


def metric(s: FrobeniusStructure) -> np.ndarray:
    """The bilinear form counit . mult reshaped to d x d.

    Row j, column k holds the pairing of basis vectors e_j and e_k; for the
    generator families this matrix is a (signed) permutation and in general
    it realizes the basis-level identification of the carrier with its dual.
    """
    beta = compose(s.counit(), s.mult).data
    return np.asarray(beta).reshape(s.dim, s.dim)


# ---------------------------------------------------------------------------
# generator families


def trivial(category: str = FHILB) -> FrobeniusStructure:
    return classical(1, category)


def classical(d: int, category: str = FHILB) -> FrobeniusStructure:
    """Copying structure on the standard basis: m(e_i (x) e_j) = delta_ij e_i."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    carrier = Obj(category, (d,))
    dtype = bool if category == REL else np.complex128
    mult = np.zeros((d, d * d), dtype=dtype)
    for i in range(d):
        mult[i, i * d + i] = True if category == REL else 1.0
    unit = np.ones((d, 1), dtype=dtype)
    return FrobeniusStructure(
        carrier,
        morphism(carrier.tensor(carrier), carrier, mult),
        morphism(unit_object(category), carrier, unit),
    )


def pants_z_squared(d: int) -> float:
    """The squared loop scalar; satisfies z^2 * d == 1 exactly for small d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return 1.0 / d


def pants_z(d: int) -> float:
    return math.sqrt(pants_z_squared(d))


def pants(d: int) -> FrobeniusStructure:
    """Matrix-multiplication structure on the doubled space of dimension d.

    The carrier has factors (d, d) holding the matrix units E_ij; the
    multiplication is z * (id (x) cap (x) id) and the unit z * d * cup,
    with z = 1/sqrt(d) fixed by specialty.
    """
    z = pants_z(d)
    carrier = Obj(FHILB, (d, d))
    c = d * d
    mult = np.zeros((c, c * c), dtype=np.complex128)
    for i1 in range(d):
        for j in range(d):
            for k2 in range(d):
                row = i1 * d + k2
                col = (i1 * d + j) * c + (j * d + k2)
                mult[row, col] = z
    unit = np.zeros((c, 1), dtype=np.complex128)
    for i in range(d):
        unit[i * d + i, 0] = z * d
    return FrobeniusStructure(
        carrier,
        morphism(carrier.tensor(carrier), carrier, mult),
        morphism(unit_object(FHILB), carrier, unit),
    )


def cyclic_group_algebra(n: int) -> FrobeniusStructure:
    """Group algebra of Z_n: m(e_g (x) e_h) = n^{-1/2} e_{g+h mod n}."""
    if n < 1:
        raise ValueError("order must be >= 1")
    carrier = Obj(FHILB, (n,))
    scale = 1.0 / math.sqrt(n)
    mult = np.zeros((n, n * n), dtype=np.complex128)
    for g in range(n):
        for h in range(n):
            mult[(g + h) % n, g * n + h] = scale
    unit = np.zeros((n, 1), dtype=np.complex128)
    unit[0, 0] = math.sqrt(n)
    return FrobeniusStructure(
        carrier,
        morphism(carrier.tensor(carrier), carrier, mult),
        morphism(unit_object(FHILB), carrier, unit),
    )


def direct_sum(a: FrobeniusStructure, b: FrobeniusStructure) -> FrobeniusStructure:
    """Block-diagonal structure on a carrier of dimension dim(a) + dim(b)."""
    if a.category != b.category:
        raise ValueError("cannot form the direct sum across categories")
    da, db = a.dim, b.dim
    d = da + db
    carrier = Obj(a.category, (d,))
    dtype = bool if a.category == REL else np.complex128
    mult = np.zeros((d, d * d), dtype=dtype)
    for i in range(da):
        for j in range(da):
            mult[:da, i * d + j] = a.mult.data[:, i * da + j]
    for i in range(db):
        for j in range(db):
            mult[da:, (da + i) * d + (da + j)] = b.mult.data[:, i * db + j]
    unit = np.concatenate([a.unit.data, b.unit.data], axis=0)
    return FrobeniusStructure(
        carrier,
        morphism(carrier.tensor(carrier), carrier, mult),
        morphism(unit_object(a.category), carrier, unit),
    )


@lru_cache(maxsize=256)
def tensor_structure(a: FrobeniusStructure, b: FrobeniusStructure) -> FrobeniusStructure:
    """Componentwise structure on the tensor product of the carriers.

    The multiplication is mult_a (x) mult_b precomposed with the permutation
    interleaving (A (x) B) (x) (A (x) B) into (A (x) A) (x) (B (x) B).
    Memoized on the (immutable) argument pair.
    """
    if a.category != b.category:
        raise ValueError("cannot tensor structures across categories")
    da, db = a.dim, b.dim
    carrier = a.carrier.tensor(b.carrier)
    raw = kron(a.mult.data, b.mult.data)
    mult = permute_factors(raw, [da, db], [da, da, db, db], [0, 1], [0, 2, 1, 3])
    unit = kron(a.unit.data, b.unit.data)
    return FrobeniusStructure(
        carrier,
        morphism(carrier.tensor(carrier), carrier, mult),
        morphism(unit_object(a.category), carrier, unit),
    )


def groupoid_structure(n: int, comp_table) -> FrobeniusStructure:
    """Rel structure from a partial composition table.

    ``comp_table[g][h]`` is the composite g.h (an element index) or None when
    undefined.  The unit relates the monoidal unit to every identity element;
    check_frobenius then passes exactly when the table is a groupoid.
    """
    if n < 1:
        raise ValueError("need at least one element")
    table: list[list[int | None]] = []
    if len(comp_table) != n:
        raise ValueError(f"composition table must have {n} rows, got {len(comp_table)}")
    for g, row in enumerate(comp_table):
        if len(row) != n:
            raise ValueError(f"row {g} must have {n} entries, got {len(row)}")
        parsed: list[int | None] = []
        for h, entry in enumerate(row):
            if entry is None:
                parsed.append(None)
                continue
            k = int(entry)
            if not 0 <= k < n:
                raise ValueError(f"entry ({g}, {h}) out of range: {entry!r}")
            parsed.append(k)
        table.append(parsed)

    carrier = Obj(REL, (n,))
    mult = np.zeros((n, n * n), dtype=bool)
    for g in range(n):
        for h in range(n):
            k = table[g][h]
            if k is not None:
                mult[k, g * n + h] = True

    def is_identity(e: int) -> bool:
        if table[e][e] != e:
            return False
        for g in range(n):
            if table[e][g] not in (None, g):
                return False
            if table[g][e] not in (None, g):
                return False
        return True

    unit = np.zeros((n, 1), dtype=bool)
    for e in range(n):
        unit[e, 0] = is_identity(e)
    return FrobeniusStructure(
        carrier,
        morphism(carrier.tensor(carrier), carrier, mult),
        morphism(unit_object(REL), carrier, unit),
    )


def transport(s: FrobeniusStructure, u: np.ndarray) -> FrobeniusStructure:
    """Conjugate a FHilb structure by a unitary on its carrier.

    Transport preserves all axioms; with a complex unitary it produces
    structures whose metric is not the identity, which is what the
    decoherence checks use to pin down conjugation conventions.
    """
    if s.category != FHILB:
        raise ValueError("transport is defined for FHilb structures only")
    u = np.asarray(u, dtype=np.complex128)
    d = s.dim
    if u.shape != (d, d):
        raise ValueError(f"unitary shape {u.shape} does not match carrier dimension {d}")
    if max_abs_diff(u.conj().T @ u, np.eye(d)) > 1e-12:
        raise ValueError("transport matrix is not unitary")
    mult = u @ s.mult.data @ kron(u.conj().T, u.conj().T)
    unit = u @ s.unit.data
    return FrobeniusStructure(
        s.carrier,
        morphism(s.carrier.tensor(s.carrier), s.carrier, mult),
        morphism(unit_object(FHILB), s.carrier, unit),
    )
