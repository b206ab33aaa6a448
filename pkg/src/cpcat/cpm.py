"""Completely positive maps presented by Kraus witnesses and by superoperators.

A witness is a finite family of slices K_x : A -> B of a wiring
f : A -> X (x) B; its realization is the doubled matrix

    S[(b', b), (a', a)] = sum_x K_x[b', a'] * conj(K_x[b, a]),

equivalently S vec(rho) = vec(sum_x K_x rho K_x^dagger) under row-major vec
(rho[a', a] at flat index a'd + a).  Realization equality is the canonical
equality of morphisms; witnesses differing by an ancilla isometry collapse.

Boolean (Rel) witnesses support realize/compose/tensor/dagger with the
(or, and) semiring; Choi positivity and purification are FHilb-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .category import FHILB, REL, Obj, PureMorphism, bool_matmul, dualize
from .report import CheckReport, ReportBuilder
from .tensor import (
    Tolerance,
    DEFAULT_TOLERANCE,
    approx_equal,
    as_complex_matrix,
    hermitian_eig,
    kron,
    max_abs_diff,
    permute_factors,
)

__all__ = [
    "CpmMorphism",
    "Superoperator",
    "NotCompletelyPositiveError",
    "realize",
    "cpm_compose",
    "cpm_tensor",
    "cpm_dagger",
    "cpm_equal",
    "superop_compose",
    "superop_tensor",
    "superop_dagger",
    "identity_superop",
    "choi",
    "choi_eigenvalues",
    "is_cp",
    "purify",
    "discard",
    "identity_channel",
    "functor_P",
    "kraus_from_wiring",
    "apply_isometry_to_ancilla",
    "check_environment",
]


class NotCompletelyPositiveError(ValueError):
    """Raised when a purification is requested for a non-CP superoperator."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"superoperator is not completely positive: "
            f"most negative Choi eigenvalue {self.min_eigenvalue:.6g}"
        )


def _coerce_slice(k, rel: bool) -> np.ndarray:
    if rel:
        a = np.asarray(k)
        a = a.astype(bool) if a.dtype != np.bool_ else a
        if a.ndim != 2:
            raise ValueError("Kraus slices must be matrices")
        return a
    return as_complex_matrix(k)


@dataclass(frozen=True, eq=False)
class CpmMorphism:
    """A CPM morphism A -> B held as a nonempty Kraus family of B x A slices."""

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.dim_in < 1 or self.dim_out < 1:
            raise ValueError("boundary dimensions must be >= 1")
        if not self.kraus:
            raise ValueError("Kraus family must be nonempty")
        rel = any(np.asarray(k).dtype == np.bool_ for k in self.kraus)
        slices = []
        for k in self.kraus:
            a = _coerce_slice(k, rel)
            if a.shape != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"Kraus slice shape {a.shape} does not match "
                    f"({self.dim_out}, {self.dim_in})"
                )
            a = a.copy()
            a.setflags(write=False)
            slices.append(a)
        object.__setattr__(self, "kraus", tuple(slices))

    @property
    def ancilla_dim(self) -> int:
        return len(self.kraus)

    @property
    def category(self) -> str:
        return REL if self.kraus[0].dtype == np.bool_ else FHILB


@dataclass(frozen=True, eq=False)
class Superoperator:
    """The realized doubled matrix of shape (dim_out^2, dim_in^2)."""

    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.matrix)
        if a.dtype != np.bool_:
            a = as_complex_matrix(a)
        if a.shape != (self.dim_out**2, self.dim_in**2):
            raise ValueError(
                f"superoperator shape {a.shape} does not match "
                f"({self.dim_out**2}, {self.dim_in**2})"
            )
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def category(self) -> str:
        return REL if self.matrix.dtype == np.bool_ else FHILB


def realize(w: CpmMorphism) -> Superoperator:
    """Close the ancilla wire: the doubled matrix sum_x kron(K_x, conj K_x)."""
    if w.category == REL:
        acc = np.zeros((w.dim_out**2, w.dim_in**2), dtype=bool)
        for k in w.kraus:
            acc |= kron(k, k)
        return Superoperator(w.dim_in, w.dim_out, acc)
    acc = np.zeros((w.dim_out**2, w.dim_in**2), dtype=np.complex128)
    for k in w.kraus:
        acc += kron(k, k.conj())
    return Superoperator(w.dim_in, w.dim_out, acc)


def cpm_compose(g: CpmMorphism, f: CpmMorphism) -> CpmMorphism:
    """Witness of g after f: slices K^g_y K^f_x indexed with x outermost."""
    if f.dim_out != g.dim_in:
        raise ValueError(f"boundary mismatch: f ends at {f.dim_out}, g starts at {g.dim_in}")
    rel = f.category == REL or g.category == REL
    if rel:
        slices = [bool_matmul(ky, kx) for kx in f.kraus for ky in g.kraus]
    else:
        slices = [ky @ kx for kx in f.kraus for ky in g.kraus]
    return CpmMorphism(f.dim_in, g.dim_out, tuple(slices))


def cpm_tensor(f: CpmMorphism, g: CpmMorphism) -> CpmMorphism:
    """Side-by-side witness: slices K^f_x (x) K^g_z, f's ancilla outermost."""
    slices = [kron(kx, kz) for kx in f.kraus for kz in g.kraus]
    return CpmMorphism(f.dim_in * g.dim_in, f.dim_out * g.dim_out, tuple(slices))


def cpm_dagger(f: CpmMorphism) -> CpmMorphism:
    """Slice-wise dagger; realizes the Hilbert-Schmidt adjoint."""
    if f.category == REL:
        return CpmMorphism(f.dim_out, f.dim_in, tuple(k.T for k in f.kraus))
    return CpmMorphism(f.dim_out, f.dim_in, tuple(k.conj().T for k in f.kraus))


def cpm_equal(f: CpmMorphism, g: CpmMorphism, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Canonical equality: the realizations agree within structural_eps."""
    if f.dim_in != g.dim_in or f.dim_out != g.dim_out:
        raise ValueError("cannot compare morphisms with different boundaries")
    sf, sg = realize(f), realize(g)
    if sf.category == REL or sg.category == REL:
        return bool(np.array_equal(sf.matrix, sg.matrix))
    return max_abs_diff(sf.matrix, sg.matrix) <= tol.structural_eps


# ---------------------------------------------------------------------------
# superoperator-level structure


def superop_compose(s: Superoperator, t: Superoperator) -> Superoperator:
    """s after t as doubled matrices."""
    if t.dim_out != s.dim_in:
        raise ValueError("boundary mismatch in superoperator composition")
    if s.category == REL or t.category == REL:
        return Superoperator(t.dim_in, s.dim_out, bool_matmul(s.matrix, t.matrix))
    return Superoperator(t.dim_in, s.dim_out, s.matrix @ t.matrix)


def superop_tensor(s: Superoperator, t: Superoperator) -> Superoperator:
    """Factor-interleaved Kronecker product.

    Rows of kron(s, t) are indexed (b1', b1, b2', b2); the doubled space of
    the joint system orders them (b1', b2', b1, b2), so both index groups are
    interleaved with the permutation (0, 2, 1, 3).
    """
    m = kron(s.matrix, t.matrix)
    m = permute_factors(
        m,
        [s.dim_out, s.dim_out, t.dim_out, t.dim_out],
        [s.dim_in, s.dim_in, t.dim_in, t.dim_in],
        [0, 2, 1, 3],
        [0, 2, 1, 3],
    )
    if m.dtype != np.bool_ and (s.category == REL and t.category == REL):
        m = m > 0
    return Superoperator(s.dim_in * t.dim_in, s.dim_out * t.dim_out, m)


def superop_dagger(s: Superoperator) -> Superoperator:
    """Hilbert-Schmidt adjoint: <S(rho), sigma> = <rho, S'(sigma)>."""
    if s.category == REL:
        return Superoperator(s.dim_out, s.dim_in, s.matrix.T)
    return Superoperator(s.dim_out, s.dim_in, s.matrix.conj().T)


def identity_superop(d: int) -> Superoperator:
    return Superoperator(d, d, np.eye(d * d, dtype=np.complex128))


def identity_channel(d: int) -> CpmMorphism:
    return CpmMorphism(d, d, (np.eye(d, dtype=np.complex128),))


# ---------------------------------------------------------------------------
# Choi matrices, complete positivity, purification


def _require_fhilb(s: Superoperator, op: str) -> None:
    if s.category == REL:
        raise ValueError(f"{op} is defined for FHilb superoperators only")


def choi(s: Superoperator) -> np.ndarray:
    """Reshuffle to the Choi matrix C[(b', a'), (b, a)] = S[(b', b), (a', a)]."""
    _require_fhilb(s, "choi")
    db, da = s.dim_out, s.dim_in
    t = s.matrix.reshape(db, db, da, da).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(t).reshape(db * da, db * da)


def choi_eigenvalues(s: Superoperator, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Clamped, descending eigenvalues of the Choi matrix."""
    w, _ = hermitian_eig(choi(s), tol)
    return w


def is_cp(s: Superoperator, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Choi matrix Hermitian within structural_eps with no negative clamped eigenvalue."""
    _require_fhilb(s, "is_cp")
    c = choi(s)
    if max_abs_diff(c, c.conj().T) > tol.structural_eps:
        return False
    w, _ = hermitian_eig(c, tol)
    return bool(np.all(w >= 0.0))


def purify(s: Superoperator, tol: Tolerance = DEFAULT_TOLERANCE) -> CpmMorphism:
    """Extract a Kraus witness from the Choi eigensystem.

    Slices are sqrt(lambda_x) times the unvectorized eigenvectors; clamped
    zero modes are dropped, so the ancilla dimension is the clamped rank.
    The zero map purifies to a single zero slice.

    Raises NotCompletelyPositiveError (carrying the most negative Choi
    eigenvalue) when the input is not CP.
    """
    _require_fhilb(s, "purify")
    c = choi(s)
    if max_abs_diff(c, c.conj().T) > tol.structural_eps:
        raise NotCompletelyPositiveError(float("-inf"))
    w, v = hermitian_eig(c, tol)
    if w[-1] < 0.0:
        raise NotCompletelyPositiveError(w[-1])
    db, da = s.dim_out, s.dim_in
    slices = [
        math.sqrt(w[x]) * v[:, x].reshape(db, da) for x in range(len(w)) if w[x] > 0.0
    ]
    if not slices:
        slices = [np.zeros((db, da), dtype=np.complex128)]
    return CpmMorphism(da, db, tuple(slices))


def discard(d: int, category: str = FHILB) -> Superoperator:
    """The trace row t[(a', a)] = delta_{a'a} as a superoperator A -> I."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    row = np.zeros((1, d * d), dtype=bool if category == REL else np.complex128)
    for i in range(d):
        row[0, i * d + i] = True if category == REL else 1.0
    return Superoperator(d, 1, row)


def functor_P(f: PureMorphism) -> CpmMorphism:
    """Doubling of a pure morphism: the single-slice witness {f}."""
    return CpmMorphism(f.dom.dim, f.cod.dim, (f.data,))


def kraus_from_wiring(f: PureMorphism) -> CpmMorphism:
    """Slice a wiring f : A -> X (x) B into its Kraus family.

    The codomain must carry exactly two declared factors (ancilla, output);
    slice x is the block of rows with ancilla index x.
    """
    if len(f.cod.factors) != 2:
        raise ValueError(
            f"wiring codomain must have two factors (ancilla, output), got {f.cod.factors}"
        )
    dx, db = f.cod.factors
    slices = tuple(f.data[x * db : (x + 1) * db, :] for x in range(dx))
    return CpmMorphism(f.dom.dim, db, slices)


def apply_isometry_to_ancilla(w: CpmMorphism, u: np.ndarray) -> CpmMorphism:
    """Mix the Kraus family by an isometry on the ancilla index.

    With u of shape (y, x), u^dagger u = I_x, the new slices
    K'_y = sum_x u[y, x] K_x realize the same superoperator.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[1] != w.ancilla_dim:
        raise ValueError(f"isometry shape {u.shape} does not match ancilla {w.ancilla_dim}")
    stack = np.stack(w.kraus)
    mixed = np.tensordot(u, stack, axes=([1], [0]))
    return CpmMorphism(w.dim_in, w.dim_out, tuple(mixed[y] for y in range(u.shape[0])))


# ---------------------------------------------------------------------------
# environment structure checker


def _dft(n: int) -> np.ndarray:
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * i * j / n) / math.sqrt(n)


def _doubled_cap_row(d: int) -> Superoperator:
    """realize(P(cap)) for a single factor of dimension d: a 1 x d^4 row."""
    capdata = np.zeros((1, d * d), dtype=np.complex128)
    for i in range(d):
        capdata[0, i * d + i] = 1.0
    return Superoperator(d * d, 1, kron(capdata, capdata.conj()))


def check_environment(
    discard_family: Callable[[int], Superoperator],
    samples: Sequence[PureMorphism],
    tol: Tolerance = DEFAULT_TOLERANCE,
    dims: Sequence[int] = (1, 2, 3),
) -> CheckReport:
    """Verify the environment-structure axioms for a given discard family.

    (i)   monoidality: discard on a composite system is the interleaved
          tensor of the component discards, and discard on the unit is 1;
    (ii)  duality compatibility: discard equals the doubled cap composed
          with (id (x) dagger of discard);
    (iii) on every sampled wiring pair: realization equality of the doubles
          holds iff discarding the ancilla of the doubles gives equal maps;
    (iv)  purification: the realization of every sampled wiring is CP and
          round-trips through purify within roundtrip_eps.

    Failures are report entries, never exceptions.  The report records the
    sample coverage; clause (iii) is vacuous for an empty sample list.
    """
    rb = ReportBuilder("environment axioms")
    eps = tol.structural_eps

    # (i) monoidality over the probe dimensions
    worst_pair = 0.0
    for d1 in dims:
        for d2 in dims:
            joint = discard_family(d1 * d2)
            split = superop_tensor(discard_family(d1), discard_family(d2))
            worst_pair = max(worst_pair, max_abs_diff(joint.matrix, split.matrix))
    rb.residual_item("monoidal_pairs", worst_pair, eps, f"dims {tuple(dims)}")
    unit_res = max_abs_diff(discard_family(1).matrix, np.ones((1, 1), dtype=np.complex128))
    rb.residual_item("monoidal_unit", unit_res, eps)

    # (ii) bent-wire compatibility through the doubled cap
    worst_bend = 0.0
    for d in dims:
        ground = discard_family(d)
        bent = superop_compose(
            _doubled_cap_row(d),
            superop_tensor(identity_superop(d), superop_dagger(ground)),
        )
        worst_bend = max(worst_bend, max_abs_diff(bent.matrix, ground.matrix))
    rb.residual_item("dual_compatibility", worst_bend, eps, f"dims {tuple(dims)}")

    # (iii) doubled equality iff equality after discarding the ancilla
    def grounded(f: PureMorphism) -> np.ndarray:
        dx, db = f.cod.factors
        doubled = realize(functor_P(f))
        closer = superop_tensor(discard_family(dx), identity_superop(db))
        return superop_compose(closer, doubled).matrix

    pairs: list[tuple[PureMorphism, PureMorphism, bool]] = []
    for f in samples:
        dx = f.cod.factors[0]
        twisted = PureMorphism(f.dom, f.cod, kron(_dft(dx), np.eye(f.cod.factors[1])) @ f.data)
        pairs.append((f, twisted, True))
    matched = [f for f in samples]
    for f, g in zip(matched, matched[1:]):
        if f.dom == g.dom and f.cod == g.cod:
            pairs.append((f, g, False))

    mismatches = 0
    for f, g, _ in pairs:
        left = approx_equal(
            realize(kraus_from_wiring(f)).matrix,
            realize(kraus_from_wiring(g)).matrix,
            eps,
        )
        right = approx_equal(grounded(f), grounded(g), eps)
        if left != right:
            mismatches += 1
    rb.flag_item(
        "doubled_equality_iff_grounded",
        mismatches == 0,
        f"{len(pairs)} pairs checked, {mismatches} mismatches",
    )

    # (iv) purification round trip on the sampled realizations
    worst_rt = 0.0
    failures = 0
    for f in samples:
        s = realize(kraus_from_wiring(f))
        try:
            back = realize(purify(s, tol))
        except NotCompletelyPositiveError:
            failures += 1
            continue
        worst_rt = max(worst_rt, max_abs_diff(back.matrix, s.matrix))
    rb.residual_item(
        "purification_roundtrip",
        worst_rt if failures == 0 else float("inf"),
        tol.roundtrip_eps,
        f"{len(samples)} samples, {failures} purification failures",
    )

    rb.note("samples", str(len(samples)))
    rb.note("pairs", str(len(pairs)))
    rb.note("dims", ",".join(str(d) for d in dims))
    return rb.build()
