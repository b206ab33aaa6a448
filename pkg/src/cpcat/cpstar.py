"""The CP* construction: Frobenius structures as objects, sandwiched maps as morphisms.

A morphism dom -> cod is carried by its realized matrix between the carriers
(cod.dim x dom.dim); membership is decided by checking that the frob-sandwich

    S = dagger_frob(cod) . map . frob(dom)

is completely positive and that frob(cod) . S . dagger_frob(dom) reproduces
the map.  The frob map of a structure is its multiplication with the dual
input slot rewired through the basis-level dualizer (the conjugated metric):
conjugation conventions are not trusted a priori, they are gated by the
idempotent checks in check_decoherence, which include structures transported
by complex unitaries so that a wrong placement fails loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .category import FHILB, REL, PureMorphism, bool_matmul
from .cpm import (
    CpmMorphism,
    NotCompletelyPositiveError,
    Superoperator,
    choi_eigenvalues,
    identity_channel,
    is_cp,
    purify,
    realize,
)
from .frobenius import (
    FrobeniusStructure,
    check_frobenius,
    metric,
    structures_equal,
    tensor_structure,
    pants,
    trivial,
)
from .report import CheckReport, ReportBuilder
from .tensor import (
    Tolerance,
    DEFAULT_TOLERANCE,
    as_complex_matrix,
    kron,
    max_abs_diff,
    permute_factors,
)

__all__ = [
    "FrobMap",
    "CpStarMorphism",
    "MembershipError",
    "frob_map",
    "dagger_frob_map",
    "grounded_comultiplication",
    "decoherence_idempotent",
    "sandwich_realize",
    "is_cpstar",
    "membership_clauses",
    "cpstar_purify",
    "cpstar_morphism",
    "identity_cpstar",
    "cpstar_compose",
    "cpstar_tensor",
    "cpstar_dagger",
    "functor_Q",
    "check_decoherence",
]


class MembershipError(ValueError):
    """Raised when a map fails the CP* membership test; names the failed clause."""

    def __init__(self, clause: str, detail: str):
        self.clause = clause
        super().__init__(f"not a CP* morphism ({clause}): {detail}")


@dataclass(frozen=True, eq=False)
class FrobMap:
    """The splitting morphism of a structure: doubled carrier -> carrier."""

    structure: FrobeniusStructure
    matrix: np.ndarray


def _require_frobenius(s: FrobeniusStructure, tol: Tolerance) -> None:
    report = check_frobenius(s, tol)
    if not report.passed:
        raise ValueError(
            f"structure fails Frobenius axioms: {', '.join(report.failed_axioms())}"
        )


@lru_cache(maxsize=256)
def _frob_map_cached(s: FrobeniusStructure, tol: Tolerance) -> FrobMap:
    _require_frobenius(s, tol)
    d = s.dim
    g = metric(s)
    if s.category == REL:
        mat = bool_matmul(s.mult.data, kron(np.eye(d, dtype=bool), g))
    else:
        mat = s.mult.data @ kron(np.eye(d, dtype=np.complex128), g.conj())
    return FrobMap(s, mat)


def frob_map(s: FrobeniusStructure, tol: Tolerance = DEFAULT_TOLERANCE) -> FrobMap:
    """Multiplication with the second (dual) input slot rewired.

    The rewiring composes the multiplication with id (x) conj(metric); for
    real structures this is just the metric permutation, and for complex
    ones the conjugation placement is exactly what the idempotent equations
    verify.  Results are cached per structure instance (structures are
    immutable), with the axiom check rerun on cache misses.
    """
    return _frob_map_cached(s, tol)


def dagger_frob_map(s: FrobeniusStructure, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    f = frob_map(s, tol).matrix
    return f.T if s.category == REL else f.conj().T


def grounded_comultiplication(s: FrobeniusStructure) -> np.ndarray:
    """The doubled comultiplication with its dual-side output discarded.

    This is the right-hand side of the idempotent equation, contracted
    directly from the structure: double the comultiplication, regroup the
    four output factors into (system, system) doubled pairs, and close the
    dual-side pair with the trace row.
    """
    d = s.dim
    delta = s.comult().data
    if s.category == REL:
        doubled = kron(delta, delta)
    else:
        doubled = kron(delta, delta.conj())
    regrouped = permute_factors(doubled, [d, d, d, d], [d * d], [0, 2, 1, 3], [0])
    trace_row = np.zeros((1, d * d), dtype=bool if s.category == REL else np.complex128)
    for i in range(d):
        trace_row[0, i * d + i] = True if s.category == REL else 1.0
    closer = kron(np.eye(d * d, dtype=trace_row.dtype), trace_row)
    if s.category == REL:
        return bool_matmul(closer, regrouped)
    return closer @ regrouped


def decoherence_idempotent(
    s: FrobeniusStructure, tol: Tolerance = DEFAULT_TOLERANCE
) -> Superoperator:
    """dagger_frob . frob as a superoperator on the carrier's doubled space."""
    f = frob_map(s, tol).matrix
    fd = dagger_frob_map(s, tol)
    mat = bool_matmul(fd, f) if s.category == REL else fd @ f
    return Superoperator(s.dim, s.dim, mat)


def sandwich_realize(
    w: CpmMorphism,
    dom: FrobeniusStructure,
    cod: FrobeniusStructure,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Realize a witness between structures: frob(cod) . realize(w) . dagger_frob(dom)."""
    if w.dim_in != dom.dim or w.dim_out != cod.dim:
        raise ValueError(
            f"witness boundary ({w.dim_in}, {w.dim_out}) does not match carriers "
            f"({dom.dim}, {cod.dim})"
        )
    mid = realize(w).matrix
    f_cod = frob_map(cod, tol).matrix
    fd_dom = dagger_frob_map(dom, tol)
    if dom.category == REL:
        return bool_matmul(bool_matmul(f_cod, mid), fd_dom)
    return f_cod @ mid @ fd_dom


def membership_clauses(
    m: np.ndarray,
    dom: FrobeniusStructure,
    cod: FrobeniusStructure,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[bool, float, bool, float]:
    """Evaluate both membership clauses.

    Returns (cp_ok, min_choi_eigenvalue, reproduce_ok, reproduction_residual)
    for the sandwich superoperator of the candidate map.
    """
    if dom.category != FHILB or cod.category != FHILB:
        raise ValueError("CP* membership is decided for FHilb structures only")
    m = as_complex_matrix(m)
    if m.shape != (cod.dim, dom.dim):
        raise ValueError(f"map shape {m.shape} does not match carriers ({cod.dim}, {dom.dim})")
    s = Superoperator(dom.dim, cod.dim, dagger_frob_map(cod, tol) @ m @ frob_map(dom, tol).matrix)
    c_eigs = None
    try:
        c_eigs = choi_eigenvalues(s, tol)
        cp_ok = bool(c_eigs[-1] >= 0.0)
        min_eig = float(c_eigs[-1])
    except ValueError:
        cp_ok = False
        min_eig = float("-inf")
    back = frob_map(cod, tol).matrix @ s.matrix @ dagger_frob_map(dom, tol)
    residual = max_abs_diff(back, m)
    return cp_ok, min_eig, residual <= tol.structural_eps, residual


def is_cpstar(
    m: np.ndarray,
    dom: FrobeniusStructure,
    cod: FrobeniusStructure,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    cp_ok, _, reproduce_ok, _ = membership_clauses(m, dom, cod, tol)
    return cp_ok and reproduce_ok


def cpstar_purify(
    m: np.ndarray,
    dom: FrobeniusStructure,
    cod: FrobeniusStructure,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CpmMorphism:
    """Witness extraction through the frob sandwich.

    Purifies dagger_frob(cod) . map . frob(dom); the returned witness
    satisfies sandwich_realize(w, dom, cod) = map within roundtrip_eps.
    Raises MembershipError naming the clause that failed.
    """
    if dom.category != FHILB or cod.category != FHILB:
        raise ValueError("CP* purification is defined for FHilb structures only")
    m = as_complex_matrix(m)
    if m.shape != (cod.dim, dom.dim):
        raise ValueError(f"map shape {m.shape} does not match carriers ({cod.dim}, {dom.dim})")
    s = Superoperator(
        dom.dim, cod.dim, dagger_frob_map(cod, tol) @ m @ frob_map(dom, tol).matrix
    )
    back = frob_map(cod, tol).matrix @ s.matrix @ dagger_frob_map(dom, tol)
    residual = max_abs_diff(back, m)
    if residual > tol.structural_eps:
        raise MembershipError("sandwich reproduction", f"residual {residual:.6g}")
    try:
        return purify(s, tol)
    except NotCompletelyPositiveError as exc:
        raise MembershipError(
            "complete positivity",
            f"most negative Choi eigenvalue {exc.min_eigenvalue:.6g}",
        ) from exc


@dataclass(frozen=True, eq=False)
class CpStarMorphism:
    """A CP* morphism: realized carrier-level map plus an optional witness."""

    dom: FrobeniusStructure
    cod: FrobeniusStructure
    map: np.ndarray
    witness: CpmMorphism | None = None


def cpstar_morphism(
    dom: FrobeniusStructure,
    cod: FrobeniusStructure,
    m: np.ndarray | None = None,
    witness: CpmMorphism | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CpStarMorphism:
    """Validating constructor: checks witness agreement and membership."""
    if m is None:
        if witness is None:
            raise ValueError("need a map, a witness, or both")
        m = sandwich_realize(witness, dom, cod, tol)
    else:
        m = as_complex_matrix(m)
        if witness is not None:
            agreement = max_abs_diff(sandwich_realize(witness, dom, cod, tol), m)
            if agreement > tol.structural_eps:
                raise ValueError(f"witness does not realize the map (residual {agreement:.3g})")
    cp_ok, min_eig, reproduce_ok, residual = membership_clauses(m, dom, cod, tol)
    if not (cp_ok and reproduce_ok):
        clause = "complete positivity" if not cp_ok else "sandwich reproduction"
        detail = f"min eigenvalue {min_eig:.6g}" if not cp_ok else f"residual {residual:.6g}"
        raise MembershipError(clause, detail)
    m = m.copy()
    m.setflags(write=False)
    return CpStarMorphism(dom, cod, m, witness)


@lru_cache(maxsize=256)
def identity_cpstar(s: FrobeniusStructure, tol: Tolerance = DEFAULT_TOLERANCE) -> CpStarMorphism:
    return cpstar_morphism(
        s, s, np.eye(s.dim, dtype=np.complex128), identity_channel(s.dim), tol
    )


def cpstar_compose(
    g: CpStarMorphism, f: CpStarMorphism, tol: Tolerance = DEFAULT_TOLERANCE
) -> CpStarMorphism:
    """Composition as in the base category; closure is re-checked.

    The composite's witness is recomputed by purification rather than
    assembled symbolically.  A closure failure here indicates a convention
    bug, so it raises rather than reporting.
    """
    if not structures_equal(f.cod, g.dom, tol):
        raise ValueError("codomain of f does not match domain of g")
    m = g.map @ f.map
    try:
        witness = cpstar_purify(m, f.dom, g.cod, tol)
    except MembershipError as exc:
        raise RuntimeError(f"composite left the CP* morphisms: {exc}") from exc
    return CpStarMorphism(f.dom, g.cod, m, witness)


def cpstar_tensor(
    f: CpStarMorphism, g: CpStarMorphism, tol: Tolerance = DEFAULT_TOLERANCE
) -> CpStarMorphism:
    """Tensor inherited from the base category: the plain Kronecker product
    of the realized maps, between the tensor structures."""
    dom = tensor_structure(f.dom, g.dom)
    cod = tensor_structure(f.cod, g.cod)
    m = kron(f.map, g.map)
    try:
        witness = cpstar_purify(m, dom, cod, tol)
    except MembershipError as exc:
        raise RuntimeError(f"tensor left the CP* morphisms: {exc}") from exc
    return CpStarMorphism(dom, cod, m, witness)


def cpstar_dagger(f: CpStarMorphism, tol: Tolerance = DEFAULT_TOLERANCE) -> CpStarMorphism:
    m = f.map.conj().T
    try:
        witness = cpstar_purify(m, f.cod, f.dom, tol)
    except MembershipError as exc:
        raise RuntimeError(f"dagger left the CP* morphisms: {exc}") from exc
    return CpStarMorphism(f.cod, f.dom, m, witness)


def functor_Q(f: PureMorphism, tol: Tolerance = DEFAULT_TOLERANCE) -> CpStarMorphism:
    """Doubling into CP*: pants(dim) objects and kron(f, conj f) on maps.

    The realized map coincides exactly with the realization of the
    single-slice witness of f, so the construction factors through the
    plain doubling functor.
    """
    if f.category != FHILB:
        raise ValueError("the doubling functor into CP* is defined over FHilb")
    if len(f.dom.factors) != 1 or len(f.cod.factors) != 1:
        raise ValueError("declare single-factor boundaries for doubled morphisms")
    dom = pants(f.dom.dim)
    cod = pants(f.cod.dim)
    m = kron(f.data, f.data.conj())
    return cpstar_morphism(dom, cod, m, tol=tol)


# ---------------------------------------------------------------------------
# decoherence structure checker


def check_decoherence(
    structures: Sequence[FrobeniusStructure],
    samples: Sequence[tuple[int, int, CpmMorphism]] = (),
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> CheckReport:
    """Verify the decoherence-structure axioms over a family of structures.

    (i)   monoidality of the frob family: frob of a tensor structure is the
          doubled-interleaved tensor of the component frobs, and frob of the
          trivial structure is the identity scalar;
    (ii)  the idempotent equations: frob . dagger_frob is the identity on
          the carrier, dagger_frob . frob equals the grounded
          comultiplication contraction and is idempotent;
    (iii) membership round trips: each sampled witness, sandwiched between
          its structures, passes membership and purifies back to its map;
    (iv)  the specialty composite mult . dagger(mult) = id, the spider step
          the idempotent equations rest on.

    ``samples`` holds (dom_index, cod_index, witness) triples into
    ``structures``; Rel structures take part in (i), (ii) and (iv) with
    exact boolean arithmetic and are skipped by (iii).
    """
    rb = ReportBuilder("decoherence axioms")
    structures = list(structures)

    if not structures:
        return rb.build()

    # (i) monoidality of the frob family
    worst_pair = 0.0
    for a, b in zip(structures, structures[1:] + structures[:1]):
        if a.category != b.category:
            continue
        da, db = a.dim, b.dim
        joint = frob_map(tensor_structure(a, b), tol).matrix
        split = kron(frob_map(a, tol).matrix, frob_map(b, tol).matrix)
        split = permute_factors(
            split, [da, db], [da, da, db, db], [0, 1], [0, 2, 1, 3]
        )
        worst_pair = max(worst_pair, max_abs_diff(joint, split))
    eps = tol.structural_eps
    rb.residual_item("frob_monoidal_pairs", worst_pair, eps)

    triv = frob_map(trivial(structures[0].category), tol).matrix
    one = np.ones((1, 1), dtype=triv.dtype if triv.dtype != np.bool_ else bool)
    rb.residual_item("frob_trivial", max_abs_diff(triv, one), eps)

    # (ii) idempotent equations per structure
    worst_split, worst_ground, worst_idem = 0.0, 0.0, 0.0
    for s in structures:
        f = frob_map(s, tol).matrix
        fd = dagger_frob_map(s, tol)
        d = s.dim
        if s.category == REL:
            split = max_abs_diff(bool_matmul(f, fd), np.eye(d, dtype=bool))
            dmat = bool_matmul(fd, f)
            ground = max_abs_diff(dmat, grounded_comultiplication(s))
            idem = max_abs_diff(bool_matmul(dmat, dmat), dmat)
        else:
            split = max_abs_diff(f @ fd, np.eye(d))
            dmat = fd @ f
            ground = max_abs_diff(dmat, grounded_comultiplication(s))
            idem = max_abs_diff(dmat @ dmat, dmat)
        worst_split = max(worst_split, split)
        worst_ground = max(worst_ground, ground)
        worst_idem = max(worst_idem, idem)
    rb.residual_item("frob_splitting", worst_split, eps, "frob . dagger_frob = id")
    rb.residual_item(
        "grounded_comultiplication", worst_ground, eps, "dagger_frob . frob contraction"
    )
    rb.residual_item("idempotency", worst_idem, eps)

    # (iii) membership round trips on the samples
    worst_rt = 0.0
    failures = 0
    used = 0
    for i, j, w in samples:
        dom, cod = structures[i], structures[j]
        if dom.category != FHILB or cod.category != FHILB:
            continue
        used += 1
        m = sandwich_realize(w, dom, cod, tol)
        if not is_cpstar(m, dom, cod, tol):
            failures += 1
            continue
        back = sandwich_realize(cpstar_purify(m, dom, cod, tol), dom, cod, tol)
        worst_rt = max(worst_rt, max_abs_diff(back, m))
    rb.residual_item(
        "membership_roundtrip",
        worst_rt if failures == 0 else float("inf"),
        tol.roundtrip_eps,
        f"{used} samples, {failures} membership failures",
    )

    # (iv) the spider step: specialty as displayed
    worst_special = 0.0
    for s in structures:
        if s.category == REL:
            lhs = bool_matmul(s.mult.data, s.mult.data.T)
            worst_special = max(worst_special, max_abs_diff(lhs, np.eye(s.dim, dtype=bool)))
        else:
            lhs = s.mult.data @ s.mult.data.conj().T
            worst_special = max(worst_special, max_abs_diff(lhs, np.eye(s.dim)))
    rb.residual_item("spider_specialty", worst_special, eps)

    rb.note("structures", str(len(structures)))
    rb.note("samples", str(len(samples)))
    return rb.build()
