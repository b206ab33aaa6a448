"""Executable obligations of the two universal-property results.

Each construction has two concrete presentations (witness form and
realized form).  The mediating functor between them decomposes a morphism
as discard-after-doubling (extracting a witness, by purification where none
is stored) and rebuilds it on the other side.  The harness verifies, on
seeded samples, that this functor is well defined, preserves identities,
composition, tensor and dagger, sends discard to discard, and that the two
mediating functors compose to the identity (the isomorphism of the two
presentations).

Initiality itself quantifies over all receiving categories; what is checked
here are its finite consequences on the sampled instances, and every report
states its sample coverage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cpm import (
    CpmMorphism,
    Superoperator,
    cpm_compose,
    cpm_dagger,
    cpm_tensor,
    discard,
    identity_channel,
    purify,
    realize,
    superop_compose,
    superop_dagger,
    superop_tensor,
    apply_isometry_to_ancilla,
)
from .cpstar import (
    CpStarMorphism,
    cpstar_compose,
    cpstar_dagger,
    cpstar_morphism,
    cpstar_purify,
    cpstar_tensor,
    identity_cpstar,
    sandwich_realize,
)
from .frobenius import FrobeniusStructure, classical, pants, tensor_structure
from .report import CheckReport, ReportBuilder
from .sampling import make_rng, random_isometry, random_witness
from .tensor import Tolerance, DEFAULT_TOLERANCE, kron, max_abs_diff

__all__ = [
    "CpmPresentation",
    "CpStarPresentation",
    "witness_cpm_presentation",
    "superoperator_cpm_presentation",
    "witness_cpstar_presentation",
    "realized_cpstar_presentation",
    "mediating_cpm",
    "mediating_cpstar",
    "verify_functor_laws",
    "corollary_isomorphism_check",
    "DEFAULT_CPSTAR_GENERATORS",
]


@dataclass(frozen=True)
class CpmPresentation:
    """One concrete presentation of the doubled-maps category."""

    tag: str
    identity: Callable[[int], object]
    compose: Callable[[object, object], object]
    tensor: Callable[[object, object], object]
    dagger: Callable[[object], object]
    discard: Callable[[int], object]
    to_witness: Callable[[object], CpmMorphism]
    from_witness: Callable[[CpmMorphism], object]
    realized: Callable[[object], np.ndarray]


def witness_cpm_presentation(tol: Tolerance = DEFAULT_TOLERANCE) -> CpmPresentation:
    return CpmPresentation(
        tag="witness-form",
        identity=identity_channel,
        compose=cpm_compose,
        tensor=cpm_tensor,
        dagger=cpm_dagger,
        discard=lambda d: purify(discard(d), tol),
        to_witness=lambda m: m,
        from_witness=lambda w: w,
        realized=lambda m: realize(m).matrix,
    )


def superoperator_cpm_presentation(tol: Tolerance = DEFAULT_TOLERANCE) -> CpmPresentation:
    return CpmPresentation(
        tag="superoperator-form",
        identity=lambda d: realize(identity_channel(d)),
        compose=superop_compose,
        tensor=superop_tensor,
        dagger=superop_dagger,
        discard=discard,
        to_witness=lambda s: purify(s, tol),
        from_witness=realize,
        realized=lambda s: s.matrix,
    )


def mediating_cpm(src: CpmPresentation, dst: CpmPresentation, m) -> object:
    """Decompose in src as discard-after-doubling, rebuild in dst."""
    return dst.from_witness(src.to_witness(m))


DEFAULT_CPSTAR_GENERATORS: tuple[FrobeniusStructure, ...] = (classical(2), pants(2))


@dataclass(frozen=True)
class CpStarPresentation:
    tag: str
    identity: Callable[[FrobeniusStructure], CpStarMorphism]
    compose: Callable[[CpStarMorphism, CpStarMorphism], CpStarMorphism]
    tensor: Callable[[CpStarMorphism, CpStarMorphism], CpStarMorphism]
    dagger: Callable[[CpStarMorphism], CpStarMorphism]
    to_witness: Callable[[CpStarMorphism], CpmMorphism]
    from_witness: Callable[
        [CpmMorphism, FrobeniusStructure, FrobeniusStructure], CpStarMorphism
    ]


def witness_cpstar_presentation(tol: Tolerance = DEFAULT_TOLERANCE) -> CpStarPresentation:
    def to_witness(m: CpStarMorphism) -> CpmMorphism:
        if m.witness is not None:
            return m.witness
        return cpstar_purify(m.map, m.dom, m.cod, tol)

    return CpStarPresentation(
        tag="witness-form",
        identity=lambda s: identity_cpstar(s, tol),
        compose=lambda g, f: cpstar_compose(g, f, tol),
        tensor=lambda f, g: cpstar_tensor(f, g, tol),
        dagger=lambda f: cpstar_dagger(f, tol),
        to_witness=to_witness,
        from_witness=lambda w, dom, cod: cpstar_morphism(dom, cod, witness=w, tol=tol),
    )


def realized_cpstar_presentation(tol: Tolerance = DEFAULT_TOLERANCE) -> CpStarPresentation:
    """Witness-free presentation: composition, tensor and dagger act on the
    realized maps directly, with closure re-validated by the membership test."""

    def build(dom, cod, m) -> CpStarMorphism:
        checked = cpstar_morphism(dom, cod, m, tol=tol)
        return CpStarMorphism(checked.dom, checked.cod, checked.map, None)

    def compose(g: CpStarMorphism, f: CpStarMorphism) -> CpStarMorphism:
        return build(f.dom, g.cod, g.map @ f.map)

    def tensor(f: CpStarMorphism, g: CpStarMorphism) -> CpStarMorphism:
        return build(
            tensor_structure(f.dom, g.dom), tensor_structure(f.cod, g.cod), kron(f.map, g.map)
        )

    return CpStarPresentation(
        tag="realized-form",
        identity=lambda s: CpStarMorphism(s, s, np.eye(s.dim, dtype=np.complex128), None),
        compose=compose,
        tensor=tensor,
        dagger=lambda f: build(f.cod, f.dom, f.map.conj().T),
        to_witness=lambda m: cpstar_purify(m.map, m.dom, m.cod, tol),
        from_witness=lambda w, dom, cod: build(dom, cod, sandwich_realize(w, dom, cod, tol)),
    )


def mediating_cpstar(
    src: CpStarPresentation, dst: CpStarPresentation, m: CpStarMorphism
) -> CpStarMorphism:
    return dst.from_witness(src.to_witness(m), m.dom, m.cod)


# ---------------------------------------------------------------------------
# law verification


def _cpm_law_residuals(
    seed: int, n_samples: int, tol: Tolerance, rb: ReportBuilder
) -> None:
    rng = make_rng(seed)
    witness = witness_cpm_presentation(tol)
    superop = superoperator_cpm_presentation(tol)
    directions = ((witness, superop), (superop, witness))
    laws = {f"{src.tag}->{dst.tag}:{law}": 0.0
            for src, dst in directions
            for law in ("identity", "compose", "tensor", "dagger")}
    well_defined = 0.0
    discard_res = 0.0

    for _ in range(n_samples):
        da, db, dc = (int(rng.integers(1, 4)) for _ in range(3))
        f = random_witness(rng, da, db, int(rng.integers(1, 3)))
        g = random_witness(rng, db, dc, int(rng.integers(1, 3)))
        h = random_witness(rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), 1)

        for src, dst in directions:
            fd = mediating_cpm(src, dst, src.from_witness(f))
            gd = mediating_cpm(src, dst, src.from_witness(g))
            hd = mediating_cpm(src, dst, src.from_witness(h))
            key = f"{src.tag}->{dst.tag}"

            ident = mediating_cpm(src, dst, src.identity(da))
            laws[f"{key}:identity"] = max(
                laws[f"{key}:identity"],
                max_abs_diff(dst.realized(ident), dst.realized(dst.identity(da))),
            )
            lhs = mediating_cpm(src, dst, src.compose(src.from_witness(g), src.from_witness(f)))
            laws[f"{key}:compose"] = max(
                laws[f"{key}:compose"],
                max_abs_diff(dst.realized(lhs), dst.realized(dst.compose(gd, fd))),
            )
            lhs = mediating_cpm(src, dst, src.tensor(src.from_witness(f), src.from_witness(h)))
            laws[f"{key}:tensor"] = max(
                laws[f"{key}:tensor"],
                max_abs_diff(dst.realized(lhs), dst.realized(dst.tensor(fd, hd))),
            )
            lhs = mediating_cpm(src, dst, src.dagger(src.from_witness(f)))
            laws[f"{key}:dagger"] = max(
                laws[f"{key}:dagger"],
                max_abs_diff(dst.realized(lhs), dst.realized(dst.dagger(fd))),
            )

        # well-definedness: isometry-twisted witnesses hit the same image
        u = random_isometry(rng, f.ancilla_dim + 1, f.ancilla_dim)
        twisted = apply_isometry_to_ancilla(f, u)
        well_defined = max(
            well_defined,
            max_abs_diff(realize(twisted).matrix, realize(f).matrix),
        )
        discard_res = max(
            discard_res,
            max_abs_diff(
                superop.realized(mediating_cpm(witness, superop, witness.discard(da))),
                discard(da).matrix,
            ),
        )

    for name in sorted(laws):
        rb.residual_item(name, laws[name], tol.structural_eps)
    rb.residual_item("well_definedness", well_defined, tol.structural_eps)
    rb.residual_item("discard_preservation", discard_res, tol.structural_eps)


def _member(
    rng, dom: FrobeniusStructure, cod: FrobeniusStructure, tol: Tolerance
) -> CpStarMorphism:
    w = random_witness(rng, dom.dim, cod.dim, int(rng.integers(1, 3)))
    return cpstar_morphism(dom, cod, witness=w, tol=tol)


def _cpstar_law_residuals(
    seed: int,
    n_samples: int,
    tol: Tolerance,
    rb: ReportBuilder,
    structures: Sequence[FrobeniusStructure],
) -> None:
    rng = make_rng(seed)
    witness = witness_cpstar_presentation(tol)
    realized = realized_cpstar_presentation(tol)
    directions = ((witness, realized), (realized, witness))
    laws = {f"{src.tag}->{dst.tag}:{law}": 0.0
            for src, dst in directions
            for law in ("identity", "compose", "tensor", "dagger")}

    pool = list(structures)
    for _ in range(n_samples):
        s1, s2, s3 = (pool[int(rng.integers(len(pool)))] for _ in range(3))
        f = _member(rng, s1, s2, tol)
        g = _member(rng, s2, s3, tol)
        h = _member(rng, pool[int(rng.integers(len(pool)))], pool[int(rng.integers(len(pool)))], tol)

        for src, dst in directions:
            key = f"{src.tag}->{dst.tag}"
            fd = mediating_cpstar(src, dst, f)
            gd = mediating_cpstar(src, dst, g)
            hd = mediating_cpstar(src, dst, h)

            ident = mediating_cpstar(src, dst, src.identity(s1))
            laws[f"{key}:identity"] = max(
                laws[f"{key}:identity"], max_abs_diff(ident.map, dst.identity(s1).map)
            )
            lhs = mediating_cpstar(src, dst, src.compose(g, f))
            laws[f"{key}:compose"] = max(
                laws[f"{key}:compose"], max_abs_diff(lhs.map, dst.compose(gd, fd).map)
            )
            lhs = mediating_cpstar(src, dst, src.tensor(f, h))
            laws[f"{key}:tensor"] = max(
                laws[f"{key}:tensor"], max_abs_diff(lhs.map, dst.tensor(fd, hd).map)
            )
            lhs = mediating_cpstar(src, dst, src.dagger(f))
            laws[f"{key}:dagger"] = max(
                laws[f"{key}:dagger"], max_abs_diff(lhs.map, dst.dagger(fd).map)
            )

    for name in sorted(laws):
        rb.residual_item(name, laws[name], tol.structural_eps)


def verify_functor_laws(
    kind: str,
    seed: int = 7,
    n_samples: int = 100,
    tol: Tolerance = DEFAULT_TOLERANCE,
    structures: Sequence[FrobeniusStructure] = DEFAULT_CPSTAR_GENERATORS,
) -> CheckReport:
    """Check the mediating functor's laws on seeded samples.

    ``kind`` is "cpm" or "cpstar".  Both mediating directions are exercised;
    an empty sample count yields an empty report.
    """
    if kind not in ("cpm", "cpstar"):
        raise ValueError(f"unknown kind {kind!r}")
    rb = ReportBuilder(f"functor laws ({kind})")
    if n_samples > 0:
        if kind == "cpm":
            _cpm_law_residuals(seed, n_samples, tol, rb)
        else:
            _cpstar_law_residuals(seed, n_samples, tol, rb, structures)
    rb.note("seed", str(seed))
    rb.note("samples", str(n_samples))
    return rb.build()


def corollary_isomorphism_check(
    kind: str,
    seed: int = 7,
    n_samples: int = 100,
    tol: Tolerance = DEFAULT_TOLERANCE,
    structures: Sequence[FrobeniusStructure] = DEFAULT_CPSTAR_GENERATORS,
) -> CheckReport:
    """Round-trip both mediating functors; the composite must be the identity
    up to canonical equality within roundtrip_eps."""
    if kind not in ("cpm", "cpstar"):
        raise ValueError(f"unknown kind {kind!r}")
    rb = ReportBuilder(f"isomorphism round trip ({kind})")
    rng = make_rng(seed)
    worst_wsw = 0.0
    worst_sws = 0.0
    if kind == "cpm":
        witness = witness_cpm_presentation(tol)
        superop = superoperator_cpm_presentation(tol)
        for _ in range(n_samples):
            da, db = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            w = random_witness(rng, da, db, int(rng.integers(1, 3)))
            s = mediating_cpm(witness, superop, w)
            back = mediating_cpm(superop, witness, s)
            worst_wsw = max(worst_wsw, max_abs_diff(realize(back).matrix, realize(w).matrix))
            s0 = realize(random_witness(rng, da, db, int(rng.integers(1, 3))))
            round2 = mediating_cpm(witness, superop, mediating_cpm(superop, witness, s0))
            worst_sws = max(worst_sws, max_abs_diff(round2.matrix, s0.matrix))
    else:
        witnessp = witness_cpstar_presentation(tol)
        realizedp = realized_cpstar_presentation(tol)
        pool = list(structures)
        for _ in range(n_samples):
            dom = pool[int(rng.integers(len(pool)))]
            cod = pool[int(rng.integers(len(pool)))]
            f = _member(rng, dom, cod, tol)
            over = mediating_cpstar(witnessp, realizedp, f)
            back = mediating_cpstar(realizedp, witnessp, over)
            worst_wsw = max(worst_wsw, max_abs_diff(back.map, f.map))
            g = CpStarMorphism(dom, cod, f.map, None)
            round2 = mediating_cpstar(realizedp, witnessp, mediating_cpstar(witnessp, realizedp, g))
            worst_sws = max(worst_sws, max_abs_diff(round2.map, g.map))
    if n_samples > 0:
        rb.residual_item("witness_roundtrip", worst_wsw, tol.roundtrip_eps)
        rb.residual_item("realized_roundtrip", worst_sws, tol.roundtrip_eps)
    rb.note("seed", str(seed))
    rb.note("samples", str(n_samples))
    return rb.build()
