"""Seeded random instances used by the checkers, the harness, and the CLI.

Entries are drawn with independent Gaussian real and imaginary parts from a
numpy Generator, so identical seeds reproduce identical instances.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .category import FHILB, Obj, PureMorphism
from .cpm import CpmMorphism, Superoperator, realize
from .frobenius import FrobeniusStructure

__all__ = [
    "make_rng",
    "complex_normal",
    "random_pure",
    "random_wiring",
    "random_witness",
    "random_isometry",
    "random_unitary",
    "random_cp_superoperator",
    "random_hermitian",
    "sample_environment_wirings",
    "sample_member_witnesses",
]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pure(rng: np.random.Generator, d_out: int, d_in: int) -> PureMorphism:
    return PureMorphism(
        Obj(FHILB, (d_in,)), Obj(FHILB, (d_out,)), complex_normal(rng, (d_out, d_in))
    )


def random_wiring(rng: np.random.Generator, d_in: int, d_anc: int, d_out: int) -> PureMorphism:
    """A morphism A -> X (x) B with the two-factor codomain declared."""
    return PureMorphism(
        Obj(FHILB, (d_in,)),
        Obj(FHILB, (d_anc, d_out)),
        complex_normal(rng, (d_anc * d_out, d_in)),
    )


def random_witness(
    rng: np.random.Generator, d_in: int, d_out: int, d_anc: int
) -> CpmMorphism:
    slices = tuple(complex_normal(rng, (d_out, d_in)) for _ in range(d_anc))
    return CpmMorphism(d_in, d_out, slices)


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """An isometry (rows >= cols) via QR of a Gaussian matrix."""
    if rows < cols:
        raise ValueError("an isometry needs rows >= cols")
    q, r = np.linalg.qr(complex_normal(rng, (rows, cols)))
    # fix the phase ambiguity of QR so instances are reproducible across BLAS builds
    phases = np.diag(r).copy()
    phases[phases == 0] = 1.0
    return q * (phases / np.abs(phases)).conj()


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    return random_isometry(rng, n, n)


def random_cp_superoperator(
    rng: np.random.Generator, d_in: int, d_out: int, kraus_rank: int
) -> Superoperator:
    return realize(random_witness(rng, d_in, d_out, kraus_rank))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = complex_normal(rng, (n, n))
    return (a + a.conj().T) / 2.0


def sample_environment_wirings(
    rng: np.random.Generator, n: int, dims: Sequence[int] = (1, 2, 3)
) -> list[PureMorphism]:
    """Wirings A -> X (x) B with all three dimensions drawn from ``dims``.

    Consecutive samples share boundaries in pairs so that the environment
    checker can form genuinely-different comparison pairs.
    """
    out: list[PureMorphism] = []
    dims = list(dims)
    for k in range(n):
        if k % 2 == 1 and out:
            prev = out[-1]
            d_in = prev.dom.dim
            d_anc, d_out = prev.cod.factors
        else:
            d_in = dims[int(rng.integers(len(dims)))]
            d_anc = dims[int(rng.integers(len(dims)))]
            d_out = dims[int(rng.integers(len(dims)))]
        out.append(random_wiring(rng, d_in, d_anc, d_out))
    return out


def sample_member_witnesses(
    structures: Sequence[FrobeniusStructure],
    rng: np.random.Generator,
    n: int,
    max_ancilla: int = 3,
) -> list[tuple[int, int, CpmMorphism]]:
    """(dom_index, cod_index, witness) triples for the decoherence checker."""
    fhilb_indices = [i for i, s in enumerate(structures) if s.category == FHILB]
    triples: list[tuple[int, int, CpmMorphism]] = []
    if not fhilb_indices:
        return triples
    for _ in range(n):
        i = fhilb_indices[int(rng.integers(len(fhilb_indices)))]
        j = fhilb_indices[int(rng.integers(len(fhilb_indices)))]
        anc = int(rng.integers(1, max_ancilla + 1))
        triples.append((i, j, random_witness(rng, structures[i].dim, structures[j].dim, anc)))
    return triples
