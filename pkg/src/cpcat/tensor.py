"""Dense complex tensor algebra with explicit index bookkeeping.

All flattening is row-major: a multi-index (i1, ..., ik) over factor
dimensions (d1, ..., dk) maps to the flat index ((i1*d2 + i2)*d3 + ...).
Every function returns a fresh array and never mutates its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "as_complex_matrix",
    "kron",
    "permute_factors",
    "partial_trace",
    "hermitian_eig",
    "approx_equal",
    "max_abs_diff",
]

JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared across the library.

    ``structural_eps`` gates equalities that hold by construction,
    ``roundtrip_eps`` gates reconstruction paths (eigendecomposition,
    purification), and ``eig_eps`` is the Jacobi off-diagonal threshold
    and the eigenvalue clamp used in rank decisions.
    """

    structural_eps: float = 1e-9
    roundtrip_eps: float = 1e-8
    eig_eps: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("structural_eps", "roundtrip_eps", "eig_eps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOLERANCE = Tolerance()


def as_complex_matrix(m) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of rank {a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"matrix must have at least one row and column, got {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix contains non-finite entries")
    return a


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product under row-major index pairing.

    The entry at row (i, j), column (k, l) equals a[i, k] * b[j, l];
    boolean inputs stay boolean (logical product).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype == np.bool_ and b.dtype == np.bool_:
        return np.kron(a.astype(np.uint8), b.astype(np.uint8)).astype(bool)
    return np.kron(a, b)


def _check_permutation(perm: Sequence[int], n: int, label: str) -> tuple[int, ...]:
    p = tuple(int(x) for x in perm)
    if sorted(p) != list(range(n)):
        raise ValueError(f"{label} is not a permutation of 0..{n - 1}: {p}")
    return p


def permute_factors(
    m: np.ndarray,
    row_dims: Sequence[int],
    col_dims: Sequence[int],
    row_perm: Sequence[int],
    col_perm: Sequence[int],
) -> np.ndarray:
    """Reorder the tensor factors of a matrix.

    ``row_dims``/``col_dims`` declare the factorizations of the row and
    column index; output slot j carries the source factor ``perm[j]``, so
    the output multi-index is the source multi-index read through the
    inverse permutation.  Applying ``perm`` and then its inverse is the
    bit-exact identity.
    """
    m = np.asarray(m)
    row_dims = tuple(int(d) for d in row_dims)
    col_dims = tuple(int(d) for d in col_dims)
    if math.prod(row_dims) != m.shape[0]:
        raise ValueError(f"row dims {row_dims} do not multiply to {m.shape[0]}")
    if math.prod(col_dims) != m.shape[1]:
        raise ValueError(f"col dims {col_dims} do not multiply to {m.shape[1]}")
    row_perm = _check_permutation(row_perm, len(row_dims), "row_perm")
    col_perm = _check_permutation(col_perm, len(col_dims), "col_perm")

    t = m.reshape(row_dims + col_dims)
    axes = tuple(row_perm) + tuple(len(row_dims) + p for p in col_perm)
    t = t.transpose(axes)
    new_rows = math.prod(row_dims[p] for p in row_perm) if row_dims else 1
    new_cols = math.prod(col_dims[p] for p in col_perm) if col_dims else 1
    return np.ascontiguousarray(t).reshape(new_rows, new_cols)


def partial_trace(
    m: np.ndarray, subsystem_dims: Sequence[int], traced_positions
) -> np.ndarray:
    """Trace out the named tensor positions of a square matrix.

    ``subsystem_dims`` factorizes both the row and the column index;
    positions are 0-based into that factor list.
    """
    m = np.asarray(m)
    dims = tuple(int(d) for d in subsystem_dims)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"partial trace needs a square matrix, got {m.shape}")
    if math.prod(dims) != m.shape[0]:
        raise ValueError(f"subsystem dims {dims} do not multiply to {m.shape[0]}")
    positions = sorted({int(p) for p in traced_positions})
    if positions and (positions[0] < 0 or positions[-1] >= len(dims)):
        raise ValueError(f"traced positions {positions} out of range for {len(dims)} factors")

    t = m.reshape(dims + dims)
    k = len(dims)
    for pos in reversed(positions):
        t = np.trace(t, axis1=pos, axis2=pos + k)
        k -= 1
    remaining = math.prod(d for i, d in enumerate(dims) if i not in positions)
    return np.asarray(t).reshape(remaining, remaining)


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm of the difference; boolean arrays compare exactly (0.0 or 1.0)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.dtype == np.bool_ and b.dtype == np.bool_:
        return 0.0 if np.array_equal(a, b) else 1.0
    diff = np.abs(a.astype(np.complex128) - b.astype(np.complex128))
    return float(diff.max()) if diff.size else 0.0


def approx_equal(a: np.ndarray, b: np.ndarray, eps: float) -> bool:
    """True iff the max-norm of (a - b) is at most eps.  Shapes must agree."""
    return max_abs_diff(a, b) <= eps


def _offdiag_max(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.abs(off).max())


def _round_robin_rounds(n: int) -> list[list[tuple[int, int]]]:
    """Tournament schedule: each sweep visits every index pair exactly once,
    grouped into rounds of pairwise-disjoint pairs."""
    players = list(range(n)) + ([n] if n % 2 else [])  # pad with a bye
    m = len(players)
    rounds = []
    order = players[:]
    for _ in range(m - 1):
        pairs = []
        for k in range(m // 2):
            p, q = order[k], order[m - 1 - k]
            if p < n and q < n:
                pairs.append((p, q) if p < q else (q, p))
        rounds.append(pairs)
        order = [order[0]] + [order[-1]] + order[1:-1]
    return rounds


def hermitian_eig(
    m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """Eigensystem of a Hermitian matrix by cyclic Jacobi rotations.

    One sweep visits every off-diagonal pair once, in round-robin order so
    that the disjoint rotations of a round apply as a single unitary.

    Returns (eigenvalues, eigenvectors) with real eigenvalues sorted in
    descending order and eigenvectors as the matching columns of a unitary
    matrix, so that m = V diag(w) V^dagger.  Eigenvalues of magnitude below
    ``tol.eig_eps`` are clamped to zero.

    Raises ValueError for non-Hermitian input and ArithmeticError if the
    off-diagonal mass has not dropped below ``tol.eig_eps`` after
    ``JACOBI_MAX_SWEEPS`` full sweeps.
    """
    a = as_complex_matrix(m)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError(f"eigensolver needs a square matrix, got {a.shape}")
    if max_abs_diff(a, a.conj().T) > tol.structural_eps:
        raise ValueError("matrix is not Hermitian within structural_eps")

    a = (a + a.conj().T) / 2.0
    v = np.eye(n, dtype=np.complex128)
    rounds = _round_robin_rounds(n)

    converged = n == 1 or _offdiag_max(a) <= tol.eig_eps
    for _ in range(JACOBI_MAX_SWEEPS):
        if converged:
            break
        for pairs in rounds:
            pp = np.array([p for p, _ in pairs])
            qq = np.array([q for _, q in pairs])
            apq = a[pp, qq]
            live = np.abs(apq) > tol.eig_eps
            if not np.any(live):
                continue
            pp, qq, apq = pp[live], qq[live], apq[live]
            r = np.abs(apq)
            phase = apq / r
            delta = a[pp, pp].real - a[qq, qq].real
            # the smaller root of r t^2 + delta t - r = 0 (45 degrees at delta=0)
            t = np.where(
                delta == 0.0,
                1.0,
                np.copysign(2.0 * r, delta) / (np.abs(delta) + np.hypot(delta, 2.0 * r)),
            )
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # right action A <- A R on the pair columns, vectorized over pairs
            col_p, col_q = a[:, pp].copy(), a[:, qq].copy()
            a[:, pp] = c * col_p + (s * phase.conj()) * col_q
            a[:, qq] = -(s * phase) * col_p + c * col_q
            # left action A <- R^dagger A on the pair rows
            row_p, row_q = a[pp, :].copy(), a[qq, :].copy()
            a[pp, :] = c[:, None] * row_p + (s * phase)[:, None] * row_q
            a[qq, :] = -(s * phase.conj())[:, None] * row_p + c[:, None] * row_q
            # disjoint pairs annihilate exactly; clear rounding residue
            a[pp, qq] = 0.0
            a[qq, pp] = 0.0
            vol_p, vol_q = v[:, pp].copy(), v[:, qq].copy()
            v[:, pp] = c * vol_p + (s * phase.conj()) * vol_q
            v[:, qq] = -(s * phase) * vol_p + c * vol_q
        converged = _offdiag_max(a) <= tol.eig_eps
    if not converged:
        raise ArithmeticError(
            f"Jacobi iteration did not converge within {JACOBI_MAX_SWEEPS} sweeps"
        )

    w = a.diagonal().real.copy()
    w[np.abs(w) < tol.eig_eps] = 0.0
    order = np.argsort(-w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])
