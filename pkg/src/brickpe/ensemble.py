"""Projected ensembles and their frame potentials.

Measuring every site of region B in the computational basis turns a pure
state on A+B into an ensemble of q^L_B unnormalized states on A, one per
outcome.  The columns of the split amplitude matrix are exactly those states,
so the overlap (Gram) matrix of the columns together with its diagonal (the
Born weights) is a sufficient statistic for every moment computed here:

    F(k) = sum_{a,a'} p(a)^(1-k) p(a')^(1-k) |<col_a | col_a'>|^(2k).

For k = 1 this is the purity of the reduced state on A.

Outcomes with Born weight below a null threshold are excluded from the sum;
their exact contribution is bounded by their total weight (Cauchy-Schwarz), so
exclusion is safe, and that total is reported so callers can see what was
dropped.  The Gram matrix is materialized only when small; otherwise column
blocks are streamed pairwise (upper triangle only, off-diagonal blocks counted
twice) and partial sums are combined with compensated summation, making the
reduction order-insensitive at the 1e-15 level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import Geometry, Statevector, split_matrix
from .haar import haar_frame_potential

NULL_OUTCOME_THRESHOLD = 1e-14
# Largest Gram matrix materialized at once: 2^22 complex entries = 64 MiB.
DEFAULT_GRAM_BUDGET = 2**22
DEFAULT_BLOCK_COLUMNS = 1024


@dataclass(frozen=True)
class FrameResult:
    """One frame-potential value and what was dropped to compute it."""

    k: int
    value: float
    excluded_mass: float
    dims: tuple[int, int, int]  # (q, l_a, l_b)

    @property
    def log_value(self) -> float:
        return math.log(self.value)

    def haar_value(self) -> float:
        q, l_a, _ = self.dims
        return haar_frame_potential(q**l_a, self.k)


class _NeumaierSum:
    """Compensated accumulator; order-insensitive to well below double epsilon."""

    __slots__ = ("total", "correction")

    def __init__(self) -> None:
        self.total = 0.0
        self.correction = 0.0

    def add(self, term: float) -> None:
        t = self.total + term
        if abs(self.total) >= abs(term):
            self.correction += (self.total - t) + term
        else:
            self.correction += (term - t) + self.total
        self.total = t

    def value(self) -> float:
        return self.total + self.correction


def projected_matrix(state: Statevector, geometry: Geometry) -> np.ndarray:
    """Unnormalized projected states on A, one column per B outcome."""
    return split_matrix(state, geometry)


def born_weights(mat: np.ndarray) -> np.ndarray:
    """Outcome probabilities: squared column norms of the projected matrix."""
    return np.einsum("ij,ij->j", mat.real, mat.real) + np.einsum("ij,ij->j", mat.imag, mat.imag)


def _pair_sums(gram_block: np.ndarray, w_i: dict[int, np.ndarray], w_j: dict[int, np.ndarray], ks: Sequence[int]) -> dict[int, float]:
    """sum_{a in I, a' in J} w_k[a] w_k[a'] |G_{aa'}|^(2k), per k."""
    abs2 = gram_block.real**2 + gram_block.imag**2
    out: dict[int, float] = {}
    for k in sorted(ks):
        pk = abs2 if k == 1 else abs2**k
        out[k] = float(w_i[k] @ pk @ w_j[k])
    return out


def _frame_sums_dense(mat: np.ndarray, weights: dict[int, np.ndarray], ks: Sequence[int]) -> dict[int, float]:
    gram = mat.conj().T @ mat
    return _pair_sums(gram, weights, weights, ks)


def _frame_sums_blocked(
    mat: np.ndarray,
    weights: dict[int, np.ndarray],
    ks: Sequence[int],
    block_columns: int,
) -> dict[int, float]:
    n = mat.shape[1]
    acc = {k: _NeumaierSum() for k in ks}
    starts = range(0, n, block_columns)
    for si in starts:
        ei = min(si + block_columns, n)
        left = mat[:, si:ei].conj().T
        for sj in range(si, n, block_columns):
            ej = min(sj + block_columns, n)
            gram_block = left @ mat[:, sj:ej]
            w_i = {k: weights[k][si:ei] for k in ks}
            w_j = {k: weights[k][sj:ej] for k in ks}
            part = _pair_sums(gram_block, w_i, w_j, ks)
            scale = 1.0 if si == sj else 2.0  # Hermitian: mirror block contributes equally
            for k in ks:
                acc[k].add(scale * part[k])
    return {k: acc[k].value() for k in ks}


def frame_potentials(
    mat: np.ndarray,
    ks: Sequence[int],
    dims: tuple[int, int, int],
    null_threshold: float = NULL_OUTCOME_THRESHOLD,
    method: str = "auto",
    gram_budget: int = DEFAULT_GRAM_BUDGET,
    block_columns: int = DEFAULT_BLOCK_COLUMNS,
) -> dict[int, FrameResult]:
    """Frame potentials for several moment orders from one pass over the Gram data."""
    ks = sorted(set(int(k) for k in ks))
    if ks and ks[0] < 1:
        raise ValueError("moment orders must be >= 1")
    p = born_weights(mat)
    keep = p >= null_threshold
    excluded = float(p[~keep].sum())
    kept = mat[:, keep] if not keep.all() else mat
    pk = p[keep]
    weights = {k: np.ones_like(pk) if k == 1 else pk ** (1.0 - k) for k in ks}
    n_kept = kept.shape[1]
    if method == "auto":
        method = "dense" if n_kept * n_kept <= gram_budget else "blocked"
    if method == "dense":
        sums = _frame_sums_dense(kept, weights, ks)
    elif method == "blocked":
        sums = _frame_sums_blocked(kept, weights, ks, block_columns)
    else:
        raise ValueError(f"unknown method {method!r}")
    return {k: FrameResult(k=k, value=sums[k], excluded_mass=excluded, dims=dims) for k in ks}


def frame_potential(
    mat: np.ndarray,
    k: int,
    dims: tuple[int, int, int],
    **kwargs,
) -> FrameResult:
    if k < 1:
        raise ValueError("moment order must be >= 1")
    return frame_potentials(mat, [k], dims, **kwargs)[k]


def ensemble_frame_potentials(state: Statevector, geometry: Geometry, ks: Sequence[int], **kwargs) -> dict[int, FrameResult]:
    """Measure B on a concrete state and compute F(k) for each requested k."""
    mat = projected_matrix(state, geometry)
    dims = (state.q, geometry.l_a, geometry.l_b)
    return frame_potentials(mat, ks, dims, **kwargs)


def delta_squared(result: FrameResult) -> float:
    """Squared Frobenius distance to the uniform ensemble, F/F_H - 1.

    Tiny negative values (floating-point residue of an exact inequality) are
    clipped to zero.
    """
    ratio = result.value / result.haar_value() - 1.0
    if -1e-12 < ratio < 0.0:
        return 0.0
    return ratio


def purity_moment(purities: Sequence[float], k: int) -> tuple[float, float | None]:
    """Sample mean and standard error of P^k over circuit realizations.

    With a single realization the spread is undefined; the standard error is
    returned as None so callers cannot mistake it for zero.
    """
    if k < 1:
        raise ValueError("moment order must be >= 1")
    values = np.asarray([p**k for p in purities], dtype=float)
    mean = float(values.mean())
    if values.size < 2:
        return mean, None
    sem = float(values.std(ddof=1) / math.sqrt(values.size))
    return mean, sem
