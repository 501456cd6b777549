"""Exact circuit averages via the permutation lattice.

Averaging a two-site Haar gate over m forward and m backward copies leaves a
sum over pairs of permutations weighted by Weingarten coefficients; stitching
the gates back together turns the circuit average into a classical lattice
contraction whose degrees of freedom are S_m elements, one per site.  This
module evaluates that contraction exactly at small m and L, serving as an
independent oracle for the statevector pipeline.

Layout and layer order are imported from the statevector engine so both
pictures average literally the same circuit.

Normalization: the contraction returns the raw replica average

    E[ sum_{a,a'} <a|a>^n <a'|a'>^n |<a|a'>|^(2k) ]

with no extra prefactor, which at n = 0, k = 1 is exactly the average purity.
How that raw value relates to purity moments at other (n, k) is a statement
about limits taken elsewhere; comparisons document their own normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import Geometry, brick_layers
from .perms import (
    Permutation,
    ReplicaSplit,
    adjacent_pair_product,
    b_boundary_overlap,
    compose,
    cycle_count,
    enumerate_group,
    mu_a,
)

# Hard cap on materialized permutation-field configurations ((m!)^L entries).
DEFAULT_CONFIG_BUDGET = 2**22
WEINGARTEN_MAX_M = 6
CONDITION_LIMIT = 1e12


class ContractionBudgetError(MemoryError):
    """Configuration space would exceed the oracle's budget."""


@dataclass(frozen=True)
class WeingartenTable:
    """Weingarten coefficients for S_m at dimension d, keyed by cycle type."""

    m: int
    d: float
    values: dict[tuple[int, ...], float]

    def __call__(self, perm: Permutation) -> float:
        return self.values[perm.cycle_type()]


def _gram_matrix(group: Sequence[Permutation], d: float) -> np.ndarray:
    n = len(group)
    gram = np.empty((n, n))
    inverses = [g.inverse() for g in group]
    for i, gi in enumerate(group):
        for j in range(n):
            gram[i, j] = d ** cycle_count(compose(gi, inverses[j]))
    return gram


def weingarten_table(m: int, d: float) -> WeingartenTable:
    """Invert the overlap Gram matrix [d^Nc(sigma tau^-1)] over S_m.

    The inverse's first row (against the identity) is the Weingarten function;
    it is a class function, which the construction checks.
    """
    if not 1 <= m <= WEINGARTEN_MAX_M:
        raise ValueError(f"m={m} outside supported range 1..{WEINGARTEN_MAX_M}")
    if d < m:
        raise ValueError(f"Gram matrix is singular or near-singular for d={d} < m={m}")
    group = enumerate_group(m)
    gram = _gram_matrix(group, d)
    cond = float(np.linalg.cond(gram))
    if not math.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ValueError(f"Gram matrix badly conditioned at m={m}, d={d}: cond={cond:.3e}")
    inv = np.linalg.inv(gram)
    values: dict[tuple[int, ...], float] = {}
    for j, g in enumerate(group):
        ct = g.cycle_type()
        val = float(inv[0, j])  # row 0 is the identity element
        if ct in values and not math.isclose(values[ct], val, rel_tol=1e-9, abs_tol=1e-15):
            raise AssertionError(f"Weingarten values differ within class {ct}")
        values.setdefault(ct, val)
    return WeingartenTable(m=m, d=float(d), values=values)


def _wg_matrix(group: Sequence[Permutation], table: WeingartenTable) -> np.ndarray:
    n = len(group)
    out = np.empty((n, n))
    inverses = [g.inverse() for g in group]
    for i, gi in enumerate(group):
        for j in range(n):
            out[i, j] = table(compose(gi, inverses[j]))
    return out


def gate_superoperator(m: int, q: int) -> np.ndarray:
    """Averaged two-site gate as an operator on the site-pair permutation space.

    Coefficient matrix O[(s1 s2), (t1 t2)]: incoming pair coefficients in the
    permutation basis map to outgoing ones supported only on aligned pairs
    s1 = s2.  Assembled from the Weingarten table at dimension q^2 and the
    per-site overlaps q^Nc.
    """
    group = enumerate_group(m)
    table = weingarten_table(m, q * q)
    wg = _wg_matrix(group, table)
    gram = _gram_matrix(group, q)
    n = len(group)
    pair = np.einsum("st,ta,tb->sab", wg, gram, gram)
    out = np.zeros((n, n, n, n))
    idx = np.arange(n)
    out[idx, idx] = pair  # aligned output pairs only
    return out.reshape(n * n, n * n)


class _PermLattice:
    """Dense contraction state over per-site permutation labels.

    Sites start in the factorized-initial-state boundary object, whose overlap
    with every permutation is 1; a site's axis grows to m! labels the first
    time a gate touches it.
    """

    def __init__(self, m: int, q: int, length: int, budget: int = DEFAULT_CONFIG_BUDGET):
        self.group = enumerate_group(m)
        self.n_g = len(self.group)
        self.q = q
        self.length = length
        self.budget = budget
        table = weingarten_table(m, q * q)
        self.wg = _wg_matrix(self.group, table)
        self.gram = _gram_matrix(self.group, q)
        self.state = np.ones((1,) * length)
        self.touched = [False] * length

    def _check_budget(self, ja: int, jb: int) -> None:
        size = 1
        for j, t in enumerate(self.touched):
            size *= self.n_g if (t or j in (ja, jb)) else 1
        if size > self.budget:
            raise ContractionBudgetError(
                f"{size} configurations needed (m!={self.n_g}, L={self.length}); budget is {self.budget}"
            )

    def apply_gate(self, ja: int, jb: int) -> None:
        self._check_budget(ja, jb)
        oa = self.gram if self.touched[ja] else np.ones((self.n_g, 1))
        ob = self.gram if self.touched[jb] else np.ones((self.n_g, 1))
        pair = np.einsum("st,ta,tb->sab", self.wg, oa, ob)
        moved = np.moveaxis(self.state, (ja, jb), (-2, -1))
        rest_shape = moved.shape[:-2]
        flat = moved.reshape(-1, moved.shape[-2], moved.shape[-1])
        val = np.einsum("rab,sab->rs", flat, pair)
        out = np.zeros((flat.shape[0], self.n_g, self.n_g))
        idx = np.arange(self.n_g)
        out[:, idx, idx] = val
        self.state = np.moveaxis(out.reshape(rest_shape + (self.n_g, self.n_g)), (-2, -1), (ja, jb))
        self.touched[ja] = True
        self.touched[jb] = True

    def run_steps(self, t: int, boundary: str) -> None:
        layers = brick_layers(self.length, boundary)
        for _ in range(t):
            for _, pairs in layers:
                for j, wraps in pairs:
                    self.apply_gate(j, 0 if wraps else j + 1)

    def contract_top(self, site_vectors: Sequence[np.ndarray]) -> float:
        value = self.state
        for j in range(self.length):
            vec = site_vectors[j] if self.touched[j] else np.ones(1)
            value = np.tensordot(vec, value, axes=([0], [0]))
        return float(value)


def _fp_site_vectors(group: Sequence[Permutation], split: ReplicaSplit, q: int, geometry: Geometry) -> list[np.ndarray]:
    mu = mu_a(split)
    a_vec = np.array([float(q ** cycle_count(compose(mu, g.inverse()))) for g in group])
    b_vec = np.array([float(b_boundary_overlap(g, split, q)) for g in group])
    a_sites = set(geometry.a_sites)
    return [a_vec if j in a_sites else b_vec for j in range(geometry.length)]


def contract_frame_potential(
    q: int,
    l_a: int,
    l_b: int,
    t: int,
    k: int,
    n: int,
    geometry: Geometry | None = None,
    budget: int = DEFAULT_CONFIG_BUDGET,
) -> float:
    """Exact circuit-averaged replica frame potential at integer spectator count.

    The replica limit toward negative spectator counts is never taken here;
    this evaluates honest integer-n points (m = 2n + 2k site labels) plus the
    physical case n = 0, k = 1, where the value is the average purity.
    """
    if n < 0:
        raise ValueError("spectator count must be a nonnegative integer")
    split = ReplicaSplit(n=n, k=k)
    if geometry is None:
        geometry = Geometry(l_a=l_a, l_b=l_b)
    if (geometry.l_a, geometry.l_b) != (l_a, l_b):
        raise ValueError("geometry disagrees with l_a/l_b")
    lattice = _PermLattice(split.m, q, geometry.length, budget=budget)
    lattice.run_steps(t, geometry.boundary)
    return lattice.contract_top(_fp_site_vectors(lattice.group, split, q, geometry))


def contract_purity_moment(
    q: int,
    length: int,
    l_a: int,
    t: int,
    k: int = 1,
    boundary: str = "obc",
    budget: int = DEFAULT_CONFIG_BUDGET,
) -> float:
    """Exact circuit-averaged k-th purity moment via the transposition boundary.

    Region A reads out the product of k disjoint pair swaps in S_2k; region B
    reads out the identity.  m = 2k site labels.
    """
    if k < 1:
        raise ValueError("moment order must be >= 1")
    geometry = Geometry(l_a=l_a, l_b=length - l_a, boundary=boundary)
    lattice = _PermLattice(2 * k, q, length, budget=budget)
    lattice.run_steps(t, boundary)
    swaps = adjacent_pair_product(k)
    a_vec = np.array([float(q ** cycle_count(compose(swaps, g.inverse()))) for g in lattice.group])
    b_vec = np.array([float(q ** cycle_count(g)) for g in lattice.group])
    a_sites = set(geometry.a_sites)
    vectors = [a_vec if j in a_sites else b_vec for j in range(length)]
    return lattice.contract_top(vectors)
