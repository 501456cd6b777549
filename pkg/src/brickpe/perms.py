"""Exact group algebra on the symmetric group S_m.

Permutations are stored in one-line notation as a tuple ``images`` of length
``m``, 0-indexed: ``images[i]`` is the image of ``i``.  All operations are pure
and the objects are immutable, so everything here is safe to share between
threads or processes.

Besides the generic group operations, this module provides the special
elements and boundary overlaps used by the replica-space calculations:
the full inversion, the cyclic translation, the spectator-padded inversion
``mu_a``, the factorized-permutation indicator, and the partner construction
that pairs each alpha in S_k with the unique alpha' minimizing the
transposition distance to the inversion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

# Exhaustive enumeration is capped here: 8! = 40320 elements is the largest
# group we ever materialize.
ENUMERATION_CAP = 8


class DegreeMismatchError(ValueError):
    """Operands act on symmetric groups of different degree."""


@dataclass(frozen=True)
class Permutation:
    """An element of S_m in one-line notation (0-indexed images)."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        m = len(self.images)
        if m < 1:
            raise ValueError("permutation degree must be >= 1")
        if sorted(self.images) != list(range(m)):
            raise ValueError(f"{self.images!r} is not a bijection on 0..{m - 1}")

    @property
    def m(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"

    def inverse(self) -> "Permutation":
        inv = [0] * self.m
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycle decomposition, fixed points included."""
        seen = [False] * self.m
        out: list[tuple[int, ...]] = []
        for start in range(self.m):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self.images[j]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths, sorted descending; labels a conjugacy class."""
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def is_identity(self) -> bool:
        return all(img == i for i, img in enumerate(self.images))


def identity(m: int) -> Permutation:
    return Permutation(tuple(range(m)))


def inversion(m: int) -> Permutation:
    """Full order reversal i -> m - 1 - i (classically written on even degree)."""
    return Permutation(tuple(m - 1 - i for i in range(m)))


def translation(m: int) -> Permutation:
    """The m-cycle sending 0 to m - 1 and i to i - 1 otherwise."""
    return Permutation((m - 1,) + tuple(range(m - 1)))


def transposition(i: int, j: int, m: int) -> Permutation:
    if i == j:
        raise ValueError("transposition needs two distinct points")
    images = list(range(m))
    images[i], images[j] = images[j], images[i]
    return Permutation(tuple(images))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """(a b)(i) = a(b(i)); b acts first."""
    if a.m != b.m:
        raise DegreeMismatchError(f"cannot compose degrees {a.m} and {b.m}")
    return Permutation(tuple(a.images[b.images[i]] for i in range(a.m)))


def inverse(a: Permutation) -> Permutation:
    return a.inverse()


def cycle_count(s: Permutation) -> int:
    """Number of disjoint cycles of s, fixed points included."""
    return len(s.cycles())


def transposition_distance(a: Permutation, b: Permutation) -> int:
    """Minimal number of transpositions turning b into a.

    Equals m - N_c(a b^-1); a bi-invariant metric on S_m.
    """
    if a.m != b.m:
        raise DegreeMismatchError(f"distance undefined between degrees {a.m} and {b.m}")
    return a.m - cycle_count(compose(a, b.inverse()))


def embed(a: Permutation, b: Permutation) -> Permutation:
    """Block-diagonal element (a, b) of S_{m_a + m_b}."""
    shifted = tuple(img + a.m for img in b.images)
    return Permutation(a.images + shifted)


@dataclass(frozen=True)
class ReplicaSplit:
    """Replica bookkeeping: n spectator copies per side, k overlap copies.

    Boundary constructions live in S_{2(n+k)}; half-space factors in S_{n+k}.
    """

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("need at least one overlap replica (k >= 1)")
        if self.n < 0:
            raise ValueError("spectator count must be nonnegative")

    @property
    def half(self) -> int:
        return self.n + self.k

    @property
    def m(self) -> int:
        return 2 * (self.n + self.k)


def mu_a(split: ReplicaSplit) -> Permutation:
    """Boundary element (1_n, inversion_2k, 1_n) of S_{2n+2k}."""
    core = inversion(2 * split.k)
    if split.n == 0:
        return core
    pad = identity(split.n)
    return embed(embed(pad, core), pad)


def is_factorized(s: Permutation, split: ReplicaSplit) -> bool:
    """True iff s maps the first n+k points onto themselves."""
    if s.m != split.m:
        raise DegreeMismatchError(f"expected degree {split.m}, got {s.m}")
    half = split.half
    return all(s.images[i] < half for i in range(half))


def permutation_overlap(a: Permutation, b: Permutation, q: int) -> int:
    """Exact overlap q ** N_c(a b^-1); symmetric in (a, b)."""
    if a.m != b.m:
        raise DegreeMismatchError(f"overlap undefined between degrees {a.m} and {b.m}")
    if q < 1:
        raise ValueError("local dimension must be >= 1")
    return q ** cycle_count(compose(a, b.inverse()))


def log_permutation_overlap(a: Permutation, b: Permutation, q: int) -> float:
    if a.m != b.m:
        raise DegreeMismatchError(f"overlap undefined between degrees {a.m} and {b.m}")
    return cycle_count(compose(a, b.inverse())) * math.log(q)


def b_boundary_overlap(s: Permutation, split: ReplicaSplit, q: int) -> int:
    """Measurement-boundary weight: q**2 for factorized s, q otherwise."""
    return q * q if is_factorized(s, split) else q


def partner_alpha(alpha: Permutation) -> Permutation:
    """The unique alpha' with (1_k, alpha') = inv . (alpha^-1, 1_k) . inv.

    Guarantees the block pair (alpha, alpha') sits at transposition distance
    exactly k from the inversion on 2k points, for every alpha in S_k.
    """
    k = alpha.m
    inv2k = inversion(2 * k)
    g = compose(inv2k, compose(embed(alpha.inverse(), identity(k)), inv2k))
    assert all(g.images[i] == i for i in range(k)), "partner construction lost the identity block"
    return Permutation(tuple(g.images[k + i] - k for i in range(k)))


def enumerate_group(m: int) -> list[Permutation]:
    """All of S_m in lexicographic one-line order; capped at m <= 8."""
    if m < 1:
        raise ValueError("degree must be >= 1")
    if m > ENUMERATION_CAP:
        raise ValueError(f"refusing to enumerate S_{m} ({math.factorial(m)} elements); cap is {ENUMERATION_CAP}")
    return [Permutation(p) for p in itertools.permutations(range(m))]


def random_permutation(m: int, rng) -> Permutation:
    images = list(range(m))
    rng.shuffle(images)
    return Permutation(tuple(images))


def iter_pair_transpositions(k: int) -> Iterator[tuple[int, int]]:
    """The pairs (0,1), (2,3), ..., (2k-2, 2k-1)."""
    for j in range(k):
        yield 2 * j, 2 * j + 1


def adjacent_pair_product(k: int) -> Permutation:
    """Product of the k disjoint transpositions (0 1)(2 3)...(2k-2 2k-1) in S_2k."""
    images = []
    for a, b in iter_pair_transpositions(k):
        images.extend([b, a])
    return Permutation(tuple(images))
