"""Closed-form Haar-ensemble baselines and a Haar state sampler.

The frame potential of the uniform ensemble of pure states on an N-dimensional
Hilbert space, the exact finite-size frame potential of the projected ensemble
built from a globally Haar-random state, and the ascending factorials they are
made of.  Small arguments are evaluated in exact integer/rational arithmetic;
log-domain forms are provided for sweep edges where doubles overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EXACT_FACTORIAL_CAP = 20


@dataclass(frozen=True)
class HaarParams:
    """Parameter bundle for the projected-ensemble baselines."""

    q: int
    l_a: int
    l_b: int
    k: int
    n: int = 0

    def __post_init__(self) -> None:
        if self.q < 2 or self.l_a < 1 or self.l_b < 0 or self.k < 1:
            raise ValueError(f"invalid Haar baseline parameters {self}")
        if self.n < 0:
            raise ValueError("spectator count must be nonnegative")


def ascending_factorial(x: float, m: int) -> float:
    """x (x+1) ... (x+m-1); the empty product (m=0) is 1."""
    if m < 0:
        raise ValueError("length must be nonnegative")
    out = 1.0
    for j in range(m):
        out *= x + j
    return out


def ascending_factorial_exact(x: int, m: int) -> int:
    if m < 0:
        raise ValueError("length must be nonnegative")
    out = 1
    for j in range(m):
        out *= x + j
    return out


def log_ascending_factorial(x: float, m: int) -> float:
    """log of the ascending factorial via log-gamma; safe far past double range."""
    if m < 0:
        raise ValueError("length must be nonnegative")
    if m == 0:
        return 0.0
    if x <= 0:
        raise ValueError("log form needs x > 0")
    return math.lgamma(x + m) - math.lgamma(x)


def factorial(k: int) -> float:
    """k! exact up to 20, then via exp(lgamma) to avoid silent integer blowup in float paths."""
    if k <= EXACT_FACTORIAL_CAP:
        return float(math.factorial(k))
    return math.exp(math.lgamma(k + 1))


def haar_frame_potential_exact(n_a: int, k: int) -> Fraction:
    """Frame potential of the uniform state ensemble: k! / (N (N+1)...(N+k-1))."""
    if n_a < 1 or k < 1:
        raise ValueError("need N >= 1 and k >= 1")
    return Fraction(1, math.comb(n_a + k - 1, k))


def haar_frame_potential(n_a: int, k: int) -> float:
    return float(haar_frame_potential_exact(n_a, k))


def log_haar_frame_potential(n_a: float, k: int) -> float:
    return math.lgamma(k + 1) - log_ascending_factorial(n_a, k)


def haar_state_projected_fp(params: HaarParams) -> float:
    """Frame potential of the projected ensemble of a Haar-random global state.

    Exact at finite region sizes:

        F(k) = [ q^LB N (N+1)  +  (q^2LB - q^LB) k! N^2 / asc(N, k) ]
               / ( q^L (q^L + 1) ),          N = q^LA,  L = LA + LB.

    Tends to k!/asc(N, k) as the measured region grows.
    """
    q, l_a, l_b, k = params.q, params.l_a, params.l_b, params.k
    n_a = q**l_a
    q_lb = q**l_b
    q_l = n_a * q_lb
    asc_k = ascending_factorial_exact(n_a, k)
    num = Fraction(q_lb * n_a * (n_a + 1)) + Fraction(
        (q_lb * q_lb - q_lb) * math.factorial(k) * n_a * n_a, asc_k
    )
    return float(num / (q_l * (q_l + 1)))


def haar_state_projected_fp_pre_limit(params: HaarParams) -> float:
    """Spectator-resolved form at integer n >= 0, before the replica limit.

    F(n,k) = [ q^LB asc(N, 2n+2k) + (q^2LB - q^LB) k! asc(N, n+k)^2 / asc(N, k) ]
             / asc(q^L, 2n+2k).
    """
    q, l_a, l_b, k, n = params.q, params.l_a, params.l_b, params.k, params.n
    n_a = q**l_a
    q_lb = q**l_b
    q_l = n_a * q_lb
    m = 2 * n + 2 * k
    num = Fraction(q_lb * ascending_factorial_exact(n_a, m)) + Fraction(
        (q_lb * q_lb - q_lb)
        * math.factorial(k)
        * ascending_factorial_exact(n_a, n + k) ** 2,
        ascending_factorial_exact(n_a, k),
    )
    return float(num / ascending_factorial_exact(q_l, m))


def sample_haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random unit vector: normalized standard complex Gaussian."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)
