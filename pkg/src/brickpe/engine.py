"""Exact statevector simulation of the brick-wall random circuit.

A chain of L q-dit sites evolves under alternating layers of independent
Haar-random two-site gates.  Amplitudes are stored dense and contiguous with
the base-q digit convention: site 0 is the most significant digit of the
amplitude index, so a two-site gate becomes a blocked matrix-panel multiply.

Layer convention (the staggering is a pure relabeling, fixed here once):
within each time step the first layer acts on pairs (0,1), (2,3), ...; the
second layer acts on (1,2), (3,4), ... and, on a periodic ring, additionally
on the wrap pair (L-1, 0).  One time step means both layers.

Gate randomness is derived counter-style from (master seed, realization,
step, layer, site), so results are bit-identical under any worker schedule.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

# Desk-scale default: 2**26 amplitudes (1 GiB of complex128) unless overridden.
DEFAULT_AMP_BUDGET = 2**26

_DUMP_MAGIC = b"BPSV"
_DUMP_VERSION = 1


class MemoryBudgetError(MemoryError):
    """State would exceed the configured amplitude budget."""


@dataclass(frozen=True)
class Geometry:
    """Chain split into a small region A and its measured complement B.

    boundary:  "obc" for an open chain, "pbc" for a ring (needs even L so the
               brick layers tile).
    placement: "edge" puts A at the left end; "bulk" centers it, with the
               extra B site on the right when L_B is odd.
    """

    l_a: int
    l_b: int
    boundary: str = "obc"
    placement: str = "edge"

    def __post_init__(self) -> None:
        if self.l_a < 1 or self.l_b < 0:
            raise ValueError("need l_a >= 1 and l_b >= 0")
        if self.boundary not in ("obc", "pbc"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.placement not in ("edge", "bulk"):
            raise ValueError(f"unknown placement {self.placement!r}")
        if self.boundary == "pbc" and self.length % 2 != 0:
            raise ValueError("periodic brick layers need an even number of sites")

    @property
    def length(self) -> int:
        return self.l_a + self.l_b

    @property
    def a_start(self) -> int:
        if self.placement == "edge":
            return 0
        return self.l_b // 2

    @property
    def a_sites(self) -> range:
        return range(self.a_start, self.a_start + self.l_a)

    def b_components(self) -> tuple[range, range]:
        """(left, right) runs of B sites; left is empty for edge placement."""
        return range(0, self.a_start), range(self.a_start + self.l_a, self.length)


@dataclass
class Statevector:
    """Dense pure state of L q-dit sites; index digits run site 0 first."""

    amps: np.ndarray
    q: int
    length: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "Statevector":
        return Statevector(self.amps.copy(), self.q, self.length)


def product_state(length: int, q: int, budget: int = DEFAULT_AMP_BUDGET) -> Statevector:
    """|0...0>: all amplitude mass on index 0."""
    if length < 1 or q < 2:
        raise ValueError("need length >= 1 and q >= 2")
    dim = q**length
    if dim > budget:
        need = dim * np.dtype(np.complex128).itemsize
        raise MemoryBudgetError(
            f"q**L = {dim} amplitudes ({need / 2**30:.2f} GiB complex128) exceeds "
            f"budget {budget}; raise the budget explicitly to proceed"
        )
    amps = np.zeros(dim, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(amps, q, length)


def sample_haar_gate(q: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed q^2 x q^2 unitary.

    QR of a complex Ginibre matrix alone is not Haar (the R factor's phases
    leak into Q); multiplying by the phases of diag(R) fixes the distribution.
    """
    d = q * q
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    qmat, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return qmat * (diag / np.abs(diag))


@dataclass(frozen=True)
class GateSpec:
    """One applied gate: position, layer tag, step, seed key, optional matrix."""

    site: int
    layer: int
    step: int
    seed_key: tuple[int, ...]
    matrix: np.ndarray | None = None


@dataclass(frozen=True)
class GateSeeder:
    """Counter-based derivation of per-gate RNG streams.

    Every gate's stream is SeedSequence(master_seed, spawn_key=(realization,
    step, layer, site)), so the stream depends only on the gate's coordinates,
    never on execution order.
    """

    master_seed: int
    realization: int = 0

    def gate_key(self, step: int, layer: int, site: int) -> tuple[int, ...]:
        return (self.realization, step, layer, site)

    def gate_rng(self, step: int, layer: int, site: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.gate_key(step, layer, site))
        return np.random.Generator(np.random.PCG64(seq))


def brick_layers(length: int, boundary: str) -> list[tuple[int, list[tuple[int, bool]]]]:
    """Gate positions [(layer_tag, [(left site, wraps), ...]), ...] for one step."""
    first = [(j, False) for j in range(0, length - 1, 2)]
    second = [(j, False) for j in range(1, length - 1, 2)]
    if boundary == "pbc":
        second.append((length - 1, True))
    elif boundary != "obc":
        raise ValueError(f"unknown boundary {boundary!r}")
    return [(1, first), (0, second)]


def apply_two_site_gate(state: Statevector, gate: np.ndarray, j: int, wrap: bool = False) -> Statevector:
    """Apply a q^2 x q^2 gate to sites (j, j+1), or (L-1, 0) when wrap is set.

    Mutates the amplitudes in place and returns the same object.  The gate's
    row/column index is a_left * q + a_right with the left site of the pair
    more significant.
    """
    q, length = state.q, state.length
    d = q * q
    if gate.shape != (d, d):
        raise ValueError(f"gate must be {d}x{d} for q={q}")
    if wrap:
        if j != length - 1:
            raise ValueError("wrap pair must start at the last site")
        if length < 2:
            raise ValueError("wrap needs at least two sites")
        # Bring (site L-1, site 0) to the front: axes (a_last, a_0, middle).
        view = state.amps.reshape(q, q ** (length - 2), q)
        work = view.transpose(2, 0, 1).reshape(d, -1)
        work = gate @ work
        state.amps = np.ascontiguousarray(
            work.reshape(q, q, q ** (length - 2)).transpose(1, 2, 0)
        ).reshape(-1)
        return state
    if not 0 <= j < length - 1:
        raise ValueError(f"site index {j} out of range for open pair on L={length}")
    left = q**j
    right = q ** (length - j - 2)
    view = state.amps.reshape(left, d, right)
    work = view.transpose(1, 0, 2).reshape(d, -1)
    work = gate @ work
    state.amps = np.ascontiguousarray(work.reshape(d, left, right).transpose(1, 0, 2)).reshape(-1)
    return state


def evolve_brick_wall(
    state: Statevector,
    t: int,
    geometry: Geometry,
    seeder: GateSeeder,
    start_step: int = 0,
    log: list[GateSpec] | None = None,
    keep_matrices: bool = False,
) -> tuple[Statevector, list[GateSpec]]:
    """Apply t time steps (two brick layers each) of fresh Haar gates.

    start_step offsets the step counter so evolution can be resumed
    incrementally while drawing the same gates a single long run would.
    """
    if t < 0:
        raise ValueError("step count must be nonnegative")
    if geometry.length != state.length:
        raise ValueError("geometry does not match the state")
    if log is None:
        log = []
    layers = brick_layers(state.length, geometry.boundary)
    for step in range(start_step, start_step + t):
        for layer_tag, pairs in layers:
            for j, wraps in pairs:
                gate = sample_haar_gate(state.q, seeder.gate_rng(step, layer_tag, j))
                apply_two_site_gate(state, gate, j, wrap=wraps)
                log.append(
                    GateSpec(
                        site=j,
                        layer=layer_tag,
                        step=step,
                        seed_key=seeder.gate_key(step, layer_tag, j),
                        matrix=gate if keep_matrices else None,
                    )
                )
    return state, log


def split_matrix(state: Statevector, geometry: Geometry) -> np.ndarray:
    """Amplitudes reshaped to (q^L_A, q^L_B) per the geometry.

    Row index runs over region-A digits; column index over B digits with the
    left B component (bulk placement) more significant than the right one.
    """
    if geometry.length != state.length:
        raise ValueError("geometry does not match the state")
    q = state.q
    if geometry.l_b == 0:
        return state.amps.reshape(-1, 1)
    left, right = geometry.b_components()
    n_left, n_right = q ** len(left), q ** len(right)
    n_a = q**geometry.l_a
    if len(left) == 0:
        return state.amps.reshape(n_a, n_right)
    # (left B, A, right B) -> (A, left B, right B)
    cube = state.amps.reshape(n_left, n_a, n_right)
    return cube.transpose(1, 0, 2).reshape(n_a, n_left * n_right)


def reduced_purity(state: Statevector, geometry: Geometry) -> float:
    """Tr[rho_A^2] from the split amplitude matrix; contracts the smaller side."""
    mat = split_matrix(state, geometry)
    if mat.shape[0] <= mat.shape[1]:
        small = mat @ mat.conj().T
    else:
        small = mat.conj().T @ mat
    return float(np.sum(np.abs(small) ** 2))


def dump_statevector(path, state: Statevector, seed: int = 0) -> None:
    """Debug dump: magic, version, q, L, seed, then little-endian re/im doubles."""
    header = _DUMP_MAGIC + struct.pack("<IIIQ", _DUMP_VERSION, state.q, state.length, seed)
    interleaved = np.empty(2 * state.amps.size, dtype="<f8")
    interleaved[0::2] = state.amps.real
    interleaved[1::2] = state.amps.imag
    with open(path, "wb") as fh:
        fh.write(header)
        interleaved.tofile(fh)


def load_statevector(path) -> tuple[Statevector, int]:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _DUMP_MAGIC:
            raise ValueError(f"not a statevector dump (magic {magic!r})")
        version, q, length, seed = struct.unpack("<IIIQ", fh.read(20))
        if version != _DUMP_VERSION:
            raise ValueError(f"unsupported dump version {version}")
        interleaved = np.fromfile(fh, dtype="<f8")
    if interleaved.size != 2 * q**length:
        raise ValueError("dump truncated")
    amps = interleaved[0::2] + 1j * interleaved[1::2]
    return Statevector(amps.astype(np.complex128), q, length), seed
