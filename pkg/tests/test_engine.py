import math

import numpy as np
import pytest

from brickpe.engine import (
    GateSeeder,
    Geometry,
    MemoryBudgetError,
    Statevector,
    apply_two_site_gate,
    brick_layers,
    dump_statevector,
    evolve_brick_wall,
    load_statevector,
    product_state,
    reduced_purity,
    sample_haar_gate,
)

RNG = np.random.default_rng(4096)


def bell_pair() -> Statevector:
    amps = np.zeros(4, dtype=np.complex128)
    amps[0] = amps[3] = 1 / np.sqrt(2)
    return Statevector(amps, q=2, length=2)


def test_product_state():
    st = product_state(1, 2)
    assert np.array_equal(st.amps, [1, 0])
    st = product_state(2, 3)
    assert st.amps.shape == (9,)
    assert st.amps[0] == 1 and abs(st.amps[1:]).max() == 0
    for length, q in [(3, 2), (2, 5), (6, 2)]:
        assert np.isclose(product_state(length, q).norm(), 1.0)


def test_product_state_budget():
    with pytest.raises(MemoryBudgetError, match="GiB"):
        product_state(40, 2)
    # explicit override admits the next size up
    st = product_state(10, 2, budget=2**10)
    assert st.amps.size == 1024


def test_geometry_validation():
    with pytest.raises(ValueError):
        Geometry(l_a=2, l_b=3, boundary="pbc")  # odd ring cannot tile
    with pytest.raises(ValueError):
        Geometry(l_a=0, l_b=3)
    geo = Geometry(l_a=2, l_b=5, placement="bulk")
    assert list(geo.a_sites) == [2, 3]
    left, right = geo.b_components()
    assert list(left) == [0, 1] and list(right) == [4, 5, 6]  # odd bath: extra site right


def test_haar_gate_unitarity():
    for q in (2, 3):
        u = sample_haar_gate(q, RNG)
        d = q * q
        defect = np.abs(u.conj().T @ u - np.eye(d)).max()
        assert defect < 1e-12


def test_haar_gate_first_entry_moment():
    # E|U_00|^2 = 1/d for a Haar unitary of dimension d = q^2
    rng = np.random.default_rng(7)
    n = 100_000
    vals = np.empty(n)
    for i in range(n):
        vals[i] = abs(sample_haar_gate(2, rng)[0, 0]) ** 2
    sem = vals.std(ddof=1) / math.sqrt(n)
    assert abs(vals.mean() - 0.25) < 3 * sem


def test_haar_gate_eigenphase_uniformity():
    # rotation invariance makes the marginal eigenphase density flat;
    # one phase per gate keeps the sample independent
    from scipy.stats import kstest

    rng = np.random.default_rng(8)
    n = 10_000
    phases = np.empty(n)
    for i in range(n):
        phases[i] = np.angle(np.linalg.eigvals(sample_haar_gate(2, rng))[0])
    stat = kstest((phases + np.pi) / (2 * np.pi), "uniform")
    assert stat.pvalue > 0.01


def test_apply_identity_gate_is_bit_exact():
    st = product_state(4, 2)
    evolve_brick_wall(st, 2, Geometry(l_a=2, l_b=2), GateSeeder(1, 0))
    before = st.amps.copy()
    apply_two_site_gate(st, np.eye(4, dtype=complex), 1)
    assert np.array_equal(st.amps, before)


def test_apply_swap_gate():
    swap = np.zeros((4, 4), dtype=complex)
    swap[0, 0] = swap[3, 3] = 1
    swap[1, 2] = swap[2, 1] = 1
    st = product_state(2, 2)
    st.amps[:] = 0
    st.amps[1] = 1.0  # |01>
    apply_two_site_gate(st, swap, 0)
    assert st.amps[2] == 1.0  # |10>


def test_apply_gate_roundtrip_and_norm():
    for j, wrap in [(0, False), (2, False), (3, True)]:
        st = product_state(4, 2, budget=2**8)
        evolve_brick_wall(st, 1, Geometry(l_a=2, l_b=2, boundary="pbc"), GateSeeder(2, 0))
        before = st.amps.copy()
        u = sample_haar_gate(2, RNG)
        apply_two_site_gate(st, u, j, wrap=wrap)
        assert abs(st.norm() - 1.0) < 1e-12
        apply_two_site_gate(st, u.conj().T, j, wrap=wrap)
        assert np.abs(st.amps - before).max() < 1e-12


def test_apply_gate_rejects_bad_sites():
    st = product_state(4, 2)
    with pytest.raises(ValueError):
        apply_two_site_gate(st, np.eye(4, dtype=complex), 3)  # no right neighbor
    with pytest.raises(ValueError):
        apply_two_site_gate(st, np.eye(4, dtype=complex), 1, wrap=True)
    with pytest.raises(ValueError):
        apply_two_site_gate(st, np.eye(5, dtype=complex), 0)


def test_brick_layers():
    layers = brick_layers(6, "obc")
    assert layers[0] == (1, [(0, False), (2, False), (4, False)])
    assert layers[1] == (0, [(1, False), (3, False)])
    layers = brick_layers(6, "pbc")
    assert layers[1] == (0, [(1, False), (3, False), (5, True)])
    layers = brick_layers(5, "obc")
    assert layers[0][1] == [(0, False), (2, False)]
    assert layers[1][1] == [(1, False), (3, False)]


def test_evolve_t0_and_norm():
    geo = Geometry(l_a=4, l_b=4)
    st = product_state(8, 2)
    before = st.amps.copy()
    evolve_brick_wall(st, 0, geo, GateSeeder(3, 0))
    assert np.array_equal(st.amps, before)
    assert reduced_purity(st, geo) == pytest.approx(1.0)  # product state
    _, log = evolve_brick_wall(st, 10, geo, GateSeeder(3, 0))
    assert abs(st.norm() - 1.0) < 1e-10
    assert len(log) == 10 * 7  # 4 + 3 gates per step


def test_evolution_is_deterministic_and_seed_sensitive():
    geo = Geometry(l_a=2, l_b=3)
    a = product_state(5, 2)
    b = product_state(5, 2)
    c = product_state(5, 2)
    evolve_brick_wall(a, 3, geo, GateSeeder(5, 0))
    evolve_brick_wall(b, 3, geo, GateSeeder(5, 0))
    evolve_brick_wall(c, 3, geo, GateSeeder(5, 1))
    assert np.array_equal(a.amps, b.amps)
    assert not np.allclose(a.amps, c.amps)


def test_incremental_evolution_matches_single_run():
    geo = Geometry(l_a=3, l_b=3)
    a = product_state(6, 2)
    evolve_brick_wall(a, 4, geo, GateSeeder(6, 2))
    b = product_state(6, 2)
    evolve_brick_wall(b, 2, geo, GateSeeder(6, 2))
    evolve_brick_wall(b, 2, geo, GateSeeder(6, 2), start_step=2)
    assert np.array_equal(a.amps, b.amps)


def test_disjoint_gates_commute():
    seeder = GateSeeder(9, 0)
    gates = [(j, sample_haar_gate(2, seeder.gate_rng(0, 1, j))) for j in (0, 2, 4)]
    base = product_state(6, 2)
    base.amps[:] = RNG.standard_normal(64) + 1j * RNG.standard_normal(64)
    base.amps /= base.norm()
    outs = []
    for order in [(0, 1, 2), (2, 0, 1), (1, 2, 0)]:
        st = Statevector(base.amps.copy(), 2, 6)
        for idx in order:
            j, u = gates[idx]
            apply_two_site_gate(st, u, j)
        outs.append(st.amps)
    assert np.abs(outs[0] - outs[1]).max() < 1e-12
    assert np.abs(outs[0] - outs[2]).max() < 1e-12


def test_reduced_purity_examples():
    assert reduced_purity(bell_pair(), Geometry(l_a=1, l_b=1)) == pytest.approx(0.5)
    # degenerate split: all of the chain is region A
    st = product_state(4, 2)
    evolve_brick_wall(st, 2, Geometry(l_a=2, l_b=2), GateSeeder(4, 0))
    assert reduced_purity(st, Geometry(l_a=4, l_b=0)) == pytest.approx(1.0, abs=1e-10)
    assert reduced_purity(st, Geometry(l_a=4, l_b=0, boundary="pbc", placement="bulk")) == pytest.approx(
        1.0, abs=1e-10
    )


def test_purity_against_exact_contraction():
    from brickpe.statmech import contract_frame_potential

    geo = Geometry(l_a=4, l_b=6)
    n_real = 120
    vals = np.empty(n_real)
    for r in range(n_real):
        st = product_state(10, 2)
        evolve_brick_wall(st, 2, geo, GateSeeder(123, r))
        vals[r] = reduced_purity(st, geo)
    sem = vals.std(ddof=1) / math.sqrt(n_real)
    exact = contract_frame_potential(2, 4, 6, 2, k=1, n=0)
    assert abs(vals.mean() - exact) < 3 * sem


def test_dump_roundtrip(tmp_path):
    st = product_state(4, 2)
    evolve_brick_wall(st, 3, Geometry(l_a=2, l_b=2), GateSeeder(11, 0))
    path = tmp_path / "state.bpsv"
    dump_statevector(path, st, seed=11)
    loaded, seed = load_statevector(path)
    assert seed == 11
    assert loaded.q == 2 and loaded.length == 4
    assert np.array_equal(loaded.amps, st.amps)
    with pytest.raises(ValueError, match="magic"):
        path2 = tmp_path / "junk.bin"
        path2.write_bytes(b"nope" + b"\0" * 32)
        load_statevector(path2)
