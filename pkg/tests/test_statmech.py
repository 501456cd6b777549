import math

import numpy as np
import pytest

from brickpe import theory
from brickpe.engine import GateSeeder, Geometry, evolve_brick_wall, product_state, reduced_purity
from brickpe.perms import enumerate_group
from brickpe.statmech import (
    ContractionBudgetError,
    _gram_matrix,
    _wg_matrix,
    contract_frame_potential,
    contract_purity_moment,
    gate_superoperator,
    weingarten_table,
)


def defining_relation_residual(m: int, d: float) -> float:
    group = enumerate_group(m)
    table = weingarten_table(m, d)
    wg = _wg_matrix(group, table)
    gram = _gram_matrix(group, d)
    return float(np.abs(wg @ gram - np.eye(len(group))).max())


def test_weingarten_m1():
    table = weingarten_table(1, 9.0)
    assert table.values[(1,)] == pytest.approx(1 / 9)


def test_weingarten_m2_closed_form():
    # inverting [[d^2, d], [d, d^2]] by hand
    for d in (4.0, 9.0, 16.0):
        table = weingarten_table(2, d)
        assert table.values[(1, 1)] == pytest.approx(1 / (d * d - 1), rel=1e-12)
        assert table.values[(2,)] == pytest.approx(-1 / (d * (d * d - 1)), rel=1e-12)


def test_weingarten_m3_closed_form():
    for d in (4.0, 9.0):
        table = weingarten_table(3, d)
        denom = d * (d * d - 1) * (d * d - 4)
        assert table.values[(1, 1, 1)] == pytest.approx((d * d - 2) / denom, rel=1e-12)
        assert table.values[(2, 1)] == pytest.approx(-1 / ((d * d - 1) * (d * d - 4)), rel=1e-12)
        assert table.values[(3,)] == pytest.approx(2 / denom, rel=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("d", [4.0, 9.0, 16.0])
def test_weingarten_defining_relation(m, d):
    assert defining_relation_residual(m, d) <= 1e-10


def test_weingarten_is_class_function():
    table = weingarten_table(3, 4.0)
    group = enumerate_group(3)
    for g in group:
        assert table(g) == table.values[g.cycle_type()]
    assert set(table.values) == {(1, 1, 1), (2, 1), (3,)}


def test_weingarten_rejects_singular_dimension():
    with pytest.raises(ValueError, match="singular"):
        weingarten_table(3, 2.0)
    with pytest.raises(ValueError):
        weingarten_table(7, 100.0)


def test_gate_superoperator_output_span_is_aligned():
    n = 2  # |S_2|
    op = gate_superoperator(2, 2).reshape(n, n, n, n)
    for s1 in range(n):
        for s2 in range(n):
            if s1 != s2:
                assert np.abs(op[s1, s2]).max() == 0.0


def test_gate_superoperator_is_idempotent():
    # averaging twice is averaging once; the coefficient matrix inherits it
    for q in (2, 3):
        op = gate_superoperator(2, q)
        assert np.abs(op @ op - op).max() < 1e-12


def test_gate_superoperator_large_q_limit():
    for q in (64, 1024):
        op = gate_superoperator(2, q).reshape(2, 2, 2, 2)
        for s in range(2):
            assert op[s, s, s, s] == pytest.approx(1.0, rel=1e-10)
            off = max(abs(op[s, s, t1, t2]) for t1 in range(2) for t2 in range(2) if (t1, t2) != (s, s))
            assert off <= 1.0 / q + 1e-12


def test_contract_t0_is_one():
    assert contract_frame_potential(2, 2, 2, 0, 1, 0) == pytest.approx(1.0)
    assert contract_purity_moment(2, 4, 2, 0, k=1) == pytest.approx(1.0)
    assert contract_purity_moment(2, 4, 2, 0, k=2) == pytest.approx(1.0)


def test_contract_single_gate_closed_form():
    # one gate on two sites: average purity of a two-site uniform state
    for q in (2, 3, 5):
        val = contract_frame_potential(q, 1, 1, 1, 1, 0)
        assert val == pytest.approx(2 * q / (q * q + 1), rel=1e-12)


def test_contract_rejects_negative_spectators():
    with pytest.raises(ValueError):
        contract_frame_potential(2, 2, 2, 1, 2, -1)


def test_contract_budget_guard():
    with pytest.raises(ContractionBudgetError, match="configurations"):
        contract_frame_potential(3, 6, 6, 1, 2, 0)  # m=4 on 12 sites: 24^12 configs
    # two overlap replicas at q=2 run into the singular-Gram precondition instead
    with pytest.raises(ValueError, match="singular"):
        contract_frame_potential(2, 3, 3, 1, 3, 0)


def test_purity_boundary_equals_fp_boundary_at_m2():
    # for a single overlap replica the two top boundaries coincide element-wise
    for q, length, l_a, t in [(2, 5, 2, 2), (3, 4, 2, 1), (2, 6, 3, 3)]:
        fp = contract_frame_potential(q, l_a, length - l_a, t, 1, 0)
        pm = contract_purity_moment(q, length, l_a, t, k=1)
        assert pm == pytest.approx(fp, rel=1e-12)


def test_presaturation_slope_matches_known_decay():
    # even-sized edge region at q=2: exact geometric decay per step
    for t in (1, 2, 3):
        val = contract_frame_potential(2, 6, 6, t, 1, 0)
        assert val == pytest.approx(0.64**t, rel=1e-10)


def test_large_q_degeneration():
    # walk branch (the step-count factor 4^(kt) is part of the target)
    walk = contract_frame_potential(64, 4, 8, 1, 1, 0)
    assert walk == pytest.approx(theory.large_q_frame_potential(64, 4, 1, 1), rel=0.05)
    # pinned branch: bare q^(-min(2t, L_A))
    sat = contract_frame_potential(64, 2, 4, 2, 1, 0)
    assert sat == pytest.approx(64.0 ** -min(2 * 2, 2), rel=0.05)


def test_fp_purity_relation_at_large_q():
    # one spectator pair costs q^(2 L_B) relative to the bare purity, to
    # leading order at large q
    f11 = contract_frame_potential(64, 2, 2, 1, 1, 1)
    p = contract_frame_potential(64, 2, 2, 1, 1, 0)
    assert f11 * 64.0**4 == pytest.approx(p, rel=0.1)


def mc_purity_moments(q, length, l_a, t, n_real, seed, k_max=2):
    geo = Geometry(l_a=l_a, l_b=length - l_a)
    vals = np.empty(n_real)
    for r in range(n_real):
        st = product_state(length, q)
        evolve_brick_wall(st, t, geo, GateSeeder(seed, r))
        vals[r] = reduced_purity(st, geo)
    return vals


@pytest.mark.parametrize("length,l_a,t", [(4, 2, 1), (6, 3, 1), (6, 3, 2)])
def test_contract_matches_monte_carlo(length, l_a, t):
    vals = mc_purity_moments(2, length, l_a, t, n_real=2000, seed=1000 + 10 * length + t)
    sem = vals.std(ddof=1) / math.sqrt(len(vals))
    exact = contract_frame_potential(2, l_a, length - l_a, t, 1, 0)
    assert abs(vals.mean() - exact) < 3 * sem


def test_purity_second_moment_matches_monte_carlo():
    vals = mc_purity_moments(2, 4, 2, 1, n_real=3000, seed=321) ** 2
    sem = vals.std(ddof=1) / math.sqrt(len(vals))
    exact = contract_purity_moment(2, 4, 2, 1, k=2)
    assert abs(vals.mean() - exact) < 3 * sem


def test_contract_pbc_geometry():
    geo = Geometry(l_a=2, l_b=2, boundary="pbc")
    exact = contract_frame_potential(2, 2, 2, 1, 1, 0, geometry=geo)
    vals = []
    for r in range(2000):
        st = product_state(4, 2)
        evolve_brick_wall(st, 1, geo, GateSeeder(55, r))
        vals.append(reduced_purity(st, geo))
    vals = np.array(vals)
    sem = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - exact) < 3 * sem
