import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import unitary_group

from oracles import product_of_factors, tbs
from photomac.mesh import (ClementsProgram, MeshLossModel, TbsNode, clements_decompose,
                           clements_reconstruct, haar_unitary, imbalance_corrected_theta, propagate,
                           svd_program, tbs_transfer)

angles = st.floats(min_value=-20, max_value=20, allow_nan=False)


@pytest.mark.parametrize("theta,phi,expected", [
    (0.0, 0.0, [[0, 1], [1, 0]]),
    (math.pi, 0.0, [[1, 0], [0, 1]]),
    (math.pi / 2, 0.0, [[0.5, 0.5], [0.5, 0.5]]),
])
def test_tbs_power_split(theta, phi, expected):
    assert np.allclose(np.abs(tbs_transfer(theta, phi)) ** 2, expected, atol=1e-15)


@given(angles, angles)
def test_tbs_unitary_and_matches_oracle(theta, phi):
    T = tbs_transfer(theta, phi)
    assert np.linalg.norm(T.conj().T @ T - np.eye(2)) < 1e-12
    assert np.allclose(T, tbs(theta, phi), atol=1e-14)


def test_tbs_unitary_dense_sample(rng):
    th, ph = rng.uniform(0, 2 * np.pi, (2, 10_000))
    worst = max(np.linalg.norm(tbs_transfer(a, b).conj().T @ tbs_transfer(a, b) - np.eye(2))
                for a, b in zip(th, ph))
    assert worst < 1e-12


def test_trivial_programs():
    p = clements_decompose(np.eye(1))
    assert p.nodes == [] and p.output_phases == [0.0]
    assert np.allclose(clements_reconstruct(ClementsProgram(1, [], [0.0])), [[1.0]])
    p2 = clements_decompose(np.eye(2))
    assert len(p2.nodes) == 1
    assert np.allclose(np.abs(tbs_transfer(p2.nodes[0].theta, p2.nodes[0].phi)) ** 2, np.eye(2))
    assert np.allclose(clements_reconstruct(p2), np.eye(2), atol=1e-12)


def test_single_node_program_is_tbs_times_diagonal():
    prog = ClementsProgram(2, [TbsNode(0, math.pi / 2, 0.0)], [0.3, -0.2])
    expected = np.diag(np.exp(1j * np.array([0.3, -0.2]))) @ tbs_transfer(math.pi / 2, 0.0)
    assert np.allclose(clements_reconstruct(prog), expected)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 16, 32])
def test_decompose_roundtrip_against_factor_oracle(n):
    U = unitary_group.rvs(n, random_state=n)
    prog = clements_decompose(U)
    assert len(prog.nodes) == n * (n - 1) // 2
    assert prog.depth == n
    oracle = product_of_factors(n, [(nd.m, nd.theta, nd.phi) for nd in prog.nodes], prog.output_phases)
    assert np.linalg.norm(oracle - U) < 1e-9
    assert np.linalg.norm(clements_reconstruct(prog) - U) < 1e-9


def test_phases_are_canonical(rng):
    prog = clements_decompose(haar_unitary(6, rng))
    for nd in prog.nodes:
        assert 0 <= nd.theta < 2 * math.pi and 0 <= nd.phi < 2 * math.pi and nd.n == nd.m + 1
    assert all(0 <= p < 2 * math.pi for p in prog.output_phases)


def test_rectangular_layout(rng):
    prog = clements_decompose(haar_unitary(8, rng))
    cols = prog.columns()
    for nd, c in zip(prog.nodes, cols):
        assert c % 2 == nd.m % 2
    per_col = np.bincount(cols)
    assert list(per_col) == [4, 3] * 4


@pytest.mark.parametrize("bad", [np.ones((2, 2)), np.eye(3)[:2], np.zeros((0, 3))])
def test_decompose_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        clements_decompose(bad)


def test_reconstruction_is_unitary(rng):
    prog = ClementsProgram(4, [TbsNode(m % 3, *rng.uniform(0, 6, 2)) for m in range(6)], list(rng.uniform(0, 6, 4)))
    U = clements_reconstruct(prog)
    assert np.linalg.norm(U.conj().T @ U - np.eye(4)) < 1e-10


def test_json_roundtrip(rng):
    prog = clements_decompose(haar_unitary(5, rng))
    again = ClementsProgram.from_json(prog.to_json())
    assert np.linalg.norm(clements_reconstruct(again) - clements_reconstruct(prog)) < 1e-12
    with pytest.raises(ValueError):
        ClementsProgram.from_json('{"N": 3, "nodes": [], "output_phases": [0]}')


def test_svd_identity_and_diagonal():
    s = svd_program(np.eye(3))
    assert np.allclose(s.gains, 1.0) and s.scale == 1.0
    assert np.allclose(clements_reconstruct(s.left) @ clements_reconstruct(s.right), np.eye(3))
    d = svd_program(np.diag([0.5, 0.25]))
    assert np.allclose(d.gains, [0.5, 0.25])
    assert np.allclose(np.abs(clements_reconstruct(d.left) @ clements_reconstruct(d.right)), np.eye(2))
    assert np.allclose(d.matrix(), np.diag([0.5, 0.25]))


def test_svd_random_real_matrix(rng):
    W = rng.standard_normal((4, 4))
    W *= 0.9 / np.linalg.norm(W, 2)
    s = svd_program(W)
    assert s.scale == 1.0
    # oracle: dense SVD then remultiplication
    U, sv, Vh = np.linalg.svd(W)
    assert np.allclose(s.gains, sv, atol=1e-10)
    assert np.linalg.norm(s.matrix() - W) < 1e-8
    assert np.all((s.gains >= 0) & (s.gains <= 1))


def test_svd_rescaling(rng):
    W = 3.0 * rng.standard_normal((5, 5))
    s = svd_program(W)
    assert s.scale == pytest.approx(np.linalg.norm(W, 2))
    assert s.gains.max() == pytest.approx(1.0)
    assert np.linalg.norm(s.matrix() - W) < 1e-8 * s.scale
    with pytest.raises(ValueError):
        svd_program(W, allow_rescale=False)
    with pytest.raises(ValueError):
        svd_program(np.full((2, 2), np.nan))


@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2 ** 31))
def test_svd_singular_values_match_dense(n, seed):
    W = np.random.default_rng(seed).standard_normal((n, n))
    s = svd_program(W)
    assert np.allclose(s.gains * s.scale, np.linalg.svd(W, compute_uv=False), rtol=1e-10, atol=1e-12)


def test_propagate_identity_program():
    prog = clements_decompose(np.eye(4))
    out = propagate(prog, MeshLossModel(), [math.sqrt(1e-3), 0, 0, 0])
    assert np.allclose(out, [1e-3, 0, 0, 0], atol=1e-15)


def test_propagate_dimension_check():
    prog = clements_decompose(np.eye(3))
    with pytest.raises(ValueError):
        propagate(prog, MeshLossModel(), [1, 0])


@given(st.integers(min_value=2, max_value=10), st.integers(min_value=0, max_value=2 ** 31))
def test_lossless_propagation_conserves_power(n, seed):
    g = np.random.default_rng(seed)
    prog = clements_decompose(haar_unitary(n, g))
    x = g.standard_normal(n) + 1j * g.standard_normal(n)
    out = propagate(prog, MeshLossModel(), x)
    assert out.sum() == pytest.approx(np.sum(np.abs(x) ** 2), rel=1e-12)
    assert np.allclose(out, np.abs(clements_reconstruct(prog) @ x) ** 2, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("n", [2, 8, 16])
def test_uniform_loss_is_depth_times_node_loss(n, rng):
    prog = clements_decompose(haar_unitary(n, rng))
    x = np.ones(n, dtype=complex)
    x[0] = 0  # all inputs except the uppermost
    ref = propagate(prog, MeshLossModel(), x)
    lossy = propagate(prog, MeshLossModel(ps_loss=0.06, dc_loss=0.04), x)
    mask = ref > 1e-9 * ref.max()
    att = 10 * np.log10(ref[mask] / lossy[mask])
    assert np.allclose(att, n * 0.1, atol=1e-9)


def test_diagonal_route_depth_eight():
    # 8x8 identity realized as all-bar nodes: port 1 crosses every column
    prog = clements_decompose(np.eye(8))
    x = np.zeros(8)
    x[0] = 1.0
    out = propagate(prog, MeshLossModel(ps_loss=0.1), x)
    assert 10 * np.log10(1.0 / out[0]) == pytest.approx(0.8, abs=1e-12)


def test_balanced_arms_reduce_to_ideal_node(rng):
    prog = clements_decompose(haar_unitary(4, rng))
    x = rng.standard_normal(4) + 0j
    a = propagate(prog, MeshLossModel(), x)
    b = propagate(prog, MeshLossModel(arm_imbalance=(1.0, 1.0)), x)
    assert np.allclose(a, b, atol=1e-14)


def test_arm_imbalance_loses_power(rng):
    prog = clements_decompose(haar_unitary(4, rng))
    x = rng.standard_normal(4) + 0j
    out = propagate(prog, MeshLossModel(arm_imbalance=(1.0, 0.8)), x)
    assert out.sum() < np.sum(np.abs(x) ** 2)
    with pytest.raises(ValueError):
        MeshLossModel(arm_imbalance=(1.0, 0.0))
    with pytest.raises(ValueError):
        MeshLossModel(ps_loss=-0.1)


def _cross(a1, a2, theta):
    return a1 + a2 + 2 * math.sqrt(a1 * a2) * math.cos(theta)


@given(st.floats(min_value=0, max_value=2 * math.pi), st.floats(min_value=0.05, max_value=1.0))
def test_imbalance_equal_arms_identity(theta1, alpha):
    assert math.cos(imbalance_corrected_theta(alpha, alpha, theta1)) == pytest.approx(math.cos(theta1), abs=1e-12)


def test_imbalance_examples():
    th = imbalance_corrected_theta(1.0, 0.9, math.pi / 2)
    assert th == pytest.approx(math.acos(0.1 / (2 * math.sqrt(0.9))), abs=1e-12)
    assert th == pytest.approx(1.518, abs=1e-3)
    # the corrected node reproduces the equal-loss cross-state intensity
    assert _cross(1.0, 0.9, th) == pytest.approx(1.0 * (2 + 2 * math.cos(math.pi / 2)), abs=1e-12)
    with pytest.raises(ValueError):
        imbalance_corrected_theta(1.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        imbalance_corrected_theta(0.5, 1.0, 0.0)


@given(st.floats(min_value=0.5, max_value=1.0), st.floats(min_value=0.5, max_value=1.0),
       st.floats(min_value=1.7, max_value=math.pi))
def test_imbalance_identity_property(x, y, theta1):
    a1, a2 = max(x, y), min(x, y)
    try:
        th = imbalance_corrected_theta(a1, a2, theta1)
    except ValueError:
        return
    assert _cross(a1, a2, th) == pytest.approx(a1 * (2 + 2 * math.cos(theta1)), abs=1e-9)
