"""Rectangular (Clements) MZI meshes.

A node acting on adjacent ports (m, m+1) has the transfer

    T(theta, phi) = i e^{i theta/2} [[e^{i phi} sin(theta/2),  cos(theta/2)],
                                     [e^{i phi} cos(theta/2), -sin(theta/2)]]

and a program realizes ``U = D @ T_K @ ... @ T_1`` where ``nodes[0]`` is the
first node light meets and ``D`` is the diagonal of output phases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * math.pi


def tbs_transfer(theta: float, phi: float) -> np.ndarray:
    s, c = math.sin(theta / 2.0), math.cos(theta / 2.0)
    ep = np.exp(1j * phi)
    return 1j * np.exp(0.5j * theta) * np.array([[ep * s, c], [ep * c, -s]], dtype=complex)


@dataclass(frozen=True)
class TbsNode:
    m: int
    theta: float
    phi: float

    @property
    def n(self) -> int:
        return self.m + 1


@dataclass
class ClementsProgram:
    size: int
    nodes: List[TbsNode] = field(default_factory=list)
    output_phases: List[float] = field(default_factory=list)

    def columns(self) -> List[int]:
        """Column index of each node in the rectangular layout.

        Nodes are placed as early as the ports allow, with pair (m, m+1)
        only in columns of the same parity as m.
        """
        free = [0] * self.size
        cols = []
        for node in self.nodes:
            c = max(free[node.m], free[node.m + 1])
            if c % 2 != node.m % 2:
                c += 1
            cols.append(c)
            free[node.m] = free[node.m + 1] = c + 1
        return cols

    @property
    def depth(self) -> int:
        """Optical depth: number of mesh columns (N for a complete program)."""
        cols = self.columns()
        used = max(cols) + 1 if cols else 0
        return max(used, self.size) if len(self.nodes) == self.size * (self.size - 1) // 2 else used

    def to_json(self) -> str:
        return json.dumps({
            "N": self.size,
            "nodes": [{"m": nd.m, "theta": nd.theta, "phi": nd.phi} for nd in self.nodes],
            "output_phases": list(self.output_phases),
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ClementsProgram":
        doc = json.loads(text)
        size = int(doc["N"])
        nodes = [TbsNode(int(nd["m"]), float(nd["theta"]), float(nd["phi"])) for nd in doc["nodes"]]
        phases = [float(p) for p in doc["output_phases"]]
        if len(phases) != size:
            raise ValueError(f"expected {size} output phases, got {len(phases)}")
        if any(not 0 <= nd.m < size - 1 for nd in nodes):
            raise ValueError("node port index out of range")
        return cls(size, nodes, phases)


def _check_unitary(U: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    err = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]))
    if err > tol:
        raise ValueError(f"matrix is not unitary (||U^H U - I||_F = {err:.3g})")
    return U


def _null_right(a: complex, b: complex) -> Tuple[float, float]:
    """(theta, phi) so that [a, b] @ T^H has a zero in its first slot."""
    theta = 2.0 * math.atan2(abs(b), abs(a))
    phi = (np.angle(a) - np.angle(b) + math.pi) if abs(b) > 0 and abs(a) > 0 else 0.0
    return theta, phi % TWO_PI


def _null_left(a: complex, b: complex) -> Tuple[float, float]:
    """(theta, phi) so that T @ [a, b]^T has a zero in its second slot."""
    theta = 2.0 * math.atan2(abs(a), abs(b))
    phi = (np.angle(b) - np.angle(a)) if abs(b) > 0 and abs(a) > 0 else 0.0
    return theta, phi % TWO_PI


def clements_decompose(U) -> ClementsProgram:
    U = _check_unitary(U).copy()
    N = U.shape[0]
    right, left = [], []
    for i in range(N - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                r, m = N - 1 - j, i - j
                theta, phi = _null_right(U[r, m], U[r, m + 1])
                T = tbs_transfer(theta, phi)
                U[:, m:m + 2] = U[:, m:m + 2] @ T.conj().T
                right.append(TbsNode(m, theta, phi))
        else:
            for j in range(i + 1):
                r, col = N - 1 - i + j, j
                m = r - 1
                theta, phi = _null_left(U[m, col], U[r, col])
                T = tbs_transfer(theta, phi)
                U[m:m + 2, :] = T @ U[m:m + 2, :]
                left.append(TbsNode(m, theta, phi))

    # U is now diagonal; push each inverse left node through it:
    # T^H(theta, phi) diag(d1, d2) = diag(d1', d2') T(theta, phi')
    d = np.diag(U).copy()
    moved = []
    for node in reversed(left):
        d1, d2 = d[node.m], d[node.m + 1]
        phi_new = float(np.angle(d1 / d2)) % TWO_PI
        d[node.m] = -np.exp(-1j * (node.theta + node.phi)) * d2
        d[node.m + 1] = -np.exp(-1j * node.theta) * d2
        moved.append(TbsNode(node.m, node.theta, phi_new))
    # U = D T'_1 ... T'_k T_Rp ... T_R1, so light meets T_R1 first and T'_1 last
    nodes = right + moved
    phases = [float(np.angle(x)) % TWO_PI for x in d]
    return ClementsProgram(N, nodes, phases)


def embed(node: TbsNode, size: int) -> np.ndarray:
    T = np.eye(size, dtype=complex)
    T[node.m:node.m + 2, node.m:node.m + 2] = tbs_transfer(node.theta, node.phi)
    return T


def clements_reconstruct(program: ClementsProgram) -> np.ndarray:
    N = program.size
    U = np.eye(N, dtype=complex)
    for node in program.nodes:
        U[node.m:node.m + 2, :] = tbs_transfer(node.theta, node.phi) @ U[node.m:node.m + 2, :]
    return np.exp(1j * np.asarray(program.output_phases))[:, None] * U


@dataclass
class SvdProgram:
    """W / scale = left @ diag(gains) @ right, both meshes unitary."""

    right: ClementsProgram  # realizes V^H, met first
    gains: np.ndarray
    left: ClementsProgram  # realizes U
    scale: float = 1.0

    def matrix(self) -> np.ndarray:
        U = clements_reconstruct(self.left)
        Vh = clements_reconstruct(self.right)
        return self.scale * (U * self.gains) @ Vh


def svd_program(W, allow_rescale: bool = True) -> SvdProgram:
    W = np.asarray(W)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise ValueError("matrix has non-finite entries")
    U, s, Vh = np.linalg.svd(W)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    if scale > 1.0 and not allow_rescale:
        raise ValueError(f"spectral norm {s[0]:.6g} > 1 cannot be realized passively")
    return SvdProgram(clements_decompose(Vh), s / scale, clements_decompose(U), scale)


@dataclass(frozen=True)
class MeshLossModel:
    """Per-node losses. ``arm_imbalance`` is (alpha1, alpha2) intensity transmission
    of the two internal arms, applied to every node when given."""

    ps_loss: float = 0.0  # dB per node (both phase shifters lumped)
    dc_loss: float = 0.0  # dB per node (both couplers lumped)
    arm_imbalance: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.ps_loss < 0 or self.dc_loss < 0:
            raise ValueError("mesh losses must be >= 0 dB")
        if self.arm_imbalance is not None and not all(0 < a <= 1 for a in self.arm_imbalance):
            raise ValueError("arm transmissions must lie in (0, 1]")

    @property
    def node_loss_db(self) -> float:
        return self.ps_loss + self.dc_loss


def _lossy_node(node: TbsNode, amp: float, imbalance) -> np.ndarray:
    if imbalance is None:
        return amp * tbs_transfer(node.theta, node.phi)
    a1, a2 = (math.sqrt(a) for a in imbalance)
    bs = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2.0)
    inner = np.diag([a1 * np.exp(1j * node.theta), a2])
    outer = np.diag([np.exp(1j * node.phi), 1.0])
    return amp * bs @ inner @ bs @ outer


def propagate(program: ClementsProgram, loss: MeshLossModel, inputs: Sequence[complex]) -> np.ndarray:
    """Output intensities (|field|^2) after the lossy mesh.

    Every column attenuates all of its ports, including ports that bypass a
    node there, so each path sees exactly ``depth`` node losses.
    """
    x = np.asarray(inputs, dtype=complex).copy()
    N = program.size
    if x.shape != (N,):
        raise ValueError(f"expected {N} input amplitudes, got shape {x.shape}")
    amp = math.sqrt(10.0 ** (-loss.node_loss_db / 10.0))
    cols = program.columns()
    depth = program.depth
    by_col = [[] for _ in range(depth)]
    for node, c in zip(program.nodes, cols):
        by_col[c].append(node)
    for col_nodes in by_col:
        touched = np.zeros(N, dtype=bool)
        for node in col_nodes:
            x[node.m:node.m + 2] = _lossy_node(node, amp, loss.arm_imbalance) @ x[node.m:node.m + 2]
            touched[node.m:node.m + 2] = True
        x[~touched] *= amp
    x = np.exp(1j * np.asarray(program.output_phases)) * x
    return np.abs(x) ** 2


def imbalance_corrected_theta(alpha1: float, alpha2: float, theta1: float) -> float:
    """Internal phase that restores the equal-loss cross-state intensity.

    With arm transmissions alpha1 >= alpha2, the cross port of an unbalanced
    MZI carries I_in [alpha1 + alpha2 + 2 sqrt(alpha1 alpha2) cos(theta)];
    the returned theta makes this equal alpha1 (2 + 2 cos(theta1)).
    """
    if not 0 < alpha2 <= alpha1 <= 1:
        raise ValueError("need 0 < alpha2 <= alpha1 <= 1")
    rhs = (alpha1 - alpha2 + 2.0 * alpha1 * math.cos(theta1)) / (2.0 * math.sqrt(alpha1 * alpha2))
    if abs(rhs) > 1.0 + 1e-12:
        raise ValueError(f"imbalance cannot be compensated at theta1={theta1:.6g} (cos theta = {rhs:.6g})")
    return math.acos(max(-1.0, min(1.0, rhs)))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
