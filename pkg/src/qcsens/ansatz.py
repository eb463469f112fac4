"""Hardware-efficient ansatz circuits.

A circuit is L identical layers; each layer applies the configured entangler
chains (CNOT chain, then CZ chain, each running control i → target i+1 in
ascending order) followed by single-qubit rotations — every qubit gets one
rotation per configured axis, in X, Y, Z order, each with its own parameter.
Parameters are indexed j = (layer·n + qubit)·|rotations| + rotation, and
qubit 0 is the most significant (leftmost tensor factor).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import IndexOutOfRange, ParamLengthMismatch

MAX_QUBITS = 6


class RotationKind(enum.Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"


class EntanglerKind(enum.Enum):
    CNOT = "cnot"
    CZ = "cz"


_PAULI = {
    RotationKind.RX: np.array([[0, 1], [1, 0]], dtype=complex),
    RotationKind.RY: np.array([[0, -1j], [1j, 0]], dtype=complex),
    RotationKind.RZ: np.array([[1, 0], [0, -1]], dtype=complex),
}

_TWO_QUBIT = {
    EntanglerKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    EntanglerKind.CZ: np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex),
}

_ROT_ORDER = tuple(RotationKind)  # canonical X, Y, Z
_ENT_ORDER = tuple(EntanglerKind)  # canonical CNOT, CZ


def _canonical(kinds, order):
    seen = set(kinds)
    return tuple(k for k in order if k in seen)


@dataclass(frozen=True)
class AnsatzConfig:
    """Shape of a hardware-efficient circuit; immutable and hashable."""

    qubits: int
    layers: int
    rotations: tuple[RotationKind, ...]
    entanglers: tuple[EntanglerKind, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.qubits, int) or not 1 <= self.qubits <= MAX_QUBITS:
            raise ValueError(f"qubits must be an integer in [1, {MAX_QUBITS}], got {self.qubits!r}")
        if not isinstance(self.layers, int) or self.layers < 1:
            raise ValueError(f"layers must be a positive integer, got {self.layers!r}")
        if not self.rotations:
            raise ValueError("at least one rotation axis is required")
        object.__setattr__(self, "rotations", _canonical(self.rotations, _ROT_ORDER))
        object.__setattr__(self, "entanglers", _canonical(self.entanglers, _ENT_ORDER))

    @property
    def param_count(self) -> int:
        return self.qubits * self.layers * len(self.rotations)

    @property
    def dim(self) -> int:
        return 2**self.qubits

    def to_text(self) -> str:
        rot = "+".join(r.value for r in self.rotations)
        ent = "+".join(e.value for e in self.entanglers)
        return f"n={self.qubits},L={self.layers},rot={rot},ent={ent}" if ent else (
            f"n={self.qubits},L={self.layers},rot={rot}"
        )

    @classmethod
    def from_text(cls, text: str) -> "AnsatzConfig":
        """Parse the textual form, e.g. ``n=3,L=5,rot=rx+ry,ent=cnot+cz``."""
        fields: dict[str, str] = {}
        for part in text.strip().split(","):
            if "=" not in part:
                raise ValueError(f"malformed config fragment {part!r}")
            key, _, value = part.partition("=")
            fields[key.strip()] = value.strip()
        missing = {"n", "L", "rot"} - fields.keys()
        if missing:
            raise ValueError(f"config text {text!r} is missing {sorted(missing)}")
        extra = fields.keys() - {"n", "L", "rot", "ent"}
        if extra:
            raise ValueError(f"config text {text!r} has unknown keys {sorted(extra)}")
        try:
            n = int(fields["n"])
            layers = int(fields["L"])
        except ValueError:
            raise ValueError(f"n and L must be integers in {text!r}") from None

        def lookup(enum_cls, token):
            for member in enum_cls:
                if member.value == token:
                    return member
            raise ValueError(f"unknown {enum_cls.__name__} token {token!r}")

        rot_text = fields["rot"]
        if not rot_text:
            raise ValueError("rot= must list at least one axis")
        rotations = tuple(lookup(RotationKind, t) for t in rot_text.split("+"))
        ent_text = fields.get("ent", "")
        entanglers = tuple(lookup(EntanglerKind, t) for t in ent_text.split("+")) if ent_text else ()
        return cls(qubits=n, layers=layers, rotations=rotations, entanglers=entanglers)


def gate_matrix(kind: RotationKind, angle: float) -> np.ndarray:
    """exp(−i·angle/2·σ) in closed form: cos(angle/2)·I − i·sin(angle/2)·σ."""
    half = angle / 2.0
    return np.cos(half) * np.eye(2, dtype=complex) - 1j * np.sin(half) * _PAULI[kind]


def _embed_pair(gate4: np.ndarray, i: int, n: int) -> np.ndarray:
    """Lift a two-qubit gate onto the adjacent pair (i, i+1) of n qubits."""
    left = np.eye(2**i, dtype=complex)
    right = np.eye(2 ** (n - i - 2), dtype=complex)
    return np.kron(np.kron(left, gate4), right)


def entangler_layer(kind: EntanglerKind, n: int) -> np.ndarray:
    """Linear chain of two-qubit gates, control i → target i+1, i ascending."""
    if n < 1:
        raise ValueError("need at least one qubit")
    acc = np.eye(2**n, dtype=complex)
    for i in range(n - 1):
        acc = _embed_pair(_TWO_QUBIT[kind], i, n) @ acc
    return acc


def _check_params(config: AnsatzConfig, theta) -> np.ndarray:
    th = np.asarray(theta, dtype=float).ravel()
    if th.size != config.param_count:
        raise ParamLengthMismatch(
            f"expected {config.param_count} parameters for {config.to_text()}, got {th.size}"
        )
    return th


def _rotation_block(config: AnsatzConfig, th: np.ndarray, layer: int) -> np.ndarray:
    """Tensor product of the per-qubit rotation composites for one layer."""
    n, rots = config.qubits, config.rotations
    factors = []
    for q in range(n):
        comp = np.eye(2, dtype=complex)
        for r, kind in enumerate(rots):
            j = (layer * n + q) * len(rots) + r
            comp = gate_matrix(kind, th[j]) @ comp  # X acts first
        factors.append(comp)
    return reduce(np.kron, factors)


def _entangler_block(config: AnsatzConfig) -> np.ndarray:
    w = np.eye(config.dim, dtype=complex)
    for kind in config.entanglers:  # CNOT chain, then CZ chain
        w = entangler_layer(kind, config.qubits) @ w
    return w


def build_unitary(config: AnsatzConfig, theta) -> np.ndarray:
    """Full circuit matrix; layer 1 acts first on the state."""
    th = _check_params(config, theta)
    w = _entangler_block(config)
    u = np.eye(config.dim, dtype=complex)
    for layer in range(config.layers):
        u = _rotation_block(config, th, layer) @ w @ u
    return u


def partial_derivative(config: AnsatzConfig, theta, j: int) -> np.ndarray:
    """Exact ∂U/∂θ_j: the circuit with −(i/2)·σ spliced in at gate j.

    The result is a product of unitaries scaled by 1/2, so its spectral
    norm is exactly 0.5.
    """
    th = _check_params(config, theta)
    if not 0 <= j < config.param_count:
        raise IndexOutOfRange(f"parameter index {j} outside [0, {config.param_count})")
    n, rots = config.qubits, config.rotations
    layer, rest = divmod(j, n * len(rots))
    qubit, rot_pos = divmod(rest, len(rots))

    w = _entangler_block(config)
    u = np.eye(config.dim, dtype=complex)
    for earlier in range(layer):
        u = _rotation_block(config, th, earlier) @ w @ u
    u = w @ u

    # rotation block of the target layer, with the generator inserted on the
    # target qubit right after its j-th rotation gate
    factors = []
    for q in range(n):
        comp = np.eye(2, dtype=complex)
        for r, kind in enumerate(rots):
            idx = (layer * n + q) * len(rots) + r
            comp = gate_matrix(kind, th[idx]) @ comp
            if q == qubit and r == rot_pos:
                comp = -0.5j * _PAULI[kind] @ comp
        factors.append(comp)
    u = reduce(np.kron, factors) @ u

    for later in range(layer + 1, config.layers):
        u = _rotation_block(config, th, later) @ w @ u
    return u
