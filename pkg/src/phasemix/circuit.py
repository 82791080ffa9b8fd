"""Gate-list circuit IR over the {CNOT, H, S, Z-phase} gate set.

Conventions used throughout the package:

- Z_a = diag(1, exp(i*a)); S = Z at +pi/2; the Clifford group is generated
  by {CNOT, H, S}.
- Stored Z-phase angles lie in the closed interval [-pi/4, +pi/4].  Arbitrary
  angles are reduced by :func:`normalize_phase`, which maps into the half-open
  interval (-pi/4, +pi/4] (ties at the boundary resolve to +pi/4) and reports
  the number of leading S gates.  A bare -pi/4 is accepted as a stored angle
  so that five-gate controlled-phase blocks stay five gates.
- Qubit 0 is the most significant bit of computational-basis indices.
- Circuits are immutable; every transformation returns a new value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4

DEFAULT_UNITARY_CAP = 10

CNOT = "cnot"
H = "h"
S = "s"
ZPHASE = "zphase"

_KINDS = (CNOT, H, S, ZPHASE)


class CircuitError(ValueError):
    """Invalid gate, circuit, or circuit text."""


class ParseError(CircuitError):
    """Malformed circuit text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class WidthCapError(CircuitError):
    """Circuit is wider than a dense-linear-algebra cap allows."""


def normalize_phase(beta: float) -> tuple[int, float]:
    """Reduce a Z-phase angle to S gates plus a residual angle.

    Returns ``(s_power, alpha)`` with ``s_power`` in 0..3 and ``alpha`` in
    (-pi/4, pi/4] such that S^s_power * Z_alpha == Z_beta up to global phase.
    Ties at the boundary map -pi/4 to (3, +pi/4).
    """
    if not math.isfinite(beta):
        raise ValueError(f"phase angle must be finite, got {beta!r}")
    alpha = math.remainder(beta, HALF_PI)  # in [-pi/4, +pi/4]
    if alpha <= -QUARTER_PI:
        alpha += HALF_PI
    s_power = round((beta - alpha) / HALF_PI) % 4
    return s_power, alpha


@dataclass(frozen=True, slots=True)
class Gate:
    """One gate: ``kind`` in {cnot, h, s, zphase}, CNOT qubits are (control, target)."""

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind == CNOT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise CircuitError(f"cnot needs two distinct qubits, got {self.qubits}")
        elif len(self.qubits) != 1:
            raise CircuitError(f"{self.kind} acts on one qubit, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if self.kind == ZPHASE and abs(self.angle) > QUARTER_PI:
            raise CircuitError(
                f"zphase angle {self.angle} outside [-pi/4, pi/4]; use zphase_sequence"
            )


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def h(qubit: int) -> Gate:
    return Gate(H, (qubit,))


def s(qubit: int) -> Gate:
    return Gate(S, (qubit,))


def zphase(qubit: int, angle: float) -> Gate:
    return Gate(ZPHASE, (qubit,), angle)


def zphase_sequence(qubit: int, beta: float) -> tuple[Gate, ...]:
    """Arbitrary Z_beta as stored gates: S^s then the normalized residual.

    Angles already inside the stored range pass through unchanged (including
    the -pi/4 boundary), so round trips never grow a circuit.
    """
    if abs(beta) <= QUARTER_PI:
        return (Gate(ZPHASE, (qubit,), beta),)
    s_power, alpha = normalize_phase(beta)
    gates = [Gate(S, (qubit,))] * s_power
    if alpha != 0.0:
        gates.append(Gate(ZPHASE, (qubit,), alpha))
    return tuple(gates)


@dataclass(frozen=True, slots=True)
class Circuit:
    """Ordered gate sequence on ``n_qubits`` wires; gates apply left to right."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError(f"n_qubits must be >= 1, got {self.n_qubits}")
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise CircuitError(f"gate {g} outside width {self.n_qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise CircuitError("cannot concatenate circuits of different widths")
        return Circuit(self.n_qubits, self.gates + other.gates)


def two_qubit_count(circuit: Circuit) -> int:
    """Number of CNOT gates (the cost metric all passes optimize)."""
    return sum(1 for g in circuit.gates if g.kind == CNOT)


_H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S_MAT = np.array([[1, 0], [0, 1j]], dtype=complex)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense matrix of a single gate on its own qubits (2x2, or 4x4 for CNOT)."""
    if gate.kind == H:
        return _H_MAT.copy()
    if gate.kind == S:
        return _S_MAT.copy()
    if gate.kind == ZPHASE:
        return np.array([[1, 0], [0, np.exp(1j * gate.angle)]], dtype=complex)
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )


def _apply_1q(mat: np.ndarray, u: np.ndarray, qubit: int, n: int) -> np.ndarray:
    # u has shape (2**n, dim); contract the gate into the qubit axis of the
    # row index, keeping the column axis last.
    dim = u.shape[1]
    t = u.reshape([2] * n + [dim])
    t = np.moveaxis(t, qubit, 0)
    t = np.tensordot(mat, t, axes=([1], [0]))
    t = np.moveaxis(t, 0, qubit)
    return t.reshape(2**n, dim)


def _apply_cnot(u: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    dim = u.shape[1]
    t = u.reshape([2] * n + [dim]).copy()
    idx1 = [slice(None)] * (n + 1)
    idx1[control], idx1[target] = 1, 0
    idx2 = [slice(None)] * (n + 1)
    idx2[control], idx2[target] = 1, 1
    t[tuple(idx1)], t[tuple(idx2)] = t[tuple(idx2)].copy(), t[tuple(idx1)].copy()
    return t.reshape(2**n, dim)


def apply_to_matrix(circuit: Circuit, u: np.ndarray) -> np.ndarray:
    """Apply the circuit to each column of ``u`` (shape (2**n, anything))."""
    n = circuit.n_qubits
    if u.shape[0] != 2**n:
        raise CircuitError(f"matrix rows {u.shape[0]} != 2**{n}")
    for g in circuit.gates:
        if g.kind == CNOT:
            u = _apply_cnot(u, g.qubits[0], g.qubits[1], n)
        else:
            u = _apply_1q(gate_matrix(g), u, g.qubits[0], n)
    return u


def unitary_of(circuit: Circuit, max_qubits: int = DEFAULT_UNITARY_CAP) -> np.ndarray:
    """Dense 2**n x 2**n unitary of the circuit (product in circuit order)."""
    n = circuit.n_qubits
    if n > max_qubits:
        raise WidthCapError(f"{n} qubits exceeds the unitary cap {max_qubits}")
    return apply_to_matrix(circuit, np.eye(2**n, dtype=complex))


def phase_aligned_overlap(u: np.ndarray, v: np.ndarray) -> float:
    """|tr(u^dag v)| / dim; equals 1 iff u == v up to global phase."""
    dim = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) / dim)


def _inverted_gates(gate: Gate) -> tuple[Gate, ...]:
    if gate.kind in (H, CNOT):
        return (gate,)
    if gate.kind == S:
        return (gate, gate, gate)  # S^dagger == S^3 up to global phase
    return (Gate(ZPHASE, gate.qubits, -gate.angle),)


def invert(circuit: Circuit) -> Circuit:
    """Inverse circuit: reversed order, each gate inverted within the gate set."""
    gates: list[Gate] = []
    for g in reversed(circuit.gates):
        gates.extend(_inverted_gates(g))
    return Circuit(circuit.n_qubits, tuple(gates))


def serialize(circuit: Circuit) -> str:
    """Circuit text: ``qubits <L>`` header then one lowercase gate per line."""
    lines = [f"qubits {circuit.n_qubits}"]
    for g in circuit.gates:
        if g.kind == CNOT:
            lines.append(f"cnot {g.qubits[0]} {g.qubits[1]}")
        elif g.kind == ZPHASE:
            lines.append(f"zphase {g.qubits[0]} {g.angle:.17g}")
        else:
            lines.append(f"{g.kind} {g.qubits[0]}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> Circuit:
    """Parse circuit text; inverse of :func:`serialize`.

    Oversized zphase angles are canonicalized into S gates at parse time.  A
    missing ``qubits`` header infers the width from the largest index used.
    """
    n_qubits: int | None = None
    gates: list[Gate] = []
    max_index = -1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        op, args = fields[0].lower(), fields[1:]
        try:
            if op == "qubits":
                (val,) = args
                n_qubits = int(val)
                if n_qubits < 1:
                    raise ValueError("width must be >= 1")
            elif op == "cnot":
                c, t = (int(a) for a in args)
                gates.append(cnot(c, t))
                max_index = max(max_index, c, t)
            elif op in (H, S):
                (q,) = (int(a) for a in args)
                gates.append(Gate(op, (q,)))
                max_index = max(max_index, q)
            elif op == ZPHASE:
                q_str, angle_str = args
                q = int(q_str)
                gates.extend(zphase_sequence(q, float(angle_str)))
                max_index = max(max_index, q)
            else:
                raise ValueError(f"unknown gate {op!r}")
        except ParseError:
            raise
        except (ValueError, CircuitError) as exc:
            raise ParseError(line_no, f"{exc} in {raw.strip()!r}") from exc
    if n_qubits is None:
        n_qubits = max_index + 1 if max_index >= 0 else 1
    try:
        return Circuit(n_qubits, tuple(gates))
    except CircuitError as exc:
        raise ParseError(0, str(exc)) from exc
