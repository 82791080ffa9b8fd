"""Benchmark circuit families: random circuits and the decomposed Fourier transform."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import Circuit, CircuitError, Gate, cnot, h, zphase
from .rng import stream


@dataclass(frozen=True, slots=True)
class GateProbabilities:
    """Per-step gate-kind distribution for random circuits."""

    p_cnot: float = 0.5
    p_h: float = 0.3
    p_s: float = 0.1
    p_zphase: float = 0.1

    def __post_init__(self):
        values = (self.p_cnot, self.p_h, self.p_s, self.p_zphase)
        if any(not (0.0 <= v <= 1.0) for v in values):
            raise ValueError(f"probabilities must lie in [0, 1], got {values}")
        if abs(sum(values) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {sum(values)!r}")


DEFAULT_PROBS = GateProbabilities()


def random_circuit(
    n_qubits: int,
    depth: int,
    probs: GateProbabilities = DEFAULT_PROBS,
    seed: int = 0,
) -> Circuit:
    """Depth-``depth`` random circuit, one gate per time step.

    Each step draws a kind from ``probs``; CNOT control/target are a uniform
    ordered pair of distinct qubits; Z-phase angles are uniform on
    (-pi/4, pi/4].  Deterministic given ``seed``.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if probs.p_cnot > 0 and n_qubits < 2:
        raise ValueError("CNOT draws require at least 2 qubits")
    rng = stream(seed, "rqc")
    thresholds = (probs.p_cnot, probs.p_cnot + probs.p_h, probs.p_cnot + probs.p_h + probs.p_s)
    gates: list[Gate] = []
    for _ in range(depth):
        u = rng.random()
        if u < thresholds[0]:
            control = int(rng.integers(n_qubits))
            target = int(rng.integers(n_qubits - 1))
            if target >= control:
                target += 1
            gates.append(cnot(control, target))
        elif u < thresholds[1]:
            gates.append(h(int(rng.integers(n_qubits))))
        elif u < thresholds[2]:
            gates.append(Gate("s", (int(rng.integers(n_qubits)),)))
        else:
            # rng.random() in [0, 1) maps onto the half-open angle interval.
            angle = math.pi / 4 - rng.random() * (math.pi / 2)
            gates.append(zphase(int(rng.integers(n_qubits)), angle))
    return Circuit(n_qubits, tuple(gates))


def cp_decompose(target: int, control: int, angle: float) -> tuple[Gate, ...]:
    """Controlled-phase on (control, target) as the five-gate CNOT form.

    Execution order: Z_{a/2}(target), CNOT, Z_{-a/2}(target), CNOT,
    Z_{a/2}(control).  Requires |angle| <= pi/2 so the half-angles stay inside
    the stored Z-phase range.
    """
    if target == control:
        raise CircuitError("controlled phase needs distinct qubits")
    if abs(angle) > math.pi / 2:
        raise ValueError(f"|angle| must be <= pi/2, got {angle}")
    half = angle / 2
    return (
        zphase(target, half),
        cnot(control, target),
        zphase(target, -half),
        cnot(control, target),
        zphase(control, half),
    )


def qft(n_qubits: int) -> Circuit:
    """Quantum Fourier transform with controlled phases expanded into CNOTs.

    For each wire i: H(i), then controlled phases pi / 2**(j - i) targeting i
    with control j for every j > i.  No terminal swap network; the unitary is
    the DFT matrix with bit-reversed output ordering.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    gates: list[Gate] = []
    for i in range(n_qubits):
        gates.append(h(i))
        for j in range(i + 1, n_qubits):
            gates.extend(cp_decompose(i, j, math.pi / 2 ** (j - i)))
    return Circuit(n_qubits, tuple(gates))
