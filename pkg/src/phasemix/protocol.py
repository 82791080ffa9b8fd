"""Budgeted replacement planning and per-shot stochastic instantiation.

Planning sorts every Z-phase gate by its minimal replacement distance and
greedily accepts, within the error budget, the gates whose squashing (on top
of everything already accepted) strictly lowers the simplified CNOT count.
Each shot then deletes every accepted gate with probability ``p`` (replacing
it by the optimal over-rotation otherwise) and re-simplifies, so the shot
ensemble realizes the planned mixed channel.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import ZPHASE, Circuit, Gate, zphase_sequence
from .distances import min_diamond_distance, optimal_theta
from .rng import derive_seed, stream
from .simplify import best_simplify
from .verify import (
    DEFAULT_LOWER_BOUND_CAP,
    FROBENIUS_STATEVECTOR_CAP,
    diamond_lower_bound,
    diamond_upper_bound,
    frobenius_mc_full,
)


@dataclass(frozen=True, slots=True)
class ReplacementCandidate:
    """A Z-phase position with its replacement cost and optimal over-rotation."""

    gate_index: int
    alpha: float
    d_min: float
    theta_tilde: float


@dataclass(frozen=True, slots=True)
class ReplacementPlan:
    """Accepted replacement set for one circuit at one (epsilon, p)."""

    base: Circuit
    p: float
    epsilon: float
    accepted: tuple[ReplacementCandidate, ...]
    spent: float
    baseline_2q: int
    squash: bool = False


def _delete_indices(base: Circuit, indices: Iterable[int]) -> Circuit:
    drop = set(indices)
    return Circuit(
        base.n_qubits, tuple(g for i, g in enumerate(base.gates) if i not in drop)
    )


def _plan(circuit: Circuit, epsilon: float, p: float, squash: bool) -> ReplacementPlan:
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    candidates = [
        ReplacementCandidate(
            gate_index=i,
            alpha=g.angle,
            d_min=min_diamond_distance(g.angle, p),
            theta_tilde=0.0 if squash else optimal_theta(g.angle, p),
        )
        for i, g in enumerate(circuit.gates)
        if g.kind == ZPHASE
    ]
    candidates.sort(key=lambda c: (c.d_min, c.gate_index))

    baseline = best_simplify(circuit)
    baseline_2q = sum(1 for g in baseline.gates if g.kind == "cnot")
    accepted: list[ReplacementCandidate] = []
    accepted_indices: list[int] = []
    spent = 0.0
    count_prev = baseline_2q
    for cand in candidates:
        if spent + cand.d_min > epsilon:
            break  # sorted ascending: nothing further fits the budget
        trial = best_simplify(_delete_indices(circuit, accepted_indices + [cand.gate_index]))
        count_trial = sum(1 for g in trial.gates if g.kind == "cnot")
        if count_trial < count_prev:
            accepted.append(cand)
            accepted_indices.append(cand.gate_index)
            spent += cand.d_min
            count_prev = count_trial
    return ReplacementPlan(
        base=circuit,
        p=p,
        epsilon=epsilon,
        accepted=tuple(accepted),
        spent=spent,
        baseline_2q=baseline_2q,
        squash=squash,
    )


def plan_replacements(circuit: Circuit, epsilon: float, p: float) -> ReplacementPlan:
    """Greedy budgeted plan for the mixed replacement at identity weight ``p``.

    ``p == 1`` is rejected here because the mixture degenerates; use
    :func:`plan_squash` for the deterministic squashing baseline.
    """
    if not (0.0 <= p < 1.0):
        raise ValueError(f"p must lie in [0, 1) for mixture planning, got {p}")
    return _plan(circuit, epsilon, p, squash=False)


def plan_squash(circuit: Circuit, epsilon: float) -> ReplacementPlan:
    """Deterministic phase-squashing plan (the p == 1 limit of the mixture)."""
    return _plan(circuit, epsilon, 1.0, squash=True)


def substituted_circuit(plan: ReplacementPlan, deleted: Sequence[bool]) -> Circuit:
    """Base circuit with one concrete draw applied, before simplification."""
    if len(deleted) != len(plan.accepted):
        raise ValueError("one decision per accepted candidate required")
    actions = {
        cand.gate_index: (None if out else zphase_sequence(plan.base.gates[cand.gate_index].qubits[0], cand.theta_tilde))
        for cand, out in zip(plan.accepted, deleted)
    }
    gates: list[Gate] = []
    for i, g in enumerate(plan.base.gates):
        if i in actions:
            replacement = actions[i]
            if replacement is not None:
                gates.extend(replacement)
        else:
            gates.append(g)
    return Circuit(plan.base.n_qubits, tuple(gates))


def sample_instance(plan: ReplacementPlan, rng: np.random.Generator) -> Circuit:
    """One shot: delete each accepted gate with probability p, then simplify."""
    if plan.squash:
        deleted = [True] * len(plan.accepted)
    else:
        deleted = [bool(rng.random() < plan.p) for _ in plan.accepted]
    return best_simplify(substituted_circuit(plan, deleted))


@dataclass(frozen=True, slots=True)
class ShotEstimate:
    mean: float
    stderr: float
    histogram: dict[int, int] = field(default_factory=dict)


def estimate_avg_two_qubit(plan: ReplacementPlan, n_shots: int = 8192, seed: int = 0) -> ShotEstimate:
    """Sample mean CNOT count over independent shots with derived per-shot seeds."""
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    counts = np.empty(n_shots, dtype=float)
    for shot in range(n_shots):
        instance = sample_instance(plan, stream(seed, "shot", shot))
        counts[shot] = sum(1 for g in instance.gates if g.kind == "cnot")
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(n_shots)) if n_shots > 1 else 0.0
    histogram = dict(sorted(Counter(int(c) for c in counts).items()))
    return ShotEstimate(mean=mean, stderr=stderr, histogram=histogram)


def expected_two_qubit_count(plan: ReplacementPlan, max_subsets: int = 256) -> float:
    """Exact expected CNOT count by enumerating deletion subsets (small plans)."""
    k = len(plan.accepted)
    if 2**k > max_subsets:
        raise ValueError(f"2**{k} subsets exceed the enumeration cap {max_subsets}")
    if plan.squash:
        instance = best_simplify(substituted_circuit(plan, [True] * k))
        return float(sum(1 for g in instance.gates if g.kind == "cnot"))
    total = 0.0
    for mask in range(2**k):
        deleted = [(mask >> i) & 1 == 1 for i in range(k)]
        weight = math.prod(
            plan.p if d else (1 - plan.p) for d in deleted
        ) if k else 1.0
        instance = best_simplify(substituted_circuit(plan, deleted))
        total += weight * sum(1 for g in instance.gates if g.kind == "cnot")
    return total


@dataclass(frozen=True, slots=True)
class SweepRecord:
    """One row of the benchmark harness, mirroring the CSV schema."""

    circuit: str
    L: int
    epsilon: float
    p: float
    realization: int
    baseline_2q: int
    mean_2q: float
    stderr_2q: float
    n_accepted: int
    spent_budget: float
    d_upper: float
    d_lower_est: float | None
    frobenius_mc: float | None
    frobenius_mc_err: float | None
    seed: int


CSV_HEADER = (
    "circuit,L,epsilon,p,realization,baseline_2q,mean_2q,stderr_2q,"
    "n_accepted,spent_budget,d_upper,d_lower_est,frobenius_mc,frobenius_mc_err,seed"
)


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return f"{value:.10g}"


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                (
                    r.circuit,
                    str(r.L),
                    _fmt(r.epsilon),
                    _fmt(r.p),
                    str(r.realization),
                    str(r.baseline_2q),
                    _fmt(r.mean_2q),
                    _fmt(r.stderr_2q),
                    str(r.n_accepted),
                    _fmt(r.spent_budget),
                    _fmt(r.d_upper),
                    _fmt(r.d_lower_est),
                    _fmt(r.frobenius_mc),
                    _fmt(r.frobenius_mc_err),
                    str(r.seed),
                )
            )
        )
    return "\n".join(lines) + "\n"


def sweep(
    circuit: Circuit | Callable[[int], Circuit],
    epsilons: Sequence[float],
    ps: Sequence[float],
    n_shots: int = 8192,
    n_realizations: int = 1,
    seed: int = 0,
    circuit_label: str = "circuit",
    verify_mode: str = "none",
    frobenius_states: int = 32,
    lower_bound_restarts: int = 6,
) -> list[SweepRecord]:
    """Full (epsilon, p, realization) grid; rows in canonical order.

    ``circuit`` is either a fixed circuit (deterministic input, so a single
    realization regardless of ``n_realizations``) or a factory mapping a
    derived 64-bit seed to a fresh realization.  ``p == 1`` rows run the
    deterministic squash mode.  ``verify_mode`` adds exact-verification
    columns: "bounds" fills the diamond lower bound (width-capped), and
    "frobenius" the Monte-Carlo Frobenius distance.
    """
    if not epsilons or not ps:
        raise ValueError("epsilon and p grids must be nonempty")
    if verify_mode not in ("none", "bounds", "frobenius"):
        raise ValueError(f"unknown verify mode {verify_mode!r}")
    if isinstance(circuit, Circuit):
        instances = [(0, circuit)]
    else:
        instances = [
            (r, circuit(derive_seed(seed, "realization", r))) for r in range(n_realizations)
        ]
    records: list[SweepRecord] = []
    for realization, base in instances:
        for i_eps, epsilon in enumerate(epsilons):
            for i_p, p in enumerate(ps):
                plan = plan_squash(base, epsilon) if p == 1.0 else plan_replacements(base, epsilon, p)
                shot_seed = derive_seed(seed, "estimate", realization, i_eps, i_p)
                est = estimate_avg_two_qubit(plan, n_shots=n_shots, seed=shot_seed)
                lower: float | None = None
                fro_mean: float | None = None
                fro_err: float | None = None
                if verify_mode == "bounds" and base.n_qubits <= DEFAULT_LOWER_BOUND_CAP:
                    lower = diamond_lower_bound(
                        base, plan, n_restarts=lower_bound_restarts,
                        seed=derive_seed(seed, "lower", realization, i_eps, i_p),
                    )
                if verify_mode == "frobenius" and base.n_qubits <= FROBENIUS_STATEVECTOR_CAP:
                    fro_mean, fro_err = frobenius_mc_full(
                        base, plan, n_states=frobenius_states,
                        seed=derive_seed(seed, "frobenius", realization, i_eps, i_p),
                    )
                records.append(
                    SweepRecord(
                        circuit=circuit_label,
                        L=base.n_qubits,
                        epsilon=epsilon,
                        p=p,
                        realization=realization,
                        baseline_2q=plan.baseline_2q,
                        mean_2q=est.mean,
                        stderr_2q=est.stderr,
                        n_accepted=len(plan.accepted),
                        spent_budget=plan.spent,
                        d_upper=diamond_upper_bound(plan),
                        d_lower_est=lower,
                        frobenius_mc=fro_mean,
                        frobenius_mc_err=fro_err,
                        seed=derive_seed(seed, "realization", realization),
                    )
                )
    return records
