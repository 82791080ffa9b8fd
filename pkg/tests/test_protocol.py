import math

import numpy as np
import pytest

from phasemix.circuit import Circuit, phase_aligned_overlap, two_qubit_count, unitary_of, zphase
from phasemix.distances import min_diamond_distance
from phasemix.generators import qft, random_circuit
from phasemix.protocol import (
    CSV_HEADER,
    ReplacementCandidate,
    ReplacementPlan,
    estimate_avg_two_qubit,
    expected_two_qubit_count,
    plan_replacements,
    plan_squash,
    records_to_csv,
    sample_instance,
    substituted_circuit,
    sweep,
)
from phasemix.rng import stream
from phasemix.simplify import best_simplify


def single_gate_plan(alpha: float, p: float) -> ReplacementPlan:
    from phasemix.distances import optimal_theta

    base = Circuit(1, (zphase(0, alpha),))
    d = min_diamond_distance(alpha, p)
    cand = ReplacementCandidate(0, alpha, d, optimal_theta(alpha, p))
    return ReplacementPlan(
        base=base, p=p, epsilon=d, accepted=(cand,), spent=d, baseline_2q=0
    )


class TestPlanReplacements:
    def test_zero_budget_accepts_nothing(self):
        plan = plan_replacements(qft(6), 0.0, 0.5)
        assert plan.accepted == () and plan.spent == 0.0

    def test_p_one_rejected(self):
        with pytest.raises(ValueError):
            plan_replacements(qft(4), 0.1, 1.0)

    def test_negative_epsilon_rejected(self):
        with pytest.raises(ValueError):
            plan_replacements(qft(4), -0.1, 0.5)

    def test_budget_safety_and_ordering(self):
        plan = plan_replacements(qft(8), 0.1, 0.75)
        assert plan.accepted
        assert plan.spent <= 0.1
        ds = [c.d_min for c in plan.accepted]
        assert ds == sorted(ds)
        assert abs(plan.spent - sum(ds)) < 1e-15

    def test_rejected_for_budget_would_overflow(self):
        # Every distance strictly above the largest accepted one no longer
        # fits the leftover budget.
        plan = plan_replacements(qft(8), 0.1, 0.75)
        accepted = {c.gate_index for c in plan.accepted}
        largest = max(c.d_min for c in plan.accepted)
        for i, g in enumerate(qft(8).gates):
            if g.kind != "zphase" or i in accepted:
                continue
            d = min_diamond_distance(g.angle, 0.75)
            if d > largest:
                assert plan.spent + d > plan.epsilon

    def test_qft_accepts_smallest_angles_first(self):
        # By the distance monotonicity in |alpha|, the accepted set is
        # dominated by the exponentially small ladder phases.
        plan = plan_replacements(qft(8), 0.1, 0.75)
        accepted_abs = {round(abs(c.alpha), 12) for c in plan.accepted}
        max_accepted = max(accepted_abs)
        rejected_smaller = [
            g.angle
            for i, g in enumerate(qft(8).gates)
            if g.kind == "zphase"
            and abs(g.angle) < max_accepted - 1e-12
            and i not in {c.gate_index for c in plan.accepted}
        ]
        # every strictly smaller angle left behind is an outer phase whose
        # removal cannot cancel CNOTs; the inner (gadget) phases are taken
        inner_angles = {round(math.pi / 2**k / 2, 12) for k in range(4, 8)}
        assert inner_angles <= {round(a, 12) for a in accepted_abs}

    def test_candidates_theta_consistent(self):
        from phasemix.distances import optimal_theta

        plan = plan_replacements(qft(6), 0.05, 0.6)
        for cand in plan.accepted:
            assert cand.theta_tilde == optimal_theta(cand.alpha, 0.6)
            assert cand.d_min == min_diamond_distance(cand.alpha, 0.6)

    def test_baseline_is_simplified_count(self):
        c = random_circuit(5, 80, seed=21)
        plan = plan_replacements(c, 0.1, 0.5)
        assert plan.baseline_2q == two_qubit_count(best_simplify(c))


class TestPlanSquash:
    def test_squash_costs_are_p1_distances(self):
        plan = plan_squash(qft(8), 0.1)
        for cand in plan.accepted:
            assert abs(cand.d_min - 2 * abs(math.sin(cand.alpha / 2))) < 1e-14
        assert plan.squash and plan.p == 1.0

    def test_squash_accepts_fewer_than_mixture(self):
        n_squash = len(plan_squash(qft(8), 0.1).accepted)
        n_mixed = len(plan_replacements(qft(8), 0.1, 0.8).accepted)
        assert n_squash < n_mixed


class TestSampleInstance:
    def test_all_keep_draws_match_baseline_count(self):
        plan = plan_replacements(qft(8), 0.1, 0.75)
        inst = best_simplify(substituted_circuit(plan, [False] * len(plan.accepted)))
        assert two_qubit_count(inst) == plan.baseline_2q

    def test_all_delete_draws_reach_squashed_count(self):
        plan = plan_replacements(qft(8), 0.1, 0.75)
        inst = best_simplify(substituted_circuit(plan, [True] * len(plan.accepted)))
        assert two_qubit_count(inst) == plan.baseline_2q - 2 * len(plan.accepted)

    def test_high_p_concentrates_on_squashed(self):
        plan = plan_replacements(qft(8), 0.1, 0.999)
        squashed = best_simplify(substituted_circuit(plan, [True] * len(plan.accepted)))
        hits = 0
        for k in range(40):
            inst = sample_instance(plan, stream(4, k))
            hits += two_qubit_count(inst) == two_qubit_count(squashed)
        assert hits >= 35

    @pytest.mark.parametrize("seed", range(4))
    def test_instance_unitary_equals_substitution(self, seed):
        plan = plan_replacements(qft(4), 0.3, 0.6)
        assert plan.accepted
        rng = stream(seed, "draws")
        deleted = [bool(rng.random() < plan.p) for _ in plan.accepted]
        sub = substituted_circuit(plan, deleted)
        inst = best_simplify(sub)
        assert phase_aligned_overlap(unitary_of(sub), unitary_of(inst)) > 1 - 1e-9

    def test_squash_plan_always_deletes(self):
        plan = plan_squash(qft(8), 0.1)
        a = sample_instance(plan, stream(1, 1))
        b = sample_instance(plan, stream(2, 2))
        assert a == b
        assert two_qubit_count(a) == plan.baseline_2q - 2 * len(plan.accepted)


class TestEstimate:
    def test_empty_plan_zero_spread(self):
        plan = plan_replacements(qft(4), 0.0, 0.5)
        est = estimate_avg_two_qubit(plan, n_shots=16, seed=0)
        assert est.mean == plan.baseline_2q and est.stderr == 0.0
        assert est.histogram == {plan.baseline_2q: 16}

    def test_p_zero_reproduces_baseline(self):
        plan = plan_replacements(qft(6), 0.1, 0.0)
        est = estimate_avg_two_qubit(plan, n_shots=8, seed=1)
        assert est.mean == plan.baseline_2q and est.stderr == 0.0

    def test_seed_reproducible_to_last_bit(self):
        plan = plan_replacements(qft(8), 0.1, 0.8)
        a = estimate_avg_two_qubit(plan, n_shots=128, seed=9)
        b = estimate_avg_two_qubit(plan, n_shots=128, seed=9)
        assert a.mean == b.mean and a.stderr == b.stderr and a.histogram == b.histogram

    def test_mean_matches_exact_enumeration(self):
        plan = plan_replacements(qft(4), 0.3, 0.6)
        assert 1 <= len(plan.accepted) <= 6
        exact = expected_two_qubit_count(plan)
        est = estimate_avg_two_qubit(plan, n_shots=4096, seed=5)
        assert abs(est.mean - exact) < 5 * max(est.stderr, 1e-9)

    def test_enumeration_cap(self):
        plan = plan_replacements(qft(8), 0.1, 0.8)
        if 2 ** len(plan.accepted) > 64:
            with pytest.raises(ValueError):
                expected_two_qubit_count(plan, max_subsets=64)


class TestSweep:
    def test_fixed_circuit_single_realization(self):
        records = sweep(qft(4), [0.05], [0.0, 0.5, 1.0], n_shots=8, n_realizations=7, seed=3)
        assert len(records) == 3
        assert {r.realization for r in records} == {0}

    def test_p_zero_column_is_baseline(self):
        records = sweep(qft(4), [0.1], [0.0], n_shots=8, seed=3)
        (row,) = records
        assert row.mean_2q == row.baseline_2q and row.stderr_2q == 0.0

    def test_p_one_column_uses_squash(self):
        records = sweep(qft(8), [0.1], [1.0], n_shots=4, seed=3)
        (row,) = records
        assert row.stderr_2q == 0.0
        assert row.mean_2q == row.baseline_2q - 2 * row.n_accepted

    def test_budget_column_within_epsilon(self):
        records = sweep(
            lambda s: random_circuit(4, 60, seed=s),
            [0.01, 0.05],
            [0.25, 0.75],
            n_shots=8,
            n_realizations=3,
            seed=11,
        )
        assert len(records) == 12
        for row in records:
            assert row.spent_budget <= row.epsilon + 1e-15
            assert row.d_upper == row.spent_budget

    def test_csv_deterministic(self):
        args = dict(epsilons=[0.05], ps=[0.5, 1.0], n_shots=16, n_realizations=2, seed=42)
        a = records_to_csv(sweep(lambda s: random_circuit(4, 40, seed=s), **args))
        b = records_to_csv(sweep(lambda s: random_circuit(4, 40, seed=s), **args))
        assert a == b
        assert a.splitlines()[0] == CSV_HEADER

    def test_empty_grids_rejected(self):
        with pytest.raises(ValueError):
            sweep(qft(3), [], [0.5], n_shots=4)
