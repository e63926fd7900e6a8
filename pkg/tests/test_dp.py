"""Exact finite-state dynamic programming over GF(p).

The finite-horizon solver is checked against brute-force enumeration of
all input sequences (an independent oracle: no recursion involved).  The
discounted solvers are checked against hand-derived closed forms, the
exact Bellman residual, and each other.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dpdecomp.dp import (ArgminTable, CostFunction, DiscountedHorizon,
                         DPInstance, FiniteHorizon, ValueTable,
                         bellman_residual, enumerate_states,
                         evaluate_openloop, evaluate_stationary_policy,
                         evaluate_time_varying, index_state, is_in_Gs,
                         solve_discounted_pi, solve_discounted_vi,
                         solve_finite, state_index)
from dpdecomp.fields import PrimeField
from dpdecomp.linalg import DirectSumDecomposition, MatrixFp, Subspace

F2 = PrimeField(2)
F3 = PrimeField(3)

HALF = Fraction(1, 2)


def _strict_table(rng_vals, size):
    return [Fraction(0)] + [Fraction(v) for v in rng_vals[:size - 1]]


@st.composite
def finite_instances(draw):
    p = draw(st.sampled_from([2, 3]))
    F = PrimeField(p)
    n = draw(st.integers(1, 2))
    m = draw(st.integers(1, 2))
    A = MatrixFp(F, n, n, draw(st.lists(st.integers(0, p - 1),
                                        min_size=n * n, max_size=n * n)))
    B = MatrixFp(F, n, m, draw(st.lists(st.integers(0, p - 1),
                                        min_size=n * m, max_size=n * m)))
    vals = draw(st.lists(st.integers(1, 5), min_size=p**n - 1, max_size=p**n - 1))
    cost = CostFunction(F, n, _strict_table(vals, p**n))
    T = draw(st.integers(1, 3))
    return DPInstance(A, B, cost, FiniteHorizon(T), require_injective=False)


@st.composite
def discounted_instances(draw):
    p = draw(st.sampled_from([2, 3]))
    F = PrimeField(p)
    n = draw(st.integers(1, 2))
    m = draw(st.integers(1, 2))
    A = MatrixFp(F, n, n, draw(st.lists(st.integers(0, p - 1),
                                        min_size=n * n, max_size=n * n)))
    B = MatrixFp(F, n, m, draw(st.lists(st.integers(0, p - 1),
                                        min_size=n * m, max_size=n * m)))
    vals = draw(st.lists(st.integers(1, 5), min_size=p**n - 1, max_size=p**n - 1))
    cost = CostFunction(F, n, _strict_table(vals, p**n))
    alpha = draw(st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 3)]))
    return DPInstance(A, B, cost, DiscountedHorizon(alpha), require_injective=False)


def brute_force_minimum(inst, x_idx):
    """Enumerate every input sequence of length T; no recursion."""
    T = inst.horizon.T
    g = inst.cost.table
    best = None
    for seq in itertools.product(range(inst.num_inputs), repeat=T):
        x = x_idx
        total = g[x]
        for u in seq:
            x = inst.step(x, u)
            total += g[x]
        if best is None or total < best:
            best = total
    return best


# === state indexing ===

@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 4), st.data())
def test_index_roundtrip(p, n, data):
    digits = data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    idx = state_index(digits, p)
    assert index_state(idx, p, n) == tuple(digits)
    assert state_index(index_state(idx, p, n), p) == idx


def test_index_is_little_endian():
    assert state_index((1, 0, 0), 3) == 1
    assert state_index((0, 1, 0), 3) == 3
    assert state_index((0, 0, 1), 3) == 9
    assert state_index((2, 1, 0), 3) == 5


def test_enumerate_states_order():
    states = list(enumerate_states(2, 2))
    assert states == [(0, 0), (1, 0), (0, 1), (1, 1)]


# === cost validation ===

def test_cost_must_vanish_at_zero():
    with pytest.raises(ValueError, match="vanish at the zero state"):
        CostFunction(F2, 1, [Fraction(1), Fraction(1)])


def test_cost_must_be_nonnegative():
    with pytest.raises(ValueError, match="nonnegative"):
        CostFunction(F2, 1, [Fraction(0), Fraction(-1)])


def test_cost_vanishing_needs_flag():
    with pytest.raises(ValueError, match="allow_vanishing"):
        CostFunction(F2, 2, [0, 1, 0, 1])
    c = CostFunction(F2, 2, [0, 1, 0, 1], allow_vanishing=True)
    assert not c.is_strict
    assert CostFunction(F2, 2, [0, 1, 1, 1]).is_strict


def test_cost_table_size_checked():
    with pytest.raises(ValueError, match="entries"):
        CostFunction(F2, 2, [0, 1, 1])


def test_indicator_weight_validation():
    parts = [Subspace(F2, 2, [(1, 0)]), Subspace(F2, 2, [(0, 1)])]
    D = DirectSumDecomposition(parts)
    with pytest.raises(ValueError):
        CostFunction.indicator(D, [Fraction(1)])
    with pytest.raises(ValueError):
        CostFunction.indicator(D, [Fraction(-1), Fraction(1)])
    with pytest.raises(ValueError):
        CostFunction.indicator(D, [Fraction(0), Fraction(0)])
    c = CostFunction.indicator(D, [Fraction(1), Fraction(2)])
    # states ordered (00),(10),(01),(11)
    assert c.table == (Fraction(0), Fraction(1), Fraction(2), Fraction(3))


def test_separable_constructor():
    parts = [Subspace(F3, 2, [(1, 0)]), Subspace(F3, 2, [(0, 1)])]
    D = DirectSumDecomposition(parts)
    c = CostFunction.separable(D, [[0, 1, 4], [0, 2, 2]])
    assert c.value((2, 1)) == Fraction(6)
    assert is_in_Gs(c, D)
    with pytest.raises(ValueError, match="entries"):
        CostFunction.separable(D, [[0, 1], [0, 2, 2]])


def test_is_in_Gs_detects_coupling():
    parts = [Subspace(F3, 2, [(1, 0)]), Subspace(F3, 2, [(0, 1)])]
    D = DirectSumDecomposition(parts)
    base = CostFunction.indicator(D, [Fraction(1), Fraction(1)])
    coupled = list(base.table)
    coupled[state_index((1, 1), 3)] += 1
    assert not is_in_Gs(CostFunction(F3, 2, coupled), D)


# === instance validation ===

def test_horizon_validation():
    with pytest.raises(ValueError):
        FiniteHorizon(0)
    with pytest.raises(ValueError):
        DiscountedHorizon(Fraction(1))
    with pytest.raises(ValueError):
        DiscountedHorizon(Fraction(0))
    assert DiscountedHorizon(Fraction(1, 2)).alpha == HALF


def test_state_space_guard():
    A = MatrixFp.identity(F3, 7)
    B = MatrixFp.zeros(F3, 7, 1)
    cost = CostFunction.from_callable(F3, 7, lambda x: Fraction(int(any(x))),
                                      allow_vanishing=True)
    with pytest.raises(ValueError, match="guard"):
        DPInstance(A, B, cost, FiniteHorizon(1), require_injective=False)
    inst = DPInstance(A, B, cost, FiniteHorizon(1), require_injective=False,
                      max_states=None)
    assert inst.num_states == 3**7


def test_injective_input_map_required_by_default():
    A = MatrixFp.identity(F2, 2)
    B = MatrixFp.from_rows(F2, [[1, 1], [0, 0]])
    cost = CostFunction(F2, 2, [0, 1, 1, 1])
    with pytest.raises(ValueError, match="column rank"):
        DPInstance(A, B, cost, FiniteHorizon(1))
    DPInstance(A, B, cost, FiniteHorizon(1), require_injective=False)


def test_with_horizon_shares_transitions():
    A = MatrixFp.identity(F2, 1)
    B = MatrixFp.identity(F2, 1)
    cost = CostFunction(F2, 1, [0, 1])
    inst = DPInstance(A, B, cost, FiniteHorizon(2))
    t1 = inst.transitions()
    inst2 = inst.with_horizon(DiscountedHorizon(HALF))
    assert inst2.transitions() is t1
    assert isinstance(inst2.horizon, DiscountedHorizon)


# === finite-horizon solver ===

@given(finite_instances())
@settings(max_examples=60, deadline=None)
def test_finite_matches_brute_force(inst):
    values, _ = solve_finite(inst)
    for x in range(inst.num_states):
        assert values.value(x, 0) == brute_force_minimum(inst, x)


@given(finite_instances())
@settings(max_examples=40, deadline=None)
def test_finite_argmin_sets_are_exact(inst):
    values, argmin = solve_finite(inst)
    T = inst.horizon.T
    g = inst.cost.table
    for t in range(T):
        nxt = values.per_time[t + 1]
        for x in range(inst.num_states):
            chosen = argmin.at(x, t)
            assert chosen
            achieved = {nxt[inst.step(x, u)] for u in chosen}
            assert achieved == {values.value(x, t) - g[x]}
            for u in range(inst.num_inputs):
                if u not in chosen:
                    assert nxt[inst.step(x, u)] > values.value(x, t) - g[x]


@given(finite_instances())
@settings(max_examples=30, deadline=None)
def test_openloop_never_beats_optimum(inst):
    values, argmin = solve_finite(inst)
    T = inst.horizon.T
    p = inst.field.p
    for x0_idx in range(inst.num_states):
        # arbitrary fixed sequence: all-zeros input
        zeros = [(0,) * inst.m] * T
        assert evaluate_openloop(inst, inst.state_vector(x0_idx), zeros) \
            >= values.value(x0_idx, 0)
        # greedy sequence along the argmin table achieves the optimum
        seq = []
        x = x0_idx
        for t in range(T):
            u = min(argmin.at(x, t))
            seq.append(index_state(u, p, inst.m))
            x = inst.step(x, u)
        assert evaluate_openloop(inst, inst.state_vector(x0_idx), seq) \
            == values.value(x0_idx, 0)


def test_openloop_length_checked():
    A = MatrixFp.identity(F2, 1)
    inst = DPInstance(A, A, CostFunction(F2, 1, [0, 1]), FiniteHorizon(2))
    with pytest.raises(ValueError, match="T inputs"):
        evaluate_openloop(inst, (1,), [(0,)])


@given(finite_instances())
@settings(max_examples=30, deadline=None)
def test_time_varying_argmin_law_is_optimal(inst):
    values, argmin = solve_finite(inst)
    T = inst.horizon.T
    law = [[min(argmin.at(x, t)) for x in range(inst.num_states)]
           for t in range(T)]
    assert evaluate_time_varying(inst, law) == values.table(0)


def test_finite_hand_example():
    # x' = x + u over GF(2), g = [0, 1], T = 2: leave 1 immediately
    A = MatrixFp.identity(F2, 1)
    inst = DPInstance(A, A, CostFunction(F2, 1, [0, 1]), FiniteHorizon(2))
    values, argmin = solve_finite(inst)
    assert values.table(0) == (Fraction(0), Fraction(1))
    assert values.table(2) == (Fraction(0), Fraction(1))
    assert argmin.at(0, 0) == frozenset({0})
    assert argmin.at(1, 0) == frozenset({1})
    with pytest.raises(ValueError):
        values.stationary


# === discounted solvers ===

def test_discounted_scalar_closed_form():
    A = MatrixFp.identity(F2, 1)
    inst = DPInstance(A, A, CostFunction(F2, 1, [0, 1]), DiscountedHorizon(HALF))
    values, argmin = solve_discounted_pi(inst)
    assert values.stationary == (Fraction(0), Fraction(1))
    assert argmin.stationary[1] == frozenset({1})
    assert bellman_residual(inst, values) == 0


def test_discounted_uncontrollable_cycle():
    # x' = 2x over GF(3), input has no effect: nonzero states cycle forever
    # paying 1 per step, so J*(x) = 1/(1 - alpha) = 2 at alpha = 1/2
    A = MatrixFp.from_rows(F3, [[2]])
    B = MatrixFp.zeros(F3, 1, 1)
    cost = CostFunction(F3, 1, [0, 1, 1])
    inst = DPInstance(A, B, cost, DiscountedHorizon(HALF), require_injective=False)
    values, _ = solve_discounted_pi(inst)
    assert values.stationary == (Fraction(0), Fraction(2), Fraction(2))


@given(discounted_instances())
@settings(max_examples=40, deadline=None)
def test_pi_residual_is_exactly_zero(inst):
    values, argmin = solve_discounted_pi(inst)
    assert bellman_residual(inst, values) == 0
    # the greedy stationary policy from the argmin table reproduces J*
    policy = [min(argmin.stationary[x]) for x in range(inst.num_states)]
    evaluated = evaluate_stationary_policy(inst, policy)
    assert evaluated.stationary == values.stationary


@given(discounted_instances())
@settings(max_examples=25, deadline=None)
def test_vi_respects_error_bound(inst):
    exact, _ = solve_discounted_pi(inst)
    tol = Fraction(1, 100)
    result = solve_discounted_vi(inst, tol)
    alpha = inst.horizon.alpha
    assert result.error_bound == alpha * tol / (1 - alpha)
    gap = max(abs(a - b) for a, b in
              zip(result.values.stationary, exact.stationary))
    assert gap <= result.error_bound
    assert result.iterations >= 1


def test_vi_rejects_bad_tolerance():
    A = MatrixFp.identity(F2, 1)
    inst = DPInstance(A, A, CostFunction(F2, 1, [0, 1]), DiscountedHorizon(HALF))
    with pytest.raises(ValueError, match="positive"):
        solve_discounted_vi(inst, Fraction(0))


def test_solver_horizon_mismatch():
    A = MatrixFp.identity(F2, 1)
    cost = CostFunction(F2, 1, [0, 1])
    fin = DPInstance(A, A, cost, FiniteHorizon(1))
    disc = DPInstance(A, A, cost, DiscountedHorizon(HALF))
    with pytest.raises(ValueError):
        solve_finite(disc)
    with pytest.raises(ValueError):
        solve_discounted_pi(fin)
    with pytest.raises(ValueError):
        solve_discounted_vi(fin, Fraction(1, 10))
