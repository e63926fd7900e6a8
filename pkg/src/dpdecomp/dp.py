"""Exact dynamic programming for linear dynamics over GF(p).

States live in GF(p)^n and are indexed by the base-p little-endian bijection
(digit k is coordinate k), inputs in GF(p)^m likewise.  Stage costs are
exact rationals, so every comparison the solvers make is decidable: the
finite-horizon recursion, policy iteration, and stationary-policy evaluation
all return exact values, and value iteration is the one deliberately
approximate route (with an explicit error bound).

Everything here enumerates the full state and input spaces; guard limits
keep that honest (defaults p^n <= 729 and p^m <= 81, both overridable).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import ShapeError
from .fields import PrimeField
from .linalg import DirectSumDecomposition, MatrixFp

DEFAULT_MAX_STATES = 729
DEFAULT_MAX_INPUTS = 81

ZERO = Fraction(0)


@dataclass(frozen=True)
class FiniteHorizon:
    """Run for steps 0..T-1 and pay the stage cost at times 0..T inclusive."""

    T: int

    def __post_init__(self):
        if not isinstance(self.T, int) or self.T < 1:
            raise ValueError("finite horizon requires an integer T >= 1")


@dataclass(frozen=True)
class DiscountedHorizon:
    """Infinite horizon with geometric discount alpha strictly inside (0, 1)."""

    alpha: Fraction

    def __post_init__(self):
        a = Fraction(self.alpha)
        if not (0 < a < 1):
            raise ValueError("discount factor must satisfy 0 < alpha < 1")
        object.__setattr__(self, "alpha", a)


Horizon = FiniteHorizon | DiscountedHorizon


def state_index(x: Sequence[int], p: int) -> int:
    """Base-p little-endian index of a digit vector."""
    idx = 0
    for k in range(len(x) - 1, -1, -1):
        idx = idx * p + (x[k] % p)
    return idx


def index_state(idx: int, p: int, n: int) -> tuple[int, ...]:
    digits = []
    for _ in range(n):
        digits.append(idx % p)
        idx //= p
    return tuple(digits)


def enumerate_states(p: int, n: int) -> Iterator[tuple[int, ...]]:
    for idx in range(p**n):
        yield index_state(idx, p, n)


class CostFunction:
    """A nonnegative stage cost g on GF(p)^n with g(0) = 0, stored densely.

    By default g must be strictly positive away from the origin; passing
    allow_vanishing=True admits costs that are zero on part of the space
    (needed for costs that charge only some invariant coordinates).  The
    is_strict property records which case actually holds.
    """

    __slots__ = ("field", "n", "table", "allow_vanishing", "is_strict")

    def __init__(self, field: PrimeField, n: int, table: Sequence[Fraction],
                 allow_vanishing: bool = False):
        size = field.p**n
        values = tuple(Fraction(v) for v in table)
        if len(values) != size:
            raise ValueError(f"cost table must have {size} entries, got {len(values)}")
        if any(v < 0 for v in values):
            raise ValueError("stage cost must be nonnegative")
        if values[0] != 0:
            raise ValueError("stage cost must vanish at the zero state")
        strict = all(v > 0 for v in values[1:])
        if not strict and not allow_vanishing:
            raise ValueError(
                "stage cost vanishes at a nonzero state; pass allow_vanishing=True "
                "if that is intended")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "table", values)
        object.__setattr__(self, "allow_vanishing", allow_vanishing)
        object.__setattr__(self, "is_strict", strict)

    def __setattr__(self, name, value):
        raise AttributeError("CostFunction is immutable")

    @classmethod
    def from_callable(cls, field: PrimeField, n: int,
                      fn: Callable[[tuple[int, ...]], Fraction],
                      allow_vanishing: bool = False) -> "CostFunction":
        table = [Fraction(fn(x)) for x in enumerate_states(field.p, n)]
        return cls(field, n, table, allow_vanishing=allow_vanishing)

    @classmethod
    def indicator(cls, decomp: DirectSumDecomposition,
                  weights: Sequence[Fraction]) -> "CostFunction":
        """g(x) = sum of w_i over the parts whose component of x is nonzero."""
        if len(weights) != decomp.r:
            raise ValueError("one weight per part required")
        ws = [Fraction(w) for w in weights]
        if any(w < 0 for w in ws):
            raise ValueError("indicator weights must be nonnegative")
        if all(w == 0 for w in ws):
            raise ValueError("at least one indicator weight must be positive")
        field = decomp.field
        n = decomp.ambient_dim

        def fn(x):
            locals_ = decomp.local_coords(x)
            return sum((w for w, loc in zip(ws, locals_) if any(loc)), ZERO)

        return cls.from_callable(field, n, fn, allow_vanishing=any(w == 0 for w in ws))

    @classmethod
    def separable(cls, decomp: DirectSumDecomposition,
                  part_tables: Sequence[Sequence[Fraction]],
                  allow_vanishing: bool = False) -> "CostFunction":
        """g(x) = sum over parts of g_i at the part-i coordinates of x.

        Each part table is indexed by the base-p index of the part's local
        coordinate vector.
        """
        if len(part_tables) != decomp.r:
            raise ValueError("one table per part required")
        field = decomp.field
        p = field.p
        tables = []
        for i, t in enumerate(part_tables):
            want = p ** decomp.parts[i].dim
            vals = tuple(Fraction(v) for v in t)
            if len(vals) != want:
                raise ValueError(f"part {i} table must have {want} entries")
            tables.append(vals)

        def fn(x):
            locals_ = decomp.local_coords(x)
            return sum((tables[i][state_index(loc, p)] for i, loc in enumerate(locals_)),
                       ZERO)

        return cls.from_callable(field, decomp.ambient_dim, fn,
                                 allow_vanishing=allow_vanishing)

    def __call__(self, idx: int) -> Fraction:
        return self.table[idx]

    def value(self, x: Sequence[int]) -> Fraction:
        return self.table[state_index(x, self.field.p)]


class DPInstance:
    """A control problem: x' = A x + B u over GF(p), stage cost g, horizon.

    B must have full column rank for problems stated directly (the standing
    assumption); derived subproblems whose input map is a projection of B may
    pass require_injective=False.
    """

    __slots__ = ("field", "n", "m", "A", "B", "cost", "horizon", "_trans")

    def __init__(self, A: MatrixFp, B: MatrixFp, cost: CostFunction, horizon: Horizon,
                 *, require_injective: bool = True,
                 max_states: int | None = DEFAULT_MAX_STATES,
                 max_inputs: int | None = DEFAULT_MAX_INPUTS):
        if A.nrows != A.ncols:
            raise ShapeError("A must be square")
        if B.nrows != A.nrows:
            raise ShapeError("B must have as many rows as A")
        if B.field != A.field:
            raise ValueError("A and B must share a field")
        if cost.field != A.field or cost.n != A.nrows:
            raise ValueError("cost function does not match the state space")
        if not isinstance(horizon, (FiniteHorizon, DiscountedHorizon)):
            raise ValueError(f"unsupported horizon {horizon!r}")
        p = A.field.p
        n, m = A.nrows, B.ncols
        if max_states is not None and p**n > max_states:
            raise ValueError(
                f"state space size {p**n} exceeds the guard {max_states}; "
                "raise max_states to override")
        if max_inputs is not None and p**m > max_inputs:
            raise ValueError(
                f"input space size {p**m} exceeds the guard {max_inputs}; "
                "raise max_inputs to override")
        if require_injective and B.rank() < m:
            raise ValueError("B must have full column rank (injective input map)")
        object.__setattr__(self, "field", A.field)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "_trans", None)

    def __setattr__(self, name, value):
        raise AttributeError("DPInstance is immutable")

    @property
    def num_states(self) -> int:
        return self.field.p**self.n

    @property
    def num_inputs(self) -> int:
        return self.field.p**self.m

    def with_horizon(self, horizon: Horizon) -> "DPInstance":
        inst = DPInstance(self.A, self.B, self.cost, horizon,
                          require_injective=False, max_states=None, max_inputs=None)
        # transitions are horizon-independent; share the table
        object.__setattr__(inst, "_trans", self.transitions())
        return inst

    def input_vector(self, u_idx: int) -> tuple[int, ...]:
        return index_state(u_idx, self.field.p, self.m)

    def state_vector(self, x_idx: int) -> tuple[int, ...]:
        return index_state(x_idx, self.field.p, self.n)

    def transitions(self) -> list[list[int]]:
        """next-state index for every (state, input) pair, computed once."""
        if self._trans is None:
            p = self.field.p
            ax = [self.A.matvec(x) for x in enumerate_states(p, self.n)]
            bu = [self.B.matvec(u) for u in enumerate_states(p, self.m)]
            table = []
            for a in ax:
                table.append([state_index(tuple((ai + bi) % p for ai, bi in zip(a, b)), p)
                              for b in bu])
            object.__setattr__(self, "_trans", table)
        return self._trans

    def step(self, x_idx: int, u_idx: int) -> int:
        return self.transitions()[x_idx][u_idx]


@dataclass(frozen=True)
class ValueTable:
    """Optimal (or policy) values per state; one table per time for finite
    horizons (times 0..T), a single table for discounted problems."""

    horizon: Horizon
    per_time: tuple[tuple[Fraction, ...], ...]

    @property
    def stationary(self) -> tuple[Fraction, ...]:
        if not isinstance(self.horizon, DiscountedHorizon):
            raise ValueError("stationary table only exists for discounted horizons")
        return self.per_time[0]

    def table(self, t: int = 0) -> tuple[Fraction, ...]:
        return self.per_time[t]

    def value(self, x_idx: int, t: int = 0) -> Fraction:
        return self.per_time[t][x_idx]


@dataclass(frozen=True)
class ArgminTable:
    """Full minimizer sets per state; per time 0..T-1 for finite horizons,
    a single table for discounted problems."""

    horizon: Horizon
    per_time: tuple[tuple[frozenset[int], ...], ...]

    @property
    def stationary(self) -> tuple[frozenset[int], ...]:
        if not isinstance(self.horizon, DiscountedHorizon):
            raise ValueError("stationary table only exists for discounted horizons")
        return self.per_time[0]

    def at(self, x_idx: int, t: int = 0) -> frozenset[int]:
        return self.per_time[t][x_idx]


def _minimize(values: Sequence[Fraction], next_states: Sequence[int]) -> tuple[Fraction, frozenset[int]]:
    best = None
    chosen: list[int] = []
    for u, nx in enumerate(next_states):
        v = values[nx]
        if best is None or v < best:
            best = v
            chosen = [u]
        elif v == best:
            chosen.append(u)
    return best, frozenset(chosen)


def solve_finite(inst: DPInstance) -> tuple[ValueTable, ArgminTable]:
    """Backward recursion: J_T = g, J_t = g + min over inputs of J_{t+1} at
    the successor; minimizer sets are recorded in full for every t in 0..T-1."""
    if not isinstance(inst.horizon, FiniteHorizon):
        raise ValueError("solve_finite needs a finite horizon")
    T = inst.horizon.T
    trans = inst.transitions()
    g = inst.cost.table
    per_time_values: list[tuple[Fraction, ...]] = [None] * (T + 1)  # type: ignore
    per_time_argmin: list[tuple[frozenset[int], ...]] = [None] * T  # type: ignore
    per_time_values[T] = g
    for t in range(T - 1, -1, -1):
        nxt = per_time_values[t + 1]
        row_values = []
        row_argmin = []
        for x in range(inst.num_states):
            best, chosen = _minimize(nxt, trans[x])
            row_values.append(g[x] + best)
            row_argmin.append(chosen)
        per_time_values[t] = tuple(row_values)
        per_time_argmin[t] = tuple(row_argmin)
    return (ValueTable(inst.horizon, tuple(per_time_values)),
            ArgminTable(inst.horizon, tuple(per_time_argmin)))


def _closed_loop_successors(inst: DPInstance, policy: Sequence[int]) -> list[int]:
    trans = inst.transitions()
    return [trans[x][policy[x]] for x in range(inst.num_states)]


def evaluate_stationary_policy(inst: DPInstance, policy: Sequence[int]) -> ValueTable:
    """Exact discounted value of a stationary policy.

    Every trajectory of the closed-loop map is a tail into a cycle; the
    prefix is summed term by term and the cycle contributes its discounted
    lap cost times 1/(1 - alpha^L), all in exact rationals.
    """
    if not isinstance(inst.horizon, DiscountedHorizon):
        raise ValueError("stationary-policy evaluation needs a discounted horizon")
    if len(policy) != inst.num_states:
        raise ValueError("policy must assign an input to every state")
    alpha = inst.horizon.alpha
    g = inst.cost.table
    nxt = _closed_loop_successors(inst, policy)
    values: list[Fraction | None] = [None] * inst.num_states
    for start in range(inst.num_states):
        if values[start] is not None:
            continue
        path: list[int] = []
        pos: dict[int, int] = {}
        x = start
        while values[x] is None and x not in pos:
            pos[x] = len(path)
            path.append(x)
            x = nxt[x]
        if values[x] is None:
            # closed a fresh cycle at path[pos[x]:]
            cycle = path[pos[x]:]
            lap = ZERO
            a_pow = Fraction(1)
            for s in cycle:
                lap += a_pow * g[s]
                a_pow *= alpha
            values[cycle[0]] = lap / (1 - a_pow)  # a_pow is alpha^len(cycle)
            # fill the rest of the cycle walking backwards from the head
            for idx in range(len(cycle) - 1, 0, -1):
                s = cycle[idx]
                values[s] = g[s] + alpha * values[nxt[s]]
            prefix_end = pos[x]
        else:
            prefix_end = len(path)
        for idx in range(prefix_end - 1, -1, -1):
            s = path[idx]
            values[s] = g[s] + alpha * values[nxt[s]]
    return ValueTable(inst.horizon, (tuple(values),))


def solve_discounted_pi(inst: DPInstance) -> tuple[ValueTable, ArgminTable]:
    """Exact policy iteration.

    Starts from the greedy-on-g policy (cheapest successor stage cost,
    lowest input index on ties), alternates exact evaluation with greedy
    improvement, and only switches an action on a strict improvement, which
    rules out cycling.  On convergence the values satisfy the fixed-point
    equation exactly and the returned minimizer sets are complete.
    """
    if not isinstance(inst.horizon, DiscountedHorizon):
        raise ValueError("solve_discounted_pi needs a discounted horizon")
    trans = inst.transitions()
    g = inst.cost.table
    policy = []
    for x in range(inst.num_states):
        _, chosen = _minimize(g, trans[x])
        policy.append(min(chosen))
    while True:
        values = evaluate_stationary_policy(inst, policy).stationary
        improved = False
        for x in range(inst.num_states):
            best, chosen = _minimize(values, trans[x])
            if values[trans[x][policy[x]]] > best:
                policy[x] = min(chosen)
                improved = True
        if not improved:
            break
    argmin = tuple(_minimize(values, trans[x])[1] for x in range(inst.num_states))
    return (ValueTable(inst.horizon, (tuple(values),)),
            ArgminTable(inst.horizon, (argmin,)))


@dataclass(frozen=True)
class ValueIterationResult:
    values: ValueTable
    error_bound: Fraction
    iterations: int


def solve_discounted_vi(inst: DPInstance, tol: Fraction) -> ValueIterationResult:
    """Value iteration from J = 0 until successive sup-norm change <= tol.

    The returned table J satisfies |J - J*| <= alpha * tol / (1 - alpha) in
    sup norm, which is the error_bound field.
    """
    if not isinstance(inst.horizon, DiscountedHorizon):
        raise ValueError("solve_discounted_vi needs a discounted horizon")
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    alpha = inst.horizon.alpha
    trans = inst.transitions()
    g = inst.cost.table
    current = tuple(ZERO for _ in range(inst.num_states))
    iterations = 0
    while True:
        iterations += 1
        new = tuple(g[x] + alpha * _minimize(current, trans[x])[0]
                    for x in range(inst.num_states))
        delta = max(abs(a - b) for a, b in zip(new, current))
        current = new
        if delta <= tol:
            break
    bound = alpha * tol / (1 - alpha)
    return ValueIterationResult(ValueTable(inst.horizon, (current,)), bound, iterations)


def evaluate_openloop(inst: DPInstance, x0: Sequence[int], inputs: Sequence[Sequence[int]]) -> Fraction:
    """Total finite-horizon cost of a fixed input sequence from x0.

    The sequence has length T; the stage cost is charged at times 0..T.
    """
    if not isinstance(inst.horizon, FiniteHorizon):
        raise ValueError("open-loop evaluation needs a finite horizon")
    if len(inputs) != inst.horizon.T:
        raise ValueError("need exactly T inputs")
    p = inst.field.p
    x = state_index(x0, p)
    total = inst.cost.table[x]
    for u in inputs:
        x = inst.step(x, state_index(u, p))
        total += inst.cost.table[x]
    return total


def evaluate_time_varying(inst: DPInstance, law: Sequence[Sequence[int]]) -> tuple[Fraction, ...]:
    """Finite-horizon cost-from-start of a time-varying control law.

    law[t][x] is the input index applied at time t in state x, for t in
    0..T-1.  Returns the total cost from every start state.
    """
    if not isinstance(inst.horizon, FiniteHorizon):
        raise ValueError("closed-loop evaluation needs a finite horizon")
    T = inst.horizon.T
    if len(law) != T:
        raise ValueError("law must cover times 0..T-1")
    trans = inst.transitions()
    g = inst.cost.table
    out = []
    for start in range(inst.num_states):
        x = start
        total = g[x]
        for t in range(T):
            x = trans[x][law[t][x]]
            total += g[x]
        out.append(total)
    return tuple(out)


def is_in_Gs(cost: CostFunction, decomp: DirectSumDecomposition) -> bool:
    """Exhaustive separability test: g(x) equals the sum of g over the
    components of x for every state."""
    if decomp.field != cost.field or decomp.ambient_dim != cost.n:
        raise ValueError("decomposition does not match the cost's state space")
    p = cost.field.p
    for idx in range(p**cost.n):
        x = index_state(idx, p, cost.n)
        total = ZERO
        for i in range(decomp.r):
            comp = decomp.component(i, x)
            total += cost.table[state_index(comp, p)]
        if total != cost.table[idx]:
            return False
    return True


def bellman_residual(inst: DPInstance, values: ValueTable) -> Fraction:
    """Max absolute defect of the optimality recursion over all states
    (and times, for finite horizons).  Zero certifies exact optimality."""
    trans = inst.transitions()
    g = inst.cost.table
    worst = ZERO
    if isinstance(inst.horizon, FiniteHorizon):
        T = inst.horizon.T
        for x in range(inst.num_states):
            defect = abs(values.per_time[T][x] - g[x])
            worst = max(worst, defect)
        for t in range(T):
            nxt = values.per_time[t + 1]
            for x in range(inst.num_states):
                best, _ = _minimize(nxt, trans[x])
                worst = max(worst, abs(values.per_time[t][x] - (g[x] + best)))
        return worst
    alpha = inst.horizon.alpha
    table = values.stationary
    for x in range(inst.num_states):
        best, _ = _minimize(table, trans[x])
        worst = max(worst, abs(table[x] - (g[x] + alpha * best)))
    return worst
