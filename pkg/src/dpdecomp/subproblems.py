"""Per-part control subproblems induced by an invariant splitting.

Given a parent problem and an invariant direct sum of its state space, each
part gets two local problems on its own coordinates:

* restricted: inputs range over the part's feasible input subspace, the
  preimage of the part under B (possibly zero-dimensional, which makes the
  local problem autonomous with a single empty input);
* projected: inputs range over the whole input space, but the input matrix
  is the composition of B with the projection onto the part, which need not
  be injective.

The input space itself splits as the direct sum of the feasible input
subspaces plus a complement chosen by greedily extending with standard
basis vectors.  Separability of the stage cost across the parts is required
up front; the local costs are the parent cost read through each part's
embedding.
"""

from __future__ import annotations

from typing import Literal, Sequence

from .dp import (
    ArgminTable,
    CostFunction,
    DPInstance,
    FiniteHorizon,
    ValueTable,
    enumerate_states,
    is_in_Gs,
    solve_discounted_pi,
    solve_finite,
    state_index,
)
from .errors import NotSeparableCost
from .invariant_decomp import verify_decomposition
from .linalg import DirectSumDecomposition, MatrixFp, Subspace, preimage, subspace_sum

Family = Literal["restricted", "projected"]


class SubproblemBundle:
    """The two families of local problems for one parent and splitting."""

    __slots__ = ("parent", "decomp", "input_parts", "input_span", "complement",
                 "restricted", "projected", "_component_tables")

    def __init__(self, parent: DPInstance, decomp: DirectSumDecomposition,
                 input_parts: list[Subspace], complement: Subspace,
                 restricted: list[DPInstance], projected: list[DPInstance]):
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "decomp", decomp)
        object.__setattr__(self, "input_parts", input_parts)
        span = Subspace.zero(parent.field, parent.m)
        for e in input_parts:
            span = subspace_sum(span, e)
        object.__setattr__(self, "input_span", span)
        object.__setattr__(self, "complement", complement)
        object.__setattr__(self, "restricted", restricted)
        object.__setattr__(self, "projected", projected)
        object.__setattr__(self, "_component_tables", None)

    def __setattr__(self, name, value):
        raise AttributeError("SubproblemBundle is immutable")

    @property
    def r(self) -> int:
        return self.decomp.r

    def state_basis(self, i: int) -> MatrixFp:
        """Embedding of part i's coordinates into the ambient state space."""
        return self.decomp.parts[i].basis_matrix()

    def input_basis(self, i: int) -> MatrixFp:
        """Embedding of part i's feasible input coordinates into the input space."""
        return self.input_parts[i].basis_matrix()

    def family(self, name: Family) -> list[DPInstance]:
        if name == "restricted":
            return self.restricted
        if name == "projected":
            return self.projected
        raise ValueError(f"unknown family {name!r}")

    def component_state_tables(self) -> list[list[int]]:
        """For each part, the local state index of every parent state's
        component; computed once and cached."""
        if self._component_tables is None:
            p = self.parent.field.p
            tables: list[list[int]] = [[] for _ in range(self.r)]
            for x in enumerate_states(p, self.parent.n):
                locals_ = self.decomp.local_coords(x)
                for i, loc in enumerate(locals_):
                    tables[i].append(state_index(loc, p))
            object.__setattr__(self, "_component_tables", tables)
        return self._component_tables


def _local_matrix(part: Subspace, images: Sequence[Sequence[int]]) -> MatrixFp:
    """Matrix of a map into the part, written in the part's canonical basis."""
    cols = []
    for img in images:
        coords = part.coords_of(img)
        assert coords is not None, "image left the invariant part"
        cols.append(list(coords))
    return MatrixFp.from_cols(part.field, cols, nrows=part.dim)


def build_bundle(inst: DPInstance, decomp: DirectSumDecomposition) -> SubproblemBundle:
    """Construct both subproblem families for a parent problem and splitting.

    Raises NotInvariant / NotDirectSum if the splitting is not an invariant
    direct sum for the parent dynamics, and NotSeparableCost if the stage
    cost does not split additively across the parts.
    """
    if decomp.field != inst.field or decomp.ambient_dim != inst.n:
        raise ValueError("splitting does not match the parent state space")
    verify_decomposition(inst.A, decomp)
    if not is_in_Gs(inst.cost, decomp):
        raise NotSeparableCost(
            "stage cost is not additive across the given parts")

    field = inst.field
    input_parts = [preimage(inst.B, part) for part in decomp.parts]

    # complement of the feasible-input span, grown from standard basis vectors
    spanning = [list(b) for e in input_parts for b in e.basis_vectors()]
    added: list[list[int]] = []
    rank = MatrixFp.from_rows(field, spanning, ncols=inst.m).rank() if spanning else 0
    for j in range(inst.m):
        e_j = [1 if k == j else 0 for k in range(inst.m)]
        candidate = MatrixFp.from_rows(field, spanning + added + [e_j], ncols=inst.m)
        if candidate.rank() > rank + len(added):
            added.append(e_j)
    complement = Subspace(field, inst.m, added)

    restricted = []
    projected = []
    for i, part in enumerate(decomp.parts):
        a_local = _local_matrix(part, [inst.A.matvec(w) for w in part.basis_vectors()])
        b_restricted = _local_matrix(
            part, [inst.B.matvec(f) for f in input_parts[i].basis_vectors()])
        cost_local = CostFunction(
            field, part.dim,
            [inst.cost.value(part.from_coords(y))
             for y in enumerate_states(field.p, part.dim)],
            allow_vanishing=inst.cost.allow_vanishing)
        restricted.append(DPInstance(
            a_local, b_restricted, cost_local, inst.horizon,
            max_states=None, max_inputs=None))
        b_projected = _local_matrix(
            part, [decomp.component(i, inst.B.matvec(u))
                   for u in (tuple(1 if k == j else 0 for k in range(inst.m))
                             for j in range(inst.m))])
        projected.append(DPInstance(
            a_local, b_projected, cost_local, inst.horizon,
            require_injective=False, max_states=None, max_inputs=None))
    return SubproblemBundle(inst, decomp, input_parts, complement, restricted, projected)


def solve_bundle(bundle: SubproblemBundle, family: Family) -> list[tuple[ValueTable, ArgminTable]]:
    """Solve every local problem of one family with the horizon-matching
    exact solver."""
    out = []
    for sub in bundle.family(family):
        if isinstance(sub.horizon, FiniteHorizon):
            out.append(solve_finite(sub))
        else:
            out.append(solve_discounted_pi(sub))
    return out


def _lift_action(bundle: SubproblemBundle, family: Family, choices: Sequence[int]) -> int:
    """Sum per-part action choices into one parent input index."""
    p = bundle.parent.field.p
    m = bundle.parent.m
    total = [0] * m
    for i, a_idx in enumerate(choices):
        sub = bundle.family(family)[i]
        a_vec = sub.input_vector(a_idx)
        if family == "restricted":
            u_vec = bundle.input_basis(i).matvec(a_vec)
        else:
            u_vec = a_vec
        total = [(s + u) % p for s, u in zip(total, u_vec)]
    return state_index(total, p)


def lift_policy(bundle: SubproblemBundle, family: Family,
                selections: Sequence) -> list:
    """Combine per-part action selections into a parent control law.

    For a finite horizon, selections[i][t][y] is the local action index
    chosen for part i at local state y and time t, and the result is
    law[t][x], a parent input index per time and state.  For a discounted
    horizon the time axis is absent on both sides.  Restricted-family
    actions are embedded through the feasible-input bases before summing;
    projected-family actions already live in the input space and sum as is.
    """
    comp = bundle.component_state_tables()
    num_states = bundle.parent.num_states
    if isinstance(bundle.parent.horizon, FiniteHorizon):
        T = bundle.parent.horizon.T
        law = []
        for t in range(T):
            row = []
            for x in range(num_states):
                choices = [selections[i][t][comp[i][x]] for i in range(bundle.r)]
                row.append(_lift_action(bundle, family, choices))
            law.append(row)
        return law
    row = []
    for x in range(num_states):
        choices = [selections[i][comp[i][x]] for i in range(bundle.r)]
        row.append(_lift_action(bundle, family, choices))
    return row
