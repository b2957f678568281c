"""Dependency graphs over circuit operations.

Two conjunctive graphs are supported: the standard DAG, which chains every
pair of operations sharing a qubit, and the extended DAG, which drops the
order between consecutive commuting operations on each qubit. On top of a
conjunctive DAG, a disjunctive graph adds the unordered pairs whose relative
order a scheduler is free to choose; three generation policies of different
tightness are available.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations

from .circuit import Circuit
from .commutation import CommutationRuleSet, commutes


@dataclass(frozen=True)
class DependencyDag:
    """Conjunctive precedence edges ``(i, j)``: op i must finish before op j
    starts. Edges always point forward in source order, so index order is a
    topological order."""

    num_ops: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset(self.edges))
        for i, j in self.edges:
            if not (0 <= i < j < self.num_ops):
                raise ValueError(f"edge ({i}, {j}) violates source order or node range")

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.num_ops)]
        for i, j in self.sorted_edges:
            out[i].append(j)
        return tuple(tuple(s) for s in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.num_ops)]
        for i, j in self.sorted_edges:
            out[j].append(i)
        return tuple(tuple(s) for s in out)

    @cached_property
    def reachable(self) -> tuple[int, ...]:
        """Per-node reachability bitsets: bit j of entry i is set iff a
        directed path i -> j exists."""
        reach = [0] * self.num_ops
        for u in reversed(range(self.num_ops)):
            mask = 0
            for v in self.successors[u]:
                mask |= (1 << v) | reach[v]
            reach[u] = mask
        return tuple(reach)

    def has_path(self, i: int, j: int) -> bool:
        return bool(self.reachable[i] >> j & 1)


class DisjunctiveEdgeMode(Enum):
    """How generously disjunctive pairs are generated.

    REDUNDANT keeps every same-qubit pair without a direct conjunctive edge,
    commuting or not. GROUPED keeps the pairs inside each per-qubit run of
    mutually commuting operations. MINIMAL additionally drops pairs already
    ordered by a conjunctive path.
    """

    REDUNDANT = "redundant"
    GROUPED = "grouped"
    MINIMAL = "minimal"


@dataclass(frozen=True)
class DisjunctiveGraph:
    """A conjunctive DAG plus unordered disjunctive pairs, with per-node
    metadata (gate name, duration in dt, acting qubits) so schedulers do not
    need the originating circuit."""

    dag: DependencyDag
    pairs: frozenset[tuple[int, int]]
    names: tuple[str, ...]
    durations: tuple[int, ...]
    qubits: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        n = self.dag.num_ops
        if not (len(self.names) == len(self.durations) == len(self.qubits) == n):
            raise ValueError("node metadata length does not match the DAG node count")
        for k, l in self.pairs:
            if not (0 <= k < l < n):
                raise ValueError(f"disjunctive pair ({k}, {l}) out of range or unnormalized")
            if (k, l) in self.dag.edges:
                raise ValueError(f"pair ({k}, {l}) is already a conjunctive edge")

    @property
    def num_ops(self) -> int:
        return self.dag.num_ops

    @cached_property
    def sorted_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.pairs))


def _ops_by_qubit(circuit: Circuit) -> dict[int, list[int]]:
    seq: dict[int, list[int]] = defaultdict(list)
    for op in circuit.ops:
        for q in op.qubits:
            seq[q].append(op.index)
    return seq


def _commutation_classes(
    circuit: Circuit, rules: CommutationRuleSet
) -> dict[int, list[list[int]]]:
    """Per qubit, partition the operations acting on it into maximal
    consecutive runs of pairwise-commuting operations. An op joins the
    current run only if it commutes with every member (commutation is not
    transitive); otherwise it opens a new run."""
    classes: dict[int, list[list[int]]] = {}
    for qubit, indices in _ops_by_qubit(circuit).items():
        runs: list[list[int]] = []
        for i in indices:
            if runs and all(
                commutes(circuit.ops[i], circuit.ops[j], rules) for j in runs[-1]
            ):
                runs[-1].append(i)
            else:
                runs.append([i])
        classes[qubit] = runs
    return classes


def build_standard_dag(circuit: Circuit) -> DependencyDag:
    """Chain consecutive operations on every qubit; duplicate edges between
    the same pair (from multi-qubit overlap) collapse to one."""
    edges: set[tuple[int, int]] = set()
    for indices in _ops_by_qubit(circuit).values():
        edges.update(zip(indices, indices[1:]))
    return DependencyDag(len(circuit.ops), frozenset(edges))


def build_extended_dag(circuit: Circuit, rules: CommutationRuleSet) -> DependencyDag:
    """Relax the standard DAG using commutation: on each qubit only
    consecutive commutation runs are ordered, with an edge from every member
    of one run to every member of the next."""
    edges: set[tuple[int, int]] = set()
    for runs in _commutation_classes(circuit, rules).values():
        for earlier, later in zip(runs, runs[1:]):
            edges.update((i, j) for i in earlier for j in later)
    return DependencyDag(len(circuit.ops), frozenset(edges))


def build_disjunctive_graph(
    circuit: Circuit,
    dag: DependencyDag,
    rules: CommutationRuleSet,
    mode: DisjunctiveEdgeMode = DisjunctiveEdgeMode.GROUPED,
) -> DisjunctiveGraph:
    """Attach disjunctive pairs to a conjunctive DAG built from the same
    circuit and rules.

    Every same-qubit pair ends up either ordered by a conjunctive path or
    present as a disjunctive pair, whatever the mode; pairs that coincide
    with a direct conjunctive edge are never emitted.
    """
    if dag.num_ops != len(circuit.ops):
        raise ValueError(
            f"DAG has {dag.num_ops} nodes but the circuit has {len(circuit.ops)} ops"
        )
    if mode is DisjunctiveEdgeMode.REDUNDANT:
        candidates: set[tuple[int, int]] = set()
        for indices in _ops_by_qubit(circuit).values():
            candidates.update(combinations(indices, 2))
    else:
        candidates = set()
        for runs in _commutation_classes(circuit, rules).values():
            for run in runs:
                candidates.update(combinations(run, 2))
    pairs = {p for p in candidates if p not in dag.edges}
    if mode is DisjunctiveEdgeMode.MINIMAL:
        pairs = {(k, l) for k, l in pairs if not dag.has_path(k, l)}
    return DisjunctiveGraph(
        dag=dag,
        pairs=frozenset(pairs),
        names=tuple(op.name for op in circuit.ops),
        durations=tuple(op.duration for op in circuit.ops),
        qubits=tuple(op.qubits for op in circuit.ops),
    )


def export_dot(g: DisjunctiveGraph) -> str:
    """Render as Graphviz DOT: solid directed conjunctive edges, dashed
    undirected disjunctive pairs, node labels "name(qubits) p=duration"."""
    lines = ["digraph dependencies {", "  rankdir=LR;"]
    for i in range(g.num_ops):
        operands = ",".join(map(str, g.qubits[i]))
        lines.append(f'  n{i} [label="{g.names[i]}({operands}) p={g.durations[i]}"];')
    for i, j in g.dag.sorted_edges:
        lines.append(f"  n{i} -> n{j};")
    for k, l in g.sorted_pairs:
        lines.append(f"  n{k} -> n{l} [style=dashed, dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
