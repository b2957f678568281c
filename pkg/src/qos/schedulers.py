"""Schedule construction and checking.

A schedule assigns each operation a non-negative integer start time in dt;
its makespan is the latest finish across all operations. This module
provides the validity check (precedence plus per-qubit non-overlap), the
longest-path evaluation of a fully oriented disjunctive graph, a greedy
earliest-start scheduler over a dependency DAG, and a rank-driven list
scheduler with an insertion-based slot policy.
"""

from __future__ import annotations

import graphlib
import json
from bisect import insort
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import Circuit, CircuitError
from .depgraph import DependencyDag, DisjunctiveGraph


class CycleError(ValueError):
    """A directed cycle makes the requested ordering unschedulable."""

    def __init__(self, message: str, cycle: Sequence[int] = ()) -> None:
        super().__init__(message)
        self.cycle = tuple(cycle)


@dataclass(frozen=True)
class Schedule:
    """Start time per operation plus the resulting makespan, all in dt."""

    starts: tuple[int, ...]
    makespan: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "starts", tuple(self.starts))
        if any(s < 0 for s in self.starts):
            raise ValueError("start times must be non-negative")
        if self.makespan < 0:
            raise ValueError("makespan must be non-negative")

    @classmethod
    def from_starts(cls, starts: Sequence[int], durations: Sequence[int]) -> "Schedule":
        makespan = max((s + d for s, d in zip(starts, durations)), default=0)
        return cls(tuple(starts), makespan)


@dataclass(frozen=True)
class Orientation:
    """One directed arc per disjunctive pair; total orientations turn a
    disjunctive graph into a plain DAG (when acyclic)."""

    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", tuple(tuple(a) for a in self.arcs))


@dataclass(frozen=True)
class Violation:
    """A broken scheduling constraint, naming the constraint kind and the
    offending operation pair."""

    kind: str  # "precedence" or "non-overlap"
    ops: tuple[int, int]
    message: str

    def __str__(self) -> str:
        return self.message


def validate(circuit: Circuit, dag: DependencyDag, schedule: Schedule) -> list[Violation]:
    """Check precedence against ``dag`` and per-qubit non-overlap against
    ``circuit``; an empty list means the schedule is feasible."""
    n = len(circuit.ops)
    if dag.num_ops != n:
        raise ValueError(f"DAG has {dag.num_ops} nodes but the circuit has {n} ops")
    if len(schedule.starts) != n:
        raise ValueError(f"schedule has {len(schedule.starts)} starts but the circuit has {n} ops")
    violations: list[Violation] = []
    starts = schedule.starts
    for i, j in dag.sorted_edges:
        finish = starts[i] + circuit.ops[i].duration
        if finish > starts[j]:
            violations.append(
                Violation(
                    "precedence",
                    (i, j),
                    f"precedence: op {i} finishes at {finish} after op {j} starts at {starts[j]}",
                )
            )
    by_qubit: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for op in circuit.ops:
        if op.duration == 0:
            continue  # empty interval occupies no instant
        for q in op.qubits:
            by_qubit[q].append((starts[op.index], starts[op.index] + op.duration, op.index))
    for q in sorted(by_qubit):
        intervals = sorted(by_qubit[q])
        max_end, max_idx = intervals[0][1], intervals[0][2]
        for start, end, idx in intervals[1:]:
            if start < max_end:
                violations.append(
                    Violation(
                        "non-overlap",
                        (max_idx, idx),
                        f"non-overlap: ops {max_idx} and {idx} overlap on qubit {q}",
                    )
                )
            if end > max_end:
                max_end, max_idx = end, idx
    return violations


def longest_path_starts(
    num_ops: int, edges: Iterable[tuple[int, int]], durations: Sequence[int]
) -> list[int]:
    """Earliest start times under the given precedence arcs: the weight of
    the longest incoming path. Raises :class:`CycleError` naming a cycle if
    the arcs are not acyclic."""
    preds: dict[int, list[int]] = {v: [] for v in range(num_ops)}
    for u, v in edges:
        preds[v].append(u)
    try:
        order = list(graphlib.TopologicalSorter(preds).static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        raise CycleError(
            "cycle detected: " + " -> ".join(map(str, cycle)), cycle=cycle
        ) from exc
    starts = [0] * num_ops
    for v in order:
        for u in preds[v]:
            starts[v] = max(starts[v], starts[u] + durations[u])
    return starts


def semi_active(g: DisjunctiveGraph, orientation: Orientation) -> Schedule:
    """Evaluate a total orientation: every operation starts as early as its
    incoming conjunctive edges and oriented pairs allow (longest path)."""
    covered = sorted(tuple(sorted(arc)) for arc in orientation.arcs)
    if covered != list(g.sorted_pairs):
        raise ValueError("orientation does not cover exactly the disjunctive pairs")
    arcs = list(g.dag.edges) + list(orientation.arcs)
    starts = longest_path_starts(g.num_ops, arcs, g.durations)
    return Schedule.from_starts(starts, g.durations)


def asap(circuit: Circuit, dag: DependencyDag) -> Schedule:
    """Greedy earliest-start scheduling over a dependency DAG.

    Operations become eligible once every DAG predecessor is placed; each
    step places the eligible operation with the earliest feasible start
    (ties broken by source index) at the later of its predecessors' finish
    times and the current free time of each acting qubit. Qubits are only
    appended to, never back-filled, so no operation is inserted into a gap.
    On a standard DAG this reproduces the unique semi-active schedule.
    """
    n = len(circuit.ops)
    if dag.num_ops != n:
        raise ValueError(f"DAG has {dag.num_ops} nodes but the circuit has {n} ops")
    missing = [len(dag.predecessors[i]) for i in range(n)]
    ready = [0] * n
    qubit_free = [0] * circuit.num_qubits
    starts = [0] * n
    eligible = {i for i in range(n) if missing[i] == 0}
    while eligible:
        def candidate(i: int) -> int:
            return max(ready[i], max(qubit_free[q] for q in circuit.ops[i].qubits))

        chosen = min(eligible, key=lambda i: (candidate(i), i))
        start = candidate(chosen)
        finish = start + circuit.ops[chosen].duration
        starts[chosen] = start
        for q in circuit.ops[chosen].qubits:
            qubit_free[q] = finish
        eligible.remove(chosen)
        for succ in dag.successors[chosen]:
            ready[succ] = max(ready[succ], finish)
            missing[succ] -= 1
            if missing[succ] == 0:
                eligible.add(succ)
    return Schedule.from_starts(starts, [op.duration for op in circuit.ops])


def upward_rank(g: DisjunctiveGraph) -> tuple[int, ...]:
    """Priority of each operation: its duration plus the largest rank among
    its conjunctive successors; exit operations rank at their own duration.
    Disjunctive pairs do not contribute."""
    ranks = [0] * g.num_ops
    for u in reversed(range(g.num_ops)):  # index order is topological
        ranks[u] = g.durations[u] + max((ranks[v] for v in g.dag.successors[u]), default=0)
    return tuple(ranks)


def _earliest_slot(intervals: list[tuple[int, int]], ready: int, duration: int) -> int:
    """Earliest t >= ready such that [t, t+duration) avoids every busy
    interval. A gap exactly as long as the operation is usable."""
    t = ready
    for start, end in intervals:
        if t + duration <= start:
            break
        t = max(t, end)
    return t


def heft(g: DisjunctiveGraph) -> Schedule:
    """List scheduling driven by upward rank with an insertion-based policy.

    Operations are placed in descending rank order (ties by ascending source
    index, which keeps conjunctive predecessors ahead of their successors).
    Each one goes into the earliest idle slot, simultaneously free on all
    its acting qubits, that starts at or after its ready time; placements
    may land in gaps between earlier placements. Ready times propagate to
    conjunctive successors only; same-qubit contention is resolved purely by
    slot occupancy.
    """
    ranks = upward_rank(g)
    order = sorted(range(g.num_ops), key=lambda i: (-ranks[i], i))
    ready = [0] * g.num_ops
    busy: dict[int, list[tuple[int, int]]] = defaultdict(list)
    starts = [0] * g.num_ops
    for u in order:
        duration = g.durations[u]
        merged = sorted(iv for q in g.qubits[u] for iv in busy[q])
        start = _earliest_slot(merged, ready[u], duration)
        starts[u] = start
        if duration:
            for q in g.qubits[u]:
                insort(busy[q], (start, start + duration))
        for v in g.dag.successors[u]:
            ready[v] = max(ready[v], start + duration)
    return Schedule.from_starts(starts, g.durations)


# --- schedule serialization and rendering -------------------------------------

def schedule_to_json(circuit: Circuit, schedule: Schedule, *, indent: int | None = 2) -> str:
    """Serialize a schedule: makespan plus one record per operation with its
    resolved start and duration."""
    if len(schedule.starts) != len(circuit.ops):
        raise ValueError("schedule does not match the circuit")
    doc = {
        "makespan": schedule.makespan,
        "starts": [
            {
                "op": op.index,
                "name": op.name,
                "qubits": list(op.qubits),
                "start": schedule.starts[op.index],
                "duration": op.duration,
            }
            for op in circuit.ops
        ],
    }
    return json.dumps(doc, indent=indent) + "\n"


def schedule_from_json(text: str, circuit: Circuit) -> Schedule:
    """Read a schedule written by :func:`schedule_to_json` back against its
    circuit, checking coverage, durations, and makespan consistency."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"invalid schedule JSON: {exc}") from exc
    if not isinstance(doc, dict) or "starts" not in doc:
        raise CircuitError("schedule document must be an object with a 'starts' array")
    n = len(circuit.ops)
    starts: list[int | None] = [None] * n
    for entry in doc["starts"]:
        idx = entry.get("op")
        if not isinstance(idx, int) or not 0 <= idx < n:
            raise CircuitError(f"schedule entry has bad op index {idx!r}")
        if starts[idx] is not None:
            raise CircuitError(f"schedule lists op {idx} twice")
        start = entry.get("start")
        if isinstance(start, bool) or not isinstance(start, int) or start < 0:
            raise CircuitError(f"op {idx}: start must be a non-negative integer")
        declared = entry.get("duration", circuit.ops[idx].duration)
        if declared != circuit.ops[idx].duration:
            raise CircuitError(
                f"op {idx}: schedule duration {declared} disagrees with circuit "
                f"duration {circuit.ops[idx].duration}"
            )
        starts[idx] = start
    if any(s is None for s in starts):
        missing = [i for i, s in enumerate(starts) if s is None]
        raise CircuitError(f"schedule missing ops {missing}")
    schedule = Schedule.from_starts([s for s in starts if s is not None], [op.duration for op in circuit.ops])
    if "makespan" in doc and doc["makespan"] != schedule.makespan:
        raise CircuitError(
            f"declared makespan {doc['makespan']} disagrees with computed {schedule.makespan}"
        )
    return schedule


def render_gantt(circuit: Circuit, schedule: Schedule, *, width: int = 72) -> str:
    """Text Gantt chart: one row per qubit, cells proportional to duration,
    each block labeled with its operation index. When the makespan exceeds
    ``width`` cells, the time axis is scaled to whole dt per cell."""
    makespan = schedule.makespan
    scale = 1 if makespan <= width else -(-makespan // width)
    cells = -(-makespan // scale)
    lines = [f"makespan {makespan} dt (1 cell = {scale} dt)"]
    label_width = len(str(circuit.num_qubits - 1))
    rows = {q: ["."] * cells for q in range(circuit.num_qubits)}
    for op in circuit.ops:
        if op.duration == 0:
            continue
        start = schedule.starts[op.index]
        c0 = start // scale
        c1 = max(c0 + 1, -(-(start + op.duration) // scale))
        block = str(op.index).ljust(c1 - c0, "=")[: c1 - c0]
        for q in op.qubits:
            rows[q][c0:c1] = block
    for q in range(circuit.num_qubits):
        lines.append(f"q{q:<{label_width}} |{''.join(rows[q])}|")
    return "\n".join(lines) + "\n"
