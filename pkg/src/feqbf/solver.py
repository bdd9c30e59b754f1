"""Decision procedure for forall-exists QBF with few existential variables.

Clauses are partitioned into groups sharing an existential core.  If every
group's family of universal parts contains a large pairwise-disjoint
subfamily, the universal player can force every group down to its core, so
the instance reduces to a propositional SAT check over the cores.  Otherwise
some group admits a small hitting set of universal variables and the solver
branches over all of its assignments.  A weight measure (the sum over groups
of the largest universal part) strictly decreases along every branch, which
bounds the recursion.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .formulas import (
    EXISTS,
    FORALL,
    Clause,
    CnfMatrix,
    QbfInstance,
    apply_assignment_cnf,
    is_tautological,
    literal_sort_key,
)
from .oracle import DEFAULT_VARIABLE_BOUND, eval_qbf


@dataclass(frozen=True)
class FalseCertificate:
    """A non-tautological all-universal clause; the universal player falsifies
    it, so the instance is False without any search."""

    clause: Clause


@dataclass(frozen=True)
class GroupEntry:
    """One group of the clause partition: the clauses sharing an existential
    core, plus their deduplicated universal parts."""

    clause_indices: tuple[int, ...]
    parts: tuple[Clause, ...]


@dataclass(frozen=True)
class DisjointFamily:
    clauses: tuple[Clause, ...]


@dataclass(frozen=True)
class HittingSet:
    variables: frozenset[int]


@dataclass(frozen=True)
class SolverConfig:
    threshold_override: float | None = None
    small_k_cutoff: int = 2
    parallel_branching: bool = False
    oracle_var_bound: int = DEFAULT_VARIABLE_BOUND

    def __post_init__(self) -> None:
        if self.small_k_cutoff < 1:
            raise ValueError("small_k_cutoff must be at least 1")


@dataclass
class SolverStats:
    leaves: int = 0
    max_depth: int = 0
    branches: int = 0
    weight_trace: tuple[int, ...] = ()
    base_case_hits: int = 0


STATS_CSV_COLUMNS = (
    "instance_id",
    "k",
    "d",
    "result",
    "leaves",
    "max_depth",
    "branches",
    "base_case_hits",
    "wall_time_ms",
)


def ae_blocks(instance: QbfInstance) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a forall-exists prefix into (universal, existential) variables."""
    quants = [b.quantifier for b in instance.prefix]
    if quants == []:
        return (), ()
    if quants == [FORALL]:
        return instance.prefix[0].vars, ()
    if quants == [EXISTS]:
        return (), instance.prefix[0].vars
    if quants == [FORALL, EXISTS]:
        return instance.prefix[0].vars, instance.prefix[1].vars
    raise ValueError("prefix must be one universal block followed by one existential block")


def preprocess(instance: QbfInstance) -> QbfInstance | FalseCertificate:
    """Drop tautological clauses; report False if an all-universal clause
    remains (the universal player falsifies it).  Afterwards every clause has
    a non-empty existential core."""
    _, existential = ae_blocks(instance)
    e_set = set(existential)
    kept = []
    for clause in instance.matrix.clauses:
        if is_tautological(clause):
            continue
        if not any(abs(lit) in e_set for lit in clause):
            return FalseCertificate(clause)
        kept.append(clause)
    return QbfInstance(instance.prefix, CnfMatrix(tuple(kept), instance.matrix.num_vars))


def _core_key(core: Clause) -> tuple[tuple[int, bool], ...]:
    return tuple(sorted(literal_sort_key(lit) for lit in core))


def partition_groups(
    matrix: CnfMatrix, existential_vars: frozenset[int]
) -> dict[Clause, GroupEntry]:
    """Partition clauses by existential core; universal parts are deduplicated
    in first-occurrence order.  A purely existential clause contributes the
    empty universal part."""
    indices: dict[Clause, list[int]] = {}
    parts: dict[Clause, list[Clause]] = {}
    seen: dict[Clause, set[Clause]] = {}
    for idx, clause in enumerate(matrix.clauses):
        core = frozenset(lit for lit in clause if abs(lit) in existential_vars)
        part = frozenset(lit for lit in clause if abs(lit) not in existential_vars)
        if core not in indices:
            indices[core] = []
            parts[core] = []
            seen[core] = set()
        indices[core].append(idx)
        if part not in seen[core]:
            seen[core].add(part)
            parts[core].append(part)
    return {
        core: GroupEntry(tuple(indices[core]), tuple(parts[core])) for core in indices
    }


def threshold(k: int, d: int) -> float:
    """Disjoint-family size threshold 2^d * d * ln(k)."""
    if k < 2:
        raise ValueError("threshold is undefined for k < 2; route small k to the oracle")
    if d < 1:
        raise ValueError("arity must be positive")
    return (2**d) * d * math.log(k)


def greedy_disjoint(parts, x_threshold: float) -> DisjointFamily | HittingSet:
    """Greedily collect pairwise variable-disjoint universal parts in input
    order.  Success means ceil(x_threshold) of them; otherwise the variables
    of the maximal family hit every part and come back as a hitting set."""
    if any(not part for part in parts):
        raise ValueError("greedy search is undefined on groups with an empty universal part")
    need = math.ceil(x_threshold)
    chosen: list[Clause] = []
    used: set[int] = set()
    for part in parts:
        if any(abs(lit) in used for lit in part):
            continue
        chosen.append(part)
        used.update(abs(lit) for lit in part)
        if len(chosen) >= need:
            return DisjointFamily(tuple(chosen))
    return HittingSet(frozenset(used))


def core_projection(matrix: CnfMatrix, existential_vars: frozenset[int]) -> CnfMatrix:
    """Replace every clause by its existential core, keeping one copy of each
    resulting clause (first-occurrence order)."""
    seen: set[Clause] = set()
    projected = []
    for clause in matrix.clauses:
        core = frozenset(lit for lit in clause if abs(lit) in existential_vars)
        if core not in seen:
            seen.add(core)
            projected.append(core)
    return CnfMatrix(tuple(projected), matrix.num_vars)


def sat_check_core(core_matrix: CnfMatrix, existential_vars) -> bool:
    """Exhaustive 2^k satisfiability check over the existential variables."""
    variables = tuple(existential_vars)
    bit_of = {v: i for i, v in enumerate(variables)}
    masks = []
    for clause in core_matrix.clauses:
        if not clause:
            return False
        pos = neg = 0
        for lit in clause:
            if lit > 0:
                pos |= 1 << bit_of[lit]
            else:
                neg |= 1 << bit_of[-lit]
        masks.append((pos, neg))
    for assignment in range(1 << len(variables)):
        if all((assignment & pos) != 0 or (neg & ~assignment) != 0 for pos, neg in masks):
            return True
    return False


def weight(matrix: CnfMatrix, existential_vars: frozenset[int]) -> int:
    """Sum over groups of the largest universal part; the solver's strictly
    decreasing progress measure."""
    groups = partition_groups(matrix, existential_vars)
    return sum(max(len(p) for p in entry.parts) for entry in groups.values())


class _Search:
    """One solver run: fixed threshold and variable split, accumulated stats."""

    def __init__(self, existential: tuple[int, ...], x_threshold: float, parallel: bool):
        self.existential = existential
        self.e_set = frozenset(existential)
        self.x_threshold = x_threshold
        self.parallel = parallel
        self.stats = SolverStats()
        self._trace: list[int] = []
        self._best_trace: tuple[int, ...] = ()

    def decide(self, matrix: CnfMatrix, depth: int) -> bool:
        groups = partition_groups(matrix, self.e_set)
        assert frozenset() not in groups, "universal-only clause reached the recursion"
        w = sum(max(len(p) for p in entry.parts) for entry in groups.values())
        assert not self._trace or w < self._trace[-1], "weight failed to decrease"
        self._trace.append(w)
        self.stats.max_depth = max(self.stats.max_depth, depth)
        try:
            for core in sorted(groups, key=_core_key):
                entry = groups[core]
                if any(not part for part in entry.parts):
                    # The bare core survives every universal assignment, so the
                    # group needs no disjoint family and cannot be hit.
                    continue
                found = greedy_disjoint(entry.parts, self.x_threshold)
                if isinstance(found, HittingSet):
                    assert all(
                        any(abs(lit) in found.variables for lit in part)
                        for part in entry.parts
                    ), "hitting set misses a universal part"
                    return self._branch(matrix, found.variables, depth)
            return self._base_case(matrix)
        finally:
            self._trace.pop()

    def _branch(self, matrix: CnfMatrix, hitting: frozenset[int], depth: int) -> bool:
        variables = sorted(hitting)
        if self.parallel and depth == 0:
            return self._branch_parallel(matrix, variables, depth)
        for encoding in range(1 << len(variables)):
            sigma = {v: bool(encoding >> i & 1) for i, v in enumerate(variables)}
            self.stats.branches += 1
            if not self.decide(apply_assignment_cnf(matrix, sigma), depth + 1):
                return False
        return True

    def _branch_parallel(self, matrix: CnfMatrix, variables: list[int], depth: int) -> bool:
        # All siblings are evaluated (no short-circuit) so the result and the
        # aggregated counters are independent of the schedule.
        searches = []
        jobs = []
        for encoding in range(1 << len(variables)):
            sigma = {v: bool(encoding >> i & 1) for i, v in enumerate(variables)}
            sub = _Search(self.existential, self.x_threshold, parallel=False)
            sub._trace = list(self._trace)
            searches.append(sub)
            jobs.append((sub, apply_assignment_cnf(matrix, sigma)))
        with ThreadPoolExecutor() as pool:
            futures = [pool.submit(sub.decide, child, depth + 1) for sub, child in jobs]
            outcomes = [f.result() for f in futures]
        for sub in searches:
            self.stats.branches += 1 + sub.stats.branches
            self.stats.leaves += sub.stats.leaves
            self.stats.base_case_hits += sub.stats.base_case_hits
            self.stats.max_depth = max(self.stats.max_depth, sub.stats.max_depth)
            if len(sub._best_trace) > len(self._best_trace):
                self._best_trace = sub._best_trace
        return all(outcomes)

    def _base_case(self, matrix: CnfMatrix) -> bool:
        self.stats.base_case_hits += 1
        self.stats.leaves += 1
        if len(self._trace) > len(self._best_trace):
            self._best_trace = tuple(self._trace)
        return sat_check_core(core_projection(matrix, self.e_set), self.existential)


def solve(instance: QbfInstance, config: SolverConfig | None = None) -> tuple[bool, SolverStats]:
    """Decide a forall-exists QBF; returns the truth value and run statistics."""
    cfg = config or SolverConfig()
    outcome = preprocess(instance)
    stats = SolverStats()
    if isinstance(outcome, FalseCertificate):
        stats.leaves = 1
        return False, stats
    prepared = outcome
    _, existential = ae_blocks(prepared)
    k = len(existential)
    if k <= cfg.small_k_cutoff:
        stats.leaves = 1
        return eval_qbf(prepared, var_bound=cfg.oracle_var_bound), stats
    d = max(prepared.matrix.max_arity(), 1)
    if cfg.threshold_override is not None:
        x_threshold = cfg.threshold_override
    else:
        x_threshold = threshold(k, d)
    search = _Search(existential, x_threshold, cfg.parallel_branching)
    result = search.decide(prepared.matrix, depth=0)
    stats = search.stats
    stats.weight_trace = search._best_trace
    assert stats.max_depth <= d * k ** (d - 1), "recursion exceeded the initial weight bound"
    assert math.log2(max(stats.leaves, 1)) <= d * d * x_threshold * k ** (d - 1) + 1e-9, (
        "leaf count exceeded the recursion-tree bound"
    )
    return result, stats


def stats_csv_header() -> str:
    return ",".join(STATS_CSV_COLUMNS)


def stats_csv_row(
    instance_id: str,
    k: int,
    d: int,
    result: bool,
    stats: SolverStats,
    wall_time_ms: float,
) -> str:
    values = (
        instance_id,
        k,
        d,
        "TRUE" if result else "FALSE",
        stats.leaves,
        stats.max_depth,
        stats.branches,
        stats.base_case_hits,
        f"{wall_time_ms:.3f}",
    )
    return ",".join(str(v) for v in values)
