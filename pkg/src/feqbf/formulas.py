"""Propositional and prenex-quantified formula values.

Variables are positive integers and a literal is a signed integer whose sign
carries the polarity (DIMACS convention).  Clauses and terms are frozensets of
literals.  Every container here is immutable after construction and every
operation is a pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

FORALL = "a"
EXISTS = "e"

Literal = int
Clause = frozenset[int]
Term = frozenset[int]
Assignment = Mapping[int, bool]


def literal_sort_key(lit: int) -> tuple[int, bool]:
    """Sort literals by variable, positive polarity first."""
    return (abs(lit), lit < 0)


def is_tautological(clause: Clause) -> bool:
    """True when the clause contains a variable in both polarities."""
    return any(-lit in clause for lit in clause)


def _check_literals(lits: Iterable[int], num_vars: int, what: str) -> None:
    for lit in lits:
        if lit == 0:
            raise ValueError(f"{what} may not contain the literal 0")
        if abs(lit) > num_vars:
            raise ValueError(f"variable {abs(lit)} exceeds declared count {num_vars}")


@dataclass(frozen=True)
class CnfMatrix:
    """Ordered conjunction of clauses over variables 1..num_vars.

    Duplicate clauses are allowed (reductions pad by repetition); literals
    within one clause are deduplicated by the frozenset representation.  The
    empty clause denotes the constant False.
    """

    clauses: tuple[Clause, ...]
    num_vars: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "clauses", tuple(frozenset(c) for c in self.clauses))
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for clause in self.clauses:
            _check_literals(clause, self.num_vars, "a clause")

    def max_arity(self) -> int:
        return max((len(c) for c in self.clauses), default=0)


@dataclass(frozen=True)
class DnfFormula:
    """Ordered disjunction of terms over variables 1..num_vars.

    Term positions 0..m-1 give the term numbering used by the reductions.
    The empty term denotes the constant True.
    """

    terms: tuple[Term, ...]
    num_vars: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(frozenset(t) for t in self.terms))
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        for term in self.terms:
            _check_literals(term, self.num_vars, "a term")


@dataclass(frozen=True)
class QuantifierBlock:
    quantifier: str
    vars: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vars", tuple(self.vars))
        if self.quantifier not in (FORALL, EXISTS):
            raise ValueError(f"quantifier must be {FORALL!r} or {EXISTS!r}")
        if not self.vars:
            raise ValueError("quantifier block must bind at least one variable")
        if any(v < 1 for v in self.vars):
            raise ValueError("variables are positive integers")


def normalize_prefix(
    blocks: Iterable[QuantifierBlock | tuple[str, Sequence[int]]],
) -> tuple[QuantifierBlock, ...]:
    """Drop empty blocks and merge adjacent blocks with the same quantifier."""
    merged: list[tuple[str, list[int]]] = []
    for block in blocks:
        quant, vars_ = (block.quantifier, block.vars) if isinstance(block, QuantifierBlock) else block
        vars_ = list(vars_)
        if not vars_:
            continue
        if merged and merged[-1][0] == quant:
            merged[-1][1].extend(vars_)
        else:
            merged.append((quant, vars_))
    return tuple(QuantifierBlock(q, tuple(v)) for q, v in merged)


@dataclass(frozen=True)
class QbfInstance:
    """Prenex QBF: an alternating quantifier prefix over a CNF matrix."""

    prefix: tuple[QuantifierBlock, ...]
    matrix: CnfMatrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        seen: set[int] = set()
        previous = None
        for block in self.prefix:
            if block.quantifier == previous:
                raise ValueError("adjacent prefix blocks must alternate (normalize first)")
            previous = block.quantifier
            for v in block.vars:
                if v in seen:
                    raise ValueError(f"variable {v} bound twice in the prefix")
                if v > self.matrix.num_vars:
                    raise ValueError(f"prefix variable {v} exceeds declared count {self.matrix.num_vars}")
                seen.add(v)
        for clause in self.matrix.clauses:
            for lit in clause:
                if abs(lit) not in seen:
                    raise ValueError(f"matrix variable {abs(lit)} is not bound by the prefix")

    def prefix_vars(self) -> tuple[int, ...]:
        return tuple(v for block in self.prefix for v in block.vars)

    def quantifier_of(self, var: int) -> str:
        for block in self.prefix:
            if var in block.vars:
                return block.quantifier
        raise KeyError(var)


def apply_assignment_cnf(matrix: CnfMatrix, sigma: Assignment) -> CnfMatrix:
    """Simplify a CNF under a partial assignment.

    A clause with a satisfied literal is removed; falsified literals are
    removed from the surviving clauses, possibly yielding the empty clause.
    """
    _check_domain(sigma, matrix.num_vars)
    result = []
    for clause in matrix.clauses:
        kept = []
        satisfied = False
        for lit in clause:
            value = sigma.get(abs(lit))
            if value is None:
                kept.append(lit)
            elif value == (lit > 0):
                satisfied = True
                break
        if not satisfied:
            result.append(frozenset(kept))
    return CnfMatrix(tuple(result), matrix.num_vars)


def apply_assignment_dnf(formula: DnfFormula, sigma: Assignment) -> DnfFormula:
    """Dual simplification: a falsified literal kills its term, a satisfied
    literal is dropped from it, and an emptied term denotes True."""
    _check_domain(sigma, formula.num_vars)
    result = []
    for term in formula.terms:
        kept = []
        falsified = False
        for lit in term:
            value = sigma.get(abs(lit))
            if value is None:
                kept.append(lit)
            elif value != (lit > 0):
                falsified = True
                break
        if not falsified:
            result.append(frozenset(kept))
    return DnfFormula(tuple(result), formula.num_vars)


def _check_domain(sigma: Assignment, num_vars: int) -> None:
    for var in sigma:
        if var < 1 or var > num_vars:
            raise ValueError(f"assignment mentions variable {var} outside 1..{num_vars}")


def binary_clause(i: int, variables: Sequence[int]) -> Clause:
    """Clause over ``variables`` whose unique falsifying assignment encodes ``i``.

    The first variable carries the most significant bit; a zero bit yields a
    positive literal and a one bit a negated one, so the clause is falsified
    exactly by the big-endian binary representation of ``i``.
    """
    n = len(variables)
    if not 0 <= i < 2**n:
        raise ValueError(f"integer {i} not representable over {n} variables")
    lits = []
    for pos, var in enumerate(variables):
        bit = (i >> (n - 1 - pos)) & 1
        lits.append(-var if bit else var)
    return frozenset(lits)


def base_clause(i: int, tuples: Sequence[Sequence[int]]) -> Clause:
    """Clause encoding ``i`` written in base ``n`` over ``t`` variable tuples.

    Each base-``n`` digit of ``i`` indexes one tuple (the first tuple holds
    the most significant digit) and contributes that variable negated, so the
    clause is falsified exactly when every digit-indexed variable is True.
    """
    if not tuples:
        raise ValueError("at least one variable tuple is required")
    sizes = {len(tp) for tp in tuples}
    if len(sizes) != 1:
        raise ValueError("all tuples must have the same size")
    n = sizes.pop()
    t = len(tuples)
    if not 0 <= i < n**t:
        raise ValueError(f"integer {i} not representable in base {n} with {t} digits")
    lits = []
    remainder = i
    for tp in reversed(tuples):
        remainder, digit = divmod(remainder, n)
        lits.append(-tp[digit])
    return frozenset(lits)


def split_clause_to_arity(
    clause: Clause, d: int, fresh: Iterator[int]
) -> tuple[list[Clause], list[int]]:
    """Split a clause into an equisatisfiable chain of clauses of arity <= d.

    While the clause is longer than ``d``, the first ``d - 1`` literals are
    chained off through a fresh linking variable drawn from ``fresh``.  A
    clause already within the arity bound is returned unchanged.
    """
    if d < 3:
        raise ValueError("target arity must be at least 3")
    if len(clause) <= d:
        return [frozenset(clause)], []
    lits = sorted(clause, key=literal_sort_key)
    pieces: list[Clause] = []
    new_vars: list[int] = []
    while len(lits) > d:
        link = next(fresh)
        new_vars.append(link)
        pieces.append(frozenset(lits[: d - 1] + [link]))
        lits = [-link] + lits[d - 1 :]
    pieces.append(frozenset(lits))
    return pieces, new_vars
