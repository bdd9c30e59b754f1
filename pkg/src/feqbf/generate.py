"""Seeded random instance generation.

Randomness comes from CPython's ``random.Random`` (the documented Mersenne
Twister with the version-stable sample/randrange methods), so a seed pins the
generated corpus byte for byte across runs and platforms.
"""

from __future__ import annotations

import math
import random

from .formulas import CnfMatrix, DnfFormula, EXISTS, FORALL, QbfInstance, normalize_prefix


def _random_clause(rng: random.Random, variables, arity: int) -> frozenset[int]:
    width = min(arity, len(variables))
    chosen = rng.sample(variables, width)
    return frozenset(v if rng.randrange(2) == 0 else -v for v in chosen)


def _distinct_possible(num_vars: int, arity: int) -> int:
    width = min(arity, num_vars)
    return math.comb(num_vars, width) * 2**width


def _random_clauses(rng, variables, count, arity, distinct):
    if distinct and count > _distinct_possible(len(variables), arity):
        raise ValueError(
            f"cannot draw {count} distinct clauses of arity {min(arity, len(variables))} "
            f"over {len(variables)} variables"
        )
    clauses = []
    seen = set()
    while len(clauses) < count:
        clause = _random_clause(rng, variables, arity)
        if distinct:
            if clause in seen:
                continue
            seen.add(clause)
        clauses.append(clause)
    return tuple(clauses)


def random_dnf(
    num_vars: int, num_terms: int, *, arity: int = 3, seed: int, distinct: bool = False
) -> DnfFormula:
    """Uniform random DNF: each term draws ``arity`` distinct variables and
    independent signs."""
    if num_vars < 1 or num_terms < 0:
        raise ValueError("sizes must be positive")
    rng = random.Random(seed)
    variables = list(range(1, num_vars + 1))
    return DnfFormula(_random_clauses(rng, variables, num_terms, arity, distinct), num_vars)


def random_forall_exists(
    num_universal: int,
    num_existential: int,
    num_clauses: int,
    *,
    arity: int = 3,
    seed: int,
    distinct: bool = False,
) -> QbfInstance:
    """Uniform random forall-exists QBF: universals are 1..n, existentials
    n+1..n+k, and every clause draws ``arity`` distinct variables from the
    whole pool with independent signs."""
    if num_universal < 0 or num_existential < 0 or num_clauses < 0:
        raise ValueError("sizes must be non-negative")
    total = num_universal + num_existential
    if total < 1:
        raise ValueError("at least one variable is required")
    rng = random.Random(seed)
    variables = list(range(1, total + 1))
    clauses = _random_clauses(rng, variables, num_clauses, arity, distinct)
    prefix = normalize_prefix(
        [
            (FORALL, range(1, num_universal + 1)),
            (EXISTS, range(num_universal + 1, total + 1)),
        ]
    )
    return QbfInstance(prefix, CnfMatrix(clauses, total))
