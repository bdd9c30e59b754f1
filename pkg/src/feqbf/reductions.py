"""DNF-validity-to-QBF reduction constructions.

Both reductions turn a DNF over variables x into a closed prenex QBF whose
matrix has bounded arity, preserving truth pointwise: for every assignment to
x, the DNF holds iff the QBF's quantified suffix evaluates to True.

``reduce_dnf_to_fe_dqbf`` keeps two quantifier blocks and arity d by spending
one group of d-1 existential index variables per term.  ``reduce_dnf_to_4qbf``
reaches arity 4 with O(log m) existential variables by encoding term indices
in two universal selector vectors, adding a DNF that detects selector
cheating, and recursing on that cheat formula until it is small enough to
convert by brute-force enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .formulas import (
    EXISTS,
    FORALL,
    Clause,
    CnfMatrix,
    DnfFormula,
    QbfInstance,
    Term,
    base_clause,
    binary_clause,
    literal_sort_key,
    normalize_prefix,
    split_clause_to_arity,
)


class ReductionError(ValueError):
    """Raised when a base threshold is too small for the recursion to shrink."""


@dataclass(frozen=True)
class VariableRole:
    """Provenance for one introduced variable."""

    var: int
    role: str
    quantifier: str


@dataclass(frozen=True)
class ReductionOutput:
    """A closed QBF equivalent to the source DNF, plus bookkeeping.

    ``x_map`` lists, in source order, the instance variables playing the role
    of the DNF's variables (always the leading variables of the outermost
    universal block).  ``recursion_trace`` records (variables, terms) of the
    DNF at each recursion level, ending with the base case.
    """

    instance: QbfInstance
    x_map: tuple[int, ...]
    existential_count: int
    alternations: int
    provenance: tuple[VariableRole, ...]
    recursion_trace: tuple[tuple[int, int], ...] = ()


class _IdSource:
    """Allocates contiguous variable ids; also usable as an iterator."""

    def __init__(self, first: int):
        self.next_id = first

    def take(self, count: int) -> tuple[int, ...]:
        ids = tuple(range(self.next_id, self.next_id + count))
        self.next_id += count
        return ids

    def __iter__(self):
        return self

    def __next__(self) -> int:
        return self.take(1)[0]

    @property
    def last(self) -> int:
        return self.next_id - 1


def lambda_pair(i: int, m: int) -> tuple[int, int]:
    """The bijection i -> (i // sqrt(m), i mod sqrt(m)) for perfect squares m."""
    root = math.isqrt(m)
    if root * root != m:
        raise ValueError(f"{m} is not a perfect square")
    if not 0 <= i < m:
        raise ValueError(f"index {i} out of range 0..{m - 1}")
    return i // root, i % root


def pad_terms(psi: DnfFormula, target: int) -> DnfFormula:
    """Duplicate the last term until the formula has ``target`` terms."""
    m = len(psi.terms)
    if target < m:
        raise ValueError(f"cannot pad {m} terms down to {target}")
    if target > m and m == 0:
        raise ValueError("cannot pad an empty formula")
    return DnfFormula(psi.terms + (psi.terms[-1],) * (target - m), psi.num_vars)


def _ceil_root(m: int, exponent: int) -> int:
    """Smallest r >= 1 with r**exponent >= m."""
    r = max(1, round(m ** (1.0 / exponent)))
    while r**exponent < m:
        r += 1
    while r > 1 and (r - 1) ** exponent >= m:
        r -= 1
    return r


def _sorted_lits(term: Term) -> list[int]:
    return sorted(term, key=literal_sort_key)


def reduce_dnf_to_fe_dqbf(psi: DnfFormula, d: int) -> ReductionOutput:
    """Reduce a DNF to an equivalent forall-exists QBF of arity d.

    The term count is padded up to r**(d-1) for r = ceil(m**(1/(d-1))).  Each
    term index is encoded by d-1 blocks of r existential index variables; a
    term literal l of term i becomes the clause (l or base_clause(i, blocks)).
    One all-positive clause per block forces the chosen index to exist; those
    clauses are split down to arity d with fresh existential link variables.
    """
    if d < 3:
        raise ValueError("target arity must be at least 3")
    if not psi.terms:
        raise ValueError("source DNF must have at least one term")
    n = psi.num_vars
    m = len(psi.terms)
    r = _ceil_root(m, d - 1)
    padded = pad_terms(psi, r ** (d - 1))
    ids = _IdSource(n + 1)
    index_blocks = [ids.take(r) for _ in range(d - 1)]
    provenance = [
        VariableRole(var, f"y{j + 1}[{i}]", EXISTS)
        for j, block in enumerate(index_blocks)
        for i, var in enumerate(block)
    ]

    clauses: list[Clause] = []
    for i, term in enumerate(padded.terms):
        gadget = base_clause(i, index_blocks)
        for lit in _sorted_lits(term):
            clauses.append(frozenset({lit}) | gadget)

    split_vars: list[int] = []
    for j, block in enumerate(index_blocks):
        pieces, fresh = split_clause_to_arity(frozenset(block), d, ids)
        clauses.extend(pieces)
        split_vars.extend(fresh)
        provenance.extend(VariableRole(var, f"split_y{j + 1}", EXISTS) for var in fresh)

    existential = [v for block in index_blocks for v in block] + split_vars
    prefix = normalize_prefix([(FORALL, range(1, n + 1)), (EXISTS, existential)])
    instance = QbfInstance(prefix, CnfMatrix(tuple(clauses), ids.last))
    return ReductionOutput(
        instance=instance,
        x_map=tuple(range(1, n + 1)),
        existential_count=len(existential),
        alternations=len(prefix),
        provenance=tuple(provenance),
        recursion_trace=((n, m),),
    )


def reduce_dnf_to_4qbf(psi: DnfFormula, base_threshold: int = 20) -> ReductionOutput:
    """Reduce a DNF to an equivalent 4-ary QBF with few existential variables.

    Recursive: while variables + terms exceed ``base_threshold``, the term
    index is binary-encoded in existential variables y, mirrored by two
    universal selector vectors z1/z2 (plus an escape variable w), and the
    construction recurses on the cheat-detection DNF over (y, z1, z2, w).  At
    or below the threshold the DNF is converted by enumerating falsifying
    assignments and splitting the resulting long clauses to arity 4.

    Raises ReductionError when a recursion step fails to shrink the problem,
    which at small thresholds means the threshold must be raised.
    """
    if base_threshold < 4:
        raise ValueError("base threshold must be at least 4")
    if not psi.terms:
        raise ValueError("source DNF must have at least one term")
    n = psi.num_vars
    universe = tuple(range(1, n + 1))
    ids = _IdSource(n + 1)
    suffix, clauses, provenance, trace = _construct_level(
        psi.terms, universe, ids, base_threshold, level=0
    )
    prefix = normalize_prefix([(FORALL, universe)] + suffix)
    instance = QbfInstance(prefix, CnfMatrix(tuple(clauses), ids.last))
    existential_count = sum(len(vars_) for quant, vars_ in suffix if quant == EXISTS)
    return ReductionOutput(
        instance=instance,
        x_map=universe,
        existential_count=existential_count,
        alternations=len(prefix),
        provenance=tuple(provenance),
        recursion_trace=tuple(trace),
    )


def _construct_level(terms, universe, ids, base_threshold, level):
    n, m = len(universe), len(terms)
    if n + m <= base_threshold:
        return _base_case(terms, universe, ids, level)

    length = 0
    while 4**length < m:
        length += 1
    m_padded = 4**length
    padded = tuple(terms) + (terms[-1],) * (m_padded - m)
    root = 2**length  # sqrt of the padded term count
    y = ids.take(2 * length)
    z1 = ids.take(root)
    z2 = ids.take(root)
    (w,) = ids.take(1)
    provenance = (
        [VariableRole(v, f"L{level}.y[{i}]", EXISTS) for i, v in enumerate(y)]
        + [VariableRole(v, f"L{level}.z1[{j}]", FORALL) for j, v in enumerate(z1)]
        + [VariableRole(v, f"L{level}.z2[{j}]", FORALL) for j, v in enumerate(z2)]
        + [VariableRole(w, f"L{level}.w", EXISTS)]
    )

    clauses: list[Clause] = []
    for i, term in enumerate(padded):
        j1, j2 = lambda_pair(i, m_padded)
        gadget = frozenset({-z1[j1], -z2[j2], w})
        for lit in _sorted_lits(term):
            clauses.append(frozenset({lit}) | gadget)

    # Cheat-detection DNF: true when w is off, or some selector bit is raised
    # whose index disagrees with the binary encoding carried by y.
    cheat_terms: list[Term] = [frozenset({-w})]
    halves = (y[:length], y[length:])
    for selector, half in zip((z1, z2), halves):
        for j in range(root):
            for lit in _sorted_lits(binary_clause(j, half)):
                cheat_terms.append(frozenset({selector[j], lit}))

    new_universe = y + z1 + z2 + (w,)
    n_next, m_next = len(new_universe), len(cheat_terms)
    if n_next + m_next >= n + m:
        raise ReductionError(
            f"recursion does not shrink at level {level}: cheat formula has "
            f"{n_next} variables + {m_next} terms >= {n} + {m}; "
            f"raise base_threshold to at least {n + m}"
        )
    sub_suffix, sub_clauses, sub_prov, sub_trace = _construct_level(
        cheat_terms, new_universe, ids, base_threshold, level + 1
    )
    suffix = [(EXISTS, y), (FORALL, z1 + z2), (EXISTS, (w,))] + sub_suffix
    return suffix, clauses + sub_clauses, provenance + sub_prov, [(n, m)] + sub_trace


def _base_case(terms, universe, ids, level):
    """Brute-force conversion: one clause per falsifying assignment, split to
    arity 4 with fresh innermost existential variables."""
    n = len(universe)
    position = {var: i for i, var in enumerate(universe)}
    term_masks = []
    for term in terms:
        pos = neg = 0
        for lit in term:
            if lit > 0:
                pos |= 1 << position[lit]
            else:
                neg |= 1 << position[-lit]
        term_masks.append((pos, neg))

    clauses: list[Clause] = []
    fresh: list[int] = []
    for assignment in range(1 << n):
        satisfied = any(
            assignment & pos == pos and assignment & neg == 0 for pos, neg in term_masks
        )
        if satisfied:
            continue
        long_clause = frozenset(
            var if not assignment >> i & 1 else -var for i, var in enumerate(universe)
        )
        pieces, links = split_clause_to_arity(long_clause, 4, ids)
        clauses.extend(pieces)
        fresh.extend(links)
    provenance = [VariableRole(v, f"L{level}.split", EXISTS) for v in fresh]
    suffix = [(EXISTS, tuple(fresh))] if fresh else []
    return suffix, clauses, provenance, [(n, len(terms))]


def provenance_text(output: ReductionOutput) -> str:
    """Sidecar format: one line per introduced variable, 'id role block'."""
    block_of: dict[int, int] = {}
    for index, block in enumerate(output.instance.prefix):
        for var in block.vars:
            block_of[var] = index
    lines = [f"{entry.var} {entry.role} {block_of[entry.var]}" for entry in output.provenance]
    return "\n".join(lines) + ("\n" if lines else "")
