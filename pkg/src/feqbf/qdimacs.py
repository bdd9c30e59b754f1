"""QDIMACS and DNF exchange formats.

QDIMACS follows the standard: comment lines ``c ...``, a header
``p cnf <nvars> <nclauses>``, prefix lines starting with ``a`` or ``e``
terminated by 0, and clause lines of integers terminated by 0.  The DNF
format has the same shape with header ``p dnf <nvars> <nterms>`` and terms
in place of clauses.
"""

from __future__ import annotations

from .formulas import (
    EXISTS,
    FORALL,
    CnfMatrix,
    DnfFormula,
    QbfInstance,
    literal_sort_key,
    normalize_prefix,
)


class FormatError(ValueError):
    """Parse failure, carrying the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _content_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield line_no, line


def _parse_header(line_no: int, line: str, kind: str) -> tuple[int, int]:
    fields = line.split()
    if len(fields) != 4 or fields[0] != "p" or fields[1] != kind:
        raise FormatError(line_no, f"malformed header, expected 'p {kind} <nvars> <ncount>'")
    try:
        num_vars, count = int(fields[2]), int(fields[3])
    except ValueError:
        raise FormatError(line_no, "header counts must be integers") from None
    if num_vars < 0 or count < 0:
        raise FormatError(line_no, "header counts must be non-negative")
    return num_vars, count


def _parse_int_line(line_no: int, line: str) -> list[int]:
    try:
        values = [int(tok) for tok in line.split()]
    except ValueError:
        raise FormatError(line_no, "non-integer field") from None
    if not values or values[-1] != 0:
        raise FormatError(line_no, "line must be terminated by 0")
    if any(v == 0 for v in values[:-1]):
        raise FormatError(line_no, "unexpected 0 before the line terminator")
    return values[:-1]


def parse_qdimacs(text: str) -> QbfInstance:
    """Parse QDIMACS text into a QbfInstance.

    Variables declared in the header but missing from every prefix line are
    bound in an outermost existential block, per the usual free-variable
    convention; a file without prefix lines therefore reads as plain SAT.
    """
    num_vars = None
    num_clauses = 0
    blocks: list[tuple[str, list[int]]] = []
    declared: dict[int, int] = {}
    clauses: list[frozenset[int]] = []
    for line_no, line in _content_lines(text):
        if line.startswith("p"):
            if num_vars is not None:
                raise FormatError(line_no, "duplicate header")
            num_vars, num_clauses = _parse_header(line_no, line, "cnf")
            continue
        if num_vars is None:
            raise FormatError(line_no, "missing 'p cnf' header")
        if line.split(None, 1)[0] in ("a", "e"):
            if clauses:
                raise FormatError(line_no, "prefix line after the first clause")
            quant = FORALL if line[0] == "a" else EXISTS
            vars_ = _parse_int_line(line_no, line[1:])
            for v in vars_:
                if v < 1 or v > num_vars:
                    raise FormatError(line_no, f"variable {v} out of range 1..{num_vars}")
                if v in declared:
                    raise FormatError(line_no, f"variable {v} already declared on line {declared[v]}")
                declared[v] = line_no
            blocks.append((quant, vars_))
        else:
            lits = _parse_int_line(line_no, line)
            for lit in lits:
                if abs(lit) > num_vars:
                    raise FormatError(line_no, f"variable {abs(lit)} out of range 1..{num_vars}")
            clauses.append(frozenset(lits))
    if num_vars is None:
        raise FormatError(1, "missing 'p cnf' header")
    if len(clauses) != num_clauses:
        raise FormatError(
            len(text.splitlines()) or 1,
            f"header declares {num_clauses} clauses but {len(clauses)} were given",
        )
    free = [v for v in range(1, num_vars + 1) if v not in declared]
    prefix = normalize_prefix([(EXISTS, free)] + blocks if free else blocks)
    return QbfInstance(prefix, CnfMatrix(tuple(clauses), num_vars))


def emit_qdimacs(instance: QbfInstance) -> str:
    lines = [f"p cnf {instance.matrix.num_vars} {len(instance.matrix.clauses)}"]
    for block in instance.prefix:
        lines.append(f"{block.quantifier} {' '.join(map(str, block.vars))} 0")
    for clause in instance.matrix.clauses:
        lits = sorted(clause, key=literal_sort_key)
        lines.append(" ".join(map(str, lits)) + (" 0" if lits else "0"))
    return "\n".join(lines) + "\n"


def parse_dnf(text: str) -> tuple[DnfFormula, int]:
    """Parse the DNF format; returns the formula and the number of dropped
    contradictory terms (a term containing both x and -x is unsatisfiable)."""
    num_vars = None
    num_terms = 0
    terms: list[frozenset[int]] = []
    parsed = 0
    dropped = 0
    for line_no, line in _content_lines(text):
        if line.startswith("p"):
            if num_vars is not None:
                raise FormatError(line_no, "duplicate header")
            num_vars, num_terms = _parse_header(line_no, line, "dnf")
            continue
        if num_vars is None:
            raise FormatError(line_no, "missing 'p dnf' header")
        lits = _parse_int_line(line_no, line)
        for lit in lits:
            if abs(lit) > num_vars:
                raise FormatError(line_no, f"variable {abs(lit)} out of range 1..{num_vars}")
        parsed += 1
        term = frozenset(lits)
        if any(-lit in term for lit in term):
            dropped += 1
            continue
        terms.append(term)
    if num_vars is None:
        raise FormatError(1, "missing 'p dnf' header")
    if parsed != num_terms:
        raise FormatError(
            len(text.splitlines()) or 1,
            f"header declares {num_terms} terms but {parsed} were given",
        )
    return DnfFormula(tuple(terms), num_vars), dropped


def emit_dnf(formula: DnfFormula) -> str:
    lines = [f"p dnf {formula.num_vars} {len(formula.terms)}"]
    for term in formula.terms:
        lits = sorted(term, key=literal_sort_key)
        lines.append(" ".join(map(str, lits)) + (" 0" if lits else "0"))
    return "\n".join(lines) + "\n"
