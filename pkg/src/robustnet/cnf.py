"""3-CNF formulas and DIMACS input/output."""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import FormatError


@dataclass(frozen=True)
class CnfFormula:
    """A 3-SAT instance.  Literals are signed 1-based variable indices."""

    variable_count: int
    clauses: tuple

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(l) for l in c) for c in self.clauses))
        problems = self.problems()
        if problems:
            raise FormatError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.variable_count < 0:
            out.append("negative variable count")
        for i, clause in enumerate(self.clauses):
            if len(clause) != 3 or len(set(clause)) != 3:
                out.append(f"clause {i + 1} must have exactly three distinct literals: {clause}")
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    out.append(f"clause {i + 1}: variable index {abs(lit)} outside 1..{self.variable_count}")
        return out

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment) -> bool:
        """``assignment`` maps variable -> bool (or is a sequence indexed from 0)."""
        value = _lookup(assignment)
        return all(any(value(abs(l)) == (l > 0) for l in c) for c in self.clauses)


def _lookup(assignment):
    if isinstance(assignment, dict):
        return lambda v: assignment.get(v)
    return lambda v: assignment[v - 1]


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF.  Clauses may span lines; ``c`` lines and ``%`` trailers are ignored."""
    n_vars = n_clauses = None
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if n_vars is not None:
                raise FormatError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"line {lineno}: malformed problem line {line!r}")
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer counts") from None
            if n_vars < 0 or n_clauses < 0:
                raise FormatError(f"line {lineno}: negative counts")
            continue
        if n_vars is None:
            raise FormatError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            try:
                tokens.append(int(tok))
            except ValueError:
                raise FormatError(f"line {lineno}: bad literal {tok!r}") from None
    if n_vars is None:
        raise FormatError("missing 'p cnf' problem line")

    clauses, current = [], []
    for lit in tokens:
        if lit == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(lit)
    if current:
        raise FormatError("last clause is not terminated by 0")
    if len(clauses) != n_clauses:
        raise FormatError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return CnfFormula(n_vars, tuple(clauses))


def to_dimacs(cnf: CnfFormula) -> str:
    lines = [f"p cnf {cnf.variable_count} {cnf.clause_count}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


def full_polarity_formula() -> CnfFormula:
    """The eight clauses over three variables with every sign pattern (unsatisfiable)."""
    clauses = []
    for mask in range(8):
        clauses.append(tuple(v if not mask >> (v - 1) & 1 else -v for v in (1, 2, 3)))
    return CnfFormula(3, tuple(clauses))


def sample_formula() -> CnfFormula:
    """(x1 | ~x2 | ~x3) & (~x1 | x2 | x3) & (x1 | x2 | x3)."""
    return CnfFormula(3, ((1, -2, -3), (-1, 2, 3), (1, 2, 3)))
