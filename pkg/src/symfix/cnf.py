"""CNF formulas: DIMACS parsing and writing, simplification, unique literal clauses.

Literals are signed integers as in DIMACS. Internally some modules use the dense
point encoding ``2*(v-1) + (lit < 0)``, so that ``p ^ 1`` is the negation of ``p``;
see :func:`lit_to_point` and :func:`point_to_lit`.
"""

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property

DEFAULT_MAX_INPUT_BYTES = 10**9


class ParseError(ValueError):
    """Malformed DIMACS input. ``line`` is 1-based."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def lit_to_point(lit):
    return 2 * (abs(lit) - 1) + (lit < 0)


def point_to_lit(p):
    v = (p >> 1) + 1
    return -v if p & 1 else v


def canonical(clause):
    return tuple(sorted(clause))


@dataclass(frozen=True)
class Formula:
    """A clause database over variables ``1..num_vars``.

    Clauses keep their input literal order. ``origin`` maps each clause to its
    index in the formula it was derived from (identity for parsed formulas).
    """

    num_vars: int
    clauses: tuple = ()
    origin: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.origin is None:
            object.__setattr__(self, "origin", tuple(range(len(self.clauses))))

    def __len__(self):
        return len(self.clauses)

    @cached_property
    def occurrences(self):
        """Per-literal occurrence counts."""
        counts = Counter()
        for c in self.clauses:
            counts.update(c)
        return counts

    @cached_property
    def canonical_clauses(self):
        return tuple(canonical(c) for c in self.clauses)

    @cached_property
    def clause_multiset(self):
        return Counter(self.canonical_clauses)

    @cached_property
    def variables(self):
        return frozenset(abs(l) for c in self.clauses for l in c)

    @cached_property
    def literals(self):
        return frozenset(l for c in self.clauses for l in c)

    def with_units(self, units):
        """Return ``self`` with one unit clause per literal appended."""
        return Formula(self.num_vars, self.clauses + tuple((u,) for u in units))

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self.num_vars == other.num_vars and self.clauses == other.clauses

    def __hash__(self):
        return hash((self.num_vars, self.clauses))


def parse_dimacs(data, max_bytes=DEFAULT_MAX_INPUT_BYTES):
    """Parse DIMACS CNF from ``bytes`` or ``str``.

    Clauses may span lines or share a line. The header counts must match the
    content.
    """
    if max_bytes is not None and len(data) > max_bytes:
        raise ParseError(f"input is {len(data)} bytes, above the limit of {max_bytes}")
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")

    header = None
    clauses = []
    current = []
    lineno = 0
    for lineno, line in enumerate(data.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("p"):
            if header is not None:
                raise ParseError("duplicate header", lineno)
            parts = stripped.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise ParseError(f"malformed header {stripped!r}", lineno)
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {stripped!r}", lineno) from None
            if nvars < 0 or nclauses < 0:
                raise ParseError("negative count in header", lineno)
            header = (nvars, nclauses)
            continue
        if header is None:
            raise ParseError("clause data before 'p cnf' header", lineno)
        for tok in stripped.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ParseError(
                    f"variable {abs(lit)} exceeds declared count {header[0]}", lineno
                )
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", lineno or None)
    if current:
        raise ParseError("last clause is missing its 0 terminator", lineno)
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Formula(header[0], clauses)


def write_dimacs(f, extra_units=()):
    """Serialize ``f`` followed by one unit clause per literal in ``extra_units``."""
    extra_units = list(extra_units)
    lines = [f"p cnf {f.num_vars} {len(f.clauses) + len(extra_units)}"]
    for c in f.clauses:
        lines.append(" ".join(map(str, c)) + " 0" if c else "0")
    for u in extra_units:
        lines.append(f"{u} 0")
    return ("\n".join(lines) + "\n").encode()


@dataclass
class SimplificationLog:
    """What :func:`simplify` did, keyed by clause index in the input formula.

    ``removed`` maps an input index to one of ``"tautology"``, ``"duplicate"``,
    ``"unit"`` or ``"satisfied"``; ``dropped_literals`` lists ``(index, literal)``
    pairs for in-clause duplicates; ``units`` are propagated literals in order.
    """

    removed: dict = field(default_factory=dict)
    dropped_literals: list = field(default_factory=list)
    units: list = field(default_factory=list)
    unsat: bool = False

    def counts(self):
        reasons = Counter(self.removed.values())
        return {
            "tautologies": reasons["tautology"],
            "duplicate_clauses": reasons["duplicate"],
            "duplicate_literals": len(self.dropped_literals),
            "units": len(self.units),
            "satisfied": reasons["satisfied"] + reasons["unit"],
        }

    def replay(self, original):
        """Rebuild the simplified formula from ``original`` using only this log."""
        if self.unsat:
            return Formula(original.num_vars, [()])
        false = {-u for u in self.units}
        clauses, origin = [], []
        for idx, c in enumerate(original.clauses):
            if idx in self.removed:
                continue
            seen = set()
            kept = []
            for l in c:
                if l not in seen and l not in false:
                    seen.add(l)
                    kept.append(l)
            clauses.append(kept)
            origin.append(idx)
        return Formula(original.num_vars, clauses, tuple(origin))


def _dedup_clauses(clauses, removed):
    seen = set()
    for idx in sorted(clauses):
        key = canonical(clauses[idx])
        if key in seen:
            removed[idx] = "duplicate"
            del clauses[idx]
        else:
            seen.add(key)


def simplify(f):
    """Remove duplicate literals, tautologies and duplicate clauses, then unit-propagate.

    Returns ``(formula, log)``. If propagation yields the empty clause the
    returned formula is the single empty clause and ``log.unsat`` is set.
    Surviving clauses keep their relative order and literal order.
    """
    log = SimplificationLog()
    clauses = {}
    for idx, c in enumerate(f.clauses):
        seen = set()
        kept = []
        for l in c:
            if l in seen:
                log.dropped_literals.append((idx, l))
            else:
                seen.add(l)
                kept.append(l)
        if any(-l in seen for l in kept):
            log.removed[idx] = "tautology"
        else:
            clauses[idx] = kept
    _dedup_clauses(clauses, log.removed)

    occ = {}
    for idx, c in clauses.items():
        for l in c:
            occ.setdefault(l, set()).add(idx)
    value = {}
    queue = deque()
    for idx in sorted(clauses):
        if not clauses[idx]:
            log.unsat = True
        elif len(clauses[idx]) == 1:
            queue.append(clauses[idx][0])
    while queue and not log.unsat:
        lit = queue.popleft()
        if value.get(abs(lit)) is not None:
            if value[abs(lit)] != (lit > 0):
                log.unsat = True
            continue
        value[abs(lit)] = lit > 0
        log.units.append(lit)
        for idx in sorted(occ.pop(lit, ())):
            if idx in clauses:
                log.removed[idx] = "unit" if len(clauses[idx]) == 1 else "satisfied"
                del clauses[idx]
        for idx in sorted(occ.pop(-lit, ())):
            if idx not in clauses:
                continue
            clauses[idx] = [l for l in clauses[idx] if l != -lit]
            if not clauses[idx]:
                log.unsat = True
                break
            if len(clauses[idx]) == 1:
                queue.append(clauses[idx][0])

    if log.unsat:
        return Formula(f.num_vars, [()]), log
    _dedup_clauses(clauses, log.removed)
    order = sorted(clauses)
    return Formula(f.num_vars, [clauses[i] for i in order], tuple(order)), log


def find_ulcs(f):
    """Indices of unique literal clauses: every literal occurs exactly once in ``f``."""
    occ = f.occurrences
    return {i for i, c in enumerate(f.clauses) if c and all(occ[l] == 1 for l in c)}
