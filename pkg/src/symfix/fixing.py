"""Unit-clause symmetry breaking: orbitopal, negation and clausal fixing.

Rules run in the order orbitopal, negation, clausal. After every fixed literal
the working group is replaced by the pointwise stabilizer of that literal, so
every later witness is also a symmetry of the formula with the units added.
"""

import logging
import time
from dataclasses import dataclass, field

from .checker import CONFLICT, PropagationState
from .cnf import find_ulcs
from .group import (
    OrbitTable,
    SSLimits,
    generator_filter_stabilizer,
    pointwise_stabilizer,
    schreier_sims,
)
from .structure import adjacent_row_swap, assemble_orbitope, detect_row_swaps

log = logging.getLogger(__name__)

RULES = ("orbitopal", "negation", "clausal")


@dataclass
class FixedUnit:
    """One derived unit.

    ``witness`` is the symmetry used by its proof step: the adjacent row swap
    for orbitopal negatives (``pair`` holds the literals set false/true), the
    literal-to-negation map for negation fixing, None for steps checked by
    propagation. Clausal units carry ``clause`` and one ``(literal, symmetry)``
    per other clause literal.
    """

    literal: int
    rule: str
    witness: object = None
    pair: tuple = None
    clause: tuple = None
    clause_witnesses: list = field(default_factory=list)


@dataclass
class FixConfig:
    orbitopal: bool = True
    negation: bool = True
    clausal: bool = True
    stabilizer: str = "exact"  # or "filter"
    ss_limits: SSLimits = field(default_factory=SSLimits)
    orbitope_hints: list = None

    @classmethod
    def only(cls, *rules, **kw):
        return cls(**{r: r in rules for r in RULES}, **kw)


@dataclass
class FixingResult:
    units: list = field(default_factory=list)
    unsat: bool = False
    skipped: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def literals(self):
        return [u.literal for u in self.units]

    def count(self, rule):
        return sum(1 for u in self.units if u.rule == rule)


class _Group:
    """Working group that shrinks to pointwise stabilizers."""

    def __init__(self, gens, num_vars, config):
        self.gens = list(gens)
        self.num_vars = num_vars
        self.config = config
        self.exact = config.stabilizer == "exact"
        self._table = None

    def order(self):
        state = schreier_sims(self.gens, limits=self.config.ss_limits, num_vars=self.num_vars)
        return state.order() if state.has_bsgs else None

    @property
    def table(self):
        if self._table is None:
            self._table = OrbitTable(self.gens, self.num_vars)
        return self._table

    def stabilize(self, lits):
        if not lits or not self.gens:
            return
        if self.exact:
            state = schreier_sims(self.gens, lits, self.config.ss_limits, self.num_vars)
            if state.has_bsgs:
                self.gens = pointwise_stabilizer(state, lits)
            else:
                log.info("Schreier-Sims budget exceeded; filtering generators")
                self.gens = generator_filter_stabilizer(self.gens, lits)
        else:
            self.gens = generator_filter_stabilizer(self.gens, lits)
        self._table = None


def orbitopal_fix(f, mat, fixed=frozenset()):
    """Units of one orbitope in proof order, column by column, top to bottom:
    the upper-left staircase false, with the bottom-left entry true closing
    the first column.

    Returns None if a unit would contradict ``fixed``.
    """
    n, m = mat.shape
    units = []
    for j in range(min(n, m)):
        for i in range(n - 1 - j):
            lit = mat.rows[i][j]
            units.append(
                FixedUnit(-lit, "orbitopal", adjacent_row_swap(mat, i), pair=(lit, mat.rows[i + 1][j]))
            )
        if j == 0:
            # first column is now false above the bottom entry: RUP by the ULC
            units.append(FixedUnit(mat.rows[n - 1][0], "orbitopal"))
    if any(-u.literal in fixed for u in units):
        return None
    return units


def clausal_fix(f, group, fixed):
    """Fix the first literal of each clause whose literals share one orbit.

    Every clause is inspected once, in order; the group is stabilized after
    each fixed literal.
    """
    units = []
    for clause in f.clauses:
        if len(clause) < 2:
            continue
        table = group.table
        l1 = clause[0]
        if not all(table.same_orbit(l1, l) for l in clause[1:]):
            continue
        if l1 in fixed or -l1 in fixed:
            log.info("clausal candidate %d conflicts with an earlier unit", l1)
            continue
        witnesses = [(li, table.witness(l1, li)) for li in clause[1:]]
        units.append(FixedUnit(l1, "clausal", clause=tuple(clause), clause_witnesses=witnesses))
        fixed.add(l1)
        group.stabilize([l1])
    return units


def negation_fix(f, group, fixed):
    """Fix ``v`` for every variable (ascending) whose literals share an orbit."""
    units = []
    for v in sorted(f.variables):
        if v in fixed or -v in fixed:
            continue
        table = group.table
        if not table.same_orbit(v, -v):
            continue
        units.append(FixedUnit(v, "negation", witness=table.witness(v, -v)))
        fixed.add(v)
        group.stabilize([v])
    return units


def run_pipeline(f, gens, config=None):
    """Apply the enabled rules to simplified formula ``f`` with symmetry generators ``gens``.

    Generators are restricted to the variables of ``f``. The result lists units
    in proof order; ``unsat`` is set when propagation on ``f`` plus the units
    conflicts.
    """
    config = config or FixConfig()
    variables = f.variables
    gens = [g.restrict(variables) for g in gens]
    gens = [g for g in gens if not g.is_identity()]
    group = _Group(gens, f.num_vars, config)
    result = FixingResult()
    fixed = set()
    stats = result.stats
    t0 = time.perf_counter()
    stats["generators"] = len(gens)
    stats["group_order_before"] = group.order() if gens else 1

    ulcs = find_ulcs(f)
    stats["ulcs"] = len(ulcs)
    if config.orbitopal:
        mats = assemble_orbitope(detect_row_swaps(group.gens), f, ulcs)
        if config.orbitope_hints:
            from .structure import orbitope_from_hint

            for rows in config.orbitope_hints:
                mat = orbitope_from_hint(rows, f, group.gens, ulcs)
                if mat is None:
                    result.skipped.append(("hint", rows))
                else:
                    mats.insert(0, mat)
        stats["orbitopes"] = len(mats)
        used_columns = set()
        new = []
        for mat in mats:
            if used_columns & set(mat.columns) or mat.shape[0] < 2:
                result.skipped.append(("orbitope", mat.shape))
                continue
            swaps = [adjacent_row_swap(mat, i) for i in range(mat.shape[0] - 1)]
            # earlier units must stay fixed under this matrix's witnesses
            if any(not s.fixes(l) for s in swaps for l in fixed):
                result.skipped.append(("orbitope", mat.shape))
                continue
            units = orbitopal_fix(f, mat, fixed)
            if units is None:
                result.skipped.append(("orbitope", mat.shape))
                continue
            used_columns |= set(mat.columns)
            fixed.update(u.literal for u in units)
            new.extend(units)
        result.units += new
        group.stabilize([u.literal for u in new])
    if config.negation:
        result.units += negation_fix(f, group, fixed)
    if config.clausal:
        result.units += clausal_fix(f, group, fixed)

    state = PropagationState(f.clauses)
    result.unsat = state.propagate(result.literals) == CONFLICT
    state.undo(0)
    for rule in RULES:
        stats[f"units_{rule}"] = result.count(rule)
    stats["group_order_after"] = group.order() if group.gens else 1
    stats["time_ms"] = round(1000 * (time.perf_counter() - t0), 3)
    return result
