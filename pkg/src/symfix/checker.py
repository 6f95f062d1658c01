"""Proof checking: unit propagation and the substitution-redundancy test.

The propagation engine keeps, per clause, counts of true and false literals
under the current trail. Between proof steps the trail is empty, so clauses can
be added and deleted without touching counters.
"""

from dataclasses import dataclass

from .cnf import canonical
from .proof import DELETE, RUP, SR, ProofParseError, parse_proof

CONFLICT = "conflict"
STABLE = "stable"


class PropagationState:
    """Clause database with a trail of true literals."""

    def __init__(self, clauses=()):
        self.clauses = {}
        self.by_key = {}
        self.occ = {}
        self.units = set()
        self.empty = set()
        self.ntrue = {}
        self.nfalse = {}
        self.value = {}
        self.trail = []
        self.qhead = 0
        self._next_id = 0
        for c in clauses:
            self.add(c)

    def __len__(self):
        return len(self.clauses)

    def add(self, clause):
        assert not self.trail, "clauses are added at the root"
        clause = tuple(dict.fromkeys(clause))
        cid = self._next_id
        self._next_id += 1
        self.clauses[cid] = clause
        self.by_key.setdefault(canonical(clause), []).append(cid)
        for l in clause:
            self.occ.setdefault(l, set()).add(cid)
        self.ntrue[cid] = self.nfalse[cid] = 0
        if len(clause) == 1:
            self.units.add(cid)
        elif not clause:
            self.empty.add(cid)
        return cid

    def delete(self, clause):
        """Remove one clause equal (as a set) to ``clause``; False if absent."""
        assert not self.trail
        ids = self.by_key.get(canonical(dict.fromkeys(clause)))
        if not ids:
            return False
        cid = ids.pop()
        if not ids:
            del self.by_key[canonical(self.clauses[cid])]
        for l in self.clauses[cid]:
            self.occ[l].discard(cid)
        self.units.discard(cid)
        self.empty.discard(cid)
        del self.clauses[cid], self.ntrue[cid], self.nfalse[cid]
        return True

    def contains(self, clause):
        return bool(self.by_key.get(canonical(dict.fromkeys(clause))))

    def lit_value(self, lit):
        v = self.value.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def _assign(self, lit):
        """False if ``lit`` is already false."""
        val = self.lit_value(lit)
        if val is not None:
            return val
        self.value[abs(lit)] = lit > 0
        self.trail.append(lit)
        return True

    def propagate(self, assumptions=()):
        """Assign the assumptions, then propagate to fixpoint. Returns CONFLICT or STABLE."""
        if self.empty:
            return CONFLICT
        for l in assumptions:
            if not self._assign(l):
                return CONFLICT
        if self.qhead == 0:
            for cid in self.units:
                if not self._assign(self.clauses[cid][0]):
                    return CONFLICT
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            for cid in self.occ.get(lit, ()):
                self.ntrue[cid] += 1
            falsified = self.occ.get(-lit, ())
            for cid in falsified:
                self.nfalse[cid] += 1
            for cid in falsified:
                clause = self.clauses[cid]
                if self.ntrue[cid] or self.nfalse[cid] < len(clause) - 1:
                    continue
                free = None
                for l in clause:
                    val = self.lit_value(l)
                    if val is None:
                        if free is not None:
                            break
                        free = l
                    elif val:
                        break
                else:
                    if free is None:
                        return CONFLICT
                    self._assign(free)
        return STABLE

    def mark(self):
        return len(self.trail)

    def undo(self, mark=0):
        while len(self.trail) > mark:
            lit = self.trail.pop()
            if len(self.trail) < self.qhead:
                for cid in self.occ.get(lit, ()):
                    self.ntrue[cid] -= 1
                for cid in self.occ.get(-lit, ()):
                    self.nfalse[cid] -= 1
            del self.value[abs(lit)]
        self.qhead = min(self.qhead, mark)

    def trail_set(self):
        return set(self.trail)


def unit_propagate(state, assumptions=()):
    """Propagate from a clean root; returns ``(status, trail)`` and leaves the state clean."""
    state.undo(0)
    status = state.propagate(assumptions)
    trail = list(state.trail)
    state.undo(0)
    return status, trail


def check_rup(state, clause):
    status, _ = unit_propagate(state, [-l for l in clause])
    return status == CONFLICT


def check_sr_step(state, clause, witness, strict=False):
    """Whether ``clause`` is substitution redundant for the database under ``witness``.

    Returns None on success, else the first clause D whose image under the
    witness could not be refuted by propagation.
    """
    state.undo(0)
    try:
        if state.propagate([-l for l in clause]) == CONFLICT:
            return None
        base = state.mark()
        if strict:
            targets = list(state.clauses.values())
        else:
            ids = set()
            for v in witness.support:
                ids |= state.occ.get(v, set()) | state.occ.get(-v, set())
            targets = [state.clauses[i] for i in sorted(ids)]
        clause = tuple(clause)
        for pos, d in enumerate(targets + [clause]):
            reduced = witness.reduce(d)
            if reduced is None:
                continue
            if not strict:
                premise = pos < len(targets)
                if premise and set(reduced) == set(d):
                    continue
                if state.contains(reduced):
                    continue
            if state.propagate([-l for l in reduced]) != CONFLICT:
                return d
            state.undo(base)
        return None
    finally:
        state.undo(0)


@dataclass
class Verdict:
    accepted: bool
    refuted: bool = False
    steps: int = 0
    line: int = None
    clause: tuple = None
    reason: str = ""

    def summary(self):
        if self.accepted:
            return "s VERIFIED"
        return f"s REJECTED line {self.line}"


def check_proof(f0, proof, strict=False):
    """Check every step of ``proof`` (bytes, str or a step list) against ``f0``."""
    if isinstance(proof, (bytes, str)):
        try:
            steps = parse_proof(proof)
        except ProofParseError as exc:
            return Verdict(False, line=exc.line, reason=str(exc))
    else:
        steps = list(enumerate(proof, start=1))
    state = PropagationState(f0.clauses)
    for count, (lineno, step) in enumerate(steps, start=1):
        if step.kind == DELETE:
            if not state.delete(step.clause):
                return Verdict(False, steps=count - 1, line=lineno, clause=step.clause,
                               reason="deleted clause is not in the database")
            continue
        if step.kind == RUP:
            if not check_rup(state, step.clause):
                return Verdict(False, steps=count - 1, line=lineno, clause=step.clause,
                               reason="clause is not implied by unit propagation")
        elif step.kind == SR:
            failed = check_sr_step(state, step.clause, step.witness, strict)
            if failed is not None:
                return Verdict(False, steps=count - 1, line=lineno, clause=step.clause,
                               reason=f"image of clause {list(failed)} not refuted")
        state.add(step.clause)
    return Verdict(True, refuted=bool(state.empty), steps=len(steps))
