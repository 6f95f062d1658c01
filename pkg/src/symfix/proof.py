"""Substitution-redundancy proof logs.

Line format, whitespace-separated::

    d <lit>* 0                                  deletion
    <lit>* 0                                    addition checked by propagation
    <lit>* 0 t <lit>* 0 m (<var> <lit>)* 0      addition with substitution witness

A literal ``l`` in the ``t`` block sets ``l`` true (so ``-l`` false); the ``m``
block lists ``var -> literal`` bindings. Lines starting with ``c`` are comments.
"""

from dataclasses import dataclass

TOP = "T"
BOT = "F"

RUP = "rup"
SR = "sr"
DELETE = "del"


class ProofParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"proof line {line}: {message}"
        super().__init__(message)


class Substitution:
    """Partial map from variables to a literal, TOP or BOT; identity elsewhere."""

    __slots__ = ("_map",)

    def __init__(self, mapping=None):
        self._map = {}
        for v, img in (mapping or {}).items():
            if v <= 0:
                raise ValueError(f"substitution keys are positive variables, got {v}")
            if img not in (TOP, BOT) and (not isinstance(img, int) or img == 0):
                raise ValueError(f"bad image {img!r} for variable {v}")
            if img != v:
                self._map[v] = img

    @classmethod
    def from_permutation(cls, sigma):
        return cls({v: sigma(v) for v in sigma.moved_variables()})

    def with_constants(self, true_lits=(), false_lits=()):
        m = dict(self._map)
        for l in true_lits:
            m[abs(l)] = TOP if l > 0 else BOT
        for l in false_lits:
            m[abs(l)] = BOT if l > 0 else TOP
        return Substitution(m)

    def without(self, var):
        m = dict(self._map)
        m.pop(var, None)
        return Substitution(m)

    def items(self):
        return sorted(self._map.items())

    @property
    def support(self):
        return set(self._map)

    def __call__(self, lit):
        img = self._map.get(abs(lit), abs(lit))
        if lit > 0:
            return img
        if img == TOP:
            return BOT
        if img == BOT:
            return TOP
        return -img

    def reduce(self, clause):
        """``clause`` under the substitution: None if satisfied, else a literal tuple."""
        out = []
        seen = set()
        for l in clause:
            img = self(l)
            if img == TOP:
                return None
            if img == BOT or img in seen:
                continue
            if -img in seen:
                return None
            seen.add(img)
            out.append(img)
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self):
        return f"Substitution({dict(self.items())})"


@dataclass(frozen=True)
class ProofStep:
    kind: str
    clause: tuple
    witness: Substitution = None

    def __post_init__(self):
        object.__setattr__(self, "clause", tuple(self.clause))
        if (self.kind == SR) != (self.witness is not None):
            raise ValueError("exactly the SR additions carry a witness")

    def to_line(self):
        lits = " ".join(str(l) for l in self.clause)
        body = f"{lits} 0" if lits else "0"
        if self.kind == DELETE:
            return "d " + body
        if self.kind == RUP:
            return body
        items = self.witness.items()
        t = [v if img == TOP else -v for v, img in items if img in (TOP, BOT)]
        m = [f"{v} {img}" for v, img in items if img not in (TOP, BOT)]
        t_block = " ".join(map(str, t + [0]))
        m_block = " ".join(m + ["0"])
        return f"{body} t {t_block} m {m_block}"


def format_proof(steps):
    return "".join(s.to_line() + "\n" for s in steps).encode()


def _ints(tokens, pos, lineno, what):
    out = []
    while True:
        if pos >= len(tokens):
            raise ProofParseError(f"unterminated {what}", lineno)
        try:
            x = int(tokens[pos])
        except ValueError:
            raise ProofParseError(f"expected integer in {what}, got {tokens[pos]!r}", lineno) from None
        pos += 1
        if x == 0:
            return out, pos
        out.append(x)


def parse_step(line, lineno=None):
    tokens = line.split()
    if tokens[0] == "d":
        lits, pos = _ints(tokens, 1, lineno, "deletion")
        kind = DELETE
    else:
        lits, pos = _ints(tokens, 0, lineno, "clause")
        kind = RUP
    if pos == len(tokens):
        return ProofStep(kind, lits)
    if kind == DELETE or tokens[pos] != "t":
        raise ProofParseError(f"unexpected token {tokens[pos]!r}", lineno)
    t_lits, pos = _ints(tokens, pos + 1, lineno, "t block")
    if pos >= len(tokens) or tokens[pos] != "m":
        raise ProofParseError("missing 'm' marker", lineno)
    pairs, pos = _ints(tokens, pos + 1, lineno, "m block")
    if pos != len(tokens):
        raise ProofParseError("trailing tokens", lineno)
    if len(pairs) % 2:
        raise ProofParseError("odd number of entries in m block", lineno)
    mapping = {}
    for l in t_lits:
        if abs(l) in mapping:
            raise ProofParseError(f"variable {abs(l)} bound twice", lineno)
        mapping[abs(l)] = TOP if l > 0 else BOT
    for v, img in zip(pairs[::2], pairs[1::2]):
        if v <= 0 or v in mapping:
            raise ProofParseError(f"bad or repeated binding for variable {v}", lineno)
        mapping[v] = img
    return ProofStep(SR, lits, Substitution(mapping))


def parse_proof(data):
    """Parse proof text into ``(line number, ProofStep)`` pairs."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    steps = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        steps.append((lineno, parse_step(s, lineno)))
    return steps


def orbitopal_witness(sigma, false_lit, true_lit):
    """Row-swap witness: ``false_lit`` to BOT, ``true_lit`` to TOP, ``sigma`` elsewhere."""
    base = Substitution.from_permutation(sigma).without(abs(false_lit)).without(abs(true_lit))
    return base.with_constants(true_lits=[true_lit], false_lits=[false_lit])


def emit_orbitopal_steps(units):
    steps = []
    for u in units:
        if u.witness is None:
            steps.append(ProofStep(RUP, (u.literal,)))
        else:
            false_lit, true_lit = u.pair
            steps.append(ProofStep(SR, (u.literal,), orbitopal_witness(u.witness, false_lit, true_lit)))
    return steps


def emit_clausal_steps(units, delete_binaries=False):
    steps = []
    for u in units:
        l1 = u.literal
        binaries = [(l1, -li) for li, _ in u.clause_witnesses]
        for (li, sigma), clause in zip(u.clause_witnesses, binaries):
            steps.append(ProofStep(SR, clause, Substitution.from_permutation(sigma)))
        steps.append(ProofStep(RUP, (l1,)))
        if delete_binaries:
            steps.extend(ProofStep(DELETE, c) for c in binaries)
    return steps


def emit_negation_steps(units):
    return [ProofStep(SR, (u.literal,), Substitution.from_permutation(u.witness)) for u in units]


def emit_proof(result, close=True, delete_binaries=False):
    """All steps of a fixing result in derivation order.

    With ``close`` and an UNSAT outcome, the proof ends with the empty clause.
    """
    steps = []
    for u in result.units:
        if u.rule == "orbitopal":
            steps += emit_orbitopal_steps([u])
        elif u.rule == "clausal":
            steps += emit_clausal_steps([u], delete_binaries)
        elif u.rule == "negation":
            steps += emit_negation_steps([u])
        else:
            raise ValueError(f"unknown rule {u.rule!r}")
    if close and result.unsat:
        steps.append(ProofStep(RUP, ()))
    return steps


def compose_with_refutation(sr_steps, refutation):
    """Append a witness-free clausal proof to an SR prefix.

    The refutation is parsed first so that its errors surface unchanged.
    """
    for lineno, step in parse_proof(refutation):
        if step.kind == SR:
            raise ProofParseError("refutation must not contain witnesses", lineno)
    if isinstance(refutation, str):
        refutation = refutation.encode()
    prefix = format_proof(sr_steps)
    if refutation and not refutation.endswith(b"\n"):
        refutation += b"\n"
    return prefix + refutation
