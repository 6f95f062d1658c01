"""Synthetic symmetric families, brute-force oracles and the desk-scale suite.

Pigeonhole variable numbering: pigeon ``j`` in hole ``i`` (1-based) is variable
``(j - 1) * holes + i``. Parity variable ``x_k`` is variable ``k``.
"""

import csv
import io
import itertools
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .checker import check_proof
from .cnf import Formula, simplify
from .fixing import FixConfig, FixingResult, run_pipeline
from .proof import emit_proof, format_proof
from .symmetry import LiteralPermutation, find_symmetries

SAT = "SAT"
UNSAT = "UNSAT"

SETTINGS = {
    "orbitopal": ("orbitopal",),
    "negation": ("negation",),
    "clausal": ("clausal",),
    "all-units": ("orbitopal", "negation", "clausal"),
}

CSV_COLUMNS = [
    "family", "params", "setting", "units_orbitopal", "units_negation",
    "units_clausal", "proof_ok", "equisat_ok", "time_ms",
]


@dataclass
class FamilyInstance:
    family: str
    params: tuple
    formula: Formula
    status: str = None
    generators: list = field(default_factory=list)

    @property
    def name(self):
        return f"{self.family}({','.join(map(str, self.params))})"


def php_var(pigeon, hole, holes):
    return (pigeon - 1) * holes + hole


def gen_php(m, n):
    """``m`` pigeons, ``n`` holes: at-least-one per pigeon, then at-most-one per hole."""
    if m < 1 or n < 1:
        raise ValueError("need at least one pigeon and one hole")
    clauses = [[php_var(j, i, n) for i in range(1, n + 1)] for j in range(1, m + 1)]
    for i in range(1, n + 1):
        for j, k in itertools.combinations(range(1, m + 1), 2):
            clauses.append([-php_var(j, i, n), -php_var(k, i, n)])
    nv = m * n
    gens = []
    for i in range(1, n):
        gens.append(LiteralPermutation.from_mapping(
            nv, {php_var(j, h, n): php_var(j, 2 * i + 1 - h, n) for j in range(1, m + 1) for h in (i, i + 1)}))
    for j in range(1, m):
        gens.append(LiteralPermutation.from_mapping(
            nv, {php_var(p, i, n): php_var(2 * j + 1 - p, i, n) for i in range(1, n + 1) for p in (j, j + 1)}))
    return FamilyInstance("php", (m, n), Formula(nv, clauses), UNSAT if m > n else SAT, gens)


def gen_parity(n, charge):
    """CNF of ``x1 xor ... xor xn == charge`` with the double flips of ``x1, xj`` as generators."""
    if not 1 <= n <= 16:
        raise ValueError("parity constraints are limited to 1..16 variables")
    clauses = []
    for a in range(2**n):
        bits = [(a >> (n - 1 - k)) & 1 for k in range(n)]
        if sum(bits) % 2 != charge:
            clauses.append([-(k + 1) if b else k + 1 for k, b in enumerate(bits)])
    gens = [LiteralPermutation.from_mapping(n, {1: -1, j: -j}) for j in range(2, n + 1)]
    return FamilyInstance("parity", (n, charge), Formula(n, clauses), SAT, gens)


def example_formula():
    """``(x | y | z) & (-x | -y) & (-x | -z) & (-y | -z)`` with x, y, z = 1, 2, 3."""
    return Formula(3, [(1, 2, 3), (-1, -2), (-1, -3), (-2, -3)])


def brute_force_sat(f, max_vars=26):
    """Exhaustive truth-table check over the variables occurring in ``f``."""
    variables = sorted(f.variables)
    if any(len(c) == 0 for c in f.clauses):
        return UNSAT
    if len(variables) > max_vars:
        raise ValueError(f"{len(variables)} variables exceed the brute-force limit {max_vars}")
    pos = {v: k for k, v in enumerate(variables)}
    total = 1 << len(variables)
    chunk = 1 << 16
    for start in range(0, total, chunk):
        a = np.arange(start, min(total, start + chunk), dtype=np.int64)
        ok = np.ones(len(a), dtype=bool)
        for c in f.clauses:
            sat = np.zeros(len(a), dtype=bool)
            for l in c:
                bit = (a >> pos[abs(l)]) & 1
                sat |= bit.astype(bool) if l > 0 else ~bit.astype(bool)
            ok &= sat
            if not ok.any():
                break
        if ok.any():
            return SAT
    return UNSAT


def rup_refutation(f):
    """A witness-free refutation of unsatisfiable ``f`` from an exhaustive DPLL tree.

    Each closed node contributes the negation of its decisions, which is
    implied by propagation once both children are present; the root
    contributes the empty clause.
    """
    from .checker import PropagationState

    state = PropagationState(f.clauses)
    variables = sorted(f.variables)
    lines = []

    def close(decisions):
        state.undo(0)
        if state.propagate(decisions) == "conflict":
            state.undo(0)
            return True
        assigned = {abs(l) for l in state.trail}
        state.undo(0)
        free = next((v for v in variables if v not in assigned), None)
        if free is None:
            return False
        for lit in (free, -free):
            if not close(decisions + [lit]):
                return False
            lines.append([-d for d in decisions + [lit]])
        return True

    if not close([]):
        raise ValueError("formula is satisfiable")
    lines.append([])
    return "".join(" ".join(map(str, c + [0])) + "\n" for c in lines).encode()


def run_instance(inst, setting, config=None, search=False):
    """Simplify, fix and check one instance. Returns a CSV-shaped row."""
    t0 = time.perf_counter()
    simplified, slog = simplify(inst.formula)
    if search:
        gens = find_symmetries(simplified).generators
    else:
        gens = inst.generators
    config = config or FixConfig()
    rules = SETTINGS[setting]
    config = replace(config, **{r: r in rules for r in ("orbitopal", "negation", "clausal")})
    if slog.unsat:
        result = FixingResult(unsat=True)
    else:
        result = run_pipeline(simplified, gens, config)
    proof = format_proof(emit_proof(result))
    elapsed = 1000 * (time.perf_counter() - t0)
    verdict = check_proof(inst.formula, proof)
    equisat = ""
    if len(inst.formula.variables) <= 20:
        before = brute_force_sat(inst.formula)
        after = brute_force_sat(simplified.with_units(slog.units + result.literals))
        equisat = before == after and (inst.status in (None, before))
    return {
        "family": inst.family,
        "params": " ".join(map(str, inst.params)),
        "setting": setting,
        "units_orbitopal": result.count("orbitopal"),
        "units_negation": result.count("negation"),
        "units_clausal": result.count("clausal"),
        "proof_ok": verdict.accepted,
        "equisat_ok": equisat,
        "time_ms": round(elapsed, 3),
    }


def default_families():
    out = [gen_php(n + 1, n) for n in range(2, 7)]
    out += [gen_parity(n, 1) for n in range(2, 7)]
    f = example_formula()
    out.append(FamilyInstance("example", (), f, SAT, find_symmetries(f).generators))
    return out


def run_suite(families=None, settings=("all-units",), config=None, search=False):
    """Rows for every instance and setting. Failing instances are recorded, not raised."""
    families = default_families() if families is None else families
    rows = []
    for inst in families:
        for setting in settings:
            try:
                rows.append(run_instance(inst, setting, config, search))
            except Exception as exc:  # noqa: BLE001 - recorded in the report
                rows.append({**{k: "" for k in CSV_COLUMNS}, "family": inst.family,
                             "params": " ".join(map(str, inst.params)), "setting": setting,
                             "proof_ok": False, "error": repr(exc)})
    return rows


def aggregate(rows):
    """Per-setting mean units and time, plus proof/equisat pass counts."""
    out = {}
    for setting in dict.fromkeys(r["setting"] for r in rows):
        sel = [r for r in rows if r["setting"] == setting and "error" not in r]
        if not sel:
            continue
        units = [r["units_orbitopal"] + r["units_negation"] + r["units_clausal"] for r in sel]
        out[setting] = {
            "instances": len(sel),
            "mean_units": sum(units) / len(sel),
            "mean_time_ms": sum(r["time_ms"] for r in sel) / len(sel),
            "proofs_ok": sum(1 for r in sel if r["proof_ok"]),
            "equisat_ok": sum(1 for r in sel if r["equisat_ok"] is True),
        }
    return out


def report_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def report_table(rows):
    headers = ["instance", "setting", "#orb", "#neg", "#cla", "proof", "equisat", "ms"]
    body = [
        [f"{r['family']}({r['params'].replace(' ', ',')})", r["setting"], r["units_orbitopal"],
         r["units_negation"], r["units_clausal"], r["proof_ok"], r["equisat_ok"], r["time_ms"]]
        for r in rows
    ]
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *body)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(headers, widths))]
    lines += ["  ".join(str(x).ljust(w) for x, w in zip(row, widths)) for row in body]
    return "\n".join(lines) + "\n"
