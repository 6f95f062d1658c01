"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately share no code with the package beyond the
Formula container: their own truth tables, propagation loop, proof
tokenizer and symmetry enumeration.
"""

import itertools
import random

import pytest

from symfix.bench import example_formula, gen_parity, gen_php
from symfix.cnf import Formula


# truth tables ---------------------------------------------------------------

def naive_models(clauses, variables):
    variables = sorted(variables)
    for bits in itertools.product((False, True), repeat=len(variables)):
        a = dict(zip(variables, bits))
        if all(any(a[abs(l)] == (l > 0) for l in c) for c in clauses):
            yield a


def naive_sat(clauses):
    variables = {abs(l) for c in clauses for l in c}
    if any(len(c) == 0 for c in clauses):
        return False
    return next(naive_models(clauses, variables), None) is not None


# symmetries -----------------------------------------------------------------

def _clause_key(c):
    return tuple(sorted(set(c)))


def naive_automorphisms(f):
    """Every signed variable permutation of Var(f) mapping the clause multiset to itself.

    Backtracking over variable images, pruning as soon as a clause whose
    variables are all assigned maps outside the formula.
    """
    variables = sorted(f.variables)
    target = {}
    for c in f.clauses:
        k = _clause_key(c)
        target[k] = target.get(k, 0) + 1
    keys = list(target)
    by_last = {}
    for k in keys:
        last = max(variables.index(abs(l)) for l in k)
        by_last.setdefault(last, []).append(k)
    out = []
    image = {}

    def img(l):
        return image[abs(l)] if l > 0 else -image[abs(l)]

    def rec(i):
        if i == len(variables):
            mapped = {}
            for k, n in target.items():
                mk = _clause_key(img(l) for l in k)
                mapped[mk] = mapped.get(mk, 0) + n
            if mapped == target:
                out.append(dict(image))
            return
        used = {abs(x) for x in image.values()}
        for w in variables:
            if w in used:
                continue
            for s in (w, -w):
                image[variables[i]] = s
                if all(_clause_key(img(l) for l in k) in target for k in by_last.get(i, ())):
                    rec(i + 1)
                del image[variables[i]]

    rec(0)
    return out


def naive_ulcs(f):
    out = set()
    for i, c in enumerate(f.clauses):
        others = {l for j, d in enumerate(f.clauses) if j != i for l in d}
        if not any(l in others for l in c) and len(set(c)) == len(c):
            out.add(i)
    return out


# proofs ---------------------------------------------------------------------

def _tokens_to_step(line):
    toks = [t for t in line.split()]
    if toks[0] == "d":
        return "d", [int(t) for t in toks[1:toks.index("0")]], None
    z = toks.index("0")
    clause = [int(t) for t in toks[:z]]
    rest = toks[z + 1:]
    if not rest:
        return "a", clause, None
    assert rest[0] == "t"
    z2 = rest.index("0")
    t = [int(x) for x in rest[1:z2]]
    assert rest[z2 + 1] == "m"
    m = [int(x) for x in rest[z2 + 2:-1]]
    w = {}
    for l in t:
        w[abs(l)] = l > 0
    for v, x in zip(m[::2], m[1::2]):
        w[v] = x
    return "a", clause, w


def _naive_up_conflict(clauses, assumptions):
    val = {}
    for l in assumptions:
        if val.get(abs(l), l > 0) != (l > 0):
            return True
        val[abs(l)] = l > 0
    changed = True
    while changed:
        changed = False
        for c in clauses:
            free = []
            sat = False
            for l in c:
                v = val.get(abs(l))
                if v is None:
                    if l not in free:
                        free.append(l)
                elif v == (l > 0):
                    sat = True
                    break
            if sat:
                continue
            if not free:
                return True
            if len(free) == 1:
                val[abs(free[0])] = free[0] > 0
                changed = True
    return False


def _apply(w, clause):
    out = []
    for l in clause:
        x = w.get(abs(l), abs(l))
        if isinstance(x, bool):
            if x == (l > 0):
                return None
            continue
        x = x if l > 0 else -x
        if -x in out:
            return None
        if x not in out:
            out.append(x)
    return out


def naive_check(f, text):
    """Strict checker: every clause of the database and C itself is tested."""
    db = [list(c) for c in f.clauses]
    if isinstance(text, bytes):
        text = text.decode()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        try:
            kind, clause, w = _tokens_to_step(line)
        except (ValueError, AssertionError, IndexError):
            return False
        if kind == "d":
            key = sorted(set(clause))
            for i, d in enumerate(db):
                if sorted(set(d)) == key:
                    del db[i]
                    break
            else:
                return False
            continue
        neg = [-l for l in clause]
        if not _naive_up_conflict(db, neg):
            if w is None:
                return False
            for d in db + [clause]:
                r = _apply(w, d)
                if r is None:
                    continue
                if not _naive_up_conflict(db, neg + [-l for l in r]):
                    return False
        db.append(clause)
    return True


# random formulas with planted symmetry --------------------------------------

def random_signed_perm(rng, n, flip=0.3):
    vs = list(range(1, n + 1))
    rng.shuffle(vs)
    return {v: (w if rng.random() > flip else -w) for v, w in zip(range(1, n + 1), vs)}


def close_under(clauses, perm):
    def img(c):
        return tuple(sorted({perm[abs(l)] if l > 0 else -perm[abs(l)] for l in c}, key=abs))

    out = {tuple(sorted(set(c), key=abs)) for c in clauses}
    frontier = list(out)
    while frontier:
        nxt = []
        for c in frontier:
            d = img(c)
            if d not in out:
                out.add(d)
                nxt.append(d)
        frontier = nxt
    return sorted(out)


def planted_formula(seed, max_vars=10):
    """Random clauses closed under one random signed permutation, sometimes plus a PHP block."""
    rng = random.Random(seed)
    n = rng.randint(3, max_vars)
    perm = random_signed_perm(rng, n, flip=rng.choice((0.0, 0.3, 0.6)))
    clauses = []
    for _ in range(rng.randint(1, 4)):
        k = rng.randint(1 if rng.random() < 0.1 else 2, min(3, n))
        vs = rng.sample(range(1, n + 1), k)
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    clauses = close_under(clauses, perm)
    nv = n
    if rng.random() < 0.3 and n <= max_vars - 4:
        # disjoint small pigeonhole block: a ready-made orbitope
        m, h = rng.choice(((2, 2), (3, 2), (2, 3)))
        if n + m * h <= 20:
            block = gen_php(m, h).formula
            clauses += [[(abs(l) + n) * (1 if l > 0 else -1) for l in c] for c in block.clauses]
            nv = n + m * h
    return Formula(nv, [tuple(c) for c in clauses])


@pytest.fixture
def amo3():
    return example_formula()


@pytest.fixture
def php54():
    return gen_php(5, 4)


def named_fixtures():
    """All named small instances used across tests."""
    out = {"amo3": example_formula()}
    for m, n in ((2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (5, 4)):
        out[f"php{m}{n}"] = gen_php(m, n).formula
    for n in range(2, 7):
        for c in (0, 1):
            out[f"parity{n}{c}"] = gen_parity(n, c).formula
    out["single"] = Formula(2, [(1, 2)])
    out["unsat_units"] = Formula(1, [(1,), (-1,)])
    return out


# acceptance reporting -------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, text = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _CRITERIA.get(n, (text, True))
        _CRITERIA[n] = (text, prev[1] and rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        text, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
