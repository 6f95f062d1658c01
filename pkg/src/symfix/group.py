"""Permutation groups on literals: orbits, witnesses, Schreier-Sims, stabilizers.

All algorithms work on the literal domain, so polarity-swapping symmetries are
ordinary group elements. Internally permutations are point tuples (see
:mod:`symfix.cnf` for the point encoding).
"""

from collections import deque
from dataclasses import dataclass, field
from math import prod

from .cnf import lit_to_point, point_to_lit
from .symmetry import LiteralPermutation


@dataclass
class SSLimits:
    max_base: int = 64
    max_transversal: int = 10**6


class SchreierVector:
    """BFS tree of an orbit: ``parent[lit] = (predecessor, generator index)``."""

    def __init__(self, gens, root, parent):
        self.gens = gens
        self.root = root
        self.parent = parent

    def __contains__(self, lit):
        return lit in self.parent

    def witness(self, target):
        """A product of generators mapping the root to ``target``."""
        if target not in self.parent:
            raise KeyError(f"literal {target} is not in the orbit of {self.root}")
        chain = []
        lit = target
        while lit != self.root:
            pred, gi = self.parent[lit]
            chain.append(self.gens[gi])
            lit = pred
        n = self.gens[0].num_vars if self.gens else abs(self.root)
        sigma = LiteralPermutation.identity(n)
        for g in reversed(chain):
            sigma = g.compose(sigma)
        return sigma


def orbit_of(gens, start):
    """Orbit of literal ``start`` and its Schreier vector."""
    parent = {start: None}
    queue = deque([start])
    while queue:
        lit = queue.popleft()
        for gi, g in enumerate(gens):
            img = g(lit)
            if img not in parent:
                parent[img] = (lit, gi)
                queue.append(img)
    return set(parent), SchreierVector(list(gens), start, parent)


def witness_mapping(schreier, target):
    return schreier.witness(target)


class OrbitTable:
    """Orbit partition of all literals of variables ``1..num_vars``."""

    def __init__(self, gens, num_vars):
        self.gens = list(gens)
        self.num_vars = num_vars
        self.rep = {}
        self.trees = {}
        for v in range(1, num_vars + 1):
            for lit in (v, -v):
                if lit in self.rep:
                    continue
                orbit, tree = orbit_of(self.gens, lit)
                self.trees[lit] = tree
                for x in orbit:
                    self.rep[x] = lit

    def same_orbit(self, a, b):
        return self.rep[a] == self.rep[b]

    def orbit(self, lit):
        return set(self.trees[self.rep[lit]].parent)

    def classes(self):
        return [set(t.parent) for t in self.trees.values()]

    def witness(self, a, b):
        """A group element mapping ``a`` to ``b`` (same orbit required)."""
        r = self.rep[a]
        if self.rep[b] != r:
            raise KeyError(f"{a} and {b} are in different orbits")
        tree = self.trees[r]
        return tree.witness(b).compose(tree.witness(a).inverse())


class BudgetExceeded(Exception):
    pass


def _mul(a, b):
    """a after b."""
    return tuple(a[i] for i in b)


def _inv(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _orbit_transversal(gens, point, degree):
    ident = tuple(range(degree))
    trans = {point: ident}
    queue = deque([point])
    while queue:
        p = queue.popleft()
        u = trans[p]
        for g in gens:
            q = g[p]
            if q not in trans:
                trans[q] = _mul(g, u)
                queue.append(q)
    return trans


def _strip(h, base, transversals, start):
    for i in range(start, len(base)):
        beta = h[base[i]]
        if beta == base[i]:
            continue
        u = transversals[i].get(beta)
        if u is None:
            return h, i
        h = _mul(_inv(u), h)
    return h, len(base)


@dataclass
class GroupState:
    """Generators plus, when computed within budget, a base and strong generating set.

    ``transversals[i]`` maps each literal of the i-th basic orbit to a coset
    representative sending ``base[i]`` there; ``strong_gens[i]`` are the strong
    generators fixing ``base[:i]`` pointwise.
    """

    num_vars: int
    gens: list
    base: list = field(default_factory=list)
    transversals: list = None
    strong_gens: list = None

    @property
    def has_bsgs(self):
        return self.transversals is not None

    def order(self):
        if not self.has_bsgs:
            raise ValueError("group order needs a base and strong generating set")
        return prod(len(t) for t in self.transversals)

    def contains(self, sigma):
        if not self.has_bsgs:
            raise ValueError("membership needs a base and strong generating set")
        h = sigma
        for b, trans in zip(self.base, self.transversals):
            img = h(b)
            if img not in trans:
                return False
            h = trans[img].inverse().compose(h)
        return h.is_identity()


def schreier_sims(gens, base_hint=(), limits=None, num_vars=None):
    """Deterministic Schreier-Sims with ``base_hint`` as the base prefix.

    On exceeding ``limits`` the returned state carries only the generators
    (``has_bsgs`` is False) and callers fall back to generator filtering.
    """
    limits = limits or SSLimits()
    gens = list(gens)
    if num_vars is None:
        num_vars = gens[0].num_vars if gens else max((abs(l) for l in base_hint), default=0)
    degree = 2 * num_vars
    try:
        base, trans, distr = _schreier_sims(
            [g.points for g in gens if not g.is_identity()],
            [lit_to_point(l) for l in base_hint],
            degree,
            limits,
        )
    except BudgetExceeded:
        return GroupState(num_vars, gens)
    wrap = LiteralPermutation._trusted
    return GroupState(
        num_vars,
        gens,
        base=[point_to_lit(b) for b in base],
        transversals=[{point_to_lit(p): wrap(u) for p, u in t.items()} for t in trans],
        strong_gens=[[wrap(s) for s in level] for level in distr],
    )


def _schreier_sims(gens, base, degree, limits):
    base = list(dict.fromkeys(base))
    for g in gens:
        if all(g[b] == b for b in base):
            base.append(next(p for p in range(degree) if g[p] != p))
    if len(base) > limits.max_base:
        raise BudgetExceeded

    distr = [[g for g in gens if all(g[b] == b for b in base[:i])] for i in range(len(base))]
    trans = [_orbit_transversal(distr[i], base[i], degree) for i in range(len(base))]

    def check_storage():
        if sum(len(t) for t in trans) > limits.max_transversal:
            raise BudgetExceeded

    check_storage()
    i = len(base) - 1
    while i >= 0:
        restart = False
        for beta, u_beta in list(trans[i].items()):
            for s in distr[i]:
                sb = s[beta]
                g1 = _mul(s, u_beta)
                u1 = trans[i][sb]
                if g1 == u1:
                    continue
                h, j = _strip(_mul(_inv(u1), g1), base, trans, i + 1)
                if j == len(base):
                    if all(h[p] == p for p in range(degree)):
                        continue
                    base.append(next(p for p in range(degree) if h[p] != p))
                    if len(base) > limits.max_base:
                        raise BudgetExceeded
                    distr.append([])
                    trans.append({base[-1]: tuple(range(degree))})
                for level in range(i + 1, j + 1):
                    distr[level].append(h)
                    trans[level] = _orbit_transversal(distr[level], base[level], degree)
                check_storage()
                i = j
                restart = True
                break
            if restart:
                break
        if not restart:
            i -= 1
    return base, trans, distr


def generator_filter_stabilizer(gens, fixed):
    """The input generators that fix every literal in ``fixed``."""
    return [g for g in gens if all(g.fixes(l) for l in fixed)]


def pointwise_stabilizer(state, fixed, limits=None):
    """Generators of the subgroup fixing each literal of ``fixed``.

    Exact when ``state`` has a BSGS (re-basing if ``fixed`` is not already a
    base prefix and the budget allows); otherwise the generator filter, which
    is a subgroup of the true stabilizer.
    """
    fixed = list(dict.fromkeys(fixed))
    if not fixed:
        return list(state.gens)
    if not state.has_bsgs:
        return generator_filter_stabilizer(state.gens, fixed)
    if state.base[: len(fixed)] != fixed:
        pool = list(dict.fromkeys(g for level in state.strong_gens for g in level))
        rebased = schreier_sims(pool, fixed, limits, num_vars=state.num_vars)
        if not rebased.has_bsgs:
            return generator_filter_stabilizer(state.gens, fixed)
        state = rebased
    if len(fixed) == len(state.base):
        return []
    return list(state.strong_gens[len(fixed)])


def enumerate_group(gens, num_vars):
    """All elements by closure. Only for small groups (tests and oracles)."""
    ident = LiteralPermutation.identity(num_vars)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g.compose(x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen
