"""Literal permutations, the colored model graph of a formula, and symmetry search.

A :class:`LiteralPermutation` acts on the literals of variables ``1..num_vars``
and always commutes with negation. Symmetries either come from the built-in
search (:func:`find_symmetries`) or from a generator file (:func:`parse_generators`).
"""

import re
from collections import Counter
from dataclasses import dataclass, field

from .cnf import lit_to_point, point_to_lit


class GeneratorError(ValueError):
    """A generator is malformed or not a symmetry. ``index`` is 0-based."""

    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"generator {index}: {message}"
        super().__init__(message)


class LiteralPermutation:
    """A bijection on literals with ``sigma(-l) == -sigma(l)``.

    Stored as a tuple over dense points (see :func:`symfix.cnf.lit_to_point`).
    ``a.compose(b)`` applies ``b`` first.
    """

    __slots__ = ("points", "_hash")

    def __init__(self, points):
        points = tuple(points)
        if len(points) % 2:
            raise ValueError("point array must have even length")
        if sorted(points) != list(range(len(points))):
            raise ValueError("not a bijection")
        for p in range(0, len(points), 2):
            if points[p + 1] != points[p] ^ 1:
                raise ValueError(f"does not commute with negation at variable {p // 2 + 1}")
        self.points = points
        self._hash = None

    @classmethod
    def _trusted(cls, points):
        obj = cls.__new__(cls)
        obj.points = points
        obj._hash = None
        return obj

    @classmethod
    def identity(cls, num_vars):
        return cls._trusted(tuple(range(2 * num_vars)))

    @classmethod
    def from_mapping(cls, num_vars, mapping):
        """Build from ``{literal: image}``; unlisted literals are fixed.

        Listing ``l -> m`` implies ``-l -> -m``. Raises ValueError if the map
        is inconsistent or not bijective.
        """
        img = {}
        for a, b in mapping.items():
            for x, y in ((a, b), (-a, -b)):
                if img.get(x, y) != y:
                    raise ValueError(f"literal {x} mapped twice")
                img[x] = y
        points = list(range(2 * num_vars))
        for a, b in img.items():
            if not 1 <= abs(a) <= num_vars or not 1 <= abs(b) <= num_vars:
                raise ValueError(f"literal out of range in {a} -> {b}")
            points[lit_to_point(a)] = lit_to_point(b)
        return cls(points)

    @property
    def num_vars(self):
        return len(self.points) // 2

    def __call__(self, lit):
        return point_to_lit(self.points[lit_to_point(lit)])

    def compose(self, other):
        p = self.points
        return LiteralPermutation._trusted(tuple(p[q] for q in other.points))

    def inverse(self):
        inv = [0] * len(self.points)
        for i, q in enumerate(self.points):
            inv[q] = i
        return LiteralPermutation._trusted(tuple(inv))

    def is_identity(self):
        return all(i == q for i, q in enumerate(self.points))

    def moved_variables(self):
        return [p // 2 + 1 for p in range(0, len(self.points), 2) if self.points[p] != p]

    def fixes(self, lit):
        p = lit_to_point(lit)
        return self.points[p] == p

    def restrict(self, variables):
        """Identity outside ``variables``; requires ``variables`` to be invariant."""
        points = list(range(len(self.points)))
        for v in variables:
            p = 2 * (v - 1)
            points[p] = self.points[p]
            points[p + 1] = self.points[p + 1]
        return LiteralPermutation(points)

    def cycles(self):
        """Cycle notation over signed literals, one cycle per +/- pair."""
        seen = set()
        out = []
        for p in range(len(self.points)):
            if p in seen or self.points[p] == p:
                continue
            cycle = [p]
            q = self.points[p]
            while q != p:
                cycle.append(q)
                q = self.points[q]
            seen.update(cycle)
            seen.update(c ^ 1 for c in cycle)
            out.append("(" + " ".join(str(point_to_lit(c)) for c in cycle) + ")")
        return "".join(out) or "()"

    def __eq__(self, other):
        return isinstance(other, LiteralPermutation) and self.points == other.points

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.points)
        return self._hash

    def __repr__(self):
        return f"LiteralPermutation({self.cycles()})"


def apply_to_clause(sigma, clause):
    return tuple(sigma(l) for l in clause)


def validate_symmetry(f, sigma):
    """True iff ``sigma`` maps the clause multiset of ``f`` onto itself."""
    if sigma.num_vars < f.num_vars:
        return False
    p = sigma.points
    for q in range(0, len(p), 2):
        if p[q + 1] != p[q] ^ 1:
            return False
    image = Counter(tuple(sorted(sigma(l) for l in c)) for c in f.clauses)
    return image == f.clause_multiset


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_generators(data, f):
    """Parse one permutation per line in signed cycle notation, e.g. ``(1 2 3)(-4 -5)``.

    Every generator is checked to be a symmetry of ``f``; the first offending
    generator raises :class:`GeneratorError` carrying its index.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    gens = []
    for line in data.splitlines():
        line = line.strip().replace("−", "-")
        if not line or line.startswith("c"):
            continue
        index = len(gens)
        rest = _CYCLE_RE.sub("", line).strip()
        if rest:
            raise GeneratorError(f"unexpected text {rest!r}", index)
        mapping = {}
        for body in _CYCLE_RE.findall(line):
            try:
                cycle = [int(t) for t in body.replace(",", " ").split()]
            except ValueError:
                raise GeneratorError(f"non-integer in cycle ({body})", index) from None
            if 0 in cycle:
                raise GeneratorError("0 is not a literal", index)
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if a in mapping and mapping[a] != b:
                    raise GeneratorError(f"literal {a} mapped twice", index)
                mapping[a] = b
        try:
            sigma = LiteralPermutation.from_mapping(f.num_vars, mapping)
        except ValueError as exc:
            raise GeneratorError(str(exc), index) from None
        if not validate_symmetry(f, sigma):
            raise GeneratorError("not a symmetry of the formula", index)
        gens.append(sigma)
    return gens


def format_generators(gens):
    return "".join(g.cycles() + "\n" for g in gens)


@dataclass
class ColoredGraph:
    """Model graph: literal vertices first, then one vertex per clause.

    ``vertex_lit[v]`` is the literal of vertex ``v`` or 0 for clause vertices.
    Colors: 0 for literals, ``1 + len(clause)`` for clause vertices.
    """

    num_vars: int
    colors: list
    adj: list
    vertex_lit: list
    edges: list = field(default_factory=list)

    @property
    def num_vertices(self):
        return len(self.colors)

    @property
    def num_literal_vertices(self):
        return sum(1 for l in self.vertex_lit if l)


def build_model_graph(f):
    """Literal vertices for every variable occurring in ``f`` joined to their negation;
    clause vertices joined to their member literals."""
    vertex_lit = []
    index = {}
    for v in sorted(f.variables):
        for lit in (v, -v):
            index[lit] = len(vertex_lit)
            vertex_lit.append(lit)
    colors = [0] * len(vertex_lit)
    edges = [(index[v], index[-v]) for v in sorted(f.variables)]
    for c in f.clauses:
        cv = len(vertex_lit)
        vertex_lit.append(0)
        colors.append(1 + len(c))
        edges.extend((index[l], cv) for l in c)
    adj = [[] for _ in vertex_lit]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return ColoredGraph(f.num_vars, colors, adj, vertex_lit, edges)


def _refine(adj, colors):
    """Color refinement to an equitable partition; ranks are isomorphism-invariant."""
    ncolors = len(set(colors))
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(len(adj))]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [ranks[s] for s in sigs]
        if len(ranks) == ncolors:
            return colors
        ncolors = len(ranks)


def _individualize(colors, v):
    return [2 * c + (0 if u == v else 1) for u, c in enumerate(colors)]


def _cell_sizes(colors):
    counts = Counter(colors)
    return [counts[r] for r in range(len(counts))]


def _target_cell(colors):
    counts = Counter(colors)
    for r in range(len(counts)):
        if counts[r] > 1:
            return r, [v for v, c in enumerate(colors) if c == r]
    return None, []


class _Budget(Exception):
    pass


@dataclass
class SearchResult:
    generators: list
    complete: bool
    nodes: int


def find_automorphisms(g, max_nodes=10**6):
    """Generators of the automorphism group of ``g`` restricted to literals.

    Individualization-refinement along a first path; for every level (deepest
    first) and every vertex of the target cell not yet in the orbit of the path
    vertex, the subtree is searched for a leaf equivalent to the first leaf.
    With an unexhausted budget the generators generate the full group.
    """
    adj = g.adj
    init = sorted(set(g.colors))
    colors = _refine(adj, [init.index(c) for c in g.colors])
    nodes = 0

    path = []
    while True:
        r, cell = _target_cell(colors)
        if r is None:
            break
        path.append((colors, cell, cell[0]))
        colors = _refine(adj, _individualize(colors, cell[0]))
    first_leaf = [0] * len(colors)
    for v, c in enumerate(colors):
        first_leaf[c] = v
    edge_set = {(a, b) for a in range(len(adj)) for b in adj[a]}

    def leaf_map(leaf_colors):
        gamma = [0] * len(leaf_colors)
        for v, c in enumerate(leaf_colors):
            gamma[first_leaf[c]] = v
        return gamma

    def is_automorphism(gamma):
        if any(g.colors[v] != g.colors[gamma[v]] for v in range(len(gamma))):
            return False
        return all((gamma[a], gamma[b]) in edge_set for a, b in edge_set)

    def dfs(colors, depth):
        nonlocal nodes
        nodes += 1
        if nodes > max_nodes:
            raise _Budget
        if depth == len(path):
            gamma = leaf_map(colors)
            return gamma if is_automorphism(gamma) else None
        ref_colors, _, ref_v = path[depth]
        if _cell_sizes(colors) != _cell_sizes(ref_colors):
            return None
        _, cell = _target_cell(colors)
        if ref_v in cell:
            cell = [ref_v] + [u for u in cell if u != ref_v]
        for u in cell:
            found = dfs(_refine(adj, _individualize(colors, u)), depth + 1)
            if found is not None:
                return found
        return None

    found = []
    complete = True
    parent = list(range(len(adj)))

    def root(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    try:
        for level in reversed(range(len(path))):
            node_colors, cell, v = path[level]
            for w in cell:
                if w == v or root(w) == root(v):
                    continue
                gamma = dfs(_refine(adj, _individualize(node_colors, w)), level + 1)
                if gamma is None:
                    continue
                found.append(gamma)
                for a in range(len(gamma)):
                    ra, rb = root(a), root(gamma[a])
                    if ra != rb:
                        parent[ra] = rb
    except _Budget:
        complete = False

    gens = []
    for gamma in found:
        mapping = {}
        for vtx, lit in enumerate(g.vertex_lit):
            if lit > 0:
                mapping[lit] = g.vertex_lit[gamma[vtx]]
        sigma = LiteralPermutation.from_mapping(g.num_vars, mapping)
        if not sigma.is_identity():
            gens.append(sigma)
    return SearchResult(gens, complete, nodes)


def find_symmetries(f, max_nodes=10**6):
    """Search the model graph of ``f``; every returned generator is validated."""
    result = find_automorphisms(build_model_graph(f), max_nodes)
    for sigma in result.generators:
        assert validate_symmetry(f, sigma), sigma
    return result
