"""Row-symmetric literal matrices (orbitopes) whose columns are unique literal clauses.

Detection is generator-driven: a generator that is an involution made of
disjoint literal transpositions is a candidate row swap. Unique literal clauses
moved by exactly the same set of candidate swaps, one transposition each, are
grouped into the columns of one matrix.
"""

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field

from .symmetry import LiteralPermutation, validate_symmetry

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RowSwapGenerator:
    perm: LiteralPermutation
    transpositions: tuple  # (a, b) literal pairs with a < b, one per +/- pair

    @property
    def sides(self):
        return tuple(a for a, _ in self.transpositions), tuple(b for _, b in self.transpositions)


@dataclass
class OrbitopeMatrix:
    """``rows[i][j]`` is the literal in row i, column j; ``columns[j]`` the clause index."""

    rows: list
    columns: list
    swaps: list = field(default_factory=list)  # RowSwapGenerators acting on this matrix
    formula: object = None
    _adjacent: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self):
        return len(self.rows), len(self.columns)

    def column(self, j):
        return [row[j] for row in self.rows]


def detect_row_swaps(gens):
    """Generators that are non-trivial involutions; each transposition recorded once."""
    out = []
    for g in gens:
        if g.is_identity() or not g.compose(g).is_identity():
            continue
        pairs = []
        for v in g.moved_variables():
            a, b = v, g(v)
            if abs(a) < abs(b) or (abs(a) == abs(b) and a < b):
                pairs.append((a, b))
        out.append(RowSwapGenerator(g, tuple(pairs)))
    return out


def _row_tuple_swap_ok(perm, rows, r1, r2):
    """``perm`` maps row r1 to r2 entrywise (and back) and fixes every other entry."""
    for i, row in enumerate(rows):
        for j, lit in enumerate(row):
            want = rows[r2][j] if i == r1 else rows[r1][j] if i == r2 else lit
            if perm(lit) != want:
                return False
    return True


def assemble_orbitope(swaps, f, ulcs):
    """Orbitopes from candidate swaps whose columns are the ULCs in ``ulcs``.

    Columns moved by the same set of swaps form one matrix. A matrix is kept
    only if all its columns have the same length n >= 2, the transposition graph
    of the swaps connects all n rows, and every entry is assigned to exactly one
    row. Rows follow the literal order of the first column clause.
    """
    acting = defaultdict(list)
    for c in sorted(ulcs):
        members = set(f.clauses[c])
        for si, s in enumerate(swaps):
            moved = [l for l in f.clauses[c] if s.perm(l) != l]
            if len(moved) == 2 and all(s.perm(l) in members for l in moved):
                acting[c].append(si)
    groups = defaultdict(list)
    for c in sorted(ulcs):
        if acting[c]:
            groups[tuple(acting[c])].append(c)

    mats = []
    for swap_ids, cols in sorted(groups.items(), key=lambda kv: kv[1][0]):
        mat = _build_matrix([swaps[i] for i in swap_ids], cols, f)
        if mat is not None:
            mats.append(mat)
    return mats


def _build_matrix(swaps, cols, f):
    n = len(f.clauses[cols[0]])
    if n < 2 or any(len(f.clauses[c]) != n for c in cols):
        log.debug("columns %s have unequal lengths", cols)
        return None
    first = list(f.clauses[cols[0]])

    def touched(lit):
        return frozenset(i for i, s in enumerate(swaps) if s.perm(lit) != lit)

    adj = defaultdict(set)
    for s in swaps:
        a, b = [l for l in first if s.perm(l) != l]
        adj[a].add(b)
        adj[b].add(a)
    seen = {first[0]}
    queue = deque([first[0]])
    while queue:
        x = queue.popleft()
        for y in adj[x] - seen:
            seen.add(y)
            queue.append(y)
    if len(seen) != n:
        log.debug("transposition graph on column %d is disconnected", cols[0])
        return None

    rows = [[lit] for lit in first]
    if n == 2:
        # every swap exchanges both entries of every column, so any pairing works
        for c in cols[1:]:
            rows[0].append(f.clauses[c][0])
            rows[1].append(f.clauses[c][1])
    else:
        key = {touched(lit): r for r, lit in enumerate(first)}
        if len(key) != n:
            return None
        for c in cols[1:]:
            placed = [None] * n
            for lit in f.clauses[c]:
                r = key.get(touched(lit))
                if r is None or placed[r] is not None:
                    log.debug("ambiguous column alignment in clause %d", c)
                    return None
                placed[r] = lit
            for r in range(n):
                rows[r].append(placed[r])

    mat = OrbitopeMatrix(rows, list(cols), list(swaps), f)
    for s in swaps:
        r1, r2 = [r for r in range(n) if s.perm(rows[r][0]) != rows[r][0]]
        if not _row_tuple_swap_ok(s.perm, rows, r1, r2):
            log.debug("swap %s is not column-aligned", s.perm)
            return None
    return mat


def adjacent_row_swap(mat, i):
    """A symmetry swapping rows i and i+1 (0-based) column-aligned.

    Taken directly from a detected swap when one matches, otherwise obtained
    by conjugating swaps along a path in the transposition graph.
    """
    n = len(mat.rows)
    if not 0 <= i < n - 1:
        raise IndexError(f"row index {i} out of range for {n} rows")
    if i in mat._adjacent:
        return mat._adjacent[i]
    transp = {}
    for s in mat.swaps:
        r1, r2 = [r for r in range(n) if s.perm(mat.rows[r][0]) != mat.rows[r][0]]
        transp.setdefault((r1, r2), s.perm)
        transp.setdefault((r2, r1), s.perm)
    sigma = _transposition(transp, n, i, i + 1)
    assert _row_tuple_swap_ok(sigma, mat.rows, i, i + 1)
    if mat.formula is not None:
        assert validate_symmetry(mat.formula, sigma)
    mat._adjacent[i] = sigma
    return sigma


def _transposition(transp, n, a, b):
    if (a, b) in transp:
        return transp[(a, b)]
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        for y in range(n):
            if (x, y) in transp and y not in prev:
                prev[y] = x
                queue.append(y)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    path.reverse()
    # (v0 vk) = (v_{k-1} vk) (v0 v_{k-1}) (v_{k-1} vk)
    sigma = transp[(path[0], path[1])]
    for k in range(2, len(path)):
        t = transp[(path[k - 1], path[k])]
        sigma = t.compose(sigma).compose(t)
    transp[(a, b)] = transp[(b, a)] = sigma
    return sigma


def parse_orbitope_hints(data):
    """Matrices given as rows of signed literals, blank line between matrices."""
    if isinstance(data, bytes):
        data = data.decode()
    mats, cur = [], []
    for line in data.splitlines() + [""]:
        line = line.strip()
        if line.startswith("c"):
            continue
        if not line:
            if cur:
                mats.append(cur)
                cur = []
            continue
        cur.append([int(t) for t in line.split()])
    return mats


def orbitope_from_hint(rows, f, gens, ulcs):
    """Validate a hinted matrix. Returns an OrbitopeMatrix or None.

    Columns must be ULCs of ``f``; each adjacent row swap is taken from ``gens``
    when one acts correctly, else the plain literal swap is validated directly.
    """
    n = len(rows)
    if n < 2 or len({len(r) for r in rows}) != 1:
        return None
    by_key = {frozenset(f.clauses[c]): c for c in ulcs}
    cols = []
    for j in range(len(rows[0])):
        c = by_key.get(frozenset(r[j] for r in rows))
        if c is None:
            return None
        cols.append(c)
    mat = OrbitopeMatrix([list(r) for r in rows], cols, [], f)
    for i in range(n - 1):
        sigma = next((g for g in gens if _row_tuple_swap_ok(g, rows, i, i + 1)), None)
        if sigma is None:
            mapping = {}
            for a, b in zip(rows[i], rows[i + 1]):
                mapping[a], mapping[b] = b, a
            try:
                sigma = LiteralPermutation.from_mapping(f.num_vars, mapping)
            except ValueError:
                return None
            if not validate_symmetry(f, sigma):
                return None
        mat._adjacent[i] = sigma
        mat.swaps.append(RowSwapGenerator(sigma, ()))
    return mat
