"""Reverse-engineering the order structure behind a finite-valued network.

The pipeline: split the global transition matrix into per-node functions,
drop arguments a function ignores, test every element pair for two-point
monotonicity, intersect the per-node comparability graphs, orient the
result transitively, and check the oriented relation for being a lattice.

Pair testing works on the restriction of a function to assignments drawn
from {a, b} only: the pair passes when the restricted function maps into
{a, b} and flipping any single argument from a to b never moves the value
against the (a above b) reading; the stricter "comparable" variant also
requires the all-a and all-b points to reproduce a and b.  Both variants
are symmetric in the pair, so each unordered pair is tested once.

Transitive orientation follows ordered partition refinement (pivot-split of
classes by adjacency); the produced orientation is verified and, failing
that, a forcing-class decomposition is tried before rejecting the graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (DimensionError, NotComparabilityGraphError,
                     NotMonotoneError)
from .lattice import FiniteLattice, lattice_from_order
from .logical import IntMatrix, LogicalMatrix
from .network import (ASSR, Expr, Gate, Join, Meet, Var, split_components,
                      state_digits)

__all__ = [
    "PairRestriction", "restrict_pair", "pair_diff",
    "PairTestResult", "monotone_pair_test", "comparable_pair_test",
    "ComparabilityGraph", "comparability_graph",
    "Orientation", "transitive_orient",
    "remove_dumb", "RecoveryReport", "recover_lattice",
    "canonical_form", "comparability_dot", "default_value_labels",
]


def _arity(m: LogicalMatrix, base: int) -> int:
    n = 0
    q = m.n_cols
    while q > 1:
        if q % base:
            raise DimensionError(
                f"column count {m.n_cols} is not a power of {base}")
        q //= base
        n += 1
    return n


def default_value_labels(k: int) -> tuple[str, ...]:
    """Display names for a bare k-element carrier: indices 0..k-2 are the
    values 1..k-1 and the last index is the value 0."""
    return tuple(str(i + 1) for i in range(k - 1)) + ("0",)


@dataclass(frozen=True)
class PairRestriction:
    """A function restricted to arguments from a two-element subset.

    ``matrix`` is k x 2^N; its column at binary assignment (t_1, ..., t_N)
    (first argument most significant, digit 0 meaning ``a``) is the value of
    the original function with argument j set to ``a`` when t_j = 0 and to
    ``b`` when t_j = 1.
    """

    a: int
    b: int
    n_vars: int
    matrix: LogicalMatrix


def restrict_pair(m: LogicalMatrix, a: int, b: int) -> PairRestriction:
    """Restrict a k x k^N structure matrix to {a, b}-valued arguments."""
    if a == b:
        raise DimensionError("pair restriction needs two distinct elements")
    k = m.rows
    if not (0 <= a < k and 0 <= b < k):
        raise DimensionError("pair elements out of range")
    n = _arity(m, k)
    idx = np.arange(2 ** n, dtype=np.int64)
    full = np.zeros(2 ** n, dtype=np.int64)
    for v in range(n):
        bit = (idx >> (n - 1 - v)) & 1
        full = full * k + np.where(bit == 1, b, a)
    return PairRestriction(a=a, b=b, n_vars=n,
                           matrix=LogicalMatrix(k, m.cols[full]))


def pair_diff(pr: PairRestriction, i: int) -> IntMatrix:
    """Column differences of a pair restriction along argument ``i``:
    value at the a-side minus value at the b-side, other arguments fixed."""
    n = pr.n_vars
    if not 0 <= i < n:
        raise DimensionError(f"argument index {i} out of range for {n}")
    k = pr.matrix.rows
    cols = pr.matrix.cols
    off = 1 << (n - 1 - i)
    out = np.zeros((k, 2 ** (n - 1)), dtype=np.int64)
    j = 0
    for c in range(2 ** n):
        if (c >> (n - 1 - i)) & 1:
            continue
        out[cols[c], j] += 1
        out[cols[c + off], j] -= 1
        j += 1
    return IntMatrix(out)


@dataclass(frozen=True)
class PairTestResult:
    passed: bool
    failed_condition: str | None = None   # "range", "monotone", "reproducing"
    witness_col: int | None = None

    def __bool__(self) -> bool:
        return self.passed


def monotone_pair_test(pr: PairRestriction) -> PairTestResult:
    """Range and single-flip monotonicity of the restriction.

    Passes iff every value lies in {a, b} and, for every argument flip from
    a to b with the rest fixed, the value either stays put or moves from a
    to b.
    """
    a, b, n = pr.a, pr.b, pr.n_vars
    cols = pr.matrix.cols
    bad = np.nonzero((cols != a) & (cols != b))[0]
    if bad.size:
        return PairTestResult(False, "range", int(bad[0]))
    for v in range(n):
        off = 1 << (n - 1 - v)
        for c in range(2 ** n):
            if (c >> (n - 1 - v)) & 1:
                continue
            at_a, at_b = cols[c], cols[c + off]
            if at_a != at_b and not (at_a == a and at_b == b):
                return PairTestResult(False, "monotone", int(c))
    return PairTestResult(True)


def comparable_pair_test(pr: PairRestriction) -> PairTestResult:
    """Monotone test plus reproduction: all-a maps to a and all-b to b."""
    res = monotone_pair_test(pr)
    if not res:
        return res
    cols = pr.matrix.cols
    if cols[0] != pr.a:
        return PairTestResult(False, "reproducing", 0)
    if cols[-1] != pr.b:
        return PairTestResult(False, "reproducing", int(cols.size - 1))
    return PairTestResult(True)


@dataclass(frozen=True)
class ComparabilityGraph:
    """Undirected graph on carrier elements; edges join candidate-comparable
    pairs."""

    n_vertices: int
    edges: frozenset[tuple[int, int]]     # stored with a < b

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


def comparability_graph(components, mode: str = "monotone") -> ComparabilityGraph:
    """Intersection over components of the per-function pair-test graphs.

    ``mode`` picks the test: ``"monotone"`` (range + single-flip, the
    recovery default) or ``"comparable"`` (adds reproduction).
    """
    if mode not in ("monotone", "comparable"):
        raise DimensionError(f"unknown mode {mode!r}")
    test = monotone_pair_test if mode == "monotone" else comparable_pair_test
    mats = list(components)
    if not mats:
        raise DimensionError("need at least one component")
    k = mats[0].rows
    edges = set()
    for a, b in combinations(range(k), 2):
        if all(test(restrict_pair(m, a, b)) for m in mats):
            edges.add((a, b))
    return ComparabilityGraph(n_vertices=k, edges=frozenset(edges))


@dataclass(frozen=True)
class Orientation:
    """A direction for every edge, recorded with a witness vertex order."""

    order: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def sorting_string(self, labels) -> str:
        return " | ".join(labels[v] for v in self.order)


def _verify_transitive(directed: frozenset[tuple[int, int]],
                       undirected: frozenset[tuple[int, int]]):
    """None if a -> b -> c always implies a -> c; else a witness triple."""
    out = {}
    for a, b in directed:
        out.setdefault(a, set()).add(b)
    for a, b in directed:
        for c in out.get(b, ()):
            if c == a:
                return (a, b, c)
            if (min(a, c), max(a, c)) not in undirected:
                return (a, b, c)
            if c not in out.get(a, ()):
                return (a, b, c)
    return None


def _refinement_order(g: ComparabilityGraph) -> list[int]:
    """Ordered partition refinement: start from {v0 | rest}, then let every
    vertex in turn split each class into its non-neighbours and neighbours,
    non-neighbours landing on the pivot side."""
    vertices = list(range(g.n_vertices))
    if not vertices:
        return []
    adj = {v: g.neighbors(v) for v in vertices}
    order: list[list[int]] = [c for c in
                              ([vertices[0]], vertices[1:]) if c]
    for x in vertices:
        pos = next(i for i, c in enumerate(order) if x in c)
        refined: list[list[int]] = []
        for i, cls in enumerate(order):
            if x in cls:
                rest = [v for v in cls if v != x]
                non = [v for v in rest if v not in adj[x]]
                yes = [v for v in rest if v in adj[x]]
                parts = (non, [x], yes)
            else:
                non = [v for v in cls if v not in adj[x]]
                yes = [v for v in cls if v in adj[x]]
                parts = (non, yes) if pos < i else (yes, non)
            refined.extend(p for p in parts if p)
        order = refined
    return [v for cls in order for v in cls]


def _orient_by_order(g: ComparabilityGraph, vertex_order) -> Orientation:
    rank = {v: i for i, v in enumerate(vertex_order)}
    directed = frozenset(
        (a, b) if rank[a] < rank[b] else (b, a) for a, b in g.edges)
    return Orientation(order=tuple(vertex_order), edges=directed)


def _forcing_orientation(g: ComparabilityGraph):
    """Forcing-class decomposition: orient one representative edge, close
    under the rule that arcs sharing an endpoint whose far ends are
    non-adjacent must agree, remove the class, repeat.  Returns None when a
    class forces both directions of some edge."""
    adj = {v: g.neighbors(v) for v in range(g.n_vertices)}
    pool = set(g.edges)
    directed: set[tuple[int, int]] = set()
    while pool:
        seed = min(pool)
        cls = {seed}
        stack = [seed]
        members = {seed}
        while stack:
            x, y = stack.pop()
            for c in adj[x]:
                if c != y and c not in adj[y] and (x, c) not in members:
                    members.add((x, c))
                    cls.add((x, c))
                    stack.append((x, c))
            for c in adj[y]:
                if c != x and c not in adj[x] and (c, y) not in members:
                    members.add((c, y))
                    cls.add((c, y))
                    stack.append((c, y))
        for a, b in cls:
            if (b, a) in cls:
                return None
        directed |= cls
        pool -= {(min(a, b), max(a, b)) for a, b in cls}
    # topological order of the orientation, for the report
    out = {v: set() for v in range(g.n_vertices)}
    indeg = {v: 0 for v in range(g.n_vertices)}
    for a, b in directed:
        out[a].add(b)
        indeg[b] += 1
    order = []
    ready = sorted(v for v in indeg if indeg[v] == 0)
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in sorted(out[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort()
    if len(order) != g.n_vertices:
        return None   # cyclic: not an order
    return Orientation(order=tuple(order), edges=frozenset(directed))


def transitive_orient(g: ComparabilityGraph) -> Orientation:
    """A transitive orientation of ``g``, or
    :class:`NotComparabilityGraphError` with a witness triple.

    Partition refinement is attempted first (and decides the reported
    vertex order when it succeeds); its output is verified independently,
    and the forcing-class fallback covers graphs the refinement mishandles.
    """
    orientation = _orient_by_order(g, _refinement_order(g))
    witness = _verify_transitive(orientation.edges, g.edges)
    if witness is None:
        return orientation
    fallback = _forcing_orientation(g)
    if fallback is not None and _verify_transitive(fallback.edges,
                                                   g.edges) is None:
        return fallback
    raise NotComparabilityGraphError(
        f"graph admits no transitive orientation (witness {witness})",
        witness=witness)


def remove_dumb(mi: LogicalMatrix) -> tuple[LogicalMatrix, tuple[int, ...]]:
    """Drop the arguments a function does not depend on.

    Returns the reduced matrix together with the kept (live) argument
    positions.  A constant function keeps one argument so the matrix stays
    well-formed.
    """
    k = mi.rows
    n = _arity(mi, k)
    tensor = mi.cols.reshape((k,) * n) if n else mi.cols.reshape(())
    live = [v for v in range(n)
            if not np.all(tensor == np.take(tensor, [0], axis=v))]
    if len(live) == n:
        return mi, tuple(range(n))
    if not live:
        live = [0]
    slicer = tuple(slice(None) if v in live else 0 for v in range(n))
    reduced = tensor[slicer].reshape(-1)
    return LogicalMatrix(k, reduced), tuple(live)


@dataclass(frozen=True)
class RecoveryReport:
    """Everything the recovery pipeline found, stage by stage.

    ``generated_by_basic_operators`` restates the recovered-lattice claim:
    a lattice found in monotone mode certifies the network as generated by
    joins, meets and threshold gates over it.
    """

    k: int
    mode: str
    labels: tuple[str, ...]
    live_vars: tuple[tuple[int, ...], ...]
    component_graphs: tuple[ComparabilityGraph, ...]
    graph: ComparabilityGraph
    orientation: Orientation | None
    lattice: FiniteLattice | None
    ok: bool
    stage: str                     # "orientation" | "lattice" | "done"
    failure: str | None = None

    @property
    def generated_by_basic_operators(self) -> bool:
        return self.ok and self.mode == "monotone"

    def sorting_string(self) -> str:
        if self.orientation is None:
            return ""
        return self.orientation.sorting_string(self.labels)


def recover_lattice(source, k: int | None = None, mode: str = "monotone",
                    labels=None) -> RecoveryReport:
    """Run the full recovery pipeline on an :class:`ASSR` or a raw global
    transition matrix.

    Control-form systems are handled by treating inputs as extra arguments
    of every node function.  Stages: per-node split and dumb-argument
    removal; pair-test comparability graphs and their intersection;
    transitive orientation; lattice check on the oriented order.
    """
    if isinstance(source, ASSR):
        k = source.k
        comps = list(source.components)
        if labels is None and source.lattice is not None:
            labels = source.lattice.labels
    else:
        if k is None or k < 2:
            raise DimensionError("recovering from a raw matrix needs k >= 2")
        m = source
        n = 0
        rows = m.rows
        while rows > 1:
            if rows % k:
                raise DimensionError(f"row count {m.rows} is not a power of {k}")
            rows //= k
            n += 1
        comps = split_components(m, k, n)
    labels = tuple(labels) if labels is not None else default_value_labels(k)

    reduced = [remove_dumb(c) for c in comps]
    live = tuple(lv for _, lv in reduced)
    graphs = tuple(comparability_graph([m], mode=mode) for m, _ in reduced)
    conj = ComparabilityGraph(
        n_vertices=k,
        edges=frozenset.intersection(*(g.edges for g in graphs)))

    try:
        orientation = transitive_orient(conj)
    except NotComparabilityGraphError as err:
        return RecoveryReport(k=k, mode=mode, labels=labels, live_vars=live,
                              component_graphs=graphs, graph=conj,
                              orientation=None, lattice=None, ok=False,
                              stage="orientation", failure=str(err))

    leq = np.eye(k, dtype=bool)
    for a, b in orientation.edges:
        leq[a, b] = True
    try:
        lat = lattice_from_order(leq, labels=labels)
    except Exception as err:   # NotAPoset cannot happen past verification
        return RecoveryReport(k=k, mode=mode, labels=labels, live_vars=live,
                              component_graphs=graphs, graph=conj,
                              orientation=orientation, lattice=None, ok=False,
                              stage="lattice", failure=str(err))
    return RecoveryReport(k=k, mode=mode, labels=labels, live_vars=live,
                          component_graphs=graphs, graph=conj,
                          orientation=orientation, lattice=lat, ok=True,
                          stage="done")


def canonical_form(mf: LogicalMatrix, lat: FiniteLattice) -> Expr:
    """Monotone normal form: the join over all argument tuples ``a`` of the
    meet over positions of ``gate(a_i, f(a))`` applied to argument i.

    Requires ``mf`` to be monotone for the lattice order (checked pointwise
    over all componentwise-comparable assignment pairs); recompiling the
    returned expression reproduces ``mf`` exactly.
    """
    k = lat.k
    if mf.rows != k:
        raise DimensionError("function rows disagree with the carrier size")
    n = _arity(mf, k)
    if n == 0:
        from .network import Const
        return Const(int(mf.cols[0]))
    q = k ** n
    idx = np.arange(q, dtype=np.int64)
    digit = np.stack([(idx // k ** (n - 1 - v)) % k for v in range(n)])
    for x in range(q):
        ge = np.ones(q, dtype=bool)
        for v in range(n):
            ge &= lat.leq[digit[v, x], digit[v]]
        above = np.nonzero(ge)[0]
        bad = above[~lat.leq[mf.cols[x], mf.cols[above]]]
        if bad.size:
            y = int(bad[0])
            raise NotMonotoneError(
                "function is not monotone for this order",
                witness=(state_digits(x, k, n), state_digits(y, k, n)))

    terms = []
    for a in range(q):
        value = int(mf.cols[a])
        factors = [Gate(int(digit[v, a]), value, Var(v)) for v in range(n)]
        term = factors[0]
        for f in factors[1:]:
            term = Meet(term, f)
        terms.append(term)
    expr = terms[0]
    for t in terms[1:]:
        expr = Join(expr, t)
    return expr


def comparability_dot(g: ComparabilityGraph, labels,
                      name: str = "comparability") -> str:
    """DOT text of an undirected comparability graph."""
    lines = [f"graph {name} {{"]
    for i in range(g.n_vertices):
        lines.append(f'  n{i} [label="{labels[i]}"];')
    for a, b in sorted(g.edges):
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
