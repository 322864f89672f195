"""Finite lattices: construction from join tables, orders or covers.

A lattice over carrier indices 0..k-1 is represented by its join structure
matrix (k x k^2 logical matrix, column a*k+b holding a v b), the derived
order, meet table, bottom/top and cover pairs.  Element indices are 0-based;
labels carry the human-facing names.

The axioms checked on a join table are idempotence, commutativity,
associativity and the existence of a join identity; they hold exactly when
the table is the join of a lattice order, in which case meets, bottom and
top are all derivable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotALatticeError, NotAPosetError, NotClosedError
from .logical import LogicalMatrix, kron, power_reduce_matrix, stp, swap_matrix

__all__ = [
    "FiniteLattice",
    "JoinVerdict",
    "verify_join_structure",
    "lattice_from_join",
    "lattice_from_order",
    "product",
    "sublattice",
    "chain",
    "hasse_dot",
]

AXIOMS = ("idempotence", "commutativity", "associativity", "identity")


@dataclass(frozen=True)
class JoinVerdict:
    """Outcome of checking a binary table for the lattice axioms."""

    ok: bool
    axiom: str | None = None            # first failing axiom, if any
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class FiniteLattice:
    """An immutable finite lattice with labelled elements."""

    k: int
    labels: tuple[str, ...]
    join: LogicalMatrix
    meet: LogicalMatrix
    leq: np.ndarray = field(repr=False)
    bottom: int
    top: int
    covers: frozenset[tuple[int, int]]
    factors: tuple["FiniteLattice", "FiniteLattice"] | None = None

    def __post_init__(self):
        arr = np.asarray(self.leq, dtype=bool).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "leq", arr)

    # -- element operations (0-based indices) --------------------------------

    def join_of(self, a: int, b: int) -> int:
        return self.join.column(a * self.k + b)

    def meet_of(self, a: int, b: int) -> int:
        return self.meet.column(a * self.k + b)

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq[a, b])

    def comparable(self, a: int, b: int) -> bool:
        return bool(self.leq[a, b] or self.leq[b, a])

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown element label {label!r}")

    def height(self, a: int) -> int:
        """Length of the longest chain from bottom up to ``a``."""
        below = [b for b in range(self.k) if self.leq[b, a] and b != a]
        return 1 + max((self.height(b) for b in below), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteLattice):
            return NotImplemented
        return (self.k == other.k and self.labels == other.labels
                and self.join == other.join)

    def __repr__(self) -> str:
        return f"FiniteLattice(k={self.k}, labels={list(self.labels)})"

    def to_json(self) -> dict:
        return {"k": self.k, "labels": list(self.labels),
                "join": self.join.to_json()}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteLattice":
        join = LogicalMatrix.from_json(obj["join"])
        return lattice_from_join(join, labels=obj.get("labels"))


def _default_labels(k: int) -> tuple[str, ...]:
    return tuple(f"e{i}" for i in range(k))


def verify_join_structure(m: LogicalMatrix) -> JoinVerdict:
    """Check a k x k^2 table for idempotence, commutativity, associativity
    and a join identity, via the corresponding structure-matrix identities.

    Returns the first failing axiom with a witness tuple of element indices
    (the identity axiom has no witness: no element works).
    """
    k = m.rows
    if m.n_cols != k * k:
        raise DimensionError(f"join table must be {k}x{k * k}, got {m.shape}")
    table = m.cols

    if stp(m, power_reduce_matrix(k)) != LogicalMatrix.identity(k):
        a = next(int(x) for x in range(k) if table[x * k + x] != x)
        return JoinVerdict(False, "idempotence", (a,))

    if stp(m, swap_matrix(k, k)) != m:
        a, b = next((x, y) for x in range(k) for y in range(k)
                    if table[x * k + y] != table[y * k + x])
        return JoinVerdict(False, "commutativity", (a, b))

    if stp(m, m) != stp(m, kron(LogicalMatrix.identity(k), m)):
        a, b, c = next(
            (x, y, z)
            for x in range(k) for y in range(k) for z in range(k)
            if table[table[x * k + y] * k + z] != table[x * k + table[y * k + z]])
        return JoinVerdict(False, "associativity", (a, b, c))

    has_identity = any(
        np.array_equal(table[i * k:(i + 1) * k], np.arange(k))
        for i in range(k))
    if not has_identity:
        return JoinVerdict(False, "identity", None)
    return JoinVerdict(True)


def _derive(join_cols: np.ndarray, k: int):
    """Order, meet, bottom, top and covers from a verified join table."""
    leq = np.zeros((k, k), dtype=bool)
    for a in range(k):
        for b in range(k):
            leq[a, b] = join_cols[a * k + b] == b

    bottom = next(i for i in range(k)
                  if np.array_equal(join_cols[i * k:(i + 1) * k], np.arange(k)))
    top = 0
    for x in range(1, k):
        top = int(join_cols[top * k + x])

    meet = np.empty(k * k, dtype=np.int64)
    for a in range(k):
        for b in range(k):
            m = bottom
            for u in range(k):
                if leq[u, a] and leq[u, b]:
                    m = int(join_cols[m * k + u])
            meet[a * k + b] = m

    covers = frozenset(
        (a, b)
        for a in range(k) for b in range(k)
        if a != b and leq[a, b]
        and not any(c not in (a, b) and leq[a, c] and leq[c, b]
                    for c in range(k)))
    return leq, meet, bottom, top, covers


def lattice_from_join(m: LogicalMatrix,
                      labels: Sequence[str] | None = None) -> FiniteLattice:
    """Build a lattice from its join structure matrix.

    The order is a <= b iff a v b = b; the meet of a and b is the join of
    everything below both (well-defined once the axioms hold); bottom is the
    join identity and top the join of the whole carrier.
    """
    verdict = verify_join_structure(m)
    if not verdict:
        raise NotALatticeError(
            f"join table violates {verdict.axiom}", verdict=verdict,
            witness=verdict.witness)
    k = m.rows
    labels = tuple(labels) if labels is not None else _default_labels(k)
    if len(labels) != k or len(set(labels)) != k:
        raise DimensionError(f"need {k} distinct labels")
    leq, meet, bottom, top, covers = _derive(m.cols, k)
    return FiniteLattice(k=k, labels=labels, join=m,
                         meet=LogicalMatrix(k, meet), leq=leq,
                         bottom=bottom, top=top, covers=covers)


def lattice_from_order(leq, labels: Sequence[str] | None = None) -> FiniteLattice:
    """Build a lattice from a partial-order relation (k x k boolean).

    Checks the relation is a partial order, then that every pair has a
    unique least upper bound and greatest lower bound, and emits the join
    and meet structure matrices.
    """
    rel = np.asarray(leq, dtype=bool)
    if rel.ndim != 2 or rel.shape[0] != rel.shape[1]:
        raise DimensionError("order relation must be a square matrix")
    k = rel.shape[0]

    for a in range(k):
        if not rel[a, a]:
            raise NotAPosetError(f"relation is not reflexive at {a}",
                                 witness=(a,))
    for a in range(k):
        for b in range(k):
            if a != b and rel[a, b] and rel[b, a]:
                raise NotAPosetError(
                    f"relation is not antisymmetric on ({a},{b})",
                    witness=(a, b))
    for a in range(k):
        for b in range(k):
            for c in range(k):
                if rel[a, b] and rel[b, c] and not rel[a, c]:
                    raise NotAPosetError(
                        f"relation is not transitive on ({a},{b},{c})",
                        witness=(a, b, c))

    join = np.empty(k * k, dtype=np.int64)
    meet = np.empty(k * k, dtype=np.int64)
    for a in range(k):
        for b in range(k):
            ubs = [u for u in range(k) if rel[a, u] and rel[b, u]]
            least = [u for u in ubs if all(rel[u, w] for w in ubs)]
            if len(least) != 1:
                kind = "no" if not ubs else "ambiguous"
                raise NotALatticeError(
                    f"pair ({a},{b}) has {kind} least upper bound",
                    witness=(a, b))
            join[a * k + b] = least[0]
            lbs = [u for u in range(k) if rel[u, a] and rel[u, b]]
            greatest = [u for u in lbs if all(rel[w, u] for w in lbs)]
            if len(greatest) != 1:
                kind = "no" if not lbs else "ambiguous"
                raise NotALatticeError(
                    f"pair ({a},{b}) has {kind} greatest lower bound",
                    witness=(a, b))
            meet[a * k + b] = greatest[0]

    return lattice_from_join(LogicalMatrix(k, join), labels=labels)


def chain(k: int) -> FiniteLattice:
    """The k-element chain on values {0, ..., k-1}.

    Element index i carries value k-1-i, so index 0 is the top (value k-1)
    and index k-1 the bottom (value 0); the join of two indices is their
    minimum.  Labels are the values.
    """
    if k < 1:
        raise DimensionError("a chain needs at least one element")
    i = np.repeat(np.arange(k, dtype=np.int64), k)
    j = np.tile(np.arange(k, dtype=np.int64), k)
    join = LogicalMatrix(k, np.minimum(i, j))
    return lattice_from_join(join, labels=[str(k - 1 - v) for v in range(k)])


def product(l1: FiniteLattice, l2: FiniteLattice) -> FiniteLattice:
    """Componentwise product; element (a, b) maps to index a*l2.k + b."""
    k1, k2, k = l1.k, l2.k, l1.k * l2.k
    a1 = np.repeat(np.arange(k1, dtype=np.int64), k2)
    b1 = np.tile(np.arange(k2, dtype=np.int64), k1)
    x = np.repeat(np.arange(k, dtype=np.int64), k)
    y = np.tile(np.arange(k, dtype=np.int64), k)
    join = (l1.join.cols[a1[x] * k1 + a1[y]] * k2
            + l2.join.cols[b1[x] * k2 + b1[y]])
    labels = tuple(f"({la},{lb})" for la in l1.labels for lb in l2.labels)
    lat = lattice_from_join(LogicalMatrix(k, join), labels=labels)
    return FiniteLattice(k=lat.k, labels=lat.labels, join=lat.join,
                         meet=lat.meet, leq=lat.leq, bottom=lat.bottom,
                         top=lat.top, covers=lat.covers, factors=(l1, l2))


def sublattice(lat: FiniteLattice, elements: Sequence[int]) -> FiniteLattice:
    """The induced lattice on a join- and meet-closed subset.

    Indices are re-assigned in the order given.  Raises
    :class:`NotClosedError` naming the first pair whose join or meet
    escapes the subset.
    """
    elems = list(elements)
    if not elems:
        raise DimensionError("sublattice needs a non-empty subset")
    if len(set(elems)) != len(elems):
        raise DimensionError("sublattice elements must be distinct")
    inside = set(elems)
    for a in elems:
        for b in elems:
            j = lat.join_of(a, b)
            if j not in inside:
                raise NotClosedError(
                    f"join of ({lat.labels[a]},{lat.labels[b]}) escapes the "
                    f"subset to {lat.labels[j]}", pair=(a, b), escapee=j)
            m = lat.meet_of(a, b)
            if m not in inside:
                raise NotClosedError(
                    f"meet of ({lat.labels[a]},{lat.labels[b]}) escapes the "
                    f"subset to {lat.labels[m]}", pair=(a, b), escapee=m)
    r = len(elems)
    pos = {e: i for i, e in enumerate(elems)}
    join = np.empty(r * r, dtype=np.int64)
    for a in range(r):
        for b in range(r):
            join[a * r + b] = pos[lat.join_of(elems[a], elems[b])]
    return lattice_from_join(LogicalMatrix(r, join),
                             labels=[lat.labels[e] for e in elems])


def hasse_dot(lat: FiniteLattice, name: str = "hasse") -> str:
    """DOT text of the cover diagram, edges from covered to covering element,
    with same-rank hints grouped by chain height."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, lbl in enumerate(lat.labels):
        lines.append(f'  n{i} [label="{lbl}"];')
    for a, b in sorted(lat.covers):
        lines.append(f"  n{a} -> n{b};")
    by_height: dict[int, list[int]] = {}
    for i in range(lat.k):
        by_height.setdefault(lat.height(i), []).append(i)
    for h in sorted(by_height):
        group = " ".join(f"n{i};" for i in by_height[h])
        lines.append(f"  {{ rank=same; {group} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"
