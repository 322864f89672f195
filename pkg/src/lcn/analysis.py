"""Reachability, output distinguishability and product-lattice decomposition.

Controllability is decided on the Boolean sum of Boolean powers of the
input-summed transition blocks: entry (i, j) is set iff state i is reachable
from state j in at least one step under some input sequence.  Observability
runs two synchronized copies of the system ("pair system") driven by one
shared input and asks which initial pairs can reach an output-separating
pair state.

Boolean matrix powers use float64 matmuls (exact for 0/1 sums at these
sizes) with early fixpoint termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from math import isqrt

import numpy as np

from .errors import DimensionError, NotDecomposableError
from .logical import (LogicalMatrix, kron, power_reduce_matrix, stp,
                      swap_matrix)
from .network import ASSR, split_components, state_digits, state_index

__all__ = [
    "controllability_matrix", "is_controllable",
    "pair_system", "distinguishable_pairs", "DistinguishabilitySet",
    "is_observable", "ObservabilityVerdict",
    "factor_network", "product_verdict", "ProductVerdict",
    "split_product_state",
]


def _one_step_relation(m: LogicalMatrix, n_states: int) -> np.ndarray:
    """Boolean n x n matrix: entry (i, j) iff some input block sends j to i."""
    if m.rows != n_states or m.n_cols % n_states:
        raise DimensionError("transition matrix columns must tile the state count")
    a = np.zeros((n_states, n_states), dtype=bool)
    cols = np.arange(n_states)
    for u in range(m.n_cols // n_states):
        a[m.cols[u * n_states:(u + 1) * n_states], cols] = True
    return a


def _reach_ge1(a: np.ndarray) -> np.ndarray:
    """Boolean sum of Boolean powers a + a^2 + ...; fixpoint-terminated."""
    reach = np.zeros_like(a)
    power = a.copy()
    af = a.astype(np.float64)
    for _ in range(a.shape[0]):
        new = reach | power
        if np.array_equal(new, reach):
            break
        reach = new
        power = (af @ power.astype(np.float64)) > 0.5
    return reach


def controllability_matrix(assr: ASSR) -> np.ndarray:
    """Boolean k^n x k^n matrix; (i, j) set iff i is reachable from j in
    one or more steps."""
    return _reach_ge1(_one_step_relation(assr.M, assr.n_states))


def is_controllable(c: np.ndarray) -> tuple[bool, tuple[int, int] | None]:
    """Full controllability verdict with the first unreachable (to, from)
    pair as witness."""
    missing = np.argwhere(~c)
    if missing.size:
        i, j = missing[0]
        return False, (int(i), int(j))
    return True, None


def pair_system(assr: ASSR) -> LogicalMatrix:
    """Transition matrix of two copies of the system under one shared input.

    With N = k^n states and K = k^m stacked inputs the result G is
    N^2 x K*N^2 and satisfies G (u kron z kron z*) =
    (M u z) kron (M u z*) for all basis vectors.
    """
    n_states, k_inputs = assr.n_states, assr.n_inputs
    g = stp(assr.M, kron(LogicalMatrix.identity(k_inputs * n_states), assr.M))
    g = stp(g, kron(LogicalMatrix.identity(k_inputs),
                    swap_matrix(k_inputs, n_states)))
    return stp(g, power_reduce_matrix(k_inputs))


@dataclass(frozen=True)
class DistinguishabilitySet:
    """Unordered pairs of initial states separable through the outputs.

    ``indicator[s]`` flags pair states (row-major (i, j) over N^2) that can
    reach an output-separating pair in >= 1 steps; ``separating`` holds the
    pair states whose outputs already differ.  In ``"paper"`` mode a pair is
    distinguishable iff its pair state reaches a separating one in >= 1
    steps; ``"standard"`` mode also accepts pairs that separate at time 0.
    """

    n_states: int
    mode: str
    pairs: frozenset[tuple[int, int]]
    indicator: np.ndarray
    separating: frozenset[int]

    def holds(self, i: int, j: int) -> bool:
        if i == j:
            return False
        a, b = min(i, j), max(i, j)
        return (a, b) in self.pairs


def distinguishable_pairs(g: LogicalMatrix, e: LogicalMatrix,
                          mode: str = "paper") -> DistinguishabilitySet:
    """Distinguishable state pairs from a pair system and an output map."""
    if mode not in ("paper", "standard"):
        raise DimensionError(f"unknown mode {mode!r}")
    n2 = g.rows
    n_states = isqrt(n2)
    if n_states * n_states != n2:
        raise DimensionError("pair system rows must be a perfect square")
    if e.n_cols != n_states:
        raise DimensionError(
            f"output map has {e.n_cols} columns, expected {n_states}")

    sep = frozenset(
        i * n_states + j
        for i in range(n_states) for j in range(n_states)
        if i != j and e.column(i) != e.column(j))

    reach = _reach_ge1(_one_step_relation(g, n2))
    sep_rows = sorted(sep)
    indicator = reach[sep_rows, :].any(axis=0) if sep_rows else \
        np.zeros(n2, dtype=bool)

    pairs = set()
    for i in range(n_states):
        for j in range(i + 1, n_states):
            ok = bool(indicator[i * n_states + j])
            if mode == "standard":
                ok = ok or (i * n_states + j) in sep
            if ok:
                pairs.add((i, j))
    return DistinguishabilitySet(n_states=n_states, mode=mode,
                                 pairs=frozenset(pairs), indicator=indicator,
                                 separating=sep)


@dataclass(frozen=True)
class ObservabilityVerdict:
    observable: bool
    witness: tuple[int, int] | None
    pairs: DistinguishabilitySet

    def __bool__(self) -> bool:
        return self.observable


def is_observable(assr: ASSR, mode: str = "paper") -> ObservabilityVerdict:
    """Every two distinct initial states must be distinguishable; the witness
    is the first indistinguishable pair otherwise."""
    if assr.E is None:
        raise DimensionError("observability needs an output map")
    dist = distinguishable_pairs(pair_system(assr), assr.E, mode=mode)
    n = assr.n_states
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in dist.pairs:
                return ObservabilityVerdict(False, (i, j), dist)
    return ObservabilityVerdict(True, None, dist)


# -- product-lattice decomposition -------------------------------------------


def split_product_state(x: int, k1: int, k2: int, n: int) -> tuple[int, int]:
    """Split a stacked state over a product carrier into its factor states."""
    digits = state_digits(x, k1 * k2, n)
    z1 = state_index([d // k2 for d in digits], k1)
    z2 = state_index([d % k2 for d in digits], k2)
    return z1, z2


def _project_factor(assr: ASSR, which: int) -> ASSR:
    lat1, lat2 = assr.lattice.factors
    k1, k2 = lat1.k, lat2.k
    kf = k1 if which == 0 else k2
    ko = k2 if which == 0 else k1
    k, n, m = assr.k, assr.n, assr.m
    nv = n + m

    def lift(fd, od):
        # factor digit + other-factor digit -> full element
        return fd * k2 + od if which == 0 else od * k2 + fd

    def proj(e):
        return e // k2 if which == 0 else e % k2

    cols = np.empty(kf ** nv, dtype=np.int64)
    for idx in range(kf ** nv):
        fd = state_digits(idx, kf, nv)
        result = None
        for lifts in iproduct(range(ko), repeat=nv):
            full = state_index([lift(d, o) for d, o in zip(fd, lifts)], k)
            image = assr.M.column(full)
            projected = state_index(
                [proj(d) for d in state_digits(image, k, n)], kf)
            if result is None:
                result = (projected, lifts, full)
            elif result[0] != projected:
                raise NotDecomposableError(
                    "dynamics do not act factor-wise",
                    witness={"factor": which, "assignment": fd,
                             "lift_a": result[1], "lift_b": lifts,
                             "projection_a": result[0],
                             "projection_b": projected})
        cols[idx] = result[0]
    m_f = LogicalMatrix(kf ** n, cols)

    e_f = None
    p = assr.p
    if assr.E is not None:
        ecols = np.empty(kf ** n, dtype=np.int64)
        for idx in range(kf ** n):
            fd = state_digits(idx, kf, n)
            result = None
            for lifts in iproduct(range(ko), repeat=n):
                full = state_index([lift(d, o) for d, o in zip(fd, lifts)], k)
                out = assr.E.column(full)
                projected = state_index(
                    [proj(d) for d in state_digits(out, k, p)], kf)
                if result is None:
                    result = (projected, lifts)
                elif result[0] != projected:
                    raise NotDecomposableError(
                        "outputs do not act factor-wise",
                        witness={"factor": which, "assignment": fd})
            ecols[idx] = result[0]
        e_f = LogicalMatrix(kf ** p, ecols)

    factor_lat = lat1 if which == 0 else lat2
    return ASSR(k=kf, n=n, m=m, M=m_f,
                components=tuple(split_components(m_f, kf, n)),
                E=e_f, lattice=factor_lat, p=p)


def factor_network(assr: ASSR) -> tuple[ASSR, ASSR]:
    """Decompose a system over a product lattice into its factor systems.

    Requires the lattice to have been built by :func:`lcn.lattice.product`
    (element (a, b) at index a*k2 + b).  Every lift of a factor assignment
    must project to the same image; the check runs on all lifts and raises
    :class:`NotDecomposableError` with the first disagreeing pair.
    """
    if assr.lattice is None or assr.lattice.factors is None:
        raise DimensionError("factoring needs a lattice built as a product")
    return _project_factor(assr, 0), _project_factor(assr, 1)


@dataclass(frozen=True)
class ProductVerdict:
    """Conjunction verdict over factor systems, with the factor evidence.

    For observability the two factor pair sets are kept so product-state
    pairs can be classified under both combination readings:
    ``paper_rule`` requires both factor pairs distinguishable, while
    ``standard_rule`` accepts distinguishability in either factor.
    """

    prop: str
    holds: bool
    factor_holds: tuple[bool, ...]
    k1: int
    k2: int
    n: int
    factor_pairs: tuple[DistinguishabilitySet, ...] | None = None
    factor_witnesses: tuple | None = None

    def _factor_pair(self, i: int, j: int) -> tuple:
        z1i, z2i = split_product_state(i, self.k1, self.k2, self.n)
        z1j, z2j = split_product_state(j, self.k1, self.k2, self.n)
        return (z1i, z1j), (z2i, z2j)

    def paper_rule(self, i: int, j: int) -> bool:
        (p1a, p1b), (p2a, p2b) = self._factor_pair(i, j)
        return (self.factor_pairs[0].holds(p1a, p1b)
                and self.factor_pairs[1].holds(p2a, p2b))

    def standard_rule(self, i: int, j: int) -> bool:
        (p1a, p1b), (p2a, p2b) = self._factor_pair(i, j)
        return (self.factor_pairs[0].holds(p1a, p1b)
                or self.factor_pairs[1].holds(p2a, p2b))


def product_verdict(factors: tuple[ASSR, ASSR], prop: str,
                    mode: str = "paper") -> ProductVerdict:
    """Combine factor verdicts: the product system has the property iff all
    factor systems do."""
    f1, f2 = factors
    if prop == "controllability":
        results = []
        witnesses = []
        for f in (f1, f2):
            ok, wit = is_controllable(controllability_matrix(f))
            results.append(ok)
            witnesses.append(wit)
        return ProductVerdict(prop=prop, holds=all(results),
                              factor_holds=tuple(results),
                              k1=f1.k, k2=f2.k, n=f1.n,
                              factor_witnesses=tuple(witnesses))
    if prop == "observability":
        verdicts = [is_observable(f, mode=mode) for f in (f1, f2)]
        return ProductVerdict(prop=prop,
                              holds=all(v.observable for v in verdicts),
                              factor_holds=tuple(v.observable for v in verdicts),
                              k1=f1.k, k2=f2.k, n=f1.n,
                              factor_pairs=tuple(v.pairs for v in verdicts),
                              factor_witnesses=tuple(v.witness for v in verdicts))
    raise DimensionError(f"unknown property {prop!r}")
