"""Networks of lattice-valued nodes and their algebraic state space form.

An update rule is an expression tree over lattice operators; compiling it
produces the unique logical matrix that reproduces the rule on stacked basis
vectors, with inputs ordered before states (column index = input digits then
state digits, base k, most significant first).  Stacking all node matrices
with the Khatri-Rao product yields the global transition matrix, so the
whole network becomes one column-lookup per step.

The compiler's contract is extensional: applying the compiled matrix to any
assignment of basis vectors agrees with recursive evaluation of the tree.
Compilation itself evaluates all assignments at once on vectorised digit
arrays; `eval_expr` is the independent one-assignment reference evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (DimensionError, ExpressionError, NotInvariantError)
from .lattice import FiniteLattice, sublattice
from .logical import LogicalMatrix, khatri_rao, retrieval_matrix

__all__ = [
    "Expr", "Var", "Input", "Const", "Join", "Meet", "Gate",
    "NetworkDef", "ASSR", "Trajectory",
    "validate_expr", "eval_expr", "compile_expr", "assemble",
    "split_components", "is_dumb", "restrict", "simulate",
    "state_index", "state_digits", "expr_to_str",
]


class Expr:
    """Base class for lattice expression trees."""
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    """State variable x_index (0-based)."""
    index: int


@dataclass(frozen=True)
class Input(Expr):
    """Input variable u_index (0-based)."""
    index: int


@dataclass(frozen=True)
class Const(Expr):
    """A fixed lattice element (0-based index)."""
    element: int


@dataclass(frozen=True)
class Join(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Meet(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Gate(Expr):
    """Piecewise constant: ``value`` when ``threshold <= child``, else bottom."""
    threshold: int
    value: int
    child: Expr


def validate_expr(e: Expr, n: int, m: int, k: int) -> None:
    """Raise :class:`ExpressionError` if ``e`` is malformed for arity (n, m)
    over a k-element carrier."""
    if isinstance(e, Var):
        if not 0 <= e.index < n:
            raise ExpressionError(f"state index {e.index} out of range for n={n}")
    elif isinstance(e, Input):
        if not 0 <= e.index < m:
            raise ExpressionError(f"input index {e.index} out of range for m={m}")
    elif isinstance(e, Const):
        if not 0 <= e.element < k:
            raise ExpressionError(f"element {e.element} out of range for k={k}")
    elif isinstance(e, (Join, Meet)):
        validate_expr(e.left, n, m, k)
        validate_expr(e.right, n, m, k)
    elif isinstance(e, Gate):
        if not 0 <= e.threshold < k or not 0 <= e.value < k:
            raise ExpressionError("gate parameters must be lattice elements")
        validate_expr(e.child, n, m, k)
    else:
        raise ExpressionError(f"not an expression node: {e!r}")


def eval_expr(e: Expr, lat: FiniteLattice,
              states: Sequence[int], inputs: Sequence[int] = ()) -> int:
    """Reference evaluator: one assignment, straight recursion on the tree."""
    if isinstance(e, Var):
        return states[e.index]
    if isinstance(e, Input):
        return inputs[e.index]
    if isinstance(e, Const):
        return e.element
    if isinstance(e, Join):
        return lat.join_of(eval_expr(e.left, lat, states, inputs),
                           eval_expr(e.right, lat, states, inputs))
    if isinstance(e, Meet):
        return lat.meet_of(eval_expr(e.left, lat, states, inputs),
                           eval_expr(e.right, lat, states, inputs))
    if isinstance(e, Gate):
        x = eval_expr(e.child, lat, states, inputs)
        return e.value if lat.le(e.threshold, x) else lat.bottom
    raise ExpressionError(f"not an expression node: {e!r}")


def compile_expr(e: Expr, lat: FiniteLattice, n: int, m: int = 0) -> LogicalMatrix:
    """Structure matrix of ``e``: k rows, one column per assignment of the
    m inputs followed by the n states (base-k digits, first variable most
    significant)."""
    validate_expr(e, n, m, lat.k)
    k = lat.k
    nv = n + m
    q = k ** nv
    idx = np.arange(q, dtype=np.int64)
    digit = [(idx // k ** (nv - 1 - v)) % k for v in range(nv)]
    join_t, meet_t, leq = lat.join.cols, lat.meet.cols, lat.leq

    def ev(node: Expr) -> np.ndarray:
        if isinstance(node, Input):
            return digit[node.index]
        if isinstance(node, Var):
            return digit[m + node.index]
        if isinstance(node, Const):
            return np.full(q, node.element, dtype=np.int64)
        if isinstance(node, Join):
            return join_t[ev(node.left) * k + ev(node.right)]
        if isinstance(node, Meet):
            return meet_t[ev(node.left) * k + ev(node.right)]
        # gate
        return np.where(leq[node.threshold, ev(node.child)],
                        np.int64(node.value), np.int64(lat.bottom))

    return LogicalMatrix(k, ev(e))


# -- networks ----------------------------------------------------------------

@dataclass(frozen=True)
class NetworkDef:
    """An n-node, m-input network over a finite lattice.

    ``updates[i]`` drives node i; ``outputs`` is a (possibly empty) tuple of
    read-out expressions.  Node, input and output names are kept for
    display and the model-file syntax.
    """

    lattice: FiniteLattice
    n: int
    m: int
    updates: tuple[Expr, ...]
    outputs: tuple[Expr, ...] = ()
    name: str = "net"
    state_names: tuple[str, ...] = ()
    input_names: tuple[str, ...] = ()
    output_names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ExpressionError("a network needs at least one state node")
        if self.m < 0:
            raise ExpressionError("input count cannot be negative")
        if len(self.updates) != self.n:
            raise ExpressionError(
                f"expected {self.n} update rules, got {len(self.updates)}")
        for e in list(self.updates) + list(self.outputs):
            validate_expr(e, self.n, self.m, self.lattice.k)
        if not self.state_names:
            object.__setattr__(self, "state_names",
                               tuple(f"x{i + 1}" for i in range(self.n)))
        if not self.input_names:
            object.__setattr__(self, "input_names",
                               tuple(f"u{i + 1}" for i in range(self.m)))
        if not self.output_names:
            object.__setattr__(self, "output_names",
                               tuple(f"y{i + 1}" for i in range(len(self.outputs))))


@dataclass(frozen=True)
class ASSR:
    """Algebraic state space form of a network.

    ``M`` is k^n x k^(n+m): column (u, x) holds the successor state, with the
    stacked input index major.  ``components[i]`` is the k x k^(n+m) matrix of
    node i, and ``khatri_rao(components) == M``.  ``E`` maps states to stacked
    outputs when read-outs are declared.
    """

    k: int
    n: int
    m: int
    M: LogicalMatrix
    components: tuple[LogicalMatrix, ...]
    E: LogicalMatrix | None = None
    lattice: FiniteLattice | None = None
    p: int = 0   # number of output nodes

    @property
    def n_states(self) -> int:
        return self.k ** self.n

    @property
    def n_inputs(self) -> int:
        return self.k ** self.m

    def step(self, u: int, x: int) -> int:
        """Successor of stacked state ``x`` under stacked input ``u``."""
        return self.M.column(u * self.n_states + x)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "m": self.m,
                "M": self.M.to_json(),
                "components": [c.to_json() for c in self.components],
                "E": self.E.to_json() if self.E is not None else None}

    @classmethod
    def from_json(cls, obj: dict) -> "ASSR":
        comps = tuple(LogicalMatrix.from_json(c) for c in obj["components"])
        e = obj.get("E")
        emat = LogicalMatrix.from_json(e) if e else None
        k, n = int(obj["k"]), int(obj["n"])
        p = 0
        if emat is not None:
            rows = emat.rows
            while rows > 1:
                if k == 1 or rows % k:
                    raise DimensionError("output rows are not a power of k")
                rows //= k
                p += 1
        return cls(k=k, n=n, m=int(obj["m"]),
                   M=LogicalMatrix.from_json(obj["M"]),
                   components=comps, E=emat, p=p)


def assemble(net: NetworkDef) -> ASSR:
    """Compile every node and stack the results into the global matrix."""
    comps = tuple(compile_expr(e, net.lattice, net.n, net.m)
                  for e in net.updates)
    m = khatri_rao(comps)
    e_mat = None
    if net.outputs:
        e_mat = khatri_rao(tuple(compile_expr(e, net.lattice, net.n, 0)
                                 for e in net.outputs))
    return ASSR(k=net.lattice.k, n=net.n, m=net.m, M=m, components=comps,
                E=e_mat, lattice=net.lattice, p=len(net.outputs))


def split_components(m: LogicalMatrix, k: int, n: int) -> list[LogicalMatrix]:
    """Recover the unique per-node factors of a stacked map: node i is the
    i-th retrieval projector applied to ``m``."""
    if m.rows != k ** n:
        raise DimensionError(f"row count {m.rows} is not {k}^{n}")
    # index arithmetic inlined: digit i of every column value
    return [LogicalMatrix(k, (m.cols // k ** (n - 1 - i)) % k)
            for i in range(n)]


def is_dumb(mi: LogicalMatrix, j: int) -> bool:
    """True iff the function encoded by ``mi`` does not depend on variable
    ``j`` (0-based among its N stacked arguments).

    Equivalent to rotating variable j to the front and comparing the k
    equal-width column blocks.
    """
    k = mi.rows
    nv = 0
    q = mi.n_cols
    while q > 1:
        if q % k:
            raise DimensionError("column count is not a power of the row count")
        q //= k
        nv += 1
    if not 0 <= j < nv:
        raise DimensionError(f"variable index {j} out of range for {nv}")
    t = mi.cols.reshape((k,) * nv)
    return bool(np.all(t == np.take(t, [0], axis=j)))


def state_index(digits: Sequence[int], k: int) -> int:
    """Stack per-node element indices into one state index (first node most
    significant)."""
    x = 0
    for d in digits:
        x = x * k + d
    return x


def state_digits(x: int, k: int, n: int) -> tuple[int, ...]:
    """Inverse of :func:`state_index`."""
    out = []
    for _ in range(n):
        out.append(x % k)
        x //= k
    return tuple(reversed(out))


def _mixed_encode(digit_rows: np.ndarray, radix: int) -> np.ndarray:
    out = np.zeros(digit_rows.shape[1], dtype=np.int64)
    for row in digit_rows:
        out = out * radix + row
    return out


def restrict(assr: ASSR, elements: Sequence[int]) -> ASSR:
    """Restrict the dynamics to states (and inputs) drawn from a subset of
    the carrier, re-indexing by the order given.

    Every reachable image must decompose into subset elements; otherwise
    :class:`NotInvariantError` reports the offending (input, state) pair and
    its image.  Built-from-operator networks restricted to a sublattice are
    invariant by construction, but the check runs regardless.
    """
    elems = list(elements)
    k, n, m = assr.k, assr.n, assr.m
    r = len(elems)
    if r < 1:
        raise DimensionError("restriction needs a non-empty subset")
    sel = np.asarray(elems, dtype=np.int64)
    inv = -np.ones(k, dtype=np.int64)
    inv[sel] = np.arange(r)

    nv = n + m
    q = r ** nv
    idx = np.arange(q, dtype=np.int64)
    # column index into the full matrix for every restricted assignment
    full = np.zeros(q, dtype=np.int64)
    for v in range(nv):
        full = full * k + sel[(idx // r ** (nv - 1 - v)) % r]
    images = assr.M.cols[full]
    img_digits = np.stack([(images // k ** (n - 1 - i)) % k for i in range(n)])
    mapped = inv[img_digits]
    if (mapped < 0).any():
        j = int(np.argwhere((mapped < 0).any(axis=0))[0][0])
        digs = [int((idx[j] // r ** (nv - 1 - v)) % r) for v in range(nv)]
        raise NotInvariantError(
            "dynamics leave the subset",
            witness={"inputs": tuple(sel[d] for d in digs[:m]),
                     "state": tuple(sel[d] for d in digs[m:]),
                     "image": state_digits(int(images[j]), k, n)})

    new_m = LogicalMatrix(r ** n, _mixed_encode(mapped, r))
    new_lat = None
    if assr.lattice is not None:
        new_lat = sublattice(assr.lattice, elems)

    new_e = None
    p = assr.p
    if assr.E is not None:
        state_idx = np.arange(r ** n, dtype=np.int64)
        full_states = np.zeros(r ** n, dtype=np.int64)
        for v in range(n):
            full_states = full_states * k + sel[(state_idx // r ** (n - 1 - v)) % r]
        outs = assr.E.cols[full_states]
        out_digits = np.stack([(outs // k ** (p - 1 - i)) % k for i in range(p)])
        mapped_out = inv[out_digits]
        if (mapped_out < 0).any():
            j = int(np.argwhere((mapped_out < 0).any(axis=0))[0][0])
            raise NotInvariantError(
                "outputs leave the subset",
                witness={"state": state_digits(int(full_states[j]), k, n),
                         "image": state_digits(int(outs[j]), k, p)})
        new_e = LogicalMatrix(r ** p, _mixed_encode(mapped_out, r))

    comps = tuple(split_components(new_m, r, n))
    return ASSR(k=r, n=n, m=m, M=new_m, components=comps, E=new_e,
                lattice=new_lat, p=p)


@dataclass(frozen=True)
class Trajectory:
    """States visited (stacked indices), plus stacked outputs when defined."""
    states: tuple[int, ...]
    outputs: tuple[int, ...] | None = None


def simulate(assr: ASSR, x0: int, inputs: Sequence[int] = (),
             steps: int | None = None) -> Trajectory:
    """Run the dynamics from stacked state ``x0``.

    For a control-form system, ``inputs`` supplies one stacked input index
    per step and fixes the horizon.  For an autonomous one, pass ``steps``.
    """
    if not 0 <= x0 < assr.n_states:
        raise DimensionError(f"initial state {x0} out of range")
    if assr.m > 0:
        if steps is not None and steps != len(inputs):
            raise DimensionError("steps disagrees with the number of inputs")
        horizon = len(inputs)
        for u in inputs:
            if not 0 <= u < assr.n_inputs:
                raise DimensionError(f"input {u} out of range")
    else:
        if inputs:
            raise DimensionError("autonomous system takes no inputs")
        horizon = steps if steps is not None else 0

    states = [x0]
    for t in range(horizon):
        u = inputs[t] if assr.m > 0 else 0
        states.append(assr.step(u, states[-1]))
    outputs = None
    if assr.E is not None:
        outputs = tuple(assr.E.column(x) for x in states)
    return Trajectory(states=tuple(states), outputs=outputs)


# -- display -------------------------------------------------------------

_JOIN_LEVEL, _MEET_LEVEL, _ATOM_LEVEL = 0, 1, 2


def expr_to_str(e: Expr, state_names: Sequence[str],
                input_names: Sequence[str], labels: Sequence[str],
                _level: int = 0) -> str:
    r"""Render an expression in the model-file syntax (`\/`, `/\`, `m[a,b]`,
    `const a`), inserting only the parentheses precedence requires."""
    if isinstance(e, Var):
        return state_names[e.index]
    if isinstance(e, Input):
        return input_names[e.index]
    if isinstance(e, Const):
        return f"const {labels[e.element]}"
    if isinstance(e, Gate):
        inner = expr_to_str(e.child, state_names, input_names, labels, 0)
        return f"m[{labels[e.threshold]},{labels[e.value]}]({inner})"
    if isinstance(e, Join):
        lvl = _JOIN_LEVEL
        sep = " \\/ "
    else:
        lvl = _MEET_LEVEL
        sep = " /\\ "
    left = expr_to_str(e.left, state_names, input_names, labels, lvl)
    right = expr_to_str(e.right, state_names, input_names, labels, lvl + 1)
    text = sep.join((left, right))
    return f"({text})" if lvl < _level else text
