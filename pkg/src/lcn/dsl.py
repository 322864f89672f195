r"""Model-file syntax for lattices and networks.

A model file declares lattices and networks::

    # a diamond and a two-node control network over it
    lattice D = join {
      elements: P1 P2 P3 P4
      table: [P1 P1 P1 P1 P1 P2 P1 P2 P1 P1 P3 P3 P1 P2 P3 P4]
    }

    network main over D {
      states: x1 x2
      inputs: u
      x1' = x1 /\ (x2 \/ u)
      x2' = x1 \/ (x2 /\ u)
      output y = x2
    }

Lattices can also be declared as ``chain k``, ``product A B``, or from an
order/cover list::

    lattice C2 = chain 2
    lattice P6 = product C2 C3
    lattice V = covers { elements: a b c; covers: a<b a<c }

Join tables list k*k element labels row-major in the first argument; order
and cover declarations are closed reflexively and transitively before the
lattice check.  Expressions use ``\/`` (join, loosest), ``/\`` (meet),
``m[a,b](e)`` threshold gates and ``const a``; element labels may be bare
names, numbers, or parenthesised tuples such as ``(1,2)`` for product
elements.  Newlines separate clauses except inside brackets; ``#`` starts a
comment.

Parsing and pretty-printing round-trip: parse(pretty(parse(text))) equals
parse(text).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (LcnError, NotALatticeError, NotAPosetError, ParseError,
                     SemanticError)
from .lattice import (FiniteLattice, JoinVerdict, chain, lattice_from_join,
                      lattice_from_order, product, verify_join_structure)
from .logical import LogicalMatrix
from .network import (Const, Expr, Gate, Input, Join, Meet, NetworkDef, Var,
                      expr_to_str)

__all__ = ["ModelFile", "LatticeDecl", "NetworkDecl", "parse_model", "pretty"]


# -- tokens -------------------------------------------------------------

_SYMBOLS = ("\\/", "/\\", "{", "}", "[", "]", "(", ")", ":", ";", ",", "=",
            "<", "'")


@dataclass(frozen=True)
class _Tok:
    kind: str          # NAME NUMBER SYM NEWLINE EOF
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    depth = 0          # inside [] or (): newlines are insignificant
    while i < n:
        ch = text[i]
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            if depth == 0 and toks and toks[-1].kind != "NEWLINE":
                toks.append(_Tok("NEWLINE", "\n", line, col))
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        two = text[i:i + 2]
        if two in ("\\/", "/\\"):
            toks.append(_Tok("SYM", two, line, col))
            i += 2
            col += 2
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("NUMBER", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("NAME", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth = max(0, depth - 1)
        if ch in "{}[]():;,=<'":
            toks.append(_Tok("SYM", ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("NEWLINE", "\n", line, col))
    toks.append(_Tok("EOF", "", line, col))
    return toks


# -- declarations --------------------------------------------------------


@dataclass(frozen=True)
class LatticeDecl:
    """A lattice declaration; ``lattice`` is None when a join table failed
    verification (``verdict`` then names the broken axiom)."""

    name: str
    form: str                       # chain | product | join | order | covers
    lattice: FiniteLattice | None
    verdict: JoinVerdict | None = None
    chain_size: int | None = None
    factor_names: tuple[str, str] | None = None
    elements: tuple[str, ...] | None = None
    table: tuple[str, ...] | None = None
    pairs: tuple[tuple[str, str], ...] | None = None


@dataclass(frozen=True)
class NetworkDecl:
    name: str
    lattice_name: str
    network: NetworkDef


@dataclass(frozen=True)
class ModelFile:
    decls: tuple = ()
    lattices: dict[str, FiniteLattice] = field(default_factory=dict)
    lattice_decls: dict[str, LatticeDecl] = field(default_factory=dict)
    networks: dict[str, NetworkDef] = field(default_factory=dict)


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    # -- token plumbing --

    @property
    def cur(self) -> _Tok:
        return self.toks[self.pos]

    def advance(self) -> _Tok:
        t = self.cur
        self.pos += 1
        return t

    def skip_newlines(self):
        while self.cur.kind == "NEWLINE":
            self.advance()

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        t = self.cur
        if t.kind != kind or (text is not None and t.text != text):
            want = text if text is not None else kind
            raise ParseError(f"expected {want!r}, found {t.text!r}",
                             t.line, t.col)
        return self.advance()

    def expect_name(self, what: str = "name") -> _Tok:
        t = self.cur
        if t.kind != "NAME":
            raise ParseError(f"expected {what}, found {t.text!r}",
                             t.line, t.col)
        return self.advance()

    def at_sym(self, text: str) -> bool:
        return self.cur.kind == "SYM" and self.cur.text == text

    def end_of_line(self):
        t = self.cur
        if t.kind not in ("NEWLINE", "EOF") and not self.at_sym("}"):
            raise ParseError(f"unexpected {t.text!r} at end of clause",
                             t.line, t.col)
        self.skip_newlines()

    # -- labels --

    def parse_label(self) -> str:
        t = self.cur
        if t.kind in ("NAME", "NUMBER"):
            self.advance()
            return t.text
        if self.at_sym("("):
            self.advance()
            parts = [self.parse_label()]
            while self.at_sym(","):
                self.advance()
                parts.append(self.parse_label())
            self.expect("SYM", ")")
            return "(" + ",".join(parts) + ")"
        raise ParseError(f"expected element label, found {t.text!r}",
                         t.line, t.col)

    def at_label(self) -> bool:
        return self.cur.kind in ("NAME", "NUMBER") or self.at_sym("(")

    # -- model --

    def parse_model(self) -> ModelFile:
        decls = []
        lattices: dict[str, FiniteLattice] = {}
        lattice_decls: dict[str, LatticeDecl] = {}
        networks: dict[str, NetworkDef] = {}
        self.skip_newlines()
        while self.cur.kind != "EOF":
            t = self.cur
            if t.kind == "NAME" and t.text == "lattice":
                decl = self.parse_lattice_decl(lattices)
                if decl.name in lattice_decls:
                    raise SemanticError(f"duplicate lattice {decl.name!r}",
                                        t.line, t.col)
                lattice_decls[decl.name] = decl
                if decl.lattice is not None:
                    lattices[decl.name] = decl.lattice
                decls.append(decl)
            elif t.kind == "NAME" and t.text == "network":
                decl = self.parse_network_decl(lattices, lattice_decls)
                if decl.name in networks:
                    raise SemanticError(f"duplicate network {decl.name!r}",
                                        t.line, t.col)
                networks[decl.name] = decl.network
                decls.append(decl)
            else:
                raise ParseError(
                    f"expected 'lattice' or 'network', found {t.text!r}",
                    t.line, t.col)
            self.skip_newlines()
        return ModelFile(decls=tuple(decls), lattices=lattices,
                         lattice_decls=lattice_decls, networks=networks)

    # -- lattice declarations --

    def parse_lattice_decl(self, lattices) -> LatticeDecl:
        self.expect("NAME", "lattice")
        name_tok = self.expect_name("lattice name")
        self.expect("SYM", "=")
        kind = self.expect_name("lattice form")
        if kind.text == "chain":
            size_tok = self.cur
            if size_tok.kind != "NUMBER":
                raise ParseError("chain needs a size", size_tok.line,
                                 size_tok.col)
            self.advance()
            self.end_of_line()
            k = int(size_tok.text)
            if k < 1:
                raise SemanticError("chain size must be positive",
                                    size_tok.line, size_tok.col)
            return LatticeDecl(name=name_tok.text, form="chain",
                               lattice=chain(k), chain_size=k)
        if kind.text == "product":
            a = self.expect_name("lattice name")
            b = self.expect_name("lattice name")
            self.end_of_line()
            for t in (a, b):
                if t.text not in lattices:
                    raise SemanticError(f"unknown lattice {t.text!r}",
                                        t.line, t.col)
            return LatticeDecl(
                name=name_tok.text, form="product",
                lattice=product(lattices[a.text], lattices[b.text]),
                factor_names=(a.text, b.text))
        if kind.text in ("join", "order", "covers"):
            return self.parse_lattice_block(name_tok, kind)
        raise ParseError(
            f"unknown lattice form {kind.text!r} "
            "(expected chain/product/join/order/covers)",
            kind.line, kind.col)

    def parse_lattice_block(self, name_tok: _Tok, kind: _Tok) -> LatticeDecl:
        self.expect("SYM", "{")
        self.skip_newlines()
        elements: list[str] | None = None
        elements_tok = None
        table: list[str] | None = None
        pairs: list[tuple[str, str, _Tok]] = []
        while not self.at_sym("}"):
            key = self.expect_name("clause")
            self.expect("SYM", ":")
            if key.text == "elements":
                elements = []
                elements_tok = key
                while self.at_label():
                    elements.append(self.parse_label())
                self.end_of_line()
            elif key.text == "table" and kind.text == "join":
                self.expect("SYM", "[")
                table = []
                while not self.at_sym("]"):
                    table.append(self.parse_label())
                self.expect("SYM", "]")
                self.end_of_line()
            elif key.text in ("leq", "covers") and kind.text in ("order",
                                                                 "covers"):
                while self.at_label():
                    a = self.parse_label()
                    lt = self.expect("SYM", "<")
                    b = self.parse_label()
                    pairs.append((a, b, lt))
                self.end_of_line()
            else:
                raise ParseError(f"unexpected clause {key.text!r}",
                                 key.line, key.col)
        close = self.expect("SYM", "}")
        self.end_of_line()

        if not elements:
            raise SemanticError("lattice block needs an elements clause",
                                name_tok.line, name_tok.col)
        if len(set(elements)) != len(elements):
            raise SemanticError("element labels must be distinct",
                                elements_tok.line, elements_tok.col)
        k = len(elements)
        index = {lbl: i for i, lbl in enumerate(elements)}

        if kind.text == "join":
            if table is None:
                raise SemanticError("join lattice needs a table clause",
                                    name_tok.line, name_tok.col)
            if len(table) != k * k:
                raise SemanticError(
                    f"join table needs {k * k} entries, got {len(table)}",
                    name_tok.line, name_tok.col)
            cols = []
            for lbl in table:
                if lbl not in index:
                    raise SemanticError(f"unknown element {lbl!r} in table",
                                        close.line, close.col)
                cols.append(index[lbl])
            # a broken table is kept so check-lattice can report its verdict
            mat = LogicalMatrix(k, np.array(cols))
            verdict = verify_join_structure(mat)
            lat = lattice_from_join(mat, labels=elements) if verdict else None
            return LatticeDecl(name=name_tok.text, form="join", lattice=lat,
                               verdict=verdict, elements=tuple(elements),
                               table=tuple(table))

        leq = np.eye(k, dtype=bool)
        clean_pairs = []
        for a, b, tok in pairs:
            for lbl in (a, b):
                if lbl not in index:
                    raise SemanticError(f"unknown element {lbl!r}",
                                        tok.line, tok.col)
            leq[index[a], index[b]] = True
            clean_pairs.append((a, b))
        for mid in range(k):          # transitive closure of the generators
            for x in range(k):
                for y in range(k):
                    if leq[x, mid] and leq[mid, y]:
                        leq[x, y] = True
        try:
            lat = lattice_from_order(leq, labels=elements)
        except (NotAPosetError, NotALatticeError) as err:
            raise SemanticError(f"declared order is not a lattice: {err}",
                                name_tok.line, name_tok.col)
        return LatticeDecl(name=name_tok.text, form=kind.text, lattice=lat,
                           elements=tuple(elements),
                           pairs=tuple(clean_pairs))

    # -- network declarations --

    def parse_network_decl(self, lattices, lattice_decls) -> NetworkDecl:
        self.expect("NAME", "network")
        name_tok = self.expect_name("network name")
        self.expect("NAME", "over")
        lat_tok = self.expect_name("lattice name")
        if lat_tok.text not in lattices:
            if lat_tok.text in lattice_decls:
                raise SemanticError(
                    f"lattice {lat_tok.text!r} failed verification and "
                    "cannot host a network", lat_tok.line, lat_tok.col)
            raise SemanticError(f"unknown lattice {lat_tok.text!r}",
                                lat_tok.line, lat_tok.col)
        lat = lattices[lat_tok.text]
        self.expect("SYM", "{")
        self.skip_newlines()

        state_names: list[str] = []
        input_names: list[str] = []
        updates: dict[str, Expr] = {}
        update_order: list[tuple[str, _Tok]] = []
        outputs: list[tuple[str, Expr]] = []
        while not self.at_sym("}"):
            t = self.cur
            if t.kind == "NAME" and t.text == "states" \
                    and self.toks[self.pos + 1].text == ":":
                self.advance()
                self.advance()
                while self.cur.kind == "NAME":
                    state_names.append(self.advance().text)
                self.end_of_line()
            elif t.kind == "NAME" and t.text == "inputs" \
                    and self.toks[self.pos + 1].text == ":":
                self.advance()
                self.advance()
                while self.cur.kind == "NAME":
                    input_names.append(self.advance().text)
                self.end_of_line()
            elif t.kind == "NAME" and t.text == "output":
                self.advance()
                out_tok = self.expect_name("output name")
                self.expect("SYM", "=")
                expr = self.parse_expr(lat, state_names, input_names)
                outputs.append((out_tok.text, expr))
                self.end_of_line()
            elif t.kind == "NAME":
                node_tok = self.advance()
                self.expect("SYM", "'")
                self.expect("SYM", "=")
                if node_tok.text not in state_names:
                    raise SemanticError(
                        f"update for undeclared state {node_tok.text!r}",
                        node_tok.line, node_tok.col)
                if node_tok.text in updates:
                    raise SemanticError(
                        f"duplicate update for {node_tok.text!r}",
                        node_tok.line, node_tok.col)
                updates[node_tok.text] = self.parse_expr(lat, state_names,
                                                         input_names)
                update_order.append((node_tok.text, node_tok))
                self.end_of_line()
            else:
                raise ParseError(f"unexpected {t.text!r} in network block",
                                 t.line, t.col)
        self.expect("SYM", "}")
        self.end_of_line()

        if not state_names:
            raise SemanticError("network declares no states",
                                name_tok.line, name_tok.col)
        all_names = state_names + input_names
        if len(set(all_names)) != len(all_names):
            raise SemanticError("state and input names must be distinct",
                                name_tok.line, name_tok.col)
        for s in state_names:
            if s not in updates:
                raise SemanticError(f"state {s!r} has no update rule",
                                    name_tok.line, name_tok.col)
        net = NetworkDef(
            lattice=lat, n=len(state_names), m=len(input_names),
            updates=tuple(updates[s] for s in state_names),
            outputs=tuple(e for _, e in outputs),
            name=name_tok.text,
            state_names=tuple(state_names),
            input_names=tuple(input_names),
            output_names=tuple(nm for nm, _ in outputs))
        return NetworkDecl(name=name_tok.text, lattice_name=lat_tok.text,
                           network=net)

    # -- expressions --

    def parse_expr(self, lat, state_names, input_names) -> Expr:
        left = self.parse_meet(lat, state_names, input_names)
        while self.at_sym("\\/"):
            self.advance()
            right = self.parse_meet(lat, state_names, input_names)
            left = Join(left, right)
        return left

    def parse_meet(self, lat, state_names, input_names) -> Expr:
        left = self.parse_atom(lat, state_names, input_names)
        while self.at_sym("/\\"):
            self.advance()
            right = self.parse_atom(lat, state_names, input_names)
            left = Meet(left, right)
        return left

    def _element(self, label: str, tok: _Tok, lat) -> int:
        try:
            return lat.index_of(label)
        except KeyError:
            raise SemanticError(f"unknown element label {label!r}",
                                tok.line, tok.col)

    def parse_atom(self, lat, state_names, input_names) -> Expr:
        t = self.cur
        if self.at_sym("("):
            self.advance()
            e = self.parse_expr(lat, state_names, input_names)
            self.expect("SYM", ")")
            return e
        if t.kind == "NAME" and t.text == "m" \
                and self.toks[self.pos + 1].text == "[":
            self.advance()
            self.expect("SYM", "[")
            a_tok = self.cur
            a = self.parse_label()
            self.expect("SYM", ",")
            b_tok = self.cur
            b = self.parse_label()
            self.expect("SYM", "]")
            self.expect("SYM", "(")
            child = self.parse_expr(lat, state_names, input_names)
            self.expect("SYM", ")")
            return Gate(self._element(a, a_tok, lat),
                        self._element(b, b_tok, lat), child)
        if t.kind == "NAME" and t.text == "const":
            self.advance()
            lbl_tok = self.cur
            lbl = self.parse_label()
            return Const(self._element(lbl, lbl_tok, lat))
        if t.kind == "NAME":
            self.advance()
            if t.text in state_names:
                return Var(state_names.index(t.text))
            if t.text in input_names:
                return Input(input_names.index(t.text))
            raise SemanticError(f"unknown variable {t.text!r}", t.line, t.col)
        raise ParseError(f"expected an expression, found {t.text!r}",
                         t.line, t.col)


def parse_model(text: str) -> ModelFile:
    """Parse model text; raises :class:`ParseError` or
    :class:`SemanticError` with line/column positions."""
    return _Parser(_lex(text)).parse_model()


# -- pretty printing -------------------------------------------------------


def _pretty_lattice(d: LatticeDecl) -> str:
    if d.form == "chain":
        return f"lattice {d.name} = chain {d.chain_size}"
    if d.form == "product":
        a, b = d.factor_names
        return f"lattice {d.name} = product {a} {b}"
    lines = [f"lattice {d.name} = {d.form} {{"]
    lines.append("  elements: " + " ".join(d.elements))
    if d.form == "join":
        lines.append("  table: [" + " ".join(d.table) + "]")
    else:
        key = "leq" if d.form == "order" else "covers"
        lines.append(f"  {key}: " + " ".join(f"{a}<{b}" for a, b in d.pairs))
    lines.append("}")
    return "\n".join(lines)


def _pretty_network(d: NetworkDecl) -> str:
    net = d.network
    labels = net.lattice.labels
    lines = [f"network {d.name} over {d.lattice_name} {{"]
    lines.append("  states: " + " ".join(net.state_names))
    if net.input_names:
        lines.append("  inputs: " + " ".join(net.input_names))
    for name, e in zip(net.state_names, net.updates):
        body = expr_to_str(e, net.state_names, net.input_names, labels)
        lines.append(f"  {name}' = {body}")
    for name, e in zip(net.output_names, net.outputs):
        body = expr_to_str(e, net.state_names, net.input_names, labels)
        lines.append(f"  output {name} = {body}")
    lines.append("}")
    return "\n".join(lines)


def pretty(model: ModelFile) -> str:
    """Canonical text for a parsed model (stable under re-parsing)."""
    chunks = []
    for d in model.decls:
        if isinstance(d, LatticeDecl):
            chunks.append(_pretty_lattice(d))
        else:
            chunks.append(_pretty_network(d))
    return "\n\n".join(chunks) + "\n"
