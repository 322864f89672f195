"""Command-line front end.

Subcommands: check-lattice, compile, controllability, observability,
factor, recover, simulate, render.  Reports are JSON on stdout (or -o FILE);
render emits DOT.  Exit codes: 0 success / property holds, 1 property
fails, 2 parse or semantic error, 3 dimension/data error (including the
state-space cap, configurable via LCN_MAX_COLUMNS).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, recovery
from .dsl import parse_model
from .errors import (DimensionError, LcnError, ParseError, SemanticError,
                     StateSpaceCapError)
from .lattice import hasse_dot, verify_join_structure
from .logical import LogicalMatrix
from .network import assemble, simulate, state_digits, state_index

DEFAULT_COLUMN_CAP = 10 ** 6


def _column_cap() -> int:
    raw = os.environ.get("LCN_MAX_COLUMNS", "")
    try:
        return int(raw) if raw else DEFAULT_COLUMN_CAP
    except ValueError:
        raise StateSpaceCapError(f"bad LCN_MAX_COLUMNS value {raw!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _load_model(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def _get_network(model, name: str):
    if name not in model.networks:
        raise DimensionError(f"model declares no network named {name!r}")
    return model.networks[name]


def _get_lattice(model, name: str):
    if name not in model.lattices:
        raise DimensionError(f"model declares no lattice named {name!r}")
    return model.lattices[name]


def _assemble_capped(net):
    cols = net.lattice.k ** (net.n + net.m)
    cap = _column_cap()
    if cols > cap:
        raise StateSpaceCapError(
            f"state space needs {cols} columns, above the cap of {cap}")
    return assemble(net)


def _state_labels(x: int, k: int, n: int, labels) -> list[str]:
    return [labels[d] for d in state_digits(x, k, n)]


def _parse_state(text: str, labels, n: int, what: str) -> int:
    parts = text.split(";")
    if len(parts) != n:
        raise DimensionError(
            f"{what} needs {n} semicolon-separated element labels")
    try:
        digits = [labels.index(p) for p in parts]
    except ValueError:
        bad = next(p for p in parts if p not in labels)
        raise DimensionError(f"unknown element label {bad!r} in {what}")
    return state_index(digits, len(labels))


# -- subcommand bodies -------------------------------------------------------


def _cmd_check_lattice(args) -> int:
    model = _load_model(args.model)
    name = args.lattice
    lat = _get_lattice(model, name)
    # declarations that parsed already passed; re-run to report the verdict
    verdict = verify_join_structure(lat.join)
    labels = lat.labels
    report = {
        "command": "check-lattice",
        "lattice": name,
        "ok": bool(verdict),
        "axiom": verdict.axiom,
        "witness": ([labels[i] for i in verdict.witness]
                    if verdict.witness is not None else None),
    }
    _emit_json(report, args.output)
    return 0 if verdict else 1


def _cmd_compile(args) -> int:
    model = _load_model(args.model)
    net = _get_network(model, args.network)
    assr = _assemble_capped(net)
    _emit_json({"command": "compile", "network": args.network,
                "assr": assr.to_json()}, args.output)
    return 0


def _cmd_controllability(args) -> int:
    model = _load_model(args.model)
    net = _get_network(model, args.network)
    assr = _assemble_capped(net)
    c = analysis.controllability_matrix(assr)
    ok, witness = analysis.is_controllable(c)
    labels = net.lattice.labels
    k, n = assr.k, assr.n
    report = {
        "command": "controllability",
        "network": args.network,
        "states": assr.n_states,
        "matrix": ["".join("1" if c[i, j] else "0"
                           for j in range(assr.n_states))
                   for i in range(assr.n_states)],
        "controllable": ok,
        "witness": None if ok else {
            "to": _state_labels(witness[0], k, n, labels),
            "from": _state_labels(witness[1], k, n, labels)},
        "query": None,
    }
    code = 0 if ok else 1
    if args.from_state or args.to_state:
        if not (args.from_state and args.to_state):
            raise DimensionError("--from and --to must be given together")
        src = _parse_state(args.from_state, list(labels), n, "--from")
        dst = _parse_state(args.to_state, list(labels), n, "--to")
        reachable = bool(c[dst, src])
        report["query"] = {"from": _state_labels(src, k, n, labels),
                           "to": _state_labels(dst, k, n, labels),
                           "reachable": reachable}
        code = 0 if reachable else 1
    _emit_json(report, args.output)
    return code


def _cmd_observability(args) -> int:
    model = _load_model(args.model)
    net = _get_network(model, args.network)
    assr = _assemble_capped(net)
    verdict = analysis.is_observable(assr, mode=args.mode)
    labels = net.lattice.labels
    k, n = assr.k, assr.n

    def pair_labels(p):
        return [_state_labels(p[0], k, n, labels),
                _state_labels(p[1], k, n, labels)]

    report = {
        "command": "observability",
        "network": args.network,
        "mode": args.mode,
        "observable": verdict.observable,
        "witness": pair_labels(verdict.witness) if verdict.witness else None,
        "distinguishable_pairs": [pair_labels(p)
                                  for p in sorted(verdict.pairs.pairs)],
        "indicator": "".join("1" if b else "0"
                             for b in verdict.pairs.indicator),
    }
    _emit_json(report, args.output)
    return 0 if verdict.observable else 1


def _cmd_factor(args) -> int:
    model = _load_model(args.model)
    net = _get_network(model, args.network)
    assr = _assemble_capped(net)
    f1, f2 = analysis.factor_network(assr)
    verdict = analysis.product_verdict((f1, f2), args.property,
                                       mode=args.mode)
    factors_json = []
    for f, holds, wit in zip((f1, f2), verdict.factor_holds,
                             verdict.factor_witnesses):
        entry = {"k": f.k, "labels": list(f.lattice.labels),
                 "assr": f.to_json(), "holds": bool(holds)}
        if args.property == "observability":
            entry["witness"] = (
                [_state_labels(wit[0], f.k, f.n, f.lattice.labels),
                 _state_labels(wit[1], f.k, f.n, f.lattice.labels)]
                if wit else None)
            pairs = sorted(verdict.factor_pairs[len(factors_json)].pairs)
            entry["distinguishable_pairs"] = [
                [_state_labels(a, f.k, f.n, f.lattice.labels),
                 _state_labels(b, f.k, f.n, f.lattice.labels)]
                for a, b in pairs]
        else:
            entry["witness"] = (
                {"to": _state_labels(wit[0], f.k, f.n, f.lattice.labels),
                 "from": _state_labels(wit[1], f.k, f.n, f.lattice.labels)}
                if wit else None)
        factors_json.append(entry)

    combination: dict = {}
    if args.property == "observability":
        direct = analysis.is_observable(assr, mode=args.mode)
        total = paper_agree = standard_agree = direct_count = 0
        for i in range(assr.n_states):
            for j in range(i + 1, assr.n_states):
                d = direct.pairs.holds(i, j)
                total += 1
                direct_count += d
                paper_agree += (verdict.paper_rule(i, j) == d)
                standard_agree += (verdict.standard_rule(i, j) == d)
        combination = {
            "total_pairs": total,
            "direct_distinguishable": direct_count,
            "direct_observable": direct.observable,
            "paper_rule_agreement": paper_agree,
            "standard_rule_agreement": standard_agree,
        }
    else:
        direct_ok, _ = analysis.is_controllable(
            analysis.controllability_matrix(assr))
        combination = {
            "direct_controllable": direct_ok,
            "matches_conjunction": direct_ok == verdict.holds,
        }

    _emit_json({
        "command": "factor",
        "network": args.network,
        "property": args.property,
        "mode": args.mode,
        "factors": factors_json,
        "product_holds": verdict.holds,
        "combination": combination,
    }, args.output)
    return 0 if verdict.holds else 1


def _recovery_report_json(report, source: str) -> dict:
    labels = report.labels

    def edge_labels(edges):
        return [[labels[a], labels[b]] for a, b in sorted(edges)]

    obj = {
        "command": "recover",
        "source": source,
        "k": report.k,
        "mode": report.mode,
        "labels": list(labels),
        "live_vars": [list(lv) for lv in report.live_vars],
        "component_graphs": [edge_labels(g.edges)
                             for g in report.component_graphs],
        "conjunction": edge_labels(report.graph.edges),
        "ok": report.ok,
        "stage": report.stage,
        "failure": report.failure,
        "sorting": report.sorting_string(),
        "orientation": (edge_labels_directed(report.orientation.edges, labels)
                        if report.orientation else None),
        "lattice": report.lattice.to_json() if report.lattice else None,
        "generated_by_basic_operators": report.generated_by_basic_operators,
    }
    if report.lattice is not None:
        obj["bottom"] = labels[report.lattice.bottom]
        obj["top"] = labels[report.lattice.top]
    return obj


def edge_labels_directed(edges, labels):
    return [[labels[a], labels[b]] for a, b in sorted(edges)]


def _cmd_recover(args) -> int:
    if args.matrix:
        if args.k is None:
            raise DimensionError("--matrix input needs --k")
        with open(args.matrix, encoding="utf-8") as fh:
            m = LogicalMatrix.from_json(json.load(fh))
        report = recovery.recover_lattice(m, k=args.k, mode=args.mode)
        source = args.matrix
    else:
        if not (args.model and args.network):
            raise DimensionError("recover needs a model and --network, "
                                 "or --matrix with --k")
        model = _load_model(args.model)
        net = _get_network(model, args.network)
        assr = _assemble_capped(net)
        report = recovery.recover_lattice(assr, mode=args.mode)
        source = args.network
    _emit_json(_recovery_report_json(report, source), args.output)
    return 0 if report.ok else 1


def _cmd_simulate(args) -> int:
    model = _load_model(args.model)
    net = _get_network(model, args.network)
    assr = _assemble_capped(net)
    labels = list(net.lattice.labels)
    k = assr.k
    x0 = _parse_state(args.x0, labels, assr.n, "--x0")
    raw_inputs = args.inputs or []
    if assr.m == 0 and raw_inputs:
        raise DimensionError("autonomous network takes no --inputs")
    inputs = [_parse_state(u, labels, assr.m, "--inputs")
              for u in raw_inputs]
    steps = args.steps
    if assr.m > 0 and steps is not None and steps != len(inputs):
        raise DimensionError("--steps disagrees with the number of inputs")
    traj = simulate(assr, x0, inputs=inputs,
                    steps=steps if assr.m == 0 else None)
    report = {
        "command": "simulate",
        "network": args.network,
        "x0": _state_labels(x0, k, assr.n, labels),
        "inputs": [_state_labels(u, k, assr.m, labels) for u in inputs],
        "trajectory": [_state_labels(x, k, assr.n, labels)
                       for x in traj.states],
        "outputs": ([_state_labels(y, k, assr.p, labels)
                     for y in traj.outputs]
                    if traj.outputs is not None else None),
    }
    _emit_json(report, args.output)
    return 0


def _cmd_render(args) -> int:
    model = _load_model(args.model)
    if args.what == "hasse":
        if not args.lattice:
            raise DimensionError("render hasse needs --lattice")
        lat = _get_lattice(model, args.lattice)
        _emit(hasse_dot(lat, name=args.lattice), args.output)
        return 0
    if not args.network:
        raise DimensionError(f"render {args.what} needs --network")
    net = _get_network(model, args.network)
    assr = _assemble_capped(net)
    if args.what == "comparability":
        report = recovery.recover_lattice(assr, mode=args.mode)
        _emit(recovery.comparability_dot(report.graph, report.labels,
                                         name=args.network), args.output)
        return 0
    # state transition graph; edges labelled by the stacked input
    labels = net.lattice.labels
    lines = [f"digraph {args.network} {{"]
    for x in range(assr.n_states):
        lbl = ",".join(_state_labels(x, assr.k, assr.n, labels))
        lines.append(f'  s{x} [label="{lbl}"];')
    for u in range(assr.n_inputs):
        for x in range(assr.n_states):
            y = assr.step(u, x)
            if assr.m > 0:
                ulbl = ",".join(_state_labels(u, assr.k, assr.m, labels))
                lines.append(f's{x} -> s{y} [label="{ulbl}"];')
            else:
                lines.append(f"  s{x} -> s{y};")
    lines.append("}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


# -- argument parsing --------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="lcn",
        description="Finite-lattice control networks: compile, analyze, "
                    "recover.")
    sub = top.add_subparsers(dest="cmd", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("-o", "--output", metavar="FILE",
                       help="write the report here instead of stdout")
        return p

    p = add("check-lattice", _cmd_check_lattice,
            help="verify the lattice axioms of a declared join table")
    p.add_argument("model")
    p.add_argument("--lattice", required=True)

    p = add("compile", _cmd_compile,
            help="compile a network to its algebraic state space form")
    p.add_argument("model")
    p.add_argument("--network", required=True)

    p = add("controllability", _cmd_controllability,
            help="reachability analysis of a control network")
    p.add_argument("model")
    p.add_argument("--network", required=True)
    p.add_argument("--from", dest="from_state", metavar="STATE",
                   help="semicolon-joined element labels, one per node")
    p.add_argument("--to", dest="to_state", metavar="STATE")

    p = add("observability", _cmd_observability,
            help="output distinguishability of initial states")
    p.add_argument("model")
    p.add_argument("--network", required=True)
    p.add_argument("--mode", choices=["paper", "standard"], default="paper")

    p = add("factor", _cmd_factor,
            help="decompose a product-lattice network and combine verdicts")
    p.add_argument("model")
    p.add_argument("--network", required=True)
    p.add_argument("--property", choices=["observability", "controllability"],
                   default="observability")
    p.add_argument("--mode", choices=["paper", "standard"], default="paper")

    p = add("recover", _cmd_recover,
            help="reverse-engineer a lattice from a transition matrix")
    p.add_argument("model", nargs="?")
    p.add_argument("--network")
    p.add_argument("--matrix", metavar="FILE",
                   help="structure-matrix JSON instead of a model network")
    p.add_argument("--k", type=int, help="carrier size for --matrix input")
    p.add_argument("--mode", choices=["monotone", "comparable"],
                   default="monotone")

    p = add("simulate", _cmd_simulate, help="run a trajectory")
    p.add_argument("model")
    p.add_argument("--network", required=True)
    p.add_argument("--x0", required=True,
                   help="semicolon-joined element labels, one per node")
    p.add_argument("--inputs", nargs="*", metavar="U",
                   help="stacked input per step (semicolon-joined labels)")
    p.add_argument("--steps", type=int)

    p = add("render", _cmd_render, help="emit DOT graphs")
    p.add_argument("model")
    p.add_argument("--what", choices=["hasse", "comparability", "transitions"],
                   required=True)
    p.add_argument("--lattice")
    p.add_argument("--network")
    p.add_argument("--mode", choices=["monotone", "comparable"],
                   default="monotone")

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, SemanticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except LcnError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
