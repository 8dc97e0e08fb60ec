"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 size cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .errors import (
    ConsistencyError,
    GroupConstructionError,
    HnnValidationError,
    InstanceParseError,
    SizeError,
)
from .hnn import britton_reduce, format_word, normal_form, parse_word
from .instance import load_instance

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3

ORDER_KEYS = ("Z", "CK", "NK", "L", "J", "ZK", "AK", "AK_mod_inn", "outV", "out0", "outH")


def report_document(hnn, report, oracle=None) -> dict:
    doc = {
        "orders": {k: report.orders()[k] for k in ORDER_KEYS},
        "index2": report.index2,
        "thmA": report.thmA.as_dict(),
        "thmC": {"applicable": report.thmC_applicable},
        "witnesses": report.witnesses(),
        "notes": list(report.notes),
    }
    if oracle is not None:
        g0 = oracle.alpha_group()
        g = oracle.full_group()
        doc["outer_table"] = {
            "out0_census": g0.order_census() if g0 is not None else None,
            "outH_census": g.order_census() if g is not None else None,
        }
    return doc


def render_report(doc: dict, source: str = "") -> str:
    o = doc["orders"]
    lines = [f"instance: {source}"] if source else []
    lines.append("orders")
    labels = {
        "Z": "|Z(H)|",
        "CK": "|C_H(K)|",
        "NK": "|N_H(K)|",
        "L": "|L|",
        "J": "|J|",
        "ZK": "|Z(H)K|",
        "AK": "|A_K|",
        "AK_mod_inn": "|A_K Inn(H)/Inn(H)|",
        "outV": "|Out_H^(V)(G)|",
        "out0": "|Out_H^0(G)|",
        "outH": "|Out_H(G)|",
    }
    for k in ORDER_KEYS:
        lines.append(f"  {k:<11} = {o[k]:<8} {labels[k]}")
    beta = doc["witnesses"]["beta"]
    lines.append(f"index2      = {str(doc['index2']).lower()}")
    if beta is not None:
        lines.append(f"  beta witness: zeta = {beta['zeta']}, b = h{beta['b']}")
    a = doc["thmA"]
    lines.append("Out_H(G) = Out(G): " + str(a["equality"]).lower())
    lines.append(f"  FA {a['FA']}; condition 1 {a['condition1']}; condition 3 {a['condition3']}")
    w = a["condition2_witness"]
    lines.append(f"  phi(K) conjugate to K: {a['condition2']}" + (f" (a = h{w})" if w is not None else ""))
    for j in a["justification"]:
        lines.append(f"  - {j}")
    lines.append(f"split criterion Z(H) <= Fix(phi): {str(doc['thmC']['applicable']).lower()}")
    if "outer_table" in doc:
        t = doc["outer_table"]
        lines.append("outer table (oracle refinement, not part of the extension data)")
        lines.append(f"  Out_H^0 element orders: {t['out0_census']}")
        lines.append(f"  Out_H element orders:   {t['outH_census']}")
    return "\n".join(lines) + "\n"


def parse_human_orders(text: str) -> dict[str, int]:
    """Read the integer order lines back out of a rendered report."""
    out = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) >= 3 and parts[0] in ORDER_KEYS and parts[1] == "=":
            out[parts[0]] = int(parts[2])
    return out


def _load(path, cfg):
    return load_instance(path, cfg)


def cmd_analyze(args, cfg) -> int:
    from .engine import out_orders
    from .oracle import outer_classes

    hnn = _load(args.file, cfg)
    report = out_orders(hnn, cfg)
    oracle = None
    try:
        oracle = outer_classes(hnn, cfg)
    except SizeError:
        pass
    doc = report_document(hnn, report, oracle)
    text = json.dumps(doc, indent=2) + "\n" if args.json else render_report(doc, args.file)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reduce(args, cfg) -> int:
    hnn = _load(args.file, cfg)
    w = parse_word(hnn, args.word)
    print(f"reduced:     {format_word(britton_reduce(hnn, w))}")
    print(f"normal form: {format_word(normal_form(hnn, w))}")
    return EXIT_OK


def _fault(report):
    from dataclasses import replace

    return replace(report, outV_order=report.outV_order + 1)


def cmd_verify(args, cfg) -> int:
    from .corpus import verify_instance

    hnn = _load(args.file, cfg)
    _, _, ledger = verify_instance(hnn, cfg, corrupt=_fault if args.inject_fault else None)
    print("\n".join(ledger.lines()))
    if ledger.passed:
        print("all checks passed")
        return EXIT_OK
    print("failed: " + ", ".join(r.node for r in ledger.failures()))
    return EXIT_VERIFY


def cmd_corpus(args, cfg) -> int:
    from .corpus import corpus_instances, run_corpus

    if args.list:
        n = 0
        for inst in corpus_instances(args.max_order, cfg):
            print(inst.name)
            n += 1
        print(f"{n} instances")
        return EXIT_OK

    def progress(inst, ledger):
        if args.verbose:
            print(f"{'ok  ' if ledger.passed else 'FAIL'} {inst.name}")

    summary = run_corpus(args.max_order, cfg, progress=progress)
    print("\n".join(summary.lines()))
    return EXIT_OK if summary.passed == summary.instances else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="outerlab", description="Outer automorphisms of HNN-extensions over finite groups.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="report the orders and verdicts for an instance")
    a.add_argument("file")
    a.add_argument("--json", action="store_true", help="emit a JSON document")
    a.add_argument("--out", help="write to this path instead of stdout")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reduce", help="Britton-reduce a word and print its normal form")
    r.add_argument("file")
    r.add_argument("word", help='tokens h<index>, t, T, e.g. "h4 t h1 T"')
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="cross-check the formulas against brute-force outer classes")
    v.add_argument("file")
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("corpus", help="run the built-in instance sweep")
    c.add_argument("--max-order", type=int, default=None)
    c.add_argument("--list", action="store_true", help="list instances without computing")
    c.add_argument("-v", "--verbose", action="store_true")
    c.set_defaults(func=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config()
    try:
        return args.func(args, cfg)
    except SizeError as exc:
        print(f"error: size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InstanceParseError, HnnValidationError, GroupConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
