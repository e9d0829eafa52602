"""Command-line interface.

Commands: check, decompose, lewis, coinduce, restrict, iso.  All state is
files; every emitted file re-ingests through the same loader.

Exit codes are stable contracts:
  0 pass / definite answer
  1 input or parse error
  2 axiom failure (cmd_check)
  3 unsupported structure (Green-only input where norms are required)
  4 presentation constraint (non-chain lattice without --chain)
  5 search timeout
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import serialize
from .errors import (
    DefinitionError,
    NoNorms,
    SearchTimeout,
    SizeLimitExceeded,
    TambaraError,
    UnsupportedGroup,
)
from .functors import CheckConfig, TambaraData, check_axioms, coinduce, functor_isomorphism, restrict
from .groups import subgroups, upward_closure
from .decompose import clarify, full_decomposition


@dataclass
class Config:
    fiber_bound: int = 2
    budget: int = 10 ** 6
    threads: int = 1

    @staticmethod
    def from_env_and_args(args) -> "Config":
        threads = 1
        env = os.environ.get("TAMBARA_THREADS")
        if env:
            try:
                threads = max(1, int(env))
            except ValueError:
                threads = 1
        fiber = getattr(args, "fiber_bound", None)
        budget = getattr(args, "budget", None)
        return Config(fiber_bound=2 if fiber is None else fiber,
                      budget=10 ** 6 if budget is None else budget,
                      threads=threads)


@dataclass
class Workspace:
    """Per-invocation registry of loaded objects and their check status."""

    config: Config
    functors: Dict[str, TambaraData] = field(default_factory=dict)
    checked: Dict[str, bool] = field(default_factory=dict)

    def load(self, path: str) -> TambaraData:
        if path not in self.functors:
            self.functors[path] = serialize.load_functor(path)
            self.checked[path] = False
        return self.functors[path]

    def mark_checked(self, path: str) -> None:
        self.checked[path] = True


def _default_out(path: str, suffix: str) -> str:
    base, ext = os.path.splitext(path)
    return f"{base}.{suffix}{ext or '.json'}"


def cmd_check(ws: Workspace, args) -> int:
    try:
        T = ws.load(args.path)
    except (DefinitionError, OSError, TambaraError) as exc:
        print(f"error: {exc}")
        return 1
    report = check_axioms(T, CheckConfig(fiber_bound=ws.config.fiber_bound))
    print(report.summary())
    if report.passed:
        ws.mark_checked(args.path)
        return 0
    return 2


def cmd_decompose(ws: Workspace, args) -> int:
    try:
        T = ws.load(args.path)
    except (DefinitionError, OSError, TambaraError) as exc:
        print(f"error: {exc}")
        return 1
    G = T.group
    try:
        if args.lam and args.lam != "all":
            H = serialize.resolve_subgroup(G, args.lam)
            lam = upward_closure(G, H)
            C, proj = clarify(T, lam)
            sizes = [C.levels[K].size for K in subgroups(G)]
            print(f"clarification at Lambda_{args.lam}: level sizes {sizes}")
            doc = serialize.functor_to_json(C)
            doc["witness"] = {serialize.subgroup_id(G, K): proj.maps[K].tolist()
                              for K in subgroups(G)}
            out = args.out or _default_out(args.path, f"clarified.{args.lam}")
            _write(doc, out)
            print(f"wrote {out}")
            return 0
        dec = full_decomposition(T)
        for H, ell in dec.factors:
            sizes = [ell.levels[K].size for K in subgroups(ell.group)]
            print(f"factor: H={serialize.subgroup_id(G, H)} "
                  f"(order {H.order}), level sizes {sizes}")
        doc = serialize.functor_to_json(dec.reassembled)
        doc["witness"] = {serialize.subgroup_id(G, K): dec.witness.maps[K].tolist()
                          for K in subgroups(G)}
        doc["factors"] = [serialize.subgroup_id(G, H) for H, _ in dec.factors]
        out = args.out or _default_out(args.path, "decomposed")
        _write(doc, out)
        print(f"wrote {out}")
        return 0
    except NoNorms:
        print("error: input is a Green functor; the product decomposition "
              "fails for Green functors (see the two-level counterexample)")
        return 3
    except SearchTimeout as exc:
        print(f"timeout: {exc}")
        return 5
    except TambaraError as exc:
        print(f"error: {exc}")
        return 1


def _chain_of(T: TambaraData) -> Optional[List]:
    subs = subgroups(T.group)
    chain = sorted(subs, key=lambda s: s.order)
    for a, b in zip(chain, chain[1:]):
        if not a.is_subgroup_of(b):
            return None
    return chain


def cmd_lewis(ws: Workspace, args) -> int:
    try:
        T = ws.load(args.path)
    except (DefinitionError, OSError, TambaraError) as exc:
        print(f"error: {exc}")
        return 1
    G = T.group
    if args.chain:
        try:
            chain = [serialize.resolve_subgroup(G, s) for s in args.chain.split(",")]
        except DefinitionError as exc:
            print(f"error: {exc}")
            return 1
        for a, b in zip(chain, chain[1:]):
            if not a.is_subgroup_of(b):
                print("error: --chain is not increasing")
                return 1
    else:
        chain = _chain_of(T)
        if chain is None:
            print("error: subgroup lattice is not a chain; pass --chain=H0,H1,...")
            return 4

    def fmt_table(t) -> str:
        vals = list(map(int, t))
        if len(vals) <= 16:
            return str(vals)
        return str(vals[:8])[:-1] + ", ...]"

    for i in range(len(chain) - 1, -1, -1):
        H = chain[i]
        ring = T.levels[H]
        print(f"level {serialize.subgroup_id(G, H)} (order {H.order}): "
              f"{ring.label}, {ring.size} elements")
        if i > 0:
            K = chain[i - 1]
            print(f"  res -> {serialize.subgroup_id(G, K)}: {fmt_table(T.res[(K, H)])}")
            print(f"  tr <- {serialize.subgroup_id(G, K)}: {fmt_table(T.tr[(K, H)])}")
            if T.has_norms:
                print(f"  nm <- {serialize.subgroup_id(G, K)}: {fmt_table(T.nm[(K, H)])}")
    e = G.trivial_subgroup
    weyl = [int(x) for x in T.conj[(1, e)]] if G.order > 1 else []
    if weyl:
        print(f"bottom Weyl action of g1: {weyl if len(weyl) <= 16 else weyl[:8] + ['...']}")
    return 0


def cmd_coinduce(ws: Workspace, args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("schema") != serialize.SCHEMA_VERSION:
            raise DefinitionError(f"unsupported schema {doc.get('schema')!r}")
        G = serialize.parse_group(doc["group"])
        H = serialize.resolve_subgroup(G, args.from_id)
        Hg, _ = H.as_group
        inner = serialize.parse_functor_body(doc, Hg, label=doc.get("label", "T"))
        T = coinduce(G, H, inner)
    except (DefinitionError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}")
        return 1
    except SizeLimitExceeded as exc:
        print(f"error: {exc}")
        return 1
    out = args.out or _default_out(args.path, f"coind.{args.from_id}")
    serialize.dump_functor(T, out)
    print(f"wrote {out}")
    return 0


def cmd_restrict(ws: Workspace, args) -> int:
    try:
        T = ws.load(args.path)
        K = serialize.resolve_subgroup(T.group, args.to_id)
    except (DefinitionError, OSError, TambaraError) as exc:
        print(f"error: {exc}")
        return 1
    R = restrict(K, T)
    out = args.out or _default_out(args.path, f"res.{args.to_id}")
    serialize.dump_functor(R, out)
    print(f"wrote {out}")
    return 0


def _rehome(T: TambaraData, target: TambaraData) -> TambaraData:
    """Re-key T over target's group object (tables must agree)."""
    G = target.group
    if T.group.mul_table != G.mul_table:
        raise DefinitionError("functors live over different groups")
    lift = {H: G.subgroup(H.elements) for H in subgroups(T.group)}
    levels = {lift[H]: T.levels[H] for H in subgroups(T.group)}
    res = {(lift[K], lift[H]): v for (K, H), v in T.res.items()}
    tr = {(lift[K], lift[H]): v for (K, H), v in T.tr.items()}
    nm = None if T.nm is None else {(lift[K], lift[H]): v for (K, H), v in T.nm.items()}
    conj = {(g, lift[H]): v for (g, H), v in T.conj.items()}
    return TambaraData(G, levels, res, tr, nm, conj, has_norms=T.has_norms,
                       label=T.label)


def cmd_iso(ws: Workspace, args) -> int:
    try:
        T1 = ws.load(args.path1)
        T2 = ws.load(args.path2)
        T2 = _rehome(T2, T1)
    except (DefinitionError, OSError, TambaraError) as exc:
        print(f"error: {exc}")
        return 1
    if T1.has_norms != T2.has_norms:
        print("not isomorphic (norm flags differ)")
        return 0
    try:
        iso = functor_isomorphism(T1, T2, budget=ws.config.budget)
    except SearchTimeout:
        print("timeout")
        return 5
    if iso is None:
        print("not isomorphic")
        return 0
    G = T1.group
    print("isomorphic; witness:")
    for H in subgroups(G):
        print(f"  {serialize.subgroup_id(G, H)}: {iso.maps[H].tolist()}")
    return 0


def _write(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tambara",
        description="Equivariant algebra toolkit: check, decompose, and "
                    "transform Mackey/Green/Tambara functor definition files.")
    ap.add_argument("--fiber-bound", type=int, default=2,
                    help="fiber size bound for exponential-diagram checks")
    ap.add_argument("--budget", type=int, default=10 ** 6,
                    help="node budget for isomorphism search")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify all structure axioms")
    p.add_argument("path")

    p = sub.add_parser("decompose",
                       help="product decomposition into coinductions of "
                            "clarified factors, or --lambda clarification")
    p.add_argument("path")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="subgroup id; compute the Lambda_H clarification")
    p.add_argument("--out", default=None)

    p = sub.add_parser("lewis", help="print the Lewis diagram of a chain-lattice functor")
    p.add_argument("path")
    p.add_argument("--chain", default=None, help="comma-separated subgroup ids")

    p = sub.add_parser("coinduce", help="coinduce the functor body along --from")
    p.add_argument("path")
    p.add_argument("--from", dest="from_id", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("restrict", help="restrict the functor to --to")
    p.add_argument("path")
    p.add_argument("--to", dest="to_id", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("iso", help="search for an isomorphism between two files")
    p.add_argument("path1")
    p.add_argument("path2")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    ws = Workspace(Config.from_env_and_args(args))
    handlers = {
        "check": cmd_check,
        "decompose": cmd_decompose,
        "lewis": cmd_lewis,
        "coinduce": cmd_coinduce,
        "restrict": cmd_restrict,
        "iso": cmd_iso,
    }
    return handlers[args.command](ws, args)


if __name__ == "__main__":
    sys.exit(main())
