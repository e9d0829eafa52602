"""JSON definition files (schema 1).

One file defines a group and a functor over it, either with explicit level
tables or through a constructor shorthand ("fp", "burnside", "coind").
All tables are integer indices; output is deterministic (sorted keys), so
re-serializing an unchanged object is byte-stable.

Subgroup ids are "H<i>" in the canonical subgroup order; the friendly
aliases "e", "G", and "C<n>" (when unique) are accepted on input.
"""

from __future__ import annotations

import json

from .errors import DefinitionError
from .groups import FiniteGroup, Subgroup, subgroups
from .gsets import GSet, GSetMap
from .rings import FiniteRing, GRing, fq, product_ring, zero_ring, zn
from .functors import TambaraData
from ._burnside import burnside_mod

SCHEMA_VERSION = 1
VALIDATE_FULL_MAX = 300


# -- groups ---------------------------------------------------------------


def parse_group(block: dict) -> FiniteGroup:
    if not isinstance(block, dict):
        raise DefinitionError("group block must be an object")
    name = block.get("name", "G")
    if "table" in block:
        return FiniteGroup(block["table"], name=name)
    if "permutations" in block:
        return FiniteGroup.from_permutations(block["permutations"], name=name)
    raise DefinitionError("group block needs 'table' or 'permutations'")


def group_to_json(G: FiniteGroup) -> dict:
    return {"name": G.name, "table": [list(row) for row in G.mul_table]}


def subgroup_id(G: FiniteGroup, H: Subgroup) -> str:
    return f"H{subgroups(G).index(G.subgroup(H.elements))}"


def resolve_subgroup(G: FiniteGroup, ident: str) -> Subgroup:
    """Accepts H<i>, 'e', 'G', or C<n> when there is a unique cyclic
    subgroup of order n."""
    subs = subgroups(G)
    ident = ident.strip()
    if ident == "e":
        return G.trivial_subgroup
    if ident == "G":
        return G.full_subgroup
    if ident.startswith("H"):
        try:
            idx = int(ident[1:])
        except ValueError:
            raise DefinitionError(f"bad subgroup id {ident!r}")
        if not 0 <= idx < len(subs):
            raise DefinitionError(f"subgroup index out of range: {ident}")
        return subs[idx]
    if ident.startswith("C"):
        try:
            order = int(ident[1:])
        except ValueError:
            raise DefinitionError(f"bad subgroup id {ident!r}")
        cyclic = [s for s in subs if s.order == order and _is_cyclic(G, s)]
        if len(cyclic) == 1:
            return cyclic[0]
        raise DefinitionError(
            f"{ident} is ambiguous or absent; use one of "
            + ", ".join(f"H{i}" for i in range(len(subs))))
    raise DefinitionError(f"unknown subgroup id {ident!r}")


def _is_cyclic(G: FiniteGroup, H: Subgroup) -> bool:
    for g in H.elements:
        x, n = g, 1
        while x != 0:
            x = G.mul(x, g)
            n += 1
        if n == H.order:
            return True
    return False


# -- rings ----------------------------------------------------------------


def parse_ring(block: dict) -> FiniteRing:
    if not isinstance(block, dict) or "kind" not in block:
        raise DefinitionError("ring block needs a 'kind'")
    kind = block["kind"]
    if kind == "zero":
        return zero_ring()
    if kind == "Zn":
        return zn(int(block["n"]))
    if kind == "Fq":
        return fq(int(block["q"]))
    if kind == "product":
        return product_ring([parse_ring(b) for b in block["factors"]])
    if kind == "tables":
        R = FiniteRing(block["add"], block["mul"], int(block["zero"]),
                       int(block["one"]), label=block.get("label", "R"))
        if R.size <= VALIDATE_FULL_MAX:
            R.validate()
        return R
    raise DefinitionError(f"unknown ring kind {kind!r}")


def ring_to_json(R: FiniteRing) -> dict:
    return {
        "kind": "tables",
        "label": R.label,
        "zero": int(R.zero),
        "one": int(R.one),
        "add": R.add.tolist(),
        "mul": R.mul.tolist(),
    }


def parse_gring(block: dict, G: FiniteGroup) -> GRing:
    ring = parse_ring(block.get("ring", block))
    action = block.get("action")
    if action is None:
        raise DefinitionError("gring block needs an 'action' table")
    return GRing(ring, G, action)


def gring_to_json(R: GRing) -> dict:
    return {"ring": ring_to_json(R.ring), "action": R.action.tolist()}


# -- G-sets (external interface for completeness) --------------------------


def parse_gset(block: dict, G: FiniteGroup) -> GSet:
    X = GSet(G, block["action"])
    if "points" in block and int(block["points"]) != X.size:
        raise DefinitionError("gset 'points' does not match the action table")
    return X


def parse_gset_map(block: dict, X: GSet, Y: GSet) -> GSetMap:
    return GSetMap(X, Y, tuple(int(i) for i in block["images"]))


# -- functors ---------------------------------------------------------------


def _edge_key(G: FiniteGroup, K: Subgroup, H: Subgroup) -> str:
    return f"{subgroup_id(G, K)}<{subgroup_id(G, H)}"


def _conj_key(G: FiniteGroup, g: int, H: Subgroup) -> str:
    return f"g{g}|{subgroup_id(G, H)}"


def functor_to_json(T: TambaraData) -> dict:
    G = T.group
    out = {
        "schema": SCHEMA_VERSION,
        "group": group_to_json(G),
        "functor": {
            "green_only": not T.has_norms,
            "levels": {subgroup_id(G, H): ring_to_json(T.levels[H])
                       for H in subgroups(G)},
            "res": {_edge_key(G, K, H): T.res[(K, H)].tolist()
                    for (K, H) in T.sub_pairs()},
            "tr": {_edge_key(G, K, H): T.tr[(K, H)].tolist()
                   for (K, H) in T.sub_pairs()},
            "conj": {_conj_key(G, g, H): T.conj[(g, H)].tolist()
                     for g in G.elements() for H in subgroups(G)},
        },
        "label": T.label,
    }
    if T.has_norms:
        out["functor"]["nm"] = {_edge_key(G, K, H): T.nm[(K, H)].tolist()
                                for (K, H) in T.sub_pairs()}
    return out


def parse_functor_body(body: dict, G: FiniteGroup, label: str = "T") -> TambaraData:
    """Interpret a functor definition body over the group G.

    Explicit tables are accepted nested under "functor" (the emitted form)
    or flat at the top level of the body.
    """
    present = [k for k in ("functor", "levels", "fp", "burnside", "coind") if k in body]
    if len(present) > 1:
        raise DefinitionError(f"ambiguous definition: found {present}")
    if "functor" in body:
        return _parse_explicit(body["functor"], G, body.get("label", label))
    if "levels" in body:
        return _parse_explicit(body, G, body.get("label", label))
    if "fp" in body:
        from .functors import fixed_point_functor

        return fixed_point_functor(parse_gring(body["fp"], G),
                                   label=body.get("label", label))
    if "burnside" in body:
        return burnside_mod(G, int(body["burnside"]["mod"]))
    if "coind" in body:
        from .functors import coinduce

        block = body["coind"]
        H = resolve_subgroup(G, block["from"])
        Hg, _ = H.as_group
        inner = parse_functor_body(block["functor"], Hg, label=f"{label}|inner")
        return coinduce(G, H, inner, label=body.get("label", label))
    raise DefinitionError(
        "definition needs one of 'functor', 'fp', 'burnside', 'coind'")


def _parse_explicit(block: dict, G: FiniteGroup, label: str) -> TambaraData:
    subs = subgroups(G)
    green_only = bool(block.get("green_only", False))
    levels = {}
    for H in subs:
        key = subgroup_id(G, H)
        if key not in block.get("levels", {}):
            raise DefinitionError(f"missing level {key}")
        levels[H] = parse_ring(block["levels"][key])
    res, tr, conj = {}, {}, {}
    nm = None if green_only else {}
    pairs = [(K, H) for H in subs for K in subs if K.is_subgroup_of(H)]
    for (K, H) in pairs:
        key = _edge_key(G, K, H)
        for name, store in (("res", res), ("tr", tr)) + (() if green_only else (("nm", nm),)):
            table = block.get(name, {}).get(key)
            if table is None:
                raise DefinitionError(f"missing {name} table {key}")
            store[(K, H)] = table
    for g in G.elements():
        for H in subs:
            key = _conj_key(G, g, H)
            table = block.get("conj", {}).get(key)
            if table is None:
                raise DefinitionError(f"missing conj table {key}")
            conj[(g, H)] = table
    return TambaraData(G, levels, res, tr, nm, conj,
                       has_norms=not green_only, label=label)


def load_functor(path: str) -> TambaraData:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DefinitionError(f"invalid JSON: {exc}")
    if not isinstance(doc, dict):
        raise DefinitionError("definition file must hold a JSON object")
    if doc.get("schema") != SCHEMA_VERSION:
        raise DefinitionError(f"unsupported schema {doc.get('schema')!r}")
    if "group" not in doc:
        raise DefinitionError("definition file needs a 'group'")
    G = parse_group(doc["group"])
    return parse_functor_body(doc, G, label=doc.get("label", "T"))


def dump_functor(T: TambaraData, path: str) -> None:
    doc = functor_to_json(T)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def dumps_functor(T: TambaraData) -> str:
    return json.dumps(functor_to_json(T), sort_keys=True, separators=(",", ":")) + "\n"
