"""Backtracking homomorphism/isomorphism search over finite op-structures.

An OpStructure is a multi-sorted finite algebra: sorts with sizes, named
constants, unary and binary operation tables.  Rings, rings with group
action, and whole Tambara functors (levels as sorts, structure maps as
unary ops) all fit this shape, so one engine serves every search in the
toolkit.

The search picks a generating sequence for the source by closure from the
constants, then backtracks over images of the generators, replaying the
closure in the target and failing on the first inconsistency.  The node
budget bounds the number of candidate assignments tried; exceeding it
raises SearchTimeout, which callers must treat as distinct from "none".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import SearchTimeout

DEFAULT_BUDGET = 10 ** 6


@dataclass
class OpStructure:
    """A finite multi-sorted algebra with named operations."""

    sorts: Dict[object, int]
    constants: List[Tuple[object, object, int]] = field(default_factory=list)
    # (name, sort, index)
    unary: List[Tuple[object, object, object, Sequence[int]]] = field(default_factory=list)
    # (name, src_sort, dst_sort, table)
    binary: List[Tuple[object, object, Sequence[Sequence[int]]]] = field(default_factory=list)
    # (name, sort, table)  -- operations within one sort

    def signature(self):
        # ops must align positionally between the two structures, so the
        # signature is order-sensitive; build both sides with the same code.
        # sorts are compared by name only: sizes differ for non-isomorphisms
        return (
            sorted(self.sorts, key=repr),
            [(c[0], c[1]) for c in self.constants],
            [(u[0], u[1], u[2]) for u in self.unary],
            [(b[0], b[1]) for b in self.binary],
        )


@dataclass(frozen=True)
class _Step:
    kind: str                       # "const" | "gen" | "unary" | "binary"
    sort: object
    index: int                      # element index in the source
    op: object = None               # op position for unary/binary
    args: Tuple[int, ...] = ()      # positions of earlier steps


def _build_steps(A: OpStructure) -> Tuple[List[_Step], List[int]]:
    """Closure of the constants under all ops, extending with greedily chosen
    generators until every element of every sort is produced.

    Returns (steps, generator_positions)."""
    produced: Dict[Tuple[object, int], int] = {}
    steps: List[_Step] = []
    gens: List[int] = []

    def emit(step: _Step) -> None:
        key = (step.sort, step.index)
        if key not in produced:
            produced[key] = len(steps)
            steps.append(step)

    for name, sort, idx in A.constants:
        emit(_Step("const", sort, idx, op=name))

    def close() -> None:
        changed = True
        while changed:
            changed = False
            before = len(steps)
            for ui, (name, ssort, dsort, table) in enumerate(A.unary):
                for key, pos in list(produced.items()):
                    if key[0] != ssort:
                        continue
                    out = (dsort, table[key[1]])
                    if out not in produced:
                        emit(_Step("unary", dsort, out[1], op=ui, args=(pos,)))
            for bi, (name, sort, table) in enumerate(A.binary):
                items = [(k, p) for k, p in list(produced.items()) if k[0] == sort]
                for (k1, p1) in items:
                    for (k2, p2) in items:
                        out = (sort, table[k1[1]][k2[1]])
                        if out not in produced:
                            emit(_Step("binary", sort, out[1], op=bi, args=(p1, p2)))
            changed = len(steps) > before

    close()
    for sort in sorted(A.sorts, key=repr):
        while True:
            missing = [i for i in range(A.sorts[sort]) if (sort, i) not in produced]
            if not missing:
                break
            g = missing[0]
            gens.append(len(steps))
            emit(_Step("gen", sort, g))
            close()
    return steps, gens


def _replay(steps: List[_Step], A: OpStructure, B: OpStructure,
            gen_images: Dict[int, int], injective: bool) -> Optional[Dict[Tuple[object, int], int]]:
    """Replay the closure in B; return the partial map or None on conflict."""
    image: Dict[Tuple[object, int], int] = {}
    used: Dict[object, set] = {s: set() for s in A.sorts}

    def assign(sort, src, dst) -> bool:
        key = (sort, src)
        if key in image:
            return image[key] == dst
        if injective and dst in used[sort]:
            return False
        image[key] = dst
        used[sort].add(dst)
        return True

    bconst = {(name, sort): idx for name, sort, idx in B.constants}
    for pos, step in enumerate(steps):
        if step.kind == "const":
            dst = bconst[(step.op, step.sort)]
        elif step.kind == "gen":
            dst = gen_images[pos]
        elif step.kind == "unary":
            _, ssort, dsort, table = B.unary[step.op]
            src_step = steps[step.args[0]]
            dst = table[image[(src_step.sort, src_step.index)]]
        else:
            _, sort, table = B.binary[step.op]
            s1 = steps[step.args[0]]
            s2 = steps[step.args[1]]
            dst = table[image[(s1.sort, s1.index)]][image[(s2.sort, s2.index)]]
        if not assign(step.sort, step.index, dst):
            return None
    return image


class _Budget:
    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.limit:
            raise SearchTimeout(f"search exceeded {self.limit} nodes")


def search_homomorphisms(A: OpStructure, B: OpStructure, *, injective: bool,
                         budget: int = DEFAULT_BUDGET,
                         limit: Optional[int] = None) -> Iterator[Dict[object, List[int]]]:
    """Yield structure-preserving maps A -> B as {sort: image list}.

    With injective=True and equal sort sizes this searches isomorphisms.
    Raises SearchTimeout when the node budget is exhausted.
    """
    if A.signature() != B.signature():
        return
    if injective and any(A.sorts[s] > B.sorts[s] for s in A.sorts):
        return
    steps, gens = _build_steps(A)
    bud = _Budget(budget)
    found = [0]

    def rec(k: int, partial: Dict[int, int]) -> Iterator[Dict[object, List[int]]]:
        if limit is not None and found[0] >= limit:
            return
        if k == len(gens):
            image = _replay(steps, A, B, partial, injective)
            if image is not None and len(image) == sum(A.sorts.values()):
                out = {s: [0] * A.sorts[s] for s in A.sorts}
                for (sort, i), j in image.items():
                    out[sort][i] = j
                # the replay only pins the spanning derivations; verify the
                # map against every op table before accepting it
                if _is_full_hom(A, B, out):
                    found[0] += 1
                    yield out
            return
        pos = gens[k]
        sort = steps[pos].sort
        for cand in range(B.sorts[sort]):
            bud.spend()
            partial[pos] = cand
            # replay up to and including this generator's consequences:
            # full replay is cheap at our sizes and catches conflicts early
            if _replay(steps[: _cutoff(steps, gens, k)], A, B, partial, injective) is None:
                continue
            yield from rec(k + 1, partial)
            if limit is not None and found[0] >= limit:
                return
        partial.pop(pos, None)

    yield from rec(0, {})


def _cutoff(steps: List[_Step], gens: List[int], k: int) -> int:
    """Steps decidable once generators 0..k have images: up to next gen."""
    return gens[k + 1] if k + 1 < len(gens) else len(steps)


def _is_full_hom(A: OpStructure, B: OpStructure, out: Dict[object, List[int]]) -> bool:
    import numpy as np

    for (aun, bun) in zip(A.unary, B.unary):
        img_s = np.asarray(out[aun[1]])
        img_d = np.asarray(out[aun[2]])
        if not np.array_equal(img_d[np.asarray(aun[3])], np.asarray(bun[3])[img_s]):
            return False
    for (abin, bbin) in zip(A.binary, B.binary):
        img = np.asarray(out[abin[1]])
        at = np.asarray(abin[2])
        bt = np.asarray(bbin[2])
        if not np.array_equal(img[at], bt[img[:, None], img[None, :]]):
            return False
    return True


def find_isomorphism(A: OpStructure, B: OpStructure,
                     budget: int = DEFAULT_BUDGET) -> Optional[Dict[object, List[int]]]:
    if any(A.sorts.get(s) != B.sorts.get(s) for s in set(A.sorts) | set(B.sorts)):
        return None
    for image in search_homomorphisms(A, B, injective=True, budget=budget, limit=1):
        return image
    return None
