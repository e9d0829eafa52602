"""Finite group machinery with 0-based element indices.

Groups are plain multiplication tables: element 0 is always the identity.
The subgroup lattice, conjugacy classes of subgroups and double cosets are
computed eagerly by brute force and cached; target orders are <= 24, so
nothing clever is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import DefinitionError


class FiniteGroup:
    """Finite group given by a full multiplication table.

    mul[a][b] is the index of a*b; index 0 is the identity.
    Immutable after construction; all derived data is cached.
    """

    def __init__(self, mul: Sequence[Sequence[int]], name: str = "G") -> None:
        n = len(mul)
        if n == 0:
            raise DefinitionError("group must be nonempty")
        table = [tuple(int(x) for x in row) for row in mul]
        for row in table:
            if len(row) != n or any(x < 0 or x >= n for x in row):
                raise DefinitionError("multiplication table is not square over 0..n-1")
        self.order = n
        self.mul_table = table
        self.name = name
        self.identity = 0
        self._validate()
        self.inv_table = tuple(self._find_inverse(a) for a in range(n))

    def _validate(self) -> None:
        n = self.order
        t = self.mul_table
        for a in range(n):
            if t[0][a] != a or t[a][0] != a:
                raise DefinitionError("element 0 is not a two-sided identity")
        for a in range(n):
            if 0 not in t[a]:
                raise DefinitionError(f"element {a} has no inverse")
        for a, b, c in product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise DefinitionError(f"associativity fails at ({a},{b},{c})")

    def _find_inverse(self, a: int) -> int:
        for b in range(self.order):
            if self.mul_table[a][b] == 0:
                return b
        raise DefinitionError(f"element {a} has no inverse")

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        return self.inv_table[a]

    def conj(self, g: int, a: int) -> int:
        """g a g^-1."""
        return self.mul(self.mul(g, a), self.inv(g))

    def elements(self) -> range:
        return range(self.order)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_permutations(gens: Sequence[Sequence[int]], name: str = "G") -> "FiniteGroup":
        """Group generated by permutations of {0..n-1}, as a table group.

        Elements are enumerated by BFS from the identity so that index 0 is
        the identity and the numbering is deterministic in the generators.
        """
        if not gens:
            raise DefinitionError("need at least one generator")
        npts = len(gens[0])
        perms = []
        for g in gens:
            p = tuple(int(x) for x in g)
            if len(p) != npts or sorted(p) != list(range(npts)):
                raise DefinitionError(f"not a permutation of 0..{npts - 1}: {g}")
            perms.append(p)
        ident = tuple(range(npts))
        seen = {ident: 0}
        order: List[Tuple[int, ...]] = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for p in frontier:
                for q in perms:
                    r = tuple(q[p[i]] for i in range(npts))
                    if r not in seen:
                        seen[r] = len(order)
                        order.append(r)
                        nxt.append(r)
            frontier = nxt
        n = len(order)
        mul = [[0] * n for _ in range(n)]
        for i, p in enumerate(order):
            for j, q in enumerate(order):
                r = tuple(p[q[k]] for k in range(npts))
                mul[i][j] = seen[r]
        return FiniteGroup(mul, name=name)

    @staticmethod
    def cyclic(n: int) -> "FiniteGroup":
        mul = [[(a + b) % n for b in range(n)] for a in range(n)]
        return FiniteGroup(mul, name=f"C{n}")

    @staticmethod
    def symmetric(n: int) -> "FiniteGroup":
        base = list(range(n))
        gens = []
        if n >= 2:
            t = base.copy()
            t[0], t[1] = t[1], t[0]
            gens.append(t)
        if n >= 3:
            gens.append([(i + 1) % n for i in range(n)])
        if not gens:
            gens = [base]
        return FiniteGroup.from_permutations(gens, name=f"S{n}")

    @staticmethod
    def dihedral(n: int) -> "FiniteGroup":
        """Dihedral group of order 2n acting on an n-gon."""
        rot = [(i + 1) % n for i in range(n)]
        flip = [(-i) % n for i in range(n)]
        return FiniteGroup.from_permutations([rot, flip], name=f"D{n}")

    @staticmethod
    def quaternion() -> "FiniteGroup":
        """Quaternion group Q8 as permutations of {1,i,j,k,...} by left mult."""
        # elements 1,-1,i,-i,j,-j,k,-k indexed 0..7
        def q_mul(a, b):
            names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            sign = lambda s: -1 if s.startswith("-") else 1
            unit = lambda s: s.lstrip("-")
            table = {
                ("1", "1"): "1", ("1", "i"): "i", ("1", "j"): "j", ("1", "k"): "k",
                ("i", "1"): "i", ("i", "i"): "-1", ("i", "j"): "k", ("i", "k"): "-j",
                ("j", "1"): "j", ("j", "i"): "-k", ("j", "j"): "-1", ("j", "k"): "i",
                ("k", "1"): "k", ("k", "i"): "j", ("k", "j"): "-i", ("k", "k"): "-1",
            }
            sa, sb = names[a], names[b]
            s = sign(sa) * sign(sb)
            r = table[(unit(sa), unit(sb))]
            s *= sign(r)
            r = unit(r)
            out = ("" if s == 1 else "-") + r
            return names.index(out)

        mul = [[q_mul(a, b) for b in range(8)] for a in range(8)]
        return FiniteGroup(mul, name="Q8")

    @staticmethod
    def direct_product(g1: "FiniteGroup", g2: "FiniteGroup", name: Optional[str] = None) -> "FiniteGroup":
        n1, n2 = g1.order, g2.order
        enc = lambda a, b: a * n2 + b
        mul = [[0] * (n1 * n2) for _ in range(n1 * n2)]
        for a1, b1 in product(range(n1), range(n2)):
            for a2, b2 in product(range(n1), range(n2)):
                mul[enc(a1, b1)][enc(a2, b2)] = enc(g1.mul(a1, a2), g2.mul(b1, b2))
        return FiniteGroup(mul, name=name or f"{g1.name}x{g2.name}")

    # -- cached lattice data -------------------------------------------

    @cached_property
    def _subgroups(self) -> Tuple["Subgroup", ...]:
        return tuple(_compute_subgroups(self))

    @cached_property
    def _subgroup_index(self) -> dict:
        return {s.elements: i for i, s in enumerate(self._subgroups)}

    def subgroup(self, elements: Iterable[int]) -> "Subgroup":
        """The subgroup with exactly these elements (must be closed)."""
        key = tuple(sorted(set(int(x) for x in elements)))
        idx = self._subgroup_index.get(key)
        if idx is None:
            raise DefinitionError(f"{key} is not a subgroup of {self.name}")
        return self._subgroups[idx]

    @cached_property
    def trivial_subgroup(self) -> "Subgroup":
        return self._subgroups[0]

    @cached_property
    def full_subgroup(self) -> "Subgroup":
        return self._subgroups[-1]

    @cached_property
    def subgroup_conjugacy_classes(self) -> Tuple[Tuple["Subgroup", ...], ...]:
        """Conjugacy classes of subgroups; each class sorted, classes sorted
        by their minimal member. The class representative is the minimum."""
        seen = set()
        classes = []
        for s in self._subgroups:
            if s.elements in seen:
                continue
            cls = sorted({s.conjugate(g).elements for g in self.elements()})
            seen.update(cls)
            classes.append(tuple(self.subgroup(e) for e in cls))
        return tuple(classes)

    def conjugacy_class_rep(self, s: "Subgroup") -> "Subgroup":
        for cls in self.subgroup_conjugacy_classes:
            if any(t.elements == s.elements for t in cls):
                return cls[0]
        raise DefinitionError("subgroup not of this group")


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a FiniteGroup, as a sorted tuple of element indices."""

    parent: FiniteGroup
    elements: Tuple[int, ...]

    def __post_init__(self):
        els = set(self.elements)
        if 0 not in els:
            raise DefinitionError("subgroup must contain the identity")
        for a in els:
            if self.parent.inv(a) not in els:
                raise DefinitionError("subgroup not closed under inverse")
            for b in els:
                if self.parent.mul(a, b) not in els:
                    raise DefinitionError("subgroup not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, a: int) -> bool:
        return a in self._element_set

    @cached_property
    def _element_set(self) -> frozenset:
        return frozenset(self.elements)

    def __repr__(self) -> str:
        return f"Subgroup{self.elements}"

    def conjugate(self, g: int) -> "Subgroup":
        """The subgroup g H g^-1."""
        G = self.parent
        return Subgroup(G, tuple(sorted(G.conj(g, a) for a in self.elements)))

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return self._element_set <= other._element_set

    def intersect(self, other: "Subgroup") -> "Subgroup":
        return Subgroup(self.parent, tuple(sorted(self._element_set & other._element_set)))

    def left_cosets(self) -> List[Tuple[int, ...]]:
        """Left cosets gH, each sorted, ordered by minimal element; the
        coset of the identity comes first."""
        G = self.parent
        seen = set()
        cosets = []
        for g in G.elements():
            if g in seen:
                continue
            coset = tuple(sorted(G.mul(g, h) for h in self.elements))
            seen.update(coset)
            cosets.append(coset)
        return sorted(cosets)

    @cached_property
    def as_group(self) -> Tuple[FiniteGroup, Tuple[int, ...]]:
        """This subgroup as a standalone group plus the embedding.

        Returns (K, embed) where embed[i] is the parent index of K's
        element i; embed[0] == 0.  The full subgroup yields the parent
        itself, so identities survive round trips through restriction.
        """
        embed = self.elements  # sorted, so identity 0 is first
        if self.order == self.parent.order:
            return self.parent, embed
        pos = {g: i for i, g in enumerate(embed)}
        mul = [[pos[self.parent.mul(a, b)] for b in embed] for a in embed]
        grp = FiniteGroup(mul, name=f"{self.parent.name}|{embed}")
        return grp, embed

    def subgroup_in_parent(self, sub_elements: Iterable[int]) -> "Subgroup":
        """Map a subgroup of as_group (by its own indices) into the parent."""
        _, embed = self.as_group
        return self.parent.subgroup(embed[i] for i in sub_elements)


@dataclass(frozen=True)
class UpwardClosedSet:
    """An upward closed set of subgroups under subconjugacy."""

    parent: FiniteGroup
    members: Tuple[Subgroup, ...]

    def __post_init__(self):
        have = {s.elements for s in self.members}
        for s in self.members:
            for g in self.parent.elements():
                if s.conjugate(g).elements not in have:
                    raise DefinitionError("set not closed under conjugation")
            for t in subgroups(self.parent):
                if is_subconjugate(self.parent, s, t) and t.elements not in have:
                    raise DefinitionError("set not upward closed")

    def __contains__(self, s: Subgroup) -> bool:
        return any(t.elements == s.elements for t in self.members)


def _closure(G: FiniteGroup, seed: Iterable[int]) -> Tuple[int, ...]:
    els = set(seed) | {0}
    frontier = list(els)
    while frontier:
        nxt = []
        for a in list(els):
            for b in frontier:
                for c in (G.mul(a, b), G.mul(b, a)):
                    if c not in els:
                        els.add(c)
                        nxt.append(c)
        for b in frontier:
            c = G.inv(b)
            if c not in els:
                els.add(c)
                nxt.append(c)
        frontier = nxt
    return tuple(sorted(els))


def _compute_subgroups(G: FiniteGroup) -> List[Subgroup]:
    found = {_closure(G, [])}
    frontier = list(found)
    while frontier:
        nxt = []
        for s in frontier:
            inside = set(s)
            for g in G.elements():
                if g in inside:
                    continue
                t = _closure(G, list(s) + [g])
                if t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    ordered = sorted(found, key=lambda e: (len(e), e))
    return [Subgroup(G, e) for e in ordered]


def subgroups(G: FiniteGroup) -> List[Subgroup]:
    """All subgroups of G, sorted by (order, element tuple)."""
    return list(G._subgroups)


def double_cosets(G: FiniteGroup, K: Subgroup, H: Subgroup) -> List[Tuple[int, Tuple[int, ...]]]:
    """The double cosets K\\G/H as (minimal representative, element tuple).

    The identity double coset is first; the rest follow by representative.
    """
    seen = set()
    out = []
    for g in G.elements():
        if g in seen:
            continue
        coset = set()
        for k in K.elements:
            kg = G.mul(k, g)
            for h in H.elements:
                coset.add(G.mul(kg, h))
        seen.update(coset)
        out.append((min(coset), tuple(sorted(coset))))
    out.sort()
    return out


def is_subconjugate(G: FiniteGroup, K: Subgroup, H: Subgroup) -> bool:
    """True iff some conjugate gKg^-1 is contained in H."""
    target = H._element_set
    return any(K.conjugate(g)._element_set <= target for g in G.elements())


def upward_closure(G: FiniteGroup, H: Subgroup) -> UpwardClosedSet:
    """All subgroups K with H subconjugate to K."""
    members = tuple(k for k in subgroups(G) if is_subconjugate(G, H, k))
    return UpwardClosedSet(G, members)


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    els = [g for g in G.elements() if H.conjugate(g).elements == H.elements]
    return G.subgroup(els)


def weyl_group(G: FiniteGroup, H: Subgroup) -> Tuple[FiniteGroup, Tuple[int, ...]]:
    """The Weyl group N_G(H)/H with a section.

    Returns (W, section) where section[i] is a representative in G of the
    coset that is W's element i; section[0] == 0 and the multiplication
    satisfies section[W.mul(i,j)] H == section[i] section[j] H.
    """
    N = normalizer(G, H)
    hset = H._element_set
    cosets = []
    seen = set()
    for g in N.elements:
        if g in seen:
            continue
        coset = tuple(sorted(G.mul(g, h) for h in H.elements))
        seen.update(coset)
        cosets.append(coset)
    cosets.sort()
    reps = [c[0] for c in cosets]
    coset_of = {}
    for i, c in enumerate(cosets):
        for g in c:
            coset_of[g] = i
    mul = [[coset_of[G.mul(a, b)] for b in reps] for a in reps]
    W = FiniteGroup(mul, name=f"W_{G.name}({len(hset)})")
    return W, tuple(reps)
