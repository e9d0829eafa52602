"""Finite G-sets and equivariant maps.

A G-set is an action table over a FiniteGroup; points are 0-based indices.
This module supplies orbit decomposition, pullbacks, the dependent product
along a map (sections over fibers), and the five-object exponential diagram
built from it.  Everything is constructed literally from the definitions and
validated on construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import DefinitionError, SizeLimitExceeded
from .groups import FiniteGroup, Subgroup

SECTION_CAP = 4096


class GSet:
    """A finite G-set: action[g][x] is the point g.x."""

    def __init__(self, group: FiniteGroup, action: Sequence[Sequence[int]],
                 labels: Optional[Sequence[object]] = None) -> None:
        self.group = group
        self.action = tuple(tuple(int(x) for x in row) for row in action)
        if len(self.action) != group.order:
            raise DefinitionError("need one action row per group element")
        self.size = len(self.action[0]) if self.action else 0
        self.labels = list(labels) if labels is not None else None
        self._validate()

    def _validate(self) -> None:
        n = self.size
        for row in self.action:
            if len(row) != n:
                raise DefinitionError("ragged action table")
            if sorted(row) != list(range(n)):
                raise DefinitionError("group element does not act bijectively")
        if self.action and self.action[0] != tuple(range(n)):
            raise DefinitionError("identity must act trivially")
        G = self.group
        for g in G.elements():
            for h in G.elements():
                gh = G.mul(g, h)
                for x in range(n):
                    if self.action[gh][x] != self.action[g][self.action[h][x]]:
                        raise DefinitionError(
                            f"action not a homomorphism at g={g}, h={h}, x={x}")

    def act(self, g: int, x: int) -> int:
        return self.action[g][x]

    def stabilizer(self, x: int) -> Subgroup:
        els = [g for g in self.group.elements() if self.action[g][x] == x]
        return self.group.subgroup(els)

    def __repr__(self) -> str:
        return f"GSet({self.group.name}, {self.size} points)"


@dataclass(frozen=True)
class GSetMap:
    """An equivariant map, stored as images[x] in the target."""

    source: GSet
    target: GSet
    images: Tuple[int, ...]

    def __post_init__(self):
        if self.source.group is not self.target.group:
            raise DefinitionError("source and target live over different groups")
        if len(self.images) != self.source.size:
            raise DefinitionError("image table has wrong length")
        for g in self.source.group.elements():
            for x in range(self.source.size):
                if self.images[self.source.act(g, x)] != self.target.act(g, self.images[x]):
                    raise DefinitionError(f"map not equivariant at g={g}, x={x}")

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "GSetMap") -> "GSetMap":
        """self after other."""
        if other.target is not self.source and other.target.action != self.source.action:
            raise DefinitionError("composition mismatch")
        return GSetMap(other.source, self.target,
                       tuple(self.images[y] for y in other.images))


def identity_map(X: GSet) -> GSetMap:
    return GSetMap(X, X, tuple(range(X.size)))


def trivial_gset(G: FiniteGroup, n: int) -> GSet:
    return GSet(G, [list(range(n)) for _ in G.elements()])


def coset_gset(G: FiniteGroup, H: Subgroup) -> GSet:
    """The transitive G-set G/H; point 0 is the identity coset."""
    cosets = H.left_cosets()
    index = {}
    for i, c in enumerate(cosets):
        for g in c:
            index[g] = i
    action = [[index[G.mul(g, c[0])] for c in cosets] for g in G.elements()]
    return GSet(G, action, labels=cosets)


def disjoint_union(parts: Sequence[GSet]) -> Tuple[GSet, List[Tuple[int, int]]]:
    """Union of G-sets; returns (X, offsets) with offsets[i] = (start, size)."""
    if not parts:
        raise DefinitionError("need at least one part")
    G = parts[0].group
    offsets = []
    start = 0
    for p in parts:
        if p.group is not G:
            raise DefinitionError("parts live over different groups")
        offsets.append((start, p.size))
        start += p.size
    action = []
    for g in G.elements():
        row = []
        for (off, _), p in zip(offsets, parts):
            row.extend(off + y for y in p.action[g])
        action.append(row)
    return GSet(G, action), offsets


@dataclass(frozen=True)
class Orbit:
    """One orbit: sorted points, base point (minimal), its stabilizer, and a
    transversal mapping each point to a group element carrying base there."""

    points: Tuple[int, ...]
    base: int
    stabilizer: Subgroup
    transversal: Tuple[Tuple[int, int], ...]  # (point, g) with g.base == point

    def rep_for(self, x: int) -> int:
        for p, g in self.transversal:
            if p == x:
                return g
        raise KeyError(x)


def orbit_decomposition(X: GSet) -> List[Orbit]:
    """Orbits in increasing order of their minimal point.

    Each orbit carries the stabilizer of its minimal point and an explicit
    transversal; together these give the equivariant bijection with the
    coset G-set of the stabilizer (point g.base <-> coset g.Stab).
    """
    G = X.group
    seen = set()
    orbits = []
    for x in range(X.size):
        if x in seen:
            continue
        trans: Dict[int, int] = {}
        for g in G.elements():  # increasing g: keeps minimal representative
            y = X.act(g, x)
            if y not in trans:
                trans[y] = g
        pts = tuple(sorted(trans))
        seen.update(pts)
        orbits.append(Orbit(points=pts, base=x, stabilizer=X.stabilizer(x),
                            transversal=tuple(sorted(trans.items()))))
    return orbits


def orbit_coset_iso(X: GSet, orbit: Orbit) -> GSetMap:
    """The equivariant map G/Stab(base) -> X hitting exactly the orbit."""
    G = X.group
    CH = coset_gset(G, orbit.stabilizer)
    images = []
    for c in CH.labels:  # each label is the sorted coset tuple
        images.append(X.act(c[0], orbit.base))
    return GSetMap(CH, X, tuple(images))


def pullback(f: GSetMap, g: GSetMap) -> Tuple[GSet, GSetMap, GSetMap]:
    """The fiber product {(x,z) : f(x) = g(z)} with its two projections."""
    if f.target is not g.target:
        raise DefinitionError("pullback needs a common target")
    X, Z = f.source, g.source
    pts = [(x, z) for x in range(X.size) for z in range(Z.size)
           if f(x) == g(z)]
    index = {p: i for i, p in enumerate(pts)}
    G = X.group
    action = [[index[(X.act(gg, x), Z.act(gg, z))] for (x, z) in pts]
              for gg in G.elements()]
    P = GSet(G, action, labels=pts)
    p1 = GSetMap(P, X, tuple(x for x, _ in pts))
    p2 = GSetMap(P, Z, tuple(z for _, z in pts))
    return P, p1, p2


@dataclass(frozen=True)
class ExponentialDiagram:
    """The five-object diagram generated by f : X -> Y and p : A -> X.

    pi is the dependent product: points are pairs (y, sigma) where sigma
    sections p over the fiber of y.  The diagram commutes: evaluation
    followed by p is the pullback projection to X.
    """

    f: GSetMap
    p: GSetMap
    pi: GSet
    projection: GSetMap          # pi -> Y
    pullback_corner: GSet        # X x_Y pi
    evaluation: GSetMap          # corner -> A, (x,(y,sigma)) -> sigma(x)
    corner_projection: GSetMap   # corner -> pi


def dependent_product(f: GSetMap, p: GSetMap,
                      section_cap: int = SECTION_CAP) -> ExponentialDiagram:
    """Construct Pi_f A and its exponential diagram.

    Points of Pi_f A are pairs (y, sigma) with sigma : f^-1(y) -> A a
    section of p over the fiber; the action is g(y, sigma) = (gy, g sigma)
    with (g sigma)(x) = g.sigma(g^-1 x).
    """
    if p.target is not f.source:
        raise DefinitionError("p must target the source of f")
    X, Y, A = f.source, f.target, p.source
    G = X.group

    fibers = {y: tuple(x for x in range(X.size) if f(x) == y)
              for y in range(Y.size)}
    lifts = {x: tuple(a for a in range(A.size) if p(a) == x)
             for x in range(X.size)}

    total = 0
    points: List[Tuple[int, Tuple[int, ...]]] = []
    for y in range(Y.size):
        fib = fibers[y]
        count = 1
        for x in fib:
            count *= len(lifts[x])
        total += count
        if total > section_cap:
            raise SizeLimitExceeded(
                f"dependent product would have more than {section_cap} points")
        for choice in iproduct(*(lifts[x] for x in fib)):
            points.append((y, tuple(choice)))  # aligned with sorted fiber
    points.sort()
    index = {pt: i for i, pt in enumerate(points)}

    def act_point(g: int, pt: Tuple[int, Tuple[int, ...]]) -> Tuple[int, Tuple[int, ...]]:
        y, sigma = pt
        fib = fibers[y]
        val = dict(zip(fib, sigma))
        gy = Y.act(g, y)
        ginv = G.inv(g)
        new_sigma = tuple(A.act(g, val[X.act(ginv, x)]) for x in fibers[gy])
        return (gy, new_sigma)

    action = [[index[act_point(g, pt)] for pt in points] for g in G.elements()]
    pi = GSet(G, action, labels=points)
    projection = GSetMap(pi, Y, tuple(y for y, _ in points))

    corner, to_x, to_pi = pullback(f, projection)
    ev_images = []
    for (x, ipt) in corner.labels:
        y, sigma = points[ipt]
        val = dict(zip(fibers[y], sigma))
        ev_images.append(val[x])
    evaluation = GSetMap(corner, A, tuple(ev_images))

    # commutativity of the exponential diagram
    for i in range(corner.size):
        if p(evaluation(i)) != to_x(i):
            raise DefinitionError("exponential diagram does not commute")

    return ExponentialDiagram(f=f, p=p, pi=pi, projection=projection,
                              pullback_corner=corner, evaluation=evaluation,
                              corner_projection=to_pi)


def equivariant_maps(X: GSet, Y: GSet) -> Iterator[GSetMap]:
    """All equivariant maps X -> Y, by exhaustive choice of orbit images."""
    orbits = orbit_decomposition(X)
    candidates = []
    for orb in orbits:
        stab = orb.stabilizer
        ok = [y for y in range(Y.size)
              if all(Y.act(h, y) == y for h in stab.elements)]
        candidates.append(ok)
    for choice in iproduct(*candidates):
        images = [0] * X.size
        for orb, y0 in zip(orbits, choice):
            for pt, g in orb.transversal:
                images[pt] = Y.act(g, y0)
        yield GSetMap(X, Y, tuple(images))


def gset_isomorphism(X: GSet, Y: GSet) -> Optional[GSetMap]:
    """An equivariant bijection X -> Y, or None.

    Orbits are matched by stabilizer conjugacy in canonical order, so the
    result is deterministic.
    """
    if X.group is not Y.group or X.size != Y.size:
        return None
    G = X.group
    xorbs = orbit_decomposition(X)
    yorbs = orbit_decomposition(Y)
    used = [False] * len(yorbs)
    images = [0] * X.size
    for xo in xorbs:
        match = None
        for j, yo in enumerate(yorbs):
            if used[j] or len(yo.points) != len(xo.points):
                continue
            u = next((g for g in G.elements()
                      if yo.stabilizer.conjugate(g).elements == xo.stabilizer.elements),
                     None)
            if u is not None:
                match = (j, yo, u)
                break
        if match is None:
            return None
        j, yo, u = match
        used[j] = True
        target_base = Y.act(u, yo.base)  # stabilizer u Stab(yo.base) u^-1 == Stab(xo.base)
        for pt, g in xo.transversal:
            images[pt] = Y.act(g, target_base)
    try:
        m = GSetMap(X, Y, tuple(images))
    except DefinitionError:
        return None
    if sorted(m.images) != list(range(Y.size)):
        return None
    return m
