"""Explicit finite commutative rings and rings with group action.

Rings are dense numpy tables over 0-based element indices.  The idempotent
calculus (isotropy, orthogonal orbits, the clarified predicate), coinduction
of G-rings along a subgroup, and the decomposition of a G-ring into
coinductions of clarified pieces all live here.

The zero ring (size 1) is permitted everywhere and marks the terminal
object; operations that cannot tolerate it raise ZeroRing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import _search
from .errors import (
    DefinitionError,
    GroupMismatch,
    NotIdempotent,
    SizeLimitExceeded,
    VerificationFailed,
    ZeroRing,
)
from .groups import FiniteGroup, Subgroup, UpwardClosedSet

RING_SIZE_CAP = 20000

# fixed irreducible polynomials over F_p, low-degree coefficients first
# (from the standard tables; verified at construction by the field check)
_IRREDUCIBLE = {
    (2, 2): (1, 1, 1),          # t^2 + t + 1
    (2, 3): (1, 1, 0, 1),       # t^3 + t + 1
    (2, 4): (1, 1, 0, 0, 1),    # t^4 + t + 1
    (3, 2): (1, 0, 1),          # t^2 + 1
    (3, 3): (1, 2, 0, 1),       # t^3 + 2t + 1
    (3, 4): (2, 1, 0, 0, 1),    # t^4 + t + 2
    (5, 2): (2, 0, 1),          # t^2 + 2
    (5, 3): (1, 1, 0, 1),       # t^3 + t + 1
    (5, 4): (2, 0, 0, 0, 1),    # t^4 + 2
    (7, 2): (1, 0, 1),          # t^2 + 1
    (11, 2): (1, 0, 1),         # t^2 + 1
    (13, 2): (2, 0, 1),         # t^2 + 2
}


class FiniteRing:
    """A finite commutative ring as add/mul tables with named 0 and 1."""

    def __init__(self, add, mul, zero: int, one: int, label: str = "R") -> None:
        self.add = np.asarray(add, dtype=np.int32)
        self.mul = np.asarray(mul, dtype=np.int32)
        n = self.add.shape[0]
        if self.add.shape != (n, n) or self.mul.shape != (n, n):
            raise DefinitionError("add/mul tables must be square and equal-sized")
        if n > RING_SIZE_CAP:
            raise SizeLimitExceeded(f"ring size {n} exceeds cap {RING_SIZE_CAP}")
        self.size = n
        self.zero = int(zero)
        self.one = int(one)
        self.label = label
        self._structural_check()
        self.neg = self._compute_neg()

    def _structural_check(self) -> None:
        n = self.size
        for t in (self.add, self.mul):
            if t.min() < 0 or t.max() >= n:
                raise DefinitionError("table entries out of range")
        if not np.array_equal(self.add, self.add.T):
            raise DefinitionError("addition is not commutative")
        if not np.array_equal(self.mul, self.mul.T):
            raise DefinitionError("multiplication is not commutative")
        if not np.array_equal(self.add[self.zero], np.arange(n)):
            raise DefinitionError("zero is not an additive identity")
        if not np.array_equal(self.mul[self.one], np.arange(n)):
            raise DefinitionError("one is not a multiplicative identity")
        if n > 1 and self.zero == self.one:
            raise DefinitionError("0 == 1 in a ring with more than one element")

    def _compute_neg(self) -> np.ndarray:
        rows, cols = np.nonzero(self.add == self.zero)
        neg = np.full(self.size, -1, dtype=np.int32)
        neg[rows] = cols
        if (neg < 0).any():
            raise DefinitionError("some element has no additive inverse")
        return neg

    def validate(self) -> None:
        """Full O(n^3) associativity and distributivity check."""
        n, add, mul = self.size, self.add, self.mul
        for a in range(n):
            if not np.array_equal(add[add[a]], add[a][add]):
                raise DefinitionError(f"addition not associative at {a}")
            if not np.array_equal(mul[mul[a]], mul[a][mul]):
                raise DefinitionError(f"multiplication not associative at {a}")
            if not np.array_equal(mul[a][add], add[mul[a][:, None], mul[a][None, :]]):
                raise DefinitionError(f"distributivity fails at {a}")

    # -- pointwise helpers ---------------------------------------------

    def is_zero_ring(self) -> bool:
        return self.size == 1

    def add_many(self, xs: Sequence[int]) -> int:
        acc = self.zero
        for x in xs:
            acc = int(self.add[acc, x])
        return acc

    def mul_many(self, xs: Sequence[int]) -> int:
        acc = self.one
        for x in xs:
            acc = int(self.mul[acc, x])
        return acc

    def power(self, x: int, k: int) -> int:
        acc = self.one
        for _ in range(k):
            acc = int(self.mul[acc, x])
        return acc

    def __repr__(self) -> str:
        return f"FiniteRing({self.label}, size={self.size})"


def zero_ring() -> FiniteRing:
    return FiniteRing([[0]], [[0]], 0, 0, label="0")


def zn(n: int) -> FiniteRing:
    if n < 1:
        raise DefinitionError("modulus must be positive")
    if n == 1:
        return zero_ring()
    idx = np.arange(n)
    return FiniteRing((idx[:, None] + idx[None, :]) % n,
                      (idx[:, None] * idx[None, :]) % n,
                      0, 1, label=f"Z/{n}")


def _factor_prime_power(q: int) -> Tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise DefinitionError(f"{q} is not a prime power")
            return p, k
    raise DefinitionError(f"{q} is not a prime power")


def fq(q: int) -> FiniteRing:
    """The field with q = p^k elements (k <= 4), as polynomials mod a fixed
    irreducible; element index is sum(c_i * p^i) so scalars sit at 0..p-1."""
    p, k = _factor_prime_power(q)
    if k == 1:
        R = zn(p)
        R.char_p, R.deg_k = p, 1
        return R
    if (p, k) not in _IRREDUCIBLE:
        raise DefinitionError(f"no irreducible polynomial on file for ({p},{k})")
    poly = _IRREDUCIBLE[(p, k)]

    def decode(i):
        cs = []
        for _ in range(k):
            cs.append(i % p)
            i //= p
        return cs

    def encode(cs):
        out = 0
        for c in reversed(cs):
            out = out * p + (c % p)
        return out

    def poly_mul(a, b):
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c:
                prod[d] = 0
                for j in range(k):
                    prod[d - k + j] = (prod[d - k + j] - c * poly[j]) % p
        return prod[:k]

    n = q
    add = np.zeros((n, n), dtype=np.int32)
    mul = np.zeros((n, n), dtype=np.int32)
    for i in range(n):
        a = decode(i)
        for j in range(n):
            b = decode(j)
            add[i, j] = encode([(x + y) % p for x, y in zip(a, b)])
            mul[i, j] = encode(poly_mul(a, b))
    R = FiniteRing(add, mul, 0, 1, label=f"F{q}")
    R.validate()
    for x in range(1, n):
        if R.one not in R.mul[x]:
            raise DefinitionError(f"construction of F{q} is not a field (check polynomial)")
    R.char_p, R.deg_k = p, k
    return R


def frobenius(R: FiniteRing) -> np.ndarray:
    """The Frobenius x -> x^p of a field built by fq(), as a permutation."""
    p = getattr(R, "char_p", None)
    if p is None:
        raise DefinitionError("frobenius needs a field from fq()")
    return np.array([R.power(x, p) for x in range(R.size)], dtype=np.int32)


def product_ring(factors: Sequence[FiniteRing], label: Optional[str] = None) -> FiniteRing:
    """Componentwise product; index is C-order over factor indices.

    The result carries factor_sizes for encode/decode.
    """
    if not factors:
        raise DefinitionError("need at least one factor")
    sizes = [f.size for f in factors]
    n = 1
    for s in sizes:
        n *= s
        if n > RING_SIZE_CAP:
            raise SizeLimitExceeded(f"product ring would exceed {RING_SIZE_CAP} elements")
    idx = np.arange(n)
    comps = prod_decode_array(sizes, idx)
    add = np.zeros((n, n), dtype=np.int64)
    mul = np.zeros((n, n), dtype=np.int64)
    stride = 1
    strides = []
    for s in reversed(sizes):
        strides.append(stride)
        stride *= s
    strides.reverse()
    for k, f in enumerate(factors):
        a = comps[k]
        add += f.add[a[:, None], a[None, :]].astype(np.int64) * strides[k]
        mul += f.mul[a[:, None], a[None, :]].astype(np.int64) * strides[k]
    zero = prod_encode(sizes, [f.zero for f in factors])
    one = prod_encode(sizes, [f.one for f in factors])
    R = FiniteRing(add, mul, zero, one,
                   label=label or " x ".join(f.label for f in factors))
    R.factor_sizes = tuple(sizes)
    return R


def prod_encode(sizes: Sequence[int], comps: Sequence[int]) -> int:
    out = 0
    for s, c in zip(sizes, comps):
        out = out * s + int(c)
    return out


def prod_decode(sizes: Sequence[int], idx: int) -> Tuple[int, ...]:
    out = []
    for s in reversed(sizes):
        out.append(idx % s)
        idx //= s
    return tuple(reversed(out))


def prod_decode_array(sizes: Sequence[int], idx: np.ndarray) -> List[np.ndarray]:
    out = []
    rem = idx.copy()
    for s in reversed(sizes):
        out.append(rem % s)
        rem = rem // s
    out.reverse()
    return out


def subring_on_idempotent(R: FiniteRing, e: int, label: Optional[str] = None
                          ) -> Tuple[FiniteRing, np.ndarray]:
    """The ring e*R with unit e.  Returns (S, include) with include[i] the
    R-index of S's element i."""
    if int(R.mul[e, e]) != e:
        raise NotIdempotent(f"{e} is not idempotent")
    members = np.nonzero(R.mul[e] == np.arange(R.size))[0]
    pos = -np.ones(R.size, dtype=np.int32)
    pos[members] = np.arange(len(members))
    add = pos[R.add[np.ix_(members, members)]]
    mul = pos[R.mul[np.ix_(members, members)]]
    S = FiniteRing(add, mul, int(pos[R.zero]), int(pos[e]),
                   label=label or f"{R.label}|e{e}")
    return S, members.astype(np.int32)


@dataclass(frozen=True)
class RingHom:
    """A unital ring homomorphism as an image table."""

    source: FiniteRing
    target: FiniteRing
    images: Tuple[int, ...]

    def __post_init__(self):
        img = np.asarray(self.images, dtype=np.int32)
        if img.shape != (self.source.size,):
            raise DefinitionError("image table has wrong length")
        if img[self.source.zero] != self.target.zero:
            raise DefinitionError("homomorphism does not preserve 0")
        if img[self.source.one] != self.target.one:
            raise DefinitionError("homomorphism does not preserve 1")
        if not np.array_equal(img[self.source.add], self.target.add[img[:, None], img[None, :]]):
            raise DefinitionError("homomorphism does not preserve addition")
        if not np.array_equal(img[self.source.mul], self.target.mul[img[:, None], img[None, :]]):
            raise DefinitionError("homomorphism does not preserve multiplication")

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def is_bijective(self) -> bool:
        return (self.source.size == self.target.size
                and len(set(self.images)) == self.source.size)

    def inverse(self) -> "RingHom":
        if not self.is_bijective():
            raise DefinitionError("homomorphism is not bijective")
        inv = np.zeros(self.target.size, dtype=np.int32)
        inv[np.asarray(self.images)] = np.arange(self.source.size)
        return RingHom(self.target, self.source, tuple(int(x) for x in inv))

    def compose(self, other: "RingHom") -> "RingHom":
        """self after other."""
        return RingHom(other.source, self.target,
                       tuple(int(self.images[y]) for y in other.images))


class GRing:
    """A finite ring with a group acting by ring automorphisms."""

    def __init__(self, ring: FiniteRing, group: FiniteGroup, action) -> None:
        self.ring = ring
        self.group = group
        self.action = np.asarray(action, dtype=np.int32)
        if self.action.shape != (group.order, ring.size):
            raise DefinitionError("action table must be |G| x |R|")
        self._validate()

    def _validate(self) -> None:
        n = self.ring.size
        if not np.array_equal(self.action[0], np.arange(n)):
            raise DefinitionError("identity must act trivially")
        for g in self.group.elements():
            row = self.action[g]
            if not np.array_equal(np.sort(row), np.arange(n)):
                raise DefinitionError(f"group element {g} does not act bijectively")
            if not np.array_equal(row[self.ring.add], self.ring.add[row[:, None], row[None, :]]):
                raise DefinitionError(f"element {g} is not additive")
            if not np.array_equal(row[self.ring.mul], self.ring.mul[row[:, None], row[None, :]]):
                raise DefinitionError(f"element {g} is not multiplicative")
        for g in self.group.elements():
            for h in self.group.elements():
                gh = self.group.mul(g, h)
                if not np.array_equal(self.action[gh], self.action[g][self.action[h]]):
                    raise DefinitionError(f"action not a homomorphism at ({g},{h})")

    def act(self, g: int, x: int) -> int:
        return int(self.action[g, x])

    def __repr__(self) -> str:
        return f"GRing({self.ring.label}, {self.group.name})"


def trivial_gring(R: FiniteRing, G: FiniteGroup) -> GRing:
    return GRing(R, G, np.tile(np.arange(R.size, dtype=np.int32), (G.order, 1)))


# -- idempotent calculus ------------------------------------------------


def idempotents(R: FiniteRing) -> List[int]:
    """All x with x*x == x, sorted; contains 0 and 1."""
    diag = R.mul[np.arange(R.size), np.arange(R.size)]
    return [int(x) for x in np.nonzero(diag == np.arange(R.size))[0]]


def primitive_idempotents(R: FiniteRing) -> List[int]:
    """The unique complete set of orthogonal primitive idempotents."""
    if R.is_zero_ring():
        raise ZeroRing("the zero ring has no primitive idempotents")
    idems = idempotents(R)
    atoms = []
    for d in idems:
        if d == R.zero:
            continue
        # d is an atom iff no idempotent e with 0 != e != d lives under d
        if not any(e != R.zero and e != d and int(R.mul[e, d]) == e for e in idems):
            atoms.append(d)
    total = R.add_many(atoms)
    if total != R.one:
        raise VerificationFailed("primitive idempotents do not sum to 1")
    for i, a in enumerate(atoms):
        for b in atoms[i + 1:]:
            if int(R.mul[a, b]) != R.zero:
                raise VerificationFailed("primitive idempotents are not orthogonal")
    return atoms


@dataclass(frozen=True)
class IdempotentReport:
    element: int
    isotropy: Subgroup
    orthogonal_orbit: bool
    type: Optional[Subgroup]


def classify_idempotent(R: GRing, d: int) -> IdempotentReport:
    """Isotropy and orthogonal-orbit analysis of an idempotent."""
    ring = R.ring
    if int(ring.mul[d, d]) != d:
        raise NotIdempotent(f"{d}*{d} != {d}")
    iso_els = [g for g in R.group.elements() if R.act(g, d) == d]
    isotropy = R.group.subgroup(iso_els)
    orth = all(
        int(ring.mul[d, R.act(g, d)]) == ring.zero
        for g in R.group.elements()
        if R.act(g, d) != d
    )
    return IdempotentReport(element=d, isotropy=isotropy, orthogonal_orbit=orth,
                            type=isotropy if orth else None)


def is_lambda_clarified(R: GRing, lam: UpwardClosedSet) -> bool:
    """True iff every typed idempotent has its type in lam."""
    for d in idempotents(R.ring):
        rep = classify_idempotent(R, d)
        if rep.type is not None and rep.type not in lam:
            return False
    return True


def is_clarified(R: GRing) -> bool:
    """No type-H idempotent for H a proper subgroup."""
    full = R.group.full_subgroup
    for d in idempotents(R.ring):
        rep = classify_idempotent(R, d)
        if rep.type is not None and rep.type.order != full.order:
            return False
    return True


# -- coinduction, restriction, product, transport -----------------------


def _check_subgroup_ring(H: Subgroup, S: GRing) -> None:
    K, _ = H.as_group
    if S.group.order != K.order or S.group.mul_table != K.mul_table:
        raise GroupMismatch("S must be a ring with action of H.as_group")


def coinduce_gring(G: FiniteGroup, H: Subgroup, S: GRing,
                   rep_choice: Optional[Sequence[int]] = None) -> GRing:
    """The G-ring Fun(G/H, S) with the coset-representative twisted action.

    Cosets are ordered canonically (identity coset first) and the chosen
    representative of each coset is its minimal element.  Component i of the
    product corresponds to coset i, and gamma sends the value at coset
    gamma^-1 c to the value at c, twisted by rep(c)^-1 gamma rep(gamma^-1 c)
    acting through S.

    rep_choice overrides the representative of each coset (one element per
    canonical coset); the isomorphism class does not depend on the choice.
    """
    _check_subgroup_ring(H, S)
    _, embed = H.as_group
    hpos = {g: i for i, g in enumerate(embed)}
    cosets = H.left_cosets()
    if rep_choice is None:
        reps = [c[0] for c in cosets]
    else:
        reps = [int(r) for r in rep_choice]
        if len(reps) != len(cosets) or any(r not in c for r, c in zip(reps, cosets)):
            raise DefinitionError("rep_choice must pick one element of each coset")
    coset_of = {}
    for i, c in enumerate(cosets):
        for g in c:
            coset_of[g] = i
    m = len(cosets)
    ring = product_ring([S.ring] * m, label=f"Fun({G.name}/{H.elements}, {S.ring.label})")
    sizes = [S.ring.size] * m
    n = ring.size
    comps = prod_decode_array(sizes, np.arange(n))
    action = np.zeros((G.order, n), dtype=np.int64)
    for gamma in G.elements():
        ginv = G.inv(gamma)
        out = np.zeros(n, dtype=np.int64)
        stride = 1
        for j in range(m - 1, -1, -1):
            src = coset_of[G.mul(ginv, reps[j])]
            twist = G.mul(G.mul(G.inv(reps[j]), gamma), reps[src])
            out += S.action[hpos[twist]][comps[src]].astype(np.int64) * stride
            stride *= S.ring.size
        action[gamma] = out
    out_ring = GRing(ring, G, action)
    out_ring.coind_cosets = tuple(cosets)
    out_ring.coind_reps = tuple(reps)
    return out_ring


def gring_restrict(K: Subgroup, R: GRing) -> GRing:
    """The same ring with the action restricted to K (as its own group)."""
    if R.group is not K.parent:
        raise GroupMismatch("K must be a subgroup of R's group")
    Kg, embed = K.as_group
    return GRing(R.ring, Kg, R.action[list(embed)])


def gring_product(R: GRing, S: GRing) -> GRing:
    if R.group is not S.group:
        raise GroupMismatch("product needs a common group")
    ring = product_ring([R.ring, S.ring])
    n = ring.size
    comps = prod_decode_array([R.ring.size, S.ring.size], np.arange(n))
    action = np.zeros((R.group.order, n), dtype=np.int64)
    for g in R.group.elements():
        action[g] = (R.action[g][comps[0]].astype(np.int64) * S.ring.size
                     + S.action[g][comps[1]])
    out = GRing(ring, R.group, action)
    return out


def gring_transport(S: GRing, H: Subgroup, g: int) -> GRing:
    """The gHg^-1-ring obtained from the H-ring S along conjugation by g.

    x in gHg^-1 acts as g^-1 x g does in S.
    """
    _check_subgroup_ring(H, S)
    G = H.parent
    _, embed = H.as_group
    hpos = {e: i for i, e in enumerate(embed)}
    Hg = G.subgroup(G.conj(g, h) for h in H.elements)
    _, embed2 = Hg.as_group
    rows = [S.action[hpos[G.conj(G.inv(g), x)]] for x in embed2]
    return GRing(S.ring, Hg.as_group[0], np.array(rows))


def is_equivariant(hom: RingHom, src: GRing, tgt: GRing) -> bool:
    """hom commutes with matching group actions (groups must align by index)."""
    if src.group.order != tgt.group.order:
        return False
    img = np.asarray(hom.images)
    return all(
        np.array_equal(img[src.action[g]], tgt.action[g][img])
        for g in src.group.elements()
    )


# -- decomposition into coinductions of clarified pieces -----------------


@dataclass
class GRingDecomposition:
    """factors[i] = (subgroup representative H, clarified H-ring); the
    witness maps the reassembled product of coinductions onto the input.
    class_units[i] is the G-fixed idempotent of the input cutting out the
    i-th factor (the sum of the primitive idempotents in its orbits)."""

    factors: List[Tuple[Subgroup, GRing]]
    reassembled: GRing
    witness: RingHom
    class_units: List[int]


def decompose_gring(R: GRing) -> GRingDecomposition:
    """Split a G-ring as a product over conjugacy classes of coinductions of
    clarified pieces, with an explicit equivariant isomorphism witness."""
    if R.ring.is_zero_ring():
        raise ZeroRing("cannot decompose the zero ring")
    G = R.group
    prims = primitive_idempotents(R.ring)
    prim_set = set(prims)

    seen = set()
    orbits = []
    for d in prims:
        if d in seen:
            continue
        orbit = sorted({int(R.act(g, d)) for g in G.elements()})
        if any(p not in prim_set for p in orbit):
            raise VerificationFailed("orbit of a primitive idempotent left the set")
        seen.update(orbit)
        orbits.append(orbit)

    # choose, per orbit, a base point whose stabilizer IS the canonical
    # conjugacy class representative
    classes: Dict[Tuple[int, ...], List[Tuple[int, List[int]]]] = {}
    class_reps: Dict[Tuple[int, ...], Subgroup] = {}
    for orbit in orbits:
        stab0 = G.subgroup(g for g in G.elements() if R.act(g, orbit[0]) == orbit[0])
        rep = G.conjugacy_class_rep(stab0)
        base = next(p for p in orbit
                    if all(R.act(g, p) == p for g in rep.elements)
                    and sum(1 for g in G.elements() if R.act(g, p) == p) == rep.order)
        classes.setdefault(rep.elements, []).append((base, orbit))
        class_reps[rep.elements] = rep

    factors: List[Tuple[Subgroup, GRing]] = []
    coinduced: List[GRing] = []
    class_units: List[int] = []
    witness_parts = []  # per class: (rep, cosets, orbit_bases, includes)
    for key in sorted(classes, key=lambda e: (len(e), e)):
        rep = class_reps[key]
        unit = R.ring.zero
        for _, orbit in classes[key]:
            for p in orbit:
                unit = int(R.ring.add[unit, p])
        class_units.append(unit)
        Kg, embed = rep.as_group
        bases = [b for b, _ in classes[key]]
        subrings = []
        includes = []
        for b in bases:
            S, inc = subring_on_idempotent(R.ring, b)
            subrings.append(S)
            includes.append(inc)
        factor_ring = product_ring(subrings) if len(subrings) > 1 else subrings[0]
        sizes = [s.size for s in subrings]
        action = np.zeros((Kg.order, factor_ring.size), dtype=np.int64)
        pos_tables = []
        for S, inc in zip(subrings, includes):
            pos = -np.ones(R.ring.size, dtype=np.int64)
            pos[inc] = np.arange(S.size)
            pos_tables.append(pos)
        comps = prod_decode_array(sizes, np.arange(factor_ring.size))
        for i, k in enumerate(embed):
            out = np.zeros(factor_ring.size, dtype=np.int64)
            stride = 1
            for j in range(len(subrings) - 1, -1, -1):
                moved = pos_tables[j][R.action[k][includes[j][comps[j]]]]
                if (moved < 0).any():
                    raise VerificationFailed("class representative does not preserve a factor")
                out += moved * stride
                stride *= sizes[j]
            action[i] = out
        S_class = GRing(factor_ring, Kg, action)
        if not is_clarified(S_class):
            raise VerificationFailed("decomposition factor is not clarified")
        factors.append((rep, S_class))
        coinduced.append(coinduce_gring(G, rep, S_class))
        witness_parts.append((rep, bases, includes, sizes))

    reassembled = coinduced[0]
    for c in coinduced[1:]:
        reassembled = gring_product(reassembled, c)

    # witness: sum of translated components
    ring = R.ring
    images = []
    outer_sizes = [c.ring.size for c in coinduced]
    for idx in range(reassembled.ring.size):
        outer = prod_decode(outer_sizes, idx)
        total = ring.zero
        for (rep, bases, includes, sizes), block in zip(witness_parts, outer):
            cosets = rep.left_cosets()
            m = len(cosets)
            per_coset = prod_decode([int(np.prod(sizes))] * m, block) if m > 1 else (block,)
            for j, coset in enumerate(cosets):
                comps = prod_decode(sizes, per_coset[j])
                summand = ring.zero
                for inc, comp in zip(includes, comps):
                    summand = int(ring.add[summand, inc[comp]])
                total = int(ring.add[total, R.act(coset[0], summand)])
        images.append(total)
    witness = RingHom(reassembled.ring, ring, tuple(images))
    if not witness.is_bijective():
        raise VerificationFailed("decomposition witness is not bijective")
    if not is_equivariant(witness, reassembled, R):
        raise VerificationFailed("decomposition witness is not equivariant")
    return GRingDecomposition(factors=factors, reassembled=reassembled,
                              witness=witness, class_units=class_units)


def mackey_gring_iso(G: FiniteGroup, K: Subgroup, H: Subgroup, S: GRing
                     ) -> Tuple[GRing, GRing, RingHom]:
    """Res_K Coind_H S  ~=  prod over K\\G/H of Coind over K of the
    restricted conjugates, as K-rings, with an explicit isomorphism.

    Returns (lhs, rhs, iso : lhs.ring -> rhs.ring); the identity double
    coset factor comes first.
    """
    from .groups import double_cosets as _dcs

    _check_subgroup_ring(H, S)
    Kg, kembed = K.as_group
    lhs = gring_restrict(K, coinduce_gring(G, H, S))

    cosets_H = H.left_cosets()
    reps_H = [c[0] for c in cosets_H]
    coset_of_H = {}
    for i, c in enumerate(cosets_H):
        for g in c:
            coset_of_H[g] = i
    _, hembed = H.as_group
    hpos = {g: i for i, g in enumerate(hembed)}

    blocks = []
    for d, _ in _dcs(G, K, H):
        Hd = G.subgroup(G.conj(d, h) for h in H.elements)
        M = K.intersect(Hd)              # K cap dHd^-1, subgroup of G
        Sd = gring_transport(S, H, d)    # dHd^-1-ring
        # restrict the Hd-ring Sd to M, then coinduce from M inside K
        _, hd_embed = Hd.as_group
        hd_pos = {g: i for i, g in enumerate(hd_embed)}
        Mg, m_embed = M.as_group
        S_M = GRing(Sd.ring, Mg, Sd.action[[hd_pos[x] for x in m_embed]])
        M_in_K = Kg.subgroup(kembed.index(x) for x in M.elements)
        blocks.append((d, M, coinduce_gring(Kg, M_in_K, S_M)))

    rhs = blocks[0][2]
    for _, _, b in blocks[1:]:
        rhs = gring_product(rhs, b)

    # iso per derivation: component (d, coset c' of K/(K cap dH)) of the image
    # of f reads tau . f(c) with c = (rep'(c') d) H, tau = (rep'(c') d)^-1 rep(c)
    m = len(cosets_H)
    lhs_sizes = [S.ring.size] * m
    images = []
    block_layouts = []
    for d, M, b in blocks:
        M_in_K = Kg.subgroup(kembed.index(x) for x in M.elements)
        cosets = M_in_K.left_cosets()  # cosets inside Kg (subgroup-local indices)
        block_layouts.append((d, cosets, b.ring.size))
    rhs_sizes = [b[2] for b in block_layouts]
    for idx in range(lhs.ring.size):
        f = prod_decode(lhs_sizes, idx)
        outs = []
        for d, cosets, _ in block_layouts:
            vals = []
            for c in cosets:
                kk = kembed[c[0]]          # representative of c' in G
                w = G.mul(kk, d)
                cH = coset_of_H[w]
                tau = G.mul(G.inv(w), reps_H[cH])
                vals.append(int(S.action[hpos[tau], f[cH]]))
            outs.append(prod_encode([S.ring.size] * len(cosets), vals))
        images.append(prod_encode(rhs_sizes, outs))
    iso = RingHom(lhs.ring, rhs.ring, tuple(images))
    if not iso.is_bijective() or not is_equivariant(iso, lhs, rhs):
        raise VerificationFailed("Mackey decomposition witness failed")
    return lhs, rhs, iso


# -- homomorphism and isomorphism search ---------------------------------


def _ring_structure(R: FiniteRing) -> _search.OpStructure:
    return _search.OpStructure(
        sorts={"r": R.size},
        constants=[("zero", "r", R.zero), ("one", "r", R.one)],
        unary=[("neg", "r", "r", [int(x) for x in R.neg])],
        binary=[("add", "r", R.add.tolist()), ("mul", "r", R.mul.tolist())],
    )


def _gring_structure(R: GRing) -> _search.OpStructure:
    s = _ring_structure(R.ring)
    for g in R.group.elements():
        s.unary.append((f"act{g}", "r", "r", [int(x) for x in R.action[g]]))
    return s


def ring_isomorphism(A: FiniteRing, B: FiniteRing,
                     budget: int = _search.DEFAULT_BUDGET) -> Optional[RingHom]:
    image = _search.find_isomorphism(_ring_structure(A), _ring_structure(B), budget)
    if image is None:
        return None
    return RingHom(A, B, tuple(image["r"]))


def gring_isomorphism(A: GRing, B: GRing,
                      budget: int = _search.DEFAULT_BUDGET) -> Optional[RingHom]:
    image = _search.find_isomorphism(_gring_structure(A), _gring_structure(B), budget)
    if image is None:
        return None
    return RingHom(A.ring, B.ring, tuple(image["r"]))


def gring_homomorphisms(A: GRing, B: GRing, budget: int = _search.DEFAULT_BUDGET,
                        limit: Optional[int] = None) -> Iterator[RingHom]:
    """All equivariant unital ring homomorphisms A -> B."""
    for image in _search.search_homomorphisms(
            _gring_structure(A), _gring_structure(B), injective=False,
            budget=budget, limit=limit):
        yield RingHom(A.ring, B.ring, tuple(image["r"]))
