"""Shared verification helpers: additive spans, transfer ideals, mutation
fixtures, and the randomized assembly sampler for round-trip tests."""

import random

import numpy as np

import corpus
from tambara.functors import TambaraData, coinduce, constant_functor, fixed_point_functor, product
from tambara.groups import subgroups
from tambara.rings import product_ring


def additive_span(ring, gens):
    span = {ring.zero} | {int(g) for g in gens}
    frontier = list(span)
    while frontier:
        new = []
        for a in list(span):
            for b in frontier:
                c = int(ring.add[a, b])
                if c not in span:
                    span.add(c)
                    new.append(c)
        frontier = new
    return span


def ideal_closure(ring, gens):
    ideal = additive_span(ring, gens)
    while True:
        extra = set()
        for a in ideal:
            for c in set(int(x) for x in ring.mul[a]):
                if c not in ideal:
                    extra.add(c)
        if not extra:
            return ideal
        ideal = additive_span(ring, ideal | extra)


def proper_transfer_images(T, L):
    gens = set()
    for M in subgroups(T.group):
        if M.is_subgroup_of(L) and M.order < L.order:
            gens.update(int(x) for x in T.tr[(M, L)])
    return gens


def copy_functor(T):
    return TambaraData(T.group, dict(T.levels),
                       {k: v.copy() for k, v in T.res.items()},
                       {k: v.copy() for k, v in T.tr.items()},
                       None if T.nm is None else {k: v.copy() for k, v in T.nm.items()},
                       {k: v.copy() for k, v in T.conj.items()},
                       has_norms=T.has_norms, label=T.label + "*")


def mutation_fixtures():
    """One broken functor per axiom family, with the family it must fail."""
    from corpus import C2

    e, full = C2.trivial_subgroup, C2.full_subgroup
    out = []

    T = copy_functor(corpus.FP_CORPUS["F4_galois_C2"])
    nm = T.nm[(e, full)].copy()
    nm[2] = T.levels[full].zero
    T.nm[(e, full)] = nm
    out.append(("broken multiplicativity", T, "contracts"))

    T = copy_functor(corpus.FP_CORPUS["F4_galois_C2"])
    T.conj[(1, full)] = np.array([1, 0])
    out.append(("c_h not identity", T, "conjugation"))

    T = copy_functor(corpus.FP_CORPUS["F4_galois_C2"])
    tr = T.tr[(e, full)]
    T.tr[(e, full)] = T.levels[full].add[tr, tr]
    out.append(("doubled transfer", T, "mackey_additive"))

    T = copy_functor(corpus.FP_CORPUS["F9_galois_C2"])
    nm = T.nm[(e, full)]
    T.nm[(e, full)] = T.levels[full].mul[nm, nm]
    out.append(("squared norm", T, "mackey_norm"))

    T = copy_functor(corpus.GREEN_CORPUS["green_cex_2_F2"])
    G = T.group
    eg, fg = G.trivial_subgroup, G.full_subgroup
    tr = T.tr[(eg, fg)]
    vec = [divmod(int(t), 2)[0] for t in tr]
    T.tr[(eg, fg)] = np.array([v * 2 + v for v in vec])
    out.append(("diagonal transfer", T, "frobenius"))

    T = copy_functor(corpus.BURNSIDE_CORPUS["burnside_C2_4"])
    top = T.levels[full]
    k = top.vector_to_index((1, 2))
    tr = T.tr[(e, full)].copy()
    for a in range(4):
        if a % 2 == 1:
            tr[a] = top.add[tr[a], k]
    T.tr[(e, full)] = tr
    out.append(("kernel-twisted transfer", T, "exponential"))
    return out


def random_assembly(G, rng, max_bottom=2048):
    """A random product of coinductions of clarified template factors over
    distinct conjugacy classes.  Returns (T, expected) with expected the
    list of (class representative, template functor)."""
    classes = [cls[0] for cls in G.subgroup_conjugacy_classes]
    k = rng.randint(1, min(3, len(classes)))
    chosen = rng.sample(classes, k)
    expected = []
    parts = []
    bottom = 1
    for H in sorted(chosen, key=lambda s: (s.order, s.elements)):
        Hg, _ = H.as_group
        index = G.order // H.order
        options = [corpus.F2]
        if 2 ** index <= 256:
            options.append(corpus.F3)
            if index <= 2:
                options.append(product_ring([corpus.F2, corpus.F2]))
        ring = rng.choice(options)
        if bottom * ring.size ** index > max_bottom:
            ring = corpus.F2
        if bottom * ring.size ** index > max_bottom:
            continue
        bottom *= ring.size ** index
        if H.order == 2 and ring.size == 4 and rng.random() < 0.5:
            ell = fixed_point_functor(corpus.galois_gring(corpus.F4, Hg))
        else:
            ell = constant_functor(ring, Hg)
        expected.append((H, ell))
        parts.append(coinduce(G, H, ell))
    if not parts:
        Hg, _ = G.full_subgroup.as_group
        ell = constant_functor(corpus.F2, Hg)
        expected.append((G.full_subgroup, ell))
        parts.append(coinduce(G, G.full_subgroup, ell))
    T = parts[0]
    for p in parts[1:]:
        T = product(T, p)
    return T, expected
