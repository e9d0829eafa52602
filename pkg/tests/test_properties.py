"""Property-based tests for the invariants that quantify over choices."""

from hypothesis import given, settings, strategies as st

import corpus
from corpus import C2, C3, C4, F3, F4, S3
from tambara.groups import subgroups
from tambara.gsets import GSet, coset_gset, disjoint_union, gset_isomorphism, orbit_decomposition
from tambara.rings import (
    GRing,
    coinduce_gring,
    gring_isomorphism,
    trivial_gring,
)


@st.composite
def coset_rep_choices(draw):
    """A group, a subgroup, an inner ring, and a rep choice per coset."""
    G = draw(st.sampled_from([C4, S3]))
    H = draw(st.sampled_from(subgroups(G)))
    cosets = H.left_cosets()
    reps = [draw(st.sampled_from(c)) for c in cosets]
    if H.order % 2 == 0 and H.order > 1:
        S = corpus.galois_gring(F4, H.as_group[0]) if _is_c2(H) else \
            trivial_gring(F3, H.as_group[0])
    else:
        S = trivial_gring(F3, H.as_group[0])
    return G, H, S, reps


def _is_c2(H):
    return H.order == 2


@given(coset_rep_choices())
@settings(max_examples=25, deadline=None)
def test_coinduction_is_choice_independent(data):
    G, H, S, reps = data
    canonical = coinduce_gring(G, H, S)
    chosen = coinduce_gring(G, H, S, rep_choice=reps)
    assert gring_isomorphism(canonical, chosen) is not None


@st.composite
def shuffled_gset(draw):
    G = draw(st.sampled_from([C2, C3, S3]))
    subs = subgroups(G)
    picks = draw(st.lists(st.sampled_from(subs), min_size=1, max_size=3))
    X, _ = disjoint_union([coset_gset(G, H) for H in picks])
    perm = draw(st.permutations(list(range(X.size))))
    inv = [0] * X.size
    for i, p in enumerate(perm):
        inv[p] = i
    relabeled = GSet(G, [[perm[X.act(g, inv[x])] for x in range(X.size)]
                         for g in G.elements()])
    return G, picks, X, relabeled


@given(shuffled_gset())
@settings(max_examples=40, deadline=None)
def test_gset_isomorphism_finds_relabelings(data):
    G, picks, X, relabeled = data
    iso = gset_isomorphism(X, relabeled)
    assert iso is not None
    assert sorted(iso.images) == list(range(X.size))


@given(shuffled_gset())
@settings(max_examples=25, deadline=None)
def test_orbit_decomposition_recovers_summands(data):
    G, picks, X, relabeled = data
    orbs = orbit_decomposition(relabeled)
    got = sorted(len(o.points) for o in orbs)
    want = sorted(G.order // H.order for H in picks)
    assert got == want
    covered = sorted(p for o in orbs for p in o.points)
    assert covered == list(range(X.size))


@given(st.integers(min_value=1, max_value=3),
       st.sampled_from([C2, C3]))
@settings(max_examples=20, deadline=None)
def test_section_count_of_dependent_product(n, G):
    from tambara.gsets import GSetMap, dependent_product

    X = coset_gset(G, G.trivial_subgroup)
    Y = coset_gset(G, G.full_subgroup)
    f = GSetMap(X, Y, tuple(0 for _ in range(X.size)))
    A, _ = disjoint_union([X] * n)
    p = GSetMap(A, X, tuple(x for _ in range(n) for x in range(X.size)))
    diag = dependent_product(f, p)
    assert diag.pi.size == n ** G.order


@given(st.sampled_from(sorted(corpus.TAMBARA_CORPUS)), st.data())
@settings(max_examples=30, deadline=None)
def test_frobenius_on_random_elements(name, data):
    # spot-check Frobenius reciprocity on randomly drawn elements
    T = corpus.TAMBARA_CORPUS[name]
    pairs = [p for p in T.sub_pairs() if p[0] != p[1]]
    if not pairs:
        return
    K, H = data.draw(st.sampled_from(pairs))
    rk, rh = T.levels[K], T.levels[H]
    y = data.draw(st.integers(min_value=0, max_value=rh.size - 1))
    x = data.draw(st.integers(min_value=0, max_value=rk.size - 1))
    tr, res = T.tr[(K, H)], T.res[(K, H)]
    assert tr[rk.mul[res[y], x]] == rh.mul[y, tr[x]]
