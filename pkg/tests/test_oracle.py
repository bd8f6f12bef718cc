import itertools

import pytest

from fillpair.bounds import SporadicSurface
from fillpair.oracle import (GE4, BudgetExceeded, EnumFilter, classify_distance, decode_key,
                             enumerate_configs, min_filling, revalidate_witness, swap_roles,
                             undecorated_keys)
from fillpair.pair import PairConfig, canonicalize, validate

from helpers import corpus, face_cycles, nonsporadic, ribbon_code, ribbon_graph

# filling, bigon-free, essential configurations with at most one puncture per face
FROZEN_COUNTS = {1: 2, 2: 4, 3: 6, 4: 29, 5: 104, 6: 752}


def _side_ok(faces, rot, pair, col, punct, cut_colour):
    """Independent essentiality: no side of the curve is a disk with at most one puncture."""
    face_of = {h: i for i, f in enumerate(faces) for h in f}
    parent = list(range(len(faces)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    glue = [h for h in rot if col[h] % 2 != cut_colour]
    for h in glue:
        parent[find(face_of[h])] = find(face_of[pair[h]])
    comps = {find(i) for i in range(len(faces))}
    if len(comps) == 1:
        return True
    for c in comps:
        fs = [i for i in range(len(faces)) if find(i) == c]
        edges = len([h for h in glue if find(face_of[h]) == c]) // 2
        chi = len(fs) - edges
        genus2 = 2 - chi - 1
        p = sum(1 for i in fs if i in punct)
        if genus2 == 0 and p <= 1:
            return False
    return True


def _independent_decorated_count(n: int) -> int:
    codes = set()
    for perm in itertools.permutations(range(2, n + 1)):
        beta = (1, *perm)
        for signs in itertools.product((1, -1), repeat=n):
            rot, pair, col = ribbon_graph(n, beta, signs)
            faces = face_cycles(rot, pair)
            for k in range(len(faces) + 1):
                for punct in itertools.combinations(range(len(faces)), k):
                    punct = set(punct)
                    if any(len(f) == 2 and i not in punct for i, f in enumerate(faces)):
                        continue
                    if not (_side_ok(faces, rot, pair, col, punct, 0) and _side_ok(faces, rot, pair, col, punct, 1)):
                        continue
                    # mark corners of punctured faces; corners are unordered so mirror images agree
                    corners = set()
                    for i in punct:
                        for h in faces[i]:
                            corners.add(frozenset((pair[h], rot[pair[h]])))
                    codes.add(_marked_code(rot, pair, col, corners))
    return len(codes)


def _marked_code(rot, pair, col, corners):
    inv_rot = {v: k for k, v in rot.items()}
    best = None
    for r in (rot, inv_rot):
        for swap in (0, 1):
            for root in rot:
                label, order, i = {root: 0}, [root], 0
                while i < len(order):
                    for nb in (r[order[i]], pair[order[i]]):
                        if nb not in label:
                            label[nb] = len(order)
                            order.append(nb)
                    i += 1
                code = tuple((label[r[h]], label[pair[h]], col[h] ^ swap, frozenset((h, r[h])) in corners)
                             for h in order)
                if best is None or code < best:
                    best = code
    return best


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_undecorated_classes_match_isomorphism_count(n):
    codes = set()
    for perm in itertools.permutations(range(2, n + 1)):
        for signs in itertools.product((1, -1), repeat=n):
            codes.add(ribbon_code(*ribbon_graph(n, (1, *perm), signs)))
    assert len(undecorated_keys(n)) == len(codes)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_decorated_classes_match_isomorphism_count(n):
    got = sum(1 for _ in enumerate_configs(EnumFilter(n, require_filling=True)))
    assert got == _independent_decorated_count(n) == FROZEN_COUNTS[n]


@pytest.mark.parametrize("n", [5, 6])
def test_frozen_counts(n):
    assert len(corpus(n)) == FROZEN_COUNTS[n]


def test_keys_decode_to_canonical_forms():
    for n in range(1, 6):
        for k in undecorated_keys(n):
            c = decode_key(n, k)
            assert canonicalize(c) == c


@pytest.mark.parametrize("shards", [2, 3, 5])
def test_shards_partition(shards):
    n = 6
    whole = undecorated_keys(n)
    parts = [undecorated_keys(n, shards, k) for k in range(shards)]
    assert sorted(itertools.chain(*parts)) == sorted(whole)
    assert sum(map(len, parts)) == len(whole)


def test_enumeration_is_canonical_and_distinct():
    seen = set()
    for cfg, d in corpus(5):
        assert canonicalize(cfg) == cfg
        assert d.bigon_free and d.filling and d.alpha_essential and d.beta_essential
        seen.add(cfg)
    assert len(seen) == FROZEN_COUNTS[5]


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        list(enumerate_configs(EnumFilter(11)))


def test_min_filling_values():
    # least crossing numbers of filling pairs, found by exhaustive search
    assert min_filling(2, 0, 6).q3 == 4
    assert min_filling(1, 2, 6).q3 == 2
    assert min_filling(0, 5, 6).q3 == 4
    assert min_filling(3, 0, 6).q3 == 5


@pytest.mark.parametrize("g,p", [(2, 0), (1, 2), (0, 5), (1, 3), (0, 6)])
def test_min_filling_respects_floor_and_is_monotone(g, p):
    prev = None
    for n_max in range(1, 7):
        r = min_filling(g, p, n_max)
        if r.q3 is not None:
            assert r.q3 >= 2 * g + p - 2
            assert r.q3 <= n_max
            d = validate(r.witness)
            assert (d.genus, d.punctures) == (g, p) and d.filling
        if prev is not None:
            assert r.q3 is not None and r.q3 <= prev
        prev = r.q3 if r.q3 is not None else prev


def test_min_filling_sporadic_rejected():
    with pytest.raises(SporadicSurface):
        min_filling(1, 0, 4)


def test_genus_two_witness_faces():
    w = min_filling(2, 0, 6).witness
    assert len(validate(w).bigon_faces) == 0
    from fillpair.pair import trace
    assert len(trace(w).faces) == w.n + 2 - 4


def test_swap_roles_is_an_involution_up_to_form():
    for cfg, _ in corpus(5):
        assert canonicalize(swap_roles(swap_roles(cfg))) == canonicalize(cfg)
        assert canonicalize(swap_roles(cfg)) == cfg


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_distance_three_witnesses_revalidate(n):
    for cfg, d in corpus(n):
        if not nonsporadic(d):
            continue
        v = classify_distance(cfg)
        assert v.value in (3, GE4)
        if v.value == 3:
            assert v.witness is not None and revalidate_witness(cfg, v.witness)
        else:
            assert v.conditional and v.witness is None


def test_conditional_verdict_example():
    # no curve off either curve meets the other at most 14 times without filling
    cfg = PairConfig.build([1, 2, 3, 4], [-1, -1, -1, -1], {0: (0, 1), 2: (0, 1)})
    v = classify_distance(canonicalize(cfg), radius=14)
    assert v.value == GE4 and v.conditional
    assert "14" in v.label


def test_non_filling_is_two():
    cfg = PairConfig.build([1, 2], [1, 1], {0: (1, 0)})
    d = validate(cfg)
    assert not d.filling
    assert classify_distance(cfg).value == 2
