import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fillpair import formats
from fillpair.bounds import SurfaceSig
from fillpair.pair import canonicalize
from fillpair.tracks import (Lemma51Violation, RegionSpec, Switch, TrackError, TrainTrack, VertexCycle,
                             carried_curve, check_lemma51, counting_measure, extreme_rays, is_extreme,
                             load_corpus, realize_pair, track_from_pair, validate_track, vertex_cycle_distance_report,
                             vertex_cycles)

from helpers import corpus

CORPUS = load_corpus()


def circle_track():
    return TrainTrack(1, (Switch(((0, 1),), ((0, 0),)),), SurfaceSig(0, 4),
                      (RegionSpec(((0, 0),), 0, 2), RegionSpec(((0, 1),), 0, 2)), "circle")


def two_circles():
    sws = (Switch(((0, 1),), ((0, 0),)), Switch(((1, 1),), ((1, 0),)))
    regs = (RegionSpec(((0, 0),), 0, 2), RegionSpec(((1, 1),), 0, 2), RegionSpec(((0, 1), (1, 0)), 0, 1))
    return TrainTrack(2, sws, SurfaceSig(0, 5), regs, "two circles")


def kernel_dim_and_vector(rows, support):
    """Gaussian elimination over the rationals on the columns in ``support``."""
    cols = sorted(support)
    mat = [[Fraction(r[c]) for c in cols] for r in rows]
    pivots, r = [], 0
    for c in range(len(cols)):
        p = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        mat[r] = [x / mat[r][c] for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                mat[i] = [a - mat[i][c] * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(len(cols)) if c not in pivots]
    if len(free) != 1:
        return len(free), None
    v = [Fraction(0)] * len(cols)
    v[free[0]] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -mat[i][free[0]]
    return 1, dict(zip(cols, v))


def brute_rays(rows, m):
    """Extreme rays are exactly the positive vectors with a one-dimensional kernel on a minimal support."""
    out = set()
    for k in range(1, m + 1):
        for supp in itertools.combinations(range(m), k):
            dim, v = kernel_dim_and_vector(rows, supp)
            if dim != 1:
                continue
            if all(x > 0 for x in v.values()) or all(x < 0 for x in v.values()):
                vec = [abs(v.get(i, 0)) for i in range(m)]
                den = 1
                for x in vec:
                    den = den * x.denominator // math.gcd(den, x.denominator)
                ints = [int(x * den) for x in vec]
                g = 0
                for x in ints:
                    g = math.gcd(g, x)
                out.add(tuple(x // g for x in ints))
    return sorted(out)


def test_circle_component():
    tau = circle_track()
    d = validate_track(tau)
    assert d.valence_ok and d.recurrent and d.complementary_ok
    vcs = vertex_cycles(tau)
    assert [v.measure for v in vcs] == [(1,)]


def test_orthant_gives_two_vertex_cycles():
    tau = two_circles()
    assert validate_track(tau).recurrent
    assert sorted(v.measure for v in vertex_cycles(tau)) == [(0, 1), (1, 0)]
    a, b = vertex_cycles(tau)
    assert realize_pair(tau, a, b).config.n == 0


def test_forced_zero_is_not_recurrent():
    # b0 = b1 + b2 and b1 = b0 force b2 = 0
    rows = [[1, -1, -1], [-1, 1, 0]]
    rays = extreme_rays(rows, 3)
    assert all(r[2] == 0 for r in rays)


def test_wrong_surface_rejected():
    tau = TrainTrack(1, (Switch(((0, 1),), ((0, 0),)),), SurfaceSig(2, 0))
    with pytest.raises(TrackError):
        validate_track(tau)


def test_dangling_end_rejected():
    with pytest.raises(TrackError):
        TrainTrack.from_record({"kind": "track", "genus": 0, "punctures": 4, "branches": 2,
                                "switches": [{"in": [[0, 1]], "out": [[0, 0]]}]})


def test_lemma51_violation_detected():
    with pytest.raises(Lemma51Violation):
        check_lemma51(VertexCycle((2,), ((0, 1), (0, 1))))
    with pytest.raises(Lemma51Violation):
        check_lemma51(VertexCycle((3,), ((0, 1), (0, -1), (0, 1))))
    check_lemma51(VertexCycle((2,), ((0, 1), (0, -1))))


@pytest.mark.parametrize("tau", CORPUS, ids=lambda t: t.name)
def test_corpus_tracks_valid(tau):
    d = validate_track(tau)
    assert d.valence_ok and d.generic and d.branch_bound_ok and d.complementary_ok and d.recurrent
    assert tau.branches <= 18 * tau.ambient.genus + 6 * tau.ambient.punctures - 18
    assert TrainTrack.from_record(tau.to_record()) == tau
    assert formats.loads(formats.dumps([tau.to_record()]))[0] == tau.to_record()


@pytest.mark.parametrize("tau", CORPUS, ids=lambda t: t.name)
def test_vertex_cycles_against_minimal_supports(tau):
    vcs = vertex_cycles(tau)
    assert sorted(v.measure for v in vcs) == brute_rays(tau.switch_rows, tau.branches)
    for v in vcs:
        assert tau.satisfies_switch_conditions(v.measure)
        assert is_extreme(tau.switch_rows, v.measure)
        assert counting_measure(tau, v.curve) == v.measure
        check_lemma51(v)
        assert all(x <= 2 for x in v.measure)


@pytest.mark.parametrize("tau", CORPUS, ids=lambda t: t.name)
def test_realized_pairs(tau):
    vcs = vertex_cycles(tau)
    bound = 4 * tau.branches
    for a, b in itertools.combinations(vcs, 2):
        rp = realize_pair(tau, a, b)
        assert rp.raw_crossings <= bound
        assert rp.config.n <= rp.raw_crossings
        assert (rp.raw_crossings - rp.config.n) % 2 == 0


def test_realize_needs_distinct_cycles():
    tau = CORPUS[0]
    v = vertex_cycles(tau)[0]
    with pytest.raises(TrackError):
        realize_pair(tau, v, v)


@pytest.mark.parametrize("tau", CORPUS[:2], ids=lambda t: t.name)
def test_branch_relabel_invariance(tau):
    rng = random.Random(4)
    perm = list(range(tau.branches))
    rng.shuffle(perm)
    other = tau.relabeled(perm)
    assert validate_track(other).recurrent
    mine = sorted(v.measure for v in vertex_cycles(tau))
    theirs = sorted(tuple(v.measure[perm[b]] for b in range(tau.branches)) for v in vertex_cycles(other))
    assert mine == theirs
    va, vb = vertex_cycles(tau)[:2]
    moved = {tuple(v.measure[perm[b]] for b in range(tau.branches)): v for v in vertex_cycles(other)}
    x = realize_pair(tau, va, vb).config
    y = realize_pair(other, moved[va.measure], moved[vb.measure]).config
    assert canonicalize(x) == canonicalize(y)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.data())
def test_smoothed_pair_round_trip(n, data):
    """Smoothing a pair into a track and realizing its two curves gives the pair back."""
    cfg = data.draw(st.sampled_from(corpus(n)))[0]
    ch = data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    tau = track_from_pair(cfg, ch)
    a = [1] * n + [0] * n + [1] * n
    b = [0] * n + [1] * n + [1] * n
    va = VertexCycle(tuple(a), tuple((x, d) for x, _, d in carried_curve(tau, a)))
    vb = VertexCycle(tuple(b), tuple((x, d) for x, _, d in carried_curve(tau, b)))
    rp = realize_pair(tau, va, vb)
    assert rp.raw_crossings == n
    assert canonicalize(rp.config) == canonicalize(cfg)


def test_distance_report_on_corpus():
    for tau in CORPUS:
        rep = vertex_cycle_distance_report(tau)
        assert rep.radius == 2 * 4 * tau.branches
        n = len(vertex_cycles(tau))
        assert len(rep.rows) == n * (n + 1) // 2
        assert not rep.flagged
        assert all(not r.verdict.startswith(">=4") for r in rep.rows)
