import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fillpair.pair import (BigonReductionError, ConfigError, PairConfig, apply_relabel, bigon_faces,
                           canonicalize, reduce_bigons, reduce_face, relabelings, trace, transport_regions,
                           twist_pair, validate)

from helpers import decorated_configs, raw_configs

TORUS = PairConfig.build([1], [1])
SPHERE = PairConfig.build([1, 2], [1, -1])


def test_torus_square():
    s = trace(TORUS)
    assert s.face_lengths == [4]
    assert (s.genus, s.puncture_count) == (1, 0)
    d = validate(TORUS)
    assert d.bigon_free and d.filling and d.connected


def test_two_circles_on_sphere():
    s = trace(SPHERE)
    assert s.genus == 0
    assert s.face_lengths == [2, 2, 2, 2]
    assert not validate(SPHERE).bigon_free
    assert reduce_bigons(SPHERE).n == 0


def test_bad_permutation_rejected():
    with pytest.raises(ConfigError):
        PairConfig.build([1, 1], [1, 1])
    with pytest.raises(ConfigError):
        PairConfig.build([1, 2], [1, 0])


def test_finger_move_bigon_reduces_to_square():
    # a finger move on the torus square makes two bigons; puncturing one leaves a single real bigon
    cfg = PairConfig.build([1, 2, 3], [1, 1, -1], {2: (0, 1)})
    assert len(bigon_faces(cfg)) == 1
    out = reduce_bigons(cfg)
    assert out.n == 1
    s = trace(out)
    assert s.face_lengths == [4]
    assert out.n - 2 * out.n + len(s.faces) == 2 - 2 * s.traced_genus


def test_decorated_bigon_not_reduced():
    cfg = PairConfig.build([1, 2, 3], [1, 1, -1], {2: (0, 1)})
    with pytest.raises(BigonReductionError):
        reduce_face(cfg, 2)


def test_mirror_torus():
    assert canonicalize(PairConfig.build([1], [-1])) == canonicalize(TORUS)


@settings(max_examples=300, deadline=None)
@given(decorated_configs())
def test_face_lengths_and_euler(cfg):
    s = trace(cfg)
    assert sum(s.face_lengths) == 4 * cfg.n
    assert all(ln % 2 == 0 and ln >= 2 for ln in s.face_lengths)
    if s.connected:
        assert cfg.n - 2 * cfg.n + len(s.faces) == 2 - 2 * s.traced_genus
    extra_g = sum(h for _, h, _ in cfg.decorations)
    assert s.genus == s.traced_genus + extra_g
    assert s.puncture_count == sum(k for _, _, k in cfg.decorations)


@settings(max_examples=200, deadline=None)
@given(decorated_configs())
def test_canonicalize_idempotent(cfg):
    c = canonicalize(cfg)
    assert canonicalize(c) == c


@settings(max_examples=150, deadline=None)
@given(decorated_configs(max_n=6), st.randoms(use_true_random=False))
def test_canonical_form_ignores_labeling(cfg, rnd):
    t = rnd.choice(list(relabelings(cfg.n)))
    new, cmap = apply_relabel(cfg, t)
    new = transport_regions(cfg, trace(cfg), new, cmap)
    assert canonicalize(new) == canonicalize(cfg)
    a, b = validate(new), validate(cfg)
    ess = (b.beta_essential, b.alpha_essential) if t.swap else (b.alpha_essential, b.beta_essential)
    assert (a.alpha_essential, a.beta_essential) == ess
    for f in ("connected", "bigon_free", "filling", "genus", "punctures"):
        assert getattr(a, f) == getattr(b, f)
    assert len(a.bigon_faces) == len(b.bigon_faces)


@settings(max_examples=150, deadline=None)
@given(raw_configs(max_n=7))
def test_mirror_is_a_symmetry(cfg):
    mirror = PairConfig(cfg.n, cfg.beta_order, tuple(-s for s in cfg.signs))
    assert canonicalize(mirror) == canonicalize(cfg)


@settings(max_examples=200, deadline=None)
@given(decorated_configs(max_n=8))
def test_reduce_bigons(cfg):
    out = reduce_bigons(cfg)
    assert (cfg.n - out.n) % 2 == 0 and out.n <= cfg.n
    assert (cfg.n - out.n) // 2 <= cfg.n // 2
    assert not bigon_faces(out)
    if not bigon_faces(cfg):
        assert out == cfg
    elif out.n:  # an empty intersection carries no surface
        s0, s1 = trace(cfg), trace(out)
        assert (s0.genus, s0.puncture_count) == (s1.genus, s1.puncture_count)


@settings(max_examples=200, deadline=None)
@given(decorated_configs(max_n=7, max_extra=1))
def test_filling_means_disk_faces(cfg):
    d = validate(cfg)
    s = trace(cfg)
    if d.filling:
        assert all(r.genus == 0 and len(r.faces) == 1 and r.punctures <= 1 for r in s.regions)
    if d.filling and d.bigon_free and d.alpha_essential and d.beta_essential and d.genus * 3 + d.punctures > 4:
        assert cfg.n >= 2 * d.genus + d.punctures - 2


def test_twist_pair_on_torus():
    for m in range(1, 6):
        t = twist_pair(TORUS, m)
        assert t.n == m
        assert validate(t).bigon_free and trace(t).genus == 1


@settings(max_examples=60, deadline=None)
@given(raw_configs(min_n=1, max_n=4), st.integers(1, 3))
def test_twist_pair_is_minimal(cfg, m):
    cfg = reduce_bigons(cfg)
    if cfg.n == 0 or not validate(cfg).connected:
        return
    t = twist_pair(cfg, m)
    assert t.n == m * cfg.n ** 2
    d = validate(t)
    assert d.connected and d.bigon_free
    assert d.genus <= trace(cfg).genus


def test_random_relabel_of_genus_two_pair():
    from fillpair.oracle import min_filling
    w = min_filling(2, 0, 6).witness
    rnd = random.Random(7)
    for _ in range(20):
        new, _ = apply_relabel(w, rnd.choice(list(relabelings(w.n))))
        assert canonicalize(new) == canonicalize(w)
    assert len(trace(w).faces) == w.n + 2 - 4
