"""Exhaustive enumeration of small configurations and the searches built on it.

Undecorated configurations are enumerated in bulk: every raw encoding with
``beta_order[0] == 1`` and a positive first sign is mapped to the least
re-encoding under the full relabeling group (the same group and the same order
as :func:`fillpair.pair.canonicalize`), vectorized with numpy.  Puncture
decorations are then distributed over the faces of each class and deduplicated
through the automorphisms of the class.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .bounds import BoundParams, SporadicSurface, SurfaceSig, thm12_bound
from .pair import PairConfig, PairDiagnostics, _side_components, automorphisms, trace, validate

DEFAULT_MAX_N = 10
_BLOCK = 1 << 16


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumFilter:
    n: int
    require_connected: bool = True
    require_bigon_free: bool = True
    require_essential: bool = True
    require_filling: bool = False
    genus: int | None = None
    punctures: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")


# -- undecorated classes -------------------------------------------------------

def _raw_block(n: int, prefix: int | None):
    """All raw encodings (0-based beta, sign bits) with a given second beta entry."""
    rest = list(range(1, n))
    if n == 1:
        perms = np.zeros((1, 1), dtype=np.int64)
    else:
        heads = [prefix] if prefix is not None else rest
        rows = []
        for h in heads:
            others = [c for c in rest if c != h]
            for p in itertools.permutations(others):
                rows.append((0, h) + p)
        perms = np.array(rows, dtype=np.int64).reshape(-1, n)
    sign_rows = np.array(list(itertools.product((0, 1), repeat=n - 1)), dtype=np.int64).reshape(1 << (n - 1), n - 1)
    sign_rows = np.hstack([np.ones((len(sign_rows), 1), dtype=np.int64), sign_rows])
    B = np.repeat(perms, len(sign_rows), axis=0)
    S = np.tile(sign_rows, (len(perms), 1))
    return B, S


def _keys(B: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Least key over the relabeling group for each row; see :func:`decode_key`."""
    N, n = B.shape
    ar = np.arange(n)
    weights = n ** np.arange(n - 2, -1, -1, dtype=np.int64) if n > 1 else np.zeros(0, dtype=np.int64)
    bits = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    full = (1 << n) - 1
    best = np.full(N, np.iinfo(np.int64).max, dtype=np.int64)
    rows = np.arange(N)[:, None]
    for swap, start, ad, bd in itertools.product((False, True), range(n), (1, -1), (1, -1)):
        L = (ad * (ar - start)) % n
        if not swap:
            second = B if bd > 0 else B[:, ::-1]
            ns = L[second]
            sg = np.empty_like(S)
            sg[:, L] = S
        else:
            lab = np.empty_like(B)
            lab[rows, B] = L[None, :]
            second = ar if bd > 0 else ar[::-1]
            ns = lab[:, second]
            sg = np.empty_like(S)
            sg[rows, lab] = S
        p = np.argmin(ns, axis=1)
        ns = ns[rows, (p[:, None] + ar[None, :]) % n]
        bkey = ns[:, 1:] @ weights
        skey = sg @ bits
        skey = np.minimum(skey, full - skey)
        np.minimum(best, bkey * (1 << n) + skey, out=best)
    return best


def decode_key(n: int, key: int) -> PairConfig:
    skey, bkey = key % (1 << n), key >> n
    digits = []
    for _ in range(n - 1):
        digits.append(bkey % n)
        bkey //= n
    beta = [1] + [d + 1 for d in reversed(digits)]
    signs = [1 if (skey >> (n - 1 - i)) & 1 else -1 for i in range(n)]
    return PairConfig(n, tuple(beta), tuple(signs))


def shard_prefixes(n: int, shards: int, shard: int) -> list[int | None]:
    if not 0 <= shard < shards:
        raise ValueError("shard index out of range")
    if n <= 2:
        return [None] if shard == 0 else []
    return [h for h in range(1, n) if (h - 1) % shards == shard]


def undecorated_keys(n: int, shards: int = 1, shard: int = 0, max_n: int = DEFAULT_MAX_N) -> list[int]:
    """Sorted canonical keys of the classes owned by one shard.

    A class is owned by the shard holding the second beta entry of its least
    encoding, so shards are disjoint and their union is the full census.
    """
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the enumeration budget {max_n}")
    if n < 1:
        raise ValueError("n must be at least 1")
    found = set()
    for h in shard_prefixes(n, shards, shard):
        B, S = _raw_block(n, h)
        for i in range(0, len(B), _BLOCK):
            k = np.unique(_keys(B[i:i + _BLOCK], S[i:i + _BLOCK]))
            if n > 2 and h is not None:
                second = (k >> n) // n ** (n - 2)
                k = k[second == h]
            found.update(int(x) for x in k)
    return sorted(found)


# -- decorated variants ----------------------------------------------------------

@dataclass
class _ClassData:
    base: PairConfig
    faces: int
    bigon_mask: int
    sides: list  # per curve: list of (face mask, genus) or [] when one side
    face_perms: list  # automorphism face permutations


def _class_data(base: PairConfig) -> _ClassData:
    surf = trace(base)
    F = len(surf.faces)
    bigon = sum(1 << f for f, c in enumerate(surf.faces) if len(c) == 2)
    sides = []
    for cut_alpha in (True, False):
        comps = _side_component_faces(base, surf, cut_alpha)
        sides.append(comps if len(comps) > 1 else [])
    perms = [tuple(p[f] for f in range(F)) for _, p in automorphisms(base)]
    return _ClassData(base, F, bigon, sides, perms)


def _side_component_faces(cfg: PairConfig, surf, cut_alpha: bool):
    """Face mask and genus of each side of a curve, on an undecorated surface."""
    F = len(surf.faces)
    parent = list(range(F))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    glue = range(cfg.n, 2 * cfg.n) if cut_alpha else range(cfg.n)
    for e in glue:
        d1, d2 = cfg.edge_darts(e)
        parent[find(surf.face_of_dart[d1])] = find(surf.face_of_dart[d2])
    acc: dict[int, list[int]] = {}
    for f in range(F):
        a = acc.setdefault(find(f), [0, 1, 0])  # mask, euler characteristic, boundary circles
        a[0] |= 1 << f
    for f in range(F):
        if find(f) != f:
            acc[find(f)][1] += 1
    for e in glue:
        acc[find(surf.face_of_dart[cfg.edge_darts(e)[0]])][1] -= 1
    for d in cfg.edge_darts(0 if cut_alpha else cfg.n):
        acc[find(surf.face_of_dart[d])][2] += 1
    return [(m, (2 - chi - b) // 2) for m, chi, b in acc.values()]


def _popcount(a: np.ndarray) -> np.ndarray:
    c = np.zeros_like(a)
    x = a.copy()
    while x.any():
        c += x & 1
        x >>= 1
    return c


def _puncture_masks(cd: _ClassData, flt: EnumFilter) -> list[int]:
    """Admissible once-per-face puncture sets, one per automorphism orbit."""
    F = cd.faces
    m = np.arange(1 << F, dtype=np.int64)
    ok = np.ones(len(m), dtype=bool)
    if flt.require_bigon_free:
        ok &= (m & cd.bigon_mask) == cd.bigon_mask
    if flt.punctures is not None:
        ok &= _popcount(m) == flt.punctures
    if flt.require_essential:
        for comps in cd.sides:
            for fm, genus in comps:
                if genus == 0:
                    ok &= _popcount(m & fm) >= 2
    m = m[ok]
    for perm in cd.face_perms:
        img = np.zeros_like(m)
        for f in range(F):
            img |= ((m >> f) & 1) << perm[f]
        m = m[_subset_key_le(m, img, F)]
    return [int(x) for x in m]


def _subset_key_le(a: np.ndarray, b: np.ndarray, F: int) -> np.ndarray:
    """``sorted(a) <= sorted(b)`` as tuples of face ids, elementwise."""
    diff = a ^ b
    out = np.ones(len(a), dtype=bool)
    nz = diff != 0
    if not nz.any():
        return out
    low = diff & -diff  # least face where the sets differ; they agree below it
    above = ~((low << 1) - 1)
    a_rest = (a & above) != 0
    b_rest = (b & above) != 0
    # the set holding ``low`` is smaller unless the other one has run out of faces
    a_le = np.where((a & low) != 0, b_rest, ~a_rest)
    out[nz] = a_le[nz]
    return out


def _multiset_variants(cd: _ClassData, flt: EnumFilter) -> list[tuple[int, ...]]:
    """Puncture counts per face with a fixed total, one per automorphism orbit."""
    F, p = cd.faces, flt.punctures
    out = []
    for combo in itertools.combinations_with_replacement(range(F), p):
        cnt = [0] * F
        for f in combo:
            cnt[f] += 1
        if flt.require_bigon_free and any(cnt[f] == 0 for f in range(F) if cd.bigon_mask >> f & 1):
            continue
        if flt.require_essential and any(
                genus == 0 and sum(cnt[f] for f in range(F) if fm >> f & 1) < 2
                for comps in cd.sides for fm, genus in comps):
            continue
        own = _dec_key(cnt, range(F))
        if all(own <= _dec_key(cnt, perm) for perm in cd.face_perms):
            out.append(tuple(cnt))
    return out


def _dec_key(cnt, perm) -> tuple:
    return tuple(sorted((perm[f], 0, k) for f, k in enumerate(cnt) if k))


def enumerate_configs(flt: EnumFilter, shards: int = 1, shard: int = 0,
                      max_n: int = DEFAULT_MAX_N) -> Iterator[PairConfig]:
    """Canonical configurations passing the filter, in a fixed order.

    Faces carry at most one puncture each unless an explicit puncture total is
    asked for without requiring the pair to fill; then punctures are spread over
    the faces with repetition.  Handles and merged regions are never added.
    """
    multi = flt.punctures is not None and not flt.require_filling
    for key in undecorated_keys(flt.n, shards, shard, max_n):
        base = decode_key(flt.n, key)
        cd = _class_data(base)
        genus = (2 - (cd.faces - flt.n)) // 2
        if flt.genus is not None and genus != flt.genus:
            continue
        if multi:
            variants = _multiset_variants(cd, flt)
        else:
            variants = [tuple(m >> f & 1 for f in range(cd.faces)) for m in _puncture_masks(cd, flt)]
        decorated = sorted(_dec_key(cnt, range(cd.faces)) for cnt in variants)
        for decs in decorated:
            yield base.with_regions({f: (h, k) for f, h, k in decs}) if decs else base


# -- searches ----------------------------------------------------------------------

@dataclass
class FillingRecord:
    genus: int
    punctures: int
    n_max: int
    q3: int | None
    witness: PairConfig | None = None

    @property
    def q3_label(self) -> str:
        return str(self.q3) if self.q3 is not None else f"none <= {self.n_max}"


def min_filling(g: int, p: int, n_max: int, max_n: int = DEFAULT_MAX_N,
                allow_sporadic: bool = False) -> FillingRecord:
    """Least crossing number of a filling pair on the surface of genus g with p punctures."""
    if SurfaceSig(g, p).sporadic and not allow_sporadic:
        raise SporadicSurface(f"S_{{{g},{p}}} is sporadic")
    if n_max > max_n:
        raise BudgetExceeded(f"n_max={n_max} exceeds the enumeration budget {max_n}")
    for n in range(1, n_max + 1):
        # faces = n + 2 - 2g must hold at least the p punctures
        if n + 2 - 2 * g < max(p, 1):
            continue
        flt = EnumFilter(n, require_filling=True, genus=g, punctures=p)
        for cfg in enumerate_configs(flt, max_n=max_n):
            d = validate(cfg)
            if d.filling and d.bigon_free and d.alpha_essential and d.beta_essential \
                    and (d.genus, d.punctures) == (g, p):
                return FillingRecord(g, p, n_max, n, cfg)
    return FillingRecord(g, p, n_max, None)


GE4 = ">=4"


@dataclass
class DistanceWitness:
    gamma_beta: PairConfig  # (gamma, other curve) as a configuration
    drawing: object
    swapped: bool  # gamma was drawn off beta instead of off alpha
    source: str  # "dual-cycle" or "normal-search"


@dataclass
class DistanceVerdict:
    value: int | str
    radius: int
    witness: DistanceWitness | None = None
    exhausted: bool = False  # a search budget ran out before the radius was covered

    @property
    def label(self) -> str:
        if self.value == GE4:
            return f">=4 within radius {self.radius}" + (" (budget exhausted)" if self.exhausted else "")
        return str(self.value)

    @property
    def conditional(self) -> bool:
        return self.value == GE4


def swap_roles(cfg: PairConfig) -> PairConfig:
    from .pair import Relabel, apply_relabel, transport_regions
    new, cmap = apply_relabel(cfg, Relabel(True, 0, 1, 1, 1))
    return transport_regions(cfg, trace(cfg), new, cmap)


def revalidate_witness(cfg: PairConfig, w: DistanceWitness) -> bool:
    """Rebuild ``(gamma, beta)`` from the drawing with an independent overlay and re-check it."""
    from .path import ReplayError, _overlay
    src = swap_roles(cfg) if w.swapped else cfg
    try:
        ov = _overlay(src, w.drawing, w.gamma_beta)
    except (ReplayError, ValueError):
        return False
    if ov.regions != {(r.faces, r.genus, r.punctures) for r in trace(w.gamma_beta).regions}:
        return False
    d = validate(w.gamma_beta)
    return d.bigon_free and d.alpha_essential and not d.filling


def _witness_search(src: PairConfig, radius: int, cycle_limit: int, budget: int):
    """A curve off the first curve of ``src`` meeting the second at most ``radius`` times, not filling with it."""
    from .curves import SearchExhausted, normal_drawings
    from .cutdual import (ExtractionError, _check_candidate, build_graph, cut, cycle_crossings, cycles,
                          extract_curve, parallel_classes)
    diag = validate(src)
    cs = cut(src, diag)
    classes = parallel_classes(cs)
    accept = lambda c, d: d.bigon_free and d.alpha_essential and not d.filling
    for doubled in ((True, False) if cs.punctured else (False,)):
        g = build_graph(cs, classes, doubled)
        for cyc in cycles(g, (), limit=cycle_limit):
            if sum(classes[g.edges[e].cls].mass for e, _ in cyc) > radius:
                continue
            try:
                ex = extract_curve(cyc, cs, classes, g, None, accept)
            except ExtractionError:
                continue
            return DistanceWitness(ex.gamma_beta, ex.drawing, False, "dual-cycle"), False
    left = [budget]
    try:
        for w in range(1, radius + 1):
            for drawing in normal_drawings(src, cs.surface, w, left):
                left[0] -= 1
                if left[0] < 0:
                    return None, True
                r = _check_candidate(cs, drawing)
                if r is not None and r[1].connected and accept(*r):
                    return DistanceWitness(r[0], drawing, False, "normal-search"), False
    except SearchExhausted:
        return None, True
    return None, False


def classify_distance(cfg: PairConfig, radius: int | None = None, cycle_limit: int = 256,
                      budget: int = 100_000) -> DistanceVerdict:
    """2, 3 (with a re-validated witness) or the conditional verdict ``>=4`` within the radius."""
    diag = validate(cfg)
    if not diag.bigon_free or cfg.n == 0:
        raise ValueError("classify_distance needs a bigon-free configuration with crossings")
    if SurfaceSig(diag.genus, diag.punctures).sporadic:
        raise SporadicSurface("curve-graph distance is not interpreted on sporadic surfaces")
    radius = 2 * cfg.n if radius is None else radius
    if not diag.filling:
        return DistanceVerdict(2, radius)
    exhausted = False
    for swapped in (False, True):
        src = swap_roles(cfg) if swapped else cfg
        w, ex = _witness_search(src, radius, cycle_limit, budget)
        exhausted |= ex
        if w is not None:
            w.swapped = swapped
            if not revalidate_witness(cfg, w):
                raise AssertionError("distance-3 witness failed independent re-validation")
            return DistanceVerdict(3, radius, w)
    return DistanceVerdict(GE4, radius, exhausted=exhausted)


@dataclass
class ScanEntry:
    config: PairConfig
    kind: str  # "parameter-falsification" or "unresolved"
    detail: dict = field(default_factory=dict)


@dataclass
class ScanReport:
    genus: int
    punctures: int
    k: int
    bound: object  # mpmath value of the parameterized bound
    n_scanned: int
    configs: int
    entries: list[ScanEntry] = field(default_factory=list)
    params: BoundParams = BoundParams()


def _girth_ratio(cfg: PairConfig) -> dict:
    from .cutdual import build_graph, cut, girth, parallel_classes
    cs = cut(cfg)
    g = build_graph(cs, parallel_classes(cs), bool(cs.punctured))
    gi = girth(g, ())
    nv = len(g.vertices)
    ratio = None if gi is None or nv < 2 else gi / math.log2(nv)
    return {"girth": gi, "vertices": nv, "girth_over_log2_vertices": ratio, "mode": g.mode}


def thm12_scan(g: int, p: int, params: BoundParams, k: int, n_max: int, radius: int | None = None,
               max_n: int = DEFAULT_MAX_N) -> ScanReport:
    """Look for pairs below the parameterized bound that are still too far apart.

    Entries for k=3 are filling pairs under the bound: they falsify the chosen
    parameters, not the underlying inequality, whose constants are unspecified.
    Entries for k=4 are filling pairs for which no distance-3 witness was found.
    """
    if k not in (3, 4):
        raise ValueError("k must be 3 or 4")
    sig = SurfaceSig(g, p)
    if sig.sporadic:
        raise SporadicSurface(f"S_{{{g},{p}}} is sporadic")
    bound = thm12_bound(sig.complexity, params, k)
    top = min(n_max, int(math.ceil(bound)) - 1)
    rep = ScanReport(g, p, k, bound, max(top, 0), 0, params=params)
    for n in range(1, top + 1):
        flt = EnumFilter(n, genus=g, punctures=p)
        for cfg in enumerate_configs(flt, max_n=max_n):
            d = validate(cfg)
            if (d.genus, d.punctures) != (g, p):
                continue
            rep.configs += 1
            if not d.filling:
                continue
            if k == 3:
                rep.entries.append(ScanEntry(cfg, "parameter-falsification", _girth_ratio(cfg)))
                continue
            v = classify_distance(cfg, radius)
            if v.value != 3:
                rep.entries.append(ScanEntry(cfg, "unresolved", {"verdict": v.label}))
    return rep
