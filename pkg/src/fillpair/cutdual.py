"""Cutting along the first curve, parallel classes of arcs, dual graphs, short curves.

Cutting a filling configuration along ``alpha`` turns ``beta`` into ``n`` arcs,
one per beta edge.  Faces of ``alpha u beta`` with two alpha sides, two beta
sides and nothing inside are *rectangles*; arcs joined by chains of rectangles
are parallel and form a class (a band of strands).  All other faces are the
regions of the cut surface, and each class is an edge between the regions at
its two ends.

A strand of a band is stored with two half-edges: ``dart_in`` sees the face
towards the band's first end ``E0`` and ``dart_out`` the face towards ``E1``.
The direction of ``dart_in`` is called east; it is the same for every strand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .curves import Chord, Drawing, DrawingError, realize, self_crossings, smoothings, is_forward, prune_anchors
from .pair import (PairConfig, PairDiagnostics, TracedSurface, _side_components, is_alpha_dart, trace,
                   validate)


class CutError(ValueError):
    pass


class ExtractionError(RuntimeError):
    """The extraction produced something the theory rules out, or found nothing usable."""


# -- cut surface -------------------------------------------------------------

@dataclass(frozen=True)
class CutSurface:
    config: PairConfig
    surface: TracedSurface
    components: tuple[tuple[int, int, int], ...]  # (genus, punctures, boundary circles)
    rectangles: frozenset[int]
    regions: tuple[int, ...]  # faces that are not rectangles
    punctured: frozenset[int]

    @property
    def arcs(self) -> range:
        return range(self.config.n, 2 * self.config.n)

    @property
    def euler_char(self) -> int:
        return sum(2 - 2 * g - k - b for g, k, b in self.components)

    def sides(self, face: int) -> int:
        return len(self.surface.faces[face]) // 2


def cut(cfg: PairConfig, diag: PairDiagnostics | None = None) -> CutSurface:
    diag = diag or validate(cfg)
    if not (diag.connected and diag.filling and diag.bigon_free):
        raise CutError("requires filling pair")
    surf = trace(cfg)
    comps = []
    for chi, k, b in _side_components(cfg, surf, cut_alpha=True):
        comps.append(((2 - chi - b - k) // 2, k, b))
    rects, regions, punct = set(), [], set()
    for f, cyc in enumerate(surf.faces):
        reg = surf.regions[surf.region_of_face[f]]
        if reg.punctures:
            punct.add(f)
        if len(cyc) == 4 and reg.is_disk:
            rects.add(f)
        else:
            regions.append(f)
    out = CutSurface(cfg, surf, tuple(sorted(comps)), frozenset(rects), tuple(regions), frozenset(punct))
    if out.euler_char != 2 - 2 * surf.genus - surf.puncture_count:
        raise CutError("Euler characteristic changed under cutting")
    return out


# -- parallel classes ----------------------------------------------------------

@dataclass(frozen=True)
class Strand:
    arc: int
    dart_in: int
    dart_out: int


@dataclass(frozen=True)
class ArcClass:
    id: int
    strands: tuple[Strand, ...]
    ends: tuple[int, int]
    cyclic: bool = False

    @property
    def mass(self) -> int:
        return len(self.strands)

    @property
    def members(self) -> list[int]:
        return sorted(s.arc for s in self.strands)

    @property
    def representative(self) -> int:
        return min(s.arc for s in self.strands)


def _across_rectangle(surf: TracedSurface, d: int) -> int:
    """The other beta half-edge of the rectangle containing ``d``."""
    cyc = surf.faces[surf.face_of_dart[d]]
    return cyc[(cyc.index(d) + 2) % 4]


def parallel_classes(cs: CutSurface) -> list[ArcClass]:
    cfg, surf = cs.config, cs.surface
    inv = cfg.involution
    face = surf.face_of_dart
    seen: set[int] = set()
    bands = []

    def walk(d_in):
        strands = []
        while True:
            d_out = inv[d_in]
            strands.append(Strand(cfg.edge_of(d_in), d_in, d_out))
            if face[d_out] not in cs.rectangles:
                return strands
            d_in = _across_rectangle(surf, d_out)
            if cfg.edge_of(d_in) == strands[0].arc:
                return strands

    # open bands start at a strand with a half-edge on a region
    starts = []
    for e in cs.arcs:
        for d in cfg.edge_darts(e):
            if face[d] not in cs.rectangles:
                starts.append(d)
    for d in sorted(starts):
        if cfg.edge_of(d) in seen:
            continue
        strands = walk(d)
        seen.update(s.arc for s in strands)
        bands.append((tuple(strands), (face[strands[0].dart_in], face[strands[-1].dart_out]), False))
    # what is left closes up into annuli of rectangles
    for e in cs.arcs:
        if e in seen:
            continue
        d0 = min(d for d in cfg.edge_darts(e))
        strands = walk(d0)
        rect = min(face[s.dart_in] for s in strands)
        k = next(i for i, s in enumerate(strands) if face[s.dart_in] == rect)
        strands = strands[k:] + strands[:k]
        seen.update(s.arc for s in strands)
        bands.append((tuple(strands), (rect, rect), True))
    bands.sort(key=lambda b: min(s.arc for s in b[0]))
    classes = [ArcClass(i, s, ends, cyc) for i, (s, ends, cyc) in enumerate(bands)]
    if sum(c.mass for c in classes) != cfg.n:
        raise CutError("class masses do not add up to n")
    return classes


def class_count_bound(genus: int, punctures: int) -> int:
    return 6 * genus + 3 * (punctures + 2) - 4


def mass_split(classes: Sequence[ArcClass], xi: int, lam: Fraction) -> tuple[set[int], set[int]]:
    """Classes of mass > n / xi**lam are large.  Decided exactly in integers."""
    if xi < 1:
        raise ValueError("xi must be >= 1")
    lam = Fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    p, q = lam.numerator, lam.denominator
    n = sum(c.mass for c in classes)
    large = {c.id for c in classes if xi ** p * c.mass ** q > n ** q}
    small = {c.id for c in classes} - large
    if len(large) ** q > xi ** p:
        raise ExtractionError("more large classes than xi**lambda")
    return large, small


# -- dual graphs -------------------------------------------------------------

@dataclass(frozen=True)
class DualEdge:
    id: int
    cls: int
    lane: int  # 0 for the single edge of closed mode, 1 or 2 in punctured mode
    ends: tuple[int, int]  # vertices at E0 and E1


@dataclass(frozen=True)
class DualGraph:
    mode: str
    vertices: tuple[tuple[int, int], ...]  # (face, copy)
    edges: tuple[DualEdge, ...]
    u1: int
    u2: int

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for e in self.edges:
            deg[e.ends[0]] += 1
            deg[e.ends[1]] += 1
        return deg

    def average_degree(self) -> Fraction:
        return Fraction(2 * len(self.edges), len(self.vertices))

    def edge_list(self) -> str:
        """Plain edge list: one ``u v class lane`` line per edge, vertices as ``face.copy``."""
        name = [f"{f}.{c}" for f, c in self.vertices]
        lines = [f"# {self.mode} dual graph: {len(self.vertices)} vertices, {len(self.edges)} edges"]
        lines += [f"{name[e.ends[0]]} {name[e.ends[1]]} {e.cls} {e.lane}" for e in self.edges]
        return "\n".join(lines) + "\n"


def _lane_key(s: Strand, lane: int) -> Fraction:
    if lane == 0:
        return Fraction(1, 2)
    x = Fraction(lane, 3)
    return x if is_forward(s.dart_in) else 1 - x


def build_graph(cs: CutSurface, classes: Sequence[ArcClass], doubled: bool) -> DualGraph:
    faces = sorted(set(cs.regions) | {c.ends[0] for c in classes if c.cyclic})
    vertices = []
    for f in faces:
        vertices.append((f, 0))
        if doubled and f not in cs.punctured:
            vertices.append((f, 1))
    vid = {v: i for i, v in enumerate(vertices)}
    edges = []
    for c in classes:
        for lane in ((1, 2) if doubled else (0,)):
            ends = []
            for which, f in enumerate(c.ends):
                if not doubled or f in cs.punctured:
                    copy = 0
                else:
                    # lane 1 comes first along the E0 side, lane 2 first along the E1 side
                    copy = lane - 1 if which == 0 else 2 - lane
                ends.append(vid[(f, copy)])
            edges.append(DualEdge(len(edges), c.id, lane, tuple(ends)))
    u1 = sum(1 for f in faces if f in cs.punctured)
    return DualGraph("punctured" if doubled else "closed", tuple(vertices), tuple(edges), u1, len(faces) - u1)


def dual_graph(cs: CutSurface, classes: Sequence[ArcClass], mode: str) -> DualGraph:
    p = cs.surface.puncture_count
    if mode == "closed":
        if p:
            raise CutError("closed mode needs a surface without punctures")
        return build_graph(cs, classes, doubled=False)
    if mode == "punctured":
        if not p:
            raise CutError("punctured mode needs a punctured surface")
        return build_graph(cs, classes, doubled=True)
    raise CutError(f"unknown mode {mode!r}")


# -- cycles ------------------------------------------------------------------

Cycle = tuple[tuple[int, int], ...]  # (edge id, direction); direction 0 runs E0 -> E1


def _adjacency(g: DualGraph, allowed: set[int]):
    adj = [[] for _ in g.vertices]
    for e in g.edges:
        if e.id not in allowed:
            continue
        u, v = e.ends
        adj[u].append((e.id, 0, v))
        adj[v].append((e.id, 1, u))
    return adj


def _allowed(g: DualGraph, pruned: Iterable[int]) -> set[int]:
    pruned = set(pruned)
    return {e.id for e in g.edges if e.cls not in pruned}


def girth(g: DualGraph, pruned: Iterable[int] = ()) -> int | None:
    """Length of a shortest cycle by breadth-first search from every vertex; loops count 1."""
    adj = _adjacency(g, _allowed(g, pruned))
    best = None
    for root in range(len(g.vertices)):
        dist = {root: 0}
        via = {root: None}
        queue = [root]
        for u in queue:
            for eid, _, w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    via[w] = eid
                    queue.append(w)
                elif eid != via[u]:
                    cand = dist[u] + dist[w] + 1
                    if best is None or cand < best:
                        best = cand
    return best


def _normalize(cyc: Sequence[tuple[int, int]]) -> Cycle:
    L = len(cyc)
    rev = [(e, 1 - d) for e, d in reversed(cyc)]
    cands = []
    for seq in (list(cyc), rev):
        for r in range(L):
            s = seq[r:] + seq[:r]
            cands.append((tuple(e for e, _ in s), tuple(d for _, d in s)))
    ids, dirs = min(cands)
    return tuple(zip(ids, dirs))


def cycles(g: DualGraph, pruned: Iterable[int] = (), max_len: int | None = None,
           limit: int = 64) -> list[Cycle]:
    """Simple cycles by increasing length, ties broken by least normalized edge sequence."""
    adj = _adjacency(g, _allowed(g, pruned))
    nv = len(g.vertices)
    max_len = nv if max_len is None else max_len
    found: set[Cycle] = set()
    out: list[Cycle] = []
    for length in range(1, max_len + 1):
        layer: set[Cycle] = set()
        for s in range(nv):
            # each cycle is found from its least vertex
            stack = [(s, [], {s})]
            while stack:
                u, path, used = stack.pop()
                if len(path) == length:
                    continue
                for eid, d, w in adj[u]:
                    if w == s and len(path) + 1 == length:
                        if any(eid == p for p, _ in path):
                            continue
                        layer.add(_normalize(path + [(eid, d)]))
                    elif w > s and w not in used and len(path) + 1 < length:
                        stack.append((w, path + [(eid, d)], used | {w}))
        for c in sorted(layer, key=lambda c: (tuple(e for e, _ in c), tuple(d for _, d in c))):
            if c not in found:
                found.add(c)
                out.append(c)
                if len(out) >= limit:
                    return out
    return out


def shortest_cycle(g: DualGraph, pruned: Iterable[int] = ()) -> Cycle | None:
    pruned = set(pruned)
    L = girth(g, pruned)
    if L is None:
        return None
    cyc = cycles(g, pruned, max_len=L, limit=10 ** 9)
    best = [c for c in cyc if len(c) == L]
    if not best:
        raise ExtractionError("girth search and cycle enumeration disagree")
    return best[0]


def cycle_vertices(g: DualGraph, cyc: Cycle) -> list[int]:
    return [g.edges[e].ends[d] for e, d in cyc]


# -- drawings from cycles ----------------------------------------------------------

def cycle_crossings(g: DualGraph, classes: Sequence[ArcClass], cyc: Cycle) -> list[tuple[int, Fraction]]:
    """Beta half-edges crossed by the curve following ``cyc``, each seen from the approach side."""
    out = []
    for eid, d in cyc:
        e = g.edges[eid]
        strands = classes[e.cls].strands
        if d == 0:
            out.extend((s.dart_in, _lane_key(s, e.lane)) for s in strands)
        else:
            out.extend((s.dart_out, _lane_key(s, e.lane)) for s in reversed(strands))
    return out


def drawing_from_crossings(cs: CutSurface, xs: Sequence[tuple[int, Fraction]],
                           anchor_sides: dict[int, int] | None = None) -> Drawing:
    """Chords joining consecutive crossings.  ``anchor_sides[face]`` picks the puncture side (0 or 1)."""
    cfg, surf = cs.config, cs.surface
    inv, face = cfg.involution, surf.face_of_dart
    chords = []
    for t in range(len(xs)):
        d0, k0 = xs[t - 1]
        d1, k1 = xs[t]
        if face[inv[d0]] != face[d1]:
            raise ExtractionError("crossing sequence does not close up through faces")
        chords.append(Chord(face[d1], (inv[d0], k0), (d1, k1)))
    anchors = {}
    sides = anchor_sides or {}
    for ch in chords:
        if ch.face in cs.punctured and ch.face not in anchors:
            cyc = surf.faces[ch.face]
            ref = ch.start[0] if sides.get(ch.face, 0) == 0 else ch.end[0]
            anchors[ch.face] = (cyc[(cyc.index(ref) + 1) % len(cyc)], Fraction(0))
    return Drawing(tuple(chords), tuple(sorted((f, d, k) for f, (d, k) in anchors.items())))


# -- resolving self-crossings -------------------------------------------------------

def resolve_embedded(cs: CutSurface, drawing: Drawing, accept: Callable[[Drawing], bool],
                     budget: int = 4096) -> Drawing:
    """Smooth self-crossings until an embedded drawing passes ``accept``.

    At each crossing the two loops of the oriented smoothing are tried first,
    then the curve of the other smoothing, which runs around both loops.
    """
    calls = [0]

    def go(d: Drawing) -> Drawing | None:
        calls[0] += 1
        if calls[0] > budget:
            raise ExtractionError("resolution budget exhausted")
        xs = self_crossings(cs.config, cs.surface, d)
        if not xs:
            return d if accept(d) else None
        i, j = xs[0]
        for cand in smoothings(d, i, j):
            res = go(prune_anchors(cand))
            if res is not None:
                return res
        return None

    out = go(drawing)
    if out is None:
        raise ExtractionError("no smoothing yields an essential embedded curve")
    return out


# -- extraction --------------------------------------------------------------

@dataclass
class Extraction:
    gamma_beta: PairConfig
    drawing: Drawing
    cycle: Cycle
    crossings: list[tuple[int, int]]  # (class, mass) per cycle edge
    diagnostics: PairDiagnostics
    alpha_disjoint: str = "drawn in the complement of alpha"

    @property
    def mass_sum(self) -> int:
        return sum(m for _, m in self.crossings)


def _check_candidate(cs: CutSurface, d: Drawing):
    try:
        new = realize(cs.config, d, cs.surface).config
    except DrawingError:
        return None
    return new, validate(new)


def extract_curve(cyc: Cycle, cs: CutSurface, classes: Sequence[ArcClass], g: DualGraph,
                  anchor_sides: dict[int, int] | None = None,
                  accept: Callable[[PairConfig, PairDiagnostics], bool] | None = None) -> Extraction:
    """The curve gamma following a dual-graph cycle, as the configuration (gamma, beta).

    In closed mode the curve is embedded and must come out essential and
    bigon-free.  In punctured mode self-crossings are smoothed away first and
    ``accept`` (default: essential and bigon-free) selects among the results.
    """
    xs = cycle_crossings(g, classes, cyc)
    drawing = drawing_from_crossings(cs, xs, anchor_sides)
    masses = [(g.edges[e].cls, classes[g.edges[e].cls].mass) for e, _ in cyc]
    ok = accept or (lambda cfg, diag: diag.bigon_free and diag.alpha_essential)
    if self_crossings(cs.config, cs.surface, drawing):
        if g.mode == "closed":
            raise ExtractionError("closed-mode cycle gave an immersed curve")

        def acc(d):
            r = _check_candidate(cs, d)
            return r is not None and ok(*r)

        drawing = resolve_embedded(cs, drawing, acc)
    r = _check_candidate(cs, drawing)
    if r is None:
        raise ExtractionError("drawing could not be realized")
    new, diag = r
    if not diag.bigon_free:
        raise ExtractionError("extraction produced bigon")
    if not diag.alpha_essential:
        raise ExtractionError("extraction produced an inessential curve")
    if accept is not None and not accept(new, diag):
        raise ExtractionError("extracted curve rejected")
    return Extraction(new, drawing, cyc, masses, diag)
