"""Closed curves drawn in the complement of the first curve of a configuration.

A drawing is a closed walk of chords.  Each chord lies in one face of
``alpha u beta`` and joins two points on beta-sides of that face; consecutive
chords meet at a point of a beta arc, crossing it.  Points are addressed as
occurrences ``(dart, key)``: the beta half-edge whose side the point is seen
from, and a position ``key`` in (0, 1) along the arc in beta's direction.

Chords never touch alpha, so a drawn curve is disjoint from alpha by
construction.  For faces containing a puncture the drawing records an
*anchor* ``(face, dart, key)``: the puncture sits next to that boundary
position, either beside an alpha half-edge (key 0) or beside a point of a beta
side that no chord uses.  This fixes the side of the puncture for every chord
in that face and is not disturbed by surgery on the chords.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .pair import (BETA_IN, BETA_OUT, ConfigError, PairConfig, TracedSurface, _regions_to_decorations,
                   dart_crossing, dart_slot, face_corners, is_alpha_dart, trace)

Occ = tuple[int, Fraction]


class DrawingError(ValueError):
    pass


@dataclass(frozen=True)
class Chord:
    face: int
    start: Occ
    end: Occ

    def reversed(self) -> "Chord":
        return Chord(self.face, self.end, self.start)


@dataclass(frozen=True)
class Drawing:
    chords: tuple[Chord, ...]
    anchors: tuple[tuple[int, int, Fraction], ...] = ()

    def __len__(self):
        return len(self.chords)

    def reversed(self) -> "Drawing":
        return Drawing(tuple(c.reversed() for c in reversed(self.chords)), self.anchors)

    def anchor_map(self) -> dict[int, tuple[int, Fraction]]:
        return {f: (d, k) for f, d, k in self.anchors}

    def to_json(self) -> dict:
        return {
            "chords": [[c.face, c.start[0], str(c.start[1]), c.end[0], str(c.end[1])] for c in self.chords],
            "anchors": [[f, d, str(k)] for f, d, k in self.anchors],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Drawing":
        chords = tuple(Chord(int(f), (int(d1), Fraction(k1)), (int(d2), Fraction(k2)))
                       for f, d1, k1, d2, k2 in d["chords"])
        anchors = tuple((int(f), int(a), Fraction(k)) for f, a, k in d.get("anchors", []))
        return cls(chords, anchors)


def partner(cfg: PairConfig, d: int) -> int:
    return cfg.involution[d]


def is_forward(d: int) -> bool:
    return dart_slot(d) == BETA_OUT


class FaceLayout:
    """Boundary order of the chord endpoints in one face."""

    def __init__(self, cfg: PairConfig, cycle: Sequence[int], occs: Sequence[Occ]):
        by_dart: dict[int, list[Fraction]] = {}
        for d, k in occs:
            by_dart.setdefault(d, []).append(k)
        self.order: list[Occ] = []
        self.alpha_segment: dict[int, int] = {}
        pending_alpha = []
        for d in cycle:
            if is_alpha_dart(d):
                pending_alpha.append(d)
                continue
            for a in pending_alpha:
                self.alpha_segment[a] = len(self.order) - 1
            pending_alpha = []
            keys = sorted(by_dart.get(d, []), reverse=not is_forward(d))
            self.order.extend((d, k) for k in keys)
        m = len(self.order)
        for a in pending_alpha:
            self.alpha_segment[a] = m - 1
        # alpha darts seen before the first occurrence sit in the wrap-around segment
        for a, s in self.alpha_segment.items():
            if s < 0:
                self.alpha_segment[a] = m - 1
        self.cycle = tuple(cycle)
        self.by_dart = {d: sorted(ks) for d, ks in by_dart.items()}
        self.index = {o: i for i, o in enumerate(self.order)}
        if len(self.index) != m:
            raise DrawingError("duplicate point on a face boundary")

    def __len__(self):
        return len(self.order)

    def segment_after(self, o: Occ) -> int:
        return self.index[o]

    def segment_before(self, o: Occ) -> int:
        return (self.index[o] - 1) % len(self.order)

    def segment_at(self, d: int, k: Fraction) -> int:
        """Boundary segment containing the unused point ``k`` of beta side ``d``."""
        if is_alpha_dart(d):
            return self.alpha_segment[d]
        if k in self.by_dart.get(d, ()) or not 0 < k < 1:
            raise DrawingError("anchor position collides with a chord endpoint")
        count = 0
        for x in self.cycle:
            if x == d:
                ks = self.by_dart.get(d, [])
                count += sum(1 for y in ks if (y < k if is_forward(d) else y > k))
                return (count - 1) % len(self.order)
            count += len(self.by_dart.get(x, ()))
        raise DrawingError("anchor side not on this face")


def _check_walk(cfg: PairConfig, surf: TracedSurface, drawing: Drawing) -> None:
    L = len(drawing.chords)
    if L == 0:
        raise DrawingError("empty drawing")
    for i, ch in enumerate(drawing.chords):
        cyc = set(surf.faces[ch.face])
        for d, k in (ch.start, ch.end):
            if is_alpha_dart(d):
                raise DrawingError(f"chord {i} touches alpha")
            if d not in cyc:
                raise DrawingError(f"chord {i} endpoint not on face {ch.face}")
            if not 0 < k < 1:
                raise DrawingError(f"chord {i} key out of range")
        nxt = drawing.chords[(i + 1) % L]
        if nxt.start != (partner(cfg, ch.end[0]), ch.end[1]):
            raise DrawingError(f"chord {i} does not continue across its arc")


def face_layouts(cfg: PairConfig, surf: TracedSurface, drawing: Drawing) -> dict[int, FaceLayout]:
    occs: dict[int, list[Occ]] = {}
    for ch in drawing.chords:
        occs.setdefault(ch.face, []).extend([ch.start, ch.end])
    return {f: FaceLayout(cfg, surf.faces[f], o) for f, o in occs.items()}


def self_crossings(cfg: PairConfig, surf: TracedSurface, drawing: Drawing,
                   layouts: dict[int, FaceLayout] | None = None) -> list[tuple[int, int]]:
    """Pairs of chord indices whose endpoints interleave on a face boundary."""
    layouts = layouts or face_layouts(cfg, surf, drawing)
    by_face: dict[int, list[int]] = {}
    for i, ch in enumerate(drawing.chords):
        by_face.setdefault(ch.face, []).append(i)
    out = []
    for f, idxs in by_face.items():
        lay = layouts[f]
        spans = []
        for i in idxs:
            a, b = sorted((lay.index[drawing.chords[i].start], lay.index[drawing.chords[i].end]))
            spans.append((a, b, i))
        for x in range(len(spans)):
            a1, b1, i1 = spans[x]
            for y in range(x + 1, len(spans)):
                a2, b2, i2 = spans[y]
                if (a1 < a2 < b1) != (a1 < b2 < b1):
                    out.append((min(i1, i2), max(i1, i2)))
    return sorted(out)


@dataclass
class Realization:
    config: PairConfig
    point_labels: list[int]
    region_pieces: list[int]


def realize(cfg: PairConfig, drawing: Drawing, surf: TracedSurface | None = None) -> Realization:
    """The configuration (gamma, beta) of an embedded drawing, with its complementary regions.

    ``gamma`` becomes the first curve; its crossings are numbered in walk order,
    crossing ``i + 1`` being the start point of chord ``i``.
    """
    surf = surf or trace(cfg)
    for reg in surf.regions:
        if len(reg.faces) != 1 or reg.genus or reg.punctures > 1:
            raise DrawingError("drawings need a decomposition into disks and once-punctured disks")
    _check_walk(cfg, surf, drawing)
    layouts = face_layouts(cfg, surf, drawing)
    if self_crossings(cfg, surf, drawing, layouts):
        raise DrawingError("drawing is not embedded")
    chords = drawing.chords
    L = len(chords)
    n = cfg.n

    # beta order of the new crossings
    def beta_key(i):
        d, k = chords[i].start
        e = cfg.edge_of(d) - n
        return (cfg.beta_position[cfg.beta_order[e]], k)

    order = sorted(range(L), key=beta_key)
    beta_seq = [i + 1 for i in order]
    r = beta_seq.index(1)
    beta_seq = beta_seq[r:] + beta_seq[:r]
    signs = []
    for i in range(L):
        arrive = chords[i - 1].end[0]
        # the arrival face lies to the right of the arrival half-edge
        signs.append(-1 if is_forward(arrive) else 1)
    new = PairConfig(L, tuple(beta_seq), tuple(signs))

    # pieces: faces cut by chords
    piece_id: dict[tuple[int, int], int] = {}
    npieces = 0
    whole: dict[int, int] = {}
    partner_idx: dict[int, dict[int, int]] = {}
    for f, lay in layouts.items():
        pm = {}
        for ch in chords:
            if ch.face == f:
                a, b = lay.index[ch.start], lay.index[ch.end]
                pm[a], pm[b] = b, a
        partner_idx[f] = pm
        m = len(lay)
        for s in range(m):
            if (f, s) in piece_id:
                continue
            cur = s
            while (f, cur) not in piece_id:
                piece_id[(f, cur)] = npieces
                nxt_occ = (cur + 1) % m
                cur = pm[nxt_occ]
            npieces += 1
    for f in range(len(surf.faces)):
        if f not in layouts:
            whole[f] = npieces
            npieces += 1

    def piece_at(f, seg):
        return whole[f] if f in whole else piece_id[(f, seg)]

    def piece_of_alpha_dart(a):
        f = surf.face_of_dart[a]
        if f in whole:
            return whole[f]
        return piece_id[(f, layouts[f].alpha_segment[a])]

    parent = list(range(npieces))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    glues = []
    for e in range(n):
        d1, d2 = cfg.edge_darts(e)
        p1, p2 = piece_of_alpha_dart(d1), piece_of_alpha_dart(d2)
        glues.append(p1)
        parent[find(p1)] = find(p2)
    punct_piece = {}
    anchors = drawing.anchor_map()
    for f, reg_idx in enumerate(surf.region_of_face):
        if surf.regions[reg_idx].punctures == 0:
            continue
        if f in whole:
            punct_piece[f] = whole[f]
            continue
        if f not in anchors:
            raise DrawingError(f"punctured face {f} has chords but no anchor")
        a, k = anchors[f]
        if surf.face_of_dart[a] != f or (is_alpha_dart(a) and k != 0):
            raise DrawingError(f"anchor of face {f} is not on its boundary")
        punct_piece[f] = piece_id[(f, layouts[f].segment_at(a, k))]

    # new faces -> pieces through corners
    new_surf = trace(new)
    region_faces: dict[int, list[int]] = {}
    for nf, corners in enumerate(face_corners(new, new_surf)):
        c, s1, s2 = next(iter(corners))
        i = c - 1
        gslot, bslot = (s1, s2) if s1 % 2 == 0 else (s2, s1)
        if gslot == 0:
            f, occ = chords[i].face, chords[i].start
        else:
            f, occ = chords[i - 1].face, chords[i - 1].end
        lay = layouts[f]
        forward_side = bslot == BETA_OUT
        if forward_side == is_forward(occ[0]):
            seg = lay.segment_after(occ)
        else:
            seg = lay.segment_before(occ)
        region_faces.setdefault(find(piece_at(f, seg)), []).append(nf)

    pieces_in: dict[int, int] = {}
    for p in range(npieces):
        pieces_in[find(p)] = pieces_in.get(find(p), 0) + 1
    glues_in: dict[int, int] = {}
    for p in glues:
        glues_in[find(p)] = glues_in.get(find(p), 0) + 1
    punct_in: dict[int, int] = {}
    for p in punct_piece.values():
        punct_in[find(p)] = punct_in.get(find(p), 0) + 1
    if set(pieces_in) != set(region_faces):
        raise DrawingError("a complementary region has no boundary on gamma u beta")
    groups = []
    for root, faces in region_faces.items():
        k = punct_in.get(root, 0)
        chi = pieces_in[root] - glues_in.get(root, 0) - k
        twice_h = 2 - chi - len(faces) - k
        if twice_h < 0 or twice_h % 2:
            raise DrawingError("inconsistent region topology in realization")
        groups.append((faces, twice_h // 2, k))
    decs, joins = _regions_to_decorations(groups)
    return Realization(new.with_regions(decs, joins), [i + 1 for i in range(L)], [])


# -- surgery on immersed drawings --------------------------------------------

def _segment(chords: Sequence[Chord], i: int, j: int) -> list[Chord]:
    """Chords strictly after index i up to strictly before index j (cyclically)."""
    L = len(chords)
    out = []
    k = (i + 1) % L
    while k != j:
        out.append(chords[k])
        k = (k + 1) % L
    return out


def smoothings(drawing: Drawing, i: int, j: int) -> tuple[Drawing, Drawing, Drawing]:
    """Resolve the crossing between chords ``i`` and ``j`` (same face).

    Returns the two loops of the orientation-respecting smoothing and the single
    curve of the other smoothing (the boundary curve around both loops).
    """
    ch = drawing.chords
    ci, cj = ch[i], ch[j]
    a, b = ci.start, ci.end
    c, d = cj.start, cj.end
    f = ci.face
    s1 = _segment(ch, i, j)  # from b to c
    s2 = _segment(ch, j, i)  # from d to a
    g1 = tuple(s1) + (Chord(f, c, b),)
    g2 = tuple(s2) + (Chord(f, a, d),)
    rev2 = tuple(x.reversed() for x in reversed(s2))
    r = tuple(s1) + (Chord(f, c, a),) + rev2 + (Chord(f, d, b),)
    return Drawing(g1, drawing.anchors), Drawing(g2, drawing.anchors), Drawing(r, drawing.anchors)


def prune_anchors(drawing: Drawing) -> Drawing:
    faces = {c.face for c in drawing.chords}
    return Drawing(drawing.chords, tuple(a for a in drawing.anchors if a[0] in faces))


# -- normal curves -------------------------------------------------------------

def _noncrossing_matchings(m: int):
    """Perfect matchings of 0..m-1 placed on a circle with no two chords crossing."""
    if m == 0:
        yield []
        return
    for j in range(1, m, 2):
        for inner in _noncrossing_matchings(j - 1):
            for outer in _noncrossing_matchings(m - j - 1):
                yield [(0, j)] + [(a + 1, b + 1) for a, b in inner] + [(a + j + 1, b + j + 1) for a, b in outer]


def _compositions(total: int, sizes: Sequence[int]):
    """Non-negative y with sum(sizes[g] * y[g]) == total."""
    if len(sizes) == 1:
        if total % sizes[0] == 0:
            yield (total // sizes[0],)
        return
    for y in range(total // sizes[0] + 1):
        for rest in _compositions(total - y * sizes[0], sizes[1:]):
            yield (y,) + rest


def _rectangle_groups(cfg: PairConfig, surf: TracedSurface, punctured) -> list[list[int]]:
    """Beta edges forced to equal weight: the two beta sides of an unpunctured square face."""
    n = cfg.n
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f, cyc in enumerate(surf.faces):
        if len(cyc) == 4 and f not in punctured:
            a, b = (cfg.edge_of(d) - n for d in cyc if not is_alpha_dart(d))
            parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for e in range(n):
        groups.setdefault(find(e), []).append(e)
    return sorted(groups.values())


class SearchExhausted(RuntimeError):
    pass


def normal_drawings(cfg: PairConfig, surf: TracedSurface, weight: int, budget: list[int] | None = None):
    """Connected normal curves meeting beta ``weight`` times and missing alpha.

    Arcs never return to the beta side they left, except around the puncture
    of a punctured face, so both beta sides of an unpunctured square carry
    the same weight.  Each curve is yielded once per admissible puncture
    placement.  The search is exhaustive for the given weight.  ``budget`` is
    a one-element counter of weight vectors still allowed; running out raises
    SearchExhausted.
    """
    n = cfg.n
    inv = cfg.involution
    punctured = {f for f in range(len(surf.faces)) if surf.regions[surf.region_of_face[f]].punctures}
    groups = _rectangle_groups(cfg, surf, punctured)
    for y in _compositions(weight, [len(g) for g in groups]):
        x = [0] * n
        for g, v in zip(groups, y):
            for e in g:
                x[e] = v
        if budget is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise SearchExhausted(f"normal-curve search budget exhausted at weight {weight}")
        keys = {}
        for e in range(n):
            for d in cfg.edge_darts(n + e):
                keys[d] = [Fraction(t, x[e] + 1) for t in range(1, x[e] + 1)]
        layouts, options = {}, []
        for f, cyc in enumerate(surf.faces):
            occs = [(d, k) for d in cyc if not is_alpha_dart(d) for k in keys[d]]
            if len(occs) % 2:
                break
            if not occs:
                continue
            lay = FaceLayout(cfg, cyc, occs)
            layouts[f] = lay
            good = []
            for mt in _noncrossing_matchings(len(lay)):
                same = [(a, b) for a, b in mt if lay.order[a][0] == lay.order[b][0]]
                if same and f not in punctured:
                    continue
                good.append((mt, same))
            if not good:
                break
            options.append((f, good))
        else:
            if not options:
                continue
            yield from _assemble(cfg, surf, layouts, options, punctured, inv, weight)


def _assemble(cfg, surf, layouts, options, punctured, inv, weight):
    faces = [f for f, _ in options]
    for pick in itertools.product(*(g for _, g in options)):
        mate = {}
        for f, (mt, _) in zip(faces, pick):
            order = layouts[f].order
            for a, b in mt:
                mate[order[a]], mate[order[b]] = (f, order[b]), (f, order[a])
        start = next(iter(mate))
        chords, cur = [], start
        while True:
            f, end = mate[cur]
            chords.append(Chord(f, cur, end))
            cur = (inv[end[0]], end[1])
            if cur == start:
                break
        if len(chords) != weight:
            continue
        choices = []
        for f, (mt, same) in zip(faces, pick):
            if f not in punctured:
                continue
            choices.append([(f,) + a for a in _anchor_options(cfg, surf, layouts[f], mt, same)])
        for anchors in itertools.product(*choices):
            yield Drawing(tuple(chords), tuple(sorted(anchors)))


def _anchor_options(cfg, surf, lay: FaceLayout, mt, same):
    """One boundary position per piece of the face that may hold the puncture."""
    m = len(lay)
    pm = {}
    for a, b in mt:
        pm[a], pm[b] = b, a
    piece = {}
    for s in range(m):
        if s in piece:
            continue
        cur = s
        while cur not in piece:
            piece[cur] = s
            cur = pm[(cur + 1) % m]
    inside = set(range(m))
    for a, b in same:
        a, b = min(a, b), max(a, b)
        inside &= set(range(a, b))
    cands = [(d, Fraction(0)) for d in sorted(lay.cycle) if is_alpha_dart(d)]
    for d in sorted(x for x in lay.cycle if not is_alpha_dart(x)):
        ks = [Fraction(0)] + lay.by_dart.get(d, []) + [Fraction(1)]
        cands.extend((d, (a + b) / 2) for a, b in zip(ks, ks[1:]))
    seen = set()
    for d, k in cands:
        s = lay.segment_at(d, k)
        if s in inside and piece[s] not in seen:
            seen.add(piece[s])
            yield (d, k)
