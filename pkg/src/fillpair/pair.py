"""Pairs of simple closed curves in general position, encoded as 4-valent fat graphs.

A configuration has ``n`` crossings.  The first curve (``alpha``) visits them in
the order ``1, 2, ..., n``; the second (``beta``) visits them in the cyclic
order ``beta_order``.  ``signs[c - 1]`` is the handedness of crossing ``c``:
``+1`` when beta crosses alpha from alpha's right to its left.

Half-edges ("darts") at crossing ``c`` are numbered ``4 * (c - 1) + slot`` with
slots ``ALPHA_OUT, BETA_OUT, ALPHA_IN, BETA_IN``.  The counter-clockwise
rotation at a ``+1`` crossing is ``(alpha-out, beta-out, alpha-in, beta-in)``
and the mirror image at a ``-1`` crossing.  Faces are the cycles of
``rotation o edge-involution``; every face lies to the right of its darts.
Face ids are assigned in increasing order of the smallest dart of the face.

Complementary regions of the curves in the ambient surface are described by
decorations.  A region is either a single face, possibly carrying extra genus
and punctures, or a *join* of several faces (a region with several boundary
cycles).  The decoration of a joined region is stored on its smallest face.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

ALPHA_OUT, BETA_OUT, ALPHA_IN, BETA_IN = range(4)
SLOT_NAMES = ("ao", "bo", "ai", "bi")

_ROT_POS = {ALPHA_OUT: BETA_OUT, BETA_OUT: ALPHA_IN, ALPHA_IN: BETA_IN, BETA_IN: ALPHA_OUT}
_ROT_NEG = {ALPHA_OUT: BETA_IN, BETA_IN: ALPHA_IN, ALPHA_IN: BETA_OUT, BETA_OUT: ALPHA_OUT}


class ConfigError(ValueError):
    """Malformed pair configuration."""


class BigonReductionError(ValueError):
    """A face offered for bigon reduction is not a genuine bigon."""


def dart(crossing: int, slot: int) -> int:
    return 4 * (crossing - 1) + slot


def dart_crossing(d: int) -> int:
    return d // 4 + 1


def dart_slot(d: int) -> int:
    return d % 4


def is_alpha_dart(d: int) -> bool:
    return d % 2 == 0


@dataclass(frozen=True)
class PairConfig:
    n: int
    beta_order: tuple[int, ...]
    signs: tuple[int, ...]
    decorations: tuple[tuple[int, int, int], ...] = ()
    joins: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "beta_order", tuple(int(c) for c in self.beta_order))
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        decs = {}
        for fid, h, k in self.decorations:
            if h < 0 or k < 0:
                raise ConfigError(f"negative decoration on face {fid}")
            if (h, k) != (0, 0):
                decs[int(fid)] = (int(h), int(k))
        object.__setattr__(self, "decorations", tuple((f, h, k) for f, (h, k) in sorted(decs.items())))
        joins = tuple(sorted(tuple(sorted(int(f) for f in grp)) for grp in self.joins if len(grp) > 1))
        object.__setattr__(self, "joins", joins)
        if self.n < 0:
            raise ConfigError("negative crossing count")
        if sorted(self.beta_order) != list(range(1, self.n + 1)):
            raise ConfigError(f"beta_order {self.beta_order} is not a permutation of 1..{self.n}")
        if len(self.signs) != self.n or any(s not in (1, -1) for s in self.signs):
            raise ConfigError("signs must be a length-n sequence over {+1, -1}")
        seen = set()
        for grp in joins:
            if seen & set(grp) or len(set(grp)) != len(grp):
                raise ConfigError("joins must be disjoint groups of distinct faces")
            seen |= set(grp)

    @classmethod
    def build(cls, beta_order: Sequence[int], signs: Sequence[int],
              decorations: Mapping[int, tuple[int, int]] | None = None,
              joins: Iterable[Iterable[int]] = ()) -> "PairConfig":
        decs = tuple((f, h, k) for f, (h, k) in (decorations or {}).items())
        return cls(len(beta_order), tuple(beta_order), tuple(signs), decs, tuple(tuple(g) for g in joins))

    @property
    def decoration_map(self) -> dict[int, tuple[int, int]]:
        return {f: (h, k) for f, h, k in self.decorations}

    def undecorated(self) -> "PairConfig":
        return PairConfig(self.n, self.beta_order, self.signs)

    def with_regions(self, decorations: Mapping[int, tuple[int, int]], joins=()) -> "PairConfig":
        return PairConfig.build(self.beta_order, self.signs, decorations, joins)

    # -- fat graph -------------------------------------------------------

    @cached_property
    def beta_position(self) -> dict[int, int]:
        return {c: j for j, c in enumerate(self.beta_order)}

    @cached_property
    def involution(self) -> list[int]:
        n = self.n
        iota = [0] * (4 * n)
        for c in range(1, n + 1):
            nxt = c % n + 1
            iota[dart(c, ALPHA_OUT)] = dart(nxt, ALPHA_IN)
            iota[dart(nxt, ALPHA_IN)] = dart(c, ALPHA_OUT)
        for j, c in enumerate(self.beta_order):
            nxt = self.beta_order[(j + 1) % n]
            iota[dart(c, BETA_OUT)] = dart(nxt, BETA_IN)
            iota[dart(nxt, BETA_IN)] = dart(c, BETA_OUT)
        return iota

    @cached_property
    def rotation(self) -> list[int]:
        sigma = [0] * (4 * self.n)
        for c in range(1, self.n + 1):
            table = _ROT_POS if self.signs[c - 1] > 0 else _ROT_NEG
            for slot, nxt in table.items():
                sigma[dart(c, slot)] = dart(c, nxt)
        return sigma

    def face_step(self, d: int) -> int:
        return self.rotation[self.involution[d]]

    def edge_of(self, d: int) -> int:
        """Edge index: alpha edge ``c - 1`` leaves crossing ``c``; beta edge ``n + j`` leaves ``beta_order[j]``."""
        c, slot = dart_crossing(d), dart_slot(d)
        if slot == ALPHA_OUT:
            return c - 1
        if slot == ALPHA_IN:
            return (c - 2) % self.n
        if slot == BETA_OUT:
            return self.n + self.beta_position[c]
        return self.n + (self.beta_position[c] - 1) % self.n

    def edge_darts(self, e: int) -> tuple[int, int]:
        """(forward, backward) darts of an edge; forward points along the curve's direction."""
        if e < self.n:
            c = e + 1
            return dart(c, ALPHA_OUT), dart(c % self.n + 1, ALPHA_IN)
        j = e - self.n
        c = self.beta_order[j]
        return dart(c, BETA_OUT), dart(self.beta_order[(j + 1) % self.n], BETA_IN)


@dataclass(frozen=True)
class Region:
    faces: tuple[int, ...]
    genus: int
    punctures: int

    @property
    def euler_char(self) -> int:
        return 2 - 2 * self.genus - len(self.faces) - self.punctures

    @property
    def is_disk(self) -> bool:
        return len(self.faces) == 1 and self.genus == 0 and self.punctures == 0


@dataclass(frozen=True)
class TracedSurface:
    faces: tuple[tuple[int, ...], ...]
    traced_genus: int
    genus: int
    puncture_count: int
    connected: bool
    regions: tuple[Region, ...] = ()
    face_of_dart: tuple[int, ...] = field(default=(), repr=False)
    region_of_face: tuple[int, ...] = field(default=(), repr=False)

    @property
    def face_lengths(self) -> list[int]:
        return [len(f) for f in self.faces]

    def words(self, cfg: PairConfig) -> list[list[str]]:
        """Boundary words: ``a<c>``/``b<j>`` for forward darts, upper case when traversed backwards."""
        out = []
        for f in self.faces:
            word = []
            for d in f:
                e = cfg.edge_of(d)
                fwd = cfg.edge_darts(e)[0] == d
                name = f"a{e + 1}" if e < cfg.n else f"b{e - cfg.n + 1}"
                word.append(name if fwd else name.upper())
            out.append(word)
        return out


def trace(cfg: PairConfig) -> TracedSurface:
    """Trace the faces of the fat graph ``alpha u beta`` and attach the region data."""
    n = cfg.n
    if n == 0:
        return TracedSurface((), 0, 0, 0, False)
    step = cfg.face_step
    face_of = [-1] * (4 * n)
    faces = []
    for start in range(4 * n):
        if face_of[start] >= 0:
            continue
        cyc = []
        d = start
        while face_of[d] < 0:
            face_of[d] = len(faces)
            cyc.append(d)
            d = step(d)
        faces.append(tuple(cyc))
    chi = n - 2 * n + len(faces)
    if chi % 2:
        raise ConfigError("odd Euler characteristic; rotation data inconsistent")
    traced_genus = (2 - chi) // 2
    nf = len(faces)
    decs = cfg.decoration_map
    for f in decs:
        if not 0 <= f < nf:
            raise ConfigError(f"decoration on unknown face {f}")
    region_of = list(range(nf))
    groups: list[tuple[int, ...]] = []
    joined = set()
    for grp in cfg.joins:
        for f in grp:
            if not 0 <= f < nf:
                raise ConfigError(f"join references unknown face {f}")
        joined |= set(grp)
    for grp in cfg.joins:
        groups.append(grp)
    for f in range(nf):
        if f not in joined:
            groups.append((f,))
    groups.sort()
    regions = []
    for r, grp in enumerate(groups):
        h = sum(decs.get(f, (0, 0))[0] for f in grp)
        k = sum(decs.get(f, (0, 0))[1] for f in grp)
        regions.append(Region(grp, h, k))
        for f in grp:
            region_of[f] = r
    genus = traced_genus + sum(r.genus + len(r.faces) - 1 for r in regions)
    punctures = sum(r.punctures for r in regions)
    return TracedSurface(tuple(faces), traced_genus, genus, punctures, True,
                         tuple(regions), tuple(face_of), tuple(region_of))


@dataclass(frozen=True)
class PairDiagnostics:
    connected: bool
    bigon_free: bool
    alpha_essential: bool
    beta_essential: bool
    filling: bool
    genus: int
    punctures: int
    bigon_faces: tuple[int, ...] = ()


def bigon_faces(cfg: PairConfig, surf: TracedSurface | None = None) -> list[int]:
    surf = surf or trace(cfg)
    return [f for f, cyc in enumerate(surf.faces)
            if len(cyc) == 2 and surf.regions[surf.region_of_face[f]].is_disk]


def _side_components(cfg: PairConfig, surf: TracedSurface, cut_alpha: bool) -> list[tuple[int, int, int]]:
    """Cut along one curve; return (euler_char, punctures, boundary_count) per component.

    Regions are glued across the edges of the *other* curve.
    """
    nreg = len(surf.regions)
    parent = list(range(nreg))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    glue_edges = range(cfg.n, 2 * cfg.n) if cut_alpha else range(cfg.n)
    for e in glue_edges:
        d1, d2 = cfg.edge_darts(e)
        r1 = surf.region_of_face[surf.face_of_dart[d1]]
        r2 = surf.region_of_face[surf.face_of_dart[d2]]
        parent[find(r1)] = find(r2)
    comps: dict[int, list] = {}
    for r, reg in enumerate(surf.regions):
        acc = comps.setdefault(find(r), [0, 0, 0])
        acc[0] += reg.euler_char
        acc[1] += reg.punctures
    for e in glue_edges:
        d1, _ = cfg.edge_darts(e)
        comps[find(surf.region_of_face[surf.face_of_dart[d1]])][0] -= 1
    # each side of the cut curve is one boundary circle
    cut_edge = 0 if cut_alpha else cfg.n
    d1, d2 = cfg.edge_darts(cut_edge)
    for d in (d1, d2):
        comps[find(surf.region_of_face[surf.face_of_dart[d]])][2] += 1
    return [tuple(v) for v in comps.values()]


def curve_is_essential(cfg: PairConfig, surf: TracedSurface, which: str) -> bool:
    """A curve is inessential iff one side of it is a disk or a once-punctured disk."""
    comps = _side_components(cfg, surf, which == "alpha")
    if len(comps) == 1:
        return True
    for chi, k, b in comps:
        g2 = 2 - chi - b - k
        if g2 == 0 and k <= 1:
            return False
    return True


def validate(cfg: PairConfig) -> PairDiagnostics:
    if cfg.n == 0:
        return PairDiagnostics(False, True, False, False, False, 0, 0)
    surf = trace(cfg)
    bigons = bigon_faces(cfg, surf)
    filling = all(len(r.faces) == 1 and r.genus == 0 and r.punctures <= 1 for r in surf.regions)
    return PairDiagnostics(
        connected=surf.connected,
        bigon_free=not bigons,
        alpha_essential=curve_is_essential(cfg, surf, "alpha"),
        beta_essential=curve_is_essential(cfg, surf, "beta"),
        filling=filling,
        genus=surf.genus,
        punctures=surf.puncture_count,
        bigon_faces=tuple(bigons),
    )


# -- corners and face correspondence -------------------------------------

def face_corners(cfg: PairConfig, surf: TracedSurface) -> list[frozenset]:
    """Each face as a set of corners ``(crossing, slot_a, slot_b)`` with slot_a < slot_b."""
    out = []
    for cyc in surf.faces:
        corners = set()
        for d in cyc:
            back = cfg.involution[d]
            nxt = cfg.rotation[back]
            s1, s2 = sorted((dart_slot(back), dart_slot(nxt)))
            corners.add((dart_crossing(back), s1, s2))
        out.append(frozenset(corners))
    return out


def _regions_to_decorations(groups: Sequence[tuple[Sequence[int], int, int]]):
    decs: dict[int, tuple[int, int]] = {}
    joins = []
    for faces, h, k in groups:
        faces = sorted(faces)
        if len(faces) > 1:
            joins.append(tuple(faces))
        if (h, k) != (0, 0):
            decs[faces[0]] = (h, k)
    return decs, joins


# -- symmetries ----------------------------------------------------------

@dataclass(frozen=True)
class Relabel:
    swap: bool
    start: int
    alpha_dir: int
    beta_dir: int
    flip: int


def relabelings(n: int) -> Iterator[Relabel]:
    for swap, start, ad, bd, fl in product((False, True), range(n), (1, -1), (1, -1), (1, -1)):
        yield Relabel(swap, start, ad, bd, fl)


def apply_relabel(cfg: PairConfig, t: Relabel) -> tuple[PairConfig, dict]:
    """Re-encode the same curve pair; returns the new undecorated config and the corner map."""
    n = cfg.n
    if t.swap:
        first = list(cfg.beta_order)
        second = list(range(1, n + 1))
        slot_map = {ALPHA_OUT: BETA_OUT, ALPHA_IN: BETA_IN, BETA_OUT: ALPHA_OUT, BETA_IN: ALPHA_IN}
        base_flip = -1
    else:
        first = list(range(1, n + 1))
        second = list(cfg.beta_order)
        slot_map = {s: s for s in range(4)}
        base_flip = 1
    # new first curve: start at index ``start`` and run in direction alpha_dir
    seq = [first[(t.start + t.alpha_dir * i) % n] for i in range(n)]
    label = {c: i + 1 for i, c in enumerate(seq)}
    if t.beta_dir < 0:
        second = second[::-1]
    new_second = [label[c] for c in second]
    k = new_second.index(1)
    new_second = new_second[k:] + new_second[:k]
    flip = base_flip * t.alpha_dir * t.beta_dir * t.flip
    signs = [0] * n
    for c in range(1, n + 1):
        signs[label[c] - 1] = cfg.signs[c - 1] * flip
    # slots after the swap: reversing a curve exchanges its in/out half-edges
    def map_slot(s):
        s = slot_map[s]
        if t.alpha_dir < 0 and s in (ALPHA_OUT, ALPHA_IN):
            s = ALPHA_IN if s == ALPHA_OUT else ALPHA_OUT
        if t.beta_dir < 0 and s in (BETA_OUT, BETA_IN):
            s = BETA_IN if s == BETA_OUT else BETA_OUT
        return s
    new = PairConfig(n, tuple(new_second), tuple(signs))
    corner_map = {}
    for c in range(1, n + 1):
        for s1 in (ALPHA_OUT, ALPHA_IN):
            for s2 in (BETA_OUT, BETA_IN):
                a, b = sorted((map_slot(s1), map_slot(s2)))
                corner_map[(c, s1, s2) if s1 < s2 else (c, s2, s1)] = (label[c], a, b)
    return new, corner_map


def transport_regions(cfg: PairConfig, surf: TracedSurface, new: PairConfig,
                      corner_map: dict) -> PairConfig:
    """Carry decorations/joins of ``cfg`` onto an isomorphic re-encoding ``new``."""
    if not cfg.decorations and not cfg.joins:
        return new
    new_surf = trace(new)
    new_face_by_corner = {}
    for f, corners in enumerate(face_corners(new, new_surf)):
        for cn in corners:
            new_face_by_corner[cn] = f
    face_map = {}
    for f, corners in enumerate(face_corners(cfg, surf)):
        cn = next(iter(corners))
        face_map[f] = new_face_by_corner[corner_map[cn]]
    groups = [([face_map[f] for f in r.faces], r.genus, r.punctures) for r in surf.regions]
    decs, joins = _regions_to_decorations(groups)
    return new.with_regions(decs, joins)


def _key(cfg: PairConfig):
    return (cfg.n, cfg.beta_order, cfg.signs, cfg.decorations, cfg.joins)


def canonicalize(cfg: PairConfig) -> PairConfig:
    """Least re-encoding under relabeling, rotation/reversal of either curve, swap, and mirror."""
    if cfg.n == 0:
        return cfg
    surf = trace(cfg) if (cfg.decorations or cfg.joins) else None
    best = None
    for t in relabelings(cfg.n):
        new, cmap = apply_relabel(cfg, t)
        if surf is not None:
            new = transport_regions(cfg, surf, new, cmap)
        if best is None or _key(new) < _key(best):
            best = new
    return best


def automorphisms(cfg: PairConfig) -> list[tuple[Relabel, dict[int, int]]]:
    """Relabelings fixing the undecorated config, with their induced face permutations."""
    base = cfg.undecorated()
    surf = trace(base)
    corners = face_corners(base, surf)
    by_corner = {cn: f for f, cs in enumerate(corners) for cn in cs}
    out = []
    for t in relabelings(cfg.n):
        new, cmap = apply_relabel(base, t)
        if new.beta_order == base.beta_order and new.signs == base.signs:
            perm = {f: by_corner[cmap[next(iter(cs))]] for f, cs in enumerate(corners)}
            out.append((t, perm))
    return out


# -- bigon reduction -------------------------------------------------------

def _reduce_one(cfg: PairConfig, surf: TracedSurface, face: int) -> PairConfig:
    n = cfg.n
    d_a, d_b = surf.faces[face]
    if not is_alpha_dart(d_a):
        d_a, d_b = d_b, d_a
    x = dart_crossing(d_a)
    y = dart_crossing(cfg.involution[d_a])
    if n == 2:
        return PairConfig(0, (), ())
    # opposite corners at x and y determine the two faces joined by a strip
    def opposite_face(c):
        bigon_halves = {dart_slot(d) for d in (d_a, d_b, cfg.involution[d_a], cfg.involution[d_b])
                        if dart_crossing(d) == c}
        other = [s for s in range(4) if s not in bigon_halves]
        # corner between the two remaining half-edges; find the dart whose face contains it
        for s in other:
            dd = dart(c, s)
            if dart_slot(cfg.rotation[dd]) in other:
                # corner (dd, rot(dd)) is entered by the dart iota^{-1}(dd)
                return surf.face_of_dart[cfg.involution[dd]]
        raise ConfigError("corner bookkeeping failed")
    fx, fy = opposite_face(x), opposite_face(y)
    keep = [c for c in range(1, n + 1) if c not in (x, y)]
    label = {c: i + 1 for i, c in enumerate(keep)}
    beta = [label[c] for c in cfg.beta_order if c in label]
    k = beta.index(1)
    beta = beta[k:] + beta[:k]
    signs = [cfg.signs[c - 1] for c in keep]
    new = PairConfig(n - 2, tuple(beta), tuple(signs))
    new_surf = trace(new)
    old_face_by_corner = {}
    for f, cs in enumerate(face_corners(cfg, surf)):
        for cn in cs:
            old_face_by_corner[cn] = f
    reg = surf.region_of_face
    nreg = len(surf.regions)
    parent = list(range(nreg))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    new_face_region = []
    for cs in face_corners(new, new_surf):
        olds = set()
        for (c, s1, s2) in cs:
            old_c = keep[c - 1]
            olds.add(reg[old_face_by_corner[(old_c, s1, s2)]])
        olds = sorted(olds)
        for r in olds[1:]:
            parent[find(r)] = find(olds[0])
        new_face_region.append(olds[0])
    strip = {find(reg[fx]), find(reg[fy])}
    if len(strip) != 1:
        raise ConfigError("bigon reduction did not join the opposite corners")
    strip_root = strip.pop()
    groups: dict[int, list[int]] = {}
    for f, r in enumerate(new_face_region):
        groups.setdefault(find(r), []).append(f)
    members: dict[int, list[int]] = {}
    for r in range(nreg):
        members.setdefault(find(r), []).append(r)
    out = []
    for root, faces in groups.items():
        olds = members[root]
        chi = sum(surf.regions[r].euler_char for r in olds) - (len(olds) - 1)
        if root == strip_root:
            chi -= 1 if len(olds) == 1 else 0
        elif len(olds) != 1:
            raise ConfigError("bigon reduction merged unrelated regions")
        k = sum(surf.regions[r].punctures for r in olds)
        twice_h = 2 - chi - len(faces) - k
        if twice_h < 0 or twice_h % 2:
            raise ConfigError("region topology inconsistent after bigon reduction")
        out.append((faces, twice_h // 2, k))
    decs, joins = _regions_to_decorations(out)
    return new.with_regions(decs, joins)


def reduce_bigons(cfg: PairConfig) -> PairConfig:
    """Remove undecorated bigon faces until none remain (n drops by 2 per step)."""
    if cfg.n == 0:
        return cfg
    surf = trace(cfg)
    for f in bigon_faces(cfg, surf):
        return reduce_bigons(_reduce_one(cfg, surf, f))
    return cfg


def reduce_face(cfg: PairConfig, face: int) -> PairConfig:
    """Remove the bigon at ``face``; refuses faces that are not undecorated bigons."""
    surf = trace(cfg)
    if not 0 <= face < len(surf.faces) or len(surf.faces[face]) != 2:
        raise BigonReductionError(f"face {face} is not a bigon")
    if not surf.regions[surf.region_of_face[face]].is_disk:
        raise BigonReductionError(f"face {face} is decorated; not a real bigon")
    return _reduce_one(cfg, surf, face)


def twist_pair(cfg: PairConfig, m: int) -> PairConfig:
    """The pair (alpha, T_beta^m(alpha)) for m >= 1; it has m * n**2 crossings.

    Works in an annulus around beta with coordinates (t, theta): alpha crosses
    it radially at each of its crossings, the pushed-off copy of alpha is
    sheared into a spiral winding m times, and the spiral meets every radial
    segment m times.  Decorations are dropped.
    """
    if m < 1 or cfg.n == 0:
        raise ConfigError("need m >= 1 and at least one crossing")
    n = cfg.n
    pos = cfg.beta_position  # crossing -> index along beta
    s = {c: cfg.signs[c - 1] for c in range(1, n + 1)}
    hits = []  # (j, t, i): copy leaving crossing i meets the radial segment at crossing j at height t
    for i in range(1, n + 1):
        eps = Fraction(s[i], 3)  # push-off to the left of alpha
        for j in range(1, n + 1):
            for k in range(0, m + 1):
                u = pos[j] - pos[i] - eps + k * n
                if 0 < u < n * m:
                    hits.append((j, Fraction(u, n * m), i))
    # along alpha: segments in order, heights in alpha's direction of travel
    along_a = sorted(hits, key=lambda h: (h[0], h[1] * s[h[0]]))
    label = {h: a + 1 for a, h in enumerate(along_a)}
    along_b = sorted(hits, key=lambda h: (h[2], h[1] * s[h[2]]))
    beta = [label[h] for h in along_b]
    signs = [s[h[0]] * s[h[2]] for h in along_a]
    return PairConfig.build(beta, signs)
