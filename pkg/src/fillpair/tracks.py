"""Train tracks as ribbon graphs with tangency data, and the curves they carry.

A switch lists its incoming and outgoing branch ends from left to right, seen
with the outgoing direction pointing up.  A branch end is ``(branch, end)``
with ``end`` in {0, 1}; each branch has a frame running from end 0 to end 1 and
strand positions are counted from the left of that frame.  Complementary
regions are traced as faces of the ribbon graph (each face lies to the right of
its darts); faces are disks unless a region record joins several of them or
gives them genus or punctures.

Measures are integer or rational vectors indexed by branch.  Everything here is
exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .bounds import BoundParams, SurfaceSig
from .pair import (ALPHA_IN, ALPHA_OUT, BETA_IN, BETA_OUT, PairConfig, _regions_to_decorations, face_corners,
                   reduce_bigons, trace)

End = tuple[int, int]


class TrackError(ValueError):
    pass


class Lemma51Violation(AssertionError):
    pass


@dataclass(frozen=True)
class Switch:
    incoming: tuple[End, ...]
    outgoing: tuple[End, ...]

    @property
    def valence(self) -> int:
        return len(self.incoming) + len(self.outgoing)


@dataclass(frozen=True)
class RegionSpec:
    darts: tuple[End, ...]  # one dart on each boundary cycle of the region
    genus: int = 0
    punctures: int = 0


@dataclass(frozen=True)
class TrainTrack:
    branches: int
    switches: tuple[Switch, ...]
    ambient: SurfaceSig
    regions: tuple[RegionSpec, ...] = ()
    name: str = ""
    birecurrent_attested: bool = False

    # -- structure ------------------------------------------------------------

    @cached_property
    def end_site(self) -> dict[End, tuple[int, str, int]]:
        """branch end -> (switch, "in" or "out", index on that side)."""
        site = {}
        for s, sw in enumerate(self.switches):
            for side, ends in (("in", sw.incoming), ("out", sw.outgoing)):
                for k, e in enumerate(ends):
                    e = (int(e[0]), int(e[1]))
                    if not (0 <= e[0] < self.branches and e[1] in (0, 1)):
                        raise TrackError(f"switch {s} references unknown branch end {e}")
                    if e in site:
                        raise TrackError(f"branch end {e} attached twice")
                    site[e] = (s, side, k)
        for b in range(self.branches):
            for e in (0, 1):
                if (b, e) not in site:
                    raise TrackError(f"branch end {(b, e)} is dangling")
        return site

    def same_frame(self, end: End) -> bool:
        """Does the switch's left-to-right agree with the branch frame at this end?"""
        _, side, _ = self.end_site[end]
        return (end[1] == 0) == (side == "out")

    @cached_property
    def rotation(self) -> dict[End, End]:
        rot = {}
        for sw in self.switches:
            ccw = list(reversed(sw.outgoing)) + list(sw.incoming)
            for i, x in enumerate(ccw):
                rot[tuple(x)] = tuple(ccw[(i + 1) % len(ccw)])
        return rot

    def _is_cusp(self, x: End, y: End) -> bool:
        sx, sy = self.end_site[x], self.end_site[y]
        return sx[1] == sy[1] and x != y

    @cached_property
    def faces(self) -> list[tuple[list[End], int]]:
        """Boundary cycles with their cusp counts."""
        self.end_site
        seen, out = set(), []
        for b in range(self.branches):
            for e in (0, 1):
                d = (b, e)
                if d in seen:
                    continue
                cyc, cusps = [], 0
                while d not in seen:
                    seen.add(d)
                    cyc.append(d)
                    back = (d[0], 1 - d[1])
                    nxt = self.rotation[back]
                    if self._is_cusp(back, nxt):
                        cusps += 1
                    d = nxt
                out.append((cyc, cusps))
        return out

    @cached_property
    def face_of_dart(self) -> dict[End, int]:
        return {d: f for f, (cyc, _) in enumerate(self.faces) for d in cyc}

    @cached_property
    def complementary(self) -> list[dict]:
        """Regions: faces, genus, punctures, euler characteristic and cusp count."""
        fod = self.face_of_dart
        used, out = set(), []
        for r in self.regions:
            fs = []
            for d in r.darts:
                d = (int(d[0]), int(d[1]))
                if d not in fod:
                    raise TrackError(f"region dart {d} unknown")
                fs.append(fod[d])
            if used & set(fs) or len(set(fs)) != len(fs):
                raise TrackError("region records overlap")
            used |= set(fs)
            out.append({"faces": sorted(fs), "genus": r.genus, "punctures": r.punctures})
        for f in range(len(self.faces)):
            if f not in used:
                out.append({"faces": [f], "genus": 0, "punctures": 0})
        for reg in out:
            if reg["genus"] < 0 or reg["punctures"] < 0:
                raise TrackError("negative region decoration")
            reg["chi"] = 2 - 2 * reg["genus"] - len(reg["faces"]) - reg["punctures"]
            reg["cusps"] = sum(self.faces[f][1] for f in reg["faces"])
        return out

    def check_surface(self) -> None:
        chi = len(self.switches) - self.branches + sum(r["chi"] for r in self.complementary)
        p = sum(r["punctures"] for r in self.complementary)
        if (chi, p) != (self.ambient.euler_char, self.ambient.punctures):
            raise TrackError(f"track sits on chi={chi}, p={p}, not on S_{{{self.ambient.genus},{self.ambient.punctures}}}")

    @cached_property
    def switch_rows(self) -> list[list[int]]:
        rows = []
        for sw in self.switches:
            row = [0] * self.branches
            for b, _ in sw.incoming:
                row[b] += 1
            for b, _ in sw.outgoing:
                row[b] -= 1
            rows.append(row)
        return rows

    def satisfies_switch_conditions(self, mu: Sequence) -> bool:
        return all(sum(Fraction(a) * Fraction(x) for a, x in zip(row, mu)) == 0 for row in self.switch_rows)

    def relabeled(self, perm: Sequence[int]) -> "TrainTrack":
        """Same track with branch b renamed perm[b]."""
        mv = lambda e: (perm[e[0]], e[1])
        sws = tuple(Switch(tuple(map(mv, s.incoming)), tuple(map(mv, s.outgoing))) for s in self.switches)
        regs = tuple(RegionSpec(tuple(map(mv, r.darts)), r.genus, r.punctures) for r in self.regions)
        return TrainTrack(self.branches, sws, self.ambient, regs, self.name, self.birecurrent_attested)

    # -- records ----------------------------------------------------------------

    def to_record(self) -> dict:
        return {
            "kind": "track",
            "name": self.name,
            "genus": self.ambient.genus,
            "punctures": self.ambient.punctures,
            "branches": self.branches,
            "switches": [{"in": [list(e) for e in s.incoming], "out": [list(e) for e in s.outgoing]}
                         for s in self.switches],
            "regions": [{"darts": [list(d) for d in r.darts], "genus": r.genus, "punctures": r.punctures}
                        for r in self.regions],
            "birecurrent_attested": self.birecurrent_attested,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TrainTrack":
        if rec.get("kind") != "track":
            raise TrackError("not a track record")
        try:
            sws = tuple(Switch(tuple((int(b), int(e)) for b, e in s["in"]),
                               tuple((int(b), int(e)) for b, e in s["out"])) for s in rec["switches"])
            regs = tuple(RegionSpec(tuple((int(b), int(e)) for b, e in r["darts"]), int(r.get("genus", 0)),
                                    int(r.get("punctures", 0))) for r in rec.get("regions", []))
            tau = cls(int(rec["branches"]), sws, SurfaceSig(int(rec["genus"]), int(rec["punctures"])), regs,
                      str(rec.get("name", "")), bool(rec.get("birecurrent_attested", False)))
        except (KeyError, TypeError, ValueError) as e:
            raise TrackError(f"malformed track record: {e}") from None
        tau.end_site
        return tau


# -- validation -------------------------------------------------------------------

@dataclass(frozen=True)
class TrackDiagnostics:
    valence_ok: bool
    generic: bool
    branch_bound_ok: bool
    complementary_ok: bool
    recurrent: bool
    branch_bound: int
    generalized_chi: tuple[Fraction, ...] = ()


def branch_bound(sig: SurfaceSig) -> int:
    return 18 * sig.genus + 6 * sig.punctures - 18


def validate_track(tau: TrainTrack) -> TrackDiagnostics:
    tau.end_site
    tau.check_surface()
    valence_ok = True
    for sw in tau.switches:
        if not sw.incoming or not sw.outgoing:
            valence_ok = False
        elif sw.valence < 3:
            # a lone bivalent switch is allowed only on a closed-curve component
            (b1, _), (b2, _) = sw.incoming[0], sw.outgoing[0]
            if b1 != b2:
                valence_ok = False
    generic = all(sw.valence <= 3 for sw in tau.switches)
    gchi = tuple(Fraction(r["chi"]) - Fraction(r["cusps"], 2) for r in tau.complementary)
    bb = branch_bound(tau.ambient)
    rays = extreme_rays(tau.switch_rows, tau.branches)
    support = set()
    for r in rays:
        support |= {b for b, x in enumerate(r) if x}
    return TrackDiagnostics(valence_ok, generic, tau.branches <= bb, all(x < 0 for x in gchi),
                            len(support) == tau.branches, bb, gchi)


# -- the measure cone ------------------------------------------------------------------

def _primitive(v: list[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return tuple(x // g for x in v) if g else tuple(v)


def extreme_rays(rows: Sequence[Sequence[int]], m: int) -> list[tuple[int, ...]]:
    """Extreme rays of ``{x >= 0 : row . x = 0 for every row}`` as primitive integer vectors.

    Double description: start from the orthant and cut by one hyperplane at a
    time, combining adjacent rays across it (combinatorial adjacency test).
    The result is sorted, so it does not depend on processing order.
    """
    rays = [tuple(1 if i == j else 0 for i in range(m)) for j in range(m)]
    for row in rows:
        if not any(row):
            continue
        val = [sum(a * x for a, x in zip(row, r)) for r in rays]
        zero = [r for r, v in zip(rays, val) if v == 0]
        pos = [(r, v) for r, v in zip(rays, val) if v > 0]
        neg = [(r, v) for r, v in zip(rays, val) if v < 0]
        zsets = [frozenset(i for i, x in enumerate(r) if x == 0) for r in rays]
        new = list(zero)
        for p, vp in pos:
            zp = frozenset(i for i, x in enumerate(p) if x == 0)
            for q, vq in neg:
                common = zp & frozenset(i for i, x in enumerate(q) if x == 0)
                adjacent = True
                for r, zr in zip(rays, zsets):
                    if r is p or r is q or r == p or r == q:
                        continue
                    if common <= zr:
                        adjacent = False
                        break
                if adjacent:
                    new.append(_primitive([vp * y - vq * x for x, y in zip(p, q)]))
        rays = sorted(set(new))
    return rays


def is_extreme(rows: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """A non-zero cone point is extreme iff the switch system on its support has a 1-dimensional kernel."""
    supp = [b for b, x in enumerate(v) if x]
    if not supp:
        return False
    mat = [[Fraction(row[b]) for b in supp] for row in rows]
    return len(supp) - _rank(mat) == 1


def _rank(mat: list[list[Fraction]]) -> int:
    mat = [r[:] for r in mat]
    rank, ncols = 0, len(mat[0]) if mat else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for i in range(len(mat)):
            if i != rank and mat[i][c] != 0:
                f = mat[i][c] / mat[rank][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
    return rank


# -- carried curves ----------------------------------------------------------------------

Traversal = tuple[int, int, int]  # (branch, strand position in branch frame, direction +1/-1)


class _Comb:
    """Strands of an integral measure, combed through every switch."""

    def __init__(self, tau: TrainTrack, mu: Sequence[int]):
        if any(x < 0 for x in mu) or not tau.satisfies_switch_conditions(mu):
            raise TrackError("weights violate the switch conditions")
        self.tau, self.mu = tau, list(mu)
        self.offset = {}
        for sw in tau.switches:
            for ends in (sw.incoming, sw.outgoing):
                off = 0
                for e in ends:
                    self.offset[tuple(e)] = off
                    off += mu[e[0]]

    def to_switch(self, end: End, p: int) -> int:
        w = self.mu[end[0]]
        q = p if self.tau.same_frame(end) else w - 1 - p
        return self.offset[end] + q

    def from_switch(self, s: int, side: str, pos: int) -> tuple[End, int]:
        sw = self.tau.switches[s]
        for e in (sw.incoming if side == "in" else sw.outgoing):
            e = tuple(e)
            off, w = self.offset[e], self.mu[e[0]]
            if off <= pos < off + w:
                q = pos - off
                return e, (q if self.tau.same_frame(e) else w - 1 - q)
        raise TrackError("strand lost at a switch")

    def step(self, t: Traversal) -> tuple[Traversal, tuple[int, str, int]]:
        """Next traversal, and the passage (switch, entry side, entry position)."""
        b, p, d = t
        end = (b, 1 if d > 0 else 0)
        s, side, _ = self.tau.end_site[end]
        pos = self.to_switch(end, p)
        other = "out" if side == "in" else "in"
        e2, p2 = self.from_switch(s, other, pos)
        return (e2[0], p2, 1 if e2[1] == 0 else -1), (s, side, pos)

    def components(self) -> list[list[Traversal]]:
        seen, out = set(), []
        for b in range(len(self.mu)):
            for p in range(self.mu[b]):
                if (b, p) in seen:
                    continue
                t = (b, p, 1)
                comp = []
                while (t[0], t[1]) not in seen:
                    seen.add((t[0], t[1]))
                    comp.append(t)
                    t, _ = self.step(t)
                out.append(comp)
        return out


@dataclass(frozen=True)
class VertexCycle:
    measure: tuple[int, ...]
    curve: tuple[tuple[int, int], ...]  # cyclic sequence of (branch, direction)

    def to_record(self) -> dict:
        return {"kind": "vertex_cycle", "measure": list(self.measure), "curve": [list(x) for x in self.curve]}


def carried_curve(tau: TrainTrack, mu: Sequence[int]) -> list[Traversal]:
    comps = _Comb(tau, mu).components()
    if len(comps) != 1:
        raise TrackError(f"measure carries {len(comps)} components, not one curve")
    return comps[0]


def counting_measure(tau: TrainTrack, curve: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    mu = [0] * tau.branches
    for b, _ in curve:
        mu[b] += 1
    return tuple(mu)


def check_lemma51(vc: VertexCycle) -> None:
    uses: dict[int, list[int]] = {}
    for b, d in vc.curve:
        uses.setdefault(b, []).append(d)
    for b, ds in uses.items():
        if len(ds) > 2 or (len(ds) == 2 and ds[0] == ds[1]):
            raise Lemma51Violation(f"vertex cycle {vc.measure} runs over branch {b} as {ds}")


def vertex_cycles(tau: TrainTrack) -> list[VertexCycle]:
    diag = validate_track(tau)
    if not diag.recurrent:
        raise TrackError("track is not recurrent")
    out = []
    for ray in extreme_rays(tau.switch_rows, tau.branches):
        trav = carried_curve(tau, ray)
        vc = VertexCycle(ray, tuple((b, d) for b, _, d in trav))
        check_lemma51(vc)
        out.append(vc)
    return out


# -- realizing two carried curves together --------------------------------------------

@dataclass
class RealizedPair:
    raw: PairConfig  # straight from the tie neighborhood
    config: PairConfig  # after bigon reduction

    @property
    def raw_crossings(self) -> int:
        return self.raw.n


def realize_pair(tau: TrainTrack, v1: VertexCycle, v2: VertexCycle) -> RealizedPair:
    """Draw both curves in a tie neighborhood and read off the pair.

    In each branch the strands of the first curve run left of those of the
    second, so all crossings sit inside switches; a switch with one branch on a
    side contributes at most (first strands) x (second strands) crossings.
    """
    if v1.measure == v2.measure:
        raise TrackError("realize_pair needs two different vertex cycles")
    trav = [carried_curve(tau, v.measure) for v in (v1, v2)]
    W = [v1.measure[b] + v2.measure[b] for b in range(tau.branches)]

    # tie orders: item = (curve, branch, position); switch frame left to right
    ties = []
    for s, sw in enumerate(tau.switches):
        sides = {}
        for side, ends in (("in", sw.incoming), ("out", sw.outgoing)):
            items = []
            for e in ends:
                e = tuple(e)
                b = e[0]
                loc = [(0, b, p) for p in range(v1.measure[b])] + [(1, b, p) for p in range(v2.measure[b])]
                if not tau.same_frame(e):
                    loc.reverse()
                items.extend(loc)
            sides[side] = items
        ties.append(sides)

    # strand matching through each switch, then bubble sort into the outgoing order
    crossings_at = []  # per switch: list of (left strand, right strand) in upward order
    perm_at = []
    for s, sides in enumerate(ties):
        per_curve_out = {0: [], 1: []}
        for j, (c, b, p) in enumerate(sides["out"]):
            per_curve_out[c].append(j)
        seen = {0: 0, 1: 0}
        pi = []
        for c, b, p in sides["in"]:
            pi.append(per_curve_out[c][seen[c]])
            seen[c] += 1
        order = list(range(len(pi)))
        swaps = []
        changed = True
        while changed:
            changed = False
            for j in range(len(order) - 1):
                if pi[order[j]] > pi[order[j + 1]]:
                    swaps.append((j, order[j], order[j + 1]))
                    order[j], order[j + 1] = order[j + 1], order[j]
                    changed = True
        for j, left, right in swaps:
            if sides["in"][left][0] == sides["in"][right][0]:
                raise AssertionError("strands of one curve cross inside a switch")
        crossings_at.append(swaps)
        perm_at.append(pi)

    # walk both curves; record direction through each switch strand and crossing order
    direction: dict[tuple[int, int], int] = {}
    per_strand: dict[tuple[int, int], list[int]] = {}
    for s, swaps in enumerate(crossings_at):
        for t, (_, left, right) in enumerate(swaps):
            per_strand.setdefault((s, left), []).append(t)
            per_strand.setdefault((s, right), []).append(t)
    seqs = []
    for c in (0, 1):
        seq = []
        for tv in trav[c]:
            b, p, d = tv
            end = (b, 1 if d > 0 else 0)
            s, side, _ = tau.end_site[end]
            pos = _tie_index(tau, side, end, c, p, v1.measure, v2.measure)
            if side == "in":
                strand, up = pos, 1
            else:
                strand, up = perm_at[s].index(pos), -1
            direction[(s, strand)] = up
            ts = per_strand.get((s, strand), [])
            seq.extend((s, t) for t in (ts if up > 0 else reversed(ts)))
        seqs.append(seq)
    alpha_seq, beta_seq = seqs
    X = len(alpha_seq)
    if X != len(beta_seq) or len(set(alpha_seq)) != X:
        raise AssertionError("crossings not met once by each curve")
    if X == 0:
        cfg = PairConfig(0, (), ())
        return RealizedPair(cfg, cfg)
    label = {x: i + 1 for i, x in enumerate(alpha_seq)}
    beta_order = [label[x] for x in beta_seq]
    k = beta_order.index(1)
    beta_order = beta_order[k:] + beta_order[:k]
    signs = [0] * X
    corner_cell = {}

    # cells: branch gaps, switch gaps (split at every crossing)
    ncell = 0
    branch_cells = []
    for b in range(tau.branches):
        branch_cells.append(list(range(ncell, ncell + W[b] + 1)))
        ncell += W[b] + 1
    bottom, top = [], []
    for s, swaps in enumerate(crossings_at):
        w = len(perm_at[s])
        cur = list(range(ncell, ncell + w + 1))
        ncell += w + 1
        bottom.append(cur[:])
        for t, (j, left, right) in enumerate(swaps):
            key = (s, t)
            c = label[key]
            cl, cr = ties[s]["in"][left][0], ties[s]["in"][right][0]
            a_strand, b_strand = (left, right) if cl == 0 else (right, left)
            da, db = direction[(s, a_strand)], direction[(s, b_strand)]
            signs[c - 1] = da * db * (1 if a_strand == left else -1)
            new = ncell
            ncell += 1
            cells = {"bottom": cur[j + 1], "top": new, "left": cur[j], "right": cur[j + 2]}
            cur[j + 1] = new

            def halves(strand, is_alpha, d):
                top_slot = (ALPHA_OUT if d > 0 else ALPHA_IN) if is_alpha else (BETA_OUT if d > 0 else BETA_IN)
                bot_slot = (ALPHA_IN if d > 0 else ALPHA_OUT) if is_alpha else (BETA_IN if d > 0 else BETA_OUT)
                return top_slot, bot_slot

            l_top, l_bot = halves(left, left == a_strand, direction[(s, left)])
            r_top, r_bot = halves(right, right == a_strand, direction[(s, right)])
            for name, (h1, h2) in (("bottom", (l_bot, r_bot)), ("right", (r_bot, l_top)),
                                   ("top", (l_top, r_top)), ("left", (r_top, l_bot))):
                corner_cell[(c,) + tuple(sorted((h1, h2)))] = cells[name]
        top.append(cur)

    parent = list(range(ncell + len(tau.faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    arcs = []
    for (b, e), (s, side, _) in tau.end_site.items():
        off = _block_offset(tau, side, (b, e), v1.measure, v2.measure)
        for g in range(W[b] + 1):
            g2 = g if tau.same_frame((b, e)) else W[b] - g
            tie_cell = (bottom[s] if side == "in" else top[s])[off + g2]
            arcs.append(branch_cells[b][g])
            parent[find(branch_cells[b][g])] = find(tie_cell)
    for f, (cyc, _) in enumerate(tau.faces):
        node = ncell + f
        for b, e in cyc:
            cell = branch_cells[b][W[b]] if e == 0 else branch_cells[b][0]
            parent[find(cell)] = find(node)

    chi: dict[int, int] = {}
    for x in range(ncell):
        chi[find(x)] = chi.get(find(x), 0) + 1
    for x in arcs:
        chi[find(x)] -= 1
    punct: dict[int, int] = {}
    for reg in tau.complementary:
        root = find(ncell + reg["faces"][0])
        for f in reg["faces"][1:]:
            if find(ncell + f) != root:
                raise AssertionError("joined track faces fell into different regions")
        chi[root] = chi.get(root, 0) + reg["chi"]
        punct[root] = punct.get(root, 0) + reg["punctures"]

    cfg = PairConfig.build(beta_order, signs)
    surf = trace(cfg)
    faces_in: dict[int, list[int]] = {}
    for f, corners in enumerate(face_corners(cfg, surf)):
        cn = next(iter(corners))
        faces_in.setdefault(find(corner_cell[cn]), []).append(f)
    if set(faces_in) != set(chi):
        raise AssertionError("a complementary region misses both curves")
    groups = []
    for root, fs in faces_in.items():
        k = punct.get(root, 0)
        twice_h = 2 - chi[root] - len(fs) - k
        if twice_h < 0 or twice_h % 2:
            raise AssertionError("inconsistent region topology in the tie neighborhood")
        groups.append((fs, twice_h // 2, k))
    decs, joins = _regions_to_decorations(groups)
    raw = cfg.with_regions(decs, joins)
    got = trace(raw)
    if (got.genus, got.puncture_count) != (tau.ambient.genus, tau.ambient.punctures):
        raise AssertionError("realized pair lives on the wrong surface")
    return RealizedPair(raw, reduce_bigons(raw))


def _block_offset(tau: TrainTrack, side: str, end: End, mu1, mu2) -> int:
    sw = tau.switches[tau.end_site[end][0]]
    off = 0
    for e in (sw.incoming if side == "in" else sw.outgoing):
        if tuple(e) == end:
            return off
        off += mu1[e[0]] + mu2[e[0]]
    raise TrackError("end not on this switch side")


def _tie_index(tau: TrainTrack, side: str, end: End, c: int, p: int, mu1, mu2) -> int:
    b = end[0]
    k = p if c == 0 else mu1[b] + p
    if not tau.same_frame(end):
        k = mu1[b] + mu2[b] - 1 - k
    return _block_offset(tau, side, end, mu1, mu2) + k


# -- tracks from smoothed curve pairs ------------------------------------------------------

def track_from_pair(cfg: PairConfig, choices: Sequence[int], name: str = "") -> TrainTrack:
    """Smooth every crossing of ``alpha u beta`` and split it into two trivalent switches.

    ``choices[c-1]`` in {0, 1} picks which opposite pair of corners at crossing
    ``c`` become cusps.  Branches: alpha edges, then beta edges, then one short
    branch per crossing.  Punctures, genus and joins of the pair's regions are
    carried over to the matching complementary regions.
    """
    n = cfg.n
    if n == 0 or len(choices) != n:
        raise TrackError("need one smoothing choice per crossing")
    surf = trace(cfg)
    pos = cfg.beta_position

    def half_edge(c: int, slot: int) -> End:
        if slot == ALPHA_OUT:
            return (c - 1, 0)
        if slot == ALPHA_IN:
            return ((c - 2) % n, 1)
        j = pos[c]
        return (n + j, 0) if slot == BETA_OUT else (n + (j - 1) % n, 1)

    switches = []
    for c in range(1, n + 1):
        ccw = ([ALPHA_OUT, BETA_OUT, ALPHA_IN, BETA_IN] if cfg.signs[c - 1] > 0
               else [ALPHA_OUT, BETA_IN, ALPHA_IN, BETA_OUT])
        r = choices[c - 1]
        h = [half_edge(c, s) for s in ccw[r:] + ccw[:r]]
        m = 2 * n + c - 1
        switches.append(Switch((h[0], h[1]), ((m, 0),)))
        switches.append(Switch(((m, 1),), (h[3], h[2])))
    regions = []
    for reg in surf.regions:
        if reg.is_disk:
            continue
        darts = []
        for f in reg.faces:
            d = surf.faces[f][0]
            darts.append(half_edge(d // 4 + 1, d % 4))
        regions.append(RegionSpec(tuple(darts), reg.genus, reg.punctures))
    return TrainTrack(3 * n, tuple(switches), SurfaceSig(surf.genus, surf.puncture_count), tuple(regions), name)


def smoothing_search(cfg: PairConfig, name: str = "", limit: int | None = None) -> TrainTrack | None:
    """First smoothing (in lexicographic order of choices) giving a valid generic recurrent track."""
    import itertools
    for k, ch in enumerate(itertools.product((0, 1), repeat=cfg.n)):
        if limit is not None and k >= limit:
            break
        tau = track_from_pair(cfg, ch, name)
        d = validate_track(tau)
        if d.valence_ok and d.generic and d.branch_bound_ok and d.complementary_ok and d.recurrent:
            return tau
    return None


# -- pairwise distances between vertex cycles -------------------------------------------------

@dataclass
class DistanceRow:
    i: int
    j: int
    raw_crossings: int
    crossings: int
    verdict: str  # "0", "<=1", "<=2", "3" or a conditional ">=4 within radius K"
    via: str
    certified_le3: bool


@dataclass
class DistanceReport:
    track: str
    radius: int
    params: BoundParams
    rows: list[DistanceRow] = field(default_factory=list)

    @property
    def flagged(self) -> list[DistanceRow]:
        return [r for r in self.rows if not r.certified_le3]


def vertex_cycle_distance_report(tau: TrainTrack, radius: int | None = None,
                                 params: BoundParams = BoundParams(), seed: int = 0) -> DistanceReport:
    from .path import distance_bracket
    if tau.ambient.sporadic:
        from .bounds import SporadicSurface
        raise SporadicSurface("distances are not interpreted on sporadic surfaces")
    radius = 2 * 4 * tau.branches if radius is None else radius
    vcs = vertex_cycles(tau)
    rep = DistanceReport(tau.name, radius, params)
    for i, a in enumerate(vcs):
        rep.rows.append(DistanceRow(i, i, 0, 0, "0", "identical", True))
        for j in range(i + 1, len(vcs)):
            rp = realize_pair(tau, a, vcs[j])
            cfg = rp.config
            if cfg.n == 0:
                rep.rows.append(DistanceRow(i, j, rp.raw_crossings, 0, "<=1", "disjoint", True))
                continue
            br = distance_bracket(cfg, params, oracle_radius=radius, seed=seed)
            if br.upper <= 2:
                verdict, via, ok = "<=2", br.upper_via, True
            elif br.upper == 3:
                verdict, via, ok = "3", br.upper_via, True
            else:
                verdict = br.oracle.label if br.oracle is not None else f"<={br.upper}"
                via, ok = br.upper_via, False
            rep.rows.append(DistanceRow(i, j, rp.raw_crossings, cfg.n, verdict, via, ok))
    return rep


def load_corpus() -> list[TrainTrack]:
    """The curated tracks shipped with the package."""
    from importlib.resources import files
    from . import formats
    text = files("fillpair").joinpath("data/tracks.fp").read_text()
    return [TrainTrack.from_record(r) for r in formats.loads(text)]
