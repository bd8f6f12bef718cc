"""Curve-graph paths from the first curve toward the second, with checkable certificates.

Each step draws a new curve ``c_{j+1}`` in the faces of ``(c_j, beta)``.  The
drawing never touches ``c_j``, so consecutive curves are disjoint, and the
configuration ``(c_{j+1}, beta)`` is read off from the drawing.  The walk stops
once the current pair no longer fills, which puts it within distance 2 of beta.

:func:`verify_certificate` re-derives every configuration from the drawings
with its own overlay construction; only face tracing is shared with the
builder.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import formats
from .bounds import (BoundParams, SporadicSurface, SurfaceSig, distance_upper_log, girth_function, mpq,
                     thm12_distance_upper, BelowThreshold, Inconclusive, DistanceBound)
from .curves import Chord, Drawing, SearchExhausted, normal_drawings
from .cutdual import (Extraction, ExtractionError, _check_candidate, build_graph, cut, cycle_vertices, cycles, extract_curve, girth,
                      mass_split, parallel_classes)
from .pair import PairConfig, PairDiagnostics, canonicalize, trace, validate

import mpmath


class PathInputError(ValueError):
    pass


class PathStall(RuntimeError):
    def __init__(self, msg: str, dump: dict):
        super().__init__(msg)
        self.dump = dump


@dataclass(frozen=True)
class Step:
    intersection: int
    next_intersection: int
    drawing: Drawing


@dataclass(frozen=True)
class PathCertificate:
    curves: tuple[PairConfig, ...]
    steps: tuple[Step, ...]
    terminal: str  # "disjoint" or "nonfilling"
    claimed_upper: int
    source: str
    params: BoundParams = BoundParams()
    notes: tuple[dict, ...] = field(default=(), compare=False)

    @property
    def length(self) -> int:
        return len(self.steps)


def source_digest(cfg: PairConfig) -> str:
    return hashlib.sha256(formats.dump_record(formats.config_record(canonicalize(cfg))).encode()).hexdigest()


# -- certificate records ----------------------------------------------------

def certificate_record(cert: PathCertificate) -> dict:
    return {
        "kind": "path-certificate",
        "source": cert.source,
        "params": cert.params.as_dict(),
        "curves": [formats.config_record(c) for c in cert.curves],
        "steps": [{"i": s.intersection, "i_next": s.next_intersection, "drawing": s.drawing.to_json()}
                  for s in cert.steps],
        "terminal": cert.terminal,
        "claimed_upper": cert.claimed_upper,
        "notes": list(cert.notes),
    }


def certificate_from_record(rec: dict) -> PathCertificate:
    if rec.get("kind") != "path-certificate":
        raise formats.FormatError("not a path-certificate record")
    try:
        return PathCertificate(
            curves=tuple(formats.config_from_record(c) for c in rec["curves"]),
            steps=tuple(Step(int(s["i"]), int(s["i_next"]), Drawing.from_json(s["drawing"])) for s in rec["steps"]),
            terminal=rec["terminal"],
            claimed_upper=int(rec["claimed_upper"]),
            source=rec["source"],
            params=BoundParams.from_dict(rec["params"]),
            notes=tuple(rec.get("notes", [])),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise formats.FormatError(f"malformed certificate: {e}") from None


# -- independent overlay -------------------------------------------------------

class ReplayError(ValueError):
    pass


# slots: 0 first-curve out, 1 beta out, 2 first-curve in, 3 beta in
_CCW = {1: (0, 1, 2, 3), -1: (0, 3, 2, 1)}


@dataclass
class Overlay:
    n: int
    beta_order: tuple[int, ...]
    signs: tuple[int, ...]
    regions: set  # {(faces, genus, punctures)} against the traced faces of ``target``
    anchor_groups: dict  # face -> [((dart, key), region group)] in canonical order


def _overlay(cfg: PairConfig, drawing: Drawing, target: PairConfig | None) -> Overlay:
    """Build ``c u beta u gamma`` as one fat graph and read off ``(gamma, beta)``."""
    surf = trace(cfg)
    n = cfg.n
    chords = drawing.chords
    L = len(chords)
    if L == 0:
        raise ReplayError("empty drawing")
    for reg in surf.regions:
        if len(reg.faces) != 1 or reg.genus or reg.punctures > 1:
            raise ReplayError("source pair does not fill")
    fod = surf.face_of_dart
    inv = cfg.involution
    occs = set()
    on_edge: dict[int, list] = {}
    for t, ch in enumerate(chords):
        if ch.start == ch.end:
            raise ReplayError(f"chord {t} is degenerate")
        for d, k in (ch.start, ch.end):
            if not (isinstance(d, int) and 0 <= d < 4 * n) or d % 2 == 0:
                raise ReplayError(f"chord {t} has an endpoint off beta")
            if fod[d] != ch.face:
                raise ReplayError(f"chord {t} leaves face {ch.face}")
            if not 0 < k < 1:
                raise ReplayError(f"chord {t} has key outside (0, 1)")
            if (d, k) in occs:
                raise ReplayError(f"chord {t} reuses a point")
            occs.add((d, k))
        nxt = chords[(t + 1) % L]
        if nxt.start != (inv[ch.end[0]], ch.end[1]):
            raise ReplayError(f"chord {t} is not continued across beta")
        e = cfg.edge_of(ch.start[0]) - n
        on_edge.setdefault(e, []).append((ch.start[1], t))
    V = n + L
    link = [-1] * (4 * V)

    def join(a, b):
        link[a], link[b] = b, a

    for c in range(n):
        join(4 * c, 4 * ((c + 1) % n) + 2)
    seq = []
    for j, c in enumerate(cfg.beta_order):
        seq.append(c - 1)
        seq.extend(n + t for _, t in sorted(on_edge.get(j, [])))
    for i, v in enumerate(seq):
        join(4 * v + 1, 4 * seq[(i + 1) % len(seq)] + 3)
    for t in range(L):
        join(4 * (n + t), 4 * (n + (t + 1) % L) + 2)
    new_signs = tuple(1 if chords[t].start[0] % 4 == 1 else -1 for t in range(L))
    all_signs = list(cfg.signs) + list(new_signs)
    rot = [0] * (4 * V)
    for v in range(V):
        order = _CCW[all_signs[v]]
        for i in range(4):
            rot[4 * v + order[i]] = 4 * v + order[(i + 1) % 4]
    cface = [-1] * (4 * V)
    nf = 0
    for s in range(4 * V):
        if cface[s] >= 0:
            continue
        d = s
        while cface[d] < 0:
            cface[d] = nf
            d = rot[link[d]]
        nf += 1
    if V - 2 * V + nf != n - 2 * n + len(surf.faces):
        raise ReplayError("drawing is not embedded")
    parent = list(range(nf))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in range(n):
        parent[find(cface[4 * c])] = find(cface[4 * ((c + 1) % n) + 2])
    chord_faces = {ch.face for ch in chords}
    start_vertex = {j: cfg.beta_order[j] - 1 for j in range(n)}

    def piece_at(d, k):
        if d % 2 == 0:
            return cface[d]
        if (d, k) in occs or not 0 < k < 1:
            raise ReplayError("anchor sits on a chord endpoint")
        pts = sorted(on_edge.get(cfg.edge_of(d) - n, []))
        below = [t for key, t in pts if key < k]
        above = [t for key, t in pts if key > k]
        if d % 4 == 1:
            a = n + below[-1] if below else start_vertex[cfg.edge_of(d) - n]
            return cface[4 * a + 1]
        if above:
            b = n + above[0]
        else:
            j = cfg.edge_of(d) - n
            b = start_vertex[(j + 1) % n]
        return cface[4 * b + 3]

    anchors = {}
    for f, d, k in drawing.anchors:
        if f in anchors:
            raise ReplayError(f"two anchors in face {f}")
        if not (isinstance(d, int) and 0 <= d < 4 * n) or fod[d] != f:
            raise ReplayError(f"anchor of face {f} is off its boundary")
        if d % 2 == 0 and k != 0:
            raise ReplayError(f"anchor of face {f} has a key on an alpha side")
        anchors[f] = (d, k)
    punct_piece = []
    anchor_groups = {}
    for f, cyc in enumerate(surf.faces):
        punct = surf.regions[surf.region_of_face[f]].punctures
        alphas = [d for d in cyc if d % 2 == 0]
        if f in anchors and not (punct and f in chord_faces):
            raise ReplayError(f"superfluous anchor in face {f}")
        if not punct:
            continue
        if f not in chord_faces:
            punct_piece.append(cface[alphas[0]])
            continue
        if f not in anchors:
            raise ReplayError(f"punctured face {f} needs an anchor")
        punct_piece.append(piece_at(*anchors[f]))
        cands = [(d, Fraction(0)) for d in sorted(alphas)]
        for d in sorted(x for x in cyc if x % 2):
            ks = [Fraction(0)] + sorted(k for dd, k in occs if dd == d) + [Fraction(1)]
            cands.extend((d, (a + b) / 2) for a, b in zip(ks, ks[1:]))
        anchor_groups[f] = [(c, find(piece_at(*c))) for c in cands]
    beta_new = [v - n + 1 for v in seq if v >= n]
    r = beta_new.index(1)
    beta_new = tuple(beta_new[r:] + beta_new[:r])
    out = Overlay(L, beta_new, new_signs, set(), anchor_groups)
    if target is None:
        return out
    if (target.n, target.beta_order, target.signs) != (L, beta_new, new_signs):
        raise ReplayError("next configuration does not match the drawing")
    tsurf = trace(target)
    group_faces: dict[int, list[int]] = {}
    for tf, cyc in enumerate(tsurf.faces):
        # target dart x sits at new vertex x // 4 of the overlay
        roots = {find(cface[4 * n + x]) for x in cyc}
        if len(roots) != 1:
            raise ReplayError("faces of the next configuration straddle regions")
        group_faces.setdefault(roots.pop(), []).append(tf)
    pieces: dict[int, int] = {}
    for p in range(nf):
        pieces[find(p)] = pieces.get(find(p), 0) + 1
    glues: dict[int, int] = {}
    for c in range(n):
        root = find(cface[4 * c])
        glues[root] = glues.get(root, 0) + 1
    punct: dict[int, int] = {}
    for p in punct_piece:
        punct[find(p)] = punct.get(find(p), 0) + 1
    if set(pieces) != set(group_faces):
        raise ReplayError("a region misses the next configuration")
    for root, tfs in group_faces.items():
        k = punct.get(root, 0)
        chi = pieces[root] - glues.get(root, 0) - k
        twice_h = 2 - chi - len(tfs) - k
        if twice_h < 0 or twice_h % 2:
            raise ReplayError("region with impossible topology")
        out.regions.add((tuple(sorted(tfs)), twice_h // 2, k))
    return out


def canonical_anchors(cfg: PairConfig, drawing: Drawing) -> Drawing:
    """Replace each anchor by the first candidate position of its face in the same region."""
    if not drawing.anchors:
        return drawing
    ov = _overlay(cfg, drawing, None)
    new = [(f, *_canonical_anchor(ov, f, d, k)) for f, d, k in drawing.anchors]
    return Drawing(drawing.chords, tuple(sorted(new)))


def _canonical_anchor(ov: Overlay, f: int, d: int, k: Fraction) -> tuple[int, Fraction]:
    cands = ov.anchor_groups[f]
    root = dict(cands).get((d, k))
    if root is None:
        raise ReplayError(f"anchor of face {f} is not a candidate position")
    return next(c for c, g in cands if g == root)


# -- verification --------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    ok: bool
    locator: str = ""

    def __bool__(self):
        return self.ok


def verify_certificate(cert: PathCertificate) -> Verdict:
    """Re-check every claim of a certificate from its raw data."""
    try:
        return _verify(cert)
    except Exception as e:  # malformed data of any kind is a failed certificate
        return Verdict(False, f"malformed: {type(e).__name__}: {e}")


def _verify(cert: PathCertificate) -> Verdict:
    curves, steps = cert.curves, cert.steps
    m = len(steps)
    if len(curves) != m + 1:
        return Verdict(False, "curves/steps length mismatch")
    if cert.source != source_digest(curves[0]):
        return Verdict(False, "source digest does not match curves[0]")
    first = curves[0]
    if first.n == 0:
        if m or cert.terminal != "disjoint" or cert.claimed_upper != 1:
            return Verdict(False, "disjoint input must give the one-edge certificate")
        return Verdict(True)
    diags: list[PairDiagnostics] = []
    for j, c in enumerate(curves):
        d = validate(c)
        diags.append(d)
        if not (d.connected and d.bigon_free):
            return Verdict(False, f"curve {j}: configuration not connected and bigon-free")
        if not (d.alpha_essential and d.beta_essential):
            return Verdict(False, f"curve {j}: inessential curve")
        if (d.genus, d.punctures) != (diags[0].genus, diags[0].punctures):
            return Verdict(False, f"curve {j}: surface changed")
    for j, s in enumerate(steps):
        if not diags[j].filling:
            return Verdict(False, f"step {j}: continues from a non-filling pair")
        if s.intersection != curves[j].n or s.next_intersection != curves[j + 1].n:
            return Verdict(False, f"step {j}: intersection numbers misreported")
        if not s.next_intersection < s.intersection and diags[j + 1].filling:
            return Verdict(False, f"step {j}: intersection does not decrease")
        try:
            ov = _overlay(curves[j], s.drawing, curves[j + 1])
        except ReplayError as e:
            return Verdict(False, f"step {j}: {e}")
        expected = {(r.faces, r.genus, r.punctures) for r in trace(curves[j + 1]).regions}
        if ov.regions != expected:
            return Verdict(False, f"step {j}: regions of the next configuration do not match")
        for f, d, k in s.drawing.anchors:
            if (d, k) != _canonical_anchor(ov, f, d, k):
                return Verdict(False, f"step {j}: anchor in face {f} not canonical")
    last = diags[-1]
    if cert.terminal == "nonfilling":
        if last.filling:
            return Verdict(False, "terminal pair still fills")
        if cert.claimed_upper != m + 2:
            return Verdict(False, "claimed bound is not path length + 2")
    else:
        return Verdict(False, f"unknown terminal {cert.terminal!r}")
    return Verdict(True)


# -- builder ---------------------------------------------------------------

NORMAL_BUDGET = 200_000


def _contraction_ok(n_next: int, n: int, xi: int, params: BoundParams) -> bool:
    with mpmath.workprec(96):
        return mpmath.mpf(n_next) <= girth_function(xi, params) * n / mpmath.power(xi, mpq(params.lam))


def _advance(cur: PairConfig, diag: PairDiagnostics, xi: int, params: BoundParams,
             rng: random.Random, retries: int):
    cs = cut(cur, diag)
    classes = parallel_classes(cs)
    large, _ = mass_split(classes, xi, params.lam)
    # a step must lower i(., beta) unless it ends the walk on a non-filling pair
    accept = lambda c, d: d.bigon_free and d.alpha_essential and (c.n < cur.n or not d.filling)
    tried = []
    for doubled in ((True, False) if cs.punctured else (False,)):
        g = build_graph(cs, classes, doubled)
        for pruned in ((large, set()) if large else (set(),)):
            cands = cycles(g, pruned, limit=1 + retries)
            head, rest = cands[:1], cands[1:]
            rng.shuffle(rest)
            for cyc in head + rest:
                faces = {g.vertices[v][0] for v in cycle_vertices(g, cyc)} & cs.punctured
                for sides in ({}, {f: 1 for f in faces}) if faces else ({},):
                    tried.append(len(cyc))
                    try:
                        ex = extract_curve(cyc, cs, classes, g, sides, accept)
                    except ExtractionError:
                        continue
                    note = {
                        "mode": g.mode, "pruned": sorted(pruned), "cycle": [list(x) for x in cyc],
                        "girth": girth(g, pruned), "vertices": len(g.vertices),
                        "masses": [m for _, m in ex.crossings],
                    }
                    return ex, note
    found = _normal_search(cs, cur, accept)
    if found is not None:
        ex, w = found
        return ex, {"mode": "normal", "weight": w}
    raise PathStall("extraction stalled: no candidate curve lowers the intersection number", {
        "n": cur.n, "masses": [c.mass for c in classes], "large": sorted(large),
        "attempted_cycle_lengths": tried, "config": formats.config_record(cur),
    })


def _normal_search(cs, cur: PairConfig, accept, budget: int = NORMAL_BUDGET, max_weight: int | None = None):
    """Exhaustive search over normal curves of increasing weight; None when nothing qualifies."""
    left = [budget]
    try:
        for w in range(1, (cur.n + 2 if max_weight is None else max_weight) + 1):
            for d in normal_drawings(cur, cs.surface, w, left):
                left[0] -= 1
                if left[0] < 0:
                    return None
                r = _check_candidate(cs, d)
                if r is not None and r[1].connected and accept(*r):
                    return Extraction(r[0], d, (), [], r[1]), w
    except SearchExhausted:
        return None
    return None


def build_path(cfg: PairConfig, params: BoundParams = BoundParams(), seed: int = 0,
               retries: int = 63, max_steps: int = 256) -> PathCertificate:
    src = source_digest(cfg)
    if cfg.n == 0:
        return PathCertificate((cfg,), (), "disjoint", 1, src, params)
    diag = validate(cfg)
    if not (diag.connected and diag.bigon_free):
        raise PathInputError("input must be connected and bigon-free")
    if not (diag.alpha_essential and diag.beta_essential):
        raise PathInputError("both curves must be essential")
    sig = SurfaceSig(diag.genus, diag.punctures)
    if sig.sporadic:
        raise SporadicSurface("sporadic")
    xi = sig.complexity
    rng = random.Random(seed)
    curves, steps, notes = [cfg], [], []
    cur, cur_diag = cfg, diag
    while cur_diag.filling:
        if len(steps) >= max_steps:
            raise PathStall("step budget exhausted", {"n": cur.n})
        ex, note = _advance(cur, cur_diag, xi, params, rng, retries)
        drawing = canonical_anchors(cur, ex.drawing)
        nxt = ex.gamma_beta
        note["contraction"] = _contraction_ok(nxt.n, cur.n, xi, params)
        steps.append(Step(cur.n, nxt.n, drawing))
        notes.append(note)
        curves.append(nxt)
        cur, cur_diag = nxt, ex.diagnostics
    return PathCertificate(tuple(curves), tuple(steps), "nonfilling", len(steps) + 2, src, params,
                           tuple(notes))


# -- distance bracket ------------------------------------------------------------

@dataclass
class Bracket:
    lower: int
    upper: int
    lower_via: str
    upper_via: str
    parameterized: DistanceBound | None = None
    certificate: PathCertificate | None = None
    oracle: object = None
    notes: list = field(default_factory=list)


def distance_bracket(cfg: PairConfig, params: BoundParams = BoundParams(),
                     oracle_radius: int | None = None, seed: int = 0) -> Bracket:
    """Certified lower and upper bounds on the curve-graph distance of the pair."""
    if cfg.n == 0:
        return Bracket(1, 1, "disjoint (curves assumed non-isotopic)", "disjoint")
    diag = validate(cfg)
    if not diag.bigon_free:
        raise PathInputError("distance_bracket needs a bigon-free configuration")
    sig = SurfaceSig(diag.genus, diag.punctures)
    if sig.sporadic:
        # filling no longer means distance >= 3 there
        raise SporadicSurface(f"S_{{{diag.genus},{diag.punctures}}} is sporadic")
    if not diag.filling:
        return Bracket(2, 2, "intersecting in minimal position", "non-filling")
    lower, upper = 3, distance_upper_log(cfg.n, params)
    lower_via, upper_via = "filling", "formula: logarithmic bound"
    out = Bracket(lower, upper, lower_via, upper_via)
    try:
        out.parameterized = thm12_distance_upper(sig.complexity, params, cfg.n)
    except (BelowThreshold, Inconclusive, ValueError) as e:
        out.notes.append(f"parameterized bound unavailable: {e}")
    try:
        cert = build_path(cfg, params, seed=seed)
        out.certificate = cert
        if cert.claimed_upper < out.upper:
            out.upper, out.upper_via = cert.claimed_upper, "certificate"
    except (PathStall, SporadicSurface, PathInputError) as e:
        out.notes.append(f"no certificate: {e}")
    if oracle_radius is not None and out.upper > 3:
        from .oracle import classify_distance
        verdict = classify_distance(cfg, oracle_radius)
        out.oracle = verdict
        if verdict.value == 3:
            out.upper, out.upper_via = 3, "oracle witness"
    return out
