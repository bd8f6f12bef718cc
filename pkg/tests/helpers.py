"""Shared fixtures and independent oracles for the test suite."""
from __future__ import annotations

import functools
from fractions import Fraction

from hypothesis import strategies as st

from fillpair.bounds import SurfaceSig
from fillpair.oracle import EnumFilter, enumerate_configs
from fillpair.pair import PairConfig, trace, validate

# criterion number -> (passed, detail), filled in by test_acceptance and printed by conftest
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@functools.lru_cache(maxsize=None)
def corpus(n: int) -> tuple:
    """All enumerated configurations with exactly n crossings, with their diagnostics."""
    return tuple((c, validate(c)) for c in enumerate_configs(EnumFilter(n, require_filling=True)))


def corpus_upto(n_max: int):
    for n in range(1, n_max + 1):
        yield from corpus(n)


def nonsporadic(diag) -> bool:
    return not SurfaceSig(diag.genus, diag.punctures).sporadic


@st.composite
def raw_configs(draw, min_n: int = 1, max_n: int = 7) -> PairConfig:
    n = draw(st.integers(min_n, max_n))
    rest = draw(st.permutations(range(2, n + 1)))
    signs = draw(st.lists(st.sampled_from((1, -1)), min_size=n, max_size=n))
    return PairConfig.build([1, *rest], signs)


@st.composite
def decorated_configs(draw, min_n: int = 1, max_n: int = 7, max_extra: int = 2) -> PairConfig:
    """Random configs with random genus and puncture decorations on random faces."""
    cfg = draw(raw_configs(min_n, max_n))
    faces = len(trace(cfg).faces)
    decs = {}
    for f in draw(st.lists(st.integers(0, faces - 1), max_size=4, unique=True)):
        decs[f] = (draw(st.integers(0, max_extra)), draw(st.integers(0, max_extra)))
    return cfg.with_regions(decs)


# -- ribbon-graph isomorphism codes -------------------------------------------------
#
# Built straight from the crossing data, without the library's relabeling code:
# half-edges at each crossing in counterclockwise order, an edge pairing, and
# a colour per half-edge.  Two configurations are equivalent exactly when the
# coloured ribbon graphs are isomorphic, allowing mirror images and swapping
# the colours.

def ribbon_graph(n: int, beta: tuple[int, ...], signs: tuple[int, ...], marked=()):
    """(rotation, pairing, colour) on half-edges 4(c-1)+k; ``marked`` half-edges get colour + 2."""
    # k: 0 alpha leaving, 1 beta leaving, 2 alpha arriving, 3 beta arriving
    rot, pair, col = {}, {}, {}
    for c in range(1, n + 1):
        h = [4 * (c - 1) + k for k in range(4)]
        order = [h[0], h[1], h[2], h[3]] if signs[c - 1] > 0 else [h[0], h[3], h[2], h[1]]
        for i in range(4):
            rot[order[i]] = order[(i + 1) % 4]
        for k in range(4):
            col[h[k]] = k % 2
    for c in range(1, n + 1):
        nxt = c % n + 1
        pair[4 * (c - 1)] = 4 * (nxt - 1) + 2
        pair[4 * (nxt - 1) + 2] = 4 * (c - 1)
    for j in range(n):
        a, b = beta[j], beta[(j + 1) % n]
        pair[4 * (a - 1) + 1] = 4 * (b - 1) + 3
        pair[4 * (b - 1) + 3] = 4 * (a - 1) + 1
    for h in marked:
        col[h] += 2
    return rot, pair, col


def ribbon_code(rot, pair, col) -> tuple:
    inv_rot = {v: k for k, v in rot.items()}
    best = None
    for mirror in (False, True):
        r = inv_rot if mirror else rot
        for swap in (0, 1):
            for root in rot:
                label = {root: 0}
                order = [root]
                i = 0
                while i < len(order):
                    h = order[i]
                    for nb in (r[h], pair[h]):
                        if nb not in label:
                            label[nb] = len(order)
                            order.append(nb)
                    i += 1
                code = tuple((label[r[h]], label[pair[h]], col[h] ^ swap) for h in order)
                if best is None or code < best:
                    best = code
    return best


def face_cycles(rot, pair):
    """Faces of a ribbon graph: orbits of rotation after pairing."""
    seen, faces = set(), []
    for h in rot:
        if h in seen:
            continue
        cyc, x = [], h
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = rot[pair[x]]
        faces.append(cyc)
    return faces


def frac(s: str) -> Fraction:
    return Fraction(s)


# -- certificate mutations ----------------------------------------------------------

def mutate(rec: dict, rng) -> tuple[str, dict]:
    """Change one claim-bearing field of a certificate record.  Returns (field, new record)."""
    import copy
    m = copy.deepcopy(rec)
    choices = ["claimed_upper", "terminal", "source", "curve_sign", "curve_beta", "curve_puncture"]
    if m["steps"]:
        choices += ["i", "i_next", "chord_dart", "chord_face", "chord_drop"]
        if any(s["drawing"]["anchors"] for s in m["steps"]):
            choices.append("anchor")
    kind = rng.choice(choices)
    if kind == "claimed_upper":
        m[kind] += rng.choice((-1, 1))
    elif kind == "terminal":
        m[kind] = "disjoint"
    elif kind == "source":
        i = rng.randrange(len(m["source"]))
        m["source"] = m["source"][:i] + ("0" if m["source"][i] != "0" else "1") + m["source"][i + 1:]
    elif kind.startswith("curve"):
        c = rng.choice(m["curves"])
        if kind == "curve_sign":
            i = rng.randrange(c["n"])
            c["signs"][i] = -c["signs"][i]
        elif kind == "curve_beta" and c["n"] >= 3:
            i = rng.randrange(1, c["n"] - 1)
            b = c["beta_order"]
            b[i], b[i + 1] = b[i + 1], b[i]
        else:
            kind = "curve_puncture"
            c["decorations"] = sorted(c["decorations"] + [[2 * c["n"] + 1, 0, 1]])
    elif kind in ("i", "i_next"):
        rng.choice(m["steps"])[kind] += rng.choice((-1, 1))
    elif kind == "anchor":
        s = rng.choice([s for s in m["steps"] if s["drawing"]["anchors"]])
        a = rng.choice(s["drawing"]["anchors"])
        a[2] = "1/7" if a[2] != "1/7" else "1/5"
    else:
        s = rng.choice(m["steps"])
        chords = s["drawing"]["chords"]
        ch = rng.choice(chords)
        if kind == "chord_dart":
            ch[1 if rng.random() < 0.5 else 3] += 2
        elif kind == "chord_face":
            ch[0] += 1
        else:
            chords.remove(ch)
    return kind, m


def padded_instance(rng, n_max: int = 40) -> PairConfig:
    """A larger bigon-free pair: twist a small filling pair along one curve, then puncture a few faces."""
    from fillpair.pair import twist_pair
    while True:
        n = rng.choice([k for k in (2, 3, 4, 5, 6) if k * k <= n_max])
        m = rng.randint(1, n_max // (n * n))
        t = twist_pair(rng.choice(corpus(n))[0].undecorated(), m)
        faces = rng.sample(range(len(trace(t).faces)), rng.randint(0, min(len(trace(t).faces), 4)))
        c = t.with_regions({f: (0, 1) for f in faces}) if faces else t
        d = validate(c)
        if d.bigon_free and d.alpha_essential and d.beta_essential and nonsporadic(d):
            return c
