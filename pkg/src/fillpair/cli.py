"""Command-line front end: ``fillpair <group> <action> [options]``.

Exit status: 0 ok, 1 internal invariant violation, 2 input error,
3 budget exhausted (the conditional report is printed first).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import formats
from .bounds import (BelowThreshold, BoundParams, Inconclusive, SporadicSurface, SurfaceSig,
                     bowditch_chain_report, contraction_ratio, distance_upper_log, girth_function,
                     growth_regime, teich_chain_report, thm12_bound, thm12_distance_upper)
from .cutdual import ExtractionError
from .pair import BigonReductionError, ConfigError, PairConfig, reduce_bigons, trace, validate

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(ValueError):
    pass


class InvariantViolation(AssertionError):
    def __init__(self, locator: str, msg: str):
        super().__init__(f"{locator}: {msg}")
        self.locator = locator


class BudgetExhausted(RuntimeError):
    pass


# -- output ---------------------------------------------------------------------

class Report:
    """A table of rows plus the parameters that produced it."""

    def __init__(self, title: str, params: BoundParams | None, columns: list[str]):
        self.title, self.params, self.columns = title, params, columns
        self.rows: list[list] = []
        self.extra: dict = {}

    def add(self, *row):
        self.rows.append(list(row))

    def render(self, fmt: str) -> str:
        lines = []
        if fmt == "tsv":
            lines.append(f"# {self.title}")
            if self.params is not None:
                lines.append("# params " + json.dumps(self.params.as_dict(), sort_keys=True))
            for k, v in self.extra.items():
                lines.append(f"# {k} {_cell(v)}")
            lines.append("\t".join(self.columns))
            lines += ["\t".join(_cell(c) for c in r) for r in self.rows]
        else:
            lines.append(self.title)
            if self.params is not None:
                lines.append("params: " + json.dumps(self.params.as_dict(), sort_keys=True))
            for k, v in self.extra.items():
                lines.append(f"{k}: {_cell(v)}")
            for r in self.rows:
                lines.append("  " + "  ".join(f"{c}={_cell(v)}" for c, v in zip(self.columns, r)))
        return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return formats.frac_str(v)
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 12)
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(v, separators=(",", ":"), default=str)
    return "-" if v is None else str(v)


def _emit_records(args, records: list[dict], out) -> None:
    text = formats.dumps(records)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


# -- input ------------------------------------------------------------------------

def _read_records(path: str) -> list[dict]:
    try:
        if path == "-":
            return formats.loads(sys.stdin.read())
        return formats.read(path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _read_configs(path: str) -> list[PairConfig]:
    out = []
    for i, rec in enumerate(_read_records(path)):
        try:
            out.append(formats.config_from_record(rec))
        except (formats.FormatError, ConfigError, ValueError) as e:
            raise InputError(f"record {i}: {e}") from None
    return out


def _params(args) -> BoundParams:
    try:
        base = BoundParams()
        if getattr(args, "params_json", None):
            base = BoundParams.from_dict(json.loads(args.params_json))
        kw = {}
        if getattr(args, "lam", None) is not None:
            kw["lam"] = Fraction(args.lam)
        if getattr(args, "girth_coeff", None) is not None:
            kw["girth_coeff"] = Fraction(args.girth_coeff)
        if getattr(args, "log_coeffs", None) is not None:
            a, b = args.log_coeffs.split(",")
            kw["log_dist_coeffs"] = (Fraction(a), Fraction(b))
        if getattr(args, "r_coeff", None) is not None:
            kw["r_coeff"] = Fraction(args.r_coeff)
        if getattr(args, "bers_coeff", None) is not None:
            kw["bers_coeff"] = Fraction(args.bers_coeff)
        if getattr(args, "threshold", None) is not None:
            kw["complexity_threshold"] = args.threshold
        return base.with_(**kw)
    except (ValueError, ZeroDivisionError, json.JSONDecodeError) as e:
        raise InputError(f"bad parameters: {e}") from None


# -- pair ---------------------------------------------------------------------------

def cmd_pair(args, out) -> int:
    cfgs = _read_configs(args.input)
    if args.action == "validate":
        rep = Report("pair validate", None, ["record", "n", "genus", "punctures", "connected",
                                             "bigon_free", "alpha_essential", "beta_essential", "filling"])
        for i, c in enumerate(cfgs):
            d = validate(c)
            rep.add(i, c.n, d.genus, d.punctures, d.connected, d.bigon_free,
                    d.alpha_essential, d.beta_essential, d.filling)
        out.write(rep.render(args.format))
    elif args.action == "trace":
        rep = Report("pair trace", None, ["record", "face", "length", "genus", "punctures", "word"])
        for i, c in enumerate(cfgs):
            s = trace(c)
            words = s.words(c)
            for f, ln in enumerate(s.face_lengths):
                g, p = s.regions[s.region_of_face[f]].genus, s.regions[s.region_of_face[f]].punctures
                rep.add(i, f, ln, g, p, " ".join(words[f]))
        out.write(rep.render(args.format))
    elif args.action == "cut":
        from .cutdual import cut, dual_graph, girth, parallel_classes
        rep = Report("pair cut", None, ["record", "classes", "masses", "mode", "vertices", "edges",
                                        "u1", "u2", "avg_degree", "girth"])
        for i, c in enumerate(cfgs):
            try:
                cs = cut(c)
            except ValueError as e:
                raise InputError(f"record {i}: {e}") from None
            cls = parallel_classes(cs)
            mode = "punctured" if cs.surface.puncture_count else "closed"
            g = dual_graph(cs, cls, mode)
            rep.add(i, len(cls), [k.mass for k in cls], mode, len(g.vertices), len(g.edges),
                    g.u1, g.u2, g.average_degree(), girth(g))
            if args.edges:
                out.write(g.edge_list())
        out.write(rep.render(args.format))
    elif args.action == "reduce":
        try:
            recs = [formats.config_record(reduce_bigons(c)) for c in cfgs]
        except BigonReductionError as e:
            raise InputError(str(e)) from None
        _emit_records(args, recs, out)
    return EXIT_OK


# -- path ---------------------------------------------------------------------------

def cmd_path(args, out) -> int:
    from .path import (PathInputError, PathStall, build_path, certificate_from_record,
                       certificate_record, distance_bracket, verify_certificate)
    params = _params(args)
    if args.action == "build":
        recs = []
        for i, c in enumerate(_read_configs(args.input)):
            try:
                cert = build_path(c, params, seed=args.seed)
            except (PathInputError, SporadicSurface) as e:
                raise InputError(f"record {i}: {e}") from None
            except PathStall as e:
                raise BudgetExhausted(f"record {i}: {e} {json.dumps(e.dump, default=str)}") from None
            v = verify_certificate(cert)
            if not v:
                raise InvariantViolation(f"record {i}", f"built certificate fails verification: {v.locator}")
            recs.append(certificate_record(cert))
        _emit_records(args, recs, out)
        return EXIT_OK
    if args.action == "verify":
        rep = Report("path verify", None, ["record", "ok", "claimed_upper", "length", "locator"])
        bad = False
        for i, rec in enumerate(_read_records(args.input)):
            try:
                cert = certificate_from_record(rec)
            except formats.FormatError as e:
                rep.add(i, False, None, None, str(e))
                bad = True
                continue
            v = verify_certificate(cert)
            bad |= not v.ok
            rep.add(i, v.ok, cert.claimed_upper, cert.length, v.locator)
        out.write(rep.render(args.format))
        return EXIT_INPUT if bad else EXIT_OK
    # bracket
    rep = Report("path bracket", params, ["record", "lower", "upper", "lower_via", "upper_via", "oracle"])
    exhausted = False
    for i, c in enumerate(_read_configs(args.input)):
        try:
            b = distance_bracket(c, params, oracle_radius=args.radius, seed=args.seed)
        except (PathInputError, SporadicSurface) as e:
            raise InputError(f"record {i}: {e}") from None
        if b.lower > b.upper:
            raise InvariantViolation(f"record {i}", f"bracket inverted {b.lower} > {b.upper}")
        oracle = b.oracle.label if b.oracle is not None else None
        exhausted |= bool(b.oracle is not None and b.oracle.exhausted)
        rep.add(i, b.lower, b.upper, b.lower_via, b.upper_via, oracle)
    out.write(rep.render(args.format))
    return EXIT_BUDGET if exhausted else EXIT_OK


# -- enum ---------------------------------------------------------------------------

def cmd_enum(args, out) -> int:
    from .oracle import BudgetExceeded, EnumFilter, enumerate_configs, min_filling, thm12_scan
    if not 0 <= args.shard < args.shards:
        raise InputError("--shard must lie in [0, --shards)")
    try:
        if args.action == "list":
            flt = EnumFilter(args.n, require_filling=args.filling, genus=args.genus,
                             punctures=args.punctures)
            recs = [formats.config_record(c)
                    for c in enumerate_configs(flt, args.shards, args.shard, max_n=args.max_n)]
            _emit_records(args, recs, out)
            return EXIT_OK
        if args.genus is None or args.punctures is None:
            raise InputError("--genus and --punctures are required")
        if args.action == "q3":
            r = min_filling(args.genus, args.punctures, args.nmax, max_n=args.max_n)
            rep = Report("enum q3", None, ["genus", "punctures", "n_max", "q3", "lower_bound"])
            floor = 2 * args.genus + args.punctures - 2
            rep.add(args.genus, args.punctures, args.nmax, r.q3_label, floor)
            if r.witness is not None:
                if r.witness.n < floor:
                    raise InvariantViolation("enum q3", f"witness with {r.witness.n} < {floor} crossings")
                rep.extra["witness"] = formats.config_record(r.witness)
            out.write(rep.render(args.format))
            return EXIT_OK
        params = _params(args)
        sr = thm12_scan(args.genus, args.punctures, params, args.k, args.nmax, radius=args.radius)
        rep = Report("enum scan", params, ["kind", "n", "config", "detail"])
        rep.extra.update(k=sr.k, bound=sr.bound, n_scanned=sr.n_scanned, configs=sr.configs)
        for e in sr.entries:
            rep.add(e.kind, e.config.n, formats.config_record(e.config), e.detail)
        out.write(rep.render(args.format))
        return EXIT_BUDGET if any(e.kind == "unresolved" for e in sr.entries) else EXIT_OK
    except BudgetExceeded as e:
        raise BudgetExhausted(str(e)) from None
    except SporadicSurface as e:
        raise InputError(str(e)) from None


# -- track --------------------------------------------------------------------------

def cmd_track(args, out) -> int:
    from .tracks import (TrackError, TrainTrack, load_corpus, validate_track, vertex_cycle_distance_report,
                         vertex_cycles)
    if args.corpus:
        tracks = load_corpus()
    elif args.input:
        try:
            tracks = [TrainTrack.from_record(r) for r in _read_records(args.input)]
        except (TrackError, KeyError, TypeError, ValueError) as e:
            raise InputError(f"bad track record: {e}") from None
    else:
        raise InputError("give a track file or --corpus")
    if args.action == "validate":
        rep = Report("track validate", None, ["track", "branches", "valence", "generic", "branch_bound",
                                              "complementary", "recurrent", "birecurrent_attested"])
        for t in tracks:
            d = validate_track(t)
            rep.add(t.name, t.branches, d.valence_ok, d.generic, d.branch_bound_ok,
                    d.complementary_ok, d.recurrent, t.birecurrent_attested)
        out.write(rep.render(args.format))
        return EXIT_OK
    if args.action == "cycles":
        rep = Report("track cycles", None, ["track", "index", "measure", "length"])
        for t in tracks:
            try:
                vcs = vertex_cycles(t)
            except TrackError as e:
                raise InputError(f"{t.name}: {e}") from None
            for i, v in enumerate(vcs):
                rep.add(t.name, i, list(v.measure), len(v.curve))
        out.write(rep.render(args.format))
        return EXIT_OK
    params = _params(args)
    rep = Report("track distances", params, ["track", "i", "j", "raw_crossings", "crossings",
                                             "verdict", "via", "certified"])
    flagged = 0
    for t in tracks:
        try:
            dr = vertex_cycle_distance_report(t, args.radius, params, seed=args.seed)
        except (TrackError, SporadicSurface) as e:
            raise InputError(f"{t.name}: {e}") from None
        for r in dr.rows:
            rep.add(t.name, r.i, r.j, r.raw_crossings, r.crossings, r.verdict, r.via, r.certified_le3)
        flagged += len(dr.flagged)
    rep.extra["uncertified"] = flagged
    out.write(rep.render(args.format))
    return EXIT_BUDGET if flagged else EXIT_OK


# -- bounds -------------------------------------------------------------------------

def cmd_bounds(args, out) -> int:
    params = _params(args)
    if args.action in ("eval", "thm12"):
        if args.xi is None or args.xi < 1:
            raise InputError("--xi must be a positive integer")
        if args.k < 2:
            raise InputError("--k must be at least 2")
        with mpmath.workprec(96):
            rep = Report("bounds eval", params, ["xi", "k", "thm12_bound", "girth", "ratio", "regime"])
            rep.add(args.xi, args.k, thm12_bound(args.xi, params, args.k), girth_function(args.xi, params),
                    contraction_ratio(args.xi, params), growth_regime(args.xi, params))
            if args.i is not None:
                try:
                    db = thm12_distance_upper(args.xi, params, args.i, unchecked=args.unchecked)
                    rep.extra["distance_upper"] = f"{db.value} ({db.via}, {db.label})"
                except BelowThreshold as e:
                    rep.extra["distance_upper"] = f"unavailable: {e}"
                rep.extra["distance_upper_log"] = distance_upper_log(args.i, params)
        out.write(rep.render(args.format))
        return EXIT_OK
    # chain
    if args.which == "bowditch":
        if args.xi is None or args.xi < 1:
            raise InputError("--xi must be a positive integer")
        b = bowditch_chain_report(args.xi, params)
        rep = Report("bounds chain bowditch", params, ["xi", "R", "R_sq_plus_1", "B9", "holds", "crossover"])
        rep.add(b.xi, b.R, b.R_sq_plus_1, b.B9, b.holds, b.crossover)
    else:
        if args.genus is None or args.punctures is None:
            raise InputError("--genus and --punctures are required for the teich chain")
        try:
            t = teich_chain_report(SurfaceSig(args.genus, args.punctures), params=params,
                                   scan_to=args.scan_to)
        except SporadicSurface as e:
            raise InputError(str(e)) from None
        rep = Report("bounds chain teich", params, ["genus", "punctures", "bers", "E", "i_bound",
                                                    "d_bound", "threshold", "c"])
        rep.add(args.genus, args.punctures, t.bers, t.E, t.i_bound, t.d_bound, t.threshold, t.c)
    out.write(rep.render(args.format))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, params: bool = False, out: bool = False) -> None:
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--seed", type=int, default=0)
    if out:
        p.add_argument("--out", help="write records here instead of stdout")
    if params:
        p.add_argument("--lambda", dest="lam")
        p.add_argument("--girth-coeff")
        p.add_argument("--log-coeffs", help="a,b")
        p.add_argument("--r-coeff")
        p.add_argument("--bers-coeff")
        p.add_argument("--threshold", type=int)
        p.add_argument("--params-json", help="parameters as embedded in an earlier report")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="fillpair", allow_abbrev=False)
    groups = top.add_subparsers(dest="group", required=True)

    g = groups.add_parser("pair", allow_abbrev=False).add_subparsers(dest="action", required=True)
    for a in ("validate", "trace", "cut", "reduce"):
        p = g.add_parser(a, allow_abbrev=False)
        p.add_argument("input")
        _common(p, out=a == "reduce")
        if a == "cut":
            p.add_argument("--edges", action="store_true", help="also print the dual-graph edge list")

    g = groups.add_parser("path", allow_abbrev=False).add_subparsers(dest="action", required=True)
    for a in ("build", "verify", "bracket"):
        p = g.add_parser(a, allow_abbrev=False)
        p.add_argument("input")
        _common(p, params=a != "verify", out=a == "build")
        if a == "bracket":
            p.add_argument("--radius", type=int, help="refine with the enumeration oracle up to this weight")

    g = groups.add_parser("enum", allow_abbrev=False).add_subparsers(dest="action", required=True)
    for a in ("list", "q3", "scan"):
        p = g.add_parser(a, allow_abbrev=False)
        _common(p, params=a == "scan", out=a == "list")
        p.add_argument("--shards", type=int, default=1)
        p.add_argument("--shard", type=int, default=0)
        p.add_argument("--genus", type=int)
        p.add_argument("--punctures", type=int)
        p.add_argument("--max-n", type=int, default=10, help="refuse crossing numbers above this")
        if a == "list":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--filling", action="store_true")
        else:
            p.add_argument("--nmax", type=int, required=True)
        if a == "scan":
            p.add_argument("--k", type=int, default=3)
            p.add_argument("--radius", type=int)

    g = groups.add_parser("track", allow_abbrev=False).add_subparsers(dest="action", required=True)
    for a in ("validate", "cycles", "distances"):
        p = g.add_parser(a, allow_abbrev=False)
        p.add_argument("input", nargs="?")
        p.add_argument("--corpus", action="store_true", help="use the bundled track corpus")
        _common(p, params=a == "distances")
        if a == "distances":
            p.add_argument("--radius", type=int, help="oracle radius, default 8 times the branch bound")

    g = groups.add_parser("bounds", allow_abbrev=False).add_subparsers(dest="action", required=True)
    for a in ("eval", "thm12", "chain"):
        p = g.add_parser(a, allow_abbrev=False)
        _common(p, params=True)
        p.add_argument("--xi", type=int)
        if a == "chain":
            p.add_argument("--which", choices=("bowditch", "teich"), default="bowditch")
            p.add_argument("--genus", type=int)
            p.add_argument("--punctures", type=int)
            p.add_argument("--scan-to", type=int, default=20000)
        else:
            p.add_argument("--k", type=int, default=3)
            p.add_argument("--i", type=int, help="also bound the distance for this intersection number")
            p.add_argument("--unchecked", action="store_true", help="evaluate below the complexity threshold")
    return top


COMMANDS = {"pair": cmd_pair, "path": cmd_path, "enum": cmd_enum, "track": cmd_track, "bounds": cmd_bounds}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors itself
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return COMMANDS[args.group](args, out)
    except (InputError, formats.FormatError, ConfigError) as e:
        err.write(f"input error: {e}\n")
        return EXIT_INPUT
    except BudgetExhausted as e:
        err.write(f"budget exhausted: {e}\n")
        return EXIT_BUDGET
    except Inconclusive as e:
        err.write(f"inconclusive comparison: {e}\n")
        return EXIT_BUDGET
    except (AssertionError, ExtractionError) as e:
        err.write(f"internal invariant violation: {type(e).__name__}: {e}\n")
        return EXIT_INVARIANT


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
