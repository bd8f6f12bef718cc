"""Interchange files: a ``fillpair-format 1`` header line, then one JSON record per line.

Records are printed with sorted keys and no optional whitespace, so printing a
parsed file reproduces it byte for byte.  Rationals travel as ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable

from .pair import PairConfig

HEADER = "fillpair-format 1"


class FormatError(ValueError):
    pass


def dump_record(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dumps(records: Iterable[dict]) -> str:
    return "".join([HEADER + "\n"] + [dump_record(r) + "\n" for r in records])


def loads(text: str) -> list[dict]:
    lines = text.split("\n")
    if not lines or lines[0] != HEADER:
        raise FormatError(f"missing header line {HEADER!r}")
    if lines[-1] != "":
        raise FormatError("file must end with a newline")
    out = []
    for no, line in enumerate(lines[1:-1], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"line {no}: {e.msg}") from None
        if not isinstance(rec, dict) or "kind" not in rec:
            raise FormatError(f"line {no}: record without a kind")
        out.append(rec)
    return out


def read(path: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return loads(fh.read())


def write(path: str, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps(records))


def frac(s) -> Fraction:
    if isinstance(s, int) and not isinstance(s, bool):
        return Fraction(s)
    if not isinstance(s, str):
        raise FormatError(f"expected a rational string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad rational {s!r}") from None


def frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _ints(v, what):
    if not isinstance(v, list) or any(not isinstance(x, int) or isinstance(x, bool) for x in v):
        raise FormatError(f"{what} must be a list of integers")
    return v


def config_record(cfg: PairConfig) -> dict:
    return {
        "kind": "pair",
        "n": cfg.n,
        "beta_order": list(cfg.beta_order),
        "signs": list(cfg.signs),
        "decorations": [list(d) for d in cfg.decorations],
        "joins": [list(j) for j in cfg.joins],
    }


def config_from_record(rec: dict) -> PairConfig:
    if rec.get("kind") != "pair":
        raise FormatError("not a pair record")
    try:
        beta = _ints(rec["beta_order"], "beta_order")
        signs = _ints(rec["signs"], "signs")
        decs = [tuple(_ints(d, "decoration")) for d in rec.get("decorations", [])]
        joins = [tuple(_ints(j, "join")) for j in rec.get("joins", [])]
    except KeyError as e:
        raise FormatError(f"pair record lacks {e.args[0]}") from None
    if any(len(d) != 3 for d in decs):
        raise FormatError("decorations are [face, genus, punctures] triples")
    if rec.get("n") != len(beta):
        raise FormatError("n does not match beta_order")
    cfg = PairConfig(len(beta), tuple(beta), tuple(signs), tuple(decs), tuple(joins))
    if config_record(cfg) != {**rec, "decorations": rec.get("decorations", []), "joins": rec.get("joins", [])}:
        raise FormatError("pair record is not in normal form")
    return cfg
