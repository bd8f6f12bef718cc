from fractions import Fraction

import pytest
from hypothesis import given, settings

from fillpair import formats
from fillpair.pair import PairConfig

from helpers import decorated_configs


def test_header_required():
    with pytest.raises(formats.FormatError):
        formats.loads('{"kind":"pair"}\n')
    with pytest.raises(formats.FormatError):
        formats.loads(formats.HEADER)
    assert formats.loads(formats.HEADER + "\n") == []


def test_bad_lines():
    with pytest.raises(formats.FormatError, match="line 2"):
        formats.loads(formats.HEADER + "\n{oops\n")
    with pytest.raises(formats.FormatError):
        formats.loads(formats.HEADER + "\n[1,2]\n")


def test_pair_record_checks():
    rec = formats.config_record(PairConfig.build([1, 2], [1, 1]))
    with pytest.raises(formats.FormatError):
        formats.config_from_record({**rec, "n": 3})
    with pytest.raises(formats.FormatError):
        formats.config_from_record({**rec, "signs": [1, True]})
    with pytest.raises(formats.FormatError):
        formats.config_from_record({**rec, "decorations": [[0, 1]]})
    with pytest.raises(formats.FormatError):
        formats.config_from_record({k: v for k, v in rec.items() if k != "beta_order"})


def test_rationals():
    assert formats.frac("3/4") == Fraction(3, 4)
    assert formats.frac(2) == 2
    for bad in ("1/0", "x", 0.5, True):
        with pytest.raises(formats.FormatError):
            formats.frac(bad)
    assert formats.frac_str(Fraction(6, 8)) == "3/4"


@settings(max_examples=200, deadline=None)
@given(decorated_configs())
def test_round_trip_is_bit_exact(cfg):
    text = formats.dumps([formats.config_record(cfg)])
    back = formats.config_from_record(formats.loads(text)[0])
    assert back == cfg
    assert formats.dumps([formats.config_record(back)]) == text


def test_file_round_trip(tmp_path):
    cfgs = [PairConfig.build([1], [1]), PairConfig.build([1, 2, 3], [1, 1, -1], {2: (0, 1)})]
    p = tmp_path / "x.fp"
    formats.write(str(p), [formats.config_record(c) for c in cfgs])
    raw = p.read_bytes()
    assert raw.startswith(b"fillpair-format 1\n")
    assert [formats.config_from_record(r) for r in formats.read(str(p))] == cfgs
    formats.write(str(p), formats.read(str(p)))
    assert p.read_bytes() == raw
