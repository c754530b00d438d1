from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pestego import Carrier
from pestego.pgm import decode_pgm, encode_pgm, read_pgm, read_raw, write_pgm, write_raw


@given(st.data())
def test_encode_decode_roundtrip(data):
    w = data.draw(st.integers(1, 32))
    h = data.draw(st.integers(1, 32))
    pixels = data.draw(st.binary(min_size=w * h, max_size=w * h))
    carrier = Carrier(w, h, pixels)
    assert decode_pgm(encode_pgm(carrier)) == carrier


def test_canonical_header():
    assert encode_pgm(Carrier(2, 3, bytes(6))).startswith(b"P5\n2 3\n255\n")


def test_comments_and_whitespace_accepted():
    data = b"P5 # magic\n# a comment line\n  4\n# again\n2 255\n" + bytes(8)
    carrier = decode_pgm(data)
    assert (carrier.width, carrier.height) == (4, 2)


def test_rejects_wrong_magic():
    with pytest.raises(ValueError):
        decode_pgm(b"P6\n2 2\n255\n" + bytes(12))


def test_rejects_16bit_maxval():
    with pytest.raises(ValueError):
        decode_pgm(b"P5\n2 2\n65535\n" + bytes(8))


def test_rejects_short_raster():
    with pytest.raises(ValueError):
        decode_pgm(b"P5\n4 4\n255\n" + bytes(15))


def test_rejects_trailing_bytes():
    with pytest.raises(ValueError):
        decode_pgm(b"P5\n2 2\n255\n" + bytes(5))


def test_file_roundtrip(tmp_path):
    carrier = Carrier(5, 4, bytes(range(20)))
    path = str(tmp_path / "c.pgm")
    write_pgm(path, carrier)
    assert read_pgm(path) == carrier


def test_raw_roundtrip(tmp_path):
    carrier = Carrier(6, 3, bytes(range(18)))
    path = str(tmp_path / "c.raw")
    write_raw(path, carrier)
    assert read_raw(path, 6, 3) == carrier
    with pytest.raises(ValueError):
        read_raw(path, 6, 4)
