import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from chaosjpeg.netpbm import NetpbmError, decode_netpbm, encode_netpbm, read_netpbm, write_netpbm


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.booleans(), st.integers(0, 2**32 - 1))
def test_round_trip(h, w, color, seed):
    shape = (h, w, 3) if color else (h, w)
    img = np.random.default_rng(seed).integers(0, 256, shape, dtype=np.uint8)
    np.testing.assert_array_equal(decode_netpbm(encode_netpbm(img)), img)


@pytest.mark.parametrize("mode,shape", [("L", (5, 7)), ("RGB", (5, 7, 3))])
def test_matches_pillow(mode, shape):
    img = np.random.default_rng(1).integers(0, 256, shape, dtype=np.uint8)
    buf = io.BytesIO()
    Image.fromarray(img, mode).save(buf, "PPM")
    np.testing.assert_array_equal(decode_netpbm(buf.getvalue()), img)
    with Image.open(io.BytesIO(encode_netpbm(img))) as im:
        np.testing.assert_array_equal(np.asarray(im), img)


def test_header_comments_and_whitespace():
    data = b"P5 # a comment\n# another\n 2\t1\r\n255\n\x07\x08"
    assert decode_netpbm(data).tolist() == [[7, 8]]


@pytest.mark.parametrize(
    "data,match",
    [
        (b"P3\n1 1\n255\n0 0 0", "magic"),
        (b"P5\n1 1\n65535\n\x00\x00", "maxval"),
        (b"P5\n2 2\n255\n\x00", "truncated"),
        (b"P5\n0 2\n255\n", "positive"),
        (b"P5\nx 2\n255\n\x00", "non-numeric"),
        (b"P5\n1 1", "header"),
        (b"", "header"),
    ],
)
def test_malformed(data, match):
    with pytest.raises(NetpbmError, match=match):
        decode_netpbm(data)


def test_encode_rejects_bad_arrays():
    with pytest.raises(NetpbmError):
        encode_netpbm(np.zeros((2, 2), np.float64))
    with pytest.raises(NetpbmError):
        encode_netpbm(np.zeros((2, 2, 4), np.uint8))


def test_file_helpers(tmp_path):
    img = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
    write_netpbm(tmp_path / "a.ppm", img)
    np.testing.assert_array_equal(read_netpbm(tmp_path / "a.ppm"), img)
