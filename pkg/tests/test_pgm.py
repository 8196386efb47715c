import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fracdenoise.pgm import PGMParseError, encode_pgm, parse_pgm, read_pgm, to_uint8, write_pgm

EXPECTED = np.array([[0.0, 64.0], [128.0, 255.0]])


def test_ascii_example():
    np.testing.assert_array_equal(parse_pgm(b"P2 2 2 255 0 64 128 255"), EXPECTED)


def test_comments_skipped():
    plain = b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255])
    commented = b"P5\n# made by hand\n2 # width\n2\n# depth follows\n255\n" + bytes([0, 64, 128, 255])
    np.testing.assert_array_equal(parse_pgm(plain), parse_pgm(commented))
    np.testing.assert_array_equal(parse_pgm(commented), EXPECTED)


def test_rectangular_shape():
    grid = parse_pgm(b"P2\n3 2\n9\n1 2 3\n4 5 6\n")
    assert grid.shape == (2, 3)
    assert grid[1, 2] == 6


def test_truncated_binary_reports_offset():
    data = b"P5\n3 2\n255\n" + bytes([1, 2, 3, 4])
    with pytest.raises(PGMParseError) as err:
        parse_pgm(data)
    assert err.value.offset == len(data)
    assert "offset" in str(err.value)


def test_truncated_ascii():
    with pytest.raises(PGMParseError):
        parse_pgm(b"P2 2 2 255 0 64 128")


@pytest.mark.parametrize(
    "data",
    [b"P6 1 1 255 \x00", b"P5 1 1 256 \x00", b"P5 1 1 0 \x00", b"P2 x 1 255 0", b"P2 1 1 10 11", b"P5 1 1"],
)
def test_malformed(data):
    with pytest.raises(PGMParseError):
        parse_pgm(data)


def test_maxval_offset():
    with pytest.raises(PGMParseError) as err:
        parse_pgm(b"P5 1 1 300 \x00")
    assert err.value.offset == 7


def test_clamp_and_round():
    np.testing.assert_array_equal(to_uint8([[255.7, -3.2, 2.5, 3.49]]), [[255, 0, 3, 3]])


def test_read_error_names_path(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P5 4 4 255\n\x00")
    with pytest.raises(PGMParseError) as err:
        read_pgm(path)
    assert err.value.path == str(path)
    assert str(path) in str(err.value)


def test_write_error_surfaces_path(tmp_path):
    with pytest.raises(OSError) as err:
        write_pgm(EXPECTED, tmp_path / "missing" / "x.pgm")
    assert "missing" in str(err.value)


@pytest.mark.parametrize("mode", ["P2", "P5"])
@pytest.mark.parametrize("comment", [None, "first line\nsecond line"])
def test_file_round_trip(tmp_path, mode, comment):
    grid = np.random.default_rng(0).integers(0, 256, size=(5, 7)).astype(float)
    path = tmp_path / f"g.{mode}.pgm"
    write_pgm(grid, path, mode, comment)
    np.testing.assert_array_equal(read_pgm(path), grid)


@settings(max_examples=40)
@given(
    grid=arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9))),
    mode=st.sampled_from(["P2", "P5"]),
)
def test_round_trip_property(grid, mode):
    assert parse_pgm(encode_pgm(grid.astype(float), mode)).tobytes() == grid.astype(float).tobytes()
