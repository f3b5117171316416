import struct

import numpy as np
import pytest

from rhtp import ArgumentError
from rhtp.matio import MAGIC, load, read_matrix, read_vector, write_csv, write_matrix


def test_binary_round_trip(tmp_path):
    a = np.random.default_rng(0).standard_normal((3, 5))
    path = tmp_path / "a.mat"
    write_matrix(path, a)
    assert np.array_equal(read_matrix(path), a)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC
    assert struct.unpack("<QQ", raw[8:24]) == (3, 5)
    # column-major payload
    assert struct.unpack("<d", raw[24:32])[0] == a[0, 0]
    assert struct.unpack("<d", raw[32:40])[0] == a[1, 0]


def test_vector_round_trip(tmp_path):
    v = np.arange(4.0)
    write_matrix(tmp_path / "v.mat", v)
    assert np.array_equal(read_vector(tmp_path / "v.mat"), v)


def test_csv_round_trip(tmp_path):
    a = np.random.default_rng(1).standard_normal((4, 2))
    write_csv(tmp_path / "a.csv", a)
    assert np.array_equal(load(tmp_path / "a.csv"), a)


def test_bad_files(tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_bytes(b"NOTAMAT!" + bytes(16))
    with pytest.raises(ArgumentError):
        load(bad)
    with pytest.raises(ArgumentError):
        read_matrix(bad)
    short = tmp_path / "short.mat"
    short.write_bytes(MAGIC + struct.pack("<QQ", 2, 2) + bytes(8))
    with pytest.raises(ArgumentError):
        read_matrix(short)
    (tmp_path / "tiny.mat").write_bytes(b"abc")
    with pytest.raises(ArgumentError):
        read_matrix(tmp_path / "tiny.mat")
