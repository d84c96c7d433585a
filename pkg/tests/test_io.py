import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.corpus import case_rng, random_field
from lpkit.errors import FormatError
from lpkit.grid import GridFunction, make_grid
from lpkit.io import (coefficients_from_json, coefficients_to_json, convert, detect_format, read_coefficients,
                      read_grid_csv, read_lpgf1, write_coefficients, write_grid_csv, write_lpgf1)


def _grid(seed, n=1, L=5, complex_=False):
    spec = make_grid(n, L, 2.0)
    r = np.random.default_rng(seed)
    v = r.standard_normal(spec.shape)
    if complex_:
        v = v + 1j * r.standard_normal(spec.shape)
    return GridFunction(spec, v)


@pytest.mark.parametrize("n, complex_", [(1, False), (1, True), (2, False), (2, True)])
def test_lpgf1_round_trip_bit_exact(tmp_path, n, complex_):
    f = _grid(0, n, 4, complex_)
    write_lpgf1(tmp_path / "f.lpgf", f)
    g = read_lpgf1(tmp_path / "f.lpgf")
    assert g.spec == f.spec
    assert g.is_real == f.is_real
    assert g.values.tobytes() == f.values.tobytes()


@given(st.integers(0, 2 ** 31), st.booleans())
def test_csv_round_trip_exact(seed, complex_):
    import tempfile
    from pathlib import Path

    f = _grid(seed, 1, 4, complex_)
    with tempfile.TemporaryDirectory() as d:
        write_grid_csv(Path(d) / "f.csv", f)
        g = read_grid_csv(Path(d) / "f.csv")
    assert np.array_equal(g.values, f.values)


def test_convert_lpgf1_csv_lpgf1(tmp_path):
    f = _grid(1, 2, 3)
    write_lpgf1(tmp_path / "a.lpgf", f)
    assert convert(tmp_path / "a.lpgf", tmp_path / "b.csv") == "csv"
    assert convert(tmp_path / "b.csv", tmp_path / "c.lpgf") == "lpgf1"
    assert (tmp_path / "a.lpgf").read_bytes() == (tmp_path / "c.lpgf").read_bytes()


@pytest.mark.parametrize("payload", [b"LPGF2\n1 4 1.0 real\n", b"LPGF1\n1 4 1.0 imaginary\n" + bytes(128),
                                     b"LPGF1\n1 4 1.0 real\n" + bytes(100), b"LPGF1\n"])
def test_lpgf1_rejects_corrupt(tmp_path, payload):
    (tmp_path / "bad").write_bytes(payload)
    with pytest.raises(FormatError):
        read_lpgf1(tmp_path / "bad")


def test_coefficient_binary_round_trip(tmp_path):
    spec = make_grid(2, 5, 1.0)
    lam = random_field(spec, case_rng(3, 0), (1, 4), density=0.3)
    write_coefficients(tmp_path / "c.lpcf", lam)
    back = read_coefficients(tmp_path / "c.lpcf")
    assert back.window == lam.window
    assert all(np.array_equal(back[k], lam[k]) for k in lam.scales)
    write_coefficients(tmp_path / "d.lpcf", back)
    assert (tmp_path / "c.lpcf").read_bytes() == (tmp_path / "d.lpcf").read_bytes()


def test_coefficient_json_preserves_count(tmp_path):
    spec = make_grid(1, 6, 1.0)
    lam = random_field(spec, case_rng(4, 0), (2, 5), density=0.4)
    write_coefficients(tmp_path / "c.lpcf", lam)
    assert convert(tmp_path / "c.lpcf", tmp_path / "c.json") == "json"
    listing = json.loads((tmp_path / "c.json").read_text())
    assert len(listing["entries"]) == lam.count()
    back = coefficients_from_json((tmp_path / "c.json").read_text())
    assert all(np.array_equal(back[k], lam[k]) for k in lam.scales)
    assert coefficients_to_json(back) == coefficients_to_json(lam)


def test_coefficient_binary_rejects(tmp_path):
    spec = make_grid(1, 6, 1.0)
    write_coefficients(tmp_path / "c.lpcf", random_field(spec, case_rng(5, 0), (2, 5)))
    raw = (tmp_path / "c.lpcf").read_bytes()
    (tmp_path / "trunc.lpcf").write_bytes(raw[:-3])
    with pytest.raises(FormatError):
        read_coefficients(tmp_path / "trunc.lpcf")
    (tmp_path / "magic.lpcf").write_bytes(b"XXXXX\n" + raw[6:])
    with pytest.raises(FormatError):
        read_coefficients(tmp_path / "magic.lpcf")
    with pytest.raises(FormatError):
        coefficients_from_json('{"n": 1}')


def test_detect_and_cross_kind(tmp_path):
    f = _grid(2)
    write_lpgf1(tmp_path / "a.lpgf", f)
    assert detect_format(tmp_path / "a.lpgf") == "lpgf1"
    with pytest.raises(FormatError):
        convert(tmp_path / "a.lpgf", tmp_path / "a.json")
    with pytest.raises(FormatError):
        convert(tmp_path / "a.lpgf", tmp_path / "a.bin")
    (tmp_path / "junk").write_bytes(b"\x00\x01")
    with pytest.raises(FormatError):
        detect_format(tmp_path / "junk")
