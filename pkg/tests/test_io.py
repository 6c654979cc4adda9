import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasespace import ValidationError, io, moyal, states
from phasespace.linalg import random_density, rng_from

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_state_json_round_trip(tmp_path):
    rho = random_density(3, rng_from(1))
    path = io.save_state(tmp_path / "s.json", rho)
    assert np.array_equal(io.load_state(path), rho)


def test_builtin_state_document():
    rho = io.load_state({"kind": "ghz", "params": {"n": 2}})
    assert np.allclose(rho, states.ghz(2))
    assert np.allclose(io.load_state('{"kind": "spin_up"}'), np.diag([1.0, 0.0]))


def test_invalid_states_name_the_invariant(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"dim": 2, "matrix": [[[1, 0], [1, 0]], [[0, 0], [0, 0]]]}))
    with pytest.raises(ValidationError, match="matrix not Hermitian"):
        io.load_state(p)
    with pytest.raises(ValidationError):
        io.load_state({"dim": 3, "matrix": [[[1, 0]]]})
    with pytest.raises(ValidationError):
        io.load_state("{not json")


@settings(max_examples=30, deadline=None)
@given(st.lists(finite, min_size=1, max_size=20))
def test_csv_round_trip_is_exact(tmp_path_factory, xs):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    a = np.array(xs)
    z = a + 1j * a[::-1]
    io.write_csv(path, {"a": a, "z": z})
    back = io.read_csv(path)
    assert np.array_equal(back["a"], a)
    assert np.array_equal(back["z"], z)


def test_csv_rejects_ragged_columns(tmp_path):
    with pytest.raises(ValidationError):
        io.write_csv(tmp_path / "x.csv", {"a": [1, 2], "b": [1]})


def test_snapshot_round_trip(tmp_path):
    grid = moyal.PhaseGrid(-4.0, 4.0, -3.0, 3.0, 32, 16, 0.5)
    W = moyal.coherent_wigner(grid, 0.5, -0.5)
    path = io.save_snapshot(tmp_path / "w.bin", W)
    data = path.read_bytes()
    assert data[:8] == b"PSGRID1\0" and len(data) == 64 + 8 * 32 * 16
    back = io.load_snapshot(path)
    assert back.grid == grid
    assert np.array_equal(back.values, W.values)


def test_snapshot_rejects_foreign_files(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"x" * 100)
    with pytest.raises(ValidationError):
        io.load_snapshot(p)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    io.atomic_write(tmp_path / "a" / "b.txt", b"hello")
    assert [f.name for f in (tmp_path / "a").iterdir()] == ["b.txt"]
    assert io.sha256_file(tmp_path / "a" / "b.txt") == \
        "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
