"""Delimited-output and manifest tests."""

import hashlib

import numpy as np
import pytest

from ep3ion.reports import RunManifest, file_sha256, format_value, write_csv


def test_format_value_types():
    assert format_value(True) == "1"
    assert format_value(np.bool_(False)) == "0"
    assert format_value(7) == "7"
    assert format_value(np.int64(-3)) == "-3"
    assert format_value("theta") == "theta"
    assert format_value(0.1) == f"{0.1:.17g}"
    assert format_value(np.float64(1.0) / 3.0) == f"{1.0 / 3.0:.17g}"
    with pytest.raises(TypeError):
        format_value(1.0 + 2.0j)


def test_format_value_roundtrips_doubles():
    rng = np.random.default_rng(0)
    for v in rng.normal(scale=1e3, size=50):
        assert float(format_value(float(v))) == v


def test_write_csv_layout_and_digest(tmp_path):
    path = tmp_path / "out.csv"
    digest = write_csv(str(path), ["a", "b"], [[1, 2.5], [True, "x"]])
    blob = path.read_bytes()
    assert blob == b"a,b\n1,2.5\n1,x\n"
    assert b"\r" not in blob
    assert digest == hashlib.sha256(blob).hexdigest()
    assert file_sha256(str(path)) == digest


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError, match="row width"):
        write_csv(str(tmp_path / "bad.csv"), ["a", "b"], [[1, 2], [3]])


def test_write_csv_byte_identical_reruns(tmp_path):
    rows = [[k, np.sin(k) * 1e-3] for k in range(20)]
    d1 = write_csv(str(tmp_path / "r1.csv"), ["k", "v"], rows)
    d2 = write_csv(str(tmp_path / "r2.csv"), ["k", "v"], rows)
    assert d1 == d2
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()


def test_manifest_text_and_write(tmp_path):
    out = tmp_path / "data.csv"
    digest = write_csv(str(out), ["x"], [[1]])
    m = RunManifest(command="ep3ion winding --seed 1", config_sha256="c" * 64,
                    seed=1, version="0.1.0")
    m.add(str(out), digest)
    m.add(str(out))  # digest computed from the file when omitted
    text = m.text()
    assert text.splitlines()[0] == "command = ep3ion winding --seed 1"
    assert "seed = 1" in text
    assert text.count(f"output = data.csv sha256 {digest}") == 2
    mpath = tmp_path / "run.manifest"
    m.write(str(mpath))
    assert mpath.read_bytes() == text.encode()


def test_manifest_without_seed():
    m = RunManifest(command="ep3ion spectrum", config_sha256="0" * 64,
                    seed=None, version="0.1.0")
    assert "seed = none" in m.text()
