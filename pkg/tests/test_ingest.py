import json

import pytest

from supportfactor.exceptions import InvalidDistributionError, InvalidInputError
from supportfactor.ingest import read_joint_table, read_samples, write_joint_csv


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_csv_round_trip(tmp_path):
    j, notes = read_joint_table(_write(tmp_path, "t.csv", "x,y,p\n0,0,0.5\n1,1,0.5\n"))
    assert j.points == ((0.0, 0.0), (1.0, 1.0)) and notes == []
    write_joint_csv(j, tmp_path / "out.csv")
    assert read_joint_table(tmp_path / "out.csv")[0].atoms == j.atoms


def test_json_with_limit_points(tmp_path):
    doc = {"atoms": [{"x": 0, "y": 0, "p": 0.25}, [1, 1, 0.75]], "declared_limit_points": [[0.5, 0.5]]}
    j, _ = read_joint_table(_write(tmp_path, "t.json", json.dumps(doc)))
    assert j.declared_limit_points == ((0.5, 0.5),)


def test_errors_carry_location(tmp_path):
    with pytest.raises(InvalidInputError, match=r":3:2:"):
        read_joint_table(_write(tmp_path, "t.csv", "x,y,p\n0,0,0.5\n1,oops,0.5\n"))
    with pytest.raises(InvalidInputError, match="header"):
        read_joint_table(_write(tmp_path, "h.csv", "a,b,c\n0,0,1\n"))
    with pytest.raises(InvalidInputError):
        read_joint_table(_write(tmp_path, "bad.json", "{not json"))


def test_mass_checks(tmp_path):
    p = _write(tmp_path, "t.csv", "x,y,p\n0,0,0.5\n1,1,0.4\n")
    with pytest.raises(InvalidDistributionError):
        read_joint_table(p)
    j, notes = read_joint_table(p, renormalize=True)
    assert sum(pr for _, pr in j.atoms) == pytest.approx(1.0)
    assert any("renormalized" in n for n in notes)
    with pytest.raises(InvalidDistributionError):
        read_joint_table(_write(tmp_path, "n.csv", "x,y,p\n0,0,-0.5\n1,1,1.5\n"))
    with pytest.raises(InvalidInputError):
        read_joint_table(_write(tmp_path, "d.csv", "x,y,p\n0,0,0.5\n0,0,0.5\n"))


def test_samples_with_and_without_header(tmp_path):
    assert read_samples(_write(tmp_path, "a.csv", "x,y\n1,2\n3,4\n")).shape == (2, 2)
    assert read_samples(_write(tmp_path, "b.csv", "1,2\n3,4\n")).shape == (2, 2)
    with pytest.raises(InvalidInputError):
        read_samples(tmp_path / "missing.csv")
