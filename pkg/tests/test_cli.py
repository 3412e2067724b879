import json
from fractions import Fraction

import pytest

from annuli.cli import main

F = Fraction


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return str(p)


def rank1_module_obj():
    return {
        "rank": 1,
        "p": 2,
        "u_weights": [],
        "n_geom": 1,
        "matrices": {"t1": [[{"terms": [{"c": "1", "u": [], "t": [-2]}]}]]},
    }


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_radii_csv_rank1(tmp_path, capsys):
    path = write(tmp_path, "m.json", rank1_module_obj())
    code, out, _ = run(
        capsys,
        ["radii", "--input", path, "--axis", "t1", "--geom", "t1",
         "--window", "1/2", "2", "--format", "csv"],
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "r_left,r_right,slope_1,value_1"
    assert lines[1] == "1/2,2,2,2"
    assert len(lines) == 2


def test_frobenius_push_example(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"p": 2, "entries": [["1/2", 1]]})
    code, out, _ = run(capsys, ["frobenius", "--input", path])
    assert code == 0
    assert out == '{"entries":[["1",1],["2",1]]}\n'


def test_frobenius_pull_and_laws(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"p": 2, "entries": [["3", 1]]})
    code, out, _ = run(capsys, ["frobenius", "--input", path, "--op", "pull"])
    assert code == 0 and json.loads(out)["entries"] == [["2", 1]]
    code, out, _ = run(capsys, ["frobenius", "--input", path, "--op", "laws"])
    assert code == 0 and json.loads(out)["passed"]


def test_verify_failing_profile_exits_2(tmp_path, capsys):
    profile = {
        "axis": "t1",
        "kind": "extrinsic",
        "p": 2,
        "rank": 1,
        "window": ["0", "1"],
        "axis_weight": None,
        "cells": [
            {"lo": "0", "hi": "1", "visible": [["1", "3"]], "capped": 0, "cap": ["0", "1"]}
        ],
    }
    path = write(tmp_path, "prof.json", profile)
    code, out, _ = run(capsys, ["verify", "--input", path, "--mode", "disc"])
    assert code == 2
    rep = json.loads(out)
    assert not rep["passed"]
    assert any(c["name"] == "monotonicity" and c["status"] == "fail" for c in rep["checks"])


def test_verify_module_passes(tmp_path, capsys):
    path = write(tmp_path, "m.json", rank1_module_obj())
    code, out, _ = run(
        capsys,
        ["verify", "--input", path, "--axis", "t1", "--geom", "t1",
         "--window", "1", "2", "--mode", "annulus"],
    )
    assert code == 0 and json.loads(out)["passed"]


def test_factor_twisted(tmp_path, capsys):
    poly = {
        "p": 2,
        "u_weights": [],
        "n_geom": 1,
        "derivation": "t1",
        "coeffs": [
            {"terms": [{"c": "2", "u": [], "t": [-3]}]},
            {"terms": [{"c": "-1", "u": [], "t": [-2]}]},
            {"terms": [{"c": "1", "u": [], "t": [0]}]},
        ],
    }
    path = write(tmp_path, "p.json", poly)
    code, out, _ = run(
        capsys,
        ["factor", "--input", path, "--fiber", "1", "--split", "1",
         "--precision", "10"],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["residual"] == "INF" or F(payload["residual"]) >= 10
    assert payload["polygon"]["slopes"] == [["0", 1], ["2", 1]]


def test_polyhedral_roundtrip(tmp_path, capsys):
    obj = {
        "domain": {
            "dim": 2,
            "constraints": [
                {"slope": [1, 0], "const": "1"},
                {"slope": [-1, 0], "const": "1"},
                {"slope": [0, 1], "const": "1"},
                {"slope": [0, -1], "const": "1"},
            ],
        },
        "functionals": [
            {"slope": [1, 0], "const": "0"},
            {"slope": [0, 1], "const": "0"},
            {"slope": [0, 0], "const": "0"},
        ],
    }
    path = write(tmp_path, "f.json", obj)
    code, out, _ = run(capsys, ["polyhedral", "--input", path])
    assert code == 0
    got = json.loads(out)
    assert len(got["functionals"]) == 3


def test_loci_module(tmp_path, capsys):
    obj = {
        "rank": 2,
        "p": 2,
        "u_weights": [],
        "n_geom": 1,
        "matrices": {
            "t1": [
                [{"terms": [{"c": "1", "u": [], "t": [-2]}]}, {"terms": []}],
                [{"terms": []}, {"terms": [{"c": "1", "u": [], "t": [-3]}]}],
            ]
        },
    }
    path = write(tmp_path, "m2.json", obj)
    code, out, _ = run(
        capsys,
        ["loci", "--input", path, "--axis", "t1", "--geom", "t1", "--window", "1", "2"],
    )
    assert code == 0
    assert json.loads(out)["loci"] == [{"index": 1, "interval": ["1", "2"]}]


def test_malformed_json_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"rank": 1,, }', encoding="utf-8")
    code, _, err = run(
        capsys, ["radii", "--input", str(p), "--window", "0", "1"]
    )
    assert code == 1
    assert "line 1" in err and "column" in err


def test_integrability_failure_names_pair(tmp_path, capsys):
    obj = {
        "rank": 2,
        "p": 2,
        "u_weights": ["0"],
        "n_geom": 1,
        "matrices": {
            "t1": [
                [{"terms": []}, {"terms": [{"c": "1", "u": [0], "t": [0]}]}],
                [{"terms": []}, {"terms": []}],
            ],
            "u1": [
                [{"terms": []}, {"terms": []}],
                [{"terms": [{"c": "1", "u": [0], "t": [1]}]}, {"terms": []}],
            ],
        },
    }
    path = write(tmp_path, "bad_mod.json", obj)
    code, _, err = run(capsys, ["radii", "--input", path, "--window", "0", "1"])
    assert code == 1
    assert "t1" in err and "u1" in err


def test_cli_determinism(tmp_path, capsys):
    mpath = write(tmp_path, "m.json", rank1_module_obj())
    spath = write(tmp_path, "s.json", {"p": 3, "entries": [["1/4", 2], ["5", 1]]})
    outputs = []
    for _ in range(2):
        blobs = []
        for argv in (
            ["radii", "--input", mpath, "--axis", "t1", "--geom", "t1",
             "--window", "1/2", "2", "--format", "csv"],
            ["radii", "--input", mpath, "--axis", "intrinsic", "--geom", "t1",
             "--window", "1/2", "2", "--format", "json"],
            ["radii", "--input", mpath, "--axis", "t1", "--geom", "t1",
             "--window", "1/2", "2", "--format", "svg"],
            ["frobenius", "--input", spath, "--op", "push"],
        ):
            code, out, _ = run(capsys, argv)
            assert code == 0
            blobs.append(out)
        outputs.append("\x00".join(blobs))
    assert outputs[0] == outputs[1]


def test_svg_is_float_rendered_only(tmp_path, capsys):
    mpath = write(tmp_path, "m.json", rank1_module_obj())
    code, out, _ = run(
        capsys,
        ["radii", "--input", mpath, "--axis", "t1", "--geom", "t1",
         "--window", "1/2", "2", "--format", "svg"],
    )
    assert code == 0
    assert out.startswith("<svg") or out.startswith("<?xml") or "<svg" in out
    assert "polyline" in out


def test_polyhedral_module_backed(tmp_path, capsys):
    obj = {
        "domain": {
            "dim": 2,
            "constraints": [
                {"slope": [1, 0], "const": "-1"},
                {"slope": [-1, 0], "const": "3"},
                {"slope": [0, 1], "const": "-1"},
                {"slope": [0, -1], "const": "3"},
            ],
        },
        "module": {
            "rank": 1,
            "p": 2,
            "u_weights": [],
            "n_geom": 2,
            "matrices": {
                "t1": [[{"terms": [{"c": "1/8", "u": [], "t": [-2, 0]}]}]],
                "t2": [[{"terms": []}]],
            },
        },
        "level": 1,
        "scale": 1,
    }
    path = write(tmp_path, "mb.json", obj)
    code, out, _ = run(capsys, ["polyhedral", "--input", path])
    assert code == 0
    got = json.loads(out)
    assert got["functionals"] == [{"const": "4", "slope": [1, 0]}]
