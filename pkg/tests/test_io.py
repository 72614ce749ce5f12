import json

import pytest

from combatlas.io import (InputError, matroid_to_json, parse_bricks, parse_matroid, parse_polynomial,
                          parse_polytopes, polynomial_to_json, read_matroid)


def test_bases_expand_to_downward_closure():
    c = parse_matroid({"n": 3, "kind": "bases", "sets": [[0, 1]]})
    assert len(c.faces) == 4


def test_matroid_round_trip():
    c = parse_matroid({"n": 3, "kind": "bases", "sets": [[0, 1], [1, 2]]})
    assert parse_matroid(matroid_to_json(c)) == c


def test_independent_must_be_hereditary():
    with pytest.raises(InputError, match="downward closed"):
        parse_matroid({"n": 3, "kind": "independent", "sets": [[], [0, 1]]})


def test_unknown_kind():
    with pytest.raises(InputError, match="kind"):
        parse_matroid({"n": 2, "kind": "circuits", "sets": []})


def test_syntax_error_has_position(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"n": 2,\n "kind": }')
    with pytest.raises(InputError, match=r"m\.json:2:10"):
        read_matroid(p)


def test_rational_coefficients_normalize():
    f = parse_polynomial({"n": 2, "degree": 2, "terms": [{"coeff": "2/4", "exp": [1, 1]}]})
    assert polynomial_to_json(f)["terms"][0]["coeff"] == "1/2"


def test_exponent_length_error_names_term():
    with pytest.raises(InputError, match=r"terms\[1\]\.exp"):
        parse_polynomial({"n": 2, "degree": 2, "terms": [{"coeff": 1, "exp": [1, 1]}, {"coeff": 1, "exp": [2]}]})


def test_float_coefficient_rejected():
    with pytest.raises(InputError, match="exact"):
        parse_polynomial({"n": 1, "degree": 2, "terms": [{"coeff": 0.5, "exp": [2]}]})


def test_polytope_shape_checks():
    with pytest.raises(InputError, match=r"bodies\[0\]\.offsets"):
        parse_polytopes({"dim": 2, "normals": [[1, 0], [0, 1], [-1, -1]],
                         "bodies": [{"name": "A", "offsets": [1, 1]}]})


def test_brick_order_checked():
    with pytest.raises(InputError, match="x1 < x2"):
        parse_bricks({"bricks": [[1, 0, 0, 1]]})


def test_polynomial_round_trip():
    obj = {"n": 2, "degree": 2, "terms": [{"coeff": "1/3", "exp": [0, 2]}, {"coeff": 2, "exp": [1, 1]}]}
    f = parse_polynomial(obj)
    assert parse_polynomial(json.loads(json.dumps(polynomial_to_json(f)))) == f
