import json

import numpy as np
import pytest

from permcipher.calibrate import MenuSpec
from permcipher.errors import InvalidSizeError, ParseError, ValidationError
from permcipher.fileio import (
    RunConfig,
    format_number,
    key_from_matrix,
    key_to_matrix,
    linkage_report_csv,
    load_dataset,
    load_keys,
    menu_from_dict,
    menu_to_dict,
    parse_menu,
    read_curves_csv,
    save_dataset,
    save_keys,
    write_curves_csv,
)
from permcipher.metrics import info_loss_profile, risk_profile
from permcipher.perm import KeyGroup, PermutationKey, identity_group, random_key

from conftest import TOY_X

TOY_CSV = "X1,X2,X3\n" + "".join(",".join(str(int(v)) for v in row) + "\n" for row in TOY_X)


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestDataset:
    def test_toy(self, tmp_path):
        D = load_dataset(write(tmp_path, TOY_CSV))
        assert D.shape == (5, 3)
        assert D.record_ids == (1, 2, 3, 4, 5)
        assert np.array_equal(D.values, np.asarray(TOY_X, dtype=float))

    def test_id_column(self, tmp_path):
        D = load_dataset(write(tmp_path, "a,ID,b\n1,r7,2\n3,r9,4\n"))
        assert D.record_ids == ("r7", "r9") and D.column_names == ("a", "b")

    def test_no_header(self, tmp_path):
        D = load_dataset(write(tmp_path, "1,2\n3,4\n"), has_header=False)
        assert D.shape == (2, 2)

    def test_empty(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(write(tmp_path, ""))

    def test_one_record(self, tmp_path):
        with pytest.raises(InvalidSizeError):
            load_dataset(write(tmp_path, "a,b\n1,2\n"))

    def test_ragged_names_row(self, tmp_path):
        with pytest.raises(ParseError, match="row 3"):
            load_dataset(write(tmp_path, "a,b\n1,2\n3\n"))

    def test_non_numeric_names_cell(self, tmp_path):
        with pytest.raises(ParseError, match=r"row 2, column 'b'"):
            load_dataset(write(tmp_path, "a,b\n1,x\n3,4\n"))

    def test_non_finite(self, tmp_path):
        with pytest.raises(ParseError):
            load_dataset(write(tmp_path, "a\n1\nnan\n"))

    def test_round_trip(self, tmp_path):
        D = load_dataset(write(tmp_path, "id,a,b\n1,0.1,2.5\n2,1e-7,3\n"))
        save_dataset(D, tmp_path / "out.csv")
        assert load_dataset(tmp_path / "out.csv") == D


class TestKeys:
    @pytest.mark.parametrize("K", [identity_group(7, 3), KeyGroup([random_key(40, s) for s in range(4)])])
    def test_round_trip(self, tmp_path, K):
        save_keys(K, tmp_path / "k.json")
        assert load_keys(tmp_path / "k.json") == K
        save_keys(K, tmp_path / "m.json", matrix=True)
        assert load_keys(tmp_path / "m.json") == K

    def test_matrix(self):
        k = PermutationKey([5, 2, 3, 1, 4])
        D = key_to_matrix(k)
        assert D[0, 4] == 1 and D.sum() == 5
        assert key_from_matrix(D) == k

    @pytest.mark.parametrize(
        "doc",
        [
            {"n": 3, "keys": [[1, 1, 2]]},
            {"n": 3, "keys": [[1, 2]]},
            {"n": 3, "keys": [[1, 2, 4]]},
            {"n": 3, "keys": []},
            {"keys": [[1, 2, 3]]},
            {"n": 3, "keys": [[1.5, 2, 3]]},
        ],
    )
    def test_invalid(self, tmp_path, doc):
        p = write(tmp_path, json.dumps(doc), "k.json")
        with pytest.raises(ValidationError):
            load_keys(p)

    def test_malformed_json(self, tmp_path):
        with pytest.raises(ValidationError):
            load_keys(write(tmp_path, "{nope", "k.json"))


class TestMenu:
    def test_protective_and_light_menus(self, tmp_path):
        doc = {
            "n": 1080,
            "attributes": [
                {"name": "A", "floor": 1, "constraints": [{"alpha": 1, "cmp": ">=", "target": 150}]},
                {"name": "B", "constraints": [{"alpha": 1, "cmp": "<=", "target": 20}]},
            ],
            "pairs": [{"a": "A", "b": "B", "constraints": [{"alpha": 2, "cmp": "~", "target": 200, "weight": 2}]}],
        }
        m, diags = parse_menu(write(tmp_path, json.dumps(doc), "m.json"))
        assert diags == []
        assert m.attributes[0].floor == 1 and m.attributes[1].floor is None
        assert m.pairs[0].a == 0 and m.pairs[0].b == 1 and m.pairs[0].constraints[0].weight == 2
        assert m.tolerance == 0.05
        assert menu_from_dict(menu_to_dict(m)) == m

    def test_empty_constraints(self, tmp_path):
        m, diags = parse_menu(write(tmp_path, json.dumps({"n": 10, "attributes": [{"name": "A", "constraints": []}]}), "m.json"))
        assert diags == [] and m == MenuSpec(10, m.attributes)

    @pytest.mark.parametrize(
        "doc,field",
        [
            ({"n": 1}, "menu.n"),
            ({"n": 5, "attributes": [{"name": "A", "constraints": [{"alpha": 1, "cmp": "~"}]}]}, "target"),
            ({"n": 5, "attributes": [{"name": "A", "constraints": [{"alpha": 1, "cmp": "<", "target": 1}]}]}, "cmp"),
            ({"n": 5, "attributes": [{"name": "A", "floor": 1.5}]}, "floor"),
            ({"n": 5, "attributes": [], "pairs": [{"a": "Q", "b": 0}]}, "pairs"),
            ({"n": 5, "extra": 1}, "extra"),
        ],
    )
    def test_schema_errors(self, doc, field):
        with pytest.raises(ValidationError, match=field):
            menu_from_dict(doc)


def test_curves_round_trip(tmp_path):
    k1, k2 = random_key(50, 1), random_key(50, 2)
    curves = [risk_profile(k1, label="X1"), risk_profile(k2, label="X2"), info_loss_profile(k1, k2, label="X1|X2")]
    write_curves_csv(curves, tmp_path / "c.csv")
    back = read_curves_csv(tmp_path / "c.csv")
    assert back == curves
    assert all(np.array_equal(a.values, b.values) for a, b in zip(curves, back))


def test_curves_bad_header(tmp_path):
    with pytest.raises(ParseError):
        read_curves_csv(write(tmp_path, "a,b\n"))


def test_format_number():
    assert format_number(3.0) == "3" and format_number(0.1) == "0.1"


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(0, epsilon=0)
    with pytest.raises(ValueError):
        RunConfig(0, alpha_step=0)


def test_linkage_report():
    text = linkage_report_csv([{"masking": "m", "method": "rank", "strategy": "greedy", "seed": 1, "correct_rate": 0.25}])
    assert text == "masking,method,strategy,seed,correct_rate\nm,rank,greedy,1,0.25\n"
