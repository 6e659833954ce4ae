import numpy as np
import pytest

import catrep as cr
from catrep.errors import ConfigError, DataError


class TestLoadCsv:
    def test_watermelon_shape_and_dictionaries(self, watermelon):
        assert watermelon.n_objects == 6
        assert watermelon.n_attributes == 3
        assert watermelon.n_values == 9
        assert watermelon.value_dicts[1] == ("white", "yellow", "green", "black")
        assert watermelon.labels == ("low", "low", "low", "low", "high", "high")

    def test_single_cell_dataset(self, tmp_path):
        p = tmp_path / "one.csv"
        p.write_text("x\na\n")
        d = cr.load_csv(p)
        assert (d.n_objects, d.n_attributes, d.n_values) == (1, 1, 1)

    def test_zoo_factors(self, zoo):
        f = cr.describe(zoo)
        assert (f.n_objects, f.n_attributes, f.n_classes, f.max_values) == (101, 16, 7, 6)
        assert f.avg_values == pytest.approx(2.25)

    def test_no_header_and_index_label(self, tmp_path):
        p = tmp_path / "nh.csv"
        p.write_text("a,b,yes\nc,b,no\n")
        d = cr.load_csv(p, has_header=False, label_column=2)
        assert d.n_attributes == 2
        assert d.labels == ("yes", "no")

    def test_quoted_fields(self, tmp_path):
        p = tmp_path / "q.csv"
        p.write_text('c1,c2\n"a,b",z\nplain,"say ""hi"""\n')
        d = cr.load_csv(p)
        assert d.value_dicts[0] == ("a,b", "plain")
        assert d.value_dicts[1] == ("z", 'say "hi"')

    def test_missing_cells_become_category(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("c1,c2\na,\nb,x\n,x\n")
        d = cr.load_csv(p)
        assert cr.MISSING_VALUE in d.value_dicts[0]
        assert cr.MISSING_VALUE in d.value_dicts[1]

    def test_ragged_row_names_the_row(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("c1,c2\na,b\na,b,c\n")
        with pytest.raises(DataError, match="row 3"):
            cr.load_csv(p)

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("")
        with pytest.raises(DataError, match="empty"):
            cr.load_csv(p)

    def test_unknown_label_column_rejected(self, tmp_path):
        p = tmp_path / "u.csv"
        p.write_text("c1\nx\n")
        with pytest.raises(DataError, match="label column"):
            cr.load_csv(p, label_column="nope")

    def test_round_trip_identical(self, watermelon, tmp_path):
        out = tmp_path / "roundtrip.csv"
        cr.save_csv(watermelon, out)
        again = cr.load_csv(out, label_column="label")
        assert again.value_dicts == watermelon.value_dicts
        assert np.array_equal(again.cells, watermelon.cells)
        assert again.labels == watermelon.labels

    def test_loading_is_order_stable(self, watermelon_path):
        a = cr.load_csv(watermelon_path, label_column="Sweetness")
        b = cr.load_csv(watermelon_path, label_column="Sweetness")
        assert a.value_dicts == b.value_dicts
        assert np.array_equal(a.cells, b.cells)


class TestDescribe:
    def test_watermelon_factors(self, watermelon):
        f = cr.describe(watermelon)
        assert (f.n_objects, f.n_attributes) == (6, 3)
        assert f.avg_values == pytest.approx(3.0)
        assert f.max_values == 4

    def test_single_value_dataset(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("x\na\na\n")
        f = cr.describe(cr.load_csv(p))
        assert f.avg_values == 1.0 and f.max_values == 1

    def test_unlabeled_has_zero_classes(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("x\na\nb\n")
        assert cr.describe(cr.load_csv(p)).n_classes == 0


class TestSynthGenerate:
    def test_requested_factors_reproduced(self):
        d = cr.synth_generate(1000, 10, 3, 2, 0.8, seed=7)
        f = cr.describe(d)
        assert (f.n_objects, f.n_attributes, f.n_classes, f.max_values) == (1000, 10, 2, 3)
        assert f.avg_values == pytest.approx(3.0)

    def test_separation_one_values_determine_cluster(self):
        d = cr.synth_generate(1000, 10, 3, 2, 1.0, seed=7)
        labels = np.asarray(d.labels)
        for j in range(d.n_attributes):
            for v in range(d.value_counts[j]):
                holders = labels[d.cells[:, j] == v]
                assert len(set(holders.tolist())) == 1

    def test_separation_zero_is_label_independent(self):
        d = cr.synth_generate(1000, 10, 3, 2, 0.0, seed=7)
        labels = np.asarray(d.labels)
        # Uniform draws: per-cluster value shares should be close, far from 0/1.
        shares = []
        for v in range(d.value_counts[0]):
            holders = labels[d.cells[:, 0] == v]
            shares.append(np.mean(holders == 0))
        assert all(0.3 < s < 0.7 for s in shares)

    def test_large_sweep_endpoint(self):
        d = cr.synth_generate(100000, 10, 3, 2, 0.8, seed=7)
        assert d.n_objects == 100000
        assert cr.describe(d).max_values == 3

    def test_deterministic_per_seed(self):
        a = cr.synth_generate(300, 5, 4, 3, 0.5, seed=11)
        b = cr.synth_generate(300, 5, 4, 3, 0.5, seed=11)
        c = cr.synth_generate(300, 5, 4, 3, 0.5, seed=12)
        assert np.array_equal(a.cells, b.cells) and a.labels == b.labels
        assert not np.array_equal(a.cells, c.cells)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_objects": 0},
            {"n_clusters": 0},
            {"n_clusters": 20, "n_objects": 10},
            {"separation": 1.5},
            {"separation": -0.1},
        ],
    )
    def test_out_of_range_rejected(self, kwargs):
        base = dict(n_objects=10, n_attributes=3, max_values=2, n_clusters=2, separation=0.5, seed=0)
        base.update(kwargs)
        with pytest.raises(ConfigError):
            cr.synth_generate(**base)


class TestInvariants:
    def test_cell_indices_validated(self):
        with pytest.raises(DataError):
            cr.CategoricalDataset(("a",), (("x",),), np.array([[1]]))

    def test_duplicate_dictionary_rejected(self):
        with pytest.raises(DataError):
            cr.CategoricalDataset(("a",), (("x", "x"),), np.array([[0]]))

    def test_label_length_checked(self):
        with pytest.raises(DataError):
            cr.CategoricalDataset(("a",), (("x",),), np.array([[0], [0]]), labels=("only-one",))
