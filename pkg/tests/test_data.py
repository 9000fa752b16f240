from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsearch.data import (
    MISSING_CATEGORY,
    Encoder,
    encode,
    evaluate_predicate,
    exclude_protected,
    load_dataset,
    make_synthetic,
    parse_predicate,
    split,
    write_dataset_csv,
)
from fairsearch.errors import LabelError, RowParseError, SchemaError

from conftest import make_schema


def test_load_assigns_groups_from_predicate(sex_schema, write_csv):
    path = write_csv(
        "d.csv",
        "sex,score,hired\nmale,1,yes\nmale,2,no\nfemale,3,yes\nfemale,4,no\n",
    )
    ds = load_dataset(path, sex_schema)
    assert ds.n == 4
    assert ds.group("sex").tolist() == [True, True, False, False]
    assert ds.labels.tolist() == [1, 0, 1, 0]
    assert ds.weights.tolist() == [1.0, 1.0, 1.0, 1.0]


def test_load_conjunction_predicate(write_csv):
    schema = make_schema(
        columns=[("age", "numeric"), ("sex", "categorical"), ("credit", "categorical")],
        label="credit",
        favorable="good",
        protected={"adult_male": "age>=25 AND sex=male"},
    )
    path = write_csv(
        "g.csv",
        "age,sex,credit\n30,male,good\n30,female,bad\n24,male,good\n25,male,bad\n",
    )
    ds = load_dataset(path, schema)
    assert ds.group("adult_male").tolist() == [True, False, False, True]


def test_load_missing_column_is_schema_error(sex_schema, write_csv):
    path = write_csv("d.csv", "sex,score\nmale,1\n")
    with pytest.raises(SchemaError, match="hired"):
        load_dataset(path, sex_schema)


def test_load_rejects_rows_with_missing_label(sex_schema, write_csv):
    path = write_csv(
        "d.csv", "sex,score,hired\nmale,1,yes\nmale,2,\nfemale,3,no\n"
    )
    ds = load_dataset(path, sex_schema)
    assert ds.n == 2


def test_load_non_binary_label_is_label_error(sex_schema, write_csv):
    path = write_csv(
        "d.csv", "sex,score,hired\nmale,1,yes\nmale,2,no\nfemale,3,maybe\n"
    )
    with pytest.raises(LabelError):
        load_dataset(path, sex_schema)


def test_load_unparseable_numeric_reports_row(sex_schema, write_csv):
    path = write_csv(
        "d.csv", "sex,score,hired\nmale,1,yes\nmale,oops,no\n"
    )
    with pytest.raises(RowParseError, match="row 1"):
        load_dataset(path, sex_schema)


def test_load_missing_cells(sex_schema, write_csv):
    path = write_csv(
        "d.csv", "sex,score,hired\n,1,yes\nmale,,no\n"
    )
    ds = load_dataset(path, sex_schema)
    assert ds.features["sex"][0] == MISSING_CATEGORY
    assert np.isnan(ds.features["score"][1])


def test_group_vectors_are_pure_function_of_rows(sex_schema, write_csv):
    path = write_csv(
        "d.csv",
        "sex,score,hired\nmale,1,yes\nfemale,2,no\nmale,3,no\nfemale,4,yes\n",
    )
    ds = load_dataset(path, sex_schema)
    for spec in ds.schema.protected:
        recomputed = evaluate_predicate(spec.predicate, ds.features, ds.schema.kinds)
        assert (recomputed == ds.groups[spec.name]).all()


def test_predicate_parse_errors():
    with pytest.raises(SchemaError):
        parse_predicate("age >= abc")
    with pytest.raises(SchemaError):
        parse_predicate("nonsense")


def test_split_sizes_and_partition():
    ds = make_synthetic(10, 0.0, seed=0)
    train, test = split(ds, 0.3, seed=7)
    assert (train.n, test.n) == (7, 3)
    merged = np.sort(np.concatenate([train.features["x1"], test.features["x1"]]))
    assert np.array_equal(merged, np.sort(ds.features["x1"]))


def test_split_deterministic():
    ds = make_synthetic(50, 0.2, seed=3)
    a_train, a_test = split(ds, 0.4, seed=9)
    b_train, b_test = split(ds, 0.4, seed=9)
    assert np.array_equal(a_train.features["x1"], b_train.features["x1"])
    assert np.array_equal(a_test.labels, b_test.labels)


def test_split_fraction_out_of_range():
    ds = make_synthetic(10, 0.0, seed=0)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            split(ds, bad, seed=0)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(10, 60), frac=st.floats(0.1, 0.9), seed=st.integers(0, 1000))
def test_split_is_partition(n, frac, seed):
    ds = make_synthetic(n, 0.0, seed=1)
    train, test = split(ds, frac, seed=seed)
    assert train.n + test.n == n
    assert test.n == int(round(frac * n))
    combined = np.concatenate([train.features["x1"], test.features["x1"]])
    assert np.array_equal(np.sort(combined), np.sort(ds.features["x1"]))


def _toy(write_csv, schema, body):
    return load_dataset(write_csv("toy.csv", body), schema)


def test_encode_one_hot(sex_schema, write_csv):
    ds = _toy(
        write_csv, sex_schema, "sex,score,hired\na,1,yes\nb,2,no\na,3,yes\n"
    )
    mat = encode(ds)[0]
    names = [c.name for c in mat.columns]
    assert names == ["sex=a", "sex=b", "score"]
    assert mat.values[0, :2].tolist() == [1.0, 0.0]
    assert mat.values[1, :2].tolist() == [0.0, 1.0]


def test_encode_standardizes_with_population_std(sex_schema, write_csv):
    ds = _toy(
        write_csv, sex_schema, "sex,score,hired\nm,1,yes\nm,2,no\nm,3,yes\n"
    )
    mat = encode(ds)[0]
    got = mat.values[:, 1]
    assert got == pytest.approx([-1.224744871391589, 0.0, 1.224744871391589], abs=1e-9)


def test_encode_unseen_category_all_zeros(sex_schema, write_csv):
    train = _toy(write_csv, sex_schema, "sex,score,hired\na,1,yes\nb,2,no\n")
    test = _toy(write_csv, sex_schema, "sex,score,hired\nc,3,yes\na,1,no\n")
    mats = encode(train, [test])
    assert mats[1].values[0, :2].tolist() == [0.0, 0.0]
    assert mats[1].values[1, :2].tolist() == [1.0, 0.0]


def test_encode_fit_apply_idempotent(rng):
    ds = make_synthetic(40, 0.3, seed=5)
    enc = Encoder().fit(ds)
    first = enc.transform(ds).values
    second = enc.transform(ds).values
    assert np.array_equal(first, second)
    assert np.array_equal(first, encode(ds)[0].values)


def test_encode_zero_variance_column_is_zero(sex_schema, write_csv):
    ds = _toy(write_csv, sex_schema, "sex,score,hired\nm,2,yes\nf,2,no\n")
    mat = encode(ds)[0]
    assert mat.values[:, -1].tolist() == [0.0, 0.0]


def test_encode_imputes_numeric_missing_with_train_mean(sex_schema, write_csv):
    ds = _toy(write_csv, sex_schema, "sex,score,hired\nm,1,yes\nm,,no\nm,3,yes\n")
    mat = encode(ds)[0]
    # imputed cell equals the observed mean -> standardizes to exactly 0
    assert mat.values[1, -1] == 0.0
    assert np.isfinite(mat.values).all()


def test_encode_provenance_total(sex_schema, write_csv):
    ds = _toy(write_csv, sex_schema, "sex,score,hired\na,1,yes\nb,2,no\n")
    mat = encode(ds)[0]
    assert mat.values.shape[1] == len(mat.columns)
    for col in mat.columns:
        assert col.source in ds.feature_names


def test_exclude_protected_drops_predicate_columns(sex_schema, write_csv):
    ds = _toy(write_csv, sex_schema, "sex,score,hired\nm,1,yes\nf,2,no\n")
    out = exclude_protected(ds)
    assert out.feature_names == ("score",)
    assert "sex" not in out.features
    assert np.array_equal(out.group("sex"), ds.group("sex"))
    assert np.array_equal(out.labels, ds.labels)


def test_exclude_protected_conjunction_drops_all_columns(write_csv):
    schema = make_schema(
        columns=[("age", "numeric"), ("sex", "categorical"), ("z", "numeric"), ("y", "categorical")],
        label="y",
        favorable="1",
        protected={"both": "age>=25 AND sex=male"},
    )
    ds = load_dataset(
        write_csv("c.csv", "age,sex,z,y\n30,male,1,1\n20,female,2,0\n"), schema
    )
    out = exclude_protected(ds)
    assert out.feature_names == ("z",)


def test_exclude_protected_idempotent():
    ds = make_synthetic(20, 0.1, seed=2)
    once = exclude_protected(ds)
    twice = exclude_protected(once)
    assert once.feature_names == twice.feature_names
    assert set(once.features) == set(twice.features)


def test_synthetic_unbiased_has_near_zero_parity():
    # Monte-Carlo oracle: with bias=0 the generator treats groups identically
    gaps = []
    for seed in range(5):
        ds = make_synthetic(10_000, 0.0, seed=seed)
        g = ds.group("grp")
        gaps.append(ds.labels[~g].mean() - ds.labels[g].mean())
    assert abs(np.mean(gaps)) < 0.05
    assert max(abs(g) for g in gaps) < 0.05


def test_synthetic_bias_halves_unprivileged_favorable_rate():
    ds = make_synthetic(10_000, 0.5, seed=4)
    g = ds.group("grp")
    ratio = ds.labels[~g].mean() / ds.labels[g].mean()
    assert ratio == pytest.approx(0.5, abs=0.05)


def test_synthetic_deterministic(tmp_path):
    a = make_synthetic(100, 0.3, seed=11)
    b = make_synthetic(100, 0.3, seed=11)
    assert np.array_equal(a.features["x1"], b.features["x1"])
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.group("grp"), b.group("grp"))
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    write_dataset_csv(a, pa, unfavorable="no")
    write_dataset_csv(b, pb, unfavorable="no")
    assert pa.read_bytes() == pb.read_bytes()


def test_synthetic_roundtrips_through_csv(tmp_path):
    ds = make_synthetic(60, 0.4, seed=8)
    path = tmp_path / "synth.csv"
    write_dataset_csv(ds, path, unfavorable="no")
    loaded = load_dataset(path, ds.schema)
    assert np.array_equal(loaded.labels, ds.labels)
    assert np.array_equal(loaded.features["x1"], ds.features["x1"])
    assert np.array_equal(loaded.group("grp"), ds.group("grp"))


def test_synthetic_validates_arguments():
    with pytest.raises(ValueError):
        make_synthetic(5, 0.0, seed=0)
    with pytest.raises(ValueError):
        make_synthetic(100, 1.5, seed=0)
