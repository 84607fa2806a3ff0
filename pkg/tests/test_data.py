import numpy as np
import pytest

from src.data import (
    Dataset,
    KOREAN_FEATURES,
    impute_apply,
    impute_fit,
    load_korean,
    load_polish,
    read_arff,
    scale_apply,
    scale_fit,
    smote,
    stratified_split,
    stratified_split_indices,
    stratified_subsample,
)
from src.errors import FitError, ParameterError, ParseError, ShapeError, SplitError
from src.numerics import RngStream
from src.utils.serialization import document, read_document


def _dataset(x, y, names=None):
    x = np.asarray(x, dtype=float)
    return Dataset(x, np.asarray(y), tuple(names or (f"f{i}" for i in range(x.shape[1]))))


# --- Dataset ---

def test_dataset_invariants():
    with pytest.raises(ShapeError):
        _dataset([[1.0], [2.0]], [0, 2])
    with pytest.raises(ShapeError):
        _dataset([[1.0], [2.0]], [0])
    with pytest.raises(ShapeError):
        Dataset(np.ones((2, 2)), np.array([0, 1]), ("only-one",))
    with pytest.raises(ShapeError):
        _dataset([[np.inf], [1.0]], [0, 1])
    ds = _dataset([[np.nan, 1.0], [2.0, 3.0]], [0, 1])
    assert ds.n_missing == 1 and ds.class_counts() == {0: 1, 1: 1}


# --- Korean loader ---

def test_load_korean_maps_symbols(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text("P,A,N,P,P,A,NB\nN,N,N,A,N,N,B\n")
    ds = load_korean(str(path))
    assert ds.feature_names == KOREAN_FEATURES
    np.testing.assert_array_equal(ds.features[0], [1, 0, -1, 1, 1, 0])
    np.testing.assert_array_equal(ds.labels, [0, 1])


def test_load_korean_fixture(korean_csv):
    ds = load_korean(korean_csv)
    assert ds.n_samples == 120 and ds.n_features == 6 and ds.n_positive == 50


def test_load_korean_unknown_symbol_reports_position(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text("P,A,N,P,P,A,NB\nP,A,X,P,P,A,B\n")
    with pytest.raises(ParseError) as exc:
        load_korean(str(path))
    assert exc.value.line == 2 and exc.value.column == 3
    assert "line 2, column 3" in str(exc.value)


def test_load_korean_wrong_column_count(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text("P,A,N,P,P,NB\n")
    with pytest.raises(ParseError):
        load_korean(str(path))


def test_load_korean_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_korean(str(tmp_path / "nope.txt"))


def test_load_korean_reports_file_lines_across_blank_lines(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text("P,A,N,P,P,A,NB\n\nN,N,N,A,N,N,B\nP,A,P,Q,P,A,NB\n")
    with pytest.raises(ParseError) as exc:
        load_korean(str(path))
    assert exc.value.line == 4 and exc.value.column == 4


# --- ARFF / Polish loader ---

def test_load_polish_fixture(polish_arff):
    ds = load_polish(polish_arff)
    assert ds.n_samples == 150 and ds.n_features == 5
    assert ds.n_positive == 25
    assert ds.n_missing == 12
    assert ds.feature_names == ("Attr1", "Attr2", "Attr3", "Attr4", "Attr5")


def test_read_arff_rejects_bad_row_arity(tmp_path):
    path = tmp_path / "bad.arff"
    path.write_text("@relation r\n@attribute a numeric\n@attribute class {0,1}\n@data\n1.0,0\n2.0\n")
    with pytest.raises(ParseError) as exc:
        read_arff(str(path))
    assert exc.value.line == 6


def test_load_polish_non_numeric_cell(tmp_path):
    path = tmp_path / "bad.arff"
    path.write_text("@relation r\n@attribute a numeric\n@attribute b numeric\n@attribute class {0,1}\n"
                    "@data\n1.0,2.0,0\n1.0,abc,1\n")
    with pytest.raises(ParseError) as exc:
        load_polish(str(path))
    assert exc.value.line == 7 and exc.value.column == 2


def test_read_arff_without_data_section(tmp_path):
    path = tmp_path / "bad.arff"
    path.write_text("@relation r\n@attribute a numeric\n")
    with pytest.raises(ParseError):
        read_arff(str(path))


def test_read_arff_decodes_nominal_and_keeps_missing_as_nan(tmp_path):
    path = tmp_path / "r.arff"
    path.write_text("% header comment\n@relation 'firms'\n@attribute a numeric\n@attribute b real\n"
                    "@attribute class {0,1}\n\n@data\n1.5,?,1\n?,2.0,0\n")
    table = read_arff(str(path))
    assert table.relation == "firms"
    assert [a.name for a in table.attributes] == ["a", "b", "class"]
    assert table.attributes[2].nominal_values == ("0", "1") and table.attributes[2].line == 5
    assert list(table.frame["class"]) == ["1", "0"]
    assert np.isnan(table.frame["b"].iloc[0]) and np.isnan(table.frame["a"].iloc[1])
    assert table.row_lines == [8, 9]


def test_load_polish_positive_class_is_one_and_missing_stays_nan(tmp_path):
    path = tmp_path / "p.arff"
    path.write_text("@relation r\n@attribute Attr1 numeric\n@attribute Attr2 numeric\n"
                    "@attribute class {1,0}\n@data\n0.5,?,1\n-0.5,2.0,0\n")
    ds = load_polish(str(path))
    np.testing.assert_array_equal(ds.labels, [1, 0])
    assert ds.n_missing == 1 and np.isnan(ds.features[0, 1])
    assert ds.features[1, 1] == 2.0


def test_load_polish_undeclared_class_value_reports_position(tmp_path):
    path = tmp_path / "p.arff"
    path.write_text("@relation r\n@attribute a numeric\n@attribute class {0,1}\n@data\n"
                    "1.0,0\n\n2.0,?\n")
    with pytest.raises(ParseError) as exc:
        load_polish(str(path))
    assert exc.value.line == 7 and exc.value.column == 2


def test_load_polish_undeclared_nominal_value_is_located(tmp_path):
    path = tmp_path / "p.arff"
    path.write_text("@relation r\n@attribute a numeric\n@attribute class {0,1}\n@data\n1.0,0\n2.0,7\n")
    with pytest.raises(ParseError) as exc:
        load_polish(str(path))
    assert exc.value.line == 6 and exc.value.column == 2


def test_read_arff_unsupported_attribute_type_reports_declaration(tmp_path):
    path = tmp_path / "p.arff"
    path.write_text("@relation r\n@attribute a numeric\n@attribute when date 'yyyy-MM-dd'\n"
                    "@attribute class {0,1}\n@data\n1.0,'2020-01-01',0\n")
    with pytest.raises(ParseError) as exc:
        read_arff(str(path))
    assert exc.value.line == 3


# --- Imputation and scaling ---

def test_impute_uses_training_medians():
    train = _dataset([[1.0, np.nan], [3.0, 4.0], [np.nan, 8.0], [5.0, 6.0]], [0, 1, 0, 1])
    params = impute_fit(train)
    np.testing.assert_allclose(params.medians, [3.0, 6.0])
    test = _dataset([[np.nan, np.nan]], [0])
    np.testing.assert_allclose(impute_apply(params, test).features, [[3.0, 6.0]])


def test_impute_feature_without_observations():
    train = _dataset([[1.0, np.nan], [2.0, np.nan]], [0, 1], names=("a", "b"))
    with pytest.raises(FitError) as exc:
        impute_fit(train)
    assert exc.value.feature == "b"


def test_minmax_maps_training_range():
    train = _dataset([[0.0, 5.0], [10.0, 5.0], [5.0, 5.0]], [0, 1, 0])
    params = scale_fit(train, "minmax", (-1.0, 1.0))
    out = scale_apply(params, train).features
    np.testing.assert_allclose(out[:, 0], [-1.0, 1.0, 0.0], atol=1e-12)
    # constant feature lands on the midpoint
    np.testing.assert_allclose(out[:, 1], 0.0)
    # values outside the training range are not clipped
    assert params.transform(np.array([[20.0, 5.0]]))[0, 0] == pytest.approx(3.0)


def test_standardize_population_std():
    train = _dataset([[1.0], [3.0]], [0, 1])
    out = scale_apply(scale_fit(train, "standardize"), train).features
    np.testing.assert_allclose(out.ravel(), [-1.0, 1.0])


def test_scaler_parameter_errors():
    train = _dataset([[1.0], [3.0]], [0, 1])
    with pytest.raises(ParameterError):
        scale_fit(train, "robust")
    with pytest.raises(ParameterError):
        scale_fit(train, "minmax", (1.0, 1.0))
    with pytest.raises(ShapeError):
        scale_fit(_dataset([[np.nan], [3.0]], [0, 1]))


def test_fitted_scaler_serializes():
    train = _dataset([[0.0, 1.0], [2.0, 3.0]], [0, 1])
    params = scale_fit(train)
    restored = read_document(document("scaler", params))
    np.testing.assert_allclose(restored.transform(train.features), params.transform(train.features))


# --- Splitting ---

def test_stratified_split_counts_and_disjointness(rng):
    labels = np.array([0] * 143 + [1] * 107)
    train, test = stratified_split_indices(labels, 0.2, rng)
    assert np.intersect1d(train, test).size == 0
    assert train.size + test.size == 250
    assert np.sum(labels[test] == 0) == 29 and np.sum(labels[test] == 1) == 21
    assert np.all(np.diff(train) > 0) and np.all(np.diff(test) > 0)


def test_stratified_split_is_deterministic():
    labels = np.array([0, 1] * 20)
    a = stratified_split_indices(labels, 0.25, RngStream(9, "split"))
    b = stratified_split_indices(labels, 0.25, RngStream(9, "split"))
    np.testing.assert_array_equal(a[1], b[1])


def test_stratified_split_errors(rng):
    with pytest.raises(SplitError):
        stratified_split_indices(np.array([0, 0, 0, 1]), 0.5, rng)
    with pytest.raises(SplitError):
        stratified_split_indices(np.array([0, 0, 1, 1]), 1.0, rng)


def test_stratified_split_dataset(korean_csv, rng):
    train, test = stratified_split(load_korean(korean_csv), 0.2, rng)
    assert train.n_samples == 96 and test.n_samples == 24
    assert test.n_positive == 10


def test_stratified_subsample(korean_csv, rng):
    ds = load_korean(korean_csv)
    small = stratified_subsample(ds, 60, rng)
    assert small.n_samples == 60 and small.n_positive == 25
    assert stratified_subsample(ds, 500, rng) is ds


# --- SMOTE ---

def _imbalanced(seed=0):
    gen = np.random.default_rng(seed)
    x = np.vstack([gen.normal(size=(40, 3)), gen.normal(loc=3.0, size=(10, 3))])
    return _dataset(x, [0] * 40 + [1] * 10)


def test_smote_balances_and_keeps_originals(rng):
    train = _imbalanced()
    out = smote(train, k_neighbors=5, target_ratio=1.0, rng=rng)
    assert out.class_counts() == {0: 40, 1: 40}
    np.testing.assert_array_equal(out.features[:50], train.features)


def test_smote_points_lie_in_minority_hull(rng):
    train = _imbalanced()
    out = smote(train, 5, 1.0, rng)
    minority = train.features[train.labels == 1]
    synthetic = out.features[50:]
    assert np.all(synthetic >= minority.min(axis=0) - 1e-12)
    assert np.all(synthetic <= minority.max(axis=0) + 1e-12)


def test_smote_partial_ratio_and_determinism():
    train = _imbalanced()
    a = smote(train, 3, 0.5, RngStream(1, "smote"))
    b = smote(train, 3, 0.5, RngStream(1, "smote"))
    assert a.class_counts()[1] == 20
    np.testing.assert_array_equal(a.features, b.features)


def test_smote_errors(rng):
    train = _imbalanced()
    with pytest.raises(ParameterError):
        smote(train, k_neighbors=10, rng=rng)
    with pytest.raises(ParameterError):
        smote(train, target_ratio=0.1, rng=rng)


def test_smote_synthetics_lie_on_minority_segment(rng):
    train = _dataset([[0.0, 0.0], [2.0, 2.0], [5.0, 0.0], [6.0, 0.0], [5.0, 1.0], [6.0, 1.0]],
                     [1, 1, 0, 0, 0, 0])
    out = smote(train, k_neighbors=1, target_ratio=1.0, rng=rng)
    synthetic = out.features[6:]
    assert synthetic.shape == (2, 2)
    np.testing.assert_allclose(synthetic[:, 0], synthetic[:, 1])
    assert np.all((synthetic >= 0.0) & (synthetic <= 2.0))


def test_scaler_examples():
    fitted = scale_fit(_dataset([[2.0], [6.0]], [0, 1]), "minmax", (-1.0, 1.0))
    assert fitted.transform(np.array([[8.0]]))[0, 0] == pytest.approx(2.0)
    train = _dataset([[1.0], [2.0], [3.0]], [0, 1, 0])
    out = scale_apply(scale_fit(train, "standardize"), train).features.ravel()
    np.testing.assert_allclose(out, [-1.2247449, 0.0, 1.2247449], atol=1e-6)


def test_impute_is_idempotent():
    train = _dataset([[1.0, np.nan], [3.0, 4.0], [np.nan, 8.0]], [0, 1, 0])
    params = impute_fit(train)
    once = impute_apply(params, train)
    np.testing.assert_array_equal(impute_apply(params, once).features, once.features)
