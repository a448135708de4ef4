"""Dataset validation, subsets, and CSV ingestion."""
import io

import numpy as np
import pytest

from projpost.data import (
    ControlSubset,
    Dataset,
    GaussianPosterior,
    PosteriorDraws,
    center_dataset,
    dataset_to_frame,
    load_dataset,
    subset_design,
)
from projpost.errors import NumericalError, ParseError, RankError, SchemaError
from conftest import random_dataset


def test_dataset_basic_properties(make_ds):
    ds = make_ds(0, n=40, p=3)
    assert ds.n == 40 and ds.p == 3
    assert ds.design_names() == ("z", "X1", "X2", "X3")
    w = ds.design()
    assert w.shape == (40, 4)
    np.testing.assert_array_equal(w[:, 0], ds.z)
    np.testing.assert_array_equal(w[:, 1:], ds.x)


def test_dataset_arrays_are_frozen(make_ds):
    ds = make_ds(1)
    with pytest.raises(ValueError):
        ds.y[0] = 99.0


def test_dataset_rejects_nonfinite():
    y = np.ones(10)
    z = np.ones(10)
    x = np.ones((10, 1))
    y2 = y.copy()
    y2[3] = np.nan
    with pytest.raises(ParseError):
        Dataset(y=y2, z=z, x=x, control_names=("a",))


def test_dataset_rejects_too_few_rows():
    rng = np.random.default_rng(0)
    with pytest.raises(RankError):
        Dataset(
            y=rng.standard_normal(4),
            z=rng.standard_normal(4),
            x=rng.standard_normal((4, 3)),
            control_names=("a", "b", "c"),
        )


def test_dataset_rejects_name_mismatch_and_duplicates():
    rng = np.random.default_rng(0)
    y, z, x = rng.standard_normal(10), rng.standard_normal(10), rng.standard_normal((10, 2))
    with pytest.raises(SchemaError):
        Dataset(y=y, z=z, x=x, control_names=("a",))
    with pytest.raises(SchemaError):
        Dataset(y=y, z=z, x=x, control_names=("a", "a"))


def test_centered_claim_is_checked(make_ds):
    ds = make_ds(2)
    with pytest.raises(SchemaError):
        Dataset(y=ds.y + 5.0, z=ds.z, x=ds.x, control_names=ds.control_names, centered=True)
    centered = center_dataset(ds)
    assert centered.centered
    assert abs(centered.y.mean()) < 1e-12
    assert abs(centered.z.mean()) < 1e-12
    assert np.all(np.abs(centered.x.mean(axis=0)) < 1e-12)
    # centering is a shift, not a rescale
    np.testing.assert_allclose(centered.y, ds.y - ds.y.mean(), rtol=0, atol=1e-12)


def test_control_subset_constructors():
    full = ControlSubset.full(4)
    none = ControlSubset.none(4)
    drop = ControlSubset.drop_one(4, 2)
    assert full.q == 4 and none.q == 0 and drop.q == 3
    np.testing.assert_array_equal(drop.indices, [0, 1, 3])
    np.testing.assert_array_equal(drop.excluded, [2])
    names = ("a", "b", "c", "d")
    assert drop.names(names) == ("a", "b", "d")
    sub = ControlSubset.from_names(["d", "b"], names)
    np.testing.assert_array_equal(sub.indices, [1, 3])


def test_control_subset_unknown_name():
    with pytest.raises(SchemaError) as err:
        ControlSubset.from_names(["nope"], ("a", "b"))
    assert "nope" in str(err.value)


def test_control_subset_bitmask_distinguishes_masks():
    seen = set()
    for bits in range(16):
        mask = np.array([(bits >> k) & 1 == 1 for k in range(4)])
        seen.add(ControlSubset(mask).bitmask)
    assert len(seen) == 16


def test_subset_design_splits_columns(make_ds):
    ds = make_ds(3, p=4)
    phi = ControlSubset.from_names(["X1", "X4"], ds.control_names)
    kept, dropped = subset_design(ds, phi)
    assert kept.shape == (ds.n, 3)
    np.testing.assert_array_equal(kept[:, 0], ds.z)
    np.testing.assert_array_equal(kept[:, 1], ds.x[:, 0])
    np.testing.assert_array_equal(kept[:, 2], ds.x[:, 3])
    np.testing.assert_array_equal(dropped, ds.x[:, [1, 2]])


def test_posterior_draws_validation():
    psi = np.random.default_rng(0).standard_normal((20, 3))
    sig = np.ones(20)
    draws = PosteriorDraws(psi=psi, sigma_eps=sig, provenance="flat_analytic_sampled")
    assert draws.s == 20 and draws.dim == 3
    np.testing.assert_array_equal(draws.tau, psi[:, 0])
    with pytest.raises(SchemaError):
        PosteriorDraws(psi=psi, sigma_eps=sig, provenance="mystery")
    with pytest.raises(SchemaError):
        PosteriorDraws(psi=psi, sigma_eps=-sig, provenance="flat_analytic_sampled")
    with pytest.raises(SchemaError):
        PosteriorDraws(psi=psi, sigma_eps=sig, provenance="flat_analytic_sampled", n_chains=3)


def test_gaussian_posterior_validation():
    mean = np.zeros(2)
    cov = np.eye(2)
    post = GaussianPosterior(mean=mean, cov=cov, sigma_eps=1.0)
    assert post.dim == 2 and post.tau_mean == 0.0 and post.tau_var == 1.0
    asym = cov.copy()
    asym[0, 1] = 0.5
    with pytest.raises(NumericalError):
        GaussianPosterior(mean=mean, cov=asym, sigma_eps=1.0)
    with pytest.raises(NumericalError):
        GaussianPosterior(mean=mean, cov=np.array([[1.0, 2.0], [2.0, 1.0]]), sigma_eps=1.0)


def csv_bytes(ds) -> bytes:
    buf = io.StringIO()
    dataset_to_frame(ds).to_csv(buf, index=False, float_format="%.17g")
    return buf.getvalue().encode()


def test_load_dataset_roundtrip(make_ds):
    ds = make_ds(4, n=30, p=3)
    back = load_dataset(
        io.BytesIO(csv_bytes(ds)),
        outcome_col="y",
        exposure_col="z",
        control_cols=list(ds.control_names),
    )
    np.testing.assert_array_equal(back.y, ds.y)
    np.testing.assert_array_equal(back.x, ds.x)
    assert back.control_names == ds.control_names


def test_load_dataset_center_flag(make_ds):
    ds = make_ds(5)
    back = load_dataset(
        io.BytesIO(csv_bytes(ds)),
        outcome_col="y",
        exposure_col="z",
        control_cols=list(ds.control_names),
        center=True,
    )
    assert back.centered
    assert abs(back.z.mean()) < 1e-10


def test_load_dataset_missing_columns_listed():
    data = b"y,z,a\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n"
    with pytest.raises(SchemaError) as err:
        load_dataset(io.BytesIO(data), outcome_col="y", exposure_col="z", control_cols=["a", "b", "c"])
    msg = str(err.value)
    assert "b" in msg and "c" in msg


def test_load_dataset_rejects_column_overlap():
    data = b"y,z\n1,2\n3,4\n5,6\n"
    with pytest.raises(SchemaError):
        load_dataset(io.BytesIO(data), outcome_col="y", exposure_col="y", control_cols=[])


def test_load_dataset_names_bad_cell():
    data = b"y,z,a\n1,2,3\n4,oops,6\n7,8,9\n10,11,12\n"
    with pytest.raises(ParseError) as err:
        load_dataset(io.BytesIO(data), outcome_col="y", exposure_col="z", control_cols=["a"])
    msg = str(err.value)
    assert "z" in msg and "2" in msg and "oops" in msg


def test_load_dataset_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_dataset(
            tmp_path / "absent.csv", outcome_col="y", exposure_col="z", control_cols=[]
        )


def test_random_dataset_helper_is_deterministic():
    a = random_dataset(9)
    b = random_dataset(9)
    np.testing.assert_array_equal(a.y, b.y)
