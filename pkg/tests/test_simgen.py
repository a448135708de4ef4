"""Synthetic generators against their own population quantities."""
import numpy as np
import pytest

from projpost.data import ControlSubset
from projpost.errors import RankError, SchemaError
from projpost.simgen import (
    BENCH_P,
    BENCH_RHO,
    PopulationSpec,
    bench_joint_cov,
    gen_sim,
    gen_toy,
    population_lambda,
    population_projection,
)


def test_toy_shapes_and_names():
    ds, spec = gen_toy(0, n=200)
    assert ds.n == 200 and ds.p == 6
    assert ds.control_names == tuple(f"X{j}" for j in range(1, 7))
    assert spec.tau == 0.1
    assert spec.psi().shape == (7,)
    assert spec.psi()[0] == 0.1


def test_toy_reproducible_and_seed_sensitive():
    a, _ = gen_toy(3, n=100)
    b, _ = gen_toy(3, n=100)
    c, _ = gen_toy(4, n=100)
    np.testing.assert_array_equal(a.y, b.y)
    assert not np.array_equal(a.y, c.y)


def test_toy_block_streams_extend_prefix():
    """Growing n extends each variable block without rewriting its head."""
    small, _ = gen_toy(5, n=50)
    large, _ = gen_toy(5, n=120)
    np.testing.assert_array_equal(large.x[:50], small.x)


def test_toy_sample_moments_track_population():
    ds, spec = gen_toy(1, n=200_000)
    var_z = float(spec.gamma @ spec.omega @ spec.gamma) + spec.sigma_nu**2
    r_pop = spec.gamma[0] / np.sqrt(var_z)
    r_hat = np.corrcoef(ds.z, ds.x[:, 0])[0, 1]
    assert r_hat == pytest.approx(r_pop, abs=5e-3)
    assert ds.z.var() == pytest.approx(var_z, rel=0.02)


def test_population_spec_validation():
    good = np.eye(2)
    with pytest.raises(SchemaError):
        PopulationSpec(
            gamma=np.ones(2), beta=np.ones(3), tau=0.0, sigma_nu=1.0, sigma_eps=1.0, omega=good
        )
    with pytest.raises(SchemaError):
        PopulationSpec(
            gamma=np.ones(2), beta=np.ones(2), tau=0.0, sigma_nu=-1.0, sigma_eps=1.0, omega=good
        )
    with pytest.raises(SchemaError):
        PopulationSpec(
            gamma=np.ones(2),
            beta=np.ones(2),
            tau=0.0,
            sigma_nu=1.0,
            sigma_eps=1.0,
            omega=np.array([[1.0, 2.0], [2.0, 1.0]]),  # indefinite
        )


def test_bench_joint_cov_structure():
    cov = bench_joint_cov()
    assert cov.shape == (8, 8)
    np.testing.assert_allclose(np.diag(cov), 1.0)
    # geometric cross-correlations in the first row
    np.testing.assert_allclose(cov[0, 1:], BENCH_RHO ** np.arange(1, 8), rtol=1e-12)
    assert cov[0, 7] == pytest.approx(0.0823543, abs=1e-7)
    np.linalg.cholesky(cov)  # strictly positive definite


def test_gen_sim_shapes_and_coefficients():
    ds, spec = gen_sim(0, n=300)
    assert ds.p == BENCH_P
    assert ds.control_names[0] == "X1" and ds.control_names[-1] == "X25"
    np.testing.assert_allclose(spec.beta[:14], 0.1)
    np.testing.assert_allclose(spec.beta[14:], 0.0)
    assert spec.tau == 0.1
    assert 0 < spec.sigma_nu < 1  # controls explain part of the exposure


def test_gen_sim_sample_cov_matches_population():
    ds, spec = gen_sim(2, n=100_000)
    emp = np.cov(np.column_stack([ds.z, ds.x[:, :7]]).T)
    pop = bench_joint_cov()
    assert np.max(np.abs(emp - pop)) < 0.02


def test_population_lambda_against_monte_carlo():
    ds, spec = gen_toy(6, n=400_000)
    lam = population_lambda(spec)
    emp = np.cov(np.column_stack([ds.z, ds.x]).T)
    assert lam.full.shape == (7, 7)
    assert np.max(np.abs(emp - lam.full)) < 0.015


def test_population_projection_full_subset_is_identity():
    _, spec = gen_toy(0, n=50)
    psi = population_projection(spec, ControlSubset.full(spec.p))
    np.testing.assert_allclose(psi, spec.psi(), rtol=1e-10, atol=1e-12)


def test_population_projection_drop_noise_is_identity_on_tau():
    """X6 enters neither equation, so removing it changes nothing."""
    _, spec = gen_toy(0, n=50)
    psi = population_projection(spec, ControlSubset.drop_one(spec.p, 5))
    assert psi[0] == pytest.approx(spec.psi()[0], abs=1e-12)


def test_population_projection_matches_large_sample():
    ds, spec = gen_toy(7, n=150_000)
    phi = ControlSubset.drop_one(spec.p, 0)
    pop = population_projection(spec, phi)
    reduced = np.column_stack([ds.z, ds.x[:, phi.indices]])
    sample = np.linalg.lstsq(reduced, ds.y, rcond=None)[0]
    assert sample[0] == pytest.approx(pop[0], abs=0.02)


def test_population_projection_singular_raises():
    omega = np.ones((2, 2))  # rank one: duplicated control
    spec = PopulationSpec(
        gamma=np.array([1.0, 1.0]),
        beta=np.array([0.5, 0.5]),
        tau=0.1,
        sigma_nu=1.0,
        sigma_eps=1.0,
        omega=omega,
    )
    with pytest.raises(RankError):
        population_projection(spec, ControlSubset.full(2))
