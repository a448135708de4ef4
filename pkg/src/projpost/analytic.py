"""Flat-prior posteriors and their projections, in closed form.

Under a flat prior on the coefficient vector with known noise scale, the
posterior is Gaussian around the least-squares fit, its projection onto a
control subset is again Gaussian, and the exposure coefficient's marginal has
a one-dimensional closed form via residualization. These exact expressions
are the reference against which the Monte Carlo path is tested.
"""
from __future__ import annotations

import numpy as np

from .data import ControlSubset, Dataset, GaussianPosterior, PosteriorDraws, subset_design
from .errors import ConfigError, NumericalError, RankError
from .linalg import chol_gram, chol_solve, spd_inverse

# Largest n for which the identity checker will materialize n-by-n projections.
IDENTITY_CHECK_MAX_N = 2000


def _subset_names(ds: Dataset, phi: ControlSubset) -> list[str]:
    return ["z"] + [ds.control_names[j] for j in phi.indices]


def _ols(design: np.ndarray, y: np.ndarray, names) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares coefficients and the Gram factor they came from."""
    lower = chol_gram(design.T @ design, names=names)
    return chol_solve(lower, design.T @ y), lower


def fit_flat_posterior(ds: Dataset, sigma_eps: float) -> GaussianPosterior:
    """Exact posterior over (tau, beta) with known noise scale.

    Mean is the least-squares fit; covariance is sigma_eps² times the inverse
    design Gram.
    """
    if sigma_eps <= 0:
        raise ConfigError(f"sigma_eps must be positive, got {sigma_eps}")
    w = ds.design()
    coef, lower = _ols(w, ds.y, ds.design_names())
    cov = sigma_eps**2 * spd_inverse(lower)
    return GaussianPosterior(mean=coef, cov=cov, sigma_eps=float(sigma_eps))


def sample_flat_posterior(
    ds: Dataset,
    n_draws: int,
    seed: int,
    sigma_eps: float | None = None,
) -> PosteriorDraws:
    """Exact i.i.d. draws from the flat-prior posterior.

    With ``sigma_eps`` given, draws come from the known-scale Gaussian. With
    ``sigma_eps=None`` the noise variance is drawn from its scaled inverse
    chi-square marginal (Jeffreys scale prior) and the coefficients from the
    matching conditional Gaussian, so the pair is an exact joint draw.
    """
    if n_draws < 1:
        raise ConfigError("n_draws must be at least 1")
    w = ds.design()
    m = w.shape[1]
    coef, lower = _ols(w, ds.y, ds.design_names())
    gram_inv = spd_inverse(lower)
    scale_chol = np.linalg.cholesky(gram_inv + 1e-18 * np.eye(m))
    rng = np.random.default_rng(seed)

    if sigma_eps is not None:
        if sigma_eps <= 0:
            raise ConfigError(f"sigma_eps must be positive, got {sigma_eps}")
        sig = np.full(n_draws, float(sigma_eps))
    else:
        resid = ds.y - w @ coef
        rss = float(resid @ resid)
        dof = ds.n - m
        if dof < 1 or rss <= 0:
            raise NumericalError("cannot sample the noise scale: no residual freedom")
        sig = np.sqrt(rss / (2.0 * rng.gamma(dof / 2.0, 1.0, size=n_draws)))

    noise = rng.standard_normal((n_draws, m)) @ scale_chol.T
    psi = coef[None, :] + noise * sig[:, None]
    return PosteriorDraws(
        psi=psi, sigma_eps=sig, provenance="flat_analytic_sampled", n_chains=1
    )


def project_gaussian(
    post: GaussianPosterior, ds: Dataset, phi: ControlSubset
) -> GaussianPosterior:
    """Projection of the full flat-prior posterior onto a control subset.

    The projected mean is the least-squares map of the posterior mean through
    the subset design; for the flat posterior this equals the subset's own
    least-squares fit, and the two are computed both ways and cross-checked.
    """
    if post.dim != ds.p + 1:
        raise ConfigError(
            f"posterior has {post.dim} coefficients but dataset implies {ds.p + 1}"
        )
    kept, _ = subset_design(ds, phi)
    lower = chol_gram(kept.T @ kept, names=_subset_names(ds, phi))
    cross = kept.T @ ds.design()
    mean = chol_solve(lower, cross @ post.mean)
    direct = chol_solve(lower, kept.T @ ds.y)
    scale = max(float(np.max(np.abs(direct))), float(np.max(np.abs(post.mean))), 1e-30)
    if np.max(np.abs(mean - direct)) > 1e-8 * scale:
        raise NumericalError(
            "projected mean disagrees with the subset least-squares fit; "
            "the posterior does not belong to this dataset's full design"
        )
    cov = post.sigma_eps**2 * spd_inverse(lower)
    return GaussianPosterior(mean=mean, cov=cov, sigma_eps=post.sigma_eps)


def refit_sigma(ds: Dataset, phi: ControlSubset) -> float:
    """Residual noise scale of the reduced model on the kept columns."""
    kept, _ = subset_design(ds, phi)
    coef, _ = _ols(kept, ds.y, _subset_names(ds, phi))
    resid = ds.y - kept @ coef
    dof = ds.n - kept.shape[1]
    if dof < 1:
        raise RankError("no residual degrees of freedom in the reduced model")
    return float(np.sqrt(resid @ resid / dof))


def refit_gaussian(
    ds: Dataset, phi: ControlSubset, sigma_eps_refit: float
) -> GaussianPosterior:
    """Posterior from refitting the reduced model with its own noise scale.

    Identical mean to the projection; the covariance uses the refit scale, so
    it absorbs misfit that the projection deliberately keeps out.
    """
    if sigma_eps_refit <= 0:
        raise ConfigError(f"sigma_eps_refit must be positive, got {sigma_eps_refit}")
    kept, _ = subset_design(ds, phi)
    lower = chol_gram(kept.T @ kept, names=_subset_names(ds, phi))
    mean = chol_solve(lower, kept.T @ ds.y)
    cov = sigma_eps_refit**2 * spd_inverse(lower)
    return GaussianPosterior(mean=mean, cov=cov, sigma_eps=float(sigma_eps_refit))


def _residualize_on(basis: np.ndarray, target: np.ndarray, names) -> np.ndarray:
    """Residual of ``target`` after projecting onto the columns of ``basis``."""
    if basis.shape[1] == 0:
        return np.array(target, dtype=float)
    lower = chol_gram(basis.T @ basis, names=names)
    return target - basis @ chol_solve(lower, basis.T @ target)


class TauMarginal:
    """One-dimensional marginal for the exposure coefficient."""

    __slots__ = ("mean", "variance")

    def __init__(self, mean: float, variance: float):
        if variance <= 0 or not np.isfinite(variance) or not np.isfinite(mean):
            raise NumericalError(
                f"degenerate tau marginal: mean {mean}, variance {variance}"
            )
        self.mean = float(mean)
        self.variance = float(variance)

    def __repr__(self):
        return f"TauMarginal(mean={self.mean!r}, variance={self.variance!r})"

    def __eq__(self, other):
        return (
            isinstance(other, TauMarginal)
            and self.mean == other.mean
            and self.variance == other.variance
        )


def _tau_marginal(ds: Dataset, controls: np.ndarray, names, sigma_eps: float) -> TauMarginal:
    z_res = _residualize_on(controls, ds.z, names)
    ssz = float(z_res @ z_res)
    if ssz <= 1e-10 * float(ds.z @ ds.z):
        raise RankError("exposure is collinear with the controls", column="z")
    mean = float(z_res @ ds.y) / ssz
    return TauMarginal(mean=mean, variance=sigma_eps**2 / ssz)


def tau_marginal_original(ds: Dataset, sigma_eps: float) -> TauMarginal:
    """Marginal of tau in the full model, by residualizing z on all controls."""
    if sigma_eps <= 0:
        raise ConfigError(f"sigma_eps must be positive, got {sigma_eps}")
    return _tau_marginal(ds, ds.x, list(ds.control_names), sigma_eps)


def tau_marginal_projected(
    ds: Dataset, phi: ControlSubset, sigma_eps: float
) -> TauMarginal:
    """Marginal of tau after projection onto a control subset."""
    if sigma_eps <= 0:
        raise ConfigError(f"sigma_eps must be positive, got {sigma_eps}")
    if phi.p != ds.p:
        raise ConfigError(f"subset has {phi.p} entries, dataset has {ds.p} controls")
    kept = ds.x[:, phi.indices]
    names = [ds.control_names[j] for j in phi.indices]
    return _tau_marginal(ds, kept, names, sigma_eps)


def variance_difference(ds: Dataset, phi: ControlSubset, sigma_eps: float) -> float:
    """Exact gap between the original and projected tau marginal variances.

    Computed from the closed form whose numerator is a squared projection
    norm, so the result is nonnegative by construction up to roundoff.
    """
    if sigma_eps <= 0:
        raise ConfigError(f"sigma_eps must be positive, got {sigma_eps}")
    full_names = list(ds.control_names)
    kept_names = [ds.control_names[j] for j in phi.indices]
    kept = ds.x[:, phi.indices]

    z = ds.z
    fitted_full = z - _residualize_on(ds.x, z, full_names)
    # the part of the full fit that the kept controls cannot reproduce
    leftover = _residualize_on(kept, fitted_full, kept_names)
    numerator = float(leftover @ leftover)

    res_full = z - fitted_full
    den_full = float(res_full @ res_full)
    res_kept = _residualize_on(kept, z, kept_names)
    den_kept = float(res_kept @ res_kept)
    if den_full <= 0 or den_kept <= 0:
        raise RankError("exposure is collinear with the controls", column="z")
    return sigma_eps**2 * numerator / (den_full * den_kept)


def _rel_err(a: np.ndarray, b: np.ndarray) -> float:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.size == 0:
        return 0.0
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def verify_appendix_identities(ds: Dataset, phi: ControlSubset) -> dict[str, float]:
    """Numerical check of the block-inverse identities behind the projection.

    Returns a map from identity name to max relative error. The ridge-limit
    entries report the error of the rank-one reduced form at two ridge sizes;
    that error shrinks with the ridge rather than hitting machine precision,
    so those two entries are judged by decrease, not by the 1e-8 gate.
    Materializes n-by-n projections, hence the bound on n.
    """
    if ds.n > IDENTITY_CHECK_MAX_N:
        raise ConfigError(
            f"identity checks materialize n-by-n projections; n = {ds.n} exceeds "
            f"{IDENTITY_CHECK_MAX_N}"
        )
    report: dict[str, float] = {}
    w = ds.design()
    kept, dropped = subset_design(ds, phi)
    m_kept = kept.shape[1]

    perm = np.hstack([kept, dropped])
    gram = perm.T @ perm
    lower = chol_gram(gram, names=_subset_names(ds, phi) + [ds.control_names[j] for j in phi.excluded])
    full_inv = spd_inverse(lower)

    q11 = full_inv[:m_kept, :m_kept]
    q12 = full_inv[:m_kept, m_kept:]
    q22 = full_inv[m_kept:, m_kept:]

    # (i) The three blocks reassemble the permuted Gram's inverse exactly.
    reassembled = np.block([[q11, q12], [q12.T, q22]])
    report["q_block_reassembly"] = _rel_err(reassembled @ gram, np.eye(gram.shape[0]))

    # (ii) The leading block equals the inverse Gram of the kept columns
    # after the dropped columns are projected out.
    if dropped.shape[1]:
        drop_lower = chol_gram(dropped.T @ dropped, names=[ds.control_names[j] for j in phi.excluded])
        kept_res = kept - dropped @ chol_solve(drop_lower, dropped.T @ kept)
    else:
        kept_res = kept
    report["q11_equals_partial_gram_inverse"] = _rel_err(
        q11, np.linalg.inv(kept_res.T @ kept)
    )

    # (iii) The cross block follows from the leading block.
    if dropped.shape[1]:
        dd_inv = spd_inverse(chol_gram(dropped.T @ dropped))
        report["q12_from_q11"] = _rel_err(q12, -q11 @ (kept.T @ dropped) @ dd_inv)
    else:
        report["q12_from_q11"] = 0.0

    # (iv) Woodbury reduction of the leading block, in the well-posed form
    # with the dropped columns orthonormalized first.
    kept_gram_inv = spd_inverse(chol_gram(kept.T @ kept, names=_subset_names(ds, phi)))
    if dropped.shape[1]:
        drop_lower = chol_gram(dropped.T @ dropped)
        ortho_drop = np.linalg.solve(drop_lower, dropped.T).T
        b = kept.T @ ortho_drop
        core = np.linalg.inv(np.eye(b.shape[1]) - b.T @ kept_gram_inv @ b)
        woodbury = kept_gram_inv + kept_gram_inv @ b @ core @ b.T @ kept_gram_inv
    else:
        woodbury = kept_gram_inv
    report["woodbury_reduction"] = _rel_err(q11, woodbury)

    # (v) Ridge limit of the rank-one reduced marginal covariance. The target
    # is the closed-form marginal variance; the ridge approximation's error
    # scales with the ridge size.
    marg_var = _tau_marginal(ds, ds.x, list(ds.control_names), 1.0).variance
    if ds.p:
        x_lower = chol_gram(ds.x.T @ ds.x, names=list(ds.control_names))
        proj_x = ds.x @ chol_solve(x_lower, ds.x.T)
    else:
        proj_x = np.zeros((ds.n, ds.n))
    z = ds.z
    ssz = float(z @ z)
    proj_z = np.outer(z, z) / ssz
    u = proj_x @ z
    sm_target = proj_x - np.outer(u, u) / ssz / (1.0 + float(z @ u) / ssz)
    for eps in (1e-4, 1e-6):
        ridge_m = proj_x + eps * np.eye(ds.n)
        lhs = np.linalg.inv(np.linalg.inv(ridge_m) + proj_z)
        report[f"sherman_morrison_ridge_{eps:.0e}"] = _rel_err(lhs, sm_target)

    # (vi) The variance-gap numerator is a squared norm, hence nonnegative.
    vd = variance_difference(ds, phi, 1.0)
    report["variance_gap_nonnegative"] = max(0.0, -vd) / max(abs(vd), 1e-300)

    # Cross-check the closed-form variance gap against direct subtraction.
    direct = marg_var - tau_marginal_projected(ds, phi, 1.0).variance
    report["variance_gap_closed_form"] = _rel_err(
        np.array([vd]), np.array([direct])
    ) if abs(direct) > 1e-300 else abs(vd)

    return report
