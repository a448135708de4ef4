"""Synthetic designs with known population structure.

Two fixed designs are provided: a six-control teaching example with two
confounders, two weak confounders, one instrument-like column and one noise
column; and a 25-control benchmark whose exposure and first seven controls
share an explicit joint covariance. Each generator draws every variable
block from its own seed substream, so enlarging one block never perturbs
another.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ControlSubset, Dataset
from .errors import ConfigError, RankError, SchemaError

TOY_GAMMA = np.array([1.0, 1.0, 0.2, 0.2, 1.0, 0.0])
TOY_BETA = np.array([1.5, 0.5, 1.5, 0.5, 0.0, 0.0])
TOY_TAU = 0.1

BENCH_P = 25
BENCH_JOINT = 8          # exposure plus the first seven controls share a covariance
BENCH_RHO = 0.7
BENCH_TAU = 0.1
BENCH_COEF = 0.1
BENCH_N_SIGNAL = 14      # controls 1..14 enter the outcome


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PopulationSpec:
    """Generating mechanism: exposure coefficients, outcome coefficients,
    effect, noise scales, and the control covariance."""

    gamma: np.ndarray
    beta: np.ndarray
    tau: float
    sigma_nu: float
    sigma_eps: float
    omega: np.ndarray

    def __post_init__(self):
        gamma = _freeze(self.gamma)
        beta = _freeze(self.beta)
        omega = _freeze(self.omega)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "sigma_nu", float(self.sigma_nu))
        object.__setattr__(self, "sigma_eps", float(self.sigma_eps))
        p = gamma.shape[0]
        if beta.shape[0] != p or omega.shape != (p, p):
            raise SchemaError("gamma, beta, and omega disagree on dimension")
        if self.sigma_nu <= 0 or self.sigma_eps <= 0:
            raise SchemaError("noise scales must be positive")
        if np.max(np.abs(omega - omega.T), initial=0.0) > 1e-10:
            raise SchemaError("omega must be symmetric")
        try:
            np.linalg.cholesky(omega + 1e-12 * np.eye(p))
        except np.linalg.LinAlgError:
            raise SchemaError("omega must be positive semidefinite") from None

    @property
    def p(self) -> int:
        return self.gamma.shape[0]

    def psi(self) -> np.ndarray:
        """Full coefficient vector with the effect in slot 0."""
        return np.concatenate(([self.tau], self.beta))


@dataclass(frozen=True)
class JointCov:
    """Covariance of (z, x) and its partition for a control subset."""

    full: np.ndarray
    keep: np.ndarray
    drop: np.ndarray
    cross: np.ndarray

    def __post_init__(self):
        for name in ("full", "keep", "drop", "cross"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        if np.max(np.abs(self.full - self.full.T), initial=0.0) > 1e-10:
            raise SchemaError("joint covariance must be symmetric")


def gen_toy(seed: int, n: int = 1000) -> tuple[Dataset, PopulationSpec]:
    """Six-control example: two strong confounders, two weak, one column that
    moves only the exposure, one pure noise column."""
    if n < 8:
        raise ConfigError(f"need at least 8 rows, got {n}")
    spec = PopulationSpec(
        gamma=TOY_GAMMA,
        beta=TOY_BETA,
        tau=TOY_TAU,
        sigma_nu=1.0,
        sigma_eps=1.0,
        omega=np.eye(6),
    )
    x_stream, nu_stream, eps_stream = np.random.SeedSequence(seed).spawn(3)
    x = np.random.default_rng(x_stream).standard_normal((n, 6))
    nu = np.random.default_rng(nu_stream).standard_normal(n)
    eps = np.random.default_rng(eps_stream).standard_normal(n)
    z = x @ spec.gamma + spec.sigma_nu * nu
    y = spec.tau * z + x @ spec.beta + spec.sigma_eps * eps
    names = tuple(f"X{j}" for j in range(1, 7))
    return Dataset(y=y, z=z, x=x, control_names=names, centered=False), spec


def bench_joint_cov() -> np.ndarray:
    """Covariance of (z, x1..x7): unit diagonal, entry (k,l) = rho^(k+l-2)
    off the diagonal (1-based). Equals diag(1-v²) + v vᵀ with v_k = rho^(k-1),
    which makes positive definiteness explicit."""
    v = BENCH_RHO ** np.arange(BENCH_JOINT)
    cov = np.diag(1.0 - v**2) + np.outer(v, v)
    return cov


def gen_sim(seed: int, n: int = 1000) -> tuple[Dataset, PopulationSpec]:
    """Benchmark design: exposure correlated with controls 1..7, controls
    8..14 independent signal, controls 15..25 pure noise."""
    if n < 30:
        raise ConfigError(f"need at least 30 rows, got {n}")
    cov = bench_joint_cov()
    chol = np.linalg.cholesky(cov)

    joint_s, signal_s, noise_s, eps_s = np.random.SeedSequence(seed).spawn(4)
    joint = np.random.default_rng(joint_s).standard_normal((n, BENCH_JOINT)) @ chol.T
    z = joint[:, 0]
    x_corr = joint[:, 1:]
    x_signal = np.random.default_rng(signal_s).standard_normal((n, BENCH_N_SIGNAL - 7))
    x_noise = np.random.default_rng(noise_s).standard_normal((n, BENCH_P - BENCH_N_SIGNAL))
    x = np.hstack([x_corr, x_signal, x_noise])

    beta = np.zeros(BENCH_P)
    beta[:BENCH_N_SIGNAL] = BENCH_COEF
    eps = np.random.default_rng(eps_s).standard_normal(n)
    y = BENCH_TAU * z + x @ beta + eps

    # Population mechanism implied by the joint covariance: regress the
    # exposure on all controls. Only the correlated block contributes.
    omega = np.eye(BENCH_P)
    omega[:7, :7] = cov[1:, 1:]
    c = np.zeros(BENCH_P)
    c[:7] = cov[0, 1:]
    gamma = np.linalg.solve(omega, c)
    sigma_nu2 = cov[0, 0] - c @ gamma
    if sigma_nu2 <= 0:
        raise RankError("degenerate exposure residual variance in the benchmark design")
    spec = PopulationSpec(
        gamma=gamma,
        beta=beta,
        tau=BENCH_TAU,
        sigma_nu=float(np.sqrt(sigma_nu2)),
        sigma_eps=1.0,
        omega=omega,
    )
    names = tuple(f"X{j}" for j in range(1, BENCH_P + 1))
    return Dataset(y=y, z=z, x=x, control_names=names, centered=False), spec


def population_lambda(spec: PopulationSpec, phi: ControlSubset | None = None) -> JointCov:
    """Covariance of the stacked (z, x) vector, partitioned by a subset.

    The exposure's variance is gammaᵀ omega gamma + sigma_nu² and its
    covariance with the controls is omega gamma.
    """
    p = spec.p
    cross = spec.omega @ spec.gamma
    full = np.empty((p + 1, p + 1))
    full[0, 0] = spec.gamma @ cross + spec.sigma_nu**2
    full[0, 1:] = cross
    full[1:, 0] = cross
    full[1:, 1:] = spec.omega
    if phi is None:
        phi = ControlSubset.full(p)
    if phi.p != p:
        raise SchemaError(f"subset has {phi.p} entries but spec has {p} controls")
    keep_idx = np.concatenate(([0], 1 + phi.indices)).astype(int)
    drop_idx = (1 + phi.excluded).astype(int)
    return JointCov(
        full=full,
        keep=full[np.ix_(keep_idx, keep_idx)],
        drop=full[np.ix_(drop_idx, drop_idx)],
        cross=full[np.ix_(keep_idx, drop_idx)],
    )


def population_projection(spec: PopulationSpec, phi: ControlSubset) -> np.ndarray:
    """Large-sample limit of the projected coefficient vector.

    Solves the population least-squares map: the kept-block covariance
    applied to the cross-covariance with the full stacked vector, then
    applied to the generating coefficients.
    """
    joint = population_lambda(spec, phi)
    p = spec.p
    keep_idx = np.concatenate(([0], 1 + phi.indices)).astype(int)
    cross_full = joint.full[np.ix_(keep_idx, np.arange(p + 1))]
    try:
        a_star = np.linalg.solve(joint.keep, cross_full)
    except np.linalg.LinAlgError:
        raise RankError("population covariance of the kept columns is singular") from None
    return a_star @ spec.psi()
