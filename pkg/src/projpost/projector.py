"""Posterior projection onto control subsets and backward elimination.

A projection operator maps full-model coefficient draws to the least-squares
coefficients of a reduced design, draw by draw. It is linear, so projecting
draws is a single matrix product, and the posterior over any reduced model is
a summary of the one fitted posterior rather than a refit.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .data import ControlSubset, Dataset, PosteriorDraws
from .errors import ConfigError, PathError, RankError, SchemaError
from .linalg import chol_delete, chol_gram, chol_solve, pivot_floor

Metric = Callable[[np.ndarray, np.ndarray], float]


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ProjectionOperator:
    """Linear map from full coefficients to a subset's least-squares fit.

    Rows follow the reduced design [z x̃]; columns follow the full design.
    On the coordinates it keeps, the map restricts to the identity, which the
    constructor verifies.
    """

    matrix: np.ndarray
    subset: ControlSubset

    def __post_init__(self):
        mat = _freeze(self.matrix)
        object.__setattr__(self, "matrix", mat)
        q1 = self.subset.q + 1
        p1 = self.subset.p + 1
        if mat.shape != (q1, p1):
            raise SchemaError(
                f"operator must be {q1}x{p1} for this subset, got {mat.shape}"
            )
        kept_cols = np.concatenate(([0], 1 + self.subset.indices)).astype(int)
        gap = float(np.max(np.abs(mat[:, kept_cols] - np.eye(q1))))
        if gap > 1e-10:
            raise SchemaError(
                f"operator deviates from the identity on kept coordinates by {gap:.3e}"
            )

    @property
    def tau_row(self) -> np.ndarray:
        return self.matrix[0]


def build_operator(ds: Dataset, phi: ControlSubset) -> ProjectionOperator:
    """Operator taking full-design coefficients to the subset's fit.

    Column k of the full design contributes its cross-products with the kept
    columns, solved against the kept Gram.
    """
    if phi.p != ds.p:
        raise SchemaError(f"subset has {phi.p} entries, dataset has {ds.p} controls")
    w = ds.design()
    gram = w.T @ w
    kept_cols = np.concatenate(([0], 1 + phi.indices)).astype(int)
    names = ["z"] + [ds.control_names[j] for j in phi.indices]
    lower = chol_gram(gram[np.ix_(kept_cols, kept_cols)], names=names)
    matrix = chol_solve(lower, gram[kept_cols, :])
    return ProjectionOperator(matrix=matrix, subset=phi)


def project_draws(draws: PosteriorDraws, op: ProjectionOperator) -> PosteriorDraws:
    """Push every coefficient draw through the operator.

    The exposure coordinate stays in column 0; noise-scale draws and
    provenance carry over unchanged.
    """
    if draws.dim != op.matrix.shape[1]:
        raise ConfigError(
            f"draws have {draws.dim} coefficients but operator expects "
            f"{op.matrix.shape[1]}"
        )
    return PosteriorDraws(
        psi=draws.psi @ op.matrix.T,
        sigma_eps=draws.sigma_eps,
        provenance=draws.provenance,
        n_chains=draws.n_chains,
    )


def diff_mean(orig_tau: np.ndarray, proj_tau: np.ndarray) -> float:
    """Squared gap between the posterior mean effects of two draw vectors."""
    a = np.asarray(orig_tau, dtype=float)
    b = np.asarray(proj_tau, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ConfigError("draw vectors must be non-empty")
    return float((a.mean() - b.mean()) ** 2)


@dataclass(frozen=True)
class TauSummary:
    """Location and spread of a projected effect draw vector."""

    mean: float
    sd: float
    q025: float
    q975: float

    @classmethod
    def from_draws(cls, tau: np.ndarray) -> "TauSummary":
        lo, hi = np.quantile(tau, [0.025, 0.975])
        sd = float(np.std(tau, ddof=1)) if tau.size > 1 else 0.0
        return cls(mean=float(np.mean(tau)), sd=sd, q025=float(lo), q975=float(hi))


@dataclass(frozen=True)
class StepwisePath:
    """Record of a backward elimination run.

    ``removed`` holds control indices in removal order; ``distances`` the
    minimized metric value at each step; ``tau_summaries`` the projected
    effect summary after each removal. Draw vectors are kept only on request.
    """

    removed: tuple[int, ...]
    distances: tuple[float, ...]
    tau_summaries: tuple[TauSummary, ...]
    tau_draws: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        if len(set(self.removed)) != len(self.removed):
            raise SchemaError("a control was removed twice")
        if not (len(self.removed) == len(self.distances) == len(self.tau_summaries)):
            raise SchemaError("per-step fields must have equal length")
        if self.tau_draws is not None and len(self.tau_draws) != len(self.removed):
            raise SchemaError("per-step draw vectors must match the removal count")

    @property
    def n_steps(self) -> int:
        return len(self.removed)


def backward_stepwise(
    ds: Dataset,
    draws: PosteriorDraws,
    *,
    metric: Metric = diff_mean,
    keep: int = 0,
    stop_threshold: float | None = None,
    store_draws: bool = False,
) -> StepwisePath:
    """Greedily remove the control whose projection moves the effect least.

    Each step evaluates every single-column removal from the current reduced
    design, scores the projected effect draws against the originals with
    ``metric``, and removes the minimizer (ties broken toward the lowest
    column index). By default the search runs until only the exposure
    remains; ``keep`` retains that many controls, and ``stop_threshold``
    halts the path before recording a step whose minimized distance exceeds
    it. Candidate designs that lose rank are skipped with a warning; a step
    with no viable candidate aborts the search.
    """
    if draws.dim != ds.p + 1:
        raise ConfigError(
            f"draws have {draws.dim} coefficients but dataset implies {ds.p + 1}"
        )
    if not 0 <= keep <= ds.p:
        raise ConfigError(f"keep must be between 0 and {ds.p}, got {keep}")
    w = ds.design()
    gram = w.T @ w
    names = ds.design_names()
    orig_tau = draws.tau
    floor = pivot_floor(gram)

    # design-column indices of the current reduced model; 0 is the exposure
    cols = list(range(ds.p + 1))
    try:
        lower = chol_gram(gram, names=names)
    except RankError:
        # a degenerate full design can still be pruned: factor each candidate
        # from scratch until the offending columns are gone
        lower = None
        warnings.warn(
            "full design is rank deficient; evaluating candidates individually",
            RuntimeWarning,
            stacklevel=2,
        )

    removed: list[int] = []
    dists: list[float] = []
    summaries: list[TauSummary] = []
    kept_draws: list[np.ndarray] = []

    while len(cols) - 1 > keep:
        best: tuple[float, int, np.ndarray, np.ndarray] | None = None
        for pos in range(1, len(cols)):
            cand_cols = cols[:pos] + cols[pos + 1:]
            cand_lower = None
            if lower is not None:
                trial = chol_delete(lower, pos)
                piv2 = np.diag(trial) ** 2
                if not piv2.size or float(np.min(piv2)) > floor:
                    cand_lower = trial
            else:
                sub = gram[np.ix_(cand_cols, cand_cols)]
                try:
                    cand_lower = chol_gram(sub, names=[names[c] for c in cand_cols])
                except RankError:
                    cand_lower = None
            if cand_lower is None:
                warnings.warn(
                    f"skipping removal of {names[cols[pos]]!r}: remaining design "
                    "loses rank",
                    RuntimeWarning,
                    stacklevel=2,
                )
                continue
            first_row = np.zeros(len(cand_cols))
            first_row[0] = 1.0
            weights = chol_solve(cand_lower, first_row)
            tau_map = weights @ gram[cand_cols, :]
            cand_tau = draws.psi @ tau_map
            dist = float(metric(orig_tau, cand_tau))
            if best is None or dist < best[0]:
                best = (dist, pos, cand_lower, cand_tau)
        if best is None:
            raise PathError(
                f"no viable removal with {len(cols) - 1} controls left: every "
                "candidate design is rank deficient"
            )
        dist, pos, cand_lower, cand_tau = best
        if stop_threshold is not None and dist > stop_threshold:
            break
        removed.append(cols[pos] - 1)
        dists.append(dist)
        summaries.append(TauSummary.from_draws(cand_tau))
        if store_draws:
            kept_draws.append(cand_tau)
        del cols[pos]
        lower = cand_lower

    return StepwisePath(
        removed=tuple(removed),
        distances=tuple(dists),
        tau_summaries=tuple(summaries),
        tau_draws=tuple(kept_draws) if store_draws else None,
    )


def stepwise_to_dict(path: StepwisePath, control_names: Sequence[str]) -> dict:
    """JSON-ready view of a stepwise path, naming removed controls."""
    steps = []
    for j, (idx, dist, summ) in enumerate(
        zip(path.removed, path.distances, path.tau_summaries)
    ):
        steps.append(
            {
                "step": j + 1,
                "removed": control_names[idx],
                "d_value": dist,
                "tau_mean": summ.mean,
                "tau_sd": summ.sd,
                "tau_q025": summ.q025,
                "tau_q975": summ.q975,
            }
        )
    return {"steps": steps}
