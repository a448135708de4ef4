"""Core data containers and CSV ingestion.

A Dataset holds an outcome, a single exposure, and a named control matrix.
The stacked design [z x] is always derived on demand, never stored. All
containers are immutable after construction; array fields are marked
read-only so they can be shared across threads.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd

from .errors import NumericalError, ParseError, RankError, SchemaError

# Column means of a centered dataset must be this close to zero.
CENTER_ATOL = 1e-10

DRAW_PROVENANCES = ("flat_analytic_sampled", "horseshoe_ric")


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """Outcome y, exposure z, and an n-by-p control matrix x.

    ``centered = True`` asserts that every column has mean within
    ``CENTER_ATOL`` of zero; the constructor verifies the claim.
    """

    y: np.ndarray
    z: np.ndarray
    x: np.ndarray
    control_names: tuple[str, ...]
    centered: bool = False

    def __post_init__(self):
        y = _freeze(self.y)
        z = _freeze(self.z)
        x = _freeze(self.x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "control_names", tuple(self.control_names))
        if y.ndim != 1 or z.ndim != 1 or x.ndim != 2:
            raise SchemaError("y and z must be vectors and x an n-by-p matrix")
        n = y.shape[0]
        if z.shape[0] != n or x.shape[0] != n:
            raise SchemaError(
                f"row mismatch: y has {n} rows, z has {z.shape[0]}, x has {x.shape[0]}"
            )
        if len(self.control_names) != x.shape[1]:
            raise SchemaError(
                f"{x.shape[1]} control columns but {len(self.control_names)} names"
            )
        if len(set(self.control_names)) != len(self.control_names):
            raise SchemaError("control names must be unique")
        for arr, what in ((y, "y"), (z, "z"), (x, "x")):
            if not np.all(np.isfinite(arr)):
                raise ParseError(f"non-finite entries in {what}")
        if n <= x.shape[1] + 1:
            raise RankError(
                f"need n > p + 1 rows for a proper posterior; got n = {n}, p = {x.shape[1]}"
            )
        if self.centered:
            means = [float(np.mean(y)), float(np.mean(z))]
            if x.shape[1]:
                means.extend(np.mean(x, axis=0))
            worst = max(abs(m) for m in means)
            if worst > CENTER_ATOL:
                raise SchemaError(
                    f"dataset marked centered but a column mean is {worst:.3e}"
                )

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def design(self) -> np.ndarray:
        """The stacked design [z x], column 0 the exposure. Freshly built."""
        return np.column_stack((self.z, self.x))

    def design_names(self) -> tuple[str, ...]:
        return ("z",) + self.control_names


def center_dataset(ds: Dataset) -> Dataset:
    """Subtract column means from y, z, and every control."""
    x = ds.x - ds.x.mean(axis=0) if ds.p else ds.x
    return Dataset(
        y=ds.y - ds.y.mean(),
        z=ds.z - ds.z.mean(),
        x=x,
        control_names=ds.control_names,
        centered=True,
    )


@dataclass(frozen=True)
class ControlSubset:
    """Boolean inclusion mask over a dataset's control columns."""

    include: np.ndarray

    def __post_init__(self):
        inc = np.array(self.include, dtype=bool)
        if inc.ndim != 1:
            raise SchemaError("subset mask must be one-dimensional")
        inc.setflags(write=False)
        object.__setattr__(self, "include", inc)

    @classmethod
    def full(cls, p: int) -> "ControlSubset":
        return cls(np.ones(p, dtype=bool))

    @classmethod
    def none(cls, p: int) -> "ControlSubset":
        return cls(np.zeros(p, dtype=bool))

    @classmethod
    def drop_one(cls, p: int, j: int) -> "ControlSubset":
        mask = np.ones(p, dtype=bool)
        mask[j] = False
        return cls(mask)

    @classmethod
    def from_names(cls, names: Iterable[str], control_names: Sequence[str]) -> "ControlSubset":
        index = {name: j for j, name in enumerate(control_names)}
        mask = np.zeros(len(control_names), dtype=bool)
        for name in names:
            if name not in index:
                raise SchemaError(f"unknown control name {name!r}")
            mask[index[name]] = True
        return cls(mask)

    @property
    def q(self) -> int:
        return int(self.include.sum())

    @property
    def p(self) -> int:
        return int(self.include.shape[0])

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.include)

    @property
    def excluded(self) -> np.ndarray:
        return np.flatnonzero(~self.include)

    def names(self, control_names: Sequence[str]) -> tuple[str, ...]:
        return tuple(control_names[j] for j in self.indices)

    def bitmask(self) -> int:
        out = 0
        for j in self.indices:
            out |= 1 << int(j)
        return out


def subset_design(ds: Dataset, phi: ControlSubset) -> tuple[np.ndarray, np.ndarray]:
    """Split the design into kept columns [z x̃] and excluded columns x†."""
    if phi.p != ds.p:
        raise SchemaError(
            f"subset mask has {phi.p} entries but dataset has {ds.p} controls"
        )
    kept = np.column_stack((ds.z, ds.x[:, phi.indices])) if phi.q else ds.z[:, None]
    return kept, ds.x[:, phi.excluded]


@dataclass(frozen=True)
class PosteriorDraws:
    """Monte Carlo draws of the full coefficient vector.

    ``psi`` is S-by-(p+1) with the exposure coefficient in column 0;
    ``sigma_eps`` holds the per-draw noise scale. Draws from multi-chain
    samplers are stored chain-major and carry ``n_chains`` so convergence
    summaries can recover the chain boundaries.
    """

    psi: np.ndarray
    sigma_eps: np.ndarray
    provenance: str
    n_chains: int = 1

    def __post_init__(self):
        psi = np.atleast_2d(_freeze(self.psi))
        sig = _freeze(self.sigma_eps)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "sigma_eps", sig)
        if psi.ndim != 2 or sig.ndim != 1 or sig.shape[0] != psi.shape[0]:
            raise SchemaError("psi must be S-by-(p+1) with one sigma_eps per draw")
        if psi.shape[0] < 1:
            raise SchemaError("need at least one draw")
        if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(sig))):
            raise ParseError("non-finite draws")
        if np.any(sig <= 0):
            raise SchemaError("sigma_eps draws must be positive")
        if self.provenance not in DRAW_PROVENANCES:
            raise SchemaError(
                f"unknown provenance {self.provenance!r}; expected one of {DRAW_PROVENANCES}"
            )
        if self.n_chains < 1 or psi.shape[0] % self.n_chains:
            raise SchemaError(
                f"draw count {psi.shape[0]} not divisible into {self.n_chains} chains"
            )

    @property
    def s(self) -> int:
        return self.psi.shape[0]

    @property
    def dim(self) -> int:
        return self.psi.shape[1]

    @property
    def tau(self) -> np.ndarray:
        return self.psi[:, 0]


@dataclass(frozen=True)
class GaussianPosterior:
    """Exact Gaussian posterior: mean vector, covariance, and noise scale."""

    mean: np.ndarray
    cov: np.ndarray
    sigma_eps: float

    def __post_init__(self):
        mean = _freeze(self.mean)
        cov = _freeze(self.cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "sigma_eps", float(self.sigma_eps))
        m = mean.shape[0]
        if mean.ndim != 1 or cov.shape != (m, m):
            raise SchemaError("mean must be a vector and cov a matching square matrix")
        if self.sigma_eps <= 0 or not np.isfinite(self.sigma_eps):
            raise SchemaError("sigma_eps must be a positive real")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ParseError("non-finite posterior")
        if m:
            gap = float(np.max(np.abs(cov - cov.T)))
            if gap > 1e-10:
                raise NumericalError(f"covariance asymmetric by {gap:.3e} (limit 1e-10)")
        try:
            np.linalg.cholesky(cov + 1e-12 * np.eye(m))
        except np.linalg.LinAlgError:
            raise NumericalError("covariance is not positive semidefinite") from None

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def tau_mean(self) -> float:
        return float(self.mean[0])

    @property
    def tau_var(self) -> float:
        return float(self.cov[0, 0])


def load_dataset(
    source,
    *,
    outcome_col: str,
    exposure_col: str,
    control_cols: Sequence[str],
    center: bool = False,
) -> Dataset:
    """Read a comma-delimited UTF-8 table with a header row into a Dataset.

    ``source`` may be a path, bytes, or a file-like object. Every referenced
    cell must parse as a finite number; the first offender is reported with
    its column and 1-based data row.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(bytes(source))
    elif isinstance(source, (str, Path)):
        source = Path(source)
        if not source.exists():
            raise ParseError(f"no such file: {source}")
    try:
        frame = pd.read_csv(source, encoding="utf-8", float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise ParseError(f"could not parse CSV: {exc}") from exc

    control_cols = list(control_cols)
    wanted = [outcome_col, exposure_col, *control_cols]
    missing = [c for c in wanted if c not in frame.columns]
    if missing:
        raise SchemaError(
            f"missing column(s) {missing} in CSV header {list(frame.columns)}"
        )
    if len(set(wanted)) != len(wanted):
        raise SchemaError("outcome, exposure, and control columns must be distinct")

    def numeric(colname: str) -> np.ndarray:
        raw = frame[colname]
        vals = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
        bad = ~np.isfinite(vals)
        if bad.any():
            row = int(np.argmax(bad))
            raise ParseError(
                f"column {colname!r}, row {row + 1}: "
                f"value {raw.iloc[row]!r} is not a finite number"
            )
        return vals

    y = numeric(outcome_col)
    z = numeric(exposure_col)
    if control_cols:
        x = np.column_stack([numeric(c) for c in control_cols])
    else:
        x = np.zeros((len(frame), 0))
    ds = Dataset(y=y, z=z, x=x, control_names=tuple(control_cols), centered=False)
    return center_dataset(ds) if center else ds


def dataset_to_frame(ds: Dataset, *, outcome_col: str = "y", exposure_col: str = "z") -> pd.DataFrame:
    """Tabular view in the standard column order: outcome, exposure, controls."""
    data = {outcome_col: ds.y, exposure_col: ds.z}
    for j, name in enumerate(ds.control_names):
        data[name] = ds.x[:, j]
    return pd.DataFrame(data)
