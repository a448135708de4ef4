"""Read-only HTTP view of one draw container.

The app serves summaries of the original effect posterior, projections onto
arbitrary control subsets, and backward-elimination paths, all computed from
immutable in-memory arrays. Handlers share nothing mutable but a bounded
factorization cache, so identical requests give identical bytes regardless
of concurrency.
"""
from __future__ import annotations

import hashlib
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .artifact import Artifact
from .data import ControlSubset
from .errors import (
    ConfigError,
    InsufficientDrawsError,
    ParseError,
    ProjpostError,
    RankError,
    SchemaError,
)
from .linalg import chol_gram, chol_solve
from .parallel import thread_cap
from .projector import TauSummary, backward_stepwise, diff_mean, stepwise_to_dict

FACTOR_CACHE_SIZE = 256
HISTOGRAM_BINS = 64
HISTOGRAM_HALF_WIDTH = 4.0  # in posterior standard deviations


@dataclass(frozen=True)
class SessionState:
    """Identity of the served artifact; fixed for the app's lifetime."""

    dataset_id: str
    draws_id: str
    created: float


def _digest(*arrays: np.ndarray) -> str:
    h = hashlib.sha256()
    for arr in arrays:
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()[:16]


def tau_histogram(tau: np.ndarray) -> dict:
    """Fixed-width density histogram centered on the draws."""
    mean = float(np.mean(tau))
    sd = float(np.std(tau, ddof=1)) if tau.size > 1 else 0.0
    if sd > 0:
        lo = mean - HISTOGRAM_HALF_WIDTH * sd
        hi = mean + HISTOGRAM_HALF_WIDTH * sd
    else:
        lo, hi = mean - 0.5, mean + 0.5
    density, _ = np.histogram(tau, bins=HISTOGRAM_BINS, range=(lo, hi), density=True)
    return {"lo": lo, "hi": hi, "density": [float(v) for v in density]}


def _summary_dict(summ: TauSummary) -> dict:
    return {"mean": summ.mean, "sd": summ.sd, "q025": summ.q025, "q975": summ.q975}


def build_app(art: Artifact, *, ui_dir: str | Path | None = None) -> FastAPI:
    """Assemble the app around one artifact. All state is read-only."""
    ds = art.dataset
    draws = art.draws
    w = ds.design()
    gram = w.T @ w
    gram.setflags(write=False)
    names = ds.design_names()
    orig_tau = draws.tau
    orig_summary = _summary_dict(TauSummary.from_draws(orig_tau))
    orig_bins = tau_histogram(orig_tau)
    session = SessionState(
        dataset_id=_digest(ds.y, ds.z, ds.x),
        draws_id=_digest(draws.psi, draws.sigma_eps),
        created=time.time(),
    )

    @lru_cache(maxsize=FACTOR_CACHE_SIZE)
    def factor(kept_controls: tuple[int, ...]) -> tuple[np.ndarray, tuple[int, ...]]:
        cols = (0,) + tuple(1 + j for j in kept_controls)
        sub = gram[np.ix_(cols, cols)]
        lower = chol_gram(sub, names=[names[c] for c in cols])
        lower.setflags(write=False)
        return lower, cols

    def project_payload(subset: ControlSubset) -> dict:
        if subset.q == ds.p:
            # projecting onto the full design is the identity map
            tau = orig_tau
        else:
            lower, cols = factor(tuple(int(j) for j in subset.indices))
            first = np.zeros(len(cols))
            first[0] = 1.0
            weights = chol_solve(lower, first)
            tau = draws.psi @ (weights @ gram[list(cols), :])
        return {
            "include": list(subset.names(ds.control_names)),
            "q": subset.q,
            "summary": _summary_dict(TauSummary.from_draws(tau)),
            "bins": tau_histogram(tau),
            "d_mean": diff_mean(orig_tau, tau),
        }

    @asynccontextmanager
    async def _lifespan(app: FastAPI):
        import anyio.to_thread

        limiter = anyio.to_thread.current_default_thread_limiter()
        limiter.total_tokens = max(thread_cap(64), 4)
        yield

    app = FastAPI(title="projpost", docs_url=None, redoc_url=None, lifespan=_lifespan)
    app.state.session = session

    @app.exception_handler(ProjpostError)
    async def _domain_error(request: Request, exc: ProjpostError) -> JSONResponse:
        if isinstance(exc, (SchemaError, ParseError, ConfigError, InsufficientDrawsError)):
            status = 400
        elif isinstance(exc, RankError):
            status = 422
        else:
            status = 422
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/meta")
    def meta() -> dict:
        return {
            "n": ds.n,
            "p": ds.p,
            "control_names": list(ds.control_names),
            "draw_count": draws.s,
            "provenance": draws.provenance,
            "session": {
                "dataset_id": session.dataset_id,
                "draws_id": session.draws_id,
                "created": session.created,
            },
        }

    @app.get("/posterior/tau")
    def posterior_tau() -> dict:
        return {"summary": orig_summary, "bins": orig_bins}

    def _parse_include(body) -> ControlSubset:
        if not isinstance(body, dict):
            raise HTTPException(400, "request body must be a JSON object")
        if "include" not in body:
            raise HTTPException(400, 'request body must carry an "include" list')
        include = body["include"]
        if not isinstance(include, list) or not all(
            isinstance(v, str) for v in include
        ):
            raise HTTPException(400, '"include" must be a list of control names')
        if len(set(include)) != len(include):
            raise HTTPException(400, '"include" repeats a control name')
        try:
            return ControlSubset.from_names(include, ds.control_names)
        except SchemaError as exc:
            raise HTTPException(400, str(exc)) from None

    @app.post("/project")
    async def project(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "request body is not valid JSON") from None
        subset = _parse_include(body)
        extra = set(body) - {"include"}
        if extra:
            raise HTTPException(400, f"unexpected field(s) {sorted(extra)}")
        return project_payload(subset)

    @app.post("/stepwise")
    async def stepwise(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise HTTPException(400, "request body must be a JSON object")
        extra = set(body) - {"metric", "keep", "stop_when"}
        if extra:
            raise HTTPException(400, f"unexpected field(s) {sorted(extra)}")
        metric = body.get("metric", "d_M")
        if metric != "d_M":
            raise HTTPException(400, f'metric must be "d_M", got {metric!r}')
        keep = body.get("keep", 0)
        if not isinstance(keep, int) or isinstance(keep, bool) or not 0 <= keep <= ds.p:
            raise HTTPException(400, f"keep must be an integer in [0, {ds.p}]")
        stop_when = body.get("stop_when")
        if stop_when is not None and not isinstance(stop_when, (int, float)):
            raise HTTPException(400, "stop_when must be a number")
        path = backward_stepwise(
            ds,
            draws,
            keep=keep,
            stop_threshold=None if stop_when is None else float(stop_when),
        )
        return stepwise_to_dict(path, ds.control_names)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
