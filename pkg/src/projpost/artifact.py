"""Self-contained draw container.

One file carries the dataset, the coefficient draws, per-draw bookkeeping,
and a JSON header describing both, so projection and serving need no other
input. Layout: magic line, little-endian uint64 header length, UTF-8 JSON
header, then raw little-endian blocks in header order. Nothing in the file
depends on when it was written, so rewriting the same fit is byte-identical.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .data import Dataset, PosteriorDraws
from .errors import ParseError, SchemaError

MAGIC = b"PROJPOST-DRAWS/1\n"
FORMAT_VERSION = 1

_DTYPES = {"<f8": np.dtype("<f8"), "<i4": np.dtype("<i4")}


@dataclass(frozen=True)
class Artifact:
    """A dataset, its posterior draws, and per-draw chain/iteration labels."""

    dataset: Dataset
    draws: PosteriorDraws
    chain: np.ndarray
    iteration: np.ndarray
    meta: dict

    def __post_init__(self):
        chain = np.asarray(self.chain, dtype=np.int32)
        iteration = np.asarray(self.iteration, dtype=np.int32)
        chain.setflags(write=False)
        iteration.setflags(write=False)
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "iteration", iteration)
        s = self.draws.s
        if chain.shape != (s,) or iteration.shape != (s,):
            raise SchemaError("chain and iteration labels must have one entry per draw")


def default_labels(draws: PosteriorDraws) -> tuple[np.ndarray, np.ndarray]:
    """Chain-major labels implied by the draw container itself."""
    per = draws.s // draws.n_chains
    chain = np.repeat(np.arange(draws.n_chains, dtype=np.int32), per)
    iteration = np.tile(np.arange(per, dtype=np.int32), draws.n_chains)
    return chain, iteration


def _blocks_of(art: Artifact) -> list[tuple[str, np.ndarray]]:
    ds, draws = art.dataset, art.draws
    return [
        ("psi", draws.psi.astype("<f8")),
        ("sigma_eps", draws.sigma_eps.astype("<f8")),
        ("chain", art.chain.astype("<i4")),
        ("iteration", art.iteration.astype("<i4")),
        ("y", ds.y.astype("<f8")),
        ("z", ds.z.astype("<f8")),
        ("x", ds.x.astype("<f8")),
    ]


def save_artifact(path, art: Artifact) -> None:
    """Write the container; byte-for-byte deterministic for equal contents."""
    ds, draws = art.dataset, art.draws
    blocks = _blocks_of(art)
    header = {
        "format": "projpost-draws",
        "version": FORMAT_VERSION,
        "n": ds.n,
        "p": ds.p,
        "control_names": list(ds.control_names),
        "centered": ds.centered,
        "provenance": draws.provenance,
        "draw_count": draws.s,
        "n_chains": draws.n_chains,
        "meta": art.meta,
        "blocks": [
            {"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape)}
            for name, arr in blocks
        ],
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(np.uint64(len(head)).tobytes())
        fh.write(head)
        for _, arr in blocks:
            fh.write(np.ascontiguousarray(arr).tobytes())


def load_artifact(path) -> Artifact:
    """Read a container back; the round trip is bit-identical."""
    if isinstance(path, (bytes, bytearray)):
        raw = bytes(path)
    else:
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read draw container {path!r}: {exc}") from exc
    if not raw.startswith(MAGIC):
        raise ParseError(f"not a draw container: bad magic in {path!r}")
    off = len(MAGIC)
    if len(raw) < off + 8:
        raise ParseError("truncated container: missing header length")
    head_len = int(np.frombuffer(raw[off : off + 8], dtype="<u8")[0])
    off += 8
    if len(raw) < off + head_len:
        raise ParseError("truncated container: incomplete header")
    try:
        header = json.loads(raw[off : off + head_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"corrupt container header: {exc}") from exc
    off += head_len
    if header.get("format") != "projpost-draws" or header.get("version") != FORMAT_VERSION:
        raise SchemaError(
            f"unsupported container format {header.get('format')!r} "
            f"version {header.get('version')!r}"
        )
    arrays: dict[str, np.ndarray] = {}
    for spec in header["blocks"]:
        dtype = _DTYPES.get(spec["dtype"])
        if dtype is None:
            raise SchemaError(f"unsupported block dtype {spec['dtype']!r}")
        shape = tuple(int(s) for s in spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * dtype.itemsize
        if len(raw) < off + nbytes:
            raise ParseError(f"truncated container: block {spec['name']!r} incomplete")
        arrays[spec["name"]] = np.frombuffer(
            raw[off : off + nbytes], dtype=dtype
        ).reshape(shape)
        off += nbytes
    needed = {"psi", "sigma_eps", "chain", "iteration", "y", "z", "x"}
    missing = needed - set(arrays)
    if missing:
        raise SchemaError(f"container missing block(s) {sorted(missing)}")
    ds = Dataset(
        y=arrays["y"],
        z=arrays["z"],
        x=arrays["x"],
        control_names=tuple(header["control_names"]),
        centered=bool(header["centered"]),
    )
    draws = PosteriorDraws(
        psi=arrays["psi"],
        sigma_eps=arrays["sigma_eps"],
        provenance=str(header["provenance"]),
        n_chains=int(header["n_chains"]),
    )
    return Artifact(
        dataset=ds,
        draws=draws,
        chain=arrays["chain"],
        iteration=arrays["iteration"],
        meta=dict(header.get("meta", {})),
    )


def draws_csv_header(p: int) -> list[str]:
    return ["tau"] + [f"beta_{j}" for j in range(1, p + 1)] + ["sigma_eps", "chain", "iter"]


def export_draws_csv(path, art: Artifact) -> None:
    """Flat tabular view of the draws: one row per draw, lossless floats."""
    p = art.dataset.p
    frame = pd.DataFrame(art.draws.psi, columns=draws_csv_header(p)[: p + 1])
    frame["sigma_eps"] = art.draws.sigma_eps
    frame["chain"] = art.chain
    frame["iter"] = art.iteration
    frame.to_csv(path, index=False, float_format="%.17g")


def import_draws_csv(path, *, provenance: str, n_chains: int = 1) -> tuple[PosteriorDraws, np.ndarray, np.ndarray]:
    """Reload a draw table written by export_draws_csv.

    Returns the draws plus the chain and iteration labels. The %.17g export
    format makes the float round trip exact.
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ParseError(f"could not parse draw CSV: {exc}") from exc
    cols = list(frame.columns)
    if cols[:1] != ["tau"] or cols[-3:] != ["sigma_eps", "chain", "iter"]:
        raise SchemaError(
            "draw CSV must have columns tau, beta_1..beta_p, sigma_eps, chain, iter; "
            f"got {cols}"
        )
    p = len(cols) - 4
    expected = draws_csv_header(p)
    if cols != expected:
        raise SchemaError(f"draw CSV columns {cols} do not match {expected}")
    psi = frame[expected[: p + 1]].to_numpy(dtype=float)
    draws = PosteriorDraws(
        psi=psi,
        sigma_eps=frame["sigma_eps"].to_numpy(dtype=float),
        provenance=provenance,
        n_chains=n_chains,
    )
    chain = frame["chain"].to_numpy(dtype=np.int32)
    iteration = frame["iter"].to_numpy(dtype=np.int32)
    return draws, chain, iteration
