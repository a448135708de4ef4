"""Command-line front door: fit, project, stepwise, simulate, verify, serve.

Exit codes: 0 success, 1 bad input, 2 numerical failure, 3 configuration
error. Usage mistakes are configuration errors, so argparse's default exit
status is overridden.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pandas as pd

from .analytic import refit_gaussian, refit_sigma, sample_flat_posterior
from .artifact import (
    Artifact,
    default_labels,
    export_draws_csv,
    load_artifact,
    save_artifact,
)
from .data import dataset_to_frame, load_dataset
from .errors import ConfigError, NumericalError, ProjpostError
from .projector import TauSummary, backward_stepwise, build_operator, diff_mean, project_draws, stepwise_to_dict
from .sampler import SamplerConfig, gibbs_ric, ric_to_standard, summarize_draws
from .schemas import load_schema
from .simgen import gen_sim, gen_toy
from .subset_spec import load_subset_spec, resolve_entry
from .analytic import verify_appendix_identities
from .data import ControlSubset

IDENTITY_GATE = 1e-8
NORMAL_Q975 = 1.959963984540054


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; we reserve that for numerical
    failures, so re-raise them as configuration errors instead."""

    def error(self, message):
        raise ConfigError(f"{message}\n(see: {self.format_usage().strip()})")


def _add_dataset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("data", help="CSV file with a header row")
    p.add_argument("--outcome", default="y", help="outcome column (default y)")
    p.add_argument("--exposure", default="z", help="exposure column (default z)")
    p.add_argument(
        "--controls",
        default=None,
        help="comma-separated control columns (default: every other column)",
    )
    p.add_argument(
        "--center",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="subtract column means before fitting (default on)",
    )


def _load_cli_dataset(args):
    if args.controls is not None:
        controls = [c.strip() for c in args.controls.split(",") if c.strip()]
    else:
        try:
            header = list(pd.read_csv(args.data, nrows=0).columns)
        except Exception as exc:
            raise ConfigError(f"could not read header of {args.data}: {exc}") from exc
        controls = [c for c in header if c not in (args.outcome, args.exposure)]
    return load_dataset(
        args.data,
        outcome_col=args.outcome,
        exposure_col=args.exposure,
        control_cols=controls,
        center=args.center,
    )


def _validate_json(doc, schema_name: str) -> None:
    jsonschema.validate(doc, load_schema(schema_name))


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _print_coef_table(names, summ) -> None:
    head = f"{'coefficient':<14}{'mean':>10}{'sd':>10}{'2.5%':>10}{'50%':>10}{'97.5%':>10}{'ess':>9}{'rhat':>8}"
    print(head)
    print("-" * len(head))
    for j, name in enumerate(names):
        rhat = summ.rhat[j]
        rhat_s = f"{rhat:8.3f}" if math.isfinite(rhat) else f"{'--':>8}"
        print(
            f"{name:<14}{summ.mean[j]:>10.4f}{summ.sd[j]:>10.4f}"
            f"{summ.q025[j]:>10.4f}{summ.q500[j]:>10.4f}{summ.q975[j]:>10.4f}"
            f"{summ.ess[j]:>9.0f}{rhat_s}"
        )


def _cmd_fit(args) -> int:
    ds = _load_cli_dataset(args)
    if args.model == "flat":
        if args.iters is not None or args.burn is not None or args.chains is not None:
            raise ConfigError("--iters/--burn/--chains apply only to --model hs-ric")
        if args.sigma is None and not args.sample_sigma:
            raise ConfigError(
                "--model flat needs a noise scale: pass --sigma VALUE or --sample-sigma"
            )
        if args.sigma is not None and args.sample_sigma:
            raise ConfigError("pass either --sigma or --sample-sigma, not both")
        draws = sample_flat_posterior(ds, args.draws, args.seed, sigma_eps=args.sigma)
        chain, iteration = default_labels(draws)
        meta = {
            "model": "flat",
            "seed": args.seed,
            "sigma": args.sigma,
            "sample_sigma": bool(args.sample_sigma),
            "draws": args.draws,
            "centered": args.center,
            "outcome": args.outcome,
            "exposure": args.exposure,
        }
    else:
        if args.sigma is not None or args.sample_sigma:
            raise ConfigError("--sigma/--sample-sigma apply only to --model flat")
        unpenalized = tuple(
            c.strip() for c in (args.unpenalized or "").split(",") if c.strip()
        )
        cfg = SamplerConfig(
            n_iter=args.iters if args.iters is not None else 2500,
            n_burn=args.burn if args.burn is not None else 1000,
            thin=args.thin,
            seed=args.seed,
            chains=args.chains if args.chains is not None else 4,
            unpenalized_cols=unpenalized,
        )
        ric = gibbs_ric(ds, cfg)
        draws = ric_to_standard(ric)
        kept = cfg.kept_per_chain
        chain = np.repeat(np.arange(cfg.chains, dtype=np.int32), kept)
        iteration = np.tile(
            (cfg.n_burn + cfg.thin * np.arange(kept)).astype(np.int32), cfg.chains
        )
        meta = {
            "model": "hs-ric",
            "seed": cfg.seed,
            "iters": cfg.n_iter,
            "burn": cfg.n_burn,
            "thin": cfg.thin,
            "chains": cfg.chains,
            "unpenalized": list(cfg.unpenalized_cols),
            "centered": args.center,
            "outcome": args.outcome,
            "exposure": args.exposure,
        }
    art = Artifact(dataset=ds, draws=draws, chain=chain, iteration=iteration, meta=meta)
    save_artifact(args.out, art)
    if args.export_csv:
        export_draws_csv(args.export_csv, art)

    summ = summarize_draws(draws)
    names = ["tau"] + list(ds.control_names)
    coefficients = []
    for j, name in enumerate(names):
        rhat = float(summ.rhat[j])
        coefficients.append(
            {
                "name": name,
                "mean": float(summ.mean[j]),
                "sd": float(summ.sd[j]),
                "q025": float(summ.q025[j]),
                "q500": float(summ.q500[j]),
                "q975": float(summ.q975[j]),
                "ess": float(summ.ess[j]),
                "rhat": rhat if math.isfinite(rhat) else None,
            }
        )
    doc = {
        "model": args.model,
        "n": ds.n,
        "p": ds.p,
        "draw_count": draws.s,
        "seed": args.seed,
        "control_names": list(ds.control_names),
        "coefficients": coefficients,
    }
    _validate_json(doc, "fit_summary")
    _write_json(str(args.out) + ".summary.json", doc)
    _print_coef_table(names, summ)
    print(f"\nwrote {args.out} ({draws.s} draws) and {args.out}.summary.json")
    return 0


def _cmd_project(args) -> int:
    art = load_artifact(args.artifact)
    ds, draws = art.dataset, art.draws
    spec = load_subset_spec(args.subsets)
    orig_tau = draws.tau
    if args.dump_draws:
        Path(args.dump_draws).mkdir(parents=True, exist_ok=True)
    rows = []
    for idx, entry in enumerate(spec.entries):
        subset = resolve_entry(entry, ds.control_names)
        op = build_operator(ds, subset)
        proj = project_draws(draws, op)
        summ = TauSummary.from_draws(proj.tau)
        row = {
            "label": entry.label,
            "q": subset.q,
            "include": list(subset.names(ds.control_names)),
            "tau_mean": summ.mean,
            "tau_sd": summ.sd,
            "tau_q025": summ.q025,
            "tau_q975": summ.q975,
            "d_mean": diff_mean(orig_tau, proj.tau),
        }
        if args.compare_refit:
            sig = refit_sigma(ds, subset)
            refit = refit_gaussian(ds, subset, sig)
            sd = float(np.sqrt(refit.tau_var))
            row.update(
                {
                    "refit_sigma": sig,
                    "refit_tau_mean": refit.tau_mean,
                    "refit_tau_sd": sd,
                    "refit_tau_q025": refit.tau_mean - NORMAL_Q975 * sd,
                    "refit_tau_q975": refit.tau_mean + NORMAL_Q975 * sd,
                }
            )
        if args.dump_draws:
            safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in entry.label)
            out = Path(args.dump_draws) / f"{idx:02d}_{safe}.csv"
            pd.DataFrame({"tau": proj.tau}).to_csv(
                out, index=False, float_format="%.17g"
            )
        rows.append(row)
    doc = {"rows": rows}
    _validate_json(doc, "project_result")
    if args.out:
        _write_json(args.out, doc)

    head = f"{'label':<24}{'q':>4}{'mean':>10}{'sd':>10}{'2.5%':>10}{'97.5%':>10}{'d_mean':>12}"
    if args.compare_refit:
        head += f"{'refit sd':>10}"
    print(head)
    print("-" * len(head))
    for row in rows:
        line = (
            f"{row['label']:<24}{row['q']:>4}{row['tau_mean']:>10.4f}"
            f"{row['tau_sd']:>10.4f}{row['tau_q025']:>10.4f}{row['tau_q975']:>10.4f}"
            f"{row['d_mean']:>12.3e}"
        )
        if args.compare_refit:
            line += f"{row['refit_tau_sd']:>10.4f}"
        print(line)
    return 0


def _cmd_stepwise(args) -> int:
    if args.metric != "d_M":
        raise ConfigError(f'only the "d_M" metric is available, got {args.metric!r}')
    art = load_artifact(args.artifact)
    ds, draws = art.dataset, art.draws
    path = backward_stepwise(
        ds,
        draws,
        keep=args.keep,
        stop_threshold=args.stop_when,
    )
    doc = stepwise_to_dict(path, ds.control_names)
    _validate_json(doc, "stepwise_response")
    if args.out:
        _write_json(args.out, doc)
    if args.plot_csv:
        with open(args.plot_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write("step,removed,d_value,tau_mean,tau_lo,tau_hi\n")
            for step in doc["steps"]:
                fh.write(
                    f"{step['step']},{step['removed']},{step['d_value']:.17g},"
                    f"{step['tau_mean']:.17g},{step['tau_q025']:.17g},"
                    f"{step['tau_q975']:.17g}\n"
                )
    head = f"{'step':>4}  {'removed':<14}{'d_value':>12}{'tau_mean':>10}{'2.5%':>10}{'97.5%':>10}"
    print(head)
    print("-" * len(head))
    for step in doc["steps"]:
        print(
            f"{step['step']:>4}  {step['removed']:<14}{step['d_value']:>12.3e}"
            f"{step['tau_mean']:>10.4f}{step['tau_q025']:>10.4f}{step['tau_q975']:>10.4f}"
        )
    return 0


def _cmd_simulate(args) -> int:
    if args.kind == "toy":
        ds, _ = gen_toy(args.seed, n=args.n)
    else:
        ds, _ = gen_sim(args.seed, n=args.n)
    frame = dataset_to_frame(ds)
    frame.to_csv(args.out, index=False, float_format="%.17g")
    print(f"wrote {ds.n} rows x {ds.p + 2} columns to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    ds = _load_cli_dataset(args)
    if args.exclude:
        mask = np.ones(ds.p, dtype=bool)
        for name in args.exclude:
            if name not in ds.control_names:
                raise ConfigError(f"--exclude names unknown control {name!r}")
            mask[ds.control_names.index(name)] = False
        phi = ControlSubset(mask)
    elif ds.p:
        phi = ControlSubset.drop_one(ds.p, ds.p - 1)
    else:
        phi = ControlSubset.none(0)
    report = verify_appendix_identities(ds, phi)

    ridge_keys = sorted(k for k in report if k.startswith("sherman_morrison_ridge_"))
    failures = [
        k for k, v in report.items() if k not in ridge_keys and v > IDENTITY_GATE
    ]
    if len(ridge_keys) == 2 and not report[ridge_keys[1]] < report[ridge_keys[0]]:
        # keys sort ascending by ridge size: 1e-06 before 1e-04
        failures.append("sherman_morrison_ridge_decreasing")
    for key in sorted(report):
        if key in ridge_keys:
            print(f"INFO {key:<38} {report[key]:.3e} (judged by decrease)")
        else:
            status = "FAIL" if key in failures else "PASS"
            print(f"{status} {key:<38} {report[key]:.3e} (gate {IDENTITY_GATE:g})")
    decreasing = "sherman_morrison_ridge_decreasing" not in failures
    print(
        f"{'PASS' if decreasing else 'FAIL'} sherman_morrison_ridge_decreasing"
        f"{'':<10} smaller ridge gives smaller error"
    )
    doc = {"identities": report, "gate": IDENTITY_GATE, "failures": failures}
    _validate_json(doc, "verify_report")
    if args.out:
        _write_json(args.out, doc)
    if failures:
        raise NumericalError(f"identity check failed: {failures}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    art = load_artifact(args.artifact)
    ui_dir = args.ui_dir or os.environ.get("PROJPOST_UI_DIR")
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        ui_dir = str(default_ui) if default_ui.is_dir() else None
    app = build_app(art, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="projpost", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    fit = sub.add_parser("fit", help="fit a posterior and write a draw artifact")
    _add_dataset_flags(fit)
    fit.add_argument("--model", choices=("flat", "hs-ric"), required=True)
    fit.add_argument("--sigma", type=float, default=None, help="known noise scale (flat)")
    fit.add_argument(
        "--sample-sigma",
        action="store_true",
        help="sample the noise scale instead of fixing it (flat)",
    )
    fit.add_argument("--draws", type=int, default=4000, help="flat-model draw count")
    fit.add_argument("--iters", type=int, default=None, help="Gibbs iterations (hs-ric)")
    fit.add_argument("--burn", type=int, default=None, help="burn-in iterations (hs-ric)")
    fit.add_argument("--thin", type=int, default=1, help="thinning stride (hs-ric)")
    fit.add_argument("--chains", type=int, default=None, help="chain count (hs-ric)")
    fit.add_argument(
        "--unpenalized",
        default=None,
        help="comma-separated controls exempt from shrinkage (hs-ric)",
    )
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("-o", "--out", required=True, help="artifact output path")
    fit.add_argument(
        "--export-csv", default=None, help="also write draws as a flat CSV table"
    )
    fit.set_defaults(func=_cmd_fit)

    project = sub.add_parser("project", help="project an artifact onto named subsets")
    project.add_argument("artifact")
    project.add_argument("--subsets", required=True, help="subset spec JSON file")
    project.add_argument("--compare-refit", action="store_true")
    project.add_argument("--dump-draws", default=None, help="directory for draw dumps")
    project.add_argument("-o", "--out", default=None, help="result JSON path")
    project.set_defaults(func=_cmd_project)

    step = sub.add_parser("stepwise", help="run the backward elimination path")
    step.add_argument("artifact")
    step.add_argument("--metric", default="d_M")
    step.add_argument("--keep", type=int, default=0, help="stop with this many controls left")
    step.add_argument(
        "--stop-when",
        type=float,
        default=None,
        metavar="T",
        help="halt before recording a step whose distance exceeds T",
    )
    step.add_argument("-o", "--out", default=None, help="path JSON output")
    step.add_argument("--plot-csv", default=None, help="plot-data CSV output")
    step.set_defaults(func=_cmd_stepwise)

    sim = sub.add_parser("simulate", help="write a synthetic dataset")
    sim.add_argument("kind", choices=("toy", "wang"))
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--n", type=int, default=1000)
    sim.add_argument("--out", required=True, help="CSV output path")
    sim.set_defaults(func=_cmd_simulate)

    verify = sub.add_parser(
        "verify", help="check the block-inverse identities on a dataset"
    )
    _add_dataset_flags(verify)
    verify.add_argument(
        "--exclude",
        action="append",
        default=None,
        help="control to exclude (repeatable; default: the last control)",
    )
    verify.add_argument("-o", "--out", default=None, help="report JSON path")
    verify.set_defaults(func=_cmd_verify)

    serve = sub.add_parser("serve", help="serve an artifact over HTTP")
    serve.add_argument("artifact")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8787)
    serve.add_argument("--ui-dir", default=None, help="static UI directory")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ProjpostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
