"""Command-line front end.

Subcommands: ``histogram`` (link-smoother replicates under one or both
designs), ``decompose`` (nested bias/variance decomposition), ``ratestudy``
(decay-exponent sweep over n), ``conventional`` (single-node smoother
contrast), and ``selftest``.

Configuration precedence is flags > config file > defaults. The config file
is INI-style with sections [design], [model], [smoother], [run]; every key
matches the long flag of the same name. All randomness flows from --seed, so
a rerun with identical flags is byte-identical regardless of --threads.
"""

from __future__ import annotations

import argparse
import configparser
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .design import DesignSpec
from .kernels import get_kernel
from .models import ConstantMean, IdentityMean, get_model
from .montecarlo import (
    ConventionalConfig,
    ExperimentConfig,
    run_conventional_comparison,
    run_decomposition,
    run_histogram,
    shared_histogram,
)
from .output import SCHEMA_VERSION, RunManifest, write_csv, write_json
from .rates import RATE_STATISTICS, Schedule, bandwidth, regularization_for, run_rate_study
from .selftest import run_selftest
from .smoother import audit_bandwidth


class UsageError(ValueError):
    """Configuration or precondition problem; exits with status 2."""


# dest -> (config section, type caster, default)
_SETTINGS = {
    "design": ("design", str, "fixed"),
    "n": ("design", int, 500),
    "dim": ("design", int, 1),
    "link": ("model", str, "product"),
    "law": ("model", str, "bernoulli"),
    "beta": ("model", float, 1.0),
    "big_l": ("model", float, 1.0),
    "sigma": ("model", float, 1.0),
    "sigma_u": ("model", float, 1.0),
    "sigma_v": ("model", float, 1.0),
    "constant": ("model", float, 0.25),
    "kernel": ("smoother", str, "boxcar"),
    "s": ("smoother", float, 3.0),
    "h": ("smoother", float, None),
    "lambda_rule": ("smoother", str, None),
    "lambda_value": ("smoother", float, None),
    "nu": ("smoother", float, 2.0),
    "query": ("run", str, None),
    "reps": ("run", int, 1000),
    "rx": ("run", int, None),
    "ry": ("run", int, None),
    "ns": ("run", str, "100,200,400,800"),
    "seed": ("run", int, 0),
    "threads": ("run", int, None),
    "bins": ("run", str, "fd"),
    "out": ("run", str, "."),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None, help="INI config file")
    p.add_argument("--design", choices=["fixed", "random", "both"])
    p.add_argument("--n", type=int, help="number of nodes")
    p.add_argument("--dim", type=int, help="covariate dimension d")
    p.add_argument("--link", choices=["product", "constant"])
    p.add_argument("--law", choices=["bernoulli", "gaussian", "node-effect"])
    p.add_argument("--beta", type=float, help="true smoothness exponent")
    p.add_argument("--big-l", dest="big_l", type=float, help="smoothness constant L")
    p.add_argument("--sigma", type=float)
    p.add_argument("--sigma-u", dest="sigma_u", type=float)
    p.add_argument("--sigma-v", dest="sigma_v", type=float)
    p.add_argument("--constant", type=float, help="constant link value")
    p.add_argument("--kernel", choices=["boxcar", "epanechnikov"])
    p.add_argument("--s", type=float, help="assumed smoothness in h = n^(-1/(s+d))")
    p.add_argument("--h", type=float, help="explicit bandwidth override")
    p.add_argument("--lambda-rule", dest="lambda_rule",
                   choices=["inverse-n", "inverse-sqrt-n", "fixed"])
    p.add_argument("--lambda-value", dest="lambda_value", type=float)
    p.add_argument("--nu", type=float, help="exponent in the schedule audit")
    p.add_argument("--query", type=str, help="comma-separated query coordinates")
    p.add_argument("--seed", type=int, help="master seed (only entropy source)")
    p.add_argument("--threads", type=int, help="parallel workers (env LINKSMOOTH_THREADS)")
    p.add_argument("--bins", type=str, help="histogram bins: 'fd' or an integer")
    p.add_argument("--out", type=str, help="output directory")


def _load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path:
        if not Path(path).is_file():
            raise UsageError(f"config file not found: {path}")
        cp.read(path)
    return cp

def _resolve(args: argparse.Namespace, cp: configparser.ConfigParser) -> dict:
    out = {}
    for dest, (section, caster, default) in _SETTINGS.items():
        flag = getattr(args, dest, None)
        if flag is not None:
            out[dest] = flag
        elif cp.has_option(section, dest):
            raw = cp.get(section, dest)
            out[dest] = caster(raw) if caster is not None else raw
        else:
            out[dest] = default
    return out


def _parse_bins(raw: str):
    try:
        return int(raw)
    except ValueError:
        return raw


def _parse_query(raw: str | None, count: int, default: float = 0.5) -> np.ndarray:
    if raw is None:
        return np.full(count, default)
    try:
        vals = np.array([float(tok) for tok in raw.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"could not parse query {raw!r}") from exc
    if vals.shape[0] != count:
        raise UsageError(f"query must have {count} comma-separated coordinates, got {vals.shape[0]}")
    return vals


def _parse_ns(raw: str) -> list[int]:
    try:
        return [int(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"could not parse --ns {raw!r}") from exc


def _design_specs(settings: dict) -> list[DesignSpec]:
    if settings["n"] < 2:
        raise UsageError("n must be >= 2")
    kinds = ["fixed", "random"] if settings["design"] == "both" else [settings["design"]]
    return [DesignSpec(kind=k, n=settings["n"], dim=settings["dim"]) for k in kinds]


def _model_from(settings: dict):
    return get_model(
        link=settings["link"],
        law=settings["law"],
        beta=settings["beta"],
        L=settings["big_l"],
        sigma=settings["sigma"],
        sigma_u=settings["sigma_u"],
        sigma_v=settings["sigma_v"],
        constant=settings["constant"],
    )


def _schedule_from(settings: dict, default_rule: str) -> Schedule:
    rule = settings["lambda_rule"] or default_rule
    return Schedule(s=settings["s"], lambda_rule=rule,
                    lambda_value=settings["lambda_value"], nu=settings["nu"])


def _h_lambda(settings: dict, schedule: Schedule, n: int, d: int) -> tuple[float, float]:
    h = settings["h"] if settings["h"] is not None else bandwidth(n, schedule.s, d)
    lam = regularization_for(schedule, n)
    return h, lam


def _manifest(command: str, settings: dict, extra: dict | None = None) -> RunManifest:
    # threads and the output directory do not influence the computed values,
    # so they stay out of the echo to keep reruns byte-identical
    echo = {k: v for k, v in sorted(settings.items()) if k not in ("out", "threads")}
    if extra:
        echo.update(extra)
    return RunManifest(command=command, config_echo=echo,
                       master_seed=settings["seed"], tool_version=__version__)


def _warn_audit(flags, where: str) -> None:
    for flag in flags:
        print(f"warning [{where}]: {flag}", file=sys.stderr)


def cmd_histogram(args: argparse.Namespace) -> int:
    settings = _resolve(args, _load_config(args.config))
    specs = _design_specs(settings)
    model = _model_from(settings)
    schedule = _schedule_from(settings, "inverse-n")
    n, d = settings["n"], settings["dim"]
    h, lam = _h_lambda(settings, schedule, n, d)
    query = _parse_query(settings["query"], 2 * d)
    kernel = get_kernel(settings["kernel"], dim=d)
    audit = audit_bandwidth(n, d, h, lam, schedule.nu)
    _warn_audit(audit, "histogram")
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    runs = {}
    for spec in specs:
        cfg = ExperimentConfig(
            design=spec, model=model, kernel=kernel, h=h, lambda_n=lam,
            query=(query[:d], query[d:]),
            r_covariates=1 if spec.kind == "fixed" else settings["reps"],
            r_outcomes=settings["reps"] if spec.kind == "fixed" else 1,
            master_seed=settings["seed"], bins=_parse_bins(settings["bins"]),
        )
        runs[spec.kind] = run_histogram(cfg, settings["threads"])
    edges, counts = shared_histogram([runs[k].values for k in runs],
                                     _parse_bins(settings["bins"]))
    summary_designs = {}
    for kind, counts_k in zip(runs, counts):
        run = runs[kind]
        write_csv(out_dir / f"values_{kind}.csv",
                  ["i_x", "i_y", "f_hat", "s_nh", "t_nh"],
                  zip(run.i_x, run.i_y, run.values, run.s_nh, run.t_nh))
        write_csv(out_dir / f"histogram_{kind}.csv",
                  ["bin_left", "bin_right", "count"],
                  zip(edges[:-1], edges[1:], counts_k))
        summary_designs[kind] = {
            "count": int(run.values.shape[0]),
            "mean": float(np.mean(run.values)),
            "variance": float(np.var(run.values, ddof=1)) if run.values.size > 1 else 0.0,
        }
    summary = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest("histogram", settings, {"h": h, "lambda": lam}).to_json_dict(),
        "query": query.tolist(),
        "truth": next(iter(runs.values())).truth,
        "n": n,
        "h": h,
        "lambda": lam,
        "s": settings["s"],
        "designs": summary_designs,
        "schedule_audit": list(audit),
    }
    if len(runs) == 2:
        summary["variance_ratio_random_over_fixed"] = (
            summary_designs["random"]["variance"] / summary_designs["fixed"]["variance"]
        )
    write_json(out_dir / "summary.json", summary)
    return 0


def cmd_decompose(args: argparse.Namespace) -> int:
    settings = _resolve(args, _load_config(args.config))
    if settings["design"] == "both":
        raise UsageError("decompose runs one design at a time")
    specs = _design_specs(settings)
    spec = specs[0]
    model = _model_from(settings)
    schedule = _schedule_from(settings, "inverse-n")
    n, d = settings["n"], settings["dim"]
    h, lam = _h_lambda(settings, schedule, n, d)
    query = _parse_query(settings["query"], 2 * d)
    kernel = get_kernel(settings["kernel"], dim=d)
    rx = settings["rx"] if settings["rx"] is not None else (1 if spec.kind == "fixed" else 100)
    ry = settings["ry"] if settings["ry"] is not None else 100
    if spec.kind == "random" and rx < 2:
        raise UsageError("rho3 requires rx >= 2 under the random design")
    if ry < 2:
        raise UsageError("rho2 requires ry >= 2")
    audit = audit_bandwidth(n, d, h, lam, schedule.nu)
    _warn_audit(audit, "decompose")
    cfg = ExperimentConfig(
        design=spec, model=model, kernel=kernel, h=h, lambda_n=lam,
        query=(query[:d], query[d:]), r_covariates=rx, r_outcomes=ry,
        master_seed=settings["seed"], bins=_parse_bins(settings["bins"]),
    )
    est = run_decomposition(cfg, settings["threads"])
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest("decompose", settings, {"h": h, "lambda": lam}).to_json_dict(),
        "design": spec.kind,
        "n": n,
        "h": h,
        "lambda": lam,
        "query": query.tolist(),
        "truth": est.truth,
        "rho1_hat": est.rho1_hat,
        "rho2_hat": est.rho2_hat,
        "rho3_hat": est.rho3_hat,
        "rho3_corrected": est.rho3_corrected,
        "rho3_exact": est.rho3_exact,
        "total_variance": est.total_variance,
        "risk_hat": est.risk_hat,
        "mean_value": est.mean_value,
        "t_bar_hat": est.t_bar_hat,
        "epsilon_hat_max_abs": est.epsilon_hat_max_abs,
        "law_of_total_variance_gap": est.law_of_total_variance_gap(),
        "n_effective": {"covariate_draws": est.r_covariates,
                        "outcome_draws": est.r_outcomes,
                        "total": est.n_effective},
        "histogram": {"edges": est.edges.tolist(), "counts": est.counts.tolist()},
        "schedule_audit": list(audit),
    }
    write_json(out_dir / "decomposition.json", payload)
    return 0


def cmd_ratestudy(args: argparse.Namespace) -> int:
    settings = _resolve(args, _load_config(args.config))
    ns = _parse_ns(settings["ns"])
    if len(ns) < 3:
        raise UsageError("need >= 3 sample sizes (--ns)")
    specs = _design_specs(settings)
    model = _model_from(settings)
    schedule = _schedule_from(settings, "inverse-n")
    d = settings["dim"]
    query = _parse_query(settings["query"], 2 * d)
    kernel = get_kernel(settings["kernel"], dim=d)
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    fits_payload = {}
    audits_payload = {}
    for spec in specs:
        rx = settings["rx"] if settings["rx"] is not None else (1 if spec.kind == "fixed" else 1000)
        ry = settings["ry"] if settings["ry"] is not None else (2000 if spec.kind == "fixed" else 2)
        base = ExperimentConfig(
            design=spec, model=model, kernel=kernel, h=0.5, lambda_n=0.0,
            query=(query[:d], query[d:]), r_covariates=rx, r_outcomes=ry,
            master_seed=settings["seed"], bins=_parse_bins(settings["bins"]),
        )
        sink = lambda n, h, lam, stat, value, kind=spec.kind: rows.append(
            (kind, n, h, lam, stat, value))
        study = run_rate_study(base, schedule, ns, settings["threads"], row_sink=sink)
        # flush partial rows as soon as each design finishes
        write_csv(out_dir / "rates.csv",
                  ["design", "n", "h", "lambda", "statistic", "value"], rows)
        fits_payload[spec.kind] = {
            stat: {
                "ns": fit.ns,
                "values": fit.values,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "predicted": fit.predicted,
            }
            for stat, fit in study.fits.items()
        }
        audits_payload[spec.kind] = study.audits
    payload = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest("ratestudy", settings, {"ns": ns}).to_json_dict(),
        "statistics": list(RATE_STATISTICS),
        "s": schedule.s,
        "beta": settings["beta"],
        "dim": d,
        "fits": fits_payload,
        "schedule_audit": audits_payload,
    }
    write_json(out_dir / "ratefit.json", payload)
    return 0


def cmd_conventional(args: argparse.Namespace) -> int:
    cp = _load_config(args.config)
    settings = _resolve(args, cp)
    if settings["dim"] != 1:
        raise UsageError("the conventional contrast is univariate; use --dim 1")
    if settings["n"] < 2:
        raise UsageError("n must be >= 2")
    # this experiment defaults to n=5000 covariates; honor explicit values
    n_given = args.n is not None or cp.has_option("design", "n")
    n = settings["n"] if n_given else 5000
    schedule = _schedule_from(settings, "inverse-sqrt-n")
    h = settings["h"] if settings["h"] is not None else bandwidth(n, schedule.s, 1)
    lam = regularization_for(schedule, n)
    query = _parse_query(settings["query"], 1)
    kernel = get_kernel(settings["kernel"], dim=1)
    mean_fn = IdentityMean() if settings["link"] == "product" else ConstantMean(settings["constant"])
    law = settings["law"]
    if law not in ("bernoulli", "gaussian"):
        raise UsageError("conventional supports --law bernoulli or gaussian")
    audit = audit_bandwidth(n, 1, h, lam, schedule.nu)
    _warn_audit(audit, "conventional")
    cfg = ConventionalConfig(
        design=DesignSpec(kind="fixed", n=n, dim=1),
        mean_fn=mean_fn, law=law, sigma=settings["sigma"], kernel=kernel,
        h=h, lambda_n=lam, query=float(query[0]), replicates=settings["reps"],
        master_seed=settings["seed"], bins=_parse_bins(settings["bins"]),
    )
    comp = run_conventional_comparison(cfg, settings["threads"])
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    for kind, values, counts in (("fixed", comp.values_fixed, comp.counts_fixed),
                                 ("random", comp.values_random, comp.counts_random)):
        write_csv(out_dir / f"values_{kind}.csv", ["replicate", "f_hat"],
                  zip(range(values.shape[0]), values))
        write_csv(out_dir / f"histogram_{kind}.csv", ["bin_left", "bin_right", "count"],
                  zip(comp.edges[:-1], comp.edges[1:], counts))
    summary = {
        "schema_version": SCHEMA_VERSION,
        "manifest": _manifest("conventional", settings, {"h": h, "lambda": lam, "n": n}).to_json_dict(),
        "query": [float(query[0])],
        "truth": comp.truth,
        "n": n,
        "h": h,
        "lambda": lam,
        "s": settings["s"],
        "designs": {
            "fixed": {"count": int(comp.values_fixed.shape[0]),
                      "mean": float(np.mean(comp.values_fixed)),
                      "variance": float(np.var(comp.values_fixed, ddof=1))},
            "random": {"count": int(comp.values_random.shape[0]),
                       "mean": float(np.mean(comp.values_random)),
                       "variance": float(np.var(comp.values_random, ddof=1))},
        },
        "variance_ratio_random_over_fixed": comp.variance_ratio,
        "schedule_audit": list(audit),
    }
    write_json(out_dir / "summary.json", summary)
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    return 0 if run_selftest() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linksmooth",
        description="Kernel smoothing for link regression with design-contrast experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_hist = sub.add_parser("histogram", help="replicate the link smoother at a query")
    _add_common(p_hist)
    p_hist.add_argument("--reps", type=int, help="replicates per design")
    p_hist.set_defaults(func=cmd_histogram)

    p_dec = sub.add_parser("decompose", help="nested bias/variance decomposition")
    _add_common(p_dec)
    p_dec.add_argument("--rx", type=int, help="covariate draws (outer loop)")
    p_dec.add_argument("--ry", type=int, help="outcome draws per covariate draw")
    p_dec.set_defaults(func=cmd_decompose)

    p_rate = sub.add_parser("ratestudy", help="decay-exponent sweep over n")
    _add_common(p_rate)
    p_rate.add_argument("--ns", type=str, help="comma-separated sample sizes")
    p_rate.add_argument("--rx", type=int)
    p_rate.add_argument("--ry", type=int)
    p_rate.set_defaults(func=cmd_ratestudy)

    p_conv = sub.add_parser("conventional", help="single-node smoother design contrast")
    _add_common(p_conv)
    p_conv.add_argument("--reps", type=int, help="replicates per design")
    p_conv.set_defaults(func=cmd_conventional)

    p_self = sub.add_parser("selftest", help="run the built-in invariant checks")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - started
    print(f"wall_time_seconds={elapsed:.3f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
