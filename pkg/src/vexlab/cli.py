"""Command-line entry point.

One process, batch computations only. Subcommands read a flat config
file, print a JSON report (with the resolved config embedded) to stdout
and communicate the verdict through the exit code:

    0  holds / ok          1  fails / falsified
    2  inconclusive        3  input error

CSV series go to the path named in ``[output] csv`` or ``--csv``.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import conditions, experiments
from .config import ConfigError, RunConfig, load_config
from .conditions import (NoAdmissibleKappa, PreconditionError,
                         check_embedding, check_finite_measure,
                         check_lerner, check_touching, construct_omega,
                         defect_exponent, defect_integral_estimate)
from .dsl import EvalError, ParseError, parse, to_source
from .experiments import (ConditionsNotMet, FalsifyBudgetError,
                          estimate_constants, falsify, fourier_check,
                          reproduce_example)
from .grid import ExponentField, GridError, sample
from .maximal import maximal_fast, maximal_oracle
from .modular import luxemburg_norm, modular
from .reporting import flatten_report, report_json, write_csv

_VERDICT_EXIT = {"holds": 0, "convergent": 0, "fails": 1, "divergent": 1,
                 "inconclusive": 2}


def _emit(command: str, config: dict, result: dict) -> None:
    print(report_json({"command": command, "config": config, "result": result}))


def _expr_field(cfg: RunConfig, key: str):
    return parse(cfg.get("functions", key))


def _exponent(cfg: RunConfig, key: str, dom) -> ExponentField:
    return ExponentField.from_function(sample(_expr_field(cfg, key), dom))


def _csv_path(cfg: RunConfig, args) -> str | None:
    if getattr(args, "csv", None):
        return args.csv
    if cfg.has("output", "csv"):
        return cfg.get("output", "csv")
    return None


# --------------------------------------------------------------------------
# subcommand handlers
# --------------------------------------------------------------------------

def _cmd_parse_check(args) -> int:
    if args.expr is not None:
        sources = {"expr": args.expr}
        config = {"expr": args.expr}
    else:
        cfg = load_config(args.config)
        sources = {k: cfg.get("functions", k)
                   for k in ("p", "q", "f") if cfg.has("functions", k)}
        config = cfg.to_dict()
    result = {key: {"source": src, "canonical": to_source(parse(src))}
              for key, src in sources.items()}
    _emit("parse-check", config, result)
    return 0


def _cmd_modular(args) -> int:
    cfg = load_config(args.config)
    dom = cfg.domain()
    f = sample(_expr_field(cfg, "f"), dom)
    p = _exponent(cfg, "p", dom)
    mv = modular(f, p, dom)
    _emit("modular", cfg.to_dict(),
          {"value": mv.value, "overflow": mv.overflow, "h": dom.h,
           "measure": mv.measure})
    return 0


def _cmd_norm(args) -> int:
    cfg = load_config(args.config)
    dom = cfg.domain()
    f = sample(_expr_field(cfg, "f"), dom)
    p = _exponent(cfg, "p", dom)
    rtol = cfg.get_float("norm", "rtol", 1e-9) if cfg.has("norm") else 1e-9
    value = luxemburg_norm(f, p, dom, rtol=rtol)
    _emit("norm", cfg.to_dict(),
          {"value": value, "rtol": rtol, "h": dom.h, "measure": dom.measure})
    return 0


def _cmd_maxop(args) -> int:
    cfg = load_config(args.config)
    dom = cfg.domain()
    f = sample(_expr_field(cfg, "f"), dom)
    res = maximal_fast(f)
    path = _csv_path(cfg, args)
    if path:
        centers = dom.center_arrays()
        rows = [["center"] * dom.dim + ["f", "Mf", "win_start", "win_len"]]
        idx = np.argwhere(dom.mask)
        for cell in idx:
            cell = tuple(cell)
            rows.append(
                [float(c[cell]) for c in centers]
                + [float(f.values[cell]), float(res.mf.values[cell]),
                   int(res.win_start[(slice(None),) + cell][0]),
                   int(res.win_len[cell])])
        write_csv(path, rows)
    _emit("maxop", cfg.to_dict(),
          {"max_of_Mf": res.mf.max_abs(), "cells": dom.nactive,
           "csv": path or ""})
    return 0


def _cmd_check(args) -> int:
    cfg = load_config(args.config)
    condition = cfg.get("check", "condition")
    if condition == "finite":
        dom = cfg.domain()
        rep = check_finite_measure(_exponent(cfg, "p", dom),
                                   _exponent(cfg, "q", dom), dom)
    elif condition == "lerner":
        dom = cfg.domain()
        rep = check_lerner(_exponent(cfg, "p", dom), dom)
    elif condition in ("touching", "embedding", "defect"):
        sched = cfg.schedule()
        p = _exponent(cfg, "p", sched.domain)
        q = _exponent(cfg, "q", sched.domain)
        if condition == "touching":
            rep = check_touching(p, q, sched)
        elif condition == "embedding":
            rep = check_embedding(p, q, sched)
        else:
            lam = cfg.get_float("check", "lambda", 2.0)
            rep = defect_integral_estimate(defect_exponent(p, q), lam, sched)
    else:
        raise ConfigError(f"unknown [check] condition {condition!r}")
    path = _csv_path(cfg, args)
    if path:
        write_csv(path, [["radius", "quantity"]] + [list(r) for r in rep.evidence])
    _emit("check", cfg.to_dict(), rep.to_dict())
    return _VERDICT_EXIT[rep.verdict]


def _cmd_omega(args) -> int:
    cfg = load_config(args.config)
    sched = cfg.schedule()
    p = _exponent(cfg, "p", sched.domain)
    q = _exponent(cfg, "q", sched.domain)
    lam = cfg.get_float("omega", "lambda", 2.0) if cfg.has("omega") else 2.0
    try:
        cert = construct_omega(p, q, lam, sched)
    except (NoAdmissibleKappa, PreconditionError) as exc:
        _emit("omega", cfg.to_dict(), {"certificate": None, "error": str(exc)})
        return 1
    checks = cert.verify()
    _emit("omega", cfg.to_dict(), {
        "kappa": cert.kappa, "lambda": cert.lam, "p_plus": cert.p_plus,
        "sup_p": cert.sup_p, "sup_q": cert.sup_q,
        "modular_partials": list(cert.modular_partials),
        "e_measure_partials": list(cert.e_measure_partials),
        "checks": checks, "notes": list(cert.notes),
    })
    return 0 if all(checks.values()) else 1


def _cmd_falsify(args) -> int:
    cfg = load_config(args.config)
    dom = cfg.domain()
    p = _exponent(cfg, "p", dom)
    q = _exponent(cfg, "q", dom)
    budget = cfg.get_int("falsify", "budget", 21) if cfg.has("falsify") else 21
    threshold = cfg.get_float("falsify", "threshold", 1e3) if cfg.has("falsify") else 1e3
    try:
        witness = falsify(p, q, dom, budget=budget, threshold=threshold)
    except FalsifyBudgetError as exc:
        _emit("falsify", cfg.to_dict(),
              {"witness": None, "budget_exhausted": True,
               "trajectory": [list(t) for t in exc.trajectory]})
        return 2
    if witness is None:
        _emit("falsify", cfg.to_dict(), {"witness": None, "budget_exhausted": False})
        return 0
    _emit("falsify", cfg.to_dict(), {
        "witness": {
            "alpha": witness.alpha, "beta": witness.beta,
            "cube_measure": witness.cube.measure,
            "e_alpha_measure": witness.e_alpha.measure,
            "e_beta_measure": witness.e_beta.measure,
            "final_ratio": witness.ratio(),
            "lambda_star": witness.lambdas[-1],
            "trajectory": [list(t) for t in
                           zip(witness.lambdas, witness.lhs, witness.rhs)],
            "checks": witness.verify(p, q),
        },
        "budget_exhausted": False,
    })
    return 1


def _cmd_constants(args) -> int:
    cfg = load_config(args.config)
    dom = cfg.domain()
    p = _exponent(cfg, "p", dom)
    q = _exponent(cfg, "q", dom)
    kw = {}
    if cfg.has("constants"):
        kw["seed"] = cfg.get_int("constants", "seed", 20240901)
        kw["n_calibration"] = cfg.get_int("constants", "calibration", 100)
        kw["n_holdout"] = cfg.get_int("constants", "holdout", 50)
        kw["safety"] = cfg.get_float("constants", "safety", 2.0)
    try:
        rep = estimate_constants(p, q, dom, **kw)
    except ConditionsNotMet as exc:
        _emit("constants", cfg.to_dict(), {"refused": str(exc)})
        return 1
    _emit("constants", cfg.to_dict(), rep.to_dict())
    return 0 if rep.passed else 1


def _cmd_fourier(args) -> int:
    cfg = load_config(args.config)
    sched = cfg.schedule()
    p = _exponent(cfg, "p", sched.domain)
    q = _exponent(cfg, "q", sched.domain)
    kw = {}
    if cfg.has("fourier"):
        kw["seed"] = cfg.get_int("fourier", "seed", 20240903)
        kw["n_family"] = cfg.get_int("fourier", "family", 50)
        kw["lam"] = cfg.get_float("fourier", "lambda", 2.0)
    try:
        rep = fourier_check(p, q, sched, **kw)
    except ConditionsNotMet as exc:
        _emit("fourier", cfg.to_dict(), {"refused": str(exc)})
        return 1
    _emit("fourier", cfg.to_dict(), rep.to_dict())
    return 0 if rep.passed else 1


def _cmd_reproduce(args) -> int:
    report, code = reproduce_example(args.id)
    if args.csv:
        write_csv(args.csv, flatten_report(report))
    _emit("reproduce", {"id": args.id}, report)
    return code


def _cmd_bench(args) -> int:
    rng = np.random.default_rng(7)
    rows = []
    from .grid import GridFunction, make_box, make_interval
    for n in (64, 128, 256):
        dom = make_interval(0.0, float(n), 1.0)
        f = GridFunction(dom, rng.integers(0, 1024, n) / 8.0)
        t0 = time.perf_counter()
        maximal_oracle(f)
        t1 = time.perf_counter()
        maximal_fast(f)
        t2 = time.perf_counter()
        rows.append({"grid": f"1d-{n}", "oracle_s": t1 - t0, "fast_s": t2 - t1})
    for n in (16, 24, 32):
        dom = make_box((0.0, 0.0), (float(n), float(n)), 1.0)
        f = GridFunction(dom, rng.integers(0, 1024, (n, n)) / 8.0)
        t0 = time.perf_counter()
        maximal_oracle(f)
        t1 = time.perf_counter()
        maximal_fast(f)
        t2 = time.perf_counter()
        rows.append({"grid": f"2d-{n}x{n}", "oracle_s": t1 - t0, "fast_s": t2 - t1})
    _emit("bench", {}, {"timings": rows})
    return 0


# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vexlab",
        description="variable-exponent Lebesgue space laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("parse-check", help="echo canonical expression form")
    group = pc.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr")
    group.add_argument("--config")
    pc.set_defaults(handler=_cmd_parse_check)

    for name, handler in (("modular", _cmd_modular), ("norm", _cmd_norm),
                          ("maxop", _cmd_maxop), ("check", _cmd_check),
                          ("omega", _cmd_omega), ("falsify", _cmd_falsify),
                          ("constants", _cmd_constants),
                          ("fourier", _cmd_fourier)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--csv", default=None)
        p.set_defaults(handler=handler)

    rp = sub.add_parser("reproduce", help="run a pinned reproduction")
    rp.add_argument("id")
    rp.add_argument("--csv", default=None)
    rp.set_defaults(handler=_cmd_reproduce)

    bp = sub.add_parser("bench", help="time oracle vs fast maximal operator")
    bp.set_defaults(handler=_cmd_bench)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, ParseError, EvalError, GridError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
