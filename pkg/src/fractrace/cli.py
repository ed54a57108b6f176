"""Command line interface.

    fractrace <group> <command> [--config FILE] [--key value | --key=value ...]

Parameters come from a flat ``key = value`` file and/or flags (flags win).
Every run writes a JSON report echoing the effective configuration and the
package version; numbers are written with 17 significant digits and nothing
time dependent is recorded, so identical inputs give identical bytes.

Exit codes: 0 success, 1 usage, 2 parameter or hypothesis violation,
3 accuracy failure, 4 a registered assertion failed.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AccuracyError, DimensionError, DomainError, ParameterError
from .frac_calculus import caputo_derivative, hardy_ratio, marchaud_derivative, rl_integral
from .function_spaces import (WeightSpec, besov_norm, besov_norm_differences, build_lp_family,
                              interpolation_norm, k_functional, mixed_norm, sobolev_norm)
from .fundamental_solution import (KernelSpec, check_decay, check_scaling, exact_second_moment,
                                   kernel_field, kernel_mass, second_moment_slope, second_moments)
from .grid import SpaceGrid, TimeGrid
from .ivp_solver import IVPProblem, initial_continuity, preset, residual, solve
from .mittag_leffler import MittagLefflerParams, ml_eval, safe_switch
from .verify import (HarnessParams, Member, besov_necessity, decomposition_error, ensemble_generate,
                     extension_constant, initial_data, kernel_decay_envelope, mixed_kernel_constant,
                     subcritical_counterexample, trace_constant, trace_constant_div)
from .verify.ensembles import band_modes, bandlimited

SCHEMA = "fractrace-report/1"

EXIT_OK, EXIT_USAGE, EXIT_PARAM, EXIT_ACCURACY, EXIT_ASSERT = 0, 1, 2, 3, 4

COMMANDS = {
    "ml": ("eval",),
    "frac": ("ialpha", "caputo", "marchaud", "hardy"),
    "norm": ("besov", "sobolev", "mixed", "bdiff", "kfun"),
    "kernel": ("build", "check-scaling", "check-decay", "moments"),
    "solve": ("sub", "super"),
    "verify": ("trace", "trace-div", "extension", "decay", "mixed-kernel", "counterexample",
               "necessity", "decomposition"),
}


class UsageError(Exception):
    pass


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str):
    return None if text.strip().lower() in ("", "none", "auto") else float(text)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# key -> (parser, default, help)
KEYS: dict[str, tuple] = {
    "seed": (int, 0, "random seed"),
    "d": (int, 1, "space dimension"),
    "n": (int, 256, "points per axis (power of two)"),
    "L": (float, 16.0, "torus half-width"),
    "M": (int, 512, "time steps"),
    "r": (_opt_float, None, "time grading exponent (auto: max(1, 2/alpha))"),
    "T": (float, 1.0, "final time"),
    "alpha": (float, 0.75, "fractional order in (0, 1)"),
    "k": (int, 0, "integer part of the time order (0 or 1)"),
    "p": (float, 2.0, "space integrability"),
    "q": (float, 2.0, "time integrability"),
    "mu": (float, 0.0, "time weight exponent"),
    "nu": (float, 0.0, "space weight exponent"),
    "workers": (int, 0, "threads for ensembles (0: all cores)"),
    "out": (str, "fractrace_report.json", "JSON report path ('-' for stdout)"),
    "csv": (str, "", "optional CSV output path"),
    "beta": (float, 0.5, "Mittag-Leffler / kernel order"),
    "c": (float, 1.0, "second Mittag-Leffler parameter"),
    "v": (float, 1.0, "Mittag-Leffler argument (evaluates E(-v))"),
    "delta": (_opt_float, None, "contour angle"),
    "v_switch": (_opt_float, None, "series/integral switch point"),
    "gamma": (float, 1.5, "exponent of the test function t^gamma"),
    "tol": (_opt_float, None, "assertion tolerance"),
    "preset": (str, "gaussian", "gaussian | single-mode | random-bandlimited"),
    "u1_preset": (str, "gaussian", "velocity preset for k = 1"),
    "mode": (int, 1, "lattice mode of single-mode data"),
    "band_lo": (float, 1.0, "lower band edge"),
    "band_hi": (float, 4.0, "upper band edge"),
    "s": (float, 0.5, "smoothness index"),
    "theta": (float, 0.5, "interpolation parameter"),
    "eps": (float, 0.1, "K-functional / decomposition parameter"),
    "t": (float, 1.0, "kernel time"),
    "times": (_floats, [0.25, 0.5, 1.0, 2.0, 4.0], "comma-separated times"),
    "tilde": (_bool, False, "use the velocity kernel"),
    "kind": (str, "mixed", "ensemble kind"),
    "count": (int, 50, "ensemble size"),
    "refine": (_bool, True, "also run on the refined grid pair and report drift"),
    "kappa": (_opt_float, None, "decay exponent (default (alpha + (1+mu)/q) / 2)"),
    "levels": (_ints, [], "dyadic levels (default depends on the command)"),
    "ns": (_ints, [1, 2, 4, 8, 16, 32, 64], "counterexample family indices"),
    "form": (str, "nondiv", "nondiv | div"),
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def sgrid(self) -> SpaceGrid:
        return SpaceGrid(self.d, self.L, self.n)

    def tgrid(self, alpha: float | None = None, M: int | None = None) -> TimeGrid:
        M = self.M if M is None else M
        if self.r is not None:
            return TimeGrid(self.T, M, self.r)
        return TimeGrid.graded(self.T, M, self.alpha if alpha is None else alpha)

    @property
    def harness(self) -> HarnessParams:
        return HarnessParams(self.alpha, self.k, self.p, self.q, self.mu, self.nu)

    @property
    def n_workers(self):
        return None if self.workers <= 0 else self.workers

    def echo(self) -> dict:
        return {k: self.values[k] for k in sorted(self.values)}


def _parse_pairs(pairs, source: str) -> dict:
    out: dict = {}
    for key, raw in pairs:
        if key not in KEYS:
            raise UsageError(f"unknown key {key!r} in {source}")
        if key in out:
            warnings.warn(f"duplicate key {key!r} in {source}; the last value wins", stacklevel=2)
        try:
            out[key] = KEYS[key][0](raw)
        except ValueError as exc:
            raise UsageError(f"bad value for {key!r}: {raw!r} ({exc})") from None
    return out


def read_config_file(path: str | Path) -> list[tuple[str, str]]:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file {path} not found")
    pairs = []
    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = line.split("=", 1)
        pairs.append((key.strip(), val.strip()))
    return pairs


def flag_pairs(extra: list[str]) -> list[tuple[str, str]]:
    pairs = []
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        body = tok[2:]
        if "=" in body:
            key, val = body.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise UsageError(f"flag {tok} needs a value")
            key, val = body, extra[i + 1]
            i += 2
        pairs.append((key.replace("-", "_"), val))
    return pairs


def parse_config(config_file: str | None = None, flags: list[str] | None = None) -> RunConfig:
    """Defaults, then the config file, then flags."""
    values = {k: spec[1] for k, spec in KEYS.items()}
    if config_file:
        values.update(_parse_pairs(read_config_file(config_file), str(config_file)))
    if flags:
        values.update(_parse_pairs(flag_pairs(flags), "the command line"))
    cfg = RunConfig(values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    WeightSpec(cfg.mu, cfg.nu).validate(cfg.p, cfg.q, cfg.d)
    if cfg.k not in (0, 1):
        raise ParameterError(f"k must be 0 or 1, got {cfg.k}")
    upper_ok = cfg.alpha <= 1.0 if cfg.k == 0 else cfg.alpha < 1.0
    if not (0.0 < cfg.alpha and upper_ok):
        raise ParameterError(f"alpha={cfg.alpha} must lie in (0, 1) (alpha = 1 only for k = 0)")
    SpaceGrid(cfg.d, cfg.L, cfg.n)
    cfg.tgrid()
    if cfg.form not in ("nondiv", "div"):
        raise ParameterError(f"form must be nondiv or div, got {cfg.form!r}")


# ---------------------------------------------------------------- JSON output

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_json_str(str(k))}: {dumps(obj[k], indent, level + 1)}' for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, level)
    return _json_str(str(obj))


def _json_str(s: str) -> str:
    import json

    return json.dumps(s)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, (float, np.floating)) else v for v in row])


# ---------------------------------------------------------------- commands

@dataclass
class Outcome:
    result: dict
    summary: str
    passed: bool = True
    csv_header: list | None = None
    csv_rows: list | None = None


def _field(cfg: RunConfig, which: str = "preset") -> np.ndarray:
    name = getattr(cfg, which)
    sg = cfg.sgrid
    if name == "random-bandlimited":
        rng = np.random.default_rng(cfg.seed)
        modes = band_modes(sg.L, sg.d, (cfg.band_lo, cfg.band_hi))
        coefs = rng.standard_normal(len(modes)) + 1j * rng.standard_normal(len(modes))
        return bandlimited(sg, modes, coefs)
    return preset(name, sg, cfg.mode, cfg.seed, (cfg.band_lo, cfg.band_hi))


def _tol_check(value: float, cfg: RunConfig) -> bool:
    return True if cfg.tol is None else bool(value <= cfg.tol)


def cmd_ml_eval(cfg: RunConfig) -> Outcome:
    v_switch = safe_switch(cfg.beta, cfg.c) if cfg.v_switch is None else cfg.v_switch
    params = MittagLefflerParams(cfg.beta, cfg.c, cfg.delta, v_switch)
    val, branch = ml_eval(params, cfg.v)
    return Outcome({"value": val, "branch": branch, "v_switch": v_switch}, format(val, ".10g"))


def _power_oracle(cfg: RunConfig, order: float, t: np.ndarray) -> np.ndarray:
    g = cfg.gamma
    return math.gamma(g + 1.0) / math.gamma(g + 1.0 + order) * t ** (g + order)


def cmd_frac(cfg: RunConfig, which: str) -> Outcome:
    tg = cfg.tgrid()
    t = tg.t
    f = t**cfg.gamma
    if which == "hardy":
        ratio = hardy_ratio(f, tg, cfg.alpha, cfg.q, cfg.mu)
        c = math.gamma(cfg.gamma + 1.0) / math.gamma(cfg.gamma + 1.0 + cfg.alpha)
        return Outcome({"ratio": ratio, "power_ratio": c**cfg.q}, format(ratio, ".10g"))
    if which == "ialpha":
        num = rl_integral(f, tg, cfg.alpha)
        exact = _power_oracle(cfg, cfg.alpha, t)
    else:
        u0 = 0.0 if cfg.gamma > 0 else 1.0
        op = caputo_derivative if which == "caputo" else marchaud_derivative
        num = op(f, u0, tg, cfg.alpha)
        exact = np.zeros_like(t)
        exact[1:] = _power_oracle(cfg, -cfg.alpha, t[1:])
        num = num.copy()
        num[0] = exact[0]
    err = np.abs(num - exact)
    l2 = math.sqrt(float(np.trapezoid(err[1:] ** 2, t[1:])))
    ok = _tol_check(l2, cfg)
    rows = list(zip(t.tolist(), np.asarray(num).tolist(), exact.tolist()))
    return Outcome({"max_error": float(err[1:].max()), "l2_error": l2}, format(l2, ".6e"), ok,
                   ["t", "numeric", "exact"], rows)


def cmd_norm(cfg: RunConfig, which: str) -> Outcome:
    sg = cfg.sgrid
    f = _field(cfg)
    if which == "besov":
        val = besov_norm(f, cfg.s, cfg.p, cfg.q, build_lp_family(sg), cfg.nu)
    elif which == "sobolev":
        val = sobolev_norm(f, cfg.s, cfg.p, sg, cfg.nu)
    elif which == "bdiff":
        val = besov_norm_differences(f, cfg.s, cfg.p, cfg.q, sg)
    elif which == "kfun":
        val = k_functional(f, cfg.eps, cfg.p, sg, cfg.nu)
        interp = interpolation_norm(f, cfg.theta, cfg.q, cfg.p, sg, cfg.nu)
        return Outcome({"value": val, "interpolation_norm": interp}, format(val, ".10g"))
    else:
        tg = cfg.tgrid()
        U = solve(IVPProblem(cfg.alpha, f, sg, tg, 0))
        val = mixed_norm(U.values, tg, sg, cfg.p, cfg.q, WeightSpec(cfg.mu, cfg.nu))
    return Outcome({"value": val}, format(val, ".10g"))


def cmd_kernel(cfg: RunConfig, which: str) -> Outcome:
    sg = cfg.sgrid
    if which == "build":
        spec = KernelSpec(cfg.beta, cfg.t, sg, cfg.tilde)
        vals = kernel_field(spec)
        res = {"mass": kernel_mass(spec) if not cfg.tilde else None, "peak": float(vals.max())}
        rows = None
        if sg.d == 1:
            rows = list(zip(sg.x.tolist(), vals.tolist()))
        return Outcome(res, format(float(vals.max()), ".10g"), True, ["x", "P"], rows)
    if which == "check-scaling":
        err = check_scaling(cfg.beta, cfg.t, sg)
        tol = 1e-3 if cfg.tol is None else cfg.tol
        return Outcome({"relative_error": err, "tol": tol}, format(err, ".6e"), err <= tol)
    if which == "check-decay":
        rep = check_decay(cfg.beta, sg)
        res = {"sigma": rep.sigma, "log_amplitude": rep.log_amplitude, "r_squared": rep.r_squared,
               "envelope_constant": rep.envelope_constant, "fit_range": list(rep.fit_range)}
        return Outcome(res, format(rep.sigma, ".10g"), bool(rep.sigma > 0 and rep.r_squared > 0.99))
    times = cfg.times
    m = second_moments(cfg.beta, times, sg)
    slope = second_moment_slope(cfg.beta, times, sg)
    exact = [exact_second_moment(cfg.beta, t, sg.d) for t in times]
    ok = abs(slope - cfg.beta) <= (0.05 if cfg.tol is None else cfg.tol)
    rows = list(zip(times, m.tolist(), exact))
    return Outcome({"slope": slope, "moments": m.tolist(), "exact": exact}, format(slope, ".10g"), ok,
                   ["t", "moment", "exact"], rows)


def cmd_solve(cfg: RunConfig, which: str) -> Outcome:
    sg = cfg.sgrid
    k = 0 if which == "sub" else 1
    tg = cfg.tgrid(1.0 if k == 1 and cfg.r is None else None)
    u0 = _field(cfg)
    u1 = _field(cfg, "u1_preset") if k == 1 else None
    prob = IVPProblem(cfg.alpha, u0, sg, tg, k, u1)
    U = solve(prob)
    res = {"final_l2": float(np.sqrt(np.sum(U.values[-1] ** 2) * sg.cell_volume))}
    ok = True
    if cfg.alpha < 1.0:
        rres = residual(U, prob, cfg.p, cfg.q, WeightSpec(cfg.mu, cfg.nu))
        res["residual"] = rres
        ok = _tol_check(rres, cfg)
    if k == 0:
        fit = initial_continuity(U, u0, cfg.alpha, cfg.p, cfg.q, cfg.mu, cfg.nu)
        res["continuity_slope"] = fit.slope
        res["continuity_bound"] = fit.lower_bound
        ok = ok and fit.passed
    rows = None
    if sg.d == 1:
        rows = list(zip(sg.x.tolist(), U.values[-1].tolist()))
    return Outcome(res, format(res.get("residual", res["final_l2"]), ".6e"), ok, ["x", "u_T"], rows)


def _report_outcome(rep, summary_key: str = "max_ratio") -> Outcome:
    d = rep.to_dict()
    rows = [(e["label"], e["lhs"], e["rhs"], e["ratio"]) for e in d["entries"]]
    val = d.get(summary_key)
    summary = format(val, ".10g") if isinstance(val, float) else str(val)
    return Outcome(d, summary, rep.passed, ["label", "lhs", "rhs", "ratio"], rows)


def _fine_grids(cfg: RunConfig, alpha: float):
    sg = cfg.sgrid
    return sg.refine(), cfg.tgrid(alpha, 2 * cfg.M)


def cmd_verify(cfg: RunConfig, which: str) -> Outcome:
    hp = cfg.harness
    hp.validate(cfg.d)
    sg = cfg.sgrid
    grade = 1.0 if hp.k == 1 else hp.alpha
    tg = cfg.tgrid(grade)
    workers = cfg.n_workers
    if which in ("trace", "trace-div"):
        hp.require_traces()
        members = ensemble_generate(cfg.kind, cfg.count, cfg.seed, sg, tg, hp)
        fine = None
        if cfg.refine:
            fsg, ftg = _fine_grids(cfg, grade)
            fine = ensemble_generate(cfg.kind, cfg.count, cfg.seed, fsg, ftg, hp)
        fn = trace_constant if which == "trace" else trace_constant_div
        return _report_outcome(fn(hp, members, fine, workers=workers))
    if which == "extension":
        data = initial_data(cfg.count, cfg.seed, sg, (cfg.band_lo, cfg.band_hi), hp.k == 1)
        fine = None
        if cfg.refine:
            fsg, ftg = _fine_grids(cfg, grade)
            fine = (initial_data(cfg.count, cfg.seed, fsg, (cfg.band_lo, cfg.band_hi), hp.k == 1), fsg, ftg)
        return _report_outcome(extension_constant(hp, data, sg, tg, fine, cfg.form, workers=workers))
    if which == "mixed-kernel":
        data = [u0 for u0, _ in initial_data(cfg.count, cfg.seed, sg, (cfg.band_lo, cfg.band_hi))]
        return _report_outcome(mixed_kernel_constant(hp, data, sg, tg, workers=workers))
    if which == "decay":
        beta = hp.beta
        kappa = cfg.kappa if cfg.kappa is not None else (hp.alpha + hp.critical) / 2.0
        fam = build_lp_family(sg)
        levels = cfg.levels or list(range(1, min(6, fam.J) + 1))
        rng = np.random.default_rng(cfg.seed)
        # highest lattice frequency that every axis resolves
        top = math.pi * (sg.n // 2 - 1) / sg.L / math.sqrt(sg.d)
        modes = band_modes(sg.L, sg.d, (0.5, min(2.0 ** (max(levels) + 1), top)))
        f = bandlimited(sg, modes, rng.standard_normal(len(modes)) + 1j * rng.standard_normal(len(modes)))
        times = cfg.times if cfg.values.get("times") != KEYS["times"][1] else None
        rep = kernel_decay_envelope(beta, kappa, f, sg, levels, times, hp.p, hp.nu, cfg.tilde)
        return _report_outcome(rep)
    if which == "counterexample":
        phi = np.exp(-sum(c**2 for c in sg.coords()))
        return _report_outcome(subcritical_counterexample(hp, phi, sg, tg, cfg.ns), "max_ratio")
    if which == "necessity":
        psg = SpaceGrid(sg.d, math.pi, sg.n)
        levels = cfg.levels or list(range(0, 7))
        rep = besov_necessity(hp, psg, levels, tg)
        rep.extra["L_used"] = math.pi
        return _report_outcome(rep)
    # decomposition: solver output on the configured grids, eps dyadic below T^beta
    u0 = _field(cfg)
    u1 = _field(cfg, "u1_preset") if hp.k == 1 else None
    U = solve(IVPProblem(hp.alpha, u0, sg, tg, hp.k, u1))
    m = Member(U, [u0] if hp.k == 0 else [u0, u1], "solver-output")
    levels = cfg.levels or list(range(1, 7))
    eps = [tg.T**hp.beta * 2.0 ** (-j) for j in levels]
    errs = {str(n): [decomposition_error(m, hp, e, n) for e in eps] for n in range(hp.k + 1)}
    worst = max(max(v) for v in errs.values())
    tol = 1e-4 if cfg.tol is None else cfg.tol
    rows = [(n, e, err) for n, v in errs.items() for e, err in zip(eps, v)]
    return Outcome({"eps": eps, "relative_errors": errs, "max_error": worst, "tol": tol},
                   format(worst, ".6e"), worst <= tol, ["n", "eps", "relative_error"], rows)


def dispatch(group: str, command: str, cfg: RunConfig) -> Outcome:
    if group == "ml":
        return cmd_ml_eval(cfg)
    if group == "frac":
        return cmd_frac(cfg, command)
    if group == "norm":
        return cmd_norm(cfg, command)
    if group == "kernel":
        return cmd_kernel(cfg, command)
    if group == "solve":
        return cmd_solve(cfg, command)
    return cmd_verify(cfg, command)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractrace", allow_abbrev=False,
        description="Time-fractional diffusion toolkit. Parameters are passed as --key value.",
        epilog="keys: " + ", ".join(sorted(KEYS)))
    parser.add_argument("--version", action="version", version=f"fractrace {__version__}")
    sub = parser.add_subparsers(dest="group", required=True)
    for group, cmds in COMMANDS.items():
        gp = sub.add_parser(group, allow_abbrev=False)
        gsub = gp.add_subparsers(dest="command", required=True)
        for c in cmds:
            cp = gsub.add_parser(c, allow_abbrev=False)
            cp.add_argument("--config", default=None, help="flat key = value file")
    return parser


def report_document(group: str, command: str, cfg: RunConfig, outcome: Outcome) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": f"{group} {command}",
        "config": cfg.echo(),
        "result": outcome.result,
        "passed": outcome.passed,
    }


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _warn_to_stderr
            cfg = parse_config(ns.config, extra)
            outcome = dispatch(ns.group, ns.command, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, DomainError, DimensionError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    text = dumps(report_document(ns.group, ns.command, cfg, outcome)) + "\n"
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)
        print(outcome.summary)
    if cfg.csv and outcome.csv_rows is not None:
        _write_csv(cfg.csv, outcome.csv_header, outcome.csv_rows)
    if not outcome.passed:
        print("assertion failed", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def _warn_to_stderr(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
