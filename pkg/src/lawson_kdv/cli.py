"""Command line front end: ``lawson-kdv solve|converge|cfl|verify``.

Settings come from an optional key=value config file (``--config``) with
command line flags taking precedence. Diagnostics go to stderr, data only to
the CSV named by ``--out``.

Exit codes: 0 success, 1 blow-up in ``solve``, 2 invalid configuration,
3 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .harness import (
    NoDataError,
    cfl_sweep,
    convergence_study,
    identity_suite,
    write_csv_atomic,
)
from .problems import (
    Problem,
    SolitonParams,
    error_report,
    pulse_problem,
    resample_periodic,
    soliton_exact,
    soliton_problem,
)
from .scheme import SchemeParams, evolve
from .spectral_core import Grid

EXIT_OK, EXIT_BLOWUP, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3

COMMANDS = ("solve", "converge", "cfl", "verify")
KEYS = ("problem", "L", "N", "h", "c", "tau", "d", "T", "out", "seed", "initial", "lam", "a")
LIST_KEYS = ("N", "h", "c", "d")

DEFAULTS = {
    "soliton": {"L": 30.0, "c": 4.0, "T": 2.0,
                "h": [1 / 40, 1 / 80, 1 / 160, 1 / 320, 1 / 640]},
    "pulse": {"L": math.pi, "c": 3.0, "T": 3.0,
              "h": [math.pi / 2**k for k in range(10, 14)]},
    "custom": {"c": 4.0, "T": 1.0},
}


class ConfigError(ValueError):
    pass


def say(msg: str) -> None:
    print(msg, file=sys.stderr)


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _number(key, text) -> float:
    try:
        expr = str(text).strip()
        if "/" in expr:
            num, den = expr.split("/", 1)
            value = _atom(num) / _atom(den)
        else:
            value = _atom(expr)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def _atom(s: str) -> float:
    s = s.strip()
    if s.lower() == "pi":
        return math.pi
    if s.lower().endswith("*pi"):
        return float(s[:-3]) * math.pi
    return float(s)


def _numbers(key, text) -> list:
    return [_number(key, part) for part in str(text).split(",") if part.strip()]


@dataclass
class RunConfig:
    command: str
    problem: str = "soliton"
    L: Optional[float] = None
    N: list = field(default_factory=list)
    h: list = field(default_factory=list)
    c: list = field(default_factory=list)
    tau: Optional[float] = None
    d: list = field(default_factory=list)
    T: Optional[float] = None
    out: Optional[str] = None
    seed: int = 0
    initial: Optional[str] = None
    lam: float = 0.25
    a: float = -1.0

    @classmethod
    def from_settings(cls, command: str, settings: dict) -> "RunConfig":
        cfg = cls(command)
        for key, value in settings.items():
            if value is None:
                continue
            if key in LIST_KEYS:
                vals = _numbers(key, value)
                if key == "N":
                    if any(v != int(v) for v in vals):
                        raise ConfigError("N must be an integer")
                    vals = [int(v) for v in vals]
                setattr(cfg, key, vals)
            elif key in ("L", "tau", "T", "lam", "a"):
                setattr(cfg, key, _number(key, value))
            elif key == "seed":
                try:
                    cfg.seed = int(value)
                except ValueError:
                    raise ConfigError(f"seed must be an integer, got {value!r}") from None
            else:
                setattr(cfg, key, str(value))
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.problem not in ("soliton", "pulse", "custom"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.problem == "custom" and self.command in ("solve", "cfl") and not self.initial:
            raise ConfigError("problem=custom needs an initial data file (initial=PATH)")
        if self.problem == "custom" and self.command == "converge":
            raise ConfigError("converge needs a problem with known truth (soliton or pulse)")
        if self.N and self.h:
            raise ConfigError("give exactly one of N and h")
        if self.tau is not None and self.d:
            raise ConfigError("give exactly one of tau and d")
        for key in ("N", "h", "c", "d"):
            if any(v <= 0 for v in getattr(self, key)):
                raise ConfigError(f"{key} must be positive")
        for key in ("L", "tau", "T", "lam"):
            v = getattr(self, key)
            if v is not None and v <= 0:
                raise ConfigError(f"{key} must be positive")
        if self.command in ("solve", "converge") and len(self.c) > 1:
            raise ConfigError(f"{self.command} takes a single c")
        if self.command == "solve":
            if len(self.N) > 1 or len(self.h) > 1 or len(self.d) > 1:
                raise ConfigError("solve takes a single resolution and step")
            if not self.out:
                raise ConfigError("solve needs --out")
        if self.command in ("converge", "cfl") and not self.out:
            raise ConfigError(f"{self.command} needs --out")
        if self.command == "converge" and self.tau is not None:
            raise ConfigError("converge scales tau with h; use d instead of tau")

    # resolved settings with per-problem defaults

    def defaults(self) -> dict:
        return DEFAULTS[self.problem]

    @property
    def half_period(self) -> float:
        if self.L is not None:
            return self.L
        if "L" in self.defaults():
            return self.defaults()["L"]
        raise ConfigError("problem=custom needs L")

    @property
    def c_values(self) -> list:
        return self.c or [self.defaults()["c"]]

    @property
    def final_time(self) -> float:
        return self.T if self.T is not None else self.defaults()["T"]

    def grids(self) -> list:
        L = self.half_period
        if self.N:
            return [Grid(n, L) for n in self.N]
        hs = self.h or self.defaults().get("h")
        if not hs:
            raise ConfigError("give N or h")
        if self.command == "solve" and not self.h:
            hs = hs[:1]
        return [Grid.from_h(L, h) for h in hs]


def build_problem(cfg: RunConfig) -> Problem:
    if cfg.problem == "soliton":
        return soliton_problem(SolitonParams(cfg.lam, cfg.a), L=cfg.half_period)
    if cfg.problem == "pulse":
        if cfg.L is not None and not math.isclose(cfg.L, math.pi):
            raise ConfigError("the pulse problem lives on L = pi")
        return pulse_problem()
    x, u = read_initial(cfg.initial)
    L = cfg.half_period

    def initial(nodes):
        n = (len(nodes) - 1) // 2
        return resample_periodic(x, u, Grid(n, L)).values

    return Problem("custom", L, initial, truth=None, metadata={"initial": cfg.initial})


def read_initial(path: str):
    """Two-column CSV (x, u); a non-numeric first row is taken as a header."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise ConfigError(f"cannot read initial data {path}: {exc}") from None
    data = []
    for i, row in enumerate(rows):
        try:
            data.append((float(row[0]), float(row[1])))
        except (ValueError, IndexError):
            if i == 0:
                continue
            raise ConfigError(f"{path}: bad row {i + 1}: {row!r}") from None
    if len(data) < 3:
        raise ConfigError(f"{path}: need at least three samples")
    arr = np.array(data)
    return arr[:, 0], arr[:, 1]


def _step_size(cfg: RunConfig, grid: Grid, c: float) -> float:
    if cfg.tau is not None:
        return cfg.tau
    d = cfg.d[0] if cfg.d else 1.0 / c
    return d * grid.h


def cmd_solve(cfg: RunConfig) -> int:
    problem = build_problem(cfg)
    grid = cfg.grids()[0]
    c = cfg.c_values[0]
    try:
        u0 = problem.initial_field(grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    params = SchemeParams(tau=_step_size(cfg, grid, c), c=c, final_time=cfg.final_time)
    result = evolve(u0, params)
    say(f"solve problem={cfg.problem} N={grid.N} h={grid.h:.10g} tau={result.tau:.10g} "
        f"c={c:g} cfl_ratio={result.cfl_ratio:.6g} T={cfg.final_time:g} seed={cfg.seed} "
        f"steps={result.steps_taken}")
    for note in result.warnings:
        say(f"warning: {note}")
    if result.blew_up:
        say(f"blow-up detected at step {result.blowup_step} "
            f"(t={result.blowup_step * result.tau:.6g}); no output written")
        return EXIT_BLOWUP
    if cfg.problem == "soliton":
        p = SolitonParams(cfg.lam, cfg.a)
        rep = error_report(result.final, soliton_exact(grid.nodes, cfg.final_time, p),
                           cfg.final_time, result.tau)
        say(f"error vs exact soliton: l2={rep.l2_error:.6e} linf={rep.linf_error:.6e}")
    say(f"mean drift {result.mean_drift:.3e}, max |u| {result.max_linf:.6g}")
    write_csv_atomic(cfg.out, ("x", "u"), zip(grid.nodes, result.final.values))
    return EXIT_OK


def cmd_converge(cfg: RunConfig) -> int:
    problem = build_problem(cfg)
    c = cfg.c_values[0]
    grids = cfg.grids()
    tau_rule = cfg.d[0] if cfg.d else None
    for g in grids:
        tau = (tau_rule if tau_rule is not None else 1.0 / c) * g.h
        say(f"converge run N={g.N} h={g.h:.10g} tau={tau:.10g} cfl_ratio={c * tau / g.h:.6g} "
            f"seed={cfg.seed}")
    try:
        table = convergence_study(problem, c, cfg.final_time, [g.h for g in grids], tau_rule,
                                  experiment_id=f"{cfg.problem}-c{c:g}")
    except NoDataError as exc:
        say(str(exc))
        return EXIT_BLOWUP
    table.to_csv(cfg.out)
    for r in table.rows:
        status = f"blew up at step {r.blowup_step}" if r.blew_up else f"l2={r.l2_error:.6e}"
        say(f"  N={r.N} h={r.h:.6g} tau={r.tau:.6g}: {status}")
    slope = table.fitted_slope
    say(f"fitted slope: {slope:.4f}" if slope is not None else "fitted slope: undefined")
    return EXIT_OK


def cmd_cfl(cfg: RunConfig) -> int:
    problem = build_problem(cfg)
    ds = cfg.d or [1.0 / cfg.c_values[0]]
    grids = cfg.grids()
    say(f"cfl sweep c={cfg.c_values} d={ds} N={[g.N for g in grids]} T={cfg.final_time:g} "
        f"seed={cfg.seed}")
    smap = cfl_sweep(problem, cfg.c_values, ds, [g.h for g in grids], cfg.final_time)
    for e in smap.entries:
        say(f"  c={e.c:g} d={e.d:g} h={e.h:.6g} tau={e.tau:.6g} cfl_ratio={e.c * e.d:.4g}: "
            + ("stable" if e.stable else f"blew up at step {e.blowup_step}"))
    smap.to_csv(cfg.out)
    return EXIT_OK


def mean_conservation_check(steps: int = 2000) -> tuple[bool, float, float]:
    """Short soliton run; returns (passed, drift, tolerance)."""
    problem = soliton_problem()
    grid = Grid.from_h(problem.L, 1 / 20)
    tau = grid.h / 4.0
    u0 = problem.initial_field(grid)
    result = evolve(u0, SchemeParams(tau=tau, c=4.0, final_time=steps * tau))
    tol = 1e-11 * (1.0 + float(np.max(np.abs(u0.values))))
    return (not result.blew_up and result.mean_drift <= tol), result.mean_drift, tol


def cmd_verify(cfg: RunConfig) -> int:
    sizes = cfg.N or [4, 16, 64, 256]
    say(f"verify sizes={sizes} seed={cfg.seed}")
    report = identity_suite(cfg.seed, sizes, check=False)
    failed = 0
    for r in report.rows:
        say(f"  {'PASS' if r.passed else 'FAIL'} {r.identity_name:<26} N={r.N:<5} "
            f"residual={r.max_rel_residual:.3e}")
        failed += not r.passed
    ok, drift, tol = mean_conservation_check()
    say(f"  {'PASS' if ok else 'FAIL'} mean_conservation          drift={drift:.3e} (tol {tol:.1e})")
    failed += not ok
    if cfg.out:
        rows = [(r.identity_name, r.N, r.seed, r.max_rel_residual, r.passed) for r in report.rows]
        write_csv_atomic(cfg.out, ("identity_name", "N", "seed", "max_rel_residual", "pass"), rows)
    say(f"verify: {len(report.rows) + 1 - failed} passed, {failed} failed "
        f"({report.elapsed:.2f}s for identities)")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


HANDLERS = {"solve": cmd_solve, "converge": cmd_converge, "cfl": cmd_cfl, "verify": cmd_verify}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lawson-kdv",
        description="Lawson-Rusanov exponential integrator for the periodic KdV equation.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", metavar="PATH", help="key=value settings file")
    parser.add_argument("--problem", choices=("soliton", "pulse", "custom"))
    parser.add_argument("--initial", metavar="PATH", help="(x, u) CSV for problem=custom")
    parser.add_argument("--L", help="half-period of the domain (-L, L)")
    parser.add_argument("--N", help="mode cutoff(s), comma separated")
    parser.add_argument("--h", help="mesh size(s), comma separated")
    parser.add_argument("--c", help="Rusanov coefficient(s), comma separated")
    parser.add_argument("--tau", help="time step")
    parser.add_argument("--d", help="tau = d*h ratio(s), comma separated")
    parser.add_argument("--T", help="final time")
    parser.add_argument("--out", metavar="PATH", help="CSV output file")
    parser.add_argument("--seed", help="random seed (verify)")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        settings = read_config(args.config) if args.config else {}
        for key in KEYS:
            value = getattr(args, key, None)
            if value is not None:
                settings[key] = value
        cfg = RunConfig.from_settings(args.command, settings)
        return HANDLERS[args.command](cfg)
    except ConfigError as exc:
        say(f"configuration error: {exc}")
        return EXIT_CONFIG
    except ValueError as exc:
        say(f"invalid input: {exc}")
        return EXIT_CONFIG


def run_cli(argv) -> int:
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
