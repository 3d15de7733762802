"""Batch front end: every computation as a reproducible table.

Usage::

    dpp-scaling info --ensemble lue --theta 4
    dpp-scaling kernel --regime bulk --t 0 --n 100 --grid -2 2 1
    dpp-scaling density --n 200 --grid -1.5 1.5 0.1
    dpp-scaling gap --kernel airy --interval -2 38
    dpp-scaling converge --regime hard --ensemble lue --n-list 25 50 100 200

Output is CSV (default) or JSON ``{config, columns, rows}``.  A CSV table
starts with ``# config: {...}`` holding the resolved configuration.  Floats
are written with ``repr`` (shortest round-trip form), so identical
configurations give byte-identical files.

Exit status: 0 success, 1 computation failure, 2 usage or validation error.
``DPP_SCALING_THREADS`` caps the worker threads used for grid and n-list
loops; results are assembled in input order.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fredholm, kernels
from .ensemble import (
    BULK, GUE, HARD, JUE, LUE, SOFT, EnsembleSpec, ScalingError, limit_density, limit_mass,
    make_map, scaling_data, tricomi_map,
)

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "DPP_SCALING_THREADS"

DEFAULT_GRID = {BULK: (-2.0, 2.0, 1.0), SOFT: (-3.0, 1.0, 1.0), HARD: (0.5, 4.5, 1.0)}
DEFAULT_INTERVAL = {BULK: (0.0, 1.0), SOFT: (-2.0, 2.0), HARD: (0.0, 1.0)}
DEFAULT_N_LIST = (25, 50, 100, 200)


class UsageError(Exception):
    """Invalid command line or configuration (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ config


@dataclass
class RunConfig:
    command: str
    ensemble: str = GUE
    theta: Optional[float] = None
    tau: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    n: int = 100
    n_list: tuple = DEFAULT_N_LIST
    regime: Optional[str] = None
    t: Optional[float] = None
    side: Optional[str] = None
    interval: Optional[tuple] = None
    grid: Optional[tuple] = None
    quad_order: int = 48
    kernel: Optional[str] = None
    fmt: str = "csv"
    out: Optional[str] = None
    spec: Optional[EnsembleSpec] = field(default=None, repr=False)

    def ensemble_spec(self, n=None) -> EnsembleSpec:
        n = self.n if n is None else n
        if self.ensemble == GUE:
            return EnsembleSpec.gue(n)
        if self.ensemble == LUE:
            return EnsembleSpec.lue(n, alpha=self.alpha, theta=self.theta)
        return EnsembleSpec.jue(n, alpha=self.alpha, beta=self.beta, theta=self.theta,
                                tau=self.tau)

    def resolved(self) -> dict:
        """Everything that determines the output, for the header line."""
        out = {"command": self.command}
        if self.command != "gap" or self.kernel in (None, "finite"):
            out.update(self.spec.config())
        if self.command == "converge":
            out["n_list"] = list(self.n_list)
            out.pop("n", None)
        for key in ("regime", "t", "side", "kernel"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.command == "gap" and self.kernel == "bessel":
            out["alpha"] = self.alpha or 0.0
        if self.interval is not None:
            out["interval"] = list(self.interval)
        if self.grid is not None:
            out["grid"] = list(self.grid)
        if self.command in ("gap", "converge"):
            out["quad_order"] = self.quad_order
        out["format"] = self.fmt
        return out


def _n_list_token(text):
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("ensemble")
    g.add_argument("--ensemble", choices=[GUE, LUE, JUE], default=GUE)
    g.add_argument("--theta", type=float, help="limit ratio m/n (LUE) or m1/(m1+m2) (JUE)")
    g.add_argument("--tau", type=float, help="limit ratio n/(m1+m2) (JUE)")
    g.add_argument("--alpha", type=float, help="fixed Laguerre/Jacobi alpha, or Bessel index")
    g.add_argument("--beta", type=float, help="fixed Jacobi beta")
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--n-list", type=_n_list_token, nargs="*", dest="n_list")
    s = common.add_argument_group("scaling")
    s.add_argument("--regime", choices=[BULK, SOFT, HARD])
    s.add_argument("--t", type=float, help="bulk point in macroscopic units")
    s.add_argument("--side", choices=["+", "-", "lower", "upper"],
                   help="soft edge (+/-) or hard edge (lower/upper)")
    s.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))
    s.add_argument("--grid", type=float, nargs=3, metavar=("MIN", "MAX", "STEP"))
    s.add_argument("--quad-order", type=int, default=48, dest="quad_order")
    s.add_argument("--kernel", choices=["dyson", "airy", "bessel", "finite"])
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=["csv", "json"], default="csv", dest="fmt")
    o.add_argument("--out", help="output file (default: stdout)")

    parser = _Parser(prog="dpp-scaling", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("info", parents=[common], help="Sturm-Liouville and scaling data")
    sub.add_parser("kernel", parents=[common], help="scaled kernel vs limit on a grid")
    sub.add_parser("density", parents=[common], help="density vs limit law")
    sub.add_parser("gap", parents=[common], help="gap probability det(I - K|J)")
    sub.add_parser("converge", parents=[common], help="error ladder along --n-list")
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(ns).items() if v is not None}
    if "n_list" in values:
        flat = tuple(n for chunk in values["n_list"] for n in chunk)
        if not flat:
            raise UsageError("--n-list is empty")
        values["n_list"] = flat
    for key in ("interval", "grid"):
        if key in values:
            values[key] = tuple(values[key])
    cfg = RunConfig(**values)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.n < 1 or any(n < 1 for n in cfg.n_list):
        raise UsageError("n must be a positive integer")
    if cfg.quad_order < 1:
        raise UsageError("--quad-order must be positive")
    if cfg.ensemble == GUE and any(v is not None for v in (cfg.theta, cfg.tau, cfg.alpha, cfg.beta)):
        if not (cfg.command == "gap" and cfg.kernel == "bessel"):
            raise UsageError("GUE takes no parameters")
    if cfg.ensemble == LUE and cfg.theta is not None and cfg.alpha is not None:
        raise UsageError("give either --theta or --alpha for LUE, not both")
    if cfg.ensemble == JUE:
        ratio = cfg.theta is not None or cfg.tau is not None
        if ratio and (cfg.theta is None or cfg.tau is None):
            raise UsageError("JUE ratio mode needs both --theta and --tau")
        if ratio and (cfg.alpha is not None or cfg.beta is not None):
            raise UsageError("give either --theta/--tau or --alpha/--beta for JUE")
    if cfg.grid is not None:
        lo, hi, step = cfg.grid
        if not (all(map(math.isfinite, cfg.grid)) and step > 0 and lo <= hi):
            raise UsageError("--grid needs finite MIN <= MAX and STEP > 0")
    if cfg.interval is not None:
        a, b = cfg.interval
        if not (math.isfinite(a) and math.isfinite(b) and a <= b):
            raise UsageError("--interval needs finite A <= B")
    if cfg.command in ("kernel", "converge") and cfg.regime is None:
        raise UsageError(f"{cfg.command} needs --regime")
    if cfg.regime == BULK and cfg.t is None and cfg.command != "gap":
        raise UsageError("bulk regime needs --t")
    if cfg.regime == SOFT and cfg.side not in (None, "+", "-"):
        raise UsageError("soft regime takes --side + or -")
    if cfg.regime == HARD and cfg.side not in (None, "lower", "upper"):
        raise UsageError("hard regime takes --side lower or upper")
    if cfg.command == "gap":
        if cfg.kernel is None:
            cfg.kernel = "finite" if cfg.regime is not None else None
        if cfg.kernel is None:
            raise UsageError("gap needs --kernel or --regime")
        if cfg.kernel == "finite" and cfg.regime is None:
            raise UsageError("--kernel finite needs --regime")
        if cfg.kernel == "finite" and cfg.regime == BULK and cfg.t is None:
            raise UsageError("bulk regime needs --t")
        if cfg.interval is None:
            raise UsageError("gap needs --interval A B")
    try:
        cfg.spec = cfg.ensemble_spec()
        if cfg.regime is not None and cfg.kernel in (None, "finite"):
            make_map(cfg.spec, cfg.regime, t=cfg.t, side=cfg.side)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    threads()


def threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def ordered_map(func, items):
    """``list(map(func, items))``, on up to ``DPP_SCALING_THREADS`` threads."""
    items = list(items)
    workers = min(threads(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def grid_points(grid) -> np.ndarray:
    lo, hi, step = grid
    count = int(math.floor((hi - lo) / step * (1.0 + 1e-12) + 1e-9)) + 1
    return lo + step * np.arange(count)


# ------------------------------------------------------------------ output


class Table:
    def __init__(self, config: dict, columns):
        self.config = config
        self.columns = list(columns)
        self.rows = []

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError("row length does not match the columns")
        self.rows.append([_plain(v) for v in row])

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"config": self.config, "columns": self.columns, "rows": self.rows}
            return json.dumps(doc, allow_nan=False) + "\n"
        lines = ["# config: " + json.dumps(self.config, sort_keys=True, allow_nan=False)]
        lines.append(",".join(self.columns))
        lines.extend(",".join(_cell(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def _plain(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return int(value)
    return value


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


# ---------------------------------------------------------------- commands


def _poly(coeffs) -> str:
    terms = []
    for power, c in enumerate(coeffs):
        if c == 0:
            continue
        body = {0: "", 1: "x", 2: "x^2"}[power]
        if body and c == 1:
            text = body
        elif body and c == -1:
            text = "-" + body
        else:
            text = repr(float(c)) + ("*" + body if body else "")
        terms.append(text)
    return " + ".join(terms).replace("+ -", "- ") or "0"


def _map_rows(table, label, build):
    try:
        m = build()
    except ValueError as exc:
        table.add(label, "unavailable: " + str(exc))
        return
    table.add(label + ".sigma", m.sigma)
    table.add(label + ".mu", m.mu)
    if m.bessel_index is not None:
        table.add(label + ".bessel_index", m.bessel_index)


def cmd_info(cfg: RunConfig) -> Table:
    spec = cfg.spec
    sl = tricomi_map(spec.family)
    data = scaling_data(spec)
    table = Table(cfg.resolved(), ["quantity", "value"])
    table.add("p(x)", _poly(sl.p))
    table.add("r(x)", _poly(sl.r))
    half = sl.r[1] / 2.0
    sign = "-" if half < 0 else "+"
    table.add("q(x)", f"({_poly(sl.r)})^2/(4*({_poly(sl.p)})) {sign} {abs(half)!r}")
    table.add("lambda_n", float(sl.lam(spec.n)))
    for key in ("kappa", "kappa_prime", "kappa_dprime", "omega", "t_minus", "t_plus"):
        table.add(key, float(getattr(data, key)))
    table.add("hard_edges", " ".join(f"{side}@{e.location!r}" for side, e in
                                     sorted(data.hard_edges.items())) or "none")
    t = cfg.t if cfg.t is not None else 0.5 * (data.t_minus + data.t_plus)
    _map_rows(table, f"bulk(t={t!r})", lambda: make_map(spec, BULK, t=t))
    for side in ("+", "-"):
        _map_rows(table, f"soft({side})", lambda side=side: make_map(spec, SOFT, side=side))
    for side in ("lower", "upper"):
        _map_rows(table, f"hard({side})", lambda side=side: make_map(spec, HARD, side=side))
    return table


def _scaled_pair(cfg: RunConfig, n: int):
    spec = cfg.spec.with_n(n)
    scaling = make_map(spec, cfg.regime, t=cfg.t, side=cfg.side)
    return kernels.FiniteKernel(spec, scaling), kernels.limit_kernel_for(scaling)


def cmd_kernel(cfg: RunConfig) -> Table:
    finite, limit = _scaled_pair(cfg, cfg.n)
    pts = grid_points(cfg.grid or DEFAULT_GRID[cfg.regime])
    table = Table(cfg.resolved(), ["xi", "eta", "K_n", "K_limit", "abs_error"])

    def row_block(xi):
        eta = pts
        kn = np.atleast_1d(finite(np.full_like(eta, xi), eta))
        kl = np.atleast_1d(limit(np.full_like(eta, xi), eta))
        return kn, kl

    for xi, (kn, kl) in zip(pts, ordered_map(row_block, pts)):
        for eta, a, b in zip(pts, kn, kl):
            table.add(float(xi), float(eta), float(a), float(b), abs(float(a) - float(b)))
    return table


def cmd_density(cfg: RunConfig) -> Table:
    spec = cfg.spec
    finite = kernels.FiniteKernel(spec)
    data = scaling_data(spec)
    grid = cfg.grid
    if grid is None:
        lo, hi = data.t_minus, data.t_plus
        grid = (lo, hi, (hi - lo) / 20.0)
    pts = grid_points(grid)
    lo, hi = data.support
    keep = (pts > lo) & (pts < hi) if spec.name != GUE else np.ones(pts.shape, bool)
    if not np.all(keep):
        print(f"warning: dropped {int(np.count_nonzero(~keep))} grid points outside the support",
              file=sys.stderr)
    pts = pts[keep]
    table = Table(cfg.resolved(), ["t", "rho_n", "rho", "abs_error"])
    values = ordered_map(lambda t: float(kernels.density(finite, t)), pts)
    for t, rn in zip(pts, values):
        r = float(limit_density(spec, t))
        table.add(float(t), rn, r, abs(rn - r))
    mass_n = kernels.density_mass(finite)
    mass = limit_mass(spec)
    table.add("mass", mass_n, mass, abs(mass_n - mass))
    return table


def cmd_gap(cfg: RunConfig) -> Table:
    m = cfg.quad_order
    interval = cfg.interval
    table = Table(cfg.resolved(), ["quantity", "value", "order", "error_estimate"])

    def add_gap(label, kern):
        value = fredholm.gap_probability(kern, interval, m)
        table.add(label, value, m, fredholm.doubling_error(kern, interval, m))

    if cfg.kernel == "finite":
        finite, limit = _scaled_pair(cfg, cfg.n)
        add_gap("E_n", finite)
        add_gap(f"E_{limit.name}", limit)
        return table
    if cfg.kernel == "dyson":
        limit = kernels.DysonKernel()
    elif cfg.kernel == "airy":
        limit = kernels.AiryKernel()
    else:
        limit = kernels.BesselKernel(cfg.alpha or 0.0)
    add_gap(f"E_{limit.name}", limit)
    tr = fredholm.trace(limit, interval, m)
    a, b = interval
    if cfg.kernel == "dyson":
        table.add("trace", tr, m, abs(tr - (b - a)))
    elif cfg.kernel == "airy":
        exact = kernels.airy_trace(a) - kernels.airy_trace(b)
        table.add("trace", tr, m, abs(tr - exact))
        table.add("tau_trace", float(exact), 0, 0.0)
    else:
        table.add("trace", tr, m, abs(tr - fredholm.trace(limit, interval, 2 * m)))
    return table


def cmd_converge(cfg: RunConfig) -> Table:
    pts = grid_points(cfg.grid or DEFAULT_GRID[cfg.regime])
    interval = cfg.interval or DEFAULT_INTERVAL[cfg.regime]
    m = cfg.quad_order
    _, limit = _scaled_pair(cfg, cfg.n_list[0])
    target = limit.name if limit.name != "bessel" else f"bessel({limit.alpha!r})"
    xi, eta = np.meshgrid(pts, pts, indexing="ij")
    k_limit = np.asarray(limit(xi, eta))
    origin_limit = float(limit(0.0, 0.0))
    gap_limit = fredholm.gap_probability(limit, interval, m)

    def one(n):
        finite, lim = _scaled_pair(cfg, n)
        grid_err = float(np.max(np.abs(np.asarray(finite(xi, eta)) - k_limit)))
        diag_err = abs(float(finite(0.0, 0.0)) - origin_limit)
        report = kernels.criterion_T_report(finite, interval, lim, quad_order=m)
        gap_err = abs(fredholm.gap_probability(finite, interval, m) - gap_limit)
        return grid_err, diag_err, abs(report.gap), gap_err

    table = Table(cfg.resolved(), ["n", "target", "grid_error", "diag_error", "trace_gap",
                                   "gap_error"])
    for n, row in zip(cfg.n_list, ordered_map(one, cfg.n_list)):
        table.add(int(n), target, *row)
    return table


COMMANDS = {"info": cmd_info, "kernel": cmd_kernel, "density": cmd_density, "gap": cmd_gap,
            "converge": cmd_converge}


def run(cfg: RunConfig) -> str:
    text = COMMANDS[cfg.command](cfg).render(cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"dpp-scaling: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        run(cfg)
    except (ScalingError, ValueError) as exc:
        # points that escape the support, bad intervals for the kernel, ...
        print(f"dpp-scaling: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        print(f"dpp-scaling: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
