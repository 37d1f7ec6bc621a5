"""Command-line front end: every evaluator and experiment as a subcommand.

Tables are written as CSV (shortest round-trip floats, LF endings, one
``#``-prefixed JSON metadata line) or JSON, always atomically.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import Any, Sequence

import numpy as np

from . import __version__
from .ctrw import (DiracUnit, ctrw_pdf_series, simulate_ctrw, symmetric_unit_jump,
                   uniform_waiting_density, universality_gap)
from .errors import ConvergenceError, DomainError, MLQError
from .mittag_leffler import MLParams, ml
from .numerics import worker_count
from .relaxation import (e_alpha, e_alpha_array, e_approx_long, e_approx_short, phi_alpha,
                         spectral_density)
from .renewal import (Exponential, MittagLeffler, PowerLaw, frac_poisson_pmf,
                      simulate_counts)
from .wright import (DiffusionConfig, WrightParams, green_cauchy, green_signalling, m_wright,
                     wright)

__all__ = ["main", "run", "write_table", "read_table", "format_value"]

Row = list[Any]


# --- table I/O -----------------------------------------------------------------

def format_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _parse_value(s: str) -> Any:
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def _jsonable(v: Any) -> Any:
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        # JSON has no infinities; phi_alpha(0) is the only source
        return float(v) if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render_table(meta: dict, columns: Sequence[str], rows: Sequence[Row], fmt: str) -> str:
    if fmt == "json":
        body = {"meta": meta, "columns": list(columns),
                "rows": [[_jsonable(v) for v in r] for r in rows]}
        return json.dumps(body, sort_keys=True, allow_nan=False) + "\n"
    lines = ["# " + json.dumps(meta, sort_keys=True), ",".join(columns)]
    lines += [",".join(format_value(v) for v in r) for r in rows]
    return "\n".join(lines) + "\n"


def write_table(path: str, meta: dict, columns: Sequence[str], rows: Sequence[Row],
                fmt: str = "csv") -> None:
    """Write a table to ``path`` (``-`` for stdout) via temp file and rename."""
    text = render_table(meta, columns, rows, fmt)
    if path == "-":
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".mlq-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_table(path: str) -> tuple[dict, list[str], list[Row]]:
    """Inverse of :func:`write_table` for either format."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        body = json.loads(text)
        return body["meta"], body["columns"], body["rows"]
    meta: dict = {}
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    data = []
    for line in lines:
        if line.startswith("#"):
            meta.update(json.loads(line[1:]))
        else:
            data.append(line)
    columns = data[0].split(",")
    rows = [[_parse_value(c) for c in line.split(",")] for line in data[1:]]
    return meta, columns, rows


# --- argument types ----------------------------------------------------------------

def _floats(s: str) -> list[float]:
    try:
        out = [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")
    if not out or not all(math.isfinite(x) for x in out):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {s!r}")
    return out


def _positive_int(s: str) -> int:
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")
    return n


def _grid(lo: float, hi: float, n: int, log: bool = False) -> np.ndarray:
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def _label(name: str, v: float) -> str:
    return f"{name}={v!r}"


# --- commands ------------------------------------------------------------------------

def cmd_eval(a) -> tuple[list[str], list[Row]]:
    p = MLParams(a.alpha, a.beta, a.gamma)
    rows = []
    for z in a.z:
        r = ml(p, z)
        rows.append([z, r.value, r.est_error, r.method.value])
    return ["z", "value", "est_error", "method"], rows


def cmd_relax(a):
    t = a.t if a.t is not None else list(_grid(0.0, a.tmax, a.points))
    rows = []
    for ti in t:
        phi = phi_alpha(a.alpha, ti) if ti > 0 else math.inf
        rows.append([ti, e_alpha(a.alpha, ti).value, phi])
    return ["t", "e_alpha", "phi_alpha"], rows


def cmd_spectrum(a):
    r = a.r if a.r is not None else list(_grid(a.rmin, a.rmax, a.points, log=True))
    return ["r", "K"], [[x, float(spectral_density(a.alpha, x))] for x in r]


def cmd_wright(a):
    p = WrightParams(a.lam, a.mu)
    rows = []
    for z in a.z:
        r = wright(p, z)
        rows.append([z, r.value, r.est_error, r.method.value])
    return ["z", "value", "est_error", "method"], rows


def cmd_green(a):
    cfg = DiffusionConfig(a.nu, a.diffusivity)
    fn = green_cauchy if a.problem == "cauchy" else green_signalling
    return ["x", "G"], [[x, fn(cfg, x, a.t)] for x in a.x]


def cmd_poisson(a):
    ks = list(range(a.kmax + 1))
    pmf = [frac_poisson_pmf(a.beta, a.t, k) for k in ks]
    if a.paths is None:
        return ["k", "pmf"], [[k, p] for k, p in zip(ks, pmf)]
    law = Exponential(1.0) if a.beta == 1.0 else MittagLeffler(a.beta)
    counts = simulate_counts(law, [a.t], a.paths, a.seed, method=a.sampler)[:, 0]
    freq = np.bincount(counts.astype(np.int64), minlength=a.kmax + 1)[: a.kmax + 1] / a.paths
    return ["k", "pmf", "mc"], [[k, p, float(f)] for k, p, f in zip(ks, pmf, freq)]


def _jump(name: str):
    return DiracUnit() if name == "unit" else symmetric_unit_jump()


def cmd_ctrw(a):
    jump = _jump(a.jump)
    dens = ctrw_pdf_series(jump, a.beta, a.t, k_max=a.kmax)
    x, m = dens.site_masses()
    sites = x.astype(np.int64)
    if a.paths is None:
        return ["x", "p"], [[int(s), float(v)] for s, v in zip(sites, m)]
    law = Exponential(1.0) if a.beta == 1.0 else MittagLeffler(a.beta)
    pos = np.rint(simulate_ctrw(jump, law, a.t, a.paths, a.seed, method=a.sampler)).astype(np.int64)
    lo = min(int(sites[0]), int(pos.min()))
    hi = max(int(sites[-1]), int(pos.max()))
    freq = np.bincount(pos - lo, minlength=hi - lo + 1) / a.paths
    exact = dict(zip(sites.tolist(), m.tolist()))
    return ["x", "p", "mc"], [[s, exact.get(s, 0.0), float(freq[s - lo])] for s in range(lo, hi + 1)]


def _law(a):
    if a.law == "exponential":
        return Exponential(a.rate)
    if a.law == "pareto":
        return PowerLaw(a.beta, a.c)
    if a.law == "ml":
        return MittagLeffler(a.beta)
    return uniform_waiting_density(a.width)


def cmd_universality(a):
    law = _law(a)
    rows = [[tau, s, universality_gap(law, tau, s)] for s in a.s for tau in a.taus]
    return ["tau", "s", "gap"], rows


# figure defaults follow the published plots
_FIG_ALPHAS = {1: [0.25, 0.5, 0.75, 0.9], 2: [0.25, 0.5, 0.75, 0.9, 1.0], 3: [0.25, 0.5],
               4: [0.75, 0.9], 5: [0.25, 0.5, 0.75, 1.0]}
_FIG_NUS = {6: [0.0, 0.125, 0.25, 0.375, 0.5], 7: [0.5, 0.625, 0.75, 0.875]}


def _m_symmetric(nu: float, x: float) -> float:
    if nu == 0.0:
        return math.exp(-abs(x))  # M_0(x) = exp(-x)
    return m_wright(nu, abs(x))


def cmd_figure(a):
    fid = a.id
    if fid in (6, 7):
        nus = a.nus or _FIG_NUS[fid]
        x = _grid(-a.xmax, a.xmax, a.points or 401)
        cols = ["x"]
        for nu in nus:
            cols += [_label("M", nu), _label("Gc", nu)]
        rows = []
        for xi in x:
            row: Row = [float(xi)]
            for nu in nus:
                m = _m_symmetric(nu, xi)
                row += [m, 0.5 * m]
            rows.append(row)
        return cols, rows
    alphas = a.alphas or _FIG_ALPHAS[fid]
    if fid == 1:
        n = a.points or 200
        r = _grid(a.rmax / n, a.rmax, n)
        cols = ["r"] + [_label("K", al) for al in alphas]
        vals = [np.asarray(spectral_density(al, r), dtype=float) for al in alphas]
        return cols, [[float(ri)] + [float(v[i]) for v in vals] for i, ri in enumerate(r)]
    if fid == 2:
        t = _grid(0.0, a.tmax or 15.0, a.points or 300)
        cols = ["t"] + [_label("e", al) for al in alphas]
        vals = [e_alpha_array(al, t) for al in alphas]
        return cols, [[float(ti)] + [float(v[i]) for v in vals] for i, ti in enumerate(t)]
    if fid in (3, 4):
        t = _grid(a.tmin or 1e-5, a.tmax or 1e5, a.points or 201, log=True)
        cols = ["t"]
        for al in alphas:
            cols += [_label("e", al), _label("e0", al), _label("einf", al),
                     _label("relerr0", al), _label("relerrinf", al)]
        vals = [e_alpha_array(al, t) for al in alphas]
        rows = []
        for i, ti in enumerate(t):
            row = [float(ti)]
            for al, v in zip(alphas, vals):
                e = float(v[i])
                e0, einf = e_approx_short(al, ti), e_approx_long(al, ti)
                row += [e, e0, einf, abs(e0 - e) / e, abs(einf - e) / e]
            rows.append(row)
        return cols, rows
    # figure 5
    tmax = a.tmax or 5.0
    n = a.points or 250
    t = _grid(tmax / n, tmax, n)
    cols = ["t"] + [_label("phi", al) for al in alphas]
    return cols, [[float(ti)] + [phi_alpha(al, ti) for al in alphas] for ti in t]


_COMMANDS = {
    "eval": cmd_eval, "relax": cmd_relax, "spectrum": cmd_spectrum, "wright": cmd_wright,
    "green": cmd_green, "poisson": cmd_poisson, "ctrw": cmd_ctrw,
    "universality": cmd_universality, "figure": cmd_figure,
}
_STOCHASTIC = {"poisson", "ctrw"}


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlq", description="Mittag-Leffler and Wright function toolkit")
    parser.add_argument("--version", action="version", version=f"mlq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str, default_format: str = "csv") -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        return p

    p = add("eval", "Mittag-Leffler function E^gamma_{alpha,beta}(z)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--z", type=_floats, required=True)

    p = add("relax", "relaxation function e_alpha(t) and its derivative phi_alpha(t)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=_floats)
    p.add_argument("--tmax", type=float, default=15.0)
    p.add_argument("--points", type=_positive_int, default=151)

    p = add("spectrum", "spectral density K_alpha(r)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r", type=_floats)
    p.add_argument("--rmin", type=float, default=1e-3)
    p.add_argument("--rmax", type=float, default=1e3)
    p.add_argument("--points", type=_positive_int, default=61)

    p = add("wright", "Wright function W_{lambda,mu}(z)")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=_floats, required=True)

    p = add("green", "Green functions of the time-fractional diffusion-wave equation")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--diffusivity", type=float, default=1.0)
    p.add_argument("--problem", choices=("cauchy", "signalling"), default="cauchy")
    p.add_argument("--x", type=_floats, required=True)
    p.add_argument("--t", type=float, required=True)

    p = add("poisson", "fractional Poisson counting distribution", default_format="json")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--paths", type=_positive_int, help="add a Monte-Carlo column")
    p.add_argument("--seed", type=int)
    p.add_argument("--sampler", choices=("inversion", "mixture"), default="inversion")

    p = add("ctrw", "CTRW lattice density, optionally with a Monte-Carlo histogram")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--jump", choices=("symmetric", "unit"), default="symmetric")
    p.add_argument("--kmax", type=_positive_int, default=200)
    p.add_argument("--paths", type=_positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sampler", choices=("inversion", "mixture"), default="inversion")

    p = add("universality", "gap between a rescaled-respeeded law and the Mittag-Leffler law")
    p.add_argument("--law", choices=("exponential", "pareto", "ml", "uniform"), default="pareto")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--width", type=float, default=2.0)
    p.add_argument("--taus", type=_floats, default=[1e-1, 1e-2, 1e-3, 1e-4])
    p.add_argument("--s", type=_floats, default=[0.5, 1.0, 2.0])

    p = add("figure", "data behind figures 1-7")
    p.add_argument("--id", type=int, choices=range(1, 8), required=True)
    p.add_argument("--alphas", type=_floats)
    p.add_argument("--nus", type=_floats)
    p.add_argument("--tmin", type=float)
    p.add_argument("--tmax", type=float)
    p.add_argument("--rmax", type=float, default=2.0)
    p.add_argument("--xmax", type=float, default=5.0)
    p.add_argument("--points", type=_positive_int)
    return parser


_IO_KEYS = {"command", "output", "format"}


def run(args: argparse.Namespace) -> None:
    """Execute a parsed command and write its table."""
    columns, rows = _COMMANDS[args.command](args)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _IO_KEYS | {"seed"}}
    meta = {"command": args.command, "parameters": params,
            "seed": getattr(args, "seed", None), "version": __version__}
    write_table(args.output, meta, columns, rows, args.format)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in _STOCHASTIC and args.paths is not None and args.seed is None:
        parser.error(f"{args.command} --paths requires --seed")
    try:
        worker_count()
    except DomainError as exc:
        parser.error(str(exc))
    try:
        run(args)
    except DomainError as exc:
        print(f"error: domain: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ConvergenceError, MLQError) as exc:
        print(f"error: numeric: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        print(f"error: domain: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
