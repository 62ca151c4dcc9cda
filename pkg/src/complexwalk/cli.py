"""Command-line driver.

Every subcommand parses flags, calls the library and writes CSV or JSON with
a header block (version, config echo, seed).  Exit codes: 0 success,
1 numerical range / refused computation, 2 usage error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import sys

import click
import numpy as np

from . import __version__
from . import boundary as bnd
from . import characteristic as ch
from . import walk
from .datafiles import boundary_from_csv, read_datum
from .errors import (
    InvalidOrderError,
    NumericalRangeError,
    ResourceCapError,
    UnsupportedError,
)
from .montecarlo import block_rng
from .solver import SolveRequest, convergence_study, solve
from .step import ModelParams, parse_complex


class RefusedError(click.ClickException):
    exit_code = 1


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (NumericalRangeError, UnsupportedError, ResourceCapError) as exc:
            raise RefusedError(str(exc)) from exc
        except (InvalidOrderError, ValueError) as exc:
            raise click.UsageError(str(exc)) from exc

    return wrapper


def _params(order: int, alpha: str) -> ModelParams:
    return ModelParams(order, parse_complex(alpha))


def _int_list(text: str) -> list[int]:
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _grid(text: str | None, default=(-math.pi, math.pi, 257)) -> np.ndarray:
    """``start:stop:num`` or a comma list."""
    if not text:
        return np.linspace(*default[:2], int(default[2]))
    if ":" in text:
        a, b, num = text.split(":")
        return np.linspace(float(a), float(b), int(num))
    return np.array(_float_list(text))


def _header(config: dict) -> dict:
    ctx = click.get_current_context()
    return {
        "tool": f"complexwalk {__version__}",
        "command": ctx.command_path,
        "config": config,
        "seed": config.get("seed"),
    }


def _emit(text: str, out: str) -> None:
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _write_csv(rows: list[list], columns: list[str], config: dict, out: str) -> None:
    head = _header(config)
    buf = io.StringIO()
    buf.write(f"# {head['tool']}\n")
    buf.write(f"# command: {head['command']}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    buf.write(f"# seed: {head['seed']}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    _emit(buf.getvalue(), out)


def _write_json(data, config: dict, out: str) -> None:
    payload = {"meta": _header(config), "data": data}
    _emit(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n", out)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, complex):
        return [v.real, v.imag]
    return str(v)


def _emit_table(rows, columns, config, out, fmt):
    if fmt == "json":
        _write_json([dict(zip(columns, r)) for r in rows], config, out)
    else:
        _write_csv(rows, columns, config, out)


def model_options(fn):
    fn = click.option("--alpha", default="1,0", show_default=True, help="Coefficient as re,im.")(fn)
    fn = click.option("--order", type=int, required=True, help="Order N >= 2.")(fn)
    return fn


def output_options(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)(fn)
    fn = click.option("--out", default="-", show_default=True, help="Output path, '-' for stdout.")(fn)
    return fn


def _config_defaults(cmd: click.Command, flat: dict) -> dict:
    """Nest a flat ``{flag: value}`` mapping into a click ``default_map``."""
    norm = {k.lstrip("-").replace("-", "_"): v for k, v in flat.items()}
    if isinstance(cmd, click.Group):
        return {name: _config_defaults(sub, flat) for name, sub in cmd.commands.items()}
    return {p.name: norm[p.name] for p in cmd.params if p.name in norm}


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="complexwalk")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON file of flag values; command-line flags override it.")
@click.pass_context
def main(ctx, config_path):
    """Random walks on the complex plane and N-th order heat-type equations."""
    if config_path:
        with open(config_path, encoding="utf-8") as fh:
            flat = json.load(fh)
        if not isinstance(flat, dict):
            raise click.UsageError("config file must hold a JSON object")
        ctx.default_map = _config_defaults(ctx.command, flat)


@main.group("walk")
def walk_group():
    """Walk paths, exact laws and return statistics."""


@walk_group.command("sample")
@model_options
@click.option("--n", type=int, required=True, help="Steps per unit time.")
@click.option("--t", "t", type=float, default=1.0, show_default=True)
@click.option("--replicas", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--raw", is_flag=True, help="Write unscaled partial sums S_k.")
@click.option("--out", default="-", show_default=True)
@handle_errors
def walk_sample(order, alpha, n, t, replicas, seed, raw, out):
    """Path traces of W_n on [0, t] (or [t, 0]) as replica,step,re,im."""
    params = _params(order, alpha)
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    rows = []
    for r in range(replicas):
        path = walk.sample_path(params, n, t, block_rng(seed, r), seed=seed, scaled=not raw)
        zero = int(np.argmin(np.abs(path.times)))
        for i, z in enumerate(path.values):
            rows.append([r, i - zero, float(z.real), float(z.imag)])
    config = dict(order=order, alpha=alpha, n=n, t=t, replicas=replicas, seed=seed, raw=raw)
    _write_csv(rows, ["replica", "step", "re", "im"], config, out)


@walk_group.command("dist")
@model_options
@click.option("--n", type=int, required=True)
@click.option("--cap", type=int, default=walk.STATE_CAP, show_default=True)
@output_options
@handle_errors
def walk_dist(order, alpha, n, cap, out, fmt):
    """Exact law of S_n on the cyclotomic lattice."""
    params = _params(order, alpha)
    dist = walk.enumerate_distribution(params, n, cap)
    rows = []
    for coeffs, count in dist.rows():
        z = walk.CyclotomicPoint(coeffs, order).to_complex(params)
        rows.append([" ".join(map(str, coeffs)), count, str(dist.probability(walk.CyclotomicPoint(coeffs, order))), z.real, z.imag])
    config = dict(order=order, alpha=alpha, n=n, cap=cap)
    _emit_table(rows, ["coeffs", "count", "probability", "re", "im"], config, out, fmt)


@walk_group.command("returns")
@click.option("--order", type=int, required=True)
@click.option("--m-max", type=int, required=True)
@click.option("--enum-max-steps", type=int, default=40, show_default=True,
              help="Cross-check by enumeration while N*m stays below this.")
@output_options
@handle_errors
def walk_returns(order, m_max, enum_max_steps, out, fmt):
    """P(S_{Nm} = 0) for m = 1..m_max: closed form (prime N) and enumeration."""
    ModelParams(order)
    if m_max < 1:
        raise ValueError("m-max must be >= 1")
    prime = walk._is_prime(order)
    top = min(m_max, enum_max_steps // order)
    origin = walk.origin_probabilities(order, order * top) if top >= 1 else []
    rows = []
    for m in range(1, m_max + 1):
        closed = walk.return_probability_closed(order, m) if prime else None
        enum = origin[order * m] if m <= top else None
        p = closed if closed is not None else enum
        if p is None:
            continue
        rows.append([
            m,
            str(p),
            float(p),
            "closed" if closed is not None else "enumeration",
            "" if enum is None else str(enum),
            walk.return_asymptote(order, m) if prime else "",
        ])
    config = dict(order=order, m_max=m_max, enum_max_steps=enum_max_steps)
    cols = ["m", "probability", "probability_float", "method", "enumerated", "asymptote"]
    _emit_table(rows, cols, config, out, fmt)


@walk_group.command("stats")
@model_options
@click.option("--kind", type=click.Choice(["recurrence", "neighborhood", "escape"]), required=True)
@click.option("--m-max", type=int, default=200, show_default=True)
@click.option("--max-steps", type=int, default=160, show_default=True)
@click.option("--epsilon", type=float, default=1.0, show_default=True)
@click.option("--n-max", type=int, default=10000, show_default=True)
@click.option("--n", "n_list", default="100,1000,10000", show_default=True, help="Escape: comma list of n.")
@click.option("--replicas", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", default="-", show_default=True)
@handle_errors
def walk_stats(order, alpha, kind, m_max, max_steps, epsilon, n_max, n_list, replicas, seed, workers, out):
    """Recurrence diagnostics, neighbourhood visits, escape probabilities (JSON)."""
    params = _params(order, alpha)
    if kind == "recurrence":
        data = walk.recurrence_diagnostic(params, m_max, max_steps).to_dict()
        config = dict(order=order, alpha=alpha, kind=kind, m_max=m_max, max_steps=max_steps)
    elif kind == "neighborhood":
        data = walk.neighborhood_visit_stats(params, epsilon, n_max, replicas, seed, workers=workers).to_dict()
        config = dict(order=order, alpha=alpha, kind=kind, epsilon=epsilon, n_max=n_max, replicas=replicas, seed=seed)
    else:
        data = [
            walk.escape_probability(params, n, epsilon, replicas, seed, workers).__dict__
            for n in _int_list(n_list)
        ]
        config = dict(order=order, alpha=alpha, kind=kind, epsilon=epsilon, n=n_list, replicas=replicas, seed=seed)
    _write_json(data, config, out)


@main.group("clt")
def clt_group():
    """Convergence of the rescaled walk's characteristic function."""


@clt_group.command("check")
@model_options
@click.option("--lambda", "lam", default="1,0", show_default=True, help="re,im")
@click.option("--n-grid", default="100,1000,10000,100000", show_default=True)
@output_options
@handle_errors
def clt_check(order, alpha, lam, n_grid, out, fmt):
    """Table of psi_n(lambda), its limit and n |error| against the predicted constant."""
    params = _params(order, alpha)
    grid = _int_list(n_grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n-grid must be increasing")
    table = ch.clt_table(params, parse_complex(lam), grid)
    cols = list(table[0])
    config = dict(order=order, alpha=alpha, **{"lambda": lam}, n_grid=n_grid)
    _emit_table([[r[c] for c in cols] for r in table], cols, config, out, fmt)


@main.command("moments")
@model_options
@click.option("--n", type=int, required=True)
@click.option("--k-max", type=int, required=True)
@click.option("--enumerate", "enum", is_flag=True, help="Add exact-enumeration moments.")
@output_options
@handle_errors
def moments(order, alpha, n, k_max, enum, out, fmt):
    """Moments of n**(-1/N) S_n by Faa di Bruno, their limits, optionally by enumeration."""
    params = _params(order, alpha)
    dist = walk.enumerate_distribution(params, n) if enum else None
    rows = []
    for k in range(1, k_max + 1):
        fb = ch.moment_faadibruno(params, n, k)
        lim = ch.moment_limit(params, k)
        row = [k, fb.real, fb.imag, lim.real, lim.imag]
        if dist is not None:
            e = dist.moment(params, k)
            row += [e.real, e.imag]
        rows.append(row)
    cols = ["k", "faadibruno_re", "faadibruno_im", "limit_re", "limit_im"]
    if dist is not None:
        cols += ["enumeration_re", "enumeration_im"]
    config = dict(order=order, alpha=alpha, n=n, k_max=k_max, enumerate=enum)
    _emit_table(rows, cols, config, out, fmt)


def _solve_options(fn):
    for opt in reversed([
        click.option("--datum", "datum_path", type=click.Path(exists=True, dir_okay=False), required=True),
        click.option("--t", "t", type=float, required=True),
        click.option("--t0", type=float, default=0.0, show_default=True),
        click.option("--x-grid", default=None, help="start:stop:num or comma list [default -pi:pi:257]"),
    ]):
        fn = opt(fn)
    return fn


@main.command("solve")
@model_options
@_solve_options
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--method", type=click.Choice(["spectral", "walk-exact", "walk-mc"]), default="walk-exact", show_default=True)
@click.option("--replicas", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", default="-", show_default=True)
@handle_errors
def solve_cmd(order, alpha, datum_path, t, t0, x_grid, n, method, replicas, seed, workers, out):
    """u_n(t, x) = E[f(x + W_n(t - t0))] next to the exact solution."""
    params = _params(order, alpha)
    datum, _ = read_datum(datum_path)
    req = SolveRequest(params, datum, t, _grid(x_grid), n, method, replicas, seed, t0, workers)
    res = solve(req)
    text = res.to_csv()
    config = dict(order=order, alpha=alpha, datum=datum_path, t=t, t0=t0, x_grid=x_grid, n=n,
                  method=method, replicas=replicas, seed=seed)
    rows = list(csv.reader(text.splitlines()))
    _write_csv(rows[1:], rows[0], config, out)


@main.command("convergence")
@model_options
@_solve_options
@click.option("--n-grid", default="100,1000,10000,100000", show_default=True)
@click.option("--epsilon", type=float, default=0.1, show_default=True)
@click.option("--out", default="-", show_default=True)
@handle_errors
def convergence_cmd(order, alpha, datum_path, t, t0, x_grid, n_grid, epsilon, out):
    """Sup-grid error of walk-exact vs n, fitted slope and the C(t)/n bound (JSON)."""
    params = _params(order, alpha)
    datum, _ = read_datum(datum_path)
    rep = convergence_study(params, datum, t, _grid(x_grid), _int_list(n_grid), t0, epsilon)
    config = dict(order=order, alpha=alpha, datum=datum_path, t=t, t0=t0, x_grid=x_grid,
                  n_grid=n_grid, epsilon=epsilon)
    _write_json(rep.to_dict(), config, out)


@main.command("boundary")
@model_options
@click.option("--bc", type=click.Choice(list(bnd.KINDS)), default=None,
              help="Boundary kind; overrides the datum file header.")
@click.option("--L", "L", type=float, default=None)
@click.option("--datum", "datum_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--sine", default=None, help="Sine coefficients b_1,b_2,... on [0, L].")
@click.option("--cosine", default=None, help="Cosine coefficients a_0,a_1,... on [0, L].")
@click.option("--t", "t", type=float, required=True)
@click.option("--x-grid", default=None, help="start:stop:num [default 0:L:129]")
@click.option("--n", type=int, default=1000, show_default=True)
@click.option("--method", type=click.Choice(["spectral", "walk-exact", "walk-mc"]), default="walk-exact", show_default=True)
@click.option("--replicas", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", default="-", show_default=True)
@handle_errors
def boundary_cmd(order, alpha, bc, L, datum_path, sine, cosine, t, x_grid, n, method, replicas, seed, workers, out):
    """Dirichlet / Neumann / periodic problems by symmetric extension."""
    params = _params(order, alpha)
    sources = [s for s in (datum_path, sine, cosine) if s]
    if len(sources) != 1:
        raise ValueError("give exactly one of --datum, --sine, --cosine")
    if datum_path:
        with open(datum_path, encoding="utf-8") as fh:
            bd = boundary_from_csv(fh.read(), bc, L)
    else:
        if L is None:
            raise ValueError("--sine/--cosine need --L")
        bd = bnd.sine_series(L, _float_list(sine)) if sine else bnd.cosine_series(L, _float_list(cosine))
        if bc is not None and bc != bd.kind:
            raise ValueError(f"--{'sine' if sine else 'cosine'} builds a {bd.kind} datum, not {bc}")
    if not bnd.closure_check(params, bd):
        raise UnsupportedError(
            f"refusing {bd.kind} problem for odd N={order}: the generator does not preserve "
            "odd/even data when N is odd"
        )
    hi = bd.L if bd.L is not None else math.pi
    x = _grid(x_grid, default=(0.0, hi, 129))
    u = bnd.boundary_solve(params, bd, t, x, "spectral")
    se = None
    if method == "spectral":
        un = u
    elif method == "walk-exact":
        un = bnd.boundary_solve(params, bd, t, x, method, n)
    else:
        if not replicas or seed is None:
            raise ValueError("walk-mc needs --replicas and --seed")
        un, se = bnd.boundary_solve(params, bd, t, x, method, n, replicas, seed, workers)
    cols = ["x", "u_re", "u_im", "un_re", "un_im", "abs_err"] + (["stderr"] if se is not None else [])
    rows = []
    for i, xi in enumerate(x):
        r = [float(xi), float(u[i].real), float(u[i].imag), float(un[i].real), float(un[i].imag), float(abs(u[i] - un[i]))]
        if se is not None:
            r.append(float(se[i]))
        rows.append(r)
    config = dict(order=order, alpha=alpha, bc=bd.kind, L=bd.L, datum=datum_path, sine=sine,
                  cosine=cosine, t=t, x_grid=x_grid, n=n, method=method, replicas=replicas, seed=seed)
    _write_csv(rows, cols, config, out)


if __name__ == "__main__":
    sys.exit(main())
