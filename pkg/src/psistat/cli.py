"""Command line front end.

Every command accepts ``--config FILE`` (a JSON object whose keys are the
long option names with dashes or underscores); options given on the command
line override the file.  Reports are JSON by default; ``--format csv`` writes
the command's tabular data instead.

Exit status: 0 success, 2 configuration error, 3 input error,
4 numerical or convergence error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .basis import BasisSet
from .charfunc import (
    charfunc_from_density,
    charfunc_via_momentum_convolution,
    moment_from_charfunc,
    momentum_charfunc_via_coordinate_convolution,
    symmetric_grid,
    validate_charfunc,
)
from .errors import ConfigError, InputError, PsiStatError
from .estimation import (
    cramer_rao_experiment,
    fit_root,
    make_family,
    root_covariance,
    root_fisher,
    root_log_likelihood,
)
from .finite import evolve, fidelity, schmidt
from .grid import (
    Grid,
    MomentumState,
    decompose_density_phase,
    density,
    to_coordinate,
    to_momentum,
)
from .io import (
    charfunc_to_csv,
    complex_pairs,
    finite_state_from_json,
    fmt,
    load_json,
    matrix_to_csv,
    operator_from_json,
    read_sample,
    read_state_csv,
    write_state_csv,
)
from .states import random_hermite_state
from .estimation.sampling import rng_for
from .uncertainty import (
    commutator_residual,
    heisenberg_check,
    matrix_uncertainty_check,
    moment_report,
    robertson_check,
)

COMMANDS = ("analyze", "charfunc", "uncertainty", "cramer-rao", "fit-root", "finite")


class ConfigParse(ConfigError):
    module = "cli"


class InputFileNotFound(InputError):
    module = "cli"


def bundled_fixture(name: str = "gaussian_min.csv") -> Path:
    return Path(str(resources.files("psistat") / "data" / name))


@dataclass
class ExperimentConfig:
    command: str
    input: str | None = None
    out: str | None = None
    format: str = "json"
    seed: int = 0
    grid: tuple = (1024, 20.0)
    basis: str = "hermite"
    s: int = 2
    n: int = 1000
    replications: int = 2000
    family: str = "gaussian_location"
    theta: tuple = (0.0,)
    sigma: float = 1.0
    estimator: str = "sample_mean"
    dump_state: str | None = None
    kmax: int = 64
    moment_step: float = 0.01
    random: int = 0
    order: int = 8

    def echo(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["grid"] = list(self.grid)
        out["theta"] = list(self.theta)
        return out


def _parse_grid(value) -> tuple:
    if isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        parts = str(value).split(",")
    try:
        n, length = int(parts[0]), float(parts[1])
        Grid(n, length)
    except (ValueError, IndexError, PsiStatError) as exc:
        raise ConfigParse(f"bad grid spec {value!r}: expected N,L with N a power of two >= 8 ({exc})") from None
    return (n, length)


def _parse_floats(value) -> tuple:
    if isinstance(value, (list, tuple)):
        items = value
    elif isinstance(value, (int, float)):
        items = [value]
    else:
        items = str(value).split(",")
    try:
        return tuple(float(v) for v in items)
    except ValueError:
        raise ConfigParse(f"bad number list {value!r}") from None


_CONVERTERS = {
    "seed": int, "s": int, "n": int, "replications": int, "kmax": int, "random": int,
    "order": int, "sigma": float, "moment_step": float,
    "grid": _parse_grid, "theta": _parse_floats,
}


def build_config(command: str, cli_values: dict, config_path: str | None) -> ExperimentConfig:
    file_values: dict = {}
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise InputFileNotFound(f"config file {config_path} not found")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigParse(f"{config_path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigParse(f"{config_path}: top level must be an object")
        file_values = {k.replace("-", "_"): v for k, v in loaded.items()}
        if file_values.get("command", command) != command:
            raise ConfigParse(f"config is for {file_values['command']!r}, not {command!r}")
        file_values.pop("command", None)
    known = {f.name for f in fields(ExperimentConfig)} - {"command"}
    unknown = set(file_values) - known
    if unknown:
        raise ConfigParse(f"unknown config keys: {sorted(unknown)}")
    merged = {**file_values, **{k: v for k, v in cli_values.items() if v is not None}}
    cfg = ExperimentConfig(command)
    for key, value in merged.items():
        conv = _CONVERTERS.get(key)
        try:
            setattr(cfg, key, conv(value) if conv else value)
        except (TypeError, ValueError):
            raise ConfigParse(f"bad value for {key}: {value!r}") from None
    if cfg.format not in ("json", "csv"):
        raise ConfigParse(f"format must be json or csv, got {cfg.format!r}")
    if not 0 <= cfg.seed < 2 ** 64:
        raise ConfigParse("seed must be an unsigned 64-bit integer")
    if command == "cramer-rao" and cfg.replications < 100:
        raise ConfigParse(f"replications must be at least 100, got {cfg.replications}")
    return cfg


def _require_input(cfg: ExperimentConfig, default: Path | None = None) -> Path:
    if cfg.input is None:
        if default is None:
            raise ConfigParse(f"{cfg.command} needs --input")
        return default
    path = Path(cfg.input)
    if not path.exists():
        raise InputFileNotFound(f"input file {cfg.input} not found")
    return path


def _load_coord_state(cfg: ExperimentConfig, default: Path | None = None):
    state = read_state_csv(_require_input(cfg, default))
    if isinstance(state, MomentumState):
        state = to_coordinate(state)
    return state


def _csv_table(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def cmd_analyze(cfg: ExperimentConfig):
    state = _load_coord_state(cfg, bundled_fixture())
    mom = to_momentum(state)
    report = moment_report(state)
    mat = matrix_uncertainty_check([[report.var_x]], [[report.var_p]])
    results = {
        "grid": [state.grid.n_points, state.grid.length],
        "norm_x": state.norm(),
        "norm_p": mom.norm(),
        "moments": report.to_dict(),
        "product": report.product,
        "heisenberg": heisenberg_check(report),
        "robertson": robertson_check(report),
        "robertson_bound": report.factor_k ** 2 / 4,
        "commutator_residual": commutator_residual(state),
        "matrix_check": mat.to_dict(),
    }
    if cfg.dump_state:
        write_state_csv(cfg.dump_state, state)
    rho, phase = decompose_density_phase(state)
    table = _csv_table(("x", "density", "phase", "p", "momentum_density"),
                       (state.grid.x, rho.values, phase.values, mom.grid.p,
                        np.abs(mom.amplitudes) ** 2))
    return results, table


def cmd_charfunc(cfg: ExperimentConfig):
    state = _load_coord_state(cfg, bundled_fixture())
    g = state.grid
    mom = to_momentum(state)
    u = symmetric_grid(g.dp, min(cfg.kmax, g.n_points // 2))
    t = symmetric_grid(g.dx, min(cfg.kmax, g.n_points // 2))
    f_density = charfunc_from_density(density(state), u)
    f_conv = charfunc_via_momentum_convolution(mom, u)
    ft_density = charfunc_from_density(density(mom), t)
    ft_conv = momentum_charfunc_via_coordinate_convolution(state, t)
    full = charfunc_from_density(density(state), symmetric_grid(g.dp, g.n_points // 2))
    validity = validate_charfunc(full, g)
    fine = charfunc_from_density(density(state), symmetric_grid(cfg.moment_step, 8))
    x = g.x
    rho = density(state).values
    results = {
        "u_step": g.dp,
        "kmax": int(u.size // 2),
        "coordinate_route_difference": float(np.max(np.abs(f_density.values - f_conv.values))),
        "momentum_route_difference": float(np.max(np.abs(ft_density.values - ft_conv.values))),
        "f_at_zero": complex_pairs(f_density.at_zero()),
        "validity": {
            "is_valid": validity.is_valid,
            "min_reconstructed_density": validity.min_reconstructed_density,
            "normalization_defect": validity.normalization_defect,
        },
        "moments": [moment_from_charfunc(fine, k) for k in range(5)],
        "quadrature_moments": [float(np.sum(x ** k * rho) * g.dx) for k in range(5)],
    }
    return results, charfunc_to_csv(f_density)


def cmd_uncertainty(cfg: ExperimentConfig):
    if cfg.random > 0:
        grid = Grid(*cfg.grid)
        products, k_bounds = [], []
        heis = rob = 0
        for r in range(cfg.random):
            rep = moment_report(random_hermite_state(grid, rng_for(cfg.seed, r), cfg.order))
            products.append(rep.product)
            k_bounds.append(rep.factor_k ** 2 / 4)
            heis += heisenberg_check(rep)
            rob += robertson_check(rep)
        results = {
            "states": cfg.random,
            "min_product": min(products),
            "heisenberg_satisfied": heis,
            "robertson_satisfied": rob,
        }
        table = _csv_table(("index", "product", "robertson_bound"),
                           (range(cfg.random), products, k_bounds))
        return results, table
    state = _load_coord_state(cfg)
    report = moment_report(state)
    mat = matrix_uncertainty_check([[report.var_x]], [[report.var_p]])
    results = {
        "moments": report.to_dict(),
        "product": report.product,
        "heisenberg": heisenberg_check(report),
        "robertson": robertson_check(report),
        "robertson_bound": report.factor_k ** 2 / 4,
        "matrix_check": mat.to_dict(),
    }
    table = _csv_table(tuple(report.to_dict()), [[float(v)] for v in report.to_dict().values()])
    return results, table


def cmd_cramer_rao(cfg: ExperimentConfig):
    basis = BasisSet(cfg.basis, cfg.s) if cfg.family == "root_model" else None
    family = make_family(cfg.family, sigma=cfg.sigma, basis=basis)
    report = cramer_rao_experiment(family, cfg.theta, cfg.estimator, cfg.n,
                                   cfg.replications, cfg.seed)
    table = "# fisher\n" + matrix_to_csv(report.fisher.matrix)
    table += "# empirical_cov\n" + matrix_to_csv(report.empirical_cov)
    return report.to_dict(), table


def cmd_fit_root(cfg: ExperimentConfig):
    sample = read_sample(_require_input(cfg))
    model = fit_root(sample, BasisSet(cfg.basis, cfg.s), cfg.s)
    n = len(sample)
    diag = model.diagnostics
    results = {
        "basis": cfg.basis,
        "s": cfg.s,
        "n": n,
        "coeffs": model.coeffs.tolist(),
        "c0": model.c0,
        "log_likelihood": root_log_likelihood(model, sample),
        "iterations": diag.iterations,
        "converged": diag.converged,
        "fisher": root_fisher(model, n).matrix.tolist(),
        "covariance": root_covariance(model, n).tolist(),
        "standard_errors": np.sqrt(np.diag(root_covariance(model, n))).tolist(),
    }
    table = _csv_table(("index", "coefficient", "standard_error"),
                       (range(cfg.s), model.full_coeffs,
                        np.sqrt(np.diag(root_covariance(model, n, extended=True)))))
    return results, table


def cmd_finite(cfg: ExperimentConfig):
    spec = load_json(_require_input(cfg))
    if "state" not in spec:
        raise ConfigParse("finite input needs a 'state' entry")
    state = finite_state_from_json(spec["state"])
    results: dict = {"dim": state.dim}
    final = state
    if "hamiltonian" in spec:
        h = operator_from_json(spec["hamiltonian"])
        t = float(spec.get("t", 0.0))
        final = evolve(h, t, state)
        results["t"] = t
        results["evolved"] = final.to_pairs()
        results["norm"] = float(np.sum(np.abs(final.amplitudes) ** 2))
        results["fidelity_with_initial"] = fidelity(state, final)
    if "other" in spec:
        results["fidelity_with_other"] = fidelity(final, finite_state_from_json(spec["other"]))
    if "bipartition" in spec:
        da, db = (int(v) for v in spec["bipartition"])
        results["schmidt"] = schmidt(final, da, db).to_dict()
    table = _csv_table(("index", "re", "im"),
                       (range(final.dim), final.amplitudes.real, final.amplitudes.imag))
    return results, table


_HANDLERS = {
    "analyze": cmd_analyze,
    "charfunc": cmd_charfunc,
    "uncertainty": cmd_uncertainty,
    "cramer-rao": cmd_cramer_rao,
    "fit-root": cmd_fit_root,
    "finite": cmd_finite,
}


def run(cfg: ExperimentConfig) -> dict:
    """Execute one command and return the run report."""
    start = time.perf_counter()
    results, table = _HANDLERS[cfg.command](cfg)
    report = {
        "command": cfg.command,
        "config": cfg.echo(),
        "results": results,
        "seed": cfg.seed,
        "version": __version__,
        "wall_time": time.perf_counter() - start,
    }
    if cfg.format == "csv":
        text = table
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psistat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--seed")
        p.add_argument("--grid", help="N,L")
        p.add_argument("--input")
        if name == "analyze":
            p.add_argument("--dump-state", dest="dump_state")
        if name == "charfunc":
            p.add_argument("--kmax")
            p.add_argument("--moment-step", dest="moment_step")
        if name == "uncertainty":
            p.add_argument("--random", help="number of random Hermite superpositions")
            p.add_argument("--order", help="Hermite functions per random state")
        if name == "cramer-rao":
            p.add_argument("--family")
            p.add_argument("--theta", help="comma separated parameters")
            p.add_argument("--sigma")
            p.add_argument("--estimator")
            p.add_argument("--n")
            p.add_argument("--replications")
        if name in ("cramer-rao", "fit-root"):
            p.add_argument("--basis")
            p.add_argument("--s")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = build_config(args.command, values, args.config)
        report = run(cfg)
    except PsiStatError as exc:
        print(f"psistat: error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"psistat: error [cli.IOError]: {exc}", file=sys.stderr)
        return 3
    if report["results"].get("converged") is False:
        print("psistat: error [estimation.DidNotConverge]: returned the best iterate",
              file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
