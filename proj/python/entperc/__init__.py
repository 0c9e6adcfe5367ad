"""Dynamical entanglement percolation on lattices with time-dependent edge activation."""

import json

from . import _core
from ._core import (
    BudgetError,
    ConfigError,
    ConvergenceError,
    DomainError,
    bernoulli_period,
    conversion_probability,
    critical_line_phi2,
    eta,
    jacobian_eigenvalue,
    p_asymptotic_gaussian,
    p_bernoulli,
    p_gaussian,
    pearson,
    preset_names,
    rice_cdf,
    rice_pdf,
    solve_fixed_point,
    uniform_reshuffled,
)

__version__ = _core.__version__


def resolve(config):
    """Return the config with every default filled in."""
    return json.loads(_core.resolve_json(json.dumps(config)))


def execute(config):
    """Run a config and return {name: {"columns": [...], "rows": [[...], ...]}}."""
    tables = _core.execute_json(json.dumps(config))
    return {name: {"columns": columns, "rows": rows} for name, columns, rows in tables}


def preset(name, full=False):
    """Preset definition with its caption and run configs."""
    return json.loads(_core.preset_json(name, full))


def _single(config):
    (table,) = execute(config).values()
    return [dict(zip(table["columns"], row)) for row in table["rows"]]


def simulate(topology, L, model, times, **params):
    """p_hat(t), P_hat(t) trajectory rows; params are simulate config keys."""
    config = {"subcommand": "simulate", "topology": topology, "L": L, "model": model, "times": list(times)}
    config.update(params)
    return _single(config)


def static_curve(topology, L, p_grid, n_samples=20, **params):
    """Uniform bond percolation reference P0(p)."""
    config = {"subcommand": "simulate", "mode": "static", "topology": topology, "L": L,
              "p_grid": list(p_grid), "n_samples": n_samples}
    config.update(params)
    return _single(config)


def two_colour(mode="sweep", **params):
    config = {"subcommand": "two-colour", "mode": mode}
    config.update(params)
    return _single(config)


def meanfield(mode="grid", **params):
    config = {"subcommand": "meanfield", "mode": mode}
    config.update(params)
    return _single(config)


def correlations(sigma, lambda_, n_samples=1_000_000, **params):
    config = {"subcommand": "correlations", "sigma": sigma, "lambda": lambda_, "n_samples": n_samples}
    config.update(params)
    return _single(config)


def analytic_p(kind, times, **params):
    config = {"subcommand": "analytic-p", "kind": kind, "times": list(times)}
    config.update(params)
    return _single(config)
