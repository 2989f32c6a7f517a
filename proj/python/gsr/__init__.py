"""Group-sparse regression solvers.

Configs are plain dicts in the same layout as the JSON config files read by
the command-line tool; empty means defaults.
"""

import json

from . import _gsr
from ._gsr import (
    DegenerateIterate,
    Instance,
    IoError,
    SingularDesign,
    SolverStall,
    load_instance,
    make_instance,
    metrics,
    oracle_ls,
    save_instance,
)

__all__ = [
    "DegenerateIterate",
    "Instance",
    "IoError",
    "SingularDesign",
    "SolverStall",
    "alm_solve",
    "load_instance",
    "make_instance",
    "metrics",
    "oracle_ls",
    "phi",
    "phi_constants",
    "psi_star",
    "save_instance",
    "solve",
    "solve_instance",
    "theta",
]


def _dump(cfg):
    return json.dumps(cfg) if cfg else ""


def _with_traces(res):
    res["traces"] = json.loads(res.pop("traces_json"))
    return res


def phi(t, spec=None):
    return _gsr.phi_eval(_dump(spec), t)


def psi_star(s, spec=None):
    return _gsr.psi_star(_dump(spec), s)


def theta(s, spec=None):
    return _gsr.theta(_dump(spec), s)


def phi_constants(spec=None):
    return _gsr.phi_constants(_dump(spec))


def solve(A, b, groups, radius, config=None):
    """Run the multi-stage solver. `groups` lists 0-based column indices per group."""
    return _with_traces(_gsr.solve(A, b, groups, radius, _dump(config)))


def solve_instance(instance, config=None):
    return _with_traces(_gsr.solve_instance(instance, _dump(config)))


def alm_solve(A, b, groups, omega, radius, config=None):
    """Weighted group-lasso subproblem over the box |x_j| <= radius."""
    return _gsr.alm_solve(A, b, groups, omega, radius, _dump(config))
