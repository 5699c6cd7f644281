"""Run configuration: TOML parsing, validation, case enumeration.

Configs are flat TOML: scalar keys plus dotted grid/tolerance tables, e.g.

    command = "certify-barrier"
    grid.n = [2, 3]
    grid.p = [2.0]
    grid.q = [2.0, 3.0]
    grid.B = [0.0, 1.0]
    grid.R = [1.0]
    tol.ode = 1e-10
    seed = 7
    out_dir = "out"

Every structural constraint is enforced at parse time, with the offending
key named in the error.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigurationError

COMMANDS = (
    "certify-barrier",
    "certify-bochner",
    "solve-hj",
    "solve-pharmonic",
    "check-estimates",
    "liouville",
    "harnack",
    "ledger",
)

# Which grid axes each command sweeps, in enumeration order.
CASE_AXES = {
    "certify-barrier": ("n", "p", "q", "B", "R"),
    "certify-bochner": ("n", "p", "q"),
    "solve-hj": ("n", "p", "q", "B", "s0"),
    "solve-pharmonic": ("n", "p", "B"),
    "check-estimates": ("n", "p", "q", "R", "s0"),
    "liouville": ("n", "p", "q"),
    "harnack": ("n", "p", "B"),
    "ledger": ("n", "p", "q", "B", "R"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    grid_n: tuple[int, ...] = (3,)
    grid_p: tuple[float, ...] = (2.0,)
    grid_q: tuple[float, ...] = (2.0,)
    grid_B: tuple[float, ...] = (1.0,)
    grid_R: tuple[float, ...] = (1.0,)
    grid_s0: tuple[float, ...] = (1.0,)
    tol_ode: float = 1e-10
    tol_energy: float = 1e-14
    grid_points: int = 10_000
    seed: int = 0
    out_dir: str = "out"
    emit_svg: bool = False
    # command-specific knobs (documented defaults; all overridable)
    r0: float | None = None
    r_max: float | None = None
    mesh_size: int = 4096
    annulus: tuple[float, float] = (0.5, 2.0)
    boundary: tuple[float, float] = (1.0, 0.0)
    lambda_scale: float = 1.0
    mu_scale: float = 1.0
    manifold: str | None = None

    def grid(self, axis: str) -> tuple:
        return getattr(self, f"grid_{axis}")


def parse_config(path: str, command: str | None = None) -> RunConfig:
    """Load and validate a run config; ``command`` (from the CLI) wins over
    the file's ``command`` key but the two must agree when both are given."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: malformed config: {exc}") from exc

    file_command = data.pop("command", None)
    if file_command is not None and command is not None and file_command != command:
        raise ConfigurationError(
            f"config command {file_command!r} does not match CLI command {command!r}"
        )
    effective = command or file_command
    if effective is None:
        raise ConfigurationError("no command given (CLI or config `command` key)")
    if effective not in COMMANDS:
        raise ConfigurationError(
            f"unknown command {effective!r}; valid: {', '.join(COMMANDS)}"
        )

    kwargs: dict = {"command": effective}
    grids = data.pop("grid", {})
    if not isinstance(grids, dict):
        raise ConfigurationError("`grid` must be a table of arrays")
    for axis in ("n", "p", "q", "B", "R", "s0"):
        if axis in grids:
            values = _as_grid(f"grid.{axis}", grids.pop(axis))
            if axis == "n":
                for v in values:
                    if v != int(v):
                        raise ConfigurationError(
                            f"grid.n: dimension must be an integer, got {v}"
                        )
                values = tuple(int(v) for v in values)
            kwargs[f"grid_{axis}"] = values
    if grids:
        raise ConfigurationError(f"unknown grid axes: {sorted(grids)}")

    tols = data.pop("tol", {})
    if not isinstance(tols, dict):
        raise ConfigurationError("`tol` must be a table")
    for name, key in (("ode", "tol_ode"), ("energy", "tol_energy")):
        if name in tols:
            kwargs[key] = _as_positive_float(f"tol.{name}", tols.pop(name))
    if tols:
        raise ConfigurationError(f"unknown tolerance keys: {sorted(tols)}")

    simple = {
        "grid_points": int,
        "seed": int,
        "out_dir": str,
        "emit_svg": bool,
        "r0": float,
        "r_max": float,
        "mesh_size": int,
        "lambda_scale": float,
        "mu_scale": float,
        "manifold": str,
    }
    for key, cast in simple.items():
        if key in data:
            value = data.pop(key)
            if cast is bool and not isinstance(value, bool):
                raise ConfigurationError(f"{key} must be a boolean")
            try:
                kwargs[key] = cast(value)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"{key}: {exc}") from exc
    for key in ("annulus", "boundary"):
        if key in data:
            pair = data.pop(key)
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ConfigurationError(f"{key} must be a 2-element array")
            kwargs[key] = (float(pair[0]), float(pair[1]))
    if data:
        raise ConfigurationError(f"unknown config keys: {sorted(data)}")

    cfg = RunConfig(**kwargs)
    _validate(cfg)
    return cfg


def _as_grid(name: str, value) -> tuple:
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"{name}: grid must be a nonempty array")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{name}: {exc}") from exc


def _as_positive_float(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{name}: {exc}") from exc
    if out <= 0.0:
        raise ConfigurationError(f"{name}: tolerance must be > 0, got {out}")
    return out


def _validate(cfg: RunConfig) -> None:
    for axis in ("n", "p", "q", "B", "R", "s0"):
        if not cfg.grid(axis):
            raise ConfigurationError(f"grid.{axis} is empty")
    for n in cfg.grid_n:
        if n != int(n) or n < 2:
            raise ConfigurationError(f"grid.n: dimension must be an integer >= 2, got {n}")
    for p in cfg.grid_p:
        if not p > 1.0:
            raise ConfigurationError(f"grid.p: constraint q > p-1 > 0 requires p > 1, got {p}")
        for q in cfg.grid_q:
            if not q > p - 1.0:
                raise ConfigurationError(
                    f"constraint q > p-1 violated at grid point (p={p}, q={q})"
                )
    for B in cfg.grid_B:
        if B < 0.0:
            raise ConfigurationError(f"grid.B: B must be >= 0, got {B}")
    for R in cfg.grid_R:
        if R <= 0.0:
            raise ConfigurationError(f"grid.R: R must be > 0, got {R}")
    for s0 in cfg.grid_s0:
        if s0 < 0.0:
            raise ConfigurationError(f"grid.s0: s0 must be >= 0, got {s0}")
    if cfg.grid_points < 2:
        raise ConfigurationError("grid_points must be >= 2")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigurationError("seed must fit in 64 bits")
    if cfg.mesh_size < 16:
        raise ConfigurationError("mesh_size must be >= 16")
    if cfg.manifold is not None and cfg.manifold not in (
        "euclidean", "hyperbolic", "log_model",
    ):
        raise ConfigurationError(f"unknown manifold {cfg.manifold!r}")
    lo, hi = cfg.annulus
    if not 0.0 < lo < hi:
        raise ConfigurationError("annulus must satisfy 0 < r_lo < r_hi")


def enumerate_cases(cfg: RunConfig) -> list[dict]:
    """Cross product of the command's axes, lexicographic in declared order."""
    axes = CASE_AXES[cfg.command]
    cases: list[dict] = [{}]
    for axis in axes:
        cases = [dict(c, **{axis: v}) for c in cases for v in cfg.grid(axis)]
    return cases
