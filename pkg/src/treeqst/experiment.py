"""Sweep configuration, the sweep runner and table emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from treeqst.dynamics import BathSpec, amplitudes_analytic
from treeqst.entanglement import natural_concurrence, optimal_concurrence, optimal_ed_success_probability
from treeqst.protocol import average_fidelity_closed, average_fidelity_natural, average_success_probability
from treeqst.tree import TreeSpec

MODES = ("fidelity", "success", "concurrence", "ed-success", "amplitudes", "verify")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "fidelity"
    generations: int = 4
    target_site: int | None = None  # None -> 2^(N-1), leftmost leaf
    nu: float = 1.0
    lam: float = 0.5
    gamma: float = 1.0
    omega0: float = 0.0
    t_max: float = 20.0
    t_steps: int = 401
    wm_strengths: tuple[float, ...] = (0.0, 0.2, 0.6, 0.99)
    theta: float = math.pi / 2
    phi: float = 0.0
    format: str = "csv"
    output_path: str | None = None
    seed: int = 12345

    def __post_init__(self):
        object.__setattr__(self, "wm_strengths", tuple(float(p) for p in self.wm_strengths))
        self.validate()

    @property
    def site(self) -> int:
        return self.target_site if self.target_site is not None else 2 ** (self.generations - 1)

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}; got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be csv or json; got {self.format!r}")
        if not 1 <= self.generations <= 10:
            raise ConfigError(f"generations must be in 1..10; got {self.generations}")
        if not 1 <= self.site <= 2**self.generations - 1:
            raise ConfigError(
                f"site {self.site} is not in the tree; valid sites are 1..{2**self.generations - 1}"
            )
        if self.nu <= 0 or self.lam <= 0 or self.gamma < 0:
            raise ConfigError("need nu > 0, lambda > 0 and gamma >= 0")
        if self.t_max <= 0 or self.t_steps < 2:
            raise ConfigError("need tmax > 0 and steps >= 2")
        if not self.wm_strengths and self.mode in ("fidelity", "success", "concurrence", "ed-success"):
            raise ConfigError("at least one --p value is required")
        bad = [p for p in self.wm_strengths if not 0 <= p < 1]
        if bad:
            raise ConfigError(f"weak-measurement strengths must lie in [0, 1); got {bad}")
        if not 0 <= self.theta <= math.pi:
            raise ConfigError(f"theta must lie in [0, pi]; got {self.theta}")

    @property
    def tree(self) -> TreeSpec:
        return TreeSpec(self.generations, self.omega0, self.nu)

    @property
    def bath(self) -> BathSpec:
        return BathSpec(self.gamma, self.lam)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_steps)

    def to_text(self) -> str:
        lines = []
        for k, v in asdict(self).items():
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, values: dict, base: RunConfig | None = None) -> RunConfig:
        base = base or cls()
        kinds = {f.name: f.type for f in fields(cls)}
        parsed = {}
        for key, raw in values.items():
            key = ALIASES.get(key, key)
            if key not in kinds:
                raise ConfigError(f"unknown config key {key!r}")
            parsed[key] = _coerce(key, raw)
        try:
            return replace(base, **parsed)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_text(cls, text: str, base: RunConfig | None = None) -> RunConfig:
        values = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {n}: expected 'key = value', got {line!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            values[k] = v
        return cls.from_mapping(values, base)


ALIASES = {
    "lambda": "lam",
    "site": "target_site",
    "tmax": "t_max",
    "steps": "t_steps",
    "p": "wm_strengths",
    "out": "output_path",
}

_INT_KEYS = {"generations", "target_site", "t_steps", "seed"}
_STR_KEYS = {"mode", "format", "output_path"}


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        return raw
    try:
        if key in _STR_KEYS:
            return raw
        if key in _INT_KEYS:
            return None if raw.lower() == "none" else int(raw)
        if key == "wm_strengths":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


PRESETS = {
    "fig2a": RunConfig(mode="fidelity", generations=4),
    "fig2c": RunConfig(mode="fidelity", generations=8),
    "fig3a": RunConfig(mode="concurrence", generations=4, theta=math.pi / 2),
    "fig3c": RunConfig(mode="concurrence", generations=8, theta=math.pi / 2),
}


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def __len__(self):
        return len(self.rows)


def _sweep(cfg: RunConfig, columns: list[str], values) -> ResultTable:
    t = cfg.times()
    traj = amplitudes_analytic(t, cfg.tree, cfg.bath)
    f_abs = np.abs(traj.transfer_amplitude(cfg.site))
    table = ResultTable(["t", "p", "f_abs", *columns])
    per_p = [values(p, f_abs) for p in cfg.wm_strengths]
    for k in range(t.size):
        for p, cols in zip(cfg.wm_strengths, per_p):
            table.rows.append((float(t[k]), p, float(f_abs[k]), *(float(c[k]) for c in cols)))
    return table


def run(cfg: RunConfig) -> ResultTable:
    """Evaluate the configured sweep; rows are ordered by t, then by p as given."""
    if cfg.mode == "fidelity":
        return _sweep(
            cfg,
            ["F_ave", "F_natural", "P_success"],
            lambda p, f: (average_fidelity_closed(p, f), average_fidelity_natural(f), average_success_probability(p, f)),
        )
    if cfg.mode == "success":
        return _sweep(cfg, ["P_success"], lambda p, f: (average_success_probability(p, f),))
    if cfg.mode == "concurrence":
        th = cfg.theta
        return _sweep(
            cfg,
            ["concurrence", "concurrence_natural", "P_ed"],
            lambda p, f: (optimal_concurrence(th, p, f), natural_concurrence(th, f), optimal_ed_success_probability(th, p, f)),
        )
    if cfg.mode == "ed-success":
        return _sweep(cfg, ["P_ed"], lambda p, f: (optimal_ed_success_probability(cfg.theta, p, f),))
    if cfg.mode == "amplitudes":
        traj = amplitudes_analytic(cfg.times(), cfg.tree, cfg.bath)
        n = cfg.generations
        cols = ["t"] + [f"C{m}_{part}" for m in range(1, n + 1) for part in ("re", "im", "abs")] + ["leaked_weight"]
        table = ResultTable(cols)
        for k, tk in enumerate(traj.times):
            row = [float(tk)]
            for c in traj.amplitudes[k]:
                row += [float(c.real), float(c.imag), float(abs(c))]
            row.append(float(traj.leaked_weight[k]))
            table.rows.append(tuple(row))
        return table
    if cfg.mode == "verify":
        from treeqst.verify import run_all

        table = ResultTable(["check", "max_error", "tolerance", "passed"])
        for res in run_all(seed=cfg.seed):
            table.rows.append((res.name, res.error, res.tolerance, res.passed))
        return table
    raise ConfigError(f"unknown mode {cfg.mode!r}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def render(table: ResultTable, fmt: str = "csv") -> str:
    if not table.rows:
        raise ValueError("refusing to emit an empty table")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        objs = [dict(zip(table.columns, row)) for row in table.rows]
        return json.dumps(objs, indent=1, allow_nan=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(table: ResultTable, fmt: str = "csv", path: str | Path | None = None) -> str:
    """Serialise ``table``; write it to ``path`` if given. Returns the text."""
    text = render(table, fmt)
    if path is not None:
        Path(path).write_text(text)
    return text
