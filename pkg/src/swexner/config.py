"""Plain-text run configuration: ``key = value`` lines with ``#`` comments."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from swexner.bedload import FRICTION_KINDS, LAW_KINDS, BedloadLaw, FrictionLaw
from swexner.errors import ConfigurationError
from swexner.scenarios import SCENARIOS, Scenario, build

SCENARIO_DEFAULTS = {
    "dune1d": {"cells": (2000,), "t_end": 700.0, "ag": 1.0},
    "antidune1d": {"cells": (2400,), "t_end": 50.0, "ag": 0.001},
    "bump2d": {"cells": (200, 200), "t_end": 500.0, "ag": 1.0},
}


class ConfigError(ConfigurationError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _pair(text: str, name: str) -> tuple:
    parts = text.lower().replace("×", "x").split("x")
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"{name} must look like N or NxM, got {text!r}") from None
    if not 1 <= len(vals) <= 2 or any(v < 1 for v in vals):
        raise ValueError(f"{name} must look like N or NxM with positive integers, got {text!r}")
    return vals


def _times(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    vals = tuple(float(t) for t in text.split(","))
    if any(v < 0 for v in vals):
        raise ValueError("snapshot times must be >= 0")
    return tuple(sorted(vals))


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _positive(conv):
    def f(text):
        v = conv(text)
        if not v > 0:
            raise ValueError(f"expected a positive value, got {text!r}")
        return v
    return f


def _cfl(text):
    v = float(text)
    if not 0 < v <= 1:
        raise ValueError(f"cfl must lie in (0, 1], got {v}")
    return v


def _choice(options):
    def f(text):
        v = text.strip().lower()
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return v
    return f


def _workers(text):
    vals = _pair(text, "workers")
    return vals if len(vals) == 2 else (vals[0], 0)


PARSERS = {
    "scenario": _choice(SCENARIOS),
    "cells": lambda t: _pair(t, "cells"),
    "t_end": _positive(float),
    "cfl": _cfl,
    "safety": lambda t: _at_least_one(float(t)),
    "law": _choice(LAW_KINDS),
    "ag": lambda t: _nonneg(float(t)),
    "mg": float,
    "tau_cr": lambda t: _nonneg(float(t)),
    "d_s": _positive(float),
    "s": float,
    "friction": _choice(FRICTION_KINDS),
    "friction_coef": lambda t: _nonneg(float(t)),
    "g": _positive(float),
    "workers": _workers,
    "corners": _bool,
    "out": str,
    "snap_every": _positive(float),
    "snap_at": _times,
    "seed": int,
}


def _nonneg(v):
    if not v >= 0:
        raise ValueError(f"expected a value >= 0, got {v}")
    return v


def _at_least_one(v):
    if not v >= 1:
        raise ValueError(f"safety factor must be >= 1, got {v}")
    return v


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    cells: tuple = ()
    t_end: float = 0.0
    cfl: float = 0.5
    safety: float = 1.05
    law: str = "grass"
    ag: float = 1.0
    mg: float = 3.0
    tau_cr: float = 0.047
    d_s: float = 0.001
    s: float = 2.65
    friction: str = "manning"
    friction_coef: float = 0.025
    g: float = 9.81
    workers: tuple = (1, 1)
    corners: bool = True
    out: str = "output"
    snap_every: float | None = None
    snap_at: tuple = ()
    seed: int = 0

    def bedload_law(self) -> BedloadLaw:
        if self.law == "grass":
            return BedloadLaw.grass(self.ag, self.mg)
        return BedloadLaw.shields(self.law, self.tau_cr, self.d_s, self.s,
                                  FrictionLaw(self.friction, self.friction_coef))

    def snapshot_times(self) -> tuple:
        times = set(self.snap_at)
        if self.snap_every:
            k = 0
            while k * self.snap_every <= self.t_end * (1 + 1e-12):
                times.add(min(k * self.snap_every, self.t_end))
                k += 1
        return tuple(sorted(times))

    def layout(self, dim: int) -> tuple:
        px, py = self.workers
        if py == 0:
            from swexner.parallel import default_layout
            return default_layout(px, dim)
        return px, py

    def build_scenario(self) -> Scenario:
        kw = dict(t_end=self.t_end, cfl=self.cfl, g=self.g, A_g=self.ag, m_g=self.mg)
        if self.scenario == "bump2d":
            if len(self.cells) != 2:
                raise ConfigError("bump2d needs cells = JxK")
            sc = build("bump2d", J=self.cells[0], K=self.cells[1], **kw)
        else:
            if len(self.cells) != 1:
                raise ConfigError(f"{self.scenario} needs a single cell count")
            sc = build(self.scenario, J=self.cells[0], **kw)
        sc.law = self.bedload_law()
        return sc


def _format(key, value) -> str:
    if key == "cells":
        return "x".join(str(v) for v in value)
    if key == "workers":
        return str(value[0]) if value[1] == 0 else f"{value[0]}x{value[1]}"
    if key == "snap_at":
        return ",".join(repr(float(v)) for v in value)
    if key == "corners":
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_config(cfg: RunConfig) -> str:
    lines = ["# swexner run configuration"]
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{f.name} = {_format(f.name, value)}")
    return "\n".join(lines) + "\n"


def parse_config(text: str = "", overrides: dict | None = None) -> RunConfig:
    """Parse configuration text; ``overrides`` (e.g. CLI flags) win over the file.

    Unknown keys, unparseable values and a missing scenario raise
    ``ConfigError`` carrying the offending line number.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, val = (p.strip() for p in line.partition("="))
        key = key.replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        try:
            values[key] = PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno) from None
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        key = key.replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"unknown option {key!r}")
        try:
            values[key] = PARSERS[key](val) if isinstance(val, str) else val
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    if "scenario" not in values:
        raise ConfigError("missing 'scenario'")
    defaults = SCENARIO_DEFAULTS[values["scenario"]]
    values.setdefault("cells", defaults["cells"])
    values.setdefault("ag", defaults["ag"])
    if "t_end" not in values:
        values["t_end"] = 1000.0 if values["scenario"] == "bump2d" and values["ag"] == 0.1 else defaults["t_end"]
    cfg = RunConfig(**values)
    if cfg.law == "grass" and not 1 <= cfg.mg <= 4:
        raise ConfigError("mg must lie in [1, 4]")
    if cfg.law != "grass" and not cfg.s > 1:
        raise ConfigError("s must be > 1")
    return cfg


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
