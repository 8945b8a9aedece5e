"""Flat ``key = value`` run configuration.

Omitted keys fall back to the reference microgrid (400 V bus, 390-400 V
window, 50-250 ohm load, 6 A / 4 A converters).
"""

from dataclasses import dataclass, fields, replace
from typing import Optional

from .grid import GridConfig, Symbol, UnitParams, droop_slope
from .load import ChangeProcess, LoadDistribution
from .phy import SlotConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    v_b: float = 400.0
    i_b_max: float = 4.0
    v_min: float = 390.0
    v_max: float = 400.0
    i_a_max: float = 6.0
    r_min: float = 50.0
    r_max: float = 250.0
    sigma: float = 0.0
    T: Optional[float] = None
    Ts: float = 0.01
    fs: float = 10_000.0
    p_change: float = 1.0
    v_a0: float = 400.0
    r_da0: Optional[float] = None
    family: str = "fixed-rd"
    h_v_a: float = 400.5
    h_r_da: Optional[float] = None
    l_v_a: float = 399.5
    l_r_da: Optional[float] = None
    run_limit: int = 8
    quad_nodes: int = 48
    mc_trials: int = 100_000
    seed: int = 0
    workers: int = 1
    out: Optional[str] = None

    def grid(self):
        unit_b = UnitParams(self.v_b, droop_slope(self.v_b, self.v_min, self.i_b_max), self.i_b_max)
        return GridConfig(unit_b, self.v_min, self.v_max, self.i_a_max, self.r_min, self.r_max, self.sigma)

    def pilot(self):
        r_da0 = self.r_da0
        if r_da0 is None:
            r_da0 = droop_slope(self.v_a0, self.v_min, self.i_a_max)
        return Symbol(self.v_a0, r_da0)

    def symbols(self):
        p = self.pilot()
        return (
            Symbol(self.h_v_a, self.h_r_da if self.h_r_da is not None else p.r_da),
            Symbol(self.l_v_a, self.l_r_da if self.l_r_da is not None else p.r_da),
        )

    def slot(self, scheme):
        spb = 2 if scheme == "manchester" else 1
        Ts = self.T / spb if self.T is not None else self.Ts
        return SlotConfig(Ts, self.fs, spb)

    def load_dist(self):
        return LoadDistribution(self.r_min, self.r_max)

    def change_process(self):
        return ChangeProcess(self.p_change)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"run_limit", "quad_nodes", "mc_trials", "seed", "workers"}
_STR_KEYS = {"family", "out"}


def _convert(key, raw, lineno):
    try:
        if key in _STR_KEYS:
            return raw
        if key in _INT_KEYS:
            return int(raw)
        # float() is locale independent and only accepts a dot decimal
        return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse {key} = {raw!r}") from None


def parse_config(text):
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw, lineno)
    cfg = RunConfig(**values)
    check_config(cfg)
    return cfg


def load_config(path):
    if path is None:
        return parse_config("")
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def _require(cond, key, msg):
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def check_config(cfg):
    _require(cfg.v_min > 0, "v_min", "must be positive")
    _require(cfg.v_max > cfg.v_min, "v_max", "must exceed v_min")
    _require(cfg.r_min > 0, "r_min", "must be positive")
    _require(cfg.r_max > cfg.r_min, "r_max", "must exceed r_min")
    _require(cfg.v_b > cfg.v_min, "v_b", "must exceed v_min")
    _require(cfg.i_b_max > 0, "i_b_max", "must be positive")
    _require(cfg.i_a_max > 0, "i_a_max", "must be positive")
    _require(cfg.sigma >= 0, "sigma", "must be non-negative")
    _require(cfg.T is None or cfg.T > 0, "T", "must be positive")
    _require(cfg.Ts > 0, "Ts", "must be positive")
    _require(cfg.fs > 0, "fs", "must be positive")
    _require(round(cfg.Ts * cfg.fs) >= 1, "fs", "need at least one sample per symbol")
    _require(0 <= cfg.p_change <= 1, "p_change", "must be in [0, 1]")
    _require(cfg.v_a0 > cfg.v_min, "v_a0", "must exceed v_min")
    _require(cfg.r_da0 is None or cfg.r_da0 > 0, "r_da0", "must be positive")
    _require(cfg.family in ("fixed-rd", "fixed-va"), "family", "must be fixed-rd or fixed-va")
    for key in ("h_v_a", "l_v_a", "h_r_da", "l_r_da"):
        v = getattr(cfg, key)
        _require(v is None or v > 0, key, "must be positive")
    _require(cfg.run_limit >= 1, "run_limit", "must be at least 1")
    _require(cfg.quad_nodes >= 16, "quad_nodes", "must be at least 16")
    _require(cfg.mc_trials >= 1, "mc_trials", "must be at least 1")
    _require(cfg.workers >= 1, "workers", "must be at least 1")


def with_overrides(cfg, **kw):
    kw = {k: v for k, v in kw.items() if v is not None}
    out = replace(cfg, **kw)
    check_config(out)
    return out
