"""INI experiment configs.

Physics parameters have no defaults; tolerances do, and every tolerance in
effect is echoed into the run manifest.
"""
from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field

TOLERANCE_DEFAULTS = {
    "headroom": 4.0,
    "cgo_tol": 1e-10,
    "cgo_residual": 1e-8,
    "isometry": 1e-10,
    "conjugation": 1e-11,
    "bookkeeping": 1e-10,
    "gap_null": 1e-12,
    "gaidentity": 1e-6,
    "potential": 1e-8,
}


class ConfigError(ValueError):
    """Invalid config; the message names the offending ``section.key``."""


@dataclass
class ExperimentConfig:
    experiments: list
    seed: int
    n: int
    N: int
    L: float
    physics: dict
    tolerances: dict
    out: str = "results"
    text: str = ""
    extra: dict = field(default_factory=dict)

    def get(self, key, experiment):
        """``physics.<experiment>.<key>`` overrides ``physics.<key>``."""
        scoped = f"{experiment}.{key}"
        if scoped in self.physics:
            return self.physics[scoped]
        if key not in self.physics:
            raise ConfigError(f"physics.{key}: required for experiment {experiment!r}")
        return self.physics[key]

    def digest(self):
        return hashlib.sha256(self.text.encode()).hexdigest()


def _number(section, key, raw):
    raw = raw.strip()
    try:
        if raw.lower() in ("2pi", "2*pi"):
            return 2 * math.pi
        return float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: {raw!r} is not a number") from None


def _parse_physics(key, raw):
    """Lists are comma separated; vectors inside a list are separated by ';'."""
    key = key.rsplit(".", 1)[-1]
    if key in ("k",):
        vecs = [v.split() for v in raw.split(";") if v.strip()]
        return [tuple(_number("physics", key, c) for c in v) for v in vecs]
    if key in ("gamma", "gamma2", "phi", "mode", "weights"):
        return raw.strip()
    parts = [p for p in raw.split(",") if p.strip()]
    vals = [_number("physics", key, p) for p in parts]
    return vals


def _canonical(cp):
    lines = []
    for sec in sorted(cp.sections()):
        lines.append(f"[{sec}]")
        for k in sorted(cp[sec]):
            lines.append(f"{k} = {cp[sec][k].strip()}")
    return "\n".join(lines) + "\n"


def parse_config(text, seed=None, out=None):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"unreadable config: {e}") from None
    for sec in ("experiment", "grid"):
        if sec not in cp:
            raise ConfigError(f"{sec}: missing section")
    ex = cp["experiment"]
    if "name" not in ex:
        raise ConfigError("experiment.name: required")
    names = [s.strip() for s in ex["name"].split(",") if s.strip()]
    if seed is None:
        if "seed" not in ex:
            raise ConfigError("experiment.seed: required (or pass --seed)")
        try:
            seed = int(ex["seed"])
        except ValueError:
            raise ConfigError(f"experiment.seed: {ex['seed']!r} is not an integer") from None
    if not 0 <= int(seed) < 2**64:
        raise ConfigError("experiment.seed: must be an unsigned 64-bit integer")
    cp["experiment"]["seed"] = str(int(seed))

    gr = cp["grid"]
    for key in ("n", "N", "L"):
        if key not in gr:
            raise ConfigError(f"grid.{key}: required")
    n = _number("grid", "n", gr["n"])
    N = _number("grid", "N", gr["N"])
    L = _number("grid", "L", gr["L"])
    if n != int(n) or n < 2:
        raise ConfigError(f"grid.n: {gr['n']} must be an integer >= 2")
    if N != int(N) or N < 8 or int(N) & (int(N) - 1):
        raise ConfigError(f"grid.N: {gr['N']} is not a power of two >= 8")
    if not L > 0:
        raise ConfigError(f"grid.L: {gr['L']} must be positive")

    physics = {}
    if "physics" in cp:
        for k, v in cp["physics"].items():
            if "." in k and k.split(".")[0] not in names:
                raise ConfigError(f"physics.{k}: {k.split('.')[0]!r} is not among the configured experiments")
            physics[k] = _parse_physics(k, v)
    tol = dict(TOLERANCE_DEFAULTS)
    if "tolerances" in cp:
        for k, v in cp["tolerances"].items():
            if k not in TOLERANCE_DEFAULTS:
                raise ConfigError(f"tolerances.{k}: unknown tolerance")
            tol[k] = _number("tolerances", k, v)
    if out is None:
        out = cp["output"]["path"] if "output" in cp and "path" in cp["output"] else "results"
    return ExperimentConfig(names, int(seed), int(n), int(N), float(L), physics, tol, out, _canonical(cp))


def check_nyquist(cfg, max_tau):
    """``headroom * max tau <= xi_max`` (the default headroom is 4)."""
    xi_max = math.pi * cfg.N / cfg.L
    if cfg.tolerances["headroom"] * max_tau > xi_max + 1e-12:
        raise ConfigError(
            f"physics.tau: {cfg.tolerances['headroom']:g} * max tau = "
            f"{cfg.tolerances['headroom'] * max_tau:g} exceeds the Nyquist bound {xi_max:g}"
        )
