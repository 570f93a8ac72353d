"""Plain-text scenario configs.

One ``key = value`` per line, ``#`` starts a comment.  Keys ending in
``_db`` are converted from dB to a linear ratio, ``_dbm`` from dBm to W and
``_dbm_hz`` from dBm/Hz to W/Hz; the suffix is dropped, so ``g_bs_db = 5``
and ``g_bs = 3.1623`` set the same field.  See README.md for the key list.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from greenlink.power import BATTERY_PROFILES, BatteryModel, battery_profile
from greenlink.radio import (
    NoiseModel,
    PacketSpec,
    RadioInterface,
    Topology,
    db_to_linear,
    dbm_to_watt,
)
from greenlink.scenario import QosSpec, Scenario

BATTERY_ENV = "GREENLINK_BATTERY_PROFILE"
DEFAULT_CONFIG = "default.cfg"


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"config field {key!r}: {message}")
        self.key = key


_BATTERY_FIELDS = ("epsilon", "xi", "omega", "voltage", "eta", "p_circuit", "t_pulse")

# canonical key -> kind
_KEYS = {
    "sr_frequency": float,
    "sr_bandwidth": float,
    "sr_gap": float,
    "sr_overhead_bits": int,
    "cell_frequency": float,
    "cell_bandwidth": float,
    "cell_gap": float,
    "cell_overhead_bits": int,
    "d_1b": float,
    "d_2b": float,
    "d_12": float,
    "d_21": float,
    "sigma2_1b": float,
    "sigma2_2b": float,
    "sigma2_12": float,
    "sigma2_21": float,
    "g_u1": float,
    "g_u2": float,
    "g_bs": float,
    "n0": float,
    "n_ebits": int,
    "pout": float,
    "pout1": float,
    "pout2": float,
    "pout12": float,
    "pout21": float,
    "rate": float,
    "rate1": float,
    "rate2": float,
    "battery_profile": str,
    "delta": float,
    "p2_threshold": str,
    "targets": str,
    "power_min_dbm": float,
    "power_max_dbm": float,
    **{f"battery_{name}": float for name in _BATTERY_FIELDS},
}

_SUFFIXES = (
    ("_dbm_hz", lambda v: dbm_to_watt(v)),
    ("_dbm", dbm_to_watt),
    ("_db", db_to_linear),
)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    battery: BatteryModel
    delta: float = 0.005
    p2_threshold: str = "r1"
    targets: tuple = ()
    values: dict = field(default_factory=dict, compare=False, repr=False)
    source: str = "<dict>"

    @property
    def config_hash(self) -> str:
        return config_hash(self.values)


def config_hash(values: dict) -> str:
    canon = "\n".join(f"{k}={_canon(values[k])}" for k in sorted(values))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _canon(v):
    return repr(float(v)) if isinstance(v, (int, float)) and not isinstance(v, bool) else str(v)


def _normalise(key, raw):
    """Map a possibly unit-suffixed key and its text value to (canonical key, value)."""
    key = key.strip().lower()
    text = raw.strip()
    # keys that themselves are canonical and end in a suffix-looking string are not converted
    if key in _KEYS:
        return key, _parse(key, _KEYS[key], text)
    for suffix, conv in _SUFFIXES:
        if key.endswith(suffix):
            base = key[: -len(suffix)]
            if base not in _KEYS or _KEYS[base] is not float:
                break
            return base, conv(_parse(key, float, text))
    raise ConfigError(key, "unknown key")


def _parse(key, kind, text):
    if kind is str:
        return text
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise ConfigError(key, "value must be finite")
    if kind is int:
        if value != int(value):
            raise ConfigError(key, f"expected an integer, got {text!r}")
        return int(value)
    return value


def parse_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        k, v = _normalise(key, raw)
        values[k] = v
    return values


def apply_overrides(values: dict, overrides) -> dict:
    """Return a copy of ``values`` updated from ``key=value`` strings."""
    out = dict(values)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, raw = item.split("=", 1)
        k, v = _normalise(key, raw)
        out[k] = v
    return out


def parse_targets(text: str) -> tuple:
    """``"1e-3:1e-3, 1e-4:1e-3"`` -> ((1e-3, 1e-3), (1e-4, 1e-3))."""
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            a, b = (float(x) for x in chunk.split(":"))
        except ValueError:
            raise ConfigError("targets", f"bad pair {chunk!r}, expected pout1:pout2") from None
        pairs.append((a, b))
    return tuple(pairs)


def _need(values, key):
    if key not in values:
        raise ConfigError(key, "missing")
    return values[key]


def _get(values, key, default):
    return values.get(key, default)


def _check(key, ok, message):
    if not ok:
        raise ConfigError(key, message)


def build_battery(values: dict, env=None) -> BatteryModel:
    env = os.environ if env is None else env
    name = env.get(BATTERY_ENV) or values.get("battery_profile", "placeholder")
    if name not in BATTERY_PROFILES:
        raise ConfigError("battery_profile", f"unknown profile {name!r}")
    base = battery_profile(name)
    overrides = {f: values[f"battery_{f}"] for f in _BATTERY_FIELDS if f"battery_{f}" in values}
    if not overrides:
        return base
    params = {f: overrides.get(f, getattr(base, f)) for f in _BATTERY_FIELDS}
    try:
        return BatteryModel(**params, label=f"{name}+overrides")
    except ValueError as exc:
        raise ConfigError("battery", str(exc)) from None


def build_config(values: dict, source: str = "<dict>", env=None) -> ExperimentConfig:
    v = values
    gap_s, gap_c = _need(v, "sr_gap"), _need(v, "cell_gap")
    _check("sr_gap", gap_s >= 1.0, f"capacity gap must be >= 1 (0 dB), got {gap_s!r}")
    _check("cell_gap", gap_c >= 1.0, f"capacity gap must be >= 1 (0 dB), got {gap_c!r}")
    for key in ("sr_frequency", "sr_bandwidth", "cell_frequency", "cell_bandwidth", "n0", "n_ebits"):
        _check(key, _need(v, key) > 0, "must be > 0")
    for key in ("sr_overhead_bits", "cell_overhead_bits"):
        _check(key, _need(v, key) >= 0, "must be >= 0")

    short = RadioInterface("short_range", v["sr_frequency"], v["sr_bandwidth"], gap_s, v["sr_overhead_bits"])
    cell = RadioInterface("cellular", v["cell_frequency"], v["cell_bandwidth"], gap_c, v["cell_overhead_bits"])

    d_12 = _need(v, "d_12")
    topo_kw = {
        "d_1b": _need(v, "d_1b"),
        "d_2b": _get(v, "d_2b", v["d_1b"]),
        "d_12": d_12,
        "d_21": _get(v, "d_21", d_12),
    }
    for key in ("sigma2_1b", "sigma2_2b", "sigma2_12", "sigma2_21", "g_u1", "g_u2", "g_bs"):
        if key in v:
            topo_kw[key] = v[key]
    for key, value in topo_kw.items():
        _check(key, value > 0, "must be > 0")
    topology = Topology(**topo_kw)

    pout = v.get("pout")
    rate = v.get("rate")
    q = {}
    for key in ("pout1", "pout2", "pout12", "pout21"):
        q[key] = v.get(key, pout)
        _check(key, q[key] is not None, "missing (set it or the shared 'pout')")
        _check(key, 0.0 < q[key] < 1.0, f"outage target must lie in (0, 1), got {q[key]!r}")
    for key in ("rate1", "rate2"):
        q[key] = v.get(key, rate)
        _check(key, q[key] is not None, "missing (set it or the shared 'rate')")
        _check(key, q[key] >= 0, "must be >= 0")
    qos = QosSpec(**q)

    scenario = Scenario(short, cell, topology, NoiseModel(v["n0"]), PacketSpec(v["n_ebits"]), qos)

    delta = v.get("delta", 0.005)
    _check("delta", delta > 0, "must be > 0")
    p2 = v.get("p2_threshold", "r1").lower()
    _check("p2_threshold", p2 in ("r1", "r2"), "must be 'r1' or 'r2'")
    targets = parse_targets(v["targets"]) if "targets" in v else ()
    for a, b in targets:
        _check("targets", 0 < a < 1 and 0 < b < 1, "each target must lie in (0, 1)")

    return ExperimentConfig(
        scenario=scenario,
        battery=build_battery(v, env),
        delta=delta,
        p2_threshold=p2,
        targets=targets,
        values=dict(v),
        source=source,
    )


def shipped_config_names() -> list[str]:
    root = resources.files("greenlink") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".cfg"))


def read_config_text(path: str | None) -> tuple[str, str]:
    """Text and source label for a file path or a shipped config name."""
    if path is None:
        path = DEFAULT_CONFIG
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), str(p)
    name = path if path.endswith(".cfg") else f"{path}.cfg"
    res = resources.files("greenlink") / "configs" / name
    if res.is_file():
        return res.read_text(encoding="utf-8"), f"shipped:{name}"
    raise ConfigError("config", f"no such file or shipped config: {path!r}")


def load_config(path: str | None = None, overrides=None, env=None) -> ExperimentConfig:
    text, source = read_config_text(path)
    values = apply_overrides(parse_text(text), overrides)
    return build_config(values, source=source, env=env)
