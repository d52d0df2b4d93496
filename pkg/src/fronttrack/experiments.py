"""Experiment presets with their initial data.

Also reads flat ``key = value`` config files."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from fronttrack.errors import ConfigurationError, InvalidFluxError
from fronttrack.flux import SpatialFlux, flux_from_name
from fronttrack.piecewise import PiecewiseConstantFn

Datum = Union[Callable, PiecewiseConstantFn]

# Table reproduction uses delta = dx = 1/n; see README ("Resolution convention").
DEFAULT_DELTA_SCALE = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    fluxes: tuple[str, ...]
    datum: str
    end_time: float
    interfaces: tuple[float, ...] = (0.0,)
    domain: tuple[float, float] = (-1.0, 1.0)
    n: int = 64
    reference_n: int = 2048
    fv_lambda: float = 0.5
    delta_scale: float = DEFAULT_DELTA_SCALE
    delta: Optional[float] = None
    window: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if len(self.fluxes) != len(self.interfaces) + 1:
            raise ConfigurationError(
                f"{len(self.interfaces)} interfaces need {len(self.interfaces) + 1} fluxes"
            )
        if self.n < 2:
            raise ConfigurationError(f"n must be at least 2, got {self.n}")
        if not self.end_time > 0:
            raise ConfigurationError(f"end time must be positive, got {self.end_time}")
        if self.domain[1] <= self.domain[0]:
            raise ConfigurationError(f"empty domain {self.domain}")

    @property
    def left_flux(self) -> str:
        return self.fluxes[0]

    @property
    def right_flux(self) -> str:
        return self.fluxes[-1]

    @property
    def error_window(self) -> tuple[float, float]:
        return self.window or self.domain

    def delta_for(self, n: int) -> float:
        return self.delta_scale / n

    @property
    def resolution(self) -> float:
        """The ``delta`` (= ``dx``) of a single solve."""
        return self.delta if self.delta is not None else self.delta_for(self.n)

    def spatial_flux(self) -> SpatialFlux:
        return SpatialFlux(self.interfaces, tuple(flux_from_name(s) for s in self.fluxes))

    def initial_datum(self) -> Datum:
        return parse_datum(self.datum)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def experiment_1(**kw) -> ExperimentConfig:
    """Transport (left) to Burgers (right); step datum 0.5 | 2 at x = -0.5."""
    cfg = ExperimentConfig(
        name="experiment1",
        fluxes=("identity", "burgers"),
        datum="step:-0.5:0.5:2",
        end_time=0.9,
        n=64,
        fv_lambda=0.5,
    )
    return cfg.with_overrides(**kw)


def experiment_2(**kw) -> ExperimentConfig:
    """Burgers (left) to transport (right); Gaussian bump on the level 2."""
    cfg = ExperimentConfig(
        name="experiment2",
        fluxes=("burgers", "identity"),
        datum="bump:2:1:100:-0.75",
        end_time=0.5,
        n=128,
        fv_lambda=0.2,
    )
    return cfg.with_overrides(**kw)


PRESETS = {"1": experiment_1, "2": experiment_2}


def preset(which: Union[int, str], **kw) -> ExperimentConfig:
    try:
        return PRESETS[str(which)](**kw)
    except KeyError:
        raise ConfigurationError(f"unknown experiment {which!r}; choose 1 or 2") from None


# {{{ initial data

_EXPR_NAMESPACE = {
    name: getattr(np, name)
    for name in ("exp", "sin", "cos", "tanh", "abs", "where", "sqrt", "pi", "minimum", "maximum")
}


def bump(base: float, amplitude: float, sharpness: float, center: float) -> Callable:
    def u0(x):
        return base + amplitude * np.exp(-sharpness * (np.asarray(x) - center) ** 2)
    return u0


def parse_datum(spec: str) -> Datum:
    """Parse an initial-datum description.

    * ``constant:c``
    * ``step:x0:left:right`` (more jumps: ``step:x1:x2:v0:v1:v2``)
    * ``bump:base:amplitude:sharpness:center``
      (``base + amplitude * exp(-sharpness * (x - center)**2)``)
    * ``expr:<numpy expression in x>``
    """
    kind, _, rest = spec.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "constant":
            return PiecewiseConstantFn.constant(float(rest))
        if kind == "step":
            nums = [float(v) for v in rest.split(":")]
            m = (len(nums) - 1) // 2
            if len(nums) != 2 * m + 1 or m < 1:
                raise ValueError("step needs m breakpoints followed by m+1 values")
            return PiecewiseConstantFn(np.array(nums[:m]), np.array(nums[m:]))
        if kind in ("bump", "gaussian-bump"):
            base, amp, sharp, center = (float(v) for v in rest.split(":"))
            return bump(base, amp, sharp, center)
        if kind == "expr":
            code = compile(rest, "<datum>", "eval")

            def u0(x):
                return np.asarray(eval(code, {"__builtins__": {}}, {**_EXPR_NAMESPACE, "x": x}),
                                  dtype=float) * np.ones_like(x, dtype=float)
            return u0
    except (TypeError, ValueError, SyntaxError) as exc:
        raise ConfigurationError(f"bad datum {spec!r}: {exc}") from exc
    raise ConfigurationError(f"unknown datum kind {kind!r}")

# }}}


# {{{ config files

def _floats(text: str) -> tuple[float, ...]:
    text = text.strip().strip("()[]")
    if not text:
        return ()
    return tuple(float(v) for v in text.replace(",", " ").split())


def _strings(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


_CONVERTERS: dict[str, Callable[[str], object]] = {
    "name": str.strip,
    "fluxes": _strings,
    "datum": str.strip,
    "end_time": float,
    "interfaces": _floats,
    "domain": _floats,
    "n": int,
    "reference_n": int,
    "fv_lambda": float,
    "delta_scale": float,
    "delta": float,
    "window": _floats,
}

# keys understood by the CLI but not part of ExperimentConfig
EXTRA_KEYS = {
    "experiment": str.strip,
    "n_list": lambda s: tuple(int(v) for v in s.replace(",", " ").split()),
    "eps_list": _floats,
    "mode": str.strip,
    "format": str.strip,
    "out_dir": str.strip,
}

ALIASES = {"lambda": "fv_lambda", "t": "end_time", "left_flux": None, "right_flux": None}


def read_config_file(path: Union[str, Path]) -> dict[str, object]:
    """Read flat ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, object] = {}
    flux_lr: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().lower().replace("-", "_")
        value = value.strip()
        if key in ("left_flux", "right_flux"):
            flux_lr[key] = value
            continue
        key = ALIASES.get(key, key) or key
        conv = _CONVERTERS.get(key) or EXTRA_KEYS.get(key)
        if conv is None:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = conv(value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    if flux_lr:
        if "fluxes" in out:
            raise ConfigurationError(f"{path}: give either 'fluxes' or left/right fluxes")
        if set(flux_lr) != {"left_flux", "right_flux"}:
            raise ConfigurationError(f"{path}: need both left_flux and right_flux")
        out["fluxes"] = (flux_lr["left_flux"], flux_lr["right_flux"])
    return out


def config_fields() -> set[str]:
    return {f.name for f in fields(ExperimentConfig)}


def build_config(base: Optional[ExperimentConfig], values: dict) -> ExperimentConfig:
    """Overlay ``values`` (config-file keys) on ``base``."""
    own = {k: v for k, v in values.items() if k in config_fields()}
    if base is None:
        missing = {"name", "fluxes", "datum", "end_time"} - set(own)
        own.setdefault("name", "custom")
        missing.discard("name")
        if missing:
            raise ConfigurationError(
                f"config without an experiment preset is missing {sorted(missing)}"
            )
        return ExperimentConfig(**own)
    try:
        return replace(base, **own)
    except (TypeError, InvalidFluxError) as exc:
        raise ConfigurationError(str(exc)) from exc

# }}}
