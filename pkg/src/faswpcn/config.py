"""Experiment configuration files.

Plain ``key = value`` text, one entry per line, ``#`` comments allowed.
Keys are grouped by dotted section; unknown keys are rejected.  The full
schema with defaults:

    geometry.d          vertical-hover shortcut: UAV at (0, 0, d), node at origin
    geometry.uav_x/uav_y/uav_h   explicit UAV position (default 0, 0, 25)
    geometry.ch_x/ch_y/ch_h      explicit node position (default 0, 0, 0)
    pathloss.beta_ref   linear gain at 1 m          (default 1e-3)
    pathloss.rho        path-loss exponent          (default 2.7)
    fas.n_ports         number of ports             (default 100)
    fas.width           aperture width, wavelengths (default 2.0)
    fas.mu              pinned correlation; derived from the aperture if absent
    fading.m            Nakagami shape, integer     (default 1)
    fading.sigma_sq     per-port average power      (default 1.0)
    power.eta           harvest efficiency          (default 0.8)
    power.p_u           UAV transmit power, W       (default 1.0)
    power.n0            noise power, W              (default 1e-9)
    power.alpha         time-switching ratio        (default 0.5)
    power.t_slot        slot duration, s            (default 1.0)
    power.p_c/p_o/p_i   circuit / blade / induced power (defaults 0.1 / 79.86 / 88.63)
    sweep.parameter     one of p_u, alpha, n_ports, width, m, d   (required)
    sweep.values        comma-separated, strictly increasing      (required)
    sweep.methods       subset of exact, monte_carlo, asymptotic  (command default if absent)
    sweep.strategies    subset of mgs, rs                         (command default if absent)
    sweep.curves        semicolon-separated override lists, e.g.
                        "n_ports=10,d=25; n_ports=100,d=25"
    sweep.output        output CSV path
    mc.trials           Monte Carlo trials          (default 1000000)
    mc.seed             base seed                   (default 7)
    mc.uplink_mode      reciprocal | independent    (default reciprocal)

``geometry.d`` may not be combined with explicit coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .channel import FadingParams, FasGeometry, Geometry, PathLossParams
from .energy import PowerModel
from .errors import ConfigError, DomainError
from .rate import STRATEGIES, UPLINK_MODES, ScenarioConfig

__all__ = ["ExperimentSpec", "load_config", "parse_config", "serialize_config"]

SWEEP_PARAMETERS = ("p_u", "alpha", "n_ports", "width", "m", "d")
METHODS = ("exact", "monte_carlo", "asymptotic")
CURVE_KEYS = ("n_ports", "width", "m", "d")

_GEOMETRY_COORD_KEYS = (
    "geometry.uav_x",
    "geometry.uav_y",
    "geometry.uav_h",
    "geometry.ch_x",
    "geometry.ch_y",
    "geometry.ch_h",
)

_FLOAT_KEYS = {
    "geometry.d",
    *_GEOMETRY_COORD_KEYS,
    "pathloss.beta_ref",
    "pathloss.rho",
    "fas.width",
    "fas.mu",
    "fading.sigma_sq",
    "power.eta",
    "power.p_u",
    "power.n0",
    "power.alpha",
    "power.t_slot",
    "power.p_c",
    "power.p_o",
    "power.p_i",
}
_INT_KEYS = {"fas.n_ports", "fading.m", "mc.trials", "mc.seed"}
_STR_KEYS = {
    "sweep.parameter",
    "sweep.values",
    "sweep.methods",
    "sweep.strategies",
    "sweep.curves",
    "sweep.output",
    "mc.uplink_mode",
}
_KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully resolved experiment description."""

    scenario: ScenarioConfig
    power_model: PowerModel
    sweep_parameter: str
    sweep_values: tuple[float, ...]
    methods: tuple[str, ...] | None
    strategies: tuple[str, ...] | None
    trials: int
    seed: int
    output_path: str | None
    curves: tuple[tuple[tuple[str, float], ...], ...]
    explicit_mu: float | None

    def curve_overrides(self) -> list[dict[str, float]]:
        return [dict(c) for c in self.curves] if self.curves else [{}]


def _parse_scalar(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse value {raw!r}", key=key) from exc
    return raw


def _parse_list(key: str, raw: str, allowed: tuple[str, ...]) -> tuple[str, ...]:
    items = tuple(s.strip() for s in raw.split(",") if s.strip())
    for item in items:
        if item not in allowed:
            raise ConfigError(f"unknown entry {item!r}, allowed: {allowed}", key=key)
    if not items:
        raise ConfigError("empty list", key=key)
    if len(set(items)) != len(items):
        raise ConfigError("duplicate entries", key=key)
    return items


def _parse_curves(raw: str) -> tuple[tuple[tuple[str, float], ...], ...]:
    curves = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        overrides = []
        for assign in chunk.split(","):
            if "=" not in assign:
                raise ConfigError(f"curve override {assign!r} is not key=value", key="sweep.curves")
            k, v = (s.strip() for s in assign.split("=", 1))
            if k not in CURVE_KEYS:
                raise ConfigError(f"unknown curve key {k!r}, allowed: {CURVE_KEYS}", key="sweep.curves")
            try:
                value = int(v) if k in ("n_ports", "m") else float(v)
            except ValueError as exc:
                raise ConfigError(f"cannot parse curve value {v!r}", key="sweep.curves") from exc
            overrides.append((k, float(value)))
        curves.append(tuple(overrides))
    if not curves:
        raise ConfigError("no curves given", key="sweep.curves")
    return tuple(curves)


def parse_config(text: str) -> ExperimentSpec:
    """Parse and fully validate a configuration from its text form."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, raw = (s.strip() for s in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError("unknown key", key=key)
        if key in values:
            raise ConfigError("duplicate key", key=key)
        values[key] = _parse_scalar(key, raw)

    if "geometry.d" in values and any(k in values for k in _GEOMETRY_COORD_KEYS):
        raise ConfigError("cannot combine with explicit coordinates", key="geometry.d")

    def take(key: str, default):
        return values.get(key, default)

    try:
        if "geometry.d" in values:
            geometry = Geometry(uav_position=(0.0, 0.0, float(values["geometry.d"])))
        else:
            geometry = Geometry(
                uav_position=(
                    take("geometry.uav_x", 0.0),
                    take("geometry.uav_y", 0.0),
                    take("geometry.uav_h", 25.0),
                ),
                ch_position=(
                    take("geometry.ch_x", 0.0),
                    take("geometry.ch_y", 0.0),
                    take("geometry.ch_h", 0.0),
                ),
            )
        explicit_mu = take("fas.mu", None)
        fas = FasGeometry(
            n_ports=take("fas.n_ports", 100),
            width_wavelengths=take("fas.width", 2.0),
            mu=explicit_mu,
        )
        fading = FadingParams(m=take("fading.m", 1), sigma_sq=take("fading.sigma_sq", 1.0))
        scenario = ScenarioConfig(
            geometry=geometry,
            path_loss_params=PathLossParams(
                beta_ref=take("pathloss.beta_ref", 1e-3), rho=take("pathloss.rho", 2.7)
            ),
            fas=fas,
            fading=fading,
            eta=take("power.eta", 0.8),
            p_u=take("power.p_u", 1.0),
            n0=take("power.n0", 1e-9),
            alpha=take("power.alpha", 0.5),
            t_slot=take("power.t_slot", 1.0),
            uplink_mode=take("mc.uplink_mode", "reciprocal"),
        )
        power_model = PowerModel(
            p_c=take("power.p_c", 0.1), p_o=take("power.p_o", 79.86), p_i=take("power.p_i", 88.63)
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    if "sweep.parameter" not in values:
        raise ConfigError("required key is missing", key="sweep.parameter")
    parameter = str(values["sweep.parameter"])
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"must be one of {SWEEP_PARAMETERS}, got {parameter!r}", key="sweep.parameter")

    if "sweep.values" not in values:
        raise ConfigError("required key is missing", key="sweep.values")
    try:
        sweep_values = tuple(float(s) for s in str(values["sweep.values"]).split(",") if s.strip())
    except ValueError as exc:
        raise ConfigError("values must be numbers", key="sweep.values") from exc
    if not sweep_values:
        raise ConfigError("sweep needs at least one value", key="sweep.values")
    if any(b <= a for a, b in zip(sweep_values, sweep_values[1:])):
        raise ConfigError("values must be strictly increasing", key="sweep.values")
    if parameter in ("n_ports", "m") and any(not v.is_integer() or v < 1 for v in sweep_values):
        raise ConfigError(f"{parameter} sweep values must be positive integers", key="sweep.values")
    if parameter == "alpha" and any(not 0.0 < v < 1.0 for v in sweep_values):
        raise ConfigError("alpha sweep values must lie in (0, 1)", key="sweep.values")

    methods = _parse_list("sweep.methods", str(values["sweep.methods"]), METHODS) \
        if "sweep.methods" in values else None
    strategies = _parse_list("sweep.strategies", str(values["sweep.strategies"]), STRATEGIES) \
        if "sweep.strategies" in values else None
    curves = _parse_curves(str(values["sweep.curves"])) if "sweep.curves" in values else ()

    trials = int(take("mc.trials", 1_000_000))
    if (methods is None or "monte_carlo" in methods) and trials < 1_000:
        raise ConfigError("at least 1000 trials are required with monte_carlo", key="mc.trials")
    uplink_mode = str(take("mc.uplink_mode", "reciprocal"))
    if uplink_mode not in UPLINK_MODES:
        raise ConfigError(f"must be one of {UPLINK_MODES}", key="mc.uplink_mode")

    return ExperimentSpec(
        scenario=scenario,
        power_model=power_model,
        sweep_parameter=parameter,
        sweep_values=sweep_values,
        methods=methods,
        strategies=strategies,
        trials=trials,
        seed=int(take("mc.seed", 7)),
        output_path=values.get("sweep.output"),  # type: ignore[arg-type]
        curves=curves,
        explicit_mu=explicit_mu,
    )


def load_config(path: str | Path) -> ExperimentSpec:
    """Read and parse a configuration file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def _format_number(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() and abs(x) < 1e15 else repr(float(x))


def serialize_config(spec: ExperimentSpec) -> str:
    """Canonical text form; parses back to an identical spec."""
    sc = spec.scenario
    lines = []
    ux, uy, uh = sc.geometry.uav_position
    cx, cy, ch = sc.geometry.ch_position
    for key, val in (
        ("geometry.uav_x", ux),
        ("geometry.uav_y", uy),
        ("geometry.uav_h", uh),
        ("geometry.ch_x", cx),
        ("geometry.ch_y", cy),
        ("geometry.ch_h", ch),
        ("pathloss.beta_ref", sc.path_loss_params.beta_ref),
        ("pathloss.rho", sc.path_loss_params.rho),
        ("fas.n_ports", sc.fas.n_ports),
        ("fas.width", sc.fas.width_wavelengths),
    ):
        lines.append(f"{key} = {_format_number(val)}")
    if spec.explicit_mu is not None:
        lines.append(f"fas.mu = {_format_number(spec.explicit_mu)}")
    for key, val in (
        ("fading.m", sc.fading.m),
        ("fading.sigma_sq", sc.fading.sigma_sq),
        ("power.eta", sc.eta),
        ("power.p_u", sc.p_u),
        ("power.n0", sc.n0),
        ("power.alpha", sc.alpha),
        ("power.t_slot", sc.t_slot),
        ("power.p_c", spec.power_model.p_c),
        ("power.p_o", spec.power_model.p_o),
        ("power.p_i", spec.power_model.p_i),
    ):
        lines.append(f"{key} = {_format_number(val)}")
    lines.append(f"sweep.parameter = {spec.sweep_parameter}")
    lines.append("sweep.values = " + ",".join(_format_number(v) for v in spec.sweep_values))
    if spec.methods is not None:
        lines.append("sweep.methods = " + ",".join(spec.methods))
    if spec.strategies is not None:
        lines.append("sweep.strategies = " + ",".join(spec.strategies))
    if spec.curves:
        chunks = [
            ",".join(f"{k}={_format_number(v)}" for k, v in curve) for curve in spec.curves
        ]
        lines.append("sweep.curves = " + "; ".join(chunks))
    if spec.output_path is not None:
        lines.append(f"sweep.output = {spec.output_path}")
    lines.append(f"mc.trials = {spec.trials}")
    lines.append(f"mc.seed = {spec.seed}")
    lines.append(f"mc.uplink_mode = {sc.uplink_mode}")
    return "\n".join(lines) + "\n"


def apply_sweep_value(spec: ExperimentSpec, value: float, overrides: dict[str, float] | None = None) -> ScenarioConfig:
    """Scenario at one sweep point, with optional per-curve overrides."""
    params: dict[str, float] = dict(overrides or {})
    params[spec.sweep_parameter] = value
    sc = spec.scenario

    n_ports = int(params.get("n_ports", sc.fas.n_ports))
    width = float(params.get("width", sc.fas.width_wavelengths))
    if n_ports != sc.fas.n_ports or width != sc.fas.width_wavelengths:
        fas = FasGeometry(n_ports=n_ports, width_wavelengths=width, mu=spec.explicit_mu)
    else:
        fas = sc.fas

    fading = sc.fading
    if "m" in params:
        fading = FadingParams(m=int(params["m"]), sigma_sq=sc.fading.sigma_sq)

    geometry = sc.geometry
    if "d" in params:
        geometry = Geometry(
            uav_position=(0.0, 0.0, float(params["d"])), ch_position=sc.geometry.ch_position
        )

    out = replace(sc, fas=fas, fading=fading, geometry=geometry)
    if "p_u" in params:
        out = replace(out, p_u=float(params["p_u"]))
    if "alpha" in params:
        out = replace(out, alpha=float(params["alpha"]))
    return out
