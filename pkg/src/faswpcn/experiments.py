"""Sweep experiments producing the package's CSV result tables.

Three table builders mirror the standard performance views: rate versus
transmit power (exact / Monte Carlo / high-SNR columns), rate versus the
time-switching ratio (one column set per requested curve), and energy
efficiency versus the port count at the per-point optimal time split.

Every CSV starts with a ``#`` comment block holding the command name,
seed, and the full resolved configuration, so each table can be
regenerated from its own header.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import CURVE_KEYS, ExperimentSpec, apply_sweep_value, serialize_config
from .energy import optimize_alpha
from .errors import ConfigError, NumericError
from .rate import (
    ScenarioConfig,
    _mc_rate_stats,
    _selected_gain_samples,
    ergodic_rate_asymptotic,
    ergodic_rate_exact,
    snr_scale,
)

__all__ = ["ResultTable", "run_rate_vs_power", "run_rate_vs_alpha", "run_ee_vs_ports", "write_csv"]


@dataclass(frozen=True)
class ResultTable:
    """Rectangular table: a header row plus one row per sweep value."""

    header: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(
                    f"ragged table: row of width {len(row)} under header of width {len(self.header)}"
                )

    def column(self, name: str) -> list:
        idx = self.header.index(name)
        return [row[idx] for row in self.rows]


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def table_to_csv_text(table: ResultTable, command: str, spec: ExperimentSpec) -> str:
    lines = [f"# faswpcn {command}", f"# seed = {spec.seed}", "# config:"]
    lines.extend(f"# {line}" for line in serialize_config(spec).splitlines())
    lines.append(",".join(table.header))
    lines.extend(",".join(_format_cell(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def write_csv(table: ResultTable, path: str | Path, command: str, spec: ExperimentSpec) -> None:
    Path(path).write_text(table_to_csv_text(table, command, spec))


def _curve_label(overrides: dict[str, float]) -> str:
    parts = []
    for key in CURVE_KEYS:
        if key in overrides:
            v = overrides[key]
            parts.append(f"{key}={int(v) if float(v).is_integer() else v}")
    return ",".join(parts)


def _col(base: str, label: str) -> str:
    return f"{base}[{label}]" if label else base


def _gain_cache(spec: ExperimentSpec):
    cache: dict[tuple, np.ndarray] = {}

    def get(scenario: ScenarioConfig, strategy: str) -> np.ndarray:
        key = (scenario.fas, scenario.fading, scenario.uplink_mode, strategy)
        if key not in cache:
            cache[key] = _selected_gain_samples(
                scenario.fas, scenario.fading, spec.trials, spec.seed, strategy, scenario.uplink_mode
            )
        return cache[key]

    return get


@contextmanager
def _annotate_numeric_errors(value):
    """Re-raise NumericError with the failing sweep point attached."""
    try:
        yield
    except NumericError as exc:
        raise NumericError(f"at sweep point {value!r}: {exc}") from exc


def run_rate_vs_power(spec: ExperimentSpec) -> ResultTable:
    """Rate against transmit power, one row per swept P_u."""
    if spec.sweep_parameter != "p_u":
        raise ConfigError("rate-vs-power requires sweep.parameter = p_u", key="sweep.parameter")
    methods = spec.methods or ("exact", "monte_carlo", "asymptotic")
    strategies = spec.strategies or ("mgs",)
    gains = _gain_cache(spec)

    header: list[str] = ["sweep_value"]
    if "exact" in methods:
        header.append("rate_exact")
    if "monte_carlo" in methods:
        for strategy in strategies:
            suffix = "" if strategy == "mgs" else f"_{strategy}"
            header += [f"rate_mc{suffix}", f"rate_mc{suffix}_stderr"]
    if "asymptotic" in methods:
        header.append("rate_asymptotic")

    rows = []
    for value in spec.sweep_values:
        scenario = apply_sweep_value(spec, value)
        row: list = [value]
        with _annotate_numeric_errors(value):
            if "exact" in methods:
                row.append(ergodic_rate_exact(scenario).rate)
            if "monte_carlo" in methods:
                nu = snr_scale(scenario)
                for strategy in strategies:
                    rate, stderr = _mc_rate_stats(scenario.alpha, nu, gains(scenario, strategy))
                    row += [rate, stderr]
            if "asymptotic" in methods:
                row.append(ergodic_rate_asymptotic(scenario).rate)
        rows.append(tuple(row))
    return ResultTable(header=tuple(header), rows=tuple(rows))


def run_rate_vs_alpha(spec: ExperimentSpec) -> ResultTable:
    """Rate against the time-switching ratio for each requested curve.

    Each curve's peak row is flagged in an ``is_peak`` column, judged on
    the Monte Carlo column when present, otherwise on the exact one.
    """
    if spec.sweep_parameter != "alpha":
        raise ConfigError("rate-vs-alpha requires sweep.parameter = alpha", key="sweep.parameter")
    methods = spec.methods or ("monte_carlo",)
    strategies = spec.strategies or ("mgs",)
    curves = spec.curve_overrides()
    gains = _gain_cache(spec)

    header: list[str] = ["sweep_value"]
    for overrides in curves:
        label = _curve_label(overrides)
        if "exact" in methods:
            header.append(_col("rate_exact", label))
        if "monte_carlo" in methods:
            for strategy in strategies:
                suffix = "" if strategy == "mgs" else f"_{strategy}"
                header += [_col(f"rate_mc{suffix}", label), _col(f"rate_mc{suffix}_stderr", label)]
        if "asymptotic" in methods:
            header.append(_col("rate_asymptotic", label))
        header.append(_col("is_peak", label))

    columns: dict[str, list] = {name: [] for name in header}
    columns["sweep_value"] = list(spec.sweep_values)
    for overrides in curves:
        label = _curve_label(overrides)
        for value in spec.sweep_values:
            scenario = apply_sweep_value(spec, value, overrides)
            with _annotate_numeric_errors(value):
                if "exact" in methods:
                    columns[_col("rate_exact", label)].append(ergodic_rate_exact(scenario).rate)
                if "monte_carlo" in methods:
                    nu = snr_scale(scenario)
                    for strategy in strategies:
                        suffix = "" if strategy == "mgs" else f"_{strategy}"
                        rate, stderr = _mc_rate_stats(scenario.alpha, nu, gains(scenario, strategy))
                        columns[_col(f"rate_mc{suffix}", label)].append(rate)
                        columns[_col(f"rate_mc{suffix}_stderr", label)].append(stderr)
                if "asymptotic" in methods:
                    columns[_col("rate_asymptotic", label)].append(
                        ergodic_rate_asymptotic(scenario).rate
                    )
        peak_basis = (
            columns[_col("rate_mc", label)]
            if "monte_carlo" in methods and "mgs" in strategies
            else columns[_col("rate_mc_rs", label)]
            if "monte_carlo" in methods
            else columns[_col("rate_exact", label)]
        )
        peak = int(np.argmax(peak_basis))
        columns[_col("is_peak", label)] = [int(i == peak) for i in range(len(spec.sweep_values))]

    rows = tuple(
        tuple(columns[name][i] for name in header) for i in range(len(spec.sweep_values))
    )
    return ResultTable(header=tuple(header), rows=rows)


def run_ee_vs_ports(spec: ExperimentSpec) -> ResultTable:
    """Energy efficiency at the per-point optimal time split versus port count.

    The random-selection column doubles as the fixed-antenna baseline.
    The optimizer runs on Monte Carlo rate estimates unless the config
    requests exclusively the exact method.
    """
    if spec.sweep_parameter != "n_ports":
        raise ConfigError("ee-vs-ports requires sweep.parameter = n_ports", key="sweep.parameter")
    strategies = spec.strategies or ("mgs", "rs")
    method = "exact" if spec.methods == ("exact",) else "monte_carlo"
    curves = spec.curve_overrides()

    header: list[str] = ["n_ports"]
    for overrides in curves:
        label = _curve_label(overrides)
        header += [_col(f"zeta_{s}", label) for s in strategies]
        header += [_col(f"alpha_star_{s}", label) for s in strategies]
        if method == "monte_carlo":
            header += [_col(f"zeta_{s}_stderr", label) for s in strategies]

    rows = []
    for value in spec.sweep_values:
        row: list = [int(value)]
        for overrides in curves:
            zetas, alphas, stderrs = [], [], []
            scenario = apply_sweep_value(spec, value, overrides)
            with _annotate_numeric_errors(value):
                for strategy in strategies:
                    result = optimize_alpha(
                        scenario,
                        spec.power_model,
                        method=method,
                        trials=spec.trials,
                        seed=spec.seed,
                        strategy=strategy,
                    )
                    zetas.append(result.zeta)
                    alphas.append(result.alpha_star)
                    stderrs.append(result.rate_std_error / result.p_total)
            row += zetas + alphas + (stderrs if method == "monte_carlo" else [])
        rows.append(tuple(row))
    return ResultTable(header=tuple(header), rows=tuple(rows))
