"""Energy accounting and the optimal time-switching ratio.

The node harvests for a fraction alpha of the slot and transmits for the
rest, so the rate vanishes at both ends of (0, 1) and the interior
optimum is found by a coarse grid scan refined with golden-section
search.  Energy efficiency divides the optimized rate by the total UAV
power draw: circuit + transmit amplifier + hover (blade profile and
induced).  The amplifier term enters at full weight even though it only
radiates during alpha*T; scaling it by alpha would be the other
defensible convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScenarioError, DomainError
from .rate import ScenarioConfig, ergodic_rate_exact, ergodic_rate_mc, snr_scale, _selected_gain_samples

__all__ = [
    "PowerModel",
    "EfficiencyResult",
    "harvested_energy",
    "total_power",
    "energy_efficiency",
    "optimize_alpha",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PowerModel:
    """UAV power draw apart from the transmit amplifier, in watts.

    Defaults are the common rotary-wing hover constants (blade profile
    79.86 W, induced 88.63 W) plus a 0.1 W communication circuit; all
    three are plain fields so any power model can be substituted.
    """

    p_c: float = 0.1
    p_o: float = 79.86
    p_i: float = 88.63

    def __post_init__(self):
        for name in ("p_c", "p_o", "p_i"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative, got {getattr(self, name)}")


@dataclass(frozen=True)
class EfficiencyResult:
    """Optimal time split, the rate there, and rate per watt."""

    alpha_star: float
    rate_at_optimum: float
    zeta: float
    p_total: float
    rate_std_error: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha_star < 1.0:
            raise DomainError(f"alpha_star must be interior, got {self.alpha_star}")
        if not math.isclose(self.zeta, self.rate_at_optimum / self.p_total, rel_tol=1e-12):
            raise DomainError("zeta must equal rate_at_optimum / p_total")


def harvested_energy(cfg: ScenarioConfig, envelope: float) -> float:
    """Energy collected by the node over the harvest phase, in joules."""
    if envelope < 0:
        raise DomainError(f"envelope must be nonnegative, got {envelope}")
    return cfg.eta * cfg.p_u * cfg.link_gain() * envelope ** 2 * cfg.alpha * cfg.t_slot


def total_power(model: PowerModel, p_u: float) -> float:
    """Total UAV consumption: circuit + amplifier + hover."""
    if not p_u > 0:
        raise DomainError(f"p_u must be positive, got {p_u}")
    return model.p_c + p_u + model.p_o + model.p_i


def energy_efficiency(rate: float, p_total: float) -> float:
    """Rate per watt of total UAV consumption."""
    if not p_total > 0:
        raise DomainError(f"p_total must be positive, got {p_total}")
    if rate < 0:
        raise DomainError(f"rate must be nonnegative, got {rate}")
    return rate / p_total


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    """Argmax of a unimodal f on [lo, hi] to bracket width tol."""
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def optimize_alpha(
    cfg: ScenarioConfig,
    power_model: PowerModel | None = None,
    method: str = "exact",
    grid: int = 24,
    refine_tol: float = 1e-3,
    trials: int = 100_000,
    seed: int = 0,
    strategy: str = "mgs",
    forced_envelope: float | None = None,
) -> EfficiencyResult:
    """Maximize the ergodic rate over the time-switching ratio.

    Scans R(alpha) on the grid {i/(grid+1)} and refines the best bracket
    with golden-section search down to width ``refine_tol``.  The scan
    guards the unimodality assumption: if it sees several local maxima the
    best bracket is still refined, with a warning attached.  cfg.alpha is
    ignored and replaced by the scan variable.

    Monte Carlo evaluations reuse one set of channel-gain draws across
    every alpha (the fading does not depend on the time split), so the
    scanned curve is smooth and the result is deterministic per seed.
    """
    if power_model is None:
        power_model = PowerModel()
    if grid < 8:
        raise DomainError(f"grid must be >= 8, got {grid}")
    if not 0.0 < refine_tol < 0.1:
        raise DomainError(f"refine_tol must lie in (0, 0.1), got {refine_tol}")
    if method not in ("exact", "monte_carlo"):
        raise DomainError(f"method must be 'exact' or 'monte_carlo', got {method!r}")

    if method == "monte_carlo":
        if forced_envelope is not None:
            z = np.full(trials, float(forced_envelope) ** 4)
        else:
            z = _selected_gain_samples(cfg.fas, cfg.fading, trials, seed, strategy, cfg.uplink_mode)
        nu_per_alpha = snr_scale(cfg.with_alpha(0.5))  # alpha/(1-alpha) == 1 here

        def rate_at(alpha: float) -> float:
            nu = nu_per_alpha * alpha / (1.0 - alpha)
            return float((1.0 - alpha) * np.mean(np.log2(1.0 + nu * z)))

    else:

        def rate_at(alpha: float) -> float:
            return ergodic_rate_exact(cfg.with_alpha(alpha)).rate

    alphas = np.arange(1, grid + 1) / (grid + 1)
    rates = np.array([rate_at(a) for a in alphas])
    if np.all(rates == 0.0):
        raise DegenerateScenarioError("rate is identically zero across the alpha grid")

    interior = rates[1:-1]
    peaks = np.sum((interior > rates[:-2]) & (interior >= rates[2:]))
    if peaks > 1:
        warnings.warn(
            f"rate curve shows {peaks} local maxima on the alpha grid; "
            "refining the best bracket only",
            RuntimeWarning,
            stacklevel=2,
        )

    best = int(np.argmax(rates))
    lo = alphas[best - 1] if best > 0 else refine_tol / 2
    hi = alphas[best + 1] if best < grid - 1 else 1.0 - refine_tol / 2
    alpha_star = _golden_max(rate_at, float(lo), float(hi), refine_tol)
    rate_star = rate_at(alpha_star)

    std_error = 0.0
    if method == "monte_carlo":
        nu = nu_per_alpha * alpha_star / (1.0 - alpha_star)
        values = (1.0 - alpha_star) * np.log2(1.0 + nu * z)
        std_error = float(np.std(values, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0

    p_tot = total_power(power_model, cfg.p_u)
    return EfficiencyResult(
        alpha_star=float(alpha_star),
        rate_at_optimum=rate_star,
        zeta=rate_star / p_tot,
        p_total=p_tot,
        rate_std_error=std_error,
    )
