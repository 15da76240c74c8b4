"""UAV-to-ground channel model.

Covers the slant distance, the distance power law, the common correlation
coefficient of the fluid-antenna ports, and the correlated Nakagami-m
envelope generator shared by every Monte Carlo path in the package.

Port-correlation semantics: the first port carries the shared reference
branches exactly, and every other port mixes its own independent branches
with the reference at weight ``mu``.  Conditioned on the first port's
branch power, ports 2..N are therefore independent noncentral-chi
envelopes, which is precisely the dependence structure the analytic
maximum-envelope CDF in :mod:`faswpcn.selection` integrates over.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .specfun import bessel_j0, reg_lower_gamma

__all__ = [
    "Geometry",
    "PathLossParams",
    "FasGeometry",
    "FadingParams",
    "EnvelopeSample",
    "distance",
    "path_loss",
    "port_correlation",
    "sample_envelopes",
    "sample_envelope_matrix",
    "marginal_envelope_cdf",
]


@dataclass(frozen=True)
class Geometry:
    """Hover position of the UAV and position of the ground cluster head.

    Positions are (x, y, height) in meters.  The ground node height is kept
    as metadata only: the slant distance uses the UAV altitude directly.
    """

    uav_position: tuple[float, float, float] = (0.0, 0.0, 25.0)
    ch_position: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.uav_position) != 3 or len(self.ch_position) != 3:
            raise DomainError("positions must be 3-vectors (x, y, height)")
        h_u = self.uav_position[2]
        h = self.ch_position[2]
        if not (h_u > h >= 0):
            raise DomainError(f"need UAV altitude > node height >= 0, got {h_u}, {h}")


@dataclass(frozen=True)
class PathLossParams:
    """Distance power law: linear gain beta_ref at 1 m, exponent rho."""

    beta_ref: float = 1e-3
    rho: float = 2.7

    def __post_init__(self):
        if not self.beta_ref > 0:
            raise DomainError(f"beta_ref must be positive, got {self.beta_ref}")
        if not self.rho >= 2:
            raise DomainError(f"rho must be >= 2, got {self.rho}")


@dataclass(frozen=True)
class FasGeometry:
    """Fluid-antenna aperture: port count, width in wavelengths, correlation.

    ``mu`` is the common correlation coefficient tying each port to the
    reference branch.  When not supplied it is derived as the square root
    of :func:`port_correlation`; passing it explicitly supports studies at
    a pinned correlation level.  Unused for a single port.
    """

    n_ports: int
    width_wavelengths: float = 2.0
    mu: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n_ports < 1:
            raise DomainError(f"n_ports must be >= 1, got {self.n_ports}")
        if self.width_wavelengths < 0:
            raise DomainError(f"width must be nonnegative, got {self.width_wavelengths}")
        if self.mu is None:
            derived = math.sqrt(port_correlation(self.n_ports, self.width_wavelengths)) \
                if self.n_ports >= 2 else 0.0
            object.__setattr__(self, "mu", derived)
        elif not 0.0 <= self.mu <= 1.0:
            raise DomainError(f"mu must lie in [0, 1], got {self.mu}")


@dataclass(frozen=True)
class FadingParams:
    """Nakagami shape m (positive integer) and per-port average power."""

    m: int = 1
    sigma_sq: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        if not self.sigma_sq > 0:
            raise DomainError(f"sigma_sq must be positive, got {self.sigma_sq}")


@dataclass(frozen=True)
class EnvelopeSample:
    """One draw of the per-port envelopes for a single link."""

    envelopes: np.ndarray

    def __post_init__(self):
        env = np.asarray(self.envelopes, dtype=float)
        if env.ndim != 1 or env.size == 0:
            raise DomainError("envelopes must be a non-empty 1-d vector")
        if np.any(env < 0):
            raise DomainError("envelopes must be nonnegative")
        object.__setattr__(self, "envelopes", env)

    def __len__(self) -> int:
        return self.envelopes.size


def distance(geometry: Geometry) -> float:
    """Slant distance between UAV and ground node in meters.

    Uses the UAV altitude, not the altitude difference; the node height is
    treated as metadata.
    """
    xu, yu, hu = geometry.uav_position
    xc, yc, _ = geometry.ch_position
    return math.sqrt(hu * hu + (xc - xu) ** 2 + (yc - yu) ** 2)


def path_loss(d: float, params: PathLossParams) -> float:
    """Linear channel power gain beta_ref * d**(-rho) at distance d > 0."""
    if not d > 0:
        raise DomainError(f"distance must be positive, got {d}")
    return params.beta_ref * d ** (-params.rho)


def port_correlation(n_ports: int, width_wavelengths: float) -> float:
    """Squared common correlation coefficient of an N-port aperture.

    Averages the Jakes correlation J0(2 pi k W / (N-1)) over all port
    pairs at lag k.  The average can go slightly negative for some
    (N, W); those geometries are treated as fully decorrelated, clamped
    to zero with a warning.  Returns mu**2; callers take the square root.
    """
    if n_ports < 2:
        raise DomainError("port correlation needs at least 2 ports")
    n = int(n_ports)
    w = float(width_wavelengths)
    lags = np.arange(1, n)
    terms = np.array([bessel_j0(2.0 * math.pi * k * w / (n - 1)) for k in lags])
    mu_sq = 2.0 / (n * (n - 1)) * float((n - lags) @ terms)
    if mu_sq < 0.0:
        warnings.warn(
            f"port correlation average is negative ({mu_sq:.4g}) for "
            f"N={n}, W={w}; clamping to 0 (treating ports as uncorrelated)",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    return min(mu_sq, 1.0)


def _branch_components(
    fas: FasGeometry, fading: FadingParams, n_draws: int, rng: np.random.Generator
):
    """Real and imaginary branch parts, shape (n_draws, m, N).

    Port 0 is the reference; ports 1..N-1 mix independent branches with it
    at weight mu.  Per-component variance is 1/2 so every port has unit
    mean branch power before the sigma_sq scaling.
    """
    n_ports = fas.n_ports
    mu = fas.mu
    mix = math.sqrt(max(0.0, 1.0 - mu * mu))
    scale = math.sqrt(0.5)
    re = np.empty((n_draws, fading.m, n_ports))
    im = np.empty((n_draws, fading.m, n_ports))
    for branch in range(fading.m):
        x0 = rng.normal(0.0, scale, size=(n_draws, 1))
        y0 = rng.normal(0.0, scale, size=(n_draws, 1))
        re[:, branch, :1] = x0
        im[:, branch, :1] = y0
        if n_ports > 1:
            x = rng.normal(0.0, scale, size=(n_draws, n_ports - 1))
            y = rng.normal(0.0, scale, size=(n_draws, n_ports - 1))
            re[:, branch, 1:] = mix * x + mu * x0
            im[:, branch, 1:] = mix * y + mu * y0
    return re, im


def sample_envelope_matrix(
    fas: FasGeometry, fading: FadingParams, n_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Batch of correlated Nakagami-m envelope draws, shape (n_draws, N)."""
    re, im = _branch_components(fas, fading, n_draws, rng)
    branch_power = np.sum(re * re + im * im, axis=1)
    return np.sqrt(fading.sigma_sq / fading.m * branch_power)


def sample_envelopes(
    fas: FasGeometry, fading: FadingParams, rng_stream: np.random.Generator
) -> EnvelopeSample:
    """One correlated envelope draw across all ports of the aperture."""
    return EnvelopeSample(sample_envelope_matrix(fas, fading, 1, rng_stream)[0])


def marginal_envelope_cdf(x: float, fading: FadingParams) -> float:
    """CDF of a single port's Nakagami-m envelope with average power sigma_sq."""
    if x < 0:
        raise DomainError(f"envelope threshold must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    return reg_lower_gamma(fading.m, fading.m * x * x / fading.sigma_sq)
