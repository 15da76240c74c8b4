"""Port selection strategies and the law of the selected envelope.

Maximum-gain selection (MGS) activates the strongest port; random
selection (RS) is the fixed-antenna benchmark.  ``fas_max_cdf`` gives the
exact CDF of the MGS envelope over N correlated ports: conditioned on the
reference port's envelope, the remaining ports are independent
noncentral-chi variables, so the joint survival factorizes inside a single
radial integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import EnvelopeSample, FadingParams, FasGeometry, marginal_envelope_cdf
from .errors import DomainError
from .quadrature import adaptive_quad
from .specfun import Tolerance, _marcum_q_core, ln_gamma

__all__ = ["SelectionOutcome", "select_mgs", "select_rs", "fas_max_cdf"]

_CDF_TOL = Tolerance(abs_tol=1e-10, rel_tol=1e-8, max_terms=1_000_000)


@dataclass(frozen=True)
class SelectionOutcome:
    """Index and envelope of the activated port."""

    port_index: int
    envelope: float


def select_mgs(sample: EnvelopeSample) -> SelectionOutcome:
    """Pick the port with the largest envelope; ties go to the lowest index."""
    env = sample.envelopes
    if env.size == 0:
        raise DomainError("cannot select from an empty sample")
    idx = int(np.argmax(env))
    return SelectionOutcome(port_index=idx, envelope=float(env[idx]))


def select_rs(sample: EnvelopeSample, rng_stream: np.random.Generator) -> SelectionOutcome:
    """Pick a uniformly random port (fixed-antenna benchmark)."""
    env = sample.envelopes
    if env.size == 0:
        raise DomainError("cannot select from an empty sample")
    idx = int(rng_stream.integers(env.size))
    return SelectionOutcome(port_index=idx, envelope=float(env[idx]))


def fas_max_cdf(
    x: float,
    fas: FasGeometry,
    fading: FadingParams,
    tol: Tolerance | None = None,
) -> float:
    """CDF of the maximum envelope over the aperture's correlated ports.

    Evaluates, by adaptive quadrature over the reference envelope r in
    [0, x],

        C * integral r^(2m-1) exp(-m r^2 / s2)
              * (1 - Q_m(sqrt(2 m mu^2 r^2 / (s2 (1-mu^2))),
                         sqrt(2 m x^2  / (s2 (1-mu^2)))))^(N-1) dr

    with C = 2 m^m / (Gamma(m) s2^m).  Fully correlated apertures
    (mu == 1) collapse to a single effective port and return the marginal
    CDF, as does a single-port aperture.
    """
    if tol is None:
        tol = _CDF_TOL
    if x < 0:
        raise DomainError(f"envelope threshold must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if fas.n_ports == 1 or fas.mu == 1.0:
        return marginal_envelope_cdf(x, fading)

    m = fading.m
    s2 = fading.sigma_sq
    mu_sq = fas.mu * fas.mu
    n_factors = fas.n_ports - 1
    log_prefactor = math.log(2.0) + m * math.log(m) - ln_gamma(m) - m * math.log(s2)
    noncentrality_rate = m * mu_sq / (s2 * (1.0 - mu_sq))     # (a^2/2) per r^2
    half_b2 = m * x * x / (s2 * (1.0 - mu_sq))

    def integrand(r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        q = _marcum_q_core(m, noncentrality_rate * r * r, half_b2, tol)
        with np.errstate(divide="ignore"):
            log_density = log_prefactor + (2 * m - 1) * np.log(r) - m * r * r / s2
            # factors live in [0, 1]; log-space keeps the (N-1)-fold product
            # from underflowing for large apertures
            log_factors = n_factors * np.log1p(-q)
        return np.exp(log_density + log_factors)

    value = adaptive_quad(integrand, 0.0, x, abs_tol=tol.abs_tol, rel_tol=tol.rel_tol)
    return min(max(value, 0.0), 1.0)
