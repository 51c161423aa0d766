"""Spontaneous emission and absorption rates, in units of the bare decay rate.

Every rate here is normalized to ``gamma0``, the free-space decay rate
of the undriven emitter; :func:`gamma0_si` converts to absolute units.
Partial rates combine a cross-ladder overlap with the cubic photon-
frequency factor; totals sum the allowed channels.  Closed forms are
provided for the two benchmark cases (decay of the lowest upper level,
absorption from the lowest drive-excited lower level) and for the
large-index semiclassical limit, where overlaps become Bessel functions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from .ladder import DressedState, TransitionRecord, allowed_final_indices, photon_frequency
from .numerics import _bessel_j_orders, bessel_j, bessel_truncation_order
from .overlaps import ModelParams, overlap_log_abs

__all__ = [
    "RateTable",
    "PhotonDistribution",
    "Gamma0Params",
    "SemiclassicalTotals",
    "partial_rate",
    "total_rate",
    "suppression_rate_e0",
    "absorption_rate_g1",
    "weighted_total_rate",
    "semiclassical_partial",
    "semiclassical_totals",
    "gamma0_si",
    "REDUCED_PLANCK",
    "VACUUM_PERMITTIVITY",
    "SPEED_OF_LIGHT",
    "DEBYE",
]

# CODATA-2018 values, pinned so results never drift with library updates.
# REDUCED_PLANCK is h / (2 pi) with h exact by SI definition.
REDUCED_PLANCK = 1.0545718176461565e-34  # J s
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F / m
SPEED_OF_LIGHT = 299792458.0  # m / s (exact)
DEBYE = 3.335640951981521e-30  # C m (1e-21 / c, exact definition)

_BOUNDARY_SNAP = 1e-9


@dataclass(frozen=True)
class RateTable:
    """All spontaneous transitions out of one dressed state.

    ``transitions`` are ordered by final index; ``total_over_gamma0`` is
    their compensated sum and is checked against the listed partials at
    construction.
    """

    initial: DressedState
    transitions: tuple[TransitionRecord, ...]
    total_over_gamma0: float

    def __post_init__(self):
        resummed = math.fsum(t.rate_over_gamma0 for t in self.transitions)
        if abs(resummed - self.total_over_gamma0) > 1e-14 * max(resummed, 1e-300):
            raise ValueError("total_over_gamma0 does not match the listed partials")


@dataclass(frozen=True)
class PhotonDistribution:
    """Normalized weights over oscillator indices."""

    weights: Mapping[int, float]

    def __post_init__(self):
        cleaned = {}
        for key, value in self.weights.items():
            if isinstance(key, bool) or not isinstance(key, (int, np.integer)):
                raise ValueError(f"indices must be integers, got {key!r}")
            if int(key) < 0:
                raise ValueError(f"indices must be >= 0, got {key}")
            value = float(value)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"weights must be finite and >= 0, got {value!r}")
            cleaned[int(key)] = value
        total = math.fsum(cleaned.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {total!r}")
        object.__setattr__(self, "weights", cleaned)

    @classmethod
    def delta(cls, n: int) -> "PhotonDistribution":
        return cls({n: 1.0})

    @classmethod
    def poisson(cls, mean: float, cutoff: float = 1e-18) -> "PhotonDistribution":
        """Poisson weights, truncated where terms fall below ``cutoff`` of
        the peak and renormalized."""
        mean = float(mean)
        if not (math.isfinite(mean) and 0.0 <= mean <= 1e7):
            raise ValueError(f"0 <= mean <= 1e7 required, got {mean!r}")
        if mean == 0.0:
            return cls.delta(0)
        spread = 40.0 * math.sqrt(mean + 1.0) + 20.0
        lo = max(0, math.floor(mean - spread))
        hi = math.ceil(mean + spread)
        ks = np.arange(lo, hi + 1)
        log_pmf = ks * math.log(mean) - mean - np.array(
            [math.lgamma(k + 1) for k in ks]
        )
        log_pmf -= log_pmf.max()
        pmf = np.exp(log_pmf)
        keep = pmf >= cutoff
        ks, pmf = ks[keep], pmf[keep]
        total = math.fsum(pmf.tolist())
        return cls({int(k): float(v) / total for k, v in zip(ks, pmf)})


@dataclass(frozen=True)
class Gamma0Params:
    """Inputs for the absolute free-space decay rate."""

    omega0: float  # rad / s
    dipole: float  # C m

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 > 0.0):
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")
        if not (math.isfinite(self.dipole) and self.dipole >= 0.0):
            raise ValueError(f"dipole must be >= 0, got {self.dipole!r}")


class SemiclassicalTotals(NamedTuple):
    gamma_e: float
    gamma_g: float


def partial_rate(from_state: DressedState, n_prime: int, params: ModelParams) -> float:
    """Rate of ``from_state -> (opposite branch, n_prime)`` over gamma0.

    The overlap squared times the cube of the emitted frequency in units
    of the bare transition frequency.  Raises for a final index outside
    the allowed range.
    """
    freq = photon_frequency(from_state, n_prime, params) / params.omega0
    log_abs = overlap_log_abs(n_prime, from_state.n, params)
    if log_abs == float("-inf") or freq == 0.0:
        return 0.0
    return math.exp(2.0 * log_abs) * freq**3


def _candidate_final_indices(state: DressedState, params: ModelParams) -> range:
    """Allowed final indices restricted to where overlaps have support.

    The overlap of index ``n`` against ``n'`` dies superexponentially
    once ``|n - n'|`` exceeds ``x = 2 beta sqrt(n)`` (below) or the
    displaced-support width ``20 beta^2`` (above); the caps carry the
    same safety margins as the completeness checks, so the dropped tail
    is below 1e-12 of any total.
    """
    full = allowed_final_indices(state, params)
    if len(full) == 0:
        return full
    beta = params.beta
    x = 2.0 * beta * math.sqrt(state.n)
    below = math.ceil(x + 40.0 * x ** (1.0 / 3.0) + 60.0)
    above = math.ceil(20.0 * beta * beta + 60.0)
    lo = max(full.start, state.n - below)
    hi = min(full.stop - 1, state.n + above)
    if lo > hi:
        # Window and allowed range can only disconnect for a far-detuned
        # lower branch, where every in-window channel is forbidden anyway;
        # keep the nearest allowed channels to stay conservative.
        return full if len(full) <= below else range(full.stop - below, full.stop)
    return range(lo, hi + 1)


def total_rate(from_state: DressedState, params: ModelParams) -> RateTable:
    """Total spontaneous rate out of a dressed state, with its channel table."""
    to_branch = "g" if from_state.branch == "e" else "e"
    records = []
    for n_prime in _candidate_final_indices(from_state, params):
        freq = photon_frequency(from_state, n_prime, params) / params.omega0
        log_abs = overlap_log_abs(n_prime, from_state.n, params)
        if log_abs == float("-inf") or freq == 0.0:
            rate = 0.0
        else:
            rate = math.exp(2.0 * log_abs) * freq**3
        records.append(
            TransitionRecord(
                initial=from_state,
                final=DressedState(to_branch, n_prime),
                rate_over_gamma0=rate,
                photon_freq=freq,
            )
        )
    total = math.fsum(r.rate_over_gamma0 for r in records)
    return RateTable(
        initial=from_state, transitions=tuple(records), total_over_gamma0=total
    )


def suppression_rate_e0(params: ModelParams) -> float:
    """Closed-form total decay rate of the lowest upper level, over gamma0.

    ``e^{-beta^2} sum_{n'=0}^{floor(omega0/omega_drive)}
    beta^{2n'} / n'! (1 - n' omega_drive/omega0)^3``; always <= 1, and
    exactly 1 at zero coupling.
    """
    beta = params.beta
    if beta == 0.0:
        return 1.0
    ratio = params.omega_drive / params.omega0
    bound = params.omega0 / params.omega_drive
    nearest = round(bound)
    if abs(bound - nearest) <= _BOUNDARY_SNAP * max(1.0, abs(bound)):
        bound = float(nearest)
    n_hi = math.floor(bound)
    lam = beta * beta
    # Poisson weights die off well inside this window.
    n_hi = min(n_hi, math.ceil(lam + 40.0 * math.sqrt(lam + 1.0) + 20.0))
    log_beta2 = 2.0 * math.log(beta)
    terms = []
    for n_prime in range(n_hi + 1):
        factor = max(0.0, 1.0 - n_prime * ratio)
        if factor == 0.0:
            continue
        terms.append(
            math.exp(-lam + n_prime * log_beta2 - math.lgamma(n_prime + 1))
            * factor**3
        )
    return math.fsum(terms)


def absorption_rate_g1(params: ModelParams) -> float:
    """Rate of spontaneous decay out of the lower branch's first level.

    Nonzero only for a drive above the transition frequency:
    ``e^{-beta^2} beta^2 (omega_drive/omega0 - 1)^3``.  Maximized over
    the coupling at ``coupling_abs = 2 omega_drive``.
    """
    ratio = params.omega_drive / params.omega0
    if ratio <= 1.0:
        return 0.0
    beta = params.beta
    return math.exp(-beta * beta) * beta * beta * (ratio - 1.0) ** 3


def weighted_total_rate(
    branch: str, dist: PhotonDistribution, params: ModelParams
) -> float:
    """Distribution-averaged total rate ``sum_n w_n Gamma_(branch,n)``."""
    if branch not in ("e", "g"):
        raise ValueError(f"branch must be 'e' or 'g', got {branch!r}")
    return math.fsum(
        weight * total_rate(DressedState(branch, n), params).total_over_gamma0
        for n, weight in sorted(dist.weights.items())
    )


def _rounded_index(n_bar: float) -> int:
    n_bar = float(n_bar)
    if not (math.isfinite(n_bar) and n_bar >= 0.0):
        raise ValueError(f"n_bar must be finite and >= 0, got {n_bar!r}")
    return round(n_bar)  # round-half-to-even


def _snapped_ratio(params: ModelParams) -> float:
    r0 = params.omega0 / params.omega_drive
    nearest = round(r0)
    if abs(r0 - nearest) <= _BOUNDARY_SNAP * max(1.0, r0):
        return float(nearest)
    return r0


def semiclassical_partial(
    branch: str, n_bar: float, p: int, params: ModelParams
) -> float:
    """Large-index partial rate into the channel shifting the drive index by p.

    ``J_p(x)^2 (s + p omega_drive/omega0)^3`` with
    ``x = coupling_abs sqrt([n_bar]) / omega_drive`` and ``[.]`` the
    nearest integer.  The channel must satisfy the emission restriction
    ``p >= -s omega0/omega_drive`` and sit well inside the asymptotic
    regime (``[n_bar] >= 10 |p|``).
    """
    if branch not in ("e", "g"):
        raise ValueError(f"branch must be 'e' or 'g', got {branch!r}")
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise ValueError(f"p must be an integer, got {p!r}")
    p = int(p)
    sign = +1 if branch == "e" else -1
    n_round = _rounded_index(n_bar)
    if n_round < 10 * abs(p):
        raise ValueError(
            f"[n_bar] >= 10 |p| required for the asymptotic regime, "
            f"got [n_bar]={n_round}, p={p}"
        )
    r0 = _snapped_ratio(params)
    if p < -sign * r0:
        raise ValueError(
            f"p >= {-sign * r0:g} required on branch {branch!r}, got {p}"
        )
    x = params.coupling_abs * math.sqrt(n_round) / params.omega_drive
    factor = max(0.0, sign + p * params.omega_drive / params.omega0)
    return bessel_j(p, x) ** 2 * factor**3


def semiclassical_totals(n_bar: float, params: ModelParams) -> SemiclassicalTotals:
    """Closed-form large-index totals for both branches, over gamma0.

    ``gamma_g`` sums the blue-shifted channels ``p >= omega0/omega_drive``;
    ``gamma_e`` follows from the Bessel closure identities as
    ``1 + (3 coupling_abs^2 / (2 omega0^2)) [n_bar] + gamma_g``.
    """
    n_round = _rounded_index(n_bar)
    if n_round < 1:
        raise ValueError(f"[n_bar] >= 1 required, got [n_bar]={n_round}")
    if params.coupling_abs == 0.0:
        return SemiclassicalTotals(1.0, 0.0)

    x = params.coupling_abs * math.sqrt(n_round) / params.omega_drive
    ratio = params.omega_drive / params.omega0
    p_min = math.ceil(_snapped_ratio(params))
    p_hi = max(bessel_truncation_order(x), p_min + 8)

    def block(lo: int, hi: int) -> float:
        ps = np.arange(lo, hi + 1)
        js = _bessel_j_orders(ps, x)
        factors = np.maximum(0.0, ps * ratio - 1.0)
        return float(np.sum(js * js * factors**3))

    gamma_g = block(p_min, p_hi)
    # The truncation order already sits past the Bessel turning point;
    # extend in blocks until the remainder is provably negligible.
    for _ in range(1000):
        tail = block(p_hi + 1, p_hi + 32)
        gamma_g += tail
        p_hi += 32
        if tail <= 1e-14 * max(gamma_g, 1.0):
            break
    else:
        warnings.warn("semiclassical tail did not converge; result truncated")

    gamma_e = (
        1.0
        + 1.5 * (params.coupling_abs / params.omega0) ** 2 * n_round
        + gamma_g
    )
    return SemiclassicalTotals(gamma_e, gamma_g)


def gamma0_si(params: Gamma0Params) -> float:
    """Free-space decay rate in 1/s for a dipole in vacuum."""
    return params.omega0**3 * params.dipole**2 / (
        3.0 * REDUCED_PLANCK * VACUUM_PERMITTIVITY * math.pi * SPEED_OF_LIGHT**3
    )
