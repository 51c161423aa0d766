"""Log-safe scalar kernels shared by every other module.

Everything factorial-sized in this package runs through the
:class:`SignedLog` representation (natural log of the magnitude plus a
sign), so quantities like ``170!`` or ``beta**(2n)`` never overflow a
double.  The kernels here are pure functions: log-gamma, integer-order
Bessel J, associated Laguerre polynomials evaluated by a rescaled
three-term recurrence, and a sign-aware log-sum-exp reduction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special as _special

__all__ = [
    "SignedLog",
    "SIGNED_LOG_ZERO",
    "SIGNED_LOG_ONE",
    "CancellationWarning",
    "PrecisionLossWarning",
    "log_gamma",
    "bessel_j",
    "bessel_truncation_order",
    "assoc_laguerre",
    "assoc_laguerre_sequence",
    "signed_log_sum",
]

_NEG_INF = float("-inf")

# Summation is flagged as catastrophically cancelled when the surviving
# magnitude is below this fraction of the largest term (ten times the
# double-precision noise floor).
CANCELLATION_THRESHOLD = 1e-13

MAX_BESSEL_ORDER = 10**6
MAX_BESSEL_ARG = 1e6
MAX_LAGUERRE_DEGREE = 10**6


class CancellationWarning(UserWarning):
    """An alternating sum lost essentially all significant digits."""


class PrecisionLossWarning(UserWarning):
    """A recurrence stepped through cancellation deeper than 1e12 dynamic range."""


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as ``(ln|x|, sign)``.

    ``sign`` is +1, -1 or 0; zero is represented as ``(-inf, 0)``.  Any
    finite real round-trips through :meth:`from_float` / :meth:`to_float`
    to within a few ulp.
    """

    log_abs: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if (self.sign == 0) != (self.log_abs == _NEG_INF):
            raise ValueError("sign 0 must pair with log_abs=-inf and vice versa")
        if math.isnan(self.log_abs):
            raise ValueError("log_abs may not be NaN")

    @classmethod
    def from_float(cls, x: float) -> "SignedLog":
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            raise ValueError(f"cannot represent {x!r}")
        if x == 0.0:
            return SIGNED_LOG_ZERO
        return cls(math.log(abs(x)), 1 if x > 0.0 else -1)

    def to_float(self) -> float:
        # Overflows to +-inf when log_abs > ~709.78; callers that care stay
        # in log space instead of converting.
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def __mul__(self, other):
        if isinstance(other, SignedLog):
            if self.sign == 0 or other.sign == 0:
                return SIGNED_LOG_ZERO
            return SignedLog(self.log_abs + other.log_abs, self.sign * other.sign)
        return self * SignedLog.from_float(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SignedLog):
            if other.sign == 0:
                raise ZeroDivisionError("division by SignedLog zero")
            if self.sign == 0:
                return SIGNED_LOG_ZERO
            return SignedLog(self.log_abs - other.log_abs, self.sign * other.sign)
        return self / SignedLog.from_float(other)

    def __neg__(self):
        if self.sign == 0:
            return self
        return SignedLog(self.log_abs, -self.sign)


SIGNED_LOG_ZERO = SignedLog(_NEG_INF, 0)
SIGNED_LOG_ONE = SignedLog(0.0, 1)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def bessel_j(p: int, x: float) -> float:
    """Bessel function of the first kind at integer order ``p``.

    Negative orders are folded through ``J_{-p}(x) = (-1)^p J_p(x)``
    before evaluation, so the parity identity holds bit-exactly.
    """
    p = _checked_int(p, "p")
    x = float(x)
    if abs(p) > MAX_BESSEL_ORDER:
        raise ValueError(f"|p| <= {MAX_BESSEL_ORDER} required, got {p}")
    if not 0.0 <= x <= MAX_BESSEL_ARG:
        raise ValueError(f"0 <= x <= {MAX_BESSEL_ARG:g} required, got {x!r}")
    value = float(_special.jv(abs(p), x))
    if p < 0 and p % 2:
        value = -value
    return value


def _bessel_j_orders(orders: np.ndarray, x: float) -> np.ndarray:
    """Vectorized J_p(x) over an integer-order array, with parity folding."""
    orders = np.asarray(orders)
    values = _special.jv(np.abs(orders), x)
    odd_negative = (orders < 0) & (orders % 2 != 0)
    return np.where(odd_negative, -values, values)


def bessel_truncation_order(x: float) -> int:
    """Smallest summation cutoff P with a negligible Bessel tail.

    Past the turning point ``p ~ x`` the values J_p(x) die faster than
    exponentially; ``P >= x + 40 x^{1/3} + 20`` keeps every closure-sum
    tail below 1e-14 over the supported argument range.
    """
    x = float(x)
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    return math.ceil(x + 40.0 * x ** (1.0 / 3.0) + 20.0)


def _checked_int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got bool")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ValueError(f"{name} must be an integer, got {value!r}")


def _laguerre_scan(n_max: int, a: float, x: float, keep_all: bool):
    """Shared rescaled-float engine behind the Laguerre evaluations.

    Runs ``(k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}`` with both
    carries renormalized against a shared log offset, so degrees up to
    10^6 never overflow.  Returns either the final ``(log_abs, sign)``
    pair or, with ``keep_all``, arrays over every degree 0..n_max.
    """
    if keep_all:
        logs = np.empty(n_max + 1)
        signs = np.empty(n_max + 1, dtype=np.int8)

    def record(k, value, offset):
        if value == 0.0:
            logs[k] = _NEG_INF
            signs[k] = 0
        else:
            logs[k] = offset + math.log(abs(value))
            signs[k] = 1 if value > 0.0 else -1

    offset = 0.0
    prev = 1.0  # L_0
    if keep_all:
        record(0, prev, offset)
    if n_max == 0:
        if keep_all:
            return logs, signs
        return (0.0, 1)

    curr = 1.0 + a - x  # L_1
    if keep_all:
        record(1, curr, offset)

    worst_ratio = math.inf
    for k in range(1, n_max):
        t1 = (2.0 * k + 1.0 + a - x) * curr
        t2 = (k + a) * prev
        nxt = (t1 - t2) / (k + 1.0)
        scale = max(abs(t1), abs(t2))
        if scale > 0.0:
            ratio = abs(nxt) * (k + 1.0) / scale
            if ratio < worst_ratio:
                worst_ratio = ratio
        prev, curr = curr, nxt
        mag = max(abs(prev), abs(curr))
        if mag > 1e250 or (0.0 < mag < 1e-250):
            shift = math.log(mag)
            offset += shift
            rescale = math.exp(-shift)
            prev *= rescale
            curr *= rescale
        if keep_all:
            record(k + 1, curr, offset)

    if worst_ratio < 1e-12:
        warnings.warn(
            f"Laguerre recurrence passed through cancellation of "
            f"{worst_ratio:.2e} relative magnitude (degree {n_max}, a={a}, x={x})",
            PrecisionLossWarning,
            stacklevel=3,
        )
    if keep_all:
        return logs, signs
    if curr == 0.0:
        return (_NEG_INF, 0)
    return (offset + math.log(abs(curr)), 1 if curr > 0.0 else -1)


def assoc_laguerre(n: int, a: float, x: float) -> SignedLog:
    """Associated Laguerre polynomial L_n^{(a)}(x) as a SignedLog.

    Evaluated by the three-term recurrence with running renormalization;
    overflow is impossible by representation.  At ``x = 0`` the value
    reduces to ``Gamma(n+a+1) / (n! Gamma(a+1))``.
    """
    n = _checked_int(n, "n")
    if not 0 <= n <= MAX_LAGUERRE_DEGREE:
        raise ValueError(f"0 <= n <= {MAX_LAGUERRE_DEGREE} required, got {n}")
    x = float(x)
    if x < 0.0:
        raise ValueError(f"x >= 0 required, got {x!r}")
    log_abs, sign = _laguerre_scan(n, float(a), x, keep_all=False)
    if sign == 0:
        return SIGNED_LOG_ZERO
    return SignedLog(log_abs, sign)


def assoc_laguerre_sequence(n_max: int, a: float, x: float):
    """All of L_0^{(a)}(x) .. L_{n_max}^{(a)}(x) in one recurrence pass.

    Returns ``(log_abs, sign)`` numpy arrays of length ``n_max + 1``.
    One pass per diagonal is what makes the displacement-matrix oracle
    O(dim^2) instead of O(dim^3).
    """
    n_max = _checked_int(n_max, "n_max")
    if not 0 <= n_max <= MAX_LAGUERRE_DEGREE:
        raise ValueError(f"0 <= n_max <= {MAX_LAGUERRE_DEGREE} required, got {n_max}")
    x = float(x)
    if x < 0.0:
        raise ValueError(f"x >= 0 required, got {x!r}")
    return _laguerre_scan(n_max, float(a), x, keep_all=True)


def signed_log_sum(terms: Iterable[SignedLog] | Sequence[SignedLog]) -> SignedLog:
    """Sum SignedLog terms via the max-shift technique.

    The largest log is factored out, the shifted terms are exponentiated
    and accumulated as separate positive and negative partial sums, and
    the partials are recombined at the end.  Emits
    :class:`CancellationWarning` when the recombination leaves less than
    1e-13 of the largest term; the caller decides whether to fall back to
    a more stable route.
    """
    live = [t for t in terms if t.sign != 0]
    if not live:
        return SIGNED_LOG_ZERO
    shift = max(t.log_abs for t in live)
    positive = math.fsum(math.exp(t.log_abs - shift) for t in live if t.sign > 0)
    negative = math.fsum(math.exp(t.log_abs - shift) for t in live if t.sign < 0)
    combined = positive - negative
    if combined == 0.0:
        return SIGNED_LOG_ZERO
    # The largest shifted term is exactly 1, so |combined| is already the
    # cancellation ratio |sum| / max|term|.
    if abs(combined) < CANCELLATION_THRESHOLD:
        warnings.warn(
            f"signed_log_sum kept only {abs(combined):.2e} of its largest term",
            CancellationWarning,
            stacklevel=2,
        )
    return SignedLog(shift + math.log(abs(combined)), 1 if combined > 0.0 else -1)


def _signed_log_sum_arrays(log_abs: np.ndarray, signs: np.ndarray):
    """Array core of :func:`signed_log_sum`; also reports the cancellation ratio.

    Returns ``(SignedLog, ratio)`` where ratio is |sum| / max|term| (1.0
    for an empty or single-signed trivial input).  No warning is emitted
    here; callers use the ratio to choose an evaluation route.
    """
    live = signs != 0
    if not np.any(live):
        return SIGNED_LOG_ZERO, 1.0
    log_abs = log_abs[live]
    signs = signs[live]
    shift = float(log_abs.max())
    shifted = np.exp(log_abs - shift)
    positive = float(shifted[signs > 0].sum())
    negative = float(shifted[signs < 0].sum())
    combined = positive - negative
    if combined == 0.0:
        return SIGNED_LOG_ZERO, 0.0
    value = SignedLog(shift + math.log(abs(combined)), 1 if combined > 0.0 else -1)
    return value, abs(combined)
