"""Power-law nonlocal kernel and fractional derivatives on finite horizons.

The Riesz-Caputo derivative used for kinematics reads

.. math::

    D^\\alpha f(x) = \\frac{1-\\alpha}{2} \\left[
        l_A^{\\alpha-1} \\int_{x-l_A}^{x} \\frac{f'(s)}{(x-s)^\\alpha} ds
      + l_B^{\\alpha-1} \\int_{x}^{x+l_B} \\frac{f'(s)}{(s-x)^\\alpha} ds \\right]

and reduces to :math:`f'(x)` for :math:`\\alpha = 1`. All inner integrals of
kernel times polynomial are evaluated in closed form, so no singular
quadrature is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PPoly


class DomainError(ValueError):
    """A point or interval falls outside the domain it must live in."""


@dataclass(frozen=True)
class FractionalParams:
    """Fractional orders and nominal horizon length.

    ``alpha_e`` is carried for completeness; the through-thickness electric
    field of a slender beam is local, so it never enters the beam system.
    """

    alpha_m: float = 1.0
    h_l: float = 1.0
    alpha_e: float = 1.0

    def __post_init__(self):
        for name in ("alpha_m", "alpha_e"):
            a = getattr(self, name)
            if not 0.0 < a <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {a}")
        if not self.h_l > 0.0:
            raise ValueError(f"h_l must be positive, got {self.h_l}")

    @property
    def is_local(self) -> bool:
        return self.alpha_m == 1.0


@dataclass(frozen=True)
class Horizon:
    """Left and right extent of the nonlocal interval around a point."""

    l_A: float
    l_B: float

    def __post_init__(self):
        if self.l_A < 0 or self.l_B < 0 or self.l_A + self.l_B <= 0:
            raise ValueError(f"invalid horizon ({self.l_A}, {self.l_B})")


def horizon_at(x: float, domain_start: float, domain_end: float, h_l: float) -> Horizon:
    """Horizon at ``x``, truncated at the ends of ``[domain_start, domain_end]``."""
    if h_l <= 0:
        raise ValueError("h_l must be positive")
    if x < domain_start or x > domain_end:
        raise DomainError(f"x={x} outside [{domain_start}, {domain_end}]")
    return Horizon(min(h_l, x - domain_start), min(h_l, domain_end - x))


def _check_order(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ValueError(
            f"kernel requires 0 < alpha < 1 (got {alpha}); use the integer-order path for alpha = 1"
        )


def kernel_weight(x: float, s: float, alpha: float, horizon: Horizon) -> float:
    """Power-law attenuation ``A(x, s)`` for ``s`` inside the horizon of ``x``."""
    _check_order(alpha)
    if s == x:
        raise DomainError("kernel is singular at s = x")
    if not (x - horizon.l_A < s < x + horizon.l_B):
        raise DomainError(f"s={s} outside horizon of x={x}")
    side = horizon.l_A if s < x else horizon.l_B
    return 0.5 * (1.0 - alpha) * side ** (alpha - 1.0) * abs(x - s) ** (-alpha)


def distance_moments(d1, d2, alpha: float, max_degree: int):
    """Return ``int_{d1}^{d2} d**(j - alpha) dd`` for ``j = 0..max_degree``.

    ``d1`` and ``d2`` are non-negative distances from the kernel centre and may
    be arrays; the result has a leading axis of length ``max_degree + 1``.
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    out = []
    for j in range(max_degree + 1):
        p = j + 1.0 - alpha
        out.append((d2**p - d1**p) / p)
    return np.array(out)


def powerlaw_moments(interval, x: float, alpha: float, l_side: float, max_degree: int = 3) -> np.ndarray:
    """Kernel moments ``int_a^b A(x, s) s**j ds`` for ``j = 0..max_degree``.

    The interval must sit on one side of ``x``; ``l_side`` is the horizon
    length on that side.
    """
    _check_order(alpha)
    a, b = float(interval[0]), float(interval[1])
    if a > b:
        raise ValueError("interval must satisfy a <= b")
    if max_degree > 3:
        raise ValueError("moments are provided up to cubic degree")
    if a < x < b:
        raise DomainError("interval straddles x; split it at x first")
    if a == b:
        return np.zeros(max_degree + 1)
    if b <= x:
        # s = x - d, d in [x - b, x - a]
        sign, d1, d2 = -1.0, x - b, x - a
    else:
        sign, d1, d2 = 1.0, a - x, b - x
    dm = distance_moments(d1, d2, alpha, max_degree)
    scale = 0.5 * (1.0 - alpha) * l_side ** (alpha - 1.0)
    out = np.zeros(max_degree + 1)
    for j in range(max_degree + 1):
        # s**j = sum_k C(j,k) x**(j-k) (sign d)**k
        out[j] = sum(math.comb(j, k) * x ** (j - k) * sign**k * dm[k] for k in range(j + 1))
    return scale * out


def _shift_poly(coeffs: np.ndarray, c: float, sign: float) -> np.ndarray:
    """Rewrite ``p(t) = sum a_k t**k`` as a polynomial in ``d`` with ``t = c + sign*d``."""
    n = len(coeffs)
    out = np.zeros(n)
    for k, a in enumerate(coeffs):
        for i in range(k + 1):
            out[i] += a * math.comb(k, i) * c ** (k - i) * sign**i
    return out


def _check_support(field: PPoly, x: float, horizon: Horizon):
    lo, hi = field.x[0], field.x[-1]
    tol = 1e-12 * max(1.0, abs(hi - lo))
    if x - horizon.l_A < lo - tol or x + horizon.l_B > hi + tol:
        raise DomainError("horizon extends outside the field support")


def _one_sided_integral(field: PPoly, x: float, length: float, sign: float, power: float) -> float:
    """``int_0^length d**(-power) g(x + sign*d) dd`` for a piecewise polynomial ``g``."""
    if length <= 0:
        return 0.0
    lo, hi = (x - length, x) if sign < 0 else (x, x + length)
    brk = field.x
    i0 = max(int(np.searchsorted(brk, lo, side="right")) - 1, 0)
    i1 = min(int(np.searchsorted(brk, hi, side="left")), len(brk) - 1)
    total = 0.0
    for k in range(i0, i1):
        a, b = max(brk[k], lo), min(brk[k + 1], hi)
        if b <= a:
            continue
        coeffs = field.c[::-1, k]  # ascending powers of (s - brk[k])
        poly_d = _shift_poly(coeffs, x - brk[k], sign)
        d1, d2 = (x - b, x - a) if sign < 0 else (a - x, b - x)
        if (a if sign < 0 else b) == (lo if sign < 0 else hi):
            d2 = length  # exact far end, free of cancellation for tiny sides
        dm = distance_moments(max(d1, 0.0), d2, power, len(poly_d) - 1)
        total += float(np.dot(poly_d, dm))
    return total


def rc_derivative(field: PPoly, x: float, alpha: float, horizon: Horizon) -> float:
    """Riesz-Caputo derivative of a piecewise polynomial at ``x``."""
    _check_support(field, x, horizon)
    deriv = field.derivative()
    if alpha == 1.0:
        return float(deriv(x))
    _check_order(alpha)
    total = 0.0
    for l, sign in ((horizon.l_A, -1.0), (horizon.l_B, 1.0)):
        if x + sign * l == x:
            # limit l -> 0 of the one-sided term is half the one-sided slope
            total += 0.5 * float(deriv(x))
            continue
        scale = 0.5 * (1.0 - alpha) * l ** (alpha - 1.0)
        total += scale * _one_sided_integral(deriv, x, l, sign, alpha)
    return total


def riesz_integral(field: PPoly, y: float, alpha: float, horizon: Horizon) -> float:
    """Kernel-weighted average of ``field`` over the horizon centred at ``y``.

    The left part is weighted with ``l_B`` and the right with ``l_A``,
    which is the pairing produced by the adjoint of :func:`rc_derivative`.
    """
    total = 0.0
    for l, sign in ((horizon.l_B, -1.0), (horizon.l_A, 1.0)):
        if l == 0.0:
            continue
        scale = 0.5 * (1.0 - alpha) * l ** (alpha - 1.0)
        total += scale * _one_sided_integral(field, y, l, sign, alpha)
    return total


def rrl_derivative(resultant: PPoly, x: float, alpha: float, horizon: Horizon, step: float | None = None) -> float:
    """Riesz-type Riemann-Liouville derivative of a resultant field.

    Computed by Richardson-extrapolated central differences of
    :func:`riesz_integral`, with the horizon carried rigidly along with the
    evaluation point. ``step`` defaults to 1/100 of the smallest breakpoint
    spacing or horizon side.
    """
    if alpha == 1.0:
        return float(resultant.derivative()(x))
    _check_order(alpha)
    if step is None:
        sides = [l for l in (horizon.l_A, horizon.l_B) if l > 0]
        step = min(float(np.min(np.diff(resultant.x))), *sides) / 100.0
    # riesz_integral reaches l_B to the left and l_A to the right
    shifted = Horizon(horizon.l_B + step, horizon.l_A + step)
    _check_support(resultant, x, shifted)

    def central(h):
        fp = riesz_integral(resultant, x + h, alpha, horizon)
        fm = riesz_integral(resultant, x - h, alpha, horizon)
        return (fp - fm) / (2.0 * h)

    # Richardson extrapolation removes the O(step**2) term
    return (4.0 * central(step / 2.0) - central(step)) / 3.0
