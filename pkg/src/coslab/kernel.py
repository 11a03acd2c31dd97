"""Numerically stable evaluation of the cosine-sum kernel and envelope scalars.

The kernel of degree n is D_n(x) = sum_{k=0}^{n} cos(kx).  Away from the pole
at x = 0 (mod 2*pi) it is evaluated through the closed form

    D_n(x) = 1/2 + sin(T x) / (2 sin(x/2)),      T = n + 1/2,

and by direct summation when |sin(x/2)| drops below a fixed switchover, where
the closed form loses precision.  The envelope scalar s(x) = (2 sin(x/2))^-1
bounds |D_n(x) - 1/2| pointwise on (0, 2*pi).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

# Switchover on |sin(x/2)| between the closed form and direct summation.
SIN_HALF_CUTOFF = 1e-6

# b_deriv keeps the (csc, cot) recurrence tables up to this order.
B_DERIV_MAX_ORDER = 8


def _check_angle(x, lo=0.0, hi=TWO_PI, open_lo=False, open_hi=False):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("angle must be finite")
    bad_lo = arr <= lo if open_lo else arr < lo
    bad_hi = arr >= hi if open_hi else arr > hi
    if np.any(bad_lo) or np.any(bad_hi):
        raise DomainError(
            "angle outside %s%g, %g%s"
            % ("(" if open_lo else "[", lo, hi, ")" if open_hi else "]")
        )
    return arr


def _direct_cosine_sum(n: int, x: np.ndarray) -> np.ndarray:
    """sum_{k=0}^{n} cos(kx) by explicit summation (chunked over k)."""
    out = np.zeros_like(x)
    for start in range(0, n + 1, 4096):
        ks = np.arange(start, min(start + 4096, n + 1), dtype=float)
        out += np.cos(np.multiply.outer(x, ks)).sum(axis=-1)
    return out


def dirichlet_eval(n: int, x):
    """Evaluate D_n(x) on [0, 2*pi] with absolute error <= 1e-9 * (n + 1)."""
    if n < 0:
        raise DomainError("kernel degree must be nonnegative")
    arr = _check_angle(x)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    T = n + 0.5
    sin_half = np.sin(arr / 2.0)
    out = np.empty_like(arr)
    near = np.abs(sin_half) < SIN_HALF_CUTOFF
    far = ~near
    out[far] = 0.5 + np.sin(T * arr[far]) / (2.0 * sin_half[far])
    if np.any(near):
        out[near] = _direct_cosine_sum(n, arr[near])
    return float(out[0]) if scalar else out


def dirichlet_deriv(n: int, r: int, x):
    """r-th derivative of D_n by exact direct summation, O(n) per point.

    Uses d^r/dx^r cos(kx) = k^r cos(kx + r*pi/2).  Rejected when n**r would
    overflow the double range.
    """
    if n < 0:
        raise DomainError("kernel degree must be nonnegative")
    if r < 0:
        raise DomainError("derivative order must be nonnegative")
    if r > 0 and n > 1 and r * math.log10(n) > 300.0:
        raise OverflowError("k**r exceeds the floating range for k = n")
    arr = np.atleast_1d(_check_angle(x))
    scalar = np.asarray(x).ndim == 0
    phase = r * math.pi / 2.0
    out = np.zeros_like(arr)
    for start in range(0, n + 1, 4096):
        ks = np.arange(start, min(start + 4096, n + 1), dtype=float)
        out += (ks**r * np.cos(np.multiply.outer(arr, ks) + phase)).sum(axis=-1)
    return float(out[0]) if scalar else out


def envelope_s(x):
    """Envelope scalar s(x) = (2 sin(x/2))^-1 on the open interval (0, 2*pi)."""
    arr = _check_angle(x, open_lo=True, open_hi=True)
    return 1.0 / (2.0 * np.sin(arr / 2.0))


def _b_deriv_table(r: int) -> dict:
    """Coefficients of B^(r) in the csc(x/2)^a * cot(x/2)^b basis.

    B(x) = csc(x/2).  Each derivative maps csc^a cot^b to
    -(a/2) csc^a cot^(b+1) - (b/2) csc^(a+2) cot^(b-1), so the basis is closed
    and the coefficients stay dyadic rationals.
    """
    table = {(1, 0): Fraction(1)}
    for _ in range(r):
        nxt: dict = {}
        for (a, b), c in table.items():
            key = (a, b + 1)
            nxt[key] = nxt.get(key, Fraction(0)) - Fraction(a, 2) * c
            if b > 0:
                key = (a + 2, b - 1)
                nxt[key] = nxt.get(key, Fraction(0)) - Fraction(b, 2) * c
        table = nxt
    return table


def b_deriv(r: int, x):
    """r-th derivative of B(x) = 1/sin(x/2), exact in the (csc, cot) basis."""
    if r < 0:
        raise DomainError("derivative order must be nonnegative")
    if r > B_DERIV_MAX_ORDER:
        raise DomainError("b_deriv supports orders up to %d" % B_DERIV_MAX_ORDER)
    arr = _check_angle(x, open_lo=True, open_hi=True)
    half = np.asarray(arr, dtype=float) / 2.0
    csc = 1.0 / np.sin(half)
    cot = np.cos(half) * csc
    out = np.zeros_like(np.asarray(arr, dtype=float))
    for (a, b), c in _b_deriv_table(r).items():
        out += float(c) * csc**a * cot**b
    return float(out) if np.asarray(x).ndim == 0 else out


def slow_curve_phi(mask, x):
    """Slow curve phi(x) = 2 sin(x/2) (g(x) - 1/2) for the mask's polynomial g.

    Zeros of f = D_n - g on (0, 2*pi) are exactly the solutions of
    sin(Tx) = phi(x), and |phi(x)| < 1 iff x lies in the envelope set of g.
    """
    from .poly import eval_g

    arr = _check_angle(x, open_lo=True, open_hi=True)
    return 2.0 * np.sin(np.asarray(arr, dtype=float) / 2.0) * (eval_g(mask, arr) - 0.5)
