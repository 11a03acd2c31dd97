"""Envelope sets of g as unions of disjoint intervals in (0, pi].

The base set collects the x where |g(x) - 1/2| < s(x) (the only region where
D_n - g can vanish), the derivative set the x where |g'(x)| <= 128 n s(x),
and the enlarged set the x where |g(x) - 1/2| <= 4 s(x).  Boundaries are
located by a uniform scan at 64 samples per expected oscillation of the
boundary function, followed by bracketing bisection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import IntervalCountExceeded, ParameterError
from .poly import CoeffMask, eval_g, eval_g_deriv

DEFAULT_REFINE_TOL = 1e-12

# Threshold coefficient of the derivative set: |g'| <= 128 * n * s(x).
DERIV_SET_COEFF = 2**7

# Threshold multiple of the enlarged set: |g - 1/2| <= 4 s(x).
PLUS_SET_COEFF = 4.0


@dataclass(frozen=True)
class IntervalSet:
    """Sorted union of disjoint closed intervals inside (0, pi].

    ``strict`` records the boundary convention of the defining inequality;
    it affects membership tests only, never the measure.
    """

    intervals: tuple
    strict: bool = True

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not a < b:
                raise ParameterError("interval endpoints must satisfy a < b")
        for (_, b1), (a2, _) in zip(ivs, ivs[1:]):
            if not b1 < a2:
                raise ParameterError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.intervals))

    @property
    def count(self) -> int:
        return len(self.intervals)

    def contains(self, x: float) -> bool:
        for a, b in self.intervals:
            if (a < x < b) if self.strict else (a <= x <= b):
                return True
        return False

    def restrict(self, window) -> "IntervalSet":
        lo, hi = float(window[0]), float(window[1])
        if not (0.0 <= lo < hi <= math.pi):
            raise ParameterError("window must be a subinterval of (0, pi]")
        out = []
        for a, b in self.intervals:
            a2, b2 = max(a, lo), min(b, hi)
            if a2 < b2:
                out.append((a2, b2))
        return IntervalSet(tuple(out), strict=self.strict)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        A, B = self.intervals, other.intervals
        while i < len(A) and j < len(B):
            a = max(A[i][0], B[j][0])
            b = min(A[i][1], B[j][1])
            if a < b:
                out.append((a, b))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalSet(tuple(out), strict=self.strict and other.strict)

    def to_dict(self) -> dict:
        return {
            "intervals": [list(iv) for iv in self.intervals],
            "measure": self.measure,
            "count": self.count,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _g_on_pi_grid(mask: CoeffMask, M: int, deriv: bool = False) -> np.ndarray:
    """g (or g') at x_i = i*pi/M, i = 1..M, via a real FFT of the bit vector."""
    L = 2 * M
    coeffs = np.zeros(L)
    bits = np.asarray(mask.bits, dtype=float)
    if bits.size:
        if deriv:
            coeffs[: bits.size] = np.arange(bits.size) * bits
        else:
            coeffs[: bits.size] = bits
    spec = np.fft.rfft(coeffs)
    vals = spec.imag[1 : M + 1] if deriv else spec.real[1 : M + 1]
    return vals


def _refine_crossings(diff_fn, lo, hi, dlo, tol: float, dhi=None) -> np.ndarray:
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    dlo = np.asarray(dlo, dtype=float).copy()
    if tol <= 0.0:
        # Secant placement inside the bracketing cell: no extra evaluations,
        # error O(cell_width^2 * curvature / slope) per crossing.
        dhi = np.asarray(dhi, dtype=float)
        return lo + (hi - lo) * dlo / (dlo - dhi)
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        dm = diff_fn(mid)
        dm = np.where(dm == 0.0, 5e-324, dm)
        left = dlo * dm < 0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        dlo = np.where(left, dlo, dm)
    return 0.5 * (lo + hi)


def _sublevel_set(
    grid_vals: np.ndarray,
    xs: np.ndarray,
    diff_fn,
    refine_tol: float,
    strict: bool,
) -> IntervalSet:
    """Assemble {x in (0, pi] : d(x) < 0} from grid signs plus bisection.

    The boundary function diverges to -inf at the pole, so the set always
    opens at 0; crossings alternate the sign thereafter.
    """
    vals = np.where(grid_vals == 0.0, 5e-324, grid_vals)
    signs = np.sign(vals)
    # Virtual left node just right of the pole, where d < 0 always.
    xs_full = np.concatenate(([1e-12], xs))
    signs_full = np.concatenate(([-1.0], signs))
    vals_full = np.concatenate(([-1.0], vals))
    flips = np.flatnonzero(signs_full[:-1] * signs_full[1:] < 0)
    crossings = _refine_crossings(
        diff_fn,
        xs_full[flips],
        xs_full[flips + 1],
        vals_full[flips],
        refine_tol,
        dhi=vals_full[flips + 1],
    )
    intervals = []
    inside = True
    start = 0.0
    for c in np.sort(crossings):
        if inside:
            # Secant-placed crossings from adjacent cells can coincide;
            # a zero-width interval (and the matching zero-width gap) is
            # dropped by merging with the previous piece.
            if c > start:
                if intervals and start <= intervals[-1][1]:
                    intervals[-1] = (intervals[-1][0], float(c))
                else:
                    intervals.append((start, float(c)))
        else:
            start = float(c)
        inside = not inside
    if inside and math.pi > start:
        if intervals and start <= intervals[-1][1]:
            intervals[-1] = (intervals[-1][0], math.pi)
        else:
            intervals.append((start, math.pi))
    return IntervalSet(tuple(intervals), strict=strict)


def _scan_grid(m: int) -> np.ndarray:
    M = 64 * (max(m, 0) + 2)
    return np.arange(1, M + 1) * (math.pi / M)


def envelope_set(mask: CoeffMask, refine_tol: float = DEFAULT_REFINE_TOL) -> IntervalSet:
    """The set {x in (0, pi] : |g(x) - 1/2| < s(x)} as disjoint intervals.

    Raises IntervalCountExceeded if the interval count passes 8m + 4, which
    is impossible for a degree-m boundary and would indicate a bug.
    """
    xs = _scan_grid(mask.m)
    M = xs.size
    g = _g_on_pi_grid(mask, M)
    s = 1.0 / (2.0 * np.sin(xs / 2.0))
    d = np.abs(g - 0.5) - s

    def diff(x):
        return np.abs(eval_g(mask, x) - 0.5) - 1.0 / (2.0 * np.sin(x / 2.0))

    out = _sublevel_set(d, xs, diff, refine_tol, strict=True)
    cap = 8 * max(mask.m, 0) + 4
    if out.count > cap:
        raise IntervalCountExceeded(
            "envelope set has %d intervals, cap is %d" % (out.count, cap)
        )
    return out


def envelope_prime_set(
    mask: CoeffMask, n: int, refine_tol: float = DEFAULT_REFINE_TOL
) -> IntervalSet:
    """The set {x in (0, pi] : |g'(x)| <= 128 n s(x)}."""
    if mask.m > n:
        raise ParameterError("mask degree exceeds n")
    xs = _scan_grid(mask.m)
    M = xs.size
    gp = _g_on_pi_grid(mask, M, deriv=True)
    s = 1.0 / (2.0 * np.sin(xs / 2.0))
    d = np.abs(gp) - DERIV_SET_COEFF * n * s

    def diff(x):
        return np.abs(eval_g_deriv(mask, 1, x)) - DERIV_SET_COEFF * n / (
            2.0 * np.sin(x / 2.0)
        )

    return _sublevel_set(d, xs, diff, refine_tol, strict=False)


def envelope_plus_set(
    mask: CoeffMask, refine_tol: float = DEFAULT_REFINE_TOL
) -> IntervalSet:
    """The enlarged set {x in (0, pi] : |g(x) - 1/2| <= 4 s(x)}."""
    xs = _scan_grid(mask.m)
    M = xs.size
    g = _g_on_pi_grid(mask, M)
    s = 1.0 / (2.0 * np.sin(xs / 2.0))
    d = np.abs(g - 0.5) - PLUS_SET_COEFF * s

    def diff(x):
        return np.abs(eval_g(mask, x) - 0.5) - PLUS_SET_COEFF / (
            2.0 * np.sin(x / 2.0)
        )

    return _sublevel_set(d, xs, diff, refine_tol, strict=False)


def restrict(iset: IntervalSet, window) -> IntervalSet:
    """Intersection of an interval set with a window inside (0, pi]."""
    return iset.restrict(window)
