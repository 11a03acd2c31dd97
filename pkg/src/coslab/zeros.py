"""Certified counting of real zeros of f = D_n - g on intervals.

Away from the pole, f(x) = s(x) (sin(Tx) - phi(x)) with s(x) > 0, so zeros of
f are exactly the crossings of the fast oscillation sin(Tx) with the slow
curve phi(x) = 2 sin(x/2)(g(x) - 1/2).  The fast-slow counter tiles the query
interval by the monotone half-branches of sin(Tx) and classifies each piece
with a certified Lipschitz bound on phi; unresolved pieces are bisected.
Certified counts come from sign changes only; suspected tangencies (a local
minimum of |f| below tolerance with no sign change) are reported separately
and never silently counted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InconsistencyError, ParameterError, PoleProximityError
from .kernel import TWO_PI, slow_curve_phi
from .poly import DiffPoly, eval_f, eval_g, eval_g_deriv

# Interval endpoints are kept this far away from the pole at 0 / 2*pi.
DEFAULT_POLE_MARGIN = 1e-3

# Pole-side zone of count_total, handled by grid counting on the direct sum.
POLE_ZONE = 1e-3

MAX_BISECT_DEPTH = 40

ORACLE_MAX_DEGREE = 512

# Keeps pathological tangency clusters from exploding the work list.
MAX_ACTIVE_NODES = 200_000

# |f| below this times (n + 1) counts as numerically indistinguishable from
# zero when classifying interval endpoints.
AMBIG_TOL_COEFF = 1e-12


@dataclass(frozen=True)
class ZeroReport:
    """Certified zero count on an interval, with tangency candidates."""

    certified: int
    uncertified: int
    roots: tuple | None
    interval: tuple
    method: str

    def to_dict(self) -> dict:
        return {
            "certified": self.certified,
            "uncertified": self.uncertified,
            "roots": None if self.roots is None else list(self.roots),
            "interval": list(self.interval),
            "method": self.method,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class BranchClassification:
    """Resolution status of one monotone half-branch piece of sin(Tx)."""

    index: int
    interval: tuple
    status: str  # one_root | no_root | unresolved


def phi_lipschitz_bound(mask) -> float:
    """Certified sup |phi'| from the term-wise sine decomposition of phi."""
    ks = mask.indices.astype(float)
    return 0.5 + float(np.sum((ks + 0.5) + np.abs(ks - 0.5)))


def phi_second_deriv_bound(mask) -> float:
    ks = mask.indices.astype(float)
    return 0.25 + float(np.sum((ks + 0.5) ** 2 + (ks - 0.5) ** 2))


def root_tolerance(T: float) -> float:
    return 1e-12 * max(1.0, 1.0 / T)


def _nudge_zero_values(vals: np.ndarray) -> np.ndarray:
    """Replace exact zeros so sign logic is total (measure-zero event)."""
    out = np.where(vals == 0.0, 5e-324, vals)
    return out


def _solid_endpoint(f: DiffPoly, x: float, direction: float, T: float, tol: float):
    """Move x inward (by at most min(1e-3, pi/(20 T))) until |f| clears tol.

    Skips at most the endpoint's own zero basin; a distinct simple zero
    hugging a near-zero endpoint that closely is a measure-zero event.
    """
    if abs(eval_f(f, x)) >= tol:
        return x
    h = 1e-9
    hmax = min(1e-3, 0.05 * math.pi / T)
    while h <= hmax:
        x2 = x + direction * h
        if abs(eval_f(f, x2)) >= tol:
            return x2
        h *= 2.0
    return x + direction * hmax


def _refine_brackets(f: DiffPoly, lo, hi, tol: float) -> np.ndarray:
    """Vectorized bisection of sign-change brackets of f down to width tol."""
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    if lo.size == 0:
        return lo
    flo = _nudge_zero_values(np.atleast_1d(eval_f(f, lo)))
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fmid = _nudge_zero_values(np.atleast_1d(eval_f(f, mid)))
        left = np.sign(flo) * np.sign(fmid) < 0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fmid)
    return 0.5 * (lo + hi)


def count_grid(
    f: DiffPoly,
    interval,
    step: float,
    want_roots: bool = False,
    tangency_tol: float | None = None,
    refine_tol: float | None = None,
    method: str = "grid",
) -> ZeroReport:
    """Sign-sampling counter: sample signs at step resolution, bisect brackets.

    Interior samples that are local minima of |f| below a curvature-derived
    probe threshold (with no adjacent sign change) are re-examined on a dense
    sub-grid; surviving candidates become uncertified tangency flags, while
    sub-grid sign changes are promoted to certified roots.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (b > a):
        raise ParameterError("interval must have positive length")
    if step <= 0 or step > (b - a):
        raise ParameterError("step must lie in (0, |I|]")
    T = f.T
    if tangency_tol is None:
        tangency_tol = 1e-7 * (f.n + 1)
    if refine_tol is None:
        refine_tol = root_tolerance(T)

    if f.mask.m == f.n and f.mask.t == f.n + 1:
        raise ParameterError("f is identically zero")

    npts = int(math.ceil((b - a) / step)) + 1
    xs = np.linspace(a, b, npts)
    vals = np.atleast_1d(eval_f(f, xs)).astype(float)
    uncertified = 0
    tol0 = AMBIG_TOL_COEFF * (f.n + 1)

    # Zeros at the interval endpoints fall outside the open-interval
    # convention: an endpoint sample within noise of zero takes the sign of
    # the nearest solid sample, so it neither counts nor flags.
    excluded = np.zeros(npts, dtype=bool)
    for i, stepdir in ((0, 1), (npts - 1, -1)):
        if abs(vals[i]) < tol0:
            j = i + stepdir
            while 0 <= j < npts and abs(vals[j]) < tol0:
                j += stepdir
            vals[i] = 5e-324 * (np.sign(vals[j]) if 0 <= j < npts else 1.0)
            excluded[i] = True

    # Interior exact zeros: crossings count once, tangencies are flagged.
    # Exact hits are isolated since f is not identically zero.
    for i in np.flatnonzero(vals == 0.0):
        j = i - 1
        while j >= 0 and vals[j] == 0.0:
            j -= 1
        left = np.sign(vals[j]) if j >= 0 else 0.0
        j = i + 1
        while j < npts and vals[j] == 0.0:
            j += 1
        right = np.sign(vals[j]) if j < npts else 0.0
        if left * right < 0:
            vals[i] = 5e-324 * right
        else:
            vals[i] = 5e-324 * (left if left != 0.0 else 1.0)
            uncertified += 1
        excluded[i] = True
    vals = _nudge_zero_values(vals)
    signs = np.sign(vals)
    flips = np.flatnonzero(signs[:-1] * signs[1:] < 0)

    certified = len(flips)
    brackets_lo = list(xs[flips])
    brackets_hi = list(xs[flips + 1])

    # Tangency probe: if a root pair (or double root) hides inside one cell,
    # psi' vanishes there, so |psi| <= 2 sup|psi''| step^2 at the adjacent
    # samples; scale by s(x) to compare against f = s psi.
    psi_pp = T * T + phi_second_deriv_bound(f.mask)
    s_x = 1.0 / (2.0 * np.abs(np.sin(xs / 2.0)) + 1e-300)
    probe = 2.0 * psi_pp * step * step * s_x + 1e-12
    absv = np.abs(vals)
    interior = np.arange(1, len(xs) - 1)
    if interior.size:
        is_min = (absv[interior] <= absv[interior - 1]) & (
            absv[interior] <= absv[interior + 1]
        )
        small = absv[interior] < probe[interior]
        flip_adjacent = np.zeros(len(xs), dtype=bool)
        flip_adjacent[flips] = True
        flip_adjacent[flips + 1] = True
        cand = interior[
            is_min & small & ~flip_adjacent[interior] & ~excluded[interior]
        ]
        for i in cand:
            dense = np.linspace(xs[i - 1], xs[i + 1], 65)
            dv = _nudge_zero_values(np.atleast_1d(eval_f(f, dense)))
            dflips = np.flatnonzero(np.sign(dv[:-1]) * np.sign(dv[1:]) < 0)
            if dflips.size:
                certified += len(dflips)
                brackets_lo.extend(dense[dflips])
                brackets_hi.extend(dense[dflips + 1])
            elif np.min(np.abs(dv)) < tangency_tol:
                uncertified += 1

    roots = None
    if want_roots and brackets_lo:
        refined = _refine_brackets(f, brackets_lo, brackets_hi, refine_tol)
        roots = tuple(sorted(float(r) for r in refined))
    elif want_roots:
        roots = ()
    return ZeroReport(certified, uncertified, roots, (a, b), method)


def oracle_count(f: DiffPoly, interval, want_roots: bool = False) -> ZeroReport:
    """Brute-force ground-truth counter: fine grid at step pi/(64 T)."""
    if f.n > ORACLE_MAX_DEGREE:
        raise ParameterError("oracle_count supports n <= %d" % ORACLE_MAX_DEGREE)
    step = math.pi / (64.0 * f.T)
    a, b = float(interval[0]), float(interval[1])
    step = min(step, (b - a))
    return count_grid(
        f, interval, step, want_roots=want_roots, refine_tol=1e-13, method="oracle"
    )


def count_fast_slow(
    f: DiffPoly,
    interval,
    want_roots: bool = False,
    pole_margin: float = DEFAULT_POLE_MARGIN,
    max_depth: int = MAX_BISECT_DEPTH,
) -> ZeroReport:
    """Count crossings of sin(Tx) with the slow curve phi on the interval.

    Work-list bisection over monotone half-branch pieces.  A piece is killed
    when the certified phi range cannot meet the sweep of sin(Tx); it is
    resolved exactly when phi stays strictly inside (-1, 1) and the fast
    oscillation dominates the slow curve's Lipschitz constant, in which case
    the endpoint signs decide one root or none.
    """
    a0, b0 = float(interval[0]), float(interval[1])
    if not (b0 > a0):
        raise ParameterError("interval must have positive length")
    if a0 < pole_margin or b0 > TWO_PI - pole_margin:
        raise PoleProximityError(
            "interval must stay inside (%g, 2*pi - %g)" % (pole_margin, pole_margin)
        )
    T = f.T
    mask = f.mask
    lip = phi_lipschitz_bound(mask)
    lip2 = phi_second_deriv_bound(mask)

    def phi(x):
        return np.atleast_1d(slow_curve_phi(mask, x))

    def phi_prime(x):
        g = np.atleast_1d(eval_g(mask, x))
        gp = np.atleast_1d(eval_g_deriv(mask, 1, x))
        return np.cos(x / 2.0) * (g - 0.5) + 2.0 * np.sin(x / 2.0) * gp

    def psi_of(x, phix):
        return _nudge_zero_values(np.sin(T * x) - phix)

    if f.mask.m == f.n and f.mask.t == f.n + 1:
        raise ParameterError("f is identically zero")

    # Open-interval convention: a zero at an endpoint is not counted.  An
    # endpoint where f sits in the numerical zero basin (which happens for
    # tangencies, where the basin is wide) is nudged inward to a solid sign.
    tol0 = AMBIG_TOL_COEFF * (f.n + 1)
    a1 = _solid_endpoint(f, a0, 1.0, T, tol0)
    b1 = _solid_endpoint(f, b0, -1.0, T, tol0)
    if not b1 > a1:
        raise ParameterError("interval must have positive length")
    psi_end_a = math.sin(T * a1) - float(slow_curve_phi(mask, a1))
    psi_end_b = math.sin(T * b1) - float(slow_curve_phi(mask, b1))
    ambiguous_ends = (
        abs(eval_f(f, a1)) < tol0
        or abs(eval_f(f, b1)) < tol0
        or abs(psi_end_a) < 2.0 * tol0
        or abs(psi_end_b) < 2.0 * tol0
    )

    # Edges: interval endpoints plus the extrema of sin(Tx) strictly inside.
    jlo = int(math.ceil(T * a1 / math.pi - 0.5))
    jhi = int(math.floor(T * b1 / math.pi - 0.5))
    inner = (np.arange(jlo, jhi + 1) + 0.5) * math.pi / T
    inner = inner[(inner > a1) & (inner < b1)]
    edges = np.concatenate(([a1], inner, [b1]))
    phi_e = phi(edges)
    psi_e = psi_of(edges, phi_e)

    # Copies, not views: endpoint values are substituted in place per node.
    a = edges[:-1].copy()
    b = edges[1:].copy()
    pa, pb = phi_e[:-1].copy(), phi_e[1:].copy()
    qa, qb = psi_e[:-1].copy(), psi_e[1:].copy()

    certified = 0
    uncertified = 0
    brackets_lo: list = []
    brackets_hi: list = []

    width_floor = max(1e-13, root_tolerance(T))
    psi_noise = 2.0 * tol0
    probe_cap = min(1e-3, 0.05 * math.pi / T)

    def solid_psi(x, direction):
        """First (value, offset) with |psi| clear of noise moving from x."""
        h = max(width_floor, 1e-12)
        while h <= probe_cap:
            x2 = x + direction * h
            v = math.sin(T * x2) - float(slow_curve_phi(mask, x2))
            if abs(v) >= psi_noise:
                return v, h
            h *= 2.0
        return None, probe_cap

    # Zeros sitting at node boundaries or inside flat tangency basins are
    # handled by point events, deduplicated by clustering afterwards.
    boundary_cross: list = []  # (x, solid bracket lo, solid bracket hi)
    suspects: list = []  # positions of suspected tangencies

    depth = 0
    while a.size:
        # Endpoint values inside the numerical zero basin carry no sign
        # information.  The node whose left endpoint is ambiguous owns the
        # boundary point: solid signs on both sides decide crossing versus
        # tangency once, then both neighbors continue with substituted
        # minimal-magnitude solid signs (conservative for the kill tests).
        tiny_a = np.abs(qa) < psi_noise
        tiny_b = np.abs(qb) < psi_noise
        for i in np.flatnonzero(tiny_a | tiny_b):
            if tiny_a[i]:
                x = float(a[i])
                vr, hr = solid_psi(x, 1.0)
                if x > a1:
                    vl, hl = solid_psi(x, -1.0)
                    if vl is not None and vr is not None:
                        if np.sign(vl) != np.sign(vr):
                            boundary_cross.append((x, x - hl, x + hr))
                        else:
                            suspects.append(x)
                    else:
                        suspects.append(x)
                qa[i] = (
                    np.sign(vr) * psi_noise
                    if vr is not None
                    else np.sign(qb[i]) * psi_noise
                )
            if tiny_b[i]:
                x = float(b[i])
                vl, _ = solid_psi(x, -1.0)
                qb[i] = (
                    np.sign(vl) * psi_noise
                    if vl is not None
                    else np.sign(qa[i]) * psi_noise
                )

        L = b - a
        mid_phi = 0.5 * (pa + pb)
        lo = mid_phi - 0.5 * L * lip
        hi = mid_phi + 0.5 * L * lip
        sa = np.sin(T * a)
        sb = np.sin(T * b)
        smin = np.minimum(sa, sb)
        smax = np.maximum(sa, sb)
        signchange = np.sign(qa) * np.sign(qb) < 0

        # Kill: phi range disjoint from the sin sweep, or psi bounded away
        # from zero by its Lipschitz constant.
        no_overlap = (lo > smax) | (hi < smin)
        psi_lip = T + lip
        same_side = ~signchange & (
            (qa + qb - np.sign(qa) * L * psi_lip) * np.sign(qa) > 0
        )
        dead = no_overlap | same_side

        # Resolve: slow curve trapped strictly inside (-1, 1) and the fast
        # oscillation dominates -> psi strictly monotone on the root region.
        mu = np.maximum(np.abs(lo), np.abs(hi))
        mono = (~dead) & (mu < 1.0) & (T * np.sqrt(np.clip(1 - mu * mu, 0, 1)) > lip)

        # Local resolve: certified range of psi' = T cos(Tx) - phi'(x) has a
        # strict sign, so endpoint signs decide the node exactly.  cos(T x)
        # sweeps its endpoint values plus +-1 when jpi/T lies inside.
        live = ~(dead | mono)
        if np.any(live):
            ca = np.cos(T * a)
            cb = np.cos(T * b)
            cmin = np.minimum(ca, cb)
            cmax = np.maximum(ca, cb)
            klo = np.ceil(T * a / math.pi)
            has_ext = klo * math.pi <= T * b
            ext_val = np.where(np.mod(klo, 2.0) == 0.0, 1.0, -1.0)
            cmin = np.where(has_ext & (ext_val < 0), -1.0, cmin)
            cmax = np.where(has_ext & (ext_val > 0), 1.0, cmax)
            pm_prime = np.zeros_like(a)
            pm_prime[live] = phi_prime(0.5 * (a[live] + b[live]))
            d_lo = T * cmin - (pm_prime + 0.5 * L * lip2)
            d_hi = T * cmax - (pm_prime - 0.5 * L * lip2)
            local_mono = live & ((d_lo > 0.0) | (d_hi < 0.0))
            mono = mono | local_mono

        one = mono & signchange
        if np.any(one):
            certified += int(np.count_nonzero(one))
            brackets_lo.extend(a[one])
            brackets_hi.extend(b[one])

        keep = ~(dead | mono)
        finalize = keep & (
            (L <= width_floor) | (depth >= max_depth) | (a.size > MAX_ACTIVE_NODES)
        )
        if np.any(finalize):
            fin_change = finalize & signchange
            certified += int(np.count_nonzero(fin_change))
            brackets_lo.extend(a[fin_change])
            brackets_hi.extend(b[fin_change])
            suspects.extend(0.5 * (a[i] + b[i]) for i in np.flatnonzero(finalize & ~signchange))
            keep &= ~finalize

        if not np.any(keep):
            break
        a, b, pa, pb, qa, qb = a[keep], b[keep], pa[keep], pb[keep], qa[keep], qb[keep]
        mids = 0.5 * (a + b)
        pm = phi(mids)
        qm = psi_of(mids, pm)
        a = np.concatenate([a, mids])
        b = np.concatenate([mids, b])
        pa = np.concatenate([pa, pm])
        pb = np.concatenate([pm, pb])
        qa = np.concatenate([qa, qm])
        qb = np.concatenate([qm, qb])
        depth += 1

    # Point events at node boundaries can be seen by several nodes when the
    # zero basin is wider than the final node width; cluster at oracle
    # resolution so each physical zero or tangency counts once.
    gap = math.pi / (64.0 * T)
    if boundary_cross:
        boundary_cross.sort()
        last = -math.inf
        for x, blo, bhi in boundary_cross:
            if x - last > gap:
                certified += 1
                brackets_lo.append(blo)
                brackets_hi.append(bhi)
            last = x
    if suspects:
        suspects.sort()
        last = -math.inf
        for x in suspects:
            if x - last > gap:
                uncertified += 1
            last = x

    if uncertified == 0 and not ambiguous_ends and not boundary_cross:
        want_parity = 1 if np.sign(psi_e[0]) * np.sign(psi_e[-1]) < 0 else 0
        if certified % 2 != want_parity:
            raise InconsistencyError(
                "certified count %d contradicts endpoint sign data" % certified
            )

    roots = None
    if want_roots:
        if brackets_lo:
            refined = _refine_brackets(
                f, brackets_lo, brackets_hi, root_tolerance(T)
            )
            roots = tuple(sorted(float(r) for r in refined))
        else:
            roots = ()
    return ZeroReport(certified, uncertified, roots, (a0, b0), "fast_slow")


def count_total(f: DiffPoly, want_roots: bool = False) -> ZeroReport:
    """Z(f) on [0, 2*pi], exploiting evenness: interior counted on (0, pi).

    The pole zone (0, POLE_ZONE] and the zone just below pi are counted by
    grid sampling; x = 0 contributes iff f vanishes there (n + 1 = t) and a
    zero at pi is necessarily tangential (f'(pi) = 0) so it is flagged
    uncertified.
    """
    T = f.T
    d0 = POLE_ZONE
    step = math.pi / (64.0 * T)

    mid = count_fast_slow(f, (d0, math.pi - d0), want_roots=want_roots)
    lo = count_grid(f, (0.0, d0), min(step, 0.5 * d0), want_roots=want_roots)
    hi_a, hi_b = math.pi - d0, math.pi - 1e-12
    hi = count_grid(
        f, (hi_a, hi_b), min(step, 0.5 * (hi_b - hi_a)), want_roots=want_roots
    )

    zero_at_0 = (f.n + 1 - f.mask.t) == 0
    pi_tangent = abs(eval_f(f, math.pi)) < 1e-9

    half_cert = lo.certified + mid.certified + hi.certified
    half_unc = lo.uncertified + mid.uncertified + hi.uncertified
    certified = 2 * half_cert + (1 if zero_at_0 else 0)
    uncertified = 2 * half_unc + (1 if pi_tangent else 0)

    roots = None
    if want_roots:
        half = sorted((lo.roots or ()) + (mid.roots or ()) + (hi.roots or ()))
        mirrored = [TWO_PI - r for r in reversed(half)]
        roots = tuple(half + mirrored)
    return ZeroReport(certified, uncertified, roots, (0.0, TWO_PI), "total")
