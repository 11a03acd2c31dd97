"""Seeded sampling, Monte Carlo experiments, scaling fits, and construction.

Randomness is counter-based: every trial draws its coefficient bits from a
Philox stream keyed by (seed, trial), so results are bit-identical across
platforms, thread counts, and trial execution order.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .envelope import envelope_set
from .errors import DomainError, ParameterError, RankError
from .poly import CoeffMask, DiffPoly, IndexSet, to_index_set
from .zeros import count_total

SCHEMA_VERSION = 1

# Raw per-trial values are kept in the record only up to this many trials.
PER_TRIAL_CAP = 10_000

_SEED_MASK = (1 << 64) - 1


def mask_bits(m: int, seed: int, stream: int = 0) -> np.ndarray:
    """m + 1 fair bits from a Philox generator keyed by (seed, stream)."""
    if m < 0:
        raise ParameterError("mask degree must be nonnegative")
    gen = Generator(Philox(key=[seed & _SEED_MASK, stream & _SEED_MASK]))
    return gen.integers(0, 2, size=m + 1, dtype=np.uint8)


def sample_mask(m: int, seed: int, stream: int = 0) -> CoeffMask:
    """Sample eps_0..eps_m independently and fairly; fully reproducible."""
    return CoeffMask(tuple(int(b) for b in mask_bits(m, seed, stream)))


@dataclass(frozen=True)
class ExperimentRecord:
    """Summary of one Monte Carlo cell: parameters, seed, measured statistics."""

    kind: str
    params: dict
    seed: int
    trials: int
    mean: float
    stderr: float
    per_trial: tuple | None = None
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        out = {
            "schema": self.schema,
            "kind": self.kind,
            "params": dict(self.params),
            "seed": self.seed,
            "trials": self.trials,
            "mean": self.mean,
            "stderr": self.stderr,
        }
        if self.per_trial is not None:
            out["per_trial"] = list(self.per_trial)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _summarize(kind, params, seed, values) -> ExperimentRecord:
    values = np.asarray(values, dtype=float)
    trials = values.size
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    per_trial = tuple(float(v) for v in values) if trials <= PER_TRIAL_CAP else None
    return ExperimentRecord(kind, params, seed, trials, mean, stderr, per_trial)


def _map_trials(fn, trials: int, threads: int = 1) -> list:
    """Apply fn(trial) for trial = 0..trials-1, results in trial order.

    Per-trial outputs depend only on the trial index, so the reduction is
    independent of the worker count.
    """
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def mc_expected_zeros(
    n: int, m: int, trials: int, seed: int, threads: int = 1
) -> ExperimentRecord:
    """Mean and stderr of the certified total zero count over random masks."""
    if m > n:
        raise ParameterError("m must not exceed n")
    if trials < 1:
        raise ParameterError("trials must be positive")

    def one(trial: int) -> float:
        mask = sample_mask(m, seed, trial)
        return float(count_total(DiffPoly(n, mask)).certified)

    values = _map_trials(one, trials, threads)
    return _summarize("zeros", {"n": n, "m": m}, seed, values)


def mc_envelope_measure(
    m: int, trials: int, seed: int, threads: int = 1, refine_tol: float = 0.0
) -> ExperimentRecord:
    """Mean measure of the envelope set over random masks of degree m.

    The default refine_tol of 0 places each set boundary by secant
    interpolation inside its grid cell, which is orders of magnitude faster
    than bisection and accurate to ~1e-3 relative in the measure; pass a
    positive tolerance for certified boundary placement.
    """
    if m < 2:
        raise ParameterError("m must be at least 2")
    if trials < 1:
        raise ParameterError("trials must be positive")

    def one(trial: int) -> float:
        mask = sample_mask(m, seed, trial)
        return envelope_set(mask, refine_tol=refine_tol).measure

    values = _map_trials(one, trials, threads)
    return _summarize("envelope_measure", {"m": m}, seed, values)


def mc_sign_change_prob(
    n: int, m: int, j: int, trials: int, seed: int, threads: int = 1
) -> ExperimentRecord:
    """Frequency of at least one zero of f on [pi j/m, pi (j+1)/m].

    Zeros are detected as sign changes of f on the oracle-resolution grid
    (step pi / (64 T)) restricted to the window.
    """
    if m > n:
        raise ParameterError("m must not exceed n")
    if not (m / 2 <= j <= m - 1):
        raise ParameterError("j must lie in [m/2, m-1]")
    if trials < 1:
        raise ParameterError("trials must be positive")
    T = n + 0.5
    a, b = math.pi * j / m, math.pi * (j + 1) / m
    npts = int(math.ceil((b - a) / (math.pi / (64.0 * T)))) + 1
    xs = np.linspace(a, b, npts)
    ks = np.arange(m + 1, dtype=float)
    cosmat = np.cos(np.outer(ks, xs))  # (m+1, npts)
    dn = 0.5 + np.sin(T * xs) / (2.0 * np.sin(xs / 2.0))

    chunk = 2048

    def one_chunk(c: int) -> np.ndarray:
        lo = c * chunk
        hi = min(lo + chunk, trials)
        bits = np.stack([mask_bits(m, seed, t) for t in range(lo, hi)]).astype(float)
        fvals = dn[None, :] - bits @ cosmat
        fvals = np.where(fvals == 0.0, 5e-324, fvals)
        signs = np.sign(fvals)
        hit = np.any(signs[:, :-1] * signs[:, 1:] < 0, axis=1)
        return hit.astype(float)

    nchunks = (trials + chunk - 1) // chunk
    parts = _map_trials(one_chunk, nchunks, threads)
    values = np.concatenate(parts)
    return _summarize("sign_change", {"n": n, "m": m, "j": j}, seed, values)


def mc_small_ball(
    m: int, x: float, center, trials: int, seed: int, threads: int = 1
) -> ExperimentRecord:
    """Frequency of (|g(x)|, |g'(x)|/m) landing in an open ball of diameter 2^-5."""
    dist = min(abs(x - k * math.pi) for k in range(0, int(x / math.pi) + 2))
    if dist < 2**8 / m:
        raise DomainError("x is too close to a multiple of pi for this m")
    if trials < 1:
        raise ParameterError("trials must be positive")
    radius = 2.0**-6
    c1, c2 = float(center[0]), float(center[1])
    ks = np.arange(m + 1, dtype=float)
    u = np.cos(ks * x)
    v = -ks * np.sin(ks * x)

    chunk = 2048

    def one_chunk(c: int) -> np.ndarray:
        lo = c * chunk
        hi = min(lo + chunk, trials)
        bits = np.stack([mask_bits(m, seed, t) for t in range(lo, hi)]).astype(float)
        g = bits @ u
        gp = bits @ v
        d2 = (np.abs(g) - c1) ** 2 + (np.abs(gp) / m - c2) ** 2
        return (d2 < radius * radius).astype(float)

    nchunks = (trials + chunk - 1) // chunk
    parts = _map_trials(one_chunk, nchunks, threads)
    values = np.concatenate(parts)
    return _summarize(
        "small_ball", {"m": m, "x": x, "center": [c1, c2]}, seed, values
    )


def optimal_m(n: int) -> int:
    """Integer argmin of n log(m)/sqrt(m) + m over m in [2, n], ties to smaller m."""
    if n < 16:
        raise ParameterError("n must be at least 16")
    ms = np.arange(2, n + 1, dtype=float)
    q = n * np.log(ms) / np.sqrt(ms) + ms
    return int(ms[int(np.argmin(q))])


@dataclass(frozen=True)
class ConstructionResult:
    """Explicit index set with few zeros, plus construction bookkeeping."""

    index_set: IndexSet
    zeros: int
    n: int
    m: int
    t: int
    envelope_measure: float
    best_attempt: int

    def summary(self, N: int) -> dict:
        return {
            "N": N,
            "m": self.m,
            "t": self.t,
            "n": self.n,
            "Z": self.zeros,
            "ratio": self.zeros / (N * math.log(N)) ** (2.0 / 3.0),
        }


def construct_few_zeros(N: int, attempts: int, seed: int) -> ConstructionResult:
    """Search for an index set A of size exactly N whose polynomial has few zeros.

    Samples masks of degree m = round((N log N)^(2/3)), keeps the one with
    the smallest envelope measure, then picks n so that |A| = N exactly.
    """
    if N < 64:
        raise ParameterError("N must be at least 64")
    if attempts < 1:
        raise ParameterError("attempts must be positive")
    m = int(round((N * math.log(N)) ** (2.0 / 3.0)))
    best = None
    for attempt in range(attempts):
        mask = sample_mask(m, seed, attempt)
        measure = envelope_set(mask, refine_tol=1e-9).measure
        if best is None or measure < best[0]:
            best = (measure, attempt, mask)
    measure, attempt, mask = best
    t = mask.t
    n = N - 1 + t
    f = DiffPoly(n, mask)
    index_set = to_index_set(f)
    assert len(index_set) == N
    z = count_total(f).certified
    return ConstructionResult(index_set, z, n, m, t, measure, attempt)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit of mean zero counts to c1 * n log(m)/sqrt(m) + c2 * m."""

    c1: float
    c2: float
    cells: tuple = field(default_factory=tuple)

    @property
    def ratios(self) -> tuple:
        return tuple(c["ratio"] for c in self.cells)

    def to_dict(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "cells": [dict(c) for c in self.cells],
            "max_ratio": max(self.ratios),
            "min_ratio": min(self.ratios),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def scaling_model_terms(n: int, m: int) -> tuple:
    return (n * math.log(m) / math.sqrt(m), float(m))


def fit_scaling(records) -> ScalingFit:
    """Fit the two-term zero-count model over a grid of experiment records."""
    cells = [r for r in records if r.kind == "zeros"]
    if len(cells) < 6:
        raise ParameterError("need at least 6 zero-count records")
    ns = {r.params["n"] for r in cells}
    ms = {r.params["m"] for r in cells}
    if len(ns) < 2 or len(ms) < 3:
        raise ParameterError("need at least 2 distinct n and 3 distinct m")
    X = np.array([scaling_model_terms(r.params["n"], r.params["m"]) for r in cells])
    y = np.array([r.mean for r in cells])
    if np.linalg.matrix_rank(X) < 2:
        raise RankError("design matrix is singular; cells are collinear")
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    c1, c2 = float(coef[0]), float(coef[1])
    out_cells = []
    for r, row in zip(cells, X):
        model = c1 * row[0] + c2 * row[1]
        out_cells.append(
            {
                "n": r.params["n"],
                "m": r.params["m"],
                "mean": r.mean,
                "model": model,
                "ratio": r.mean / model if model != 0 else math.inf,
            }
        )
    return ScalingFit(c1, c2, tuple(out_cells))
