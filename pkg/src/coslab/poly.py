"""Representation of {0,1}-cosine polynomials g and composites f = D_n - g."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class CoeffMask:
    """Coefficient bits eps_0..eps_m of g(x) = sum_k eps_k cos(kx).

    An empty bit tuple means g == 0; a single bit means g == eps_0.
    """

    bits: tuple

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ParameterError("mask bits must be 0 or 1")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    @property
    def m(self) -> int:
        """Degree bound; -1 for the empty mask."""
        return len(self.bits) - 1

    @property
    def t(self) -> int:
        return sum(self.bits)

    @property
    def indices(self) -> np.ndarray:
        """Sorted indices k with eps_k = 1."""
        return np.flatnonzero(np.asarray(self.bits, dtype=np.uint8))

    @classmethod
    def empty(cls) -> "CoeffMask":
        return cls(())

    @classmethod
    def from_indices(cls, indices, m: int | None = None) -> "CoeffMask":
        indices = sorted(int(i) for i in indices)
        if m is None:
            m = indices[-1] if indices else -1
        bits = [0] * (m + 1)
        for i in indices:
            bits[i] = 1
        return cls(tuple(bits))


@dataclass(frozen=True)
class DiffPoly:
    """f(x) = sum_{k=0}^{n} cos(kx) - sum_{k=0}^{m} eps_k cos(kx)."""

    n: int
    mask: CoeffMask

    def __post_init__(self):
        if self.n < 0:
            raise ParameterError("degree n must be nonnegative")
        if self.mask.m > self.n:
            raise ParameterError(
                "mask degree %d exceeds kernel degree %d" % (self.mask.m, self.n)
            )

    @property
    def T(self) -> float:
        return self.n + 0.5


@dataclass(frozen=True)
class IndexSet:
    """Strictly increasing nonnegative integers A with f_A = sum cos(a x)."""

    a: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.a)
        if any(v < 0 for v in vals):
            raise ParameterError("index set entries must be nonnegative")
        if any(x >= y for x, y in zip(vals, vals[1:])):
            raise ParameterError("index set must be strictly increasing")
        object.__setattr__(self, "a", vals)

    def __len__(self) -> int:
        return len(self.a)

    def to_lines(self) -> str:
        return "\n".join(str(v) for v in self.a) + "\n"

    def to_json(self) -> str:
        return json.dumps(list(self.a))


def eval_g(mask: CoeffMask, x):
    """g(x) = sum over set bits of cos(kx); O(t) per point."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("angle must be finite")
    idx = mask.indices
    if idx.size == 0:
        out = np.zeros_like(arr)
        return float(out) if arr.ndim == 0 else out
    flat = np.atleast_1d(arr)
    out = np.zeros_like(flat)
    ks = idx.astype(float)
    for start in range(0, flat.size, 8192):
        sl = slice(start, start + 8192)
        out[sl] = np.cos(np.multiply.outer(flat[sl], ks)).sum(axis=-1)
    out = out.reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def eval_g_deriv(mask: CoeffMask, r: int, x):
    """Exact r-th derivative of g by direct summation."""
    if r < 0:
        raise DomainError("derivative order must be nonnegative")
    m = mask.m
    if r > 0 and m > 1 and r * math.log10(m) > 300.0:
        raise OverflowError("k**r exceeds the floating range for k = m")
    arr = np.asarray(x, dtype=float)
    idx = mask.indices
    if idx.size == 0:
        out = np.zeros_like(arr)
        return float(out) if arr.ndim == 0 else out
    ks = idx.astype(float)
    phase = r * math.pi / 2.0
    flat = np.atleast_1d(arr)
    out = np.zeros_like(flat)
    for start in range(0, flat.size, 8192):
        sl = slice(start, start + 8192)
        out[sl] = (ks**r * np.cos(np.multiply.outer(flat[sl], ks) + phase)).sum(axis=-1)
    out = out.reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def eval_f(f: DiffPoly, x):
    """Evaluate f = D_n - g through the factored form s(x)(sin(Tx) - phi(x)).

    Falls back to direct summation where |sin(x/2)| is below the kernel's
    switchover; the two branches agree to 1e-9 * (n + 1) on their overlap.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("angle must be finite")
    if np.any(arr < 0.0) or np.any(arr > kernel.TWO_PI):
        raise DomainError("angle outside [0, 2*pi]")
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    sin_half = np.sin(flat / 2.0)
    near = np.abs(sin_half) < kernel.SIN_HALF_CUTOFF
    far = ~near
    if np.any(far):
        xf = flat[far]
        s = 1.0 / (2.0 * sin_half[far])
        phi = kernel.slow_curve_phi(f.mask, xf)
        out[far] = s * (np.sin(f.T * xf) - phi)
    if np.any(near):
        xn = flat[near]
        out[near] = kernel._direct_cosine_sum(f.n, xn) - eval_g(f.mask, xn)
    out = out.reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def eval_f_deriv(f: DiffPoly, r: int, x):
    """r-th derivative of f by direct summation (kernel part minus g part)."""
    return kernel.dirichlet_deriv(f.n, r, x) - eval_g_deriv(f.mask, r, x)


def to_index_set(f: DiffPoly) -> IndexSet:
    """A = {0..n} minus the mask's set bits; f_A is pointwise equal to f."""
    keep = np.ones(f.n + 1, dtype=bool)
    keep[f.mask.indices] = False
    return IndexSet(tuple(int(v) for v in np.flatnonzero(keep)))
