"""Torus and sequence norms for the nonlinear weight functions.

The torus side integrates with the uniform periodic trapezoidal rule,
doubling the grid until two successive approximations agree to a relative
tolerance.  The integrands are periodic and, away from isolated zeros of the
weight, analytic, so the refinement converges geometrically; at weight zeros
the q-th power is still differentiable and refinement remains fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AliasRiskError
from .nft_core import CoefficientSequence, product_on_grid_arrays, _log_a_sq

_TINY = 1e-300


@dataclass(frozen=True)
class ExponentPair:
    """Conjugate exponents 1/p + 1/q = 1 with q derived (and stored) from p.

    The canonical range is 1 < p < 2; the endpoints p = 1 (q = inf) and
    p = 2 (q = 2) are accepted because they serve as reference identities.
    """

    p: float
    q: float = field(default=math.nan)

    def __post_init__(self):
        p = float(self.p)
        if not 1.0 <= p <= 2.0:
            raise ValueError(f"p = {p!r} outside [1, 2]")
        q = math.inf if p == 1.0 else p / (p - 1.0)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_endpoint(self) -> bool:
        return self.p in (1.0, 2.0)


@dataclass(frozen=True)
class QuadratureConfig:
    initial_grid: int = 256
    max_grid: int = 2**20
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.initial_grid < 1 or self.initial_grid & (self.initial_grid - 1):
            raise ValueError("initial_grid must be a positive power of two")
        if self.max_grid < self.initial_grid:
            raise ValueError("max_grid must be >= initial_grid")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


@dataclass(frozen=True)
class NormResult:
    """A norm value with the grid and error estimate that certified it.

    ``grid_used`` is the coarsest grid whose doubling moved the value by at
    most rel_tol (the value itself comes from the doubled grid); ``history``
    keeps one (grid, value, est) triple per refinement step.
    """

    value: float
    grid_used: int
    est_rel_error: float
    converged: bool = True
    history: tuple[tuple[int, float, float], ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "grid_used": self.grid_used,
            "est_rel_error": self.est_rel_error,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# sampling helpers


class _FunctionSampler:
    """Adapts a callable f(t) to the on_grid protocol used by the engines.

    f may be vectorized over numpy arrays; plain scalar callables are looped.
    """

    def __init__(self, f):
        self._f = f
        self._cache: dict[int, np.ndarray] = {}

    def on_grid(self, grid_size: int) -> np.ndarray:
        out = self._cache.get(grid_size)
        if out is None:
            ts = np.arange(grid_size, dtype=float) / grid_size
            try:
                out = np.asarray(self._f(ts), dtype=float)
                if out.shape != ts.shape:
                    raise TypeError
            except TypeError:
                out = np.array([float(self._f(float(t))) for t in ts])
            self._cache[grid_size] = out
        return out


class WeightSampler:
    """Cached samples of the torus weight (log|a(t)|^2)^(1/2) for one F.

    One instance is shared across quadratures at several exponents so the
    product is evaluated once per grid level.
    """

    def __init__(self, seq: CoefficientSequence):
        self.seq = seq
        self._logsq: dict[int, np.ndarray] = {}
        self._weight: dict[int, np.ndarray] = {}

    def logsq_on_grid(self, grid_size: int) -> np.ndarray:
        out = self._logsq.get(grid_size)
        if out is None:
            ts = np.arange(grid_size, dtype=float) / grid_size
            _, b = product_on_grid_arrays(self.seq, ts)
            # log|a|^2 = log(1 + |b|^2) by the group constraint; the |b|
            # route is exact at weight zeros where |a|^2 - 1 cancels badly
            out = np.log1p(np.abs(b) ** 2)
            self._logsq[grid_size] = out
        return out

    def on_grid(self, grid_size: int) -> np.ndarray:
        out = self._weight.get(grid_size)
        if out is None:
            out = np.sqrt(self.logsq_on_grid(grid_size))
            self._weight[grid_size] = out
        return out


def _as_sampler(f):
    return f if hasattr(f, "on_grid") else _FunctionSampler(f)


def _pow_q(x: np.ndarray, q: float) -> np.ndarray:
    """x^q for x >= 0 via exp(q log x), with x = 0 short-circuited to 0."""
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(q * np.log(x[pos]))
    return out


def _refine(sampler, statistic, cfg: QuadratureConfig) -> NormResult:
    """Double the grid until two successive statistics agree to rel_tol."""
    grid = cfg.initial_grid
    value = statistic(sampler.on_grid(grid))
    history = []
    est = math.inf
    while 2 * grid <= cfg.max_grid:
        nxt = statistic(sampler.on_grid(2 * grid))
        est = abs(nxt - value) / max(abs(nxt), _TINY)
        history.append((grid, nxt, est))
        if est <= cfg.rel_tol:
            return NormResult(nxt, grid, est, True, tuple(history))
        grid, value = 2 * grid, nxt
    return NormResult(value, grid, est, False, tuple(history))


# ---------------------------------------------------------------------------
# public operations


def nl_weight_sequence(seq: CoefficientSequence) -> np.ndarray:
    """W_n = (log A_n^2)^(1/2) = (-log(1 - |F_n|^2))^(1/2) over the window.

    Always dominates |F_n| entrywise.
    """
    return np.sqrt([_log_a_sq(m) for m in seq.moduli()])


def nl_weight_torus(seq: CoefficientSequence, t: float) -> float:
    """(log|a(t)|^2)^(1/2); zero exactly where |a(t)| = 1.

    Evaluated as (log(1 + |b(t)|^2))^(1/2), which is the same function on
    the group but loses no precision where the weight vanishes.
    """
    ts = np.array([t], dtype=float)
    _, b = product_on_grid_arrays(seq, ts)
    return float(np.sqrt(np.log1p(abs(complex(b[0])) ** 2)))


def lq_norm_periodic(f, q: float, cfg: QuadratureConfig) -> NormResult:
    """(integral of f^q over one period)^(1/q) by refining trapezoid sums.

    ``f`` is a nonnegative periodic function on [0, 1): either a callable
    (vectorized over numpy arrays or scalar) or any object exposing
    ``on_grid(M)`` returning its samples at j / M.  ``q = inf`` uses the
    sampled maximum, with one refinement doubling as the error estimate.
    """
    if q != math.inf and q < 1.0:
        raise ValueError(f"q = {q!r} must be >= 1")
    sampler = _as_sampler(f)
    if q == math.inf:
        return _refine(sampler, lambda s: float(np.max(s)) if s.size else 0.0, cfg)

    def stat(samples: np.ndarray) -> float:
        mean = float(np.mean(_pow_q(samples, q)))
        return mean ** (1.0 / q) if mean > 0 else 0.0

    return _refine(sampler, stat, cfg)


def lp_sequence_norm(w, p: float) -> float:
    """(sum |w_n|^p)^(1/p); max for p = inf; 0 for empty input.

    Accepts real or complex entries; only the moduli enter.
    """
    arr = np.abs(np.asarray(list(w))).astype(float)
    if arr.size == 0:
        return 0.0
    if p == math.inf:
        return float(arr.max())
    if p < 1.0:
        raise ValueError(f"p = {p!r} must be >= 1")
    mx = float(arr.max())
    if mx == 0.0:
        return 0.0
    return mx * float(np.sum((arr / mx) ** p)) ** (1.0 / p)


def parseval_residual(
    seq: CoefficientSequence, cfg: QuadratureConfig, full_output: bool = False
):
    """Integral of log|a(t)|^2 minus the sum of log A_n^2.

    The two sides agree identically for every finitely supported sequence;
    the returned residual measures quadrature and rounding error only, and
    stays below 1e-9 for well-resolved inputs.  With ``full_output`` the
    NormResult of the integral side is returned as well.
    """
    sampler = WeightSampler(seq)

    class _LogSq:
        def on_grid(self, grid_size):
            return sampler.logsq_on_grid(grid_size)

    integral = _refine(_LogSq(), lambda s: float(np.mean(s)), cfg)
    seq_side = float(sum(_log_a_sq(m) for m in seq.moduli()))
    residual = integral.value - seq_side
    if full_output:
        return residual, integral
    return residual


def frequency_support(
    samples, claimed_bandwidth: int | None = None, rel_threshold: float = 1e-9
) -> tuple[int, int] | None:
    """Smallest integer frequency interval carrying the sampled signal.

    Runs a DFT on uniform-grid samples and returns (lo, hi) covering every
    index whose coefficient magnitude exceeds ``rel_threshold`` times the
    maximum, with indices mapped to the centered range [-M/2, M/2).  Returns
    None when all coefficients vanish.  If a bandwidth is claimed, grids
    smaller than 2*bandwidth + 2 are rejected as alias-prone.
    """
    arr = np.asarray(samples, dtype=complex)
    grid = arr.size
    if claimed_bandwidth is not None and grid < 2 * claimed_bandwidth + 2:
        raise AliasRiskError(
            f"grid {grid} below 2*{claimed_bandwidth}+2; aliasing possible"
        )
    coeffs = np.fft.fft(arr) / grid
    freqs = np.rint(np.fft.fftfreq(grid) * grid).astype(int)
    mags = np.abs(coeffs)
    peak = float(mags.max())
    if peak == 0.0:
        return None
    keep = freqs[mags > rel_threshold * peak]
    return int(keep.min()), int(keep.max())
